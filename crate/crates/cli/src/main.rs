use std::fmt::Display;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use tridecomp::bench;
use tridecomp::derive::{bruhat_from, materialize_d};
use tridecomp::io::{parse_matrix, DomainKind, FactorsDocument, IoError};
use tridecomp::oracle::verify;
use tridecomp::{Config, DenseMatrix, Domain, Error, Factorization, Poly, SplitPolicy};

/// Exact fraction-free LDU and Bruhat decomposition.
#[derive(Parser, Debug)]
#[command(name = "tridecomp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factor a matrix file as A = P·L·D·U·Q.
    Decompose(DecomposeArgs),
    /// Check a factor document against the matrix it claims to factor.
    Verify(VerifyArgs),
    /// Time seeded random decompositions and print CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    /// Matrix file, or `-` for standard input.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "bigint", value_parser = parse_domain)]
    domain: DomainKind,
    /// `pow2`, `half`, or explicit block sizes such as `4,2`.
    #[arg(long, default_value = "pow2")]
    split: SplitPolicy,
    #[arg(long, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
    /// Run the independent checks and fail with status 2 if any fails.
    #[arg(long)]
    check: bool,
    /// Include the Bruhat form (square input only).
    #[arg(long)]
    bruhat: bool,
    /// Evaluate independent branches on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// JSON document produced by `decompose`.
    #[arg(long)]
    factors: PathBuf,
    #[arg(long, default_value = "bigint", value_parser = parse_domain)]
    domain: DomainKind,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
    sizes: Vec<usize>,
    #[arg(long, default_value = "bigint", value_parser = parse_domain)]
    domain: DomainKind,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Repetitions per size; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value = "pow2")]
    split: SplitPolicy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Pretty,
}

fn parse_domain(s: &str) -> Result<DomainKind, String> {
    s.parse()
}

/// Failure classes and their exit statuses.
#[derive(Debug)]
enum Failure {
    Input(String),
    Verification(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Verification(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Verification(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Factor(inner) => inner.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    let mut text = String::new();
    let result = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    result.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(text)
}

/// Runs `$body` with `$t` bound to the element type named by `$kind`.
macro_rules! with_domain {
    ($kind:expr, $t:ident => $body:expr) => {
        match $kind {
            DomainKind::Int => {
                type $t = i64;
                $body
            }
            DomainKind::BigInt => {
                type $t = BigInt;
                $body
            }
            DomainKind::Rational => {
                type $t = BigRational;
                $body
            }
            DomainKind::Poly => {
                type $t = Poly;
                $body
            }
        }
    };
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match &cli.command {
        Command::Decompose(args) => with_domain!(args.domain, T => decompose::<T>(args)),
        Command::Verify(args) => with_domain!(args.domain, T => check_document::<T>(args)),
        Command::Bench(args) => with_domain!(args.domain, T => run_bench::<T>(args)),
    };
    match outcome {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn decompose<T: Domain>(args: &DecomposeArgs) -> Result<String, Failure> {
    let a: DenseMatrix<T> = parse_matrix(&read_input(&args.input)?)?;
    let mut config = Config::with_policy(args.split.clone());
    if args.sequential {
        config = config.sequential();
    }
    let f = tridecomp::decompose_with(&a, &config)?;
    let mut doc = FactorsDocument::from_factorization(&f)?;
    if args.bruhat {
        doc = doc.with_bruhat(&f)?;
    }
    let report = args.check.then(|| verify(&a, &f));
    doc.verified = report.as_ref().is_some_and(|r| r.passed());
    let out = match args.emit {
        Emit::Json => format!("{}\n", doc.to_json()),
        Emit::Pretty => pretty(&f, args.bruhat)?,
    };
    match report {
        Some(r) if !r.passed() => {
            print!("{out}");
            Err(Failure::Verification(format!("verification failed\n{r}")))
        }
        Some(r) if args.emit == Emit::Pretty => Ok(format!("{out}\n{r}")),
        _ => Ok(out),
    }
}

fn check_document<T: Domain>(args: &VerifyArgs) -> Result<String, Failure> {
    let a: DenseMatrix<T> = parse_matrix(&read_input(&args.input)?)?;
    let mut doc = FactorsDocument::from_json(&read_input(&args.factors)?)?;
    let f: Factorization<T> = doc.to_factorization()?;
    if f.shape() != a.shape() {
        return Err(Failure::Input(format!(
            "factors are {:?} but the matrix is {:?}",
            f.shape(),
            a.shape()
        )));
    }
    let report = verify(&a, &f);
    doc.verified = report.passed();
    let json = format!("{}\n", doc.to_json());
    if report.passed() {
        Ok(json)
    } else {
        print!("{json}");
        Err(Failure::Verification(format!("verification failed\n{report}")))
    }
}

fn run_bench<T: Domain>(args: &BenchArgs) -> Result<String, Failure> {
    if args.sizes.contains(&0) {
        return Err(Failure::Input("sizes must be at least 1".into()));
    }
    let config = Config::with_policy(args.split.clone());
    let rows = bench::run::<T>(&args.sizes, args.seed, args.reps, &config)?;
    Ok(bench::to_csv(&rows))
}

fn render<T: Display>(rows: Vec<Vec<T>>) -> Vec<String> {
    let cells: Vec<Vec<String>> = rows
        .into_iter()
        .map(|r| r.iter().map(ToString::to_string).collect())
        .collect();
    let width = cells.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(0);
    cells
        .iter()
        .map(|r| {
            let padded: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
            format!("[{}]", padded.join(" "))
        })
        .collect()
}

/// Lays out labelled blocks left to right, separated by `sep`.
fn side_by_side(blocks: &[(&str, Vec<String>)], sep: &str) -> String {
    let height = blocks.iter().map(|(_, b)| b.len()).max().unwrap_or(0);
    let widths: Vec<usize> = blocks
        .iter()
        .map(|(label, b)| {
            b.iter()
                .map(|l| l.chars().count())
                .chain([label.chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let gap = " ".repeat(sep.chars().count());
    let mut out = String::new();
    let labels: Vec<String> = blocks
        .iter()
        .zip(&widths)
        .map(|((label, _), w)| format!("{label:^w$}"))
        .collect();
    out.push_str(labels.join(&gap).trim_end());
    out.push('\n');
    let middle = height.saturating_sub(1) / 2;
    for row in 0..height {
        let line: Vec<String> = blocks
            .iter()
            .zip(&widths)
            .map(|((_, b), w)| format!("{:<w$}", b.get(row).map(String::as_str).unwrap_or("")))
            .collect();
        let joiner = if row == middle { sep } else { &gap };
        out.push_str(line.join(joiner).trim_end());
        out.push('\n');
    }
    out
}

fn pretty<T: Domain>(f: &Factorization<T>, with_bruhat: bool) -> Result<String, Failure> {
    let d = materialize_d(&f.diagonal())?;
    let blocks = [
        ("P", render(f.p.to_matrix::<T>().to_rows())),
        ("L", render(f.l.to_rows())),
        ("D", render(d.to_rows())),
        ("U", render(f.u.to_rows())),
        ("Q", render(f.q.to_matrix::<T>().to_rows())),
    ];
    let mut out = format!("A = P·L·D·U·Q\n\n{}", side_by_side(&blocks, " · "));
    let alphas: Vec<String> = f.alphas.values.iter().map(ToString::to_string).collect();
    out.push_str(&format!("\nrank {}\nalphas [{}]\n", f.rank(), alphas.join(", ")));
    if with_bruhat {
        let b = bruhat_from(f)?;
        let blocks = [
            ("V", render(b.v.to_rows())),
            ("SD", render(b.sd().to_rows())),
            ("U", render(b.u.to_rows())),
        ];
        out.push_str(&format!("\nS·A = V·SD·U\n\n{}", side_by_side(&blocks, " · ")));
    }
    Ok(out)
}
