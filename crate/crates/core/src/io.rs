//! Text matrix files and the JSON factor document.
//!
//! A matrix file starts with a `rows cols` header followed by `rows·cols`
//! whitespace-separated element literals. Blank lines and lines starting
//! with `#` are ignored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::derive::{bruhat_from, diagonal_entries, BruhatFactors};
use crate::domain::{Domain, DomainError};
use crate::error::Error;
use crate::ldu::{AlphaSequence, Factorization};
use crate::matrix::{DenseMatrix, Frac, FractionMatrix, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}, column {column}: {source}")]
    Token {
        line: usize,
        column: usize,
        source: DomainError,
    },
    #[error("expected {expected} entries, found {found}")]
    Count { expected: usize, found: usize },
    #[error("malformed document: {0}")]
    Document(String),
    #[error(transparent)]
    Factor(#[from] Error),
}

/// The element domains selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Int,
    BigInt,
    Rational,
    Poly,
}

impl DomainKind {
    pub const ALL: [DomainKind; 4] = [
        DomainKind::Int,
        DomainKind::BigInt,
        DomainKind::Rational,
        DomainKind::Poly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DomainKind::Int => "int",
            DomainKind::BigInt => "bigint",
            DomainKind::Rational => "rational",
            DomainKind::Poly => "poly",
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DomainKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown domain `{s}` (expected int, bigint, rational or poly)"))
    }
}

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let trimmed = line.trim_start();
        (!trimmed.is_empty() && !trimmed.starts_with('#')).then_some((i + 1, line))
    })
}

fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace().map(move |tok| {
        let offset = tok.as_ptr() as usize - line.as_ptr() as usize;
        (line[..offset].chars().count() + 1, tok)
    })
}

/// Parses a matrix file over `T`.
pub fn parse_matrix<T: Domain>(text: &str) -> Result<DenseMatrix<T>, IoError> {
    let mut lines = significant_lines(text);
    let (header_line, header) = lines.next().ok_or(IoError::Header {
        line: 1,
        message: "missing `rows cols` header".into(),
    })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|e| IoError::Header {
            line: header_line,
            message: format!("bad dimension: {e}"),
        })?;
    let [rows, cols] = dims[..] else {
        return Err(IoError::Header {
            line: header_line,
            message: format!("expected two dimensions, found {}", dims.len()),
        });
    };
    let expected = rows * cols;
    let mut data = Vec::with_capacity(expected);
    let mut found = 0;
    for (line, body) in lines {
        for (column, tok) in tokens(body) {
            found += 1;
            if found <= expected {
                let value = T::parse_literal(tok).map_err(|source| IoError::Token {
                    line,
                    column,
                    source,
                })?;
                data.push(value);
            }
        }
    }
    if found != expected {
        return Err(IoError::Count { expected, found });
    }
    Ok(DenseMatrix::new(rows, cols, data)?)
}

/// Writes a matrix in the file format read by [`parse_matrix`].
pub fn format_matrix<T: Domain>(a: &DenseMatrix<T>) -> String {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(ToString::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// An exact fraction with decimal (or polynomial) string parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionEntry {
    pub num: String,
    pub den: String,
}

impl<T: Domain> From<&Frac<T>> for FractionEntry {
    fn from(f: &Frac<T>) -> Self {
        FractionEntry {
            num: f.num().to_string(),
            den: f.den().to_string(),
        }
    }
}

impl FractionEntry {
    pub fn parse<T: Domain>(&self) -> Result<Frac<T>, IoError> {
        let part = |s: &str| T::parse_literal(s).map_err(|e| IoError::Document(e.to_string()));
        Frac::new(part(&self.num)?, part(&self.den)?).map_err(|e| IoError::Document(e.to_string()))
    }
}

/// `SD` stored as a permutation and the diagonal it scales.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledPermutation {
    pub perm: Vec<usize>,
    pub diag: Vec<FractionEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruhatDocument {
    #[serde(rename = "V")]
    pub v: Vec<Vec<String>>,
    #[serde(rename = "SD")]
    pub sd: ScaledPermutation,
    #[serde(rename = "U")]
    pub u: Vec<Vec<String>>,
}

/// Serialized form of a factorization. Elements are strings in the domain's
/// literal syntax so nothing passes through floating point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorsDocument {
    pub domain: String,
    pub rank: usize,
    pub alphas: Vec<String>,
    #[serde(rename = "P")]
    pub p: Vec<usize>,
    #[serde(rename = "Q")]
    pub q: Vec<usize>,
    #[serde(rename = "L")]
    pub l: Vec<Vec<String>>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<String>>,
    #[serde(rename = "D")]
    pub d: Vec<FractionEntry>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<Vec<String>>>,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bruhat: Option<BruhatDocument>,
    pub verified: bool,
}

fn strings<T: Domain>(a: &DenseMatrix<T>) -> Vec<Vec<String>> {
    a.to_rows()
        .into_iter()
        .map(|row| row.iter().map(ToString::to_string).collect())
        .collect()
}

fn integral_strings<T: Domain>(a: &FractionMatrix<T>) -> Result<Vec<Vec<String>>, IoError> {
    let ints = a
        .try_map(|f| {
            f.to_integral()
                .ok_or_else(|| Error::Invariant(format!("non-integral entry {f}")))
        })?;
    Ok(strings(&ints))
}

fn parse_rows<T: Domain>(rows: &[Vec<String>], what: &str) -> Result<DenseMatrix<T>, IoError> {
    let parsed = rows
        .iter()
        .map(|row| row.iter().map(|s| T::parse_literal(s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| IoError::Document(format!("{what}: {e}")))?;
    if parsed.is_empty() {
        return Err(IoError::Document(format!("{what} is empty")));
    }
    Ok(DenseMatrix::from_rows(parsed)?)
}

impl FactorsDocument {
    pub fn from_factorization<T: Domain>(f: &Factorization<T>) -> Result<Self, IoError> {
        let (n, m) = f.shape();
        let mut d: Vec<FractionEntry> = diagonal_entries(&f.diagonal())?
            .iter()
            .map(FractionEntry::from)
            .collect();
        d.resize(
            n.min(m),
            FractionEntry {
                num: T::zero().to_string(),
                den: T::one().to_string(),
            },
        );
        Ok(FactorsDocument {
            domain: T::NAME.to_string(),
            rank: f.rank(),
            alphas: f.alphas.values.iter().map(ToString::to_string).collect(),
            p: f.p.images().to_vec(),
            q: f.q.images().to_vec(),
            l: strings(&f.l),
            u: strings(&f.u),
            d,
            m: Some(strings(&f.m)),
            w: Some(strings(&f.w)),
            bruhat: None,
            verified: false,
        })
    }

    /// Adds the Bruhat form; the factorization must be square.
    pub fn with_bruhat<T: Domain>(mut self, f: &Factorization<T>) -> Result<Self, IoError> {
        let b: BruhatFactors<T> = bruhat_from(f)?;
        self.bruhat = Some(BruhatDocument {
            v: integral_strings(&b.v)?,
            sd: ScaledPermutation {
                perm: b.w.images().to_vec(),
                diag: b.delta.iter().map(FractionEntry::from).collect(),
            },
            u: integral_strings(&b.u)?,
        });
        Ok(self)
    }

    /// Rebuilds the factorization at the top-level context `α⁰ = 1`.
    pub fn to_factorization<T: Domain>(&self) -> Result<Factorization<T>, IoError> {
        if self.domain != T::NAME {
            return Err(IoError::Document(format!(
                "document domain `{}` does not match `{}`",
                self.domain,
                T::NAME
            )));
        }
        let (Some(m), Some(w)) = (&self.m, &self.w) else {
            return Err(IoError::Document("M and W are required".into()));
        };
        let alphas = self
            .alphas
            .iter()
            .map(|s| T::parse_literal(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| IoError::Document(format!("alphas: {e}")))?;
        if alphas.len() != self.rank {
            return Err(IoError::Document(format!(
                "rank {} but {} alphas",
                self.rank,
                alphas.len()
            )));
        }
        let rank_square = |rows: &[Vec<String>], what: &str| -> Result<DenseMatrix<T>, IoError> {
            if self.rank == 0 {
                return Ok(DenseMatrix::zeros(0, 0));
            }
            parse_rows(rows, what)
        };
        Ok(Factorization {
            p: Permutation::from_images(self.p.clone())?,
            l: parse_rows(&self.l, "L")?,
            alphas: AlphaSequence::new(T::one(), alphas),
            u: parse_rows(&self.u, "U")?,
            q: Permutation::from_images(self.q.clone())?,
            m: rank_square(m, "M")?,
            w: rank_square(w, "W")?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        serde_json::from_str(text).map_err(|e| IoError::Document(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Poly;
    use crate::ldu::{decompose, SplitPolicy};
    use num_bigint::BigInt;

    #[test]
    fn parses_examples() {
        let a: DenseMatrix<i64> = parse_matrix("2 2\n3 2\n1 3\n").unwrap();
        assert_eq!(a, DenseMatrix::from_i64_rows(&[vec![3, 2], vec![1, 3]]).unwrap());
        let z: DenseMatrix<BigInt> = parse_matrix("1 1\n0\n").unwrap();
        assert!(z.is_zero() && z.shape() == (1, 1));
        let p: DenseMatrix<Poly> = parse_matrix("2 1\nx\nx^2\n").unwrap();
        assert_eq!(p.get(1, 0), &Poly::from_coeffs(&[0, 0, 1]));
        let c: DenseMatrix<i64> = parse_matrix("# comment\n\n1 2\n  4   5\n").unwrap();
        assert_eq!(c.row(0), &[4, 5]);
    }

    #[test]
    fn reports_locations() {
        let err = parse_matrix::<i64>("2 2\n3 2\n1 y\n").unwrap_err();
        assert!(matches!(err, IoError::Token { line: 3, column: 3, .. }), "{err}");
        let err = parse_matrix::<i64>("2 2\n3 2 1\n").unwrap_err();
        assert_eq!(err, IoError::Count { expected: 4, found: 3 });
        let err = parse_matrix::<i64>("2 2\n1 2 3 4 5\n").unwrap_err();
        assert_eq!(err, IoError::Count { expected: 4, found: 5 });
        assert!(matches!(parse_matrix::<i64>("2\n1 2\n"), Err(IoError::Header { line: 1, .. })));
        assert!(matches!(parse_matrix::<i64>(""), Err(IoError::Header { .. })));
        assert!(matches!(parse_matrix::<i64>("a b\n"), Err(IoError::Header { .. })));
    }

    #[test]
    fn format_round_trip() {
        let a = DenseMatrix::<BigInt>::from_i64_rows(&[vec![-3, 2, 0], vec![1, 30, 7]]).unwrap();
        assert_eq!(parse_matrix::<BigInt>(&format_matrix(&a)).unwrap(), a);
    }

    #[test]
    fn document_round_trip() {
        let a = DenseMatrix::<BigInt>::from_i64_rows(&[vec![0, 2, 1], vec![4, 2, 2], vec![2, 1, 1]]).unwrap();
        let f = decompose(&a, &SplitPolicy::Pow2).unwrap();
        let doc = FactorsDocument::from_factorization(&f).unwrap().with_bruhat(&f).unwrap();
        let back = FactorsDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_factorization::<BigInt>().unwrap(), f);
        assert_eq!(back.d.len(), 3);
        assert!(back.to_factorization::<i64>().is_err());
    }

    #[test]
    fn domain_names() {
        for k in DomainKind::ALL {
            assert_eq!(k.name().parse::<DomainKind>().unwrap(), k);
        }
        assert!("real".parse::<DomainKind>().is_err());
    }
}
