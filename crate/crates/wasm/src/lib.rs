//! Browser bindings: decompose a matrix typed into the page, show its Bruhat
//! form, and generate seeded random inputs.
//!
//! Every function takes the matrix file text (`rows cols` header, then the
//! entries) and returns a JSON string.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tridecomp::derive::bruhat_from;
use tridecomp::io::{format_matrix, parse_matrix, DomainKind, FactorsDocument};
use tridecomp::oracle::{verify, VerifyReport};
use tridecomp::{decompose_with, Config, DenseMatrix, Domain, Poly, SplitPolicy};
use wasm_bindgen::prelude::*;

type Outcome = Result<Value, String>;

fn report_json(r: &VerifyReport) -> Value {
    r.checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
        .collect()
}

fn fraction_rows<T: Domain>(a: &DenseMatrix<tridecomp::Frac<T>>) -> Value {
    a.to_rows()
        .iter()
        .map(|row| row.iter().map(ToString::to_string).collect::<Vec<_>>())
        .collect()
}

fn factor<T: Domain>(text: &str, policy: SplitPolicy, with_bruhat: bool) -> Outcome {
    let a: DenseMatrix<T> = parse_matrix(text).map_err(|e| e.to_string())?;
    let config = Config::with_policy(policy).sequential();
    let f = decompose_with(&a, &config).map_err(|e| e.to_string())?;
    let report = verify(&a, &f);
    let mut doc = FactorsDocument::from_factorization(&f).map_err(|e| e.to_string())?;
    doc.verified = report.passed();
    let mut out = json!({
        "factors": serde_json::to_value(&doc).map_err(|e| e.to_string())?,
        "checks": report_json(&report),
    });
    if with_bruhat {
        let b = bruhat_from(&f).map_err(|e| e.to_string())?;
        let sa = a.to_fractions().permute(&b.s, tridecomp::Side::Rows, false);
        let product = b.v.mat_mul(&b.sd()).and_then(|vs| vs.mat_mul(&b.u));
        let holds = matches!((sa, product), (Ok(x), Ok(y)) if x == y);
        out["bruhat"] = json!({
            "V": fraction_rows(&b.v),
            "SD": fraction_rows(&b.sd()),
            "U": fraction_rows(&b.u),
            "holds": holds,
        });
    }
    Ok(out)
}

fn dispatch(text: &str, domain: &str, split: &str, with_bruhat: bool) -> Result<String, JsError> {
    let kind: DomainKind = domain.parse().map_err(|e: String| JsError::new(&e))?;
    let policy: SplitPolicy = split.parse().map_err(|e: String| JsError::new(&e))?;
    let value = match kind {
        DomainKind::Int => factor::<i64>(text, policy, with_bruhat),
        DomainKind::BigInt => factor::<BigInt>(text, policy, with_bruhat),
        DomainKind::Rational => factor::<num_rational::BigRational>(text, policy, with_bruhat),
        DomainKind::Poly => factor::<Poly>(text, policy, with_bruhat),
    }
    .map_err(|e| JsError::new(&e))?;
    Ok(value.to_string())
}

/// Factors the matrix and runs the independent checks.
#[wasm_bindgen]
pub fn decompose(text: &str, domain: &str, split: &str) -> Result<String, JsError> {
    dispatch(text, domain, split, false)
}

/// As [`decompose`], plus `S·A = V·SD·U` for square input.
#[wasm_bindgen]
pub fn bruhat(text: &str, domain: &str, split: &str) -> Result<String, JsError> {
    dispatch(text, domain, split, true)
}

/// A seeded `rows × cols` integer matrix of rank at most `rank`, as file
/// text.
#[wasm_bindgen]
pub fn random_matrix(rows: usize, cols: usize, rank: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = rank.min(rows).min(cols);
    let mut draw = |r, c, bound: i64| -> DenseMatrix<BigInt> {
        DenseMatrix::from_fn(r, c, |_, _| BigInt::from(rng.gen_range(-bound..=bound)))
    };
    let a = if rank == rows.min(cols) {
        draw(rows, cols, 9)
    } else {
        let left = draw(rows, rank, 3);
        let right = draw(rank, cols, 3);
        left.mat_mul(&right).unwrap_or_else(|_| DenseMatrix::zeros(rows, cols))
    };
    format_matrix(&a)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = "6 6\n3 2 3 5 1 2\n1 3 4 2 3 4\n3 2 3 5 5 6\n1 3 4 2 2 1\n2 1 3 2 2 3\n2 1 3 2 2 3\n";

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn worked_example() {
        let out = parse(&decompose(WORKED, "bigint", "pow2").unwrap());
        assert_eq!(out["factors"]["rank"], 5);
        assert_eq!(out["factors"]["verified"], true);
        assert!(out["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    }

    #[test]
    fn bruhat_holds() {
        let out = parse(&bruhat(WORKED, "int", "half").unwrap());
        assert_eq!(out["bruhat"]["holds"], true);
        assert_eq!(out["bruhat"]["SD"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn random_is_seeded_and_rank_limited() {
        let a = random_matrix(4, 5, 2, 9);
        assert_eq!(a, random_matrix(4, 5, 2, 9));
        let out = parse(&decompose(&a, "bigint", "pow2").unwrap());
        assert!(out["factors"]["rank"].as_u64().unwrap() <= 2);
        assert_eq!(out["factors"]["verified"], true);
    }
}
