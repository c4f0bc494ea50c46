//! Brute-force ground truth, written independently of the engine: minors
//! by cofactor expansion, determinants by fraction-free elimination, rank
//! over the fraction field, and a full verification report.

use std::fmt;

use crate::derive::{conjugated_l, conjugated_u, diagonal_entries, materialize_d};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::ldu::Factorization;
use crate::matrix::{DenseMatrix, Frac, FractionMatrix, Side};

/// Largest minor order evaluated by cofactor expansion.
pub const COFACTOR_LIMIT: usize = 6;

/// Row and column index sets of a minor, strictly increasing and of equal
/// size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorSpec {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl MinorSpec {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        let increasing = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        if rows.len() != cols.len() || !increasing(&rows) || !increasing(&cols) {
            return Err(Error::OutOfRange { op: "minor" });
        }
        Ok(MinorSpec { rows, cols })
    }

    /// Leading principal minor of order `k`.
    pub fn leading(k: usize) -> Self {
        MinorSpec {
            rows: (0..k).collect(),
            cols: (0..k).collect(),
        }
    }

    /// Rows `0..k-1` plus `i`, columns `0..k-1` plus `j` (`i, j ≥ k-1`).
    pub fn bordered(k: usize, i: usize, j: usize) -> Self {
        let mut rows: Vec<usize> = (0..k.saturating_sub(1)).collect();
        let mut cols = rows.clone();
        if k > 0 {
            rows.push(i);
            cols.push(j);
        }
        MinorSpec { rows, cols }
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }
}

pub fn minor<T: Domain>(a: &DenseMatrix<T>, spec: &MinorSpec) -> Result<T> {
    let fits = |v: &[usize], n: usize| v.last().is_none_or(|&x| x < n);
    if !fits(&spec.rows, a.rows()) || !fits(&spec.cols, a.cols()) {
        return Err(Error::OutOfRange { op: "minor" });
    }
    let sub = a.select(&spec.rows, &spec.cols);
    if spec.order() <= COFACTOR_LIMIT {
        cofactor_det(&sub)
    } else {
        bareiss_det(&sub)
    }
}

/// Laplace expansion along the first row.
pub fn cofactor_det<T: Domain>(a: &DenseMatrix<T>) -> Result<T> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::NotSquare(n, a.cols()));
    }
    fn expand<T: Domain>(a: &DenseMatrix<T>, rows: &[usize], cols: &mut Vec<usize>) -> Result<T> {
        let Some((&r, rest)) = rows.split_first() else {
            return Ok(T::one());
        };
        let mut total = T::zero();
        for pos in 0..cols.len() {
            let entry = a.get(r, cols[pos]);
            if entry.is_zero() {
                continue;
            }
            let c = cols.remove(pos);
            let sub = expand(a, rest, cols)?;
            cols.insert(pos, c);
            let term = entry.try_mul(&sub)?;
            total = if pos % 2 == 0 {
                total.try_add(&term)?
            } else {
                total.try_sub(&term)?
            };
        }
        Ok(total)
    }
    let rows: Vec<usize> = (0..n).collect();
    expand(a, &rows, &mut (0..n).collect())
}

/// Fraction-free elimination with row exchanges.
pub fn bareiss_det<T: Domain>(a: &DenseMatrix<T>) -> Result<T> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::NotSquare(n, a.cols()));
    }
    let mut m = a.to_rows();
    let mut prev = T::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return Ok(T::zero());
        };
        if p != k {
            m.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[k][k]
                    .try_mul(&m[i][j])?
                    .try_sub(&m[i][k].try_mul(&m[k][j])?)?;
                m[i][j] = v.exact_div(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let det = if n == 0 { T::one() } else { m[n - 1][n - 1].clone() };
    Ok(if negate { det.try_neg()? } else { det })
}

/// The matrix of bordered minors `α^{k+1}_{i,j}` for `k ≤ i < s`,
/// `k ≤ j < p`.
pub fn minors_matrix<T: Domain>(a: &DenseMatrix<T>, k: usize, s: usize, p: usize) -> Result<DenseMatrix<T>> {
    if k >= s || k >= p || s > a.rows() || p > a.cols() {
        return Err(Error::OutOfRange { op: "minors_matrix" });
    }
    let mut rows = Vec::with_capacity(s - k);
    for i in k..s {
        rows.push(
            (k..p)
                .map(|j| minor(a, &MinorSpec::bordered(k + 1, i, j)))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    DenseMatrix::from_rows(rows)
}

/// Checks `det(𝓐^k_s) = α^s·(α^k)^{s-k-1}` on a square matrix.
pub fn sylvester_check<T: Domain>(a: &DenseMatrix<T>, k: usize, s: usize) -> Result<bool> {
    let ak = minor(a, &MinorSpec::leading(k))?;
    if ak.is_zero() {
        return Err(Error::ZeroPivot(k));
    }
    let lhs = bareiss_det(&minors_matrix(a, k, s, s)?)?;
    let mut rhs = minor(a, &MinorSpec::leading(s))?;
    for _ in 0..s - k - 1 {
        rhs = rhs.try_mul(&ak)?;
    }
    Ok(lhs == rhs)
}

/// Rank by Gaussian elimination over the fraction field.
pub fn rank_oracle<T: Domain>(a: &DenseMatrix<T>) -> Result<usize> {
    let mut m: Vec<Vec<Frac<T>>> = a.to_fractions().to_rows();
    let (n, cols) = a.shape();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..n).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for i in rank + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].exact_div(&pivot)?;
            let (top, bottom) = m.split_at_mut(i);
            for (x, y) in bottom[0][c..cols].iter_mut().zip(&top[rank][c..cols]) {
                *x = x.try_sub(&factor.try_mul(y)?)?;
            }
        }
        rank += 1;
    }
    Ok(rank)
}

/// One item of a [`VerifyReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Location and nature of the first failure.
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            match &c.detail {
                Some(d) => writeln!(f, "{mark} {}: {d}", c.name)?,
                None => writeln!(f, "{mark} {}", c.name)?,
            }
        }
        Ok(())
    }
}

pub const RECONSTRUCTION: &str = "reconstruction";
pub const TRIANGULAR: &str = "triangular";
pub const IDENTITY_BLOCKS: &str = "identity blocks";
pub const CONJUGATED_TRIANGULAR: &str = "conjugated triangular";
pub const MW_IDENTITIES: &str = "M/W identities";
pub const RANK: &str = "rank";

fn first_mismatch<T: Domain>(x: &FractionMatrix<T>, y: &FractionMatrix<T>) -> Option<String> {
    if x.shape() != y.shape() {
        return Some(format!("shape {:?} against {:?}", x.shape(), y.shape()));
    }
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            if x.get(i, j) != y.get(i, j) {
                return Some(format!("({i}, {j}): {} != {}", x.get(i, j), y.get(i, j)));
            }
        }
    }
    None
}

fn first_nonzero<T: Domain>(
    m: &DenseMatrix<T>,
    what: &str,
    mut inside: impl FnMut(usize, usize) -> bool,
) -> Option<String> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if inside(i, j) && !m.get(i, j).is_zero() {
                return Some(format!("{what} ({i}, {j}) = {}", m.get(i, j)));
            }
        }
    }
    None
}

fn check(name: &'static str, failure: Option<String>) -> Check {
    Check {
        name,
        passed: failure.is_none(),
        detail: failure,
    }
}

fn check_result(name: &'static str, r: Result<Option<String>>) -> Check {
    check(name, r.unwrap_or_else(|e| Some(e.to_string())))
}

fn reconstruction<T: Domain>(a: &DenseMatrix<T>, f: &Factorization<T>) -> Result<Option<String>> {
    let d = materialize_d(&f.diagonal())?;
    let product = f
        .l
        .to_fractions()
        .mat_mul(&d)?
        .mat_mul(&f.u.to_fractions())?
        .permute(&f.p, Side::Rows, false)?
        .permute(&f.q, Side::Cols, false)?;
    Ok(first_mismatch(&product, &a.to_fractions()))
}

fn triangular<T: Domain>(f: &Factorization<T>) -> Option<String> {
    let (n, m) = f.shape();
    if f.l.shape() != (n, n) || f.u.shape() != (m, m) {
        return Some("L or U has the wrong shape".into());
    }
    if let Some(e) = first_nonzero(&f.l, "L above diagonal at", |i, j| j > i) {
        return Some(e);
    }
    if let Some(e) = first_nonzero(&f.u, "U below diagonal at", |i, j| j < i) {
        return Some(e);
    }
    let expected = |i: usize| f.alphas.values.get(i).cloned().unwrap_or_else(T::one);
    for (name, mat) in [("L", &f.l), ("U", &f.u)] {
        for i in 0..mat.rows() {
            if *mat.get(i, i) != expected(i) {
                return Some(format!("{name} diagonal at {i} = {}, expected {}", mat.get(i, i), expected(i)));
            }
        }
    }
    None
}

fn identity_blocks<T: Domain>(f: &Factorization<T>) -> Option<String> {
    let r = f.rank();
    for (name, mat) in [("L", &f.l), ("U", &f.u)] {
        let n = mat.rows();
        for i in r..n {
            for j in r..n {
                let v = mat.get(i, j);
                let ok = if i == j { v.is_one() } else { v.is_zero() };
                if !ok {
                    return Some(format!("{name} trailing block at ({i}, {j}) = {v}"));
                }
            }
        }
    }
    None
}

fn conjugated<T: Domain>(f: &Factorization<T>) -> Result<Option<String>> {
    let l = conjugated_l(f)?;
    if let Some(e) = first_nonzero(&l, "P·L·Pᵀ above diagonal at", |i, j| j > i) {
        return Ok(Some(e));
    }
    let u = conjugated_u(f)?;
    Ok(first_nonzero(&u, "Qᵀ·U·Q below diagonal at", |i, j| j < i))
}

fn mw_identities<T: Domain>(f: &Factorization<T>) -> Result<Option<String>> {
    let r = f.rank();
    if f.m.shape() != (r, r) || f.w.shape() != (r, r) {
        return Ok(Some(format!("M, W must be {r}x{r}")));
    }
    let d = DenseMatrix::diagonal(&diagonal_entries(&f.diagonal())?, r, r);
    let l_r = f.l.select(&(0..r).collect::<Vec<_>>(), &(0..r).collect::<Vec<_>>()).to_fractions();
    let u_r = f.u.select(&(0..r).collect::<Vec<_>>(), &(0..r).collect::<Vec<_>>()).to_fractions();
    let target = DenseMatrix::<Frac<T>>::identity(r).scale(&Frac::from_int(f.alphas.context.clone()))?;
    let mld = f.m.to_fractions().mat_mul(&l_r)?.mat_mul(&d)?;
    if let Some(e) = first_mismatch(&mld, &target) {
        return Ok(Some(format!("M·L·D at {e}")));
    }
    let duw = d.mat_mul(&u_r)?.mat_mul(&f.w.to_fractions())?;
    Ok(first_mismatch(&duw, &target).map(|e| format!("D·U·W at {e}")))
}

/// Checks every structural claim about `f` against `a`.
pub fn verify<T: Domain>(a: &DenseMatrix<T>, f: &Factorization<T>) -> VerifyReport {
    let mut checks = Vec::new();
    if f.shape() != a.shape() {
        let detail = format!("factorization is {:?}, input is {:?}", f.shape(), a.shape());
        for name in [RECONSTRUCTION, TRIANGULAR, IDENTITY_BLOCKS, CONJUGATED_TRIANGULAR, MW_IDENTITIES, RANK] {
            checks.push(check(name, Some(detail.clone())));
        }
        return VerifyReport { checks };
    }
    let tri = triangular(f);
    let structural = tri.is_none();
    checks.push(check_result(RECONSTRUCTION, reconstruction(a, f)));
    checks.push(check(TRIANGULAR, tri));
    checks.push(check(IDENTITY_BLOCKS, identity_blocks(f)));
    checks.push(check_result(CONJUGATED_TRIANGULAR, conjugated(f)));
    checks.push(if structural {
        check_result(MW_IDENTITIES, mw_identities(f))
    } else {
        check(MW_IDENTITIES, Some("skipped: L or U malformed".into()))
    });
    checks.push(check_result(
        RANK,
        rank_oracle(a).map(|r| (r != f.rank()).then(|| format!("engine {} against oracle {r}", f.rank()))),
    ));
    VerifyReport { checks }
}

/// Checks that `L` and `U` consist of bordered minors of `Pᵀ·A·Qᵀ` in their
/// pivot columns and rows. Returns the first disagreement.
pub fn bordered_minor_check<T: Domain>(a: &DenseMatrix<T>, f: &Factorization<T>) -> Result<Option<String>> {
    let ap = a.permute(&f.p, Side::Rows, true)?.permute(&f.q, Side::Cols, true)?;
    let (n, m) = ap.shape();
    for j in 0..f.rank() {
        for i in j..n {
            let expected = minor(&ap, &MinorSpec::bordered(j + 1, i, j))?;
            if *f.l.get(i, j) != expected {
                return Ok(Some(format!("L({i}, {j}) = {}, minor {expected}", f.l.get(i, j))));
            }
        }
    }
    for i in 0..f.rank() {
        for j in i..m {
            let expected = minor(&ap, &MinorSpec::bordered(i + 1, i, j))?;
            if *f.u.get(i, j) != expected {
                return Ok(Some(format!("U({i}, {j}) = {}, minor {expected}", f.u.get(i, j))));
            }
        }
    }
    Ok(None)
}
