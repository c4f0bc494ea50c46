//! Presentations derived from a [`Factorization`]: the diagonal factor over
//! the fraction field, the conjugated triangular factors, the Bruhat form
//! and a plain `P·L·(DU)·Q` repackaging.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::ldu::{decompose, DiagonalSpec, Factorization, SplitPolicy};
use crate::matrix::{DenseMatrix, Frac, FractionMatrix, Permutation, Side};

/// The nonzero diagonal entries `α_k / (α_{i-1} α_i)`.
pub fn diagonal_entries<T: Domain>(spec: &DiagonalSpec<T>) -> Result<Vec<Frac<T>>> {
    let alphas = &spec.alphas;
    alphas
        .values
        .iter()
        .enumerate()
        .map(|(i, a)| Ok(Frac::new(alphas.context.clone(), alphas.before(i).try_mul(a)?)?))
        .collect()
}

/// `D` as a `rows × cols` fraction matrix, zero past the rank.
pub fn materialize_d<T: Domain>(spec: &DiagonalSpec<T>) -> Result<FractionMatrix<T>> {
    Ok(DenseMatrix::diagonal(
        &diagonal_entries(spec)?,
        spec.rows,
        spec.cols,
    ))
}

/// `𝓛 = P·L·Pᵀ`, `𝓓 = P·D·Q`, `𝓤 = Qᵀ·U·Q`, so that `A = 𝓛·𝓓·𝓤` with `𝓛`
/// lower and `𝓤` upper triangular.
#[derive(Clone, Debug)]
pub struct ScriptForm<T> {
    pub l: FractionMatrix<T>,
    pub d: FractionMatrix<T>,
    pub u: FractionMatrix<T>,
}

pub fn conjugated_l<T: Domain>(f: &Factorization<T>) -> Result<DenseMatrix<T>> {
    f.l.permute(&f.p, Side::Rows, false)?
        .permute(&f.p, Side::Cols, true)
}

pub fn conjugated_u<T: Domain>(f: &Factorization<T>) -> Result<DenseMatrix<T>> {
    f.u.permute(&f.q, Side::Rows, true)?
        .permute(&f.q, Side::Cols, false)
}

pub fn script_form<T: Domain>(f: &Factorization<T>) -> Result<ScriptForm<T>> {
    let l = conjugated_l(f)?;
    let u = conjugated_u(f)?;
    if !l.is_lower_triangular() {
        return Err(Error::Invariant("P·L·Pᵀ is not lower triangular".into()));
    }
    if !u.is_upper_triangular() {
        return Err(Error::Invariant("Qᵀ·U·Q is not upper triangular".into()));
    }
    let d = materialize_d(&f.diagonal())?
        .permute(&f.p, Side::Rows, false)?
        .permute(&f.q, Side::Cols, false)?;
    Ok(ScriptForm {
        l: l.to_fractions(),
        d,
        u: u.to_fractions(),
    })
}

/// `S·A = V·(SD)·U` with `S` the flip, `V` and `U` upper triangular and
/// `SD = w·diag(delta)` a scaled permutation.
#[derive(Clone, Debug)]
pub struct BruhatFactors<T> {
    pub s: Permutation,
    pub v: FractionMatrix<T>,
    pub w: Permutation,
    pub delta: Vec<Frac<T>>,
    pub u: FractionMatrix<T>,
}

impl<T: Domain> BruhatFactors<T> {
    /// `SD` as a dense fraction matrix.
    pub fn sd(&self) -> FractionMatrix<T> {
        let n = self.w.len();
        let images = self.w.images();
        DenseMatrix::from_fn(n, n, |i, j| {
            if images[i] == j {
                self.delta[j].clone()
            } else {
                Frac::zero()
            }
        })
    }
}

/// Bruhat form of the square matrix `S·a`, obtained from the decomposition
/// of `a`.
pub fn bruhat<T: Domain>(a: &DenseMatrix<T>, policy: &SplitPolicy) -> Result<BruhatFactors<T>> {
    let (n, m) = a.shape();
    if n != m {
        return Err(Error::NotSquare(n, m));
    }
    bruhat_from(&decompose(a, policy)?)
}

pub fn bruhat_from<T: Domain>(f: &Factorization<T>) -> Result<BruhatFactors<T>> {
    let (n, m) = f.shape();
    if n != m {
        return Err(Error::NotSquare(n, m));
    }
    let s = Permutation::flip(n);
    let v = conjugated_l(f)?
        .permute(&s, Side::Rows, false)?
        .permute(&s, Side::Cols, false)?;
    let u = conjugated_u(f)?;
    if !v.is_upper_triangular() || !u.is_upper_triangular() {
        return Err(Error::Invariant("Bruhat factors are not upper triangular".into()));
    }
    // S·P·D·Q = (S·P·Q)·(Qᵀ·D·Q) and Qᵀ·D·Q is diagonal.
    let w = s.compose(&f.p)?.compose(&f.q)?;
    let mut d = diagonal_entries(&f.diagonal())?;
    d.resize(n, Frac::zero());
    let q_inv = f.q.inverse();
    let delta = (0..n).map(|j| d[q_inv.images()[j]].clone()).collect();
    Ok(BruhatFactors {
        s,
        v: v.to_fractions(),
        w,
        delta,
        u: u.to_fractions(),
    })
}

/// `A = P·L·(D·U)·Q` with `D·U` folded into one upper-triangular fraction
/// matrix.
#[derive(Clone, Debug)]
pub struct PlainLu<T> {
    pub p: Permutation,
    pub l: DenseMatrix<T>,
    pub du: FractionMatrix<T>,
    pub q: Permutation,
}

pub fn plain_lu<T: Domain>(f: &Factorization<T>) -> Result<PlainLu<T>> {
    let d = diagonal_entries(&f.diagonal())?;
    let mut rows = Vec::with_capacity(f.p.len());
    for i in 0..f.p.len() {
        let row = match d.get(i) {
            Some(di) => f
                .u
                .row(i)
                .iter()
                .map(|v| Frac::from_int(v.clone()).try_mul(di))
                .collect::<std::result::Result<Vec<_>, _>>()?,
            None => vec![Frac::zero(); f.q.len()],
        };
        rows.push(row);
    }
    let du = DenseMatrix::from_rows(rows)?;
    Ok(PlainLu {
        p: f.p.clone(),
        l: f.l.clone(),
        du,
        q: f.q.clone(),
    })
}

impl<T: Domain> PlainLu<T> {
    pub fn product(&self) -> Result<FractionMatrix<T>> {
        self.l
            .to_fractions()
            .mat_mul(&self.du)?
            .permute(&self.p, Side::Rows, false)?
            .permute(&self.q, Side::Cols, false)
    }
}
