//! The recursive fraction-free decomposition engine.
//!
//! A block `X` of size `n × m` is always factored relative to a context
//! value `α_k` (one at top level):
//!
//! ```text
//! X = P · L · D · U · Q,   D = diag(α_k / (α_{i-1} α_i))  for the pivots i
//! ```
//!
//! `L` and `U` carry the pivot minors `α_{k+1}, …, α_r` on their diagonals
//! followed by ones, and `M`, `W` satisfy `M·L_r·D_r = α_k·I` and
//! `D_r·U_r·W = α_k·I` on the leading `rank × rank` blocks. Every division
//! performed here is exact in the domain.

use std::str::FromStr;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Permutation};

/// The incoming context `α_k` followed by the pivot minors produced.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSequence<T> {
    pub context: T,
    pub values: Vec<T>,
}

impl<T: Domain> AlphaSequence<T> {
    pub fn new(context: T, values: Vec<T>) -> Self {
        AlphaSequence { context, values }
    }

    /// `α_r`, or the context when no pivot was found.
    pub fn last(&self) -> &T {
        self.values.last().unwrap_or(&self.context)
    }

    /// `α_{i-1}` for the pivot at position `i` (0-based).
    pub fn before(&self, i: usize) -> &T {
        if i == 0 {
            &self.context
        } else {
            &self.values[i - 1]
        }
    }
}

/// The diagonal factor `D` in symbolic form.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalSpec<T> {
    pub alphas: AlphaSequence<T>,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization<T> {
    pub p: Permutation,
    pub l: DenseMatrix<T>,
    pub alphas: AlphaSequence<T>,
    pub u: DenseMatrix<T>,
    pub q: Permutation,
    pub m: DenseMatrix<T>,
    pub w: DenseMatrix<T>,
}

impl<T: Domain> Factorization<T> {
    pub fn rank(&self) -> usize {
        self.alphas.values.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.p.len(), self.q.len())
    }

    /// Sorts the row and column positions past the rank by original index,
    /// leaving the product unchanged.
    pub(crate) fn sort_tail(self) -> Result<Self> {
        let r = self.rank();
        let sorted = |order: Vec<usize>| -> (Vec<usize>, Vec<usize>) {
            let mut idx: Vec<usize> = (r..order.len()).collect();
            idx.sort_by_key(|&t| order[t]);
            let new_order = (0..r).chain(idx.iter().copied()).map(|t| order[t]).collect();
            (new_order, idx)
        };
        let (row_order, row_idx) = sorted(self.p.row_order());
        let (col_order, col_idx) = sorted(self.q.col_order());
        let (n, m) = self.shape();
        let l = DenseMatrix::from_fn(n, n, |i, j| match (i < r, j < r) {
            (_, true) if i >= r => self.l.get(row_idx[i - r], j).clone(),
            (false, false) if i == j => T::one(),
            (false, false) => T::zero(),
            _ => self.l.get(i, j).clone(),
        });
        let u = DenseMatrix::from_fn(m, m, |i, j| match (i < r, j < r) {
            (true, _) if j >= r => self.u.get(i, col_idx[j - r]).clone(),
            (false, false) if i == j => T::one(),
            (false, false) => T::zero(),
            _ => self.u.get(i, j).clone(),
        });
        Ok(Factorization {
            p: Permutation::from_row_order(row_order)?,
            l,
            u,
            q: Permutation::from_images(col_order)?,
            ..self
        })
    }

    pub fn diagonal(&self) -> DiagonalSpec<T> {
        DiagonalSpec {
            alphas: self.alphas.clone(),
            rows: self.p.len(),
            cols: self.q.len(),
        }
    }

    /// The rank-zero factorization of an `n × m` zero block.
    pub fn zero(rows: usize, cols: usize, context: T) -> Self {
        Factorization {
            p: Permutation::identity(rows),
            l: DenseMatrix::identity(rows),
            alphas: AlphaSequence::new(context, Vec::new()),
            u: DenseMatrix::identity(cols),
            q: Permutation::identity(cols),
            m: DenseMatrix::zeros(0, 0),
            w: DenseMatrix::zeros(0, 0),
        }
    }

    /// The factorization of `Xᵀ`.
    pub fn transpose(&self) -> Self {
        Factorization {
            p: self.q.inverse(),
            l: self.u.transpose(),
            alphas: self.alphas.clone(),
            u: self.l.transpose(),
            q: self.p.inverse(),
            m: self.w.transpose(),
            w: self.m.transpose(),
        }
    }

    /// Multiplies the context and every pivot by `target / context`; the
    /// result factors `(target / context)·X` in context `target`.
    pub fn rescale(&self, target: &T) -> Result<Self> {
        let from = &self.alphas.context;
        if from == target {
            return Ok(self.clone());
        }
        let lift = |v: &T| -> Result<T> { Ok(v.try_mul(target)?.exact_div(from)?) };
        let rank = self.rank();
        let mut l = self.l.to_rows();
        for row in &mut l {
            for v in row.iter_mut().take(rank) {
                *v = lift(v)?;
            }
        }
        let mut u = self.u.to_rows();
        for row in u.iter_mut().take(rank) {
            for v in row.iter_mut() {
                *v = lift(v)?;
            }
        }
        Ok(Factorization {
            p: self.p.clone(),
            l: DenseMatrix::from_rows(l)?,
            alphas: AlphaSequence::new(
                target.clone(),
                self.alphas.values.iter().map(lift).collect::<Result<_>>()?,
            ),
            u: DenseMatrix::from_rows(u)?,
            q: self.q.clone(),
            m: self.m.try_map(lift)?,
            w: self.w.try_map(lift)?,
        })
    }
}

/// Offset `k`, the context value `α_k`, and an optional target `α_s` for a
/// rescaled subproblem.
#[derive(Clone, Debug, PartialEq)]
pub struct RecursionContext<T> {
    pub offset: usize,
    pub alpha: T,
    pub rescale_to: Option<T>,
}

impl<T: Domain> RecursionContext<T> {
    pub fn top() -> Self {
        RecursionContext {
            offset: 0,
            alpha: T::one(),
            rescale_to: None,
        }
    }

    pub fn new(offset: usize, alpha: T) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::ZeroPivot(offset));
        }
        Ok(RecursionContext {
            offset,
            alpha,
            rescale_to: None,
        })
    }

    pub fn rescaled(mut self, target: T) -> Self {
        self.rescale_to = Some(target);
        self
    }
}

/// How a block of size `n` is split into a leading `s × s` part.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SplitPolicy {
    /// The largest power of two strictly below `n`.
    #[default]
    Pow2,
    /// `⌊n/2⌋`.
    Half,
    /// Split sizes by recursion depth, outermost first; entries that do not
    /// fit the block fall back to `Pow2`.
    Schedule(Vec<usize>),
}

impl SplitPolicy {
    /// Split point for a block whose smaller side is `size ≥ 2`.
    pub fn split(&self, size: usize, depth: usize) -> usize {
        debug_assert!(size >= 2);
        let pow2 = || 1usize << (usize::BITS - 1 - (size - 1).leading_zeros());
        match self {
            SplitPolicy::Pow2 => pow2(),
            SplitPolicy::Half => size / 2,
            SplitPolicy::Schedule(sizes) => match sizes.get(depth) {
                Some(&s) if 0 < s && s < size => s,
                _ => pow2(),
            },
        }
    }
}

impl FromStr for SplitPolicy {
    type Err = String;

    fn from_str(text: &str) -> std::result::Result<Self, Self::Err> {
        match text.trim() {
            "pow2" => Ok(SplitPolicy::Pow2),
            "half" => Ok(SplitPolicy::Half),
            other => other
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .ok()
                        .filter(|&s| s > 0)
                        .ok_or_else(|| format!("bad split size {t:?}"))
                })
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(SplitPolicy::Schedule),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub policy: SplitPolicy,
    /// Decompose independent diagonal blocks concurrently.
    pub parallel: bool,
    /// Try the permutation-free path first on square input.
    pub strongly_regular_first: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            policy: SplitPolicy::Pow2,
            parallel: cfg!(feature = "parallel"),
            strongly_regular_first: false,
        }
    }
}

impl Config {
    pub fn with_policy(policy: SplitPolicy) -> Self {
        Config {
            policy,
            ..Config::default()
        }
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }
}

/// One observable step of the recursion, recorded by [`decompose_traced`].
#[derive(Clone, Debug, PartialEq)]
pub enum TraceEvent<T> {
    /// A block decomposed in context `context`.
    Call {
        depth: usize,
        context: T,
        block: DenseMatrix<T>,
        result: Factorization<T>,
    },
    /// A scaled Schur complement `next` computed after a pivot block with
    /// last minor `alpha_r`.
    Schur {
        depth: usize,
        context: T,
        alpha_r: T,
        next: DenseMatrix<T>,
    },
    /// A factorization lifted from context `from` to `to`.
    Rescaled {
        depth: usize,
        from: T,
        to: T,
        result: Factorization<T>,
    },
}

pub fn decompose<T: Domain>(a: &DenseMatrix<T>, policy: &SplitPolicy) -> Result<Factorization<T>> {
    decompose_with(a, &Config::with_policy(policy.clone()))
}

pub fn decompose_with<T: Domain>(a: &DenseMatrix<T>, config: &Config) -> Result<Factorization<T>> {
    Engine::new(config, false).top(a)
}

/// Decomposes `a` and returns every recursion step in completion order.
pub fn decompose_traced<T: Domain>(
    a: &DenseMatrix<T>,
    config: &Config,
) -> Result<(Factorization<T>, Vec<TraceEvent<T>>)> {
    let engine = Engine::new(config, true);
    let f = engine.top(a)?;
    let events = engine
        .trace
        .map(|t| t.into_inner().unwrap_or_else(|e| e.into_inner()))
        .unwrap_or_default();
    Ok((f, events))
}

/// Decomposes a block in the given context.
pub fn ldu_rec<T: Domain>(
    block: &DenseMatrix<T>,
    ctx: &RecursionContext<T>,
    config: &Config,
) -> Result<Factorization<T>> {
    Engine::new(config, false).rec(block, &ctx.alpha, 0)
}

/// Factors a single row or column whose first entry is nonzero.
pub fn base_single_line<T: Domain>(
    block: &DenseMatrix<T>,
    ctx: &RecursionContext<T>,
) -> Result<Factorization<T>> {
    let (n, m) = block.shape();
    if n != 1 && m != 1 || block.is_empty() || block.get(0, 0).is_zero() {
        return Err(Error::ZeroPivot(ctx.offset));
    }
    let lead = block.get(0, 0).clone();
    let l = if m == 1 {
        DenseMatrix::from_fn(n, n, |i, j| match (i, j) {
            (_, 0) => block.get(i, 0).clone(),
            _ if i == j => T::one(),
            _ => T::zero(),
        })
    } else {
        DenseMatrix::new(1, 1, vec![lead.clone()])?
    };
    let u = if n == 1 {
        DenseMatrix::from_fn(m, m, |i, j| match (i, j) {
            (0, _) => block.get(0, j).clone(),
            _ if i == j => T::one(),
            _ => T::zero(),
        })
    } else {
        DenseMatrix::new(1, 1, vec![lead.clone()])?
    };
    let mw = DenseMatrix::new(1, 1, vec![ctx.alpha.clone()])?;
    Ok(Factorization {
        p: Permutation::identity(n),
        l,
        alphas: AlphaSequence::new(ctx.alpha.clone(), vec![lead]),
        u,
        q: Permutation::identity(m),
        m: mw.clone(),
        w: mw,
    })
}

/// Closed form for a `2 × 2` block with nonsingular leading entry and
/// nonzero determinant.
pub fn base_2x2<T: Domain>(
    block: &DenseMatrix<T>,
    ctx: &RecursionContext<T>,
) -> Result<Factorization<T>> {
    if block.shape() != (2, 2) {
        return Err(Error::Dimension {
            op: "base_2x2",
            left: block.shape(),
            right: (2, 2),
        });
    }
    let (a, b, c, d) = (block.get(0, 0), block.get(0, 1), block.get(1, 0), block.get(1, 1));
    if a.is_zero() {
        return Err(Error::ZeroPivot(ctx.offset));
    }
    let ak = &ctx.alpha;
    let a2 = a.try_mul(d)?.try_sub(&b.try_mul(c)?)?.exact_div(ak)?;
    if a2.is_zero() {
        return Err(Error::ZeroPivot(ctx.offset + 1));
    }
    let z = T::zero;
    let sq = |v: [T; 4]| DenseMatrix::new(2, 2, v.to_vec());
    Ok(Factorization {
        p: Permutation::identity(2),
        l: sq([a.clone(), z(), c.clone(), a2.clone()])?,
        alphas: AlphaSequence::new(ak.clone(), vec![a.clone(), a2.clone()]),
        u: sq([a.clone(), b.clone(), z(), a2])?,
        q: Permutation::identity(2),
        m: sq([ak.clone(), z(), c.try_neg()?, a.clone()])?,
        w: sq([ak.clone(), b.try_neg()?, z(), a.clone()])?,
    })
}

/// The result of eliminating a pivot block: `Ũ`, `L̃` and the scaled Schur
/// complement `next`, all over the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurUpdate<T> {
    pub u_tilde: DenseMatrix<T>,
    pub l_tilde: DenseMatrix<T>,
    pub next: DenseMatrix<T>,
}

/// `Ũ = M·B/α_k`, `L̃ = C·W/α_k` and `next = (α_r·D − α_r·L̃·D_r·Ũ)/α_k`,
/// where `alphas` is the pivot block's sequence (context `α_k`, last `α_r`).
pub fn schur_update<T: Domain>(
    b: &DenseMatrix<T>,
    c: &DenseMatrix<T>,
    d: &DenseMatrix<T>,
    m: &DenseMatrix<T>,
    w: &DenseMatrix<T>,
    alphas: &AlphaSequence<T>,
) -> Result<SchurUpdate<T>> {
    let ak = &alphas.context;
    let u_tilde = m.mat_mul(b)?.div_exact(ak)?;
    let l_tilde = c.mat_mul(w)?.div_exact(ak)?;
    let g = scaled_outer_sum(&l_tilde, &u_tilde, ak, alphas)?;
    let next = d.scale(alphas.last())?.try_sub(&g)?.div_exact(ak)?;
    Ok(SchurUpdate {
        u_tilde,
        l_tilde,
        next,
    })
}

/// `α_r · c · Σ_j X[:, j]·Y[j, :] / (α_{j-1} α_j)`, accumulated so that
/// every intermediate stays in the domain.
fn scaled_outer_sum<T: Domain>(
    x: &DenseMatrix<T>,
    y: &DenseMatrix<T>,
    c: &T,
    alphas: &AlphaSequence<T>,
) -> Result<DenseMatrix<T>> {
    let (p, q) = (x.rows(), y.cols());
    let mut z = vec![T::zero(); p * q];
    for (j, aj) in alphas.values.iter().enumerate() {
        let prev = alphas.before(j);
        let xc: Vec<T> = (0..p)
            .map(|i| x.get(i, j).try_mul(c))
            .collect::<std::result::Result<_, _>>()?;
        let yj = y.row(j);
        for i in 0..p {
            let row = &mut z[i * q..(i + 1) * q];
            for (slot, yv) in row.iter_mut().zip(yj) {
                let mut acc = slot.try_mul(aj)?;
                acc.add_product(&xc[i], yv)?;
                *slot = acc.exact_div(prev)?;
            }
        }
    }
    DenseMatrix::new(p, q, z)
}

/// Decomposes `block` in context `ctx.alpha` and lifts the result to
/// `ctx.rescale_to`, giving the factorization of `(α_s/α_k)·block`.
pub fn scaled_subproblem<T: Domain>(
    block: &DenseMatrix<T>,
    ctx: &RecursionContext<T>,
    config: &Config,
) -> Result<Factorization<T>> {
    let f = ldu_rec(block, ctx, config)?;
    match &ctx.rescale_to {
        Some(target) => f.rescale(target),
        None => Ok(f),
    }
}

/// Dispatch for a split whose leading `sr × sc` block is zero.
pub fn zero_a_dispatch<T: Domain>(
    block: &DenseMatrix<T>,
    ctx: &RecursionContext<T>,
    split: (usize, usize),
    config: &Config,
) -> Result<Factorization<T>> {
    check_split(block, split)?;
    Engine::new(config, false).zero_a(block, &ctx.alpha, split.0, split.1, 0)
}

/// Dispatch for a split in which a whole half of the block is zero: the
/// bottom, right, top or left half.
pub fn half_zero_dispatch<T: Domain>(
    block: &DenseMatrix<T>,
    ctx: &RecursionContext<T>,
    split: (usize, usize),
    config: &Config,
) -> Result<Factorization<T>> {
    check_split(block, split)?;
    Engine::new(config, false).split_step(block, &ctx.alpha, split.0, split.1, false, 0)
}

/// Permutation-free decomposition of a square block whose leading
/// principal minors are all nonzero. Fails with [`Error::ZeroPivot`]
/// otherwise.
pub fn strongly_regular_ldu<T: Domain>(
    block: &DenseMatrix<T>,
    ctx: &RecursionContext<T>,
    policy: &SplitPolicy,
) -> Result<Factorization<T>> {
    let (n, m) = block.shape();
    if n != m {
        return Err(Error::NotSquare(n, m));
    }
    strongly_regular(block, &ctx.alpha, ctx.offset, policy, 0)
}

fn strongly_regular<T: Domain>(
    x: &DenseMatrix<T>,
    alpha: &T,
    offset: usize,
    policy: &SplitPolicy,
    depth: usize,
) -> Result<Factorization<T>> {
    let n = x.rows();
    let ctx = RecursionContext::new(offset, alpha.clone())?;
    match n {
        0 => return Ok(Factorization::zero(0, 0, alpha.clone())),
        1 => return base_single_line(x, &ctx),
        2 => return base_2x2(x, &ctx),
        _ => {}
    }
    let s = policy.split(n, depth);
    let fa = strongly_regular(&x.block(0..s, 0..s), alpha, offset, policy, depth + 1)?;
    let step = schur_step(x, alpha, s, s, &fa)?;
    let alpha_s = fa.alphas.last().clone();
    let fnext = strongly_regular(&step.update.next, &alpha_s, offset + s, policy, depth + 1)?;
    assemble_general(alpha, &fa, Some(&fnext), &step)
}

fn check_split<T: Domain>(block: &DenseMatrix<T>, (sr, sc): (usize, usize)) -> Result<()> {
    if sr == 0 || sc == 0 || sr > block.rows() || sc > block.cols() {
        return Err(Error::OutOfRange { op: "split" });
    }
    Ok(())
}

/// `schur_update` applied to a block after reordering its rows and
/// columns so that the pivots of the leading block come first.
#[derive(Clone, Debug)]
pub struct PermutedSchur<T> {
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub update: SchurUpdate<T>,
}

fn schur_step<T: Domain>(
    x: &DenseMatrix<T>,
    alpha: &T,
    sr: usize,
    sc: usize,
    fa: &Factorization<T>,
) -> Result<PermutedSchur<T>> {
    debug_assert_eq!(&fa.alphas.context, alpha);
    let (n, m) = x.shape();
    let rho = fa.rank();
    let row_perm: Vec<usize> = fa.p.row_order().into_iter().chain(sr..n).collect();
    let col_perm: Vec<usize> = fa.q.col_order().into_iter().chain(sc..m).collect();
    let xp = x.select(&row_perm, &col_perm);
    let update = schur_update(
        &xp.block(0..rho, rho..m),
        &xp.block(rho..n, 0..rho),
        &xp.block(rho..n, rho..m),
        &fa.m,
        &fa.w,
        &fa.alphas,
    )?;
    Ok(PermutedSchur {
        row_perm,
        col_perm,
        update,
    })
}

/// Glues the pivot block's factorization and the factorization of the
/// Schur complement (absent when it vanishes) into one factorization.
pub fn assemble_general<T: Domain>(
    alpha: &T,
    fa: &Factorization<T>,
    fnext: Option<&Factorization<T>>,
    step: &PermutedSchur<T>,
) -> Result<Factorization<T>> {
    let rho = fa.rank();
    let (n, m) = (step.row_perm.len(), step.col_perm.len());
    let l_r = fa.l.block(0..rho, 0..rho);
    let u_r = fa.u.block(0..rho, 0..rho);
    let SchurUpdate {
        u_tilde, l_tilde, ..
    } = &step.update;

    let Some(fnext) = fnext.filter(|f| f.rank() > 0) else {
        let l = DenseMatrix::assemble_2x2(
            &l_r,
            &DenseMatrix::zeros(rho, n - rho),
            l_tilde,
            &DenseMatrix::identity(n - rho),
        )?;
        let u = DenseMatrix::assemble_2x2(
            &u_r,
            u_tilde,
            &DenseMatrix::zeros(m - rho, rho),
            &DenseMatrix::identity(m - rho),
        )?;
        return Ok(Factorization {
            p: Permutation::from_row_order(step.row_perm.clone())?,
            l,
            alphas: fa.alphas.clone(),
            u,
            q: Permutation::from_images(step.col_perm.clone())?,
            m: fa.m.clone(),
            w: fa.w.clone(),
        });
    };

    let alpha_r = fa.alphas.last();
    let rho_n = fnext.rank();
    let next_rows = fnext.p.row_order();
    let next_cols = fnext.q.col_order();
    let l_perm = l_tilde.select_rows(&next_rows);
    let u_perm = u_tilde.select_cols(&next_cols);

    let l = DenseMatrix::assemble_2x2(&l_r, &DenseMatrix::zeros(rho, n - rho), &l_perm, &fnext.l)?;
    let u = DenseMatrix::assemble_2x2(&u_r, &u_perm, &DenseMatrix::zeros(m - rho, rho), &fnext.u)?;

    let x_top = l_perm.block(0..rho_n, 0..rho);
    let z_m = scaled_outer_sum(&x_top, &fa.m, &T::one(), &fa.alphas)?;
    let m21 = fnext.m.mat_mul(&z_m)?.div_exact(alpha_r)?.neg()?;
    let u_left = u_perm.block(0..rho, 0..rho_n);
    let z_w = scaled_outer_sum(&fa.w, &u_left, &T::one(), &fa.alphas)?;
    let w12 = z_w.mat_mul(&fnext.w)?.div_exact(alpha_r)?.neg()?;
    let mm = DenseMatrix::assemble_2x2(&fa.m, &DenseMatrix::zeros(rho, rho_n), &m21, &fnext.m)?;
    let ww = DenseMatrix::assemble_2x2(&fa.w, &w12, &DenseMatrix::zeros(rho_n, rho), &fnext.w)?;

    let row_order: Vec<usize> = step.row_perm[..rho]
        .iter()
        .copied()
        .chain(next_rows.iter().map(|&t| step.row_perm[rho + t]))
        .collect();
    let col_order: Vec<usize> = step.col_perm[..rho]
        .iter()
        .copied()
        .chain(next_cols.iter().map(|&t| step.col_perm[rho + t]))
        .collect();
    let mut values = fa.alphas.values.clone();
    values.extend(fnext.alphas.values.iter().cloned());
    Ok(Factorization {
        p: Permutation::from_row_order(row_order)?,
        l,
        alphas: AlphaSequence::new(alpha.clone(), values),
        u,
        q: Permutation::from_images(col_order)?,
        m: mm,
        w: ww,
    })
}

/// Lifts the factorization `f` of `X.select(rows, cols)` to the whole
/// `n × m` block `X`, which must vanish outside the selected entries.
fn embed<T: Domain>(
    f: Factorization<T>,
    rows: &[usize],
    n: usize,
    cols: &[usize],
    m: usize,
) -> Result<Factorization<T>> {
    let complement = |sel: &[usize], len: usize| -> Vec<usize> {
        let mut used = vec![false; len];
        sel.iter().for_each(|&i| used[i] = true);
        (0..len).filter(|&i| !used[i]).collect()
    };
    let row_order: Vec<usize> = f
        .p
        .row_order()
        .into_iter()
        .map(|t| rows[t])
        .chain(complement(rows, n))
        .collect();
    let col_order: Vec<usize> = f
        .q
        .col_order()
        .into_iter()
        .map(|t| cols[t])
        .chain(complement(cols, m))
        .collect();
    let pad = |x: &DenseMatrix<T>, extra: usize| {
        DenseMatrix::assemble_2x2(
            x,
            &DenseMatrix::zeros(x.rows(), extra),
            &DenseMatrix::zeros(extra, x.cols()),
            &DenseMatrix::identity(extra),
        )
    };
    Ok(Factorization {
        p: Permutation::from_row_order(row_order)?,
        l: pad(&f.l, n - rows.len())?,
        alphas: f.alphas,
        u: pad(&f.u, m - cols.len())?,
        q: Permutation::from_images(col_order)?,
        m: f.m,
        w: f.w,
    })
}

/// A factorization of the `D` block computed alongside `A`. `flipped` marks
/// blocks whose top rows were moved there from the bottom.
struct Hint<T> {
    fd: Factorization<T>,
    flipped: bool,
}

struct Engine<'a, T> {
    config: &'a Config,
    trace: Option<Mutex<Vec<TraceEvent<T>>>>,
}

impl<'a, T: Domain> Engine<'a, T> {
    fn new(config: &'a Config, traced: bool) -> Self {
        Engine {
            config,
            trace: traced.then(|| Mutex::new(Vec::new())),
        }
    }

    fn record(&self, event: impl FnOnce() -> TraceEvent<T>) {
        if let Some(trace) = &self.trace {
            let event = event();
            trace.lock().unwrap_or_else(|e| e.into_inner()).push(event);
        }
    }

    fn top(&self, a: &DenseMatrix<T>) -> Result<Factorization<T>> {
        if a.is_empty() {
            return Err(Error::Empty);
        }
        if self.config.strongly_regular_first && a.rows() == a.cols() {
            match strongly_regular(a, &T::one(), 0, &self.config.policy, 0) {
                Err(Error::ZeroPivot(_)) => {}
                other => return other,
            }
        }
        self.rec(a, &T::one(), 0)
    }

    fn rec(&self, x: &DenseMatrix<T>, alpha: &T, depth: usize) -> Result<Factorization<T>> {
        let f = self.rec_inner(x, alpha, depth)?.sort_tail()?;
        self.record(|| TraceEvent::Call {
            depth,
            context: alpha.clone(),
            block: x.clone(),
            result: f.clone(),
        });
        Ok(f)
    }

    fn rec_inner(&self, x: &DenseMatrix<T>, alpha: &T, depth: usize) -> Result<Factorization<T>> {
        let (n, m) = x.shape();
        if x.is_zero() {
            return Ok(Factorization::zero(n, m, alpha.clone()));
        }
        if n == 1 || m == 1 {
            if !x.get(0, 0).is_zero() {
                let ctx = RecursionContext {
                    offset: 0,
                    alpha: alpha.clone(),
                    rescale_to: None,
                };
                return base_single_line(x, &ctx);
            }
            return self.split_step(x, alpha, 1, 1, false, depth);
        }
        let s = self.config.policy.split(n.min(m), depth);
        self.split_step(x, alpha, s, s, false, depth)
    }

    fn split_step(
        &self,
        x: &DenseMatrix<T>,
        alpha: &T,
        sr: usize,
        sc: usize,
        flipped: bool,
        depth: usize,
    ) -> Result<Factorization<T>> {
        let (n, m) = x.shape();
        let a = x.block(0..sr, 0..sc);
        if a.is_zero() {
            return self.zero_a(x, alpha, sr, sc, depth);
        }
        let b_zero = x.block(0..sr, sc..m).is_zero();
        let c_zero = x.block(sr..n, 0..sc).is_zero();
        let d_zero = x.block(sr..n, sc..m).is_zero();
        let all_rows: Vec<usize> = (0..n).collect();
        let all_cols: Vec<usize> = (0..m).collect();

        if c_zero && d_zero && sr < n {
            let top = self.rec(&x.block(0..sr, 0..m), alpha, depth + 1)?;
            return embed(top, &all_rows[..sr], n, &all_cols, m);
        }
        if b_zero && d_zero && sc < m {
            let left = self.rec(&x.block(0..n, 0..sc), alpha, depth + 1)?;
            return embed(left, &all_rows, n, &all_cols[..sc], m);
        }
        if c_zero {
            let d = x.block(sr..n, sc..m);
            let (fa, fd) = self.join(
                || self.rec(&a, alpha, depth + 1),
                || self.rec(&d, alpha, depth + 1),
            );
            let hint = Hint { fd: fd?, flipped };
            return self.general_step(x, alpha, sr, sc, fa?, Some(hint), depth);
        }
        if b_zero {
            return Ok(self
                .split_step(&x.transpose(), alpha, sc, sr, flipped, depth)?
                .transpose());
        }
        let fa = self.rec(&a, alpha, depth + 1)?;
        self.general_step(x, alpha, sr, sc, fa, None, depth)
    }

    fn zero_a(
        &self,
        x: &DenseMatrix<T>,
        alpha: &T,
        sr: usize,
        sc: usize,
        depth: usize,
    ) -> Result<Factorization<T>> {
        let (n, m) = x.shape();
        let b_zero = x.block(0..sr, sc..m).is_zero();
        let c_zero = x.block(sr..n, 0..sc).is_zero();
        let rows: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (0..m).collect();
        match (b_zero, c_zero) {
            (true, true) => {
                let fd = self.rec(&x.block(sr..n, sc..m), alpha, depth + 1)?;
                embed(fd, &rows[sr..], n, &cols[sc..], m)
            }
            (true, false) => {
                let f = self.rec(&x.block(sr..n, 0..m), alpha, depth + 1)?;
                embed(f, &rows[sr..], n, &cols, m)
            }
            (false, true) => {
                let f = self.rec(&x.block(0..n, sc..m), alpha, depth + 1)?;
                embed(f, &rows, n, &cols[sc..], m)
            }
            (false, false) => {
                let order: Vec<usize> = (sr..n).chain(0..sr).collect();
                let f = self.split_step(&x.select_rows(&order), alpha, n - sr, sc, true, depth)?;
                embed(f, &order, n, &cols, m)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn general_step(
        &self,
        x: &DenseMatrix<T>,
        alpha: &T,
        sr: usize,
        sc: usize,
        fa: Factorization<T>,
        hint: Option<Hint<T>>,
        depth: usize,
    ) -> Result<Factorization<T>> {
        let step = schur_step(x, alpha, sr, sc, &fa)?;
        let alpha_r = fa.alphas.last().clone();
        let next = &step.update.next;
        self.record(|| TraceEvent::Schur {
            depth,
            context: alpha.clone(),
            alpha_r: alpha_r.clone(),
            next: next.clone(),
        });
        if next.is_zero() {
            return assemble_general(alpha, &fa, None, &step);
        }
        let rho = fa.rank();
        let fnext = match hint {
            Some(hint) => self.structured_next(next, &alpha_r, hint, sr - rho, sc - rho, depth)?,
            None => self.rec(next, &alpha_r, depth + 1)?,
        };
        assemble_general(alpha, &fa, Some(&fnext), &step)
    }

    /// Factors `next = [[0, B̂], [0, λ·D]]` (`top` rows above, `left` zero
    /// columns) by rescaling the factorization of `D`. The band `B̂` may be
    /// moved below `λ·D` only when its rows originally followed those of
    /// `D`; otherwise a nonzero band sends `next` through the plain
    /// recursion.
    fn structured_next(
        &self,
        next: &DenseMatrix<T>,
        alpha_r: &T,
        hint: Hint<T>,
        top: usize,
        left: usize,
        depth: usize,
    ) -> Result<Factorization<T>> {
        let (nr, nc) = next.shape();
        let Hint { fd, flipped } = hint;
        if fd.rank() == 0 || (!flipped && !next.block(0..top, 0..nc).is_zero()) {
            return self.rec(next, alpha_r, depth + 1);
        }
        let from = fd.alphas.context.clone();
        let fds = fd.rescale(alpha_r)?;
        self.record(|| TraceEvent::Rescaled {
            depth,
            from,
            to: alpha_r.clone(),
            result: fds.clone(),
        });
        if top == 0 && left == 0 {
            return Ok(fds);
        }
        let rows: Vec<usize> = (top..nr).chain(0..top).collect();
        let cols: Vec<usize> = (left..nc).collect();
        let h = next.select(&rows, &cols);
        let fh = self.general_step(&h, alpha_r, nr - top, nc - left, fds, None, depth + 1)?;
        embed(fh, &rows, nr, &cols, nc)
    }

    fn join<A: Send, B: Send>(
        &self,
        a: impl FnOnce() -> A + Send,
        b: impl FnOnce() -> B + Send,
    ) -> (A, B) {
        #[cfg(feature = "parallel")]
        if self.config.parallel {
            return rayon::join(a, b);
        }
        (a(), b())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type M = DenseMatrix<BigInt>;

    fn m(rows: &[Vec<i64>]) -> M {
        DenseMatrix::from_i64_rows(rows).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn ctx(alpha: i64) -> RecursionContext<BigInt> {
        RecursionContext::new(0, BigInt::from(alpha)).unwrap()
    }

    #[test]
    fn pow2_split_sizes() {
        let p = SplitPolicy::Pow2;
        assert_eq!([2, 3, 4, 5, 6, 8, 9].map(|n| p.split(n, 0)), [1, 2, 2, 4, 4, 4, 8]);
        assert_eq!(SplitPolicy::Half.split(7, 0), 3);
        let s: SplitPolicy = "4,2".parse().unwrap();
        assert_eq!(s, SplitPolicy::Schedule(vec![4, 2]));
        assert_eq!((s.split(6, 0), s.split(4, 1), s.split(2, 1), s.split(3, 5)), (4, 2, 1, 2));
        assert!("4,x".parse::<SplitPolicy>().is_err());
        assert!("0".parse::<SplitPolicy>().is_err());
    }

    #[test]
    fn single_entry_in_context() {
        let f = ldu_rec(&m(&[vec![7]]), &ctx(3), &Config::default()).unwrap();
        assert_eq!(f.l, m(&[vec![7]]));
        assert_eq!(f.u, m(&[vec![7]]));
        assert_eq!((f.m.clone(), f.w.clone()), (m(&[vec![3]]), m(&[vec![3]])));
        assert_eq!(f.alphas.values, ints(&[7]));
    }

    #[test]
    fn two_by_two_recursive_and_closed_form_agree() {
        let a = m(&[vec![3, 2], vec![1, 3]]);
        let f = ldu_rec(&a, &ctx(1), &Config::default()).unwrap();
        assert_eq!(f.l, m(&[vec![3, 0], vec![1, 7]]));
        assert_eq!(f.u, m(&[vec![3, 2], vec![0, 7]]));
        assert_eq!(f.m, m(&[vec![1, 0], vec![-1, 3]]));
        assert_eq!(f.w, m(&[vec![1, -2], vec![0, 3]]));
        assert_eq!(base_2x2(&a, &ctx(1)).unwrap(), f);
        assert_eq!(strongly_regular_ldu(&a, &ctx(1), &SplitPolicy::Pow2).unwrap(), f);
    }

    #[test]
    fn base_cases() {
        let row = base_single_line(&m(&[vec![2, 3]]), &ctx(1)).unwrap();
        assert_eq!((row.l.clone(), row.u.clone()), (m(&[vec![2]]), m(&[vec![2, 3], vec![0, 1]])));
        let col = base_single_line(&m(&[vec![5], vec![10]]), &ctx(1)).unwrap();
        assert_eq!((col.l.clone(), col.u.clone()), (m(&[vec![5, 0], vec![10, 1]]), m(&[vec![5]])));
        assert!(base_single_line(&m(&[vec![0, 1]]), &ctx(1)).is_err());
        let id = base_2x2(&m(&[vec![1, 0], vec![0, 1]]), &ctx(1)).unwrap();
        assert!(id.l.is_identity() && id.u.is_identity());
        assert_eq!(
            base_2x2(&m(&[vec![2, 4], vec![1, 2]]), &ctx(1)),
            Err(Error::ZeroPivot(1))
        );
    }

    #[test]
    fn rank_one_and_zero_inputs() {
        let f = decompose(&m(&[vec![2, 1], vec![4, 2]]), &SplitPolicy::Pow2).unwrap();
        assert_eq!(f.l, m(&[vec![2, 0], vec![4, 1]]));
        assert_eq!(f.u, m(&[vec![2, 1], vec![0, 1]]));
        assert_eq!(f.alphas.values, ints(&[2]));
        let g = decompose(&m(&[vec![2, 4], vec![1, 2]]), &SplitPolicy::Pow2).unwrap();
        assert_eq!(g.l, m(&[vec![2, 0], vec![1, 1]]));
        let z = decompose(&M::zeros(2, 3), &SplitPolicy::Pow2).unwrap();
        assert_eq!(z.rank(), 0);
        assert!(z.l.is_identity() && z.u.is_identity() && z.p.is_identity());
        let i3 = decompose(&M::identity(3), &SplitPolicy::Pow2).unwrap();
        assert!(i3.l.is_identity() && i3.u.is_identity() && i3.q.is_identity());
        assert_eq!(i3.alphas.values, ints(&[1, 1, 1]));
        assert_eq!(decompose(&M::zeros(0, 2), &SplitPolicy::Pow2), Err(Error::Empty));
    }

    #[test]
    fn strongly_regular_diagonal() {
        let f = strongly_regular_ldu(&m(&[vec![2, 0], vec![0, 3]]), &ctx(1), &SplitPolicy::Pow2)
            .unwrap();
        assert_eq!(f.alphas.values, ints(&[2, 6]));
        assert_eq!(f.l, m(&[vec![2, 0], vec![0, 6]]));
        assert_eq!(f.u, m(&[vec![2, 0], vec![0, 6]]));
        let singular = m(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]);
        assert!(matches!(
            strongly_regular_ldu(&singular, &ctx(1), &SplitPolicy::Pow2),
            Err(Error::ZeroPivot(_))
        ));
        let cfg = Config {
            strongly_regular_first: true,
            ..Config::default()
        };
        assert_eq!(
            decompose_with(&singular, &cfg).unwrap(),
            decompose(&singular, &SplitPolicy::Pow2).unwrap()
        );
    }

    #[test]
    fn scaled_subproblem_lifts_context() {
        let b = m(&[vec![28, 28], vec![-7, -21]]);
        let c = ctx(7).rescaled(BigInt::from(10));
        let f = scaled_subproblem(&b, &c, &Config::default()).unwrap();
        assert_eq!(f.l, m(&[vec![40, 0], vec![-10, -80]]));
        assert_eq!(f.w, m(&[vec![10, -40], vec![0, 40]]));
        assert_eq!(f.alphas.values, ints(&[40, -80]));
        let same = scaled_subproblem(&b, &ctx(7).rescaled(BigInt::from(7)), &Config::default());
        assert_eq!(same.unwrap(), ldu_rec(&b, &ctx(7), &Config::default()).unwrap());
    }

    #[test]
    fn schur_update_scalar_and_zero_b() {
        let one = |v: i64| m(&[vec![v]]);
        let s = schur_update(
            &one(2),
            &one(1),
            &one(3),
            &one(1),
            &one(1),
            &AlphaSequence::new(BigInt::from(1), ints(&[3])),
        )
        .unwrap();
        assert_eq!(s.next, one(7));
        let d = m(&[vec![1, 2], vec![3, 4]]);
        let z = schur_update(
            &M::zeros(1, 2),
            &m(&[vec![5], vec![6]]),
            &d,
            &one(2),
            &one(2),
            &AlphaSequence::new(BigInt::from(2), ints(&[6])),
        )
        .unwrap();
        assert!(z.u_tilde.is_zero());
        assert_eq!(z.next, d.scale(&BigInt::from(3)).unwrap());
    }

    #[test]
    fn zero_leading_block_cases() {
        let cfg = Config::default();
        let dd = zero_a_dispatch(&m(&[vec![0, 0], vec![0, 5]]), &ctx(1), (1, 1), &cfg).unwrap();
        assert_eq!(dd.rank(), 1);
        assert_eq!(dd.p.images(), &[1, 0]);
        assert_eq!(dd.l, m(&[vec![5, 0], vec![0, 1]]));
        let all = zero_a_dispatch(&M::zeros(3, 3), &ctx(1), (1, 1), &cfg).unwrap();
        assert_eq!(all.rank(), 0);
        assert!(zero_a_dispatch(&M::zeros(3, 3), &ctx(1), (4, 1), &cfg).is_err());
    }

    #[test]
    fn half_zero_keeps_identity_padding() {
        let x = m(&[vec![1, 2, 3, 4], vec![0, 0, 0, 0]]);
        let f = half_zero_dispatch(&x, &ctx(1), (1, 2), &Config::default()).unwrap();
        assert_eq!(f.rank(), 1);
        assert_eq!(f.l, m(&[vec![1, 0], vec![0, 1]]));
    }

    #[test]
    fn transpose_is_involutive() {
        let x = m(&[vec![0, 2, 1], vec![3, 0, 4]]);
        let f = decompose(&x, &SplitPolicy::Pow2).unwrap();
        assert_eq!(f.transpose().transpose(), f);
    }

    #[test]
    fn pivot_order_follows_original_rows_and_columns() {
        let cases = [
            (m(&[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, -1]]), SplitPolicy::Pow2),
            (m(&[vec![0, 1], vec![-1, -1], vec![0, 1]]), SplitPolicy::Pow2),
            (m(&[vec![0, 0, -1, 0], vec![-1, 0, 1, -1], vec![1, 1, -1, 0]]), SplitPolicy::Half),
        ];
        for (x, policy) in cases {
            let f = decompose(&x, &policy).unwrap();
            assert!(crate::derive::script_form(&f).is_ok(), "{x}");
        }
    }

    #[test]
    fn tail_positions_are_sorted() {
        let x = m(&[vec![0, -1, 0]]);
        let f = decompose(&x, &SplitPolicy::Pow2).unwrap();
        assert_eq!(f.q.col_order(), vec![1, 0, 2]);
        assert_eq!(f.u, m(&[vec![-1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]));
    }
}
