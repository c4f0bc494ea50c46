//! Dense matrices, permutations and the fraction-field view.
//!
//! Matrices are values: every operation returns a fresh matrix.

use std::fmt;
use std::ops::Range;

use crate::domain::{Domain, DomainError};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Which index set a permutation acts on.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Rows,
    Cols,
}

impl<T: Clone> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                op: "new",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors. An empty list gives a 0×0 matrix.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (row, entries) in rows.into_iter().enumerate() {
            if entries.len() != cols {
                return Err(Error::Ragged {
                    row,
                    expected: cols,
                    found: entries.len(),
                });
            }
            data.extend(entries);
        }
        Ok(DenseMatrix {
            rows: n,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<S>(&self, f: impl FnMut(&T) -> S) -> DenseMatrix<S> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<S, E>(
        &self,
        f: impl FnMut(&T) -> std::result::Result<S, E>,
    ) -> std::result::Result<DenseMatrix<S>, E> {
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<std::result::Result<_, _>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Copies the block `rows × cols`.
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Result<Self> {
        if rows.start > rows.end
            || cols.start > cols.end
            || rows.end > self.rows
            || cols.end > self.cols
        {
            return Err(Error::OutOfRange { op: "submatrix" });
        }
        Ok(self.block(rows, cols))
    }

    pub(crate) fn block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let width = cols.len();
        let mut data = Vec::with_capacity(rows.len() * width);
        for i in rows.clone() {
            data.extend_from_slice(&self.row(i)[cols.clone()]);
        }
        DenseMatrix {
            rows: rows.len(),
            cols: width,
            data,
        }
    }

    /// Gathers the rows and columns listed, in the order listed.
    ///
    /// # Panics
    /// If an index is out of bounds.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            let row = self.row(i);
            data.extend(cols.iter().map(|&j| row[j].clone()));
        }
        DenseMatrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        DenseMatrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        self.select(&(0..self.rows).collect::<Vec<_>>(), cols)
    }

    /// Inverse of splitting a matrix into four blocks.
    pub fn assemble_2x2(a11: &Self, a12: &Self, a21: &Self, a22: &Self) -> Result<Self> {
        let conformable = a11.rows == a12.rows
            && a21.rows == a22.rows
            && a11.cols == a21.cols
            && a12.cols == a22.cols;
        if !conformable {
            return Err(Error::Dimension {
                op: "assemble_2x2",
                left: (a11.rows, a11.cols),
                right: (a22.rows, a22.cols),
            });
        }
        let cols = a11.cols + a12.cols;
        let mut data = Vec::with_capacity((a11.rows + a21.rows) * cols);
        for (left, right) in [(a11, a12), (a21, a22)] {
            for i in 0..left.rows {
                data.extend_from_slice(left.row(i));
                data.extend_from_slice(right.row(i));
            }
        }
        Ok(DenseMatrix {
            rows: a11.rows + a21.rows,
            cols,
            data,
        })
    }

    pub fn permute(&self, p: &Permutation, side: Side, transpose: bool) -> Result<Self> {
        let expected = match side {
            Side::Rows => self.rows,
            Side::Cols => self.cols,
        };
        if p.len() != expected {
            return Err(Error::Dimension {
                op: "permute",
                left: (p.len(), p.len()),
                right: self.shape(),
            });
        }
        // (P·X)[i] = X[images[i]], (Pᵀ·X)[i] = X[inverse[i]];
        // (X·Pᵀ)[:, j] = X[:, images[j]], (X·P)[:, j] = X[:, inverse[j]].
        let order = match (side, transpose) {
            (Side::Rows, false) | (Side::Cols, true) => p.images().to_vec(),
            (Side::Rows, true) | (Side::Cols, false) => p.inverse().images().to_vec(),
        };
        Ok(match side {
            Side::Rows => self.select_rows(&order),
            Side::Cols => self.select_cols(&order),
        })
    }
}

impl<T: Domain> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        DenseMatrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        DenseMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| T::from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn diagonal(entries: &[T], rows: usize, cols: usize) -> Self {
        DenseMatrix::from_fn(rows, cols, |i, j| {
            if i == j && i < entries.len() {
                entries[i].clone()
            } else {
                T::zero()
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Domain::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .all(|(j, v)| if i == j { v.is_one() } else { v.is_zero() })
            })
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| self.row(i).iter().skip(i + 1).all(Domain::is_zero))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| self.row(i).iter().take(i.min(self.cols)).all(Domain::is_zero))
    }

    pub fn mat_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension {
                op: "mat_mul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            data.extend(self.row_times(i, rhs)?);
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    fn row_times(&self, i: usize, rhs: &Self) -> Result<Vec<T>, DomainError> {
        let mut acc = vec![T::zero(); rhs.cols];
        for (k, a) in self.row(i).iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (slot, b) in acc.iter_mut().zip(rhs.row(k)) {
                slot.add_product(a, b)?;
            }
        }
        Ok(acc)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "add", T::try_add)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "sub", T::try_sub)
    }

    fn zip_with(
        &self,
        rhs: &Self,
        op: &'static str,
        f: impl Fn(&T, &T) -> Result<T, DomainError>,
    ) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::Dimension {
                op,
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| f(a, b))
            .collect::<Result<_, _>>()?;
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: &T) -> Result<Self> {
        if c.is_one() {
            return Ok(self.clone());
        }
        Ok(self.try_map(|v| v.try_mul(c))?)
    }

    /// Divides every entry by `c`, failing unless every division is exact.
    pub fn div_exact(&self, c: &T) -> Result<Self> {
        if c.is_one() {
            return Ok(self.clone());
        }
        Ok(self.try_map(|v| v.exact_div(c))?)
    }

    pub fn neg(&self) -> Result<Self> {
        Ok(self.try_map(T::try_neg)?)
    }

    pub fn to_fractions(&self) -> FractionMatrix<T> {
        self.map(|v| Frac::from_int(v.clone()))
    }

    pub fn max_bit_size(&self) -> u64 {
        self.data.iter().map(Domain::bit_size).max().unwrap_or(0)
    }
}

impl<T: fmt::Display> fmt::Display for DenseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(ToString::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(0);
        for i in 0..self.rows {
            let line: Vec<String> = cells[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|c| format!("{c:>width$}"))
                .collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

/// A bijection on `0..n`. As a matrix it has a one at `(i, images[i])`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(images));
            }
        }
        Ok(Permutation { images })
    }

    /// The permutation `P` for which row `t` of `Pᵀ·X` is row `order[t]`
    /// of `X`.
    pub fn from_row_order(order: Vec<usize>) -> Result<Self> {
        Ok(Permutation::from_images(order)?.inverse())
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// Row `t` of `Pᵀ·X` is row `row_order()[t]` of `X`.
    pub fn row_order(&self) -> Vec<usize> {
        self.inverse().images
    }

    /// Column `t` of `X·Qᵀ` is column `col_order()[t]` of `X`.
    pub fn col_order(&self) -> Vec<usize> {
        self.images.clone()
    }

    /// The permutation whose matrix is `self · other`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension {
                op: "compose",
                left: (self.len(), self.len()),
                right: (other.len(), other.len()),
            });
        }
        Ok(Permutation {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        })
    }

    /// The anti-diagonal identity.
    pub fn flip(n: usize) -> Self {
        Permutation {
            images: (0..n).rev().collect(),
        }
    }

    /// Exchanges a leading block of `n_top` indices with the trailing block
    /// of `n_bottom`, keeping the order inside each block.
    pub fn block_flip(n_top: usize, n_bottom: usize) -> Self {
        let images = (0..n_bottom)
            .map(|i| n_top + i)
            .chain(0..n_top)
            .collect();
        Permutation { images }
    }

    pub fn to_matrix<T: Domain>(&self) -> DenseMatrix<T> {
        let n = self.images.len();
        DenseMatrix::from_fn(n, n, |i, j| {
            if self.images[i] == j {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

/// An element of the fraction field of `T`.
///
/// Equality is cross-multiplicative, so `2/4 == 1/2` in every domain.
#[derive(Clone, Debug)]
pub struct Frac<T> {
    num: T,
    den: T,
}

pub type FractionMatrix<T> = DenseMatrix<Frac<T>>;

impl<T: Domain> Frac<T> {
    pub fn new(num: T, den: T) -> Result<Self, DomainError> {
        if den.is_zero() {
            return Err(DomainError::ZeroDivisor);
        }
        let (num, den) = T::reduce_fraction(num, den);
        Ok(Frac { num, den })
    }

    pub fn from_int(num: T) -> Self {
        Frac { num, den: T::one() }
    }

    pub fn num(&self) -> &T {
        &self.num
    }

    pub fn den(&self) -> &T {
        &self.den
    }

    /// The domain element this fraction equals, if any.
    pub fn to_integral(&self) -> Option<T> {
        self.num.exact_div(&self.den).ok()
    }
}

impl<T: Domain> PartialEq for Frac<T> {
    fn eq(&self, other: &Self) -> bool {
        match (self.num.try_mul(&other.den), other.num.try_mul(&self.den)) {
            (Ok(a), Ok(b)) => a == b,
            _ => self.num == other.num && self.den == other.den,
        }
    }
}

impl<T: Domain> fmt::Display for Frac<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", grouped(&self.num), grouped(&self.den))
        }
    }
}

/// Wraps compound expressions such as `x+1` in parentheses.
fn grouped<T: fmt::Display>(v: &T) -> String {
    let s = v.to_string();
    if s.chars().skip(1).any(|c| matches!(c, '+' | '-' | '*' | '/')) {
        format!("({s})")
    } else {
        s
    }
}

impl<T: Domain> Domain for Frac<T> {
    const NAME: &'static str = "fraction";

    fn zero() -> Self {
        Frac::from_int(T::zero())
    }

    fn one() -> Self {
        Frac::from_int(T::one())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn is_one(&self) -> bool {
        self.num == self.den
    }

    fn from_i64(value: i64) -> Self {
        Frac::from_int(T::from_i64(value))
    }

    fn try_add(&self, rhs: &Self) -> Result<Self, DomainError> {
        if self.den == rhs.den {
            return Frac::new(self.num.try_add(&rhs.num)?, self.den.clone());
        }
        let num = self
            .num
            .try_mul(&rhs.den)?
            .try_add(&rhs.num.try_mul(&self.den)?)?;
        Frac::new(num, self.den.try_mul(&rhs.den)?)
    }

    fn try_sub(&self, rhs: &Self) -> Result<Self, DomainError> {
        self.try_add(&rhs.try_neg()?)
    }

    fn try_mul(&self, rhs: &Self) -> Result<Self, DomainError> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero());
        }
        Frac::new(self.num.try_mul(&rhs.num)?, self.den.try_mul(&rhs.den)?)
    }

    fn try_neg(&self) -> Result<Self, DomainError> {
        Ok(Frac {
            num: self.num.try_neg()?,
            den: self.den.clone(),
        })
    }

    fn exact_div(&self, rhs: &Self) -> Result<Self, DomainError> {
        if rhs.is_zero() {
            return Err(DomainError::ZeroDivisor);
        }
        Frac::new(self.num.try_mul(&rhs.den)?, self.den.try_mul(&rhs.num)?)
    }

    fn parse_literal(text: &str) -> Result<Self, DomainError> {
        match text.split_once('/') {
            Some((p, q)) => Frac::new(T::parse_literal(p)?, T::parse_literal(q)?),
            None => Ok(Frac::from_int(T::parse_literal(text)?)),
        }
    }

    fn bit_size(&self) -> u64 {
        self.num.bit_size().max(self.den.bit_size())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use crate::domain::Poly;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> DenseMatrix<i64> {
        DenseMatrix::from_i64_rows(rows).unwrap()
    }

    fn golden() -> DenseMatrix<i64> {
        m(&[
            vec![3, 2, 3, 5, 1, 2],
            vec![1, 3, 4, 2, 3, 4],
            vec![3, 2, 3, 5, 5, 6],
            vec![1, 3, 4, 2, 2, 1],
            vec![2, 1, 3, 2, 2, 3],
            vec![2, 1, 3, 2, 2, 3],
        ])
    }

    #[test]
    fn mat_mul_examples() {
        let a = m(&[vec![1, 0], vec![-1, 3]]);
        let b = m(&[vec![3, 5], vec![4, 2]]);
        assert_eq!(a.mat_mul(&b).unwrap(), m(&[vec![3, 5], vec![9, 1]]));
        assert_eq!(
            m(&[vec![2]]).mat_mul(&m(&[vec![3, 4]])).unwrap(),
            m(&[vec![6, 8]])
        );
        let g = golden().submatrix(0..3, 0..3).unwrap();
        assert_eq!(DenseMatrix::identity(3).mat_mul(&g).unwrap(), g);
        assert!(matches!(a.mat_mul(&g), Err(Error::Dimension { .. })));
    }

    #[test]
    fn submatrix_blocks() {
        let g = golden();
        assert_eq!(
            g.submatrix(0..4, 0..4).unwrap(),
            m(&[
                vec![3, 2, 3, 5],
                vec![1, 3, 4, 2],
                vec![3, 2, 3, 5],
                vec![1, 3, 4, 2]
            ])
        );
        assert_eq!(g.submatrix(0..2, 4..6).unwrap(), m(&[vec![1, 2], vec![3, 4]]));
        assert_eq!(g.submatrix(0..6, 0..6).unwrap(), g);
        assert!(g.submatrix(0..7, 0..1).is_err());
    }

    #[test]
    fn assemble_examples() {
        let l = DenseMatrix::assemble_2x2(
            &m(&[vec![3]]),
            &m(&[vec![0]]),
            &m(&[vec![1]]),
            &m(&[vec![7]]),
        )
        .unwrap();
        assert_eq!(l, m(&[vec![3, 0], vec![1, 7]]));
        let z = DenseMatrix::<i64>::zeros(1, 2);
        let d = DenseMatrix::assemble_2x2(
            &DenseMatrix::identity(1),
            &z,
            &z.transpose(),
            &DenseMatrix::identity(2),
        )
        .unwrap();
        assert!(d.is_identity());
        assert!(DenseMatrix::assemble_2x2(&z, &z, &z, &m(&[vec![1]])).is_err());
    }

    #[test]
    fn permutation_matrix_rows_follow_images() {
        let p = Permutation::from_images(vec![1, 2, 0, 3]).unwrap();
        assert_eq!(
            p.to_matrix::<i64>(),
            m(&[
                vec![0, 1, 0, 0],
                vec![0, 0, 1, 0],
                vec![1, 0, 0, 0],
                vec![0, 0, 0, 1]
            ])
        );
        let x = m(&[vec![1, 1], vec![2, 2], vec![3, 3], vec![4, 4]]);
        let px = x.permute(&p, Side::Rows, false).unwrap();
        assert_eq!(px, p.to_matrix().mat_mul(&x).unwrap());
        assert_eq!(px, m(&[vec![2, 2], vec![3, 3], vec![1, 1], vec![4, 4]]));
        let t = Permutation::from_images(vec![1, 0, 2, 3]).unwrap();
        let twice = x
            .permute(&t, Side::Rows, false)
            .unwrap()
            .permute(&t, Side::Rows, false)
            .unwrap();
        assert_eq!(twice, x);
        assert_eq!(x.permute(&Permutation::identity(4), Side::Rows, true).unwrap(), x);
    }

    #[test]
    fn column_permutation_matches_matrix_product() {
        let q = Permutation::from_images(vec![2, 0, 1]).unwrap();
        let x = m(&[vec![1, 2, 3], vec![4, 5, 6]]);
        let qm = q.to_matrix::<i64>();
        assert_eq!(x.permute(&q, Side::Cols, false).unwrap(), x.mat_mul(&qm).unwrap());
        assert_eq!(
            x.permute(&q, Side::Cols, true).unwrap(),
            x.mat_mul(&qm.transpose()).unwrap()
        );
        assert_eq!(
            x.permute(&q, Side::Rows, false),
            Err(Error::Dimension {
                op: "permute",
                left: (3, 3),
                right: (2, 3)
            })
        );
    }

    #[test]
    fn flips() {
        assert!(Permutation::flip(1).is_identity());
        assert_eq!(Permutation::flip(2).images(), &[1, 0]);
        let f3 = Permutation::flip(3);
        let x = m(&[vec![1], vec![2], vec![3]]);
        let back = x
            .permute(&f3, Side::Rows, false)
            .unwrap()
            .permute(&f3, Side::Rows, false)
            .unwrap();
        assert_eq!(back, x);
        assert!(Permutation::block_flip(0, 4).is_identity());
        assert_eq!(Permutation::block_flip(1, 1), Permutation::flip(2));
        let layout = m(&[vec![0, 0, 1, 1], vec![0, 0, 1, 1], vec![2, 2, 3, 3], vec![2, 2, 3, 3]]);
        let flipped = layout
            .permute(&Permutation::block_flip(2, 2), Side::Rows, false)
            .unwrap();
        assert_eq!(
            flipped,
            m(&[vec![2, 2, 3, 3], vec![2, 2, 3, 3], vec![0, 0, 1, 1], vec![0, 0, 1, 1]])
        );
    }

    #[test]
    fn composition_matches_matrix_product() {
        let a = Permutation::from_images(vec![2, 0, 1]).unwrap();
        let b = Permutation::from_images(vec![1, 0, 2]).unwrap();
        let ab = a.compose(&b).unwrap().to_matrix::<i64>();
        assert_eq!(ab, a.to_matrix().mat_mul(&b.to_matrix()).unwrap());
        assert!(a.compose(&Permutation::identity(2)).is_err());
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![2, 0]).is_err());
    }

    #[test]
    fn fractions() {
        let g = golden().map(|&v| BigInt::from(v));
        let f = g.to_fractions();
        assert_eq!(f.map(|x| x.num().clone()), g);
        assert!(DenseMatrix::<BigInt>::zeros(2, 3).to_fractions().is_zero());
        let half = Frac::new(BigInt::from(2), BigInt::from(4)).unwrap();
        assert_eq!(half.to_string(), "1/2");
        assert_eq!(half, Frac::new(BigInt::from(-3), BigInt::from(-6)).unwrap());
        assert_eq!(half.try_add(&half).unwrap(), Frac::one());
        assert_eq!(half.to_integral(), None);
        assert!(Frac::new(1i64, 0).is_err());
        let neg = Frac::new(BigInt::from(-1), BigInt::from(3)).unwrap();
        assert_eq!(neg.to_string(), "-1/3");
    }

    #[test]
    fn compound_fraction_parts_are_grouped() {
        let f = Frac::new(Poly::from_coeffs(&[1]), Poly::from_coeffs(&[1, 1])).unwrap();
        assert_eq!(f.to_string(), "1/(x+1)");
    }

    fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix<i64>> {
        prop::collection::vec(-9i64..=9, rows * cols)
            .prop_map(move |d| DenseMatrix::new(rows, cols, d).unwrap())
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn permute_round_trip(
            (a, p) in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| (matrix_strategy(r, c), perm_strategy(r)))
        ) {
            let there = a.permute(&p, Side::Rows, true).unwrap();
            prop_assert_eq!(there.permute(&p, Side::Rows, false).unwrap(), a);
            let pm = p.to_matrix::<i64>();
            prop_assert!(pm.mat_mul(&pm.transpose()).unwrap().is_identity());
        }

        #[test]
        fn split_assemble_round_trip(
            (a, i, j) in (1usize..7, 1usize..7).prop_flat_map(|(r, c)| (matrix_strategy(r, c), 0..=r, 0..=c))
        ) {
            let (r, c) = a.shape();
            let back = DenseMatrix::assemble_2x2(
                &a.submatrix(0..i, 0..j).unwrap(),
                &a.submatrix(0..i, j..c).unwrap(),
                &a.submatrix(i..r, 0..j).unwrap(),
                &a.submatrix(i..r, j..c).unwrap(),
            ).unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn mat_mul_is_associative(
            (a, b, c) in (1usize..5, 1usize..5, 1usize..5, 1usize..5)
                .prop_flat_map(|(n, k, l, m)| (matrix_strategy(n, k), matrix_strategy(k, l), matrix_strategy(l, m)))
        ) {
            let left = a.mat_mul(&b).unwrap().mat_mul(&c).unwrap();
            let right = a.mat_mul(&b.mat_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
