//! Fraction-free recursive LDU and Bruhat decomposition of matrices over
//! commutative domains.
//!
//! Any `n × m` matrix `A` over a domain `R` is factored as
//! `A = P·L·D·U·Q` with `P`, `Q` permutations, `L` lower and `U` upper
//! triangular over `R`, and `D` a diagonal matrix over the fraction field
//! built from the pivot minors. No step of the engine leaves `R`.
//!
//! ```
//! use tridecomp::{decompose, DenseMatrix, SplitPolicy};
//! use num_bigint::BigInt;
//!
//! let a = DenseMatrix::<BigInt>::from_i64_rows(&[vec![3, 2], vec![1, 3]]).unwrap();
//! let f = decompose(&a, &SplitPolicy::Pow2).unwrap();
//! assert_eq!(f.rank(), 2);
//! assert_eq!(f.alphas.values, vec![BigInt::from(3), BigInt::from(7)]);
//! ```

pub mod bench;
pub mod derive;
pub mod domain;
pub mod error;
pub mod io;
pub mod ldu;
pub mod matrix;
pub mod oracle;

pub use domain::{Domain, DomainError, Poly};
pub use error::{Error, Result};
pub use ldu::{decompose, decompose_with, AlphaSequence, Config, Factorization, SplitPolicy};
pub use matrix::{DenseMatrix, Frac, FractionMatrix, Permutation, Side};
