//! Seeded scaling benchmark with factor checksums.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::domain::Domain;
use crate::error::Result;
use crate::ldu::{decompose_with, Config, Factorization};
use crate::matrix::DenseMatrix;

/// Bound on the absolute value of generated entries.
pub const ENTRY_BOUND: i64 = 9;

/// A square matrix with entries drawn uniformly from `[-9, 9]`. The stream
/// depends only on `seed` and `n`.
pub fn random_matrix<T: Domain>(n: usize, seed: u64) -> DenseMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).rotate_left(32));
    DenseMatrix::from_fn(n, n, |_, _| {
        T::from_i64(rng.gen_range(-ENTRY_BOUND..=ENTRY_BOUND))
    })
}

/// SHA-256 over the printed permutations, alphas and triangular factors.
pub fn checksum<T: Domain>(f: &Factorization<T>) -> String {
    let mut h = Sha256::new();
    h.update(format!("{:?}{:?}", f.p.images(), f.q.images()));
    for a in &f.alphas.values {
        h.update(a.to_string());
        h.update(",");
    }
    h.update(f.l.to_string());
    h.update(f.u.to_string());
    format!("{:x}", h.finalize())
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub size: usize,
    pub seconds: f64,
    pub max_bits: u64,
    pub rank: usize,
    pub checksum: String,
    /// `t(size) / t(previous size)`.
    pub ratio: Option<f64>,
}

/// Times the decomposition of one seeded matrix per size, keeping the
/// fastest of `reps` runs.
pub fn run<T: Domain>(sizes: &[usize], seed: u64, reps: usize, config: &Config) -> Result<Vec<BenchRow>> {
    let mut out: Vec<BenchRow> = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let a = random_matrix::<T>(size, seed);
        let mut best = Duration::MAX;
        let mut last = None;
        for _ in 0..reps.max(1) {
            let start = Instant::now();
            let f = decompose_with(&a, config)?;
            best = best.min(start.elapsed());
            last = Some(f);
        }
        let f = last.expect("at least one repetition");
        let seconds = best.as_secs_f64();
        let ratio = out.last().map(|prev| seconds / prev.seconds.max(f64::MIN_POSITIVE));
        out.push(BenchRow {
            size,
            seconds,
            max_bits: f.l.max_bit_size().max(f.u.max_bit_size()),
            rank: f.rank(),
            checksum: checksum(&f),
            ratio,
        });
    }
    Ok(out)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("size,seconds,max_bits,rank,ratio,checksum\n");
    for r in rows {
        let ratio = r.ratio.map(|x| format!("{x:.3}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{:.6},{},{},{},{}\n",
            r.size, r.seconds, r.max_bits, r.rank, ratio, r.checksum
        ));
    }
    out
}
