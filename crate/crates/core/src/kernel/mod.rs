//! Parallel spMTTKRP executor.
//!
//! A mode is executed by a pool of up to κ workers, one per partition of the
//! mode's [`ModePlan`](crate::layout::ModePlan). Each worker walks its
//! partition in batches of `P` nonzeros (the columns of a virtual `R × P`
//! thread block): it first computes the `R`-wide partial product of every
//! column, then applies the batch to the output rows. Scheme 1 partitions own
//! their rows and write them directly; Scheme 2 partitions share rows and use
//! atomic adds.

mod exec;
mod timing;

pub use exec::{mttkrp_all_modes, mttkrp_mode, mttkrp_mode_with_stats, ModeStats};
pub use timing::{run_timed, ModeTiming, TimingReport};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Shape;

/// Dense row-major `rows × rank` factor matrix of one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FactorMatrix<T> {
    mode: usize,
    rows: usize,
    rank: usize,
    data: Vec<T>,
}

impl<T: Scalar> FactorMatrix<T> {
    pub fn zeros(mode: usize, rows: usize, rank: usize) -> Self {
        FactorMatrix { mode, rows, rank, data: vec![T::zero(); rows * rank] }
    }

    pub fn from_vec(mode: usize, rows: usize, rank: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * rank {
            return Err(Error::ShapeMismatch(format!(
                "factor matrix {rows}×{rank} given {} entries",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidElement {
                position: i,
                reason: format!("non-finite factor entry at row {}, column {}", i / rank.max(1), i % rank.max(1)),
            });
        }
        Ok(FactorMatrix { mode, rows, rank, data })
    }

    /// Entries uniform in `(0, 1]`.
    pub fn random<R: Rng>(mode: usize, rows: usize, rank: usize, rng: &mut R) -> Self {
        let data = (0..rows * rank).map(|_| T::from_f64(1.0 - rng.gen::<f64>())).collect();
        FactorMatrix { mode, rows, rank, data }
    }

    pub fn mode(&self) -> usize {
        self.mode
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.rank..(i + 1) * self.rank]
    }

    #[inline]
    pub fn get(&self, i: usize, r: usize) -> T {
        self.data[i * self.rank + r]
    }

    /// Bitwise equality, distinguishing `0.0` from `-0.0`.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.rank == other.rank
            && self.data.iter().zip(&other.data).all(|(a, b)| Scalar::to_f64(*a).to_bits() == Scalar::to_f64(*b).to_bits())
    }
}

/// One random factor matrix per mode, all drawn from a single seeded stream.
pub fn init_factors<T: Scalar>(shape: &Shape, rank: usize, seed: u64) -> Vec<FactorMatrix<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shape
        .dims()
        .iter()
        .enumerate()
        .map(|(mode, &rows)| FactorMatrix::random(mode, rows, rank, &mut rng))
        .collect()
}

/// Checks that `factors` has one matrix per mode with matching rows and a common rank.
pub fn check_factors<T: Scalar>(shape: &Shape, factors: &[&FactorMatrix<T>], rank: usize) -> Result<()> {
    if factors.len() != shape.order() {
        return Err(Error::ShapeMismatch(format!(
            "{} factor matrices for a {}-mode tensor",
            factors.len(),
            shape.order()
        )));
    }
    for (mode, f) in factors.iter().enumerate() {
        if f.rows() != shape.extent(mode) {
            return Err(Error::ShapeMismatch(format!(
                "factor {mode} has {} rows, mode extent is {}",
                f.rows(),
                shape.extent(mode)
            )));
        }
        if f.rank() != rank {
            return Err(Error::ShapeMismatch(format!("factor {mode} has rank {}, expected {rank}", f.rank())));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecConfig {
    /// Worker count; partition `z` runs on worker `z mod kappa`.
    pub kappa: usize,
    /// Nonzeros per virtual thread-block batch (P).
    pub batch: usize,
    pub rank: usize,
    /// Run partitions one after another in partition-id order.
    pub deterministic: bool,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            kappa: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            batch: 32,
            rank: 32,
            deterministic: false,
        }
    }
}

impl ExecConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kappa == 0 || self.batch == 0 || self.rank == 0 {
            return Err(Error::InvalidConfig(format!(
                "kappa, batch and rank must all be >= 1 (got {}, {}, {})",
                self.kappa, self.batch, self.rank
            )));
        }
        Ok(())
    }
}

/// `ℓ(r) = val × Π_{w≠d} Y_w(c_w, r)` for one nonzero.
pub fn elementwise_update<T: Scalar>(
    coords: &[u32],
    value: T,
    factors: &[FactorMatrix<T>],
    mode: usize,
) -> Result<Vec<T>> {
    let rank = factors.first().map(FactorMatrix::rank).unwrap_or(0);
    if factors.iter().any(|f| f.rank() != rank) {
        return Err(Error::ShapeMismatch("factor matrices disagree on rank".into()));
    }
    if coords.len() != factors.len() || mode >= coords.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} coordinates, {} factors, output mode {mode}",
            coords.len(),
            factors.len()
        )));
    }
    let refs: Vec<&FactorMatrix<T>> = factors.iter().collect();
    let mut acc = vec![T::zero(); rank];
    exec::accumulate_row(&mut acc, coords, value, &refs, mode);
    Ok(acc)
}
