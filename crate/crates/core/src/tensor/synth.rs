//! Seeded synthetic tensors.

use std::collections::HashSet;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Shape, SparseTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Distribution {
    /// Every index tuple is equally likely.
    Uniform,
    /// `mode` only uses `hot` coordinates (spread over its extent) with
    /// harmonic weights; every hot coordinate receives at least one nonzero
    /// when `nnz >= hot`. Other modes stay uniform.
    ModeSkewed { mode: usize, hot: usize },
}

/// Generates exactly `nnz` distinct index tuples with values uniform in `(0, 1]`.
///
/// The result is a pure function of the arguments; elements come out in
/// lexicographic coordinate order.
pub fn generate_synthetic<T: Scalar>(
    dims: &[usize],
    nnz: usize,
    distribution: Distribution,
    seed: u64,
) -> Result<SparseTensor<T>> {
    let shape = Shape::new(dims.to_vec())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut tuples = match distribution {
        Distribution::Uniform => {
            let capacity = shape.capacity();
            check_capacity(nnz, capacity)?;
            sample_tuples(&mut rng, dims, nnz, capacity, None)
        }
        Distribution::ModeSkewed { mode, hot } => {
            shape.check_mode(mode)?;
            if hot == 0 {
                return Err(Error::InvalidConfig("mode-skewed generation needs hot >= 1".into()));
            }
            let extent = dims[mode];
            let hot = hot.min(extent);
            let hot_coords: Vec<u32> = (0..hot).map(|k| (k * extent / hot) as u32).collect();
            let mut reduced = dims.to_vec();
            reduced[mode] = hot;
            let capacity: u128 = reduced.iter().map(|&e| e as u128).product();
            check_capacity(nnz, capacity)?;
            let mut tuples = sample_tuples(&mut rng, &reduced, nnz, capacity, Some(mode));
            cover_all_slots(&mut tuples, mode, hot);
            for t in &mut tuples {
                t[mode] = hot_coords[t[mode] as usize];
            }
            tuples
        }
    };

    tuples.sort_unstable();
    let values: Vec<T> = (0..tuples.len())
        .map(|_| T::from_f64(1.0 - rng.gen::<f64>()))
        .collect();
    let indices = tuples.into_iter().flatten().collect();
    SparseTensor::new(shape, indices, values)
}

fn check_capacity(nnz: usize, capacity: u128) -> Result<()> {
    if nnz as u128 > capacity {
        Err(Error::CapacityExceeded { nnz: nnz as u128, capacity })
    } else {
        Ok(())
    }
}

/// Draws `nnz` distinct tuples from the box `dims`. When `skew_mode` is set
/// that mode's coordinate is drawn with weights `1/(k+1)` in the sparse regime.
fn sample_tuples(
    rng: &mut ChaCha8Rng,
    dims: &[usize],
    nnz: usize,
    capacity: u128,
    skew_mode: Option<usize>,
) -> Vec<Vec<u32>> {
    // Dense regime: sample linear positions without replacement.
    if capacity <= 2 * nnz as u128 {
        let capacity = capacity as usize;
        return rand::seq::index::sample(rng, capacity, nnz)
            .into_iter()
            .map(|mut linear| {
                let mut t = vec![0u32; dims.len()];
                for (slot, &extent) in t.iter_mut().zip(dims).rev() {
                    *slot = (linear % extent) as u32;
                    linear /= extent;
                }
                t
            })
            .collect();
    }

    let skew = skew_mode.map(|mode| {
        let weights: Vec<f64> = (0..dims[mode]).map(|k| 1.0 / (k + 1) as f64).collect();
        (mode, WeightedIndex::new(weights).expect("positive weights"))
    });
    let mut seen: HashSet<Vec<u32>> = HashSet::with_capacity(nnz);
    let mut out = Vec::with_capacity(nnz);
    while out.len() < nnz {
        let t: Vec<u32> = dims
            .iter()
            .enumerate()
            .map(|(mode, &extent)| match &skew {
                Some((m, w)) if *m == mode => w.sample(rng) as u32,
                _ => rng.gen_range(0..extent) as u32,
            })
            .collect();
        if seen.insert(t.clone()) {
            out.push(t);
        }
    }
    out
}

/// Moves elements so every slot `0..slots` of `mode` is used at least once.
/// A moved element keeps its other coordinates; the target slot is empty, so
/// no duplicate can arise.
fn cover_all_slots(tuples: &mut [Vec<u32>], mode: usize, slots: usize) {
    if tuples.len() < slots {
        return;
    }
    let mut counts = vec![0usize; slots];
    for t in tuples.iter() {
        counts[t[mode] as usize] += 1;
    }
    for empty in 0..slots {
        if counts[empty] > 0 {
            continue;
        }
        let donor = (0..slots).max_by_key(|&s| (counts[s], std::cmp::Reverse(s))).unwrap();
        let victim = tuples.iter().rposition(|t| t[mode] as usize == donor).unwrap();
        tuples[victim][mode] = empty as u32;
        counts[donor] -= 1;
        counts[empty] += 1;
    }
}
