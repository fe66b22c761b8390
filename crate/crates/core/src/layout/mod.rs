//! Mode-specific tensor copies.
//!
//! For every output mode `d` the tensor is viewed as a hypergraph: each mode-d
//! coordinate is a vertex and each nonzero a hyperedge incident on it. The
//! adaptive selector picks one of two partitionings into κ parts:
//!
//! - [`Scheme::Scheme1`] distributes vertices, so every output row is owned by
//!   exactly one partition and can be updated without synchronisation.
//! - [`Scheme::Scheme2`] distributes hyperedges evenly, so no partition idles
//!   when the mode has fewer than κ vertices, at the price of shared rows.

mod memory;
mod metrics;
mod partition;

pub use memory::{estimate_memory, estimate_memory_for, index_bits, MemoryEstimate};
pub use metrics::{balance_metrics, BalanceMetrics};
pub use partition::{assign_vertices, equal_split_offsets, partition_scheme1, partition_scheme2, ModePlan};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::SparseTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Equal distribution of output indices; rows are partition-owned.
    Scheme1,
    /// Equal distribution of nonzeros; rows may be shared across partitions.
    Scheme2,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Scheme1 => "scheme1",
            Scheme::Scheme2 => "scheme2",
        })
    }
}

/// Vertex-to-partition assignment used by Scheme 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Vertex `k` of the degree-descending order goes to partition `k mod κ`.
    #[default]
    Cyclic,
    /// Longest-processing-time: each vertex goes to the currently lightest
    /// partition (lowest id on ties).
    LeastLoaded,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(Strategy::Cyclic),
            "lpt" | "least-loaded" => Ok(Strategy::LeastLoaded),
            other => Err(Error::InvalidConfig(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemePolicy {
    #[default]
    Adaptive,
    Scheme1Only,
    Scheme2Only,
}

impl FromStr for SchemePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(SchemePolicy::Adaptive),
            "s1" | "s1-only" => Ok(SchemePolicy::Scheme1Only),
            "s2" | "s2-only" => Ok(SchemePolicy::Scheme2Only),
            other => Err(Error::InvalidConfig(format!("unknown scheme policy `{other}`"))),
        }
    }
}

/// Per-vertex hyperedge counts for one mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    pub mode: usize,
    /// `degrees[i]` is the number of nonzeros whose mode coordinate is `i`.
    pub degrees: Vec<usize>,
}

impl DegreeProfile {
    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }

    /// Number of vertices with at least one incident nonzero.
    pub fn active_vertices(&self) -> usize {
        self.degrees.iter().filter(|&&d| d > 0).count()
    }

    /// Active vertices ordered by degree (descending), ties by ascending index.
    pub fn ordered_vertices(&self) -> Vec<u32> {
        let mut v: Vec<u32> = (0..self.degrees.len() as u32)
            .filter(|&i| self.degrees[i as usize] > 0)
            .collect();
        v.sort_by(|&a, &b| {
            self.degrees[b as usize]
                .cmp(&self.degrees[a as usize])
                .then(a.cmp(&b))
        });
        v
    }
}

pub fn mode_degrees<T: Scalar>(tensor: &SparseTensor<T>, mode: usize) -> Result<DegreeProfile> {
    tensor.shape().check_mode(mode)?;
    let mut degrees = vec![0usize; tensor.shape().extent(mode)];
    for (coords, _) in tensor.iter() {
        degrees[coords[mode] as usize] += 1;
    }
    Ok(DegreeProfile { mode, degrees })
}

/// Scheme 1 when the output mode has at least as many indices as partitions.
pub fn select_scheme(index_count: usize, kappa: usize) -> Scheme {
    if index_count >= kappa {
        Scheme::Scheme1
    } else {
        Scheme::Scheme2
    }
}

/// One plan per mode with the adaptive scheme choice.
pub fn build_mode_plans<T: Scalar>(
    tensor: &SparseTensor<T>,
    kappa: usize,
    strategy: Strategy,
) -> Result<Vec<ModePlan<T>>> {
    build_mode_plans_with_policy(tensor, kappa, strategy, SchemePolicy::Adaptive)
}

/// One plan per mode. The index count fed to [`select_scheme`] is the number
/// of distinct coordinates present in the mode. Modes are planned concurrently.
pub fn build_mode_plans_with_policy<T: Scalar>(
    tensor: &SparseTensor<T>,
    kappa: usize,
    strategy: Strategy,
    policy: SchemePolicy,
) -> Result<Vec<ModePlan<T>>> {
    if kappa == 0 {
        return Err(Error::ZeroPartitions);
    }
    let plan_one = |mode: usize| -> Result<ModePlan<T>> {
        let scheme = match policy {
            SchemePolicy::Adaptive => select_scheme(tensor.distinct_count(mode)?, kappa),
            SchemePolicy::Scheme1Only => Scheme::Scheme1,
            SchemePolicy::Scheme2Only => Scheme::Scheme2,
        };
        match scheme {
            Scheme::Scheme1 => partition_scheme1(tensor, mode, kappa, strategy),
            Scheme::Scheme2 => partition_scheme2(tensor, mode, kappa),
        }
    };

    std::thread::scope(|s| {
        let handles: Vec<_> = (0..tensor.order())
            .map(|mode| s.spawn(move || plan_one(mode)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("mode planning panicked"))
            .collect()
    })
}
