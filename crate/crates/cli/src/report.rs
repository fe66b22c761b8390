use serde::Serialize;

use spmttkrp::oracle::WorstEntry;
use spmttkrp::{MemoryEstimate, Precision, Scheme, SchemePolicy, Strategy};

#[derive(Debug, Serialize)]
pub struct ModeSummary {
    pub mode: usize,
    pub extent: usize,
    pub distinct_indices: usize,
    pub scheme: Scheme,
    pub kappa: usize,
    pub loads: Vec<usize>,
    pub owned_index_counts: Option<Vec<usize>>,
    pub max_over_mean: f64,
    pub empty_partitions: usize,
}

#[derive(Debug, Serialize)]
pub struct InspectReport {
    pub tensor: String,
    pub shape: Vec<usize>,
    pub nnz: usize,
    pub duplicates_merged: usize,
    pub kappa: usize,
    pub rank: usize,
    pub strategy: Strategy,
    pub precision: Precision,
    pub bits_per_element: u64,
    pub total_copy_bits: u64,
    pub total_copy_bytes: u64,
    pub factor_matrix_bytes: u64,
    pub storage_bytes_actual: u64,
    pub modes: Vec<ModeSummary>,
}

#[derive(Debug, Serialize)]
pub struct ModeRun {
    #[serde(flatten)]
    pub summary: ModeSummary,
    pub busy_workers: usize,
    pub elements_per_worker: Vec<usize>,
    pub wall_ms: Vec<f64>,
    pub min_ms: f64,
    pub median_ms: f64,
    /// FNV-1a over the output bits; equal digests mean bit-identical outputs.
    pub output_digest: String,
    pub output_sum: f64,
    pub max_rel_err: Option<f64>,
    pub worst_entry: Option<WorstEntry>,
}

#[derive(Debug, Serialize)]
pub struct Verification {
    pub tolerance: f64,
    pub max_rel_err: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tensor: String,
    pub shape: Vec<usize>,
    pub nnz: usize,
    pub precision: Precision,
    pub policy: SchemePolicy,
    pub strategy: Strategy,
    pub kappa: usize,
    pub batch: usize,
    pub rank: usize,
    pub iters: usize,
    pub seed: u64,
    pub deterministic: bool,
    pub memory: MemoryEstimate,
    pub modes: Vec<ModeRun>,
    pub total_ms: Vec<f64>,
    pub total_min_ms: f64,
    pub total_median_ms: f64,
    pub outputs_bit_identical: bool,
    pub verification: Option<Verification>,
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: String,
}

pub fn fnv1a(words: impl IntoIterator<Item = u64>) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for b in w.to_le_bytes() {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x0100_0000_01b3);
        }
    }
    hash
}
