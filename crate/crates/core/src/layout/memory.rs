use serde::Serialize;

use crate::scalar::{Precision, Scalar};
use crate::tensor::{Shape, SparseTensor};

/// Storage cost of the N mode-specific copies and the factor matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MemoryEstimate {
    /// Σ_h ceil(log2(extent_h)) + β_float, with at least one bit per mode.
    pub bits_per_element: u64,
    /// N × nnz × bits_per_element.
    pub total_copy_bits: u64,
    pub total_copy_bytes: u64,
    /// Σ_d I_d × R × β_float / 8.
    pub factor_matrix_bytes: u64,
    /// Bytes actually held by the fixed-width copies (32-bit coordinates).
    pub storage_bytes_actual: u64,
}

/// Whole bits needed to address `extent` coordinates; never less than one.
pub fn index_bits(extent: usize) -> u64 {
    if extent <= 2 {
        1
    } else {
        (usize::BITS - (extent - 1).leading_zeros()) as u64
    }
}

pub fn estimate_memory<T: Scalar>(tensor: &SparseTensor<T>, rank: usize, precision: Precision) -> MemoryEstimate {
    estimate_memory_for(tensor.shape(), tensor.nnz(), rank, precision)
}

pub fn estimate_memory_for(shape: &Shape, nnz: usize, rank: usize, precision: Precision) -> MemoryEstimate {
    let beta = precision.bits() as u64;
    let n = shape.order() as u64;
    let nnz = nnz as u64;
    let bits_per_element = shape.dims().iter().map(|&e| index_bits(e)).sum::<u64>() + beta;
    let total_copy_bits = n * nnz * bits_per_element;
    let rows: u64 = shape.dims().iter().map(|&e| e as u64).sum();
    MemoryEstimate {
        bits_per_element,
        total_copy_bits,
        total_copy_bytes: total_copy_bits.div_ceil(8),
        factor_matrix_bytes: rows * rank as u64 * beta / 8,
        storage_bytes_actual: n * nnz * (n * u32::BITS as u64 + beta) / 8,
    }
}
