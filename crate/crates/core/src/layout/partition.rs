use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{Shape, SparseTensor};

use super::{mode_degrees, DegreeProfile, Scheme, Strategy};

/// The mode-d tensor copy: elements permuted into partition order plus the
/// partition boundaries.
///
/// Coordinates and values are materialised in the permuted order, so each of
/// the N plans is an independent COO copy of the tensor.
#[derive(Debug, Clone)]
pub struct ModePlan<T> {
    mode: usize,
    scheme: Scheme,
    kappa: usize,
    shape: Shape,
    order: Vec<usize>,
    partition_offsets: Vec<usize>,
    owned_indices: Option<Vec<Vec<u32>>>,
    indices: Vec<u32>,
    values: Vec<T>,
}

impl<T: Scalar> ModePlan<T> {
    fn materialize(
        tensor: &SparseTensor<T>,
        mode: usize,
        scheme: Scheme,
        kappa: usize,
        order: Vec<usize>,
        partition_offsets: Vec<usize>,
        owned_indices: Option<Vec<Vec<u32>>>,
    ) -> Self {
        let mut indices = Vec::with_capacity(tensor.packed_indices().len());
        let mut values = Vec::with_capacity(order.len());
        for &pos in &order {
            indices.extend_from_slice(tensor.coords(pos));
            values.push(tensor.value(pos));
        }
        ModePlan {
            mode,
            scheme,
            kappa,
            shape: tensor.shape().clone(),
            order,
            partition_offsets,
            owned_indices,
            indices,
            values,
        }
    }

    pub fn mode(&self) -> usize {
        self.mode
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `order[k]` is the original element position stored at slot `k` of the copy.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// κ+1 non-decreasing offsets into the copy.
    pub fn partition_offsets(&self) -> &[usize] {
        &self.partition_offsets
    }

    pub fn partition(&self, z: usize) -> Range<usize> {
        self.partition_offsets[z]..self.partition_offsets[z + 1]
    }

    pub fn partition_sizes(&self) -> Vec<usize> {
        self.partition_offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Scheme 1 only: the output rows each partition owns, ascending.
    pub fn owned_indices(&self) -> Option<&[Vec<u32>]> {
        self.owned_indices.as_deref()
    }

    /// Coordinates at slot `k` of the copy.
    #[inline]
    pub fn coords(&self, k: usize) -> &[u32] {
        let n = self.shape.order();
        &self.indices[k * n..(k + 1) * n]
    }

    #[inline]
    pub fn value(&self, k: usize) -> T {
        self.values[k]
    }
}

/// Assigns the active vertices of `profile` to `kappa` partitions.
/// Returns the owned vertex list of each partition, ascending.
pub fn assign_vertices(profile: &DegreeProfile, kappa: usize, strategy: Strategy) -> Result<Vec<Vec<u32>>> {
    if kappa == 0 {
        return Err(Error::ZeroPartitions);
    }
    let vertices = profile.ordered_vertices();
    let mut owned: Vec<Vec<u32>> = vec![Vec::new(); kappa];
    match strategy {
        Strategy::Cyclic => {
            for (k, &v) in vertices.iter().enumerate() {
                owned[k % kappa].push(v);
            }
        }
        Strategy::LeastLoaded => {
            let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..kappa).map(|z| Reverse((0, z))).collect();
            for &v in &vertices {
                let Reverse((load, z)) = heap.pop().expect("kappa >= 1");
                owned[z].push(v);
                heap.push(Reverse((load + profile.degrees[v as usize], z)));
            }
        }
    }
    for part in &mut owned {
        part.sort_unstable();
    }
    Ok(owned)
}

/// Index-balanced partitioning with row ownership.
///
/// Vertices are visited by descending degree and dealt to partitions by
/// `strategy`; every nonzero follows its vertex. The copy is ordered by
/// partition id, then mode coordinate, then original position.
pub fn partition_scheme1<T: Scalar>(
    tensor: &SparseTensor<T>,
    mode: usize,
    kappa: usize,
    strategy: Strategy,
) -> Result<ModePlan<T>> {
    if kappa == 0 {
        return Err(Error::ZeroPartitions);
    }
    let profile = mode_degrees(tensor, mode)?;
    if profile.active_vertices() == 0 {
        return Err(Error::EmptyMode(mode));
    }
    let owned = assign_vertices(&profile, kappa, strategy)?;

    let mut owner = vec![usize::MAX; profile.degrees.len()];
    for (z, part) in owned.iter().enumerate() {
        for &v in part {
            owner[v as usize] = z;
        }
    }

    let mut order: Vec<usize> = (0..tensor.nnz()).collect();
    // Stable, so equal keys keep ascending original position.
    order.sort_by_key(|&pos| {
        let c = tensor.coords(pos)[mode];
        (owner[c as usize], c)
    });

    let mut offsets = vec![0usize; kappa + 1];
    for &pos in &order {
        offsets[owner[tensor.coords(pos)[mode] as usize] + 1] += 1;
    }
    for z in 0..kappa {
        offsets[z + 1] += offsets[z];
    }

    Ok(ModePlan::materialize(tensor, mode, Scheme::Scheme1, kappa, order, offsets, Some(owned)))
}

/// Nonzero-balanced partitioning.
///
/// Elements are sorted by mode coordinate (stable) and cut into κ contiguous
/// chunks; the first `nnz mod κ` chunks take one extra element.
pub fn partition_scheme2<T: Scalar>(tensor: &SparseTensor<T>, mode: usize, kappa: usize) -> Result<ModePlan<T>> {
    if kappa == 0 {
        return Err(Error::ZeroPartitions);
    }
    tensor.shape().check_mode(mode)?;
    let mut order: Vec<usize> = (0..tensor.nnz()).collect();
    order.sort_by_key(|&pos| tensor.coords(pos)[mode]);

    let offsets = equal_split_offsets(tensor.nnz(), kappa);
    Ok(ModePlan::materialize(tensor, mode, Scheme::Scheme2, kappa, order, offsets, None))
}

/// Offsets of a ceil-first split of `n` items into `kappa` chunks.
pub fn equal_split_offsets(n: usize, kappa: usize) -> Vec<usize> {
    let base = n / kappa;
    let extra = n % kappa;
    let mut offsets = Vec::with_capacity(kappa + 1);
    offsets.push(0);
    let mut at = 0;
    for z in 0..kappa {
        at += base + usize::from(z < extra);
        offsets.push(at);
    }
    offsets
}
