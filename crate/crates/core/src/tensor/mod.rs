//! COO sparse tensors.
//!
//! Coordinates are zero-based and stored as fixed-width `u32`, packed
//! row-major (`nnz × N`) next to a parallel value array. Tensors are immutable
//! once built; every constructor validates bounds, finiteness and uniqueness.

mod frostt;
mod synth;

pub use frostt::{parse_frostt, parse_frostt_str, write_frostt, write_frostt_string, ParseOptions, ParseStats};
pub use synth::{generate_synthetic, Distribution};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest admissible extent: coordinates must fit a `u32`.
pub const MAX_EXTENT: usize = u32::MAX as usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("a tensor needs at least one mode".into()));
        }
        if let Some((mode, _)) = dims.iter().enumerate().find(|(_, &e)| e == 0) {
            return Err(Error::InvalidShape(format!("mode {mode} has zero extent")));
        }
        if let Some((mode, e)) = dims.iter().enumerate().find(|(_, &e)| e > MAX_EXTENT) {
            return Err(Error::InvalidShape(format!(
                "mode {mode} extent {e} exceeds the 32-bit coordinate range"
            )));
        }
        Ok(Shape { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of modes, N.
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn extent(&self, mode: usize) -> usize {
        self.dims[mode]
    }

    /// Number of addressable index tuples.
    pub fn capacity(&self) -> u128 {
        self.dims.iter().map(|&e| e as u128).product()
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.order() {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange { mode, order: self.order() })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseTensor<T> {
    shape: Shape,
    indices: Vec<u32>,
    values: Vec<T>,
}

impl<T: Scalar> SparseTensor<T> {
    /// Builds a tensor from packed coordinates (`values.len() × N`, row-major).
    pub fn new(shape: Shape, indices: Vec<u32>, values: Vec<T>) -> Result<Self> {
        let order = shape.order();
        if indices.len() != values.len() * order {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for {} values in a {order}-mode tensor",
                indices.len(),
                values.len()
            )));
        }
        let tensor = SparseTensor { shape, indices, values };
        tensor.validate()?;
        Ok(tensor)
    }

    pub fn from_elements<I, C>(shape: Shape, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = (C, T)>,
        C: AsRef<[u32]>,
    {
        let order = shape.order();
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (position, (coords, value)) in elements.into_iter().enumerate() {
            let coords = coords.as_ref();
            if coords.len() != order {
                return Err(Error::InvalidElement {
                    position,
                    reason: format!("{} coordinates for a {order}-mode tensor", coords.len()),
                });
            }
            indices.extend_from_slice(coords);
            values.push(value);
        }
        Self::new(shape, indices, values)
    }

    fn validate(&self) -> Result<()> {
        let dims = self.shape.dims();
        for (position, (coords, value)) in self.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::InvalidElement { position, reason: format!("non-finite value {value}") });
            }
            for (mode, (&c, &extent)) in coords.iter().zip(dims).enumerate() {
                if c as usize >= extent {
                    return Err(Error::InvalidElement {
                        position,
                        reason: format!("coordinate {c} out of range for mode {mode} (extent {extent})"),
                    });
                }
            }
        }

        let mut order: Vec<usize> = (0..self.nnz()).collect();
        order.sort_unstable_by(|&a, &b| self.coords(a).cmp(self.coords(b)));
        if let Some(pair) = order.windows(2).find(|w| self.coords(w[0]) == self.coords(w[1])) {
            let position = pair[0].max(pair[1]);
            return Err(Error::InvalidElement {
                position,
                reason: format!("duplicate index tuple {:?}", self.coords(position)),
            });
        }
        Ok(())
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinates of element `i`.
    #[inline]
    pub fn coords(&self, i: usize) -> &[u32] {
        let n = self.order();
        &self.indices[i * n..(i + 1) * n]
    }

    #[inline]
    pub fn value(&self, i: usize) -> T {
        self.values[i]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Packed coordinates, `nnz × N` row-major.
    pub fn packed_indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32], T)> + '_ {
        let n = self.order();
        self.indices.chunks_exact(n.max(1)).zip(self.values.iter().copied())
    }

    /// Number of distinct coordinates that appear in `mode`.
    pub fn distinct_count(&self, mode: usize) -> Result<usize> {
        self.shape.check_mode(mode)?;
        let mut seen = vec![false; self.shape.extent(mode)];
        let mut count = 0;
        for (coords, _) in self.iter() {
            let slot = &mut seen[coords[mode] as usize];
            if !*slot {
                *slot = true;
                count += 1;
            }
        }
        Ok(count)
    }

    /// Same sparsity pattern with every value multiplied by `alpha`.
    pub fn scaled(&self, alpha: T) -> Result<Self> {
        let values = self.values.iter().map(|&v| v * alpha).collect();
        Self::new(self.shape.clone(), self.indices.clone(), values)
    }

    /// Elements as an owned set keyed by coordinates, for order-insensitive comparison.
    pub fn element_set(&self) -> std::collections::BTreeMap<Vec<u32>, T> {
        self.iter().map(|(c, v)| (c.to_vec(), v)).collect()
    }
}
