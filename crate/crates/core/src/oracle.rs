//! Brute-force references.
//!
//! Nothing here touches [`ModePlan`](crate::layout::ModePlan) or the kernel's
//! reordering, so agreement with the kernel is independent evidence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::FactorMatrix;
use crate::scalar::Scalar;
use crate::tensor::SparseTensor;

/// Largest dense tensor the Khatri-Rao cross-check will materialise.
pub const DENSE_CHECK_MAX_ENTRIES: u128 = 1 << 16;
pub const MAX_PARTITION_VERTICES: usize = 14;
pub const MAX_PARTITION_KAPPA: usize = 4;

fn check_shapes<T: Scalar>(tensor: &SparseTensor<T>, factors: &[FactorMatrix<T>], mode: usize) -> Result<usize> {
    let dims = tensor.shape().dims();
    if mode >= dims.len() {
        return Err(Error::ModeOutOfRange { mode, order: dims.len() });
    }
    if factors.len() != dims.len() {
        return Err(Error::ShapeMismatch(format!("{} factors for {} modes", factors.len(), dims.len())));
    }
    let rank = factors[0].rank();
    for (w, f) in factors.iter().enumerate() {
        if f.rows() != dims[w] || f.rank() != rank {
            return Err(Error::ShapeMismatch(format!(
                "factor {w} is {}×{}, expected {}×{rank}",
                f.rows(),
                f.rank(),
                dims[w]
            )));
        }
    }
    Ok(rank)
}

/// Sequential MTTKRP straight from the elementwise definition, in stored
/// element order, from a zero matrix.
pub fn oracle_mttkrp<T: Scalar>(
    tensor: &SparseTensor<T>,
    factors: &[FactorMatrix<T>],
    mode: usize,
) -> Result<FactorMatrix<T>> {
    let rank = check_shapes(tensor, factors, mode)?;
    let rows = tensor.shape().extent(mode);
    let mut out = vec![T::zero(); rows * rank];
    for i in 0..tensor.nnz() {
        let coords = tensor.coords(i);
        let value = tensor.value(i);
        for r in 0..rank {
            let mut term = value;
            for (w, f) in factors.iter().enumerate() {
                if w != mode {
                    term = term * f.get(coords[w] as usize, r);
                }
            }
            let cell = &mut out[coords[mode] as usize * rank + r];
            *cell = *cell + term;
        }
    }
    FactorMatrix::from_vec(mode, rows, rank, out)
}

/// Column-wise Kronecker product of `a` (I×R) and `b` (J×R): row `i·J + j`
/// is `a(i,:) ∘ b(j,:)`.
pub fn khatri_rao<T: Scalar>(a: &[T], a_rows: usize, b: &[T], b_rows: usize, rank: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(a_rows * b_rows * rank);
    for i in 0..a_rows {
        for j in 0..b_rows {
            for r in 0..rank {
                out.push(a[i * rank + r] * b[j * rank + r]);
            }
        }
    }
    out
}

/// MTTKRP through the matrix form: materialise the dense tensor, unfold it
/// along `mode` (remaining modes in increasing order, last one fastest) and
/// multiply by the explicit Khatri-Rao product of the other factors taken in
/// the same order. Tiny tensors only.
pub fn dense_khatri_rao_mttkrp<T: Scalar>(
    tensor: &SparseTensor<T>,
    factors: &[FactorMatrix<T>],
    mode: usize,
) -> Result<FactorMatrix<T>> {
    let rank = check_shapes(tensor, factors, mode)?;
    let shape = tensor.shape();
    if shape.capacity() > DENSE_CHECK_MAX_ENTRIES {
        return Err(Error::InvalidConfig(format!(
            "dense cross-check limited to {DENSE_CHECK_MAX_ENTRIES} entries, tensor has {}",
            shape.capacity()
        )));
    }
    let dims = shape.dims();
    let rows = dims[mode];
    let others: Vec<usize> = (0..dims.len()).filter(|&w| w != mode).collect();
    let cols: usize = others.iter().map(|&w| dims[w]).product();

    let mut unfolded = vec![T::zero(); rows * cols];
    for (coords, value) in tensor.iter() {
        let col = others.iter().fold(0usize, |acc, &w| acc * dims[w] + coords[w] as usize);
        unfolded[coords[mode] as usize * cols + col] = value;
    }

    let mut kr: Vec<T> = vec![T::one(); rank];
    let mut kr_rows = 1usize;
    for &w in &others {
        kr = khatri_rao(&kr, kr_rows, factors[w].data(), dims[w], rank);
        kr_rows *= dims[w];
    }

    let mut out = vec![T::zero(); rows * rank];
    for i in 0..rows {
        for j in 0..cols {
            let x = unfolded[i * cols + j];
            if x == T::zero() {
                continue;
            }
            for r in 0..rank {
                out[i * rank + r] = out[i * rank + r] + x * kr[j * rank + r];
            }
        }
    }
    FactorMatrix::from_vec(mode, rows, rank, out)
}

/// Worst entry of a comparison against a reference matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstEntry {
    pub row: usize,
    pub col: usize,
    pub actual: f64,
    pub expected: f64,
    pub rel_err: f64,
}

/// Largest `|actual - expected| / |expected|` over all entries, evaluated in
/// f64. Entries where both sides are equal count as zero error; a nonzero
/// value against an exact zero counts as infinite.
pub fn max_relative_error<T: Scalar>(actual: &FactorMatrix<T>, expected: &FactorMatrix<T>) -> Result<WorstEntry> {
    if actual.rows() != expected.rows() || actual.rank() != expected.rank() {
        return Err(Error::ShapeMismatch(format!(
            "{}×{} vs {}×{}",
            actual.rows(),
            actual.rank(),
            expected.rows(),
            expected.rank()
        )));
    }
    let rank = actual.rank().max(1);
    let mut worst = WorstEntry { row: 0, col: 0, actual: 0.0, expected: 0.0, rel_err: 0.0 };
    for (i, (&a, &e)) in actual.data().iter().zip(expected.data()).enumerate() {
        let (a, e) = (a.to_f64(), e.to_f64());
        let err = if a == e { 0.0 } else { (a - e).abs() / e.abs() };
        if err > worst.rel_err || err.is_nan() {
            worst = WorstEntry { row: i / rank, col: i % rank, actual: a, expected: e, rel_err: err };
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptimalPartitionResult {
    pub opt_max_load: usize,
    /// Partition id of every vertex, in input order.
    pub witness: Vec<usize>,
}

/// Minimum achievable maximum load over all assignments of `loads` to `kappa`
/// partitions.
///
/// Depth-first over assignments. Partitions are interchangeable, so a vertex
/// only ever opens the next unused partition, and branches whose running
/// maximum already reaches the best complete assignment are cut. Both
/// reductions keep the search exact.
pub fn brute_force_optimal_partition(loads: &[usize], kappa: usize) -> Result<OptimalPartitionResult> {
    if kappa == 0 {
        return Err(Error::ZeroPartitions);
    }
    if loads.len() > MAX_PARTITION_VERTICES || kappa > MAX_PARTITION_KAPPA {
        return Err(Error::OverBudget { vertices: loads.len(), kappa });
    }

    struct Search<'a> {
        loads: &'a [usize],
        kappa: usize,
        bins: Vec<usize>,
        current: Vec<usize>,
        best: usize,
        witness: Vec<usize>,
    }

    impl Search<'_> {
        fn visit(&mut self, v: usize, used: usize, running_max: usize) {
            if running_max >= self.best {
                return;
            }
            if v == self.loads.len() {
                self.best = running_max;
                self.witness.clone_from(&self.current);
                return;
            }
            let limit = (used + 1).min(self.kappa);
            for z in 0..limit {
                self.bins[z] += self.loads[v];
                self.current[v] = z;
                let next_used = if z == used { used + 1 } else { used };
                self.visit(v + 1, next_used, running_max.max(self.bins[z]));
                self.bins[z] -= self.loads[v];
            }
        }
    }

    let mut search = Search {
        loads,
        kappa,
        bins: vec![0; kappa],
        current: vec![0; loads.len()],
        best: usize::MAX,
        witness: vec![0; loads.len()],
    };
    search.visit(0, 0, 0);
    Ok(OptimalPartitionResult { opt_max_load: search.best, witness: search.witness })
}

/// Largest partition load of `assignment`.
pub fn max_load(loads: &[usize], assignment: &[usize], kappa: usize) -> usize {
    let mut bins = vec![0usize; kappa];
    for (&l, &z) in loads.iter().zip(assignment) {
        bins[z] += l;
    }
    bins.into_iter().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape;

    fn fm(mode: usize, rows: usize, rank: usize, data: &[f64]) -> FactorMatrix<f64> {
        FactorMatrix::from_vec(mode, rows, rank, data.to_vec()).unwrap()
    }

    #[test]
    fn single_nonzero() {
        let t = SparseTensor::<f64>::from_elements(Shape::new(vec![2, 2, 2]).unwrap(), [([0, 1, 1], 3.0)]).unwrap();
        let f = vec![
            fm(0, 2, 2, &[9.0; 4]),
            fm(1, 2, 2, &[0.0, 0.0, 1.0, 2.0]),
            fm(2, 2, 2, &[0.0, 0.0, 2.0, 1.0]),
        ];
        assert_eq!(oracle_mttkrp(&t, &f, 0).unwrap().data(), &[6.0, 6.0, 0.0, 0.0]);
        assert_eq!(dense_khatri_rao_mttkrp(&t, &f, 0).unwrap().data(), &[6.0, 6.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_factors_annihilate() {
        let t = SparseTensor::<f64>::from_elements(
            Shape::new(vec![2, 3, 2]).unwrap(),
            [([0, 1, 1], 3.0), ([1, 2, 0], -1.5)],
        )
        .unwrap();
        let f: Vec<_> = (0..3).map(|m| FactorMatrix::zeros(m, t.shape().extent(m), 4)).collect();
        for d in 0..3 {
            assert!(oracle_mttkrp(&t, &f, d).unwrap().data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn additive_over_elements() {
        let shape = Shape::new(vec![2, 3, 2]).unwrap();
        let f = crate::kernel::init_factors::<f64>(&shape, 3, 5);
        let a = SparseTensor::<f64>::from_elements(shape.clone(), [([0, 1, 1], 0.75)]).unwrap();
        let b = SparseTensor::<f64>::from_elements(shape.clone(), [([0, 2, 0], 2.0)]).unwrap();
        let ab = SparseTensor::<f64>::from_elements(shape, [([0, 1, 1], 0.75), ([0, 2, 0], 2.0)]).unwrap();
        for d in 0..3 {
            let sum: Vec<f64> = oracle_mttkrp(&a, &f, d)
                .unwrap()
                .data()
                .iter()
                .zip(oracle_mttkrp(&b, &f, d).unwrap().data())
                .map(|(x, y)| x + y)
                .collect();
            let joint = oracle_mttkrp(&ab, &f, d).unwrap();
            for (x, y) in sum.iter().zip(joint.data()) {
                assert!((x - y).abs() <= 1e-15 * y.abs().max(1.0));
            }
        }
    }

    #[test]
    fn relative_error_picks_worst_entry() {
        let a = fm(0, 2, 2, &[1.0, 2.0, 3.0, 4.4]);
        let b = fm(0, 2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let w = max_relative_error(&a, &b).unwrap();
        assert_eq!((w.row, w.col), (1, 1));
        assert!((w.rel_err - 0.1).abs() < 1e-12);
        assert_eq!(max_relative_error(&b, &b).unwrap().rel_err, 0.0);
        let z = fm(0, 2, 2, &[0.0; 4]);
        assert_eq!(max_relative_error(&z, &z).unwrap().rel_err, 0.0);
        assert!(max_relative_error(&b, &z).unwrap().rel_err.is_infinite());
    }

    #[test]
    fn khatri_rao_small() {
        // A = [[1,2],[3,4]], B = [[5,6]] -> rows (0,0), (1,0)
        let kr = khatri_rao(&[1.0, 2.0, 3.0, 4.0], 2, &[5.0, 6.0], 1, 2);
        assert_eq!(kr, vec![5.0, 12.0, 15.0, 24.0]);
    }

    #[test]
    fn shape_errors() {
        let t = SparseTensor::<f64>::from_elements(Shape::new(vec![2, 2]).unwrap(), [([0, 1], 3.0)]).unwrap();
        let f = vec![fm(0, 2, 1, &[1.0, 1.0]), fm(1, 3, 1, &[1.0, 1.0, 1.0])];
        assert!(matches!(oracle_mttkrp(&t, &f, 0), Err(Error::ShapeMismatch(_))));
        assert!(matches!(oracle_mttkrp(&t, &f[..1], 0), Err(Error::ShapeMismatch(_))));
        assert!(matches!(oracle_mttkrp(&t, &f, 2), Err(Error::ModeOutOfRange { .. })));
    }

    #[test]
    fn optimal_partition_examples() {
        assert_eq!(brute_force_optimal_partition(&[5, 4, 3, 2, 1], 2).unwrap().opt_max_load, 8);
        assert_eq!(brute_force_optimal_partition(&[7], 3).unwrap().opt_max_load, 7);
        assert_eq!(brute_force_optimal_partition(&[1, 1, 1, 1], 4).unwrap().opt_max_load, 1);
        assert_eq!(brute_force_optimal_partition(&[], 2).unwrap().opt_max_load, 0);
    }

    #[test]
    fn witness_achieves_optimum() {
        let loads = [9, 7, 6, 5, 5, 4, 3, 3, 2, 1];
        let res = brute_force_optimal_partition(&loads, 3).unwrap();
        assert_eq!(max_load(&loads, &res.witness, 3), res.opt_max_load);
        // 45 total over 3 bins: 15 is a lower bound and is reachable.
        assert_eq!(res.opt_max_load, 15);
    }

    #[test]
    fn budget_enforced() {
        assert!(matches!(brute_force_optimal_partition(&[1; 15], 2), Err(Error::OverBudget { .. })));
        assert!(matches!(brute_force_optimal_partition(&[1; 3], 5), Err(Error::OverBudget { .. })));
        assert!(matches!(brute_force_optimal_partition(&[1; 3], 0), Err(Error::ZeroPartitions)));
    }
}
