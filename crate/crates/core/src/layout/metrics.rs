use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{DegreeProfile, ModePlan, Scheme};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceMetrics {
    pub mode: usize,
    pub scheme: Scheme,
    pub kappa: usize,
    /// Nonzeros per partition.
    pub loads: Vec<usize>,
    /// Owned output rows per partition (Scheme 1 only).
    pub owned_index_counts: Option<Vec<usize>>,
    /// Largest load over mean load; 1.0 for an empty mode.
    pub max_over_mean: f64,
    pub empty_partitions: usize,
}

pub fn balance_metrics<T: Scalar>(plan: &ModePlan<T>, profile: &DegreeProfile) -> Result<BalanceMetrics> {
    if plan.mode() != profile.mode {
        return Err(Error::ShapeMismatch(format!(
            "plan is for mode {}, degree profile for mode {}",
            plan.mode(),
            profile.mode
        )));
    }
    if profile.total() != plan.nnz() || profile.degrees.len() != plan.shape().extent(plan.mode()) {
        return Err(Error::ShapeMismatch("degree profile does not describe the planned tensor".into()));
    }

    let loads = plan.partition_sizes();
    let owned_index_counts = plan.owned_indices().map(|owned| {
        for (z, part) in owned.iter().enumerate() {
            let from_profile: usize = part.iter().map(|&v| profile.degrees[v as usize]).sum();
            debug_assert_eq!(from_profile, loads[z]);
        }
        owned.iter().map(Vec::len).collect()
    });

    let total: usize = loads.iter().sum();
    let max = loads.iter().copied().max().unwrap_or(0);
    let max_over_mean = if total == 0 {
        1.0
    } else {
        max as f64 * loads.len() as f64 / total as f64
    };

    Ok(BalanceMetrics {
        mode: plan.mode(),
        scheme: plan.scheme(),
        kappa: plan.kappa(),
        empty_partitions: loads.iter().filter(|&&l| l == 0).count(),
        loads,
        owned_index_counts,
        max_over_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{mode_degrees, partition_scheme1, partition_scheme2, Strategy};
    use crate::tensor::{Shape, SparseTensor};

    fn tensor_with_degrees(degrees: &[usize]) -> SparseTensor<f64> {
        let width = degrees.iter().copied().max().unwrap();
        let elems: Vec<([u32; 2], f64)> = degrees
            .iter()
            .enumerate()
            .flat_map(|(v, &d)| (0..d).map(move |j| ([v as u32, j as u32], 1.0)))
            .collect();
        SparseTensor::from_elements(Shape::new(vec![degrees.len(), width]).unwrap(), elems).unwrap()
    }

    #[test]
    fn scheme2_ratio() {
        let t = tensor_with_degrees(&[5, 5]);
        let plan = partition_scheme2(&t, 0, 3).unwrap();
        let m = balance_metrics(&plan, &mode_degrees(&t, 0).unwrap()).unwrap();
        assert_eq!(m.loads, vec![4, 3, 3]);
        assert!((m.max_over_mean - 1.2).abs() < 1e-12);
        assert_eq!(m.owned_index_counts, None);
    }

    #[test]
    fn scheme1_cyclic_ratio() {
        let t = tensor_with_degrees(&[5, 4, 3, 2, 1]);
        let plan = partition_scheme1(&t, 0, 2, Strategy::Cyclic).unwrap();
        let m = balance_metrics(&plan, &mode_degrees(&t, 0).unwrap()).unwrap();
        assert_eq!(m.loads, vec![9, 6]);
        assert_eq!(m.owned_index_counts, Some(vec![3, 2]));
        assert!((m.max_over_mean - 1.2).abs() < 1e-12);
        assert_eq!(m.empty_partitions, 0);
    }

    #[test]
    fn single_partition_ratio_is_one() {
        let t = tensor_with_degrees(&[3, 1, 2]);
        let plan = partition_scheme1(&t, 0, 1, Strategy::LeastLoaded).unwrap();
        let m = balance_metrics(&plan, &mode_degrees(&t, 0).unwrap()).unwrap();
        assert_eq!(m.max_over_mean, 1.0);
    }

    #[test]
    fn empty_partitions_counted_and_mode_mismatch_rejected() {
        let t = tensor_with_degrees(&[2, 1]);
        let plan = partition_scheme1(&t, 0, 4, Strategy::Cyclic).unwrap();
        let m = balance_metrics(&plan, &mode_degrees(&t, 0).unwrap()).unwrap();
        assert_eq!(m.empty_partitions, 2);
        assert!(matches!(balance_metrics(&plan, &mode_degrees(&t, 1).unwrap()), Err(Error::ShapeMismatch(_))));
    }
}
