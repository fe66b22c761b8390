#![allow(dead_code)]

use std::path::PathBuf;

use spmttkrp::layout::{assign_vertices, DegreeProfile};
use spmttkrp::{ModePlan, Scalar, Scheme, SparseTensor};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Structural checks every plan must satisfy; returns a description of the
/// first violation.
pub fn check_plan<T: Scalar>(tensor: &SparseTensor<T>, plan: &ModePlan<T>) -> Result<(), String> {
    let nnz = tensor.nnz();
    let mode = plan.mode();

    let mut seen = vec![false; nnz];
    for &pos in plan.order() {
        if pos >= nnz || std::mem::replace(&mut seen[pos], true) {
            return Err(format!("order is not a permutation (position {pos})"));
        }
    }
    if plan.order().len() != nnz {
        return Err("order length differs from nnz".into());
    }
    for (k, &pos) in plan.order().iter().enumerate() {
        if plan.coords(k) != tensor.coords(pos) || plan.value(k).to_f64().to_bits() != tensor.value(pos).to_f64().to_bits() {
            return Err(format!("copy slot {k} does not hold element {pos}"));
        }
    }

    let offsets = plan.partition_offsets();
    if offsets.len() != plan.kappa() + 1 || offsets[0] != 0 || offsets[plan.kappa()] != nnz {
        return Err(format!("bad offsets {offsets:?}"));
    }
    if offsets.windows(2).any(|w| w[0] > w[1]) {
        return Err(format!("offsets decrease: {offsets:?}"));
    }

    match plan.scheme() {
        Scheme::Scheme1 => {
            let owned = plan.owned_indices().ok_or("scheme 1 plan without ownership")?;
            let extent = tensor.shape().extent(mode);
            let mut owner = vec![usize::MAX; extent];
            for (z, part) in owned.iter().enumerate() {
                for &v in part {
                    if owner[v as usize] != usize::MAX {
                        return Err(format!("index {v} owned twice"));
                    }
                    owner[v as usize] = z;
                }
            }
            for z in 0..plan.kappa() {
                for k in plan.partition(z) {
                    if owner[plan.coords(k)[mode] as usize] != z {
                        return Err(format!("slot {k} in partition {z} touches a foreign row"));
                    }
                }
            }
            let active = (0..tensor.nnz()).map(|i| tensor.coords(i)[mode]).collect::<std::collections::HashSet<_>>();
            let owned_total: usize = owned.iter().map(Vec::len).sum();
            if owned_total != active.len() {
                return Err("owned indices do not match the active vertex set".into());
            }
        }
        Scheme::Scheme2 => {
            if plan.owned_indices().is_some() {
                return Err("scheme 2 plan with ownership".into());
            }
            let sizes = plan.partition_sizes();
            let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            if hi - lo > 1 {
                return Err(format!("scheme 2 sizes {sizes:?}"));
            }
            if (1..nnz).any(|k| plan.coords(k - 1)[mode] > plan.coords(k)[mode]) {
                return Err("scheme 2 copy not sorted by output coordinate".into());
            }
        }
    }
    Ok(())
}

/// Loads of the vertex assignment returned for `loads` (vertex `i` has degree `loads[i]`).
pub fn heuristic_max_load(loads: &[usize], kappa: usize, strategy: spmttkrp::Strategy) -> usize {
    let profile = DegreeProfile { mode: 0, degrees: loads.to_vec() };
    assign_vertices(&profile, kappa, strategy)
        .unwrap()
        .iter()
        .map(|part| part.iter().map(|&v| loads[v as usize]).sum::<usize>())
        .max()
        .unwrap_or(0)
}
