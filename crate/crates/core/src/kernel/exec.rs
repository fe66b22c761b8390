use std::sync::atomic::{AtomicBool, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::layout::{ModePlan, Scheme};
use crate::scalar::Scalar;

use super::{check_factors, ExecConfig, FactorMatrix};

/// Work distribution observed while executing one mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModeStats {
    pub elements_per_worker: Vec<usize>,
    /// Workers that received at least one nonzero.
    pub busy_workers: usize,
}

/// Writes `val × Π_{w≠mode} Y_w(c_w, :)` into `acc`.
#[inline]
pub(super) fn accumulate_row<T: Scalar>(
    acc: &mut [T],
    coords: &[u32],
    value: T,
    factors: &[&FactorMatrix<T>],
    mode: usize,
) {
    acc.fill(value);
    for (w, (&c, f)) in coords.iter().zip(factors).enumerate() {
        if w == mode {
            continue;
        }
        for (a, &y) in acc.iter_mut().zip(f.row(c as usize)) {
            *a = *a * y;
        }
    }
}

pub fn mttkrp_mode<T: Scalar>(
    plan: &ModePlan<T>,
    factors: &[FactorMatrix<T>],
    config: &ExecConfig,
) -> Result<FactorMatrix<T>> {
    let refs: Vec<&FactorMatrix<T>> = factors.iter().collect();
    execute_mode(plan, &refs, config).map(|(out, _)| out)
}

pub fn mttkrp_mode_with_stats<T: Scalar>(
    plan: &ModePlan<T>,
    factors: &[FactorMatrix<T>],
    config: &ExecConfig,
) -> Result<(FactorMatrix<T>, ModeStats)> {
    let refs: Vec<&FactorMatrix<T>> = factors.iter().collect();
    execute_mode(plan, &refs, config)
}

/// Runs every mode in order with a full barrier between modes.
///
/// With `chain_outputs` the result of mode `d` replaces `Y_d` for the modes
/// that follow; otherwise every mode reads the original factors. The inputs
/// are never modified.
pub fn mttkrp_all_modes<T: Scalar>(
    plans: &[ModePlan<T>],
    factors: &[FactorMatrix<T>],
    config: &ExecConfig,
    chain_outputs: bool,
) -> Result<Vec<FactorMatrix<T>>> {
    check_plan_set(plans, factors.len())?;
    let mut outputs: Vec<FactorMatrix<T>> = Vec::with_capacity(plans.len());
    for plan in plans {
        let refs: Vec<&FactorMatrix<T>> = factors
            .iter()
            .enumerate()
            .map(|(w, f)| if chain_outputs && w < outputs.len() { &outputs[w] } else { f })
            .collect();
        // execute_mode joins all of its workers before returning.
        let (out, _) = execute_mode(plan, &refs, config)?;
        outputs.push(out);
    }
    Ok(outputs)
}

pub(super) fn check_plan_set<T: Scalar>(plans: &[ModePlan<T>], order: usize) -> Result<()> {
    if plans.len() != order {
        return Err(Error::ShapeMismatch(format!("{} plans for {order} factor matrices", plans.len())));
    }
    if let Some((d, p)) = plans.iter().enumerate().find(|(d, p)| p.mode() != *d) {
        return Err(Error::ShapeMismatch(format!("plan {d} is built for mode {}", p.mode())));
    }
    Ok(())
}

pub(super) fn execute_mode<T: Scalar>(
    plan: &ModePlan<T>,
    factors: &[&FactorMatrix<T>],
    config: &ExecConfig,
) -> Result<(FactorMatrix<T>, ModeStats)> {
    config.validate()?;
    let shape = plan.shape();
    check_factors(shape, factors, config.rank)?;
    let mode = plan.mode();
    let rank = config.rank;
    let rows = shape.extent(mode);

    let output: Vec<T::Atomic> = (0..rows * rank).map(|_| T::new_atomic(T::zero())).collect();
    let workers = config.kappa;
    let mut assignments: Vec<Vec<usize>> = vec![Vec::new(); workers];
    for z in 0..plan.kappa() {
        assignments[z % workers].push(z);
    }
    let elements_per_worker: Vec<usize> = assignments
        .iter()
        .map(|parts| parts.iter().map(|&z| plan.partition(z).len()).sum())
        .collect();

    let failed = AtomicBool::new(false);
    let worker = |parts: &[usize]| -> Result<()> {
        let mut scratch = vec![T::zero(); config.batch * rank];
        for &z in parts {
            run_partition(plan, z, factors, config.batch, rank, &output, &mut scratch, &failed)?;
        }
        Ok(())
    };

    if config.deterministic {
        for parts in &assignments {
            worker(parts)?;
        }
    } else {
        let results: Vec<Result<()>> = std::thread::scope(|s| {
            let handles: Vec<_> = assignments
                .iter()
                .zip(&elements_per_worker)
                .filter(|(_, &n)| n > 0)
                .map(|(parts, _)| s.spawn(|| worker(parts)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("kernel worker panicked")).collect()
        });
        results.into_iter().collect::<Result<()>>()?;
    }

    let data: Vec<T> = output.iter().map(T::load).collect();
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        let row = i / rank;
        let position = (0..plan.nnz())
            .find(|&k| plan.coords(k)[mode] as usize == row)
            .map(|k| plan.order()[k])
            .unwrap_or(0);
        return Err(Error::NonFinite { mode, position, row });
    }

    let busy_workers = elements_per_worker.iter().filter(|&&n| n > 0).count();
    let out = FactorMatrix::from_vec(mode, rows, rank, data)?;
    Ok((out, ModeStats { elements_per_worker, busy_workers }))
}

/// One partition, consumed `batch` nonzeros at a time.
#[allow(clippy::too_many_arguments)]
fn run_partition<T: Scalar>(
    plan: &ModePlan<T>,
    z: usize,
    factors: &[&FactorMatrix<T>],
    batch: usize,
    rank: usize,
    output: &[T::Atomic],
    scratch: &mut [T],
    failed: &AtomicBool,
) -> Result<()> {
    let mode = plan.mode();
    let range = plan.partition(z);
    let shared_rows = plan.scheme() == Scheme::Scheme2;
    let mut start = range.start;
    while start < range.end {
        if failed.load(Ordering::Relaxed) {
            return Ok(());
        }
        let end = (start + batch).min(range.end);

        for (col, k) in (start..end).enumerate() {
            let acc = &mut scratch[col * rank..(col + 1) * rank];
            accumulate_row(acc, plan.coords(k), plan.value(k), factors, mode);
            if acc.iter().any(|v| !v.is_finite()) {
                failed.store(true, Ordering::Relaxed);
                let row = plan.coords(k)[mode] as usize;
                return Err(Error::NonFinite { mode, position: plan.order()[k], row });
            }
        }

        for (col, k) in (start..end).enumerate() {
            let row = plan.coords(k)[mode] as usize;
            let dest = &output[row * rank..(row + 1) * rank];
            let acc = &scratch[col * rank..(col + 1) * rank];
            if shared_rows {
                for (cell, &v) in dest.iter().zip(acc) {
                    T::fetch_add(cell, v);
                }
            } else {
                // Row is owned by this partition: plain read-modify-write.
                for (cell, &v) in dest.iter().zip(acc) {
                    T::store(cell, T::load(cell) + v);
                }
            }
        }
        start = end;
    }
    Ok(())
}
