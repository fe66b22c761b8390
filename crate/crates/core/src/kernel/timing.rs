use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::layout::{ModePlan, Scheme};
use crate::scalar::{Precision, Scalar};

use super::exec::{check_plan_set, execute_mode};
use super::{ExecConfig, FactorMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeTiming {
    pub mode: usize,
    pub scheme: Scheme,
    /// One sample per iteration, milliseconds.
    pub wall_ms: Vec<f64>,
    pub min_ms: f64,
    pub median_ms: f64,
    pub busy_workers: usize,
    pub elements_per_worker: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingReport {
    pub kappa: usize,
    pub batch: usize,
    pub rank: usize,
    pub precision: Precision,
    pub deterministic: bool,
    pub iters: usize,
    pub modes: Vec<ModeTiming>,
    /// Sum over modes, per iteration.
    pub total_ms: Vec<f64>,
    pub total_min_ms: f64,
    pub total_median_ms: f64,
    /// Whether every iteration produced bitwise the same factor matrices.
    pub outputs_bit_identical: bool,
}

/// Times `iters` passes over all modes. Every mode reads the original factors.
/// Returns the outputs of the last pass with the report.
pub fn run_timed<T: Scalar>(
    plans: &[ModePlan<T>],
    factors: &[FactorMatrix<T>],
    config: &ExecConfig,
    iters: usize,
) -> Result<(Vec<FactorMatrix<T>>, TimingReport)> {
    if iters == 0 {
        return Err(Error::InvalidConfig("iters must be >= 1".into()));
    }
    check_plan_set(plans, factors.len())?;
    let refs: Vec<&FactorMatrix<T>> = factors.iter().collect();

    let mut samples = vec![Vec::with_capacity(iters); plans.len()];
    let mut stats = Vec::with_capacity(plans.len());
    let mut last: Vec<FactorMatrix<T>> = Vec::new();
    let mut identical = true;

    for iter in 0..iters {
        let mut outputs = Vec::with_capacity(plans.len());
        for (d, plan) in plans.iter().enumerate() {
            let started = Instant::now();
            let (out, s) = execute_mode(plan, &refs, config)?;
            samples[d].push(started.elapsed().as_secs_f64() * 1e3);
            if iter == 0 {
                stats.push(s);
            }
            outputs.push(out);
        }
        if iter > 0 {
            identical &= outputs.iter().zip(&last).all(|(a, b)| a.bit_eq(b));
        }
        last = outputs;
    }

    let total_ms: Vec<f64> = (0..iters).map(|i| samples.iter().map(|s| s[i]).sum()).collect();
    let modes = plans
        .iter()
        .zip(samples)
        .zip(stats)
        .map(|((plan, wall_ms), s)| ModeTiming {
            mode: plan.mode(),
            scheme: plan.scheme(),
            min_ms: min(&wall_ms),
            median_ms: median(&wall_ms),
            wall_ms,
            busy_workers: s.busy_workers,
            elements_per_worker: s.elements_per_worker,
        })
        .collect();

    let report = TimingReport {
        kappa: config.kappa,
        batch: config.batch,
        rank: config.rank,
        precision: T::PRECISION,
        deterministic: config.deterministic,
        iters,
        modes,
        total_min_ms: min(&total_ms),
        total_median_ms: median(&total_ms),
        total_ms,
        outputs_bit_identical: identical,
    };
    Ok((last, report))
}

fn min(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::init_factors;
    use crate::layout::{build_mode_plans_with_policy, SchemePolicy, Strategy};
    use crate::tensor::{generate_synthetic, Distribution, SparseTensor};

    #[test]
    fn median_and_min() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(min(&[4.0, 1.0, 2.0]), 1.0);
    }

    #[test]
    fn busy_workers_follow_scheme() {
        let dist = Distribution::ModeSkewed { mode: 1, hot: 2 };
        let t: SparseTensor<f32> = generate_synthetic(&[40, 2, 40], 400, dist, 2).unwrap();
        let factors = init_factors::<f32>(t.shape(), 4, 2);
        let config = ExecConfig { kappa: 8, batch: 32, rank: 4, deterministic: false };

        let s1 = build_mode_plans_with_policy(&t, 8, Strategy::Cyclic, SchemePolicy::Scheme1Only).unwrap();
        let (_, report) = run_timed(&s1, &factors, &config, 3).unwrap();
        assert_eq!(report.modes[1].busy_workers, 2);
        assert_eq!(report.modes[1].wall_ms.len(), 3);
        assert_eq!(report.total_ms.len(), 3);

        let s2 = build_mode_plans_with_policy(&t, 8, Strategy::Cyclic, SchemePolicy::Scheme2Only).unwrap();
        let (_, report) = run_timed(&s2, &factors, &config, 1).unwrap();
        assert_eq!(report.modes[1].busy_workers, 8);
        assert_eq!(report.modes[1].elements_per_worker, vec![50; 8]);
    }

    #[test]
    fn deterministic_iterations_are_identical() {
        let t: SparseTensor<f32> = generate_synthetic(&[9, 5, 7], 200, Distribution::Uniform, 4).unwrap();
        let factors = init_factors::<f32>(t.shape(), 3, 4);
        let plans = build_mode_plans_with_policy(&t, 8, Strategy::Cyclic, SchemePolicy::Scheme2Only).unwrap();
        let config = ExecConfig { kappa: 8, batch: 5, rank: 3, deterministic: true };
        let (_, report) = run_timed(&plans, &factors, &config, 4).unwrap();
        assert!(report.outputs_bit_identical);
        assert!(run_timed(&plans, &factors, &config, 0).is_err());
    }
}
