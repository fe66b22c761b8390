use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use spmttkrp::kernel::{init_factors, ExecConfig};
use spmttkrp::oracle::{max_relative_error, oracle_mttkrp};
use spmttkrp::{
    balance_metrics, build_mode_plans_with_policy, estimate_memory, generate_synthetic, mode_degrees, parse_frostt,
    run_timed, write_frostt, Distribution, ModePlan, ParseOptions, ParseStats, Precision, Scalar, SchemePolicy,
    SparseTensor, Strategy,
};

use crate::report::{fnv1a, ErrorReport, InspectReport, ModeRun, ModeSummary, RunReport, Verification};
use crate::{DistributionArg, GenArgs, InspectArgs, PolicyArg, PrecisionArg, RunArgs, StrategyArg, TensorArgs};

const TOL_F32: f64 = 1e-5;
const TOL_F64: f64 = 1e-12;

impl From<PolicyArg> for SchemePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Adaptive => SchemePolicy::Adaptive,
            PolicyArg::S1 => SchemePolicy::Scheme1Only,
            PolicyArg::S2 => SchemePolicy::Scheme2Only,
        }
    }
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Cyclic => Strategy::Cyclic,
            StrategyArg::Lpt => Strategy::LeastLoaded,
        }
    }
}

fn resolve_kappa(kappa: Option<usize>) -> Result<usize> {
    let kappa = match kappa {
        Some(k) => k,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    if kappa == 0 {
        bail!("kappa must be at least 1");
    }
    Ok(kappa)
}

fn load_tensor<T: Scalar>(input: &TensorArgs) -> Result<(SparseTensor<T>, ParseStats)> {
    let file = File::open(&input.tensor).with_context(|| format!("opening {}", input.tensor.display()))?;
    let opts = ParseOptions { merge_duplicates: !input.strict, dims: input.dims.clone() };
    let (tensor, stats) =
        parse_frostt(BufReader::new(file), &opts).with_context(|| format!("parsing {}", input.tensor.display()))?;
    if stats.duplicates_merged > 0 {
        eprintln!("warning: merged {} duplicate index tuples", stats.duplicates_merged);
    }
    if tensor.order() < 3 {
        eprintln!("warning: {}-mode tensor; the layout targets tensors with three or more modes", tensor.order());
    }
    Ok((tensor, stats))
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    if path.as_os_str() == "-" {
        println!("{text}");
    } else {
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn summarize<T: Scalar>(tensor: &SparseTensor<T>, plan: &ModePlan<T>) -> Result<ModeSummary> {
    let mode = plan.mode();
    let profile = mode_degrees(tensor, mode)?;
    let metrics = balance_metrics(plan, &profile)?;
    Ok(ModeSummary {
        mode,
        extent: tensor.shape().extent(mode),
        distinct_indices: profile.active_vertices(),
        scheme: metrics.scheme,
        kappa: metrics.kappa,
        loads: metrics.loads,
        owned_index_counts: metrics.owned_index_counts,
        max_over_mean: metrics.max_over_mean,
        empty_partitions: metrics.empty_partitions,
    })
}

pub fn gen(args: &GenArgs) -> Result<()> {
    match args.precision {
        PrecisionArg::F32 => gen_typed::<f32>(args),
        PrecisionArg::F64 => gen_typed::<f64>(args),
    }
}

fn gen_typed<T: Scalar>(args: &GenArgs) -> Result<()> {
    let distribution = match args.distribution {
        DistributionArg::Uniform => Distribution::Uniform,
        DistributionArg::Skewed => Distribution::ModeSkewed { mode: args.skew_mode, hot: args.hot },
    };
    let tensor: SparseTensor<T> = generate_synthetic(&args.dims, args.nnz, distribution, args.seed)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_frostt(&tensor, BufWriter::new(file))?;
        }
        None => write_frostt(&tensor, BufWriter::new(io::stdout().lock()))?,
    }
    Ok(())
}

pub fn inspect(args: &InspectArgs) -> Result<()> {
    let result = match args.precision {
        PrecisionArg::F32 => inspect_typed::<f32>(args),
        PrecisionArg::F64 => inspect_typed::<f64>(args),
    };
    if let (Err(err), Some(path)) = (&result, &args.json) {
        write_json(path, &ErrorReport { error: format!("{err:#}") })?;
    }
    result
}

fn inspect_typed<T: Scalar>(args: &InspectArgs) -> Result<()> {
    let (tensor, stats) = load_tensor::<T>(&args.input)?;
    let kappa = resolve_kappa(args.kappa)?;
    let strategy = Strategy::from(args.strategy);
    let plans = build_mode_plans_with_policy(&tensor, kappa, strategy, SchemePolicy::Adaptive)?;
    let memory = estimate_memory(&tensor, args.rank, T::PRECISION);
    let modes = plans.iter().map(|p| summarize(&tensor, p)).collect::<Result<Vec<_>>>()?;

    let report = InspectReport {
        tensor: args.input.tensor.display().to_string(),
        shape: tensor.shape().dims().to_vec(),
        nnz: tensor.nnz(),
        duplicates_merged: stats.duplicates_merged,
        kappa,
        rank: args.rank,
        strategy,
        precision: T::PRECISION,
        bits_per_element: memory.bits_per_element,
        total_copy_bits: memory.total_copy_bits,
        total_copy_bytes: memory.total_copy_bytes,
        factor_matrix_bytes: memory.factor_matrix_bytes,
        storage_bytes_actual: memory.storage_bytes_actual,
        modes,
    };

    let mut out = io::stdout().lock();
    writeln!(out, "shape {:?}, nnz {}, kappa {kappa}", report.shape, report.nnz)?;
    writeln!(
        out,
        "memory: {} bits/element, {} bits for {} copies ({} bytes), factors {} bytes, in-memory copies {} bytes",
        report.bits_per_element,
        report.total_copy_bits,
        tensor.order(),
        report.total_copy_bytes,
        report.factor_matrix_bytes,
        report.storage_bytes_actual
    )?;
    writeln!(out, "{:>4} {:>10} {:>9} {:>8} {:>9} {:>6}", "mode", "extent", "distinct", "scheme", "max/mean", "empty")?;
    for m in &report.modes {
        writeln!(
            out,
            "{:>4} {:>10} {:>9} {:>8} {:>9.3} {:>6}",
            m.mode, m.extent, m.distinct_indices, m.scheme, m.max_over_mean, m.empty_partitions
        )?;
    }
    drop(out);

    if let Some(path) = &args.json {
        write_json(path, &report)?;
    }
    Ok(())
}

pub fn run(args: &RunArgs) -> Result<ExitCode> {
    let result = match args.precision {
        PrecisionArg::F32 => run_typed::<f32>(args, TOL_F32),
        PrecisionArg::F64 => run_typed::<f64>(args, TOL_F64),
    };
    if let (Err(err), Some(path)) = (&result, &args.json) {
        write_json(path, &ErrorReport { error: format!("{err:#}") })?;
    }
    result
}

fn run_typed<T: Scalar>(args: &RunArgs, tolerance: f64) -> Result<ExitCode> {
    let (tensor, _) = load_tensor::<T>(&args.input)?;
    let kappa = resolve_kappa(args.kappa)?;
    let policy = SchemePolicy::from(args.policy);
    let strategy = Strategy::from(args.strategy);
    let config = ExecConfig { kappa, batch: args.batch, rank: args.rank, deterministic: args.deterministic };
    config.validate()?;

    let plans = build_mode_plans_with_policy(&tensor, kappa, strategy, policy)?;
    let factors = init_factors::<T>(tensor.shape(), args.rank, args.seed);
    let (outputs, timing) = run_timed(&plans, &factors, &config, args.iters)?;

    let mut modes = Vec::with_capacity(plans.len());
    let mut worst_overall = 0.0f64;
    let mut worst_mode = None;
    for ((plan, out), t) in plans.iter().zip(&outputs).zip(timing.modes) {
        let (max_rel_err, worst_entry) = if args.verify {
            let reference = oracle_mttkrp(&tensor, &factors, plan.mode())?;
            let worst = max_relative_error(out, &reference)?;
            if worst.rel_err > worst_overall || worst.rel_err.is_nan() {
                worst_overall = worst.rel_err;
                worst_mode = Some((plan.mode(), worst));
            }
            (Some(worst.rel_err), Some(worst))
        } else {
            (None, None)
        };
        modes.push(ModeRun {
            summary: summarize(&tensor, plan)?,
            busy_workers: t.busy_workers,
            elements_per_worker: t.elements_per_worker,
            wall_ms: t.wall_ms,
            min_ms: t.min_ms,
            median_ms: t.median_ms,
            output_digest: format!("{:016x}", fnv1a(out.data().iter().map(|v| Scalar::to_f64(*v).to_bits()))),
            output_sum: out.data().iter().map(|v| Scalar::to_f64(*v)).sum(),
            max_rel_err,
            worst_entry,
        });
    }

    let passed = !(worst_overall > tolerance || worst_overall.is_nan());
    let report = RunReport {
        tensor: args.input.tensor.display().to_string(),
        shape: tensor.shape().dims().to_vec(),
        nnz: tensor.nnz(),
        precision: T::PRECISION,
        policy,
        strategy,
        kappa,
        batch: args.batch,
        rank: args.rank,
        iters: args.iters,
        seed: args.seed,
        deterministic: args.deterministic,
        memory: estimate_memory(&tensor, args.rank, T::PRECISION),
        modes,
        total_ms: timing.total_ms,
        total_min_ms: timing.total_min_ms,
        total_median_ms: timing.total_median_ms,
        outputs_bit_identical: timing.outputs_bit_identical,
        verification: args.verify.then_some(Verification { tolerance, max_rel_err: worst_overall, passed }),
    };

    print_run_table(&report)?;
    if let Some(path) = &args.json {
        write_json(path, &report)?;
    }

    if let Some((mode, worst)) = worst_mode.filter(|_| !passed) {
        eprintln!(
            "verification failed: mode {mode} row {} column {}: got {}, expected {} (relative error {:e} > {tolerance:e})",
            worst.row, worst.col, worst.actual, worst.expected, worst.rel_err
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn print_run_table(report: &RunReport) -> Result<()> {
    let mut out = io::stdout().lock();
    let precision = match report.precision {
        Precision::F32 => "f32",
        Precision::F64 => "f64",
    };
    writeln!(
        out,
        "shape {:?}, nnz {}, R {}, kappa {}, P {}, {precision}, {} iters",
        report.shape, report.nnz, report.rank, report.kappa, report.batch, report.iters
    )?;
    writeln!(out, "{:>4} {:>8} {:>5} {:>10} {:>10} {:>9} {:>10}", "mode", "scheme", "busy", "min ms", "median ms", "max/mean", "rel err")?;
    for m in &report.modes {
        let err = m.max_rel_err.map(|e| format!("{e:.2e}")).unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "{:>4} {:>8} {:>5} {:>10.3} {:>10.3} {:>9.3} {:>10}",
            m.summary.mode, m.summary.scheme, m.busy_workers, m.min_ms, m.median_ms, m.summary.max_over_mean, err
        )?;
    }
    writeln!(out, "total: min {:.3} ms, median {:.3} ms", report.total_min_ms, report.total_median_ms)?;
    Ok(())
}
