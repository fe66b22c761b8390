//! Sparse MTTKRP over mode-specific COO tensor copies.
//!
//! The crate is organised around the pipeline a decomposition run goes
//! through:
//!
//! - [`tensor`]: the COO data model, FROSTT `.tns` I/O and synthetic tensors.
//! - [`layout`]: per-mode degree analysis, the two partitioning schemes, the
//!   adaptive selector and the memory estimate for the N tensor copies.
//! - [`kernel`]: the parallel executor. One worker per partition stands in for
//!   a streaming multiprocessor; modes are processed one after the other with a
//!   full barrier in between.
//! - [`oracle`]: brute-force references used by the tests and by `--verify`.

pub mod error;
pub mod kernel;
pub mod layout;
pub mod oracle;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use kernel::{
    mttkrp_all_modes, mttkrp_mode, run_timed, ExecConfig, FactorMatrix, ModeTiming, TimingReport,
};
pub use layout::{
    balance_metrics, build_mode_plans, build_mode_plans_with_policy, estimate_memory,
    mode_degrees, partition_scheme1, partition_scheme2, select_scheme, BalanceMetrics,
    DegreeProfile, MemoryEstimate, ModePlan, Scheme, SchemePolicy, Strategy,
};
pub use scalar::{Precision, Scalar};
pub use tensor::{
    generate_synthetic, parse_frostt, parse_frostt_str, write_frostt, write_frostt_string,
    Distribution, ParseOptions, ParseStats, Shape, SparseTensor,
};
