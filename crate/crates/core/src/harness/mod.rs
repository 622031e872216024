//! Monte Carlo benchmarking: seeded trial loops over random true states,
//! summaries with linearly interpolated quartiles, and CSV/JSON output.

mod config;
mod report;
mod run;
mod sweep;

pub use config::{Algorithm, Binning, ExperimentConfig};
pub use report::{
    emit_csv, emit_json, quantile, read_csv, read_json, summarize, write_csv, BenchmarkReport, Summary,
    SummaryRow, CSV_HEADER,
};
pub use run::{reconstruct_record, run_experiment, run_trial, trial_inputs, trial_seed, DumpedStates, TrialResult};
pub use sweep::{
    condition_samples, condition_sweep, emit_condition_csv, run_benchmark, run_benchmark_point,
    sampled_condition_number, write_condition_csv, BenchmarkPlan, ConditionRow, ConditionSweep,
};
