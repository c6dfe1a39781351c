//! Batch experiments: configuration, runners and output schemas for the
//! shipped parameter sweeps, the ribbon run and single-system reports.

mod config;
mod records;
mod runner;

pub use config::{
    EnsembleOverrides, ExperimentKind, ResolvedConfig, RunConfig, SingleSystemInput,
};
pub use records::{csv_header, records_to_csv, reason_code, RunSummary, ScatterRecord};
pub use runner::{
    run, run_fig1, run_fig2, run_fig3, run_fig4, run_ribbon, run_single, RunOutcome,
};
