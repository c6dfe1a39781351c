//! Scatter records, CSV schemas and run summaries.
//!
//! Each experiment writes one CSV row per completed realization with a
//! fixed, golden-tested header. Auxiliary per-realization diagnostics live
//! in an ordered map so output stays deterministic.

use std::collections::BTreeMap;

use serde::Serialize;

use super::config::ExperimentKind;
use crate::error::{Error, Result};

/// One realization of a parameter sweep.
#[derive(Debug, Clone)]
pub struct ScatterRecord {
    pub realization: u64,
    /// The swept scale: lambda for the bound experiments, gamma for the
    /// rate-scaling one.
    pub lambda_or_gamma: f64,
    pub j: f64,
    pub bound: f64,
    pub ratio: f64,
    pub aux: BTreeMap<&'static str, f64>,
}

impl ScatterRecord {
    pub fn aux(&self, key: &str) -> f64 {
        self.aux.get(key).copied().unwrap_or(f64::NAN)
    }
}

/// Fixed CSV header per experiment kind.
pub fn csv_header(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::Fig1FermionScatter | ExperimentKind::Fig2DesignedScatter => &[
            "realization",
            "lambda",
            "J",
            "J_max",
            "ratio",
            "tr_A",
            "tr_D",
            "particle_number",
            "balance_residual",
        ],
        ExperimentKind::Fig3GammaAbsolute => &[
            "realization",
            "gamma",
            "J_gamma_in_spacing_units",
            "gamma_J_max_in_spacing_units",
            "designed_flag",
        ],
        ExperimentKind::Fig4BosonScatter => {
            &["realization", "lambda", "J", "J_min", "ratio", "lambda_min_D_minus_A"]
        }
        ExperimentKind::RibbonDemo => {
            &["node", "x", "tr_DQ", "tr_A_one_minus_Q", "local_bound"]
        }
        ExperimentKind::SingleSystem => &[],
    }
}

/// Serialize records to CSV bytes with the schema of `kind`.
pub fn records_to_csv(kind: ExperimentKind, records: &[ScatterRecord]) -> Result<Vec<u8>> {
    let header = csv_header(kind);
    if header.is_empty() {
        return Err(Error::Config(format!("{} has no CSV schema", kind.name())));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for record in records {
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        row.push(record.realization.to_string());
        match kind {
            ExperimentKind::Fig1FermionScatter | ExperimentKind::Fig2DesignedScatter => {
                row.push(record.lambda_or_gamma.to_string());
                row.push(record.j.to_string());
                row.push(record.bound.to_string());
                row.push(record.ratio.to_string());
                row.push(record.aux("tr_A").to_string());
                row.push(record.aux("tr_D").to_string());
                row.push(record.aux("particle_number").to_string());
                row.push(record.aux("balance_residual").to_string());
            }
            ExperimentKind::Fig3GammaAbsolute => {
                row.push(record.lambda_or_gamma.to_string());
                row.push(record.j.to_string());
                row.push(record.bound.to_string());
                row.push((record.aux("designed_flag") as i64).to_string());
            }
            ExperimentKind::Fig4BosonScatter => {
                row.push(record.lambda_or_gamma.to_string());
                row.push(record.j.to_string());
                row.push(record.bound.to_string());
                row.push(record.ratio.to_string());
                row.push(record.aux("lambda_min_D_minus_A").to_string());
            }
            _ => unreachable!("schema guard above"),
        }
        writer.write_record(&row)?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::Config(format!("CSV buffer flush failed: {e}")))
}

/// Aggregate outcome of a run; serialized as the JSON summary block.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub n_realizations: u64,
    pub n_completed: u64,
    pub n_failed: u64,
    /// Failure reason code -> count.
    pub failure_reasons: BTreeMap<String, u64>,
    /// Realizations whose current violates its universal bound beyond the
    /// configured slack. The experiment's own falsification signal: must be
    /// zero.
    pub bound_violations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_ratio: Option<f64>,
    /// Experiment-specific scalar diagnostics.
    pub checks: BTreeMap<&'static str, f64>,
    pub output_path: String,
}

impl RunSummary {
    pub fn new(experiment: ExperimentKind, n_realizations: u64, output_path: String) -> Self {
        Self {
            experiment: experiment.name().to_string(),
            n_realizations,
            n_completed: 0,
            n_failed: 0,
            failure_reasons: BTreeMap::new(),
            bound_violations: 0,
            max_ratio: None,
            min_ratio: None,
            checks: BTreeMap::new(),
            output_path,
        }
    }

    pub fn record_failure(&mut self, reason: String) {
        self.n_failed += 1;
        *self.failure_reasons.entry(reason).or_insert(0) += 1;
    }

    pub fn observe_ratio(&mut self, ratio: f64) {
        self.max_ratio = Some(self.max_ratio.map_or(ratio, |m| m.max(ratio)));
        self.min_ratio = Some(self.min_ratio.map_or(ratio, |m| m.min(ratio)));
    }

    pub fn failure_rate(&self) -> f64 {
        if self.n_realizations == 0 {
            0.0
        } else {
            self.n_failed as f64 / self.n_realizations as f64
        }
    }
}

/// Map an error to a short, stable reason code for failure accounting.
pub fn reason_code(error: &Error) -> String {
    match error {
        Error::SingularGenerator { .. } => "singular_generator".into(),
        Error::Unstable { .. } => "unstable".into(),
        Error::NumericallyMarginal { .. } => "numerically_marginal".into(),
        Error::SolverResidual { .. } => "solver_residual".into(),
        Error::CovarianceOutOfRange { .. } => "covariance_out_of_range".into(),
        Error::DegenerateChannels => "degenerate_channels".into(),
        Error::DegenerateSpectrum { .. } => "degenerate_spectrum".into(),
        Error::ConvergenceFailed(what) => format!("convergence_failed:{what}"),
        other => format!("other:{other}"),
    }
}
