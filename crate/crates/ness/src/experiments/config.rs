//! Run configuration: JSON schema, per-experiment defaults and validation.
//!
//! A run is fully determined by `(config, seed)`. Unknown JSON keys are
//! rejected so that typos in config files fail loudly instead of silently
//! running with defaults.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ensembles::{EnsembleConfig, EnsembleKind, GoeConvention};
use crate::error::{Error, Result};
use crate::linalg::MatrixData;
use crate::ribbon::RibbonSpec;
use crate::system::Statistics;
use crate::tolerances::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Fig1FermionScatter,
    Fig2DesignedScatter,
    Fig3GammaAbsolute,
    Fig4BosonScatter,
    RibbonDemo,
    SingleSystem,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Fig1FermionScatter => "fig1_fermion_scatter",
            ExperimentKind::Fig2DesignedScatter => "fig2_designed_scatter",
            ExperimentKind::Fig3GammaAbsolute => "fig3_gamma_absolute",
            ExperimentKind::Fig4BosonScatter => "fig4_boson_scatter",
            ExperimentKind::RibbonDemo => "ribbon_demo",
            ExperimentKind::SingleSystem => "single_system",
        }
    }

    fn default_output(&self) -> PathBuf {
        match self {
            ExperimentKind::SingleSystem => PathBuf::from("single_system.json"),
            other => PathBuf::from(format!("{}.csv", other.name())),
        }
    }
}

/// Partial ensemble parameters; anything omitted falls back to the
/// experiment's defaults.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleOverrides {
    pub m: Option<usize>,
    pub v: Option<f64>,
    pub m_a: Option<usize>,
    pub m_d: Option<usize>,
    pub m_p: Option<usize>,
    pub goe_convention: Option<GoeConvention>,
}

/// Explicit matrices for a single-system run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleSystemInput {
    pub statistics: Statistics,
    pub h: MatrixData,
    pub a: MatrixData,
    pub d: MatrixData,
    /// Initial covariance for transient samples; defaults to the empty
    /// state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<MatrixData>,
    /// Times at which to sample the transient covariance.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<f64>,
}

/// On-disk run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_realizations")]
    pub n_realizations: u64,
    pub seed: u64,
    #[serde(default)]
    pub ensemble: EnsembleOverrides,
    /// Overrides for the designed sub-run of the rate-scaling experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designed_ensemble: Option<EnsembleOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_log_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_log_range: Option<[f64; 2]>,
    /// Pin the coherent scale to a fixed value (including 0) instead of
    /// drawing it log-uniformly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_lambda: Option<f64>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    /// Per-realization solver failures above this rate fail the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_failure_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ribbon: Option<RibbonSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single: Option<SingleSystemInput>,
}

fn default_realizations() -> u64 {
    1000
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub experiment: ExperimentKind,
    pub n_realizations: u64,
    pub seed: u64,
    pub ensemble: EnsembleConfig,
    /// Ensemble of the designed sub-run (rate-scaling experiment only).
    pub designed_ensemble: EnsembleConfig,
    pub lambda_log_range: [f64; 2],
    pub gamma_log_range: [f64; 2],
    pub fixed_lambda: Option<f64>,
    pub tolerances: ToleranceConfig,
    pub output_path: PathBuf,
    pub max_failure_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ribbon: Option<RibbonSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single: Option<SingleSystemInput>,
}

impl RunConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fill in per-experiment defaults and validate everything.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        if self.n_realizations < 1 {
            return Err(Error::Config("n_realizations must be at least 1".into()));
        }
        let (default_kind, dm, dv, dma, dmd, dmp) = match self.experiment {
            ExperimentKind::Fig1FermionScatter => (EnsembleKind::Goe, 10, 1.0, 5, 10, 10),
            ExperimentKind::Fig2DesignedScatter => (EnsembleKind::Designed, 10, 1.0, 10, 10, 10),
            ExperimentKind::Fig3GammaAbsolute => (EnsembleKind::Goe, 10, 1.0, 5, 10, 10),
            ExperimentKind::Fig4BosonScatter => (EnsembleKind::Wishart, 10, 1.0, 5, 10, 10),
            ExperimentKind::RibbonDemo | ExperimentKind::SingleSystem => {
                (EnsembleKind::Goe, 1, 1.0, 1, 1, 1)
            }
        };
        let ensemble = EnsembleConfig {
            m: self.ensemble.m.unwrap_or(dm),
            v: self.ensemble.v.unwrap_or(dv),
            m_a: self.ensemble.m_a.unwrap_or(dma),
            m_d: self.ensemble.m_d.unwrap_or(dmd),
            m_p: self.ensemble.m_p.unwrap_or(dmp),
            seed: self.seed,
            kind: default_kind,
            goe_convention: self.ensemble.goe_convention.unwrap_or_default(),
        };
        ensemble.validate()?;
        let designed_overrides = self.designed_ensemble.unwrap_or_default();
        let designed_ensemble = EnsembleConfig {
            m: designed_overrides.m.unwrap_or(ensemble.m),
            v: designed_overrides.v.unwrap_or(ensemble.v),
            m_a: designed_overrides.m_a.unwrap_or(10),
            m_d: designed_overrides.m_d.unwrap_or(10),
            m_p: designed_overrides.m_p.unwrap_or(10),
            seed: self.seed,
            kind: EnsembleKind::Designed,
            goe_convention: designed_overrides
                .goe_convention
                .unwrap_or(ensemble.goe_convention),
        };
        designed_ensemble.validate()?;

        let lambda_log_range = self.lambda_log_range.unwrap_or([-5.0, 5.0]);
        let gamma_log_range = self.gamma_log_range.unwrap_or([-5.0, 5.0]);
        for (name, range) in
            [("lambda_log_range", lambda_log_range), ("gamma_log_range", gamma_log_range)]
        {
            if range[0] > range[1] || !range[0].is_finite() || !range[1].is_finite() {
                return Err(Error::Config(format!("{name} must be a finite ordered pair")));
            }
        }
        if let Some(lambda) = self.fixed_lambda {
            if lambda < 0.0 || !lambda.is_finite() {
                return Err(Error::Config("fixed_lambda must be finite and non-negative".into()));
            }
        }
        let max_failure_rate = self.max_failure_rate.unwrap_or(0.01);
        if !(0.0..=1.0).contains(&max_failure_rate) {
            return Err(Error::Config("max_failure_rate must lie in [0, 1]".into()));
        }
        if self.experiment == ExperimentKind::RibbonDemo && self.ribbon.is_none() {
            return Err(Error::Config("ribbon_demo requires a `ribbon` section".into()));
        }
        if self.experiment == ExperimentKind::SingleSystem && self.single.is_none() {
            return Err(Error::Config("single_system requires a `single` section".into()));
        }
        Ok(ResolvedConfig {
            experiment: self.experiment,
            n_realizations: self.n_realizations,
            seed: self.seed,
            ensemble,
            designed_ensemble,
            lambda_log_range,
            gamma_log_range,
            fixed_lambda: self.fixed_lambda,
            tolerances: self.tolerances,
            output_path: self
                .output_path
                .clone()
                .unwrap_or_else(|| self.experiment.default_output()),
            max_failure_rate,
            ribbon: self.ribbon.clone(),
            single: self.single.clone(),
        })
    }
}
