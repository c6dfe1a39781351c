//! Central numerical tolerances.
//!
//! Every threshold used by validation and by the solvers lives here so that a
//! run is characterised by a single [`ToleranceConfig`] value. The defaults
//! are deliberate:
//!
//! * `hermiticity` (1e-12, relative): floating-point drift in long operator
//!   chains is repaired by symmetrisation below this level and rejected above.
//! * `psd` (1e-10, relative): eigenvalues in `[-psd * scale, 0)` are clipped
//!   to zero, anything lower is a genuine negativity.
//! * `strict_positivity` (1e-12): the damped fixed point only exists for a
//!   strictly positive damping matrix; `lambda_min <= strict_positivity *
//!   max(1, lambda_max)` is treated as singular.
//! * `solver_residual` (1e-10, relative Frobenius): acceptance gate for the
//!   fixed-point solver.
//! * `degeneracy_factor` (1e-8): eigenvalues closer than `factor * spectral
//!   range` are merged into one eigenspace. Far above eigensolver noise and
//!   far below O(1) level spacings.
//! * `covariance` (1e-10): slack on the spectral range of computed
//!   covariances (Pauli window `[0, 1]` for fermions, `[0, inf)` for bosons).
//! * `balance` (1e-9): stationarity check on pump/loss balance.
//! * `bound_slack` (1e-9): slack used when comparing a current to its
//!   universal bound.
//! * `unitarity` (1e-10): acceptance gate on symmetry operators.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub hermiticity: f64,
    pub psd: f64,
    pub strict_positivity: f64,
    pub solver_residual: f64,
    pub degeneracy_factor: f64,
    pub covariance: f64,
    pub balance: f64,
    pub bound_slack: f64,
    pub unitarity: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            psd: 1e-10,
            strict_positivity: 1e-12,
            solver_residual: 1e-10,
            degeneracy_factor: 1e-8,
            covariance: 1e-10,
            balance: 1e-9,
            bound_slack: 1e-9,
            unitarity: 1e-10,
        }
    }
}
