//! Bosonic steady states, the stability gate `D >= A`, and the universal
//! lower bound on the current.
//!
//! For bosons the damping matrix is `P = D - A`. When `P` is not strictly
//! positive the particle number diverges and no steady state exists, so
//! every solve is gated on strict stability. Stable systems satisfy
//! `J = 2 tr(D Q_NESS) = 2 tr(A (1 + Q_NESS)) >= 2 tr(A) tr(D) / tr(D - A)`:
//! bosonic currents have no upper bound but cannot be throttled below
//! `J_min`.

use crate::error::{Error, Result};
use crate::linalg::{
    damped_generator, solve_damped_fixed_point, CMatrix, HermitianMatrix, PsdMatrix, C64,
    EIG_MAX_ITER,
};
use crate::system::{CovarianceMatrix, NessReport, Statistics, SystemSpec};
use crate::tolerances::ToleranceConfig;

/// Outcome of the stability check on `D - A`.
#[derive(Debug, Clone, Copy)]
pub struct BosonStabilityReport {
    pub stable: bool,
    pub lambda_min_of_d_minus_a: f64,
}

/// Report the smallest eigenvalue of `D - A` and the strict-stability
/// verdict `lambda_min > strict_positivity * max(1, lambda_max)`.
pub fn check_stability(a: &PsdMatrix, d: &PsdMatrix) -> Result<BosonStabilityReport> {
    if a.dim() != d.dim() {
        return Err(Error::DimensionMismatch { expected: d.dim(), found: a.dim() });
    }
    let diff = d.matrix() - a.matrix();
    let se = diff
        .clone()
        .try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITER)
        .ok_or(Error::ConvergenceFailed("Hermitian eigendecomposition"))?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for e in se.eigenvalues.iter() {
        lo = lo.min(*e);
        hi = hi.max(*e);
    }
    let strict = ToleranceConfig::default().strict_positivity;
    let stable = lo > strict * hi.abs().max(1.0);
    Ok(BosonStabilityReport { stable, lambda_min_of_d_minus_a: lo })
}

/// Bosonic damping matrix `P = D - A`, gated on strict stability.
///
/// `lambda_min(D - A) <= 0` is unstable (particle number diverges);
/// a positive but numerically marginal margin is refused as well, since the
/// covariance norm diverges like `1 / lambda_min` there.
fn bosonic_damping(spec: &SystemSpec) -> Result<PsdMatrix> {
    let report = check_stability(spec.absorption(), spec.dissipation())?;
    if report.lambda_min_of_d_minus_a <= 0.0 {
        return Err(Error::Unstable { lambda_min: report.lambda_min_of_d_minus_a });
    }
    if !report.stable {
        return Err(Error::NumericallyMarginal { lambda_min: report.lambda_min_of_d_minus_a });
    }
    PsdMatrix::new(spec.dissipation().matrix() - spec.absorption().matrix())
}

/// Steady-state covariance of a stable bosonic system:
/// the fixed point of the damping `P = D - A` pumped by `A`. Positive
/// semi-definite, with no upper cap on the occupation.
pub fn ness_covariance_boson(spec: &SystemSpec, tol: &ToleranceConfig) -> Result<CovarianceMatrix> {
    spec.require_statistics(Statistics::Boson)?;
    let p = bosonic_damping(spec)?;
    let q = solve_damped_fixed_point(&p, spec.hamiltonian(), spec.absorption(), tol)?;
    CovarianceMatrix::bosonic(q, tol.covariance)
}

/// Covariance of a stable bosonic system at finite time `t >= 0`, via
/// `Q(t) = e^{-Gt} (Q0 - Q_inf) e^{-G^H t} + Q_inf` with `G = (D - A) + iH`.
pub fn evolve_covariance_boson(
    spec: &SystemSpec,
    q0: &CovarianceMatrix,
    t: f64,
    tol: &ToleranceConfig,
) -> Result<CovarianceMatrix> {
    spec.require_statistics(Statistics::Boson)?;
    if t < 0.0 {
        return Err(Error::InvalidSpec(format!("evolution time must be non-negative, got {t}")));
    }
    if q0.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: q0.dim() });
    }
    if t == 0.0 {
        return Ok(q0.clone());
    }
    let q_inf = ness_covariance_boson(spec, tol)?;
    let p = bosonic_damping(spec)?;
    let g = damped_generator(&p, spec.hamiltonian());
    let propagator = (-g * C64::new(t, 0.0)).exp();
    let diff = q0.matrix() - q_inf.matrix();
    let qt = &propagator * diff * propagator.adjoint() + q_inf.matrix();
    CovarianceMatrix::bosonic(HermitianMatrix::symmetrized(qt), tol.covariance)
}

/// Stationary outflow current `J = 2 tr(D Q)`; at the steady state this
/// equals the inflow `2 tr(A (1 + Q))`.
pub fn current_boson(spec: &SystemSpec, q: &CovarianceMatrix) -> f64 {
    2.0 * (spec.dissipation().matrix() * q.matrix()).trace().re
}

/// Bosonic inflow `2 tr(A (1 + Q))`, useful as an independent route to the
/// stationary current.
pub fn inflow_boson(spec: &SystemSpec, q: &CovarianceMatrix) -> f64 {
    let m = spec.dim();
    let one_plus_q = CMatrix::identity(m, m) + q.matrix();
    2.0 * (spec.absorption().matrix() * one_plus_q).trace().re
}

/// Universal lower bound `J_min = 2 tr(A) tr(D) / tr(D - A)`.
///
/// Diverges as the pump trace approaches the loss trace: bosonic currents
/// can be made arbitrarily large. Errors when `tr(D - A) <= 0`.
pub fn current_lower_bound_boson(a: &PsdMatrix, d: &PsdMatrix) -> Result<f64> {
    let (tr_a, tr_d) = (a.trace(), d.trace());
    let denom = tr_d - tr_a;
    if denom <= 0.0 {
        return Err(Error::DegenerateChannels);
    }
    Ok(2.0 * tr_a * tr_d / denom)
}

/// Balance residual `|2 tr(A (1 + Q)) - 2 tr(D Q)|`; vanishes at
/// stationarity.
pub fn balance_residual_boson(spec: &SystemSpec, q: &CovarianceMatrix) -> f64 {
    (inflow_boson(spec, q) - current_boson(spec, q)).abs()
}

/// Stationary bosonic current with the Hamiltonian replaced by
/// `lambda * H`.
pub fn current_lambda_boson(spec: &SystemSpec, lambda: f64, tol: &ToleranceConfig) -> Result<f64> {
    if lambda < 0.0 {
        return Err(Error::InvalidSpec(format!("lambda must be non-negative, got {lambda}")));
    }
    let scaled = spec.with_hamiltonian_scaled(lambda);
    let q = ness_covariance_boson(&scaled, tol)?;
    Ok(current_boson(&scaled, &q))
}

/// Full bosonic steady-state report; `j_bound` is the lower bound and
/// `ratio = j / j_bound >= 1`.
pub fn ness_report_boson(spec: &SystemSpec, tol: &ToleranceConfig) -> Result<NessReport> {
    let q = ness_covariance_boson(spec, tol)?;
    let j = current_boson(spec, &q);
    let j_bound = current_lower_bound_boson(spec.absorption(), spec.dissipation())?;
    let balance = balance_residual_boson(spec, &q);
    let n = q.particle_number();
    Ok(NessReport {
        j,
        j_bound,
        ratio: j / j_bound,
        balance_residual: balance,
        particle_number: n,
        q_ness: q,
    })
}
