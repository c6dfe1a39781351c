//! Fermionic steady states, transients, currents and the universal upper
//! bound.
//!
//! The covariance of the pumped, lossy system relaxes under the damped
//! generator `G = P + iH` with `P = A + D`:
//!
//! ```text
//! dQ/dt = -(G Q + Q G^H) + 2 A
//! ```
//!
//! Its fixed point `Q_NESS` solves `G Q + Q G^H = 2A`. The stationary
//! outflow current is `J = 2 tr(D Q_NESS)`, which equals the inflow
//! `2 tr(A (1 - Q_NESS))` by the balance equation, and is bounded by
//! `J_max = 2 tr(A) tr(D) / tr(A + D)` for every Hamiltonian.

use crate::error::{Error, Result};
use crate::linalg::{
    damped_generator, solve_damped_fixed_point, CMatrix, HermitianMatrix, PsdMatrix, C64,
};
use crate::system::{CovarianceMatrix, NessReport, Statistics, SystemSpec};
use crate::tolerances::ToleranceConfig;

/// Steady-state covariance of a fermionic system.
///
/// Requires `P = A + D` strictly positive; eigenvalues of the result lie in
/// the Pauli window `[0, 1]` up to the configured slack.
pub fn ness_covariance(spec: &SystemSpec, tol: &ToleranceConfig) -> Result<CovarianceMatrix> {
    spec.require_statistics(Statistics::Fermion)?;
    let p = spec.fermionic_damping()?;
    let q = solve_damped_fixed_point(&p, spec.hamiltonian(), spec.absorption(), tol)?;
    CovarianceMatrix::fermionic(q, tol.covariance)
}

/// Covariance at finite time `t >= 0` starting from `q0`.
///
/// Uses the identity `Q(t) = e^{-Gt} (Q0 - Q_inf) e^{-G^H t} + Q_inf` with
/// `Q_inf` the steady-state covariance, which avoids a second quadrature for
/// the transient integral term.
pub fn evolve_covariance(
    spec: &SystemSpec,
    q0: &CovarianceMatrix,
    t: f64,
    tol: &ToleranceConfig,
) -> Result<CovarianceMatrix> {
    spec.require_statistics(Statistics::Fermion)?;
    if t < 0.0 {
        return Err(Error::InvalidSpec(format!("evolution time must be non-negative, got {t}")));
    }
    if q0.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: q0.dim() });
    }
    if t == 0.0 {
        return Ok(q0.clone());
    }
    let q_inf = ness_covariance(spec, tol)?;
    let p = spec.fermionic_damping()?;
    let g = damped_generator(&p, spec.hamiltonian());
    let propagator = (-g * C64::new(t, 0.0)).exp();
    let diff = q0.matrix() - q_inf.matrix();
    let qt = &propagator * diff * propagator.adjoint() + q_inf.matrix();
    CovarianceMatrix::fermionic(HermitianMatrix::symmetrized(qt), tol.covariance)
}

/// Stationary outflow current `J = 2 tr(D Q)`.
///
/// Non-negative for valid inputs; no absolute value is taken, so a sign bug
/// upstream surfaces here instead of being masked.
pub fn current(spec: &SystemSpec, q: &CovarianceMatrix) -> f64 {
    2.0 * (spec.dissipation().matrix() * q.matrix()).trace().re
}

/// Universal upper bound `J_max = 2 tr(A) tr(D) / tr(A + D)`.
///
/// Independent of the Hamiltonian. Errors when both traces vanish.
pub fn current_bound_fermion(a: &PsdMatrix, d: &PsdMatrix) -> Result<f64> {
    let (tr_a, tr_d) = (a.trace(), d.trace());
    let denom = tr_a + tr_d;
    if denom <= 0.0 {
        return Err(Error::DegenerateChannels);
    }
    Ok(2.0 * tr_a * tr_d / denom)
}

/// Absolute imbalance `|2 tr(A (1 - Q)) - 2 tr(D Q)|` between inflow and
/// outflow; vanishes at stationarity.
pub fn balance_residual(spec: &SystemSpec, q: &CovarianceMatrix) -> f64 {
    let m = spec.dim();
    let one_minus_q = CMatrix::identity(m, m) - q.matrix();
    let inflow = 2.0 * (spec.absorption().matrix() * one_minus_q).trace().re;
    let outflow = 2.0 * (spec.dissipation().matrix() * q.matrix()).trace().re;
    (inflow - outflow).abs()
}

/// Expected particle number `tr Q`.
pub fn particle_number(q: &CovarianceMatrix) -> f64 {
    q.particle_number()
}

/// Stationary current with the Hamiltonian replaced by `lambda * H`,
/// scaling the coherent dynamics against the pump/loss rates.
pub fn current_lambda(spec: &SystemSpec, lambda: f64, tol: &ToleranceConfig) -> Result<f64> {
    if lambda < 0.0 {
        return Err(Error::InvalidSpec(format!("lambda must be non-negative, got {lambda}")));
    }
    let scaled = spec.with_hamiltonian_scaled(lambda);
    let q = ness_covariance(&scaled, tol)?;
    Ok(current(&scaled, &q))
}

/// Stationary current with both channel matrices rescaled to `gamma * A`,
/// `gamma * D` while the Hamiltonian is left unchanged.
pub fn current_gamma(spec: &SystemSpec, gamma: f64, tol: &ToleranceConfig) -> Result<f64> {
    if gamma <= 0.0 {
        return Err(Error::InvalidSpec(format!("gamma must be positive, got {gamma}")));
    }
    let scaled = spec.with_rates_scaled(gamma);
    let q = ness_covariance(&scaled, tol)?;
    Ok(current(&scaled, &q))
}

/// Full steady-state report: covariance, current, bound, ratio, balance
/// residual and particle number.
pub fn ness_report(spec: &SystemSpec, tol: &ToleranceConfig) -> Result<NessReport> {
    let q = ness_covariance(spec, tol)?;
    let j = current(spec, &q);
    let j_bound = current_bound_fermion(spec.absorption(), spec.dissipation())?;
    let balance = balance_residual(spec, &q);
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

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn scalar_spec(a: f64, d: f64) -> SystemSpec {
        SystemSpec::fermionic(
            HermitianMatrix::new(CMatrix::zeros(1, 1)).unwrap(),
            PsdMatrix::new(CMatrix::from_element(1, 1, c(a))).unwrap(),
            PsdMatrix::new(CMatrix::from_element(1, 1, c(d))).unwrap(),
        )
        .unwrap()
    }

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|v| c(*v))))
    }

    #[test]
    fn scalar_occupation_is_pump_fraction() {
        // single mode: Q = a / (a + d)
        let spec = scalar_spec(0.7, 0.3);
        let q = ness_covariance(&spec, &tol()).unwrap();
        assert_abs_diff_eq!(q.matrix()[(0, 0)].re, 0.7, epsilon = 1e-13);
    }

    #[test]
    fn diagonal_channels_decouple_per_mode() {
        let a = [0.4, 1.1, 0.2];
        let d = [0.6, 0.9, 1.3];
        let spec = SystemSpec::fermionic(
            HermitianMatrix::new(CMatrix::zeros(3, 3)).unwrap(),
            PsdMatrix::new(diag(&a)).unwrap(),
            PsdMatrix::new(diag(&d)).unwrap(),
        )
        .unwrap();
        let q = ness_covariance(&spec, &tol()).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(q.matrix()[(i, i)].re, a[i] / (a[i] + d[i]), epsilon = 1e-12);
        }
    }

    #[test]
    fn proportional_channels_half_fill_regardless_of_hamiltonian() {
        // A = D = I/2 commutes with everything: Q = I/2 for any H
        let m = 4;
        let h_raw = CMatrix::from_fn(m, m, |i, j| C64::new((i * j) as f64, (i as f64) - (j as f64)));
        let h = HermitianMatrix::symmetrized(h_raw);
        let half = PsdMatrix::new(CMatrix::identity(m, m) * c(0.5)).unwrap();
        let spec = SystemSpec::fermionic(h, half.clone(), half).unwrap();
        let q = ness_covariance(&spec, &tol()).unwrap();
        let target = CMatrix::identity(m, m) * c(0.5);
        assert!((q.matrix() - target).norm() < 1e-12);
    }

    #[test]
    fn scalar_current_and_bound_coincide() {
        let spec = scalar_spec(1.0, 1.0);
        let q = ness_covariance(&spec, &tol()).unwrap();
        let j = current(&spec, &q);
        assert_abs_diff_eq!(j, 1.0, epsilon = 1e-13);
        let bound = current_bound_fermion(spec.absorption(), spec.dissipation()).unwrap();
        assert_abs_diff_eq!(bound, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(particle_number(&q), 0.5, epsilon = 1e-13);
    }

    #[test]
    fn no_loss_channel_means_no_current() {
        let spec = scalar_spec(1.0, 0.0);
        // P = A is still strictly positive here
        let q = ness_covariance(&spec, &tol()).unwrap();
        assert_abs_diff_eq!(current(&spec, &q), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn empty_state_carries_no_current() {
        let spec = scalar_spec(1.0, 1.0);
        let q = CovarianceMatrix::fermionic(
            HermitianMatrix::new(CMatrix::zeros(1, 1)).unwrap(),
            1e-10,
        )
        .unwrap();
        assert_eq!(current(&spec, &q), 0.0);
    }

    #[test]
    fn bound_arithmetic() {
        let a = PsdMatrix::new(diag(&[1.2, 0.8])).unwrap(); // tr 2
        let d = PsdMatrix::new(diag(&[1.0, 2.0])).unwrap(); // tr 3
        assert_abs_diff_eq!(current_bound_fermion(&a, &d).unwrap(), 2.4, epsilon = 1e-15);
        let zero = PsdMatrix::new(CMatrix::zeros(2, 2)).unwrap();
        assert_abs_diff_eq!(current_bound_fermion(&zero, &d).unwrap(), 0.0, epsilon = 1e-15);
        match current_bound_fermion(&zero, &zero) {
            Err(Error::DegenerateChannels) => {}
            other => panic!("expected DegenerateChannels, got {other:?}"),
        }
    }

    #[test]
    fn balance_plug_in_values() {
        let spec = scalar_spec(1.0, 1.0);
        // Q = 0: residual is 2 tr A
        let zero_q =
            CovarianceMatrix::fermionic(HermitianMatrix::new(CMatrix::zeros(1, 1)).unwrap(), 1e-10)
                .unwrap();
        assert_abs_diff_eq!(balance_residual(&spec, &zero_q), 2.0, epsilon = 1e-15);
        // Q = 1/4: |2 * 3/4 - 2 * 1/4| = 1
        let quarter = CovarianceMatrix::fermionic(
            HermitianMatrix::new(CMatrix::from_element(1, 1, c(0.25))).unwrap(),
            1e-10,
        )
        .unwrap();
        assert_abs_diff_eq!(balance_residual(&spec, &quarter), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ness_balance_residual_vanishes() {
        let spec = scalar_spec(0.3, 1.7);
        let q = ness_covariance(&spec, &tol()).unwrap();
        let j = current(&spec, &q);
        assert!(balance_residual(&spec, &q) <= 1e-9 * j.max(1.0));
    }

    #[test]
    fn evolution_at_zero_time_is_identity() {
        let spec = scalar_spec(1.0, 1.0);
        let q0 = CovarianceMatrix::fermionic(
            HermitianMatrix::new(CMatrix::from_element(1, 1, c(0.9))).unwrap(),
            1e-10,
        )
        .unwrap();
        let qt = evolve_covariance(&spec, &q0, 0.0, &tol()).unwrap();
        assert_eq!(qt.matrix(), q0.matrix());
    }

    #[test]
    fn long_time_evolution_reaches_steady_state() {
        let spec = scalar_spec(1.0, 1.0);
        let q0 = CovarianceMatrix::fermionic(
            HermitianMatrix::new(CMatrix::from_element(1, 1, c(1.0))).unwrap(),
            1e-10,
        )
        .unwrap();
        // e^{-2 lambda_min(P) t} < 1e-14 at t = 17 for lambda_min = 2
        let qt = evolve_covariance(&spec, &q0, 17.0, &tol()).unwrap();
        let q_inf = ness_covariance(&spec, &tol()).unwrap();
        assert!((qt.matrix() - q_inf.matrix()).norm() < 1e-10);
    }

    #[test]
    fn lambda_zero_with_diagonal_channels_matches_closed_form() {
        let a = [0.4, 1.1, 0.2];
        let d = [0.6, 0.9, 1.3];
        let h_raw =
            CMatrix::from_fn(3, 3, |i, j| C64::new(0.3 * (i + 2 * j) as f64, i as f64 - j as f64));
        let spec = SystemSpec::fermionic(
            HermitianMatrix::symmetrized(h_raw),
            PsdMatrix::new(diag(&a)).unwrap(),
            PsdMatrix::new(diag(&d)).unwrap(),
        )
        .unwrap();
        let j = current_lambda(&spec, 0.0, &tol()).unwrap();
        let expected: f64 = a
            .iter()
            .zip(d.iter())
            .map(|(ai, di)| 2.0 * ai * di / (ai + di))
            .sum();
        assert_abs_diff_eq!(j, expected, epsilon = 1e-12);
    }

    #[test]
    fn lambda_one_is_plain_current() {
        let spec = scalar_spec(0.8, 0.4);
        let j_direct = {
            let q = ness_covariance(&spec, &tol()).unwrap();
            current(&spec, &q)
        };
        let j_lambda = current_lambda(&spec, 1.0, &tol()).unwrap();
        assert_abs_diff_eq!(j_direct, j_lambda, epsilon = 1e-14);
    }

    #[test]
    fn gamma_scaling_scalar_closed_form() {
        let spec = scalar_spec(1.0, 1.0);
        // J_gamma = 2 gamma a d / (a + d) = gamma
        assert_abs_diff_eq!(current_gamma(&spec, 2.0, &tol()).unwrap(), 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(
            current_gamma(&spec, 1.0, &tol()).unwrap(),
            current_lambda(&spec, 1.0, &tol()).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn bound_is_linear_in_rates() {
        let a = PsdMatrix::new(diag(&[1.2, 0.8])).unwrap();
        let d = PsdMatrix::new(diag(&[1.0, 2.0])).unwrap();
        let gamma = 3.7;
        let b1 = current_bound_fermion(&a.scale(gamma), &d.scale(gamma)).unwrap();
        let b0 = current_bound_fermion(&a, &d).unwrap();
        assert_abs_diff_eq!(b1, gamma * b0, epsilon = 1e-12);
    }
}
