//! Shared test oracles, independent of the library's solver paths.
//!
//! * [`integrate_covariance_ode`]: adaptive Dormand-Prince 5(4) integration
//!   of the covariance equation of motion `dQ/dt = -(G Q + Q G^H) + 2 S`.
//! * [`quadrature_fixed_point`]: adaptive Simpson quadrature of the defining
//!   integral `2 int_0^smax e^{-Gs} S e^{-G^H s} ds`.
//!
//! Both work directly on raw matrices and never call the fixed-point solver
//! they are used to check.

#![allow(dead_code)]

use nalgebra::DMatrix;
use ness::ensembles::{sample_goe, sample_wishart_channel};
use ness::{CMatrix, HermitianMatrix, PsdMatrix, SystemSpec, C64};
use rand::Rng;

/// Right-hand side of the covariance equation of motion.
fn rhs(g: &CMatrix, source2: &CMatrix, q: &CMatrix) -> CMatrix {
    source2 - (g * q + q * g.adjoint())
}

/// Adaptive Dormand-Prince 5(4) integration of
/// `dQ/dt = -(G Q + Q G^H) + 2 S` from `q0` at `t = 0` to `t_end`.
pub fn integrate_covariance_ode(
    g: &CMatrix,
    source2: &CMatrix,
    q0: &CMatrix,
    t_end: f64,
    rtol: f64,
    atol: f64,
) -> CMatrix {
    // Butcher tableau of Dormand-Prince 5(4)
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] =
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut q = q0.clone();
    let mut t = 0.0f64;
    let mut h = (t_end / 100.0).clamp(1e-6, 0.1);
    let mut k: Vec<CMatrix> = vec![CMatrix::zeros(q.nrows(), q.ncols()); 7];

    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        k[0] = rhs(g, source2, &q);
        for stage in 1..7 {
            let mut y = q.clone();
            if stage < 6 {
                for (j, kj) in k.iter().enumerate().take(stage) {
                    let coef = A[stage - 1][j];
                    if coef != 0.0 {
                        y += kj * C64::new(h * coef, 0.0);
                    }
                }
            } else {
                // stage 7 reuses the 5th-order combination (FSAL structure)
                for (j, kj) in k.iter().enumerate().take(6) {
                    let coef = A[5][j];
                    if coef != 0.0 {
                        y += kj * C64::new(h * coef, 0.0);
                    }
                }
            }
            k[stage] = rhs(g, source2, &y);
        }
        let mut y5 = q.clone();
        let mut err = CMatrix::zeros(q.nrows(), q.ncols());
        for j in 0..7 {
            if B5[j] != 0.0 {
                y5 += &k[j] * C64::new(h * B5[j], 0.0);
            }
            let diff = B5[j] - B4[j];
            if diff != 0.0 {
                err += &k[j] * C64::new(h * diff, 0.0);
            }
        }
        let scale = atol + rtol * y5.norm().max(q.norm());
        let err_norm = err.norm() / scale;
        if err_norm <= 1.0 {
            t += h;
            q = y5;
        }
        let factor = if err_norm > 0.0 { 0.9 * err_norm.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }
    q
}

/// Adaptive Simpson quadrature of `2 int_0^smax F(s) ds` for the matrix
/// integrand `F(s) = e^{-Gs} S e^{-G^H s}`, with the truncation point chosen
/// from the slowest damping rate: `exp(-2 lambda_min s_max) < 1e-14`.
pub fn quadrature_fixed_point(g: &CMatrix, s: &CMatrix, lambda_min: f64, tol: f64) -> CMatrix {
    let s_max = 14.0 * std::f64::consts::LN_10 / (2.0 * lambda_min);
    let f = |t: f64| -> CMatrix {
        let e = (-g * C64::new(t, 0.0)).exp();
        &e * s * e.adjoint()
    };
    fn simpson(a: f64, b: f64, fa: &CMatrix, fm: &CMatrix, fb: &CMatrix) -> CMatrix {
        (fa + fm * C64::new(4.0, 0.0) + fb) * C64::new((b - a) / 6.0, 0.0)
    }
    #[allow(clippy::too_many_arguments)]
    fn adaptive(
        f: &dyn Fn(f64) -> CMatrix,
        a: f64,
        b: f64,
        fa: CMatrix,
        fm: CMatrix,
        fb: CMatrix,
        whole: CMatrix,
        tol: f64,
        depth: u32,
    ) -> CMatrix {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, &fa, &flm, &fm);
        let right = simpson(m, b, &fm, &frm, &fb);
        let refined = &left + &right;
        if depth == 0 || (&refined - &whole).norm() <= 15.0 * tol {
            let correction = (&refined - whole) * C64::new(1.0 / 15.0, 0.0);
            return refined + correction;
        }
        adaptive(f, a, m, fa, flm, fm.clone(), left, tol * 0.5, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)
    }
    let fa = f(0.0);
    let fm = f(0.5 * s_max);
    let fb = f(s_max);
    let whole = simpson(0.0, s_max, &fa, &fm, &fb);
    let integral = adaptive(&f, 0.0, s_max, fa, fm, fb, whole, tol, 40);
    integral * C64::new(2.0, 0.0)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn lambda_min(m: &CMatrix) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Random fermionic spec with a controlled damping floor: Wishart channels
/// plus a small ridge on the loss side keeps `lambda_min(A + D)` away from
/// zero so stationarity times stay bounded.
pub fn random_fermion_spec(m: usize, rng: &mut impl Rng) -> SystemSpec {
    let h = sample_goe(m, 1.0, rng);
    let a = sample_wishart_channel(m, m, 2 * m, rng);
    let d_base = sample_wishart_channel(m, m + 2, 2 * m, rng);
    let ridge = DMatrix::identity(m, m) * C64::new(0.2, 0.0);
    let d = PsdMatrix::new(d_base.matrix() + ridge).unwrap();
    SystemSpec::fermionic(h, a, d).unwrap()
}

/// Random stable bosonic spec: `D = A + margin` with a ridged Wishart
/// margin.
pub fn random_boson_spec(m: usize, rng: &mut impl Rng) -> SystemSpec {
    let h = sample_goe(m, 1.0, rng);
    let a = sample_wishart_channel(m, m, 3 * m, rng);
    let margin = sample_wishart_channel(m, m, 2 * m, rng);
    let ridge = DMatrix::identity(m, m) * C64::new(0.3, 0.0);
    let d = PsdMatrix::new(a.matrix() + margin.matrix() + ridge).unwrap();
    SystemSpec::bosonic(h, a, d).unwrap()
}

/// Random fermionic covariance: convex mixture of rank-one projectors has
/// spectrum inside the Pauli window by construction.
pub fn random_fermion_covariance(m: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let mut q = CMatrix::zeros(m, m);
    for _ in 0..m {
        let mut v = CMatrix::from_fn(m, 1, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let norm = v.norm();
        v /= C64::new(norm, 0.0);
        let weight: f64 = rng.gen_range(0.0..1.0 / m as f64);
        q += (&v * v.adjoint()) * C64::new(weight, 0.0);
    }
    HermitianMatrix::symmetrized(q)
}

/// Upper critical value of the chi-square distribution at significance
/// 0.01, frozen from an independent quantile computation.
pub const CHI2_CRIT_099_DOF63: f64 = 92.01002361413214;
