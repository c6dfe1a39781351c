//! Dominantly coherent limit: the current at infinite Hamiltonian scale and
//! the symmetry design that saturates the fermionic bound there.
//!
//! As the coherent scale grows, rapidly oscillating cross terms between
//! different eigenspaces of `H` average out, and only blocks diagonal with
//! respect to the spectral projectors `R_k` of `H` survive:
//!
//! ```text
//! J_inf = sum_k 4 int_0^inf tr{ D R_k e^{-s R_k P R_k} A e^{-s R_k P R_k} R_k } ds
//! ```
//!
//! Each term is evaluated by compressing `P`, `A`, `D` to an orthonormal
//! basis of the `k`-th eigenspace and solving the damped fixed point there
//! with a vanishing Hamiltonian block, which avoids the singular full-space
//! equation.
//!
//! A system designed around a unitary symmetry `U` commuting with a
//! non-degenerate `H` and mapping the pump into the loss channel,
//! `D = U^H A U`, saturates the bound in this limit: `J_inf = tr A = J_max`.

use crate::error::{Error, Result};
use crate::fermion::current_bound_fermion;
use crate::linalg::{
    solve_lyapunov_raw, unitary_eigenpairs, CMatrix, HermitianMatrix, PsdMatrix,
    SpectralDecomposition, C64,
};
use crate::system::{Statistics, SystemSpec};
use crate::tolerances::ToleranceConfig;

/// Stationary current in the limit of infinitely fast coherent dynamics.
///
/// Eigenvalues of `H` within `degeneracy_tol` of each other are merged into
/// one eigenspace before the projector formula is evaluated.
pub fn current_infinite_lambda(
    spec: &SystemSpec,
    degeneracy_tol: f64,
    tol: &ToleranceConfig,
) -> Result<f64> {
    spec.require_statistics(Statistics::Fermion)?;
    let p = spec.fermionic_damping()?;
    if !p.is_strictly_positive(tol.strict_positivity) {
        return Err(Error::SingularGenerator { lambda_min: p.eig_min() });
    }
    let decomposition = SpectralDecomposition::compute(spec.hamiltonian(), degeneracy_tol)?;
    let mut j_inf = 0.0;
    for k in 0..decomposition.n_clusters() {
        let basis = decomposition.eigenspace_basis(k);
        let p_k = basis.adjoint() * p.matrix() * basis;
        let a_k = basis.adjoint() * spec.absorption().matrix() * basis;
        let d_k = basis.adjoint() * spec.dissipation().matrix() * basis;
        // The compression of a strictly positive matrix stays strictly
        // positive, so the restricted solve is well posed; the guard below
        // catches pathological round-off anyway.
        let x_k = match decomposition.multiplicities()[k] {
            1 => {
                let p_val = p_k[(0, 0)].re;
                if p_val <= tol.strict_positivity {
                    return Err(Error::SingularGenerator { lambda_min: p_val });
                }
                CMatrix::from_element(1, 1, a_k[(0, 0)] / p_k[(0, 0)])
            }
            _ => {
                let rhs = &a_k * C64::new(2.0, 0.0);
                solve_lyapunov_raw(&p_k, &rhs, tol.solver_residual)?
            }
        };
        j_inf += 2.0 * (d_k * x_k).trace().re;
    }
    Ok(j_inf)
}

/// Outcome of checking a designed system against the saturation prediction.
#[derive(Debug, Clone, Copy)]
pub struct DesignSaturationReport {
    /// Current in the dominantly coherent limit.
    pub j_inf: f64,
    /// Universal bound, which equals `tr A` for a designed system.
    pub j_max: f64,
    /// Frobenius norm of `[H, U]` for the constructed Hamiltonian.
    pub commutator_norm: f64,
    /// `j_inf / j_max`; equals 1 up to round-off when the design hypotheses
    /// hold.
    pub ratio: f64,
}

/// Build the designed system implied by a symmetry `U` and pump channel `A`
/// (`H` from `U`'s eigenbasis with the supplied energies, `D = U^H A U`) and
/// evaluate its dominantly coherent current against the bound.
///
/// The energies must be pairwise distinct beyond `degeneracy_tol`; the
/// saturation statement holds only for a non-degenerate Hamiltonian.
pub fn verify_design_saturation(
    u: &CMatrix,
    a: &PsdMatrix,
    energies: &[f64],
    degeneracy_tol: f64,
    tol: &ToleranceConfig,
) -> Result<DesignSaturationReport> {
    let m = a.dim();
    if u.nrows() != m || u.ncols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: u.nrows() });
    }
    if energies.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: energies.len() });
    }
    let mut sorted = energies.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for pair in sorted.windows(2) {
        if pair[1] - pair[0] <= degeneracy_tol {
            return Err(Error::DegenerateSpectrum {
                first: pair[0],
                second: pair[1],
                tolerance: degeneracy_tol,
            });
        }
    }
    let (_phases, basis) = unitary_eigenpairs(u, tol.unitarity)?;
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        m,
        energies.iter().map(|e| C64::new(*e, 0.0)),
    ));
    let h = HermitianMatrix::symmetrized(&basis * diag * basis.adjoint());
    let d = PsdMatrix::new(u.adjoint() * a.matrix() * u)?;
    let commutator_norm = (h.matrix() * u - u * h.matrix()).norm();
    let spec = SystemSpec::fermionic(h, a.clone(), d)?;
    let j_inf = current_infinite_lambda(&spec, degeneracy_tol, tol)?;
    let j_max = current_bound_fermion(spec.absorption(), spec.dissipation())?;
    Ok(DesignSaturationReport { j_inf, j_max, commutator_norm, ratio: j_inf / j_max })
}
