//! System specifications and covariance states.
//!
//! A [`SystemSpec`] bundles the single-particle Hamiltonian `H`, the pump
//! (absorption) matrix `A`, the loss (dissipation) matrix `D` and the
//! particle statistics. All physics of the non-interacting open system lives
//! at the level of the `m x m` covariance matrix `Q` of single-particle
//! expectations; fermionic covariances obey the Pauli window `0 <= Q <= 1`,
//! bosonic ones only `Q >= 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix, PsdMatrix, EIG_MAX_ITER};
use crate::tolerances::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Fermion,
    Boson,
}

impl Statistics {
    pub fn name(&self) -> &'static str {
        match self {
            Statistics::Fermion => "fermion",
            Statistics::Boson => "boson",
        }
    }
}

/// Full input to a steady-state computation.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    h: HermitianMatrix,
    a: PsdMatrix,
    d: PsdMatrix,
    statistics: Statistics,
}

impl SystemSpec {
    pub fn new(
        h: HermitianMatrix,
        a: PsdMatrix,
        d: PsdMatrix,
        statistics: Statistics,
    ) -> Result<Self> {
        let m = h.dim();
        if a.dim() != m {
            return Err(Error::DimensionMismatch { expected: m, found: a.dim() }.for_matrix("A"));
        }
        if d.dim() != m {
            return Err(Error::DimensionMismatch { expected: m, found: d.dim() }.for_matrix("D"));
        }
        Ok(Self { h, a, d, statistics })
    }

    pub fn fermionic(h: HermitianMatrix, a: PsdMatrix, d: PsdMatrix) -> Result<Self> {
        Self::new(h, a, d, Statistics::Fermion)
    }

    pub fn bosonic(h: HermitianMatrix, a: PsdMatrix, d: PsdMatrix) -> Result<Self> {
        Self::new(h, a, d, Statistics::Boson)
    }

    /// Mode count.
    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn hamiltonian(&self) -> &HermitianMatrix {
        &self.h
    }

    pub fn absorption(&self) -> &PsdMatrix {
        &self.a
    }

    pub fn dissipation(&self) -> &PsdMatrix {
        &self.d
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    /// Total damping matrix: `A + D` for fermions.
    ///
    /// For bosons the damping is `D - A` and is only defined when stable; see
    /// [`crate::boson::check_stability`].
    pub fn fermionic_damping(&self) -> Result<PsdMatrix> {
        PsdMatrix::new(self.a.matrix() + self.d.matrix())
    }

    /// Same system with the Hamiltonian scaled by `lambda >= 0`.
    pub fn with_hamiltonian_scaled(&self, lambda: f64) -> Self {
        Self {
            h: self.h.scale(lambda),
            a: self.a.clone(),
            d: self.d.clone(),
            statistics: self.statistics,
        }
    }

    /// Same system with both channel matrices scaled by `gamma > 0`.
    pub fn with_rates_scaled(&self, gamma: f64) -> Self {
        Self {
            h: self.h.clone(),
            a: self.a.scale(gamma),
            d: self.d.scale(gamma),
            statistics: self.statistics,
        }
    }

    pub(crate) fn require_statistics(&self, expected: Statistics) -> Result<()> {
        if self.statistics != expected {
            return Err(Error::StatisticsMismatch {
                expected: expected.name(),
                found: self.statistics.name(),
            });
        }
        Ok(())
    }
}

/// A validated covariance matrix together with its spectral range.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    q: HermitianMatrix,
    eig_min: f64,
    eig_max: f64,
}

impl CovarianceMatrix {
    /// Validate a fermionic covariance: eigenvalues within
    /// `[-slack, 1 + slack]`.
    pub fn fermionic(q: HermitianMatrix, slack: f64) -> Result<Self> {
        let (eig_min, eig_max) = spectral_range(q.matrix())?;
        if eig_min < -slack || eig_max > 1.0 + slack {
            return Err(Error::CovarianceOutOfRange { eig_min, eig_max });
        }
        Ok(Self { q, eig_min, eig_max })
    }

    /// Validate a bosonic covariance: eigenvalues bounded below by `-slack`,
    /// no upper cap (bosons pile up).
    pub fn bosonic(q: HermitianMatrix, slack: f64) -> Result<Self> {
        let (eig_min, eig_max) = spectral_range(q.matrix())?;
        if eig_min < -slack {
            return Err(Error::CovarianceOutOfRange { eig_min, eig_max });
        }
        Ok(Self { q, eig_min, eig_max })
    }

    /// Validate against the window implied by the statistics, using the
    /// configured covariance slack.
    pub fn for_statistics(
        q: HermitianMatrix,
        statistics: Statistics,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        match statistics {
            Statistics::Fermion => Self::fermionic(q, tol.covariance),
            Statistics::Boson => Self::bosonic(q, tol.covariance),
        }
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.q.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.q
    }

    /// Expected total particle number `tr Q`.
    pub fn particle_number(&self) -> f64 {
        self.q.trace()
    }

    pub fn eig_min(&self) -> f64 {
        self.eig_min
    }

    pub fn eig_max(&self) -> f64 {
        self.eig_max
    }
}

fn spectral_range(m: &CMatrix) -> Result<(f64, f64)> {
    let se = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITER)
        .ok_or(Error::ConvergenceFailed("Hermitian eigendecomposition"))?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for e in se.eigenvalues.iter() {
        lo = lo.min(*e);
        hi = hi.max(*e);
    }
    Ok((lo, hi))
}

/// Steady-state summary: the covariance plus the derived scalars.
///
/// For fermions `j_bound` is the universal upper bound and `ratio = j /
/// j_bound <= 1`; for bosons `j_bound` is the universal lower bound and
/// `ratio >= 1`.
#[derive(Debug, Clone)]
pub struct NessReport {
    pub q_ness: CovarianceMatrix,
    pub j: f64,
    pub j_bound: f64,
    pub ratio: f64,
    pub balance_residual: f64,
    pub particle_number: f64,
}
