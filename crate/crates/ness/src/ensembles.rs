//! Deterministic, seedable random-matrix ensembles: GOE Hamiltonians,
//! Wishart channel matrices, Haar unitaries, and the designed-system
//! constructor built from a random symmetry.
//!
//! All samplers take an explicit RNG handle; there is no global RNG state.
//! Reproducible parallel sweeps use one ChaCha stream per realization
//! (`ChaCha8Rng::seed_from_u64(seed)` + `set_stream(index)`), so the draw
//! for realization `i` never depends on how many realizations run or on the
//! thread count. Identical seeds give bit-identical matrices on one
//! platform; across platforms the usual caveat applies that libm
//! transcendentals (used inside the Gaussian sampler) may differ in the last
//! ulp.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{unitary_eigenpairs, CMatrix, HermitianMatrix, PsdMatrix, C64};
use crate::system::{Statistics, SystemSpec};
use crate::tolerances::ToleranceConfig;

/// Which reading of the GOE entry distribution to use.
///
/// The standard convention takes the entry *variance* proportional to
/// `1/m`, giving spectral radius `~ 2v`; the alternative reads the scale as
/// a standard deviation with the `(1 + delta_ij)` factor on it. Both leave
/// every current bound invariant (sweeps merely rescale the effective
/// coherent strength).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoeConvention {
    /// `Var[H_ij] = (1 + delta_ij) v^2 / m` (default; spectral radius ~ 2v).
    #[default]
    Variance,
    /// `Std[H_ij] = (1 + delta_ij) v / sqrt(m)`.
    StdDev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Goe,
    Wishart,
    Haar,
    Designed,
}

/// Parameters and seed for sampling a random system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    /// Mode count.
    pub m: usize,
    /// GOE coupling scale.
    pub v: f64,
    /// Number of pump (absorption) channels.
    pub m_a: usize,
    /// Number of loss (dissipation) channels.
    pub m_d: usize,
    /// Channel count of the Wishart damping factor in bosonic sweeps
    /// (takes the role `m_d` plays for fermions).
    pub m_p: usize,
    pub seed: u64,
    pub kind: EnsembleKind,
    #[serde(default)]
    pub goe_convention: GoeConvention,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.m_a < 1 || self.m_d < 1 || self.m_p < 1 {
            return Err(Error::Config("ensemble counts must all be at least 1".into()));
        }
        if self.v <= 0.0 {
            return Err(Error::Config(format!("GOE scale v must be positive, got {}", self.v)));
        }
        Ok(())
    }

    /// RNG for one realization: stream `index` of the configured seed.
    pub fn realization_rng(&self, index: u64) -> ChaCha8Rng {
        substream_rng(self.seed, index)
    }
}

/// ChaCha stream `index` of `seed`.
pub fn substream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Real symmetric GOE matrix with coupling scale `v` under the given
/// convention.
pub fn sample_goe_with_convention(
    m: usize,
    v: f64,
    convention: GoeConvention,
    rng: &mut impl Rng,
) -> HermitianMatrix {
    assert!(m >= 1 && v > 0.0);
    let mut h = CMatrix::zeros(m, m);
    let inv_sqrt_m = 1.0 / (m as f64).sqrt();
    for i in 0..m {
        for j in i..m {
            let z: f64 = StandardNormal.sample(rng);
            let sd = match convention {
                GoeConvention::Variance => {
                    if i == j {
                        v * std::f64::consts::SQRT_2 * inv_sqrt_m
                    } else {
                        v * inv_sqrt_m
                    }
                }
                GoeConvention::StdDev => {
                    if i == j {
                        2.0 * v * inv_sqrt_m
                    } else {
                        v * inv_sqrt_m
                    }
                }
            };
            h[(i, j)] = C64::new(z * sd, 0.0);
            h[(j, i)] = h[(i, j)];
        }
    }
    HermitianMatrix::symmetrized(h)
}

/// GOE sample under the default (variance) convention.
pub fn sample_goe(m: usize, v: f64, rng: &mut impl Rng) -> HermitianMatrix {
    sample_goe_with_convention(m, v, GoeConvention::Variance, rng)
}

/// Wishart channel matrix `W^T W / normalizer` with `W` an `m_ch x m`
/// matrix of independent standard normals. PSD by construction with rank
/// `min(m_ch, m)` almost surely.
pub fn sample_wishart_channel(
    m: usize,
    m_ch: usize,
    normalizer: usize,
    rng: &mut impl Rng,
) -> PsdMatrix {
    assert!(m >= 1 && m_ch >= 1 && normalizer >= 1);
    let mut w = DMatrix::<f64>::zeros(m_ch, m);
    for i in 0..m_ch {
        for j in 0..m {
            w[(i, j)] = StandardNormal.sample(rng);
        }
    }
    let gram = (w.transpose() * w) / normalizer as f64;
    PsdMatrix::new(gram.map(|x| C64::new(x, 0.0)))
        .expect("Gram matrix is PSD by construction")
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// phases of R's diagonal absorbed into Q (the standard unbiased
/// construction).
pub fn sample_haar_unitary(m: usize, rng: &mut impl Rng) -> CMatrix {
    assert!(m >= 1);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(m, m, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * inv_sqrt2, im * inv_sqrt2)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut u = qr.q();
    for j in 0..m {
        let d = r[(j, j)];
        let modulus = d.norm();
        // Ginibre columns are linearly independent almost surely; guard the
        // measure-zero event anyway.
        let phase = if modulus > 0.0 { d / modulus } else { C64::new(1.0, 0.0) };
        for i in 0..m {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// A system built from a random symmetry: `H` lives in the eigenbasis of a
/// Haar unitary `U`, energies are uniform, and the loss channel is the
/// symmetry image `D = U^H A U` of the Wishart pump channel.
#[derive(Debug, Clone)]
pub struct DesignedSystem {
    pub spec: SystemSpec,
    /// The symmetry operator used for the construction.
    pub symmetry: CMatrix,
    /// Energies assigned to the symmetry eigenbasis, in basis order.
    pub energies: Vec<f64>,
    /// Frobenius norm of `[H, U]` for the constructed pair.
    pub commutator_norm: f64,
}

/// Designed system around a *given* pump channel `A`: sample a Haar
/// symmetry `U` and uniform energies, build `H` in `U`'s eigenbasis and set
/// `D = U^H A U`. Draws whose energies or symmetry eigenphases collide
/// within tolerance are rejected and resampled.
pub fn designed_from_channel(
    a: &PsdMatrix,
    energy_halfwidth: f64,
    rng: &mut impl Rng,
) -> Result<DesignedSystem> {
    assert!(energy_halfwidth > 0.0);
    let m = a.dim();
    let tol = ToleranceConfig::default();
    let degeneracy_tol = tol.degeneracy_factor * (2.0 * energy_halfwidth).max(1.0);
    const MAX_ATTEMPTS: usize = 64;
    for _ in 0..MAX_ATTEMPTS {
        let u = sample_haar_unitary(m, rng);
        let (phases, basis) = unitary_eigenpairs(&u, tol.unitarity)?;
        let energies: Vec<f64> =
            (0..m).map(|_| rng.gen_range(-energy_halfwidth..energy_halfwidth)).collect();
        if m > 1 {
            let mut sorted = energies.clone();
            sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let energy_collision =
                sorted.windows(2).any(|w| w[1] - w[0] <= degeneracy_tol);
            let mut sorted_phases = phases.clone();
            sorted_phases.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let phase_gap_wrap = sorted_phases[0] + std::f64::consts::TAU
                - sorted_phases[sorted_phases.len() - 1];
            let phase_collision = sorted_phases.windows(2).any(|w| w[1] - w[0] <= 1e-12)
                || phase_gap_wrap <= 1e-12;
            if energy_collision || phase_collision {
                continue;
            }
        }
        let diag = CMatrix::from_diagonal(&DVector::from_iterator(
            m,
            energies.iter().map(|e| C64::new(*e, 0.0)),
        ));
        let h = HermitianMatrix::symmetrized(&basis * diag * basis.adjoint());
        let d = PsdMatrix::new(u.adjoint() * a.matrix() * &u)?;
        let commutator_norm = (h.matrix() * &u - &u * h.matrix()).norm();
        let spec = SystemSpec::new(h, a.clone(), d, Statistics::Fermion)?;
        return Ok(DesignedSystem { spec, symmetry: u, energies, commutator_norm });
    }
    Err(Error::ConvergenceFailed("designed-system sampling (persistent spectral collisions)"))
}

/// Build a designed system of `m` modes with `m_a` pump channels and
/// energies uniform on `[-energy_halfwidth, energy_halfwidth]`.
///
/// The pump channel is normalised by `2 m_a` so that the mean eigenvalue of
/// the total damping `A + D` is close to 1, keeping the unit coherent scale
/// comparable to the incoherent rates.
pub fn build_designed_system(
    m: usize,
    m_a: usize,
    energy_halfwidth: f64,
    rng: &mut impl Rng,
) -> Result<DesignedSystem> {
    assert!(m >= 1 && m_a >= 1);
    let a = sample_wishart_channel(m, m_a, 2 * m_a, rng);
    designed_from_channel(&a, energy_halfwidth, rng)
}
