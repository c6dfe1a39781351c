//! Validated dense complex matrix types.
//!
//! [`HermitianMatrix`] and [`PsdMatrix`] are the building blocks for every
//! system specification: Hamiltonians are Hermitian, pump and loss channel
//! matrices are positive semi-definite. Validation happens once at
//! construction; all downstream code can rely on the invariants.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::ToleranceConfig;

pub type C64 = num_complex::Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Maximum iterations handed to nalgebra's iterative eigen/Schur routines.
pub(crate) const EIG_MAX_ITER: usize = 100_000;

/// Largest absolute entry of a matrix, used as the relative scale in
/// validation checks. Returns 1.0 for the zero matrix so absolute and
/// relative tolerances coincide there.
pub(crate) fn entry_scale(m: &CMatrix) -> f64 {
    let s = m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// A square complex matrix validated to be Hermitian.
///
/// Asymmetry up to `tol * max|entry|` is repaired by replacing the matrix
/// with `(M + M^H) / 2`; larger asymmetry is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: CMatrix,
}

impl HermitianMatrix {
    /// Validate `raw` as Hermitian using the default tolerance.
    pub fn new(raw: CMatrix) -> Result<Self> {
        Self::with_tolerance(raw, ToleranceConfig::default().hermiticity)
    }

    /// Validate `raw` as Hermitian, accepting relative asymmetry up to `tol`.
    pub fn with_tolerance(raw: CMatrix, tol: f64) -> Result<Self> {
        if raw.nrows() != raw.ncols() {
            return Err(Error::NotSquare { rows: raw.nrows(), cols: raw.ncols() });
        }
        if raw.nrows() == 0 {
            return Err(Error::InvalidSpec("matrix dimension must be at least 1".into()));
        }
        let scale = entry_scale(&raw);
        let mut asym = 0.0f64;
        for i in 0..raw.nrows() {
            for j in i..raw.ncols() {
                let d = (raw[(i, j)] - raw[(j, i)].conj()).norm();
                asym = asym.max(d);
            }
        }
        let rel = asym / scale;
        if rel > tol {
            return Err(Error::NotHermitian { asymmetry: rel, tolerance: tol });
        }
        Ok(Self::symmetrized(raw))
    }

    /// Wrap a matrix that is Hermitian up to floating-point drift,
    /// symmetrising unconditionally. Useful at the end of computations that
    /// are Hermitian by construction.
    pub fn symmetrized(raw: CMatrix) -> Self {
        let adj = raw.adjoint();
        let mut m = (raw + adj) * C64::new(0.5, 0.0);
        // force exactly real diagonal
        for i in 0..m.nrows() {
            m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        }
        Self { entries: m }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// Real trace.
    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { entries: &self.entries * C64::new(factor, 0.0) }
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let se = self
            .entries
            .clone()
            .try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITER)
            .ok_or(Error::ConvergenceFailed("Hermitian eigendecomposition"))?;
        let mut ev: Vec<f64> = se.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(ev)
    }
}

/// A Hermitian matrix validated to be positive semi-definite.
///
/// Eigenvalues in `[-tol * scale, 0)` with `scale = max(1, |lambda|_max)` are
/// clipped to zero and the matrix is rebuilt from the clipped spectrum, so
/// the stored entries are PSD exactly (up to the reconstruction round-off).
#[derive(Debug, Clone, PartialEq)]
pub struct PsdMatrix {
    entries: CMatrix,
    eig_min: f64,
    eig_max: f64,
}

impl PsdMatrix {
    pub fn new(raw: CMatrix) -> Result<Self> {
        let tol = ToleranceConfig::default();
        Self::with_tolerance(raw, tol.hermiticity, tol.psd)
    }

    pub fn with_tolerance(raw: CMatrix, hermiticity_tol: f64, psd_tol: f64) -> Result<Self> {
        let herm = HermitianMatrix::with_tolerance(raw, hermiticity_tol)?;
        Self::from_hermitian(herm, psd_tol)
    }

    pub fn from_hermitian(herm: HermitianMatrix, psd_tol: f64) -> Result<Self> {
        let m = herm.into_matrix();
        let se = m
            .clone()
            .try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITER)
            .ok_or(Error::ConvergenceFailed("Hermitian eigendecomposition"))?;
        let abs_max = se.eigenvalues.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
        let scale = abs_max.max(1.0);
        let floor = -psd_tol * scale;
        let mut eigs: Vec<f64> = se.eigenvalues.iter().copied().collect();
        let mut clipped = false;
        for e in eigs.iter_mut() {
            if *e < floor {
                return Err(Error::NotPsd { eigenvalue: *e, tolerance: psd_tol * scale });
            }
            if *e < 0.0 {
                *e = 0.0;
                clipped = true;
            }
        }
        let entries = if clipped {
            let v = &se.eigenvectors;
            let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                eigs.len(),
                eigs.iter().map(|e| C64::new(*e, 0.0)),
            ));
            HermitianMatrix::symmetrized(v * d * v.adjoint()).into_matrix()
        } else {
            m
        };
        let eig_min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        let eig_max = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { entries, eig_min, eig_max })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    /// Real trace (non-negative for a PSD matrix).
    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Smallest eigenvalue found at validation time (after clipping).
    pub fn eig_min(&self) -> f64 {
        self.eig_min
    }

    /// Largest eigenvalue found at validation time.
    pub fn eig_max(&self) -> f64 {
        self.eig_max
    }

    /// Whether the matrix passes the strict-positivity gate
    /// `lambda_min > tol * max(1, lambda_max)` required by the fixed-point
    /// solver.
    pub fn is_strictly_positive(&self, strict_tol: f64) -> bool {
        self.eig_min > strict_tol * self.eig_max.max(1.0)
    }

    /// Scale by a non-negative factor (positivity is preserved).
    pub fn scale(&self, factor: f64) -> Self {
        debug_assert!(factor >= 0.0);
        Self {
            entries: &self.entries * C64::new(factor, 0.0),
            eig_min: self.eig_min * factor,
            eig_max: self.eig_max * factor,
        }
    }

    pub fn as_hermitian(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrized(self.entries.clone())
    }
}

/// Spectral decomposition of a Hermitian matrix with eigenvalue clusters
/// merged into joint eigenspaces.
///
/// Eigenvalues closer than `degeneracy_tol` (chained: a run of eigenvalues
/// with consecutive gaps below the tolerance forms one cluster) are treated
/// as one eigenspace; its reported eigenvalue is the cluster mean.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<CMatrix>,
    multiplicities: Vec<usize>,
    /// Orthonormal eigenbasis, columns grouped by cluster.
    basis: CMatrix,
    /// Start offset of each cluster's column block in `basis`.
    offsets: Vec<usize>,
}

impl SpectralDecomposition {
    /// Decompose `h`, merging eigenvalues within `degeneracy_tol` of each
    /// other.
    pub fn compute(h: &HermitianMatrix, degeneracy_tol: f64) -> Result<Self> {
        assert!(degeneracy_tol > 0.0, "degeneracy tolerance must be positive");
        let m = h.dim();
        let se = h
            .matrix()
            .clone()
            .try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITER)
            .ok_or(Error::ConvergenceFailed("Hermitian eigendecomposition"))?;

        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
        let sorted_vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let mut basis = CMatrix::zeros(m, m);
        for (col, &i) in order.iter().enumerate() {
            basis.set_column(col, &se.eigenvectors.column(i));
        }

        let mut eigenvalues = Vec::new();
        let mut projectors = Vec::new();
        let mut multiplicities = Vec::new();
        let mut offsets = Vec::new();

        let mut start = 0usize;
        while start < m {
            let mut end = start + 1;
            while end < m && sorted_vals[end] - sorted_vals[end - 1] <= degeneracy_tol {
                end += 1;
            }
            let block = basis.columns(start, end - start);
            let proj = block * block.adjoint();
            let mean = sorted_vals[start..end].iter().sum::<f64>() / (end - start) as f64;
            eigenvalues.push(mean);
            projectors.push(HermitianMatrix::symmetrized(proj).into_matrix());
            multiplicities.push(end - start);
            offsets.push(start);
            start = end;
        }

        Ok(Self { eigenvalues, projectors, multiplicities, basis, offsets })
    }

    /// Default clustering tolerance for a given spectrum: `factor` times the
    /// spectral range, floored at `factor` itself for flat spectra.
    pub fn default_tolerance(h: &HermitianMatrix, factor: f64) -> Result<f64> {
        let ev = h.eigenvalues()?;
        let range = ev.last().unwrap() - ev.first().unwrap();
        Ok(factor * range.max(1.0))
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn n_clusters(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Orthonormal basis of the `k`-th eigenspace as an `m x multiplicity`
    /// column block.
    pub fn eigenspace_basis(&self, k: usize) -> nalgebra::DMatrixView<'_, C64> {
        self.basis.columns(self.offsets[k], self.multiplicities[k])
    }

    /// Rebuild `sum_k E_k R_k`.
    pub fn reconstruct(&self) -> CMatrix {
        let m = self.basis.nrows();
        let mut acc = CMatrix::zeros(m, m);
        for (e, r) in self.eigenvalues.iter().zip(self.projectors.iter()) {
            acc += r * C64::new(*e, 0.0);
        }
        acc
    }
}

/// Eigenphases and an orthonormal eigenbasis of a unitary matrix.
///
/// A unitary matrix is normal, so its complex Schur form is diagonal and the
/// Schur vectors are an orthonormal eigenbasis. Phases are reported in
/// `[0, 2*pi)`.
pub fn unitary_eigenpairs(u: &CMatrix, unitarity_tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    if u.nrows() != u.ncols() {
        return Err(Error::NotSquare { rows: u.nrows(), cols: u.ncols() });
    }
    let m = u.nrows();
    let dev = (u.adjoint() * u - CMatrix::identity(m, m))
        .iter()
        .fold(0.0f64, |acc, z| acc.max(z.norm()));
    if dev > unitarity_tol {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let schur = u
        .clone()
        .try_schur(f64::EPSILON, EIG_MAX_ITER)
        .ok_or(Error::ConvergenceFailed("Schur decomposition"))?;
    let (q, t) = schur.unpack();
    let mut phases = Vec::with_capacity(m);
    for i in 0..m {
        let mut theta = t[(i, i)].arg();
        if theta < 0.0 {
            theta += std::f64::consts::TAU;
        }
        phases.push(theta);
    }
    Ok((phases, q))
}

/// Eigenphases of a unitary matrix in `[0, 2*pi)`.
pub fn eigenphases(u: &CMatrix, unitarity_tol: f64) -> Result<Vec<f64>> {
    unitary_eigenpairs(u, unitarity_tol).map(|(p, _)| p)
}

/// Serde representation of a complex matrix as separate real and imaginary
/// parts; either part may be omitted (purely real or purely imaginary
/// matrices), but not both.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixData {
    fn part_shape(part: &[Vec<f64>]) -> Result<(usize, usize)> {
        let rows = part.len();
        if rows == 0 {
            return Err(Error::InvalidSpec("matrix data must have at least one row".into()));
        }
        let cols = part[0].len();
        if part.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidSpec("ragged rows in matrix data".into()));
        }
        Ok((rows, cols))
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let shape = match (&self.re, &self.im) {
            (Some(re), _) => Self::part_shape(re)?,
            (None, Some(im)) => Self::part_shape(im)?,
            (None, None) => {
                return Err(Error::InvalidSpec(
                    "matrix data needs a real or imaginary part".into(),
                ))
            }
        };
        if let Some(im) = &self.im {
            if Self::part_shape(im)? != shape {
                return Err(Error::InvalidSpec(
                    "imaginary part shape differs from real part".into(),
                ));
            }
        }
        Ok(CMatrix::from_fn(shape.0, shape.1, |i, j| {
            let re = self.re.as_ref().map_or(0.0, |m| m[i][j]);
            let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
            C64::new(re, im)
        }))
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        let re = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
            .collect();
        let any_im = m.iter().any(|z| z.im != 0.0);
        let im = if any_im {
            Some(
                (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
                    .collect(),
            )
        } else {
            None
        };
        Self { re: Some(re), im }
    }
}
