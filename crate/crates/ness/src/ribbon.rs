//! Shift-invariant quantum ribbon: a quasi-1D lattice, infinite along one
//! axis with finite transverse width `d`.
//!
//! Translation-invariant operators are multiplication operators in momentum
//! space, so a finite-range tight-binding model is described by matrix-valued
//! symbols on `[0, 2*pi)`:
//!
//! ```text
//! X_hat(x) = sum_r T_r e^{i r x},    T_{-r} = T_r^H
//! ```
//!
//! The steady state decouples per momentum node, currents become densities
//! per site, and the universal fermionic bound integrates to a bound on the
//! current density. Quadrature uses the uniform periodic grid, which is
//! exact for trigonometric polynomials of degree below the node count and
//! spectrally accurate for the analytic per-node steady state.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion;
use crate::linalg::{CMatrix, HermitianMatrix, MatrixData, PsdMatrix, C64};
use crate::system::{CovarianceMatrix, SystemSpec};
use crate::tolerances::ToleranceConfig;

/// One hopping matrix `T_r` at lattice offset `r` along the ribbon.
#[derive(Debug, Clone)]
pub struct HoppingTerm {
    pub r: i32,
    pub t: CMatrix,
}

/// A finite-range, shift-invariant ribbon model: hopping coefficients for
/// the Hamiltonian, pump and loss symbols plus the quadrature grid size.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RibbonSpecData", into = "RibbonSpecData")]
pub struct RibbonSpec {
    d: usize,
    hoppings_h: Vec<HoppingTerm>,
    hoppings_a: Vec<HoppingTerm>,
    hoppings_d: Vec<HoppingTerm>,
    n_k: usize,
}

impl RibbonSpec {
    pub const DEFAULT_NODES: usize = 128;

    pub fn new(
        d: usize,
        hoppings_h: Vec<HoppingTerm>,
        hoppings_a: Vec<HoppingTerm>,
        hoppings_d: Vec<HoppingTerm>,
        n_k: usize,
    ) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidSpec("ribbon width d must be at least 1".into()));
        }
        if n_k < 4 || !n_k.is_multiple_of(2) {
            return Err(Error::InvalidSpec(format!(
                "quadrature grid size must be even and at least 4, got {n_k}"
            )));
        }
        validate_hoppings(&hoppings_h, d, "H")?;
        validate_hoppings(&hoppings_a, d, "A")?;
        validate_hoppings(&hoppings_d, d, "D")?;
        Ok(Self { d, hoppings_h, hoppings_a, hoppings_d, n_k })
    }

    pub fn width(&self) -> usize {
        self.d
    }

    pub fn n_nodes(&self) -> usize {
        self.n_k
    }

    /// Same model on a grid of `n_k` nodes.
    pub fn with_nodes(&self, n_k: usize) -> Result<Self> {
        Self::new(
            self.d,
            self.hoppings_h.clone(),
            self.hoppings_a.clone(),
            self.hoppings_d.clone(),
            n_k,
        )
    }

    /// Quadrature nodes `x_j = 2 pi j / n_k`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_k).map(|j| std::f64::consts::TAU * j as f64 / self.n_k as f64).collect()
    }
}

fn validate_hoppings(hoppings: &[HoppingTerm], d: usize, name: &str) -> Result<()> {
    let mut by_offset: BTreeMap<i32, &CMatrix> = BTreeMap::new();
    for term in hoppings {
        if term.t.nrows() != d || term.t.ncols() != d {
            return Err(Error::InvalidSpec(format!(
                "hopping {name}[r={}] must be {d}x{d}, got {}x{}",
                term.r,
                term.t.nrows(),
                term.t.ncols()
            )));
        }
        if by_offset.insert(term.r, &term.t).is_some() {
            return Err(Error::InvalidSpec(format!(
                "duplicate hopping offset r={} in {name}",
                term.r
            )));
        }
    }
    // The symbol is Hermitian for every momentum iff T_{-r} = T_r^H.
    let scale = hoppings
        .iter()
        .flat_map(|t| t.t.iter())
        .fold(0.0f64, |acc, z| acc.max(z.norm()))
        .max(1.0);
    for (&r, t) in &by_offset {
        let partner = by_offset.get(&(-r)).ok_or_else(|| {
            Error::InvalidSpec(format!(
                "hopping {name}[r={r}] has no partner at r={} (symbol would not be Hermitian)",
                -r
            ))
        })?;
        let dev = (t.adjoint() - *partner).norm();
        if dev > 1e-12 * scale {
            return Err(Error::InvalidSpec(format!(
                "hopping {name}[r={}] is not the adjoint of {name}[r={r}] (deviation {dev:.3e})",
                -r
            )));
        }
    }
    Ok(())
}

fn eval_hoppings(hoppings: &[HoppingTerm], d: usize, x: f64) -> CMatrix {
    let mut acc = CMatrix::zeros(d, d);
    for term in hoppings {
        let phase = C64::new(0.0, term.r as f64 * x).exp();
        acc += &term.t * phase;
    }
    acc
}

/// The three symbols of the model evaluated at momentum `x`.
#[derive(Debug, Clone)]
pub struct SymbolPoint {
    pub h: HermitianMatrix,
    pub a: PsdMatrix,
    pub d: PsdMatrix,
}

/// Evaluate and validate the symbols at momentum `x`: the Hamiltonian
/// symbol must be Hermitian (guaranteed by the hopping pairing), the pump
/// and loss symbols must additionally be PSD at this node.
pub fn eval_symbol(spec: &RibbonSpec, x: f64) -> Result<SymbolPoint> {
    let d = spec.d;
    let h = HermitianMatrix::new(eval_hoppings(&spec.hoppings_h, d, x))
        .map_err(|e| e.for_matrix(format!("H_hat({x})")))?;
    let wrap_psd = |raw: CMatrix| -> Result<PsdMatrix> {
        PsdMatrix::new(raw).map_err(|e| match e {
            Error::NotPsd { eigenvalue, .. } => Error::SymbolNotPsd { x, eigenvalue },
            other => other,
        })
    };
    let a = wrap_psd(eval_hoppings(&spec.hoppings_a, d, x))?;
    let dd = wrap_psd(eval_hoppings(&spec.hoppings_d, d, x))?;
    Ok(SymbolPoint { h, a, d: dd })
}

/// Per-momentum fermionic steady state `Q_hat(x)`.
pub fn ribbon_ness_symbol(
    spec: &RibbonSpec,
    x: f64,
    tol: &ToleranceConfig,
) -> Result<CovarianceMatrix> {
    let point = eval_symbol(spec, x)?;
    let system = SystemSpec::fermionic(point.h, point.a, point.d)?;
    fermion::ness_covariance(&system, tol)
        .map_err(|e| e.for_matrix(format!("ribbon node x={x}")))
}

/// A matrix-valued function sampled on the uniform momentum grid.
#[derive(Debug, Clone)]
pub struct SampledSymbol {
    d: usize,
    values: Vec<CMatrix>,
}

impl SampledSymbol {
    pub fn from_values(d: usize, values: Vec<CMatrix>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpec("sampled symbol needs at least one node".into()));
        }
        if values.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::InvalidSpec("sampled symbol values must all be d x d".into()));
        }
        Ok(Self { d, values })
    }

    /// Sample an explicit function on the grid of `spec`.
    pub fn from_fn(spec: &RibbonSpec, f: impl Fn(f64) -> CMatrix) -> Result<Self> {
        Self::from_values(spec.d, spec.nodes().into_iter().map(f).collect())
    }

    /// Sample a hopping expansion on the grid of `spec`.
    pub fn from_hoppings(spec: &RibbonSpec, hoppings: &[HoppingTerm]) -> Result<Self> {
        validate_hoppings(hoppings, spec.d, "X")?;
        Self::from_fn(spec, |x| eval_hoppings(hoppings, spec.d, x))
    }

    pub fn n_nodes(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, node: usize) -> &CMatrix {
        &self.values[node]
    }
}

/// Pairwise (cascade) summation: deterministic, order-fixed reduction with
/// O(log n) error growth, used for every quadrature in this module.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Density of a shift-invariant observable in a shift-invariant state:
/// `(1/2pi) int tr(X_hat(x) Q_hat(x)) dx` by uniform-grid quadrature.
pub fn observable_density(x_symbol: &SampledSymbol, q_symbol: &SampledSymbol) -> Result<f64> {
    if x_symbol.n_nodes() != q_symbol.n_nodes() || x_symbol.d != q_symbol.d {
        return Err(Error::InvalidSpec(
            "sampled symbols must share grid size and width".into(),
        ));
    }
    let terms: Vec<f64> = x_symbol
        .values
        .iter()
        .zip(q_symbol.values.iter())
        .map(|(x, q)| (x * q).trace().re)
        .collect();
    Ok(pairwise_sum(&terms) / terms.len() as f64)
}

/// Steady-state covariance symbol sampled on the full grid. Per-node solves
/// are independent and run in parallel; the node order of the result is
/// fixed by the grid.
pub fn ness_symbol_grid(spec: &RibbonSpec, tol: &ToleranceConfig) -> Result<SampledSymbol> {
    let nodes = spec.nodes();
    let values: Result<Vec<CMatrix>> = nodes
        .par_iter()
        .map(|&x| ribbon_ness_symbol(spec, x, tol).map(|q| q.matrix().clone()))
        .collect();
    SampledSymbol::from_values(spec.d, values?)
}

/// Particles per site `(1/2pi d) int tr Q_hat(x) dx` in `[0, 1]`.
pub fn particle_density(spec: &RibbonSpec, tol: &ToleranceConfig) -> Result<f64> {
    let q = ness_symbol_grid(spec, tol)?;
    let terms: Vec<f64> = q.values.iter().map(|m| m.trace().re).collect();
    Ok(pairwise_sum(&terms) / (terms.len() as f64 * spec.d as f64))
}

/// Per-node diagnostics of a ribbon steady state. `tr_dq` and
/// `tr_a_one_minus_q` are the outflow and inflow traces (undoubled);
/// `local_bound` bounds `tr_dq` from above at this node.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NodeRecord {
    pub x: f64,
    pub tr_dq: f64,
    pub tr_a_one_minus_q: f64,
    pub local_bound: f64,
}

/// Current density, its universal upper bound, the particle density, and
/// per-node diagnostics.
#[derive(Debug, Clone)]
pub struct RibbonReport {
    /// Current per site `(1/pi d) int tr(D_hat Q_hat) dx`.
    pub j_density: f64,
    /// `(1/pi d) int tr A_hat tr D_hat / (tr A_hat + tr D_hat) dx`.
    pub j_density_bound: f64,
    /// Particles per site.
    pub rho: f64,
    pub per_k_records: Vec<NodeRecord>,
}

/// Solve the steady state at every node and integrate the current density
/// and its bound. Fails on the first node whose symbols are invalid or
/// whose damping is singular, naming the node.
pub fn current_density(spec: &RibbonSpec, tol: &ToleranceConfig) -> Result<RibbonReport> {
    let nodes = spec.nodes();
    let per_node: Result<Vec<(NodeRecord, f64)>> = nodes
        .par_iter()
        .map(|&x| {
            let point = eval_symbol(spec, x)?;
            let system = SystemSpec::fermionic(point.h, point.a, point.d)?;
            let q = fermion::ness_covariance(&system, tol)
                .map_err(|e| e.for_matrix(format!("ribbon node x={x}")))?;
            let tr_q = q.particle_number();
            let tr_dq = (system.dissipation().matrix() * q.matrix()).trace().re;
            let one_minus_q = CMatrix::identity(spec.d, spec.d) - q.matrix();
            let tr_a_one_minus_q =
                (system.absorption().matrix() * one_minus_q).trace().re;
            let (tr_a, tr_d) = (system.absorption().trace(), system.dissipation().trace());
            let local_bound =
                if tr_a + tr_d > 0.0 { tr_a * tr_d / (tr_a + tr_d) } else { 0.0 };
            Ok((NodeRecord { x, tr_dq, tr_a_one_minus_q, local_bound }, tr_q))
        })
        .collect();
    let (records, tr_qs): (Vec<NodeRecord>, Vec<f64>) = per_node?.into_iter().unzip();
    let n = records.len() as f64;
    let d = spec.d as f64;
    let outflow: Vec<f64> = records.iter().map(|r| r.tr_dq).collect();
    let bounds: Vec<f64> = records.iter().map(|r| r.local_bound).collect();
    let j_density = 2.0 * pairwise_sum(&outflow) / (n * d);
    let j_density_bound = 2.0 * pairwise_sum(&bounds) / (n * d);
    let rho = pairwise_sum(&tr_qs) / (n * d);
    Ok(RibbonReport { j_density, j_density_bound, rho, per_k_records: records })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HoppingData {
    r: i32,
    #[serde(flatten)]
    matrix: MatrixData,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RibbonSpecData {
    d: usize,
    #[serde(default = "default_nodes")]
    n_k: usize,
    hoppings_h: Vec<HoppingData>,
    hoppings_a: Vec<HoppingData>,
    hoppings_d: Vec<HoppingData>,
}

fn default_nodes() -> usize {
    RibbonSpec::DEFAULT_NODES
}

impl TryFrom<RibbonSpecData> for RibbonSpec {
    type Error = Error;

    fn try_from(data: RibbonSpecData) -> Result<Self> {
        let convert = |entries: Vec<HoppingData>| -> Result<Vec<HoppingTerm>> {
            entries
                .into_iter()
                .map(|e| Ok(HoppingTerm { r: e.r, t: e.matrix.to_matrix()? }))
                .collect()
        };
        RibbonSpec::new(
            data.d,
            convert(data.hoppings_h)?,
            convert(data.hoppings_a)?,
            convert(data.hoppings_d)?,
            data.n_k,
        )
    }
}

impl From<RibbonSpec> for RibbonSpecData {
    fn from(spec: RibbonSpec) -> Self {
        let convert = |entries: &[HoppingTerm]| {
            entries
                .iter()
                .map(|t| HoppingData { r: t.r, matrix: MatrixData::from_matrix(&t.t) })
                .collect()
        };
        RibbonSpecData {
            d: spec.d,
            n_k: spec.n_k,
            hoppings_h: convert(&spec.hoppings_h),
            hoppings_a: convert(&spec.hoppings_a),
            hoppings_d: convert(&spec.hoppings_d),
        }
    }
}
