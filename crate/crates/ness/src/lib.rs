//! Non-equilibrium steady states and universal current bounds for
//! non-interacting fermionic and bosonic open quantum systems.
//!
//! A system of `m` modes is driven by Markovian pump and loss channels
//! described by PSD matrices `A` and `D` while a Hamiltonian `H` moves
//! particles coherently. Everything observable at the single-particle level
//! is encoded in the `m x m` covariance matrix `Q`, which relaxes under the
//! damped generator `P + iH` towards a non-equilibrium steady state with a
//! stationary particle current:
//!
//! * fermions (`P = A + D`): `J = 2 tr(D Q_NESS)` obeys the universal upper
//!   bound `J <= 2 tr A tr D / tr(A + D)`, saturated in the dominantly
//!   coherent limit by Hamiltonians designed around a unitary symmetry that
//!   maps the pump channel onto the loss channel;
//! * bosons (`P = D - A`, stable only when `D >= A`): the current obeys the
//!   universal *lower* bound `J >= 2 tr A tr D / tr(D - A)` and has no upper
//!   bound;
//! * shift-invariant ribbons: per-momentum steady states integrate to a
//!   current density per site with the corresponding integrated bound.
//!
//! # Modules
//!
//! * [`linalg`] - validated Hermitian/PSD types, spectral decomposition and
//!   the damped fixed-point (Lyapunov) solver.
//! * [`fermion`] / [`boson`] - steady states, transients, currents, bounds
//!   and balance diagnostics.
//! * [`perturbative`] - the dominantly coherent limit and the
//!   symmetry-design saturation check.
//! * [`ensembles`] - seedable GOE / Wishart / Haar samplers and the
//!   designed-system constructor.
//! * [`ribbon`] - matrix-valued symbols on the momentum circle, densities
//!   and the integrated bound.
//! * [`experiments`] - deterministic batch sweeps with CSV/JSON output,
//!   exposed through the `ness` binary.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release --example single_system        # one explicit system end to end
//! cargo run --release --example fermionic_bound_sweep # upper-bound scatter
//! cargo run --release --example designed_saturation  # symmetry-designed systems
//! cargo run --release --example rate_scaling_sweep   # current vs incoherent rates
//! cargo run --release --example bosonic_lower_bound  # lower-bound scatter
//! cargo run --release --example transient_relaxation # Q(t) towards the steady state
//! cargo run --release --example ribbon_current_density # quasi-1D lattice densities
//! cargo run --release --example ensemble_statistics  # sampler sanity statistics
//! ```
//!
//! The same sweeps are scriptable through the thin CLI:
//!
//! ```text
//! ness run --config configs/fig1.json --out fig1.csv
//! ness single --input configs/single_demo.json
//! ness ribbon --config configs/ribbon_demo.json
//! ```

pub mod boson;
pub mod ensembles;
mod error;
pub mod experiments;
pub mod fermion;
pub mod linalg;
pub mod perturbative;
pub mod ribbon;
mod system;
mod tolerances;

pub use error::{Error, Result};
pub use linalg::{CMatrix, HermitianMatrix, MatrixData, PsdMatrix, SpectralDecomposition, C64};
pub use system::{CovarianceMatrix, NessReport, Statistics, SystemSpec};
pub use tolerances::ToleranceConfig;
