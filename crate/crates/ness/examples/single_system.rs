//! One explicit fermionic system end to end: steady state, current, bound,
//! balance diagnostics.
//!
//! ```text
//! cargo run --release --example single_system
//! ```

use nalgebra::dmatrix;
use ness::fermion;
use ness::{HermitianMatrix, PsdMatrix, SystemSpec, ToleranceConfig, C64};

fn main() -> ness::Result<()> {
    let tol = ToleranceConfig::default();

    // Three modes in a row with nearest-neighbour hopping; particles enter
    // on the left site, leave mostly from the right one, and every site has
    // a weak background loss so the total damping stays strictly positive.
    let c = |re: f64| C64::new(re, 0.0);
    let h = HermitianMatrix::new(dmatrix![
        c(0.0), c(1.0), c(0.0);
        c(1.0), c(0.0), c(1.0);
        c(0.0), c(1.0), c(0.0);
    ])?;
    let a = PsdMatrix::new(dmatrix![
        c(0.8), c(0.0), c(0.0);
        c(0.0), c(0.0), c(0.0);
        c(0.0), c(0.0), c(0.0);
    ])?;
    let d = PsdMatrix::new(dmatrix![
        c(0.02), c(0.0), c(0.0);
        c(0.0), c(0.02), c(0.0);
        c(0.0), c(0.0), c(1.2);
    ])?;
    let spec = SystemSpec::fermionic(h, a, d)?;

    let report = fermion::ness_report(&spec, &tol)?;
    println!("mode occupations (diagonal of Q_NESS):");
    for i in 0..spec.dim() {
        println!("  site {i}: {:.6}", report.q_ness.matrix()[(i, i)].re);
    }
    println!("current J            = {:.6}", report.j);
    println!("universal bound J_max = {:.6}", report.j_bound);
    println!("ratio J / J_max      = {:.6}", report.ratio);
    println!("particle number      = {:.6}", report.particle_number);
    println!("balance residual     = {:.3e}", report.balance_residual);

    // How tight can this geometry get? Crank up the coherent scale.
    for lambda in [0.1, 1.0, 10.0, 100.0] {
        let j = fermion::current_lambda(&spec, lambda, &tol)?;
        println!("lambda = {lambda:>6}: J = {:.6} ({:.2}% of bound)", j, 100.0 * j / report.j_bound);
    }
    Ok(())
}
