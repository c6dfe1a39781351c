//! Transient covariance dynamics: two very different initial states relax
//! to the same steady state, forgetting where they started.
//!
//! ```text
//! cargo run --release --example transient_relaxation
//! ```

use nalgebra::DMatrix;
use ness::ensembles::{sample_goe, sample_wishart_channel, substream_rng};
use ness::fermion;
use ness::{CovarianceMatrix, HermitianMatrix, SystemSpec, ToleranceConfig, C64};

fn main() -> ness::Result<()> {
    let tol = ToleranceConfig::default();
    let m = 6;
    let mut rng = substream_rng(5150, 0);
    let h = sample_goe(m, 1.0, &mut rng);
    let a = sample_wishart_channel(m, 4, 8, &mut rng);
    let d = sample_wishart_channel(m, 6, 8, &mut rng);
    let spec = SystemSpec::fermionic(h, a, d)?;

    let empty = CovarianceMatrix::fermionic(
        HermitianMatrix::symmetrized(DMatrix::zeros(m, m)),
        tol.covariance,
    )?;
    let full = CovarianceMatrix::fermionic(
        HermitianMatrix::symmetrized(DMatrix::identity(m, m) * C64::new(1.0, 0.0)),
        tol.covariance,
    )?;
    let q_inf = fermion::ness_covariance(&spec, &tol)?;
    let j_inf = fermion::current(&spec, &q_inf);

    println!("{:>8} {:>12} {:>12} {:>14}", "t", "n(empty)", "n(full)", "distance");
    for t in [0.0, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
        let q_a = fermion::evolve_covariance(&spec, &empty, t, &tol)?;
        let q_b = fermion::evolve_covariance(&spec, &full, t, &tol)?;
        let distance = (q_a.matrix() - q_b.matrix()).norm();
        println!(
            "{:>8.2} {:>12.6} {:>12.6} {:>14.3e}",
            t,
            q_a.particle_number(),
            q_b.particle_number(),
            distance
        );
    }
    println!();
    println!("steady state: n = {:.6}, J = {:.6}", q_inf.particle_number(), j_inf);
    println!("both trajectories land on it; the initial condition is erased.");
    Ok(())
}
