//! Symmetry-designed systems saturate the fermionic bound in the
//! dominantly coherent regime: a Haar symmetry `U` fixes the eigenbasis of
//! `H` and maps the pump channel onto the loss channel, `D = U^H A U`.
//!
//! ```text
//! cargo run --release --example designed_saturation
//! ```

use ness::ensembles::{build_designed_system, substream_rng};
use ness::perturbative::current_infinite_lambda;
use ness::{fermion, SpectralDecomposition, ToleranceConfig};

fn main() -> ness::Result<()> {
    let tol = ToleranceConfig::default();
    let (m, m_a) = (10, 10);
    let n = 50;

    let mut worst_inf: f64 = 0.0;
    let mut worst_commutator: f64 = 0.0;
    for i in 0..n {
        let mut rng = substream_rng(99, i);
        let designed = build_designed_system(m, m_a, m as f64 / 2.0, &mut rng)?;
        let tr_a = designed.spec.absorption().trace();
        let degeneracy =
            SpectralDecomposition::default_tolerance(designed.spec.hamiltonian(), tol.degeneracy_factor)?;
        let j_inf = current_infinite_lambda(&designed.spec, degeneracy, &tol)?;
        worst_inf = worst_inf.max((j_inf / tr_a - 1.0).abs());
        worst_commutator = worst_commutator.max(designed.commutator_norm);
    }
    println!("{n} designed systems (m = {m}, {m_a} pump channels):");
    println!("  worst |J_inf / tr A - 1|: {worst_inf:.3e}   (saturation in the coherent limit)");
    println!("  worst ||[H, U]||:         {worst_commutator:.3e}\n");

    // the approach to saturation at finite coherent scale
    let mut rng = substream_rng(99, 1234);
    let designed = build_designed_system(m, m_a, m as f64 / 2.0, &mut rng)?;
    let j_max = designed.spec.absorption().trace();
    println!("one designed system, J / J_max against the coherent scale:");
    for lambda in [1e0, 1e1, 1e2, 1e3, 1e4, 1e5] {
        let j = fermion::current_lambda(&designed.spec, lambda, &tol)?;
        println!("  lambda = 1e{:<2}: {:.8}", lambda.log10() as i32, j / j_max);
    }
    Ok(())
}
