//! Current density across a quasi-1D ribbon: a two-band chain with
//! staggered hopping, pumped into the first band and drained from both.
//!
//! ```text
//! cargo run --release --example ribbon_current_density
//! ```

use nalgebra::dmatrix;
use ness::ribbon::{current_density, HoppingTerm, RibbonSpec};
use ness::{ToleranceConfig, C64};

fn main() -> ness::Result<()> {
    let c = |re: f64, im: f64| C64::new(re, im);

    // intra-cell hopping v, inter-cell hopping w
    let (v, w) = (1.0, 0.6);
    let hoppings_h = vec![
        HoppingTerm { r: 0, t: dmatrix![c(0.0, 0.0), c(v, 0.0); c(v, 0.0), c(0.0, 0.0)] },
        HoppingTerm { r: 1, t: dmatrix![c(0.0, 0.0), c(0.0, 0.0); c(w, 0.0), c(0.0, 0.0)] },
        HoppingTerm { r: -1, t: dmatrix![c(0.0, 0.0), c(w, 0.0); c(0.0, 0.0), c(0.0, 0.0)] },
    ];
    // pump mostly into the first band, with a momentum-dependent modulation
    let hoppings_a = vec![
        HoppingTerm { r: 0, t: dmatrix![c(0.9, 0.0), c(0.0, 0.0); c(0.0, 0.0), c(0.4, 0.0)] },
        HoppingTerm { r: 1, t: dmatrix![c(0.2, 0.0), c(0.0, 0.0); c(0.0, 0.0), c(0.0, 0.0)] },
        HoppingTerm { r: -1, t: dmatrix![c(0.2, 0.0), c(0.0, 0.0); c(0.0, 0.0), c(0.0, 0.0)] },
    ];
    // uniform drain with a weak odd modulation
    let hoppings_d = vec![
        HoppingTerm { r: 0, t: dmatrix![c(0.8, 0.0), c(0.1, 0.0); c(0.1, 0.0), c(0.8, 0.0)] },
        HoppingTerm { r: 1, t: dmatrix![c(0.0, -0.1), c(0.0, 0.0); c(0.0, 0.0), c(0.0, -0.1)] },
        HoppingTerm { r: -1, t: dmatrix![c(0.0, 0.1), c(0.0, 0.0); c(0.0, 0.0), c(0.0, 0.1)] },
    ];

    let spec = RibbonSpec::new(2, hoppings_h, hoppings_a, hoppings_d, 128)?;
    let tol = ToleranceConfig::default();
    let report = current_density(&spec, &tol)?;

    println!("ribbon of width d = 2, {} momentum nodes", spec.n_nodes());
    println!("current density j     = {:.8}", report.j_density);
    println!("density bound         = {:.8}", report.j_density_bound);
    println!("ratio                 = {:.6}", report.j_density / report.j_density_bound);
    println!("particles per site    = {:.6}\n", report.rho);

    println!("a few momentum nodes (outflow vs local bound):");
    for record in report.per_k_records.iter().step_by(16) {
        println!(
            "  x = {:>8.4}: tr(D Q) = {:.6}  <=  {:.6}",
            record.x, record.tr_dq, record.local_bound
        );
    }
    Ok(())
}
