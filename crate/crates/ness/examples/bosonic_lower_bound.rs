//! Bosonic currents have no upper bound, but they cannot be throttled below
//! `J_min = 2 tr A tr D / tr(D - A)`. Stability demands more loss than pump
//! (`D >= A`), guaranteed here by drawing the margin `P = D - A` from a
//! Wishart ensemble.
//!
//! ```text
//! cargo run --release --example bosonic_lower_bound
//! ```

use ness::experiments::{run, ExperimentKind, RunConfig};

fn main() -> ness::Result<()> {
    let config = RunConfig {
        experiment: ExperimentKind::Fig4BosonScatter,
        n_realizations: 300,
        seed: 7,
        ensemble: Default::default(),
        designed_ensemble: None,
        lambda_log_range: Some([-5.0, 5.0]),
        gamma_log_range: None,
        fixed_lambda: None,
        tolerances: Default::default(),
        output_path: Some("bosonic_lower_bound.csv".into()),
        max_failure_rate: None,
        ribbon: None,
        single: None,
    }
    .resolve()?;

    let outcome = run(&config)?;
    std::fs::write(&config.output_path, outcome.csv.as_deref().unwrap_or_default())?;
    println!("{}", serde_json::to_string_pretty(&outcome.summary).unwrap());
    println!();
    println!(
        "smallest J / J_min over {} realizations: {:.6} (never below 1)",
        outcome.summary.n_completed,
        outcome.summary.min_ratio.unwrap_or(f64::NAN)
    );
    println!(
        "largest  J / J_min: {:.3e} (currents blow up as tr(D - A) -> 0)",
        outcome.summary.max_ratio.unwrap_or(f64::NAN)
    );
    println!("scatter written to {}", config.output_path.display());
    Ok(())
}
