//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them).

mod common;

use std::path::PathBuf;
use std::time::Instant;

use ness::boson;
use ness::ensembles::{
    build_designed_system, sample_goe, sample_haar_unitary, sample_wishart_channel,
    substream_rng,
};
use ness::experiments::{run, RunConfig};
use ness::fermion;
use ness::perturbative::current_infinite_lambda;
use ness::ribbon::{current_density, HoppingTerm, RibbonSpec};
use ness::{
    CMatrix, CovarianceMatrix, HermitianMatrix, PsdMatrix, SpectralDecomposition, SystemSpec,
    ToleranceConfig, C64,
};
use rand::Rng;

fn criterion(index: u32, name: &str, pass: bool) {
    println!("ACCEPTANCE {index} {name}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "acceptance criterion {index} ({name}) failed");
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn criterion_1_fermionic_upper_bound_sweep() {
    let started = Instant::now();
    let config = RunConfig::from_path(&config_path("fig1.json")).unwrap().resolve().unwrap();
    assert_eq!(config.n_realizations, 1000);
    let outcome = run(&config).unwrap();
    let elapsed = started.elapsed();
    let pass = outcome.summary.bound_violations == 0
        && outcome.summary.n_failed == 0
        && outcome.summary.n_completed == 1000
        && elapsed.as_secs() < 60;
    println!(
        "  fig1: {} realizations, max ratio {:.12}, {:?}",
        outcome.summary.n_completed,
        outcome.summary.max_ratio.unwrap(),
        elapsed
    );
    criterion(1, "fermionic bound holds over 1000 random systems", pass);
}

#[test]
fn criterion_2_bosonic_lower_bound_sweep() {
    let started = Instant::now();
    let config = RunConfig::from_path(&config_path("fig4.json")).unwrap().resolve().unwrap();
    assert_eq!(config.n_realizations, 1000);
    let outcome = run(&config).unwrap();
    let elapsed = started.elapsed();
    let pass = outcome.summary.bound_violations == 0
        && outcome.summary.n_failed == 0
        && outcome.summary.n_completed == 1000
        && elapsed.as_secs() < 60;
    println!(
        "  fig4: {} realizations, min ratio {:.12}, {:?}",
        outcome.summary.n_completed,
        outcome.summary.min_ratio.unwrap(),
        elapsed
    );
    criterion(2, "bosonic lower bound holds over 1000 random systems", pass);
}

#[test]
fn criterion_3_designed_systems_saturate() {
    let t = tol();
    let mut worst_inf_dev: f64 = 0.0;
    let mut worst_finite_ratio = f64::INFINITY;
    for i in 0..200 {
        let mut rng = substream_rng(314, i);
        let designed = build_designed_system(10, 10, 5.0, &mut rng).unwrap();
        let tr_a = designed.spec.absorption().trace();
        let degeneracy = SpectralDecomposition::default_tolerance(
            designed.spec.hamiltonian(),
            t.degeneracy_factor,
        )
        .unwrap();
        let j_inf = current_infinite_lambda(&designed.spec, degeneracy, &t).unwrap();
        worst_inf_dev = worst_inf_dev.max((j_inf / tr_a - 1.0).abs());
        let j_finite = fermion::current_lambda(&designed.spec, 1e5, &t).unwrap();
        worst_finite_ratio = worst_finite_ratio.min(j_finite / tr_a);
    }
    println!(
        "  200 designed systems: worst |J_inf/trA - 1| = {worst_inf_dev:.3e}, \
         worst finite-lambda ratio = {worst_finite_ratio:.8}"
    );
    criterion(
        3,
        "designed systems saturate the bound",
        worst_inf_dev <= 1e-8 && worst_finite_ratio >= 0.99,
    );
}

#[test]
fn criterion_4_scalar_closed_forms() {
    let t = tol();
    let scalar = |v: f64| CMatrix::from_element(1, 1, C64::new(v, 0.0));

    let fermi = SystemSpec::fermionic(
        HermitianMatrix::new(scalar(0.0)).unwrap(),
        PsdMatrix::new(scalar(1.0)).unwrap(),
        PsdMatrix::new(scalar(1.0)).unwrap(),
    )
    .unwrap();
    let report = fermion::ness_report(&fermi, &t).unwrap();
    let fermi_ok = (report.j - 1.0).abs() <= 1e-12 && (report.j_bound - 1.0).abs() <= 1e-12;

    let bose = SystemSpec::bosonic(
        HermitianMatrix::new(scalar(0.0)).unwrap(),
        PsdMatrix::new(scalar(0.25)).unwrap(),
        PsdMatrix::new(scalar(1.0)).unwrap(),
    )
    .unwrap();
    let report_b = boson::ness_report_boson(&bose, &t).unwrap();
    let bose_ok = (report_b.j - 2.0 / 3.0).abs() <= 1e-12
        && (report_b.j_bound - 2.0 / 3.0).abs() <= 1e-12;

    println!(
        "  fermion m=1: J = {:.15}, boson m=1: J = {:.15}",
        report.j, report_b.j
    );
    criterion(4, "scalar closed forms exact", fermi_ok && bose_ok);
}

#[test]
fn criterion_5_ode_oracle_equivalence() {
    let t = tol();
    let mut worst_ness: f64 = 0.0;
    let mut worst_evolve: f64 = 0.0;
    for i in 0..100 {
        let mut rng = substream_rng(2718, i);
        let m = 1 + (i as usize % 6);
        let spec = common::random_fermion_spec(m, &mut rng);
        let p = spec.fermionic_damping().unwrap();
        let g = ness::linalg::damped_generator(&p, spec.hamiltonian());
        let source2 = spec.absorption().matrix() * C64::new(2.0, 0.0);

        // steady state against integration to stationarity
        let q_solver = fermion::ness_covariance(&spec, &t).unwrap();
        let t_end = 14.0 * std::f64::consts::LN_10 / (2.0 * p.eig_min());
        let q_ode = common::integrate_covariance_ode(
            &g,
            &source2,
            &CMatrix::zeros(m, m),
            t_end,
            1e-11,
            1e-13,
        );
        worst_ness = worst_ness.max((q_solver.matrix() - &q_ode).norm());

        // transient against the same integrator at a random finite time
        let q0 = common::random_fermion_covariance(m, &mut rng);
        let sample_time: f64 = rng.gen_range(0.1..3.0);
        let q0_cov = CovarianceMatrix::fermionic(q0.clone(), t.covariance).unwrap();
        let q_evolved = fermion::evolve_covariance(&spec, &q0_cov, sample_time, &t).unwrap();
        let q_ode_t = common::integrate_covariance_ode(
            &g,
            &source2,
            q0.matrix(),
            sample_time,
            1e-11,
            1e-13,
        );
        worst_evolve = worst_evolve.max((q_evolved.matrix() - &q_ode_t).norm());
    }
    println!(
        "  100 specs (m <= 6): worst NESS deviation {worst_ness:.3e}, \
         worst transient deviation {worst_evolve:.3e}"
    );
    criterion(
        5,
        "fixed point and transient match adaptive ODE integration",
        worst_ness <= 1e-7 && worst_evolve <= 1e-8,
    );
}

#[test]
fn criterion_6_stationarity_and_spectral_windows() {
    let t = tol();

    // every fermionic solve of the fig1 sweep
    let config = RunConfig::from_path(&config_path("fig1.json")).unwrap().resolve().unwrap();
    let outcome = run(&config).unwrap();
    let mut fermionic_ok = outcome.summary.n_failed == 0;
    let csv = String::from_utf8(outcome.csv.unwrap()).unwrap();
    let mut n_rows = 0;
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let j: f64 = fields[2].parse().unwrap();
        let balance: f64 = fields[8].parse().unwrap();
        fermionic_ok &= balance <= 1e-9 * j.max(1.0);
        n_rows += 1;
    }
    fermionic_ok &= n_rows == 1000;
    // spectral windows were recorded per realization; re-derive them here
    for i in 0..1000u64 {
        let ens = &config.ensemble;
        let mut rng = substream_rng(config.seed, i);
        let h = sample_goe(ens.m, ens.v, &mut rng);
        let a = sample_wishart_channel(ens.m, ens.m_a, ens.m_a + ens.m_d, &mut rng);
        let d = sample_wishart_channel(ens.m, ens.m_d, ens.m_a + ens.m_d, &mut rng);
        let lambda = 10f64.powf(rng.gen_range(-5.0..5.0));
        let spec = SystemSpec::fermionic(h, a, d).unwrap().with_hamiltonian_scaled(lambda);
        let q = fermion::ness_covariance(&spec, &t).unwrap();
        fermionic_ok &= q.eig_min() >= -1e-10 && q.eig_max() <= 1.0 + 1e-10;
    }

    // every fermionic solve of the designed-saturation set at lambda = 1e5
    for i in 0..200 {
        let mut rng = substream_rng(314, i);
        let designed = build_designed_system(10, 10, 5.0, &mut rng).unwrap();
        let scaled = designed.spec.with_hamiltonian_scaled(1e5);
        let q = fermion::ness_covariance(&scaled, &t).unwrap();
        let j = fermion::current(&scaled, &q);
        fermionic_ok &= q.eig_min() >= -1e-10 && q.eig_max() <= 1.0 + 1e-10;
        fermionic_ok &= fermion::balance_residual(&scaled, &q) <= 1e-9 * j.max(1.0);
    }

    // every bosonic solve of the fig4 sweep: positivity and continuity
    let config4 = RunConfig::from_path(&config_path("fig4.json")).unwrap().resolve().unwrap();
    let mut bosonic_ok = true;
    for i in 0..config4.n_realizations {
        let ens = &config4.ensemble;
        let mut rng = substream_rng(config4.seed, i);
        let h = sample_goe(ens.m, ens.v, &mut rng);
        let a = sample_wishart_channel(ens.m, ens.m_a, ens.m_a + ens.m_p, &mut rng);
        let margin = sample_wishart_channel(ens.m, ens.m_p, ens.m_a + ens.m_p, &mut rng);
        let lambda = 10f64.powf(rng.gen_range(-5.0..5.0));
        let d = PsdMatrix::new(margin.matrix() + a.matrix()).unwrap();
        let spec =
            SystemSpec::bosonic(h, a, d).unwrap().with_hamiltonian_scaled(lambda);
        let q = boson::ness_covariance_boson(&spec, &t).unwrap();
        let j = boson::current_boson(&spec, &q);
        bosonic_ok &= q.eig_min() >= -1e-10;
        // continuity: 2 tr(P Q) = 2 tr A with P = D - A, identical to the
        // inflow/outflow balance
        bosonic_ok &= boson::balance_residual_boson(&spec, &q) <= 1e-9 * j.max(1.0);
    }

    criterion(6, "stationarity and spectral windows on every solve", fermionic_ok && bosonic_ok);
}

fn random_psd(m: usize, ridge: f64, rng: &mut impl Rng) -> PsdMatrix {
    let w = CMatrix::from_fn(m, m, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    PsdMatrix::new((&w * w.adjoint()).scale(1.0 / m as f64) + CMatrix::identity(m, m) * C64::new(ridge, 0.0))
        .unwrap()
}

fn random_hermitian(m: usize, rng: &mut impl Rng) -> HermitianMatrix {
    HermitianMatrix::symmetrized(CMatrix::from_fn(m, m, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }))
}

/// Hoppings of a PSD symbol built as L_hat(x)^H L_hat(x) from a random
/// factor polynomial of degree `factor_range`, plus a ridge at r = 0.
fn gram_symbol_hoppings(
    d: usize,
    factor_range: usize,
    ridge: f64,
    rng: &mut impl Rng,
) -> Vec<HoppingTerm> {
    let factors: Vec<CMatrix> = (0..=factor_range)
        .map(|_| {
            CMatrix::from_fn(d, d, |_, _| {
                C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
            })
        })
        .collect();
    let mut terms = Vec::new();
    for s in -(factor_range as i32)..=(factor_range as i32) {
        let mut t = CMatrix::zeros(d, d);
        for rp in 0..=factor_range {
            let rpp = rp as i32 + s;
            if rpp < 0 || rpp > factor_range as i32 {
                continue;
            }
            t += factors[rp].adjoint() * &factors[rpp as usize];
        }
        if s == 0 {
            t += CMatrix::identity(d, d) * C64::new(ridge, 0.0);
        }
        terms.push(HoppingTerm { r: s, t });
    }
    terms
}

fn random_hermitian_hoppings(d: usize, range: usize, rng: &mut impl Rng) -> Vec<HoppingTerm> {
    let mut terms = vec![HoppingTerm { r: 0, t: random_hermitian(d, rng).into_matrix() }];
    for r in 1..=range {
        let t = CMatrix::from_fn(d, d, |_, _| {
            C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
        });
        terms.push(HoppingTerm { r: -(r as i32), t: t.adjoint() });
        terms.push(HoppingTerm { r: r as i32, t });
    }
    terms
}

#[test]
fn criterion_7_ribbon_consistency() {
    let t = tol();

    // constant-symbol ribbons reduce to the finite system divided by width
    let mut constant_ok = true;
    for i in 0..50u64 {
        let mut rng = substream_rng(1618, i);
        let d_width = 1 + (i as usize % 4);
        let h0 = random_hermitian(d_width, &mut rng);
        let a0 = random_psd(d_width, 0.0, &mut rng);
        let d0 = random_psd(d_width, 0.2, &mut rng);
        let spec = RibbonSpec::new(
            d_width,
            vec![HoppingTerm { r: 0, t: h0.matrix().clone() }],
            vec![HoppingTerm { r: 0, t: a0.matrix().clone() }],
            vec![HoppingTerm { r: 0, t: d0.matrix().clone() }],
            16,
        )
        .unwrap();
        let report = current_density(&spec, &t).unwrap();
        let finite = SystemSpec::fermionic(h0, a0, d0).unwrap();
        let q = fermion::ness_covariance(&finite, &t).unwrap();
        let j = fermion::current(&finite, &q);
        let j_max =
            fermion::current_bound_fermion(finite.absorption(), finite.dissipation()).unwrap();
        constant_ok &= (report.j_density - j / d_width as f64).abs() <= 1e-9;
        constant_ok &= (report.j_density_bound - j_max / d_width as f64).abs() <= 1e-9;
        for record in &report.per_k_records {
            constant_ok &= record.tr_dq <= record.local_bound + 1e-9;
        }
    }

    // local bound at every node of non-trivial random ribbons
    let mut local_ok = true;
    for i in 0..20u64 {
        let mut rng = substream_rng(2618, i);
        let d_width = 1 + (i as usize % 4);
        let spec = RibbonSpec::new(
            d_width,
            random_hermitian_hoppings(d_width, 2, &mut rng),
            gram_symbol_hoppings(d_width, 1, 0.0, &mut rng),
            gram_symbol_hoppings(d_width, 1, 0.25, &mut rng),
            64,
        )
        .unwrap();
        let report = current_density(&spec, &t).unwrap();
        let scale = report
            .per_k_records
            .iter()
            .map(|r| r.local_bound)
            .fold(1.0f64, f64::max);
        for record in &report.per_k_records {
            local_ok &= record.tr_dq <= record.local_bound + 1e-9 * scale;
        }
        local_ok &= report.j_density <= report.j_density_bound * (1.0 + 1e-9);
    }

    // quadrature self-convergence on smooth symbols of hopping range <= 4
    let mut quad_ok = true;
    for i in 0..5u64 {
        let mut rng = substream_rng(3618, i);
        let d_width = 1 + (i as usize % 3);
        let spec = RibbonSpec::new(
            d_width,
            random_hermitian_hoppings(d_width, 4, &mut rng),
            gram_symbol_hoppings(d_width, 2, 0.0, &mut rng),
            gram_symbol_hoppings(d_width, 2, 0.3, &mut rng),
            128,
        )
        .unwrap();
        let j_128 = current_density(&spec, &t).unwrap().j_density;
        let j_256 = current_density(&spec.with_nodes(256).unwrap(), &t).unwrap().j_density;
        quad_ok &= (j_128 - j_256).abs() <= 1e-8;
    }

    criterion(7, "ribbon densities consistent and bounded", constant_ok && local_ok && quad_ok);
}

#[test]
fn criterion_8_ensemble_statistics() {
    // Wishart trace mean within 2%
    let mut rng = substream_rng(888, 0);
    let n = 10_000;
    let mut acc_tr_a = 0.0;
    let mut acc_mean_eig_p = 0.0;
    for _ in 0..n {
        let a = sample_wishart_channel(10, 5, 15, &mut rng);
        let d = sample_wishart_channel(10, 10, 15, &mut rng);
        acc_tr_a += a.trace();
        acc_mean_eig_p += (a.trace() + d.trace()) / 10.0;
    }
    let mean_tr_a = acc_tr_a / n as f64;
    let mean_eig_p = acc_mean_eig_p / n as f64;
    let wishart_ok = (mean_tr_a - 10.0 / 3.0).abs() <= 0.02 * (10.0 / 3.0);
    let p_ok = (mean_eig_p - 1.0).abs() <= 0.02;

    // Haar unitarity per draw
    let mut haar_ok = true;
    for _ in 0..500 {
        let u = sample_haar_unitary(10, &mut rng);
        let dev = (u.adjoint() * &u - CMatrix::identity(10, 10))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        haar_ok &= dev <= 1e-12;
    }

    println!(
        "  E[tr A] = {mean_tr_a:.4} (target 3.3333), mean eig of P = {mean_eig_p:.4} (target 1)"
    );
    criterion(8, "ensemble statistics", wishart_ok && p_ok && haar_ok);
}

#[test]
fn criterion_9_byte_identical_reruns() {
    let bin = env!("CARGO_BIN_EXE_ness");
    let dir = tempfile::tempdir().unwrap();
    let mut all_ok = true;
    for (config, flag) in
        [("fig1.json", "run"), ("fig4.json", "run"), ("ribbon_demo.json", "ribbon")]
    {
        let out_a = dir.path().join(format!("a_{config}.csv"));
        let out_b = dir.path().join(format!("b_{config}.csv"));
        for out in [&out_a, &out_b] {
            let status = std::process::Command::new(bin)
                .args([
                    flag,
                    "--config",
                    config_path(config).to_str().unwrap(),
                    "--out",
                    out.to_str().unwrap(),
                ])
                .stderr(std::process::Stdio::null())
                .stdout(std::process::Stdio::null())
                .status()
                .unwrap();
            all_ok &= status.code() == Some(0);
        }
        let bytes_a = std::fs::read(&out_a).unwrap();
        let bytes_b = std::fs::read(&out_b).unwrap();
        all_ok &= !bytes_a.is_empty() && bytes_a == bytes_b;
    }
    criterion(9, "identical seed gives byte-identical output", all_ok);
}
