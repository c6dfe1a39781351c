//! Sanity statistics of the random-matrix samplers: GOE entry moments and
//! spectral radius, Wishart trace and rank, Haar unitarity and eigenphase
//! flatness.
//!
//! ```text
//! cargo run --release --example ensemble_statistics
//! ```

use ness::ensembles::{sample_goe, sample_haar_unitary, sample_wishart_channel, substream_rng};
use ness::linalg::eigenphases;

fn main() -> ness::Result<()> {
    let mut rng = substream_rng(1717, 0);

    // GOE: off-diagonal variance v^2 / m, radius concentrating near 2v
    let (m, v, n) = (10usize, 1.0f64, 20_000usize);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let h = sample_goe(m, v, &mut rng);
        let x = h.matrix()[(0, 1)].re;
        sum += x;
        sum_sq += x * x;
    }
    let mean = sum / n as f64;
    let var = sum_sq / n as f64 - mean * mean;
    println!("GOE entry H[0,1] over {n} draws: mean {mean:+.5}, variance {var:.5} (target {:.5})", v * v / m as f64);

    let big = sample_goe(100, v, &mut rng);
    let radius = big.eigenvalues()?.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
    println!("GOE spectral radius at m = 100: {radius:.4} (concentrates near {:.1})", 2.0 * v);

    // Wishart: E[tr] = m * channels / normalizer, rank = channel count
    let trials = 5_000;
    let mut acc = 0.0;
    for _ in 0..trials {
        acc += sample_wishart_channel(10, 5, 15, &mut rng).trace();
    }
    println!(
        "Wishart tr(A) over {trials} draws: mean {:.4} (target {:.4})",
        acc / trials as f64,
        10.0 * 5.0 / 15.0
    );

    // Haar: unitary to machine precision, flat eigenphase marginal
    let mut worst = 0.0f64;
    let mut histogram = [0usize; 8];
    let draws = 2_000;
    for _ in 0..draws {
        let u = sample_haar_unitary(8, &mut rng);
        let dev = (u.adjoint() * &u - ness::CMatrix::identity(8, 8)).norm();
        worst = worst.max(dev);
        for phase in eigenphases(&u, 1e-10)? {
            let bin = ((phase / std::f64::consts::TAU) * 8.0) as usize;
            histogram[bin.min(7)] += 1;
        }
    }
    println!("Haar worst |U^H U - 1| over {draws} draws: {worst:.3e}");
    println!("eigenphase histogram over [0, 2pi) in 8 bins (flat is correct):");
    let expected = (draws * 8 / 8) as f64;
    for (k, count) in histogram.iter().enumerate() {
        println!("  bin {k}: {count} (expected {expected:.0}, deviation {:+.1}%)", 100.0 * (*count as f64 - expected) / expected);
    }
    Ok(())
}
