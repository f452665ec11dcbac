//! Empirical CDFs, Kolmogorov and L_p distances, and the DKW band.
//!
//! ```bash
//! cargo run --example ecdf_distances
//! ```

use ucut::ecdf::{build_ecdf, dkw_epsilon, ks_distance, lp_distance};
use ucut::mixture::sample_binomial_mixture;
use ucut::model::{DensitySpec, RngContract};

fn main() -> ucut::Result<()> {
    let f = DensitySpec::two_step();
    let rng = RngContract::new(2);
    let n = 5000;
    let eps = dkw_epsilon(n, 0.05)?;
    println!("DKW half-width at n = {n}, 95%: {eps:.4}");

    let latent: Vec<f64> = (0..n).map(|i| f.quantile((i as f64 + 0.5) / n as f64)).collect();
    let reference = build_ecdf(&latent)?;
    println!("\n{:>6} {:>10} {:>10}", "m", "KS", "L1");
    for m in [5u64, 50, 500] {
        let ratios = sample_binomial_mixture(&f, n, m, &rng.child(m))?.ratios();
        let e = build_ecdf(&ratios)?;
        println!("{m:>6} {:>10.4} {:>10.4}", ks_distance(&e, &reference), lp_distance(&e, &reference, 1.0)?);
    }
    Ok(())
}
