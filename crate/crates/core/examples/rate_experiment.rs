//! L1 error of the Grenander estimator against `n`, with latent values
//! observed directly and through binomial noise.
//!
//! ```bash
//! cargo run --release --example rate_experiment
//! ```

use ucut::model::{DensitySpec, RngContract};
use ucut::verify::{l1_error_by_m, rate_l1_grenander, MRule};

fn main() -> ucut::Result<()> {
    let f = DensitySpec::two_step();
    let rng = RngContract::new(7);
    let grid = [1000, 4000, 16_000];
    for rule in [MRule::Infinite, MRule::Power { coef: 10.0, exponent: 2.0 / 3.0 }, MRule::Fixed(5)] {
        let r = rate_l1_grenander(&f, &grid, rule, 20, &rng)?;
        println!("{rule:?}");
        for p in &r.points {
            println!("  n {:>6} m {:>7?}: L1 {:.4} (sd {:.4})", p.n, p.m, p.mean_l1, p.sd_l1);
        }
        println!("  slope {:.3}", r.slope);
    }

    let paired = l1_error_by_m(&f, 4000, &[Some(10), Some(100), None], 20, &rng)?;
    println!("\nn = 4000, mean L1 by m: {:?}", paired.mean_l1);
    Ok(())
}
