//! Monotone density estimation: the least concave majorant of an empirical
//! CDF and the Grenander estimator it induces.
//!
//! ```bash
//! cargo run --example grenander
//! ```

use rand_distr::{Beta, Distribution};
use ucut::ecdf::build_ecdf;
use ucut::model::RngContract;
use ucut::shape::{grenander_decreasing, grenander_increasing, least_concave_majorant, write_density_csv};

fn main() -> ucut::Result<()> {
    let mut rng = RngContract::new(1).rng();
    // Beta(1, 3) has a decreasing density 3 (1 - x)^2
    let beta = Beta::new(1.0, 3.0).unwrap();
    let xs: Vec<f64> = (0..200).map(|_| beta.sample(&mut rng)).collect();

    let hull = least_concave_majorant(&build_ecdf(&xs)?, (0.0, 1.0))?;
    println!("majorant has {} vertices", hull.len());

    let g = grenander_decreasing(&xs, (0.0, 1.0))?;
    println!("decreasing estimate: {} pieces, mass {:.12}", g.heights().len(), g.mass());
    for x in [0.05, 0.25, 0.5, 0.75] {
        println!("  g({x}) = {:.4}  truth {:.4}", g.eval(x)?, 3.0 * (1.0 - x) * (1.0 - x));
    }

    let mirrored: Vec<f64> = xs.iter().map(|x| 1.0 - x).collect();
    let h = grenander_increasing(&mirrored, (0.0, 1.0))?;
    println!("increasing estimate on the mirrored sample: {} pieces", h.heights().len());

    println!("\nfirst rows of the decreasing estimate as CSV:");
    let mut buf = Vec::new();
    write_density_csv(&g, &mut buf)?;
    for line in String::from_utf8_lossy(&buf).lines().take(5) {
        println!("  {line}");
    }
    Ok(())
}
