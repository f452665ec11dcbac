//! Integrated squared risk of a regular histogram built from noisy ratios.
//!
//! ```bash
//! cargo run --release --example histogram_risk
//! ```

use ucut::model::RngContract;
use ucut::simulate::{valley_density, ValleyParams};
use ucut::verify::{histogram_risk_experiment, HistogramSetup};

fn main() -> ucut::Result<()> {
    let f = valley_density(&ValleyParams::default())?;
    let setup = HistogramSetup { reps: 20, ..Default::default() };
    let r = histogram_risk_experiment(&f, &[1000, 8000, 64_000], &setup, &RngContract::new(9))?;
    for p in &r.points {
        println!("n {:>6} m {:>5?} bins {:>3}: risk {:.5} (sd {:.5})", p.n, p.m, p.bins, p.risk, p.sd);
    }
    println!("successive ratios {:?}, slope {:.3}", r.ratios, r.slope);
    Ok(())
}
