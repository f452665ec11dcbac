//! Subsampling spread of the right cutoff.
//!
//! ```bash
//! cargo run --release --example bootstrap
//! ```

use ucut::model::RngContract;
use ucut::simulate::{bootstrap_cutoff, simulate_dataset, valley_density, ValleyParams};
use ucut::ucut::UcutConfig;

fn main() -> ucut::Result<()> {
    let f = valley_density(&ValleyParams::default())?;
    let v = f.valley().unwrap();
    let obs = simulate_dataset(&f, 5000, Some(500), 0.5, &RngContract::new(5))?;
    let config = UcutConfig::new(0.5, 0.8 * v.gap_l, 0.8 * v.gap_r).with_gamma(0.005);

    let b = bootstrap_cutoff(&obs, &config, 0.7, 20, &RngContract::new(6))?;
    println!("{} of {} replicates feasible", b.n_feasible, b.replicates.len());
    println!("c_r mean {:.4}, sd {:.4}", b.mean, b.sd);
    for (i, r) in b.replicates.iter().enumerate().take(5) {
        println!("  replicate {i}: {r:?}");
    }
    Ok(())
}
