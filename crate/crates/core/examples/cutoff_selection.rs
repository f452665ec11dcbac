//! Selecting the valley cutoffs from capture frequency data and scoring the
//! right cutoff against the known labels.
//!
//! ```bash
//! cargo run --release --example cutoff_selection
//! ```

use ucut::model::RngContract;
use ucut::simulate::{evaluate_cutoff, simulate_dataset, valley_density, ValleyParams};
use ucut::ucut::{ucut, UcutConfig};

fn main() -> ucut::Result<()> {
    let f = valley_density(&ValleyParams::default())?;
    let v = f.valley().unwrap();
    let obs = simulate_dataset(&f, 10_000, Some(1000), 0.5, &RngContract::new(4))?;

    let config = UcutConfig::new(0.5, 0.8 * v.gap_l, 0.8 * v.gap_r).with_gamma(0.005);
    let res = ucut(&obs, &config)?;
    println!("feasible: {}", res.feasible);
    println!("c_l = {:?} (truth {}), c_r = {:?} (truth {})", res.c_l_star, v.c_l, res.c_r_star, v.c_r);
    println!("left mass below mu: {:.4}", res.alpha_l_mu);

    if let Some(c_r) = res.c_r_star {
        let score = evaluate_cutoff(obs.truth().unwrap(), &obs.ratios(), c_r)?;
        println!("{} discoveries, FDR {:.4}, power {:?}", score.n_discoveries, score.fdr, score.power);
    }

    let strict = ucut(&obs, &UcutConfig::new(0.5, 5.0, 5.0).with_gamma(0.005))?;
    println!("\nwith unattainable gaps: feasible = {}", strict.feasible);
    Ok(())
}
