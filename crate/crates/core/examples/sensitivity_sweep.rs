//! Distribution of the selected right cutoff as one tuning parameter moves.
//!
//! ```bash
//! cargo run --release --example sensitivity_sweep
//! ```

use ucut::model::RngContract;
use ucut::simulate::ValleyParams;
use ucut::verify::{ucut_sensitivity_suite, Experiment, SensitivitySetup, Sweep};

fn main() -> ucut::Result<()> {
    let setup = SensitivitySetup { n: 4000, m: Some(400), reps: 10, gamma: 0.005, ..Default::default() };
    let report =
        ucut_sensitivity_suite(&ValleyParams::default(), Sweep::Kappa, &[0.5, 0.8, 1.0], &setup, &RngContract::new(8))?;
    println!("{:>6} {:>9} {:>8} {:>8} {:>8}", "kappa", "feasible", "q25", "median", "q75");
    for s in &report.summary {
        let show = |q: Option<f64>| q.map_or("-".to_string(), |x| format!("{x:.3}"));
        println!("{:>6} {:>9} {:>8} {:>8} {:>8}", s.value, s.n_feasible, show(s.q25), show(s.median), show(s.q75));
    }

    let mut csv = Vec::new();
    report.write_tidy_csv(&mut csv)?;
    println!("\ntidy table: {} rows", String::from_utf8_lossy(&csv).lines().count() - 1);
    Ok(())
}
