//! Exact sup-distance between the mixture law and the latent law, checked
//! against its lower and upper bounds.
//!
//! ```bash
//! cargo run --example deviation_bounds
//! ```

use ucut::model::DensitySpec;
use ucut::simulate::{valley_density, ValleyParams};
use ucut::verify::deviation_bounds_report;

fn main() -> ucut::Result<()> {
    let specs = vec![
        ("uniform".to_string(), DensitySpec::uniform()),
        ("two_step".to_string(), DensitySpec::two_step()),
        ("valley".to_string(), valley_density(&ValleyParams::default())?),
    ];
    let r = deviation_bounds_report(&specs, &[10, 100, 1000], 0.1)?;
    println!("{:>9} {:>5} {:>10} {:>10} {:>10} {:>10}", "spec", "m", "lower", "sup", "upper", "on[a,1-a]");
    for row in &r.rows {
        println!(
            "{:>9} {:>5} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            row.spec, row.m, row.lower, row.deviation, row.upper, row.truncated
        );
    }
    println!("violations: {}", r.violations);
    Ok(())
}
