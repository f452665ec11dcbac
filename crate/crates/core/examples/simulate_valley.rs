//! Valley-shaped ground truth, two-group labels and binomial counts.
//!
//! ```bash
//! cargo run --example simulate_valley
//! ```

use ucut::io::write_observations;
use ucut::model::{Label, RngContract};
use ucut::simulate::{beta_valley_density, simulate_dataset, valley_density, ValleyParams};

fn main() -> ucut::Result<()> {
    let f = valley_density(&ValleyParams::default())?;
    let v = f.valley().unwrap();
    println!("linear valley: c_l {}, c_r {}, normalized gaps {:.4} / {:.4}", v.c_l, v.c_r, v.gap_l, v.gap_r);
    for x in [0.0, 0.3, 0.6, 0.9, 1.0] {
        println!("  f({x}) = {:.4}", f.pdf(x));
    }
    let b = beta_valley_density(0.3, 0.9)?;
    println!("beta valley: f(0.6) = {:.4}", b.pdf(0.6));

    let obs = simulate_dataset(&f, 2000, Some(100), 0.5, &RngContract::new(3))?;
    let truth = obs.truth().unwrap();
    let count = |l: Label| truth.iter().filter(|t| t.label == Some(l)).count();
    println!(
        "\n{} objects: {} null, {} alternative",
        obs.len(),
        count(Label::Null),
        count(Label::Alternative)
    );

    let mut buf = Vec::new();
    write_observations(&obs, &[("seed".into(), "3".into())], &mut buf)?;
    for line in String::from_utf8_lossy(&buf).lines().take(6) {
        println!("  {line}");
    }
    Ok(())
}
