//! Exact law of the capture frequency ratio `X / m` when the latent rate has
//! density `f`, and its distance to `f` as `m` grows.
//!
//! ```bash
//! cargo run --example mixture_law
//! ```

use ucut::mixture::{deviation_sup, MixtureLaw};
use ucut::simulate::{valley_density, ValleyParams};

fn main() -> ucut::Result<()> {
    let f = valley_density(&ValleyParams::default())?;

    let law = MixtureLaw::new(&f, 10)?;
    println!("pmf of X for m = 10:");
    for (k, p) in law.pmf().iter().enumerate() {
        println!("  P(X = {k:2}) = {p:.6}");
    }
    println!("F^(10)(0.5) = {:.6}, F(0.5) = {:.6}", law.cdf(0.5), f.cdf(0.5));

    println!("\n{:>6} {:>12} {:>12}", "m", "sup|F_m-F|", "x sqrt(m)");
    for m in [10u64, 100, 1000, 10_000] {
        let d = deviation_sup(&f, m, None)?;
        println!("{m:>6} {d:>12.6} {:>12.6}", d * (m as f64).sqrt());
    }
    Ok(())
}
