//! Shape-constrained density estimation for capture frequency ratios
//! `X_i / m`, where each `X_i` is a binomial draw around a latent rate, and
//! selection of the two cutoffs bounding a valley-shaped density.
//!
//! Modules:
//! - [`model`]: densities, observations, piecewise-constant estimates, seeded RNG streams
//! - [`mixture`]: exact law of the observed ratio and its sup-distance to the latent law
//! - [`ecdf`]: empirical CDFs, KS and L_p distances, DKW band
//! - [`shape`]: least concave majorant, Grenander estimators, histograms
//! - [`ucut`]: cutoff search and the stitched density
//! - [`simulate`]: valley ground truths, labelled datasets, bootstrap
//! - [`verify`]: Monte Carlo experiments with tidy CSV and JSON summaries
//! - [`cli`]: the `ucut` command line tool
//!
//! Runnable examples, via `cargo run --release --example <name>`:
//! - `mixture_law`: pmf of the observed count and its distance to `f`
//! - `grenander`: monotone density estimates from a sample
//! - `ecdf_distances`: KS and L1 distances as `m` grows
//! - `simulate_valley`: valley densities and a labelled count dataset
//! - `cutoff_selection`: selecting and scoring the cutoffs
//! - `bootstrap`: subsampling spread of the right cutoff
//! - `rate_experiment`: Grenander L1 error against `n` and `m`
//! - `sensitivity_sweep`: cutoff distribution across a tuning parameter
//! - `histogram_risk`: histogram risk from noisy ratios
//! - `deviation_bounds`: mixture deviation against its bounds

pub mod cli;
pub mod ecdf;
pub mod error;
pub mod format;
pub mod io;
pub mod mixture;
pub mod model;
pub mod shape;
pub mod simulate;
pub mod special;
pub mod ucut;
pub mod verify;

pub use error::{Error, Result};
