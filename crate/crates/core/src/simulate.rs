//! Ground-truth valley densities, two-group labeling, cutoff scoring and the
//! subsampling bootstrap of the cutoff.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mixture::{binomial_counts, sample_latent};
use crate::model::{DensityKind, DensitySpec, Label, ObservationSet, Piece, RngContract, Truth, ValleyInfo};
use crate::ucut::{ucut, UcutConfig};

/// Piecewise-linear valley: a decreasing segment ending at
/// `(c_l, δ_m + δ_l)` with slope `s_l`, a flat middle at `δ_m`, and an
/// increasing segment starting at `(c_r, δ_m + δ_r)` with slope `s_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValleyParams {
    pub c_l: f64,
    pub c_r: f64,
    pub delta_m: f64,
    pub delta_l: f64,
    pub delta_r: f64,
    pub s_l: f64,
    pub s_r: f64,
}

impl Default for ValleyParams {
    fn default() -> Self {
        Self { c_l: 0.3, c_r: 0.9, delta_m: 1.0, delta_l: 0.5, delta_r: 0.5, s_l: -3.0, s_r: 1.0 }
    }
}

/// Null fraction `tau0` of the middle region; labels only, never values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoGroupParams {
    pub tau0: f64,
}

impl Default for TwoGroupParams {
    fn default() -> Self {
        Self { tau0: 0.5 }
    }
}

fn check_cutoffs(c_l: f64, c_r: f64) -> Result<()> {
    if !(0.0 < c_l && c_l < c_r && c_r < 1.0) {
        return Err(invalid(format!("need 0 < c_l < c_r < 1, got {c_l}, {c_r}")));
    }
    Ok(())
}

fn with_gaps(d: DensitySpec, c_l: f64, c_r: f64, delta_l: f64, delta_r: f64) -> DensitySpec {
    let z = d.normalization();
    d.with_valley(ValleyInfo { c_l, c_r, gap_l: delta_l / z, gap_r: delta_r / z })
}

/// The normalized linear valley density. `c_l == c_r` is allowed and
/// drops the flat middle.
pub fn valley_density(p: &ValleyParams) -> Result<DensitySpec> {
    if !(0.0 < p.c_l && p.c_l <= p.c_r && p.c_r < 1.0) {
        return Err(invalid(format!("need 0 < c_l <= c_r < 1, got {}, {}", p.c_l, p.c_r)));
    }
    let all = [p.delta_m, p.delta_l, p.delta_r, p.s_l, p.s_r];
    if all.iter().any(|x| !x.is_finite()) {
        return Err(invalid("valley parameters must be finite"));
    }
    if !(p.delta_m > 0.0) || p.delta_l < 0.0 || p.delta_r < 0.0 {
        return Err(invalid("need delta_m > 0 and nonnegative jumps"));
    }
    let left_top = p.delta_m + p.delta_l;
    let right_base = p.delta_m + p.delta_r;
    let mut pieces = vec![Piece::Linear { lo: 0.0, hi: p.c_l, intercept: left_top - p.s_l * p.c_l, slope: p.s_l }];
    if p.c_l < p.c_r {
        pieces.push(Piece::Linear { lo: p.c_l, hi: p.c_r, intercept: p.delta_m, slope: 0.0 });
    }
    pieces.push(Piece::Linear { lo: p.c_r, hi: 1.0, intercept: right_base - p.s_r * p.c_r, slope: p.s_r });
    if left_top - p.s_l * p.c_l <= 0.0 {
        return Err(Error::NegativeDensity { lo: 0.0, hi: p.c_l });
    }
    if right_base + p.s_r * (1.0 - p.c_r) <= 0.0 {
        return Err(Error::NegativeDensity { lo: p.c_r, hi: 1.0 });
    }
    let d = DensitySpec::from_pieces(DensityKind::LinearValley, pieces)?;
    Ok(with_gaps(d, p.c_l, p.c_r, p.delta_l, p.delta_r))
}

/// Smooth valley: `3/40 + (3/20) Beta(x/c_l; 0.5, 1.5)/c_l` on `[0, c_l]`,
/// `1/20` on the middle, `3/40 + (1/20) Beta((x-c_r)/(1-c_r); 2, 0.8)/(1-c_r)`
/// on `[c_r, 1]`, then normalized. Both beta parts vanish at the cutoffs,
/// so the jumps there are `1/40`.
pub fn beta_valley_density(c_l: f64, c_r: f64) -> Result<DensitySpec> {
    check_cutoffs(c_l, c_r)?;
    let (flat, jump) = (1.0 / 20.0, 1.0 / 40.0);
    let pieces = vec![
        Piece::Beta { lo: 0.0, hi: c_l, base: flat + jump, scale: 3.0 / 20.0, alpha: 0.5, beta: 1.5 },
        Piece::Linear { lo: c_l, hi: c_r, intercept: flat, slope: 0.0 },
        Piece::Beta { lo: c_r, hi: 1.0, base: flat + jump, scale: 1.0 / 20.0, alpha: 2.0, beta: 0.8 },
    ];
    let d = DensitySpec::from_pieces(DensityKind::BetaValley, pieces)?;
    Ok(with_gaps(d, c_l, c_r, jump, jump))
}

/// Valley whose outer pieces are not monotone: `1.5 + 3 Beta(x/c_l; 1.5, 5)/c_l`
/// on `[0, c_l]`, `1` on the middle, `1.5 + Beta((x-c_r)/(1-c_r); 2.5, 1.5)/(1-c_r)`
/// on `[c_r, 1]`, then normalized.
pub fn unimodal_misspec_density(c_l: f64, c_r: f64) -> Result<DensitySpec> {
    check_cutoffs(c_l, c_r)?;
    let (flat, jump) = (1.0, 0.5);
    let pieces = vec![
        Piece::Beta { lo: 0.0, hi: c_l, base: flat + jump, scale: 3.0, alpha: 1.5, beta: 5.0 },
        Piece::Linear { lo: c_l, hi: c_r, intercept: flat, slope: 0.0 },
        Piece::Beta { lo: c_r, hi: 1.0, base: flat + jump, scale: 1.0, alpha: 2.5, beta: 1.5 },
    ];
    let d = DensitySpec::from_pieces(DensityKind::UnimodalMisspec, pieces)?;
    Ok(with_gaps(d, c_l, c_r, jump, jump))
}

/// Latent `(s_i, label)` pairs from a valley density: left region null,
/// right region alternative, middle null with probability `tau0`. The
/// `s_i` do not depend on `tau0`.
pub fn sample_valley(f: &DensitySpec, n: usize, rng: &RngContract, two_group: TwoGroupParams) -> Result<Vec<Truth>> {
    if f.valley().is_none() {
        return Err(invalid("sample_valley needs a valley density"));
    }
    check_tau0(two_group.tau0)?;
    Ok(sample_latent(f, n, &mut rng.rng(), two_group.tau0))
}

fn check_tau0(tau0: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau0) {
        return Err(invalid(format!("tau0 must lie in [0, 1], got {tau0}")));
    }
    Ok(())
}

/// A simulated dataset: latent values and labels from `f`, then
/// `X_i ~ Binomial(m, s_i)`. With `m = None` the latent values are observed
/// directly (ratio-only data).
pub fn simulate_dataset(f: &DensitySpec, n: usize, m: Option<u64>, tau0: f64, rng: &RngContract) -> Result<ObservationSet> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    check_tau0(tau0)?;
    let mut r = rng.rng();
    let truth = sample_latent(f, n, &mut r, tau0);
    let obs = match m {
        Some(0) => return Err(invalid("m must be at least 1")),
        Some(m) => ObservationSet::from_counts(m, binomial_counts(&truth, m, &mut r)?)?,
        None => ObservationSet::from_ratios(truth.iter().map(|t| t.s).collect())?,
    };
    obs.with_truth(truth)
}

/// FDR and power of the discovery set `{i : ŝ_i > cutoff}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffScore {
    pub fdr: f64,
    /// `None` when no alternatives are present.
    pub power: Option<f64>,
    pub n_discoveries: usize,
}

/// Scores a cutoff against known labels. FDR uses a `max(1, ·)`
/// denominator, so an empty discovery set has FDR 0.
pub fn evaluate_cutoff(truth: &[Truth], ratios: &[f64], cutoff: f64) -> Result<CutoffScore> {
    if truth.len() != ratios.len() {
        return Err(invalid("truth and ratios differ in length"));
    }
    let (mut disc, mut false_disc, mut alts, mut true_disc) = (0usize, 0usize, 0usize, 0usize);
    for (t, &r) in truth.iter().zip(ratios) {
        let label = t.label.ok_or_else(|| invalid("scoring needs labeled truth"))?;
        let found = r > cutoff;
        disc += found as usize;
        match label {
            Label::Null => false_disc += found as usize,
            Label::Alternative => {
                alts += 1;
                true_disc += found as usize;
            }
        }
    }
    Ok(CutoffScore {
        fdr: false_disc as f64 / disc.max(1) as f64,
        power: (alts > 0).then(|| true_disc as f64 / alts as f64),
        n_discoveries: disc,
    })
}

/// Bootstrap summary of the right cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub mean: f64,
    /// Sample standard deviation over feasible replicates (0 for one).
    pub sd: f64,
    pub n_feasible: usize,
    /// `ĉ_r` of each replicate in order; `None` when infeasible.
    pub replicates: Vec<Option<f64>>,
}

/// Runs the cutoff search on `B` subsamples of size `⌊frac·n⌋` drawn
/// without replacement, replicate `b` using stream `rng.child(b)`.
pub fn bootstrap_cutoff(obs: &ObservationSet, config: &UcutConfig, frac: f64, b: usize, rng: &RngContract) -> Result<BootstrapSummary> {
    if b < 2 {
        return Err(invalid(format!("bootstrap needs B >= 2, got {b}")));
    }
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(invalid(format!("frac must lie in (0, 1], got {frac}")));
    }
    config.validate()?;
    let n = obs.len();
    let size = ((frac * n as f64).floor() as usize).max(1);
    let replicates: Vec<Option<f64>> = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.child(i as u64).rng();
            let mut rows = rand::seq::index::sample(&mut r, n, size).into_vec();
            rows.sort_unstable();
            let sub = obs.subset(&rows).ok()?;
            ucut(&sub, config).ok().and_then(|res| res.c_r_star)
        })
        .collect();
    let feasible: Vec<f64> = replicates.iter().flatten().copied().collect();
    if feasible.is_empty() {
        return Err(Error::AllInfeasible(b));
    }
    let k = feasible.len() as f64;
    let mean = feasible.iter().sum::<f64>() / k;
    let sd = if feasible.len() > 1 {
        (feasible.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(BootstrapSummary { mean, sd, n_feasible: feasible.len(), replicates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecdf::{build_ecdf, dkw_epsilon, ks_distance};
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_valley_defaults() {
        let d = valley_density(&ValleyParams::default()).unwrap();
        assert_abs_diff_eq!(d.normalization(), 1.34, epsilon = 1e-12);
        let v = d.valley().unwrap();
        assert_abs_diff_eq!(v.gap_l, 0.5 / 1.34, epsilon = 1e-12);
        assert_abs_diff_eq!(v.gap_l, 0.37313, epsilon = 1e-5);
        assert_abs_diff_eq!(d.pdf(0.0), 2.4 / 1.34, epsilon = 1e-12);
        // the gap is the jump of the normalized density at each cutoff
        assert_abs_diff_eq!(d.pdf_left(0.3) - d.pdf_right(0.3), v.gap_l, epsilon = 1e-12);
        assert_abs_diff_eq!(d.pdf_right(0.9) - d.pdf_left(0.9), v.gap_r, epsilon = 1e-12);
        assert_abs_diff_eq!(d.cdf(0.3), 0.585 / 1.34, epsilon = 1e-12);
        assert_abs_diff_eq!(d.cdf(0.9), 1.185 / 1.34, epsilon = 1e-12);
    }

    #[test]
    fn flat_valley_is_uniform() {
        let p = ValleyParams { delta_l: 0.0, delta_r: 0.0, s_l: -0.0, s_r: 0.0, ..Default::default() };
        let d = valley_density(&p).unwrap();
        assert_eq!(d.normalization(), 1.0);
        assert_abs_diff_eq!(d.cdf(0.42), 0.42, epsilon = 1e-15);
    }

    #[test]
    fn zero_width_middle() {
        let p = ValleyParams { c_l: 0.9, ..Default::default() };
        let d = valley_density(&p).unwrap();
        assert_eq!(d.pieces().len(), 2);
        assert!(valley_density(&ValleyParams { c_l: 0.95, ..Default::default() }).is_err());
    }

    #[test]
    fn steep_slope_is_rejected() {
        let p = ValleyParams { s_l: 10.0, ..Default::default() };
        assert!(matches!(valley_density(&p), Err(Error::NegativeDensity { .. })));
        let p = ValleyParams { s_r: -20.0, ..Default::default() };
        assert!(matches!(valley_density(&p), Err(Error::NegativeDensity { .. })));
    }

    #[test]
    fn smooth_valleys() {
        let b = beta_valley_density(0.3, 0.9).unwrap();
        assert_abs_diff_eq!(b.normalization(), 0.26, epsilon = 1e-12);
        assert_abs_diff_eq!(b.cdf(1.0), 1.0);
        assert!((1..30).all(|i| b.pdf(i as f64 * 0.01) > b.pdf(i as f64 * 0.01 + 0.01)));
        assert_abs_diff_eq!(b.pdf_left(0.3) - b.pdf_right(0.3), b.valley().unwrap().gap_l, epsilon = 1e-12);
        let u = unimodal_misspec_density(0.3, 0.9).unwrap();
        // left piece peaks at x/c_l = 0.5/4.5
        let mode = 0.3 * 0.5 / 4.5;
        assert!(u.pdf(mode) > u.pdf(mode - 0.01) && u.pdf(mode) > u.pdf(mode + 0.01));
        for d in [&b, &u] {
            let total: f64 = crate::special::integrate(|x| d.pdf(x), 0.0, 0.3, 1e-12)
                + crate::special::integrate(|x| d.pdf(x), 0.3, 0.9, 1e-12)
                + crate::special::integrate(|x| d.pdf(x), 0.9, 1.0, 1e-12);
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn labels_and_marginal_invariance() {
        let d = valley_density(&ValleyParams::default()).unwrap();
        let rng = RngContract::new(21);
        let all_null = sample_valley(&d, 2000, &rng, TwoGroupParams { tau0: 1.0 }).unwrap();
        let all_alt = sample_valley(&d, 2000, &rng, TwoGroupParams { tau0: 0.0 }).unwrap();
        for (a, b) in all_null.iter().zip(&all_alt) {
            assert_eq!(a.s, b.s);
            let middle = a.s > 0.3 && a.s <= 0.9;
            if middle {
                assert_eq!((a.label, b.label), (Some(Label::Null), Some(Label::Alternative)));
            } else {
                assert_eq!(a.label, b.label);
                assert_eq!(a.label, Some(if a.s <= 0.3 { Label::Null } else { Label::Alternative }));
            }
        }
        assert!(sample_valley(&DensitySpec::uniform(), 5, &rng, TwoGroupParams::default()).is_err());
    }

    #[test]
    fn inverse_cdf_sampling_matches_the_law() {
        let d = valley_density(&ValleyParams::default()).unwrap();
        let truth = sample_valley(&d, 100_000, &RngContract::new(4), TwoGroupParams::default()).unwrap();
        let s: Vec<f64> = truth.iter().map(|t| t.s).collect();
        assert!(ks_distance(&build_ecdf(&s).unwrap(), &d) <= dkw_epsilon(100_000, 0.01).unwrap());
        let left = s.iter().filter(|&&x| x <= 0.3).count() as f64 / 1e5;
        let p = 0.585 / 1.34;
        assert!((left - p).abs() <= 3.0 * (p * (1.0 - p) / 1e5).sqrt());
    }

    #[test]
    fn scoring_conventions() {
        let truth = vec![
            Truth { s: 0.1, label: Some(Label::Null) },
            Truth { s: 0.95, label: Some(Label::Alternative) },
            Truth { s: 0.5, label: Some(Label::Null) },
        ];
        let ratios = [0.1, 0.95, 0.5];
        let s = evaluate_cutoff(&truth, &ratios, 1.0).unwrap();
        assert_eq!((s.fdr, s.power, s.n_discoveries), (0.0, Some(0.0), 0));
        let s = evaluate_cutoff(&truth, &ratios, 0.0).unwrap();
        assert_eq!((s.power, s.n_discoveries), (Some(1.0), 3));
        assert_abs_diff_eq!(s.fdr, 2.0 / 3.0);
        let nulls = vec![Truth { s: 0.5, label: Some(Label::Null) }];
        assert_eq!(evaluate_cutoff(&nulls, &[0.5], 0.2).unwrap().power, None);
    }

    #[test]
    fn bootstrap_edges() {
        let d = valley_density(&ValleyParams::default()).unwrap();
        let obs = simulate_dataset(&d, 2000, Some(200), 0.5, &RngContract::new(8)).unwrap();
        let cfg = UcutConfig::new(0.5, 0.3, 0.3).with_gamma(0.01);
        let full = ucut(&obs, &cfg).unwrap();
        let rng = RngContract::new(1);
        let b = bootstrap_cutoff(&obs, &cfg, 1.0, 2, &rng).unwrap();
        assert_eq!(b.sd, 0.0);
        assert_eq!(b.replicates, vec![full.c_r_star, full.c_r_star]);
        assert!(bootstrap_cutoff(&obs, &cfg, 0.7, 1, &rng).is_err());
        assert!(bootstrap_cutoff(&obs, &cfg, 0.0, 5, &rng).is_err());
        let again = bootstrap_cutoff(&obs, &cfg, 0.7, 6, &rng).unwrap();
        assert_eq!(again, bootstrap_cutoff(&obs, &cfg, 0.7, 6, &rng).unwrap());
        let impossible = UcutConfig::new(0.5, 1e6, 1e6);
        assert!(matches!(bootstrap_cutoff(&obs, &impossible, 0.7, 3, &rng), Err(Error::AllInfeasible(3))));
    }
}
