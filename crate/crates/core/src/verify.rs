//! Seeded Monte Carlo experiments: convergence rates of the Grenander and
//! histogram estimators under binomial noise, deviation bounds of the
//! mixture law, and sensitivity of the cutoff search.
//!
//! Every runner is a pure function of its inputs and the [`RngContract`].
//! Replicate `r` of grid point `g` draws from `rng.child(g).child(r)` (or
//! `rng.child(r)` where replicates are paired across the grid), and results
//! are collected in index order, so thread count never changes a table.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::format::{fmt_f64, to_json_string};
use crate::mixture::{binomial_counts, deviation_sup_with, sample_latent, MixtureLaw};
use crate::model::{DensitySpec, PiecewiseConstantDensity, RngContract};
use crate::shape::{grenander_decreasing, histogram_estimate};
use crate::simulate::{simulate_dataset, valley_density, ValleyParams};
use crate::special::integrate;
use crate::ucut::{ucut, UcutConfig};

/// How the binomial size `m` follows the sample size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MRule {
    /// Latent values observed directly.
    Infinite,
    Fixed(u64),
    /// `m = ⌈coef · n^exponent⌉`.
    Power { coef: f64, exponent: f64 },
}

impl MRule {
    pub fn m_for(&self, n: usize) -> Option<u64> {
        match *self {
            MRule::Infinite => None,
            MRule::Fixed(m) => Some(m),
            MRule::Power { coef, exponent } => Some(((coef * (n as f64).powf(exponent)).ceil() as u64).max(1)),
        }
    }
}

/// Observed ratios `ŝ_i` of a fresh dataset (the latent `s_i` when `m` is `None`).
pub fn sample_ratios(f: &DensitySpec, n: usize, m: Option<u64>, rng: &RngContract) -> Result<Vec<f64>> {
    Ok(simulate_dataset(f, n, m, 0.5, rng)?.ratios())
}

/// `∫₀¹ |g(x) − f(x)| dx` for a piecewise-constant estimate `g` on `[0, 1]`.
pub fn density_l1(g: &PiecewiseConstantDensity, f: &DensitySpec) -> f64 {
    density_lp_on(g, f, 1, (0.0, 1.0))
}

fn density_lp_on(g: &PiecewiseConstantDensity, f: &DensitySpec, p: i32, (a, b): (f64, f64)) -> f64 {
    let mut cuts: Vec<f64> = g.breakpoints().iter().chain(&f.breakpoints()).copied().chain([a, b]).filter(|x| (a..=b).contains(x)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let (ga, gb) = g.support();
    cuts.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let h = if (ga..=gb).contains(&mid) { g.eval(mid).unwrap_or(0.0) } else { 0.0 };
            integrate(|x| (h - f.pdf(x)).abs().powi(p), w[0], w[1], 1e-12)
        })
        .sum()
}

/// Least-squares slope of `ln y` on `ln x` and its standard error (`NaN`
/// with fewer than three points).
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let se = if xs.len() > 2 {
        let rss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
        (rss / (k - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, se)
}

/// Linear-interpolation sample quantile (type 7) of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let sd = if xs.len() > 1 { (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt() } else { 0.0 };
    (mean, sd)
}

fn fmt_m(m: Option<u64>) -> String {
    m.map_or("inf".into(), |m| m.to_string())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or(String::new(), fmt_f64)
}

fn write_table(out: &mut dyn Write, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Output of an experiment: a tidy per-replicate table and a summary.
pub trait Experiment: Serialize + Sized {
    fn write_tidy_csv(&self, out: &mut dyn Write) -> Result<()>;

    /// Summary document (every field except the per-replicate rows).
    fn summary_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

fn check_reps(reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(invalid("need at least one replicate"));
    }
    Ok(())
}

fn check_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() || n_grid.contains(&0) {
        return Err(invalid("sample-size grid must be nonempty and positive"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint {
    pub n: usize,
    pub m: Option<u64>,
    pub mean_l1: f64,
    pub sd_l1: f64,
}

/// L1 error of the Grenander estimator along a sample-size grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub m_rule: MRule,
    pub reps: usize,
    pub points: Vec<RatePoint>,
    /// Log-log slope of mean error against `n`.
    pub slope: f64,
    pub slope_se: f64,
    /// Set when the slope rests on too few replicates or points to trust.
    pub wide_ci: bool,
    /// `(n index, replicate, error)`.
    #[serde(skip)]
    pub errors: Vec<(usize, usize, f64)>,
}

impl Experiment for RateReport {
    fn write_tidy_csv(&self, out: &mut dyn Write) -> Result<()> {
        let rows = self.errors.iter().map(|&(g, r, e)| {
            let p = &self.points[g];
            vec![p.n.to_string(), fmt_m(p.m), r.to_string(), fmt_f64(e)]
        });
        write_table(out, &["n", "m", "rep", "l1"], rows)
    }
}

/// Mean L1 distance between `grenander_decreasing` of the observed ratios
/// and `f`, for each `n` in the grid, plus the log-log slope.
pub fn rate_l1_grenander(f: &DensitySpec, n_grid: &[usize], m_rule: MRule, reps: usize, rng: &RngContract) -> Result<RateReport> {
    if !f.is_decreasing() {
        return Err(invalid("rate experiment needs a decreasing density"));
    }
    check_reps(reps)?;
    check_grid(n_grid)?;
    let errors: Vec<(usize, usize, f64)> = (0..n_grid.len() * reps)
        .into_par_iter()
        .map(|i| {
            let (g, r) = (i / reps, i % reps);
            let n = n_grid[g];
            let s = sample_ratios(f, n, m_rule.m_for(n), &rng.child(g as u64).child(r as u64))?;
            Ok((g, r, density_l1(&grenander_decreasing(&s, (0.0, 1.0))?, f)))
        })
        .collect::<Result<_>>()?;
    let points: Vec<RatePoint> = n_grid
        .iter()
        .enumerate()
        .map(|(g, &n)| {
            let e: Vec<f64> = errors[g * reps..(g + 1) * reps].iter().map(|x| x.2).collect();
            let (mean_l1, sd_l1) = mean_sd(&e);
            RatePoint { n, m: m_rule.m_for(n), mean_l1, sd_l1 }
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_l1).collect();
    let (slope, slope_se) = if points.len() > 1 { loglog_slope(&xs, &ys) } else { (f64::NAN, f64::NAN) };
    Ok(RateReport { m_rule, reps, points, slope, slope_se, wide_ci: reps < 10 || !slope_se.is_finite(), errors })
}

/// Grenander L1 errors at one `n` for several `m`, each replicate sharing
/// its latent sample across all `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedMReport {
    pub n: usize,
    pub m_grid: Vec<Option<u64>>,
    pub mean_l1: Vec<f64>,
    /// For each consecutive pair of `m_grid`, the fraction of replicates
    /// whose error did not increase.
    pub frac_nonincreasing: Vec<f64>,
    /// `errors[r][j]` is replicate `r` at `m_grid[j]`.
    #[serde(skip)]
    pub errors: Vec<Vec<f64>>,
}

impl Experiment for PairedMReport {
    fn write_tidy_csv(&self, out: &mut dyn Write) -> Result<()> {
        let rows = self.errors.iter().enumerate().flat_map(|(r, row)| {
            row.iter().zip(&self.m_grid).map(move |(e, &m)| vec![self.n.to_string(), fmt_m(m), r.to_string(), fmt_f64(*e)])
        });
        write_table(out, &["n", "m", "rep", "l1"], rows)
    }
}

pub fn l1_error_by_m(f: &DensitySpec, n: usize, m_grid: &[Option<u64>], reps: usize, rng: &RngContract) -> Result<PairedMReport> {
    if !f.is_decreasing() {
        return Err(invalid("rate experiment needs a decreasing density"));
    }
    check_reps(reps)?;
    check_grid(&[n])?;
    if m_grid.contains(&Some(0)) {
        return Err(invalid("m must be at least 1"));
    }
    let errors: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let rc = rng.child(r as u64);
            let truth = sample_latent(f, n, &mut rc.rng(), 0.5);
            m_grid
                .iter()
                .enumerate()
                .map(|(j, &m)| {
                    let s: Vec<f64> = match m {
                        None => truth.iter().map(|t| t.s).collect(),
                        Some(m) => binomial_counts(&truth, m, &mut rc.child(j as u64 + 1).rng())?
                            .into_iter()
                            .map(|x| x as f64 / m as f64)
                            .collect(),
                    };
                    Ok(density_l1(&grenander_decreasing(&s, (0.0, 1.0))?, f))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mean_l1 = (0..m_grid.len()).map(|j| errors.iter().map(|e| e[j]).sum::<f64>() / reps as f64).collect();
    let frac_nonincreasing = (1..m_grid.len())
        .map(|j| errors.iter().filter(|e| e[j] <= e[j - 1]).count() as f64 / reps as f64)
        .collect();
    Ok(PairedMReport { n, m_grid: m_grid.to_vec(), mean_l1, frac_nonincreasing, errors })
}

/// Grenander error with `m = n^{1/3}` (too small) against `m = 10 n^{2/3}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalMProbe {
    pub too_small: RateReport,
    pub adequate: RateReport,
    /// Error ratio (too small / adequate) at the largest `n`.
    pub ratio: f64,
}

pub fn minimal_m_probe(f: &DensitySpec, n_grid: &[usize], reps: usize, rng: &RngContract) -> Result<MinimalMProbe> {
    let too_small = rate_l1_grenander(f, n_grid, MRule::Power { coef: 1.0, exponent: 1.0 / 3.0 }, reps, rng)?;
    let adequate = rate_l1_grenander(f, n_grid, MRule::Power { coef: 10.0, exponent: 2.0 / 3.0 }, reps, rng)?;
    let ratio = too_small.points.last().unwrap().mean_l1 / adequate.points.last().unwrap().mean_l1;
    Ok(MinimalMProbe { too_small, adequate, ratio })
}

/// Spread of the decreasing Grenander estimate at an interior point of the
/// uniform density across `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationReport {
    pub t0: f64,
    pub m_rule: MRule,
    /// `(n, mean, sd)` of the estimate at `t0`.
    pub points: Vec<(usize, f64, f64)>,
    /// Log-log slope of the sd against `n`.
    pub slope: f64,
    #[serde(skip)]
    pub values: Vec<(usize, usize, f64)>,
}

impl Experiment for FluctuationReport {
    fn write_tidy_csv(&self, out: &mut dyn Write) -> Result<()> {
        let rows = self.values.iter().map(|&(g, r, v)| vec![self.points[g].0.to_string(), r.to_string(), fmt_f64(v)]);
        write_table(out, &["n", "rep", "estimate"], rows)
    }
}

pub fn flat_fluctuation(n_grid: &[usize], t0: f64, m_rule: MRule, reps: usize, rng: &RngContract) -> Result<FluctuationReport> {
    if !(0.0 < t0 && t0 < 1.0) {
        return Err(invalid("t0 must lie in (0, 1)"));
    }
    if reps < 2 {
        return Err(invalid("need at least two replicates for a spread"));
    }
    check_grid(n_grid)?;
    let f = DensitySpec::uniform();
    let values: Vec<(usize, usize, f64)> = (0..n_grid.len() * reps)
        .into_par_iter()
        .map(|i| {
            let (g, r) = (i / reps, i % reps);
            let n = n_grid[g];
            let s = sample_ratios(&f, n, m_rule.m_for(n), &rng.child(g as u64).child(r as u64))?;
            Ok((g, r, grenander_decreasing(&s, (0.0, 1.0))?.eval(t0)?))
        })
        .collect::<Result<_>>()?;
    let points: Vec<(usize, f64, f64)> = n_grid
        .iter()
        .enumerate()
        .map(|(g, &n)| {
            let v: Vec<f64> = values[g * reps..(g + 1) * reps].iter().map(|x| x.2).collect();
            let (mean, sd) = mean_sd(&v);
            (n, mean, sd)
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.2).collect();
    let slope = if points.len() > 1 { loglog_slope(&xs, &ys).0 } else { f64::NAN };
    Ok(FluctuationReport { t0, m_rule, points, slope, values })
}

/// One `(spec, m)` row of the deviation bounds table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub spec: String,
    pub m: u64,
    pub deviation: f64,
    /// `f_min / (m + 1)`.
    pub lower: f64,
    /// `f_max √(2π) / √m`.
    pub upper: f64,
    /// Deviation restricted to `[a, 1 − a]`.
    pub truncated: f64,
    pub deviation_sqrt_m: f64,
    pub truncated_m: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub a: f64,
    pub violations: usize,
    pub rows: Vec<BoundRow>,
}

impl Experiment for BoundsReport {
    fn write_tidy_csv(&self, out: &mut dyn Write) -> Result<()> {
        let rows = self.rows.iter().map(|r| {
            vec![
                r.spec.clone(),
                r.m.to_string(),
                fmt_f64(r.deviation),
                fmt_f64(r.lower),
                fmt_f64(r.upper),
                fmt_f64(r.truncated),
                r.violation.to_string(),
            ]
        });
        write_table(out, &["spec", "m", "deviation", "lower", "upper", "truncated", "violation"], rows)
    }
}

/// Exact `sup |F^(m) − F|` for each spec and `m`, next to the bounds
/// `f_min/(m+1)` and `f_max √(2π)/√m`, and the sup over `[a, 1 − a]`.
/// Point-mass specs get the trivial bounds `0` and `+inf`.
pub fn deviation_bounds_report(specs: &[(String, DensitySpec)], m_grid: &[u64], a: f64) -> Result<BoundsReport> {
    if !(0.0 < a && a < 0.5) {
        return Err(invalid(format!("truncation a must lie in (0, 1/2), got {a}")));
    }
    let jobs: Vec<(usize, u64)> = (0..specs.len()).flat_map(|s| m_grid.iter().map(move |&m| (s, m))).collect();
    let rows: Vec<BoundRow> = jobs
        .into_par_iter()
        .map(|(s, m)| {
            let (name, f) = &specs[s];
            let law = MixtureLaw::new(f, m)?;
            let deviation = deviation_sup_with(f, &law, None);
            let truncated = deviation_sup_with(f, &law, Some((a, 1.0 - a)));
            let lower = f.f_min().unwrap_or(0.0) / (m as f64 + 1.0);
            let upper = f.f_max().map_or(f64::INFINITY, |x| x * (2.0 * std::f64::consts::PI / m as f64).sqrt());
            let violation = deviation < lower * (1.0 - 1e-9) || deviation > upper * (1.0 + 1e-9);
            Ok(BoundRow {
                spec: name.clone(),
                m,
                deviation,
                lower,
                upper,
                truncated,
                deviation_sqrt_m: deviation * (m as f64).sqrt(),
                truncated_m: truncated * m as f64,
                violation,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BoundsReport { a, violations: rows.iter().filter(|r| r.violation).count(), rows })
}

/// Settings of [`histogram_risk_experiment`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HistogramSetup {
    /// Risk is measured on `[a, b]`.
    pub a: f64,
    /// Defaults to `1 − a`.
    pub b: Option<f64>,
    pub reps: usize,
    /// Fixed bin count; by default `L = round(n^{1/3})`.
    pub bins: Option<usize>,
    pub m_rule: MRule,
    /// Score bin masses (mean squared error over bins inside `[a, b]`)
    /// instead of the integrated squared density error; required for
    /// point-mass specs.
    pub mass_mode: bool,
}

impl Default for HistogramSetup {
    fn default() -> Self {
        Self { a: 0.1, b: None, reps: 30, bins: None, m_rule: MRule::Power { coef: 1.0, exponent: 2.0 / 3.0 }, mass_mode: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskPoint {
    pub n: usize,
    pub m: Option<u64>,
    pub bins: usize,
    pub risk: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramReport {
    pub setup: HistogramSetup,
    pub points: Vec<RiskPoint>,
    /// `risk[g + 1] / risk[g]` along the grid.
    pub ratios: Vec<f64>,
    pub slope: f64,
    #[serde(skip)]
    pub losses: Vec<(usize, usize, f64)>,
}

impl Experiment for HistogramReport {
    fn write_tidy_csv(&self, out: &mut dyn Write) -> Result<()> {
        let rows = self.losses.iter().map(|&(g, r, l)| {
            let p = &self.points[g];
            vec![p.n.to_string(), fmt_m(p.m), p.bins.to_string(), r.to_string(), fmt_f64(l)]
        });
        write_table(out, &["n", "m", "bins", "rep", "loss"], rows)
    }
}

fn bin_masses_loss(est: &PiecewiseConstantDensity, f: &DensitySpec, (a, b): (f64, f64)) -> Result<f64> {
    let bins = est.heights().len();
    let tol = 1e-12;
    let mut total = 0.0;
    let mut used = 0usize;
    for (l, (lo, hi, h)) in est.segments().enumerate() {
        if lo < a - tol || hi > b + tol {
            continue;
        }
        // bins are [lo, hi) except the last, which is closed
        let truth = if l + 1 == bins { f.cdf(hi) - f.cdf_left(lo) } else { f.cdf_left(hi) - f.cdf_left(lo) };
        total += (h * (hi - lo) - truth).powi(2);
        used += 1;
    }
    if used == 0 {
        return Err(invalid("no histogram bin lies inside the risk window"));
    }
    Ok(total / used as f64)
}

/// Monte Carlo risk of `histogram_estimate` with `L = round(n^{1/3})` bins
/// on ratios drawn with `m` from the setup's rule.
pub fn histogram_risk_experiment(f: &DensitySpec, n_grid: &[usize], setup: &HistogramSetup, rng: &RngContract) -> Result<HistogramReport> {
    let window = (setup.a, setup.b.unwrap_or(1.0 - setup.a));
    if !(0.0 <= window.0 && window.0 < window.1 && window.1 <= 1.0) {
        return Err(invalid(format!("bad risk window [{}, {}]", window.0, window.1)));
    }
    if f.is_discrete() && !setup.mass_mode {
        return Err(invalid("point-mass specs need mass mode"));
    }
    if setup.bins == Some(0) {
        return Err(invalid("histogram needs at least one bin"));
    }
    check_reps(setup.reps)?;
    check_grid(n_grid)?;
    let reps = setup.reps;
    let bins_for = |n: usize| setup.bins.unwrap_or_else(|| ((n as f64).cbrt().round() as usize).max(1));
    let losses: Vec<(usize, usize, f64)> = (0..n_grid.len() * reps)
        .into_par_iter()
        .map(|i| {
            let (g, r) = (i / reps, i % reps);
            let n = n_grid[g];
            let s = sample_ratios(f, n, setup.m_rule.m_for(n), &rng.child(g as u64).child(r as u64))?;
            let est = histogram_estimate(&s, bins_for(n))?;
            let loss = if setup.mass_mode { bin_masses_loss(&est, f, window)? } else { density_lp_on(&est, f, 2, window) };
            Ok((g, r, loss))
        })
        .collect::<Result<_>>()?;
    let points: Vec<RiskPoint> = n_grid
        .iter()
        .enumerate()
        .map(|(g, &n)| {
            let l: Vec<f64> = losses[g * reps..(g + 1) * reps].iter().map(|x| x.2).collect();
            let (risk, sd) = mean_sd(&l);
            RiskPoint { n, m: setup.m_rule.m_for(n), bins: bins_for(n), risk, sd }
        })
        .collect();
    let ratios = points.windows(2).map(|w| w[1].risk / w[0].risk).collect();
    let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.risk).collect();
    let slope = if points.len() > 1 { loglog_slope(&xs, &ys).0 } else { f64::NAN };
    Ok(HistogramReport { setup: *setup, points, ratios, slope, losses })
}

/// Parameter varied by [`ucut_sensitivity_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    /// Binomial size; `inf` uses the latent values.
    M,
    /// Width `c_r − c_l` of the flat region with `c_r` held fixed; `mu` is
    /// set to the midpoint.
    Width,
    /// Both jumps `δ_l = δ_r`.
    Gaps,
    Mu,
    /// Fraction of the true normalized gaps passed as `d_l`, `d_r`.
    Kappa,
}

impl Sweep {
    pub fn default_values(self) -> Vec<f64> {
        match self {
            Sweep::M => vec![1e2, 1e3, 2e3, 5e3, 1e4, f64::INFINITY],
            Sweep::Width => vec![0.6, 0.4, 0.2, 0.1, 0.0],
            Sweep::Gaps => vec![0.5, 0.3, 0.2, 0.1, 0.01],
            Sweep::Mu => vec![0.35, 0.5, 0.7],
            Sweep::Kappa => vec![1.0, 0.9, 0.8, 0.5, 0.2, 0.1, 0.01],
        }
    }
}

impl FromStr for Sweep {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "m" => Sweep::M,
            "width" => Sweep::Width,
            "gaps" => Sweep::Gaps,
            "mu" => Sweep::Mu,
            "kappa" => Sweep::Kappa,
            _ => return Err(invalid(format!("unknown sweep {s:?}"))),
        })
    }
}

/// Baseline of a sensitivity sweep; one field is overridden per value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensitivitySetup {
    pub n: usize,
    /// `None` observes the latent values.
    pub m: Option<u64>,
    pub mu: f64,
    /// `d_l = kappa · δ̃_l`, `d_r = kappa · δ̃_r`.
    pub kappa: f64,
    pub gamma: f64,
    pub reps: usize,
}

impl Default for SensitivitySetup {
    fn default() -> Self {
        Self { n: 10_000, m: Some(1000), mu: 0.5, kappa: 0.8, gamma: 0.001, reps: 30 }
    }
}

/// Quantiles of `ĉ_r` over the feasible replicates of one sweep value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub value: f64,
    pub c_r_true: f64,
    pub n_feasible: usize,
    pub q05: Option<f64>,
    pub q25: Option<f64>,
    pub median: Option<f64>,
    pub q75: Option<f64>,
    pub q95: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub rep: usize,
    pub c_l_hat: Option<f64>,
    pub c_r_hat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub sweep: Sweep,
    pub base: ValleyParams,
    pub setup: SensitivitySetup,
    pub summary: Vec<SweepSummary>,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
}

impl Experiment for SensitivityReport {
    fn write_tidy_csv(&self, out: &mut dyn Write) -> Result<()> {
        let rows = self.rows.iter().map(|r| vec![fmt_f64(r.value), r.rep.to_string(), fmt_opt(r.c_l_hat), fmt_opt(r.c_r_hat)]);
        write_table(out, &["value", "rep", "c_l_hat", "c_r_hat"], rows)
    }
}

fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

struct SweepCase {
    f: DensitySpec,
    m: Option<u64>,
    config: UcutConfig,
}

fn sweep_case(base: &ValleyParams, sweep: Sweep, value: f64, setup: &SensitivitySetup) -> Result<SweepCase> {
    let (mut p, mut m, mut mu, mut kappa) = (*base, setup.m, setup.mu, setup.kappa);
    match sweep {
        Sweep::M if value.is_infinite() => m = None,
        Sweep::M if value >= 1.0 && value.fract() == 0.0 => m = Some(value as u64),
        Sweep::M => return Err(invalid(format!("m must be a positive integer or inf, got {value}"))),
        Sweep::Width => {
            p.c_l = snap(p.c_r - value);
            mu = snap(0.5 * (p.c_l + p.c_r));
        }
        Sweep::Gaps => (p.delta_l, p.delta_r) = (value, value),
        Sweep::Mu => mu = value,
        Sweep::Kappa => kappa = value,
    }
    let f = valley_density(&p)?;
    let v = f.valley().unwrap();
    let config = UcutConfig::new(mu, kappa * v.gap_l, kappa * v.gap_r).with_gamma(setup.gamma);
    config.validate()?;
    Ok(SweepCase { f, m, config })
}

/// Distribution of `ĉ_r` over replicates for each value of one parameter.
/// Replicate `r` uses stream `rng.child(r)` for every value, so values are
/// compared on common random numbers. Replicates where the search fails or
/// is infeasible are recorded with empty cutoffs.
pub fn ucut_sensitivity_suite(
    base: &ValleyParams,
    sweep: Sweep,
    values: &[f64],
    setup: &SensitivitySetup,
    rng: &RngContract,
) -> Result<SensitivityReport> {
    check_reps(setup.reps)?;
    if values.is_empty() {
        return Err(invalid("sweep needs at least one value"));
    }
    let cases: Vec<SweepCase> = values.iter().map(|&v| sweep_case(base, sweep, v, setup)).collect::<Result<_>>()?;
    let reps = setup.reps;
    let rows: Vec<SweepRow> = (0..values.len() * reps)
        .into_par_iter()
        .map(|i| {
            let (g, r) = (i / reps, i % reps);
            let case = &cases[g];
            let obs = simulate_dataset(&case.f, setup.n, case.m, 0.5, &rng.child(r as u64))?;
            let res = ucut(&obs, &case.config).ok();
            Ok(SweepRow {
                value: values[g],
                rep: r,
                c_l_hat: res.as_ref().and_then(|x| x.c_l_star),
                c_r_hat: res.and_then(|x| x.c_r_star),
            })
        })
        .collect::<Result<_>>()?;
    let summary = values
        .iter()
        .enumerate()
        .map(|(g, &value)| {
            let mut c: Vec<f64> = rows[g * reps..(g + 1) * reps].iter().filter_map(|r| r.c_r_hat).collect();
            c.sort_by(f64::total_cmp);
            let q = |p: f64| (!c.is_empty()).then(|| quantile(&c, p));
            SweepSummary {
                value,
                c_r_true: cases[g].f.valley().unwrap().c_r,
                n_feasible: c.len(),
                q05: q(0.05),
                q25: q(0.25),
                median: q(0.5),
                q75: q(0.75),
                q95: q(0.95),
            }
        })
        .collect();
    Ok(SensitivityReport { sweep, base: *base, setup: *setup, summary, rows })
}
