//! Cutoff selection for U-shaped CFR distributions: fit a decreasing
//! Grenander estimator left of an interior point `mu` and an increasing one
//! right of it, then grid-search the cutoff pair `(c_l, c_r)` that
//! maximizes the simplified likelihood among pairs passing the density-gap
//! check.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{Fraction, Monotone, ObservationSet, PiecewiseConstantDensity};
use crate::shape::{grenander_decreasing, grenander_increasing};

/// Inputs of the cutoff search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcutConfig {
    /// A point inside the flat middle region.
    pub mu: f64,
    /// Required density drop at the left cutoff.
    pub d_l: f64,
    /// Required density rise at the right cutoff.
    pub d_r: f64,
    /// Largest left cutoff tried.
    pub c_l_max: f64,
    /// Smallest right cutoff tried.
    pub c_r_min: f64,
    /// Grid spacing.
    pub gamma: f64,
}

impl Default for UcutConfig {
    /// `mu = 0.5`, `d_l = 0.1`, `d_r = 0.01`, `gamma = 0.001`, search
    /// bounds `mu ∓ 0.05`.
    fn default() -> Self {
        Self::new(0.5, 0.1, 0.01)
    }
}

impl UcutConfig {
    /// Config with `gamma = 0.001` and search bounds `mu ∓ 0.05` (clipped
    /// to `[0, 1]`).
    pub fn new(mu: f64, d_l: f64, d_r: f64) -> Self {
        let snap = |x: f64| (x * 1e12).round() / 1e12;
        Self { mu, d_l, d_r, c_l_max: snap((mu - 0.05).max(0.0)), c_r_min: snap((mu + 0.05).min(1.0)), gamma: 0.001 }
    }

    pub fn with_bounds(mut self, c_l_max: f64, c_r_min: f64) -> Self {
        self.c_l_max = c_l_max;
        self.c_r_min = c_r_min;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.mu, self.d_l, self.d_r, self.c_l_max, self.c_r_min, self.gamma];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(invalid("config values must be finite"));
        }
        if !(self.gamma > 0.0) {
            return Err(invalid(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.d_l < 0.0 || self.d_r < 0.0 {
            return Err(invalid("density gaps must be nonnegative"));
        }
        if !(0.0 <= self.c_l_max && self.c_l_max < self.mu && self.mu < self.c_r_min && self.c_r_min <= 1.0) {
            return Err(invalid(format!(
                "need 0 <= c_l_max < mu < c_r_min <= 1, got c_l_max={}, mu={}, c_r_min={}",
                self.c_l_max, self.mu, self.c_r_min
            )));
        }
        Ok(())
    }

    /// The two cutoff grids as exact rationals:
    /// `{0, γ, 2γ, …} ∩ [0, c_l_max]` and `{c_r_min, c_r_min + γ, …} ∩ [c_r_min, 1]`.
    pub fn grids(&self) -> Result<(Vec<Fraction>, Vec<Fraction>)> {
        self.validate()?;
        let exact = |x: f64, what: &str| Fraction::from_decimal(x).ok_or_else(|| invalid(format!("{what} is not representable")));
        let gamma = exact(self.gamma, "gamma")?;
        let c_l_max = exact(self.c_l_max, "c_l_max")?;
        let c_r_min = exact(self.c_r_min, "c_r_min")?;
        let left: Vec<Fraction> = (0..).map(|k| gamma.scale(k)).take_while(|c| *c <= c_l_max).collect();
        let right: Vec<Fraction> =
            (0..).map(|k| c_r_min.add(gamma.scale(k))).take_while(|c| *c <= Fraction::one()).collect();
        Ok((left, right))
    }
}

/// Outcome of [`ucut`]. Cutoffs and likelihood are `None` when no grid pair
/// passed the gap check.
#[derive(Debug, Clone, PartialEq)]
pub struct UcutResult {
    pub c_l_star: Option<f64>,
    pub c_r_star: Option<f64>,
    pub g_l_tilde: PiecewiseConstantDensity,
    pub g_r_tilde: PiecewiseConstantDensity,
    pub alpha_l_mu: f64,
    pub loglik: Option<f64>,
    pub feasible: bool,
}

#[derive(Serialize)]
struct UcutJson {
    c_l: Option<f64>,
    c_r: Option<f64>,
    alpha_l_mu: f64,
    loglik: Option<f64>,
    feasible: bool,
    g_l: Vec<[f64; 3]>,
    g_r: Vec<[f64; 3]>,
}

impl UcutResult {
    /// JSON document `{c_l, c_r, alpha_l_mu, loglik, feasible, g_l, g_r}`
    /// with densities as `[left, right, height]` rows.
    pub fn to_json(&self) -> Result<String> {
        let rows = |d: &PiecewiseConstantDensity| d.segments().map(|(l, r, h)| [l, r, h]).collect();
        crate::format::to_json_string(&UcutJson {
            c_l: self.c_l_star,
            c_r: self.c_r_star,
            alpha_l_mu: self.alpha_l_mu,
            loglik: self.loglik,
            feasible: self.feasible,
            g_l: rows(&self.g_l_tilde),
            g_r: rows(&self.g_r_tilde),
        })
    }
}

/// Empirical masses left of `x`, in `(x, y]`, and right of `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassSplit {
    pub n_l: usize,
    pub n_mid: usize,
    pub n_r: usize,
    pub alpha_l: f64,
    pub alpha_mid: f64,
    pub alpha_r: f64,
}

fn exact_cut(x: f64) -> Result<Fraction> {
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(format!("cut {x} outside [0, 1]")));
    }
    Fraction::from_decimal(x).ok_or_else(|| invalid(format!("cut {x} is not representable")))
}

/// `N_l = #{ŝ_i <= x}`, `N_mid = #{x < ŝ_i <= y}`, `N_r = #{ŝ_i > y}` and
/// the corresponding fractions of `n`.
pub fn empirical_masses(obs: &ObservationSet, x: f64, y: f64) -> Result<MassSplit> {
    if !(x < y) {
        return Err(invalid(format!("need x < y, got {x} and {y}")));
    }
    let (fx, fy) = (exact_cut(x)?, exact_cut(y)?);
    let n = obs.len();
    let n_l = (0..n).filter(|&i| obs.le(i, fx)).count();
    let n_le_y = (0..n).filter(|&i| obs.le(i, fy)).count();
    let (n_mid, n_r) = (n_le_y - n_l, n - n_le_y);
    let nf = n as f64;
    Ok(MassSplit { n_l, n_mid, n_r, alpha_l: n_l as f64 / nf, alpha_mid: n_mid as f64 / nf, alpha_r: n_r as f64 / nf })
}

/// The two Grenander halves around `mu` and `α̂_l(mu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halves {
    /// Decreasing fit of `{ŝ_i <= mu}` on `[0, mu]`.
    pub g_l: PiecewiseConstantDensity,
    /// Increasing fit of `{ŝ_i > mu}` on `[mu, 1]`.
    pub g_r: PiecewiseConstantDensity,
    pub alpha_l_mu: f64,
}

/// Fits the decreasing Grenander estimator to the observations `<= mu` on
/// `[0, mu]` and the increasing one to those `> mu` on `(mu, 1]`, each
/// normalized on its own half.
pub fn fit_halves(obs: &ObservationSet, mu: f64) -> Result<Halves> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(invalid(format!("mu must lie in (0, 1), got {mu}")));
    }
    let fmu = exact_cut(mu)?;
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for i in 0..obs.len() {
        if obs.le(i, fmu) {
            left.push(obs.ratio(i));
        } else {
            right.push(obs.ratio(i));
        }
    }
    if left.is_empty() {
        return Err(Error::EmptyHalf("left"));
    }
    if right.is_empty() {
        return Err(Error::EmptyHalf("right"));
    }
    let alpha_l_mu = left.len() as f64 / obs.len() as f64;
    Ok(Halves {
        g_l: grenander_decreasing(&left, (0.0, mu))?,
        g_r: grenander_increasing(&right, (mu, 1.0))?,
        alpha_l_mu,
    })
}

/// Gap thresholds `(d̃_l, d̃_r)` the fitted halves must reach at `c_l` and
/// `c_r`:
///
/// `d̃_l = α̂_mid(c_l, mu) / (α̂_l(mu) (mu - c_l)) + d_l / α̂_l(mu)`,
/// `d̃_r = α̂_mid(mu, c_r) / ((1 - α̂_l(mu)) (c_r - mu)) + d_r / (1 - α̂_l(mu))`.
pub fn gap_thresholds(obs: &ObservationSet, c_l: f64, c_r: f64, mu: f64, d_l: f64, d_r: f64) -> Result<(f64, f64)> {
    if !(c_l < mu && mu < c_r) {
        return Err(invalid(format!("need c_l < mu < c_r, got {c_l}, {mu}, {c_r}")));
    }
    let left = empirical_masses(obs, c_l, mu)?;
    let right = empirical_masses(obs, mu, c_r)?;
    let alpha_l_mu = right.alpha_l;
    if alpha_l_mu <= 0.0 || alpha_l_mu >= 1.0 {
        return Err(Error::DegenerateSplit(alpha_l_mu));
    }
    Ok((
        thresholds_left(left.n_mid, obs.len(), alpha_l_mu, mu - c_l, d_l),
        thresholds_right(right.n_mid, obs.len(), alpha_l_mu, c_r - mu, d_r),
    ))
}

fn thresholds_left(n_mid: usize, n: usize, alpha_l_mu: f64, width: f64, d_l: f64) -> f64 {
    (n_mid as f64 / n as f64) / (alpha_l_mu * width) + d_l / alpha_l_mu
}

fn thresholds_right(n_mid: usize, n: usize, alpha_l_mu: f64, width: f64, d_r: f64) -> f64 {
    (n_mid as f64 / n as f64) / ((1.0 - alpha_l_mu) * width) + d_r / (1.0 - alpha_l_mu)
}

// k log(k / n), with 0 log 0 = 0
fn xlogx(k: usize, n: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * (k as f64 / n).ln()
    }
}

// Σ log g over a region plus the renormalization by the region's mass
// under g; -inf when observations sit in a region of zero fitted mass.
fn region_term(sum_log: f64, count: usize, mass: f64) -> f64 {
    if count == 0 {
        return 0.0;
    }
    if !(mass > 0.0) {
        return f64::NEG_INFINITY;
    }
    sum_log - count as f64 * mass.ln()
}

/// Simplified log-likelihood of the cutoff pair `(c_l, c_r)`:
///
/// `Σ_{ŝ_i <= c_l} log g_l(ŝ_i) + Σ_{ŝ_i > c_r} log g_r(ŝ_i)
///  + N_l log α̂_l + N_mid log(α̂_mid / (c_r - c_l)) + N_r log α̂_r`
///
/// with `g_l = g̃_l / G̃_l(c_l)` and `g_r = g̃_r / (1 - G̃_r(c_r))`, i.e. the
/// fitted halves renormalized to their own region. Returns `-inf` when an
/// observation falls where the renormalized density vanishes.
pub fn simplified_loglik(
    obs: &ObservationSet,
    c_l: f64,
    c_r: f64,
    g_l: &PiecewiseConstantDensity,
    g_r: &PiecewiseConstantDensity,
) -> Result<f64> {
    let m = empirical_masses(obs, c_l, c_r)?;
    let (fl, fr) = (exact_cut(c_l)?, exact_cut(c_r)?);
    let (mut sum_l, mut sum_r) = (0.0, 0.0);
    for i in 0..obs.len() {
        let x = obs.ratio(i);
        if obs.le(i, fl) {
            sum_l += g_l.eval(x)?.ln();
        } else if !obs.le(i, fr) {
            sum_r += g_r.eval(x)?.ln();
        }
    }
    let n = obs.len() as f64;
    let total = region_term(sum_l, m.n_l, g_l.cdf(c_l))
        + region_term(sum_r, m.n_r, g_r.upper_tail(c_r))
        + xlogx(m.n_l, n)
        + xlogx(m.n_r, n)
        + mid_term(m.n_mid, n, c_r - c_l);
    Ok(if total.is_nan() { f64::NEG_INFINITY } else { total })
}

fn mid_term(n_mid: usize, n: f64, width: f64) -> f64 {
    if n_mid == 0 {
        0.0
    } else {
        n_mid as f64 * (n_mid as f64 / (n * width)).ln()
    }
}

// Everything about one candidate cutoff that does not depend on the other.
struct Side {
    cut: f64,
    count: usize,
    term: f64,
    passes: bool,
}

/// Runs the cutoff search. The left grid is the outer loop; a pair
/// replaces the incumbent only when it passes the gap check and its
/// likelihood is strictly larger, so ties go to the first pair in loop
/// order (smaller `c_l`, then smaller `c_r`).
pub fn ucut(obs: &ObservationSet, config: &UcutConfig) -> Result<UcutResult> {
    let (grid_l, grid_r) = config.grids()?;
    let halves = fit_halves(obs, config.mu)?;
    let n = obs.len();
    let nf = n as f64;
    let fmu = exact_cut(config.mu)?;
    let sorted = obs.sorted_indices();
    let n_left = sorted.iter().filter(|&&i| obs.le(i, fmu)).count();
    let alpha_l_mu = halves.alpha_l_mu;

    // prefix sums of log g̃_l over the sorted left half
    let mut prefix = vec![0.0];
    for &i in &sorted[..n_left] {
        prefix.push(prefix[prefix.len() - 1] + halves.g_l.eval(obs.ratio(i))?.ln());
    }
    // suffix sums of log g̃_r over the sorted right half
    let right = &sorted[n_left..];
    let mut suffix = vec![0.0; right.len() + 1];
    for j in (0..right.len()).rev() {
        suffix[j] = suffix[j + 1] + halves.g_r.eval(obs.ratio(right[j]))?.ln();
    }

    let mut lefts = Vec::with_capacity(grid_l.len());
    let mut k = 0;
    for &c in &grid_l {
        while k < n_left && obs.le(sorted[k], c) {
            k += 1;
        }
        let cut = c.to_f64();
        let threshold = thresholds_left(n_left - k, n, alpha_l_mu, config.mu - cut, config.d_l);
        let passes = halves.g_l.eval(cut)? >= threshold;
        let term = region_term(prefix[k], k, halves.g_l.cdf(cut)) + xlogx(k, nf);
        lefts.push(Side { cut, count: k, term, passes });
    }

    let mut rights = Vec::with_capacity(grid_r.len());
    let mut j = 0;
    for &c in &grid_r {
        while j < right.len() && obs.le(right[j], c) {
            j += 1;
        }
        let cut = c.to_f64();
        let n_r = right.len() - j;
        let threshold = thresholds_right(j, n, alpha_l_mu, cut - config.mu, config.d_r);
        let passes = halves.g_r.eval(cut)? >= threshold;
        let term = region_term(suffix[j], n_r, halves.g_r.upper_tail(cut)) + xlogx(n_r, nf);
        rights.push(Side { cut, count: n_r, term, passes });
    }

    let mut best: Option<(usize, usize)> = None;
    let mut best_ll = f64::NEG_INFINITY;
    for (a, l) in lefts.iter().enumerate() {
        if !l.passes || l.term == f64::NEG_INFINITY {
            continue;
        }
        for (b, r) in rights.iter().enumerate() {
            if !r.passes {
                continue;
            }
            let n_mid = n - l.count - r.count;
            let ll = l.term + r.term + mid_term(n_mid, nf, r.cut - l.cut);
            if ll > best_ll {
                best_ll = ll;
                best = Some((a, b));
            }
        }
    }

    let (c_l_star, c_r_star, loglik) = match best {
        Some((a, b)) => (Some(lefts[a].cut), Some(rights[b].cut), Some(best_ll)),
        None => (None, None, None),
    };
    log::debug!("ucut: {} x {} grid, best {:?}", grid_l.len(), grid_r.len(), (c_l_star, c_r_star));
    Ok(UcutResult {
        c_l_star,
        c_r_star,
        g_l_tilde: halves.g_l,
        g_r_tilde: halves.g_r,
        alpha_l_mu,
        loglik,
        feasible: best.is_some(),
    })
}

/// The fitted density on `[0, 1]` implied by a feasible result:
/// `α̂_l g̃_l / G̃_l(ĉ_l)` on `[0, ĉ_l]`, the flat height
/// `α̂_mid / (ĉ_r - ĉ_l)` on `(ĉ_l, ĉ_r]`, and `α̂_r g̃_r / (1 - G̃_r(ĉ_r))`
/// beyond.
pub fn stitched_density(obs: &ObservationSet, result: &UcutResult) -> Result<PiecewiseConstantDensity> {
    let (c_l, c_r) = match (result.c_l_star, result.c_r_star) {
        (Some(l), Some(r)) => (l, r),
        _ => return Err(invalid("no density for an infeasible result")),
    };
    let m = empirical_masses(obs, c_l, c_r)?;
    let mut breaks = vec![0.0];
    let mut heights = Vec::new();
    let mut push = |r: f64, h: f64, breaks: &mut Vec<f64>| {
        if r > breaks[breaks.len() - 1] {
            breaks.push(r);
            heights.push(h);
        }
    };
    let mass_l = result.g_l_tilde.cdf(c_l);
    if m.n_l > 0 {
        for (_, r, h) in result.g_l_tilde.segments() {
            push(r.min(c_l), m.alpha_l * h / mass_l, &mut breaks);
        }
    }
    push(c_r, m.alpha_mid / (c_r - c_l), &mut breaks);
    let mass_r = result.g_r_tilde.upper_tail(c_r);
    if m.n_r > 0 {
        for (_, r, h) in result.g_r_tilde.segments() {
            push(r, m.alpha_r * h / mass_r, &mut breaks);
        }
    }
    PiecewiseConstantDensity::new(breaks, heights, Monotone::None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ratios(v: &[f64]) -> ObservationSet {
        ObservationSet::from_ratios(v.to_vec()).unwrap()
    }

    #[test]
    fn masses_follow_boundary_conventions() {
        let m = empirical_masses(&ratios(&[0.1, 0.5, 0.9]), 0.3, 0.7).unwrap();
        assert_eq!((m.n_l, m.n_mid, m.n_r), (1, 1, 1));
        assert_abs_diff_eq!(m.alpha_l + m.alpha_mid + m.alpha_r, 1.0);
        let m = empirical_masses(&ratios(&[0.3]), 0.3, 0.7).unwrap();
        assert_eq!((m.alpha_l, m.alpha_mid, m.alpha_r), (1.0, 0.0, 0.0));
        let m = empirical_masses(&ratios(&[0.7]), 0.3, 0.7).unwrap();
        assert_eq!((m.alpha_l, m.alpha_mid, m.alpha_r), (0.0, 1.0, 0.0));
        // counts compare exactly: 3/10 <= 0.3
        let obs = ObservationSet::from_counts(10, vec![3, 7]).unwrap();
        let m = empirical_masses(&obs, 0.3, 0.7).unwrap();
        assert_eq!((m.n_l, m.n_mid, m.n_r), (1, 1, 0));
    }

    #[test]
    fn halves_examples() {
        let h = fit_halves(&ratios(&[0.2, 0.8]), 0.5).unwrap();
        assert_eq!(h.alpha_l_mu, 0.5);
        assert_eq!(h.g_l.breakpoints(), &[0.0, 0.2, 0.5]);
        assert_abs_diff_eq!(h.g_l.heights()[0], 5.0, epsilon = 1e-12);
        assert_eq!(h.g_l.heights()[1], 0.0);
        assert!(matches!(fit_halves(&ratios(&[0.1, 0.4]), 0.5), Err(Error::EmptyHalf("right"))));
        assert!(matches!(fit_halves(&ratios(&[0.6]), 0.5), Err(Error::EmptyHalf("left"))));
        // a sample at mu belongs to the left half
        let h = fit_halves(&ratios(&[0.5, 0.75]), 0.5).unwrap();
        assert_eq!(h.alpha_l_mu, 0.5);
    }

    #[test]
    fn symmetric_data_gives_mirrored_halves() {
        let xs = [0.0625, 0.125, 0.125, 0.25, 0.4375];
        let all: Vec<f64> = xs.iter().cloned().chain(xs.iter().map(|x| 1.0 - x)).collect();
        let h = fit_halves(&ratios(&all), 0.5).unwrap();
        let back: Vec<f64> = h.g_r.breakpoints().iter().rev().map(|t| 1.0 - t).collect();
        assert_eq!(h.g_l.breakpoints(), &back[..]);
        let rev: Vec<f64> = h.g_r.heights().iter().rev().cloned().collect();
        for (a, b) in h.g_l.heights().iter().zip(&rev) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn threshold_examples() {
        let obs = ratios(&[0.1, 0.4, 0.6, 0.9]);
        let (l, r) = gap_thresholds(&obs, 0.3, 0.7, 0.5, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(l, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r, 2.5, epsilon = 1e-12);
        let (l, _) = gap_thresholds(&obs, 0.3, 0.7, 0.5, 0.1, 0.0).unwrap();
        assert_abs_diff_eq!(l, 2.7, epsilon = 1e-12);
        let empty_mid = ratios(&[0.1, 0.9]);
        assert_eq!(gap_thresholds(&empty_mid, 0.3, 0.7, 0.5, 0.0, 0.0).unwrap(), (0.0, 0.0));
        assert!(matches!(gap_thresholds(&ratios(&[0.1]), 0.3, 0.7, 0.5, 0.0, 0.0), Err(Error::DegenerateSplit(_))));
    }

    #[test]
    fn loglik_examples() {
        let obs = ratios(&[0.2, 0.8]);
        let h = fit_halves(&obs, 0.5).unwrap();
        let ll = simplified_loglik(&obs, 0.25, 0.75, &h.g_l, &h.g_r).unwrap();
        assert_abs_diff_eq!(ll, 2.0 * 5f64.ln() + 2.0 * 0.5f64.ln(), epsilon = 1e-12);
        // everything in the middle: -n log(c_r - c_l)
        let obs = ratios(&[0.4, 0.45, 0.55, 0.6]);
        let h = fit_halves(&obs, 0.5).unwrap();
        let ll = simplified_loglik(&obs, 0.2, 0.7, &h.g_l, &h.g_r).unwrap();
        assert_abs_diff_eq!(ll, -4.0 * 0.5f64.ln(), epsilon = 1e-12);
        let wider = simplified_loglik(&obs, 0.1, 0.8, &h.g_l, &h.g_r).unwrap();
        assert!(wider < ll);
    }

    #[test]
    fn grid_search_matches_direct_evaluation() {
        let xs: Vec<f64> = (0..40).map(|i| ((i * 37) % 41) as f64 / 41.0).map(|x: f64| x.powi(3)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - x * 0.5).collect();
        let obs = ratios(&[xs, ys].concat());
        let cfg = UcutConfig::new(0.5, 0.0, 0.0).with_gamma(0.01);
        let res = ucut(&obs, &cfg).unwrap();
        assert!(res.feasible);
        let (c_l, c_r) = (res.c_l_star.unwrap(), res.c_r_star.unwrap());
        let direct = simplified_loglik(&obs, c_l, c_r, &res.g_l_tilde, &res.g_r_tilde).unwrap();
        assert_abs_diff_eq!(res.loglik.unwrap(), direct, epsilon = 1e-9);
        // brute force over the same grid
        let (gl, gr) = cfg.grids().unwrap();
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for l in &gl {
            for r in &gr {
                let (l, r) = (l.to_f64(), r.to_f64());
                let (tl, tr) = gap_thresholds(&obs, l, r, 0.5, 0.0, 0.0).unwrap();
                let ok = res.g_l_tilde.eval(l).unwrap() >= tl && res.g_r_tilde.eval(r).unwrap() >= tr;
                let ll = simplified_loglik(&obs, l, r, &res.g_l_tilde, &res.g_r_tilde).unwrap();
                if ok && ll > best.0 + 1e-9 {
                    best = (ll, l, r);
                }
            }
        }
        assert_eq!((best.1, best.2), (c_l, c_r));
        let f = stitched_density(&obs, &res).unwrap();
        assert_abs_diff_eq!(f.mass(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn config_validation_and_grids() {
        assert!(UcutConfig::default().with_gamma(0.0).validate().is_err());
        assert!(UcutConfig::default().with_bounds(0.6, 0.7).validate().is_err());
        let cfg = UcutConfig::new(0.5, 0.1, 0.1).with_gamma(0.1).with_bounds(0.3, 0.7);
        let (l, r) = cfg.grids().unwrap();
        let lf: Vec<f64> = l.iter().map(|c| c.to_f64()).collect();
        let rf: Vec<f64> = r.iter().map(|c| c.to_f64()).collect();
        assert_eq!(lf, vec![0.0, 0.1, 0.2, 0.3]);
        assert_eq!(rf, vec![0.7, 0.8, 0.9, 1.0]);
        let cfg = UcutConfig::new(0.35, 0.0, 0.0);
        assert_eq!((cfg.c_l_max, cfg.c_r_min), (0.3, 0.4));
        // gamma wider than the left range leaves the single point 0
        let cfg = UcutConfig::new(0.5, 0.0, 0.0).with_gamma(0.5).with_bounds(0.3, 0.6);
        assert_eq!(cfg.grids().unwrap().0.len(), 1);
    }

    #[test]
    fn infeasible_result_serializes_nulls() {
        let obs = ratios(&[0.1, 0.2, 0.3, 0.6, 0.7, 0.8]);
        let res = ucut(&obs, &UcutConfig::new(0.5, 100.0, 100.0)).unwrap();
        assert!(!res.feasible);
        let v: serde_json::Value = serde_json::from_str(&res.to_json().unwrap()).unwrap();
        assert!(v["c_r"].is_null());
        assert_eq!(v["feasible"], false);
        assert_eq!(v["g_l"].as_array().unwrap().len(), res.g_l_tilde.heights().len());
    }
}
