//! The binomial mixture law of `ŝ = X/m` when `s ~ F` and
//! `X | s ~ Binomial(m, s)`, computed from an analytic [`DensitySpec`].

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{invalid, Result};
use crate::model::{DensitySpec, Label, ObservationSet, Piece, RngContract, Truth};
use crate::special::{beta_inc_diff, integrate, ln_choose};

/// Largest `m` the exact law is computed for.
pub const MAX_M: u64 = 100_000;

/// Exact law of `ŝ` on the lattice `{0, 1/m, …, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureLaw {
    m: u64,
    pmf: Vec<f64>,
    // cdf[k] = P(X <= k)
    cdf: Vec<f64>,
}

impl MixtureLaw {
    pub fn new(f: &DensitySpec, m: u64) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(invalid(format!("m must lie in 1..={MAX_M}, got {m}")));
        }
        let pmf = if f.is_discrete() { atoms_pmf(f.atoms(), m) } else { pieces_pmf(f, m) };
        let mut cdf = Vec::with_capacity(pmf.len());
        // Neumaier-compensated running sum
        let (mut s, mut c) = (0.0f64, 0.0f64);
        for &p in &pmf {
            let t = s + p;
            c += if s.abs() >= p.abs() { (s - t) + p } else { (p - t) + s };
            s = t;
            cdf.push((s + c).min(1.0));
        }
        Ok(Self { m, pmf, cdf })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// `P(ŝ = k/m)` for `k = 0..=m`.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// `P(X <= k)`.
    pub fn cdf_at_count(&self, k: u64) -> f64 {
        self.cdf[k.min(self.m) as usize]
    }

    /// `F^(m)(x) = P(ŝ <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match self.last_count_at_most(x) {
            Some(k) => self.cdf[k as usize],
            None => 0.0,
        }
    }

    /// Left limit `F^(m)(x-) = P(ŝ < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x > 1.0 {
            return 1.0;
        }
        match self.last_count_at_most(x) {
            Some(k) if (k as f64 / self.m as f64) == x => if k == 0 { 0.0 } else { self.cdf[k as usize - 1] },
            Some(k) => self.cdf[k as usize],
            None => 0.0,
        }
    }

    // largest k with k/m <= x, compared as k/m in floating point so that the
    // lattice values produced elsewhere map back to their own count
    fn last_count_at_most(&self, x: f64) -> Option<u64> {
        let m = self.m as f64;
        let mut k = (x * m).floor().clamp(0.0, m) as u64;
        while k < self.m && (k + 1) as f64 / m <= x {
            k += 1;
        }
        while k > 0 && k as f64 / m > x {
            k -= 1;
        }
        if k as f64 / m <= x {
            Some(k)
        } else {
            None
        }
    }
}

fn ln_binom_pmf(m: u64, k: u64, x: f64) -> f64 {
    let (kf, rest) = (k as f64, (m - k) as f64);
    let a = if k == 0 { 0.0 } else { kf * x.ln() };
    let b = if k == m { 0.0 } else { rest * (-x).ln_1p() };
    ln_choose(m, k) + a + b
}

fn atoms_pmf(atoms: &[(f64, f64)], m: u64) -> Vec<f64> {
    (0..=m)
        .map(|k| {
            atoms
                .iter()
                .map(|&(x, w)| match (x == 0.0, x == 1.0) {
                    (true, _) => w * f64::from(k == 0),
                    (_, true) => w * f64::from(k == m),
                    _ => w * ln_binom_pmf(m, k, x).exp(),
                })
                .sum()
        })
        .collect()
}

// ∫ C(m,k) u^k (1-u)^(m-k) g(u) du over each piece, divided by Z. A linear
// piece α + βu reduces to incomplete-beta differences through
// C(m,k) u^k (1-u)^(m-k) = Beta(u; k+1, m-k+1) / (m+1) and
// u · C(m,k) u^k (1-u)^(m-k) = (k+1)/((m+1)(m+2)) · Beta(u; k+2, m-k+1).
fn pieces_pmf(f: &DensitySpec, m: u64) -> Vec<f64> {
    let mf = m as f64;
    let z = f.normalization();
    (0..=m)
        .map(|k| {
            let (a1, b1) = ((k + 1) as f64, (m - k + 1) as f64);
            let mut total = 0.0;
            for piece in f.pieces() {
                total += match *piece {
                    Piece::Linear { lo, hi, intercept, slope } => {
                        let mut v = intercept / (mf + 1.0) * beta_inc_diff(a1, b1, lo, hi);
                        if slope != 0.0 {
                            v += slope * a1 / ((mf + 1.0) * (mf + 2.0)) * beta_inc_diff(a1 + 1.0, b1, lo, hi);
                        }
                        v
                    }
                    Piece::Beta { lo, hi, base, scale, alpha, beta } => {
                        let flat = base / (mf + 1.0) * beta_inc_diff(a1, b1, lo, hi);
                        flat + scale * beta_piece_term(m, k, lo, hi, alpha, beta)
                    }
                };
            }
            (total / z).max(0.0)
        })
        .collect()
}

// ∫ C(m,k) u^k (1-u)^(m-k) Beta((u-lo)/w; α, β)/w du over the part of
// [lo, hi] where the binomial kernel is not negligible. Written in
// t = (u - lo)/w; an integrable endpoint singularity of the beta factor is
// removed by the substitution v = t^α (or v = (1-t)^β at the right end).
fn beta_piece_term(m: u64, k: u64, lo: f64, hi: f64, alpha: f64, beta: f64) -> f64 {
    let mf = m as f64;
    let mean = (k as f64 + 1.0) / (mf + 2.0);
    let sd = (mean * (1.0 - mean) / (mf + 3.0)).sqrt();
    let w = hi - lo;
    let t0 = (((mean - 40.0 * sd) - lo) / w).clamp(0.0, 1.0);
    let t1 = (((mean + 40.0 * sd) - lo) / w).clamp(0.0, 1.0);
    if !(t1 > t0) {
        return 0.0;
    }
    let ln_c = ln_choose(m, k) - crate::special::ln_beta(alpha, beta);
    let (kf, rest) = (k as f64, (m - k) as f64);
    let ln_kernel = |t: f64| {
        let u = lo + w * t;
        let a = if k == 0 { 0.0 } else { kf * u.ln() };
        let b = if k == m { 0.0 } else { rest * (-u).ln_1p() };
        ln_c + a + b
    };
    let tol = 1e-16;
    let mut total = 0.0;
    let split = 0.5f64.clamp(t0, t1);
    if split > t0 {
        total += if alpha < 1.0 {
            let g = |v: f64| {
                let t = v.powf(1.0 / alpha);
                (ln_kernel(t) + (beta - 1.0) * (-t).ln_1p()).exp() / alpha
            };
            integrate(g, t0.powf(alpha), split.powf(alpha), tol)
        } else {
            let g = |t: f64| (ln_kernel(t) + (alpha - 1.0) * t.ln() + (beta - 1.0) * (-t).ln_1p()).exp();
            integrate(g, t0, split, tol)
        };
    }
    if t1 > split {
        total += if beta < 1.0 {
            let g = |v: f64| {
                let t = 1.0 - v.powf(1.0 / beta);
                (ln_kernel(t) + (alpha - 1.0) * t.ln()).exp() / beta
            };
            integrate(g, (1.0 - t1).powf(beta), (1.0 - split).powf(beta), tol)
        } else {
            let g = |t: f64| (ln_kernel(t) + (alpha - 1.0) * t.ln() + (beta - 1.0) * (-t).ln_1p()).exp();
            integrate(g, split, t1, tol)
        };
    }
    total
}

/// `P(ŝ = k/m)` for `k = 0..=m`.
pub fn mixture_pmf(f: &DensitySpec, m: u64) -> Result<Vec<f64>> {
    Ok(MixtureLaw::new(f, m)?.pmf)
}

/// `F^(m)(x) = P(ŝ <= x)`.
pub fn mixture_cdf(f: &DensitySpec, m: u64, x: f64) -> Result<f64> {
    Ok(MixtureLaw::new(f, m)?.cdf(x))
}

/// `sup_x |F^(m)(x) - F(x)|`, optionally restricted to `x ∈ [a, b]`.
pub fn deviation_sup(f: &DensitySpec, m: u64, truncation: Option<(f64, f64)>) -> Result<f64> {
    let law = MixtureLaw::new(f, m)?;
    Ok(deviation_sup_with(f, &law, truncation))
}

/// [`deviation_sup`] for a precomputed law.
///
/// Between consecutive candidates (lattice points, breakpoints of `F`,
/// window ends) `F^(m)` is constant and `F` monotone, so the supremum is
/// attained at a candidate or as a left limit at one.
pub fn deviation_sup_with(f: &DensitySpec, law: &MixtureLaw, truncation: Option<(f64, f64)>) -> f64 {
    let (a, b) = truncation.unwrap_or((0.0, 1.0));
    let m = law.m();
    let mut best = 0.0f64;
    let mut visit = |x: f64, value: f64, left: Option<f64>| {
        if x < a || x > b {
            return;
        }
        best = best.max((value - f.cdf(x)).abs());
        if let Some(l) = left {
            if x > a {
                best = best.max((l - f.cdf_left(x)).abs());
            }
        }
    };
    for k in 0..=m {
        let x = k as f64 / m as f64;
        let below = if k == 0 { 0.0 } else { law.cdf_at_count(k - 1) };
        visit(x, law.cdf_at_count(k), Some(below));
    }
    for x in f.breakpoints().into_iter().chain([a, b]) {
        visit(x, law.cdf(x), Some(law.cdf_left(x)));
    }
    best
}

/// Draws `s_i` by inverse-CDF sampling. A label coin is drawn for every
/// sample so the `s_i` never depend on `tau0`; labels are attached only
/// when `f` carries valley cutoffs (left: null, right: alternative,
/// middle: null with probability `tau0`).
pub fn sample_latent<R: Rng>(f: &DensitySpec, n: usize, rng: &mut R, tau0: f64) -> Vec<Truth> {
    let valley = f.valley();
    (0..n)
        .map(|_| {
            let s = f.quantile(rng.random::<f64>());
            let coin = rng.random::<f64>();
            let label = valley.map(|v| {
                if s <= v.c_l {
                    Label::Null
                } else if s > v.c_r {
                    Label::Alternative
                } else if coin < tau0 {
                    Label::Null
                } else {
                    Label::Alternative
                }
            });
            Truth { s, label }
        })
        .collect()
}

/// Draws `X_i ~ Binomial(m, s_i)` for each latent value.
pub fn binomial_counts<R: Rng>(truth: &[Truth], m: u64, rng: &mut R) -> Result<Vec<u64>> {
    truth
        .iter()
        .map(|t| {
            let d = Binomial::new(m, t.s.clamp(0.0, 1.0)).map_err(|e| invalid(e.to_string()))?;
            Ok(d.sample(rng))
        })
        .collect()
}

/// `n` draws of `(s_i, X_i)` with `s ~ F` and `X | s ~ Binomial(m, s)`,
/// returned with the latent truth attached (middle region labeled with
/// null fraction 1/2 for valley specs).
pub fn sample_binomial_mixture(f: &DensitySpec, n: usize, m: u64, rng: &RngContract) -> Result<ObservationSet> {
    if n == 0 {
        return Err(crate::Error::EmptySample);
    }
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    let mut r = rng.rng();
    let truth = sample_latent(f, n, &mut r, 0.5);
    let counts = binomial_counts(&truth, m, &mut r)?;
    ObservationSet::from_counts(m, counts)?.with_truth(truth)
}
