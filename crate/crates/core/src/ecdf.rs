//! Empirical CDFs and distances between distribution functions on `[0, 1]`.

use crate::error::{invalid, Error, Result};
use crate::model::{DensitySpec, PiecewiseConstantDensity, StepCdf};
use crate::special::integrate;

/// Builds the ECDF `F_n(x) = #{i : x_i <= x} / n`, merging ties.
pub fn build_ecdf(samples: &[f64]) -> Result<StepCdf> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    for (index, &value) in samples.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfSupport { index, value, lo: 0.0, hi: 1.0 });
        }
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut knots = Vec::new();
    let mut values = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        if i + 1 == n || sorted[i + 1] != x {
            knots.push(x);
            values.push((i + 1) as f64 / n as f64);
        }
    }
    StepCdf::new(knots, values)
}

/// A distribution function on `[0, 1]` that the distances accept.
#[derive(Debug, Clone, Copy)]
pub enum CdfRef<'a> {
    Step(&'a StepCdf),
    Density(&'a DensitySpec),
    /// The CDF of a step density, which is piecewise linear.
    Piecewise(&'a PiecewiseConstantDensity),
}

impl<'a> From<&'a StepCdf> for CdfRef<'a> {
    fn from(f: &'a StepCdf) -> Self {
        CdfRef::Step(f)
    }
}

impl<'a> From<&'a DensitySpec> for CdfRef<'a> {
    fn from(f: &'a DensitySpec) -> Self {
        CdfRef::Density(f)
    }
}

impl<'a> From<&'a PiecewiseConstantDensity> for CdfRef<'a> {
    fn from(f: &'a PiecewiseConstantDensity) -> Self {
        CdfRef::Piecewise(f)
    }
}

impl CdfRef<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CdfRef::Step(f) => f.eval(x),
            CdfRef::Density(f) => f.cdf(x),
            CdfRef::Piecewise(f) => f.cdf(x),
        }
    }

    pub fn eval_left(&self, x: f64) -> f64 {
        match self {
            CdfRef::Step(f) => f.eval_left(x),
            CdfRef::Density(f) => f.cdf_left(x),
            CdfRef::Piecewise(f) => f.cdf(x),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            CdfRef::Step(f) => f.knots().to_vec(),
            CdfRef::Density(f) => f.breakpoints(),
            CdfRef::Piecewise(f) => f.breakpoints().to_vec(),
        }
    }

    /// Whether the function is affine on the open interval `(u, v)`, which
    /// never contains one of its breakpoints.
    fn affine_between(&self, u: f64, v: f64) -> bool {
        match self {
            CdfRef::Step(_) | CdfRef::Piecewise(_) => true,
            CdfRef::Density(f) => f.cdf_linear_on(u, v).is_some(),
        }
    }

    fn is_step(&self) -> bool {
        match self {
            CdfRef::Step(_) => true,
            CdfRef::Density(f) => f.is_discrete(),
            CdfRef::Piecewise(_) => false,
        }
    }
}

fn merged_breakpoints(f1: &CdfRef, f2: &CdfRef) -> Vec<f64> {
    let mut pts: Vec<f64> = f1.breakpoints().into_iter().chain(f2.breakpoints()).filter(|x| (0.0..=1.0).contains(x)).collect();
    pts.push(0.0);
    pts.push(1.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `sup_x |F1(x) - F2(x)|`.
///
/// Exact when on every interval between breakpoints the difference is
/// monotone, which covers step-vs-anything and affine-vs-affine pairs.
/// Two smooth arguments are additionally scanned on a fine grid with
/// golden-section refinement.
pub fn ks_distance<'a, 'b>(f1: impl Into<CdfRef<'a>>, f2: impl Into<CdfRef<'b>>) -> f64 {
    let (f1, f2) = (f1.into(), f2.into());
    let pts = merged_breakpoints(&f1, &f2);
    let diff = |x: f64| (f1.eval(x) - f2.eval(x)).abs();
    let mut best = 0.0f64;
    for &x in &pts {
        best = best.max(diff(x)).max((f1.eval_left(x) - f2.eval_left(x)).abs());
    }
    let monotone_diff = f1.is_step() || f2.is_step();
    if !monotone_diff {
        for w in pts.windows(2) {
            let (u, v) = (w[0], w[1]);
            if f1.affine_between(u, v) && f2.affine_between(u, v) {
                continue;
            }
            best = best.max(scan_interval(&diff, u, v));
        }
    }
    best
}

// Grid scan plus golden-section refinement around the best grid point.
fn scan_interval(g: &impl Fn(f64) -> f64, u: f64, v: f64) -> f64 {
    const GRID: usize = 256;
    let h = (v - u) / GRID as f64;
    let (mut arg, mut best) = (u, g(u));
    for i in 1..GRID {
        let x = u + h * i as f64;
        let y = g(x);
        if y > best {
            arg = x;
            best = y;
        }
    }
    let (mut a, mut b) = ((arg - h).max(u), (arg + h).min(v));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = b - r * (b - a);
        let x2 = a + r * (b - a);
        if g(x1) >= g(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    best.max(g(0.5 * (a + b)))
}

/// `∫ |d(x)|^p dx` over an interval of length `len` on which `d` is affine
/// with end values `d0` and `d1`.
fn affine_power_integral(d0: f64, d1: f64, len: f64, p: f64) -> f64 {
    let (a, b) = (d0.abs(), d1.abs());
    if d0 * d1 >= 0.0 {
        if (a - b).abs() <= 1e-15 * a.max(b) {
            return len * a.max(b).powf(p);
        }
        len * (b.powf(p + 1.0) - a.powf(p + 1.0)) / ((p + 1.0) * (b - a))
    } else {
        let t = a / (a + b);
        len * (t * a.powf(p) + (1.0 - t) * b.powf(p)) / (p + 1.0)
    }
}

/// `(∫_0^1 |F1(x) - F2(x)|^p dx)^(1/p)`; `p = ∞` gives [`ks_distance`].
pub fn lp_distance<'a, 'b>(f1: impl Into<CdfRef<'a>>, f2: impl Into<CdfRef<'b>>, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid(format!("L_p distance needs p >= 1, got {p}")));
    }
    let (f1, f2) = (f1.into(), f2.into());
    if p.is_infinite() {
        return Ok(ks_distance(f1, f2));
    }
    let pts = merged_breakpoints(&f1, &f2);
    let tol = 1e-10 / pts.len() as f64;
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (u, v) = (w[0], w[1]);
        if f1.affine_between(u, v) && f2.affine_between(u, v) {
            let d0 = f1.eval(u) - f2.eval(u);
            let d1 = f1.eval_left(v) - f2.eval_left(v);
            total += affine_power_integral(d0, d1, v - u, p);
        } else {
            total += integrate(|x| (f1.eval(x) - f2.eval(x)).abs().powf(p), u, v, tol);
        }
    }
    Ok(total.powf(1.0 / p))
}

/// DKW half-width `sqrt(ln(2/δ) / (2n))`: with probability at least `1 - δ`
/// the ECDF of `n` samples stays within it of the true CDF.
pub fn dkw_epsilon(n: usize, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("confidence delta must lie in (0, 1), got {delta}")));
    }
    Ok(((2.0 / delta).ln() / (2.0 * n as f64)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Monotone, RngContract};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn ecdf_examples() {
        let f = build_ecdf(&[0.5]).unwrap();
        assert_eq!((f.knots(), f.values()), (&[0.5][..], &[1.0][..]));
        let f = build_ecdf(&[0.2, 0.2, 0.8]).unwrap();
        assert_eq!(f.knots(), &[0.2, 0.8]);
        assert_abs_diff_eq!(f.values()[0], 2.0 / 3.0);
        let f = build_ecdf(&[0.9, 0.1]).unwrap();
        assert_eq!((f.knots(), f.values()), (&[0.1, 0.9][..], &[0.5, 1.0][..]));
        assert!(matches!(build_ecdf(&[]), Err(Error::EmptySample)));
        assert!(build_ecdf(&[1.5]).is_err());
    }

    #[test]
    fn ks_examples() {
        let u = DensitySpec::uniform();
        assert_eq!(ks_distance(&build_ecdf(&[0.5]).unwrap(), &u), 0.5);
        assert_eq!(ks_distance(&u, &u), 0.0);
        assert_eq!(ks_distance(&build_ecdf(&[0.25, 0.75]).unwrap(), &u), 0.25);
    }

    #[test]
    fn lp_examples() {
        let u = DensitySpec::uniform();
        let one = build_ecdf(&[0.5]).unwrap();
        assert_abs_diff_eq!(lp_distance(&one, &u, 1.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_eq!(lp_distance(&one, &one, 3.0).unwrap(), 0.0);
        let two = build_ecdf(&[0.25, 0.75]).unwrap();
        assert_abs_diff_eq!(lp_distance(&two, &u, 2.0).unwrap(), (1.0f64 / 48.0).sqrt(), epsilon = 1e-15);
        assert_eq!(lp_distance(&two, &u, f64::INFINITY).unwrap(), 0.25);
        assert!(lp_distance(&two, &u, 0.5).is_err());
    }

    #[test]
    fn lp_against_smooth_reference_uses_quadrature() {
        // F(x) = 2x - x^2 vs the uniform CDF: ∫ (x - x^2) dx = 1/6
        let d = DensitySpec::from_pieces(
            crate::model::DensityKind::Custom,
            vec![crate::model::Piece::Linear { lo: 0.0, hi: 1.0, intercept: 2.0, slope: -2.0 }],
        )
        .unwrap();
        let u = DensitySpec::uniform();
        assert_abs_diff_eq!(lp_distance(&d, &u, 1.0).unwrap(), 1.0 / 6.0, epsilon = 1e-10);
        // sup of x - x^2 is 1/4 at x = 1/2
        assert_abs_diff_eq!(ks_distance(&d, &u), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn piecewise_cdf_reference() {
        let g = PiecewiseConstantDensity::new(vec![0.0, 0.5, 1.0], vec![2.0, 0.0], Monotone::Decreasing).unwrap();
        let u = DensitySpec::uniform();
        assert_abs_diff_eq!(ks_distance(&g, &u), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(lp_distance(&g, &u, 1.0).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn dkw_examples() {
        assert_abs_diff_eq!(dkw_epsilon(10_000, 0.05).unwrap(), (40f64.ln() / 20_000.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(dkw_epsilon(1, 2.0 / std::f64::consts::E.powi(2)).unwrap(), 1.0, epsilon = 1e-15);
        let r = dkw_epsilon(400, 0.1).unwrap() / dkw_epsilon(100, 0.1).unwrap();
        assert_abs_diff_eq!(r, 0.5, epsilon = 1e-15);
        assert!(dkw_epsilon(10, 1.0).is_err());
        assert!(dkw_epsilon(10, 0.0).is_err());
    }

    #[test]
    fn dkw_coverage_monte_carlo() {
        let u = DensitySpec::uniform();
        let eps = dkw_epsilon(500, 0.05).unwrap();
        let mut rng = RngContract::new(11).rng();
        let covered = (0..1000)
            .filter(|_| {
                let xs: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
                ks_distance(&build_ecdf(&xs).unwrap(), &u) <= eps
            })
            .count();
        assert!(covered >= 950, "covered {covered}");
    }

    fn sample_set() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0u32..=20, 1..12).prop_map(|v| v.into_iter().map(|k| k as f64 / 20.0).collect())
    }

    proptest! {
        #[test]
        fn ks_is_a_metric(a in sample_set(), b in sample_set(), c in sample_set()) {
            let (fa, fb, fc) = (build_ecdf(&a).unwrap(), build_ecdf(&b).unwrap(), build_ecdf(&c).unwrap());
            let ab = ks_distance(&fa, &fb);
            prop_assert_eq!(ab, ks_distance(&fb, &fa));
            prop_assert!(ab <= ks_distance(&fa, &fc) + ks_distance(&fc, &fb) + 1e-15);
            prop_assert_eq!(ab == 0.0, fa == fb);
        }

        #[test]
        fn l1_is_bounded_by_ks(a in sample_set(), b in sample_set()) {
            let (fa, fb) = (build_ecdf(&a).unwrap(), build_ecdf(&b).unwrap());
            let ks = ks_distance(&fa, &fb);
            let l1 = lp_distance(&fa, &fb, 1.0).unwrap();
            let l2 = lp_distance(&fa, &fb, 2.0).unwrap();
            prop_assert!(l1 <= l2 + 1e-12);
            prop_assert!(l2 <= ks + 1e-12);
        }
    }
}
