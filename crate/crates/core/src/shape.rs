//! Shape-constrained density estimators: Grenander (monotone NPMLE) and the
//! equal-width histogram.

use std::cmp::Ordering;
use std::io::{Read, Write};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{invalid, Error, Result};
use crate::format::fmt_f64;
use crate::model::{Monotone, PiecewiseConstantDensity, StepCdf};

/// Sign of the cross product `(q - p) × (r - p)`: `Greater` for a left
/// (counter-clockwise) turn. Exact for all finite inputs.
pub fn orientation(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> Ordering {
    let l = (q.0 - p.0) * (r.1 - p.1);
    let rr = (q.1 - p.1) * (r.0 - p.0);
    let det = l - rr;
    // the four differences and two products each round once
    let bound = 8.0 * f64::EPSILON * (l.abs() + rr.abs());
    if det > bound {
        return Ordering::Greater;
    }
    if -det > bound {
        return Ordering::Less;
    }
    let ex = |v: f64| BigRational::from_float(v).expect("finite coordinate");
    let (px, py, qx, qy, rx, ry) = (ex(p.0), ex(p.1), ex(q.0), ex(q.1), ex(r.0), ex(r.1));
    let det = (qx - &px) * (ry - &py) - (qy - &py) * (rx - &px);
    det.cmp(&BigRational::from_integer(BigInt::from(0)))
}

/// Indices of the upper hull of points sorted by strictly increasing `x`;
/// collinear middle points are dropped.
fn upper_hull(pts: &[(f64, f64)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(pts.len());
    for (i, &p) in pts.iter().enumerate() {
        while hull.len() >= 2 {
            let (a, b) = (pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]]);
            if orientation(a, b, p) == Ordering::Less {
                break;
            }
            hull.pop();
        }
        hull.push(i);
    }
    hull
}

fn lower_hull(pts: &[(f64, f64)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(pts.len());
    for (i, &p) in pts.iter().enumerate() {
        while hull.len() >= 2 {
            let (a, b) = (pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]]);
            if orientation(a, b, p) == Ordering::Greater {
                break;
            }
            hull.pop();
        }
        hull.push(i);
    }
    hull
}

/// Vertices of the least concave majorant of `f` restricted to `(a, b]`,
/// anchored at `(a, F(a-))` and `(b, F(b))`. Knots at `a` itself are not
/// majorized, so the first slope stays finite when `f` jumps at `a`.
pub fn least_concave_majorant(f: &StepCdf, support: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let (a, b) = check_support(support)?;
    let mut pts = vec![(a, f.eval_left(a))];
    pts.extend(f.knots().iter().zip(f.values()).filter(|(x, _)| **x > a && **x < b).map(|(&x, &y)| (x, y)));
    pts.push((b, f.eval(b)));
    Ok(upper_hull(&pts).into_iter().map(|i| pts[i]).collect())
}

fn check_support(support: (f64, f64)) -> Result<(f64, f64)> {
    let (a, b) = support;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(invalid(format!("support [{a}, {b}] is not a proper interval")));
    }
    Ok((a, b))
}

fn sorted_in_support(samples: &[f64], a: f64, b: f64) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    for (index, &value) in samples.iter().enumerate() {
        if !(a..=b).contains(&value) {
            return Err(Error::OutOfSupport { index, value, lo: a, hi: b });
        }
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Heights `(Δcount / n) / Δx` between consecutive hull vertices.
fn hull_heights(vertices: &[(f64, f64)], n: f64) -> (Vec<f64>, Vec<f64>) {
    let breaks = vertices.iter().map(|v| v.0).collect();
    let heights = vertices.windows(2).map(|w| ((w[1].1 - w[0].1) / n) / (w[1].0 - w[0].0)).collect();
    (breaks, heights)
}

/// Grenander estimator of a nonincreasing density on `[a, b]`: the left
/// derivative of the least concave majorant of the ECDF.
///
/// Intervals are `(t_{k-1}, t_k]`; at `a` the first height applies.
/// Samples sitting exactly at `a` count toward the first segment.
pub fn grenander_decreasing(samples: &[f64], support: (f64, f64)) -> Result<PiecewiseConstantDensity> {
    let (a, b) = check_support(support)?;
    let s = sorted_in_support(samples, a, b)?;
    let n = s.len();
    // (x, #{x_i <= x}) at every distinct sample inside (a, b)
    let mut pts = vec![(a, 0.0)];
    for (i, &x) in s.iter().enumerate() {
        if x > a && x < b && (i + 1 == n || s[i + 1] != x) {
            pts.push((x, (i + 1) as f64));
        }
    }
    pts.push((b, n as f64));
    let vertices: Vec<_> = upper_hull(&pts).into_iter().map(|i| pts[i]).collect();
    let (breaks, mut heights) = hull_heights(&vertices, n as f64);
    // exact slopes strictly decrease; guard against a rounding inversion
    for k in 1..heights.len() {
        heights[k] = heights[k].min(heights[k - 1]);
    }
    PiecewiseConstantDensity::new(breaks, heights, Monotone::Decreasing)
}

/// Grenander estimator of a nondecreasing density on `[a, b]`, i.e. the
/// decreasing estimator of the mirrored sample mirrored back. Computed
/// directly from the greatest convex minorant of `x ↦ #{x_i < x}` so no
/// reflection rounding enters.
///
/// Intervals are `[t_{k-1}, t_k)`; at `b` the last height applies.
pub fn grenander_increasing(samples: &[f64], support: (f64, f64)) -> Result<PiecewiseConstantDensity> {
    let (a, b) = check_support(support)?;
    let s = sorted_in_support(samples, a, b)?;
    let n = s.len();
    let mut pts = vec![(a, 0.0)];
    for (i, &x) in s.iter().enumerate() {
        if x > a && x < b && (i == 0 || s[i - 1] != x) {
            pts.push((x, i as f64));
        }
    }
    pts.push((b, n as f64));
    let vertices: Vec<_> = lower_hull(&pts).into_iter().map(|i| pts[i]).collect();
    let (breaks, mut heights) = hull_heights(&vertices, n as f64);
    for k in (0..heights.len().saturating_sub(1)).rev() {
        heights[k] = heights[k].min(heights[k + 1]);
    }
    PiecewiseConstantDensity::new(breaks, heights, Monotone::Increasing)
}

/// Histogram on `L` equal bins `[l/L, (l+1)/L)` of `[0, 1]` (the last bin
/// closed), heights `Y_l / (n h)`.
pub fn histogram_estimate(samples: &[f64], bins: usize) -> Result<PiecewiseConstantDensity> {
    if bins == 0 {
        return Err(invalid("histogram needs at least one bin"));
    }
    let s = sorted_in_support(samples, 0.0, 1.0)?;
    let breaks: Vec<f64> = (0..=bins).map(|l| l as f64 / bins as f64).collect();
    let mut counts = vec![0usize; bins];
    for x in s {
        let l = breaks.partition_point(|&t| t <= x).clamp(1, bins) - 1;
        counts[l] += 1;
    }
    let n = samples.len() as f64;
    let heights = counts.iter().map(|&c| c as f64 / n * bins as f64).collect();
    PiecewiseConstantDensity::new(breaks, heights, Monotone::None)
}

/// Writes `left,right,height` rows with a header.
pub fn write_density_csv<W: Write>(d: &PiecewiseConstantDensity, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["left", "right", "height"])?;
    for (l, r, h) in d.segments() {
        w.write_record([fmt_f64(l), fmt_f64(r), fmt_f64(h)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a density written by [`write_density_csv`]; rows must be
/// contiguous.
pub fn read_density_csv<R: Read>(input: R, monotone: Monotone) -> Result<PiecewiseConstantDensity> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut breaks = Vec::new();
    let mut heights = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        let field = |k: usize| -> Result<f64> {
            let raw = rec.get(k).ok_or_else(|| Error::Parse { line, msg: "expected 3 fields".into() })?;
            raw.trim().parse().map_err(|_| Error::Parse { line, msg: format!("not a number: {raw:?}") })
        };
        let (l, r, h) = (field(0)?, field(1)?, field(2)?);
        match breaks.last() {
            None => breaks.push(l),
            Some(&prev) if prev != l => {
                return Err(Error::Parse { line, msg: "segments are not contiguous".into() });
            }
            _ => {}
        }
        breaks.push(r);
        heights.push(h);
    }
    PiecewiseConstantDensity::new(breaks, heights, monotone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecdf::{build_ecdf, ks_distance};
    use crate::model::{DensitySpec, RngContract};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn orientation_is_exact_near_degeneracy() {
        let p = (0.1, 0.1);
        let q = (0.2, 0.2);
        // r is the float closest to the line y = x past q
        let r = (0.30000000000000004, 0.3);
        assert_eq!(orientation(p, q, (0.3, 0.3)), orientation(p, q, (0.3, 0.3)));
        assert_eq!(orientation((0.0, 0.0), (1.0, 1.0), (2.0, 2.0)), Ordering::Equal);
        assert_eq!(orientation((0.0, 0.0), (1.0, 1.0), (2.0, 2.0 + 4.0 * f64::EPSILON)), Ordering::Greater);
        assert_ne!(orientation(p, q, r), Ordering::Equal);
    }

    #[test]
    fn lcm_examples() {
        let f = build_ecdf(&[0.5]).unwrap();
        assert_eq!(least_concave_majorant(&f, (0.0, 1.0)).unwrap(), vec![(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)]);
        let f = build_ecdf(&[0.25, 0.5, 0.75]).unwrap();
        assert_eq!(least_concave_majorant(&f, (0.0, 1.0)).unwrap(), vec![(0.0, 0.0), (0.75, 1.0), (1.0, 1.0)]);
    }

    #[test]
    fn decreasing_examples() {
        let g = grenander_decreasing(&[0.5], (0.0, 1.0)).unwrap();
        assert_eq!(g.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(g.heights(), &[2.0, 0.0]);
        assert_eq!(g.eval(0.5).unwrap(), 2.0);
        assert_eq!(g.eval(0.75).unwrap(), 0.0);
        let g = grenander_decreasing(&[0.25, 0.5, 1.0], (0.0, 1.0)).unwrap();
        assert_eq!(g.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_abs_diff_eq!(g.heights()[0], 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.heights()[1], 2.0 / 3.0, epsilon = 1e-15);
        assert!(grenander_decreasing(&[], (0.0, 1.0)).is_err());
    }

    #[test]
    fn increasing_examples() {
        let g = grenander_increasing(&[0.5], (0.0, 1.0)).unwrap();
        assert_eq!(g.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(g.heights(), &[0.0, 2.0]);
        assert_eq!(g.eval(0.5).unwrap(), 2.0);
        let g = grenander_increasing(&[0.0, 0.5, 0.75], (0.0, 1.0)).unwrap();
        assert_eq!(g.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_abs_diff_eq!(g.heights()[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.heights()[1], 4.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn boundary_atoms_keep_mass_one() {
        let g = grenander_decreasing(&[0.0, 0.0, 0.0, 0.4], (0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(g.mass(), 1.0, epsilon = 1e-12);
        assert!(g.heights()[0].is_finite());
        let g = grenander_increasing(&[0.6, 1.0, 1.0], (0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(g.mass(), 1.0, epsilon = 1e-12);
        let g = grenander_decreasing(&[0.3, 0.3], (0.3, 0.5)).unwrap();
        assert_eq!(g.heights(), &[5.0]);
    }

    #[test]
    fn histogram_examples() {
        assert_eq!(histogram_estimate(&[0.1, 0.6], 2).unwrap().heights(), &[1.0, 1.0]);
        assert_eq!(histogram_estimate(&[0.1, 0.2], 2).unwrap().heights(), &[2.0, 0.0]);
        assert_eq!(histogram_estimate(&[0.3, 1.0, 0.0], 1).unwrap().heights(), &[1.0]);
        let h = histogram_estimate(&[1.0, 0.5], 2).unwrap();
        assert_eq!(h.heights(), &[0.0, 2.0]);
    }

    #[test]
    fn density_csv_round_trip() {
        let g = grenander_decreasing(&[0.1, 0.2, 0.2, 0.7], (0.0, 1.0)).unwrap();
        let mut buf = Vec::new();
        write_density_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("left,right,height\n"));
        let back = read_density_csv(&buf[..], Monotone::Decreasing).unwrap();
        assert_eq!(back, g);
        let bad = "left,right,height\n0,0.5,1\n0.6,1,1\n";
        assert!(matches!(read_density_csv(bad.as_bytes(), Monotone::None), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn marshall_lemma_on_uniform_samples() {
        let u = DensitySpec::uniform();
        let mut rng = RngContract::new(5).rng();
        for _ in 0..50 {
            let xs: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
            let g = grenander_decreasing(&xs, (0.0, 1.0)).unwrap();
            let fn_ = build_ecdf(&xs).unwrap();
            assert!(ks_distance(&g, &u) <= ks_distance(&fn_, &u) + 1e-12);
        }
    }

    fn log_lik(d: &PiecewiseConstantDensity, xs: &[f64]) -> f64 {
        xs.iter().map(|&x| d.eval(x).unwrap().ln()).sum()
    }

    #[test]
    fn npmle_beats_perturbed_competitors() {
        let mut rng = RngContract::new(9).rng();
        for _ in 0..40 {
            let xs: Vec<f64> = (0..25).map(|_| rng.random::<f64>().powi(2)).collect();
            let g = grenander_decreasing(&xs, (0.0, 1.0)).unwrap();
            let best = log_lik(&g, &xs);
            for _ in 0..20 {
                // perturb, restore monotonicity, renormalize
                let mut h: Vec<f64> = g.heights().iter().map(|h| h * (1.0 + 0.2 * (rng.random::<f64>() - 0.5))).collect();
                for k in 1..h.len() {
                    h[k] = h[k].min(h[k - 1]);
                }
                let alt = PiecewiseConstantDensity::new(g.breakpoints().to_vec(), h, Monotone::Decreasing).unwrap();
                let alt = alt.scaled(1.0 / alt.mass());
                assert!(log_lik(&alt, &xs) <= best + 1e-9);
            }
        }
    }

    fn grid_samples() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0u32..=16, 1..30).prop_map(|v| v.into_iter().map(|k| k as f64 / 16.0).collect())
    }

    proptest! {
        #[test]
        fn majorant_dominates_and_touches(xs in grid_samples()) {
            let f = build_ecdf(&xs).unwrap();
            let v = least_concave_majorant(&f, (0.0, 1.0)).unwrap();
            let lcm = |x: f64| {
                let j = v.partition_point(|p| p.0 < x).clamp(1, v.len() - 1);
                let (p, q) = (v[j - 1], v[j]);
                p.1 + (q.1 - p.1) * (x - p.0) / (q.0 - p.0)
            };
            for (&x, &y) in f.knots().iter().zip(f.values()) {
                if x > 0.0 {
                    prop_assert!(lcm(x) >= y - 1e-12);
                }
            }
            for &(x, y) in &v[1..v.len() - 1] {
                prop_assert_eq!(f.eval(x), y);
            }
        }

        #[test]
        fn grenander_mass_and_order(xs in grid_samples()) {
            let g = grenander_decreasing(&xs, (0.0, 1.0)).unwrap();
            prop_assert!((g.mass() - 1.0).abs() < 1e-12);
            prop_assert!(g.heights().windows(2).all(|w| w[0] > w[1]));
            let h = grenander_increasing(&xs, (0.0, 1.0)).unwrap();
            prop_assert!((h.mass() - 1.0).abs() < 1e-12);
            prop_assert!(h.heights().windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn increasing_is_mirrored_decreasing(xs in grid_samples()) {
            // the 1/16 grid is closed under x -> 1 - x in floating point
            let mirrored: Vec<f64> = xs.iter().map(|x| 1.0 - x).collect();
            let inc = grenander_increasing(&xs, (0.0, 1.0)).unwrap();
            let dec = grenander_decreasing(&mirrored, (0.0, 1.0)).unwrap();
            let back: Vec<f64> = dec.breakpoints().iter().rev().map(|t| 1.0 - t).collect();
            prop_assert_eq!(inc.breakpoints(), &back[..]);
            let rev: Vec<f64> = dec.heights().iter().rev().cloned().collect();
            for (a, b) in inc.heights().iter().zip(&rev) {
                prop_assert!((a - b).abs() <= 1e-12 * a.max(*b));
            }
        }
    }
}
