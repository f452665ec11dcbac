use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Shape constraint carried by a [`PiecewiseConstantDensity`]. It also fixes
/// which side's height is returned at an interior breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotone {
    /// Intervals `(t_{k-1}, t_k]`; breakpoints take the left-interval height.
    Decreasing,
    /// Intervals `[t_{k-1}, t_k)`; breakpoints take the right-interval height.
    Increasing,
    /// Unconstrained, right-continuous (histogram bins).
    None,
}

/// Step density on `[a, b]`: `heights[k]` on the `k`-th interval between
/// consecutive `breakpoints`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstantDensity {
    breakpoints: Vec<f64>,
    heights: Vec<f64>,
    monotone: Monotone,
}

impl PiecewiseConstantDensity {
    pub fn new(breakpoints: Vec<f64>, heights: Vec<f64>, monotone: Monotone) -> Result<Self> {
        if breakpoints.len() < 2 || heights.len() + 1 != breakpoints.len() {
            return Err(invalid("need K + 1 breakpoints for K heights (K >= 1)"));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        if heights.iter().any(|h| !(*h >= 0.0) || !h.is_finite()) {
            return Err(invalid("heights must be finite and nonnegative"));
        }
        let ordered = match monotone {
            Monotone::Decreasing => heights.windows(2).all(|w| w[0] >= w[1]),
            Monotone::Increasing => heights.windows(2).all(|w| w[0] <= w[1]),
            Monotone::None => true,
        };
        if !ordered {
            return Err(invalid(format!("heights violate the {monotone:?} constraint")));
        }
        Ok(Self { breakpoints, heights, monotone })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn monotone(&self) -> Monotone {
        self.monotone
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.breakpoints.len() - 1])
    }

    /// `(left, right, height)` for every interval.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints.windows(2).zip(&self.heights).map(|(w, &h)| (w[0], w[1], h))
    }

    pub fn mass(&self) -> f64 {
        self.segments().map(|(l, r, h)| h * (r - l)).sum()
    }

    /// Index of the interval that owns `x` under the breakpoint convention.
    fn interval(&self, x: f64) -> usize {
        let k = self.heights.len();
        let j = match self.monotone {
            Monotone::Decreasing => self.breakpoints.partition_point(|&t| t < x),
            Monotone::Increasing | Monotone::None => self.breakpoints.partition_point(|&t| t <= x),
        };
        j.clamp(1, k) - 1
    }

    /// Density at `x`; the support endpoints map to the first/last height.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (a, b) = self.support();
        if !(a..=b).contains(&x) {
            return Err(Error::OutOfSupport { index: 0, value: x, lo: a, hi: b });
        }
        Ok(self.heights[self.interval(x)])
    }

    /// `∫_a^x` of the density, for any real `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (l, r, h) in self.segments() {
            if x >= r {
                acc += h * (r - l);
            } else {
                if x > l {
                    acc += h * (x - l);
                }
                break;
            }
        }
        acc
    }

    /// `∫_x^b` of the density, summed from the right to avoid cancellation.
    pub fn upper_tail(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (l, r, h) in self.segments().collect::<Vec<_>>().into_iter().rev() {
            if x <= l {
                acc += h * (r - l);
            } else {
                if x < r {
                    acc += h * (r - x);
                }
                break;
            }
        }
        acc
    }

    /// Multiplies every height by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            heights: self.heights.iter().map(|h| h * factor).collect(),
            monotone: self.monotone,
        }
    }
}

/// Evaluates `d` at `x` using its breakpoint convention.
pub fn eval_density(d: &PiecewiseConstantDensity, x: f64) -> Result<f64> {
    d.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec() -> PiecewiseConstantDensity {
        PiecewiseConstantDensity::new(vec![0.0, 0.5, 1.0], vec![2.0, 0.0], Monotone::Decreasing).unwrap()
    }

    fn inc() -> PiecewiseConstantDensity {
        PiecewiseConstantDensity::new(vec![0.0, 0.5, 1.0], vec![0.0, 2.0], Monotone::Increasing).unwrap()
    }

    #[test]
    fn breakpoint_conventions() {
        assert_eq!(eval_density(&dec(), 0.5).unwrap(), 2.0);
        assert_eq!(eval_density(&dec(), 0.75).unwrap(), 0.0);
        assert_eq!(eval_density(&inc(), 0.5).unwrap(), 2.0);
        assert_eq!(eval_density(&inc(), 0.25).unwrap(), 0.0);
        // endpoints
        assert_eq!(dec().eval(0.0).unwrap(), 2.0);
        assert_eq!(dec().eval(1.0).unwrap(), 0.0);
        assert_eq!(inc().eval(1.0).unwrap(), 2.0);
    }

    #[test]
    fn outside_support_is_an_error() {
        assert!(dec().eval(1.5).is_err());
        assert!(dec().eval(-0.1).is_err());
    }

    #[test]
    fn mass_and_cdf() {
        let d = dec();
        assert_eq!(d.mass(), 1.0);
        assert_eq!(d.cdf(0.25), 0.5);
        assert_eq!(d.cdf(2.0), 1.0);
        assert_eq!(d.upper_tail(0.25), 0.5);
        assert_eq!(inc().upper_tail(0.75), 0.5);
    }

    #[test]
    fn monotone_flag_is_checked() {
        assert!(PiecewiseConstantDensity::new(vec![0.0, 0.5, 1.0], vec![0.0, 2.0], Monotone::Decreasing).is_err());
        assert!(PiecewiseConstantDensity::new(vec![0.0, 1.0], vec![-1.0], Monotone::None).is_err());
    }
}
