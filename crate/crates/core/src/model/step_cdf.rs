use crate::error::{invalid, Result};

/// Right-continuous, piecewise-constant CDF on `[0, 1]`.
///
/// `values[j]` is the CDF at `knots[j]`; the function is 0 left of the
/// first knot and reaches 1 at the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl StepCdf {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(invalid("step cdf needs equally many knots and values (at least one)"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("step cdf knots must be strictly increasing"));
        }
        if values.windows(2).any(|w| w[0] > w[1]) || values[0] < 0.0 {
            return Err(invalid("step cdf values must be nondecreasing and nonnegative"));
        }
        if (values[values.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(invalid("step cdf must end at 1"));
        }
        Ok(Self { knots, values })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.knots.partition_point(|&k| k <= x) {
            0 => 0.0,
            j => self.values[j - 1],
        }
    }

    /// Left limit `F(x-)`.
    pub fn eval_left(&self, x: f64) -> f64 {
        match self.knots.partition_point(|&k| k < x) {
            0 => 0.0,
            j => self.values[j - 1],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_limits() {
        let f = StepCdf::new(vec![0.2, 0.8], vec![2.0 / 3.0, 1.0]).unwrap();
        assert_eq!(f.eval(0.1), 0.0);
        assert_eq!(f.eval(0.2), 2.0 / 3.0);
        assert_eq!(f.eval_left(0.2), 0.0);
        assert_eq!(f.eval(0.5), 2.0 / 3.0);
        assert_eq!(f.eval_left(0.8), 2.0 / 3.0);
        assert_eq!(f.eval(1.0), 1.0);
    }

    #[test]
    fn validation() {
        assert!(StepCdf::new(vec![0.5, 0.5], vec![0.5, 1.0]).is_err());
        assert!(StepCdf::new(vec![0.2, 0.5], vec![0.7, 0.5]).is_err());
        assert!(StepCdf::new(vec![0.2], vec![0.9]).is_err());
        assert!(StepCdf::new(vec![], vec![]).is_err());
    }
}
