use std::cmp::Ordering;
use std::fmt;

/// A nonnegative rational `num / den`, used for grid cutoffs so that
/// comparisons against count data `X / m` are exact.
#[derive(Debug, Clone, Copy)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num, den);
        Self { num: num / g, den: den / g }
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn one() -> Self {
        Self { num: 1, den: 1 }
    }

    /// Recovers the shortest decimal fraction that rounds to `x`
    /// (`0.001` becomes `1/1000`). Falls back to a 1e-15 grid.
    pub fn from_decimal(x: f64) -> Option<Self> {
        if !x.is_finite() || x < 0.0 {
            return None;
        }
        let mut den: u64 = 1;
        for _ in 0..=15 {
            let num = (x * den as f64).round();
            if num / den as f64 == x && num < u64::MAX as f64 {
                return Some(Self::new(num as u64, den));
            }
            den *= 10;
        }
        let den = 1_000_000_000_000_000u64;
        Some(Self::new((x * den as f64).round() as u64, den))
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self * k`.
    pub fn scale(self, k: u64) -> Self {
        Self::new(self.num * k, self.den)
    }

    pub fn add(self, other: Self) -> Self {
        let den = lcm(self.den, other.den);
        Self::new(self.num * (den / self.den) + other.num * (den / other.den), den)
    }

    /// `count / m <= self`.
    pub fn ge_ratio(self, count: u64, m: u64) -> bool {
        (count as u128) * (self.den as u128) <= (self.num as u128) * (m as u128)
    }

    /// `count / m < self`.
    pub fn gt_ratio(self, count: u64, m: u64) -> bool {
        (count as u128) * (self.den as u128) < (self.num as u128) * (m as u128)
    }
}

impl PartialEq for Fraction {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Fraction {}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        ((self.num as u128) * (other.den as u128)).cmp(&((other.num as u128) * (self.den as u128)))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_recovery() {
        assert_eq!(Fraction::from_decimal(0.001).unwrap(), Fraction::new(1, 1000));
        assert_eq!(Fraction::from_decimal(0.45).unwrap(), Fraction::new(9, 20));
        assert_eq!(Fraction::from_decimal(1.0).unwrap(), Fraction::one());
        assert!(Fraction::from_decimal(-0.1).is_none());
    }

    #[test]
    fn grid_arithmetic_is_exact() {
        let g = Fraction::from_decimal(0.001).unwrap();
        let c = Fraction::from_decimal(0.55).unwrap();
        assert_eq!(c.add(g.scale(450)), Fraction::one());
        assert!(g.scale(300).ge_ratio(3, 10));
        assert!(!g.scale(300).gt_ratio(3, 10));
    }
}
