use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::special::{beta_inc, beta_pdf};

/// Which ground-truth family a [`DensitySpec`] was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    Uniform,
    TwoStep,
    PointMassList,
    LinearValley,
    BetaValley,
    UnimodalMisspec,
    Custom,
}

/// One unnormalized piece of an analytic density, supported on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Piece {
    /// `intercept + slope * x`.
    Linear { lo: f64, hi: f64, intercept: f64, slope: f64 },
    /// `base + scale * Beta((x - lo) / (hi - lo); alpha, beta) / (hi - lo)`,
    /// so the beta part carries total mass `scale`.
    Beta { lo: f64, hi: f64, base: f64, scale: f64, alpha: f64, beta: f64 },
}

impl Piece {
    pub fn lo(&self) -> f64 {
        match *self {
            Piece::Linear { lo, .. } | Piece::Beta { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> f64 {
        match *self {
            Piece::Linear { hi, .. } | Piece::Beta { hi, .. } => hi,
        }
    }

    fn value(&self, x: f64) -> f64 {
        match *self {
            Piece::Linear { intercept, slope, .. } => intercept + slope * x,
            Piece::Beta { lo, hi, base, scale, alpha, beta } => {
                let w = hi - lo;
                base + scale * beta_pdf(((x - lo) / w).clamp(0.0, 1.0), alpha, beta) / w
            }
        }
    }

    /// Unnormalized mass on `[lo, x]`, `x` clamped into the piece.
    fn partial_mass(&self, x: f64) -> f64 {
        let x = x.clamp(self.lo(), self.hi());
        match *self {
            Piece::Linear { lo, intercept, slope, .. } => {
                let g0 = intercept + slope * lo;
                let g1 = intercept + slope * x;
                0.5 * (g0 + g1) * (x - lo)
            }
            Piece::Beta { lo, hi, base, scale, alpha, beta } => {
                base * (x - lo) + scale * beta_inc(alpha, beta, (x - lo) / (hi - lo)).0
            }
        }
    }

    fn mass(&self) -> f64 {
        match *self {
            Piece::Linear { .. } => self.partial_mass(self.hi()),
            Piece::Beta { lo, hi, base, scale, .. } => base * (hi - lo) + scale,
        }
    }

    /// Smallest `x` in the piece with `partial_mass(x) >= target`.
    fn invert(&self, target: f64) -> f64 {
        let (lo, hi) = (self.lo(), self.hi());
        match *self {
            Piece::Linear { intercept, slope, .. } => {
                let g0 = intercept + slope * lo;
                let disc = (g0 * g0 + 2.0 * slope * target).max(0.0);
                let denom = g0 + disc.sqrt();
                if denom <= 0.0 {
                    return lo;
                }
                (lo + 2.0 * target / denom).clamp(lo, hi)
            }
            Piece::Beta { .. } => {
                let (mut a, mut b) = (lo, hi);
                while b - a > 1e-12 {
                    let mid = 0.5 * (a + b);
                    if self.partial_mass(mid) < target {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                0.5 * (a + b)
            }
        }
    }

    /// `(min, max)` of the unnormalized density on the piece.
    fn range(&self) -> (f64, f64) {
        match *self {
            Piece::Linear { lo, hi, .. } => {
                let (a, b) = (self.value(lo), self.value(hi));
                (a.min(b), a.max(b))
            }
            Piece::Beta { lo, hi, alpha, beta, .. } => {
                let mut cand = vec![lo, hi];
                if alpha + beta != 2.0 {
                    let t = (alpha - 1.0) / (alpha + beta - 2.0);
                    if t > 0.0 && t < 1.0 {
                        cand.push(lo + t * (hi - lo));
                    }
                }
                let vals: Vec<f64> = cand.iter().map(|&x| self.value(x)).collect();
                (vals.iter().cloned().fold(f64::INFINITY, f64::min), vals.iter().cloned().fold(0.0, f64::max))
            }
        }
    }
}

/// Cutoffs and normalized density gaps of a valley-shaped density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValleyInfo {
    pub c_l: f64,
    pub c_r: f64,
    /// `δ_l / Z`.
    pub gap_l: f64,
    /// `δ_r / Z`.
    pub gap_r: f64,
}

/// Analytic ground-truth distribution on `[0, 1]` with exact CDF and
/// quantile access: either a density made of contiguous pieces or a
/// finite list of point masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    kind: DensityKind,
    pieces: Vec<Piece>,
    atoms: Vec<(f64, f64)>,
    z: f64,
    valley: Option<ValleyInfo>,
    // normalized CDF at the start of every piece, plus a trailing 1
    cum: Vec<f64>,
}

impl DensitySpec {
    /// Builds a density from contiguous pieces covering `[0, 1]`;
    /// normalizes by the total mass.
    pub fn from_pieces(kind: DensityKind, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(invalid("density needs at least one piece"));
        }
        if pieces[0].lo() != 0.0 || pieces[pieces.len() - 1].hi() != 1.0 {
            return Err(invalid("pieces must cover [0, 1]"));
        }
        for w in pieces.windows(2) {
            if w[0].hi() != w[1].lo() {
                return Err(invalid("pieces must be contiguous"));
            }
        }
        for p in &pieces {
            if !(p.hi() > p.lo()) {
                return Err(invalid("empty piece"));
            }
            let (min, _) = p.range();
            if !(min >= 0.0) {
                return Err(Error::NegativeDensity { lo: p.lo(), hi: p.hi() });
            }
        }
        let masses: Vec<f64> = pieces.iter().map(Piece::mass).collect();
        let z: f64 = masses.iter().sum();
        if !(z > 0.0) || !z.is_finite() {
            return Err(invalid("density has no mass"));
        }
        let mut cum = Vec::with_capacity(pieces.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for m in &masses {
            acc += m;
            cum.push(acc / z);
        }
        *cum.last_mut().unwrap() = 1.0;
        Ok(Self { kind, pieces, atoms: Vec::new(), z, valley: None, cum })
    }

    pub fn uniform() -> Self {
        Self::step(&[0.0, 1.0], &[1.0]).unwrap().with_kind(DensityKind::Uniform)
    }

    /// `1.8` on `[0, 1/2]`, `0.2` on `(1/2, 1]`.
    pub fn two_step() -> Self {
        Self::step(&[0.0, 0.5, 1.0], &[1.8, 0.2]).unwrap().with_kind(DensityKind::TwoStep)
    }

    /// Piecewise-constant density with the given breakpoints `0 = t_0 < … < t_K = 1`.
    pub fn step(breaks: &[f64], heights: &[f64]) -> Result<Self> {
        if breaks.len() != heights.len() + 1 {
            return Err(invalid("need one more breakpoint than heights"));
        }
        let pieces = breaks
            .windows(2)
            .zip(heights)
            .map(|(w, &h)| Piece::Linear { lo: w[0], hi: w[1], intercept: h, slope: 0.0 })
            .collect();
        Self::from_pieces(DensityKind::Custom, pieces)
    }

    /// Finite list of point masses `(location, weight)`; weights are normalized.
    pub fn point_masses(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("point mass list is empty"));
        }
        let mut atoms = atoms.to_vec();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.iter().any(|&(x, w)| !(0.0..=1.0).contains(&x) || !(w >= 0.0)) {
            return Err(invalid("atoms need locations in [0, 1] and nonnegative weights"));
        }
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("duplicate atom location"));
        }
        let z: f64 = atoms.iter().map(|a| a.1).sum();
        if !(z > 0.0) {
            return Err(invalid("atoms carry no mass"));
        }
        for a in &mut atoms {
            a.1 /= z;
        }
        Ok(Self { kind: DensityKind::PointMassList, pieces: Vec::new(), atoms, z, valley: None, cum: vec![0.0, 1.0] })
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::point_masses(&[(x, 1.0)])
    }

    pub(crate) fn with_kind(mut self, kind: DensityKind) -> Self {
        self.kind = kind;
        self
    }

    pub(crate) fn with_valley(mut self, valley: ValleyInfo) -> Self {
        self.valley = Some(valley);
        self
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn is_discrete(&self) -> bool {
        !self.atoms.is_empty()
    }

    /// Normalization constant `Z` (total unnormalized mass).
    pub fn normalization(&self) -> f64 {
        self.z
    }

    pub fn valley(&self) -> Option<ValleyInfo> {
        self.valley
    }

    /// Piece boundaries and atom locations, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        if self.is_discrete() {
            return self.atoms.iter().map(|a| a.0).collect();
        }
        let mut b: Vec<f64> = self.pieces.iter().map(Piece::lo).collect();
        b.push(1.0);
        b
    }

    fn piece_index(&self, x: f64) -> usize {
        // pieces are (lo, hi]; the first one also owns 0
        let j = self.pieces.partition_point(|p| p.hi() < x);
        j.min(self.pieces.len() - 1)
    }

    /// Normalized density at `x` (left-closed at 0, otherwise `(lo, hi]`).
    /// Zero outside `[0, 1]` and for point-mass lists.
    pub fn pdf(&self, x: f64) -> f64 {
        if self.is_discrete() || !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        self.pieces[self.piece_index(x)].value(x) / self.z
    }

    /// Left limit of the density at `x`.
    pub fn pdf_left(&self, x: f64) -> f64 {
        self.pdf(x)
    }

    /// Right limit of the density at `x`.
    pub fn pdf_right(&self, x: f64) -> f64 {
        if self.is_discrete() || !(0.0..1.0).contains(&x) {
            return 0.0;
        }
        let j = self.pieces.partition_point(|p| p.hi() <= x).min(self.pieces.len() - 1);
        self.pieces[j].value(x) / self.z
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        if self.is_discrete() {
            return self.atoms.iter().take_while(|a| a.0 <= x).map(|a| a.1).sum::<f64>().min(1.0);
        }
        let j = self.piece_index(x);
        (self.cum[j] + self.pieces[j].partial_mass(x) / self.z).min(1.0)
    }

    /// Left limit `F(x-)`; differs from `cdf` only at atoms.
    pub fn cdf_left(&self, x: f64) -> f64 {
        if self.is_discrete() {
            if x <= 0.0 {
                return 0.0;
            }
            return self.atoms.iter().take_while(|a| a.0 < x).map(|a| a.1).sum::<f64>().min(1.0);
        }
        self.cdf(x)
    }

    /// Generalized inverse `inf{x : F(x) >= u}` for `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        if self.is_discrete() {
            let mut acc = 0.0;
            for &(x, w) in &self.atoms {
                acc += w;
                if acc >= u {
                    return x;
                }
            }
            return self.atoms[self.atoms.len() - 1].0;
        }
        let j = (self.cum.partition_point(|&c| c < u)).clamp(1, self.pieces.len()) - 1;
        let target = (u - self.cum[j]).max(0.0) * self.z;
        self.pieces[j].invert(target)
    }

    /// If the CDF is exactly linear on `[a, b]` (constant density there),
    /// returns `(intercept, slope)` with `F(x) = intercept + slope * x`.
    pub fn cdf_linear_on(&self, a: f64, b: f64) -> Option<(f64, f64)> {
        if self.is_discrete() {
            return Some((self.cdf(a), 0.0)).filter(|_| self.cdf_left(b) == self.cdf(a));
        }
        let (a, b) = (a.max(0.0), b.min(1.0));
        let j = self.piece_index(b);
        let p = &self.pieces[j];
        if a < p.lo() && !(a == 0.0 && j == 0) {
            return None;
        }
        match *p {
            Piece::Linear { intercept, slope, .. } if slope == 0.0 => {
                let h = intercept / self.z;
                Some((self.cdf(a) - h * a, h))
            }
            Piece::Beta { base, scale, .. } if scale == 0.0 => {
                let h = base / self.z;
                Some((self.cdf(a) - h * a, h))
            }
            _ => None,
        }
    }

    /// Smallest normalized density value, `None` for point-mass lists.
    pub fn f_min(&self) -> Option<f64> {
        if self.is_discrete() {
            return None;
        }
        Some(self.pieces.iter().map(|p| p.range().0).fold(f64::INFINITY, f64::min) / self.z)
    }

    /// Largest normalized density value (possibly `+inf`).
    pub fn f_max(&self) -> Option<f64> {
        if self.is_discrete() {
            return None;
        }
        Some(self.pieces.iter().map(|p| p.range().1).fold(0.0, f64::max) / self.z)
    }

    /// True when the density is nonincreasing on `[0, 1]`.
    pub fn is_decreasing(&self) -> bool {
        if self.is_discrete() {
            return false;
        }
        let mut prev = f64::INFINITY;
        for p in &self.pieces {
            let ok = match *p {
                Piece::Linear { slope, .. } => slope <= 0.0,
                Piece::Beta { alpha, beta, scale, .. } => scale == 0.0 || (alpha <= 1.0 && beta >= 1.0),
            };
            let (l, r) = (p.value(p.lo()), p.value(p.hi()));
            if !ok || l > prev {
                return false;
            }
            prev = r;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_and_two_step() {
        let u = DensitySpec::uniform();
        assert_eq!(u.cdf(0.3), 0.3);
        assert_eq!(u.quantile(0.7), 0.7);
        assert_eq!(u.f_min(), Some(1.0));
        let t = DensitySpec::two_step();
        assert_abs_diff_eq!(t.cdf(0.5), 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(t.cdf(0.75), 0.95, epsilon = 1e-15);
        assert_eq!(t.pdf(0.5), 1.8);
        assert_eq!(t.pdf_right(0.5), 0.2);
        assert_eq!(t.f_max(), Some(1.8));
        assert!(t.is_decreasing());
        assert_abs_diff_eq!(t.quantile(0.9), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.quantile(0.95), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn linear_piece_inversion() {
        let d = DensitySpec::from_pieces(
            DensityKind::Custom,
            vec![Piece::Linear { lo: 0.0, hi: 1.0, intercept: 2.0, slope: -2.0 }],
        )
        .unwrap();
        // F(x) = 2x - x^2
        for &u in &[0.0, 0.1, 0.5, 0.9, 1.0] {
            let x = d.quantile(u);
            assert_abs_diff_eq!(d.cdf(x), u, epsilon = 1e-14);
        }
    }

    #[test]
    fn beta_piece_inversion() {
        let d = DensitySpec::from_pieces(
            DensityKind::Custom,
            vec![Piece::Beta { lo: 0.0, hi: 1.0, base: 0.0, scale: 1.0, alpha: 0.5, beta: 1.5 }],
        )
        .unwrap();
        for &u in &[0.05, 0.5, 0.95] {
            assert_abs_diff_eq!(d.cdf(d.quantile(u)), u, epsilon = 1e-10);
        }
        assert_eq!(d.f_max(), Some(f64::INFINITY));
        assert!(d.is_decreasing());
    }

    #[test]
    fn point_masses() {
        let d = DensitySpec::point_masses(&[(0.5, 1.0), (0.25, 3.0)]).unwrap();
        assert_eq!(d.cdf(0.25), 0.75);
        assert_eq!(d.cdf_left(0.25), 0.0);
        assert_eq!(d.cdf(0.49), 0.75);
        assert_eq!(d.quantile(0.8), 0.5);
        assert_eq!(d.f_min(), None);
    }

    #[test]
    fn negative_density_rejected() {
        let r = DensitySpec::from_pieces(
            DensityKind::Custom,
            vec![Piece::Linear { lo: 0.0, hi: 1.0, intercept: 1.0, slope: -2.0 }],
        );
        assert!(matches!(r, Err(Error::NegativeDensity { .. })));
    }

    #[test]
    fn linear_cdf_detection() {
        let t = DensitySpec::two_step();
        let (c0, c1) = t.cdf_linear_on(0.6, 0.8).unwrap();
        assert_abs_diff_eq!(c0 + c1 * 0.7, t.cdf(0.7), epsilon = 1e-15);
        assert!(t.cdf_linear_on(0.4, 0.6).is_none());
    }
}
