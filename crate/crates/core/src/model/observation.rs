use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Fraction;

/// Ground-truth membership of a simulated object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Null,
    Alternative,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Null => "null",
            Label::Alternative => "alternative",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s.trim() {
            "null" | "0" => Some(Label::Null),
            "alternative" | "alt" | "1" => Some(Label::Alternative),
            _ => None,
        }
    }
}

/// Latent binomial rate of one object plus its (optional) two-group label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub s: f64,
    pub label: Option<Label>,
}

#[derive(Debug, Clone, PartialEq)]
enum Values {
    /// Exact counts `X_i` out of a common `m`.
    Counts { m: u64, counts: Vec<u64> },
    /// Ratio-only data (CSV `cfr` columns, or latent rates observed without noise).
    Ratios(Vec<f64>),
}

/// `n` objects, each observed as a capture frequency ratio `X_i / m`.
///
/// Count data keeps the integer counts and converts to `f64` only at use
/// sites, so that comparisons against grid cutoffs are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    values: Values,
    ids: Option<Vec<String>>,
    truth: Option<Vec<Truth>>,
}

impl ObservationSet {
    pub fn from_counts(m: u64, counts: Vec<u64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        if counts.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((index, &count)) = counts.iter().enumerate().find(|(_, &c)| c > m) {
            return Err(Error::CountOutOfRange { index, count, m });
        }
        Ok(Self { values: Values::Counts { m, counts }, ids: None, truth: None })
    }

    pub fn from_ratios(ratios: Vec<f64>) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::EmptySample);
        }
        for (index, &value) in ratios.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfSupport { index, value, lo: 0.0, hi: 1.0 });
            }
        }
        Ok(Self { values: Values::Ratios(ratios), ids: None, truth: None })
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.len() {
            return Err(Error::InvalidParameter(format!(
                "{} ids for {} observations",
                ids.len(),
                self.len()
            )));
        }
        self.ids = Some(ids);
        Ok(self)
    }

    pub fn with_truth(mut self, truth: Vec<Truth>) -> Result<Self> {
        if truth.len() != self.len() {
            return Err(Error::InvalidParameter(format!(
                "{} truth rows for {} observations",
                truth.len(),
                self.len()
            )));
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        match &self.values {
            Values::Counts { counts, .. } => counts.len(),
            Values::Ratios(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Binomial size, or `None` for ratio-only data.
    pub fn m(&self) -> Option<u64> {
        match &self.values {
            Values::Counts { m, .. } => Some(*m),
            Values::Ratios(_) => None,
        }
    }

    pub fn counts(&self) -> Option<&[u64]> {
        match &self.values {
            Values::Counts { counts, .. } => Some(counts),
            Values::Ratios(_) => None,
        }
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    pub fn truth(&self) -> Option<&[Truth]> {
        self.truth.as_deref()
    }

    pub fn ratio(&self, i: usize) -> f64 {
        match &self.values {
            Values::Counts { m, counts } => counts[i] as f64 / *m as f64,
            Values::Ratios(r) => r[i],
        }
    }

    /// `ŝ_i = X_i / m` in input order.
    pub fn ratios(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.ratio(i)).collect()
    }

    /// Exact test `ŝ_i <= c`.
    pub fn le(&self, i: usize, c: Fraction) -> bool {
        match &self.values {
            Values::Counts { m, counts } => c.ge_ratio(counts[i], *m),
            Values::Ratios(r) => r[i] <= c.to_f64(),
        }
    }

    /// Exact three-way comparison of observations `i` and `j`.
    pub fn cmp_obs(&self, i: usize, j: usize) -> std::cmp::Ordering {
        match &self.values {
            Values::Counts { counts, .. } => counts[i].cmp(&counts[j]),
            Values::Ratios(r) => r[i].total_cmp(&r[j]),
        }
    }

    /// Observation indices sorted by ratio (stable).
    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.cmp_obs(a, b));
        idx
    }

    /// New set made of the given rows (ids and truth follow along).
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let values = match &self.values {
            Values::Counts { m, counts } => {
                Values::Counts { m: *m, counts: rows.iter().map(|&i| counts[i]).collect() }
            }
            Values::Ratios(r) => Values::Ratios(rows.iter().map(|&i| r[i]).collect()),
        };
        if rows.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(Self {
            values,
            ids: self.ids.as_ref().map(|v| rows.iter().map(|&i| v[i].clone()).collect()),
            truth: self.truth.as_ref().map(|v| rows.iter().map(|&i| v[i]).collect()),
        })
    }

    /// Number of observations exactly equal to `x` (the `N(x)` count).
    pub fn multiplicity(&self, x: Fraction) -> usize {
        (0..self.len()).filter(|&i| self.le(i, x) && !self.lt(i, x)).count()
    }

    fn lt(&self, i: usize, c: Fraction) -> bool {
        match &self.values {
            Values::Counts { m, counts } => c.gt_ratio(counts[i], *m),
            Values::Ratios(r) => r[i] < c.to_f64(),
        }
    }
}

/// `ŝ_i = X_i / m` for every observation, in input order.
pub fn derive_ratios(obs: &ObservationSet) -> Vec<f64> {
    obs.ratios()
}
