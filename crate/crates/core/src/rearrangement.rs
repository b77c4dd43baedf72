//! Distribution functions and non-increasing rearrangements.

use serde::{Deserialize, Serialize};

use crate::domain::StepFunction;
use crate::error::{Error, Result};
use crate::report::fmt17;
use crate::util::csum;

/// `f*` as plateaus `(value, width)` laid out from `t = 0`, values strictly decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueMassProfile {
    plateaus: Vec<(f64, f64)>,
}

impl ValueMassProfile {
    pub fn new(plateaus: Vec<(f64, f64)>) -> Result<Self> {
        for &(v, w) in &plateaus {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidProfile(format!("value {v}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidProfile(format!("width {w}")));
            }
        }
        if plateaus.windows(2).any(|p| p[1].0 >= p[0].0) {
            return Err(Error::InvalidProfile("values must be strictly decreasing".into()));
        }
        Ok(Self { plateaus })
    }

    /// Canonical profile from unordered `(value, measure)` pairs: sorts, merges equal values, drops zeros.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut v: Vec<(f64, f64)> = pairs.into_iter().filter(|&(x, w)| x > 0.0 && w > 0.0).collect();
        v.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut plateaus: Vec<(f64, f64)> = Vec::new();
        let mut i = 0;
        while i < v.len() {
            let val = v[i].0;
            let j = i + v[i..].iter().take_while(|p| p.0 == val).count();
            plateaus.push((val, csum(v[i..j].iter().map(|p| p.1))));
            i = j;
        }
        Self { plateaus }
    }

    pub fn empty() -> Self {
        Self { plateaus: Vec::new() }
    }

    pub fn plateaus(&self) -> &[(f64, f64)] {
        &self.plateaus
    }

    pub fn len(&self) -> usize {
        self.plateaus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plateaus.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.plateaus.iter().map(|p| p.0)
    }

    pub fn total_mass(&self) -> f64 {
        csum(self.plateaus.iter().map(|p| p.1))
    }

    pub fn max_value(&self) -> f64 {
        self.plateaus.first().map_or(0.0, |p| p.0)
    }

    /// Cumulative masses `W_i` (right endpoints of the plateaus).
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = crate::util::KahanSum::new();
        self.plateaus
            .iter()
            .map(|p| {
                acc.add(p.1);
                acc.value()
            })
            .collect()
    }

    /// `(value, a, b)` for each plateau occupying `[a, b)`.
    pub fn segments(&self) -> Vec<(f64, f64, f64)> {
        let cum = self.cumulative();
        self.plateaus
            .iter()
            .enumerate()
            .map(|(i, p)| (p.0, if i == 0 { 0.0 } else { cum[i - 1] }, cum[i]))
            .collect()
    }

    /// `f*(t)`, right-continuous.
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.max_value();
        }
        let cum = self.cumulative();
        let i = cum.partition_point(|&b| b <= t);
        self.plateaus.get(i).map_or(0.0, |p| p.0)
    }

    /// Measure of `{f* > s}`.
    pub fn distribution(&self, s: f64) -> f64 {
        csum(self.plateaus.iter().filter(|p| p.0 > s).map(|p| p.1))
    }

    pub fn scaled(&self, c: f64) -> Self {
        if c <= 0.0 {
            return Self::empty();
        }
        Self { plateaus: self.plateaus.iter().map(|&(v, w)| (v * c, w)).collect() }
    }

    /// CSV with header `value,width`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("value,width\n");
        for &(v, w) in &self.plateaus {
            s.push_str(&format!("{},{}\n", fmt17(v), fmt17(w)));
        }
        s
    }
}

/// `μ({f > s})`, computed exactly from the cells.
pub fn distribution(f: &StepFunction, s: f64) -> f64 {
    csum(f.values().iter().zip(f.grid().cell_measures()).filter(|(v, _)| **v > s).map(|(_, m)| *m))
}

pub fn rearrange(f: &StepFunction) -> ValueMassProfile {
    ValueMassProfile::from_pairs(f.values().iter().copied().zip(f.grid().cell_measures().iter().copied()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticKind {
    Power,
    PowerLog,
}

/// `t^{-1/r} (1 + |log t|)^{-γ}` on `[0, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticProfile {
    pub kind: AnalyticKind,
    pub r: f64,
    pub gamma: f64,
    pub s: f64,
}

impl AnalyticProfile {
    pub fn power(r: f64, s: f64) -> Result<Self> {
        Self::new(AnalyticKind::Power, r, 0.0, s)
    }

    pub fn power_log(r: f64, gamma: f64, s: f64) -> Result<Self> {
        Self::new(AnalyticKind::PowerLog, r, gamma, s)
    }

    pub fn new(kind: AnalyticKind, r: f64, gamma: f64, s: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidProfile(format!("r = {r} must be positive")));
        }
        if !gamma.is_finite() || (kind == AnalyticKind::Power && gamma != 0.0) {
            return Err(Error::InvalidProfile(format!("gamma = {gamma}")));
        }
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::InvalidProfile(format!("support length {s} must lie in (0, 1]")));
        }
        // monotone on (0, s) iff s <= e^{1 - γ r}
        if gamma * r > 1.0 && s > (1.0 - gamma * r).exp() {
            return Err(Error::InvalidProfile(format!(
                "profile is not monotone on (0, {s}); need s <= {}",
                (1.0 - gamma * r).exp()
            )));
        }
        Ok(Self { kind, r, gamma, s })
    }

    /// The formula without the support cutoff.
    pub fn formula(&self, t: f64) -> f64 {
        t.powf(-1.0 / self.r) * (1.0 + t.ln().abs()).powf(-self.gamma)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t >= self.s {
            0.0
        } else {
            self.formula(t)
        }
    }

    /// Breakpoints `t_j = s 2^{-j}`, `j = 0..=levels`.
    pub fn breakpoints(&self, levels: u32) -> Vec<f64> {
        (0..=levels).map(|j| self.s * 0.5f64.powi(j as i32)).collect()
    }
}

/// Monotone step minorant and majorant of an analytic profile on `[s 2^{-J}, s)`.
///
/// Both carry a head plateau of value `f(t_J)` on `[0, t_J)`; the bracket
/// statement only covers `[t_J, s)`.
pub fn sample_analytic(p: &AnalyticProfile, levels: u32) -> Result<(ValueMassProfile, ValueMassProfile)> {
    if levels < 2 {
        return Err(Error::InvalidProfile(format!("need at least 2 levels, got {levels}")));
    }
    let t = p.breakpoints(levels);
    let j = levels as usize;
    let head = (p.formula(t[j]), t[j]);
    let lower = std::iter::once(head).chain((0..j).map(|i| (p.formula(t[i]), t[i] - t[i + 1])));
    let upper = std::iter::once(head).chain((0..j).map(|i| (p.formula(t[i + 1]), t[i] - t[i + 1])));
    Ok((ValueMassProfile::from_pairs(lower), ValueMassProfile::from_pairs(upper)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::TensorGrid;
    use std::sync::Arc;

    fn two_level() -> StepFunction {
        let g = Arc::new(TensorGrid::new(vec![vec![0.0, 0.2, 0.7, 1.0]]).unwrap());
        StepFunction::new(g, vec![3.0, 1.0, 0.0]).unwrap()
    }

    fn window_lp(f: &ValueMassProfile, p: f64, a: f64) -> f64 {
        f.segments().iter().map(|&(v, lo, hi)| v.powf(p) * (hi.min(1.0) - lo.max(a)).max(0.0)).sum::<f64>().powf(1.0 / p)
    }

    #[test]
    fn bracket_gap_is_frozen_on_a_fixed_window() {
        // extra levels only add breakpoints below t_J
        for (r, gamma, p) in [(1.0, 0.0, 1.0), (2.0, 0.5, 3.0), (0.7, 0.0, 0.5)] {
            let prof = AnalyticProfile::power_log(r, gamma, 1.0).unwrap();
            let a = 2f64.powi(-4);
            let gaps: Vec<f64> = (4..14)
                .map(|j| {
                    let (lo, up) = sample_analytic(&prof, j).unwrap();
                    window_lp(&up, p, a) - window_lp(&lo, p, a)
                })
                .collect();
            assert!(gaps[0] > 0.0);
            assert!(gaps.iter().all(|g| (g - gaps[0]).abs() <= 1e-12 * gaps[0]), "{gaps:?}");
        }
    }

    #[test]
    fn full_bracket_gap_grows_with_levels() {
        let prof = AnalyticProfile::power(2.0, 1.0).unwrap();
        let gaps: Vec<f64> = (2..12)
            .map(|j| {
                let (lo, up) = sample_analytic(&prof, j).unwrap();
                crate::lp_norm(&up, 1.0).unwrap() - crate::lp_norm(&lo, 1.0).unwrap()
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] > w[0]), "{gaps:?}");
    }

    #[test]
    fn distribution_examples() {
        let f = two_level();
        assert_eq!(distribution(&f, 2.0), 0.2);
        assert!((distribution(&f, 0.5) - 0.7).abs() < 1e-15);
        assert_eq!(distribution(&f, 3.0), 0.0);
    }

    #[test]
    fn rearrange_examples() {
        let p = rearrange(&two_level());
        assert_eq!(p.len(), 2);
        assert_eq!(p.plateaus()[0], (3.0, 0.2));
        assert_eq!(p.plateaus()[1].0, 1.0);
        assert!((p.plateaus()[1].1 - 0.5).abs() < 1e-15);
        assert_eq!(p.eval(0.0), 3.0);
        assert_eq!(p.eval(0.2), 1.0);
        assert_eq!(p.eval(0.7), 0.0);

        let g = Arc::new(TensorGrid::new(vec![vec![0.0, 0.5, 2.0]]).unwrap());
        let c = StepFunction::constant(g, 4.0).unwrap();
        assert_eq!(rearrange(&c).plateaus(), &[(4.0, 2.0)]);
    }

    #[test]
    fn profile_validation() {
        assert!(ValueMassProfile::new(vec![(1.0, 0.5), (1.0, 0.5)]).is_err());
        assert!(ValueMassProfile::new(vec![(2.0, 0.0)]).is_err());
        assert!(ValueMassProfile::new(vec![(2.0, 0.5), (1.0, 0.5)]).is_ok());
    }

    #[test]
    fn analytic_sampling_example() {
        let p = AnalyticProfile::power(1.0, 1.0).unwrap();
        let (lower, upper) = sample_analytic(&p, 2).unwrap();
        assert_eq!(lower.plateaus(), &[(4.0, 0.25), (2.0, 0.25), (1.0, 0.5)]);
        assert_eq!(upper.plateaus(), &[(4.0, 0.5), (2.0, 0.5)]);
    }

    #[test]
    fn analytic_bracket_is_pointwise() {
        for &(r, gamma) in &[(1.0, 0.0), (2.0, 0.7), (0.5, -0.3), (3.0, 0.2)] {
            let p = AnalyticProfile::new(AnalyticKind::PowerLog, r, gamma, 0.5).unwrap();
            let (lo, hi) = sample_analytic(&p, 12).unwrap();
            let tj = 0.5 * 0.5f64.powi(12);
            for k in 0..2000 {
                let t = tj + (0.5 - tj) * (k as f64 + 0.5) / 2000.0;
                let v = p.eval(t);
                assert!(lo.eval(t) <= v * (1.0 + 1e-14), "r={r} g={gamma} t={t}");
                assert!(hi.eval(t) >= v * (1.0 - 1e-14), "r={r} g={gamma} t={t}");
            }
        }
    }

    #[test]
    fn analytic_validation() {
        assert!(AnalyticProfile::power(0.0, 1.0).is_err());
        assert!(AnalyticProfile::power_log(-1.0, -2.0, 1.0).is_err());
        assert!(AnalyticProfile::power_log(1.0, 3.0, 1.0).is_err());
        assert!(AnalyticProfile::power_log(1.0, 3.0, 0.1).is_ok());
        let p = AnalyticProfile::power(1.0, 1.0).unwrap();
        assert!(sample_analytic(&p, 1).is_err());
    }

    #[test]
    fn csv_layout() {
        let p = ValueMassProfile::new(vec![(3.0, 0.2)]).unwrap();
        assert_eq!(p.to_csv(), "value,width\n3.0000000000000000e0,2.0000000000000001e-1\n");
    }
}
