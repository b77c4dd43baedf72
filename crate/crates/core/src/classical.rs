//! Lebesgue and Lorentz quasi-norms computed in closed form from rearrangements.

use serde::{Deserialize, Serialize};

use crate::domain::StepFunction;
use crate::error::{Error, Result};
use crate::levels::{check_q, level_set_norm};
use crate::rearrangement::{rearrange, ValueMassProfile};
use crate::util::{pow_diff, KahanSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzIndex {
    p: f64,
    q: f64,
}

impl LorentzIndex {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_p(p)?;
        check_q(q)?;
        if p.is_infinite() && q.is_finite() {
            return Err(Error::InvalidIndex(format!("p = inf requires q = inf, got q = {q}")));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// `(Σ v^p w)^{1/p}`, or the top value for `p = ∞`.
pub fn lp_norm(f: &ValueMassProfile, p: f64) -> Result<f64> {
    check_p(p)?;
    let top = f.max_value();
    if top == 0.0 {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(top);
    }
    let acc: KahanSum = f.plateaus().iter().map(|&(v, w)| (v / top).powf(p) * w).collect();
    Ok(top * acc.value().powf(1.0 / p))
}

/// `(∫_0^∞ (t^{1/p} f*(t))^q dt/t)^{1/q}`, summed plateau by plateau.
pub fn lorentz_norm(f: &ValueMassProfile, idx: LorentzIndex) -> Result<f64> {
    let (p, q) = (idx.p, idx.q);
    let top = f.max_value();
    if top == 0.0 {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(top);
    }
    let cum = f.cumulative();
    if q.is_infinite() {
        return Ok(f.values().zip(&cum).map(|(v, b)| v * b.powf(1.0 / p)).fold(0.0, f64::max));
    }
    let e = q / p;
    let mut acc = KahanSum::new();
    for (i, v) in f.values().enumerate() {
        let a = if i == 0 { 0.0 } else { cum[i - 1] };
        acc.add((v / top).powf(q) * pow_diff(a, cum[i], e) / e);
    }
    Ok(top * acc.value().powf(1.0 / q))
}

/// Level-set form `(∫_0^∞ u^q ‖χ_{f>u}‖_p^q du/u)^{1/q}`; equals `p^{-1/q}` times [`lorentz_norm`].
pub fn lorentz_tilde_norm_profile(f: &ValueMassProfile, idx: LorentzIndex) -> Result<f64> {
    let values: Vec<f64> = f.values().collect();
    let cum = f.cumulative();
    let p = idx.p;
    level_set_norm(&values, idx.q, |i| Ok(if p.is_infinite() { 1.0 } else { cum[i].powf(1.0 / p) }))
}

pub fn lorentz_tilde_norm(f: &StepFunction, idx: LorentzIndex) -> Result<f64> {
    lorentz_tilde_norm_profile(&rearrange(f), idx)
}
