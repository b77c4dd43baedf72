//! Hardy-type functional `(∫_0^ε (t^α f*(t))^v dt/t)^{1/v}` on rearrangement profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrangement::{sample_analytic, AnalyticProfile, ValueMassProfile};
use crate::util::{pow_diff, KahanSum};

fn check(alpha: f64, v: f64, eps: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::InvalidValues(format!("alpha = {alpha}")));
    }
    if v.is_nan() || v <= 0.0 {
        return Err(Error::InvalidValues(format!("v = {v} must be positive")));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidValues(format!("eps = {eps} must be positive")));
    }
    Ok(())
}

/// `∫_a^b t^{e-1} dt` for `0 <= a < b`.
fn power_integral(a: f64, b: f64, e: f64) -> f64 {
    if e > 0.0 {
        pow_diff(a, b, e) / e
    } else if a == 0.0 {
        f64::INFINITY
    } else if e == 0.0 {
        (b / a).ln()
    } else {
        pow_diff(a, b, -e) * (a * b).powf(e) / -e
    }
}

/// Closed-form plateau sum with `κ ≡ 1`; `+∞` when the integral diverges at `0`.
pub fn hardy_functional(profile: &ValueMassProfile, alpha: f64, v: f64, eps: f64) -> Result<f64> {
    hardy_functional_weighted(profile, None, alpha, v, eps)
}

/// As [`hardy_functional`] with a weight `κ` that is constant on each plateau.
pub fn hardy_functional_weighted(
    profile: &ValueMassProfile,
    kappa: Option<&[f64]>,
    alpha: f64,
    v: f64,
    eps: f64,
) -> Result<f64> {
    check(alpha, v, eps)?;
    if let Some(k) = kappa {
        if k.len() != profile.len() {
            return Err(Error::DimensionMismatch { expected: profile.len(), found: k.len() });
        }
        if k.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidValues("weights must be finite and nonnegative".into()));
        }
    }
    let weight = |i: usize| kappa.map_or(1.0, |k| k[i]);
    let segments: Vec<(usize, f64, f64, f64)> = profile
        .segments()
        .into_iter()
        .enumerate()
        .filter(|(_, s)| s.1 < eps)
        .map(|(i, (val, a, b))| (i, val * weight(i), a, b.min(eps)))
        .filter(|s| s.1 > 0.0)
        .collect();
    if v.is_infinite() {
        let sup = segments
            .iter()
            .map(|&(_, val, a, b)| {
                if alpha > 0.0 {
                    val * b.powf(alpha)
                } else if alpha == 0.0 {
                    val
                } else if a == 0.0 {
                    f64::INFINITY
                } else {
                    val * a.powf(alpha)
                }
            })
            .fold(0.0, f64::max);
        return Ok(sup);
    }
    let top = segments.iter().map(|s| s.1).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let e = alpha * v;
    let mut acc = KahanSum::new();
    for &(_, val, a, b) in &segments {
        let integral = power_integral(a, b, e);
        if integral.is_infinite() {
            return Ok(f64::INFINITY);
        }
        acc.add((val / top).powf(v) * integral);
    }
    Ok(top * acc.value().powf(1.0 / v))
}

/// Rigorous two-sided enclosure of the Hardy functional of an analytic profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyBracket {
    pub lower: f64,
    pub upper: f64,
}

/// Upper bound for `∫_0^τ (t^α f(t))^v dt/t` with `f = t^{-1/r}(1-ln t)^{-γ}`, `τ <= 1`.
fn analytic_tail(p: &AnalyticProfile, alpha: f64, v: f64, tau: f64) -> f64 {
    let u = 1.0 - tau.ln();
    let gv = p.gamma * v;
    let delta = (alpha - 1.0 / p.r) * v;
    if delta < 0.0 {
        return f64::INFINITY;
    }
    if delta == 0.0 {
        // ∫_u^∞ w^{-γv} dw
        return if gv > 1.0 { u.powf(1.0 - gv) / (gv - 1.0) } else { f64::INFINITY };
    }
    if p.gamma >= 0.0 {
        return u.powf(-gv) * tau.powf(delta) / delta;
    }
    // e^δ Γ(m+1, δu) / δ^{m+1} with m = -γv, via Γ(s,x) <= x^{s-1} e^{-x} / (1 - (s-1)/x) for x > s-1
    let m = -gv;
    let x = delta * u;
    if x <= m + 1.0 {
        return f64::INFINITY;
    }
    (delta + m * x.ln() - x).exp() / (1.0 - m / x) / delta.powf(m + 1.0)
}

fn analytic_tail_sup(p: &AnalyticProfile, alpha: f64, tau: f64) -> f64 {
    if alpha < 1.0 / p.r || p.gamma < 0.0 {
        return f64::INFINITY;
    }
    tau.powf(alpha - 1.0 / p.r) * (1.0 - tau.ln()).powf(-p.gamma)
}

/// Lower value from the step minorant, upper value from the step majorant on
/// `[t_J, ε)` plus an analytic bound for `(0, t_J)`.
pub fn hardy_bracket(p: &AnalyticProfile, levels: u32, alpha: f64, v: f64, eps: f64) -> Result<HardyBracket> {
    check(alpha, v, eps)?;
    let (lower, upper) = sample_analytic(p, levels)?;
    let tj = p.s * 0.5f64.powi(levels as i32);
    let lo = hardy_functional(&lower, alpha, v, eps)?;
    if eps <= tj {
        let whole = if v.is_infinite() { analytic_tail_sup(p, alpha, eps) } else {
            analytic_tail(p, alpha, v, eps).powf(1.0 / v)
        };
        return Ok(HardyBracket { lower: lo, upper: whole });
    }
    // majorant restricted to [t_J, ε): drop the head plateau, which the analytic tail replaces
    let head = upper.plateaus()[0];
    let body = ValueMassProfile::from_pairs(
        std::iter::once((head.0, head.1 - tj)).chain(upper.plateaus()[1..].iter().copied()),
    );
    let up = if v.is_infinite() {
        let body_sup = upper
            .segments()
            .into_iter()
            .filter(|s| s.1 < eps)
            .map(|(val, _, b)| val * b.min(eps).powf(alpha))
            .fold(0.0, f64::max);
        body_sup.max(analytic_tail_sup(p, alpha, tj))
    } else {
        // shift the body so it starts at t_J
        let mut acc = KahanSum::new();
        for (val, a, b) in body.segments() {
            let (a, b) = (a + tj, (b + tj).min(eps));
            if a < b {
                acc.add(val.powf(v) * power_integral(a, b, alpha * v));
            }
        }
        acc.add(analytic_tail(p, alpha, v, tj));
        acc.value().powf(1.0 / v)
    };
    Ok(HardyBracket { lower: lo, upper: up.max(lo) })
}
