//! Product witnesses `f(x) = ∏ x_j^{-α_j}` on the unit cube separating `L_{p⃗}` from `L_{p_min+ε}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixed::MixedExponent;
use crate::report::{csv_table, fmt17};

/// Relative change between the last two mixed norms below which they count as settled.
pub const CAUCHY_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessVerdict {
    NonEmbeddingConfirmed,
    NotConfirmed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub p: Vec<f64>,
    pub eps: f64,
    pub target_exponent: f64,
    pub alphas: Vec<f64>,
    pub truncations: Vec<f64>,
    pub mixed_norms: Vec<f64>,
    pub target_norms: Vec<f64>,
    /// `max/min - 1` over all mixed norms.
    pub mixed_variation: f64,
    /// Relative change between the last two mixed norms.
    pub mixed_last_step: f64,
    /// Last target norm over the first.
    pub target_growth: f64,
    pub mixed_cauchy: bool,
    pub target_increasing: bool,
    pub verdict: WitnessVerdict,
}

impl WitnessReport {
    pub fn to_csv(&self) -> String {
        csv_table(
            &["truncation", "mixed_norm", "target_norm"],
            self.truncations
                .iter()
                .zip(&self.mixed_norms)
                .zip(&self.target_norms)
                .map(|((m, a), b)| vec![fmt17(*m), fmt17(*a), fmt17(*b)]),
        )
    }
}

/// `‖min(x^{-α}, M)‖_{L_r(0,1)}`.
pub fn truncated_power_norm(alpha: f64, m: f64, r: f64) -> f64 {
    if alpha == 0.0 {
        return 1.0;
    }
    if r.is_infinite() {
        return m;
    }
    // the cut-off point x_M = M^{-1/α}
    let ln_xm = -m.ln() / alpha;
    let e = 1.0 - alpha * r;
    let head = (r * m.ln() + ln_xm).exp();
    let tail = if e == 0.0 { -ln_xm } else { -(e * ln_xm).exp_m1() / e };
    (head + tail).powf(1.0 / r)
}

/// Default exponents: `1/(p_l+ε)` on the axes attaining `p_l`, `0.8/p_j` on the others
/// and `0` where `p_j = ∞`.
pub fn default_alphas(p: &MixedExponent, eps: f64) -> Vec<f64> {
    let pl = p.p_min();
    p.as_slice()
        .iter()
        .map(|&pj| {
            if pj == pl {
                1.0 / (pl + eps)
            } else if pj.is_infinite() {
                0.0
            } else {
                0.8 / pj
            }
        })
        .collect()
}

fn validate(p: &MixedExponent, eps: f64, alphas: &[f64]) -> Result<()> {
    let pl = p.p_min();
    if pl.is_infinite() {
        return Err(Error::InvalidWitness("p_min must be finite".into()));
    }
    if p.is_constant() {
        return Err(Error::InvalidWitness("constant exponent vector admits no witness".into()));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidWitness(format!("eps = {eps} must be positive")));
    }
    if let Some(pj) = p.as_slice().iter().find(|&&pj| pj > pl && pl + eps >= pj) {
        return Err(Error::InvalidWitness(format!("p_min + eps = {} must stay below {pj}", pl + eps)));
    }
    if alphas.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: alphas.len() });
    }
    for (j, (&a, &pj)) in alphas.iter().zip(p.as_slice()).enumerate() {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidWitness(format!("alpha_{j} = {a}")));
        }
        if pj == pl {
            if !(a >= 1.0 / (pl + eps) && a < 1.0 / pl) {
                return Err(Error::InvalidWitness(format!(
                    "alpha_{j} = {a} must lie in [1/(p_min+eps), 1/p_min)"
                )));
            }
        } else if a * pj >= 1.0 && pj.is_finite() || (pj.is_infinite() && a != 0.0) {
            return Err(Error::InvalidWitness(format!("alpha_{j} = {a} must lie below 1/p_{j}")));
        }
    }
    Ok(())
}

/// Mixed and target norms of the value truncations `∏ min(x_j^{-α_j}, M)` on `[0,1]^d`.
///
/// Both norms factor over axes, so each is a product of closed-form one-dimensional integrals.
pub fn non_embedding_witness(
    p: &MixedExponent,
    eps: f64,
    truncations: &[f64],
    alphas: Option<&[f64]>,
) -> Result<WitnessReport> {
    let alphas = alphas.map_or_else(|| default_alphas(p, eps), <[f64]>::to_vec);
    validate(p, eps, &alphas)?;
    if truncations.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, found: truncations.len() });
    }
    if truncations.iter().any(|&m| !(m.is_finite() && m >= 1.0)) || truncations.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidWitness("truncations must be finite, >= 1 and increasing".into()));
    }
    let target = p.p_min() + eps;
    let mixed_norms: Vec<f64> = truncations
        .iter()
        .map(|&m| alphas.iter().zip(p.as_slice()).map(|(&a, &pj)| truncated_power_norm(a, m, pj)).product())
        .collect();
    let target_norms: Vec<f64> = truncations
        .iter()
        .map(|&m| alphas.iter().map(|&a| truncated_power_norm(a, m, target)).product())
        .collect();
    let n = mixed_norms.len();
    let (lo, hi) = mixed_norms.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    let mixed_last_step = (mixed_norms[n - 1] - mixed_norms[n - 2]).abs() / mixed_norms[n - 2];
    let mixed_cauchy = mixed_last_step < CAUCHY_TOL;
    let target_increasing = target_norms.windows(2).all(|w| w[1] > w[0]);
    Ok(WitnessReport {
        p: p.as_slice().to_vec(),
        eps,
        target_exponent: target,
        alphas,
        truncations: truncations.to_vec(),
        mixed_variation: hi / lo - 1.0,
        mixed_last_step,
        target_growth: target_norms[n - 1] / target_norms[0],
        mixed_norms,
        target_norms,
        mixed_cauchy,
        target_increasing,
        verdict: if mixed_cauchy && target_increasing {
            WitnessVerdict::NonEmbeddingConfirmed
        } else {
            WitnessVerdict::NotConfirmed
        },
    })
}
