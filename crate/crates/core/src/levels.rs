//! Level-set Lorentz engine shared by the tilde, mixed and variable Lorentz norms.

use crate::error::{Error, Result};
use crate::util::{level_diff, KahanSum};

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::InvalidIndex(format!("q = {q} must be positive")));
    }
    Ok(())
}

/// `(Σ_i N_i^q (v_i^q - v_{i+1}^q) / q)^{1/q}` where `v_0 > v_1 > … > 0` are the
/// distinct values and `N_i = inner(i)` is the inner norm of `{f >= v_i}`.
/// For `q = ∞` returns `max_i v_i N_i`.
pub(crate) fn level_set_norm(values: &[f64], q: f64, mut inner: impl FnMut(usize) -> Result<f64>) -> Result<f64> {
    check_q(q)?;
    if values.is_empty() {
        return Ok(0.0);
    }
    if q.is_infinite() {
        let mut best = 0.0f64;
        for (i, &v) in values.iter().enumerate() {
            best = best.max(v * inner(i)?);
        }
        return Ok(best);
    }
    let top = values[0];
    let mut acc = KahanSum::new();
    for (i, &v) in values.iter().enumerate() {
        let next = values.get(i + 1).copied().unwrap_or(0.0);
        let n = inner(i)?;
        acc.add(n.powf(q) * level_diff(next / top, v / top, q) / q);
    }
    Ok(top * acc.value().powf(1.0 / q))
}
