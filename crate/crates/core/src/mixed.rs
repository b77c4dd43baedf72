//! Iterated mixed norms `‖·‖_{p⃗}` and mixed Lorentz norms on tensor grids.

use serde::{Deserialize, Serialize};

use crate::classical::check_p;
use crate::domain::{BoxDomain, CellSet, StepFunction};
use crate::error::{Error, Result};
use crate::levels::{check_q, level_set_norm};
use crate::rearrangement::rearrange;
use crate::util::KahanSum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedExponent(Vec<f64>);

impl MixedExponent {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidIndex("empty exponent vector".into()));
        }
        for &pi in &p {
            check_p(pi)?;
        }
        Ok(Self(p))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn p_min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// First axis attaining `p_min`.
    pub fn worst_axis(&self) -> usize {
        let m = self.p_min();
        self.0.iter().position(|&p| p == m).expect("non-empty")
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&p| p == self.0[0])
    }
}

impl TryFrom<Vec<f64>> for MixedExponent {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MixedExponent> for Vec<f64> {
    fn from(m: MixedExponent) -> Self {
        m.0
    }
}

/// Collapses the leading axis of a row-major array by the `p`-norm against `widths`.
fn reduce_leading(values: &[f64], n0: usize, widths: &[f64], p: f64) -> Vec<f64> {
    let rest = values.len() / n0;
    let mut top = vec![0.0f64; rest];
    for i in 0..n0 {
        for (r, t) in top.iter_mut().enumerate() {
            *t = t.max(values[i * rest + r]);
        }
    }
    if p.is_infinite() {
        return top;
    }
    let mut acc = vec![KahanSum::new(); rest];
    for i in 0..n0 {
        let w = widths[i];
        for r in 0..rest {
            let v = values[i * rest + r];
            if v > 0.0 {
                acc[r].add((v / top[r]).powf(p) * w);
            }
        }
    }
    top.iter().zip(&acc).map(|(&t, a)| if t == 0.0 { 0.0 } else { t * a.value().powf(1.0 / p) }).collect()
}

/// `‖…‖f‖_{L_{p_1}(dx_1)}…‖_{L_{p_d}(dx_d)}`: axis 1 is integrated first.
pub fn mixed_norm(f: &StepFunction, p: &MixedExponent) -> Result<f64> {
    let grid = f.grid();
    if p.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: p.dim() });
    }
    let mut values = f.values().to_vec();
    for axis in 0..grid.dim() {
        let widths: Vec<f64> = grid.breakpoints(axis).windows(2).map(|w| w[1] - w[0]).collect();
        values = reduce_leading(&values, grid.shape()[axis], &widths, p.as_slice()[axis]);
    }
    Ok(values[0])
}

pub fn mixed_indicator_norm(set: &CellSet, p: &MixedExponent) -> Result<f64> {
    mixed_norm(&set.indicator(), p)
}

fn check_mixed_q(p: &MixedExponent, q: f64) -> Result<()> {
    check_q(q)?;
    if p.p_min().is_infinite() && q.is_finite() {
        return Err(Error::InvalidIndex("p_min = inf requires q = inf".into()));
    }
    Ok(())
}

/// `(∫_0^∞ u^q ‖χ_{f>u}‖_{p⃗}^q du/u)^{1/q}`; one inner mixed norm per distinct level.
pub fn mixed_lorentz_norm(f: &StepFunction, p: &MixedExponent, q: f64) -> Result<f64> {
    check_mixed_q(p, q)?;
    if p.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: p.dim() });
    }
    let values: Vec<f64> = rearrange(f).values().collect();
    level_set_norm(&values, q, |i| mixed_norm(&f.superlevel_closed(values[i]).indicator(), p))
}

/// `‖χ_Ω‖_{q⃗}` with `1/q_i = 1/p_min - 1/p_i`.
pub fn hoelder_embedding_constant(p: &MixedExponent, domain: &BoxDomain) -> Result<f64> {
    if p.dim() != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), found: p.dim() });
    }
    let pm = p.p_min();
    if pm.is_infinite() {
        return Err(Error::InvalidIndex("p_min must be finite".into()));
    }
    Ok(p.as_slice()
        .iter()
        .enumerate()
        .map(|(i, &pi)| domain.side(i).powf(1.0 / pm - 1.0 / pi))
        .product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::lp_norm;
    use crate::domain::{product_indicator, TensorGrid};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<TensorGrid> {
        Arc::new(TensorGrid::uniform(&BoxDomain::unit(2), &[n, n]).unwrap())
    }

    fn pv(v: &[f64]) -> MixedExponent {
        MixedExponent::new(v.to_vec()).unwrap()
    }

    #[test]
    fn product_indicator_example() {
        let f = product_indicator(&grid(8), &[(0.0, 0.5), (0.0, 0.25)]).unwrap();
        assert_relative_eq!(mixed_norm(&f, &pv(&[1.0, 2.0])).unwrap(), 0.25, max_relative = 1e-15);
    }

    #[test]
    fn constant_exponent_is_lebesgue() {
        let g = grid(4);
        let f = StepFunction::from_fn(g, |x| 1.0 + 3.0 * x[0] + x[1] * x[1]).unwrap();
        let m = mixed_norm(&f, &pv(&[2.5, 2.5])).unwrap();
        assert_relative_eq!(m, lp_norm(&rearrange(&f), 2.5).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn normalized_slab_has_norm_one() {
        let g = grid(64);
        let s = 1.0 / 64.0;
        let f = product_indicator(&g, &[(0.0, s), (0.0, 1.0)]).unwrap().scaled(s.powf(-1.0)).unwrap();
        assert_relative_eq!(mixed_norm(&f, &pv(&[1.0, 2.0])).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn infinite_axis_takes_max() {
        let g = Arc::new(TensorGrid::new(vec![vec![0.0, 0.5, 1.0], vec![0.0, 0.25, 1.0]]).unwrap());
        let f = StepFunction::new(g, vec![1.0, 2.0, 3.0, 0.5]).unwrap();
        // max over x1 leaves 3 on the first x2-cell and 2 on the second
        let m = mixed_norm(&f, &pv(&[f64::INFINITY, 1.0])).unwrap();
        assert_relative_eq!(m, 3.0 * 0.25 + 2.0 * 0.75, max_relative = 1e-15);
    }

    #[test]
    fn mixed_lorentz_examples() {
        let g = grid(8);
        let f = product_indicator(&g, &[(0.0, 0.5), (0.0, 0.25)]).unwrap();
        let p = pv(&[1.0, 2.0]);
        assert_relative_eq!(mixed_lorentz_norm(&f, &p, 1.0).unwrap(), 0.25, max_relative = 1e-15);
        // slab normalized by q^{1/q}
        let q: f64 = 3.0;
        let s = 0.125;
        let slab = product_indicator(&g, &[(0.0, s), (0.0, 1.0)]).unwrap().scaled(q.powf(1.0 / q) / s).unwrap();
        assert_relative_eq!(mixed_lorentz_norm(&slab, &p, q).unwrap(), 1.0, max_relative = 1e-14);
        assert!(mixed_lorentz_norm(&f, &pv(&[f64::INFINITY, f64::INFINITY]), 2.0).is_err());
    }

    #[test]
    fn hoelder_constant_examples() {
        let unit = BoxDomain::unit(2);
        assert_eq!(hoelder_embedding_constant(&pv(&[1.0, 3.0]), &unit).unwrap(), 1.0);
        let big = BoxDomain::new(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap();
        assert_relative_eq!(
            hoelder_embedding_constant(&pv(&[1.0, 2.0]), &big).unwrap(),
            2f64.sqrt(),
            max_relative = 1e-15
        );
        assert_eq!(hoelder_embedding_constant(&pv(&[2.0, 2.0]), &big).unwrap(), 1.0);
    }

    #[test]
    fn dimension_checked() {
        let f = product_indicator(&grid(2), &[(0.0, 0.5), (0.0, 1.0)]).unwrap();
        assert!(matches!(mixed_norm(&f, &pv(&[1.0])), Err(Error::DimensionMismatch { .. })));
    }
}
