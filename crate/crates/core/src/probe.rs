//! Additional-index probes: Hardy-functional ratios along witness cascades.

use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{CellSet, StepFunction, TensorGrid, ALIGN_TOL};
use crate::envelope::{SpaceKind, SpaceSpec};
use crate::error::{Error, Result};
use crate::hardy::hardy_functional;
use crate::rearrangement::{rearrange, sample_analytic, AnalyticProfile};
use crate::report::{csv_table, fmt17};
use crate::util::csum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WitnessSpec {
    /// `s_k = b_k χ_{B_k} + Σ_{j=j0}^{k-1} b_j χ_{B_j \ B_{j+1}}`, `b_j = (μ(B_j)^{-1} j^{-α})^{1/p}`.
    /// Variable and classical spaces use cubes `B_{2^{-j}}(x0)`; mixed spaces use
    /// slabs of width `2^{-jd}` about `x0` along the axis of smallest exponent.
    Cascade {
        alpha: f64,
        j0: u32,
        #[serde(default)]
        x0: Option<Vec<f64>>,
    },
    /// Step minorant of `t^{-1/p}(1+|log t|)^{-γ}` on `[0, s)` with `k` dyadic levels,
    /// laid out along the axis of smallest exponent.
    PowerLog { gamma: f64, s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeThresholds {
    pub ratio_divergent: f64,
    pub slope_divergent: f64,
    pub ratio_bounded: f64,
}

impl Default for ProbeThresholds {
    fn default() -> Self {
        Self { ratio_divergent: 1.5, slope_divergent: 0.05, ratio_bounded: 1.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Bounded,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProbeOptions {
    /// Upper limit of the Hardy integral; defaults to half the first cascade scale.
    pub eps: Option<f64>,
    pub thresholds: ProbeThresholds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub space: String,
    pub v: f64,
    pub index: f64,
    pub hardy_alpha: f64,
    pub eps: f64,
    pub witness: WitnessSpec,
    pub k_min: u32,
    pub k_max: u32,
    pub ks: Vec<u32>,
    pub hardy: Vec<f64>,
    pub norms: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `R_{k_max} / R_{k_min}`.
    pub endpoint_ratio: f64,
    /// Slope of `ln R_k` against `ln k`.
    pub slope: f64,
    pub classification: Classification,
    /// Uniform bound on the witness norms, when one is available in closed form.
    pub norm_bound: Option<f64>,
    pub norms_within_bound: Option<bool>,
    pub thresholds: ProbeThresholds,
}

impl ProbeReport {
    pub fn to_csv(&self) -> String {
        csv_table(&["k", "ratio"], self.ks.iter().zip(&self.ratios).map(|(k, r)| vec![k.to_string(), fmt17(*r)]))
    }
}

pub fn classify(endpoint_ratio: f64, slope: f64, t: &ProbeThresholds) -> Classification {
    if endpoint_ratio > t.ratio_divergent && slope > t.slope_divergent {
        Classification::Divergent
    } else if endpoint_ratio < t.ratio_bounded {
        Classification::Bounded
    } else {
        Classification::Inconclusive
    }
}

/// `Σ_{j>=j0} j^{-a}` bounded from above (`a > 1`).
fn zeta_tail_bound(a: f64, j0: u32) -> f64 {
    const N: u32 = 100_000;
    let j0 = j0.max(1);
    let head = csum((j0..N.max(j0)).map(|j| (j as f64).powf(-a)));
    let n = N.max(j0) as f64;
    head + n.powf(-a) + n.powf(1.0 - a) / (a - 1.0)
}

/// Nested sets `B_j`, `j = j0..=k_max`, on a grid resolving them.
struct Cascade {
    grid: Arc<TensorGrid>,
    /// Largest `j` with the cell inside `B_j`, if any.
    level: Vec<Option<u32>>,
    j0: u32,
    measures: Vec<f64>,
}

impl Cascade {
    fn build(space: &SpaceSpec, x0: &[f64], axes: &[usize], radius: impl Fn(u32) -> f64, j0: u32, k_max: u32) -> Result<Self> {
        let base = space.grid();
        let dom = space.domain();
        let d = base.dim();
        if x0.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: x0.len() });
        }
        if !dom.contains(x0) {
            return Err(Error::WitnessOutOfDomain(format!("x0 = {x0:?} lies outside the domain")));
        }
        let r0 = radius(j0);
        for &a in axes {
            let tol = ALIGN_TOL * dom.side(a);
            let (lo, hi) = (dom.lo()[a], dom.hi()[a]);
            if (x0[a] > lo + tol && x0[a] - r0 < lo - tol) || (x0[a] < hi - tol && x0[a] + r0 > hi + tol) {
                return Err(Error::WitnessOutOfDomain(format!(
                    "the first cascade set (radius {r0}) crosses the boundary on axis {a}"
                )));
            }
        }
        let mut extra = vec![Vec::new(); d];
        for &a in axes {
            for j in j0..=k_max {
                let r = radius(j);
                extra[a].extend([x0[a] - r, x0[a] + r]);
            }
        }
        let grid = Arc::new(base.refined_exact(&extra)?);
        let inside = |c: usize, j: u32| {
            let r = radius(j);
            axes.iter().all(|&a| (grid.axis_cell_center(a, grid.axis_index(c, a)) - x0[a]).abs() <= r)
        };
        let level: Vec<Option<u32>> = (0..grid.n_cells())
            .map(|c| {
                if !inside(c, j0) {
                    return None;
                }
                // sets are nested, so the membership predicate is monotone in j
                let (mut lo, mut hi) = (j0, k_max);
                while lo < hi {
                    let mid = lo + (hi - lo + 1) / 2;
                    if inside(c, mid) {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                Some(lo)
            })
            .collect();
        let measures = (j0..=k_max)
            .map(|j| {
                csum(level.iter().zip(grid.cell_measures()).filter(|(l, _)| l.map_or(false, |l| l >= j)).map(|(_, m)| *m))
            })
            .collect::<Vec<f64>>();
        if measures.iter().any(|&m| m <= 0.0) || measures.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::WitnessOutOfDomain("a cascade set is not resolved by the grid".into()));
        }
        Ok(Self { grid, level, j0, measures })
    }

    fn measure(&self, j: u32) -> f64 {
        self.measures[(j - self.j0) as usize]
    }

    fn set(&self, j: u32) -> CellSet {
        let cells = (0..self.level.len()).filter(|&c| self.level[c].map_or(false, |l| l >= j)).collect();
        CellSet::new(self.grid.clone(), cells).expect("indices in range")
    }

    fn function(&self, k: u32, coeff: &[f64]) -> Result<StepFunction> {
        let values = self
            .level
            .iter()
            .map(|l| l.map_or(0.0, |l| coeff[(l.min(k) - self.j0) as usize]))
            .collect();
        StepFunction::new(self.grid.clone(), values)
    }
}

fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Computes `R_k = H_v(s_k) / ‖s_k‖_X` for `k` in `ks` and classifies the growth.
pub fn index_probe(
    space: &SpaceSpec,
    v: f64,
    witness: &WitnessSpec,
    ks: RangeInclusive<u32>,
    opts: &ProbeOptions,
) -> Result<ProbeReport> {
    if !(v > 0.0) {
        return Err(Error::InvalidValues(format!("v = {v} must be positive")));
    }
    let (k_min, k_max) = (*ks.start(), *ks.end());
    if k_max <= k_min {
        return Err(Error::InvalidWitness("k range needs at least two values".into()));
    }
    let pc = space.critical_exponent();
    if !pc.is_finite() {
        return Err(Error::InvalidWitness("critical exponent must be finite".into()));
    }
    let hardy_alpha = 1.0 / pc;
    let d = space.grid().dim();

    let mut hardy = Vec::new();
    let mut norms = Vec::new();
    let eps;
    let mut norm_bound = None;
    match witness {
        WitnessSpec::Cascade { alpha, j0, x0 } => {
            let (alpha, j0) = (*alpha, *j0);
            if !(alpha.is_finite() && alpha > 0.0) || j0 == 0 {
                return Err(Error::InvalidWitness(format!("alpha = {alpha}, j0 = {j0}")));
            }
            if k_min <= j0 {
                return Err(Error::InvalidWitness(format!("k range must start above j0 = {j0}")));
            }
            let x0 = match (x0, space.kind()) {
                (Some(x), _) => x.clone(),
                (None, SpaceKind::Variable { p, .. }) => p
                    .x0()
                    .map(<[f64]>::to_vec)
                    .ok_or_else(|| Error::InvalidWitness("the cascade needs x0".into()))?,
                (None, _) => space.domain().lo().to_vec(),
            };
            let cascade = match space.kind() {
                SpaceKind::Mixed { p, .. } => {
                    let l = p.worst_axis();
                    Cascade::build(space, &x0, &[l], |j| 0.5f64.powi((j as usize * d) as i32), j0, k_max)?
                }
                _ => {
                    let axes: Vec<usize> = (0..d).collect();
                    Cascade::build(space, &x0, &axes, |j| 0.5f64.powi(j as i32), j0, k_max)?
                }
            };
            let coeff: Vec<f64> = (j0..=k_max)
                .map(|j| (1.0 / cascade.measure(j) * (j as f64).powf(-alpha)).powf(1.0 / pc))
                .collect();
            eps = opts.eps.unwrap_or(0.5 * cascade.measure(j0));
            let sp = space.regrid(&cascade.grid)?;
            for k in ks.clone() {
                let f = cascade.function(k, &coeff)?;
                hardy.push(hardy_functional(&rearrange(&f), hardy_alpha, v, eps)?);
                norms.push(sp.norm(&f)?);
            }
            if space.q().is_none() && alpha > 1.0 {
                let z = zeta_tail_bound(alpha, j0);
                norm_bound = match sp.kind() {
                    SpaceKind::Mixed { p, .. } => {
                        let l = p.worst_axis();
                        let dom = space.domain();
                        let others: f64 = (0..d).filter(|&i| i != l).map(|i| dom.side(i)).product();
                        let factor: f64 = (0..d)
                            .filter(|&i| i != l)
                            .map(|i| dom.side(i).powf(1.0 / p.as_slice()[i]))
                            .product();
                        Some((z / others).powf(1.0 / pc) * factor)
                    }
                    SpaceKind::Variable { p, .. } => {
                        let ok = cascade.measure(j0) <= 1.0 && coeff.iter().all(|&b| b >= 1.0);
                        ok.then(|| {
                            let c = (j0..=k_max)
                                .map(|j| {
                                    let pp = p.p_plus_on(&cascade.set(j)).expect("non-empty");
                                    cascade.measure(j).powf(pc - pp)
                                })
                                .fold(1.0, f64::max);
                            (c.powf(1.0 / pc) * z).max(1.0).powf(1.0 / pc)
                        })
                    }
                    SpaceKind::Classical { .. } => {
                        let ok = cascade.measure(j0) <= 1.0 && coeff.iter().all(|&b| b >= 1.0);
                        ok.then(|| z.max(1.0).powf(1.0 / pc))
                    }
                };
            }
        }
        WitnessSpec::PowerLog { gamma, s } => {
            let axis = match space.kind() {
                SpaceKind::Mixed { p, .. } => p.worst_axis(),
                SpaceKind::Classical { .. } => 0,
                SpaceKind::Variable { .. } => {
                    return Err(Error::InvalidWitness("power-log witnesses need a mixed or classical space".into()))
                }
            };
            let prof = AnalyticProfile::power_log(pc, *gamma, *s).map_err(|e| Error::InvalidWitness(e.to_string()))?;
            let dom = space.domain();
            let others: f64 = (0..d).filter(|&i| i != axis).map(|i| dom.side(i)).product();
            if *s / others > dom.side(axis) * (1.0 + ALIGN_TOL) {
                return Err(Error::WitnessOutOfDomain(format!("support {s} does not fit in the domain")));
            }
            if k_min < 2 {
                return Err(Error::InvalidWitness("power-log witnesses need k >= 2".into()));
            }
            eps = opts.eps.unwrap_or(0.5 * s);
            for k in ks.clone() {
                let (lower, _) = sample_analytic(&prof, k)?;
                let lo = dom.lo()[axis];
                let cum = lower.cumulative();
                let mut extra = vec![Vec::new(); d];
                extra[axis] = cum.iter().map(|w| lo + w / others).collect();
                let grid = Arc::new(space.grid().refined_exact(&extra)?);
                let n = grid.shape()[axis];
                let per_axis: Vec<f64> = (0..n)
                    .map(|i| {
                        let x = grid.axis_cell_center(axis, i);
                        lower.eval((x - lo) * others)
                    })
                    .collect();
                let values = (0..grid.n_cells()).map(|c| per_axis[grid.axis_index(c, axis)]).collect();
                let f = StepFunction::new(grid.clone(), values)?;
                hardy.push(hardy_functional(&rearrange(&f), hardy_alpha, v, eps)?);
                norms.push(space.regrid(&grid)?.norm(&f)?);
            }
        }
    }

    let ratios: Vec<f64> = hardy.iter().zip(&norms).map(|(h, n)| h / n).collect();
    let ks_vec: Vec<u32> = ks.collect();
    let endpoint_ratio = ratios[ratios.len() - 1] / ratios[0];
    let xs: Vec<f64> = ks_vec.iter().map(|&k| (k as f64).ln()).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let slope = regression_slope(&xs, &ys);
    let max_norm = norms.iter().copied().fold(0.0, f64::max);
    Ok(ProbeReport {
        space: space.label(),
        v,
        index: space.theoretical_index(),
        hardy_alpha,
        eps,
        witness: witness.clone(),
        k_min,
        k_max,
        ks: ks_vec,
        hardy,
        norms,
        ratios,
        endpoint_ratio,
        slope,
        classification: classify(endpoint_ratio, slope, &opts.thresholds),
        norms_within_bound: norm_bound.map(|b| max_norm <= b * (1.0 + 1e-9)),
        norm_bound,
        thresholds: opts.thresholds,
    })
}
