//! Growth-envelope lower bounds from certified candidate families, power-law fits
//! and envelope ratio tests.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classical::{lorentz_norm, lp_norm, LorentzIndex};
use crate::domain::{ball, BoxDomain, CellSet, StepFunction, TensorGrid, ALIGN_TOL};
use crate::error::{Error, Result};
use crate::levels::check_q;
use crate::mixed::{mixed_lorentz_norm, mixed_norm, MixedExponent};
use crate::rearrangement::rearrange;
use crate::report::{csv_table, fmt17};
use crate::variable::{variable_lorentz_norm, variable_norm, ExponentField};

/// Tolerance of the variable-norm root finder inside envelope and probe computations.
pub const NORM_TOL: f64 = 1e-12;
/// Certificates must have norm at most `1 + CERT_SLACK`.
pub const CERT_SLACK: f64 = 1e-9;
/// Relative slack when matching samples against fit-range endpoints.
pub const RANGE_SLACK: f64 = 1e-5;

#[derive(Debug, Clone)]
pub enum SpaceKind {
    /// `L_p` when `q` is `None`, the Lorentz space `L_{p,q}` otherwise.
    Classical { p: f64, q: Option<f64> },
    /// `L_{p⃗}` or the mixed Lorentz space `L_{p⃗,q}`.
    Mixed { p: MixedExponent, q: Option<f64> },
    /// `L_{p(·)}` or `L_{p(·),q}`.
    Variable { p: ExponentField, q: Option<f64> },
}

/// A function space together with the grid its candidate sets live on.
#[derive(Debug, Clone)]
pub struct SpaceSpec {
    kind: SpaceKind,
    grid: Arc<TensorGrid>,
}

impl SpaceSpec {
    pub fn classical(grid: Arc<TensorGrid>, p: f64, q: Option<f64>) -> Result<Self> {
        LorentzIndex::new(p, q.unwrap_or(p))?;
        Ok(Self { kind: SpaceKind::Classical { p, q }, grid })
    }

    pub fn mixed(grid: Arc<TensorGrid>, p: MixedExponent, q: Option<f64>) -> Result<Self> {
        if p.dim() != grid.dim() {
            return Err(Error::DimensionMismatch { expected: grid.dim(), found: p.dim() });
        }
        if let Some(q) = q {
            check_q(q)?;
            if p.p_min().is_infinite() && q.is_finite() {
                return Err(Error::InvalidIndex("p_min = inf requires q = inf".into()));
            }
        }
        Ok(Self { kind: SpaceKind::Mixed { p, q }, grid })
    }

    pub fn variable(p: ExponentField, q: Option<f64>) -> Result<Self> {
        if let Some(q) = q {
            check_q(q)?;
        }
        let grid = p.grid().clone();
        Ok(Self { kind: SpaceKind::Variable { p, q }, grid })
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn grid(&self) -> &Arc<TensorGrid> {
        &self.grid
    }

    pub fn domain(&self) -> &BoxDomain {
        self.grid.domain()
    }

    pub fn q(&self) -> Option<f64> {
        match &self.kind {
            SpaceKind::Classical { q, .. } | SpaceKind::Mixed { q, .. } | SpaceKind::Variable { q, .. } => *q,
        }
    }

    /// The exponent governing the envelope: `p`, `p_min` or `p₋`.
    pub fn critical_exponent(&self) -> f64 {
        match &self.kind {
            SpaceKind::Classical { p, .. } => *p,
            SpaceKind::Mixed { p, .. } => p.p_min(),
            SpaceKind::Variable { p, .. } => p.p_minus(),
        }
    }

    /// `α` in `E(t) ~ t^{-α}`.
    pub fn theoretical_alpha(&self) -> f64 {
        1.0 / self.critical_exponent()
    }

    /// Additional index `u_G`: `q` for Lorentz-type spaces, the critical exponent otherwise.
    pub fn theoretical_index(&self) -> f64 {
        self.q().unwrap_or_else(|| self.critical_exponent())
    }

    pub fn label(&self) -> String {
        let q = self.q().map(|q| format!(",{q}")).unwrap_or_default();
        match &self.kind {
            SpaceKind::Classical { p, .. } => format!("L_{{{p}{q}}}"),
            SpaceKind::Mixed { p, .. } => {
                let ps: Vec<String> = p.as_slice().iter().map(|x| x.to_string()).collect();
                format!("L_{{({}){q}}}", ps.join(","))
            }
            SpaceKind::Variable { p, .. } => format!("L_{{p(.){q}}}[p-={},p+={}]", p.p_minus(), p.p_plus()),
        }
    }

    pub fn norm(&self, f: &StepFunction) -> Result<f64> {
        match &self.kind {
            SpaceKind::Classical { p, q } => {
                let prof = rearrange(f);
                match q {
                    None => lp_norm(&prof, *p),
                    Some(q) => lorentz_norm(&prof, LorentzIndex::new(*p, *q)?),
                }
            }
            SpaceKind::Mixed { p, q } => match q {
                None => mixed_norm(f, p),
                Some(q) => mixed_lorentz_norm(f, p, *q),
            },
            SpaceKind::Variable { p, q } => match q {
                None => variable_norm(f, p, NORM_TOL),
                Some(q) => variable_lorentz_norm(f, p, *q, NORM_TOL),
            },
        }
    }

    /// The same space with its grid replaced by a refinement over the same domain.
    pub fn regrid(&self, grid: &Arc<TensorGrid>) -> Result<Self> {
        if !grid.domain().approx_eq(self.domain()) {
            return Err(Error::DomainMismatch);
        }
        let kind = match &self.kind {
            SpaceKind::Variable { p, q } => SpaceKind::Variable { p: p.regrid(grid)?, q: *q },
            k => k.clone(),
        };
        Ok(Self { kind, grid: grid.clone() })
    }

    /// Point the ball family is centered at.
    fn center(&self) -> Result<Vec<f64>> {
        match &self.kind {
            SpaceKind::Variable { p, .. } => p
                .x0()
                .map(<[f64]>::to_vec)
                .ok_or_else(|| Error::InvalidValues("the ball family needs a designated x0".into())),
            _ => Ok(self.domain().lo().to_vec()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Corner-anchored cubes and grid-resolved dyadic cubes.
    NormalizedIndicators,
    /// `[lo_k, b] × (full extent)` along each axis `k`.
    Slabs,
    /// Cubes `B_r(x0)` at dyadic radii.
    Lh0Balls,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::NormalizedIndicators => "normalized_indicators",
            Family::Slabs => "slabs",
            Family::Lh0Balls => "lh0_balls",
        }
    }
}

/// `χ_A / ‖χ_A‖`: `f*(t) = scale` for every `t < μ(A)`.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub family: Family,
    pub set: CellSet,
    pub scale: f64,
    pub verified_norm: f64,
}

impl Certificate {
    pub fn function(&self) -> StepFunction {
        self.set.indicator().scaled(self.scale).expect("finite scale")
    }

    pub fn f_star(&self, t: f64) -> f64 {
        rearrange(&self.function()).eval(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSample {
    pub t: f64,
    pub estimate: f64,
    pub family: Family,
    /// Measure of the certifying set.
    pub set_measure: f64,
    /// Norm of the certifying function `χ_A / ‖χ_A‖`.
    pub certificate_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha: f64,
    pub stderr: f64,
    pub n: usize,
    pub t_lo: f64,
    pub t_hi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeCurve {
    pub space: String,
    pub families: Vec<Family>,
    pub samples: Vec<EnvelopeSample>,
    pub fit: Option<FitResult>,
    #[serde(skip)]
    pub certificates: Vec<Certificate>,
}

impl EnvelopeCurve {
    /// Uncertified curve from raw values.
    pub fn from_values(label: &str, ts: &[f64], es: &[f64]) -> Result<Self> {
        if ts.len() != es.len() {
            return Err(Error::DimensionMismatch { expected: ts.len(), found: es.len() });
        }
        let samples = ts
            .iter()
            .zip(es)
            .map(|(&t, &e)| EnvelopeSample {
                t,
                estimate: e,
                family: Family::NormalizedIndicators,
                set_measure: f64::NAN,
                certificate_norm: f64::NAN,
            })
            .collect();
        Ok(Self { space: label.into(), families: vec![], samples, fit: None, certificates: vec![] })
    }

    pub fn ts(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.estimate).collect()
    }

    /// Fits and stores the exponent over `[t_lo, t_hi]`.
    pub fn with_fit(mut self, t_lo: f64, t_hi: f64) -> Result<Self> {
        self.fit = Some(fit_envelope_exponent(&self, t_lo, t_hi)?);
        Ok(self)
    }

    pub fn to_csv(&self) -> String {
        csv_table(
            &["t", "estimate", "family"],
            self.samples.iter().map(|s| vec![fmt17(s.t), fmt17(s.estimate), s.family.name().to_string()]),
        )
    }
}

/// `2^{-k}(1 - 2^{-20})` for `k = k_lo..=k_hi`: just below dyadic measures, so
/// the dyadic sets of measure `2^{-k}` qualify as candidates.
pub fn dyadic_t_samples(k_lo: u32, k_hi: u32) -> Vec<f64> {
    (k_lo..=k_hi).rev().map(|k| 0.5f64.powi(k as i32) * (1.0 - 2f64.powi(-20))).collect()
}

/// Normalized breakpoint positions `(b - lo) / L` shared by every axis, with the per-axis indices.
fn common_corner_steps(grid: &TensorGrid) -> Vec<Vec<usize>> {
    let dom = grid.domain();
    let d = grid.dim();
    let rel = |a: usize, i: usize| (grid.breakpoints(a)[i] - dom.lo()[a]) / dom.side(a);
    (1..grid.breakpoints(0).len())
        .filter_map(|i0| {
            let sigma = rel(0, i0);
            let mut idx = vec![i0];
            for a in 1..d {
                let x = dom.lo()[a] + sigma * dom.side(a);
                idx.push(grid.find_breakpoint(a, x)?);
            }
            Some(idx)
        })
        .collect()
}

/// Per-axis cell ranges of resolved dyadic intervals at level `j`.
fn dyadic_intervals(grid: &TensorGrid, axis: usize, j: u32) -> Vec<(usize, usize)> {
    let dom = grid.domain();
    let (lo, len) = (dom.lo()[axis], dom.side(axis));
    let n = 2f64.powi(j as i32);
    let bps = grid.breakpoints(axis);
    bps.iter()
        .enumerate()
        .filter_map(|(i, &b)| {
            let m = (b - lo) / len * n;
            let mr = m.round();
            if (m - mr).abs() > ALIGN_TOL * n.max(1.0) || mr >= n {
                return None;
            }
            let end = lo + len * (mr + 1.0) / n;
            grid.find_breakpoint(axis, end).map(|k| (i, k))
        })
        .collect()
}

struct CandidateGenerator<'a> {
    space: &'a SpaceSpec,
    corner: Vec<Vec<usize>>,
    balls: Vec<CellSet>,
}

impl<'a> CandidateGenerator<'a> {
    fn new(space: &'a SpaceSpec, families: &[Family]) -> Result<Self> {
        let grid = space.grid();
        let corner = common_corner_steps(grid);
        let mut balls = Vec::new();
        if families.contains(&Family::Lh0Balls) {
            let x0 = space.center()?;
            let big = (0..grid.dim()).map(|a| space.domain().side(a)).fold(0.0, f64::max);
            for j in 0..=64 {
                match ball(grid, &x0, big * 0.5f64.powi(j)) {
                    Ok(b) => balls.push(b),
                    Err(Error::EmptySet) => break,
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(Self { space, corner, balls })
    }

    fn candidates(&self, family: Family, t: f64) -> Result<Vec<CellSet>> {
        let grid = self.space.grid();
        let d = grid.dim();
        let vol = grid.volume();
        let mut out = Vec::new();
        match family {
            Family::NormalizedIndicators => {
                for idx in &self.corner {
                    let ranges: Vec<_> = idx.iter().map(|&i| (0, i)).collect();
                    let set = CellSet::from_ranges(grid.clone(), &ranges)?;
                    if set.measure() > t {
                        out.push(set);
                        break;
                    }
                }
                // largest dyadic level with cube measure above t, falling back to coarser levels
                let jmax = ((vol / t).log2() / d as f64).ceil().max(1.0) as u32 - 1;
                for j in (0..=jmax).rev() {
                    let per_axis: Vec<_> = (0..d).map(|a| dyadic_intervals(grid, a, j)).collect();
                    if per_axis.iter().any(Vec::is_empty) {
                        continue;
                    }
                    let mut combos: Vec<Vec<(usize, usize)>> = vec![vec![]];
                    for ivs in &per_axis {
                        combos = combos
                            .iter()
                            .flat_map(|c| ivs.iter().map(move |&iv| [c.clone(), vec![iv]].concat()))
                            .collect();
                    }
                    let sets: Vec<CellSet> = combos
                        .iter()
                        .map(|r| CellSet::from_ranges(grid.clone(), r))
                        .collect::<Result<_>>()?;
                    let before = out.len();
                    out.extend(sets.into_iter().filter(|s| s.measure() > t));
                    if out.len() > before {
                        break;
                    }
                }
            }
            Family::Slabs => {
                for axis in 0..d {
                    let bps = grid.breakpoints(axis);
                    for i in 1..bps.len() {
                        let mut ranges: Vec<_> = (0..d).map(|a| (0, grid.shape()[a])).collect();
                        ranges[axis] = (0, i);
                        let set = CellSet::from_ranges(grid.clone(), &ranges)?;
                        if set.measure() > t {
                            out.push(set);
                            break;
                        }
                    }
                }
            }
            Family::Lh0Balls => {
                if let Some(b) = self.balls.iter().filter(|b| b.measure() > t).min_by(|a, b| {
                    a.measure().total_cmp(&b.measure())
                }) {
                    out.push(b.clone());
                }
            }
        }
        Ok(out)
    }
}

/// For each `t`, the largest `1/‖χ_A‖` over candidate sets with `μ(A) > t`,
/// followed by a running max from the right so the curve is non-increasing.
pub fn envelope_lower(space: &SpaceSpec, t_samples: &[f64], families: &[Family]) -> Result<EnvelopeCurve> {
    if families.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut families = families.to_vec();
    families.sort();
    families.dedup();
    let vol = space.grid().volume();
    let mut ts = t_samples.to_vec();
    if let Some(t) = ts.iter().find(|&&t| !(t > 0.0 && t < vol)) {
        return Err(Error::InvalidValues(format!("t = {t} outside (0, {vol})")));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();

    let gen = CandidateGenerator::new(space, &families)?;
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut best: Vec<(f64, Family, CellSet, f64)> = Vec::with_capacity(ts.len());
    for &t in &ts {
        let mut winner: Option<(f64, Family, CellSet, f64)> = None;
        for &fam in &families {
            for set in gen.candidates(fam, t)? {
                let n = match cache.get(set.cells()) {
                    Some(&n) => n,
                    None => {
                        let n = space.norm(&set.indicator())?;
                        cache.insert(set.cells().to_vec(), n);
                        n
                    }
                };
                let est = 1.0 / n;
                if winner.as_ref().map_or(true, |w| est > w.0) {
                    winner = Some((est, fam, set, n));
                }
            }
        }
        best.push(winner.expect("the whole domain is always a candidate"));
    }
    for i in (0..best.len().saturating_sub(1)).rev() {
        if best[i + 1].0 > best[i].0 {
            best[i] = best[i + 1].clone();
        }
    }

    let mut verified: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut samples = Vec::with_capacity(ts.len());
    let mut certificates = Vec::with_capacity(ts.len());
    for (&t, (est, fam, set, _)) in ts.iter().zip(best) {
        let cert_norm = match verified.get(set.cells()) {
            Some(&n) => n,
            None => {
                let n = space.norm(&set.indicator().scaled(est)?)?;
                verified.insert(set.cells().to_vec(), n);
                n
            }
        };
        if !(cert_norm <= 1.0 + CERT_SLACK) {
            return Err(Error::CertificateFailed { t, norm: cert_norm });
        }
        samples.push(EnvelopeSample {
            t,
            estimate: est,
            family: fam,
            set_measure: set.measure(),
            certificate_norm: cert_norm,
        });
        certificates.push(Certificate { family: fam, set, scale: est, verified_norm: cert_norm });
    }
    Ok(EnvelopeCurve { space: space.label(), families, samples, fit: None, certificates })
}

fn in_range(t: f64, lo: f64, hi: f64) -> bool {
    t >= lo * (1.0 - RANGE_SLACK) && t <= hi * (1.0 + RANGE_SLACK)
}

/// Least-squares slope of `(x, y)`, with its standard error.
fn regression(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let stderr = if xs.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, stderr)
}

/// Negated slope of `ln E` against `ln t` over samples in `[t_lo, t_hi]`.
pub fn fit_envelope_exponent(curve: &EnvelopeCurve, t_lo: f64, t_hi: f64) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = curve
        .samples
        .iter()
        .filter(|s| in_range(s.t, t_lo, t_hi) && s.estimate > 0.0 && s.estimate.is_finite())
        .map(|s| (s.t.ln(), s.estimate.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::InsufficientSamples { needed: 5, found: pts.len() });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let (slope, stderr) = regression(&xs, &ys);
    Ok(FitResult { alpha: -slope, stderr, n: xs.len(), t_lo, t_hi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioVerdict {
    NonEmbeddingEvidence,
    NoEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTestReport {
    pub sup_ratio: f64,
    /// Slope of `ln(E₁/E₂)` against `ln t`; negative when the ratio blows up as `t → 0`.
    pub trend_slope: f64,
    pub n: usize,
    pub threshold: f64,
    pub verdict: RatioVerdict,
}

/// Compares `E₁/E₂` on a shared t-grid.
pub fn embedding_ratio_test(
    c1: &EnvelopeCurve,
    c2: &EnvelopeCurve,
    t_lo: f64,
    t_hi: f64,
    threshold: f64,
) -> Result<RatioTestReport> {
    let pick = |c: &EnvelopeCurve| -> Vec<(f64, f64)> {
        c.samples.iter().filter(|s| in_range(s.t, t_lo, t_hi)).map(|s| (s.t, s.estimate)).collect()
    };
    let (a, b) = (pick(c1), pick(c2));
    if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| (x.0 - y.0).abs() > 1e-12 * x.0.abs()) {
        return Err(Error::GridMismatch);
    }
    if a.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, found: a.len() });
    }
    let ratios: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.1 / y.1).collect();
    let sup_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let xs: Vec<f64> = a.iter().map(|x| x.0.ln()).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let (trend_slope, _) = regression(&xs, &ys);
    let verdict =
        if trend_slope < -threshold { RatioVerdict::NonEmbeddingEvidence } else { RatioVerdict::NoEvidence };
    Ok(RatioTestReport { sup_ratio, trend_slope, n: a.len(), threshold, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_dyadic(d: usize, levels: u32) -> Arc<TensorGrid> {
        Arc::new(TensorGrid::dyadic(&BoxDomain::unit(d), levels).unwrap())
    }

    #[test]
    fn lebesgue_indicator_example() {
        let g = Arc::new(TensorGrid::uniform(&BoxDomain::unit(1), &[256]).unwrap());
        let s = SpaceSpec::classical(g, 2.0, None).unwrap();
        let c = envelope_lower(&s, &dyadic_t_samples(4, 4), &[Family::NormalizedIndicators]).unwrap();
        assert_relative_eq!(c.samples[0].estimate, 4.0, max_relative = 1e-14);
    }

    #[test]
    fn mixed_slab_example() {
        let g = Arc::new(TensorGrid::uniform(&BoxDomain::unit(2), &[64, 64]).unwrap());
        let s = SpaceSpec::mixed(g, MixedExponent::new(vec![1.0, 2.0]).unwrap(), None).unwrap();
        let c = envelope_lower(&s, &dyadic_t_samples(4, 4), &[Family::Slabs]).unwrap();
        assert_relative_eq!(c.samples[0].estimate, 16.0, max_relative = 1e-14);
    }

    #[test]
    fn mixed_lorentz_slab_constant() {
        let q: f64 = 3.0;
        let s = SpaceSpec::mixed(unit_dyadic(2, 12), MixedExponent::new(vec![1.0, 2.0]).unwrap(), Some(q)).unwrap();
        let c = envelope_lower(&s, &dyadic_t_samples(2, 10), &[Family::Slabs]).unwrap();
        for smp in &c.samples {
            let t = smp.t / (1.0 - 2f64.powi(-20));
            assert_relative_eq!(smp.estimate, q.powf(1.0 / q) / t, max_relative = 1e-12);
        }
    }

    #[test]
    fn certificates_reproduce_samples() {
        let g = unit_dyadic(1, 14);
        let p = ExponentField::from_fn(g, |x| if x[0] < 0.5 { 1.5 } else { 3.0 }).unwrap().with_x0(vec![0.0]).unwrap();
        let s = SpaceSpec::variable(p, None).unwrap();
        let fams = [Family::NormalizedIndicators, Family::Lh0Balls];
        let c = envelope_lower(&s, &dyadic_t_samples(1, 12), &fams).unwrap();
        for (smp, cert) in c.samples.iter().zip(&c.certificates) {
            assert_eq!(cert.f_star(smp.t), smp.estimate);
            assert!(cert.verified_norm <= 1.0 + CERT_SLACK);
        }
        assert!(c.samples.windows(2).all(|w| w[1].estimate <= w[0].estimate));
        let fit = fit_envelope_exponent(&c, 2f64.powi(-12), 0.25).unwrap();
        assert!((fit.alpha - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn exact_power_law_fit() {
        let ts: Vec<f64> = (1..=8).map(|k| 0.5f64.powi(k)).collect();
        let es: Vec<f64> = ts.iter().map(|t| t.powf(-0.5)).collect();
        let c = EnvelopeCurve::from_values("exact", &ts, &es).unwrap();
        let fit = fit_envelope_exponent(&c, 0.0, 1.0).unwrap();
        assert!((fit.alpha - 0.5).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);
        assert!(matches!(
            fit_envelope_exponent(&c, 0.1, 1.0),
            Err(Error::InsufficientSamples { needed: 5, found: 3 })
        ));
    }

    #[test]
    fn ratio_test_examples() {
        let ts: Vec<f64> = (1..=10).map(|k| 0.5f64.powi(k)).collect();
        let mk = |a: f64| EnvelopeCurve::from_values("c", &ts, &ts.iter().map(|t| t.powf(-a)).collect::<Vec<_>>()).unwrap();
        let r = embedding_ratio_test(&mk(1.0), &mk(0.5), 0.0, 1.0, 0.05).unwrap();
        assert_relative_eq!(r.trend_slope, -0.5, max_relative = 1e-12);
        assert_eq!(r.verdict, RatioVerdict::NonEmbeddingEvidence);
        let r = embedding_ratio_test(&mk(1.0), &mk(1.0), 0.0, 1.0, 0.05).unwrap();
        assert_eq!(r.sup_ratio, 1.0);
        assert_eq!(r.verdict, RatioVerdict::NoEvidence);
        let r = embedding_ratio_test(&mk(0.5), &mk(1.0), 0.0, 1.0, 0.05).unwrap();
        assert_eq!(r.verdict, RatioVerdict::NoEvidence);
        let other = EnvelopeCurve::from_values("x", &ts[1..], &ts[1..]).unwrap();
        assert_eq!(embedding_ratio_test(&mk(1.0), &other, 0.0, 1.0, 0.05).unwrap_err(), Error::GridMismatch);
    }

    #[test]
    fn empty_family_rejected() {
        let s = SpaceSpec::classical(unit_dyadic(1, 4), 2.0, None).unwrap();
        assert_eq!(envelope_lower(&s, &[0.1], &[]).unwrap_err(), Error::EmptyFamily);
        assert!(envelope_lower(&s, &[1.5], &[Family::Slabs]).is_err());
    }

    #[test]
    fn theoretical_quantities() {
        let g = unit_dyadic(2, 4);
        let m = SpaceSpec::mixed(g.clone(), MixedExponent::new(vec![2.0, 3.0]).unwrap(), Some(4.0)).unwrap();
        assert_eq!(m.theoretical_alpha(), 0.5);
        assert_eq!(m.theoretical_index(), 4.0);
        let p = ExponentField::from_fn(g, |x| 1.5 + x[0]).unwrap();
        let v = SpaceSpec::variable(p, None).unwrap();
        assert_eq!(v.theoretical_index(), v.critical_exponent());
    }
}
