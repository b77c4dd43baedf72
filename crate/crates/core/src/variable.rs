//! Variable-exponent modular, Luxemburg norm, variable Lorentz norm and diagnostics.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{ball, refine_common, CellSet, StepFunction, StepFunctionData, TensorGrid, ALIGN_TOL};
use crate::error::{Error, Result};
use crate::levels::level_set_norm;
use crate::rearrangement::rearrange;
use crate::util::csum;

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_ITER: usize = 200;
/// Slack used when turning computed quantities into `<= 1` decisions.
pub const DECISION_SLACK: f64 = 1e-9;

/// Piecewise-constant exponent `p(·)` with cached extrema.
#[derive(Debug, Clone)]
pub struct ExponentField {
    field: StepFunction,
    p_minus: f64,
    p_plus: f64,
    x0: Option<Vec<f64>>,
}

impl ExponentField {
    pub fn new(field: StepFunction) -> Result<Self> {
        if let Some(v) = field.values().iter().find(|&&v| v <= 0.0) {
            return Err(Error::InvalidExponent(*v));
        }
        let p_minus = field.values().iter().copied().fold(f64::INFINITY, f64::min);
        let p_plus = field.values().iter().copied().fold(0.0, f64::max);
        Ok(Self { field, p_minus, p_plus, x0: None })
    }

    pub fn constant(grid: Arc<TensorGrid>, p: f64) -> Result<Self> {
        Self::new(StepFunction::constant(grid, p)?)
    }

    /// Samples `p` at cell centers.
    pub fn from_fn(grid: Arc<TensorGrid>, p: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::new(StepFunction::from_fn(grid, p)?)
    }

    /// Designates `x0` with `p(x0) = p_minus`.
    pub fn with_x0(mut self, x0: Vec<f64>) -> Result<Self> {
        let v = self.value_at(&x0)?;
        if v > self.p_minus + 1e-12 {
            return Err(Error::NotAMinimizer { value: v, p_minus: self.p_minus });
        }
        self.x0 = Some(x0);
        Ok(self)
    }

    pub fn field(&self) -> &StepFunction {
        &self.field
    }

    pub fn grid(&self) -> &Arc<TensorGrid> {
        self.field.grid()
    }

    pub fn values(&self) -> &[f64] {
        self.field.values()
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn x0(&self) -> Option<&[f64]> {
        self.x0.as_deref()
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    /// `p` at a point: the smallest value over cells whose closure contains it.
    pub fn value_at(&self, x: &[f64]) -> Result<f64> {
        let g = self.grid();
        if x.len() != g.dim() {
            return Err(Error::DimensionMismatch { expected: g.dim(), found: x.len() });
        }
        if !g.domain().contains(x) {
            return Err(Error::InvalidValues(format!("point {x:?} lies outside the domain")));
        }
        let mut cells = vec![0usize];
        for (a, &xa) in x.iter().enumerate() {
            let b = g.breakpoints(a);
            let tol = ALIGN_TOL * g.domain().side(a);
            let i = g.locate(a, xa);
            let mut idx = vec![i];
            if i > 0 && (xa - b[i]).abs() <= tol {
                idx.push(i - 1);
            }
            if i + 1 < g.shape()[a] && (xa - b[i + 1]).abs() <= tol {
                idx.push(i + 1);
            }
            let s = g.stride(a);
            cells = cells.iter().flat_map(|&c| idx.iter().map(move |&k| c + k * s)).collect();
        }
        Ok(cells.iter().map(|&c| self.values()[c]).fold(f64::INFINITY, f64::min))
    }

    /// `p_-(A)`; `None` for the empty set.
    pub fn p_minus_on(&self, set: &CellSet) -> Option<f64> {
        set.cells().iter().map(|&c| self.values()[c]).reduce(f64::min)
    }

    pub fn p_plus_on(&self, set: &CellSet) -> Option<f64> {
        set.cells().iter().map(|&c| self.values()[c]).reduce(f64::max)
    }

    /// The same exponent expressed on a finer grid.
    pub fn regrid(&self, grid: &Arc<TensorGrid>) -> Result<Self> {
        let field = self.field.resample(grid)?;
        Ok(Self { field, p_minus: self.p_minus, p_plus: self.p_plus, x0: self.x0.clone() })
    }

    pub fn to_data(&self) -> StepFunctionData {
        StepFunctionData { role: Some("exponent".into()), ..self.field.to_data() }
    }

    pub fn from_data(data: StepFunctionData) -> Result<Self> {
        match data.role.as_deref() {
            None | Some("exponent") => Self::new(StepFunction::from_data(data)?),
            Some(r) => Err(Error::Serialization(format!("expected role \"exponent\", found \"{r}\""))),
        }
    }
}

/// Cells with `f > 0` as `(ln f, p, μ)`, on a grid shared with `p`.
struct ModularTerms {
    terms: Vec<(f64, f64, f64)>,
}

impl ModularTerms {
    fn new(f: &StepFunction, p: &ExponentField) -> Result<Self> {
        let (f, pf) = refine_common(f, p.field())?;
        let terms = f
            .values()
            .iter()
            .zip(pf.values())
            .zip(f.grid().cell_measures())
            .filter(|((v, _), _)| **v > 0.0)
            .map(|((v, pc), m)| (v.ln(), *pc, *m))
            .collect();
        Ok(Self { terms })
    }

    fn indicator(set: &CellSet, p: &ExponentField) -> Result<Self> {
        if !Arc::ptr_eq(set.grid(), p.grid()) && !set.grid().same_breakpoints(p.grid()) {
            return Self::new(&set.indicator(), p);
        }
        let terms = set.cells().iter().map(|&c| (0.0, p.values()[c], set.grid().cell_measure(c))).collect();
        Ok(Self { terms })
    }

    /// `ϱ(f / λ)`.
    fn eval(&self, lambda: f64) -> f64 {
        let ll = lambda.ln();
        csum(self.terms.iter().map(|&(lv, p, m)| m * (p * (lv - ll)).exp()))
    }

    fn solve(&self, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidValues(format!("tolerance {tol} must be positive")));
        }
        if self.terms.is_empty() {
            return Ok(0.0);
        }
        let mut iterations = 0;
        let mut step = || {
            iterations += 1;
            if iterations > MAX_ITER {
                Err(Error::ConvergenceError { iterations: MAX_ITER })
            } else {
                Ok(())
            }
        };
        let (mut lo, mut hi);
        if self.eval(1.0) > 1.0 {
            lo = 1.0;
            hi = 2.0;
            while self.eval(hi) > 1.0 {
                step()?;
                lo = hi;
                hi *= 2.0;
            }
        } else {
            hi = 1.0;
            lo = 0.5;
            while self.eval(lo) <= 1.0 {
                step()?;
                hi = lo;
                lo *= 0.5;
            }
        }
        while hi - lo > tol * hi {
            step()?;
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }
}

/// `ϱ_{p(·)}(f) = Σ f_c^{p_c} μ_c`.
pub fn modular(f: &StepFunction, p: &ExponentField) -> Result<f64> {
    Ok(ModularTerms::new(f, p)?.eval(1.0))
}

/// `inf{λ > 0 : ϱ(f/λ) <= 1}`; returns the upper end of the final bracket, so `ϱ(f/result) <= 1`.
pub fn variable_norm(f: &StepFunction, p: &ExponentField, tol: f64) -> Result<f64> {
    ModularTerms::new(f, p)?.solve(tol)
}

pub fn variable_indicator_norm(set: &CellSet, p: &ExponentField, tol: f64) -> Result<f64> {
    ModularTerms::indicator(set, p)?.solve(tol)
}

/// Two-sided bounds on `‖χ_A‖_{p(·)}` from `p_±(A)`.
pub fn indicator_norm_bounds(set: &CellSet, p: &ExponentField) -> Option<(f64, f64)> {
    let (pm, pp) = (p.p_minus_on(set)?, p.p_plus_on(set)?);
    let m = set.measure();
    Some(if m <= 1.0 { (m.powf(1.0 / pm), m.powf(1.0 / pp)) } else { (m.powf(1.0 / pp), m.powf(1.0 / pm)) })
}

/// Two-sided bounds on `‖f‖_{p(·)}` from the modular and `p_±(supp f)`.
pub fn norm_bounds_from_modular(f: &StepFunction, p: &ExponentField) -> Result<Option<(f64, f64)>> {
    let (f, pf) = refine_common(f, p.field())?;
    let supp: Vec<f64> = f.values().iter().zip(pf.values()).filter(|(v, _)| **v > 0.0).map(|(_, q)| *q).collect();
    if supp.is_empty() {
        return Ok(None);
    }
    let pm = supp.iter().copied().fold(f64::INFINITY, f64::min);
    let pp = supp.iter().copied().fold(0.0, f64::max);
    let rho = modular(&f, p)?;
    Ok(Some(if rho <= 1.0 {
        (rho.powf(1.0 / pm), rho.powf(1.0 / pp))
    } else {
        (rho.powf(1.0 / pp), rho.powf(1.0 / pm))
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Side {
    Below,
    At,
    Above,
}

fn side(x: f64, slack: f64) -> Side {
    if (x - 1.0).abs() <= slack {
        Side::At
    } else if x < 1.0 {
        Side::Below
    } else {
        Side::Above
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitBallReport {
    pub norm: f64,
    pub modular: f64,
    pub norm_le_1: bool,
    pub modular_le_1: bool,
    /// `‖f‖ <= 1` iff `ϱ(f) <= 1`.
    pub agree: bool,
    /// `‖f‖ < 1` iff `ϱ(f) < 1`.
    pub strict_agree: bool,
    /// `‖f‖ = 1` iff `ϱ(f) = 1`.
    pub equality_agree: bool,
}

pub fn unit_ball_check(f: &StepFunction, p: &ExponentField) -> Result<UnitBallReport> {
    let terms = ModularTerms::new(f, p)?;
    let norm = terms.solve(1e-13)?;
    let rho = terms.eval(1.0);
    let sn = side(norm, DECISION_SLACK);
    let sm = side(rho, DECISION_SLACK * p.p_plus().max(1.0));
    Ok(UnitBallReport {
        norm,
        modular: rho,
        norm_le_1: sn != Side::Above,
        modular_le_1: sm != Side::Above,
        agree: (sn != Side::Above) == (sm != Side::Above),
        strict_agree: (sn == Side::Below) == (sm == Side::Below),
        equality_agree: (sn == Side::At) == (sm == Side::At),
    })
}

/// `‖f+g‖^{p₋} <= ‖f‖^{p₋} + ‖g‖^{p₋}` when `p₋ <= 1`, the triangle inequality otherwise.
pub fn quasi_triangle_check(f: &StepFunction, g: &StepFunction, p: &ExponentField) -> Result<bool> {
    let sum = f.add(g)?;
    let nf = variable_norm(f, p, DEFAULT_TOL)?;
    let ng = variable_norm(g, p, DEFAULT_TOL)?;
    let ns = variable_norm(&sum, p, DEFAULT_TOL)?;
    let e = p.p_minus().min(1.0);
    let (lhs, rhs) = (ns.powf(e), nf.powf(e) + ng.powf(e));
    Ok(lhs <= rhs * (1.0 + DECISION_SLACK) + f64::MIN_POSITIVE)
}

/// `(∫_0^∞ u^q ‖χ_{f>u}‖_{p(·)}^q du/u)^{1/q}` with inner norms solved to `tol`.
pub fn variable_lorentz_norm(f: &StepFunction, p: &ExponentField, q: f64, tol: f64) -> Result<f64> {
    let (f, pf) = refine_common(f, p.field())?;
    let p = if Arc::ptr_eq(f.grid(), p.grid()) { p.clone() } else { p.regrid(pf.grid())? };
    let values: Vec<f64> = rearrange(&f).values().collect();
    level_set_norm(&values, q, |i| variable_indicator_norm(&f.superlevel_closed(values[i]), &p, tol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHoelderReport {
    pub x0: Vec<f64>,
    pub radii: Vec<f64>,
    /// `μ(B_r)^{p₋(B_r) - p₊(B_r)}` per radius.
    pub quantities: Vec<f64>,
    pub max_quantity: f64,
    pub argmax_radius: f64,
    /// The constant `C` bounding the quantity over the tested radii.
    pub c: f64,
    /// `ln(C) / d`.
    pub c0: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Evaluates the LH₀ quantity on cubes `B_r(x0)`, `r = 2^{-j}`.
pub fn log_hoelder_check(p: &ExponentField, x0: &[f64], js: &[u32], threshold: f64) -> Result<LogHoelderReport> {
    let v = p.value_at(x0)?;
    if v > p.p_minus() + 1e-12 {
        return Err(Error::NotAMinimizer { value: v, p_minus: p.p_minus() });
    }
    if js.is_empty() {
        return Err(Error::InvalidValues("no radii given".into()));
    }
    let radii: Vec<f64> = js.iter().map(|&j| 0.5f64.powi(j as i32)).collect();
    let quantities = radii
        .iter()
        .map(|&r| {
            let b = ball(p.grid(), x0, r)?;
            let (lo, hi) = (p.p_minus_on(&b).expect("non-empty"), p.p_plus_on(&b).expect("non-empty"));
            Ok(b.measure().powf(lo - hi))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (k, &max_quantity) =
        quantities.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    let c = max_quantity;
    Ok(LogHoelderReport {
        x0: x0.to_vec(),
        argmax_radius: radii[k],
        radii,
        quantities,
        max_quantity,
        c,
        c0: c.ln() / p.grid().dim() as f64,
        threshold,
        pass: c <= threshold,
    })
}
