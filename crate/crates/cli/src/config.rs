//! JSON experiment configurations.

use std::path::Path;
use std::sync::Arc;

use envlab_core::envelope::Family;
use envlab_core::probe::ProbeThresholds;
use envlab_core::{
    BoxDomain, ExponentField, LorentzIndex, MixedExponent, SpaceSpec, StepFunction, StepFunctionData, TensorGrid,
    WitnessSpec,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    Uniform { lo: Vec<f64>, hi: Vec<f64>, cells: Vec<usize> },
    /// Breakpoints at every multiple of `2^{-levels}` of each side, each dyadic cell split into `cells` pieces.
    Dyadic {
        lo: Vec<f64>,
        hi: Vec<f64>,
        levels: u32,
        #[serde(default = "one")]
        cells: usize,
    },
    Breakpoints { breakpoints: Vec<Vec<f64>> },
}

fn one() -> usize {
    1
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<TensorGrid>, CliError> {
        let g = match self {
            GridSpec::Uniform { lo, hi, cells } => TensorGrid::uniform(&BoxDomain::new(lo.clone(), hi.clone())?, cells)?,
            GridSpec::Dyadic { lo, hi, levels, cells } => {
                TensorGrid::dyadic_uniform(&BoxDomain::new(lo.clone(), hi.clone())?, *levels, *cells)?
            }
            GridSpec::Breakpoints { breakpoints } => TensorGrid::new(breakpoints.clone())?,
        };
        Ok(Arc::new(g))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Cell values on the experiment grid, row-major.
    Values { values: Vec<f64> },
    Constant { value: f64 },
    /// `value · χ_{I_1 × … × I_d}` with grid-aligned intervals.
    ProductIndicator {
        intervals: Vec<(f64, f64)>,
        #[serde(default = "unit_value")]
        value: f64,
    },
    /// A step function carrying its own breakpoints.
    Data { data: StepFunctionData },
}

fn unit_value() -> f64 {
    1.0
}

impl FunctionSpec {
    pub fn build(&self, grid: &Arc<TensorGrid>) -> Result<StepFunction, CliError> {
        Ok(match self {
            FunctionSpec::Values { values } => StepFunction::new(grid.clone(), values.clone())?,
            FunctionSpec::Constant { value } => StepFunction::constant(grid.clone(), *value)?,
            FunctionSpec::ProductIndicator { intervals, value } => {
                envlab_core::product_indicator(grid, intervals)?.scaled(*value)?
            }
            FunctionSpec::Data { data } => StepFunction::from_data(data.clone())?,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentSpec {
    Constant { p: f64 },
    /// Cell values on the experiment grid.
    Values { values: Vec<f64> },
    /// An exponent carrying its own breakpoints.
    Data { data: StepFunctionData },
    /// `base + slope · |x - center|` sampled at cell centers.
    Radial { center: Vec<f64>, base: f64, slope: f64 },
    /// `inside` on the box `[lo, hi)`, `outside` elsewhere, sampled at cell centers.
    TwoLevel { lo: Vec<f64>, hi: Vec<f64>, inside: f64, outside: f64 },
}

impl ExponentSpec {
    pub fn build(&self, grid: &Arc<TensorGrid>) -> Result<ExponentField, CliError> {
        let d = grid.dim();
        let check_len = |v: &[f64]| {
            if v.len() == d {
                Ok(())
            } else {
                Err(CliError::Validation(format!("expected {d} coordinates, found {}", v.len())))
            }
        };
        Ok(match self {
            ExponentSpec::Constant { p } => ExponentField::constant(grid.clone(), *p)?,
            ExponentSpec::Values { values } => ExponentField::new(StepFunction::new(grid.clone(), values.clone())?)?,
            ExponentSpec::Data { data } => ExponentField::from_data(data.clone())?,
            ExponentSpec::Radial { center, base, slope } => {
                check_len(center)?;
                let (c, b, s) = (center.clone(), *base, *slope);
                ExponentField::from_fn(grid.clone(), move |x| {
                    b + s * x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
                })?
            }
            ExponentSpec::TwoLevel { lo, hi, inside, outside } => {
                check_len(lo)?;
                check_len(hi)?;
                let (lo, hi, a, b) = (lo.clone(), hi.clone(), *inside, *outside);
                ExponentField::from_fn(grid.clone(), move |x| {
                    if x.iter().zip(&lo).zip(&hi).all(|((x, l), h)| x >= l && x < h) {
                        a
                    } else {
                        b
                    }
                })?
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceConfig {
    Lebesgue { p: f64 },
    Lorentz { p: f64, q: f64 },
    Mixed {
        p: Vec<f64>,
        #[serde(default)]
        q: Option<f64>,
    },
    Variable {
        exponent: ExponentSpec,
        #[serde(default)]
        q: Option<f64>,
        #[serde(default)]
        x0: Option<Vec<f64>>,
    },
}

impl SpaceConfig {
    pub fn build(&self, grid: &Arc<TensorGrid>) -> Result<SpaceSpec, CliError> {
        Ok(match self {
            SpaceConfig::Lebesgue { p } => SpaceSpec::classical(grid.clone(), *p, None)?,
            SpaceConfig::Lorentz { p, q } => {
                LorentzIndex::new(*p, *q)?;
                SpaceSpec::classical(grid.clone(), *p, Some(*q))?
            }
            SpaceConfig::Mixed { p, q } => SpaceSpec::mixed(grid.clone(), MixedExponent::new(p.clone())?, *q)?,
            SpaceConfig::Variable { exponent, q, x0 } => {
                let mut field = exponent.build(grid)?;
                if let Some(x0) = x0 {
                    field = field.with_x0(x0.clone())?;
                }
                SpaceSpec::variable(field, *q)?
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TSamples {
    /// `2^{-k}(1 - 2^{-20})` for `k` in `k_lo..=k_hi`.
    Dyadic { k_lo: u32, k_hi: u32 },
    Explicit(Vec<f64>),
}

impl TSamples {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match self {
            TSamples::Dyadic { k_lo, k_hi } if k_lo <= k_hi => Ok(envlab_core::dyadic_t_samples(*k_lo, *k_hi)),
            TSamples::Dyadic { k_lo, k_hi } => Err(CliError::Validation(format!("k_lo = {k_lo} > k_hi = {k_hi}"))),
            TSamples::Explicit(v) => Ok(v.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRange {
    pub t_lo: f64,
    pub t_hi: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub grid: GridSpec,
    pub function: FunctionSpec,
    pub space: SpaceConfig,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RearrangeConfig {
    pub grid: GridSpec,
    pub function: FunctionSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeConfig {
    pub grid: GridSpec,
    pub space: SpaceConfig,
    pub t_samples: TSamples,
    #[serde(default)]
    pub families: Option<Vec<Family>>,
    #[serde(default)]
    pub fit: Option<FitRange>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub grid: GridSpec,
    pub space: SpaceConfig,
    pub v: f64,
    pub witness: WitnessSpec,
    pub k_min: u32,
    pub k_max: u32,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub thresholds: Option<ProbeThresholds>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Truncations {
    /// `M = 2^k` for `k` in `log2_min..=log2_max`.
    Dyadic { log2_min: i32, log2_max: i32 },
    Explicit(Vec<f64>),
}

impl Truncations {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Truncations::Dyadic { log2_min, log2_max } => (*log2_min..=*log2_max).map(|k| 2f64.powi(k)).collect(),
            Truncations::Explicit(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    pub p: Vec<f64>,
    pub eps: f64,
    pub truncations: Truncations,
    #[serde(default)]
    pub alphas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioConfig {
    pub grid: GridSpec,
    /// `X₁` and `X₂` in `E_{X₁}/E_{X₂}`.
    pub spaces: (SpaceConfig, SpaceConfig),
    pub t_samples: TSamples,
    #[serde(default)]
    pub families: Option<Vec<Family>>,
    pub t_lo: f64,
    pub t_hi: f64,
    #[serde(default = "default_slope_threshold")]
    pub threshold: f64,
}

fn default_slope_threshold() -> f64 {
    0.05
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingConfig {
    #[serde(default)]
    pub witness: Option<WitnessConfig>,
    #[serde(default)]
    pub ratio: Option<RatioConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub r: f64,
    #[serde(default)]
    pub gamma: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyConfig {
    pub profile: ProfileConfig,
    pub levels: Vec<u32>,
    pub alpha: f64,
    pub v: f64,
    pub eps: f64,
    /// Random plateau profiles compared against numerical quadrature.
    #[serde(default)]
    pub random_checks: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHoelderConfig {
    pub grid: GridSpec,
    pub exponent: ExponentSpec,
    pub x0: Vec<f64>,
    pub js: Vec<u32>,
    pub threshold: f64,
}
