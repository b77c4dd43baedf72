//! Exact quasi-norms of step functions in Lebesgue, Lorentz, mixed and
//! variable-exponent spaces, together with growth-envelope estimation,
//! Hardy-functional index probes and non-embedding witnesses.

pub mod classical;
pub mod domain;
pub mod envelope;
pub mod error;
pub mod hardy;
mod levels;
pub mod mixed;
pub mod probe;
pub mod rearrangement;
pub mod report;
pub mod util;
pub mod variable;
pub mod witness;

pub use classical::{lorentz_norm, lorentz_tilde_norm, lorentz_tilde_norm_profile, lp_norm, LorentzIndex};
pub use domain::{
    ball, make_cube_set, product_indicator, refine_common, BoxDomain, CellSet, StepFunction, StepFunctionData,
    TensorGrid,
};
pub use envelope::{
    dyadic_t_samples, embedding_ratio_test, envelope_lower, fit_envelope_exponent, EnvelopeCurve, Family, FitResult,
    RatioTestReport, RatioVerdict, SpaceKind, SpaceSpec,
};
pub use error::{Error, Result};
pub use hardy::{hardy_bracket, hardy_functional, HardyBracket};
pub use mixed::{hoelder_embedding_constant, mixed_lorentz_norm, mixed_norm, MixedExponent};
pub use probe::{index_probe, Classification, ProbeReport, ProbeThresholds, WitnessSpec};
pub use rearrangement::{distribution, rearrange, sample_analytic, AnalyticKind, AnalyticProfile, ValueMassProfile};
pub use variable::{
    log_hoelder_check, modular, quasi_triangle_check, unit_ball_check, variable_lorentz_norm, variable_norm,
    ExponentField, LogHoelderReport, UnitBallReport, DEFAULT_TOL,
};
pub use witness::{non_embedding_witness, WitnessReport};
