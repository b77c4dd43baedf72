//! One runner per subcommand; each returns its report without touching the file system.

use std::path::Path;

use envlab_core::envelope::Family;
use envlab_core::probe::ProbeOptions;
use envlab_core::report::{csv_table, fmt17};
use envlab_core::variable::modular;
use envlab_core::{
    embedding_ratio_test, envelope_lower, hardy_bracket, hardy_functional, index_probe, log_hoelder_check,
    non_embedding_witness, rearrange, AnalyticProfile, Classification, LorentzIndex, MixedExponent, SpaceKind,
    ValueMassProfile, DEFAULT_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::*;
use crate::error::CliError;

pub struct Output {
    pub json: Value,
    pub csv: String,
    /// Set when the verdict is inconclusive.
    pub inconclusive: Option<String>,
}

impl Output {
    fn new(json: Value, csv: String) -> Self {
        Self { json, csv, inconclusive: None }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn default_families(space: &envlab_core::SpaceSpec) -> Vec<Family> {
    match space.kind() {
        SpaceKind::Classical { .. } => vec![Family::NormalizedIndicators],
        SpaceKind::Mixed { .. } => vec![Family::NormalizedIndicators, Family::Slabs],
        SpaceKind::Variable { p, .. } if p.x0().is_some() => vec![Family::NormalizedIndicators, Family::Lh0Balls],
        SpaceKind::Variable { .. } => vec![Family::NormalizedIndicators],
    }
}

pub fn norm(path: &Path) -> Result<Output, CliError> {
    let cfg: NormConfig = load(path)?;
    let grid = cfg.grid.build()?;
    let f = cfg.function.build(&grid)?;
    let space = cfg.space.build(&grid)?;
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let mut rows = Vec::new();
    let value = match space.kind() {
        SpaceKind::Variable { p, q } => {
            let n = match q {
                None => envlab_core::variable_norm(&f, p, tol)?,
                Some(q) => envlab_core::variable_lorentz_norm(&f, p, *q, tol)?,
            };
            let rho = modular(&f, p)?;
            rows.push(("modular", rho));
            n
        }
        SpaceKind::Classical { p, q: Some(q) } => {
            let tilde = envlab_core::lorentz_tilde_norm(&f, LorentzIndex::new(*p, *q)?)?;
            rows.push(("tilde_norm", tilde));
            space.norm(&f)?
        }
        _ => space.norm(&f)?,
    };
    rows.insert(0, ("norm", value));
    let mut json = json!({ "space": space.label() });
    for (k, v) in &rows {
        json[*k] = json!(v);
    }
    let csv = csv_table(&["quantity", "value"], rows.iter().map(|(k, v)| vec![k.to_string(), fmt17(*v)]));
    Ok(Output::new(json, csv))
}

pub fn rearrange_cmd(path: &Path) -> Result<Output, CliError> {
    let cfg: RearrangeConfig = load(path)?;
    let grid = cfg.grid.build()?;
    let f = cfg.function.build(&grid)?;
    let prof = rearrange(&f);
    let json = json!({
        "plateaus": prof.plateaus(),
        "total_mass": prof.total_mass(),
        "max_value": prof.max_value(),
    });
    Ok(Output::new(json, prof.to_csv()))
}

pub fn envelope(path: &Path) -> Result<Output, CliError> {
    let cfg: EnvelopeConfig = load(path)?;
    let grid = cfg.grid.build()?;
    let space = cfg.space.build(&grid)?;
    let families = cfg.families.clone().unwrap_or_else(|| default_families(&space));
    let mut curve = envelope_lower(&space, &cfg.t_samples.values()?, &families)?;
    if let Some(r) = cfg.fit {
        curve = curve.with_fit(r.t_lo, r.t_hi)?;
    }
    let json = json!({
        "curve": to_value(&curve),
        "theoretical_alpha": space.theoretical_alpha(),
    });
    Ok(Output::new(json, curve.to_csv()))
}

pub fn index_probe_cmd(path: &Path) -> Result<Output, CliError> {
    let cfg: ProbeConfig = load(path)?;
    let grid = cfg.grid.build()?;
    let space = cfg.space.build(&grid)?;
    let opts = ProbeOptions { eps: cfg.eps, thresholds: cfg.thresholds.unwrap_or_default() };
    let report = index_probe(&space, cfg.v, &cfg.witness, cfg.k_min..=cfg.k_max, &opts)?;
    let mut out = Output::new(to_value(&report), report.to_csv());
    if report.classification == Classification::Inconclusive {
        out.inconclusive = Some(format!(
            "endpoint ratio {} with slope {} for v = {}",
            report.endpoint_ratio, report.slope, report.v
        ));
    }
    Ok(out)
}

pub fn embedding_check(path: &Path) -> Result<Output, CliError> {
    let cfg: EmbeddingConfig = load(path)?;
    if cfg.witness.is_none() && cfg.ratio.is_none() {
        return Err(CliError::Validation("give a witness section, a ratio section, or both".into()));
    }
    let mut json = json!({});
    let mut csv = None;
    if let Some(w) = &cfg.witness {
        let p = MixedExponent::new(w.p.clone())?;
        let report = non_embedding_witness(&p, w.eps, &w.truncations.values(), w.alphas.as_deref())?;
        csv = Some(report.to_csv());
        json["witness"] = to_value(&report);
    }
    if let Some(r) = &cfg.ratio {
        let grid = r.grid.build()?;
        let (a, b) = (r.spaces.0.build(&grid)?, r.spaces.1.build(&grid)?);
        let ts = r.t_samples.values()?;
        let ca = envelope_lower(&a, &ts, &r.families.clone().unwrap_or_else(|| default_families(&a)))?;
        let cb = envelope_lower(&b, &ts, &r.families.clone().unwrap_or_else(|| default_families(&b)))?;
        let report = embedding_ratio_test(&ca, &cb, r.t_lo, r.t_hi, r.threshold)?;
        if csv.is_none() {
            csv = Some(csv_table(
                &["t", "estimate_1", "estimate_2"],
                ca.samples.iter().zip(&cb.samples).map(|(x, y)| vec![fmt17(x.t), fmt17(x.estimate), fmt17(y.estimate)]),
            ));
        }
        json["ratio"] = json!({
            "spaces": [ca.space, cb.space],
            "report": to_value(&report),
        });
    }
    Ok(Output::new(json, csv.expect("one section is present")))
}

/// Random profile with 1 to 6 plateaus.
fn random_profile(rng: &mut ChaCha8Rng) -> ValueMassProfile {
    let n = rng.gen_range(1..=6);
    let mut v: f64 = rng.gen_range(1.0..20.0);
    let pairs = (0..n).map(|_| {
        let pair = (v, rng.gen_range(0.01..0.3));
        v *= rng.gen_range(0.2..0.9);
        pair
    });
    ValueMassProfile::from_pairs(pairs.collect::<Vec<_>>())
}

/// `∫_0^ε (t^α f*(t))^v dt/t` by the midpoint rule in `ln t`, plus an exact head below `δ`.
fn hardy_quadrature(prof: &ValueMassProfile, alpha: f64, v: f64, eps: f64) -> f64 {
    const DELTA: f64 = 1e-12;
    const N: usize = 4000;
    let e = alpha * v;
    let head = prof.max_value().powf(v) * DELTA.powf(e) / e;
    let mut cuts: Vec<f64> = std::iter::once(DELTA)
        .chain(prof.cumulative().into_iter().filter(|&c| c > DELTA && c < eps))
        .chain(std::iter::once(eps))
        .collect();
    cuts.dedup();
    let mut total = head;
    for w in cuts.windows(2) {
        let (a, b) = (w[0].ln(), w[1].ln());
        let val = prof.eval(0.5 * (w[0] + w[1]));
        let h = (b - a) / N as f64;
        total += (0..N).map(|i| (e * (a + (i as f64 + 0.5) * h)).exp()).sum::<f64>() * h * val.powf(v);
    }
    total.powf(1.0 / v)
}

pub fn hardy_check(path: &Path, seed: u64) -> Result<Output, CliError> {
    let cfg: HardyConfig = load(path)?;
    let pr = &cfg.profile;
    let profile = AnalyticProfile::power_log(pr.r, pr.gamma, pr.s)?;
    let mut rows = Vec::new();
    let mut brackets = Vec::new();
    for &j in &cfg.levels {
        let b = hardy_bracket(&profile, j, cfg.alpha, cfg.v, cfg.eps)?;
        rows.push(vec![j.to_string(), fmt17(b.lower), fmt17(b.upper)]);
        brackets.push(json!({ "levels": j, "lower": b.lower, "upper": b.upper }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    if cfg.random_checks > 0 && !(cfg.alpha > 0.0 && cfg.v.is_finite()) {
        return Err(CliError::Validation("random checks need alpha > 0 and finite v".into()));
    }
    for _ in 0..cfg.random_checks {
        let prof = random_profile(&mut rng);
        let exact = hardy_functional(&prof, cfg.alpha, cfg.v, cfg.eps)?;
        let approx = hardy_quadrature(&prof, cfg.alpha, cfg.v, cfg.eps);
        max_err = max_err.max((exact - approx).abs() / exact);
    }
    let json = json!({
        "profile": to_value(&profile),
        "alpha": cfg.alpha,
        "v": cfg.v,
        "eps": cfg.eps,
        "brackets": brackets,
        "seed": seed,
        "random_checks": cfg.random_checks,
        "max_relative_error": max_err,
    });
    Ok(Output::new(json, csv_table(&["levels", "lower", "upper"], rows)))
}

pub fn loghoelder_check(path: &Path) -> Result<Output, CliError> {
    let cfg: LogHoelderConfig = load(path)?;
    let grid = cfg.grid.build()?;
    let p = cfg.exponent.build(&grid)?;
    let report = log_hoelder_check(&p, &cfg.x0, &cfg.js, cfg.threshold)?;
    let csv = csv_table(
        &["j", "radius", "quantity"],
        cfg.js
            .iter()
            .zip(&report.radii)
            .zip(&report.quantities)
            .map(|((j, r), q)| vec![j.to_string(), fmt17(*r), fmt17(*q)]),
    );
    Ok(Output::new(to_value(&report), csv))
}
