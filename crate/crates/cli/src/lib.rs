//! Commands behind the `qsense` binary.
//!
//! Every command is a pure function of its inputs returning the text to
//! emit; `main.rs` only parses arguments and maps errors to exit codes
//! (0 ok, 1 usage or spec error, 2 infeasible).

pub mod spec;

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use qsense_core::control::{
    controlled_qsl, eigenframe_track, simulate_controlled, simulate_controlled_linearized, uniform_grid,
    ParamHamiltonian,
};
use qsense_core::distinguishability::{critical_fidelity, SampleBudget};
use qsense_core::montecarlo::{sweep_time, write_sweep_csv};
use qsense_core::pauli::{stats, PauliHamiltonian, QubitState};
use qsense_core::qsl::{
    actual_crossing_time, actual_crossing_time_static, bound_envelope, ml_envelope, ml_static, mt_static,
    probe_fidelity, scale_many_body, Crossing, DistanceFunctions, SpeedLimit,
};
use qsense_core::scenarios::{
    ac_kmax, ac_tmin, ac_tmin_numeric, biomag_dataset, c0_grid, fig1_dataset, fmt_float, log_frequencies,
    rotating_tmin, write_biomag_csv, write_fig1_csv, AcScenario, ManyBody, ProbeKind, RotatingScenario, TargetParam,
    HBAR, MU_B,
};
use qsense_core::Error;

pub use spec::{ScenarioSpec, ScenarioType};

/// Start of rate-parameterized traces; `∂_kH` vanishes at `t = 0`.
pub const RATE_TRACE_START: f64 = 1e-6;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub hbar: f64,
    pub mu_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub alpha_is_beta_squared: bool,
    pub units: String,
    pub constants: Constants,
    pub m: u32,
    pub kind: ProbeKind,
    /// Set when a product-state frequency scaling `√m` was applied.
    pub product_scaling_extrapolated: bool,
}

/// Result of `qsense bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundOutput {
    #[serde(rename = "type")]
    pub scenario: ScenarioType,
    pub tau_mt: Option<f64>,
    pub tau_ml: Option<f64>,
    pub t_min: Option<f64>,
    pub t_actual: Option<f64>,
    pub feasible: bool,
    pub alpha: f64,
    pub beta: f64,
    pub f0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min_quadrature: Option<f64>,
    pub metadata: Metadata,
}

impl BoundOutput {
    fn new(spec: &ScenarioSpec, d: DistanceFunctions) -> Self {
        Self {
            scenario: spec.kind_of,
            tau_mt: None,
            tau_ml: None,
            t_min: None,
            t_actual: None,
            feasible: false,
            alpha: d.alpha,
            beta: d.beta,
            f0: d.f,
            k_max: None,
            t_min_quadrature: None,
            metadata: Metadata {
                alpha_is_beta_squared: true,
                units: "hbar = 1; times in units of 1/omega".into(),
                constants: Constants { hbar: HBAR, mu_b: MU_B },
                m: spec.m,
                kind: spec.kind,
                product_scaling_extrapolated: false,
            },
        }
    }

    fn set_bounds(&mut self, mt: Option<f64>, ml: Option<f64>) {
        self.tau_mt = mt;
        self.tau_ml = ml;
        self.t_min = match (mt, ml) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
    }
}

fn informative(r: qsense_core::Result<f64>) -> Result<Option<f64>, CliError> {
    reachable(r.map(Crossing::At))
}

/// Treats "no information" outcomes as unreachable bounds.
fn reachable(r: qsense_core::Result<Crossing>) -> Result<Option<f64>, CliError> {
    match r {
        Ok(c) => Ok(c.time()),
        Err(Error::NoInformation(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Single-qubit surrogate `(ω', F₀')` for the `m`-body crossing time: a GHZ
/// state is one qubit at `m·ω`; a product state crosses where each factor
/// reaches `F₀^(1/m)`.
fn many_body_surrogate(spec: &ScenarioSpec, f0: f64) -> (f64, f64) {
    match spec.kind {
        ProbeKind::Single => (spec.omega, f0),
        ProbeKind::Ghz => (spec.m as f64 * spec.omega, f0),
        ProbeKind::Product => (spec.omega, f0.powf(1.0 / spec.m as f64)),
    }
}

fn scale(tau: Option<f64>, spec: &ScenarioSpec, which: SpeedLimit) -> Result<Option<f64>, CliError> {
    match (tau, spec.kind.many_body()) {
        (Some(t), Some(kind)) => Ok(Some(scale_many_body(t, spec.m, kind, which)?)),
        _ => Ok(tau),
    }
}

pub fn cmd_bound(spec: &ScenarioSpec) -> Result<BoundOutput, CliError> {
    let f0 = critical_fidelity(spec.budget());
    let d = DistanceFunctions::new(f0)?;
    let mut out = BoundOutput::new(spec, d);
    match spec.kind_of {
        ScenarioType::Static => {
            let (c, w) = (spec.c0_sq, spec.omega);
            let st = stats(&PauliHamiltonian::sigma_z(0.5 * w), &QubitState::from_weight(c)?);
            let mt = informative(mt_static(st.stddev, f0))?;
            let ml = informative(ml_static(st.mean, st.e_ground, f0))?;
            out.set_bounds(scale(mt, spec, SpeedLimit::Mt)?, scale(ml, spec, SpeedLimit::Ml)?);
            let (w_eff, f_eff) = many_body_surrogate(spec, f0);
            out.t_actual = actual_crossing_time_static(w_eff, c, f_eff)?.time();
        }
        ScenarioType::FixedAxis | ScenarioType::CustomEnvelope => {
            let env = spec.envelope_spec()?;
            let (mt, ml) = match bound_envelope(spec.omega, spec.c0_sq, &env, f0) {
                Ok(b) => (b.tau_mt.time(), b.tau_ml.time()),
                Err(Error::NoInformation(_)) => (None, None),
                Err(e) => return Err(e.into()),
            };
            out.set_bounds(scale(mt, spec, SpeedLimit::Mt)?, scale(ml, spec, SpeedLimit::Ml)?);
            let (w_eff, f_eff) = many_body_surrogate(spec, f0);
            out.t_actual = reachable(actual_crossing_time(w_eff, spec.c0_sq, &env, f_eff))?;
        }
        ScenarioType::Ac => {
            let s = AcScenario::new(spec.omega, spec.k.unwrap_or(0.0), spec.budget(), spec.m, spec.kind)?;
            out.metadata.product_scaling_extrapolated = spec.kind.is_extrapolated() && spec.m > 1;
            out.k_max = Some(ac_kmax(&s));
            let mt = ac_tmin(&s).time();
            let horizon = if s.k > 0.0 { PI / s.k } else { 2.0 * mt.unwrap_or(1.0) };
            let (coef, env) = s.envelope(horizon)?;
            // equal-weight probe: ⟨ĥ⟩ = 0 and the ML integrand is (ω_eff/2)·|r|
            let ml = reachable(ml_envelope(0.0, 2.0 * coef, &env, f0))?;
            out.set_bounds(mt, ml);
            out.t_actual = mt;
            if mt.is_some() {
                out.t_min_quadrature = ac_tmin_numeric(&s)?.time();
            }
        }
        ScenarioType::Rotating => {
            let s = RotatingScenario::new(
                spec.omega,
                spec.epsilon.expect("validated"),
                spec.target(),
                spec.budget(),
            )?;
            let closed = rotating_tmin(&s);
            let horizon = spec.t_max.unwrap_or(2.0 * closed.tau_mt.max(1e-3));
            let (ph, param, start, strength) = rotating_problem(&s);
            let tr = eigenframe_track(&ph, param, &uniform_grid(start, horizon, 4000))?;
            match controlled_qsl(&tr, strength, f0) {
                Ok(b) => out.set_bounds(Some(b.tau_mt), Some(b.tau_ml)),
                Err(Error::Infeasible { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    out.feasible = out.t_min.is_some() && (out.t_actual.is_some() || out.scenario == ScenarioType::Rotating);
    Ok(out)
}

/// Signal, linearization point, trace start and signal strength of a
/// rotating-field detection problem.
fn rotating_problem(s: &RotatingScenario) -> (ParamHamiltonian, f64, f64, f64) {
    match s.target {
        TargetParam::Omega => (ParamHamiltonian::rotating_field_amplitude(s.k()), s.omega, 0.0, s.omega),
        TargetParam::K => (ParamHamiltonian::rotating_field_rate(s.omega), s.k(), RATE_TRACE_START, s.k()),
    }
}

pub fn render_json(out: &BoundOutput, pretty: bool) -> String {
    let text = if pretty {
        serde_json::to_string_pretty(out)
    } else {
        serde_json::to_string(out)
    };
    text.expect("plain data serializes")
}

/// Parses a positive integer count, accepting forms like `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return if v == 0 { Err("must be at least 1".into()) } else { Ok(v) };
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(v >= 1.0 && v.fract() == 0.0 && v < u64::MAX as f64) {
        return Err(format!("`{s}` is not a positive integer"));
    }
    Ok(v as u64)
}

/// Parses `lo:hi:log[:points]`, `lo:hi:lin[:points]` or a single frequency.
pub fn parse_frequencies(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number"));
    match parts.as_slice() {
        [one] => Ok(vec![num(one)?]),
        [lo, hi, mode] | [lo, hi, mode, _] => {
            let points = match parts.get(3) {
                Some(p) => p.parse::<usize>().map_err(|_| format!("`{p}` is not a point count"))?,
                None => 50,
            };
            let (lo, hi) = (num(lo)?, num(hi)?);
            match *mode {
                "log" => log_frequencies(lo, hi, points).map_err(|e| e.to_string()),
                "lin" if points >= 2 && hi >= lo && lo >= 0.0 => {
                    let step = (hi - lo) / (points - 1) as f64;
                    Ok((0..points).map(|i| if i == points - 1 { hi } else { lo + i as f64 * step }).collect())
                }
                "lin" => Err("linear range needs 0 ≤ lo ≤ hi and at least two points".into()),
                other => Err(format!("unknown spacing `{other}`, expected log or lin")),
            }
        }
        _ => Err(format!("cannot parse frequency range `{s}`")),
    }
}

fn check_probe(m: u32, kind: ProbeKind) -> Result<(), CliError> {
    if m == 0 || (kind == ProbeKind::Single && m != 1) {
        return Err(CliError::Usage("`--m` must be 1 for a single probe and at least 1 otherwise".into()));
    }
    Ok(())
}

pub fn cmd_curves_fig1(omega: f64, n: u64, points: usize, m: u32, kind: ProbeKind) -> Result<String, CliError> {
    check_probe(m, kind)?;
    if points == 0 {
        return Err(CliError::Usage("`--grid` must be at least 1".into()));
    }
    let many_body = kind.many_body().map(|k| ManyBody { m, kind: k });
    let rows = fig1_dataset(omega, SampleBudget::new(n)?, &c0_grid(points), many_body)?;
    let mut buf = Vec::new();
    write_fig1_csv(&mut buf, &rows)?;
    Ok(String::from_utf8(buf).expect("ASCII output"))
}

pub fn cmd_curves_biomag(n: u64, frequencies: &[f64], m: u32, kind: ProbeKind) -> Result<String, CliError> {
    check_probe(m, kind)?;
    let rows = biomag_dataset(frequencies, SampleBudget::new(n)?, m, kind)?;
    let mut buf = Vec::new();
    write_biomag_csv(&mut buf, &rows)?;
    Ok(String::from_utf8(buf).expect("ASCII output"))
}

type Curve = Box<dyn Fn(f64) -> f64>;

/// Signal-versus-reference fidelity `F(t)` of a scenario and a default
/// horizon covering its crossing.
pub fn fidelity_curve(spec: &ScenarioSpec) -> Result<(Curve, f64), CliError> {
    let c = spec.c0_sq;
    let power = if spec.kind == ProbeKind::Product { spec.m as i32 } else { 1 };
    let w_eff = if spec.kind == ProbeKind::Ghz { spec.m as f64 * spec.omega } else { spec.omega };
    match spec.kind_of {
        ScenarioType::Static => {
            let bound = cmd_bound(spec)?;
            let horizon = spec.t_max.unwrap_or_else(|| 2.0 * bound.t_actual.unwrap_or(2.0 * PI / spec.omega));
            Ok((Box::new(move |t| probe_fidelity(w_eff, c, t).powi(power)), horizon))
        }
        ScenarioType::FixedAxis | ScenarioType::CustomEnvelope => {
            let env = spec.envelope_spec()?;
            let horizon = env.horizon();
            Ok((
                Box::new(move |t| probe_fidelity(w_eff, c, env.integrate(|r| r, 0.0, t)).powi(power)),
                horizon,
            ))
        }
        ScenarioType::Ac => {
            let s = AcScenario::new(spec.omega, spec.k.unwrap_or(0.0), spec.budget(), spec.m, spec.kind)?;
            let horizon = spec.t_max.unwrap_or_else(|| match ac_tmin(&s).time() {
                Some(t) => 1.5 * t,
                None => PI / s.k,
            });
            Ok((Box::new(move |t| s.fidelity_at(t)), horizon))
        }
        ScenarioType::Rotating => {
            let s = RotatingScenario::new(spec.omega, spec.epsilon.expect("validated"), spec.target(), spec.budget())?;
            let horizon = spec.t_max.unwrap_or(2.0 * rotating_tmin(&s).tau_mt.max(1e-3));
            let (w, k) = (s.omega, s.k());
            // cos²((s/2)·∫(μ_max − μ_min)) with s = ω (gap 1) or s = k (gap ωt)
            let curve: Curve = match s.target {
                TargetParam::Omega => Box::new(move |t| (0.5 * w * t).cos().powi(2)),
                TargetParam::K => Box::new(move |t| (0.25 * k * w * t * t).cos().powi(2)),
            };
            Ok((curve, horizon))
        }
    }
}

pub fn cmd_mc(spec: &ScenarioSpec, reps: u64, seed: u64, points: usize, t_max: Option<f64>) -> Result<String, CliError> {
    if reps == 0 {
        return Err(CliError::Usage("`--reps` must be at least 1".into()));
    }
    if points < 2 {
        return Err(CliError::Usage("`--points` must be at least 2".into()));
    }
    let (curve, default_horizon) = fidelity_curve(spec)?;
    let horizon = t_max.unwrap_or(default_horizon);
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(CliError::Usage(format!("horizon must be positive, got {horizon}")));
    }
    let grid = uniform_grid(0.0, horizon, points - 1);
    let sweep = sweep_time(|t| curve(t).clamp(0.0, 1.0), &grid, spec.budget(), reps, seed)?;
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &sweep)?;
    Ok(String::from_utf8(buf).expect("ASCII output"))
}

pub fn cmd_control_simulate(spec: &ScenarioSpec, steps: usize, linearized: bool) -> Result<String, CliError> {
    if spec.kind_of != ScenarioType::Rotating {
        return Err(CliError::Usage("`control simulate` expects a spec with type `rotating`".into()));
    }
    if steps == 0 {
        return Err(CliError::Usage("`--steps` must be at least 1".into()));
    }
    let s = RotatingScenario::new(spec.omega, spec.epsilon.expect("validated"), spec.target(), spec.budget())?;
    let (ph, default_c, start, _) = rotating_problem(&s);
    let param_c = spec.omega_c.unwrap_or(default_c);
    let param_true = spec
        .omega_true
        .ok_or_else(|| CliError::Usage("field `omega_true`: required for control simulation".into()))?;
    let f0 = critical_fidelity(spec.budget());
    let delta = (param_true - param_c).abs();
    let horizon = match spec.t_max {
        Some(t) => t,
        None if delta > 0.0 => {
            // closed-form controlled crossing with signal strength δ, plus margin
            let beta = DistanceFunctions::new(f0)?.beta;
            1.2 * match s.target {
                TargetParam::Omega => PI * beta / delta,
                TargetParam::K => (2.0 * PI * beta / (delta * s.omega)).sqrt(),
            }
        }
        None => 10.0,
    };
    let tr = eigenframe_track(&ph, param_c, &uniform_grid(start, horizon, steps))?;
    let ft = if linearized {
        simulate_controlled_linearized(&ph, param_true, param_c, &tr, horizon, steps)?
    } else {
        simulate_controlled(&ph, param_true, param_c, &tr, horizon, steps)?
    };
    let tau = if delta > 0.0 {
        match controlled_qsl(&tr, delta, f0) {
            Ok(b) => Some(b.tau_mt),
            Err(Error::Infeasible { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_else(|| "none".into());
    let target = match s.target {
        TargetParam::Omega => "omega",
        TargetParam::K => "k",
    };
    let mut buf = Vec::new();
    writeln!(
        buf,
        "# target={target} param_c={} param_true={} f0={} tau_mt={} crossing={} linearized={linearized}",
        fmt_float(param_c),
        fmt_float(param_true),
        fmt_float(f0),
        opt(tau),
        opt(ft.crossing(f0)),
    )?;
    writeln!(buf, "t,fidelity")?;
    for (t, f) in ft.times.iter().zip(&ft.fidelity) {
        writeln!(buf, "{},{}", fmt_float(*t), fmt_float(*f))?;
    }
    Ok(String::from_utf8(buf).expect("ASCII output"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> ScenarioSpec {
        ScenarioSpec::from_json(text).unwrap()
    }

    #[test]
    fn ac_bound() {
        let out = cmd_bound(&spec(r#"{"type": "ac", "omega": 1, "k": 0.5}"#)).unwrap();
        assert!((out.t_min.unwrap() - 2.70903).abs() < 1e-5);
        assert!((out.t_min_quadrature.unwrap() - out.t_min.unwrap()).abs() < 1e-9);
        assert!(out.feasible);
        assert!(out.metadata.alpha_is_beta_squared);
        let out = cmd_bound(&spec(r#"{"type": "ac", "omega": 1, "k": 2.0}"#)).unwrap();
        assert!(!out.feasible && out.tau_mt.is_none());
    }

    #[test]
    fn static_bound() {
        let out = cmd_bound(&spec(r#"{"type": "static", "omega": 1}"#)).unwrap();
        assert!((out.tau_mt.unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((out.tau_ml.unwrap() - PI / 4.0).abs() < 1e-12);
        assert!((out.t_actual.unwrap() - PI / 2.0).abs() < 1e-12);
        let out = cmd_bound(&spec(r#"{"type": "static", "omega": 1, "c0_sq": 0.05}"#)).unwrap();
        assert!(!out.feasible);
        let out = cmd_bound(&spec(r#"{"type": "static", "omega": 1, "c0_sq": 0}"#)).unwrap();
        assert!(!out.feasible && out.tau_mt.is_none());
    }

    #[test]
    fn static_many_body_bound() {
        let out = cmd_bound(&spec(r#"{"type": "static", "omega": 1, "m": 4, "kind": "ghz"}"#)).unwrap();
        assert!((out.tau_mt.unwrap() - PI / 8.0).abs() < 1e-12);
        assert!((out.t_actual.unwrap() - PI / 8.0).abs() < 1e-12);
    }

    #[test]
    fn rotating_bound() {
        let out = cmd_bound(&spec(r#"{"type": "rotating", "omega": 1, "epsilon": 0.1, "target": "k"}"#)).unwrap();
        assert!((out.tau_mt.unwrap() - 5.60499).abs() < 1e-5);
        let out = cmd_bound(&spec(r#"{"type": "rotating", "omega": 1, "epsilon": 0.1}"#)).unwrap();
        assert!((out.tau_mt.unwrap() - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn envelope_bound_matches_static() {
        let env = cmd_bound(&spec(
            r#"{"type": "fixed_axis", "omega": 1, "t_max": 10, "envelope": {"kind": "constant", "value": 1}}"#,
        ))
        .unwrap();
        let st = cmd_bound(&spec(r#"{"type": "static", "omega": 1}"#)).unwrap();
        assert!((env.tau_mt.unwrap() - st.tau_mt.unwrap()).abs() < 1e-9);
        assert!((env.t_actual.unwrap() - st.t_actual.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let out = cmd_bound(&spec(r#"{"type": "ac", "omega": 1, "k": 0.5, "n": 7}"#)).unwrap();
        let text = render_json(&out, false);
        let back: BoundOutput = serde_json::from_str(&text).unwrap();
        assert_eq!(back, out);
        assert_eq!(render_json(&back, false), text);
    }

    #[test]
    fn counts_and_ranges() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("42"), Ok(42));
        assert!(parse_count("0").is_err() && parse_count("2.5").is_err() && parse_count("x").is_err());
        let f = parse_frequencies("1:1000:log").unwrap();
        assert_eq!(f.len(), 50);
        assert_eq!(parse_frequencies("1:3:lin:3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(parse_frequencies("1:2:cubic").is_err());
    }

    #[test]
    fn control_needs_rotating_spec() {
        let s = spec(r#"{"type": "ac", "omega": 1, "k": 0.5}"#);
        assert!(cmd_control_simulate(&s, 10, false).is_err());
    }
}
