//! Magnetic-field examples and dataset emitters.
//!
//! AC field: `H(t) = (ω/2)·sin(kt)·σz` sensed with an equal-weight probe,
//! `ω = 2μ_B·B₀/ħ`. Rotating field: `H(t) = (ω/2)·(cos kt·σx + sin kt·σz)`
//! with `k = εω`. Times are in units of `1/ω`; [`biomagnetic_threshold`]
//! converts to tesla with the pinned constants below.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distinguishability::{critical_fidelity, SampleBudget};
use crate::envelope::EnvelopeSpec;
use crate::error::{Error, Result};
use crate::qsl::{
    actual_crossing_time_static, bound_static, mt_envelope, scale_many_body, Crossing, DistanceFunctions,
    ManyBodyKind, SpeedLimit,
};
use crate::pauli::{stats, PauliHamiltonian, QubitState};

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054571817e-34;
/// Bohr magneton, J/T (CODATA 2018).
pub const MU_B: f64 = 9.2740100783e-24;

/// Closed-form results within this relative margin of `k_max` are treated
/// as sitting exactly on it.
const KMAX_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Single,
    Product,
    Ghz,
}

impl ProbeKind {
    /// Effective frequency multiplier: `1`, `√m` or `m`.
    ///
    /// The product-state `√m` applies the many-body MT speedup to the
    /// envelope; only the GHZ form is closed-form exact.
    pub fn effective_bodies(self, m: u32) -> f64 {
        match self {
            ProbeKind::Single => 1.0,
            ProbeKind::Product => (m as f64).sqrt(),
            ProbeKind::Ghz => m as f64,
        }
    }

    pub fn is_extrapolated(self) -> bool {
        matches!(self, ProbeKind::Product)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProbeKind::Single => "single",
            ProbeKind::Product => "product",
            ProbeKind::Ghz => "ghz",
        }
    }

    pub fn many_body(self) -> Option<ManyBodyKind> {
        match self {
            ProbeKind::Single => None,
            ProbeKind::Product => Some(ManyBodyKind::Product),
            ProbeKind::Ghz => Some(ManyBodyKind::Ghz),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcScenario {
    pub omega: f64,
    pub k: f64,
    pub budget: SampleBudget,
    pub m: u32,
    pub kind: ProbeKind,
}

impl AcScenario {
    pub fn new(omega: f64, k: f64, budget: SampleBudget, m: u32, kind: ProbeKind) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!("ω must be positive, got {omega}")));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("k must be ≥ 0, got {k}")));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        if kind == ProbeKind::Single && m != 1 {
            return Err(Error::InvalidArgument("a single probe has m = 1".into()));
        }
        Ok(Self {
            omega,
            k,
            budget,
            m,
            kind,
        })
    }

    pub fn single(omega: f64, k: f64, n: u64) -> Result<Self> {
        Self::new(omega, k, SampleBudget::new(n)?, 1, ProbeKind::Single)
    }

    pub fn f0(&self) -> f64 {
        critical_fidelity(self.budget)
    }

    pub fn effective_omega(&self) -> f64 {
        self.omega * self.kind.effective_bodies(self.m)
    }

    /// Envelope form of the scenario: unit-ΔH coefficient `ω_eff/2` and
    /// `r(t) = sin kt` up to `horizon`.
    pub fn envelope(&self, horizon: f64) -> Result<(f64, EnvelopeSpec)> {
        let env = if self.k == 0.0 {
            EnvelopeSpec::constant(1.0, horizon)?
        } else {
            EnvelopeSpec::sinusoid(self.k, horizon)?
        };
        Ok((0.5 * self.effective_omega(), env))
    }

    /// Fidelity between signal and reference outputs at time `t`.
    pub fn fidelity_at(&self, t: f64) -> f64 {
        let phase = if self.k == 0.0 {
            t
        } else {
            (1.0 - (self.k * t).cos()) / self.k
        };
        let c = (0.5 * self.effective_omega() * phase).cos();
        c * c
    }
}

/// `k_max = ω_eff / arccos√F₀`.
pub fn ac_kmax(s: &AcScenario) -> f64 {
    let a = s.f0().sqrt().acos();
    s.effective_omega() / a
}

/// `t_min = (1/k)·arccos(1 − (2k/ω_eff)·arccos√F₀)`, or the static value
/// `(2/ω_eff)·arccos√F₀` at `k = 0`.
pub fn ac_tmin(s: &AcScenario) -> Crossing {
    let a = s.f0().sqrt().acos();
    let w = s.effective_omega();
    if s.k == 0.0 {
        return Crossing::At(2.0 * a / w);
    }
    let arg = 1.0 - 2.0 * s.k * a / w;
    if arg < -1.0 - KMAX_SLACK {
        return Crossing::Infeasible;
    }
    Crossing::At(arg.max(-1.0).acos() / s.k)
}

/// [`ac_tmin`] by quadrature and root finding on the envelope bound.
pub fn ac_tmin_numeric(s: &AcScenario) -> Result<Crossing> {
    let horizon = if s.k == 0.0 {
        // static: ΔH·t grows linearly; one unit past the closed form suffices
        4.0 * PI / s.effective_omega() + 1.0
    } else {
        PI / s.k
    };
    let (coef, env) = s.envelope(horizon)?;
    mt_envelope(coef, &env, s.f0())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetParam {
    Omega,
    K,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotatingScenario {
    pub omega: f64,
    pub epsilon: f64,
    pub target: TargetParam,
    pub budget: SampleBudget,
}

impl RotatingScenario {
    pub fn new(omega: f64, epsilon: f64, target: TargetParam, budget: SampleBudget) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!("ω must be positive, got {omega}")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("ε must be positive, got {epsilon}")));
        }
        Ok(Self {
            omega,
            epsilon,
            target,
            budget,
        })
    }

    pub fn k(&self) -> f64 {
        self.epsilon * self.omega
    }

    pub fn f0(&self) -> f64 {
        critical_fidelity(self.budget)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotatingBound {
    pub tau_mt: f64,
    pub tau_ml: f64,
    /// Equal to `tau_mt`.
    pub t_min: f64,
}

/// `τ^(ω) = π·d/ω` and `τ^(k) = √(2π·d/(εω²))` with `d = β` (MT) or `α` (ML).
pub fn rotating_tmin(s: &RotatingScenario) -> RotatingBound {
    let d = DistanceFunctions::new(s.f0()).expect("critical fidelity lies in [0, 1]");
    let tau = |dist: f64| match s.target {
        TargetParam::Omega => PI * dist / s.omega,
        TargetParam::K => (2.0 * PI * dist / (s.epsilon * s.omega * s.omega)).sqrt(),
    };
    let tau_mt = tau(d.beta);
    RotatingBound {
        tau_mt,
        tau_ml: tau(d.alpha),
        t_min: tau_mt,
    }
}

/// Smallest AC amplitude in tesla resolvable at `frequency_hz`:
/// `B_min = ħ·2πf·arccos√F₀ / (2·μ_B·m_eff)`.
pub fn biomagnetic_threshold(frequency_hz: f64, budget: SampleBudget, m: u32, kind: ProbeKind) -> Result<f64> {
    if !(frequency_hz >= 0.0 && frequency_hz.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "frequency must be ≥ 0, got {frequency_hz}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let a = critical_fidelity(budget).sqrt().acos();
    Ok(HBAR * 2.0 * PI * frequency_hz * a / (2.0 * MU_B * kind.effective_bodies(m)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub c0_sq: f64,
    pub tau_mt: f64,
    pub tau_ml: f64,
    pub t_actual: Option<f64>,
    pub feasible: bool,
}

/// Optional `m`-body rescaling of the bound-versus-weight curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManyBody {
    pub m: u32,
    pub kind: ManyBodyKind,
}

/// `i/(points + 1)` for `i = 1..=points`.
pub fn c0_grid(points: usize) -> Vec<f64> {
    let d = (points + 1) as f64;
    (1..=points).map(|i| i as f64 / d).collect()
}

/// Static bounds and exact crossing time of `(ω/2)·σz` against the weight
/// `c0_sq` on the upper eigenvector.
///
/// With `many_body`, the bounds are rescaled and the crossing is that of the
/// `m`-body state: a GHZ state over the two extremal levels behaves as one
/// qubit at `m·ω`, and a product state crosses where each factor reaches
/// `F₀^(1/m)`.
pub fn fig1_dataset(omega: f64, budget: SampleBudget, grid: &[f64], many_body: Option<ManyBody>) -> Result<Vec<Fig1Row>> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("ω must be positive, got {omega}")));
    }
    if let Some(c) = grid.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
        return Err(Error::InvalidArgument(format!("grid value {c} outside (0, 1)")));
    }
    if let Some(mb) = many_body {
        if mb.m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
    }
    let f0 = critical_fidelity(budget);
    let h = PauliHamiltonian::sigma_z(0.5 * omega);
    grid.par_iter()
        .map(|&c| {
            let b = bound_static(&stats(&h, &QubitState::from_weight(c)?), f0)?;
            let (mut mt, mut ml) = (b.tau_mt.time().unwrap_or(f64::NAN), b.tau_ml.time().unwrap_or(f64::NAN));
            let actual = match many_body {
                None => actual_crossing_time_static(omega, c, f0)?,
                Some(ManyBody { m, kind }) => {
                    mt = scale_many_body(mt, m, kind, SpeedLimit::Mt)?;
                    ml = scale_many_body(ml, m, kind, SpeedLimit::Ml)?;
                    match kind {
                        ManyBodyKind::Ghz => actual_crossing_time_static(m as f64 * omega, c, f0)?,
                        ManyBodyKind::Product => actual_crossing_time_static(omega, c, f0.powf(1.0 / m as f64))?,
                    }
                }
            };
            Ok(Fig1Row {
                c0_sq: c,
                tau_mt: mt,
                tau_ml: ml,
                t_actual: actual.time(),
                feasible: actual.is_feasible(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiomagRow {
    pub frequency_hz: f64,
    pub b_min_tesla: f64,
    pub n: u64,
    pub m: u32,
    pub kind: ProbeKind,
}

pub fn biomag_dataset(frequencies: &[f64], budget: SampleBudget, m: u32, kind: ProbeKind) -> Result<Vec<BiomagRow>> {
    frequencies
        .iter()
        .map(|&f| {
            Ok(BiomagRow {
                frequency_hz: f,
                b_min_tesla: biomagnetic_threshold(f, budget, m, kind)?,
                n: budget.get(),
                m,
                kind,
            })
        })
        .collect()
}

/// `points` frequencies spaced logarithmically over `[lo, hi]`.
pub fn log_frequencies(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || points == 0 {
        return Err(Error::InvalidArgument(format!(
            "need 0 < lo ≤ hi and at least one point, got [{lo}, {hi}] × {points}"
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i == points - 1 { hi } else { (a + i as f64 * step).exp() })
        .collect())
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_fig1_csv<W: Write>(mut out: W, rows: &[Fig1Row]) -> io::Result<()> {
    writeln!(out, "c0_sq,tau_mt,tau_ml,t_actual,feasible")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(r.c0_sq),
            fmt_float(r.tau_mt),
            fmt_float(r.tau_ml),
            r.t_actual.map(fmt_float).unwrap_or_default(),
            r.feasible
        )?;
    }
    Ok(())
}

pub fn write_biomag_csv<W: Write>(mut out: W, rows: &[BiomagRow]) -> io::Result<()> {
    writeln!(out, "frequency_hz,b_min_tesla,n,m,kind")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(r.frequency_hz),
            fmt_float(r.b_min_tesla),
            r.n,
            r.m,
            r.kind.as_str()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ac(k: f64) -> AcScenario {
        AcScenario::single(1.0, k, 1).unwrap()
    }

    #[test]
    fn kmax_examples() {
        assert_abs_diff_eq!(ac_kmax(&ac(0.5)), 4.0 / PI, epsilon = 1e-12);
        let ghz = AcScenario::new(1.0, 0.5, SampleBudget::new(1).unwrap(), 10, ProbeKind::Ghz).unwrap();
        assert_abs_diff_eq!(ac_kmax(&ghz), 40.0 / PI, epsilon = 1e-12);
        let big = AcScenario::single(1.0, 0.5, 1 << 40).unwrap();
        assert!(ac_kmax(&big) > 1e6);
    }

    #[test]
    fn tmin_examples() {
        let t = ac_tmin(&ac(0.5)).time().unwrap();
        assert_abs_diff_eq!(t, 2.70903, epsilon = 1e-5);
        let kmax = 4.0 / PI;
        assert_abs_diff_eq!(ac_tmin(&ac(kmax)).time().unwrap(), PI * PI / 4.0, epsilon = 1e-9);
        assert_eq!(ac_tmin(&ac(2.0)), Crossing::Infeasible);
        assert_abs_diff_eq!(ac_tmin(&ac(0.0)).time().unwrap(), PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn tmin_closed_form_vs_quadrature() {
        for &(omega, k, n) in &[(1.0, 0.5, 1u64), (2.0, 0.3, 5), (0.7, 0.05, 100), (1.0, 1.2, 1)] {
            let s = AcScenario::single(omega, k, n).unwrap();
            let a = ac_tmin(&s).time().unwrap();
            let b = ac_tmin_numeric(&s).unwrap().time().unwrap();
            assert!((a - b).abs() < 1e-9, "{omega} {k} {n}: {a} vs {b}");
        }
    }

    #[test]
    fn tmin_small_rate_asymptotics() {
        // sin(kt) vanishes as k → 0, so t_min grows like 2·√(arccos√F₀/(kω))
        // instead of approaching the static value.
        let a = PI / 4.0;
        for k in [1e-4, 1e-6] {
            let t = ac_tmin(&ac(k)).time().unwrap();
            assert!((t / (2.0 * (a / k).sqrt()) - 1.0).abs() < 1e-3);
        }
        assert!(ac_tmin(&ac(1e-6)).time().unwrap() > ac_tmin(&ac(0.0)).time().unwrap());
    }

    #[test]
    fn fidelity_reaches_threshold_at_tmin() {
        let s = ac(0.5);
        let t = ac_tmin(&s).time().unwrap();
        assert_abs_diff_eq!(s.fidelity_at(t), s.f0(), epsilon = 1e-12);
    }

    #[test]
    fn rotating_examples() {
        let b1 = SampleBudget::new(1).unwrap();
        let w = rotating_tmin(&RotatingScenario::new(1.0, 0.1, TargetParam::Omega, b1).unwrap());
        assert_abs_diff_eq!(w.tau_mt, PI / 2.0, epsilon = 1e-12);
        assert!(w.tau_ml <= w.tau_mt);
        let k = rotating_tmin(&RotatingScenario::new(1.0, 0.1, TargetParam::K, b1).unwrap());
        assert_abs_diff_eq!(k.tau_mt, (PI / 0.1).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(k.tau_mt, 5.60499, epsilon = 1e-5);
        let big = SampleBudget::new(u64::MAX).unwrap();
        assert!(rotating_tmin(&RotatingScenario::new(1.0, 0.1, TargetParam::Omega, big).unwrap()).tau_mt < 1e-9);
    }

    #[test]
    fn biomagnetic_examples() {
        let n = SampleBudget::new(1_000_000).unwrap();
        let b = biomagnetic_threshold(100.0, n, 1, ProbeKind::Single).unwrap();
        assert!((b - 3.57e-12).abs() < 0.01e-12, "{b}");
        assert_eq!(biomagnetic_threshold(0.0, n, 1, ProbeKind::Single).unwrap(), 0.0);
        let n4 = SampleBudget::new(4_000_000).unwrap();
        let b4 = biomagnetic_threshold(100.0, n4, 1, ProbeKind::Single).unwrap();
        assert_abs_diff_eq!(b4 / b, 0.5, epsilon = 1e-6);
        let g = biomagnetic_threshold(100.0, n, 10, ProbeKind::Ghz).unwrap();
        let p = biomagnetic_threshold(100.0, n, 10, ProbeKind::Product).unwrap();
        assert!(g < p && p < b);
        assert!(biomagnetic_threshold(-1.0, n, 1, ProbeKind::Single).is_err());
    }

    #[test]
    fn fig1_examples() {
        let b1 = SampleBudget::new(1).unwrap();
        let rows = fig1_dataset(1.0, b1, &[0.05, 0.2, 0.5], None).unwrap();
        assert!(!rows[0].feasible && rows[0].t_actual.is_none());
        assert_abs_diff_eq!(rows[1].tau_mt, rows[1].tau_ml, epsilon = 1e-12);
        assert_abs_diff_eq!(rows[2].t_actual.unwrap(), rows[2].tau_mt, epsilon = 1e-12);
        assert!(fig1_dataset(1.0, b1, &[0.0], None).is_err());
    }

    #[test]
    fn fig1_many_body_respects_bounds() {
        let b = SampleBudget::new(3).unwrap();
        for kind in [ManyBodyKind::Product, ManyBodyKind::Ghz] {
            let rows = fig1_dataset(1.0, b, &c0_grid(99), Some(ManyBody { m: 4, kind })).unwrap();
            for r in rows.iter().filter(|r| r.feasible) {
                let t = r.t_actual.unwrap();
                assert!(t >= r.tau_mt.max(r.tau_ml) * (1.0 - 1e-12), "{kind:?} {r:?}");
            }
            let eq = rows.iter().find(|r| r.c0_sq == 0.5).unwrap();
            if kind == ManyBodyKind::Ghz {
                assert_abs_diff_eq!(eq.t_actual.unwrap(), eq.tau_mt, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let b1 = SampleBudget::new(1).unwrap();
        let rows = fig1_dataset(1.0, b1, &[0.05, 0.5], None).unwrap();
        let mut buf = Vec::new();
        write_fig1_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "c0_sq,tau_mt,tau_ml,t_actual,feasible");
        assert!(lines[1].ends_with(",,false"));
        let fields: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(fields[3].parse::<f64>().unwrap(), rows[1].t_actual.unwrap());
        assert_eq!(fmt_float(3.57e-12), "3.57e-12");
    }

    #[test]
    fn log_grid() {
        let f = log_frequencies(1.0, 1000.0, 4).unwrap();
        assert_eq!(f.len(), 4);
        assert_abs_diff_eq!(f[1], 10.0, epsilon = 1e-12);
        assert_eq!(f[3], 1000.0);
        assert!(log_frequencies(0.0, 1.0, 3).is_err());
    }
}
