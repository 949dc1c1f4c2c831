//! Mandelstam–Tamm and Margolus–Levitin minimum-time bounds.
//!
//! Static bounds (time-independent `H`), fixed-axis envelopes
//! `H(t) = r(t)·ĥ`, the exact crossing time of a qubit probe and the
//! many-body rescalings. All times are in units where ħ = 1.
//!
//! The ML distance `α(F)` is taken as `β(F)²`, a numerical approximation;
//! results carry this through [`DistanceFunctions`].

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::envelope::EnvelopeSpec;
use crate::error::{Error, Result};
use crate::numeric::{bisect_leftmost, TIME_TOL};
use crate::pauli::EnergyStats;

/// Fidelity-to-distance maps `β(F) = (2/π)·arccos√F` and `α(F) = β(F)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceFunctions {
    pub f: f64,
    pub beta: f64,
    pub alpha: f64,
}

impl DistanceFunctions {
    pub fn new(f0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f0) {
            return Err(Error::InvalidArgument(format!("fidelity {f0} outside [0, 1]")));
        }
        let beta = (2.0 / PI) * f0.sqrt().acos();
        Ok(Self {
            f: f0,
            beta,
            alpha: beta * beta,
        })
    }
}

pub fn distances(f0: f64) -> Result<DistanceFunctions> {
    DistanceFunctions::new(f0)
}

/// Leading-order `arccos√F₀ ≈ 1/√N` for `F₀ = N/(N+1)`.
pub fn arccos_sqrt_f0_large_n(n: u64) -> f64 {
    1.0 / (n as f64).sqrt()
}

/// Outcome of a minimum-time search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Option<f64>", into = "Option<f64>")]
pub enum Crossing {
    At(f64),
    /// The target is not reached within the horizon (or ever).
    Infeasible,
}

impl Crossing {
    pub fn time(self) -> Option<f64> {
        match self {
            Crossing::At(t) => Some(t),
            Crossing::Infeasible => None,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, Crossing::At(_))
    }
}

impl From<Option<f64>> for Crossing {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Crossing::Infeasible, Crossing::At)
    }
}

impl From<Crossing> for Option<f64> {
    fn from(c: Crossing) -> Self {
        c.time()
    }
}

/// Both speed limits for one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub tau_mt: Crossing,
    pub tau_ml: Crossing,
    /// `max(τ_MT, τ_ML)` when both are reachable.
    pub t_min: Option<f64>,
    pub distances: DistanceFunctions,
    pub feasible: bool,
}

impl BoundResult {
    pub fn new(tau_mt: Crossing, tau_ml: Crossing, distances: DistanceFunctions) -> Self {
        let t_min = match (tau_mt, tau_ml) {
            (Crossing::At(a), Crossing::At(b)) => Some(a.max(b)),
            _ => None,
        };
        Self {
            tau_mt,
            tau_ml,
            t_min,
            distances,
            feasible: t_min.is_some(),
        }
    }
}

/// `τ_MT = π·β(F₀) / (2·ΔH)`
pub fn mt_static(stddev_h: f64, f0: f64) -> Result<f64> {
    let d = DistanceFunctions::new(f0)?;
    if !(stddev_h >= 0.0) {
        return Err(Error::InvalidArgument(format!("ΔH must be ≥ 0, got {stddev_h}")));
    }
    if d.beta == 0.0 {
        return Ok(0.0);
    }
    if stddev_h == 0.0 {
        return Err(Error::NoInformation("ΔH = 0: the state is stationary".into()));
    }
    Ok(FRAC_PI_2 * d.beta / stddev_h)
}

/// `τ_ML = π·α(F₀) / (2·⟨H − E_r⟩)`
///
/// The caller is responsible for `e_reference ≤ E_g`; see [`ml_static_checked`].
pub fn ml_static(mean_h: f64, e_reference: f64, f0: f64) -> Result<f64> {
    let d = DistanceFunctions::new(f0)?;
    let gap = mean_h - e_reference;
    if !(gap >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "⟨H⟩ = {mean_h} lies below the reference {e_reference}"
        )));
    }
    if d.alpha == 0.0 {
        return Ok(0.0);
    }
    if gap == 0.0 {
        return Err(Error::NoInformation("⟨H − E_r⟩ = 0: no energy above reference".into()));
    }
    Ok(FRAC_PI_2 * d.alpha / gap)
}

/// [`ml_static`] with the reference validated against the ground energy.
pub fn ml_static_checked(stats: &EnergyStats, e_reference: f64, f0: f64) -> Result<f64> {
    if e_reference > stats.e_ground {
        return Err(Error::InvalidReference {
            reference: e_reference,
            ground: stats.e_ground,
        });
    }
    ml_static(stats.mean, e_reference, f0)
}

/// Both static bounds with the ground energy as ML reference.
pub fn bound_static(stats: &EnergyStats, f0: f64) -> Result<BoundResult> {
    let d = DistanceFunctions::new(f0)?;
    let mt = mt_static(stats.stddev, f0)?;
    let ml = ml_static(stats.mean, stats.e_ground, f0)?;
    Ok(BoundResult::new(Crossing::At(mt), Crossing::At(ml), d))
}

/// Leftmost `t` in `[0, horizon]` with `|∫₀ᵗ g(r(s)) ds| ≥ target`.
///
/// Walks the envelope's constant-sign pieces; on each piece the running
/// integral is monotone, so the first piece whose end reaches the target
/// contains the crossing. Inside it the bracket grows geometrically from the
/// piece start before bisecting.
fn leftmost_reach<G: Fn(f64) -> f64 + Copy>(env: &EnvelopeSpec, g: G, target: f64) -> Crossing {
    if target <= 0.0 {
        return Crossing::At(0.0);
    }
    let cuts = env.segments();
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let end = acc + env.integrate(g, a, b);
        if end.abs() >= target {
            let sign = if end >= 0.0 { 1.0 } else { -1.0 };
            let reached = |t: f64| sign * (acc + env.integrate(g, a, t)) >= target;
            let mut lo = a;
            let mut width = (b - a) / 1024.0;
            let hi = loop {
                let hi = (lo + width).min(b);
                if hi >= b || reached(hi) {
                    break hi;
                }
                lo = hi;
                width *= 2.0;
            };
            return Crossing::At(bisect_leftmost(reached, lo, hi, TIME_TOL));
        }
        acc = end;
    }
    Crossing::Infeasible
}

/// Smallest `t` with `∫₀ᵗ Δĥ·|r(s)| ds ≥ (π/2)·β(F₀)`.
pub fn mt_envelope(stddev_h_unit: f64, env: &EnvelopeSpec, f0: f64) -> Result<Crossing> {
    let d = DistanceFunctions::new(f0)?;
    if !(stddev_h_unit >= 0.0) {
        return Err(Error::InvalidArgument(format!("Δĥ must be ≥ 0, got {stddev_h_unit}")));
    }
    let target = FRAC_PI_2 * d.beta;
    if target == 0.0 {
        return Ok(Crossing::At(0.0));
    }
    if stddev_h_unit == 0.0 || env.is_identically_zero() {
        return Err(Error::NoInformation("MT integrand vanishes identically".into()));
    }
    Ok(leftmost_reach(env, move |r| stddev_h_unit * r.abs(), target))
}

/// Smallest `t` with `∫₀ᵗ (⟨ĥ⟩·r(s) + (ω/2)·|r(s)|) ds ≥ (π/2)·α(F₀)`.
///
/// `ω` is the level splitting of `ĥ`, so the instantaneous ground energy is
/// `−ω·|r(t)|/2` and the integrand is non-negative whenever `|⟨ĥ⟩| ≤ ω/2`.
pub fn ml_envelope(mean_h_unit: f64, omega: f64, env: &EnvelopeSpec, f0: f64) -> Result<Crossing> {
    let d = DistanceFunctions::new(f0)?;
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!("ω must be positive, got {omega}")));
    }
    let half = 0.5 * omega;
    if mean_h_unit.abs() > half * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "|⟨ĥ⟩| = {} exceeds ω/2 = {half}",
            mean_h_unit.abs()
        )));
    }
    let target = FRAC_PI_2 * d.alpha;
    if target == 0.0 {
        return Ok(Crossing::At(0.0));
    }
    if env.is_identically_zero() {
        return Err(Error::NoInformation("ML integrand vanishes identically".into()));
    }
    let integrand = move |r: f64| {
        let v = mean_h_unit * r + half * r.abs();
        debug_assert!(v >= -1e-12 * (1.0 + r.abs()), "ML integrand negative: {v}");
        v.max(0.0)
    };
    let c = leftmost_reach(env, integrand, target);
    if c == Crossing::Infeasible && env.integrate(integrand, 0.0, env.horizon()) == 0.0 {
        return Err(Error::NoInformation("ML integrand vanishes on the horizon".into()));
    }
    Ok(c)
}

/// Both envelope bounds for a probe with weight `c0_sq` on the upper eigenvector
/// of `ĥ` (level splitting `omega`).
pub fn bound_envelope(omega: f64, c0_sq: f64, env: &EnvelopeSpec, f0: f64) -> Result<BoundResult> {
    check_weight(c0_sq)?;
    let d = DistanceFunctions::new(f0)?;
    let stddev = omega * (c0_sq * (1.0 - c0_sq)).sqrt();
    let mean = 0.5 * omega * (2.0 * c0_sq - 1.0);
    let mt = mt_envelope(stddev, env, f0)?;
    let ml = ml_envelope(mean, omega, env, f0)?;
    Ok(BoundResult::new(mt, ml, d))
}

fn check_weight(c0_sq: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&c0_sq) {
        return Err(Error::InvalidArgument(format!("c0_sq = {c0_sq} outside [0, 1]")));
    }
    Ok(())
}

/// Exact fidelity `F(t) = 1 − 4c(1−c)·sin²((ω/2)∫₀ᵗ r)` of a probe with
/// weight `c0_sq` on the upper eigenvector.
pub fn probe_fidelity(omega: f64, c0_sq: f64, phase_integral: f64) -> f64 {
    let s = (0.5 * omega * phase_integral).sin();
    1.0 - 4.0 * c0_sq * (1.0 - c0_sq) * s * s
}

/// First time the probe fidelity drops to `f0`.
pub fn actual_crossing_time(omega: f64, c0_sq: f64, env: &EnvelopeSpec, f0: f64) -> Result<Crossing> {
    check_weight(c0_sq)?;
    DistanceFunctions::new(f0)?;
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!("ω must be positive, got {omega}")));
    }
    if f0 >= 1.0 {
        return Ok(Crossing::At(0.0));
    }
    let contrast = 4.0 * c0_sq * (1.0 - c0_sq);
    // F_min = (1 − 2c)²
    if contrast == 0.0 || (1.0 - 2.0 * c0_sq).powi(2) > f0 {
        return Ok(Crossing::Infeasible);
    }
    let q = ((1.0 - f0) / contrast).min(1.0);
    let phase_target = q.sqrt().asin();
    let half = 0.5 * omega;
    Ok(leftmost_reach(env, move |r| half * r, phase_target))
}

/// Static special case of [`actual_crossing_time`].
pub fn actual_crossing_time_static(omega: f64, c0_sq: f64, f0: f64) -> Result<Crossing> {
    check_weight(c0_sq)?;
    DistanceFunctions::new(f0)?;
    if f0 >= 1.0 {
        return Ok(Crossing::At(0.0));
    }
    let contrast = 4.0 * c0_sq * (1.0 - c0_sq);
    if contrast == 0.0 || (1.0 - 2.0 * c0_sq).powi(2) > f0 {
        return Ok(Crossing::Infeasible);
    }
    let q = ((1.0 - f0) / contrast).min(1.0);
    Ok(Crossing::At(2.0 * q.sqrt().asin() / omega))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManyBodyKind {
    Product,
    Ghz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedLimit {
    Mt,
    Ml,
}

/// Rescales a single-body bound to `m` bodies: `τ/√m` for product-state MT,
/// `τ/m` otherwise.
pub fn scale_many_body(tau: f64, m: u32, kind: ManyBodyKind, which: SpeedLimit) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let m = m as f64;
    Ok(match (kind, which) {
        (ManyBodyKind::Product, SpeedLimit::Mt) => tau / m.sqrt(),
        _ => tau / m,
    })
}

/// Weight `c0_sq` at which the static ML and MT bounds coincide,
/// `β²/(1 + β²)`; below it the ML bound is the larger one.
pub fn mlb_vs_mtb_crossover(f0: f64) -> Result<f64> {
    let d = DistanceFunctions::new(f0)?;
    Ok(d.alpha / (1.0 + d.alpha))
}
