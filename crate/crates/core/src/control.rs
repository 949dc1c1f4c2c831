//! Quantum control for general time-dependent signals.
//!
//! For a signal `H(λ, t)` depending on an unknown parameter `λ`, the
//! eigenvectors `|ψ̃_k(t)⟩` of `∂_λH(λ_c, t)` are tracked on a time grid with
//! a parallel-transport gauge. The control
//!
//! ```text
//! H_c(t) = −H(λ_c, t) + i·Σ_k |∂_t ψ̃_k⟩⟨ψ̃_k|
//! ```
//!
//! cancels the known part of the signal and drags the probe along the
//! eigenframe, so a deviation `δλ` only imprints the phases
//! `δλ·∫μ_k(t) dt` on the two branches. The equivalent generator commutes
//! with itself at all times and the speed limit becomes
//! `(s/2)·∫(μ_max − μ_min) dt ≥ (π/2)·β(F)`.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{eig, fidelity, outer, propagate_td, times_i, PauliHamiltonian, QubitState, DEFAULT_TD_TOL};
use crate::qsl::DistanceFunctions;

/// Minimum eigenvalue gap of `∂_λH` for the frame to be defined.
pub const DEGENERACY_GAP: f64 = 1e-12;

/// Smallest accepted overlap between consecutive frames on one branch.
const MIN_FRAME_OVERLAP: f64 = 0.5;

type Sampler = Arc<dyn Fn(f64, f64) -> PauliHamiltonian + Send + Sync>;

/// A signal Hamiltonian `H(λ, t)` with its parameter derivative.
#[derive(Clone)]
pub struct ParamHamiltonian {
    sampler: Sampler,
    derivative: Option<Sampler>,
}

impl std::fmt::Debug for ParamHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamHamiltonian")
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl ParamHamiltonian {
    pub fn new<F>(sampler: F) -> Self
    where
        F: Fn(f64, f64) -> PauliHamiltonian + Send + Sync + 'static,
    {
        Self {
            sampler: Arc::new(sampler),
            derivative: None,
        }
    }

    pub fn with_derivative<D>(mut self, derivative: D) -> Self
    where
        D: Fn(f64, f64) -> PauliHamiltonian + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    /// `(ω/2)·(cos kt·σx + sin kt·σz)` with the amplitude `ω` as parameter.
    pub fn rotating_field_amplitude(k: f64) -> Self {
        Self::new(move |omega, t| rotating(omega, k, t)).with_derivative(move |_, t| rotating(1.0, k, t))
    }

    /// `(ω/2)·(cos kt·σx + sin kt·σz)` with the rotation rate `k` as parameter.
    pub fn rotating_field_rate(omega: f64) -> Self {
        Self::new(move |k, t| rotating(omega, k, t)).with_derivative(move |k, t| {
            let (s, c) = (k * t).sin_cos();
            PauliHamiltonian::new(0.0, -0.5 * omega * t * s, 0.0, 0.5 * omega * t * c)
        })
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn eval(&self, param: f64, t: f64) -> PauliHamiltonian {
        (self.sampler)(param, t)
    }

    /// `∂_λH(λ, t)`, by central difference with step `1e-6·max(1, |λ|)`
    /// when no analytic derivative was supplied.
    pub fn d_param(&self, param: f64, t: f64) -> PauliHamiltonian {
        match &self.derivative {
            Some(d) => d(param, t),
            None => {
                let h = 1e-6 * param.abs().max(1.0);
                (self.eval(param + h, t) - self.eval(param - h, t)) * (0.5 / h)
            }
        }
    }
}

fn rotating(omega: f64, k: f64, t: f64) -> PauliHamiltonian {
    let (s, c) = (k * t).sin_cos();
    PauliHamiltonian::new(0.0, 0.5 * omega * c, 0.0, 0.5 * omega * s)
}

/// Gauge-fixed eigenframe of `∂_λH(λ_c, t)` on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenframeTrace {
    grid: Vec<f64>,
    mu_max: Vec<f64>,
    mu_min: Vec<f64>,
    /// `[max branch, min branch]` per grid point.
    frames: Vec<[QubitState; 2]>,
}

impl EigenframeTrace {
    /// Gauge-fixes raw eigenvectors: the first frame gets its largest
    /// component real and positive; every later frame is rephased so its
    /// overlap with the previous one on the same branch is real and positive.
    pub fn from_raw(
        grid: Vec<f64>,
        mu_max: Vec<f64>,
        mu_min: Vec<f64>,
        raw: Vec<[QubitState; 2]>,
    ) -> Result<Self> {
        check_grid(&grid)?;
        let n = grid.len();
        if mu_max.len() != n || mu_min.len() != n || raw.len() != n {
            return Err(Error::InvalidArgument("trace arrays must match the grid".into()));
        }
        for i in 0..n {
            let gap = mu_max[i] - mu_min[i];
            if !(gap >= DEGENERACY_GAP) {
                return Err(Error::Degenerate { t: grid[i], gap });
            }
        }
        let mut frames = Vec::with_capacity(n);
        frames.push(raw[0].map(canonical_phase));
        for i in 1..n {
            let prev: &[QubitState; 2] = &frames[i - 1];
            let mut cur = raw[i];
            for k in 0..2 {
                let ov = prev[k].inner(&cur[k]);
                let mag = ov.norm();
                if mag < MIN_FRAME_OVERLAP {
                    return Err(Error::InvalidArgument(format!(
                        "eigenframe jumps between t = {} and t = {} (overlap {mag:.3}); refine the grid",
                        grid[i - 1],
                        grid[i]
                    )));
                }
                cur[k] = cur[k].scaled_phase(-ov.arg());
            }
            frames.push(cur);
        }
        Ok(Self {
            grid,
            mu_max,
            mu_min,
            frames,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn mu_max(&self) -> &[f64] {
        &self.mu_max
    }

    pub fn mu_min(&self) -> &[f64] {
        &self.mu_min
    }

    pub fn frames(&self) -> &[[QubitState; 2]] {
        &self.frames
    }

    pub fn start(&self) -> f64 {
        self.grid[0]
    }

    pub fn end(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    /// Equal-weight superposition of the extremal frame vectors at the start.
    pub fn probe_state(&self) -> QubitState {
        let [a, b] = self.frames[0];
        QubitState::normalized(a.amp0() + b.amp0(), a.amp1() + b.amp1())
            .expect("orthogonal frame vectors have a nonzero sum")
    }

    /// Trapezoidal `∫_{start}^{t_i} (μ_max − μ_min)` at every grid point.
    pub fn cumulative_gap(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid.len());
        let mut acc = 0.0;
        out.push(0.0);
        for i in 1..self.grid.len() {
            let h = self.grid[i] - self.grid[i - 1];
            acc += 0.5 * h * (self.gap(i - 1) + self.gap(i));
            out.push(acc);
        }
        out
    }

    fn gap(&self, i: usize) -> f64 {
        self.mu_max[i] - self.mu_min[i]
    }

    /// Earliest `t` at which the running gap integral reaches `target`,
    /// exact for a gap that is linear between grid points.
    fn reach(&self, target: f64) -> Option<f64> {
        if target <= 0.0 {
            return Some(self.start());
        }
        let cum = self.cumulative_gap();
        let i = cum.iter().position(|&c| c >= target)?;
        let (g0, g1) = (self.gap(i - 1), self.gap(i));
        let h = self.grid[i] - self.grid[i - 1];
        let rest = target - cum[i - 1];
        // I(τ) = g0·τ + (g1 − g0)·τ²/(2h)
        let a = (g1 - g0) / (2.0 * h);
        let tau = 2.0 * rest / (g0 + (g0 * g0 + 4.0 * a * rest).max(0.0).sqrt());
        Some(self.grid[i - 1] + tau.clamp(0.0, h))
    }
}

fn canonical_phase(s: QubitState) -> QubitState {
    let lead = if s.amp0().norm() >= s.amp1().norm() {
        s.amp0()
    } else {
        s.amp1()
    };
    s.scaled_phase(-lead.arg())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidArgument("grid needs at least two points".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Uniform grid of `steps + 1` points on `[t0, t1]`.
pub fn uniform_grid(t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    let h = (t1 - t0) / steps as f64;
    (0..=steps).map(|i| t0 + i as f64 * h).collect()
}

/// Tracks the eigenframe of `∂_λH(λ_c, t)` along `grid`.
pub fn eigenframe_track(ph: &ParamHamiltonian, param_c: f64, grid: &[f64]) -> Result<EigenframeTrace> {
    check_grid(grid)?;
    let mut mu_max = Vec::with_capacity(grid.len());
    let mut mu_min = Vec::with_capacity(grid.len());
    let mut raw = Vec::with_capacity(grid.len());
    for &t in grid {
        let es = eig(&ph.d_param(param_c, t));
        if es.degenerate || es.gap() < DEGENERACY_GAP {
            return Err(Error::Degenerate { t, gap: es.gap() });
        }
        mu_max.push(es.e_plus);
        mu_min.push(es.e_minus);
        raw.push([es.v_plus, es.v_minus]);
    }
    EigenframeTrace::from_raw(grid.to_vec(), mu_max, mu_min, raw)
}

/// `H_c(t) = −H(λ_c, t) + i·Σ_k |∂_t ψ̃_k⟩⟨ψ̃_k|` as a time sampler.
///
/// The transport term is computed at the grid points by three-point differences
/// of the gauge-fixed frames, projected onto Pauli
/// form and interpolated linearly in between.
#[derive(Clone, Debug)]
pub struct ControlHamiltonian {
    ph: ParamHamiltonian,
    param_c: f64,
    grid: Vec<f64>,
    transport: Vec<PauliHamiltonian>,
    hermiticity_residual: f64,
}

impl ControlHamiltonian {
    pub fn at(&self, t: f64) -> PauliHamiltonian {
        -self.ph.eval(self.param_c, t) + self.transport_at(t)
    }

    /// Interpolated `i·Σ_k |∂_t ψ̃_k⟩⟨ψ̃_k|`.
    pub fn transport_at(&self, t: f64) -> PauliHamiltonian {
        let g = &self.grid;
        let n = g.len();
        if t <= g[0] {
            return self.transport[0];
        }
        if t >= g[n - 1] {
            return self.transport[n - 1];
        }
        let i = g.partition_point(|&x| x <= t);
        let w = (t - g[i - 1]) / (g[i] - g[i - 1]);
        self.transport[i - 1] * (1.0 - w) + self.transport[i] * w
    }

    pub fn transport_terms(&self) -> &[PauliHamiltonian] {
        &self.transport
    }

    /// Largest anti-Hermitian part discarded when projecting the finite
    /// difference transport term onto Pauli form.
    pub fn hermiticity_residual(&self) -> f64 {
        self.hermiticity_residual
    }

    pub fn window(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }
}

pub fn control_hamiltonian(ph: &ParamHamiltonian, trace: &EigenframeTrace, param_c: f64) -> Result<ControlHamiltonian> {
    let g = trace.grid();
    let f = trace.frames();
    let n = g.len();
    let mut transport = Vec::with_capacity(n);
    let mut residual: f64 = 0.0;
    for i in 0..n {
        let w = stencil(g, i);
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (k, frame) in f[i].iter().enumerate() {
            let mut d = [Complex64::new(0.0, 0.0); 2];
            for &(j, wj) in &w {
                d[0] += f[j][k].amp0() * wj;
                d[1] += f[j][k].amp1() * wj;
            }
            let o = outer(d, frame);
            for r in 0..2 {
                for c in 0..2 {
                    m[r][c] += o[r][c];
                }
            }
        }
        let m = times_i(m);
        let anti = [
            (m[0][0] - m[0][0].conj()).norm(),
            (m[0][1] - m[1][0].conj()).norm(),
            (m[1][1] - m[1][1].conj()).norm(),
        ];
        residual = residual.max(anti.iter().cloned().fold(0.0, f64::max));
        transport.push(PauliHamiltonian::from_matrix_hermitian_part(&m));
    }
    Ok(ControlHamiltonian {
        ph: ph.clone(),
        param_c,
        grid: g.to_vec(),
        transport,
        hermiticity_residual: residual,
    })
}

/// Weights of the derivative at `g[i]` from the three-point Lagrange
/// interpolant through the nearest nodes (two points on a two-point grid).
fn stencil(g: &[f64], i: usize) -> Vec<(usize, f64)> {
    let n = g.len();
    if n == 2 {
        let w = 1.0 / (g[1] - g[0]);
        return vec![(0, -w), (1, w)];
    }
    let j0 = i.saturating_sub(1).min(n - 3);
    let nodes = [j0, j0 + 1, j0 + 2];
    let x = g[i];
    nodes
        .iter()
        .map(|&a| {
            let others: Vec<usize> = nodes.iter().copied().filter(|&b| b != a).collect();
            let denom: f64 = others.iter().map(|&b| g[a] - g[b]).product();
            let numer: f64 = (x - g[others[0]]) + (x - g[others[1]]);
            (a, numer / denom)
        })
        .collect()
}

/// Controlled speed limits for detecting a parameter deviation `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlledBound {
    pub tau_mt: f64,
    pub tau_ml: f64,
    pub signal_strength: f64,
    pub f0: f64,
}

/// Smallest `t` with `(s/2)·∫(μ_max − μ_min) ≥ (π/2)·β(F₀)` (MT) and the same
/// with `α(F₀)` (ML), counted from the start of the trace.
pub fn controlled_qsl(trace: &EigenframeTrace, signal_strength: f64, f0: f64) -> Result<ControlledBound> {
    if !(signal_strength > 0.0 && signal_strength.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "signal strength must be positive, got {signal_strength}"
        )));
    }
    let d = DistanceFunctions::new(f0)?;
    let target = |dist: f64| 2.0 * FRAC_PI_2 * dist / signal_strength;
    let available = *trace.cumulative_gap().last().unwrap_or(&0.0);
    let solve = |dist: f64| {
        trace.reach(target(dist)).ok_or(Error::Infeasible {
            accumulated: available,
            needed: target(dist),
        })
    };
    let tau_mt = solve(d.beta)?;
    let tau_ml = solve(d.alpha)?;
    debug_assert!(tau_ml <= tau_mt + 1e-12);
    Ok(ControlledBound {
        tau_mt,
        tau_ml,
        signal_strength,
        f0,
    })
}

/// Fidelity between the signal and reference outputs over time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
}

impl FidelityTrace {
    /// First time the fidelity drops to `f0`, linearly interpolated.
    pub fn crossing(&self, f0: f64) -> Option<f64> {
        let j = self.fidelity.iter().position(|&f| f <= f0)?;
        if j == 0 {
            return Some(self.times[0]);
        }
        let (fa, fb) = (self.fidelity[j - 1], self.fidelity[j]);
        let (ta, tb) = (self.times[j - 1], self.times[j]);
        Some(ta + (tb - ta) * (fa - f0) / (fa - fb))
    }
}

/// Propagates the equal-weight frame superposition under
/// `H(λ_true, t) + H_c(t)` and under the reference `H(λ_c, t) + H_c(t)`, and
/// records their fidelity at `steps + 1` uniformly spaced times from the
/// start of the trace to `horizon`.
///
/// Meaningful when `λ_true − λ_c` is small enough for the signal to be
/// linear in the deviation; for signals linear in `λ` it is exact.
pub fn simulate_controlled(
    ph: &ParamHamiltonian,
    param_true: f64,
    param_c: f64,
    trace: &EigenframeTrace,
    horizon: f64,
    steps: usize,
) -> Result<FidelityTrace> {
    check_window(trace, horizon, steps)?;
    let control = control_hamiltonian(ph, trace, param_c)?;
    run(
        |t| ph.eval(param_true, t) + control.at(t),
        |t| ph.eval(param_c, t) + control.at(t),
        trace,
        horizon,
        steps,
    )
}

/// As [`simulate_controlled`], with the signal replaced by its first-order
/// expansion `H(λ_c, t) + (λ_true − λ_c)·∂_λH(λ_c, t)`.
pub fn simulate_controlled_linearized(
    ph: &ParamHamiltonian,
    param_true: f64,
    param_c: f64,
    trace: &EigenframeTrace,
    horizon: f64,
    steps: usize,
) -> Result<FidelityTrace> {
    check_window(trace, horizon, steps)?;
    let control = control_hamiltonian(ph, trace, param_c)?;
    let delta = param_true - param_c;
    run(
        |t| ph.eval(param_c, t) + ph.d_param(param_c, t) * delta + control.at(t),
        |t| ph.eval(param_c, t) + control.at(t),
        trace,
        horizon,
        steps,
    )
}

fn check_window(trace: &EigenframeTrace, horizon: f64, steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if !(horizon > trace.start() && horizon <= trace.end() * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} outside the traced window [{}, {}]",
            trace.start(),
            trace.end()
        )));
    }
    Ok(())
}

fn run<S, R>(signal: S, reference: R, trace: &EigenframeTrace, horizon: f64, steps: usize) -> Result<FidelityTrace>
where
    S: Fn(f64) -> PauliHamiltonian,
    R: Fn(f64) -> PauliHamiltonian,
{
    let times = uniform_grid(trace.start(), horizon, steps);
    let mut with_signal = trace.probe_state();
    let mut without = with_signal;
    let mut fid = Vec::with_capacity(times.len());
    fid.push(1.0);
    for w in times.windows(2) {
        with_signal = propagate_td(&signal, w[0], w[1], &with_signal, DEFAULT_TD_TOL)?;
        without = propagate_td(&reference, w[0], w[1], &without, DEFAULT_TD_TOL)?;
        fid.push(fidelity(&with_signal, &without));
    }
    Ok(FidelityTrace { times, fidelity: fid })
}
