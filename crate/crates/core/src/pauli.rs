//! Single-qubit Hermitians in Pauli form, pure states, closed-form
//! propagators and fidelity.
//!
//! Units follow ħ = 1: every energy is an angular frequency.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this Bloch-vector length a Hamiltonian is treated as proportional
/// to the identity.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// Normalization tolerance accepted by [`QubitState::new`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Default tolerance of [`propagate_td`].
pub const DEFAULT_TD_TOL: f64 = 1e-10;

/// Maximum number of step halvings in [`propagate_td`].
pub const DEFAULT_TD_MAX_DEPTH: u32 = 30;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `H = a0·I + ax·σx + ay·σy + az·σz`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliHamiltonian {
    pub a0: f64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl PauliHamiltonian {
    pub const fn new(a0: f64, ax: f64, ay: f64, az: f64) -> Self {
        Self { a0, ax, ay, az }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub const fn identity(c: f64) -> Self {
        Self::new(c, 0.0, 0.0, 0.0)
    }

    pub const fn sigma_x(c: f64) -> Self {
        Self::new(0.0, c, 0.0, 0.0)
    }

    pub const fn sigma_y(c: f64) -> Self {
        Self::new(0.0, 0.0, c, 0.0)
    }

    pub const fn sigma_z(c: f64) -> Self {
        Self::new(0.0, 0.0, 0.0, c)
    }

    /// `c · n̂·σ⃗` for a (not necessarily unit) direction `n`.
    pub fn along(c: f64, n: [f64; 3]) -> Self {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        Self::new(0.0, c * n[0] / len, c * n[1] / len, c * n[2] / len)
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.ax, self.ay, self.az]
    }

    /// Length of the Bloch vector `|a⃗|`, half the level splitting.
    pub fn magnitude(&self) -> f64 {
        (self.ax * self.ax + self.ay * self.ay + self.az * self.az).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a0.is_finite() && self.ax.is_finite() && self.ay.is_finite() && self.az.is_finite()
    }

    pub fn ground_energy(&self) -> f64 {
        self.a0 - self.magnitude()
    }

    /// Dense 2×2 matrix, row major.
    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [
                Complex64::new(self.a0 + self.az, 0.0),
                Complex64::new(self.ax, -self.ay),
            ],
            [
                Complex64::new(self.ax, self.ay),
                Complex64::new(self.a0 - self.az, 0.0),
            ],
        ]
    }

    /// Projects an arbitrary 2×2 matrix onto its Hermitian part in Pauli form.
    pub fn from_matrix_hermitian_part(m: &[[Complex64; 2]; 2]) -> Self {
        Self {
            a0: 0.5 * (m[0][0].re + m[1][1].re),
            az: 0.5 * (m[0][0].re - m[1][1].re),
            ax: 0.5 * (m[0][1].re + m[1][0].re),
            ay: 0.5 * (m[1][0].im - m[0][1].im),
        }
    }

    /// Applies `H` to a (not necessarily normalized) amplitude pair.
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = self.to_matrix();
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Norm of the commutator `[self, other]`; zero iff the two share eigenvectors.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        // [a·σ, b·σ] = 2i (a × b)·σ
        let a = self.vector();
        let b = other.vector();
        let c = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        2.0 * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
    }

    /// `exp(-i·H·phase)` in closed form.
    pub fn exp_minus_i(&self, phase: f64) -> Unitary2 {
        let norm = self.magnitude();
        let global = Complex64::from_polar(1.0, -self.a0 * phase);
        if norm < DEGENERACY_THRESHOLD {
            return Unitary2([[global, ZERO], [ZERO, global]]);
        }
        let theta = norm * phase;
        let (s, c) = theta.sin_cos();
        let (nx, ny, nz) = (self.ax / norm, self.ay / norm, self.az / norm);
        // cos θ·I − i sin θ·n̂·σ⃗
        let m00 = Complex64::new(c, -s * nz);
        let m11 = Complex64::new(c, s * nz);
        let m01 = Complex64::new(-s * ny, -s * nx);
        let m10 = Complex64::new(s * ny, -s * nx);
        Unitary2([
            [global * m00, global * m01],
            [global * m10, global * m11],
        ])
    }
}

impl Add for PauliHamiltonian {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a0 + o.a0, self.ax + o.ax, self.ay + o.ay, self.az + o.az)
    }
}

impl Sub for PauliHamiltonian {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a0 - o.a0, self.ax - o.ax, self.ay - o.ay, self.az - o.az)
    }
}

impl Neg for PauliHamiltonian {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a0, -self.ax, -self.ay, -self.az)
    }
}

impl Mul<f64> for PauliHamiltonian {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Self::new(self.a0 * c, self.ax * c, self.ay * c, self.az * c)
    }
}

/// A 2×2 unitary, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2(pub [[Complex64; 2]; 2]);

impl Unitary2 {
    pub fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn apply(&self, s: &QubitState) -> QubitState {
        let m = &self.0;
        QubitState {
            amp0: m[0][0] * s.amp0 + m[0][1] * s.amp1,
            amp1: m[1][0] * s.amp0 + m[1][1] * s.amp1,
        }
    }

    /// `self · rhs`
    pub fn compose(&self, rhs: &Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Self(out)
    }
}

/// Normalized pure qubit state `amp0|0⟩ + amp1|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    amp0: Complex64,
    amp1: Complex64,
}

impl QubitState {
    /// Fails unless `|amp0|² + |amp1|² = 1` within [`NORM_TOLERANCE`].
    pub fn new(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let norm = amp0.norm_sqr() + amp1.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "state is not normalized (norm² = {norm})"
            )));
        }
        Ok(Self { amp0, amp1 })
    }

    /// Rescales an arbitrary nonzero amplitude pair to unit norm.
    pub fn normalized(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let norm = (amp0.norm_sqr() + amp1.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amp0: amp0 / norm,
            amp1: amp1 / norm,
        })
    }

    pub fn zero() -> Self {
        Self { amp0: ONE, amp1: ZERO }
    }

    pub fn one() -> Self {
        Self { amp0: ZERO, amp1: ONE }
    }

    pub fn plus() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amp0: Complex64::new(r, 0.0),
            amp1: Complex64::new(r, 0.0),
        }
    }

    pub fn minus() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amp0: Complex64::new(r, 0.0),
            amp1: Complex64::new(-r, 0.0),
        }
    }

    /// `√c0_sq·|0⟩ + √(1 − c0_sq)·|1⟩`.
    pub fn from_weight(c0_sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c0_sq) {
            return Err(Error::InvalidArgument(format!("c0_sq = {c0_sq} outside [0, 1]")));
        }
        Ok(Self {
            amp0: Complex64::new(c0_sq.sqrt(), 0.0),
            amp1: Complex64::new((1.0 - c0_sq).sqrt(), 0.0),
        })
    }

    /// `√c0_sq·|v+⟩ + √(1 − c0_sq)·|v−⟩` over the eigenvectors of `h`.
    pub fn from_weight_in(eig: &Eigensystem, c0_sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c0_sq) {
            return Err(Error::InvalidArgument(format!("c0_sq = {c0_sq} outside [0, 1]")));
        }
        let (a, b) = (c0_sq.sqrt(), (1.0 - c0_sq).sqrt());
        Self::normalized(
            eig.v_plus.amp0 * a + eig.v_minus.amp0 * b,
            eig.v_plus.amp1 * a + eig.v_minus.amp1 * b,
        )
    }

    pub fn amp0(&self) -> Complex64 {
        self.amp0
    }

    pub fn amp1(&self) -> Complex64 {
        self.amp1
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.amp0, self.amp1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }

    /// Euclidean distance between amplitude vectors (phase sensitive).
    pub fn distance(&self, other: &Self) -> f64 {
        ((self.amp0 - other.amp0).norm_sqr() + (self.amp1 - other.amp1).norm_sqr()).sqrt()
    }

    pub fn scaled_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        Self {
            amp0: self.amp0 * p,
            amp1: self.amp1 * p,
        }
    }

    /// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`.
    pub fn bloch(&self) -> [f64; 3] {
        let cross = self.amp0.conj() * self.amp1;
        [
            2.0 * cross.re,
            2.0 * cross.im,
            self.amp0.norm_sqr() - self.amp1.norm_sqr(),
        ]
    }

    fn renormalize(self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self {
            amp0: self.amp0 / n,
            amp1: self.amp1 / n,
        }
    }
}

/// Eigenpairs of a [`PauliHamiltonian`], `e_plus ≥ e_minus`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigensystem {
    pub e_plus: f64,
    pub e_minus: f64,
    pub v_plus: QubitState,
    pub v_minus: QubitState,
    /// Set when `H ∝ I`; the eigenvectors are then the canonical basis.
    pub degenerate: bool,
}

impl Eigensystem {
    pub fn gap(&self) -> f64 {
        self.e_plus - self.e_minus
    }
}

pub fn eig(h: &PauliHamiltonian) -> Eigensystem {
    let norm = h.magnitude();
    if norm < DEGENERACY_THRESHOLD {
        return Eigensystem {
            e_plus: h.a0,
            e_minus: h.a0,
            v_plus: QubitState::zero(),
            v_minus: QubitState::one(),
            degenerate: true,
        };
    }
    let (nx, ny, nz) = (h.ax / norm, h.ay / norm, h.az / norm);
    // Pick the chart that stays away from the pole where it is singular.
    let (v_plus, v_minus) = if nz >= 0.0 {
        let s = (2.0 * (1.0 + nz)).sqrt();
        (
            QubitState {
                amp0: Complex64::new((1.0 + nz) / s, 0.0),
                amp1: Complex64::new(nx / s, ny / s),
            },
            QubitState {
                amp0: Complex64::new(-nx / s, ny / s),
                amp1: Complex64::new((1.0 + nz) / s, 0.0),
            },
        )
    } else {
        let s = (2.0 * (1.0 - nz)).sqrt();
        (
            QubitState {
                amp0: Complex64::new(nx / s, -ny / s),
                amp1: Complex64::new((1.0 - nz) / s, 0.0),
            },
            QubitState {
                amp0: Complex64::new((1.0 - nz) / s, 0.0),
                amp1: Complex64::new(-nx / s, -ny / s),
            },
        )
    };
    Eigensystem {
        e_plus: h.a0 + norm,
        e_minus: h.a0 - norm,
        v_plus: v_plus.renormalize(),
        v_minus: v_minus.renormalize(),
        degenerate: false,
    }
}

/// Applies `exp(-i·H·phase_integral)`.
///
/// For a fixed-axis envelope `H(t) = r(t)·H₀` the evolution over `[0, t]` is
/// obtained with `phase_integral = ∫₀ᵗ r(s) ds`.
pub fn evolve_fixed_axis(h: &PauliHamiltonian, phase_integral: f64, state: &QubitState) -> QubitState {
    h.exp_minus_i(phase_integral).apply(state)
}

/// Time-ordered propagation of `state` from `t0` to `t1` under `sampler`.
///
/// Uses exponential-midpoint steps and halves the step until two successive
/// refinement levels differ by less than `tol`.
pub fn propagate_td<F>(sampler: F, t0: f64, t1: f64, state: &QubitState, tol: f64) -> Result<QubitState>
where
    F: Fn(f64) -> PauliHamiltonian,
{
    propagate_td_with_depth(sampler, t0, t1, state, tol, DEFAULT_TD_MAX_DEPTH)
}

pub fn propagate_td_with_depth<F>(
    sampler: F,
    t0: f64,
    t1: f64,
    state: &QubitState,
    tol: f64,
    max_depth: u32,
) -> Result<QubitState>
where
    F: Fn(f64) -> PauliHamiltonian,
{
    if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidArgument(format!("bad time window [{t0}, {t1}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if t1 == t0 {
        return Ok(*state);
    }
    let run = |steps: u64| -> QubitState {
        let dt = (t1 - t0) / steps as f64;
        let mut psi = *state;
        for i in 0..steps {
            let mid = t0 + (i as f64 + 0.5) * dt;
            psi = sampler(mid).exp_minus_i(dt).apply(&psi);
        }
        psi.renormalize()
    };
    let mut steps = 1u64;
    let mut prev = run(steps);
    let mut change = f64::INFINITY;
    for _ in 0..max_depth {
        steps *= 2;
        let cur = run(steps);
        change = cur.distance(&prev);
        if change < tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        depth: max_depth,
        change,
    })
}

/// `|⟨a|b⟩|²`
pub fn fidelity(a: &QubitState, b: &QubitState) -> f64 {
    a.inner(b).norm_sqr().clamp(0.0, 1.0)
}

/// Energy moments of a state: `⟨H⟩`, `ΔH` and the ground energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyStats {
    pub mean: f64,
    pub stddev: f64,
    pub e_ground: f64,
}

impl EnergyStats {
    pub fn mean_above_ground(&self) -> f64 {
        self.mean - self.e_ground
    }
}

pub fn stats(h: &PauliHamiltonian, state: &QubitState) -> EnergyStats {
    let s = state.bloch();
    let proj = h.ax * s[0] + h.ay * s[1] + h.az * s[2];
    let norm = h.magnitude();
    let var = (norm * norm - proj * proj).max(0.0);
    EnergyStats {
        mean: h.a0 + proj,
        stddev: var.sqrt(),
        e_ground: h.a0 - norm,
    }
}

/// `i·Σ_k |∂ψ_k⟩⟨ψ_k|` style outer-product accumulation helper.
pub(crate) fn outer(ket: [Complex64; 2], bra: &QubitState) -> [[Complex64; 2]; 2] {
    let b = [bra.amp0.conj(), bra.amp1.conj()];
    [
        [ket[0] * b[0], ket[0] * b[1]],
        [ket[1] * b[0], ket[1] * b[1]],
    ]
}

pub(crate) fn times_i(m: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [[I * m[0][0], I * m[0][1]], [I * m[1][0], I * m[1][1]]]
}
