//! Brute-force M-body statistics for non-interacting probes.
//!
//! `H_total = Σᵢ hᵢ` is diagonal in the tensor eigenbasis of the single-site
//! `h`, so the full `2^M` amplitude vector is built explicitly and the
//! moments are summed directly. GHZ states are taken over that eigenbasis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{eig, stats, EnergyStats, PauliHamiltonian, QubitState};
use crate::qsl::ManyBodyKind;

pub const MAX_BODIES: usize = 12;

/// Relative tolerance of [`verify_scaling`].
pub const SCALING_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManyBodyStats {
    pub m: usize,
    pub stddev_total: f64,
    pub mean_total: f64,
    pub e_ground_total: f64,
    pub kind: ManyBodyKind,
}

impl ManyBodyStats {
    pub fn mean_above_ground(&self) -> f64 {
        self.mean_total - self.e_ground_total
    }
}

/// Exact `⟨H⟩`, `ΔH` and `E_g` of `Σᵢ hᵢ` over `m` sites.
///
/// For [`ManyBodyKind::Ghz`] the single-site state is ignored and
/// `(|+…+⟩ + |−…−⟩)/√2` over the eigenvectors of `h` is used.
pub fn tensor_stats(
    h: &PauliHamiltonian,
    single_state: &QubitState,
    m: usize,
    kind: ManyBodyKind,
) -> Result<ManyBodyStats> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if m > MAX_BODIES {
        return Err(Error::DimensionTooLarge { m, max: MAX_BODIES });
    }
    let es = eig(h);
    let levels = [es.e_plus, es.e_minus];
    let dim = 1usize << m;

    let amplitudes: Vec<Complex64> = match kind {
        ManyBodyKind::Product => {
            let b = [es.v_plus.inner(single_state), es.v_minus.inner(single_state)];
            (0..dim)
                .map(|idx| (0..m).map(|site| b[(idx >> site) & 1]).product())
                .collect()
        }
        ManyBodyKind::Ghz => {
            let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[0] = r;
            v[dim - 1] = r;
            v
        }
    };

    let energy = |idx: usize| -> f64 { (0..m).map(|site| levels[(idx >> site) & 1]).sum() };

    let mut norm = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    let mut ground = f64::INFINITY;
    for (idx, a) in amplitudes.iter().enumerate() {
        let e = energy(idx);
        let w = a.norm_sqr();
        norm += w;
        first += w * e;
        second += w * e * e;
        ground = ground.min(e);
    }
    let mean = first / norm;
    let var = (second / norm - mean * mean).max(0.0);
    Ok(ManyBodyStats {
        m,
        stddev_total: var.sqrt(),
        mean_total: mean,
        e_ground_total: ground,
        kind,
    })
}

/// Brute force versus closed-form scaling at one `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub m: usize,
    pub product: ManyBodyStats,
    pub ghz: ManyBodyStats,
    /// `ΔH^pro / ΔH`, the product-state MT speedup (`√m`).
    pub mt_speedup_product: f64,
    /// `ΔH^ghz / ΔH_eq`, the GHZ MT speedup (`m`).
    pub mt_speedup_ghz: f64,
    /// `⟨H − E_g⟩^pro / ⟨h − e_g⟩` (`m`).
    pub ml_speedup_product: f64,
    /// `⟨H − E_g⟩^ghz / ⟨h − e_g⟩_eq` (`m`).
    pub ml_speedup_ghz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    /// Single-site moments of the supplied state.
    pub single: EnergyStats,
    /// Single-site moments of the equal-weight eigenvector superposition,
    /// the one-body counterpart of the GHZ state.
    pub single_equal_weight: EnergyStats,
    pub rows: Vec<ScalingRow>,
}

fn close(brute: f64, closed: f64) -> bool {
    (brute - closed).abs() <= SCALING_TOL * brute.abs().max(closed.abs()).max(1e-300)
        || (brute - closed).abs() < 1e-14
}

/// Checks `ΔH^pro = √m·ΔH`, `ΔH^ghz = m·ΔH_eq` and `⟨H − E_g⟩ = m·⟨h − e_g⟩`
/// (for both kinds) against [`tensor_stats`] for every `m` in `m_range`.
pub fn verify_scaling<I>(h: &PauliHamiltonian, single_state: &QubitState, m_range: I) -> Result<ScalingReport>
where
    I: IntoIterator<Item = usize>,
{
    let single = stats(h, single_state);
    let es = eig(h);
    let equal = QubitState::from_weight_in(&es, 0.5)?;
    let single_eq = stats(h, &equal);

    let mut rows = Vec::new();
    for m in m_range {
        let product = tensor_stats(h, single_state, m, ManyBodyKind::Product)?;
        let ghz = tensor_stats(h, single_state, m, ManyBodyKind::Ghz)?;
        let mf = m as f64;
        let checks: [(&'static str, f64, f64); 4] = [
            ("product ΔH = √m·ΔH", product.stddev_total, mf.sqrt() * single.stddev),
            ("ghz ΔH = m·ΔH", ghz.stddev_total, mf * single_eq.stddev),
            (
                "product ⟨H − E_g⟩ = m·⟨h − e_g⟩",
                product.mean_above_ground(),
                mf * single.mean_above_ground(),
            ),
            (
                "ghz ⟨H − E_g⟩ = m·⟨h − e_g⟩",
                ghz.mean_above_ground(),
                mf * single_eq.mean_above_ground(),
            ),
        ];
        for (what, brute, closed) in checks {
            if !close(brute, closed) {
                return Err(Error::ScalingMismatch {
                    m,
                    what,
                    brute,
                    closed,
                });
            }
        }
        let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::NAN };
        rows.push(ScalingRow {
            m,
            product,
            ghz,
            mt_speedup_product: ratio(product.stddev_total, single.stddev),
            mt_speedup_ghz: ratio(ghz.stddev_total, single_eq.stddev),
            ml_speedup_product: ratio(product.mean_above_ground(), single.mean_above_ground()),
            ml_speedup_ghz: ratio(ghz.mean_above_ground(), single_eq.mean_above_ground()),
        });
    }
    Ok(ScalingReport {
        single,
        single_equal_weight: single_eq,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn product_example() {
        let s = tensor_stats(&PauliHamiltonian::sigma_z(0.5), &QubitState::plus(), 4, ManyBodyKind::Product).unwrap();
        assert_abs_diff_eq!(s.stddev_total, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.mean_total, 0.0, epsilon = 1e-14);
        assert_eq!(s.e_ground_total, -2.0);
    }

    #[test]
    fn ghz_example() {
        let s = tensor_stats(&PauliHamiltonian::sigma_z(0.5), &QubitState::zero(), 4, ManyBodyKind::Ghz).unwrap();
        assert_abs_diff_eq!(s.stddev_total, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.mean_total, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn single_body_matches_pauli_stats() {
        let h = PauliHamiltonian::new(0.3, -0.4, 0.2, 0.9);
        let psi = QubitState::normalized(Complex64::new(0.3, -0.2), Complex64::new(0.5, 0.6)).unwrap();
        let direct = stats(&h, &psi);
        let s = tensor_stats(&h, &psi, 1, ManyBodyKind::Product).unwrap();
        assert_abs_diff_eq!(s.stddev_total, direct.stddev, epsilon = 1e-14);
        assert_abs_diff_eq!(s.mean_total, direct.mean, epsilon = 1e-14);
        assert_abs_diff_eq!(s.e_ground_total, direct.e_ground, epsilon = 1e-14);
    }

    #[test]
    fn dimension_limit() {
        let h = PauliHamiltonian::sigma_z(0.5);
        assert!(matches!(
            tensor_stats(&h, &QubitState::plus(), 13, ManyBodyKind::Product),
            Err(Error::DimensionTooLarge { m: 13, .. })
        ));
        assert!(tensor_stats(&h, &QubitState::plus(), 12, ManyBodyKind::Ghz).is_ok());
    }

    #[test]
    fn scaling_sigma_z() {
        let r = verify_scaling(&PauliHamiltonian::sigma_z(0.5), &QubitState::plus(), 2..=6).unwrap();
        assert_eq!(r.rows.len(), 5);
        let m2 = &r.rows[0];
        assert_abs_diff_eq!(m2.mt_speedup_product, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(m2.mt_speedup_ghz, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn eigenstate_product_has_no_spread() {
        let r = verify_scaling(&PauliHamiltonian::sigma_z(0.5), &QubitState::zero(), 1..=6).unwrap();
        for row in &r.rows {
            assert_eq!(row.product.stddev_total, 0.0);
        }
    }
}
