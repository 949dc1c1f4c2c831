//! Projection-noise statistics: the SNR ≥ 1 criterion, the critical fidelity
//! and exact detection probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of independent repeated measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct SampleBudget(u64);

impl SampleBudget {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample budget must be at least 1".into()));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for SampleBudget {
    type Error = Error;
    fn try_from(n: u64) -> Result<Self> {
        Self::new(n)
    }
}

impl From<SampleBudget> for u64 {
    fn from(b: SampleBudget) -> u64 {
        b.0
    }
}

/// Plug-in binomial estimate `p̂ = successes / trials` with `Δp̂ = √(p̂(1−p̂)/trials)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinomialEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub delta_p: f64,
}

impl BinomialEstimate {
    pub fn new(successes: u64, trials: u64) -> Result<Self> {
        if trials == 0 || successes > trials {
            return Err(Error::InvalidArgument(format!(
                "need 0 ≤ successes ≤ trials and trials ≥ 1, got {successes}/{trials}"
            )));
        }
        let p_hat = successes as f64 / trials as f64;
        Ok(Self {
            successes,
            trials,
            p_hat,
            delta_p: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        })
    }

    /// Deterministic reference distribution (`p = 1`, `Δp = 0`), i.e. the
    /// input state measured in its own basis.
    pub fn certain(trials: u64) -> Result<Self> {
        Self::new(trials, trials)
    }
}

/// `F₀ = n / (n + 1)`
pub fn critical_fidelity(budget: SampleBudget) -> f64 {
    let n = budget.get() as f64;
    n / (n + 1.0)
}

/// `|p̂ − p̂′| ≥ Δp̂ + Δp̂′`, with a zero signal never counting as distinguishable.
pub fn snr_distinguishable(a: &BinomialEstimate, b: &BinomialEstimate) -> bool {
    let signal = (a.p_hat - b.p_hat).abs();
    signal > 0.0 && signal >= a.delta_p + b.delta_p
}

/// Probability that `n` projective measurements in the input basis flag the
/// output state as distinguishable from the input.
///
/// Sums the exact `Binomial(n, 1 − F)` law of the number of "flipped"
/// outcomes over those outcomes for which the plug-in criterion holds.
pub fn detection_probability(true_fidelity: f64, budget: SampleBudget) -> Result<f64> {
    if !(0.0..=1.0).contains(&true_fidelity) {
        return Err(Error::InvalidArgument(format!(
            "fidelity {true_fidelity} outside [0, 1]"
        )));
    }
    let n = budget.get();
    let reference = BinomialEstimate::certain(n)?;
    let pmf = BinomialPmf::new(n, 1.0 - true_fidelity);
    let mut total = 0.0;
    for flips in 0..=n {
        let observed = BinomialEstimate::new(n - flips, n)?;
        if snr_distinguishable(&reference, &observed) {
            total += pmf.at(flips);
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Log-space probability mass function of `Binomial(n, p)`.
#[derive(Clone, Debug)]
pub struct BinomialPmf {
    n: u64,
    p: f64,
    log_pmf: Vec<f64>,
}

impl BinomialPmf {
    pub fn new(n: u64, p: f64) -> Self {
        let p = p.clamp(0.0, 1.0);
        let mut log_pmf = vec![f64::NEG_INFINITY; n as usize + 1];
        if p == 0.0 {
            log_pmf[0] = 0.0;
        } else if p == 1.0 {
            log_pmf[n as usize] = 0.0;
        } else {
            let log_odds = p.ln() - (-p).ln_1p();
            let mut acc = n as f64 * (-p).ln_1p();
            log_pmf[0] = acc;
            for m in 0..n {
                acc += ((n - m) as f64 / (m + 1) as f64).ln() + log_odds;
                log_pmf[m as usize + 1] = acc;
            }
        }
        Self { n, p, log_pmf }
    }

    pub fn trials(&self) -> u64 {
        self.n
    }

    pub fn success_probability(&self) -> f64 {
        self.p
    }

    pub fn at(&self, m: u64) -> f64 {
        self.log_pmf.get(m as usize).map_or(0.0, |l| l.exp())
    }

    /// Cumulative distribution `P(X ≤ m)` for every `m`.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.log_pmf
            .iter()
            .map(|l| {
                acc += l.exp();
                acc.min(1.0)
            })
            .collect()
    }
}

/// Lower bounds on the estimable phase `δφ` from the two speed limits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseBound {
    /// `2/(π·N·⟨G − G_g⟩)`, absent when the mean is zero.
    pub ml_component: Option<f64>,
    /// `1/(√N·ΔG)`, absent when the spread is zero.
    pub mt_component: Option<f64>,
    pub bound: f64,
}

pub fn min_detectable_phase(
    budget: SampleBudget,
    gen_mean_above_ground: f64,
    gen_stddev: f64,
) -> Result<PhaseBound> {
    if gen_mean_above_ground < 0.0 || gen_stddev < 0.0 {
        return Err(Error::InvalidArgument(
            "generator moments must be non-negative".into(),
        ));
    }
    let n = budget.get() as f64;
    let ml = (gen_mean_above_ground > 0.0)
        .then(|| 2.0 / (std::f64::consts::PI * n * gen_mean_above_ground));
    let mt = (gen_stddev > 0.0).then(|| 1.0 / (n.sqrt() * gen_stddev));
    let bound = match (ml, mt) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => {
            return Err(Error::NoInformation(
                "generator has zero mean above ground and zero spread".into(),
            ))
        }
    };
    Ok(PhaseBound {
        ml_component: ml,
        mt_component: mt,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn budget(n: u64) -> SampleBudget {
        SampleBudget::new(n).unwrap()
    }

    /// Direct enumeration with factorials via f64 products (independent of the
    /// log-space recurrence).
    fn binomial_oracle(n: u64, p: f64, keep: impl Fn(u64) -> bool) -> f64 {
        let mut total = 0.0;
        for m in 0..=n {
            if !keep(m) {
                continue;
            }
            let mut coeff = 1.0;
            for j in 0..m {
                coeff *= (n - j) as f64 / (j + 1) as f64;
            }
            total += coeff * p.powi(m as i32) * (1.0 - p).powi((n - m) as i32);
        }
        total
    }

    #[test]
    fn critical_fidelity_values() {
        assert_eq!(critical_fidelity(budget(1)), 0.5);
        assert_eq!(critical_fidelity(budget(3)), 0.75);
        assert_abs_diff_eq!(critical_fidelity(budget(100)), 100.0 / 101.0, epsilon = 1e-15);
        let mut last = 0.0;
        for n in 1..200 {
            let f = critical_fidelity(budget(n));
            assert!(f > last);
            last = f;
        }
    }

    #[test]
    fn critical_fidelity_saturates_criterion() {
        for n in [1u64, 2, 3, 10, 100, 12345] {
            let f0 = critical_fidelity(budget(n));
            let lhs = 1.0 - f0;
            let rhs = (f0 * (1.0 - f0) / n as f64).sqrt();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn snr_examples() {
        let a = BinomialEstimate::new(100, 100).unwrap();
        let b = BinomialEstimate::new(99, 100).unwrap();
        assert!(snr_distinguishable(&a, &b));
        assert!(!snr_distinguishable(&b, &b));
        assert!(!snr_distinguishable(&a, &a));
        let c = BinomialEstimate::new(60, 100).unwrap();
        let d = BinomialEstimate::new(55, 100).unwrap();
        assert!(!snr_distinguishable(&c, &d));
    }

    #[test]
    fn estimate_rejects_bad_counts() {
        assert!(BinomialEstimate::new(3, 2).is_err());
        assert!(BinomialEstimate::new(0, 0).is_err());
        assert!(SampleBudget::new(0).is_err());
    }

    #[test]
    fn detection_probability_examples() {
        assert_eq!(detection_probability(1.0, budget(17)).unwrap(), 0.0);
        assert_eq!(detection_probability(0.0, budget(1)).unwrap(), 1.0);
        let f = 100.0 / 101.0;
        let exact = binomial_oracle(100, 1.0 - f, |m| m >= 1);
        let p = detection_probability(f, budget(100)).unwrap();
        assert_abs_diff_eq!(p, exact, epsilon = 1e-12);
        assert_abs_diff_eq!(p, 0.63029, epsilon = 1e-5);
        assert!(detection_probability(1.2, budget(1)).is_err());
    }

    #[test]
    fn criterion_reduces_to_one_flip() {
        // Exhaustive over every outcome count for every budget up to 10⁴.
        for n in 1..=10_000u64 {
            let reference = BinomialEstimate::certain(n).unwrap();
            for flips in 0..=n {
                let obs = BinomialEstimate::new(n - flips, n).unwrap();
                assert_eq!(snr_distinguishable(&reference, &obs), flips >= 1, "n={n} m={flips}");
            }
        }
    }

    #[test]
    fn detection_probability_monotone() {
        for n in [1u64, 2, 5, 20, 100] {
            let mut last = f64::INFINITY;
            for i in 0..=50 {
                let f = i as f64 / 50.0;
                let p = detection_probability(f, budget(n)).unwrap();
                assert!(p <= last + 1e-12);
                last = p;
            }
        }
        for i in 0..=20 {
            let f = i as f64 / 20.0;
            let mut last = -1.0;
            for n in 1..40 {
                let p = detection_probability(f, budget(n)).unwrap();
                assert!(p >= last - 1e-12);
                last = p;
            }
        }
    }

    #[test]
    fn detection_at_critical_fidelity_approaches_one_minus_inv_e() {
        let limit = 1.0 - (-1.0f64).exp();
        let mut last_gap = f64::INFINITY;
        for n in [100u64, 1_000, 10_000] {
            let p = detection_probability(critical_fidelity(budget(n)), budget(n)).unwrap();
            let gap = (p - limit).abs();
            assert!(gap < last_gap);
            last_gap = gap;
        }
        assert!(last_gap < 0.02);
    }

    #[test]
    fn pmf_matches_oracle() {
        let pmf = BinomialPmf::new(30, 0.3);
        for m in 0..=30 {
            let o = binomial_oracle(30, 0.3, |x| x == m);
            assert_abs_diff_eq!(pmf.at(m), o, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(*pmf.cdf().last().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_bound_examples() {
        let b = min_detectable_phase(budget(100), 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(b.ml_component.unwrap(), 0.012_732_395, epsilon = 1e-9);
        assert_abs_diff_eq!(b.bound, 0.2, epsilon = 1e-15);
        let b4 = min_detectable_phase(budget(400), 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(b4.mt_component.unwrap(), 0.5 * b.mt_component.unwrap(), epsilon = 1e-15);
        assert!(matches!(
            min_detectable_phase(budget(100), 0.0, 0.0),
            Err(Error::NoInformation(_))
        ));
    }
}
