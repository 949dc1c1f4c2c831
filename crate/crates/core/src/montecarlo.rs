//! Seeded projective-measurement experiments.
//!
//! Each replicate draws the number of flipped outcomes among `n`
//! measurements from `Binomial(n, 1 − F)` by inverting the exact CDF with a
//! single uniform. The uniform comes from ChaCha8 seeded with `seed` on
//! stream `replicate`, so replicates are independent of evaluation order
//! and the parallel count reduction is exact.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distinguishability::{
    critical_fidelity, detection_probability, snr_distinguishable, BinomialEstimate, BinomialPmf, SampleBudget,
};
use crate::error::{Error, Result};
use crate::scenarios::fmt_float;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub true_fidelity: f64,
    pub budget: SampleBudget,
    pub replicates: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(true_fidelity: f64, budget: SampleBudget, replicates: u64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&true_fidelity) {
            return Err(Error::InvalidArgument(format!(
                "fidelity {true_fidelity} outside [0, 1]"
            )));
        }
        if replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be at least 1".into()));
        }
        Ok(Self {
            true_fidelity,
            budget,
            replicates,
            seed,
        })
    }
}

/// Uniform in `[0, 1)` for one replicate.
fn replicate_uniform(seed: u64, replicate: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng.random::<f64>()
}

/// Which flip counts the plug-in criterion flags against a certain reference.
fn detected_table(n: u64) -> Result<Vec<bool>> {
    let reference = BinomialEstimate::certain(n)?;
    (0..=n)
        .map(|flips| Ok(snr_distinguishable(&reference, &BinomialEstimate::new(n - flips, n)?)))
        .collect()
}

fn count_detections(cdf: &[f64], detected: &[bool], replicates: u64, seed: u64) -> u64 {
    let last = cdf.len() - 1;
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let u = replicate_uniform(seed, r);
            let flips = cdf.partition_point(|&c| c <= u).min(last);
            u64::from(detected[flips])
        })
        .sum()
}

/// Fraction of replicates flagged as distinguishable.
pub fn run_experiment(cfg: &McConfig) -> Result<f64> {
    let n = cfg.budget.get();
    let cdf = BinomialPmf::new(n, 1.0 - cfg.true_fidelity).cdf();
    let detected = detected_table(n)?;
    let hits = count_detections(&cdf, &detected, cfg.replicates, cfg.seed);
    Ok(hits as f64 / cfg.replicates as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub true_fidelity: f64,
    pub detection_rate: f64,
    pub exact_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub budget: SampleBudget,
    pub replicates: u64,
    pub seed: u64,
    /// `detection_probability(F₀, n)`.
    pub threshold_rate: f64,
    /// Smallest grid time whose exact rate reaches `threshold_rate`.
    pub threshold_time: Option<f64>,
}

/// Empirical and exact detection rates along a time grid.
///
/// Every grid point reuses the same per-replicate uniforms, so the empirical
/// rate inherits the monotonicity of the exact one wherever `F(t)` is monotone.
pub fn sweep_time<S>(fidelity: S, t_grid: &[f64], budget: SampleBudget, replicates: u64, seed: u64) -> Result<Sweep>
where
    S: Fn(f64) -> f64,
{
    if replicates == 0 {
        return Err(Error::InvalidArgument("replicates must be at least 1".into()));
    }
    let n = budget.get();
    let detected = detected_table(n)?;
    let threshold_rate = detection_probability(critical_fidelity(budget), budget)?;
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let f = fidelity(t);
        if !(0.0..=1.0 + 1e-12).contains(&f) {
            return Err(Error::InvalidArgument(format!("fidelity {f} at t = {t} outside [0, 1]")));
        }
        let f = f.min(1.0);
        let cdf = BinomialPmf::new(n, 1.0 - f).cdf();
        let hits = count_detections(&cdf, &detected, replicates, seed);
        rows.push(SweepRow {
            t,
            true_fidelity: f,
            detection_rate: hits as f64 / replicates as f64,
            exact_rate: detection_probability(f, budget)?,
        });
    }
    let threshold_time = rows
        .iter()
        .find(|r| r.exact_rate >= threshold_rate * (1.0 - 1e-12))
        .map(|r| r.t);
    Ok(Sweep {
        rows,
        budget,
        replicates,
        seed,
        threshold_rate,
        threshold_time,
    })
}

/// CSV with a `#` header comment echoing the seed and threshold.
pub fn write_sweep_csv<W: Write>(mut out: W, sweep: &Sweep) -> io::Result<()> {
    let n = sweep.budget.get();
    writeln!(
        out,
        "# seed={} replicates={} n={} threshold_rate={} threshold_time={}",
        sweep.seed,
        sweep.replicates,
        n,
        fmt_float(sweep.threshold_rate),
        sweep.threshold_time.map(fmt_float).unwrap_or_else(|| "none".into())
    )?;
    writeln!(out, "t,detection_rate,exact_rate,n,replicates,seed")?;
    for r in &sweep.rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_float(r.t),
            fmt_float(r.detection_rate),
            fmt_float(r.exact_rate),
            n,
            sweep.replicates,
            sweep.seed
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{ac_tmin, AcScenario};

    fn budget(n: u64) -> SampleBudget {
        SampleBudget::new(n).unwrap()
    }

    #[test]
    fn certain_output_never_detected() {
        for seed in [0, 1, 42, u64::MAX] {
            let cfg = McConfig::new(1.0, budget(50), 1000, seed).unwrap();
            assert_eq!(run_experiment(&cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn orthogonal_output_always_detected() {
        let cfg = McConfig::new(0.0, budget(7), 500, 3).unwrap();
        assert_eq!(run_experiment(&cfg).unwrap(), 1.0);
    }

    #[test]
    fn deterministic() {
        let cfg = McConfig::new(0.9, budget(20), 5000, 99).unwrap();
        assert_eq!(run_experiment(&cfg).unwrap(), run_experiment(&cfg).unwrap());
        let other = McConfig { seed: 100, ..cfg };
        assert_ne!(run_experiment(&cfg).unwrap(), run_experiment(&other).unwrap());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(McConfig::new(0.5, budget(1), 0, 1).is_err());
        assert!(McConfig::new(1.5, budget(1), 1, 1).is_err());
    }

    #[test]
    fn sweep_ac_threshold() {
        let s = AcScenario::single(1.0, 0.5, 1).unwrap();
        let tmin = ac_tmin(&s).time().unwrap();
        let grid = [0.0, 0.5 * tmin, tmin, 1.1 * tmin];
        let sw = sweep_time(|t| s.fidelity_at(t), &grid, s.budget, 2000, 7).unwrap();
        assert_eq!(sw.rows[0].detection_rate, 0.0);
        assert_eq!(sw.rows[0].exact_rate, 0.0);
        assert!((sw.rows[2].exact_rate - 0.5).abs() < 1e-12);
        assert!((sw.threshold_rate - 0.5).abs() < 1e-12);
        assert_eq!(sw.threshold_time, Some(tmin));
        for w in sw.rows.windows(2) {
            assert!(w[1].exact_rate >= w[0].exact_rate);
            assert!(w[1].detection_rate >= w[0].detection_rate);
        }
    }

    #[test]
    fn csv_header() {
        let sw = sweep_time(|_| 0.5, &[1.0], budget(1), 10, 42).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &sw).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# seed=42 "));
        assert_eq!(lines.next().unwrap(), "t,detection_rate,exact_rate,n,replicates,seed");
    }
}
