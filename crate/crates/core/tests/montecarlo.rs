use qsense_core::distinguishability::{critical_fidelity, detection_probability, SampleBudget};
use qsense_core::montecarlo::{run_experiment, sweep_time, write_sweep_csv, McConfig};
use qsense_core::scenarios::{ac_tmin, AcScenario};

fn budget(n: u64) -> SampleBudget {
    SampleBudget::new(n).unwrap()
}

#[test]
fn empirical_rate_within_four_sigma() {
    let mut configs = Vec::new();
    for (i, &n) in [1u64, 2, 5, 10, 30, 100, 300].iter().enumerate() {
        for (j, &f) in [0.2, 0.5, 0.8, 0.95, 0.99, 0.999].iter().enumerate() {
            configs.push(McConfig::new(f, budget(n), 20_000, (i * 10 + j) as u64).unwrap());
        }
    }
    let mut inside = 0;
    for cfg in &configs {
        let exact = detection_probability(cfg.true_fidelity, cfg.budget).unwrap();
        let rate = run_experiment(cfg).unwrap();
        let band = 4.0 * (exact * (1.0 - exact) / cfg.replicates as f64).sqrt();
        if (rate - exact).abs() <= band.max(1e-12) {
            inside += 1;
        }
    }
    assert!(inside as f64 >= 0.99 * configs.len() as f64, "{inside}/{}", configs.len());
}

#[test]
fn parallel_and_serial_agree() {
    let cfg = McConfig::new(0.97, budget(40), 30_000, 11).unwrap();
    let parallel = run_experiment(&cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| run_experiment(&cfg)).unwrap();
    assert_eq!(parallel.to_bits(), serial.to_bits());
}

#[test]
fn sweep_output_is_byte_identical() {
    let s = AcScenario::single(1.0, 0.5, 3).unwrap();
    let grid: Vec<f64> = (0..=30).map(|i| i as f64 * 0.15).collect();
    let render = || {
        let sw = sweep_time(|t| s.fidelity_at(t), &grid, s.budget, 5_000, 42).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &sw).unwrap();
        buf
    };
    assert_eq!(render(), render());
}

#[test]
fn sweep_exact_column_matches_oracle() {
    let s = AcScenario::single(1.0, 0.5, 10).unwrap();
    let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.2).collect();
    let sw = sweep_time(|t| s.fidelity_at(t), &grid, s.budget, 100, 1).unwrap();
    for r in &sw.rows {
        let want = detection_probability(s.fidelity_at(r.t), s.budget).unwrap();
        assert!((r.exact_rate - want).abs() <= 1e-12);
    }
}

#[test]
fn rates_below_threshold_before_tmin() {
    for n in [1u64, 5, 50] {
        let s = AcScenario::single(1.0, 0.2, n).unwrap();
        let tmin = ac_tmin(&s).time().unwrap();
        let threshold = detection_probability(critical_fidelity(s.budget), s.budget).unwrap();
        let grid: Vec<f64> = (0..40).map(|i| tmin * i as f64 / 40.0).collect();
        let sw = sweep_time(|t| s.fidelity_at(t), &grid, s.budget, 2_000, 5).unwrap();
        for r in &sw.rows {
            assert!(r.true_fidelity > s.f0());
            assert!(r.exact_rate < threshold, "n = {n}, t = {}: {} ≥ {threshold}", r.t, r.exact_rate);
        }
        for w in sw.rows.windows(2) {
            assert!(w[1].exact_rate >= w[0].exact_rate);
            assert!(w[1].detection_rate >= w[0].detection_rate);
        }
    }
}

#[test]
fn large_budget_uses_exact_inversion() {
    let f = 0.999_99;
    let cfg = McConfig::new(f, budget(200_000), 4_000, 9).unwrap();
    let exact = detection_probability(f, cfg.budget).unwrap();
    let rate = run_experiment(&cfg).unwrap();
    let band = 4.0 * (exact * (1.0 - exact) / 4_000.0).sqrt();
    assert!((rate - exact).abs() <= band, "{rate} vs {exact}");
}
