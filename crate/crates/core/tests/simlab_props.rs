use corisk::simlab::{
    run_bias_experiment, run_outlier_sweep, summarize, BiasExperimentConfig, OutlierSweepConfig,
    Profile,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn mse_reconciles_with_bias_and_variance(
        values in prop::collection::vec(-1e3..1e3f64, 1..200), truth in -1e3..1e3f64,
    ) {
        let s = summarize(&values, truth).unwrap();
        let m = values.len() as f64;
        let rebuilt = s.bias * s.bias + s.variance * (m - 1.0) / m;
        prop_assert!((s.mse - rebuilt).abs() <= 1e-12 * s.mse.max(1e-300) + 1e-15);
    }
}

fn small_bias_config(seed: u64) -> BiasExperimentConfig {
    let mut cfg = BiasExperimentConfig::new(Profile::Desk, seed);
    cfg.replications = 6;
    cfg.sizes = vec![300, 600];
    cfg
}

#[test]
fn bias_experiment_is_reproducible_and_extends_streams() {
    let a = run_bias_experiment(&small_bias_config(3)).unwrap();
    let b = run_bias_experiment(&small_bias_config(3)).unwrap();
    assert_eq!(a.raw, b.raw);
    assert!(a.failures.is_empty());
    assert_eq!(a.raw.len(), 12);

    // the n = 300 dataset is a prefix of the n = 600 one: a run with only
    // the small size reproduces it
    let mut only_small = small_bias_config(3);
    only_small.sizes = vec![300];
    let c = run_bias_experiment(&only_small).unwrap();
    let small: Vec<_> = a.raw.iter().filter(|r| r.n == 300).copied().collect();
    assert_eq!(small, c.raw);

    let d = run_bias_experiment(&small_bias_config(4)).unwrap();
    assert_ne!(a.raw, d.raw);
}

#[test]
fn outlier_sweep_is_thread_independent() {
    let mut cfg = OutlierSweepConfig::new(9);
    cfg.base_n = 1500;
    cfg.jobs = 1;
    let one = run_outlier_sweep(&cfg).unwrap();
    cfg.jobs = 3;
    let three = run_outlier_sweep(&cfg).unwrap();
    assert_eq!(one, three);
    assert_eq!(one.rows.len(), cfg.grid().len());
}
