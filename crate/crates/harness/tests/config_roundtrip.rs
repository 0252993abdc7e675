use proptest::prelude::*;

use harness::config::{Constants, ExperimentConfig};
use harness::experiments::EXPERIMENTS;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn valid_configs_survive_json(
        which in 0..EXPERIMENTS.len(),
        p in proptest::collection::vec(0.0..=1.0f64, 1..5),
        lambda in proptest::collection::vec(1e-3..1e3f64, 1..4),
        replicates in 1usize..10_000,
        seed in any::<u64>(),
        t_max in 1e-3..1e9f64,
        gamma2 in proptest::option::of(0.0..10.0f64),
        window in proptest::option::of((1e-3..1e3f64, 1.0..1e3f64)),
    ) {
        let mut cfg = ExperimentConfig::preset(EXPERIMENTS[which]).unwrap();
        cfg.dilution.p = p;
        cfg.lambda = lambda;
        cfg.replicates = replicates;
        cfg.seed = seed;
        cfg.t_max = t_max;
        cfg.constants = gamma2.map(|g| Constants { gamma2: Some(g), ..Constants::default() });
        cfg.fit_window = window.map(|(lo, w)| (lo, lo + w));
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn out_of_range_probabilities_are_rejected(which in 0..EXPERIMENTS.len(), p in prop_oneof![-10.0..-1e-9f64, 1.0 + 1e-9..10.0f64]) {
        let mut cfg = ExperimentConfig::preset(EXPERIMENTS[which]).unwrap();
        cfg.dilution.p.push(p);
        prop_assert!(ExperimentConfig::from_json(&cfg.to_json()).is_err());
    }
}
