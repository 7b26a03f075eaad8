use pkb::solvers::{log_loss, Penalty};
use pkb::{fit, generate, FitConfig, Lambda, PkbModel, SimData, SimModel, SimSpec};
use proptest::prelude::*;

fn small_sim(model: SimModel, seed: u64, n: usize) -> SimData {
    let mut spec = SimSpec::new(model, model.relevant_count() + 3, seed);
    spec.n_samples = n;
    spec.pathway_size = 3;
    generate(&spec).unwrap()
}

fn config(penalty: Penalty, iters: usize) -> FitConfig {
    FitConfig {
        penalty,
        nu: 0.3,
        max_iters: iters,
        ..FitConfig::default()
    }
}

fn penalty() -> impl Strategy<Value = Penalty> {
    prop_oneof![Just(Penalty::L1), Just(Penalty::L2)]
}

fn sim_model() -> impl Strategy<Value = SimModel> {
    prop_oneof![Just(SimModel::Model1), Just(SimModel::Model2), Just(SimModel::Model3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn training_loss_never_increases(seed in 0u64..1000, model in sim_model(), pen in penalty()) {
        let sim = small_sim(model, seed, 40);
        let fitted = fit(&sim.data, &sim.pathways, &sim.labels, &config(pen, 15)).unwrap();
        for pair in fitted.loss_history().windows(2) {
            prop_assert!(pair[1] <= pair[0] + 1e-12, "{} -> {}", pair[0], pair[1]);
        }
    }

    #[test]
    fn scores_reproduce_the_training_loss(seed in 0u64..1000, pen in penalty()) {
        let sim = small_sim(SimModel::Model1, seed, 36);
        let fitted = fit(&sim.data, &sim.pathways, &sim.labels, &config(pen, 10)).unwrap();
        let pred = fitted.predict(&sim.data).unwrap();
        let last = *fitted.loss_history().last().unwrap();
        prop_assert!((log_loss(sim.labels.values(), &pred.scores) - last).abs() <= 1e-10);
    }

    #[test]
    fn refitting_is_deterministic(seed in 0u64..1000, pen in penalty()) {
        let sim = small_sim(SimModel::Model2, seed, 30);
        let cfg = config(pen, 8);
        let a = fit(&sim.data, &sim.pathways, &sim.labels, &cfg).unwrap();
        let b = fit(&sim.data, &sim.pathways, &sim.labels, &cfg).unwrap();
        prop_assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn flipping_labels_negates_scores(seed in 0u64..1000, pen in penalty()) {
        let sim = small_sim(SimModel::Model1, seed, 30);
        let flipped = pkb::LabelVector::new(sim.labels.values().iter().map(|v| -v).collect()).unwrap();
        let cfg = config(pen, 6);
        let a = fit(&sim.data, &sim.pathways, &sim.labels, &cfg).unwrap();
        let b = fit(&sim.data, &sim.pathways, &flipped, &cfg).unwrap();
        prop_assert_eq!(a.selection_history(), b.selection_history());
        let sa = a.predict(&sim.data).unwrap().scores;
        let sb = b.predict(&sim.data).unwrap().scores;
        for (x, y) in sa.iter().zip(&sb) {
            prop_assert!((x + y).abs() <= 1e-8 * (1.0 + x.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn sample_order_does_not_matter(seed in 0u64..1000, pen in penalty(), rot in 1usize..29) {
        let sim = small_sim(SimModel::Model3, seed, 30);
        let order: Vec<usize> = (0..30).map(|i| (i + rot) % 30).collect();
        let data = sim.data.select_samples(&order);
        let labels = sim.labels.select(&order).unwrap();
        let cfg = config(pen, 6);
        let a = fit(&sim.data, &sim.pathways, &sim.labels, &cfg).unwrap();
        let b = fit(&data, &sim.pathways, &labels, &cfg).unwrap();
        prop_assert_eq!(a.selection_history(), b.selection_history());
        for (x, y) in a.weights().iter().zip(b.weights()) {
            prop_assert!((x - y).abs() <= 1e-7 * (1.0 + x.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn large_lambda_gives_a_constant_model(seed in 0u64..1000, pen in penalty()) {
        let sim = small_sim(SimModel::Model1, seed, 24);
        let cfg = FitConfig { lambda: Lambda::Fixed(1e6), ..config(pen, 5) };
        let fitted = fit(&sim.data, &sim.pathways, &sim.labels, &cfg).unwrap();
        if pen == Penalty::L1 {
            prop_assert!(fitted.weights().iter().all(|&w| w == 0.0));
            prop_assert_eq!(fitted.iterations(), 0);
        } else {
            prop_assert!(fitted.weights().iter().all(|&w| w < 1e-4));
        }
    }

    #[test]
    fn json_round_trip_is_exact(seed in 0u64..1000, pen in penalty()) {
        let sim = small_sim(SimModel::Model2, seed, 24);
        let fitted = fit(&sim.data, &sim.pathways, &sim.labels, &config(pen, 5)).unwrap();
        let back = PkbModel::from_json(&fitted.to_json().unwrap()).unwrap();
        prop_assert_eq!(&back, &fitted);
        prop_assert_eq!(back.predict(&sim.data).unwrap(), fitted.predict(&sim.data).unwrap());
    }
}
