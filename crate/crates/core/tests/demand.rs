use proptest::prelude::*;
use storage_robustness::rng::stream;
use storage_robustness::DemandModel;

fn empirical_check(model: &DemandModel, u: usize, probes: &[f64]) {
    let trials = 100_000;
    let mut rng = stream(31, u as u64);
    let sums: Vec<f64> = (0..trials).map(|_| model.sample(u, &mut rng).total()).collect();
    for &x in probes {
        let f = model.sum_cdf(u, x);
        let hat = sums.iter().filter(|&&s| s <= x).count() as f64 / trials as f64;
        let se = (f * (1.0 - f) / trials as f64).sqrt().max(1e-4);
        assert!((hat - f).abs() <= 3.0 * se, "{model} u={u} x={x}: {hat} vs {f}");
    }
}

#[test]
fn sum_cdf_matches_simulation() {
    empirical_check(&DemandModel::exp(1.0).unwrap(), 1, &[0.1, 0.5, 1.0, 2.0, 4.0]);
    empirical_check(&DemandModel::exp(2.0).unwrap(), 3, &[0.5, 1.0, 1.5, 2.0, 3.0]);
    empirical_check(&DemandModel::bernoulli(2.0, 0.3).unwrap(), 4, &[0.0, 1.9, 2.0, 4.0, 6.5]);
    empirical_check(&DemandModel::bernoulli(1.0, 0.5).unwrap(), 10, &[2.0, 4.0, 5.0, 6.0, 8.0]);
}

#[test]
fn pareto_sum_cdf_matches_simulation() {
    let model = DemandModel::pareto(1.0, 2.5).unwrap();
    let trials = 200_000;
    let mut rng = stream(5, 0);
    let sums: Vec<f64> = (0..trials).map(|_| model.sample(3, &mut rng).total()).collect();
    for x in [3.2, 3.6, 4.0, 5.0, 7.0] {
        let hat = sums.iter().filter(|&&s| s <= x).count() as f64 / trials as f64;
        assert!((hat - model.sum_cdf(3, x)).abs() < 5e-3, "x={x}");
    }
}

proptest! {
    #[test]
    fn sum_cdf_is_a_cdf(mu in 0.2f64..5.0, lambda in 0.5f64..3.0, p in 0.0f64..1.0, u in 1usize..6, x in 0.0f64..20.0, dx in 0.0f64..5.0) {
        for model in [DemandModel::exp(mu).unwrap(), DemandModel::bernoulli(lambda, p).unwrap(), DemandModel::pareto(lambda, 1.5 + mu).unwrap()] {
            let a = model.sum_cdf(u, x);
            let b = model.sum_cdf(u, x + dx);
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(a <= b + 1e-12);
            prop_assert_eq!(model.sum_cdf(u, -1e-9), 0.0);
            prop_assert!(model.sum_cdf(u, 1e9) > 1.0 - 1e-6);
        }
    }

    #[test]
    fn lighter_pareto_tails_dominate(lambda in 0.5f64..2.0, alpha in 1.2f64..3.0, bump in 0.1f64..2.0, u in 1usize..4, x in 0.0f64..20.0) {
        let heavy = DemandModel::pareto(lambda, alpha).unwrap();
        let light = DemandModel::pareto(lambda, alpha + bump).unwrap();
        prop_assert!(light.sum_cdf(u, x) >= heavy.sum_cdf(u, x) - 2e-3);
    }

    #[test]
    fn model_specs_round_trip(mu in 0.1f64..10.0, lambda in 0.1f64..10.0, p in 0.0f64..1.0) {
        for model in [DemandModel::exp(mu).unwrap(), DemandModel::bernoulli(lambda, p).unwrap(), DemandModel::pareto(lambda, mu + 0.5).unwrap()] {
            prop_assert_eq!(model.to_string().parse::<DemandModel>().unwrap(), model);
        }
    }
}
