use proptest::prelude::*;
use storage_robustness::rng::stream;
use storage_robustness::{check_flow, check_subsets, min_threshold, DemandModel, DemandVector, DesignKind, StorageAllocation, Witness};

fn small_allocation() -> impl Strategy<Value = StorageAllocation> {
    (0usize..6, any::<u64>()).prop_map(|(which, seed)| {
        let (kind, n, d) = match which {
            0 => (DesignKind::Clustering, 12, 3),
            1 => (DesignKind::Cyclic, 10, 3),
            2 => (DesignKind::Block, 7, 3),
            3 => (DesignKind::Random, 9, 2),
            4 => (DesignKind::RandomSubsets, 11, 3),
            _ => (DesignKind::ConstrainedRandom { v_max: 2 }, 12, 3),
        };
        StorageAllocation::build(kind, n, d, Some(seed)).unwrap()
    })
}

fn model() -> impl Strategy<Value = DemandModel> {
    prop_oneof![
        (0.5f64..3.0).prop_map(|mu| DemandModel::exp(mu).unwrap()),
        (0.3f64..1.5, 1.5f64..3.0).prop_map(|(l, a)| DemandModel::pareto(l, a).unwrap()),
        (1.0f64..4.0, 0.05f64..0.6).prop_map(|(l, p)| DemandModel::bernoulli(l, p).unwrap()),
        (1usize..4, 0.1f64..0.6).prop_map(|(l, p)| DemandModel::bernoulli(l as f64, p).unwrap()),
    ]
}

fn subset_demand(rho: &DemandVector, subset: &[usize]) -> f64 {
    subset.iter().map(|&i| rho.as_slice()[i]).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn flow_and_subset_oracles_agree(a in small_allocation(), model in model(), seed in any::<u64>(), m in prop_oneof![Just(0.5), Just(1.0)]) {
        let rho = model.sample(a.n_objects(), &mut stream(seed, 0));
        let flow = check_flow(&a, &rho, m).unwrap();
        let subsets = check_subsets(&a, &rho, m).unwrap();
        prop_assert_eq!(flow.feasible, subsets.feasible);
        prop_assert!((flow.max_served - subsets.max_served).abs() <= 1e-9 * rho.total().max(1.0));
    }

    #[test]
    fn witnesses_are_valid(a in small_allocation(), model in model(), seed in any::<u64>(), m in 0.3f64..1.5) {
        let rho = model.sample(a.n_objects(), &mut stream(seed, 1));
        let verdict = check_flow(&a, &rho, m).unwrap();
        match verdict.witness {
            Witness::Flow(assignment) => {
                prop_assert!(verdict.feasible);
                let mut load = vec![0.0; a.n_nodes()];
                for (i, parts) in assignment.iter().enumerate() {
                    let served: f64 = parts.iter().map(|&(_, x)| x).sum();
                    prop_assert!((served - rho.as_slice()[i]).abs() <= 1e-9 * rho.total().max(1.0));
                    for &(node, x) in parts {
                        prop_assert!(a.choices(i).contains(&node));
                        load[node] += x;
                    }
                }
                prop_assert!(load.iter().all(|&l| l <= m + 1e-9 * rho.total().max(1.0)));
            }
            Witness::Violation { subset, excess } => {
                prop_assert!(!verdict.feasible);
                let span = a.span(&subset).unwrap() as f64;
                prop_assert!(subset_demand(&rho, &subset) > m * span);
                prop_assert!((excess - (subset_demand(&rho, &subset) - m * span)).abs() < 1e-9);
            }
            Witness::Exhaustive { .. } => prop_assert!(false, "flow check never reports an exhaustive witness"),
        }
    }

    #[test]
    fn feasibility_is_monotone(a in small_allocation(), model in model(), seed in any::<u64>(), m in 0.3f64..1.5, c in 0.1f64..1.0) {
        let rho = model.sample(a.n_objects(), &mut stream(seed, 2));
        if check_flow(&a, &rho, m).unwrap().feasible {
            prop_assert!(check_flow(&a, &rho, m * 1.25).unwrap().feasible);
            prop_assert!(check_flow(&a, &rho.scaled(c), m).unwrap().feasible);
        }
    }

    #[test]
    fn min_threshold_is_the_worst_density(a in small_allocation(), model in model(), seed in any::<u64>()) {
        let rho = model.sample(a.n_objects(), &mut stream(seed, 3));
        let k = a.n_objects();
        let mut worst: f64 = 0.0;
        for mask in 1u32..(1 << k) {
            let subset: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
            worst = worst.max(subset_demand(&rho, &subset) / a.span(&subset).unwrap() as f64);
        }
        let m = min_threshold(&a, &rho).unwrap();
        prop_assert!((m - worst).abs() <= 1e-6 * worst.max(1.0), "{} vs {}", m, worst);
    }
}

#[test]
fn spike_at_exact_capacity_is_feasible() {
    let a = StorageAllocation::build(DesignKind::Cyclic, 9, 3, None).unwrap();
    let mut v = vec![0.0; 9];
    v[0] = 3.0;
    v[3] = 3.0;
    v[6] = 3.0;
    let rho = DemandVector::new(v).unwrap();
    assert!(check_flow(&a, &rho, 1.0).unwrap().feasible);
    assert!(check_subsets(&a, &rho, 1.0).unwrap().feasible);
    assert!(!check_flow(&a, &rho, 1.0 - 1e-6).unwrap().feasible);
}
