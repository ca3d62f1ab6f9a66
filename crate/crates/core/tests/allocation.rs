use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use storage_robustness::rng::stream;
use storage_robustness::{DesignKind, SpanMethod, StorageAllocation};

fn choose(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// Counts `t`-subsets sharing each node: sum over nodes of C(load, t).
fn node_count_overlap(a: &StorageAllocation, t: usize) -> u64 {
    a.node_loads().iter().map(|&l| choose(l, t)).sum()
}

fn balanced_designs() -> Vec<StorageAllocation> {
    vec![
        StorageAllocation::build(DesignKind::Clustering, 9, 3, None).unwrap(),
        StorageAllocation::build(DesignKind::Cyclic, 7, 3, None).unwrap(),
        StorageAllocation::build(DesignKind::Cyclic, 12, 4, None).unwrap(),
        StorageAllocation::build(DesignKind::Clustering, 12, 4, None).unwrap(),
        StorageAllocation::build(DesignKind::Block, 7, 3, None).unwrap(),
        StorageAllocation::build(DesignKind::Block, 13, 4, None).unwrap(),
        StorageAllocation::build(DesignKind::Random, 11, 3, Some(2)).unwrap(),
    ]
}

#[test]
fn block_design_matches_the_textbook_fano_plane() {
    // node contents with objects a..g as 0..6
    let reference: BTreeSet<BTreeSet<usize>> = [[0, 1, 2], [0, 5, 6], [0, 3, 4], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]]
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect();
    let block = StorageAllocation::build(DesignKind::Block, 7, 3, None).unwrap();
    let ours: Vec<Vec<usize>> = (0..7).map(|j| block.node_contents(j).to_vec()).collect();

    let mut perm: Vec<usize> = (0..7).collect();
    let mut found = false;
    heap_permutations(&mut perm, 7, &mut |p| {
        let mapped: BTreeSet<BTreeSet<usize>> = ours.iter().map(|node| node.iter().map(|&o| p[o]).collect()).collect();
        if mapped == reference {
            found = true;
        }
    });
    assert!(found, "block design is not isomorphic to the reference layout");
}

fn heap_permutations(v: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == 1 {
        visit(v);
        return;
    }
    for i in 0..k {
        heap_permutations(v, k - 1, visit);
        if k % 2 == 0 {
            v.swap(i, k - 1);
        } else {
            v.swap(0, k - 1);
        }
    }
}

#[test]
fn cumulative_overlap_identity_for_balanced_designs() {
    for a in balanced_designs() {
        assert!(a.is_balanced() && a.is_regular());
        let (n, d) = (a.n_nodes(), a.d());
        for t in 2..=d + 1 {
            assert_eq!(a.cum_overlap(t).unwrap(), n as u64 * choose(d, t), "{:?} t={t}", a.kind());
        }
    }
}

#[test]
fn balanced_allocations_minimize_pairwise_overlap() {
    // every multiset of n two-node service choices on n nodes
    for n in 3..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let floor = n as u64 * choose(2, 2);
        let mut minimum = u64::MAX;
        let mut idx = vec![0usize; n];
        loop {
            let mut loads = vec![0usize; n];
            for &p in &idx {
                loads[pairs[p].0] += 1;
                loads[pairs[p].1] += 1;
            }
            let overlap: u64 = loads.iter().map(|&l| choose(l, 2)).sum();
            minimum = minimum.min(overlap);
            assert!(overlap >= floor);
            if loads.iter().all(|&l| l == 2) {
                assert_eq!(overlap, floor);
            }
            // next nondecreasing index sequence
            let mut pos = n;
            while pos > 0 && idx[pos - 1] == pairs.len() - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            let v = idx[pos - 1];
            for x in &mut idx[pos..] {
                *x = v;
            }
        }
        assert_eq!(minimum, floor);
    }
}

#[test]
fn moving_a_copy_changes_overlap_by_the_load_difference() {
    let mut rng = stream(99, 0);
    let mut checked = 0;
    let mut seed = 0;
    while checked < 100 {
        seed += 1;
        let a = StorageAllocation::build(DesignKind::RandomSubsets, 7, 3, Some(seed)).unwrap();
        let object = rng.random_range(0..7);
        let from = a.choices(object)[rng.random_range(0..3)];
        let to = rng.random_range(0..7);
        if a.choices(object).contains(&to) {
            continue;
        }
        let moved = a.move_object(object, from, to).unwrap();
        let (u, v) = (a.node_loads()[from], a.node_loads()[to]);
        for t in 2..=3 {
            let before = a.cum_overlap(t).unwrap() as i64;
            let after = moved.cum_overlap(t).unwrap() as i64;
            let delta = choose(u - 1, t - 1) as i64 - choose(v, t - 1) as i64;
            assert_eq!(after, before - delta, "seed={seed} t={t} u={u} v={v}");
        }
        checked += 1;
    }
}

#[test]
fn cyclic_windows_have_the_expected_span() {
    for (n, d) in [(7, 3), (12, 4), (10, 1), (9, 5)] {
        let a = StorageAllocation::build(DesignKind::Cyclic, n, d, None).unwrap();
        for start in 0..n {
            for x in 1..=n {
                let window: Vec<usize> = (0..x).map(|j| (start + j) % n).collect();
                let span = a.span(&window).unwrap();
                assert_eq!(span, (x + d - 1).min(n));
                assert!(x <= span && span <= x + 2 * (d - 1));
            }
        }
        assert!(a.is_r_gap(d - 1));
        if d >= 2 && n > 2 * d {
            assert!(!a.is_r_gap(d - 2));
        }
    }
}

#[test]
fn random_design_places_one_replica_per_node_per_round() {
    for (n, d, seed) in [(21, 3, 1), (50, 10, 2), (5, 5, 3), (30, 2, 4)] {
        let a = StorageAllocation::build(DesignKind::Random, n, d, Some(seed)).unwrap();
        assert!(a.is_regular() && a.is_balanced());
        assert!(a.node_loads().iter().all(|&l| l == d));
        assert!((0..n).all(|i| a.choices(i).contains(&i)));
    }
}

#[test]
fn sampled_span_distribution_tracks_exact() {
    let a = StorageAllocation::build(DesignKind::RandomSubsets, 15, 3, Some(8)).unwrap();
    let exact = a.span_t_distribution(3, SpanMethod::Exact).unwrap();
    let sampled = a.span_t_distribution(3, SpanMethod::Sampled { samples: 200_000, seed: 5 }).unwrap();
    for (span, p) in exact {
        let q = sampled.get(&span).copied().unwrap_or(0.0);
        assert!((p - q).abs() < 0.01, "span {span}: {p} vs {q}");
    }
}

fn design_strategy() -> impl Strategy<Value = StorageAllocation> {
    (0usize..7, 2usize..5, 0usize..4, any::<u64>()).prop_filter_map("constructible", |(which, d, extra, seed)| {
        let kind = match which {
            0 => DesignKind::Clustering,
            1 => DesignKind::Cyclic,
            2 => DesignKind::Block,
            3 => DesignKind::Random,
            4 => DesignKind::RandomSubsets,
            5 => DesignKind::RandomBlockApprox,
            _ => DesignKind::ConstrainedRandom { v_max: 2 },
        };
        let n = match kind {
            DesignKind::Block => d * d - d + 1,
            DesignKind::Clustering => d * (extra + 2),
            _ => d + 3 + 2 * extra,
        };
        StorageAllocation::build(kind, n, d, Some(seed)).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn built_designs_are_regular_and_reproducible(a in design_strategy()) {
        prop_assert!(a.is_regular());
        prop_assert_eq!(a.node_loads().iter().sum::<usize>(), a.n_objects() * a.d());
        let again = StorageAllocation::build(a.kind().unwrap(), a.n_nodes(), a.d(), a.seed()).unwrap();
        prop_assert_eq!(&again, &a);
        if matches!(a.kind(), Some(DesignKind::Clustering | DesignKind::Cyclic | DesignKind::Block | DesignKind::Random)) {
            prop_assert!(a.node_loads().iter().all(|&l| l == a.d()));
        }
    }

    #[test]
    fn cumulative_overlap_counts_node_sharing(a in design_strategy(), t in 2usize..4) {
        prop_assert_eq!(a.cum_overlap(t).unwrap(), node_count_overlap(&a, t));
    }

    #[test]
    fn cumulative_span_is_inclusion_exclusion_of_overlaps(a in design_strategy(), t in 1usize..4) {
        let k = a.n_objects();
        let mut acc: i128 = 0;
        for u in 1..=t {
            let overlap = if u == 1 { (k * a.d()) as i128 } else { a.cum_overlap(u).unwrap() as i128 };
            let sign = if u % 2 == 1 { 1 } else { -1 };
            acc += sign * choose(k - u, t - u) as i128 * overlap;
        }
        prop_assert_eq!(a.cum_span(t).unwrap() as i128, acc);
    }

    #[test]
    fn text_format_round_trips(a in design_strategy()) {
        let text = a.to_string();
        let back: StorageAllocation = text.parse().unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn overlap_profile_is_a_distribution(a in design_strategy()) {
        let p = a.overlap_profile();
        if p.pairs_overlapping > 0 {
            prop_assert!((p.by_size.values().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        prop_assert!(p.by_size.keys().all(|&s| s >= 1 && s <= a.d()));
    }
}
