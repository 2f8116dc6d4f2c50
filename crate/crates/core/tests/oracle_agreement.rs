use std::collections::BTreeSet;

use ged_core::community::{cpm_extract, enumerate_k_cliques, louvain_extract, modularity, ModularityState};
use ged_core::importance::{
    betweenness_centrality, closeness_centrality, commitment_from_weights, degree_centrality, social_position,
    ImportanceVector, SpConfig,
};
use ged_core::{FrameGraph, NodeId};
use ged_testkit::gen::{frame_from_arcs, random_arcs, random_arcs_with_out_edges, rng};
use ged_testkit::oracle::{self, Arc};
use proptest::prelude::*;
use rand::Rng;

fn graph(seed: u64, max_n: usize, weighted: bool) -> (usize, Vec<Arc>, FrameGraph) {
    let mut r = rng(seed);
    let n = r.gen_range(3..=max_n);
    let p = r.gen_range(0.1..0.7);
    let arcs = random_arcs(&mut r, n, p, weighted);
    let frame = frame_from_arcs(n, &arcs, 1);
    (n, arcs, frame)
}

fn by_index(v: &ImportanceVector, n: usize) -> Vec<f64> {
    (0..n).map(|i| v.score(NodeId(i as u64 + 1)).unwrap()).collect()
}

fn to_oracle(sets: impl IntoIterator<Item = BTreeSet<NodeId>>) -> BTreeSet<BTreeSet<usize>> {
    sets.into_iter().map(|s| s.into_iter().map(|n| n.0 as usize - 1).collect()).collect()
}

fn tight() -> SpConfig {
    SpConfig { tolerance: 1e-13, max_iterations: 100_000, ..SpConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn social_position_matches_linear_solve(seed in any::<u64>(), eps in 0.1f64..0.9) {
        let (n, arcs, frame) = graph(seed, 10, true);
        let cfg = SpConfig { epsilon: eps, ..tight() };
        let sp = social_position(&frame, &commitment_from_weights(&frame), &cfg).unwrap();
        prop_assert!(sp.converged);
        let expected = oracle::social_position(n, &arcs, eps);
        for (got, want) in by_index(&sp, n).iter().zip(&expected) {
            prop_assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn social_position_sums_to_node_count(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=10);
        let arcs = random_arcs_with_out_edges(&mut r, n, 0.3);
        let frame = frame_from_arcs(n, &arcs, 1);
        let sp = social_position(&frame, &commitment_from_weights(&frame), &tight()).unwrap();
        prop_assert!((sp.total() - n as f64).abs() < 1e-6);
    }

    #[test]
    fn social_position_ranks_ignore_weight_scale(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let (n, arcs, frame) = graph(seed, 10, true);
        let scaled: Vec<Arc> = arcs.iter().map(|&(a, b, w)| (a, b, w * scale)).collect();
        let scaled_frame = frame_from_arcs(n, &scaled, 1);
        let cfg = SpConfig::default();
        let a = social_position(&frame, &commitment_from_weights(&frame), &cfg).unwrap();
        let b = social_position(&scaled_frame, &commitment_from_weights(&scaled_frame), &cfg).unwrap();
        prop_assert_eq!(a.ranks(), b.ranks());
    }

    #[test]
    fn centralities_match_brute_force(seed in any::<u64>()) {
        let (n, arcs, frame) = graph(seed, 10, false);
        prop_assert_eq!(by_index(&degree_centrality(&frame).unwrap(), n), oracle::degree_centrality(n, &arcs));
        prop_assert_eq!(by_index(&closeness_centrality(&frame).unwrap(), n), oracle::closeness_centrality(n, &arcs));
        let cb = by_index(&betweenness_centrality(&frame).unwrap(), n);
        for (got, want) in cb.iter().zip(oracle::betweenness_centrality(n, &arcs)) {
            prop_assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn modularity_matches_oracle(seed in any::<u64>(), labels in prop::collection::vec(0usize..4, 12)) {
        let (n, arcs, frame) = graph(seed, 12, true);
        prop_assume!(!arcs.is_empty());
        let partition = partition_from_labels(&labels[..n]);
        let q = modularity(&frame, &to_node_sets(&partition)).unwrap();
        prop_assert!((q - oracle::modularity(n, &arcs, &partition)).abs() < 1e-12);
    }

    #[test]
    fn gain_equals_modularity_difference(
        seed in any::<u64>(),
        labels in prop::collection::vec(0usize..4, 12),
        pick in any::<prop::sample::Index>(),
    ) {
        let (n, arcs, frame) = graph(seed, 12, true);
        prop_assume!(!arcs.is_empty());
        let partition = partition_from_labels(&labels[..n]);
        let node = pick.index(n);
        let mut state = ModularityState::from_partition(&frame, &to_node_sets(&partition)).unwrap();
        state.isolate(NodeId(node as u64 + 1)).unwrap();

        let without: Vec<BTreeSet<usize>> = partition
            .iter()
            .map(|c| c.iter().copied().filter(|&v| v != node).collect::<BTreeSet<_>>())
            .filter(|c| !c.is_empty())
            .chain(std::iter::once(BTreeSet::from([node])))
            .collect();
        let q_before = oracle::modularity(n, &arcs, &without);
        prop_assert!((state.modularity() - q_before).abs() < 1e-12);

        for (c, members) in partition.iter().enumerate() {
            let target: BTreeSet<usize> = members.iter().copied().filter(|&v| v != node).collect();
            if target.is_empty() {
                continue;
            }
            let gain = state.gain(NodeId(node as u64 + 1), c).unwrap();
            let after: Vec<BTreeSet<usize>> = without
                .iter()
                .filter(|s| **s != BTreeSet::from([node]))
                .map(|s| if *s == target { s.iter().copied().chain([node]).collect() } else { s.clone() })
                .collect();
            let diff = oracle::modularity(n, &arcs, &after) - q_before;
            prop_assert!((gain - diff).abs() < 1e-12, "gain {gain} vs {diff}");
        }
    }

    #[test]
    fn louvain_levels_nest_and_improve(seed in any::<u64>()) {
        let (n, arcs, frame) = graph(seed, 12, true);
        prop_assume!(!arcs.is_empty());
        let hierarchy = louvain_extract(&frame).unwrap();
        let mut previous: Option<Vec<BTreeSet<usize>>> = None;
        let mut previous_q = oracle::modularity(n, &arcs, &[]);
        for level in &hierarchy.levels {
            let sets: Vec<BTreeSet<usize>> =
                level.iter().map(|g| g.members().iter().map(|m| m.0 as usize - 1).collect()).collect();
            let covered: usize = sets.iter().map(BTreeSet::len).sum();
            prop_assert_eq!(covered, n);
            if let Some(finer) = &previous {
                for f in finer {
                    prop_assert!(sets.iter().any(|c| f.is_subset(c)));
                }
            }
            let q = oracle::modularity(n, &arcs, &sets);
            prop_assert!(q >= previous_q - 1e-12);
            previous_q = q;
            previous = Some(sets);
        }
    }

    #[test]
    fn cpm_matches_oracle(seed in any::<u64>(), k in 3usize..=5) {
        let mut r = rng(seed);
        let n = r.gen_range(4..=20);
        let p = r.gen_range(0.1..0.5);
        let arcs = random_arcs(&mut r, n, p, false);
        let frame = frame_from_arcs(n, &arcs, 1);
        let got = to_oracle(cpm_extract(&frame, k).unwrap().into_iter().map(|g| g.members().clone()));
        prop_assert_eq!(got, oracle::cpm(n, &arcs, k));

        let cliques = to_oracle(enumerate_k_cliques(&frame, k).unwrap().cliques);
        let expected: BTreeSet<BTreeSet<usize>> =
            oracle::k_cliques(n, &arcs, k).into_iter().map(|c| c.into_iter().collect()).collect();
        prop_assert_eq!(cliques, expected);
    }
}

fn partition_from_labels(labels: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut blocks: std::collections::BTreeMap<usize, BTreeSet<usize>> = Default::default();
    for (v, &l) in labels.iter().enumerate() {
        blocks.entry(l).or_default().insert(v);
    }
    blocks.into_values().collect()
}

fn to_node_sets(partition: &[BTreeSet<usize>]) -> Vec<BTreeSet<NodeId>> {
    partition.iter().map(|s| s.iter().map(|&v| NodeId(v as u64 + 1)).collect()).collect()
}

#[test]
fn louvain_finds_two_triangle_optimum() {
    let arcs = [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (3, 4, 1.0), (4, 5, 1.0), (5, 3, 1.0)];
    let frame = frame_from_arcs(6, &arcs, 1);
    let top = louvain_extract(&frame).unwrap();
    let sets: Vec<BTreeSet<NodeId>> = top.top().unwrap().iter().map(|g| g.members().clone()).collect();
    let q = modularity(&frame, &sets).unwrap();
    assert!((q - 0.5).abs() < 1e-12);
    assert!((q - oracle::best_modularity(6, &arcs)).abs() < 1e-12);
}
