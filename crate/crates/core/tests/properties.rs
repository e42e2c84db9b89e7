mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_small, Shape, Small};
use ima::baselines::{ais_no_prob, ais_no_update, mc_greedy, outdeg_select, prob_select, rand_select, sinf_select};
use ima::diffusion::{exact_spread, simulate_ic};
use ima::graph::{generate_candidates, load_edge_list, write_edge_list, CandidateMode, MissingProbability};
use ima::rr::{sample_fixed, sample_rr_set, SamplingConfig};
use ima::solver::{select_edges, soft_update, SolverConfig};
use ima::{CandidateEdge, Graph, SeedSet};

fn small(seed: u64) -> Small {
    random_small(&mut ChaCha8Rng::seed_from_u64(seed), &Shape::default())
}

fn wide(seed: u64) -> Small {
    let shape = Shape { min_nodes: 6, max_nodes: 30, max_edges: 80, max_seeds: 4, max_pool: 25, deterministic: false };
    random_small(&mut ChaCha8Rng::seed_from_u64(seed), &shape)
}

fn config(seed: u64) -> SamplingConfig {
    SamplingConfig { master_seed: seed, ..SamplingConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_round_trip(seed in any::<u64>(), offset in 0u64..1_000_000) {
        let Small { graph, .. } = wide(seed);
        let labels: Vec<u64> = (0..graph.node_count() as u64).map(|v| v * 7 + offset).collect();
        let edges: Vec<_> = graph.edges().collect();
        let labelled = Graph::with_labels(labels, &edges).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&labelled, &mut buf).unwrap();
        let back = load_edge_list(buf.as_slice(), true).unwrap().graph;
        let key = |g: &Graph| {
            let mut e: Vec<_> = g.edges().map(|(u, v, p)| (g.label(u), g.label(v), p.to_bits())).collect();
            e.sort_unstable();
            e
        };
        prop_assert_eq!(key(&labelled), key(&back));
    }

    #[test]
    fn weighted_cascade_sums_to_one(seed in any::<u64>()) {
        let g = wide(seed).graph.assign_wic_probabilities();
        for v in 0..g.node_count() as u32 {
            if g.in_degree(v) > 0 {
                let sum: f64 = g.in_edges(v).map(|e| e.1).sum();
                prop_assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn candidate_counts(seed in any::<u64>(), limit in 1usize..40) {
        let Small { graph, seeds, .. } = wide(seed);
        let eligible: usize = seeds
            .ids()
            .iter()
            .map(|&u| (0..graph.node_count() as u32).filter(|&v| !seeds.contains(v) && !graph.has_edge(u, v)).count())
            .sum();
        let all = generate_candidates(&graph, &seeds, CandidateMode::All, MissingProbability::GlobalMean, seed).unwrap();
        prop_assert_eq!(all.len(), eligible);
        let some = generate_candidates(&graph, &seeds, CandidateMode::Sample(limit), MissingProbability::GlobalMean, seed).unwrap();
        prop_assert_eq!(some.len(), limit.min(eligible));
        for list in [&all, &some] {
            prop_assert!(list.windows(2).all(|w| w[0].key() < w[1].key()));
            for c in list.iter() {
                prop_assert!(c.validate(&graph, &seeds).is_ok());
            }
        }
    }

    #[test]
    fn exact_spread_monotone_submodular(seed in any::<u64>()) {
        let Small { graph, seeds, pool } = small(seed);
        let e = *pool.last().unwrap();
        let rest = &pool[..pool.len() - 1];
        let a = &rest[..rest.len() / 2];
        let b = rest;
        let with = |set: &[CandidateEdge]| {
            let mut v = set.to_vec();
            v.push(e);
            exact_spread(&graph, &v, &seeds).unwrap()
        };
        let sa = exact_spread(&graph, a, &seeds).unwrap();
        let sb = exact_spread(&graph, b, &seeds).unwrap();
        prop_assert!(sb >= sa - 1e-9);
        prop_assert!(with(a) >= sa - 1e-9);
        prop_assert!(with(a) - sa >= with(b) - sb - 1e-9);
        prop_assert!(sa >= seeds.len() as f64 - 1e-9 && sa <= graph.node_count() as f64 + 1e-9);
    }

    #[test]
    fn cascade_size_bounds(seed in any::<u64>()) {
        let Small { graph, seeds, pool } = wide(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let size = simulate_ic(&graph, &pool, &seeds, &mut rng);
            prop_assert!(size >= seeds.len() && size <= graph.node_count());
        }
    }

    #[test]
    fn rr_sets_are_well_formed(seed in any::<u64>(), truncate in any::<bool>()) {
        let Small { graph, seeds, .. } = wide(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let set = sample_rr_set(&graph, &seeds, truncate, &mut rng);
            prop_assert!(set.members.contains(&set.root));
            let distinct: HashSet<_> = set.members.iter().collect();
            prop_assert_eq!(distinct.len(), set.members.len());
            prop_assert_eq!(set.truncated, truncate && set.members.iter().any(|&v| seeds.contains(v)));
        }
    }

    #[test]
    fn soft_updates_keep_counters_consistent(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let Small { graph, seeds, pool } = wide(seed);
        let mut c = sample_fixed(&graph, &seeds, 2_000, &config(seed)).unwrap();
        let mut coverage = c.coverage_count();
        for (step, e) in pool.iter().enumerate() {
            let before: Vec<u64> = c.marginals().to_vec();
            let edge = CandidateEdge::new(e.u, e.v, p);
            let flipped = soft_update(&mut c, &edge, step as u64, seed);
            prop_assert_eq!(c.coverage_count(), coverage + flipped);
            coverage = c.coverage_count();
            prop_assert!(c.marginals().iter().zip(&before).all(|(a, b)| a <= b));
        }
        prop_assert!(c.audit(&seeds).is_ok());
    }

    #[test]
    fn ais_selection_invariants(seed in any::<u64>(), k in 1usize..8) {
        let Small { graph, seeds, pool } = wide(seed);
        let mut c = sample_fixed(&graph, &seeds, 3_000, &config(seed)).unwrap();
        let frozen = c.clone();
        let sel = select_edges(&mut c, &pool, k, seed);
        prop_assert_eq!(sel.edges.len(), k.min(pool.len()));
        let keys: HashSet<_> = sel.edges.iter().map(|e| e.key()).collect();
        prop_assert_eq!(keys.len(), sel.edges.len());
        prop_assert!(sel.scores.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(c.audit(&seeds).is_ok());
        prop_assert_eq!(ais_no_update(&frozen, &pool, 1).edges[0], sel.edges[0]);
    }

    #[test]
    fn baselines_return_valid_subsets(seed in any::<u64>(), k in 0usize..8) {
        let Small { graph, seeds, pool } = wide(seed);
        let c = sample_fixed(&graph, &seeds, 1_000, &config(seed)).unwrap();
        let picks = [
            rand_select(&pool, k, seed).edges,
            outdeg_select(&graph, &pool, k).edges,
            prob_select(&pool, k).edges,
            sinf_select(&c, &pool, k).edges,
            ais_no_prob(&mut c.clone(), &pool, k, seed).edges,
            ais_no_update(&c, &pool, k).edges,
            mc_greedy(&graph, &seeds, &pool, k, 20, seed).unwrap().edges,
        ];
        for edges in &picks {
            prop_assert!(edges.len() <= k);
            let keys: HashSet<_> = edges.iter().map(|e| e.key()).collect();
            prop_assert_eq!(keys.len(), edges.len());
            prop_assert!(edges.iter().all(|e| pool.contains(e)));
        }
        prop_assert_eq!(&picks[0], &rand_select(&pool, k, seed).edges);
        prop_assert_eq!(&picks[6], &mc_greedy(&graph, &seeds, &pool, k, 20, seed).unwrap().edges);
    }

    #[test]
    fn threshold_scales_inversely_with_beta(eps in 0.05f64..0.95, k in 1usize..100, beta in 1.0f64..16.0) {
        let base = SolverConfig { epsilon: eps, k, ..SolverConfig::default() };
        let scaled = SolverConfig { beta, ..base };
        prop_assert!((base.threshold(10) / scaled.threshold(10) - beta).abs() < 1e-9 * beta);
    }
}

#[test]
fn seed_set_everything_is_full_spread() {
    let Small { graph, pool, .. } = small(3);
    let all = SeedSet::all(graph.node_count());
    assert!((exact_spread(&graph, &[], &all).unwrap() - graph.node_count() as f64).abs() < 1e-9);
    let c = sample_fixed(&graph, &all, 500, &config(1)).unwrap();
    assert_eq!(c.seed_spread().unwrap(), graph.node_count() as f64);
    assert!(!pool.is_empty());
}
