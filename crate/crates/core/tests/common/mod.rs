//! Random instances small enough for the exact oracle.

#![allow(dead_code)]

use ima::{CandidateEdge, Graph, NodeId, SeedSet};
use rand::seq::SliceRandom;
use rand::Rng;

pub const GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

pub struct Small {
    pub graph: Graph,
    pub seeds: SeedSet,
    pub pool: Vec<CandidateEdge>,
}

pub struct Shape {
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub max_edges: usize,
    pub max_seeds: usize,
    pub max_pool: usize,
    /// Draw every probability from `{0, 1}` instead of the grid.
    pub deterministic: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Self { min_nodes: 4, max_nodes: 8, max_edges: 12, max_seeds: 2, max_pool: 6, deterministic: false }
    }
}

fn prob<R: Rng>(rng: &mut R, deterministic: bool) -> f64 {
    if deterministic {
        f64::from(rng.gen_range(0..2u8))
    } else {
        *GRID.choose(rng).unwrap()
    }
}

/// Draws until the candidate pool is non-empty.
pub fn random_small<R: Rng>(rng: &mut R, shape: &Shape) -> Small {
    loop {
        let n = rng.gen_range(shape.min_nodes..=shape.max_nodes);
        let mut pairs: Vec<(NodeId, NodeId)> =
            (0..n as NodeId).flat_map(|u| (0..n as NodeId).map(move |v| (u, v))).filter(|(u, v)| u != v).collect();
        pairs.shuffle(rng);
        let m = rng.gen_range(n - 1..=shape.max_edges.min(pairs.len()));
        let edges: Vec<_> = pairs[..m].iter().map(|&(u, v)| (u, v, prob(rng, shape.deterministic))).collect();
        let graph = Graph::from_edges(n, &edges).unwrap();

        let s = rng.gen_range(1..=shape.max_seeds.min(n - 1));
        let mut nodes: Vec<NodeId> = (0..n as NodeId).collect();
        nodes.shuffle(rng);
        let seeds = SeedSet::new(n, nodes[..s].iter().copied()).unwrap();

        let mut eligible: Vec<(NodeId, NodeId)> = seeds
            .ids()
            .iter()
            .flat_map(|&u| (0..n as NodeId).map(move |v| (u, v)))
            .filter(|&(u, v)| !seeds.contains(v) && !graph.has_edge(u, v))
            .collect();
        if eligible.is_empty() {
            continue;
        }
        eligible.shuffle(rng);
        let take = rng.gen_range(1..=shape.max_pool.min(eligible.len()));
        let mut pool: Vec<_> =
            eligible[..take].iter().map(|&(u, v)| CandidateEdge::new(u, v, prob(rng, shape.deterministic))).collect();
        pool.sort_by_key(|c| c.key());
        return Small { graph, seeds, pool };
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
