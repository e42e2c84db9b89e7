//! Synthetic instances for tests, examples and quick experiments.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{
    generate_candidates, write_candidates, write_edge_list, write_seeds, CandidateEdge, CandidateMode, Graph, NodeId,
    SeedSet,
};
use crate::stream::{self, Domain};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InstanceKind {
    /// `0 -> 1 -> ... -> n-1`, seed `0`.
    Path { n: usize },
    /// Center `0` pointing at `n - 1` leaves, seed at leaf `1`.
    Star { n: usize },
    /// Each ordered pair is an edge with probability `p_edge`; the top tenth
    /// of nodes by out-degree seed the cascade.
    ErdosRenyi { n: usize, p_edge: f64 },
    /// Two seeds inside a dense cluster whose hub has the largest out-degree,
    /// and a second cluster of bridge nodes reachable only through candidates.
    TwoCluster { bridges: usize, hub_degree: usize },
}

impl InstanceKind {
    /// The default bridge instance: 3 bridges, hub out-degree 6.
    pub fn two_cluster() -> Self {
        InstanceKind::TwoCluster { bridges: 3, hub_degree: 6 }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub seeds: SeedSet,
    pub candidates: Vec<CandidateEdge>,
}

/// Paths written by [`Instance::write_to`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFiles {
    pub graph: PathBuf,
    pub seeds: PathBuf,
    pub candidates: PathBuf,
}

impl Instance {
    /// Writes `graph.txt`, `seeds.txt` and `candidates.txt` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<InstanceFiles> {
        std::fs::create_dir_all(dir)?;
        let files = InstanceFiles {
            graph: dir.join("graph.txt"),
            seeds: dir.join("seeds.txt"),
            candidates: dir.join("candidates.txt"),
        };
        write_edge_list(&self.graph, BufWriter::new(File::create(&files.graph)?))?;
        write_seeds(&self.graph, &self.seeds, BufWriter::new(File::create(&files.seeds)?))?;
        write_candidates(&self.graph, &self.candidates, BufWriter::new(File::create(&files.candidates)?))?;
        Ok(files)
    }
}

fn with_all_candidates(graph: Graph, seeds: SeedSet, seed: u64) -> Result<Instance> {
    let candidates = generate_candidates(&graph, &seeds, CandidateMode::All, Default::default(), seed)?;
    Ok(Instance { graph, seeds, candidates })
}

fn wic(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Graph> {
    let edges: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 0.0)).collect();
    Ok(Graph::from_edges(n, &edges)?.assign_wic_probabilities())
}

/// Generates an instance. `seed` only affects random kinds.
pub fn gen_instance(kind: &InstanceKind, seed: u64) -> Result<Instance> {
    match *kind {
        InstanceKind::Path { n } => {
            if n < 2 {
                return Err(Error::argument("path needs n >= 2"));
            }
            let edges: Vec<_> = (1..n as NodeId).map(|v| (v - 1, v)).collect();
            with_all_candidates(wic(n, &edges)?, SeedSet::new(n, [0])?, seed)
        }
        InstanceKind::Star { n } => {
            if n < 3 {
                return Err(Error::argument("star needs n >= 3"));
            }
            let edges: Vec<_> = (1..n as NodeId).map(|v| (0, v)).collect();
            with_all_candidates(wic(n, &edges)?, SeedSet::new(n, [1])?, seed)
        }
        InstanceKind::ErdosRenyi { n, p_edge } => {
            if n < 2 || !(0.0..=1.0).contains(&p_edge) {
                return Err(Error::argument(format!("erdos-renyi needs n >= 2 and p in [0, 1], got {n}, {p_edge}")));
            }
            let mut rng = stream::rng(seed, Domain::Instance, 0);
            let mut edges = Vec::new();
            for u in 0..n as NodeId {
                for v in 0..n as NodeId {
                    if u != v && rng.gen::<f64>() < p_edge {
                        edges.push((u, v));
                    }
                }
            }
            let graph = wic(n, &edges)?;
            let seeds = top_out_degree(&graph, n.div_ceil(10))?;
            with_all_candidates(graph, seeds, seed)
        }
        InstanceKind::TwoCluster { bridges, hub_degree } => two_cluster(bridges, hub_degree),
    }
}

/// The `count` nodes of largest out-degree, ties to smaller id.
pub fn top_out_degree(graph: &Graph, count: usize) -> Result<SeedSet> {
    let mut nodes: Vec<NodeId> = (0..graph.node_count() as NodeId).collect();
    nodes.sort_by_key(|&v| (std::cmp::Reverse(graph.out_degree(v)), v));
    SeedSet::new(graph.node_count(), nodes.into_iter().take(count))
}

/// `count` distinct nodes drawn uniformly.
pub fn random_seeds(graph: &Graph, count: usize, seed: u64) -> Result<SeedSet> {
    let n = graph.node_count();
    if count > n {
        return Err(Error::argument(format!("cannot draw {count} seeds from {n} nodes")));
    }
    let mut rng = stream::rng(seed, Domain::Seeds, 0);
    let picked = rand::seq::index::sample(&mut rng, n, count);
    SeedSet::new(n, picked.into_iter().map(|v| v as NodeId))
}

const BRIDGE_P_FIRST: [f64; 3] = [0.6, 0.5, 0.65];
const BRIDGE_P_SECOND: [f64; 3] = [0.4, 0.8, 0.3];

/// Layout (ids in order):
///
/// * `0`, `1`: seeds; `2`: hub; `3 ..`: `hub_degree` cluster members.
///   `0 -> hub`, `1 -> c_1` and `hub -> c_i` are certain, so the whole first
///   cluster is already active.
/// * per bridge `i` (1-based): node `b_i` followed by `bridges - i + 2`
///   leaves, each `b_i -> leaf` with `p = 0.5`, plus `b_1 -> b_2` with `p = 0.5`.
///
/// Candidates: `(1, hub)` with `p = 0.9` (largest out-degree, zero gain),
/// `(0, c_1)` with `0.95` (highest probability, zero gain), `(0, first leaf)`
/// with `0.9`, and two edges into every bridge with probabilities cycling
/// through `BRIDGE_P_FIRST` / `BRIDGE_P_SECOND`.
fn two_cluster(bridges: usize, hub_degree: usize) -> Result<Instance> {
    if bridges == 0 || hub_degree == 0 {
        return Err(Error::argument("two-cluster needs at least one bridge and hub degree >= 1"));
    }
    let hub: NodeId = 2;
    let members: Vec<NodeId> = (3..3 + hub_degree as NodeId).collect();
    let mut next = 3 + hub_degree as NodeId;
    let mut edges = vec![(0, hub, 1.0), (1, members[0], 1.0)];
    edges.extend(members.iter().map(|&c| (hub, c, 1.0)));

    let mut bridge_nodes = Vec::with_capacity(bridges);
    let mut first_leaf = None;
    for i in 1..=bridges {
        let b = next;
        next += 1;
        bridge_nodes.push(b);
        for _ in 0..bridges - i + 2 {
            edges.push((b, next, 0.5));
            first_leaf.get_or_insert(next);
            next += 1;
        }
    }
    if bridges >= 2 {
        edges.push((bridge_nodes[0], bridge_nodes[1], 0.5));
    }
    let n = next as usize;
    let graph = Graph::from_edges(n, &edges)?;
    let seeds = SeedSet::new(n, [0, 1])?;

    let mut candidates = vec![
        CandidateEdge::new(1, hub, 0.9),
        CandidateEdge::new(0, members[0], 0.95),
        CandidateEdge::new(0, first_leaf.expect("at least one leaf"), 0.9),
    ];
    for (i, &b) in bridge_nodes.iter().enumerate() {
        candidates.push(CandidateEdge::new(0, b, BRIDGE_P_FIRST[i % 3]));
        candidates.push(CandidateEdge::new(1, b, BRIDGE_P_SECOND[i % 3]));
    }
    candidates.sort_by_key(|c| c.key());
    Ok(Instance { graph, seeds, candidates })
}
