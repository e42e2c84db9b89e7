//! Comparison methods: simple heuristics, two ablations of AIS, and
//! Monte-Carlo greedy.

mod mc_greedy;

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CandidateEdge, Graph, NodeId};
use crate::rr::RrCollection;
use crate::solver::soft_update;
use crate::stream::{self, Domain};

pub use mc_greedy::{mc_greedy, theoretical_mc_rounds, WorldSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineKind {
    /// Uniform random `k`-subset.
    Rand,
    /// Highest out-degree of the target node.
    OutDeg,
    /// Highest candidate probability.
    Prob,
    /// Top-`k` nodes by initial marginal coverage, one edge each.
    Sinf,
    /// AIS scoring by `Δ(v)` alone, with soft updates.
    AisNoProb,
    /// AIS scoring `p · Δ(v)` without updates.
    AisNoUpdate,
    /// Greedy on Monte-Carlo estimates over shared live-edge worlds.
    McGreedy,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 7] = [
        BaselineKind::Rand,
        BaselineKind::OutDeg,
        BaselineKind::Prob,
        BaselineKind::Sinf,
        BaselineKind::AisNoProb,
        BaselineKind::AisNoUpdate,
        BaselineKind::McGreedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Rand => "rand",
            BaselineKind::OutDeg => "outdeg",
            BaselineKind::Prob => "prob",
            BaselineKind::Sinf => "sinf",
            BaselineKind::AisNoProb => "ais-no-prob",
            BaselineKind::AisNoUpdate => "ais-no-update",
            BaselineKind::McGreedy => "mc-greedy",
        }
    }

    /// Whether the method reads the RR collection sampled for AIS.
    pub fn needs_collection(self) -> bool {
        matches!(self, BaselineKind::Sinf | BaselineKind::AisNoProb | BaselineKind::AisNoUpdate)
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace(['_', '\\'], "-");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::argument(format!("unknown baseline {s:?}")))
    }
}

/// Edges picked by a baseline.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BaselineSelection {
    pub edges: Vec<CandidateEdge>,
    /// Fewer than `k` edges (or target nodes) were available.
    pub short: bool,
}

impl BaselineSelection {
    fn new(edges: Vec<CandidateEdge>, k: usize) -> Self {
        let short = edges.len() < k;
        Self { edges, short }
    }
}

/// Uniform `k`-subset by a partial Fisher–Yates shuffle.
pub fn rand_select(candidates: &[CandidateEdge], k: usize, master_seed: u64) -> BaselineSelection {
    let mut pool = candidates.to_vec();
    let take = k.min(pool.len());
    let mut rng = stream::rng(master_seed, Domain::Baseline, 0);
    let (picked, _) = pool.partial_shuffle(&mut rng, take);
    BaselineSelection::new(picked.to_vec(), k)
}

/// Stable rank by `key` descending, then `(u, v)` ascending; first `k`.
fn top_k_by<K: Ord>(candidates: &[CandidateEdge], k: usize, key: impl Fn(&CandidateEdge) -> K) -> BaselineSelection {
    let mut order: Vec<&CandidateEdge> = candidates.iter().collect();
    order.sort_by(|a, b| key(b).cmp(&key(a)).then(a.key().cmp(&b.key())));
    BaselineSelection::new(order.into_iter().take(k).copied().collect(), k)
}

pub fn outdeg_select(graph: &Graph, candidates: &[CandidateEdge], k: usize) -> BaselineSelection {
    top_k_by(candidates, k, |c| graph.out_degree(c.v))
}

pub fn prob_select(candidates: &[CandidateEdge], k: usize) -> BaselineSelection {
    top_k_by(candidates, k, |c| ordered(c.p))
}

fn ordered(x: f64) -> u64 {
    // order-preserving map for non-negative finite floats
    x.to_bits()
}

/// Highest-probability candidate into each target node, ties to smaller `u`.
fn best_edge_per_target(candidates: &[CandidateEdge], n: usize) -> Vec<Option<CandidateEdge>> {
    let mut best: Vec<Option<CandidateEdge>> = vec![None; n];
    for c in candidates {
        let slot = &mut best[c.v as usize];
        match slot {
            Some(b) if b.p > c.p || (b.p == c.p && b.u <= c.u) => {}
            _ => *slot = Some(*c),
        }
    }
    best
}

/// Ranks distinct targets by `Δ(v)` (ties to smaller id) and takes the best edge into each of the top `k`.
pub fn sinf_select(collection: &RrCollection, candidates: &[CandidateEdge], k: usize) -> BaselineSelection {
    let best = best_edge_per_target(candidates, collection.node_count());
    let mut targets: Vec<NodeId> = (0..best.len() as NodeId).filter(|&v| best[v as usize].is_some()).collect();
    targets.sort_by_key(|&v| (Reverse(collection.marginal(v)), v));
    let edges = targets.into_iter().take(k).filter_map(|v| best[v as usize]).collect();
    BaselineSelection::new(edges, k)
}

/// Smaller is better: larger `Δ(v)`, smaller `v`, larger `p`, smaller `u`.
type NoProbRank = (Reverse<u64>, NodeId, Reverse<u64>, NodeId);

/// Each round takes the target with the largest current `Δ(v)`, then the
/// highest-probability remaining edge into it, and soft-updates with its true `p`.
pub fn ais_no_prob(
    collection: &mut RrCollection,
    candidates: &[CandidateEdge],
    k: usize,
    master_seed: u64,
) -> BaselineSelection {
    let mut taken = vec![false; candidates.len()];
    let mut edges = Vec::with_capacity(k);
    for step in 0..k.min(candidates.len()) {
        let mut best: Option<(usize, NoProbRank)> = None;
        for (i, c) in candidates.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let rank = (Reverse(collection.marginal(c.v)), c.v, Reverse(ordered(c.p)), c.u);
            if best.as_ref().is_none_or(|(_, r)| rank < *r) {
                best = Some((i, rank));
            }
        }
        let (i, _) = best.expect("pool not exhausted");
        taken[i] = true;
        soft_update(collection, &candidates[i], step as u64, master_seed);
        edges.push(candidates[i]);
    }
    BaselineSelection::new(edges, k)
}

/// Ranks by `p · Δ(v)` on the frozen collection; ties to smaller `(u, v)`.
/// Zero-score edges come last, ordered by `p` as in the AIS fill.
pub fn ais_no_update(collection: &RrCollection, candidates: &[CandidateEdge], k: usize) -> BaselineSelection {
    let mut order: Vec<(f64, &CandidateEdge)> =
        candidates.iter().map(|c| (c.p * collection.marginal(c.v) as f64, c)).collect();
    order.sort_by(|a, b| {
        let fill = |x: &(f64, &CandidateEdge)| if x.0 > 0.0 { 0.0 } else { x.1.p };
        b.0.total_cmp(&a.0).then(fill(b).total_cmp(&fill(a))).then(a.1.key().cmp(&b.1.key()))
    });
    BaselineSelection::new(order.into_iter().take(k).map(|(_, c)| *c).collect(), k)
}
