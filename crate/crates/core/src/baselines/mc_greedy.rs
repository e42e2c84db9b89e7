use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::BaselineSelection;
use crate::diffusion::WorldSample;
use crate::error::{Error, Result};
use crate::graph::{CandidateEdge, Graph, NodeId, SeedSet};
use crate::solver::derive_lambda;

/// `r` live-edge worlds shared by every estimate (common random numbers),
/// plus, per world, the nodes reached from `S` through the committed edges.
///
/// Candidate sources are seeds, so a live candidate `(u, v)` just makes `v`
/// another source. Each world is then a coverage function of `A` and the
/// estimated spread, their average, is monotone and submodular.
#[derive(Debug, Clone)]
pub struct WorldSet<'g> {
    graph: &'g Graph,
    pool: Vec<CandidateEdge>,
    worlds: Vec<WorldSample>,
    reached: Vec<Vec<u64>>,
    total: u64,
}

#[derive(Debug, Clone)]
struct Scratch {
    mark: Vec<u32>,
    epoch: u32,
    queue: Vec<NodeId>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self { mark: vec![0; n], epoch: 0, queue: Vec::new() }
    }
}

fn test_bit(bits: &[u64], v: NodeId) -> bool {
    bits[v as usize / 64] >> (v % 64) & 1 == 1
}

fn set_bit(bits: &mut [u64], v: NodeId) {
    bits[v as usize / 64] |= 1 << (v % 64);
}

impl<'g> WorldSet<'g> {
    pub fn new(graph: &'g Graph, seeds: &SeedSet, pool: &[CandidateEdge], r: u64, master_seed: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::argument("mc-greedy needs r >= 1"));
        }
        seeds.require_nonempty()?;
        if let Some(c) = pool.iter().find(|c| !seeds.contains(c.u)) {
            return Err(Error::argument(format!("candidate source {} is not a seed", c.u)));
        }
        let n = graph.node_count();
        let worlds: Vec<WorldSample> =
            (0..r).into_par_iter().map(|i| WorldSample::draw(graph, pool, master_seed, i)).collect();
        let mut set = Self { graph, pool: pool.to_vec(), worlds, reached: Vec::new(), total: 0 };
        let words = n.div_ceil(64);
        let reached: Vec<(Vec<u64>, u64)> = set
            .worlds
            .par_iter()
            .map_init(
                || Scratch::new(n),
                |scratch, world| {
                    let mut bits = vec![0u64; words];
                    let count = seeds.ids().iter().map(|&s| set.spread_into(world, &mut bits, s, scratch)).sum();
                    (bits, count)
                },
            )
            .collect();
        set.total = reached.iter().map(|r| r.1).sum();
        set.reached = reached.into_iter().map(|r| r.0).collect();
        Ok(set)
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    /// Sum over worlds of the number of reached nodes.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Current `σ̂(A, S)`.
    pub fn estimate(&self) -> f64 {
        self.total as f64 / self.worlds.len() as f64
    }

    /// Counts the nodes reachable from `start` in `world` that are not yet in
    /// `reached`; they are left in `scratch.queue`.
    fn walk(&self, world: &WorldSample, reached: &[u64], start: NodeId, scratch: &mut Scratch) -> usize {
        if test_bit(reached, start) {
            return 0;
        }
        scratch.epoch = scratch.epoch.wrapping_add(1);
        if scratch.epoch == 0 {
            scratch.mark.iter_mut().for_each(|m| *m = 0);
            scratch.epoch = 1;
        }
        scratch.queue.clear();
        scratch.queue.push(start);
        scratch.mark[start as usize] = scratch.epoch;
        let mut head = 0;
        while head < scratch.queue.len() {
            let u = scratch.queue[head];
            head += 1;
            for e in self.graph.out_range(u) {
                if !world.edge_live(e) {
                    continue;
                }
                let t = self.graph.edge_target(e);
                if scratch.mark[t as usize] != scratch.epoch && !test_bit(reached, t) {
                    scratch.mark[t as usize] = scratch.epoch;
                    scratch.queue.push(t);
                }
            }
        }
        scratch.queue.len()
    }

    fn spread_into(&self, world: &WorldSample, reached: &mut [u64], start: NodeId, scratch: &mut Scratch) -> u64 {
        let count = self.walk(world, reached, start, scratch);
        for &v in &scratch.queue[..count] {
            set_bit(reached, v);
        }
        count as u64
    }

    /// Summed marginal gain of pool candidate `j` over all worlds.
    pub fn gain(&self, j: usize) -> u64 {
        let v = self.pool[j].v;
        let n = self.graph.node_count();
        self.worlds
            .par_iter()
            .zip(self.reached.par_iter())
            .map_init(
                || Scratch::new(n),
                |scratch, (world, reached)| {
                    if world.candidate_live(j) {
                        self.walk(world, reached, v, scratch) as u64
                    } else {
                        0
                    }
                },
            )
            .sum()
    }

    /// Adds pool candidate `j` to `A`.
    pub fn commit(&mut self, j: usize) {
        let v = self.pool[j].v;
        let n = self.graph.node_count();
        let mut reached = std::mem::take(&mut self.reached);
        let added: u64 = self
            .worlds
            .par_iter()
            .zip(reached.par_iter_mut())
            .map_init(
                || Scratch::new(n),
                |scratch, (world, bits)| {
                    if world.candidate_live(j) {
                        self.spread_into(world, bits, v, scratch)
                    } else {
                        0
                    }
                },
            )
            .sum();
        self.reached = reached;
        self.total += added;
    }
}

#[derive(Debug, PartialEq, Eq)]
struct Entry {
    gain: u64,
    key: (NodeId, NodeId),
    idx: usize,
    round: usize,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain.cmp(&other.gain).then_with(|| other.key.cmp(&self.key)).then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lazy (CELF) greedy over `r` shared worlds. Ties go to the smallest `(u, v)`.
///
/// Because the estimated objective is submodular for fixed worlds, a stale
/// gain is an upper bound and the output equals plain greedy edge for edge.
pub fn mc_greedy(
    graph: &Graph,
    seeds: &SeedSet,
    candidates: &[CandidateEdge],
    k: usize,
    r: u64,
    master_seed: u64,
) -> Result<BaselineSelection> {
    let mut worlds = WorldSet::new(graph, seeds, candidates, r, master_seed)?;
    let mut heap: BinaryHeap<Entry> = (0..candidates.len())
        .map(|idx| Entry { gain: worlds.gain(idx), key: candidates[idx].key(), idx, round: 0 })
        .collect();
    let mut edges = Vec::with_capacity(k);
    let mut round = 0;
    while round < k {
        let Some(top) = heap.pop() else { break };
        if top.round == round {
            worlds.commit(top.idx);
            edges.push(candidates[top.idx]);
            round += 1;
        } else {
            heap.push(Entry { gain: worlds.gain(top.idx), round, ..top });
        }
    }
    Ok(BaselineSelection::new(edges, k))
}

/// Simulation count for which every one of the `k · |E_C|` estimates is a
/// multiplicative `λ`-error estimate with joint probability `1 − δ`
/// (Chernoff with `E[X̄] ≥ 1/n` plus a union bound).
pub fn theoretical_mc_rounds(n: usize, k: usize, candidate_count: usize, epsilon: f64, delta: f64) -> f64 {
    let lambda = derive_lambda(epsilon, k);
    let estimates = (k * candidate_count.max(1)) as f64;
    (3.0 * n as f64 * (2.0 * estimates / delta).ln() / (lambda * lambda)).ceil()
}
