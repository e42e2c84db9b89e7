//! Forward Independent Cascade simulation and the exact enumeration oracle.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Augmented, CandidateEdge, Diffusion, Graph, NodeId, SeedSet};
use crate::stream::{self, Domain};

/// Largest number of edges with `0 < p < 1` that [`exact_spread`] will enumerate.
pub const EXACT_STOCHASTIC_LIMIT: usize = 22;

/// Expected spread with a 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadEstimate {
    pub value: f64,
    pub sample_count: u64,
    pub half_width: f64,
}

/// Reusable cascade state. Visitation uses an epoch counter so consecutive
/// runs do not clear the whole marker array.
#[derive(Debug, Clone)]
pub struct Cascade {
    mark: Vec<u32>,
    epoch: u32,
    queue: Vec<NodeId>,
}

impl Cascade {
    pub fn new(n: usize) -> Self {
        Self { mark: vec![0; n], epoch: 0, queue: Vec::new() }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
    }

    /// One cascade from `seeds`; returns the number of activated nodes.
    pub fn run<G: Diffusion, R: Rng + ?Sized>(&mut self, graph: &G, seeds: &SeedSet, rng: &mut R) -> usize {
        self.next_epoch();
        self.queue.clear();
        for &s in seeds.ids() {
            self.mark[s as usize] = self.epoch;
            self.queue.push(s);
        }
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            for (v, p) in graph.out_edges(u) {
                if self.mark[v as usize] != self.epoch && rng.gen::<f64>() < p {
                    self.mark[v as usize] = self.epoch;
                    self.queue.push(v);
                }
            }
        }
        self.queue.len()
    }
}

/// A single IC cascade on `G(added)` from `seeds`.
pub fn simulate_ic<R: Rng + ?Sized>(graph: &Graph, added: &[CandidateEdge], seeds: &SeedSet, rng: &mut R) -> usize {
    let view = Augmented::new(graph, added);
    Cascade::new(graph.node_count()).run(&view, seeds, rng)
}

/// Mean of `runs` independent cascades. Run `i` draws from stream `(master_seed, i)`.
pub fn monte_carlo_spread(
    graph: &Graph,
    added: &[CandidateEdge],
    seeds: &SeedSet,
    runs: u64,
    master_seed: u64,
) -> Result<SpreadEstimate> {
    if runs == 0 {
        return Err(Error::argument("monte_carlo_spread needs at least one run"));
    }
    let view = Augmented::new(graph, added);
    let n = graph.node_count();
    let counts: Vec<u64> = (0..runs)
        .into_par_iter()
        .map_init(
            || Cascade::new(n),
            |cascade, i| cascade.run(&view, seeds, &mut stream::rng(master_seed, Domain::Simulation, i)) as u64,
        )
        .collect();
    Ok(summarize(&counts))
}

fn summarize(counts: &[u64]) -> SpreadEstimate {
    let r = counts.len() as u128;
    let sum: u128 = counts.iter().map(|&c| c as u128).sum();
    let sum_sq: u128 = counts.iter().map(|&c| (c as u128) * (c as u128)).sum();
    let value = sum as f64 / r as f64;
    let half_width = if r > 1 {
        let var = (r * sum_sq - sum * sum) as f64 / (r * (r - 1)) as f64;
        1.96 * var.sqrt() / (r as f64).sqrt()
    } else {
        0.0
    };
    SpreadEstimate { value, sample_count: r as u64, half_width }
}

#[derive(Clone, Copy)]
enum Arc {
    Live(NodeId),
    Coin(NodeId, usize),
}

/// Exact `σ(A, S)` by enumerating every live/blocked assignment of the
/// stochastic edges of `G(A)`. Edges with `p = 0` or `p = 1` are fixed.
pub fn exact_spread(graph: &Graph, added: &[CandidateEdge], seeds: &SeedSet) -> Result<f64> {
    let n = graph.node_count();
    let mut adjacency: Vec<Vec<Arc>> = vec![Vec::new(); n];
    let mut coins: Vec<f64> = Vec::new();
    let all = graph.edges().chain(added.iter().map(|e| (e.u, e.v, e.p)));
    for (u, v, p) in all {
        if p >= 1.0 {
            adjacency[u as usize].push(Arc::Live(v));
        } else if p > 0.0 {
            adjacency[u as usize].push(Arc::Coin(v, coins.len()));
            coins.push(p);
        }
    }
    if coins.len() > EXACT_STOCHASTIC_LIMIT {
        return Err(Error::Capacity(format!(
            "{} stochastic edges exceed the exact-enumeration bound of {EXACT_STOCHASTIC_LIMIT}",
            coins.len()
        )));
    }

    let mut seen = vec![false; n];
    let mut queue = Vec::with_capacity(n);
    let mut total = 0.0;
    for mask in 0u64..(1u64 << coins.len()) {
        let weight: f64 =
            coins.iter().enumerate().map(|(i, &p)| if mask >> i & 1 == 1 { p } else { 1.0 - p }).product();
        seen.iter_mut().for_each(|s| *s = false);
        queue.clear();
        for &s in seeds.ids() {
            seen[s as usize] = true;
            queue.push(s);
        }
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for arc in &adjacency[u as usize] {
                let v = match *arc {
                    Arc::Live(v) => v,
                    Arc::Coin(v, bit) if mask >> bit & 1 == 1 => v,
                    Arc::Coin(..) => continue,
                };
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    queue.push(v);
                }
            }
        }
        total += weight * queue.len() as f64;
    }
    Ok(total)
}

/// Both sides of the augmentation identity for inserting `e = (u, v, p)`:
/// `σ(A ∪ {e}, S)` and `p·σ(A, S ∪ {v}) + (1 − p)·σ(A, S)`.
pub fn exact_augmented_identity_check(
    graph: &Graph,
    added: &[CandidateEdge],
    seeds: &SeedSet,
    e: CandidateEdge,
) -> Result<(f64, f64)> {
    let mut with_e = added.to_vec();
    with_e.push(e);
    let lhs = exact_spread(graph, &with_e, seeds)?;
    let rhs = e.p * exact_spread(graph, added, &seeds.with(e.v))? + (1.0 - e.p) * exact_spread(graph, added, seeds)?;
    Ok((lhs, rhs))
}

/// One live-edge world: a coin outcome for every graph edge (in edge-id
/// order) followed by one for every candidate edge in the pool.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldSample {
    index: u64,
    edge_count: usize,
    bits: Vec<u64>,
}

impl WorldSample {
    /// Draws world `index`; the same `(master_seed, index)` always yields the same bits.
    pub fn draw(graph: &Graph, pool: &[CandidateEdge], master_seed: u64, index: u64) -> Self {
        let m = graph.edge_count();
        let total = m + pool.len();
        let mut bits = vec![0u64; total.div_ceil(64)];
        let mut rng = stream::rng(master_seed, Domain::World, index);
        let probs = (0..m).map(|e| graph.edge_probability(e)).chain(pool.iter().map(|c| c.p));
        for (i, p) in probs.enumerate() {
            if rng.gen::<f64>() < p {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        Self { index, edge_count: m, bits }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    fn bit(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Whether graph edge `edge` (an edge id) is live.
    pub fn edge_live(&self, edge: usize) -> bool {
        self.bit(edge)
    }

    /// Whether pool candidate `j` is live.
    pub fn candidate_live(&self, j: usize) -> bool {
        self.bit(self.edge_count + j)
    }

    /// Number of coin outcomes stored, `m + |pool|`.
    pub fn bit_count(&self, pool_len: usize) -> usize {
        self.edge_count + pool_len
    }
}
