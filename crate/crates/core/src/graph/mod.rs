//! Directed graph with per-edge propagation probabilities.
//!
//! The graph is stored twice in compressed sparse row form: forward adjacency
//! for cascades and reverse adjacency for reverse-reachable sampling. Node ids
//! are dense `0..n`; the label each node carried in its input file is kept so
//! reports can speak in original ids.

mod candidates;
mod io;

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use candidates::{generate_candidates, CandidateMode, MissingProbability};
pub use io::{
    load_edge_list, read_candidates, read_edge_list_file, read_seeds, write_candidates, write_edge_list, write_seeds,
    LoadStats, LoadedGraph,
};

pub type NodeId = u32;

/// Immutable directed graph.
#[derive(Debug, Clone)]
pub struct Graph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    out_probs: Vec<f64>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    in_probs: Vec<f64>,
    labels: Vec<u64>,
    label_index: HashMap<u64, NodeId>,
}

impl Graph {
    /// Builds a graph on nodes `0..n` labelled by their own index.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId, f64)]) -> Result<Self> {
        Self::with_labels((0..n as u64).collect(), edges)
    }

    /// Builds a graph whose node `i` carries `labels[i]`.
    ///
    /// Rejects self-loops, repeated `(u, v)` pairs, out-of-range ids and
    /// probabilities outside `[0, 1]`. Out-edges of each node keep input order.
    pub fn with_labels(labels: Vec<u64>, edges: &[(NodeId, NodeId, f64)]) -> Result<Self> {
        let n = labels.len();
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v, p) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::argument(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::argument(format!("self-loop on node {u}")));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::argument(format!("probability {p} on edge ({u}, {v})")));
            }
            if !seen.insert((u, v)) {
                return Err(Error::argument(format!("duplicate edge ({u}, {v})")));
            }
        }

        let (out_offsets, out_order) = bucket(n, edges.iter().map(|e| e.0));
        let out_targets = out_order.iter().map(|&i| edges[i].1).collect();
        let out_probs = out_order.iter().map(|&i| edges[i].2).collect();
        let (in_offsets, in_order) = bucket(n, edges.iter().map(|e| e.1));
        let in_sources = in_order.iter().map(|&i| edges[i].0).collect();
        let in_probs = in_order.iter().map(|&i| edges[i].2).collect();

        let mut label_index = HashMap::with_capacity(n);
        for (i, &l) in labels.iter().enumerate() {
            if label_index.insert(l, i as NodeId).is_some() {
                return Err(Error::argument(format!("duplicate node label {l}")));
            }
        }

        Ok(Self { out_offsets, out_targets, out_probs, in_offsets, in_sources, in_probs, labels, label_index })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_range(u).len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    /// Edge ids of `u`'s out-edges. Edge ids index the forward arrays.
    pub fn out_range(&self, u: NodeId) -> Range<usize> {
        let u = u as usize;
        self.out_offsets[u]..self.out_offsets[u + 1]
    }

    pub fn edge_target(&self, edge: usize) -> NodeId {
        self.out_targets[edge]
    }

    pub fn edge_probability(&self, edge: usize) -> f64 {
        self.out_probs[edge]
    }

    pub fn out_edges(&self, u: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let r = self.out_range(u);
        self.out_targets[r.clone()].iter().copied().zip(self.out_probs[r].iter().copied())
    }

    pub fn in_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let v = v as usize;
        let r = self.in_offsets[v]..self.in_offsets[v + 1];
        self.in_sources[r.clone()].iter().copied().zip(self.in_probs[r].iter().copied())
    }

    /// All edges `(u, v, p)` in edge-id order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| self.out_edges(u).map(move |(v, p)| (u, v, p)))
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_targets[self.out_range(u)].contains(&v)
    }

    /// Original label of a dense node id.
    pub fn label(&self, v: NodeId) -> u64 {
        self.labels[v as usize]
    }

    pub fn node_of_label(&self, label: u64) -> Option<NodeId> {
        self.label_index.get(&label).copied()
    }

    /// Mean probability over all edges, `0` for an edgeless graph.
    pub fn mean_probability(&self) -> f64 {
        if self.out_probs.is_empty() {
            0.0
        } else {
            self.out_probs.iter().sum::<f64>() / self.out_probs.len() as f64
        }
    }

    /// Weighted cascade: every edge `u -> v` gets `1 / indeg(v)`.
    pub fn assign_wic_probabilities(mut self) -> Self {
        for v in 0..self.node_count() {
            let range = self.in_offsets[v]..self.in_offsets[v + 1];
            let p = 1.0 / range.len().max(1) as f64;
            self.in_probs[range].iter_mut().for_each(|x| *x = p);
        }
        for (e, &v) in self.out_targets.iter().enumerate() {
            self.out_probs[e] = 1.0 / self.in_degree(v) as f64;
        }
        self
    }
}

/// Counting sort of item indices by key, returning CSR offsets and the stable order.
fn bucket(n: usize, keys: impl Iterator<Item = NodeId> + Clone) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = vec![0usize; n + 1];
    for k in keys.clone() {
        offsets[k as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut order = vec![0usize; offsets[n]];
    for (i, k) in keys.enumerate() {
        order[cursor[k as usize]] = i;
        cursor[k as usize] += 1;
    }
    (offsets, order)
}

/// Read access shared by the base graph and its augmented views.
pub trait Diffusion: Sync {
    fn node_count(&self) -> usize;
    fn out_edges(&self, u: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_;
    fn in_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_;
}

impl Diffusion for Graph {
    fn node_count(&self) -> usize {
        Graph::node_count(self)
    }

    fn out_edges(&self, u: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        Graph::out_edges(self, u)
    }

    fn in_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        Graph::in_edges(self, v)
    }
}

/// `G(A)`: the base graph plus a set of inserted edges, without copying `G`.
#[derive(Debug)]
pub struct Augmented<'g> {
    base: &'g Graph,
    extra_out: Vec<Vec<(NodeId, f64)>>,
    extra_in: Vec<Vec<(NodeId, f64)>>,
}

impl<'g> Augmented<'g> {
    /// Overlays `added` on `base`. The added edges are assumed disjoint from `E`.
    pub fn new(base: &'g Graph, added: &[CandidateEdge]) -> Self {
        let n = base.node_count();
        let (mut extra_out, mut extra_in) = (vec![Vec::new(); n], vec![Vec::new(); n]);
        for e in added {
            extra_out[e.u as usize].push((e.v, e.p));
            extra_in[e.v as usize].push((e.u, e.p));
        }
        Self { base, extra_out, extra_in }
    }

    pub fn base(&self) -> &'g Graph {
        self.base
    }
}

impl Diffusion for Augmented<'_> {
    fn node_count(&self) -> usize {
        self.base.node_count()
    }

    fn out_edges(&self, u: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.base.out_edges(u).chain(self.extra_out[u as usize].iter().copied())
    }

    fn in_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.base.in_edges(v).chain(self.extra_in[v as usize].iter().copied())
    }
}

/// Sorted, duplicate-free seed nodes with a membership bitmap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    ids: Vec<NodeId>,
    member: Vec<bool>,
}

impl SeedSet {
    /// Seeds drawn from `ids`; repeated ids collapse, out-of-range ids are an error.
    pub fn new(n: usize, ids: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut member = vec![false; n];
        let mut out = Vec::new();
        for v in ids {
            if v as usize >= n {
                return Err(Error::argument(format!("seed {v} out of range for n = {n}")));
            }
            if !member[v as usize] {
                member[v as usize] = true;
                out.push(v);
            }
        }
        out.sort_unstable();
        Ok(Self { ids: out, member })
    }

    /// Every node of an `n`-node graph.
    pub fn all(n: usize) -> Self {
        Self { ids: (0..n as NodeId).collect(), member: vec![true; n] }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.member[v as usize]
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Size of the ground set this seed set lives in.
    pub fn universe(&self) -> usize {
        self.member.len()
    }

    /// `S ∪ {v}`.
    pub fn with(&self, v: NodeId) -> Self {
        let mut next = self.clone();
        if !next.member[v as usize] {
            next.member[v as usize] = true;
            let at = next.ids.partition_point(|&x| x < v);
            next.ids.insert(at, v);
        }
        next
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::argument("seed set is empty"))
        } else {
            Ok(())
        }
    }
}

/// An edge `u -> v` that may be inserted, with its propagation probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub p: f64,
}

impl CandidateEdge {
    pub fn new(u: NodeId, v: NodeId, p: f64) -> Self {
        Self { u, v, p }
    }

    /// Tie-break key used by every selection rule.
    pub fn key(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }

    /// Checks `u ∈ S`, `v ∉ S`, `(u, v) ∉ E` and `p ∈ [0, 1]`.
    pub fn validate(&self, graph: &Graph, seeds: &SeedSet) -> Result<()> {
        let n = graph.node_count();
        if self.u as usize >= n || self.v as usize >= n {
            return Err(Error::argument(format!("candidate ({}, {}) out of range", self.u, self.v)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::argument(format!("candidate probability {} outside [0, 1]", self.p)));
        }
        if !seeds.contains(self.u) {
            return Err(Error::argument(format!("candidate source {} is not a seed", self.u)));
        }
        if seeds.contains(self.v) {
            return Err(Error::argument(format!("candidate target {} is a seed", self.v)));
        }
        if graph.has_edge(self.u, self.v) {
            return Err(Error::argument(format!("candidate ({}, {}) already in E", self.u, self.v)));
        }
        Ok(())
    }
}
