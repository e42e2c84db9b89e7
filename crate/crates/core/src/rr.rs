//! Reverse-reachable (RR) set sampling and the coverage structures built on it.
//!
//! An [`RrCollection`] stores its sets in a flat arena with offsets and keeps,
//! besides the sets themselves:
//!
//! * `covered[i]`: whether set `i` is covered by the seeds (directly, or later
//!   through a soft update),
//! * `marginal[v]`: the number of uncovered sets containing `v`,
//! * an inverted index `v -> [set ids]`,
//! * `coverage`: the number of covered sets.
//!
//! Only [`crate::solver`] mutates a collection after construction, through
//! [`RrCollection::cover`]; [`RrCollection::audit`] recounts everything from
//! the raw sets.

use std::io::{Read, Write};

use rand::Rng;
use rayon::prelude::*;

use crate::diffusion::SpreadEstimate;
use crate::error::{Error, Result};
use crate::graph::{Diffusion, NodeId, SeedSet};
use crate::stream::{self, Domain};

/// Sets generated before giving up on a coverage target.
pub const DEFAULT_CAP: u64 = 50_000_000;

const MAGIC: &[u8; 4] = b"IMRR";
const FORMAT_VERSION: u32 = 1;
const TRUNCATED_BIT: u32 = 1 << 31;

/// One RR set. `members[0]` is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RrSet {
    pub root: NodeId,
    pub members: Vec<NodeId>,
    /// Generation stopped because a seed entered the set.
    pub truncated: bool,
}

/// Reverse BFS workspace, reused across samples.
#[derive(Debug, Clone)]
pub struct RrSampler {
    mark: Vec<u32>,
    epoch: u32,
}

impl RrSampler {
    pub fn new(n: usize) -> Self {
        Self { mark: vec![0; n], epoch: 0 }
    }

    /// Grows the RR set of `root` into `members`; returns whether it was truncated.
    pub fn sample_into<G: Diffusion, R: Rng + ?Sized>(
        &mut self,
        graph: &G,
        seeds: &SeedSet,
        root: NodeId,
        truncate: bool,
        rng: &mut R,
        members: &mut Vec<NodeId>,
    ) -> bool {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        members.clear();
        members.push(root);
        self.mark[root as usize] = self.epoch;
        if truncate && seeds.contains(root) {
            return true;
        }
        let mut head = 0;
        while head < members.len() {
            let w = members[head];
            head += 1;
            for (u, p) in graph.in_edges(w) {
                if self.mark[u as usize] == self.epoch || rng.gen::<f64>() >= p {
                    continue;
                }
                self.mark[u as usize] = self.epoch;
                members.push(u);
                if truncate && seeds.contains(u) {
                    return true;
                }
            }
        }
        false
    }
}

/// RR set of a uniformly random root.
pub fn sample_rr_set<G: Diffusion, R: Rng + ?Sized>(graph: &G, seeds: &SeedSet, truncate: bool, rng: &mut R) -> RrSet {
    let root = rng.gen_range(0..graph.node_count() as NodeId);
    sample_rr_set_from(graph, seeds, root, truncate, rng)
}

/// RR set of a fixed root.
pub fn sample_rr_set_from<G: Diffusion, R: Rng + ?Sized>(
    graph: &G,
    seeds: &SeedSet,
    root: NodeId,
    truncate: bool,
    rng: &mut R,
) -> RrSet {
    let mut members = Vec::new();
    let truncated = RrSampler::new(graph.node_count()).sample_into(graph, seeds, root, truncate, rng, &mut members);
    RrSet { root, members, truncated }
}

/// Parameters shared by the collection generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingConfig {
    /// Set `i` draws from stream `(master_seed, i)`.
    pub master_seed: u64,
    /// Stop growing a set as soon as it reaches a seed.
    pub truncate: bool,
    pub cap: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { master_seed: 0, truncate: true, cap: DEFAULT_CAP }
    }
}

#[derive(Debug, Clone)]
pub struct RrCollection {
    n: usize,
    offsets: Vec<usize>,
    members: Vec<NodeId>,
    truncated: Vec<bool>,
    covered: Vec<bool>,
    marginal: Vec<u64>,
    posting_offsets: Vec<usize>,
    postings: Vec<u32>,
    coverage: u64,
    initial_coverage: u64,
    cap_hit: bool,
}

struct Arena {
    offsets: Vec<usize>,
    members: Vec<NodeId>,
    truncated: Vec<bool>,
}

impl Arena {
    fn new() -> Self {
        Self { offsets: vec![0], members: Vec::new(), truncated: Vec::new() }
    }

    fn push(&mut self, members: &[NodeId], truncated: bool) {
        self.members.extend_from_slice(members);
        self.offsets.push(self.members.len());
        self.truncated.push(truncated);
    }

    fn len(&self) -> usize {
        self.truncated.len()
    }
}

fn check_cap(cap: u64) -> Result<()> {
    if cap == 0 || cap > u32::MAX as u64 {
        return Err(Error::argument(format!("sampling cap {cap} outside 1..=2^32-1")));
    }
    Ok(())
}

/// Generates sets in index order until `done(θ, Λ)` or the cap. Sets are
/// produced in parallel batches; the stop test runs sequentially so the result
/// matches a one-at-a-time loop exactly.
fn generate<G: Diffusion>(
    graph: &G,
    seeds: &SeedSet,
    config: &SamplingConfig,
    done: impl Fn(u64, u64) -> bool,
) -> Result<RrCollection> {
    seeds.require_nonempty()?;
    check_cap(config.cap)?;
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::argument("graph has no nodes"));
    }
    let mut arena = Arena::new();
    let mut coverage = 0u64;
    let mut batch = 256u64;
    'outer: while !done(arena.len() as u64, coverage) && (arena.len() as u64) < config.cap {
        let start = arena.len() as u64;
        let end = (start + batch).min(config.cap);
        let fresh: Vec<(Vec<NodeId>, bool)> = (start..end)
            .into_par_iter()
            .map_init(
                || RrSampler::new(n),
                |sampler, i| {
                    let mut rng = stream::rng(config.master_seed, Domain::RrSet, i);
                    let root = rng.gen_range(0..n as NodeId);
                    let mut members = Vec::new();
                    let t = sampler.sample_into(graph, seeds, root, config.truncate, &mut rng, &mut members);
                    (members, t)
                },
            )
            .collect();
        for (members, truncated) in fresh {
            if truncated || members.iter().any(|&v| seeds.contains(v)) {
                coverage += 1;
            }
            arena.push(&members, truncated);
            if done(arena.len() as u64, coverage) {
                break 'outer;
            }
        }
        batch = (batch * 2).min(1 << 16);
    }
    let cap_hit = !done(arena.len() as u64, coverage);
    let mut out = RrCollection::build(n, seeds, arena);
    out.cap_hit = cap_hit;
    Ok(out)
}

/// Samples truncated-or-not RR sets until `Λ(S) ≥ ⌈threshold⌉` or `θ = cap`.
pub fn sample_until_coverage<G: Diffusion>(
    graph: &G,
    seeds: &SeedSet,
    threshold: f64,
    config: &SamplingConfig,
) -> Result<RrCollection> {
    if threshold.is_nan() || threshold <= 0.0 || threshold.is_infinite() {
        return Err(Error::argument(format!("coverage threshold {threshold} must be positive")));
    }
    let target = threshold.ceil() as u64;
    generate(graph, seeds, config, |_, coverage| coverage >= target)
}

/// Samples exactly `count` RR sets (or `cap`, if smaller).
pub fn sample_fixed<G: Diffusion>(
    graph: &G,
    seeds: &SeedSet,
    count: u64,
    config: &SamplingConfig,
) -> Result<RrCollection> {
    if count == 0 {
        return Err(Error::argument("sample_fixed needs count >= 1"));
    }
    generate(graph, seeds, config, |theta, _| theta >= count)
}

impl RrCollection {
    /// Builds a collection from explicit sets, marking sets that meet `seeds` as covered.
    pub fn from_sets(n: usize, seeds: &SeedSet, sets: impl IntoIterator<Item = RrSet>) -> Result<Self> {
        let mut arena = Arena::new();
        for s in sets {
            if let Some(&bad) = s.members.iter().find(|&&v| v as usize >= n) {
                return Err(Error::argument(format!("RR member {bad} out of range for n = {n}")));
            }
            arena.push(&s.members, s.truncated);
        }
        check_cap(arena.len().max(1) as u64)?;
        Ok(Self::build(n, seeds, arena))
    }

    fn build(n: usize, seeds: &SeedSet, arena: Arena) -> Self {
        let theta = arena.len();
        let mut covered = vec![false; theta];
        let mut marginal = vec![0u64; n];
        let mut degree = vec![0usize; n + 1];
        for (i, hit) in covered.iter_mut().enumerate() {
            let set = &arena.members[arena.offsets[i]..arena.offsets[i + 1]];
            *hit = arena.truncated[i] || set.iter().any(|&v| seeds.contains(v));
            for &v in set {
                degree[v as usize + 1] += 1;
                if !*hit {
                    marginal[v as usize] += 1;
                }
            }
        }
        for v in 0..n {
            degree[v + 1] += degree[v];
        }
        let posting_offsets = degree.clone();
        let mut postings = vec![0u32; arena.members.len()];
        for i in 0..theta {
            for &v in &arena.members[arena.offsets[i]..arena.offsets[i + 1]] {
                postings[degree[v as usize]] = i as u32;
                degree[v as usize] += 1;
            }
        }
        let coverage = covered.iter().filter(|&&c| c).count() as u64;
        Self {
            n,
            offsets: arena.offsets,
            members: arena.members,
            truncated: arena.truncated,
            covered,
            marginal,
            posting_offsets,
            postings,
            coverage,
            initial_coverage: coverage,
            cap_hit: false,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of stored sets, θ.
    pub fn theta(&self) -> u64 {
        self.truncated.len() as u64
    }

    /// Maintained coverage count Λ(S), including soft-update flips.
    pub fn coverage_count(&self) -> u64 {
        self.coverage
    }

    /// Λ(S) at construction time.
    pub fn initial_coverage(&self) -> u64 {
        self.initial_coverage
    }

    /// Sampling stopped at the cap before reaching its target.
    pub fn cap_hit(&self) -> bool {
        self.cap_hit
    }

    pub fn marginal(&self, v: NodeId) -> u64 {
        self.marginal[v as usize]
    }

    pub fn marginals(&self) -> &[u64] {
        &self.marginal
    }

    pub fn members(&self, set: usize) -> &[NodeId] {
        &self.members[self.offsets[set]..self.offsets[set + 1]]
    }

    pub fn root(&self, set: usize) -> NodeId {
        self.members[self.offsets[set]]
    }

    pub fn is_truncated(&self, set: usize) -> bool {
        self.truncated[set]
    }

    pub fn is_covered(&self, set: usize) -> bool {
        self.covered[set]
    }

    /// Ids of the sets that contain `v`, ascending.
    pub fn sets_containing(&self, v: NodeId) -> &[u32] {
        let v = v as usize;
        &self.postings[self.posting_offsets[v]..self.posting_offsets[v + 1]]
    }

    pub fn rr_set(&self, set: usize) -> RrSet {
        RrSet { root: self.root(set), members: self.members(set).to_vec(), truncated: self.truncated[set] }
    }

    /// Number of stored sets intersecting `nodes`. Ignores soft-update state.
    pub fn coverage(&self, nodes: &[NodeId]) -> u64 {
        let mut hit = vec![false; self.truncated.len()];
        let mut count = 0;
        for &v in nodes {
            for &i in self.sets_containing(v) {
                if !hit[i as usize] {
                    hit[i as usize] = true;
                    count += 1;
                }
            }
        }
        count
    }

    /// `n · coverage(nodes) / θ`.
    pub fn estimate_spread(&self, nodes: &[NodeId]) -> Result<f64> {
        self.ratio(self.coverage(nodes))
    }

    /// `n · Λ / θ` from the maintained counter, i.e. the current `σ̂(A, S)`.
    pub fn seed_spread(&self) -> Result<f64> {
        self.ratio(self.coverage)
    }

    /// [`Self::seed_spread`] with a binomial 95% half-width.
    pub fn seed_spread_estimate(&self) -> Result<SpreadEstimate> {
        let value = self.seed_spread()?;
        let theta = self.theta() as f64;
        let q = self.coverage as f64 / theta;
        Ok(SpreadEstimate {
            value,
            sample_count: self.theta(),
            half_width: 1.96 * self.n as f64 * (q * (1.0 - q) / theta).sqrt(),
        })
    }

    fn ratio(&self, count: u64) -> Result<f64> {
        if self.truncated.is_empty() {
            return Err(Error::State("collection holds no RR sets".into()));
        }
        Ok(self.n as f64 * count as f64 / self.theta() as f64)
    }

    /// Marks `set` covered and withdraws it from every member's marginal.
    /// Returns false if it was already covered.
    pub(crate) fn cover(&mut self, set: usize) -> bool {
        if self.covered[set] {
            return false;
        }
        self.covered[set] = true;
        self.coverage += 1;
        for &w in &self.members[self.offsets[set]..self.offsets[set + 1]] {
            self.marginal[w as usize] -= 1;
        }
        true
    }

    /// Recounts marginals, coverage and the inverted index from the raw sets.
    pub fn audit(&self, seeds: &SeedSet) -> Result<()> {
        let theta = self.truncated.len();
        let mut marginal = vec![0u64; self.n];
        let mut coverage = 0;
        for i in 0..theta {
            let set = self.members(i);
            if set.is_empty() {
                return Err(Error::Audit(format!("set {i} is empty")));
            }
            let meets_seeds = set.iter().any(|&v| seeds.contains(v));
            if self.truncated[i] && !meets_seeds {
                return Err(Error::Audit(format!("set {i} is truncated but holds no seed")));
            }
            if meets_seeds && !self.covered[i] {
                return Err(Error::Audit(format!("set {i} meets the seeds but is uncovered")));
            }
            if self.covered[i] {
                coverage += 1;
            } else {
                set.iter().for_each(|&v| marginal[v as usize] += 1);
            }
        }
        if coverage != self.coverage {
            return Err(Error::Audit(format!("coverage {} but recount {coverage}", self.coverage)));
        }
        if let Some(v) = (0..self.n).find(|&v| marginal[v] != self.marginal[v]) {
            return Err(Error::Audit(format!(
                "marginal of node {v} is {} but recount {}",
                self.marginal[v], marginal[v]
            )));
        }
        let mut expected: Vec<Vec<u32>> = vec![Vec::new(); self.n];
        for i in 0..theta {
            for &v in self.members(i) {
                expected[v as usize].push(i as u32);
            }
        }
        for (v, list) in expected.iter().enumerate() {
            if self.sets_containing(v as NodeId) != list.as_slice() {
                return Err(Error::Audit(format!("inverted index of node {v} is stale")));
            }
        }
        Ok(())
    }

    /// Debug dump: `IMRR`, version, `n`, `θ`, then per set a length word
    /// (bit 31 = truncated) followed by the member ids, all little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&self.theta().to_le_bytes())?;
        for i in 0..self.truncated.len() {
            let set = self.members(i);
            let flag = if self.truncated[i] { TRUNCATED_BIT } else { 0 };
            w.write_all(&(set.len() as u32 | flag).to_le_bytes())?;
            for &v in set {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a dump. Coverage is recomputed against `seeds`; soft-update state
    /// is not part of the format.
    pub fn read_binary<R: Read>(mut r: R, seeds: &SeedSet) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::argument("not an RR collection dump"));
        }
        let version = read_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(Error::argument(format!("unsupported dump version {version}")));
        }
        let n = read_u32(&mut r)? as usize;
        let mut theta = [0u8; 8];
        r.read_exact(&mut theta)?;
        let theta = u64::from_le_bytes(theta);
        if seeds.universe() != n {
            return Err(Error::argument(format!("dump has n = {n}, seeds expect {}", seeds.universe())));
        }
        let mut sets = Vec::with_capacity(theta.min(1 << 20) as usize);
        for _ in 0..theta {
            let word = read_u32(&mut r)?;
            let len = (word & !TRUNCATED_BIT) as usize;
            let members = (0..len).map(|_| read_u32(&mut r)).collect::<Result<Vec<_>>>()?;
            let root = *members.first().ok_or_else(|| Error::argument("empty RR set in dump"))?;
            sets.push(RrSet { root, members, truncated: word & TRUNCATED_BIT != 0 });
        }
        Self::from_sets(n, seeds, sets)
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
