//! The AIS edge-selection algorithm.
//!
//! Sampling draws truncated RR sets on the base graph until the seed coverage
//! reaches the threshold implied by `(ε, δ, k, |E_C|)`. Selection then runs
//! `k` greedy rounds, each picking the candidate `(u, v, p)` with the largest
//! `p · Δ(v)` and folding it into the collection with a soft update: every
//! uncovered set containing `v` becomes covered with probability `p`.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CandidateEdge, Graph, SeedSet};
use crate::rr::{sample_until_coverage, RrCollection, SamplingConfig, DEFAULT_CAP};
use crate::stream::{self, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub k: usize,
    /// Divides the coverage threshold. Values above 1 give up the guarantee.
    pub beta: f64,
    pub master_seed: u64,
    pub cap: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { epsilon: 0.5, delta: 0.001, k: 50, beta: 1.0, master_seed: 0, cap: DEFAULT_CAP }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::argument(format!("epsilon {} must lie in (0, 1)", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::argument(format!("delta {} must lie in (0, 1)", self.delta)));
        }
        if self.k == 0 {
            return Err(Error::argument("k must be at least 1"));
        }
        if self.beta.is_nan() || self.beta < 1.0 || self.beta.is_infinite() {
            return Err(Error::argument(format!("beta {} must be >= 1", self.beta)));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        derive_lambda(self.epsilon, self.k)
    }

    /// Failure probability after the union bound over `k · |E_C|` estimates.
    pub fn scaled_delta(&self, candidate_count: usize) -> f64 {
        self.delta / (self.k as f64 * candidate_count.max(1) as f64)
    }

    pub fn threshold(&self, candidate_count: usize) -> f64 {
        coverage_threshold(self.lambda(), self.scaled_delta(candidate_count), self.beta)
    }

    /// Sampling parameters used by [`solve`] and the RR-based baselines.
    pub fn sampling(&self) -> SamplingConfig {
        SamplingConfig { master_seed: stream::derive(self.master_seed, Domain::RrSet), truncate: true, cap: self.cap }
    }

    pub(crate) fn update_seed(&self) -> u64 {
        stream::derive(self.master_seed, Domain::SoftUpdate)
    }
}

/// Per-estimate relative error `λ = (ε/k) / (2 + ε/k)`.
pub fn derive_lambda(epsilon: f64, k: usize) -> f64 {
    let x = epsilon / k as f64;
    x / (2.0 + x)
}

/// Coverage target `2(1+λ)(1+λ/3)·ln(2/δ) / λ²`, divided by `beta`.
pub fn coverage_threshold(lambda: f64, delta: f64, beta: f64) -> f64 {
    2.0 * (1.0 + lambda) * (1.0 + lambda / 3.0) * (2.0 / delta).ln() / (lambda * lambda) / beta
}

/// Applies the soft update for the edge chosen at `step`: each uncovered set
/// containing `edge.v` is covered with probability `edge.p`. Coin `(step, set)`
/// is drawn from `master_seed`. Returns the number of sets flipped.
pub fn soft_update(collection: &mut RrCollection, edge: &CandidateEdge, step: u64, master_seed: u64) -> u64 {
    if edge.p <= 0.0 {
        return 0;
    }
    let mut flipped = 0;
    let sets = collection.sets_containing(edge.v).to_vec();
    for set in sets {
        let set = set as usize;
        if collection.is_covered(set) {
            continue;
        }
        if stream::unit(master_seed, Domain::SoftUpdate, step, set as u64) < edge.p && collection.cover(set) {
            flipped += 1;
        }
    }
    flipped
}

/// Outcome of the greedy phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub edges: Vec<CandidateEdge>,
    /// `p · Δ(v)` of each pick at the moment it was chosen.
    pub scores: Vec<f64>,
    /// Sets flipped by each pick's soft update.
    pub flips: Vec<u64>,
    /// Every remaining score was zero at some round; the rest was filled by probability.
    pub degenerate: bool,
    /// Fewer than `k` candidates were available.
    pub short: bool,
}

fn better(score: f64, key: (u32, u32), best: Option<(f64, (u32, u32))>) -> bool {
    match best {
        None => true,
        Some((s, k)) => score > s || (score == s && key < k),
    }
}

/// `k` rounds of `argmax p · Δ(v)` with soft updates. Ties go to the smallest `(u, v)`.
pub fn select_edges(
    collection: &mut RrCollection,
    candidates: &[CandidateEdge],
    k: usize,
    master_seed: u64,
) -> Selection {
    let mut taken = vec![false; candidates.len()];
    let mut out = Selection {
        edges: Vec::with_capacity(k),
        scores: Vec::with_capacity(k),
        flips: Vec::with_capacity(k),
        degenerate: false,
        short: k > candidates.len(),
    };
    for step in 0..k.min(candidates.len()) {
        let mut best: Option<(f64, (u32, u32))> = None;
        let mut best_idx = usize::MAX;
        if !out.degenerate {
            for (i, c) in candidates.iter().enumerate() {
                if taken[i] {
                    continue;
                }
                let score = c.p * collection.marginal(c.v) as f64;
                if better(score, c.key(), best) {
                    best = Some((score, c.key()));
                    best_idx = i;
                }
            }
            out.degenerate = best.is_some_and(|(s, _)| s <= 0.0);
        }
        if out.degenerate {
            best = None;
            for (i, c) in candidates.iter().enumerate() {
                if !taken[i] && better(c.p, c.key(), best) {
                    best = Some((c.p, c.key()));
                    best_idx = i;
                }
            }
        }
        let chosen = candidates[best_idx];
        taken[best_idx] = true;
        out.scores.push(chosen.p * collection.marginal(chosen.v) as f64);
        out.flips.push(soft_update(collection, &chosen, step as u64, master_seed));
        out.edges.push(chosen);
    }
    out
}

/// Wall-clock time of each solver phase. Not serialized: reports stay
/// byte-identical across runs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub sampling: Duration,
    pub selection: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub edges: Vec<CandidateEdge>,
    pub scores: Vec<f64>,
    pub lambda: f64,
    pub scaled_delta: f64,
    pub threshold: f64,
    pub theta: u64,
    pub initial_coverage: u64,
    pub final_coverage: u64,
    /// `σ̂(∅, S)` with its binomial half-width.
    pub spread_before: f64,
    pub spread_before_half_width: f64,
    /// `σ̂(A, S)` read from the updated collection.
    pub spread_after: f64,
    pub cap_hit: bool,
    pub degenerate: bool,
    pub short: bool,
    #[serde(skip)]
    pub timings: PhaseTimings,
}

/// Samples the truncated RR collection AIS starts from. The RR-based
/// baselines call this too, so they see exactly the sets AIS sees.
pub fn prepare_collection(
    graph: &Graph,
    seeds: &SeedSet,
    candidate_count: usize,
    config: &SolverConfig,
) -> Result<RrCollection> {
    config.validate()?;
    sample_until_coverage(graph, seeds, config.threshold(candidate_count), &config.sampling())
}

/// A finished run together with the collection it leaves behind.
#[derive(Debug, Clone)]
pub struct AisRun {
    pub report: SolutionReport,
    pub collection: RrCollection,
}

/// Runs AIS end to end.
pub fn solve(
    graph: &Graph,
    seeds: &SeedSet,
    candidates: &[CandidateEdge],
    config: &SolverConfig,
) -> Result<SolutionReport> {
    solve_detailed(graph, seeds, candidates, config).map(|run| run.report)
}

pub fn solve_detailed(
    graph: &Graph,
    seeds: &SeedSet,
    candidates: &[CandidateEdge],
    config: &SolverConfig,
) -> Result<AisRun> {
    config.validate()?;
    seeds.require_nonempty()?;
    if candidates.is_empty() {
        return Err(Error::argument("candidate pool is empty"));
    }
    let n = graph.node_count() as u32;
    if let Some(c) = candidates.iter().find(|c| c.u >= n || c.v >= n || !(0.0..=1.0).contains(&c.p)) {
        return Err(Error::argument(format!("invalid candidate {c:?}")));
    }

    let lambda = config.lambda();
    let scaled_delta = config.scaled_delta(candidates.len());
    let threshold = coverage_threshold(lambda, scaled_delta, config.beta);

    let t0 = Instant::now();
    let mut collection = prepare_collection(graph, seeds, candidates.len(), config)?;
    let sampling = t0.elapsed();
    let before = collection.seed_spread_estimate()?;

    let t1 = Instant::now();
    let selection = select_edges(&mut collection, candidates, config.k, config.update_seed());
    let selection_time = t1.elapsed();

    let report = SolutionReport {
        edges: selection.edges,
        scores: selection.scores,
        lambda,
        scaled_delta,
        threshold,
        theta: collection.theta(),
        initial_coverage: collection.initial_coverage(),
        final_coverage: collection.coverage_count(),
        spread_before: before.value,
        spread_before_half_width: before.half_width,
        spread_after: collection.seed_spread()?,
        cap_hit: collection.cap_hit(),
        degenerate: selection.degenerate,
        short: selection.short,
        timings: PhaseTimings { sampling, selection: selection_time },
    };
    Ok(AisRun { report, collection })
}
