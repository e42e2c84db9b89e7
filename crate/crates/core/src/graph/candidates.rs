use std::collections::HashSet;

use log::warn;
use rand::seq::index;
use rand::Rng;

use super::{CandidateEdge, Graph, NodeId, SeedSet};
use crate::error::{Error, Result};
use crate::stream::{self, Domain};

/// How candidate pairs are drawn from `(S × V) \ E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateMode {
    /// Every eligible pair.
    All,
    /// This many pairs, uniformly without replacement.
    Sample(usize),
}

/// Replacement for an average that has no incident edges to average over.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MissingProbability {
    #[default]
    GlobalMean,
    Constant(f64),
}

/// Builds candidate edges from seeds to non-seed nodes.
///
/// Each candidate `(u, v)` gets the mean of `u`'s average out-edge probability
/// and `v`'s average in-edge probability; a side without edges contributes the
/// `missing` value instead. Output is sorted by `(u, v)`.
pub fn generate_candidates(
    graph: &Graph,
    seeds: &SeedSet,
    mode: CandidateMode,
    missing: MissingProbability,
    rng_seed: u64,
) -> Result<Vec<CandidateEdge>> {
    seeds.require_nonempty()?;
    let fallback = match missing {
        MissingProbability::GlobalMean => graph.mean_probability(),
        MissingProbability::Constant(p) if (0.0..=1.0).contains(&p) => p,
        MissingProbability::Constant(p) => {
            return Err(Error::argument(format!("fallback probability {p} outside [0, 1]")))
        }
    };
    let mean = |it: &mut dyn Iterator<Item = f64>| {
        let (sum, count) = it.fold((0.0, 0usize), |(s, c), p| (s + p, c + 1));
        if count == 0 {
            fallback
        } else {
            sum / count as f64
        }
    };
    let score = |u: NodeId, v: NodeId| {
        let out_avg = mean(&mut graph.out_edges(u).map(|e| e.1));
        let in_avg = mean(&mut graph.in_edges(v).map(|e| e.1));
        CandidateEdge::new(u, v, (out_avg + in_avg) / 2.0)
    };

    let n = graph.node_count();
    let others: Vec<NodeId> = (0..n as NodeId).filter(|&v| !seeds.contains(v)).collect();
    let existing: usize =
        seeds.ids().iter().map(|&u| graph.out_edges(u).filter(|&(v, _)| !seeds.contains(v)).count()).sum();
    let pool = seeds.len() * others.len() - existing;

    let enumerate_all = || {
        let mut out = Vec::with_capacity(pool);
        for &u in seeds.ids() {
            let taken: HashSet<NodeId> = graph.out_edges(u).map(|e| e.0).collect();
            out.extend(others.iter().filter(|v| !taken.contains(v)).map(|&v| score(u, v)));
        }
        out
    };

    let limit = match mode {
        CandidateMode::All => return Ok(enumerate_all()),
        CandidateMode::Sample(limit) if limit >= pool => {
            if limit > pool {
                warn!("candidate limit {limit} exceeds pool of {pool}; using the whole pool");
            }
            return Ok(enumerate_all());
        }
        CandidateMode::Sample(limit) => limit,
    };

    let mut rng = stream::rng(rng_seed, Domain::Candidates, 0);
    let mut picked: Vec<CandidateEdge> = if 2 * limit > pool {
        let all = enumerate_all();
        index::sample(&mut rng, pool, limit).into_iter().map(|i| all[i]).collect()
    } else {
        // sparse draw: rejection over the |S| x |V \ S| grid
        let mut chosen = HashSet::with_capacity(limit);
        let mut out = Vec::with_capacity(limit);
        let grid = seeds.len() * others.len();
        while out.len() < limit {
            let cell = rng.gen_range(0..grid);
            let (u, v) = (seeds.ids()[cell / others.len()], others[cell % others.len()]);
            if !graph.has_edge(u, v) && chosen.insert((u, v)) {
                out.push(score(u, v));
            }
        }
        out
    };
    picked.sort_by_key(|c| c.key());
    Ok(picked)
}
