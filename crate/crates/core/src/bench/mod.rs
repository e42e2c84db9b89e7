//! Experiment harness: solution evaluation, instance generators, end-to-end
//! runs and `k` sweeps.

mod experiment;
mod instances;

use serde::{Deserialize, Serialize};

use crate::diffusion::SpreadEstimate;
use crate::error::{Error, Result};
use crate::graph::{Augmented, CandidateEdge, Graph, SeedSet};
use crate::rr::{sample_until_coverage, SamplingConfig};
use crate::solver::coverage_threshold;
use crate::stream::{self, Domain};

pub use experiment::{
    run_experiment, sweep, write_csv, write_report, Aggregate, CandidateSource, CsvRecord, ExperimentConfig, Method,
    PhaseMillis, ProbabilitySource, ReportEdge, RunFlags, RunReport, SeedSource, SolverDiagnostics, SweepRow,
    REPORT_SCHEMA,
};
pub use instances::{gen_instance, random_seeds, top_out_degree, Instance, InstanceFiles, InstanceKind};

/// Independent estimate of `σ(A, S)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub estimate: SpreadEstimate,
    /// Sampling stopped at the cap; the estimate carries no guarantee.
    pub cap_hit: bool,
}

/// Estimates `σ(A, S)` from untruncated RR sets on the augmented view,
/// sampling until seed coverage reaches the `(ε, δ)` threshold.
pub fn evaluate_solution(
    graph: &Graph,
    added: &[CandidateEdge],
    seeds: &SeedSet,
    eps: f64,
    delta: f64,
    master_seed: u64,
    cap: u64,
) -> Result<Evaluation> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::argument(format!("evaluation eps {eps} and delta {delta} must lie in (0, 1)")));
    }
    seeds.require_nonempty()?;
    let n = graph.node_count() as u32;
    if let Some(c) = added.iter().find(|c| c.u >= n || c.v >= n || !(0.0..=1.0).contains(&c.p)) {
        return Err(Error::argument(format!("invalid edge {c:?}")));
    }
    let view = Augmented::new(graph, added);
    let config = SamplingConfig { master_seed: stream::derive(master_seed, Domain::Evaluation), truncate: false, cap };
    let collection = sample_until_coverage(&view, seeds, coverage_threshold(eps, delta, 1.0), &config)?;
    Ok(Evaluation { estimate: collection.seed_spread_estimate()?, cap_hit: collection.cap_hit() })
}
