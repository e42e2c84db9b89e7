use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::instances::{random_seeds, top_out_degree, Instance};
use super::{evaluate_solution, Evaluation};
use crate::baselines::{
    ais_no_prob, ais_no_update, mc_greedy, outdeg_select, prob_select, rand_select, sinf_select, BaselineKind,
};
use crate::diffusion::SpreadEstimate;
use crate::error::{Error, Result};
use crate::graph::{
    generate_candidates, read_candidates, read_edge_list_file, read_seeds, CandidateEdge, CandidateMode, Graph,
    MissingProbability, SeedSet,
};
use crate::rr::DEFAULT_CAP;
use crate::solver::{prepare_collection, solve_detailed, SolverConfig};

pub const REPORT_SCHEMA: u32 = 1;

/// Where edge probabilities come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbabilitySource {
    /// File values; weighted cascade if any edge lacks one.
    #[default]
    Auto,
    File,
    Wic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedSource {
    File(PathBuf),
    TopOutDegree(usize),
    Random(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateSource {
    File(PathBuf),
    All,
    Sample(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Method {
    Ais,
    Baseline(BaselineKind),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Ais => f.write_str("ais"),
            Method::Baseline(kind) => kind.fmt(f),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("ais") {
            Ok(Method::Ais)
        } else {
            s.parse().map(Method::Baseline)
        }
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// How repeated runs are combined by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregate {
    #[default]
    Mean,
    Median,
}

impl Aggregate {
    fn apply(self, values: &mut [f64]) -> f64 {
        match self {
            Aggregate::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregate::Median => {
                values.sort_by(f64::total_cmp);
                let m = values.len() / 2;
                if values.len() % 2 == 1 {
                    values[m]
                } else {
                    (values[m - 1] + values[m]) / 2.0
                }
            }
        }
    }
}

impl FromStr for Aggregate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Aggregate::Mean),
            "median" => Ok(Aggregate::Median),
            _ => Err(Error::argument(format!("unknown aggregate {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: PathBuf,
    pub directed: bool,
    pub probabilities: ProbabilitySource,
    pub seeds: SeedSource,
    pub candidates: CandidateSource,
    /// Fallback for candidate probabilities when a side has no edges; `None`
    /// uses the mean over all edges.
    pub missing_probability: Option<f64>,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    pub method: Method,
    /// Worlds for MC-Greedy.
    pub r: u64,
    pub eval_epsilon: f64,
    pub eval_delta: f64,
    pub seed: u64,
    pub cap: u64,
    /// Include wall-clock phase times in the report (breaks byte equality).
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn new(graph: impl Into<PathBuf>, seeds: SeedSource, candidates: CandidateSource) -> Self {
        Self {
            graph: graph.into(),
            directed: true,
            probabilities: ProbabilitySource::Auto,
            seeds,
            candidates,
            missing_probability: None,
            k: 50,
            epsilon: 0.5,
            delta: 0.001,
            beta: 1.0,
            method: Method::Ais,
            r: 10_000,
            eval_epsilon: 0.1,
            eval_delta: 0.01,
            seed: 0,
            cap: DEFAULT_CAP,
            timings: false,
        }
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            epsilon: self.epsilon,
            delta: self.delta,
            k: self.k,
            beta: self.beta,
            master_seed: self.seed,
            cap: self.cap,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.solver().validate()?;
        for (name, x) in [("eval epsilon", self.eval_epsilon), ("eval delta", self.eval_delta)] {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::argument(format!("{name} {x} must lie in (0, 1)")));
            }
        }
        if self.method == Method::Baseline(BaselineKind::McGreedy) && self.r == 0 {
            return Err(Error::argument("mc-greedy needs r >= 1"));
        }
        if let Some(p) = self.missing_probability {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::argument(format!("fallback probability {p} outside [0, 1]")));
            }
        }
        if self.cap == 0 {
            return Err(Error::argument("cap must be at least 1"));
        }
        Ok(())
    }
}

/// A selected edge in original node ids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportEdge {
    pub u: u64,
    pub v: u64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseMillis {
    pub load: f64,
    pub sampling: f64,
    pub selection: f64,
    pub evaluation: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunFlags {
    /// Solver sampling stopped at the cap.
    pub cap_hit: bool,
    /// Evaluation sampling stopped at the cap.
    pub eval_cap_hit: bool,
    /// AIS filled some rounds by probability because every score was zero.
    pub degenerate: bool,
    /// Fewer than `k` edges were returned.
    pub short: bool,
    /// `beta > 1`: the solver sampled fewer sets than its guarantee needs.
    pub guarantee_waived: bool,
}

/// AIS internals, present for `method = ais`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub lambda: f64,
    pub scaled_delta: f64,
    pub threshold: f64,
    pub initial_coverage: u64,
    pub final_coverage: u64,
    pub internal_spread_before: f64,
    pub internal_spread_after: f64,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub config: ExperimentConfig,
    pub method: Method,
    pub nodes: usize,
    pub graph_edges: usize,
    pub seed_count: usize,
    pub candidate_count: usize,
    pub edges: Vec<ReportEdge>,
    pub spread_before: SpreadEstimate,
    pub spread_after: SpreadEstimate,
    /// RR sets sampled by the solver, if the method samples any.
    pub theta_solve: Option<u64>,
    pub theta_eval: u64,
    pub solver: Option<SolverDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<PhaseMillis>,
    pub flags: RunFlags,
}

/// One CSV line per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub method: String,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    pub seed: u64,
    pub selected: usize,
    pub spread_before: f64,
    pub spread_before_half_width: f64,
    pub spread_after: f64,
    pub spread_after_half_width: f64,
    pub theta_solve: Option<u64>,
    pub theta_eval: u64,
    pub cap_hit: bool,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn csv_record(&self) -> CsvRecord {
        CsvRecord {
            method: self.method.to_string(),
            k: self.config.k,
            epsilon: self.config.epsilon,
            delta: self.config.delta,
            beta: self.config.beta,
            seed: self.config.seed,
            selected: self.edges.len(),
            spread_before: self.spread_before.value,
            spread_before_half_width: self.spread_before.half_width,
            spread_after: self.spread_after.value,
            spread_after_half_width: self.spread_after.half_width,
            theta_solve: self.theta_solve,
            theta_eval: self.theta_eval,
            cap_hit: self.flags.cap_hit || self.flags.eval_cap_hit,
        }
    }

    pub fn any_cap_hit(&self) -> bool {
        self.flags.cap_hit || self.flags.eval_cap_hit
    }
}

/// Writes serializable rows as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Loaded inputs shared by every run of a sweep.
struct Prepared {
    graph: Graph,
    seeds: SeedSet,
    candidates: Vec<CandidateEdge>,
    load: Duration,
}

fn load_inputs(config: &ExperimentConfig) -> Result<Prepared> {
    let t0 = Instant::now();
    let loaded = read_edge_list_file(&config.graph, config.directed)?;
    let missing = loaded.stats.missing_probability;
    let graph = match config.probabilities {
        ProbabilitySource::Wic => loaded.graph.assign_wic_probabilities(),
        ProbabilitySource::File if missing > 0 => {
            return Err(Error::argument(format!("{missing} edges have no probability")));
        }
        ProbabilitySource::File => loaded.graph,
        ProbabilitySource::Auto if missing > 0 => {
            if missing < loaded.graph.edge_count() {
                warn!(
                    "{missing} of {} edges lack a probability; using weighted cascade for all",
                    loaded.graph.edge_count()
                );
            }
            loaded.graph.assign_wic_probabilities()
        }
        ProbabilitySource::Auto => loaded.graph,
    };
    info!("loaded {} nodes, {} edges", graph.node_count(), graph.edge_count());

    let seeds = match &config.seeds {
        SeedSource::File(path) => read_seeds(BufReader::new(File::open(path)?), &graph)?,
        SeedSource::TopOutDegree(count) => top_out_degree(&graph, *count)?,
        SeedSource::Random(count) => random_seeds(&graph, *count, config.seed)?,
    };
    seeds.require_nonempty()?;

    let missing = config.missing_probability.map_or(MissingProbability::GlobalMean, MissingProbability::Constant);
    let candidates = match &config.candidates {
        CandidateSource::File(path) => {
            let cands = read_candidates(BufReader::new(File::open(path)?), &graph)?;
            for c in &cands {
                c.validate(&graph, &seeds)?;
            }
            cands
        }
        CandidateSource::All => generate_candidates(&graph, &seeds, CandidateMode::All, missing, config.seed)?,
        CandidateSource::Sample(count) => {
            generate_candidates(&graph, &seeds, CandidateMode::Sample(*count), missing, config.seed)?
        }
    };
    if candidates.is_empty() {
        return Err(Error::argument("candidate pool is empty"));
    }
    Ok(Prepared { graph, seeds, candidates, load: t0.elapsed() })
}

/// Loads the inputs named by `config`, runs its method, evaluates the result
/// and returns the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let prepared = load_inputs(config)?;
    run_prepared(&prepared, config)
}

impl Instance {
    /// Runs `config.method` on this instance. Input paths in `config` are ignored.
    pub fn run(&self, config: &ExperimentConfig) -> Result<RunReport> {
        config.validate()?;
        for c in &self.candidates {
            c.validate(&self.graph, &self.seeds)?;
        }
        let prepared = Prepared {
            graph: self.graph.clone(),
            seeds: self.seeds.clone(),
            candidates: self.candidates.clone(),
            load: Duration::ZERO,
        };
        run_prepared(&prepared, config)
    }
}

fn run_prepared(p: &Prepared, config: &ExperimentConfig) -> Result<RunReport> {
    let solver_cfg = config.solver();
    let k = config.k;
    let mut flags = RunFlags { guarantee_waived: config.beta > 1.0, ..Default::default() };
    let mut theta_solve = None;
    let mut diagnostics = None;
    let mut sampling = Duration::ZERO;

    let t_sel = Instant::now();
    let edges = match config.method {
        Method::Ais => {
            let run = solve_detailed(&p.graph, &p.seeds, &p.candidates, &solver_cfg)?;
            run.collection.audit(&p.seeds)?;
            let r = run.report;
            sampling = r.timings.sampling;
            theta_solve = Some(r.theta);
            flags.cap_hit = r.cap_hit;
            flags.degenerate = r.degenerate;
            flags.short = r.short;
            diagnostics = Some(SolverDiagnostics {
                lambda: r.lambda,
                scaled_delta: r.scaled_delta,
                threshold: r.threshold,
                initial_coverage: r.initial_coverage,
                final_coverage: r.final_coverage,
                internal_spread_before: r.spread_before,
                internal_spread_after: r.spread_after,
                scores: r.scores,
            });
            r.edges
        }
        Method::Baseline(kind) => {
            let selection = if kind.needs_collection() {
                let t0 = Instant::now();
                let mut collection = prepare_collection(&p.graph, &p.seeds, p.candidates.len(), &solver_cfg)?;
                sampling = t0.elapsed();
                theta_solve = Some(collection.theta());
                flags.cap_hit = collection.cap_hit();
                let sel = match kind {
                    BaselineKind::Sinf => sinf_select(&collection, &p.candidates, k),
                    BaselineKind::AisNoUpdate => ais_no_update(&collection, &p.candidates, k),
                    _ => ais_no_prob(&mut collection, &p.candidates, k, solver_cfg.update_seed()),
                };
                collection.audit(&p.seeds)?;
                sel
            } else {
                match kind {
                    BaselineKind::Rand => rand_select(&p.candidates, k, config.seed),
                    BaselineKind::OutDeg => outdeg_select(&p.graph, &p.candidates, k),
                    BaselineKind::Prob => prob_select(&p.candidates, k),
                    _ => mc_greedy(&p.graph, &p.seeds, &p.candidates, k, config.r, config.seed)?,
                }
            };
            flags.short = selection.short;
            selection.edges
        }
    };
    let selection_time = t_sel.elapsed().saturating_sub(sampling);

    let t_eval = Instant::now();
    let evaluate = |added: &[CandidateEdge]| -> Result<Evaluation> {
        evaluate_solution(&p.graph, added, &p.seeds, config.eval_epsilon, config.eval_delta, config.seed, config.cap)
    };
    let before = evaluate(&[])?;
    let after = evaluate(&edges)?;
    flags.eval_cap_hit = before.cap_hit || after.cap_hit;
    let evaluation = t_eval.elapsed();

    let g = &p.graph;
    Ok(RunReport {
        schema: REPORT_SCHEMA,
        config: config.clone(),
        method: config.method,
        nodes: g.node_count(),
        graph_edges: g.edge_count(),
        seed_count: p.seeds.len(),
        candidate_count: p.candidates.len(),
        edges: edges.iter().map(|c| ReportEdge { u: g.label(c.u), v: g.label(c.v), p: c.p }).collect(),
        spread_before: before.estimate,
        spread_after: after.estimate,
        theta_solve,
        theta_eval: after.estimate.sample_count,
        solver: diagnostics,
        timings_ms: config.timings.then(|| PhaseMillis {
            load: millis(p.load),
            sampling: millis(sampling),
            selection: millis(selection_time),
            evaluation: millis(evaluation),
        }),
        flags,
    })
}

/// Aggregated result for one `k` of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: String,
    pub k: usize,
    pub repeats: usize,
    pub spread_before: f64,
    pub spread_after: f64,
    pub spread_after_half_width: f64,
    pub theta_solve: Option<f64>,
    pub cap_hit: bool,
}

/// Runs `config` once per `k` and repeat; repeat `i` uses seed `config.seed + i`.
pub fn sweep(config: &ExperimentConfig, ks: &[usize], repeats: usize, aggregate: Aggregate) -> Result<Vec<SweepRow>> {
    if ks.is_empty() || repeats == 0 {
        return Err(Error::argument("sweep needs at least one k and one repeat"));
    }
    let mut base = config.clone();
    base.k = ks[0];
    base.validate()?;
    let prepared = load_inputs(&base)?;
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let mut before = Vec::with_capacity(repeats);
        let mut after = Vec::with_capacity(repeats);
        let mut half = Vec::with_capacity(repeats);
        let mut theta = Vec::with_capacity(repeats);
        let mut cap_hit = false;
        for i in 0..repeats {
            let cfg = ExperimentConfig { k, seed: config.seed.wrapping_add(i as u64), ..config.clone() };
            cfg.validate()?;
            let report = run_prepared(&prepared, &cfg)?;
            before.push(report.spread_before.value);
            after.push(report.spread_after.value);
            half.push(report.spread_after.half_width);
            if let Some(t) = report.theta_solve {
                theta.push(t as f64);
            }
            cap_hit |= report.any_cap_hit();
        }
        rows.push(SweepRow {
            method: config.method.to_string(),
            k,
            repeats,
            spread_before: aggregate.apply(&mut before),
            spread_after: aggregate.apply(&mut after),
            spread_after_half_width: aggregate.apply(&mut half),
            theta_solve: (!theta.is_empty()).then(|| aggregate.apply(&mut theta)),
            cap_hit,
        });
    }
    Ok(rows)
}

/// Writes `report` to `path` as JSON or a one-line CSV.
pub fn write_report(report: &RunReport, path: Option<&std::path::Path>, csv_format: bool) -> Result<()> {
    let write = |w: &mut dyn Write| -> Result<()> {
        if csv_format {
            write_csv(&[report.csv_record()], w)
        } else {
            Ok(w.write_all(report.to_json()?.as_bytes())?)
        }
    };
    match path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write(&mut w)?;
            Ok(w.flush()?)
        }
        None => write(&mut std::io::stdout().lock()),
    }
}
