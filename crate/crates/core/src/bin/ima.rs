use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ima::bench::{
    evaluate_solution, gen_instance, run_experiment, sweep, write_csv, write_report, Aggregate, CandidateSource,
    ExperimentConfig, InstanceKind, Method, ProbabilitySource, SeedSource,
};
use ima::diffusion::{exact_spread, monte_carlo_spread};
use ima::graph::{
    generate_candidates, read_candidates, read_edge_list_file, read_seeds, write_candidates, CandidateMode,
    MissingProbability,
};
use ima::rr::DEFAULT_CAP;
use ima::{Error, Graph, Result, SeedSet};

#[derive(Parser)]
#[command(name = "ima", version, about = "Influence maximization by edge augmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select k edges with AIS and evaluate them.
    Solve(RunArgs),
    /// Select k edges with a baseline method and evaluate them.
    Baseline(RunArgs),
    /// Estimate the spread of a seed set, optionally with added edges.
    Eval(EvalArgs),
    /// Exact spread by enumeration (small graphs), or Monte-Carlo with --mc.
    Oracle(OracleArgs),
    /// Build a candidate file from seeds to non-neighbours.
    GenCandidates(GenCandidatesArgs),
    /// Write a synthetic instance (graph, seeds, candidates).
    GenInstance(GenInstanceArgs),
    /// Run one method over several k values.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Probabilities {
    Auto,
    File,
    Wic,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Read every line as an undirected edge.
    #[arg(long)]
    undirected: bool,
    #[arg(long, value_enum, default_value = "auto")]
    probabilities: Probabilities,
}

impl GraphArgs {
    fn load(&self) -> Result<Graph> {
        let g = read_edge_list_file(&self.graph, !self.undirected)?;
        let missing = g.stats.missing_probability;
        Ok(match self.probabilities {
            Probabilities::Wic => g.graph.assign_wic_probabilities(),
            Probabilities::Auto if missing > 0 => g.graph.assign_wic_probabilities(),
            Probabilities::File if missing > 0 => {
                return Err(Error::Argument(format!("{missing} edges have no probability")))
            }
            _ => g.graph,
        })
    }

    fn source(&self) -> ProbabilitySource {
        match self.probabilities {
            Probabilities::Auto => ProbabilitySource::Auto,
            Probabilities::File => ProbabilitySource::File,
            Probabilities::Wic => ProbabilitySource::Wic,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Seed file, one node id per line.
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Used when --seeds is absent: `top-outdeg:N` or `random:N`.
    #[arg(long, default_value = "top-outdeg:50")]
    seed_strategy: String,
    /// Candidate file, `u v p` per line.
    #[arg(long)]
    candidates: Option<PathBuf>,
    /// Used when --candidates is absent: `all` or `sample:N`.
    #[arg(long, default_value = "all")]
    candidate_mode: String,
    /// Candidate probability used for a side without edges (default: mean edge probability).
    #[arg(long)]
    missing_p: Option<f64>,
}

fn parse_count(text: &str, prefix: &str) -> Option<usize> {
    text.strip_prefix(prefix)?.strip_prefix(':')?.parse().ok()
}

fn parse_mode(text: &str) -> Result<CandidateMode> {
    if text == "all" {
        return Ok(CandidateMode::All);
    }
    parse_count(text, "sample")
        .map(CandidateMode::Sample)
        .ok_or_else(|| Error::Argument(format!("candidate mode {text:?} is not `all` or `sample:N`")))
}

impl InputArgs {
    fn seed_source(&self) -> Result<SeedSource> {
        if let Some(path) = &self.seeds {
            return Ok(SeedSource::File(path.clone()));
        }
        let s = self.seed_strategy.as_str();
        if let Some(n) = parse_count(s, "top-outdeg") {
            Ok(SeedSource::TopOutDegree(n))
        } else if let Some(n) = parse_count(s, "random") {
            Ok(SeedSource::Random(n))
        } else {
            Err(Error::Argument(format!("seed strategy {s:?} is not `top-outdeg:N` or `random:N`")))
        }
    }

    fn candidate_source(&self) -> Result<CandidateSource> {
        if let Some(path) = &self.candidates {
            return Ok(CandidateSource::File(path.clone()));
        }
        Ok(match parse_mode(&self.candidate_mode)? {
            CandidateMode::All => CandidateSource::All,
            CandidateMode::Sample(n) => CandidateSource::Sample(n),
        })
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 50)]
    k: usize,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 0.001)]
    delta: f64,
    /// Divide the RR coverage target by this factor (>1 waives the guarantee).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// `ais` or a baseline: rand, outdeg, prob, sinf, ais-no-prob, ais-no-update, mc-greedy.
    #[arg(long)]
    method: Option<String>,
    /// Monte-Carlo worlds for mc-greedy.
    #[arg(long, default_value_t = 10_000)]
    r: u64,
    #[arg(long, default_value_t = 0.1)]
    eval_eps: f64,
    #[arg(long, default_value_t = 0.01)]
    eval_delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum RR sets per sampling phase.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Add wall-clock phase times to the report.
    #[arg(long)]
    timings: bool,
}

impl RunArgs {
    fn config(&self, default_method: Option<Method>) -> Result<ExperimentConfig> {
        let method = match (&self.method, default_method) {
            (Some(m), _) => m.parse()?,
            (None, Some(m)) => m,
            (None, None) => return Err(Error::Argument("--method is required".into())),
        };
        let mut cfg = ExperimentConfig::new(
            self.input.graph.graph.clone(),
            self.input.seed_source()?,
            self.input.candidate_source()?,
        );
        cfg.directed = !self.input.graph.undirected;
        cfg.probabilities = self.input.graph.source();
        cfg.missing_probability = self.input.missing_p;
        cfg.k = self.k;
        cfg.epsilon = self.eps;
        cfg.delta = self.delta;
        cfg.beta = self.beta;
        cfg.method = method;
        cfg.r = self.r;
        cfg.eval_epsilon = self.eval_eps;
        cfg.eval_delta = self.eval_delta;
        cfg.seed = self.seed;
        cfg.cap = self.cap;
        cfg.timings = self.timings;
        Ok(cfg)
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    seeds: PathBuf,
    /// Added edges in candidate format.
    #[arg(long)]
    solution: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    eval_eps: f64,
    #[arg(long, default_value_t = 0.01)]
    eval_delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    seeds: PathBuf,
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Use this many Monte-Carlo cascades instead of enumeration.
    #[arg(long)]
    mc: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenCandidatesArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    seeds: PathBuf,
    /// `all` or `sample:N`.
    #[arg(long, default_value = "all")]
    candidate_mode: String,
    #[arg(long)]
    missing_p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Path,
    Star,
    ErdosRenyi,
    TwoCluster,
}

#[derive(Args)]
struct GenInstanceArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    p_edge: f64,
    #[arg(long, default_value_t = 3)]
    bridges: usize,
    #[arg(long, default_value_t = 6)]
    hub_degree: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated k values.
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, default_value = "mean")]
    aggregate: String,
}

fn open_seeds(path: &Path, graph: &Graph) -> Result<SeedSet> {
    read_seeds(BufReader::new(File::open(path)?), graph)
}

fn open_solution(path: Option<&PathBuf>, graph: &Graph) -> Result<Vec<ima::CandidateEdge>> {
    match path {
        Some(p) => read_candidates(BufReader::new(File::open(p)?), graph),
        None => Ok(Vec::new()),
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// `x` rounded to 12 significant digits.
fn significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (11 - x.abs().log10().floor() as i64).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Returns true when some sampling phase stopped at its cap.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve(args) => run_one(&args, Some(Method::Ais)),
        Command::Baseline(args) => {
            let cfg = args.config(None)?;
            if cfg.method == Method::Ais {
                return Err(Error::Argument("use `solve` for AIS".into()));
            }
            run_one(&args, None)
        }
        Command::Eval(args) => {
            let graph = args.graph.load()?;
            let seeds = open_seeds(&args.seeds, &graph)?;
            let added = open_solution(args.solution.as_ref(), &graph)?;
            for c in &added {
                c.validate(&graph, &seeds)?;
            }
            let e = evaluate_solution(&graph, &added, &seeds, args.eval_eps, args.eval_delta, args.seed, args.cap)?;
            let mut w = output(args.out.as_ref())?;
            writeln!(w, "{}", serde_json::to_string_pretty(&e)?)?;
            w.flush()?;
            Ok(e.cap_hit)
        }
        Command::Oracle(args) => {
            let graph = args.graph.load()?;
            let seeds = open_seeds(&args.seeds, &graph)?;
            let added = open_solution(args.solution.as_ref(), &graph)?;
            match args.mc {
                Some(runs) => {
                    let e = monte_carlo_spread(&graph, &added, &seeds, runs, args.seed)?;
                    println!("{} +- {}", significant(e.value), significant(e.half_width));
                }
                None => println!("{}", significant(exact_spread(&graph, &added, &seeds)?)),
            }
            Ok(false)
        }
        Command::GenCandidates(args) => {
            let graph = args.graph.load()?;
            let seeds = open_seeds(&args.seeds, &graph)?;
            let missing = args.missing_p.map_or(MissingProbability::GlobalMean, MissingProbability::Constant);
            let cands = generate_candidates(&graph, &seeds, parse_mode(&args.candidate_mode)?, missing, args.seed)?;
            let mut w = output(args.out.as_ref())?;
            write_candidates(&graph, &cands, &mut w)?;
            w.flush()?;
            Ok(false)
        }
        Command::GenInstance(args) => {
            let kind = match args.kind {
                Kind::Path => InstanceKind::Path { n: args.n },
                Kind::Star => InstanceKind::Star { n: args.n },
                Kind::ErdosRenyi => InstanceKind::ErdosRenyi { n: args.n, p_edge: args.p_edge },
                Kind::TwoCluster => InstanceKind::TwoCluster { bridges: args.bridges, hub_degree: args.hub_degree },
            };
            let files = gen_instance(&kind, args.seed)?.write_to(&args.out)?;
            println!("{}\n{}\n{}", files.graph.display(), files.seeds.display(), files.candidates.display());
            Ok(false)
        }
        Command::Sweep(args) => {
            let cfg = args.run.config(Some(Method::Ais))?;
            let aggregate: Aggregate = args.aggregate.parse()?;
            let rows = sweep(&cfg, &args.ks, args.repeats, aggregate)?;
            let mut w = output(args.run.out.as_ref())?;
            match args.run.format {
                Format::Csv => write_csv(&rows, &mut w)?,
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&rows)?)?,
            }
            w.flush()?;
            Ok(rows.iter().any(|r| r.cap_hit))
        }
    }
}

fn run_one(args: &RunArgs, default_method: Option<Method>) -> Result<bool> {
    let cfg = args.config(default_method)?;
    let report = run_experiment(&cfg)?;
    write_report(&report, args.out.as_deref(), matches!(args.format, Format::Csv))?;
    Ok(report.any_cap_hit())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            log::warn!("sampling stopped at the cap; estimates carry no guarantee");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
