//! File-based experiment: write an instance, run AIS through the same path as
//! the command line, then sweep k and print CSV.

use ima::bench::{
    gen_instance, run_experiment, sweep, write_csv, Aggregate, CandidateSource, ExperimentConfig, InstanceKind,
    SeedSource,
};

fn main() -> ima::Result<()> {
    let dir = std::env::temp_dir().join("ima-example-sweep");
    let files = gen_instance(&InstanceKind::ErdosRenyi { n: 200, p_edge: 0.03 }, 11)?.write_to(&dir)?;

    let mut cfg = ExperimentConfig::new(&files.graph, SeedSource::File(files.seeds), CandidateSource::Sample(200));
    cfg.k = 5;
    cfg.delta = 0.05;
    let report = run_experiment(&cfg)?;
    println!("{}", report.to_json()?);

    let rows = sweep(&cfg, &[1, 2, 4, 8], 3, Aggregate::Mean)?;
    write_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}
