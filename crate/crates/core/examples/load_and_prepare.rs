//! Load an edge list, assign weighted-cascade probabilities, pick seeds and
//! build a candidate pool.
//!
//! `cargo run --example load_and_prepare [edge-list]`

use ima::bench::top_out_degree;
use ima::graph::{generate_candidates, load_edge_list, read_edge_list_file, CandidateMode, MissingProbability};

const DEMO: &str = "\
# u v (no probabilities: weighted cascade is applied)
10 11
10 12
11 12
12 13
13 14
14 10
20 21
21 22
";

fn main() -> ima::Result<()> {
    let loaded = match std::env::args().nth(1) {
        Some(path) => read_edge_list_file(path.as_ref(), true)?,
        None => load_edge_list(DEMO.as_bytes(), true)?,
    };
    println!("{:?}", loaded.stats);
    let graph = loaded.graph.assign_wic_probabilities();
    println!("{} nodes, {} edges, mean p {:.3}", graph.node_count(), graph.edge_count(), graph.mean_probability());

    let seeds = top_out_degree(&graph, 2)?;
    let labels: Vec<u64> = seeds.ids().iter().map(|&s| graph.label(s)).collect();
    println!("seeds (original ids): {labels:?}");

    let all = generate_candidates(&graph, &seeds, CandidateMode::All, MissingProbability::GlobalMean, 0)?;
    let few = generate_candidates(&graph, &seeds, CandidateMode::Sample(3), MissingProbability::Constant(0.1), 7)?;
    println!("{} candidates in full pool; sample of 3:", all.len());
    for c in few {
        println!("  {} -> {}  p = {:.3}", graph.label(c.u), graph.label(c.v), c.p);
    }
    Ok(())
}
