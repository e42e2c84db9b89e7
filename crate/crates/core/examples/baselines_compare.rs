//! Every method on the same instance, scored with the exact oracle.

use ima::baselines::BaselineKind;
use ima::bench::{gen_instance, CandidateSource, ExperimentConfig, InstanceKind, Method, SeedSource};
use ima::diffusion::exact_spread;
use ima::CandidateEdge;

fn main() -> ima::Result<()> {
    let inst = gen_instance(&InstanceKind::two_cluster(), 0)?;
    let mut cfg = ExperimentConfig::new("", SeedSource::TopOutDegree(0), CandidateSource::All);
    cfg.k = 3;
    cfg.delta = 0.1;
    cfg.r = 2_000;

    let methods = std::iter::once(Method::Ais).chain(BaselineKind::ALL.map(Method::Baseline));
    for method in methods {
        cfg.method = method;
        let report = inst.run(&cfg)?;
        let edges: Vec<CandidateEdge> = report
            .edges
            .iter()
            .map(|e| {
                let node = |label| inst.graph.node_of_label(label).expect("label from this graph");
                CandidateEdge::new(node(e.u), node(e.v), e.p)
            })
            .collect();
        println!(
            "{:<14} estimated {:>7.3}  exact {:>7.3}",
            method.to_string(),
            report.spread_after.value,
            exact_spread(&inst.graph, &edges, &inst.seeds)?
        );
    }
    Ok(())
}
