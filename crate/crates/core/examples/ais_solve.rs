//! Run AIS on the two-cluster instance and check the pick with the exact oracle.

use ima::bench::{gen_instance, InstanceKind};
use ima::diffusion::exact_spread;
use ima::solver::{solve_detailed, SolverConfig};

fn main() -> ima::Result<()> {
    let inst = gen_instance(&InstanceKind::two_cluster(), 0)?;
    let cfg = SolverConfig { k: 3, epsilon: 0.5, delta: 0.01, master_seed: 5, ..SolverConfig::default() };
    let run = solve_detailed(&inst.graph, &inst.seeds, &inst.candidates, &cfg)?;
    run.collection.audit(&inst.seeds)?;
    let r = &run.report;

    println!("lambda {:.4}, threshold {:.0}, theta {}", r.lambda, r.threshold, r.theta);
    for (e, score) in r.edges.iter().zip(&r.scores) {
        println!("  pick {} -> {}  p = {:.2}  score {score}", e.u, e.v, e.p);
    }
    println!("estimated spread {:.3} -> {:.3}", r.spread_before, r.spread_after);
    println!(
        "exact spread     {:.3} -> {:.3}",
        exact_spread(&inst.graph, &[], &inst.seeds)?,
        exact_spread(&inst.graph, &r.edges, &inst.seeds)?
    );
    println!("sampling {:?}, selection {:?}", r.timings.sampling, r.timings.selection);
    Ok(())
}
