//! Forward Monte-Carlo simulation against the exact oracle, on the
//! two-cluster graph with every candidate edge inserted.

use ima::bench::{gen_instance, InstanceKind};
use ima::diffusion::{exact_spread, monte_carlo_spread};

fn main() -> ima::Result<()> {
    let inst = gen_instance(&InstanceKind::two_cluster(), 0)?;
    let added = &inst.candidates;
    let truth = exact_spread(&inst.graph, added, &inst.seeds)?;
    for runs in [100, 10_000, 1_000_000] {
        let est = monte_carlo_spread(&inst.graph, added, &inst.seeds, runs, 42)?;
        println!("{runs:>8} runs: {:.4} +- {:.4}  (exact {truth:.4})", est.value, est.half_width);
    }
    Ok(())
}
