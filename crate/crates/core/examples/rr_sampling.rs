//! Reverse-reachable sets: truncated vs untruncated sampling, the coverage
//! stopping rule, and the binary dump.

use ima::bench::{gen_instance, InstanceKind};
use ima::diffusion::exact_spread;
use ima::rr::{sample_fixed, sample_until_coverage, RrCollection, SamplingConfig};
use ima::solver::coverage_threshold;

fn main() -> ima::Result<()> {
    let inst = gen_instance(&InstanceKind::ErdosRenyi { n: 40, p_edge: 0.08 }, 3)?;
    let (g, s) = (&inst.graph, &inst.seeds);

    for truncate in [true, false] {
        let cfg = SamplingConfig { master_seed: 1, truncate, ..Default::default() };
        let c = sample_fixed(g, s, 50_000, &cfg)?;
        let sizes: usize = (0..c.theta() as usize).map(|i| c.members(i).len()).sum();
        println!(
            "truncate={truncate:<5} spread {:.3}, mean set size {:.2}",
            c.seed_spread()?,
            sizes as f64 / c.theta() as f64
        );
    }

    let threshold = coverage_threshold(0.05, 0.01, 1.0);
    let c = sample_until_coverage(g, s, threshold, &SamplingConfig::default())?;
    println!(
        "threshold {threshold:.0}: theta {}, coverage {}, spread {:.3}",
        c.theta(),
        c.coverage_count(),
        c.seed_spread()?
    );
    if let Ok(truth) = exact_spread(g, &[], s) {
        println!("exact {truth:.3}");
    }

    let mut dump = Vec::new();
    c.write_binary(&mut dump)?;
    let back = RrCollection::read_binary(dump.as_slice(), s)?;
    back.audit(s)?;
    println!("dump: {} bytes, {} sets restored", dump.len(), back.theta());
    Ok(())
}
