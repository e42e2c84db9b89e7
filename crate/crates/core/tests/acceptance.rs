//! Acceptance harness. Runs every criterion in order, prints one PASS/FAIL
//! line each and exits non-zero if any criterion fails or overruns its time
//! budget.

mod common;

use std::process::{Command, ExitCode};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_small, subsets, Shape, Small};
use ima::baselines::{ais_no_prob, mc_greedy, outdeg_select, prob_select, rand_select, sinf_select, WorldSet};
use ima::bench::{gen_instance, InstanceKind};
use ima::diffusion::{exact_augmented_identity_check, exact_spread};
use ima::rr::{sample_fixed, RrCollection, SamplingConfig, DEFAULT_CAP};
use ima::solver::{prepare_collection, soft_update, solve_detailed, SolverConfig};
use ima::{CandidateEdge, Graph, SeedSet};

static AUDITS: AtomicUsize = AtomicUsize::new(0);
static AUDIT_FAILURES: AtomicUsize = AtomicUsize::new(0);

fn audit(c: &RrCollection, seeds: &SeedSet) {
    AUDITS.fetch_add(1, Ordering::Relaxed);
    if let Err(e) = c.audit(seeds) {
        eprintln!("audit: {e}");
        AUDIT_FAILURES.fetch_add(1, Ordering::Relaxed);
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn exact(g: &Graph, a: &[CandidateEdge], s: &SeedSet) -> f64 {
    exact_spread(g, a, s).unwrap()
}

fn sampling(seed: u64, truncate: bool) -> SamplingConfig {
    SamplingConfig { master_seed: seed, truncate, cap: DEFAULT_CAP }
}

fn identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let shape = Shape { max_pool: 3, ..Shape::default() };
    let mut worst = 0f64;
    for _ in 0..1000 {
        let Small { graph, seeds, pool } = random_small(&mut rng, &shape);
        let e = rng.gen_range(0..pool.len());
        let mut added = Vec::new();
        for (i, c) in pool.iter().enumerate() {
            if i != e && rng.gen_bool(0.5) {
                added.push(*c);
            }
        }
        let (lhs, rhs) = exact_augmented_identity_check(&graph, &added, &seeds, pool[e]).unwrap();
        worst = worst.max((lhs - rhs).abs());
    }
    Outcome { pass: worst <= 1e-10, detail: format!("1000 instances, max |lhs - rhs| = {worst:.2e}") }
}

fn unbiased() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut misses = 0;
    let mut worst = 0f64;
    for i in 0..20 {
        let Small { graph, seeds, .. } = random_small(&mut rng, &Shape::default());
        let c = sample_fixed(&graph, &seeds, 100_000, &sampling(i, false)).unwrap();
        audit(&c, &seeds);
        let est = c.seed_spread_estimate().unwrap();
        let truth = exact(&graph, &[], &seeds);
        let err = (est.value - truth).abs();
        if err > 3.0 * est.half_width {
            misses += 1;
        }
        if est.half_width > 0.0 {
            worst = worst.max(err / est.half_width);
        }
    }
    Outcome { pass: misses <= 1, detail: format!("{misses}/20 outside 3 half-widths, worst {worst:.2} half-widths") }
}

fn soft_update_mean() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let shape = Shape { min_nodes: 6, max_pool: 4, ..Shape::default() };
    let Small { graph, seeds, pool } = loop {
        let inst = random_small(&mut rng, &shape);
        if inst.pool.len() >= 2 {
            break inst;
        }
    };
    let a = &pool[..2];
    let truth = exact(&graph, a, &seeds);
    let replays = 200;
    let values: Vec<f64> = (0..replays)
        .map(|r| {
            let mut c = sample_fixed(&graph, &seeds, 20_000, &sampling(1_000 + r, true)).unwrap();
            for (step, e) in a.iter().enumerate() {
                soft_update(&mut c, e, step as u64, 5_000 + r);
            }
            audit(&c, &seeds);
            c.seed_spread().unwrap()
        })
        .collect();
    let mean = values.iter().sum::<f64>() / replays as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (replays - 1) as f64;
    let sigma = (var / replays as f64).sqrt();
    let z = (mean - truth).abs() / sigma;
    Outcome { pass: z <= 3.0, detail: format!("mean {mean:.4} vs exact {truth:.4}, {z:.2} sigma") }
}

fn approximation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let factor = 1.0 - (-1f64).exp() - 0.3;
    let mut passed = 0;
    let mut min_ratio = f64::INFINITY;
    for i in 0..50 {
        let Small { graph, seeds, pool } = random_small(&mut rng, &Shape::default());
        let k = rng.gen_range(1..=3).min(pool.len());
        let cfg = SolverConfig { epsilon: 0.3, delta: 0.1, k, master_seed: i, ..SolverConfig::default() };
        let run = solve_detailed(&graph, &seeds, &pool, &cfg).unwrap();
        audit(&run.collection, &seeds);
        let got = exact(&graph, &run.report.edges, &seeds);
        let opt = subsets(pool.len(), k)
            .iter()
            .map(|idx| exact(&graph, &idx.iter().map(|&j| pool[j]).collect::<Vec<_>>(), &seeds))
            .fold(0.0, f64::max);
        if got >= factor * opt - 1e-12 {
            passed += 1;
        }
        min_ratio = min_ratio.min(got / opt);
    }
    Outcome { pass: passed >= 48, detail: format!("{passed}/50 above {factor:.3} OPT, min ratio {min_ratio:.4}") }
}

fn naive_mc_greedy(g: &Graph, s: &SeedSet, pool: &[CandidateEdge], k: usize, r: u64, seed: u64) -> Vec<CandidateEdge> {
    let mut worlds = WorldSet::new(g, s, pool, r, seed).unwrap();
    let mut taken = vec![false; pool.len()];
    let mut out = Vec::new();
    for _ in 0..k.min(pool.len()) {
        let mut best: Option<(u64, usize)> = None;
        for j in (0..pool.len()).filter(|&j| !taken[j]) {
            let gain = worlds.gain(j);
            let better = match best {
                None => true,
                Some((bg, bj)) => gain > bg || (gain == bg && pool[j].key() < pool[bj].key()),
            };
            if better {
                best = Some((gain, j));
            }
        }
        let (_, j) = best.unwrap();
        taken[j] = true;
        worlds.commit(j);
        out.push(pool[j]);
    }
    out
}

fn exact_greedy(g: &Graph, s: &SeedSet, pool: &[CandidateEdge], k: usize) -> Vec<CandidateEdge> {
    let mut chosen: Vec<CandidateEdge> = Vec::new();
    let mut taken = vec![false; pool.len()];
    for _ in 0..k.min(pool.len()) {
        let mut best: Option<(f64, usize)> = None;
        for j in (0..pool.len()).filter(|&j| !taken[j]) {
            let mut with = chosen.clone();
            with.push(pool[j]);
            let v = exact(g, &with, s);
            let better = match best {
                None => true,
                Some((bv, bj)) => v > bv || (v == bv && pool[j].key() < pool[bj].key()),
            };
            if better {
                best = Some((v, j));
            }
        }
        let (_, j) = best.unwrap();
        taken[j] = true;
        chosen.push(pool[j]);
    }
    chosen
}

fn mc_equivalences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let wide = Shape { min_nodes: 8, max_nodes: 14, max_edges: 30, max_seeds: 3, max_pool: 10, deterministic: false };
    let mut lazy_mismatch = 0;
    for i in 0..30 {
        let Small { graph, seeds, pool } = random_small(&mut rng, &wide);
        let k = pool.len().min(4);
        let lazy = mc_greedy(&graph, &seeds, &pool, k, 300, i).unwrap().edges;
        if lazy != naive_mc_greedy(&graph, &seeds, &pool, k, 300, i) {
            lazy_mismatch += 1;
        }
    }
    let det = Shape { deterministic: true, max_pool: 6, ..Shape::default() };
    let mut exact_mismatch = 0;
    for i in 0..30 {
        let Small { graph, seeds, pool } = random_small(&mut rng, &det);
        let k = pool.len().min(3);
        let mc = mc_greedy(&graph, &seeds, &pool, k, 1, i).unwrap().edges;
        if mc != exact_greedy(&graph, &seeds, &pool, k) {
            exact_mismatch += 1;
        }
    }
    Outcome {
        pass: lazy_mismatch == 0 && exact_mismatch == 0,
        detail: format!(
            "lazy vs naive mismatches {lazy_mismatch}/30, deterministic vs exact greedy {exact_mismatch}/30"
        ),
    }
}

fn ordering() -> Outcome {
    let inst = gen_instance(&InstanceKind::two_cluster(), 0).unwrap();
    let (g, s, pool) = (&inst.graph, &inst.seeds, &inst.candidates);
    let cfg = SolverConfig { k: 3, epsilon: 0.5, delta: 0.1, master_seed: 0, ..SolverConfig::default() };
    let run = solve_detailed(g, s, pool, &cfg).unwrap();
    audit(&run.collection, s);
    let ais = exact(g, &run.report.edges, s);
    let collection = prepare_collection(g, s, pool.len(), &cfg).unwrap();
    audit(&collection, s);
    let sinf = exact(g, &sinf_select(&collection, pool, 3).edges, s);
    let outdeg = exact(g, &outdeg_select(g, pool, 3).edges, s);
    let prob = exact(g, &prob_select(pool, 3).edges, s);
    let all = subsets(pool.len(), 3);
    let rand_mean = all.iter().map(|idx| exact(g, &idx.iter().map(|&j| pool[j]).collect::<Vec<_>>(), s)).sum::<f64>()
        / all.len() as f64;
    let rand_draw = exact(g, &rand_select(pool, 3, 0).edges, s);
    let pass = ais >= sinf && sinf >= rand_mean && ais > outdeg && ais >= prob;
    Outcome {
        pass,
        detail: format!(
            "AIS {ais:.4}, SINF {sinf:.4}, RAND E {rand_mean:.4} (draw {rand_draw:.4}), OUTDEG {outdeg:.4}, PROB {prob:.4}"
        ),
    }
}

fn truncation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let theta = 200_000u64;
    let mut failing = 0;
    let mut worst = 0f64;
    for i in 0..10 {
        let Small { graph, seeds, .. } = random_small(&mut rng, &Shape::default());
        let t = sample_fixed(&graph, &seeds, theta, &sampling(2 * i, true)).unwrap();
        let u = sample_fixed(&graph, &seeds, theta, &sampling(2 * i + 1, false)).unwrap();
        audit(&t, &seeds);
        audit(&u, &seeds);
        let mut ok = true;
        for v in 0..graph.node_count() as u32 {
            let qt = t.marginal(v) as f64 / theta as f64;
            let qu = u.marginal(v) as f64 / theta as f64;
            let sd = (qt * (1.0 - qt) / theta as f64 + qu * (1.0 - qu) / theta as f64).sqrt();
            let diff = (qt - qu).abs();
            if diff > 3.0 * sd {
                ok = false;
            }
            if sd > 0.0 {
                worst = worst.max(diff / sd);
            }
        }
        if !ok {
            failing += 1;
        }
    }
    Outcome { pass: failing == 0, detail: format!("{failing}/10 instances disagree, worst node at {worst:.2} sigma") }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let files = gen_instance(&InstanceKind::two_cluster(), 0).unwrap().write_to(dir.path()).unwrap();
    let methods = ["ais", "rand", "outdeg", "prob", "sinf", "ais-no-prob", "ais-no-update", "mc-greedy"];
    let mut differing = Vec::new();
    for m in methods {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{m}-{rep}.json"));
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_ima"));
            if m == "ais" {
                cmd.arg("solve");
            } else {
                cmd.args(["baseline", "--method", m]);
            }
            cmd.arg("--graph").arg(&files.graph).arg("--seeds").arg(&files.seeds);
            cmd.arg("--candidates").arg(&files.candidates).arg("--out").arg(&out);
            cmd.args(["--k", "3", "--eps", "0.5", "--delta", "0.1", "--r", "500", "--seed", "11"]);
            let status = cmd.status().unwrap();
            outputs.push(status.success().then(|| std::fs::read(&out).unwrap()));
        }
        if outputs[0].is_none() || outputs[0] != outputs[1] {
            differing.push(m);
        }
    }
    Outcome {
        pass: differing.is_empty(),
        detail: format!("{} methods byte-identical, differing: {differing:?}", methods.len() - differing.len()),
    }
}

fn beta_knob() -> Outcome {
    let inst = gen_instance(&InstanceKind::two_cluster(), 0).unwrap();
    let (g, s, pool) = (&inst.graph, &inst.seeds, &inst.candidates);
    let mut results = Vec::new();
    for beta in [1.0, 2.0, 4.0] {
        let cfg = SolverConfig { k: 3, epsilon: 0.5, delta: 0.1, beta, master_seed: 9, ..SolverConfig::default() };
        let run = solve_detailed(g, s, pool, &cfg).unwrap();
        audit(&run.collection, s);
        results.push((beta, run.report.theta, exact(g, &run.report.edges, s)));
    }
    let (_, theta1, spread1) = results[0];
    let mut pass = true;
    let mut parts = Vec::new();
    for &(beta, theta, spread) in &results[1..] {
        let loss = 1.0 - spread / spread1;
        let scale = theta1 as f64 / theta as f64 / beta;
        pass &= loss < 0.05 && (0.8..=1.2).contains(&scale);
        parts.push(format!("beta {beta}: loss {:.2}%, theta ratio / beta {scale:.3}", 100.0 * loss));
    }
    Outcome { pass, detail: format!("theta(1) = {theta1}; {}", parts.join("; ")) }
}

fn audits() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    for i in 0..20 {
        let Small { graph, seeds, pool } = random_small(&mut rng, &Shape::default());
        let cfg =
            SolverConfig { k: pool.len().min(3), epsilon: 0.5, delta: 0.1, master_seed: i, ..SolverConfig::default() };
        let run = solve_detailed(&graph, &seeds, &pool, &cfg).unwrap();
        audit(&run.collection, &seeds);

        let mut c = prepare_collection(&graph, &seeds, pool.len(), &cfg).unwrap();
        ais_no_prob(&mut c, &pool, cfg.k, i);
        audit(&c, &seeds);

        let mut u = sample_fixed(&graph, &seeds, 5_000, &sampling(i, false)).unwrap();
        for (step, e) in pool.iter().enumerate() {
            soft_update(&mut u, e, step as u64, i);
        }
        audit(&u, &seeds);

        let mut buf = Vec::new();
        run.collection.write_binary(&mut buf).unwrap();
        audit(&RrCollection::read_binary(buf.as_slice(), &seeds).unwrap(), &seeds);
    }
    let total = AUDITS.load(Ordering::Relaxed);
    let failures = AUDIT_FAILURES.load(Ordering::Relaxed);
    Outcome { pass: failures == 0, detail: format!("{total} full recounts, {failures} mismatches") }
}

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "augmentation identity", 60, identity),
        (2, "RR estimator unbiasedness", 120, unbiased),
        (3, "soft-update mean", 120, soft_update_mean),
        (4, "approximation quality", 300, approximation),
        (5, "MC-Greedy equivalences", 120, mc_equivalences),
        (6, "two-cluster ordering", 30, ordering),
        (7, "truncation neutrality", 60, truncation),
        (8, "report determinism", 120, determinism),
        (9, "beta knob", 60, beta_knob),
        (10, "structural audits", 60, audits),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let t0 = Instant::now();
        let out = run();
        let elapsed = t0.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = out.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "criterion {id:>2} {name}: {} | {} | {:.1}s of {budget}s",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {}/10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
