//! Influence maximization with edge augmentation (IMA) under the
//! Independent Cascade model.
//!
//! Given a directed graph with edge propagation probabilities, a seed set `S`
//! and a pool of candidate edges leaving the seeds, the crate selects `k`
//! edges whose insertion maximizes the expected spread of `S`. The main
//! solver ([`solver::solve`]) works on reverse-reachable (RR) sets truncated
//! at seed hits and updates them in place after every selection; the
//! [`baselines`] module holds the comparison heuristics and a Monte-Carlo
//! greedy, and [`diffusion`] provides forward simulation plus an exact
//! enumeration oracle for small graphs.
//!
//! ```
//! use ima::bench::{gen_instance, InstanceKind};
//! use ima::solver::{solve, SolverConfig};
//!
//! let inst = gen_instance(&InstanceKind::two_cluster(), 1).unwrap();
//! let cfg = SolverConfig { k: 2, epsilon: 0.5, delta: 0.1, ..SolverConfig::default() };
//! let report = solve(&inst.graph, &inst.seeds, &inst.candidates, &cfg).unwrap();
//! assert_eq!(report.edges.len(), 2);
//! ```

pub mod baselines;
pub mod bench;
pub mod diffusion;
pub mod error;
pub mod graph;
pub mod rr;
pub mod solver;
pub mod stream;

pub use error::{Error, Result};
pub use graph::{CandidateEdge, Graph, NodeId, SeedSet};
