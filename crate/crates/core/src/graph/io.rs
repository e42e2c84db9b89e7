//! Text formats: edge lists, seed files and candidate files.
//!
//! All formats are whitespace separated, one record per line, with `#`
//! starting a comment. Ids in files are the original node labels.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{CandidateEdge, Graph, NodeId, SeedSet};
use crate::error::{Error, Result};

/// Counters collected while reading an edge list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub lines: usize,
    pub duplicates: usize,
    pub self_loops: usize,
    /// Edges read without an explicit probability (stored as `0`).
    pub missing_probability: usize,
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub stats: LoadStats,
}

fn records<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.into())),
        Ok(line) => {
            let body = line.split('#').next().unwrap_or("").trim().to_owned();
            (!body.is_empty()).then_some(Ok((i + 1, body)))
        }
    })
}

fn parse_id(tok: &str, line: usize) -> Result<u64> {
    tok.parse().map_err(|_| Error::Parse { line, message: format!("bad node id {tok:?}") })
}

fn parse_prob(tok: &str, line: usize) -> Result<f64> {
    let value: f64 = tok.parse().map_err(|_| Error::Parse { line, message: format!("bad probability {tok:?}") })?;
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ProbabilityRange { line, value });
    }
    Ok(value)
}

/// Reads an edge list of `u v` or `u v p` lines.
///
/// Ids are densified in order of first appearance. Self-loops are dropped,
/// repeated pairs keep their first occurrence, and undirected input yields both
/// arcs.
pub fn load_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<LoadedGraph> {
    let mut stats = LoadStats::default();
    let mut labels = Vec::new();
    let mut dense: HashMap<u64, NodeId> = HashMap::new();
    let mut seen = HashSet::new();
    let mut edges = Vec::new();

    let mut intern = |label: u64, labels: &mut Vec<u64>| -> NodeId {
        *dense.entry(label).or_insert_with(|| {
            labels.push(label);
            (labels.len() - 1) as NodeId
        })
    };

    for rec in records(reader) {
        let (line, body) = rec?;
        stats.lines += 1;
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(Error::Parse { line, message: format!("expected `u v [p]`, got {body:?}") });
        }
        let u = intern(parse_id(toks[0], line)?, &mut labels);
        let v = intern(parse_id(toks[1], line)?, &mut labels);
        let p = match toks.get(2) {
            Some(t) => Some(parse_prob(t, line)?),
            None => None,
        };
        if u == v {
            stats.self_loops += 1;
            continue;
        }
        let arcs: &[(NodeId, NodeId)] = if directed { &[(u, v)] } else { &[(u, v), (v, u)] };
        for &(a, b) in arcs {
            if seen.insert((a, b)) {
                if p.is_none() {
                    stats.missing_probability += 1;
                }
                edges.push((a, b, p.unwrap_or(0.0)));
            } else {
                stats.duplicates += 1;
            }
        }
    }

    let graph = Graph::with_labels(labels, &edges)?;
    Ok(LoadedGraph { graph, stats })
}

pub fn read_edge_list_file(path: &Path, directed: bool) -> Result<LoadedGraph> {
    load_edge_list(BufReader::new(File::open(path)?), directed)
}

/// Writes `u v p` lines using original labels.
pub fn write_edge_list<W: Write>(graph: &Graph, mut w: W) -> Result<()> {
    writeln!(w, "# nodes {} edges {}", graph.node_count(), graph.edge_count())?;
    for (u, v, p) in graph.edges() {
        writeln!(w, "{} {} {}", graph.label(u), graph.label(v), p)?;
    }
    Ok(())
}

fn lookup(graph: &Graph, label: u64, line: usize) -> Result<NodeId> {
    graph.node_of_label(label).ok_or_else(|| Error::Parse { line, message: format!("unknown node {label}") })
}

/// Seed file: one original id per line.
pub fn read_seeds<R: BufRead>(reader: R, graph: &Graph) -> Result<SeedSet> {
    let mut ids = Vec::new();
    for rec in records(reader) {
        let (line, body) = rec?;
        ids.push(lookup(graph, parse_id(&body, line)?, line)?);
    }
    SeedSet::new(graph.node_count(), ids)
}

pub fn write_seeds<W: Write>(graph: &Graph, seeds: &SeedSet, mut w: W) -> Result<()> {
    for &s in seeds.ids() {
        writeln!(w, "{}", graph.label(s))?;
    }
    Ok(())
}

/// Candidate file: `u v p` per line with original ids.
pub fn read_candidates<R: BufRead>(reader: R, graph: &Graph) -> Result<Vec<CandidateEdge>> {
    let mut out = Vec::new();
    for rec in records(reader) {
        let (line, body) = rec?;
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::Parse { line, message: format!("expected `u v p`, got {body:?}") });
        }
        let u = lookup(graph, parse_id(toks[0], line)?, line)?;
        let v = lookup(graph, parse_id(toks[1], line)?, line)?;
        out.push(CandidateEdge::new(u, v, parse_prob(toks[2], line)?));
    }
    Ok(out)
}

pub fn write_candidates<W: Write>(graph: &Graph, candidates: &[CandidateEdge], mut w: W) -> Result<()> {
    for c in candidates {
        writeln!(w, "{} {} {}", graph.label(c.u), graph.label(c.v), c.p)?;
    }
    Ok(())
}
