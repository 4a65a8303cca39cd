//! Problem instances: the canonical text format, STP import and random
//! G(n, p) generation.
//!
//! Canonical format, LF line endings:
//!
//! ```text
//! wcm <n> <m>
//! e <u> <v> <w>      (exactly m lines, 0-based endpoints, u < v)
//! ```
//!
//! Lines starting with `#` are comments and may appear anywhere.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Canonical,
    Mwcs,
    Gmwcs,
    Generated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: Graph,
    pub weights: Vec<f64>,
    pub name: String,
    pub origin: Origin,
    /// Original node label of each dense vertex id (identity for canonical and
    /// generated instances, 1-based node numbers for STP imports).
    pub labels: Vec<u64>,
}

impl Instance {
    pub fn new(graph: Graph, weights: Vec<f64>, name: impl Into<String>, origin: Origin) -> Result<Self> {
        if weights.len() != graph.m() {
            return Err(Error::Format(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.m()
            )));
        }
        if let Some(e) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::Format(format!("weight of edge {e} is not finite")));
        }
        let labels = (0..graph.n() as u64).collect();
        Ok(Self { graph, weights, name: name.into(), origin, labels })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    /// Whether every weight is an integer, which lets the search prune with
    /// integral rounding of bounds.
    pub fn has_integral_weights(&self) -> bool {
        self.weights.iter().all(|w| w.fract() == 0.0 && w.abs() < 1e15)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

pub fn parse_canonical(text: &str, name: &str) -> Result<Instance> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        match toks.next() {
            Some("wcm") => {
                if header.is_some() {
                    return Err(parse_err(line, "repeated header"));
                }
                let n = parse_num(toks.next(), line, "vertex count")?;
                let m = parse_num(toks.next(), line, "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, m) = header.ok_or_else(|| parse_err(line, "edge before header"))?;
                let u: usize = parse_num(toks.next(), line, "endpoint")?;
                let v: usize = parse_num(toks.next(), line, "endpoint")?;
                let w: f64 = parse_num(toks.next(), line, "weight")?;
                if !w.is_finite() {
                    return Err(parse_err(line, "weight is not finite"));
                }
                if u >= n || v >= n {
                    return Err(parse_err(line, format!("endpoint out of range 0..{n}")));
                }
                if edges.len() == m {
                    return Err(parse_err(line, format!("more than the declared {m} edges")));
                }
                edges.push((u, v));
                weights.push(w);
            }
            Some(tok) => return Err(parse_err(line, format!("unexpected token '{tok}'"))),
            None => unreachable!(),
        }
        if toks.next().is_some() {
            return Err(parse_err(line, "trailing tokens"));
        }
    }
    let (n, m) = header.ok_or_else(|| Error::Format("missing 'wcm <n> <m>' header".into()))?;
    if edges.len() != m {
        return Err(Error::Format(format!("header declares {m} edges, found {}", edges.len())));
    }
    let graph = Graph::new(n, &edges)?;
    Instance::new(graph, weights, name, Origin::Canonical)
}

pub fn write_canonical(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "wcm {} {}", inst.n(), inst.m());
    for (&(u, v), w) in inst.graph.edges().iter().zip(&inst.weights) {
        // `Display` for f64 prints the shortest representation that round-trips.
        let _ = writeln!(out, "e {u} {v} {w}");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StpMode {
    /// Edge weight is the sum of the endpoint node weights.
    Mwcs,
    /// Edge weights come from the edge records; node weights are ignored.
    Gmwcs,
}

/// Section names whose `<tag> <node> <weight>` lines carry node weights.
fn is_node_weight_section(name: &str) -> bool {
    matches!(
        name,
        "terminals" | "nodeweights" | "nodeweight" | "weights" | "vertexweights" | "prizes"
    )
}

/// Imports an STP-style sectioned file. Keywords are case-insensitive and
/// unknown sections are skipped.
pub fn import_stp(text: &str, mode: StpMode, name: &str) -> Result<Instance> {
    let mut section: Option<String> = None;
    let mut saw_graph = false;
    let mut nodes: Option<usize> = None;
    let mut raw_edges: Vec<(usize, u64, u64, Option<f64>)> = Vec::new();
    let mut node_weight: Vec<(usize, u64, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let Some(first) = toks.first() else { continue };
        let key = first.to_ascii_lowercase();
        if key.starts_with('#') {
            continue;
        }
        match key.as_str() {
            "section" => {
                let sec = toks.get(1).map(|s| s.to_ascii_lowercase()).unwrap_or_default();
                if sec == "graph" {
                    saw_graph = true;
                }
                section = Some(sec);
                continue;
            }
            "end" => {
                section = None;
                continue;
            }
            "eof" => break,
            _ => {}
        }
        let Some(sec) = section.as_deref() else { continue };
        if sec == "graph" {
            match key.as_str() {
                "nodes" => nodes = Some(parse_num(toks.get(1).copied(), line, "node count")?),
                "e" => {
                    let u: u64 = parse_num(toks.get(1).copied(), line, "node")?;
                    let v: u64 = parse_num(toks.get(2).copied(), line, "node")?;
                    let w = match toks.get(3) {
                        Some(t) => Some(parse_num::<f64>(Some(t), line, "edge weight")?),
                        None => None,
                    };
                    raw_edges.push((line, u, v, w));
                }
                _ => {}
            }
        } else if is_node_weight_section(sec) && toks.len() >= 3 && first.parse::<f64>().is_err() {
            let node: u64 = parse_num(toks.get(1).copied(), line, "node")?;
            let w: f64 = parse_num(toks.get(2).copied(), line, "node weight")?;
            node_weight.push((line, node, w));
        }
    }

    if !saw_graph {
        return Err(Error::Format("missing 'SECTION Graph'".into()));
    }
    let n = nodes.ok_or_else(|| Error::Format("Graph section has no 'Nodes' line".into()))?;
    let to_dense = |line: usize, node: u64| -> Result<usize> {
        if node == 0 || node as usize > n {
            Err(parse_err(line, format!("unknown node {node} (Nodes = {n})")))
        } else {
            Ok(node as usize - 1)
        }
    };

    let mut edges = Vec::with_capacity(raw_edges.len());
    for &(line, u, v, _) in &raw_edges {
        edges.push((to_dense(line, u)?, to_dense(line, v)?));
    }
    let weights = match mode {
        StpMode::Gmwcs => raw_edges
            .iter()
            .map(|&(line, _, _, w)| w.ok_or_else(|| parse_err(line, "edge record has no weight")))
            .collect::<Result<Vec<f64>>>()?,
        StpMode::Mwcs => {
            let mut nw: Vec<Option<f64>> = vec![None; n];
            for &(line, node, w) in &node_weight {
                nw[to_dense(line, node)?] = Some(w);
            }
            edges
                .iter()
                .map(|&(u, v)| match (nw[u], nw[v]) {
                    (Some(a), Some(b)) => Ok(a + b),
                    (None, _) => Err(Error::Format(format!("node {} has no weight record", u + 1))),
                    (_, None) => Err(Error::Format(format!("node {} has no weight record", v + 1))),
                })
                .collect::<Result<Vec<f64>>>()?
        }
    };
    let graph = Graph::new(n, &edges)?;
    let origin = match mode {
        StpMode::Mwcs => Origin::Mwcs,
        StpMode::Gmwcs => Origin::Gmwcs,
    };
    let mut inst = Instance::new(graph, weights, name, origin)?;
    inst.labels = (1..=n as u64).collect();
    Ok(inst)
}

/// Picks the STP mode from the file contents: weighted edge records mean GMWCS.
pub fn detect_stp_mode(text: &str) -> StpMode {
    let mut in_graph = false;
    for raw in text.lines() {
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first().map(|t| t.to_ascii_lowercase()).as_deref() {
            Some("section") => {
                in_graph = toks.get(1).is_some_and(|s| s.eq_ignore_ascii_case("graph"));
            }
            Some("end") => in_graph = false,
            Some("e") if in_graph && toks.len() >= 4 => return StpMode::Gmwcs,
            _ => {}
        }
    }
    StpMode::Mwcs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeightDist {
    Uniform { low: f64, high: f64 },
    Gaussian { mean: f64, sd: f64 },
}

impl WeightDist {
    fn validate(&self) -> Result<()> {
        match *self {
            WeightDist::Uniform { low, high } if !(low.is_finite() && high.is_finite()) || low > high => {
                Err(Error::InvalidDistribution(format!("uniform({low}, {high})")))
            }
            WeightDist::Gaussian { mean, sd } if !(mean.is_finite() && sd.is_finite()) || sd < 0.0 => {
                Err(Error::InvalidDistribution(format!("gaussian({mean}, {sd})")))
            }
            _ => Ok(()),
        }
    }
}

impl std::str::FromStr for WeightDist {
    type Err = Error;

    /// Parses `uniform:a,b` or `gaussian:mu,sigma`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDistribution(format!("cannot parse '{s}'"));
        let (kind, params) = s.split_once(':').ok_or_else(bad)?;
        let (a, b) = params.split_once(',').ok_or_else(bad)?;
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        let dist = match kind.trim().to_ascii_lowercase().as_str() {
            "uniform" => WeightDist::Uniform { low: a, high: b },
            "gaussian" | "normal" => WeightDist::Gaussian { mean: a, sd: b },
            _ => return Err(bad()),
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// Samples a binomial random graph G(n, p) with i.i.d. edge weights.
///
/// Pairs are visited in lexicographic order and skipped geometrically, which
/// keeps sparse graphs on many vertices cheap while including every pair
/// independently with probability `p`.
pub fn generate_gnp(n: usize, p: f64, dist: WeightDist, seed: u64) -> Result<Instance> {
    if n == 0 {
        return Err(Error::Format("generator needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Format(format!("edge probability {p} outside [0, 1]")));
    }
    dist.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = match dist {
        WeightDist::Gaussian { mean, sd } => Some(Normal::new(mean, sd).map_err(|e| Error::InvalidDistribution(e.to_string()))?),
        WeightDist::Uniform { .. } => None,
    };
    let draw = |rng: &mut ChaCha8Rng| match dist {
        WeightDist::Uniform { low, high } => low + (high - low) * rng.gen::<f64>(),
        WeightDist::Gaussian { .. } => normal.as_ref().unwrap().sample(rng),
    };

    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let total = n as u128 * (n as u128 - 1) / 2;
    if p > 0.0 {
        // Linear index over pairs (u, v), u < v, in lexicographic order.
        let log_q = (1.0 - p).ln();
        let mut idx: u128 = 0;
        let (mut u, mut row_start) = (0usize, 0u128);
        loop {
            if p < 1.0 {
                let r: f64 = rng.gen();
                let skip = ((1.0 - r).ln() / log_q).floor();
                if !skip.is_finite() || skip >= (total - idx) as f64 {
                    break;
                }
                idx += skip as u128;
            }
            if idx >= total {
                break;
            }
            while idx >= row_start + (n - 1 - u) as u128 {
                row_start += (n - 1 - u) as u128;
                u += 1;
            }
            let v = u + 1 + (idx - row_start) as usize;
            edges.push((u, v));
            weights.push(draw(&mut rng));
            idx += 1;
        }
    }
    let graph = Graph::new(n, &edges)?;
    Instance::new(graph, weights, format!("gnp_n{n}_p{p}_s{seed}"), Origin::Generated)
}
