//! Minimal separator inequalities.
//!
//! Fractional separation runs one maximum flow per candidate pair on a
//! vertex-split digraph: vertex `k` becomes `in = 2k -> out = 2k + 1` with the
//! vertex value as capacity, and every edge becomes two uncapacitated arcs
//! `out -> in`. Before that, vertices of value 0 are deleted (they can join any
//! separator for free) and adjacent vertices of value 1 are merged into one
//! uncuttable node, since a separator containing them is never violated.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::flow::{max_flow, CapDigraph};
use crate::formulation::FractionalPoint;
use crate::graph::{Graph, VertexId};

use super::{reach, Cut, INTEGRALITY_TOL, VIOLATION_TOL};

/// Vertex values this close to 0 or 1 are contracted away.
const CONTRACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsiMode {
    /// Every violated pair, duplicates removed.
    All,
    /// Stop at the first violated pair.
    First,
}

/// Uncontracted vertex-split digraph of `g` under `pt`.
pub fn build_msi_support_digraph(g: &Graph, pt: &FractionalPoint) -> CapDigraph {
    let inf = pt.val.iter().sum::<f64>() + 1.0;
    let mut d = CapDigraph::new(2 * g.n());
    for u in 0..g.n() {
        d.add_arc(2 * u, 2 * u + 1, pt.val[u]);
    }
    for &(u, v) in g.edges() {
        d.add_arc(2 * u + 1, 2 * v, inf);
        d.add_arc(2 * v + 1, 2 * u, inf);
    }
    d
}

/// Reduces `c` to an inclusion-minimal `(a, b)`-separator.
pub fn lift_to_minimal_separator(g: &Graph, c: &[VertexId], a: VertexId, b: VertexId) -> Result<Vec<VertexId>> {
    let mut blocked = vec![false; g.n()];
    for &u in c {
        blocked[u] = true;
    }
    if blocked[a] || blocked[b] || a == b {
        return Err(Error::NotASeparator(a, b));
    }
    let ra = reach(g, a, &blocked);
    if ra[b] {
        return Err(Error::NotASeparator(a, b));
    }
    let touches = |set: &[bool], u: VertexId| g.incident(u).iter().any(|&(w, _)| set[w]);
    let first: Vec<VertexId> = c.iter().copied().filter(|&u| touches(&ra, u)).collect();
    blocked.iter_mut().for_each(|x| *x = false);
    for &u in &first {
        blocked[u] = true;
    }
    let rb = reach(g, b, &blocked);
    let mut s: Vec<VertexId> = first.into_iter().filter(|&u| touches(&rb, u)).collect();
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// The graph after deleting value-0 vertices and merging value-1 components.
struct Contracted {
    /// Smallest original vertex of each node.
    rep: Vec<VertexId>,
    /// Original vertex when the node is a single cuttable vertex.
    cuttable: Vec<Option<VertexId>>,
    /// Split-arc capacity; the sentinel for merged nodes.
    cap: Vec<f64>,
    adj: Vec<Vec<usize>>,
    deleted: Vec<VertexId>,
    inf: f64,
}

impl Contracted {
    fn new(g: &Graph, pt: &FractionalPoint, contract: bool) -> Self {
        let n = g.n();
        let zero = |u: usize| contract && pt.val[u] <= CONTRACT_TOL;
        let one = |u: usize| contract && pt.val[u] >= 1.0 - CONTRACT_TOL;
        let inf = pt.val.iter().sum::<f64>() + 1.0;
        let mut node_of = vec![None; n];
        let mut rep = Vec::new();
        let mut cuttable = Vec::new();
        let mut cap = Vec::new();
        let mut deleted = Vec::new();
        for s in 0..n {
            if node_of[s].is_some() {
                continue;
            }
            if zero(s) {
                deleted.push(s);
                continue;
            }
            let k = rep.len();
            node_of[s] = Some(k);
            rep.push(s);
            if one(s) {
                let mut stack = vec![s];
                while let Some(u) = stack.pop() {
                    for &(w, _) in g.incident(u) {
                        if node_of[w].is_none() && one(w) {
                            node_of[w] = Some(k);
                            stack.push(w);
                        }
                    }
                }
                cuttable.push(None);
                cap.push(inf);
            } else {
                cuttable.push(Some(s));
                cap.push(pt.val[s]);
            }
        }
        let mut adj = vec![Vec::new(); rep.len()];
        for &(u, v) in g.edges() {
            if let (Some(p), Some(q)) = (node_of[u], node_of[v]) {
                if p != q {
                    adj[p].push(q);
                    adj[q].push(p);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Self { rep, cuttable, cap, adj, deleted, inf }
    }

    fn digraph(&self) -> CapDigraph {
        let k = self.rep.len();
        let mut d = CapDigraph::new(2 * k);
        for p in 0..k {
            d.add_arc(2 * p, 2 * p + 1, self.cap[p]);
        }
        for p in 0..k {
            for &q in &self.adj[p] {
                d.add_arc(2 * p + 1, 2 * q, self.inf);
            }
        }
        d
    }
}

/// Violated minimal separator inequalities at `pt`, with contraction.
pub fn separate_msi_fractional(g: &Graph, pt: &FractionalPoint, mode: MsiMode) -> Vec<Cut> {
    separate_msi_fractional_with(g, pt, mode, true)
}

/// As [`separate_msi_fractional`], with the value-0/value-1 contraction optional.
pub fn separate_msi_fractional_with(g: &Graph, pt: &FractionalPoint, mode: MsiMode, contract: bool) -> Vec<Cut> {
    let h = Contracted::new(g, pt, contract);
    let k = h.rep.len();
    let node_val: Vec<f64> = h.rep.iter().map(|&u| pt.val[u]).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&p, &q| node_val[q].total_cmp(&node_val[p]).then(p.cmp(&q)));
    let digraph = h.digraph();
    let mut cuts = Vec::new();
    let mut seen = HashSet::new();
    for (i, &p) in order.iter().enumerate() {
        for &q in &order[i + 1..] {
            let threshold = node_val[p] + node_val[q] - 1.0;
            if threshold <= VIOLATION_TOL {
                break;
            }
            if h.adj[p].binary_search(&q).is_ok() {
                continue;
            }
            let flow = max_flow(&digraph, 2 * p + 1, 2 * q);
            if flow.value >= threshold - VIOLATION_TOL {
                continue;
            }
            let side = &flow.source_side;
            let mut c: Vec<VertexId> = (0..k)
                .filter(|&r| side[2 * r] && !side[2 * r + 1])
                .filter_map(|r| h.cuttable[r])
                .collect();
            c.extend_from_slice(&h.deleted);
            let (a, b) = (h.rep[p], h.rep[q]);
            let s = lift_to_minimal_separator(g, &c, a, b).expect("minimum cut separates its terminals");
            let cut = Cut::msi(g, a, b, s, &pt.x);
            if cut.violation > VIOLATION_TOL && seen.insert(cut.key()) {
                cuts.push(cut);
                if mode == MsiMode::First {
                    return cuts;
                }
            }
        }
    }
    cuts
}

/// Connectivity cuts for an integral point: one per component of the covered
/// vertices when there is more than one.
pub fn separate_msi_integer(g: &Graph, pt: &FractionalPoint) -> Result<Vec<Cut>> {
    if let Some(e) = pt.x.iter().position(|&v| v > INTEGRALITY_TOL && v < 1.0 - INTEGRALITY_TOL) {
        return Err(Error::NotIntegral(e));
    }
    if let Some(u) = pt.val.iter().position(|&v| v > 1.0 + INTEGRALITY_TOL) {
        return Err(Error::DegreeViolated(u));
    }
    let covered: Vec<bool> = pt.val.iter().map(|&v| v >= 1.0 - INTEGRALITY_TOL).collect();
    let comps = g.induced_components(&covered);
    if comps.len() <= 1 {
        return Ok(Vec::new());
    }
    let mut cuts = Vec::new();
    let mut seen = HashSet::new();
    for (i, comp) in comps.iter().enumerate() {
        let a = comp[0];
        let b = comps[if i == 0 { 1 } else { 0 }][0];
        let mut in_comp = vec![false; g.n()];
        for &u in comp {
            in_comp[u] = true;
        }
        let mut boundary: Vec<VertexId> = comp
            .iter()
            .flat_map(|&u| g.incident(u).iter().map(|&(w, _)| w))
            .filter(|&w| !in_comp[w])
            .collect();
        boundary.sort_unstable();
        boundary.dedup();
        let s = lift_to_minimal_separator(g, &boundary, a, b)?;
        let cut = Cut::msi(g, a, b, s, &pt.x);
        if seen.insert(cut.key()) {
            cuts.push(cut);
        }
    }
    Ok(cuts)
}
