//! Exhaustive reference procedures for small instances.

use crate::error::{Error, Result};
use crate::graph::{is_connected_matching, EdgeId, Graph, Matching, VertexId};
use crate::io::Instance;

/// Matchings are enumerated when `m <= MAX_ORACLE_EDGES` or
/// `n <= MAX_ORACLE_VERTICES` (few vertices bound the matching count).
pub const MAX_ORACLE_EDGES: usize = 24;
pub const MAX_ORACLE_VERTICES: usize = 12;
pub const MAX_SEPARATOR_VERTICES: usize = 12;

fn check_size(g: &Graph) -> Result<()> {
    if g.m() <= MAX_ORACLE_EDGES || g.n() <= MAX_ORACLE_VERTICES {
        Ok(())
    } else {
        Err(Error::TooLarge(format!("n = {}, m = {}", g.n(), g.m())))
    }
}

/// Calls `visit` with every matching of `g` (sorted edge ids), the empty one first.
fn for_each_matching(g: &Graph, visit: &mut impl FnMut(&[EdgeId])) {
    fn rec(g: &Graph, e: usize, covered: &mut [bool], cur: &mut Vec<EdgeId>, visit: &mut impl FnMut(&[EdgeId])) {
        if e == g.m() {
            visit(cur);
            return;
        }
        rec(g, e + 1, covered, cur, visit);
        let (u, v) = g.edge(e);
        if !covered[u] && !covered[v] {
            covered[u] = true;
            covered[v] = true;
            cur.push(e);
            rec(g, e + 1, covered, cur, visit);
            cur.pop();
            covered[u] = false;
            covered[v] = false;
        }
    }
    let mut covered = vec![false; g.n()];
    rec(g, 0, &mut covered, &mut Vec::new(), visit);
}

/// Every connected matching of `g`, including the empty one.
pub fn connected_matchings(g: &Graph) -> Result<Vec<Matching>> {
    check_size(g)?;
    let mut out = Vec::new();
    for_each_matching(g, &mut |edges| {
        let m = Matching::new(g, edges.to_vec()).expect("enumerated edges form a matching");
        if is_connected_matching(g, &m) {
            out.push(m);
        }
    });
    Ok(out)
}

/// Optimum by enumeration. Ties go to the lexicographically smallest edge set.
pub fn brute_force_wcm(inst: &Instance) -> Result<(f64, Matching)> {
    let g = &inst.graph;
    check_size(g)?;
    let mut best = (0.0, Vec::new());
    let mut members = vec![false; g.n()];
    for_each_matching(g, &mut |edges| {
        let w: f64 = edges.iter().map(|&e| inst.weights[e]).sum();
        let better = w > best.0 + 1e-9 || (w > best.0 - 1e-9 && edges < best.1.as_slice());
        if !better {
            return;
        }
        members.iter_mut().for_each(|b| *b = false);
        for &e in edges {
            let (u, v) = g.edge(e);
            members[u] = true;
            members[v] = true;
        }
        if g.is_induced_connected(&members) {
            best = (w, edges.to_vec());
        }
    });
    let matching = Matching::new(g, best.1).expect("enumerated edges form a matching");
    Ok((best.0, matching))
}

/// Whether removing `set` leaves no path between `a` and `b`.
pub fn is_separator(g: &Graph, set: &[VertexId], a: VertexId, b: VertexId) -> bool {
    let mut blocked = vec![false; g.n()];
    for &u in set {
        blocked[u] = true;
    }
    if blocked[a] || blocked[b] {
        return false;
    }
    let mut seen = vec![false; g.n()];
    let mut stack = vec![a];
    seen[a] = true;
    while let Some(u) = stack.pop() {
        if u == b {
            return false;
        }
        for &(w, _) in g.incident(u) {
            if !seen[w] && !blocked[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    true
}

/// Whether `set` separates `a` from `b` and no single vertex can be dropped.
pub fn is_minimal_separator(g: &Graph, set: &[VertexId], a: VertexId, b: VertexId) -> bool {
    is_separator(g, set, a, b)
        && (0..set.len()).all(|i| {
            let rest: Vec<VertexId> = set.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &u)| u).collect();
            !is_separator(g, &rest, a, b)
        })
}

/// All inclusion-minimal `(a, b)`-separators, each sorted, in subset order.
pub fn enumerate_minimal_separators(g: &Graph, a: VertexId, b: VertexId) -> Result<Vec<Vec<VertexId>>> {
    if g.n() > MAX_SEPARATOR_VERTICES {
        return Err(Error::TooLarge(format!("n = {}", g.n())));
    }
    if a == b || g.are_adjacent(a, b) {
        return Err(Error::AdjacentPair(a, b));
    }
    let others: Vec<VertexId> = (0..g.n()).filter(|&u| u != a && u != b).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << others.len()) {
        let set: Vec<VertexId> =
            others.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, &u)| u).collect();
        if is_minimal_separator(g, &set, a, b) {
            out.push(set);
        }
    }
    Ok(out)
}
