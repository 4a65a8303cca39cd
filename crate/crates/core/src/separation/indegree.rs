//! Indegree inequalities. Orienting every edge from the endpoint with the
//! larger vertex value to the smaller one maximizes the left-hand side.

use crate::formulation::FractionalPoint;
use crate::graph::Graph;

use super::{Cut, VIOLATION_TOL};

/// Indegrees of the value-greedy orientation: `u -> v` iff `val(u) > val(v)`,
/// or the values tie and `u < v`.
pub fn orientation_indegrees(g: &Graph, pt: &FractionalPoint) -> Vec<usize> {
    let mut d = vec![0; g.n()];
    for &(u, v) in g.edges() {
        // edges are stored with u < v
        if pt.val[u] >= pt.val[v] {
            d[v] += 1;
        } else {
            d[u] += 1;
        }
    }
    d
}

/// `Σ_u (1 - d_u) val(u)`.
pub fn indegree_lhs(indegree: &[usize], val: &[f64]) -> f64 {
    indegree.iter().zip(val).map(|(&d, &v)| (1.0 - d as f64) * v).sum()
}

pub fn separate_indegree(g: &Graph, pt: &FractionalPoint) -> Option<Cut> {
    let d = orientation_indegrees(g, pt);
    if indegree_lhs(&d, &pt.val) <= 1.0 + VIOLATION_TOL {
        return None;
    }
    Some(Cut::indegree(g, d, &pt.x))
}
