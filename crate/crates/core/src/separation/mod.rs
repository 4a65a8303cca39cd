//! Cut generation over the edge variables.
//!
//! Every cut is a `<=` row whose coefficients are indexed by edge id.

mod blossom;
mod indegree;
mod msi;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, Graph, VertexId};
use crate::lp::{Row, Sense};

pub use blossom::{separate_blossom_exact, separate_blossom_heuristic, BlossomSeparator};
pub use indegree::{indegree_lhs, orientation_indegrees, separate_indegree};
pub use msi::{
    build_msi_support_digraph, lift_to_minimal_separator, separate_msi_fractional, separate_msi_fractional_with,
    separate_msi_integer, MsiMode,
};

/// Minimum violation for a cut to be emitted.
pub const VIOLATION_TOL: f64 = 1e-5;
/// Values within this distance of 0 or 1 count as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutFamily {
    Msi,
    Indegree,
    Blossom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    Msi { a: VertexId, b: VertexId, separator: Vec<VertexId> },
    Indegree { indegree: Vec<usize> },
    Blossom { handle: Vec<VertexId> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub family: CutFamily,
    /// Sorted by edge id, no zeros.
    pub coeffs: Vec<(EdgeId, f64)>,
    pub rhs: f64,
    /// Left-hand side at the separated point minus `rhs`.
    pub violation: f64,
    pub witness: Witness,
}

fn collect(terms: BTreeMap<EdgeId, f64>) -> Vec<(EdgeId, f64)> {
    terms.into_iter().filter(|&(_, a)| a != 0.0).collect()
}

fn lhs(coeffs: &[(EdgeId, f64)], x: &[f64]) -> f64 {
    coeffs.iter().map(|&(e, a)| a * x[e]).sum()
}

impl Cut {
    /// `x(δ(a)) + x(δ(b)) - Σ_{u ∈ S} x(δ(u)) <= 1`.
    pub fn msi(g: &Graph, a: VertexId, b: VertexId, mut separator: Vec<VertexId>, x: &[f64]) -> Self {
        separator.sort_unstable();
        let mut terms = BTreeMap::new();
        for (u, sign) in [(a, 1.0), (b, 1.0)].into_iter().chain(separator.iter().map(|&s| (s, -1.0))) {
            for &(_, e) in g.incident(u) {
                *terms.entry(e).or_insert(0.0) += sign;
            }
        }
        let coeffs = collect(terms);
        let violation = lhs(&coeffs, x) - 1.0;
        Self { family: CutFamily::Msi, coeffs, rhs: 1.0, violation, witness: Witness::Msi { a, b, separator } }
    }

    /// `Σ_u (1 - d_u) x(δ(u)) <= 1`.
    pub fn indegree(g: &Graph, indegree: Vec<usize>, x: &[f64]) -> Self {
        let coeffs: Vec<(EdgeId, f64)> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| (e, 2.0 - indegree[u] as f64 - indegree[v] as f64))
            .filter(|&(_, a)| a != 0.0)
            .collect();
        let violation = lhs(&coeffs, x) - 1.0;
        Self { family: CutFamily::Indegree, coeffs, rhs: 1.0, violation, witness: Witness::Indegree { indegree } }
    }

    /// `x(E(H)) <= (|H| - 1) / 2` for odd `H`.
    pub fn blossom(g: &Graph, mut handle: Vec<VertexId>, x: &[f64]) -> Self {
        handle.sort_unstable();
        let mut inside = vec![false; g.n()];
        for &u in &handle {
            inside[u] = true;
        }
        let mut coeffs = Vec::new();
        for &u in &handle {
            for &(w, e) in g.incident(u) {
                if u < w && inside[w] {
                    coeffs.push((e, 1.0));
                }
            }
        }
        coeffs.sort_unstable_by_key(|&(e, _)| e);
        let rhs = ((handle.len() - 1) / 2) as f64;
        let violation = lhs(&coeffs, x) - rhs;
        Self { family: CutFamily::Blossom, coeffs, rhs, violation, witness: Witness::Blossom { handle } }
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        lhs(&self.coeffs, x)
    }

    pub fn to_row(&self) -> Row {
        Row::new(self.coeffs.clone(), Sense::Le, self.rhs)
    }

    /// Integer image of the row, used to drop duplicates.
    pub fn key(&self) -> (Vec<(EdgeId, i64)>, i64) {
        (self.coeffs.iter().map(|&(e, a)| (e, a.round() as i64)).collect(), self.rhs.round() as i64)
    }
}

/// Vertices reachable from `start` while avoiding `blocked`.
pub(crate) fn reach(g: &Graph, start: VertexId, blocked: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    if blocked[start] {
        return seen;
    }
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &(w, _) in g.incident(u) {
            if !seen[w] && !blocked[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}
