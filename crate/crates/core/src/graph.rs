//! Simple undirected graphs with dense vertex and edge ids.
//!
//! Every LP model and cut in the crate addresses its variables by edge id, so
//! ids are fixed at construction and follow the input edge order.

use std::collections::HashSet;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Endpoints are normalized so that `u < v`;
    /// edge ids follow the order of `edge_list`.
    pub fn new(n: usize, edge_list: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edge_list.len());
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edge_list {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange { u: a, v: b, n });
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
            let id = edges.len();
            edges.push((u, v));
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        Ok(Self { n, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// `(neighbor, edge id)` pairs incident to `u`, i.e. δ(u).
    pub fn incident(&self, u: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[u]
    }

    pub fn degree(&self, u: VertexId) -> usize {
        self.adj[u].len()
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let (small, other) = if self.adj[u].len() <= self.adj[v].len() { (u, v) } else { (v, u) };
        self.adj[small].iter().find(|&&(w, _)| w == other).map(|&(_, e)| e)
    }

    pub fn are_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_between(u, v).is_some()
    }

    /// True iff no vertex is covered by two of the given edges.
    pub fn is_matching(&self, edges: &[EdgeId]) -> bool {
        let mut covered = vec![false; self.n];
        for &e in edges {
            let (u, v) = self.edges[e];
            if covered[u] || covered[v] {
                return false;
            }
            covered[u] = true;
            covered[v] = true;
        }
        true
    }

    /// Whether the subgraph induced by `members` is connected. The empty set
    /// counts as connected.
    pub fn is_induced_connected(&self, members: &[bool]) -> bool {
        let Some(start) = members.iter().position(|&b| b) else {
            return true;
        };
        let total = members.iter().filter(|&&b| b).count();
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for &(w, _) in &self.adj[u] {
                if members[w] && !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == total
    }

    /// Connected components of the subgraph induced by `members`, each sorted,
    /// listed in order of their smallest vertex.
    pub fn induced_components(&self, members: &[bool]) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if !members[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(w, _) in &self.adj[u] {
                    if members[w] && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

/// A set of pairwise disjoint edges, stored as sorted edge ids.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct Matching {
    edges: Vec<EdgeId>,
}

impl Matching {
    pub fn new(g: &Graph, mut edges: Vec<EdgeId>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        if let Some(&e) = edges.iter().find(|&&e| e >= g.m()) {
            return Err(Error::Format(format!("edge id {e} out of range (m = {})", g.m())));
        }
        if !g.is_matching(&edges) {
            return Err(Error::Format(format!("edges {edges:?} do not form a matching")));
        }
        Ok(Self { edges })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn weight(&self, weights: &[f64]) -> f64 {
        self.edges.iter().map(|&e| weights[e]).sum()
    }

    /// Characteristic vector over the edges of `g`.
    pub fn indicator(&self, m: usize) -> Vec<f64> {
        let mut x = vec![0.0; m];
        for &e in &self.edges {
            x[e] = 1.0;
        }
        x
    }
}

/// Endpoints of the matching edges, sorted ascending.
pub fn covered_vertices(g: &Graph, matching: &Matching) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = matching
        .edges()
        .iter()
        .flat_map(|&e| {
            let (u, v) = g.edge(e);
            [u, v]
        })
        .collect();
    out.sort_unstable();
    out
}

pub fn is_connected_matching(g: &Graph, matching: &Matching) -> bool {
    let mut members = vec![false; g.n()];
    for v in covered_vertices(g, matching) {
        members[v] = true;
    }
    g.is_induced_connected(&members)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::new(n, &edges).unwrap()
    }

    #[test]
    fn builds_small_graphs() {
        let k2 = Graph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(k2.m(), 1);
        let k3 = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!((0..3).all(|u| k3.degree(u) == 2));
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(Graph::new(4, &[(0, 1), (0, 1)]), Err(Error::DuplicateEdge(0, 1)));
        assert_eq!(Graph::new(4, &[(0, 1), (1, 0)]), Err(Error::DuplicateEdge(0, 1)));
        assert_eq!(Graph::new(4, &[(2, 2)]), Err(Error::SelfLoop(2)));
        assert!(matches!(Graph::new(2, &[(0, 2)]), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn normalizes_endpoints() {
        let g = Graph::new(3, &[(2, 0)]).unwrap();
        assert_eq!(g.edge(0), (0, 2));
        assert_eq!(g.edge_between(2, 0), Some(0));
        assert!(!g.are_adjacent(1, 2));
    }

    #[test]
    fn matching_checks() {
        let p4 = path(4);
        assert!(p4.is_matching(&[0, 2]));
        assert!(!p4.is_matching(&[0, 1]));
        assert!(p4.is_matching(&[]));
    }

    #[test]
    fn connected_matching_checks() {
        let p6 = path(6);
        let split = Matching::new(&p6, vec![0, 4]).unwrap();
        assert!(!is_connected_matching(&p6, &split));
        let full = Matching::new(&p6, vec![0, 2, 4]).unwrap();
        assert!(is_connected_matching(&p6, &full));
        let k3 = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(is_connected_matching(&k3, &Matching::new(&k3, vec![0]).unwrap()));
        assert!(is_connected_matching(&k3, &Matching::empty()));
    }

    #[test]
    fn covered_vertex_sets() {
        let p6 = path(6);
        assert!(covered_vertices(&p6, &Matching::empty()).is_empty());
        assert_eq!(covered_vertices(&path(4), &Matching::new(&path(4), vec![0]).unwrap()), vec![0, 1]);
        assert_eq!(covered_vertices(&p6, &Matching::new(&p6, vec![0, 4]).unwrap()), vec![0, 1, 4, 5]);
    }

    #[test]
    fn matching_constructor_rejects_conflicts() {
        let p4 = path(4);
        assert!(Matching::new(&p4, vec![0, 1]).is_err());
        assert!(Matching::new(&p4, vec![7]).is_err());
    }
}
