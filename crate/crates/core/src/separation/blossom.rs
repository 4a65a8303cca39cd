//! Blossom inequalities.
//!
//! For odd `H`, `x(E(H)) <= (|H| - 1) / 2` is equivalent to
//! `x(δ(H)) + Σ_{u ∈ H} (1 - val(u)) >= 1`. The exact separator therefore
//! looks for a light odd cut in the graph with an extra vertex `z` joined to
//! every `u` with capacity `1 - val(u)`; odd cuts of a Gomory–Hu tree contain
//! a minimum one.

use std::collections::HashSet;

use crate::flow::gomory_hu_edges;
use crate::formulation::FractionalPoint;
use crate::graph::{Graph, VertexId};

use super::{Cut, INTEGRALITY_TOL, VIOLATION_TOL};

/// Capacities at or below this are treated as absent.
const CAP_EPS: f64 = 1e-12;

/// Exact blossom separation with the auxiliary graph built once.
#[derive(Debug, Clone)]
pub struct BlossomSeparator {
    n: usize,
    /// `(u, z)` for every vertex, then the edges of the graph.
    aux: Vec<(usize, usize)>,
    cap: Vec<f64>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut u: usize) -> usize {
        while self.0[u] != u {
            self.0[u] = self.0[self.0[u]];
            u = self.0[u];
        }
        u
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

impl BlossomSeparator {
    pub fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut aux: Vec<(usize, usize)> = (0..n).map(|u| (u, n)).collect();
        aux.extend_from_slice(g.edges());
        let cap = vec![0.0; aux.len()];
        Self { n, aux, cap }
    }

    fn recapacitate(&mut self, pt: &FractionalPoint) {
        let n = self.n;
        for u in 0..n {
            self.cap[u] = (1.0 - pt.val[u]).max(0.0);
        }
        for (e, &x) in pt.x.iter().enumerate() {
            self.cap[n + e] = x;
        }
    }

    pub fn separate(&mut self, g: &Graph, pt: &FractionalPoint) -> Vec<Cut> {
        debug_assert_eq!(g.n(), self.n);
        self.recapacitate(pt);
        let n = self.n;
        let z = n;
        let mut dsu = Dsu::new(n + 1);
        for (k, &(u, v)) in self.aux.iter().enumerate() {
            if self.cap[k] > CAP_EPS {
                dsu.union(u, v);
            }
        }
        // Components in order of smallest member; z's component is rooted at z.
        let mut comp_of = vec![usize::MAX; n + 1];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for u in 0..=n {
            let r = dsu.find(u);
            if comp_of[r] == usize::MAX {
                comp_of[r] = members.len();
                members.push(Vec::new());
            }
            members[comp_of[r]].push(u);
        }
        let mut local = vec![0usize; n + 1];
        let mut comp_edges: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); members.len()];
        for list in &mut members {
            if list.contains(&z) {
                list.retain(|&u| u != z);
                list.insert(0, z);
            }
            for (i, &u) in list.iter().enumerate() {
                local[u] = i;
            }
        }
        for (k, &(u, v)) in self.aux.iter().enumerate() {
            if self.cap[k] > CAP_EPS {
                let c = comp_of[dsu.find(u)];
                comp_edges[c].push((local[u], local[v], self.cap[k]));
            }
        }

        let mut cuts = Vec::new();
        let mut seen = HashSet::new();
        let mut consider = |handle: Vec<VertexId>, cuts: &mut Vec<Cut>| {
            if handle.len() >= 3 && handle.len() % 2 == 1 {
                let cut = Cut::blossom(g, handle, &pt.x);
                if cut.violation > VIOLATION_TOL && seen.insert(cut.key()) {
                    cuts.push(cut);
                }
            }
        };
        for (c, list) in members.iter().enumerate() {
            let has_z = list[0] == z;
            if !has_z {
                // Hangs off z through a zero-capacity tree edge.
                consider(list.clone(), &mut cuts);
            }
            if list.len() < 3 {
                continue;
            }
            let tree = gomory_hu_edges(list.len(), &comp_edges[c]);
            let k = list.len();
            let mut children = vec![Vec::new(); k];
            let mut value = vec![0.0; k];
            for (child, parent, v) in tree.edges() {
                children[parent].push(child);
                value[child] = v;
            }
            let mut order = Vec::with_capacity(k);
            let mut stack = vec![0];
            while let Some(u) = stack.pop() {
                order.push(u);
                stack.extend(children[u].iter().copied());
            }
            let mut size = vec![1usize; k];
            for &u in order.iter().rev() {
                for &w in &children[u] {
                    size[u] += size[w];
                }
            }
            for &u in &order[1..] {
                if value[u] < 1.0 - 2.0 * VIOLATION_TOL && size[u] % 2 == 1 && size[u] >= 3 {
                    let mut handle = Vec::with_capacity(size[u]);
                    let mut st = vec![u];
                    while let Some(w) = st.pop() {
                        handle.push(list[w]);
                        st.extend(children[w].iter().copied());
                    }
                    consider(handle, &mut cuts);
                }
            }
        }
        cuts
    }
}

/// One-shot exact blossom separation.
pub fn separate_blossom_exact(g: &Graph, pt: &FractionalPoint) -> Vec<Cut> {
    BlossomSeparator::new(g).separate(g, pt)
}

/// Odd components of the fractional edges, checked as handles.
pub fn separate_blossom_heuristic(g: &Graph, pt: &FractionalPoint) -> Vec<Cut> {
    let n = g.n();
    let mut dsu = Dsu::new(n);
    let mut touched = vec![false; n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let x = pt.x[e];
        if x > INTEGRALITY_TOL && x < 1.0 - INTEGRALITY_TOL {
            dsu.union(u, v);
            touched[u] = true;
            touched[v] = true;
        }
    }
    let mut comps: Vec<Vec<VertexId>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for u in (0..n).filter(|&u| touched[u]) {
        let r = dsu.find(u);
        if index[r] == usize::MAX {
            index[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[index[r]].push(u);
    }
    comps
        .into_iter()
        .filter(|h| h.len() >= 3 && h.len() % 2 == 1)
        .map(|h| Cut::blossom(g, h, &pt.x))
        .filter(|c| c.violation > VIOLATION_TOL)
        .collect()
}
