//! LP relaxations of the problem and the vertex-value projection.
//!
//! The compact model lives on an auxiliary network with an artificial source
//! `s = n`. Arc `2e` is `(u, v)` and arc `2e + 1` is `(v, u)` for edge
//! `e = {u, v}` with `u < v`; arc `2m + u` is `(s, u)`.

use crate::graph::{EdgeId, Graph, VertexId};
use crate::io::Instance;
use crate::lp::{LpModel, Row, Sense};

/// LP column ids of the compact model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactVarMap {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub f: Vec<usize>,
    pub source: VertexId,
}

impl CompactVarMap {
    pub fn num_arcs(&self) -> usize {
        self.y.len()
    }
}

/// Tail and head of arc `a` in the auxiliary network of `g`.
pub fn arc_endpoints(g: &Graph, a: usize) -> (VertexId, VertexId) {
    let m = g.m();
    if a < 2 * m {
        let (u, v) = g.edge(a / 2);
        if a.is_multiple_of(2) { (u, v) } else { (v, u) }
    } else {
        (g.n(), a - 2 * m)
    }
}

/// Arcs entering `u` (one per incident edge plus the source arc).
fn in_arcs(g: &Graph, u: VertexId) -> impl Iterator<Item = usize> + '_ {
    let m = g.m();
    g.incident(u)
        .iter()
        .map(move |&(w, e)| if w < u { 2 * e } else { 2 * e + 1 })
        .chain(std::iter::once(2 * m + u))
}

fn out_arcs(g: &Graph, u: VertexId) -> impl Iterator<Item = usize> + '_ {
    g.incident(u).iter().map(move |&(w, e)| if u < w { 2 * e } else { 2 * e + 1 })
}

/// Builds the single-commodity flow model. With `with_arc_opening` the
/// (implied) rows `y_uv <= sum of y entering u` are included.
pub fn build_compact(inst: &Instance, with_arc_opening: bool) -> (LpModel, CompactVarMap) {
    let g = &inst.graph;
    let (n, m) = (g.n(), g.m());
    let arcs = 2 * m + n;
    let mut model = LpModel::new();
    let x: Vec<usize> = (0..m).map(|e| model.add_binary_var(inst.weights[e], format!("x{e}"))).collect();
    let y: Vec<usize> = (0..arcs).map(|a| model.add_binary_var(0.0, format!("y{a}"))).collect();
    let f: Vec<usize> = (0..arcs).map(|a| model.add_var(0.0, f64::INFINITY, 0.0, format!("f{a}"))).collect();
    let deg = |u: VertexId| -> Vec<(usize, f64)> { g.incident(u).iter().map(|&(_, e)| (x[e], 1.0)).collect() };
    let push = |model: &mut LpModel, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64| {
        model.add_row(Row::new(coeffs, sense, rhs)).expect("compact rows reference existing columns");
    };

    for u in 0..n {
        push(&mut model, deg(u), Sense::Le, 1.0);
    }
    for u in 0..n {
        let mut c: Vec<_> = in_arcs(g, u).map(|a| (y[a], 1.0)).collect();
        c.extend(deg(u).into_iter().map(|(j, _)| (j, -1.0)));
        push(&mut model, c, Sense::Eq, 0.0);
    }
    push(&mut model, (0..n).map(|u| (y[2 * m + u], 1.0)).collect(), Sense::Le, 1.0);
    if with_arc_opening {
        for a in 0..2 * m {
            let (t, _) = arc_endpoints(g, a);
            let mut c = vec![(y[a], 1.0)];
            c.extend(in_arcs(g, t).map(|b| (y[b], -1.0)));
            push(&mut model, c, Sense::Le, 0.0);
        }
    }
    for a in 0..arcs {
        push(&mut model, vec![(f[a], 1.0), (y[a], -(n as f64))], Sense::Le, 0.0);
    }
    let mut c: Vec<_> = (0..n).map(|u| (f[2 * m + u], 1.0)).collect();
    c.extend(x.iter().map(|&j| (j, -2.0)));
    push(&mut model, c, Sense::Eq, 0.0);
    for u in 0..n {
        let mut c: Vec<_> = in_arcs(g, u).map(|a| (f[a], 1.0)).collect();
        c.extend(out_arcs(g, u).map(|a| (f[a], -1.0)));
        c.extend(in_arcs(g, u).map(|a| (y[a], -1.0)));
        push(&mut model, c, Sense::Eq, 0.0);
    }
    (model, CompactVarMap { x, y, f, source: n })
}

/// Degree rows over the edge variables only. Column `e` is edge `e`.
pub fn build_exponential_base(inst: &Instance) -> (LpModel, Vec<usize>) {
    let g = &inst.graph;
    let mut model = LpModel::new();
    let x: Vec<usize> = (0..g.m()).map(|e| model.add_binary_var(inst.weights[e], format!("x{e}"))).collect();
    for u in 0..g.n() {
        let coeffs = g.incident(u).iter().map(|&(_, e)| (x[e], 1.0)).collect();
        model.add_row(Row::new(coeffs, Sense::Le, 1.0)).expect("degree rows reference existing columns");
    }
    (model, x)
}

/// Edge values of a relaxation point with the per-vertex sums `val(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalPoint {
    pub x: Vec<f64>,
    pub val: Vec<f64>,
}

impl FractionalPoint {
    pub fn edge(&self, e: EdgeId) -> f64 {
        self.x[e]
    }

    pub fn is_integral(&self, tol: f64) -> bool {
        self.x.iter().all(|&v| v <= tol || v >= 1.0 - tol)
    }
}

/// Clamps `x` into `[0, 1]` and sums it around every vertex.
pub fn vertex_values(x: &[f64], g: &Graph) -> FractionalPoint {
    let x: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let mut val = vec![0.0; g.n()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        val[u] += x[e];
        val[v] += x[e];
    }
    FractionalPoint { x, val }
}
