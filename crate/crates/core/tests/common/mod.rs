//! Independent brute-force oracles and generators shared by integration tests.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use wcm::graph::{Graph, Matching};
use wcm::io::{Instance, Origin};
use wcm::oracle::enumerate_minimal_separators;

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges).unwrap()
}

pub fn instance(g: Graph, weights: Vec<f64>) -> Instance {
    Instance::new(g, weights, "t", Origin::Canonical).unwrap()
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Graph::new(n, &edges).unwrap()
}

/// Edge values with every vertex sum at most 1, favoring the half- and
/// third-integral values LP optima take.
pub fn random_degree_feasible_point(rng: &mut impl Rng, g: &Graph) -> Vec<f64> {
    let palette = [0.0, 0.0, 0.5, 1.0 / 3.0, 1.0];
    palette_point(rng, g, &palette)
}

/// Mostly integral values, so covered vertices split into separated groups.
pub fn random_sparse_point(rng: &mut impl Rng, g: &Graph) -> Vec<f64> {
    let palette = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.5];
    palette_point(rng, g, &palette)
}

/// Each edge draws from `palette` or, one time in `palette.len() + 1`,
/// uniformly, then is cut down to the room left at its endpoints.
fn palette_point(rng: &mut impl Rng, g: &Graph, palette: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.shuffle(rng);
    let mut val = vec![0.0; g.n()];
    let mut x = vec![0.0; g.m()];
    for e in order {
        let k = rng.gen_range(0..=palette.len());
        let draw = if k < palette.len() { palette[k] } else { rng.gen::<f64>() };
        let (u, v) = g.edge(e);
        let room = (1.0f64 - val[u]).min(1.0 - val[v]).max(0.0);
        x[e] = draw.min(room);
        val[u] += x[e];
        val[v] += x[e];
    }
    x
}

pub fn vertex_sums(g: &Graph, x: &[f64]) -> Vec<f64> {
    let mut val = vec![0.0; g.n()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        val[u] += x[e];
        val[v] += x[e];
    }
    val
}

/// Largest blossom violation over all odd vertex subsets of size >= 3.
pub fn max_blossom_violation(g: &Graph, x: &[f64]) -> f64 {
    let n = g.n();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size < 3 || size.is_multiple_of(2) {
            continue;
        }
        let inside: f64 = g
            .edges()
            .iter()
            .enumerate()
            .filter(|&(_, &(u, v))| mask >> u & 1 == 1 && mask >> v & 1 == 1)
            .map(|(e, _)| x[e])
            .sum();
        best = best.max(inside - ((size - 1) / 2) as f64);
    }
    best
}

/// Largest minimal-separator violation over all non-adjacent pairs.
pub fn max_msi_violation(g: &Graph, x: &[f64]) -> f64 {
    let val = vertex_sums(g, x);
    let mut best = f64::NEG_INFINITY;
    for a in 0..g.n() {
        for b in a + 1..g.n() {
            if g.are_adjacent(a, b) {
                continue;
            }
            for s in enumerate_minimal_separators(g, a, b).unwrap() {
                let lhs = val[a] + val[b] - s.iter().map(|&u| val[u]).sum::<f64>();
                best = best.max(lhs - 1.0);
            }
        }
    }
    best
}

/// Largest `Σ_u (1 - d_u) val(u)` over all 2^m orientations.
pub fn max_orientation_lhs(g: &Graph, val: &[f64]) -> f64 {
    let m = g.m();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << m) {
        let mut d = vec![0usize; g.n()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if mask >> e & 1 == 1 {
                d[u] += 1;
            } else {
                d[v] += 1;
            }
        }
        let lhs: f64 = d.iter().zip(val).map(|(&k, &v)| (1.0 - k as f64) * v).sum();
        best = best.max(lhs);
    }
    best
}

/// Whether the `<=` row holds at every listed matching.
pub fn valid_for_all(coeffs: &[(usize, f64)], rhs: f64, matchings: &[Matching]) -> bool {
    matchings.iter().all(|m| {
        let lhs: f64 = coeffs.iter().filter(|(e, _)| m.edges().binary_search(e).is_ok()).map(|&(_, a)| a).sum();
        lhs <= rhs + 1e-9
    })
}

/// Direct writes bypass the test harness capture, so result lines always show.
pub fn report(line: &str) {
    use std::io::Write;
    let mut err = std::io::stderr();
    let _ = writeln!(err, "{line}");
}
