//! Maximum flow / minimum cut on capacitated digraphs and Gomory–Hu cut trees.
//!
//! `max_flow` is a highest-label push-relabel with the gap heuristic and
//! periodic global relabeling. It only runs the first phase (maximum
//! preflow): the flow value and a minimum cut are all callers need.

use crate::graph::Graph;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CapDigraph {
    n: usize,
    arcs: Vec<(usize, usize, f64)>,
}

impl CapDigraph {
    pub fn new(n: usize) -> Self {
        Self { n, arcs: Vec::new() }
    }

    /// Adds an arc and returns its id. Capacities must be nonnegative.
    pub fn add_arc(&mut self, tail: usize, head: usize, cap: f64) -> usize {
        debug_assert!(tail < self.n && head < self.n);
        debug_assert!(cap >= 0.0, "negative capacity {cap}");
        self.arcs.push((tail, head, cap.max(0.0)));
        self.arcs.len() - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize, f64)] {
        &self.arcs
    }

    pub fn set_capacity(&mut self, arc: usize, cap: f64) {
        self.arcs[arc].2 = cap.max(0.0);
    }

    /// Sum of capacities of arcs leaving the vertex set `side`.
    pub fn cut_capacity(&self, side: &[bool]) -> f64 {
        self.arcs
            .iter()
            .filter(|&&(u, v, _)| side[u] && !side[v])
            .map(|&(_, _, c)| c)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxFlow {
    pub value: f64,
    /// Vertices that cannot reach the sink in the final residual network.
    /// Always contains the source and never the sink.
    pub source_side: Vec<bool>,
}

/// Residual network in CSR form. Arc `2k` is the forward copy of input arc
/// `k`, arc `2k + 1` its reverse.
struct Residual {
    n: usize,
    start: Vec<usize>,
    arc_of: Vec<usize>,
    head: Vec<usize>,
    res: Vec<f64>,
}

impl Residual {
    fn build(n: usize, arcs: impl Iterator<Item = (usize, usize, f64, f64)>) -> Self {
        let mut head = Vec::new();
        let mut res = Vec::new();
        let mut tail = Vec::new();
        for (u, v, cap, rev_cap) in arcs {
            head.push(v);
            res.push(cap);
            tail.push(u);
            head.push(u);
            res.push(rev_cap);
            tail.push(v);
        }
        let mut start = vec![0usize; n + 1];
        for &t in &tail {
            start[t + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut arc_of = vec![0usize; tail.len()];
        for (a, &t) in tail.iter().enumerate() {
            arc_of[fill[t]] = a;
            fill[t] += 1;
        }
        Self { n, start, arc_of, head, res }
    }

    fn out(&self, u: usize) -> &[usize] {
        &self.arc_of[self.start[u]..self.start[u + 1]]
    }

    /// Exact distance-to-sink labels in the residual network; unreachable
    /// vertices get `n`.
    fn distances_to(&self, t: usize) -> Vec<usize> {
        let mut dist = vec![self.n; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[t] = 0;
        queue.push_back(t);
        while let Some(v) = queue.pop_front() {
            for &b in self.out(v) {
                let u = self.head[b];
                if dist[u] == self.n && self.res[b ^ 1] > 0.0 {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    fn max_preflow(&mut self, s: usize, t: usize) -> f64 {
        let n = self.n;
        let mut excess = vec![0.0f64; n];
        let mut height = self.distances_to(t);
        height[s] = n;
        let mut current: Vec<usize> = (0..n).map(|u| self.start[u]).collect();
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut count = vec![0usize; n + 1];
        let mut in_bucket = vec![false; n];

        for i in self.start[s]..self.start[s + 1] {
            let a = self.arc_of[i];
            let delta = self.res[a];
            if delta > 0.0 {
                self.res[a] = 0.0;
                self.res[a ^ 1] += delta;
                excess[self.head[a]] += delta;
            }
        }

        let mut highest = 0usize;
        let mut relabels = 0usize;
        let mut needs_global = false;
        loop {
            if needs_global {
                // Exact distances are valid labels and never below the current ones.
                height = self.distances_to(t);
                height[s] = n;
                relabels = 0;
                needs_global = false;
            }
            if relabels == 0 {
                count.iter_mut().for_each(|c| *c = 0);
                buckets.iter_mut().for_each(|b| b.clear());
                in_bucket.iter_mut().for_each(|f| *f = false);
                highest = 0;
                for v in 0..n {
                    if v == s || height[v] >= n {
                        continue;
                    }
                    count[height[v]] += 1;
                    current[v] = self.start[v];
                    if v != t && excess[v] > 0.0 {
                        buckets[height[v]].push(v);
                        in_bucket[v] = true;
                        highest = highest.max(height[v]);
                    }
                }
                relabels = 1;
            }

            while highest > 0 && buckets[highest].is_empty() {
                highest -= 1;
            }
            let Some(u) = buckets[highest].pop() else { break };
            in_bucket[u] = false;
            if height[u] >= n {
                continue;
            }
            while excess[u] > 0.0 {
                if current[u] == self.start[u + 1] {
                    // relabel
                    let old = height[u];
                    let mut best = n;
                    for i in self.start[u]..self.start[u + 1] {
                        let a = self.arc_of[i];
                        if self.res[a] > 0.0 {
                            best = best.min(height[self.head[a]] + 1);
                        }
                    }
                    count[old] -= 1;
                    relabels += 1;
                    if count[old] == 0 {
                        // Gap: vertices above `old` can no longer reach t.
                        for h in height.iter_mut() {
                            if *h > old && *h < n {
                                count[*h] -= 1;
                                *h = n;
                            }
                        }
                        height[u] = n;
                    } else {
                        height[u] = best.min(n);
                    }
                    if height[u] >= n {
                        break;
                    }
                    count[height[u]] += 1;
                    current[u] = self.start[u];
                    continue;
                }
                let a = self.arc_of[current[u]];
                let v = self.head[a];
                if self.res[a] > 0.0 && height[u] == height[v] + 1 {
                    let delta = excess[u].min(self.res[a]);
                    self.res[a] -= delta;
                    self.res[a ^ 1] += delta;
                    excess[u] -= delta;
                    excess[v] += delta;
                    if v != s && v != t && !in_bucket[v] {
                        buckets[height[v]].push(v);
                        in_bucket[v] = true;
                        highest = highest.max(height[v]);
                    }
                    if excess[u] <= 0.0 {
                        break;
                    }
                }
                current[u] += 1;
            }
            if excess[u] > 0.0 && height[u] < n {
                buckets[height[u]].push(u);
                in_bucket[u] = true;
                highest = highest.max(height[u]);
            }
            if relabels > n {
                needs_global = true;
            }
        }
        excess[t]
    }

    fn sink_unreachable_side(&self, t: usize) -> Vec<bool> {
        let dist = self.distances_to(t);
        dist.iter().map(|&d| d >= self.n).collect()
    }
}

/// Maximum `s`-`t` flow value together with a minimum cut.
pub fn max_flow(d: &CapDigraph, s: usize, t: usize) -> MaxFlow {
    assert_ne!(s, t, "max_flow needs distinct terminals");
    let mut r = Residual::build(d.n, d.arcs.iter().map(|&(u, v, c)| (u, v, c, 0.0)));
    let value = r.max_preflow(s, t);
    let source_side = r.sink_unreachable_side(t);
    MaxFlow { value, source_side }
}

/// Maximum flow on an undirected capacitated graph given as an edge list.
fn undirected_max_flow(n: usize, edges: &[(usize, usize, f64)], s: usize, t: usize) -> MaxFlow {
    let mut r = Residual::build(n, edges.iter().map(|&(u, v, c)| (u, v, c, c)));
    let value = r.max_preflow(s, t);
    let source_side = r.sink_unreachable_side(t);
    MaxFlow { value, source_side }
}

/// A Gomory–Hu cut tree stored as parent pointers rooted at vertex 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CutTree {
    parent: Vec<usize>,
    value: Vec<f64>,
    /// Number of maximum-flow computations spent building the tree.
    pub flow_calls: usize,
}

impl CutTree {
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    /// Tree edges as `(child, parent, cut value)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (1..self.parent.len()).map(move |c| (c, self.parent[c], self.value[c]))
    }

    fn depth(&self, mut u: usize) -> usize {
        let mut d = 0;
        while u != 0 {
            u = self.parent[u];
            d += 1;
        }
        d
    }

    /// Whether `u` lies in the subtree hanging below tree edge `(child, parent[child])`.
    fn below(&self, mut u: usize, child: usize) -> bool {
        loop {
            if u == child {
                return true;
            }
            if u == 0 {
                return false;
            }
            u = self.parent[u];
        }
    }

    /// Minimum cut between `u` and `v`: the smallest tree edge on their path,
    /// and the side containing `u` once that edge is removed.
    pub fn query(&self, u: usize, v: usize) -> (f64, Vec<bool>) {
        assert_ne!(u, v);
        let (mut a, mut b) = (u, v);
        let (mut da, mut db) = (self.depth(a), self.depth(b));
        let mut from_u = Vec::new();
        let mut from_v = Vec::new();
        while da > db {
            from_u.push(a);
            a = self.parent[a];
            da -= 1;
        }
        while db > da {
            from_v.push(b);
            b = self.parent[b];
            db -= 1;
        }
        while a != b {
            from_u.push(a);
            from_v.push(b);
            a = self.parent[a];
            b = self.parent[b];
        }
        let mut best: Option<usize> = None;
        for &c in from_u.iter().chain(from_v.iter().rev()) {
            if best.is_none_or(|b| self.value[c] < self.value[b]) {
                best = Some(c);
            }
        }
        let c = best.expect("distinct vertices have a nonempty tree path");
        let u_below = self.below(u, c);
        let side = (0..self.n()).map(|w| self.below(w, c) == u_below).collect();
        (self.value[c], side)
    }

    pub fn min_cut_value(&self, u: usize, v: usize) -> f64 {
        self.query(u, v).0
    }
}

/// Gomory–Hu tree of an undirected graph with `n` vertices and capacitated
/// edges `(u, v, cap)`, by Gusfield's method: exactly `n - 1` maximum flows on
/// the original graph, no contractions.
pub fn gomory_hu_edges(n: usize, edges: &[(usize, usize, f64)]) -> CutTree {
    let mut parent = vec![0usize; n];
    let mut value = vec![0.0f64; n];
    let mut flow_calls = 0;
    for s in 1..n {
        let t = parent[s];
        let flow = undirected_max_flow(n, edges, s, t);
        flow_calls += 1;
        let side = &flow.source_side;
        value[s] = flow.value;
        for i in 0..n {
            if i != s && side[i] && parent[i] == t {
                parent[i] = s;
            }
        }
        if t != 0 && side[parent[t]] {
            parent[s] = parent[t];
            parent[t] = s;
            value[s] = value[t];
            value[t] = flow.value;
        }
    }
    CutTree { parent, value, flow_calls }
}

pub fn gomory_hu(g: &Graph, cap: &[f64]) -> CutTree {
    let edges: Vec<_> = g.edges().iter().zip(cap).map(|(&(u, v), &c)| (u, v, c)).collect();
    gomory_hu_edges(g.n(), &edges)
}
