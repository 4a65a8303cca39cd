//! Branch-and-cut search.
//!
//! The exponential path starts from the degree rows, strengthens the root by
//! repeated separation, then runs a best-bound tree where integral points are
//! only accepted once they pass the connectivity check. The compact path runs
//! the same tree on the flow model without any separation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulation::{build_compact, build_exponential_base, vertex_values, CompactVarMap, FractionalPoint};
use crate::graph::{is_connected_matching, Matching};
use crate::io::Instance;
use crate::lp::{make_solver, Engine, LpModel, LpSolution, LpSolver, LpStatus};
use crate::separation::{
    separate_blossom_heuristic, separate_indegree, separate_msi_fractional, separate_msi_integer, BlossomSeparator,
    Cut, CutFamily, MsiMode, INTEGRALITY_TOL,
};

/// Bound and gap tolerance.
const OPT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Compact,
    Exponential,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Compact => "compact",
            Formulation::Exponential => "exponential",
        })
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "compact" => Ok(Formulation::Compact),
            "exponential" => Ok(Formulation::Exponential),
            other => Err(Error::Format(format!("unknown formulation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub formulation: Formulation,
    pub time_limit_s: f64,
    /// Root strengthening budget; `None` means `min(300, 0.1 * time_limit_s)`.
    pub root_cap_s: Option<f64>,
    pub seed: u64,
    pub engine: Engine,
    /// Separation rounds per tree node before branching. Lazy rows are exempt.
    pub node_cut_rounds: usize,
    /// Keep the implied arc-opening rows in the compact model.
    pub compact_arc_opening: bool,
    /// Stop after this many tree nodes (status `feasible` if the gap is open).
    pub node_limit: Option<u64>,
    pub record_events: bool,
    /// Write the root LP in LP-text format here after strengthening.
    pub dump_lp: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            formulation: Formulation::Exponential,
            time_limit_s: 3600.0,
            root_cap_s: None,
            seed: 0,
            engine: Engine::default(),
            node_cut_rounds: 20,
            compact_arc_opening: true,
            node_limit: None,
            record_events: false,
            dump_lp: None,
        }
    }
}

impl SolverConfig {
    pub fn new(formulation: Formulation) -> Self {
        Self { formulation, ..Self::default() }
    }

    pub fn root_cap(&self) -> f64 {
        self.root_cap_s.unwrap_or_else(|| (0.1 * self.time_limit_s).min(300.0)).min(self.time_limit_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    /// Stopped for a reason other than time with the gap still open.
    Feasible,
    TimeLimit,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::TimeLimit => "time-limit",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCounts {
    pub msi: usize,
    pub indegree: usize,
    pub blossom: usize,
    /// Connectivity rows added when rejecting integral points in the tree.
    pub lazy: usize,
}

impl CutCounts {
    pub fn total(&self) -> usize {
        self.msi + self.indegree + self.blossom + self.lazy
    }

    fn record(&mut self, family: CutFamily) {
        match family {
            CutFamily::Msi => self.msi += 1,
            CutFamily::Indegree => self.indegree += 1,
            CutFamily::Blossom => self.blossom += 1,
        }
    }
}

/// One line of the verbose solve log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: String,
    pub node: u64,
    pub round: usize,
    pub bound: f64,
    pub lb: f64,
    pub added: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootStats {
    pub rounds: usize,
    pub cuts: CutCounts,
    /// LP bound of every root round, in order.
    pub bounds: Vec<f64>,
    /// Cuts added after each round.
    pub round_cuts: Vec<CutCounts>,
    pub bound: f64,
    /// The last root LP point was integral and connected.
    pub integral_connected: bool,
    /// Cutting stopped because the root budget ran out.
    pub capped: bool,
    pub lp_iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub matching: Matching,
    pub lb: f64,
    pub ub: f64,
    pub gap: f64,
    pub nodes: u64,
    pub root_only: bool,
    pub cuts: CutCounts,
    pub root_bound: f64,
    pub lp_iterations: u64,
    pub wall_time_s: f64,
    pub root_time_s: f64,
    pub events: Vec<Event>,
}

pub fn gap(lb: f64, ub: f64) -> f64 {
    ((ub - lb) / ub.abs().max(1.0)).max(0.0)
}

/// Greedy connected matching guided by a relaxation point.
///
/// An integral point whose matching is connected is returned as is. Otherwise
/// positive edges are ranked by `x_e * w_e`, then `w_e`, then id; the best one
/// starts the matching and the best edge touching the covered set (with both
/// endpoints still free) is added until none is left.
pub fn primal_heuristic(pt: &FractionalPoint, inst: &Instance) -> Option<Matching> {
    let g = &inst.graph;
    let w = &inst.weights;
    if pt.is_integral(INTEGRALITY_TOL) {
        let edges: Vec<usize> = (0..g.m()).filter(|&e| pt.x[e] >= 0.5).collect();
        if let Ok(m) = Matching::new(g, edges) {
            if !m.is_empty() && is_connected_matching(g, &m) {
                return Some(m);
            }
        }
    }
    let mut ranked: Vec<usize> = (0..g.m()).filter(|&e| w[e] > 0.0).collect();
    if ranked.is_empty() {
        return None;
    }
    ranked.sort_by(|&a, &b| {
        (pt.x[b] * w[b]).total_cmp(&(pt.x[a] * w[a])).then(w[b].total_cmp(&w[a])).then(a.cmp(&b))
    });
    let mut rank = vec![usize::MAX; g.m()];
    for (r, &e) in ranked.iter().enumerate() {
        rank[e] = r;
    }
    let n = g.n();
    let mut covered = vec![false; n];
    let mut touching = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut chosen = Vec::new();
    let mut take = |e: usize,
                    covered: &mut Vec<bool>,
                    touching: &mut Vec<bool>,
                    heap: &mut BinaryHeap<std::cmp::Reverse<usize>>| {
        chosen.push(e);
        let (u, v) = g.edge(e);
        covered[u] = true;
        covered[v] = true;
        for c in [u, v] {
            for &(t, _) in g.incident(c) {
                if !covered[t] && !touching[t] {
                    touching[t] = true;
                    for &(_, f) in g.incident(t) {
                        if rank[f] != usize::MAX {
                            heap.push(std::cmp::Reverse(rank[f]));
                        }
                    }
                }
            }
        }
    };
    take(ranked[0], &mut covered, &mut touching, &mut heap);
    while let Some(std::cmp::Reverse(r)) = heap.pop() {
        let e = ranked[r];
        let (u, v) = g.edge(e);
        if !covered[u] && !covered[v] {
            take(e, &mut covered, &mut touching, &mut heap);
        }
    }
    Matching::new(g, chosen).ok()
}

struct NodeEntry {
    bound: f64,
    id: u64,
    fixings: Vec<(usize, f64)>,
}

impl PartialEq for NodeEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for NodeEntry {}

impl PartialOrd for NodeEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NodeEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then(other.id.cmp(&self.id))
    }
}

enum NodeOutcome {
    Pruned,
    Branch { var: usize, bound: f64 },
    OutOfTime { bound: f64 },
}

struct Search<'a> {
    inst: &'a Instance,
    cfg: &'a SolverConfig,
    lp: Box<dyn LpSolver>,
    start: Instant,
    compact: Option<CompactVarMap>,
    x_cols: Vec<usize>,
    /// Branching candidates in priority order.
    branch_cols: Vec<usize>,
    root_bounds: Vec<(f64, f64)>,
    fixed: Vec<usize>,
    blossom: BlossomSeparator,
    integral_weights: bool,
    incumbent: Matching,
    lb: f64,
    cuts: CutCounts,
    lp_iterations: u64,
    nodes: u64,
    /// First LP bound of the tree root.
    root_lp: Option<f64>,
    events: Vec<Event>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, cfg: &'a SolverConfig, model: LpModel, compact: Option<CompactVarMap>) -> Result<Self> {
        let x_cols = match &compact {
            Some(map) => map.x.clone(),
            None => (0..inst.m()).collect(),
        };
        let branch_cols = match &compact {
            Some(map) => map.x.iter().chain(&map.y).copied().collect(),
            None => x_cols.clone(),
        };
        let root_bounds = model.vars().iter().map(|v| (v.lb, v.ub)).collect();
        let lp = make_solver(model, cfg.engine, cfg.seed)?;
        Ok(Self {
            inst,
            cfg,
            lp,
            start: Instant::now(),
            compact,
            x_cols,
            branch_cols,
            root_bounds,
            fixed: Vec::new(),
            blossom: BlossomSeparator::new(&inst.graph),
            integral_weights: inst.has_integral_weights(),
            incumbent: Matching::empty(),
            lb: 0.0,
            cuts: CutCounts::default(),
            lp_iterations: 0,
            nodes: 0,
            root_lp: None,
            events: Vec::new(),
        })
    }

    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn remaining(&self) -> f64 {
        self.cfg.time_limit_s - self.elapsed()
    }

    fn log(&mut self, kind: &str, round: usize, bound: f64, added: usize) {
        if self.cfg.record_events {
            self.events.push(Event { kind: kind.to_string(), node: self.nodes, round, bound, lb: self.lb, added });
        }
    }

    /// Whether a subproblem with this bound cannot beat the incumbent.
    fn dominated(&self, bound: f64) -> bool {
        if self.integral_weights {
            (bound + OPT_TOL).floor() <= self.lb + OPT_TOL
        } else {
            bound <= self.lb + OPT_TOL
        }
    }

    fn tighten(&self, ub: f64) -> f64 {
        if self.integral_weights { (ub + OPT_TOL).floor().max(self.lb) } else { ub.max(self.lb) }
    }

    /// `None` when the time limit is hit.
    fn solve_lp(&mut self) -> Result<Option<LpSolution>> {
        let remaining = self.remaining();
        if remaining <= 0.0 {
            return Ok(None);
        }
        self.lp.set_time_limit(remaining);
        let sol = self.lp.solve()?;
        self.lp_iterations += sol.iterations;
        match sol.status {
            LpStatus::TimeLimit => Ok(None),
            LpStatus::IterationLimit => Err(Error::Lp("iteration limit reached".into())),
            LpStatus::Unbounded => Err(Error::Internal("relaxation is unbounded".into())),
            LpStatus::Optimal | LpStatus::Infeasible => Ok(Some(sol)),
        }
    }

    fn point(&self, sol: &LpSolution) -> FractionalPoint {
        let x: Vec<f64> = self.x_cols.iter().map(|&j| sol.values[j]).collect();
        vertex_values(&x, &self.inst.graph)
    }

    fn offer(&mut self, m: Matching) -> bool {
        let w = m.weight(&self.inst.weights);
        if w > self.lb + 1e-9 && is_connected_matching(&self.inst.graph, &m) {
            self.lb = w;
            self.incumbent = m;
            self.log("incumbent", 0, w, 0);
            true
        } else {
            false
        }
    }

    fn run_heuristic(&mut self, pt: &FractionalPoint) {
        if let Some(m) = primal_heuristic(pt, self.inst) {
            self.offer(m);
        }
    }

    fn add_cuts(&mut self, cuts: &[Cut], lazy: bool) -> Result<CutCounts> {
        let mut added = CutCounts::default();
        for cut in cuts {
            self.lp.add_row(cut.to_row())?;
            if lazy {
                added.lazy += 1;
            } else {
                added.record(cut.family);
            }
        }
        self.cuts.msi += added.msi;
        self.cuts.indegree += added.indegree;
        self.cuts.blossom += added.blossom;
        self.cuts.lazy += added.lazy;
        Ok(added)
    }

    fn root(&mut self) -> Result<RootStats> {
        let g = &self.inst.graph;
        let cap = self.cfg.root_cap();
        let iterations_before = self.lp_iterations;
        let mut stats = RootStats {
            rounds: 0,
            cuts: CutCounts::default(),
            bounds: Vec::new(),
            round_cuts: Vec::new(),
            bound: f64::INFINITY,
            integral_connected: false,
            capped: false,
            lp_iterations: 0,
        };
        loop {
            let Some(sol) = self.solve_lp()? else {
                stats.capped = true;
                break;
            };
            if sol.status == LpStatus::Infeasible {
                return Err(Error::Internal("root relaxation became infeasible".into()));
            }
            stats.bound = sol.objective;
            stats.bounds.push(sol.objective);
            let pt = self.point(&sol);
            self.run_heuristic(&pt);
            if self.elapsed() >= cap {
                stats.capped = true;
                self.log("root", stats.rounds, sol.objective, 0);
                break;
            }
            let mut cuts = separate_blossom_heuristic(g, &pt);
            let msi = separate_msi_fractional(g, &pt, MsiMode::All);
            let integral = pt.is_integral(INTEGRALITY_TOL);
            if msi.is_empty() && cuts.is_empty() && !integral {
                cuts = self.blossom.separate(g, &pt);
            }
            cuts.extend(msi);
            if cuts.is_empty() {
                cuts.extend(separate_indegree(g, &pt));
            }
            self.log("root", stats.rounds, sol.objective, cuts.len());
            if cuts.is_empty() {
                stats.integral_connected = integral;
                break;
            }
            let added = self.add_cuts(&cuts, false)?;
            stats.cuts.msi += added.msi;
            stats.cuts.indegree += added.indegree;
            stats.cuts.blossom += added.blossom;
            stats.round_cuts.push(added);
            stats.rounds += 1;
        }
        stats.lp_iterations = self.lp_iterations - iterations_before;
        Ok(stats)
    }

    fn apply_fixings(&mut self, fixings: &[(usize, f64)]) -> Result<()> {
        for j in std::mem::take(&mut self.fixed) {
            let (lb, ub) = self.root_bounds[j];
            self.lp.set_bounds(j, lb, ub)?;
        }
        for &(j, v) in fixings {
            self.lp.set_bounds(j, v, v)?;
            self.fixed.push(j);
        }
        Ok(())
    }

    fn most_fractional(&self, sol: &LpSolution, cols: &[usize]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &j in cols {
            let v = sol.values[j];
            let frac = v.min(1.0 - v);
            if frac > INTEGRALITY_TOL && best.is_none_or(|(_, f)| frac > f) {
                best = Some((j, frac));
            }
        }
        best.map(|(j, _)| j)
    }

    fn process_node(&mut self) -> Result<NodeOutcome> {
        let g = &self.inst.graph;
        let mut rounds = 0;
        let mut last_bound = f64::INFINITY;
        loop {
            let Some(sol) = self.solve_lp()? else {
                return Ok(NodeOutcome::OutOfTime { bound: last_bound });
            };
            if sol.status == LpStatus::Infeasible {
                self.log("infeasible", rounds, f64::NAN, 0);
                return Ok(NodeOutcome::Pruned);
            }
            let bound = sol.objective;
            last_bound = bound;
            if self.nodes == 1 && self.root_lp.is_none() {
                self.root_lp = Some(bound);
            }
            if self.dominated(bound) {
                self.log("prune", rounds, bound, 0);
                return Ok(NodeOutcome::Pruned);
            }
            let pt = self.point(&sol);
            self.run_heuristic(&pt);
            if self.dominated(bound) {
                self.log("prune", rounds, bound, 0);
                return Ok(NodeOutcome::Pruned);
            }
            if self.compact.is_some() {
                let var = self
                    .most_fractional(&sol, &self.x_cols)
                    .or_else(|| self.most_fractional(&sol, &self.branch_cols));
                return Ok(match var {
                    Some(var) => NodeOutcome::Branch { var, bound },
                    None => {
                        let edges = (0..g.m()).filter(|&e| pt.x[e] >= 0.5).collect();
                        let m = Matching::new(g, edges)?;
                        let accepted = self.offer(m);
                        debug_assert!(accepted || self.dominated(bound));
                        NodeOutcome::Pruned
                    }
                });
            }
            if pt.is_integral(INTEGRALITY_TOL) {
                let lazy = separate_msi_integer(g, &pt)?;
                if lazy.is_empty() {
                    let edges = (0..g.m()).filter(|&e| pt.x[e] >= 0.5).collect();
                    self.offer(Matching::new(g, edges)?);
                    return Ok(NodeOutcome::Pruned);
                }
                self.log("lazy", rounds, bound, lazy.len());
                self.add_cuts(&lazy, true)?;
                continue;
            }
            if rounds < self.cfg.node_cut_rounds {
                let mut cuts = separate_blossom_heuristic(g, &pt);
                cuts.extend(separate_msi_fractional(g, &pt, MsiMode::First));
                if !cuts.is_empty() {
                    self.log("cuts", rounds, bound, cuts.len());
                    self.add_cuts(&cuts, false)?;
                    rounds += 1;
                    continue;
                }
            }
            let var = self.most_fractional(&sol, &self.x_cols).expect("fractional point has a fractional edge");
            return Ok(NodeOutcome::Branch { var, bound });
        }
    }

    fn tree(&mut self, root_bound: f64) -> Result<(SolveStatus, f64)> {
        let mut heap = BinaryHeap::new();
        heap.push(NodeEntry { bound: root_bound, id: 0, fixings: Vec::new() });
        let mut next_id = 1;
        while let Some(node) = heap.pop() {
            if node.id != 0 && self.dominated(node.bound) {
                heap.clear();
                break;
            }
            let over_nodes = self.cfg.node_limit.is_some_and(|k| self.nodes >= k);
            if over_nodes || self.remaining() <= 0.0 {
                let ub = self.tighten(node.bound);
                let status = if over_nodes { SolveStatus::Feasible } else { SolveStatus::TimeLimit };
                return Ok((status, ub));
            }
            self.nodes += 1;
            self.apply_fixings(&node.fixings)?;
            match self.process_node()? {
                NodeOutcome::Pruned => {}
                NodeOutcome::OutOfTime { bound } => {
                    let open = heap.peek().map_or(f64::NEG_INFINITY, |n| n.bound);
                    let ub = self.tighten(node.bound.min(bound).max(open));
                    return Ok((SolveStatus::TimeLimit, ub));
                }
                NodeOutcome::Branch { var, bound } => {
                    self.log("branch", var, bound, 0);
                    for v in [1.0, 0.0] {
                        let mut fixings = node.fixings.clone();
                        fixings.push((var, v));
                        heap.push(NodeEntry { bound, id: next_id, fixings });
                        next_id += 1;
                    }
                }
            }
        }
        Ok((SolveStatus::Optimal, self.lb))
    }
}

fn dump(cfg: &SolverConfig, model: &LpModel) -> Result<()> {
    if let Some(path) = &cfg.dump_lp {
        std::fs::write(path, model.to_lp_format())
            .map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
    }
    Ok(())
}

/// Runs the root cutting loop on an exponential base model.
pub fn strengthen_root(inst: &Instance, model: LpModel, cfg: &SolverConfig) -> Result<(LpModel, RootStats)> {
    let mut search = Search::new(inst, cfg, model, None)?;
    let stats = search.root()?;
    Ok((search.lp.model().clone(), stats))
}

pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<SolveResult> {
    let start = Instant::now();
    let (mut search, root_bound) = match cfg.formulation {
        Formulation::Exponential => {
            let (model, _) = build_exponential_base(inst);
            let mut search = Search::new(inst, cfg, model, None)?;
            search.start = start;
            let stats = search.root()?;
            dump(cfg, search.lp.model())?;
            (search, stats.bound)
        }
        Formulation::Compact => {
            let (model, map) = build_compact(inst, cfg.compact_arc_opening);
            dump(cfg, &model)?;
            let mut search = Search::new(inst, cfg, model, Some(map))?;
            search.start = start;
            (search, f64::INFINITY)
        }
    };
    let root_time_s = start.elapsed().as_secs_f64();
    let trivial: f64 = inst.weights.iter().map(|w| w.max(0.0)).sum();
    let (status, ub) = if root_bound.is_finite() || cfg.formulation == Formulation::Compact {
        search.tree(root_bound.min(trivial))?
    } else {
        (SolveStatus::TimeLimit, search.tighten(trivial))
    };
    let root_bound = match cfg.formulation {
        Formulation::Exponential => root_bound,
        Formulation::Compact => search.root_lp.unwrap_or(f64::NAN),
    };
    let ub = ub.max(search.lb);
    let g = gap(search.lb, ub);
    let status = if status != SolveStatus::Optimal && g <= OPT_TOL { SolveStatus::Optimal } else { status };
    Ok(SolveResult {
        status,
        matching: search.incumbent.clone(),
        lb: search.lb,
        ub,
        gap: g,
        nodes: search.nodes,
        root_only: search.nodes == 1,
        cuts: search.cuts,
        root_bound,
        lp_iterations: search.lp_iterations,
        wall_time_s: start.elapsed().as_secs_f64(),
        root_time_s,
        events: std::mem::take(&mut search.events),
    })
}
