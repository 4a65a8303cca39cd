//! Bounded-variable linear programs (always maximized) and the engines that
//! solve them.
//!
//! [`DenseSimplex`] is a self-contained two-phase bounded simplex on a dense
//! tableau; it re-solves from scratch and is meant for small models and as a
//! reference. [`HighsSolver`] (feature `highs`) keeps a warm-started HiGHS
//! instance alive across row additions and bound changes.

mod dense;
#[cfg(feature = "highs")]
mod highs;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dense::DenseSimplex;
#[cfg(feature = "highs")]
pub use highs::HighsSolver;

/// Primal feasibility tolerance used to validate solutions.
pub const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Var {
    pub lb: f64,
    pub ub: f64,
    pub obj: f64,
    /// Marks variables the branch-and-bound must drive to 0/1.
    pub binary: bool,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        Self { coeffs, sense, rhs }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpModel {
    vars: Vec<Var>,
    rows: Vec<Row>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, lb: f64, ub: f64, obj: f64, name: impl Into<String>) -> usize {
        self.vars.push(Var { lb, ub, obj, binary: false, name: name.into() });
        self.vars.len() - 1
    }

    pub fn add_binary_var(&mut self, obj: f64, name: impl Into<String>) -> usize {
        let j = self.add_var(0.0, 1.0, obj, name);
        self.vars[j].binary = true;
        j
    }

    /// Appends a row. Zero coefficients are dropped and repeated variables merged.
    pub fn add_row(&mut self, row: Row) -> Result<usize> {
        let mut coeffs = row.coeffs;
        if let Some(&(j, _)) = coeffs.iter().find(|&&(j, _)| j >= self.vars.len()) {
            return Err(Error::UnknownVariable(j));
        }
        coeffs.sort_by_key(|&(j, _)| j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        for (j, a) in coeffs {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.rows.push(Row { coeffs: merged, sense: row.sense, rhs: row.rhs });
        Ok(self.rows.len() - 1)
    }

    pub fn set_bounds(&mut self, var: usize, lb: f64, ub: f64) -> Result<()> {
        let v = self.vars.get_mut(var).ok_or(Error::UnknownVariable(var))?;
        v.lb = lb;
        v.ub = ub;
        Ok(())
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn has_crossed_bounds(&self) -> bool {
        self.vars.iter().any(|v| v.lb > v.ub)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.vars.iter().zip(x).map(|(v, &xi)| v.obj * xi).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = self
            .vars
            .iter()
            .zip(x)
            .map(|(v, &xi)| (v.lb - xi).max(xi - v.ub).max(0.0))
            .fold(0.0, f64::max);
        self.rows.iter().map(|r| r.violation(x)).fold(bounds, f64::max)
    }

    /// CPLEX LP-format text, for debugging dumps.
    pub fn to_lp_format(&self) -> String {
        let name = |j: usize| {
            let n = &self.vars[j].name;
            if n.is_empty() { format!("v{j}") } else { n.clone() }
        };
        let term = |out: &mut String, first: bool, a: f64, j: usize| {
            let sign = if a < 0.0 { " -" } else if first { "" } else { " +" };
            let _ = write!(out, "{sign} {} {}", a.abs(), name(j));
        };
        let mut out = String::from("Maximize\n obj:");
        let mut first = true;
        for (j, v) in self.vars.iter().enumerate() {
            if v.obj != 0.0 {
                term(&mut out, first, v.obj, j);
                first = false;
            }
        }
        if first {
            out.push_str(" 0");
        }
        out.push_str("\nSubject To\n");
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(out, " r{i}:");
            if r.coeffs.is_empty() {
                out.push_str(" 0 v0");
            }
            for (k, &(j, a)) in r.coeffs.iter().enumerate() {
                term(&mut out, k == 0, a, j);
            }
            let op = match r.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", r.rhs);
        }
        out.push_str("Bounds\n");
        for (j, v) in self.vars.iter().enumerate() {
            let lb = if v.lb == f64::NEG_INFINITY { "-inf".to_string() } else { v.lb.to_string() };
            let ub = if v.ub == f64::INFINITY { "+inf".to_string() } else { v.ub.to_string() };
            let _ = writeln!(out, " {lb} <= {} <= {ub}", name(j));
        }
        let bins: Vec<String> = (0..self.vars.len()).filter(|&j| self.vars[j].binary).map(name).collect();
        if !bins.is_empty() {
            let _ = writeln!(out, "Binaries\n {}", bins.join(" "));
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    pub iterations: u64,
}

/// An LP that can be modified and re-solved.
pub trait LpSolver {
    fn model(&self) -> &LpModel;
    fn add_row(&mut self, row: Row) -> Result<usize>;
    fn set_bounds(&mut self, var: usize, lb: f64, ub: f64) -> Result<()>;
    /// Wall-clock budget for the next solves, in seconds.
    fn set_time_limit(&mut self, seconds: f64);
    fn solve(&mut self) -> Result<LpSolution>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Dense,
    Highs,
}

impl Default for Engine {
    fn default() -> Self {
        if cfg!(feature = "highs") { Engine::Highs } else { Engine::Dense }
    }
}

pub fn make_solver(model: LpModel, engine: Engine, seed: u64) -> Result<Box<dyn LpSolver>> {
    match engine {
        Engine::Dense => Ok(Box::new(DenseSimplex::new(model))),
        #[cfg(feature = "highs")]
        Engine::Highs => Ok(Box::new(HighsSolver::new(model, seed)?)),
        #[cfg(not(feature = "highs"))]
        Engine::Highs => {
            let _ = seed;
            Err(Error::Lp("built without the `highs` feature".into()))
        }
    }
}

/// One-shot solve with the reference dense simplex.
pub fn solve_lp(model: &LpModel) -> LpSolution {
    dense::solve(model, u64::MAX)
}
