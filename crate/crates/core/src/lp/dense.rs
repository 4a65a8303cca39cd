//! Two-phase primal simplex for bounded variables on a dense tableau.
//!
//! Columns are laid out as `[structural | slack | artificial]`. Row `i` reads
//! `a_i x + s_i + sigma_i r_i = b_i`, where the slack bounds encode the row
//! sense and the artificial `r_i` only exists to start phase one when the
//! slack alone cannot absorb the residual.

use super::{LpModel, LpSolution, LpSolver, LpStatus, Row, Sense};
use crate::error::Result;

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Free variable resting at zero.
    AtZero,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `B^-1 A`, row-major.
    t: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    x: Vec<f64>,
    status: Vec<Status>,
    basis: Vec<usize>,
    iterations: u64,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.cols + j]
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.cols..(i + 1) * self.cols];
                for (dj, &a) in d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, q: usize, d: &mut [f64]) {
        let cols = self.cols;
        let p = self.t[r * cols + q];
        for j in 0..cols {
            self.t[r * cols + j] /= p;
        }
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for row in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let f = row[q];
            if f != 0.0 {
                for (a, &b) in row.iter_mut().zip(prow.iter()) {
                    *a -= f * b;
                }
                row[q] = 0.0;
            }
        }
        let f = d[q];
        if f != 0.0 {
            for (dj, &b) in d.iter_mut().zip(prow.iter()) {
                *dj -= f * b;
            }
            d[q] = 0.0;
        }
    }

    /// Maximizes `cost . x` from the current basis.
    fn optimize(&mut self, cost: &[f64], max_iter: u64) -> Outcome {
        let mut d = self.reduced_costs(cost);
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= max_iter {
                return Outcome::IterationLimit;
            }
            let bland = degenerate_run > 50;
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.cols {
                let dir = match self.status[j] {
                    Status::Basic(_) => continue,
                    _ if self.lb[j] == self.ub[j] => continue,
                    Status::AtLower if d[j] > OPT_TOL => 1.0,
                    Status::AtUpper if d[j] < -OPT_TOL => -1.0,
                    Status::AtZero if d[j].abs() > OPT_TOL => d[j].signum(),
                    _ => continue,
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if entering.is_none_or(|(k, _)| d[j].abs() > d[k].abs()) {
                    entering = Some((j, dir));
                }
            }
            let Some((q, dir)) = entering else { return Outcome::Optimal };

            // Ratio test: how far can x_q move in direction `dir`?
            let mut step = self.ub[q] - self.lb[q];
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..self.rows {
                let alpha = self.at(i, q) * dir;
                let b = self.basis[i];
                let limit = if alpha > PIVOT_TOL && self.lb[b].is_finite() {
                    Some(((self.x[b] - self.lb[b]) / alpha, false))
                } else if alpha < -PIVOT_TOL && self.ub[b].is_finite() {
                    Some(((self.ub[b] - self.x[b]) / -alpha, true))
                } else {
                    None
                };
                if let Some((lim, to_upper)) = limit {
                    let lim = lim.max(0.0);
                    let better = match leave {
                        None => lim < step,
                        Some((r, _)) => lim < step || (bland && lim == step && self.basis[i] < self.basis[r]),
                    };
                    if better {
                        step = lim;
                        leave = Some((i, to_upper));
                    }
                }
            }
            if !step.is_finite() {
                return Outcome::Unbounded;
            }
            self.iterations += 1;
            degenerate_run = if step <= PIVOT_TOL { degenerate_run + 1 } else { 0 };

            for i in 0..self.rows {
                let a = self.at(i, q);
                if a != 0.0 {
                    let b = self.basis[i];
                    self.x[b] -= a * dir * step;
                }
            }
            self.x[q] += dir * step;
            match leave {
                None => {
                    // bound flip
                    let at_upper = dir > 0.0;
                    self.x[q] = if at_upper { self.ub[q] } else { self.lb[q] };
                    self.status[q] = if at_upper { Status::AtUpper } else { Status::AtLower };
                }
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    self.x[out] = if to_upper { self.ub[out] } else { self.lb[out] };
                    self.status[out] = if to_upper { Status::AtUpper } else { Status::AtLower };
                    self.basis[r] = q;
                    self.status[q] = Status::Basic(r);
                    self.pivot(r, q, &mut d);
                }
            }
        }
    }
}

fn nonbasic_start(lb: f64, ub: f64) -> (f64, Status) {
    if lb.is_finite() {
        (lb, Status::AtLower)
    } else if ub.is_finite() {
        (ub, Status::AtUpper)
    } else {
        (0.0, Status::AtZero)
    }
}

fn slack_bounds(sense: Sense) -> (f64, f64) {
    match sense {
        Sense::Le => (0.0, f64::INFINITY),
        Sense::Ge => (f64::NEG_INFINITY, 0.0),
        Sense::Eq => (0.0, 0.0),
    }
}

pub(super) fn solve(model: &LpModel, max_iter: u64) -> LpSolution {
    let nv = model.num_vars();
    let nr = model.num_rows();
    let infeasible = |iterations| LpSolution {
        status: LpStatus::Infeasible,
        objective: f64::NAN,
        values: vec![0.0; nv],
        iterations,
    };
    if model.has_crossed_bounds() {
        return infeasible(0);
    }
    let cols = nv + 2 * nr;
    let max_iter = if max_iter == u64::MAX { 50 * (cols as u64 + nr as u64) + 1000 } else { max_iter };

    let mut tab = Tableau {
        rows: nr,
        cols,
        t: vec![0.0; nr * cols],
        lb: vec![0.0; cols],
        ub: vec![0.0; cols],
        x: vec![0.0; cols],
        status: vec![Status::AtLower; cols],
        basis: vec![0; nr],
        iterations: 0,
    };
    for (j, v) in model.vars().iter().enumerate() {
        tab.lb[j] = v.lb;
        tab.ub[j] = v.ub;
        let (x0, st) = nonbasic_start(v.lb, v.ub);
        tab.x[j] = x0;
        tab.status[j] = st;
    }
    for (i, row) in model.rows().iter().enumerate() {
        let s = nv + i;
        let r = nv + nr + i;
        let (slb, sub) = slack_bounds(row.sense);
        tab.lb[s] = slb;
        tab.ub[s] = sub;
        let resid = row.rhs - row.activity(&tab.x);
        let base = i * cols;
        if resid >= slb - PHASE1_TOL && resid <= sub + PHASE1_TOL {
            for &(j, a) in &row.coeffs {
                tab.t[base + j] = a;
            }
            tab.t[base + s] = 1.0;
            tab.x[s] = resid;
            tab.status[s] = Status::Basic(i);
            tab.basis[i] = s;
            tab.ub[r] = 0.0;
            tab.status[r] = Status::AtLower;
        } else {
            let (sval, st) = if resid < slb { (slb, Status::AtLower) } else { (sub, Status::AtUpper) };
            tab.x[s] = sval;
            tab.status[s] = st;
            let gap = resid - sval;
            let sigma = gap.signum();
            // Row scaled by 1/sigma so the artificial enters the basis with coefficient 1.
            for &(j, a) in &row.coeffs {
                tab.t[base + j] = a / sigma;
            }
            tab.t[base + s] = 1.0 / sigma;
            tab.t[base + r] = 1.0;
            tab.ub[r] = f64::INFINITY;
            tab.x[r] = gap.abs();
            tab.status[r] = Status::Basic(i);
            tab.basis[i] = r;
        }
    }

    let has_artificial = (0..nr).any(|i| tab.basis[i] >= nv + nr);
    if has_artificial {
        let mut phase1 = vec![0.0; cols];
        for c in phase1.iter_mut().skip(nv + nr) {
            *c = -1.0;
        }
        match tab.optimize(&phase1, max_iter) {
            Outcome::IterationLimit => {
                return LpSolution {
                    status: LpStatus::IterationLimit,
                    objective: f64::NAN,
                    values: tab.x[..nv].to_vec(),
                    iterations: tab.iterations,
                }
            }
            Outcome::Unbounded => unreachable!("phase one objective is bounded by zero"),
            Outcome::Optimal => {}
        }
        let infeas: f64 = tab.x[nv + nr..].iter().sum();
        if infeas > PHASE1_TOL * (1.0 + nr as f64).sqrt() {
            return infeasible(tab.iterations);
        }
        for r in nv + nr..cols {
            tab.ub[r] = 0.0;
            if !matches!(tab.status[r], Status::Basic(_)) {
                tab.x[r] = 0.0;
                tab.status[r] = Status::AtLower;
            }
        }
    }

    let mut cost = vec![0.0; cols];
    for (j, v) in model.vars().iter().enumerate() {
        cost[j] = v.obj;
    }
    let status = match tab.optimize(&cost, max_iter) {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
        Outcome::IterationLimit => LpStatus::IterationLimit,
    };
    let mut values = tab.x[..nv].to_vec();
    for (xj, v) in values.iter_mut().zip(model.vars()) {
        *xj = xj.clamp(v.lb, v.ub);
    }
    let objective = if status == LpStatus::Optimal { model.objective(&values) } else { f64::NAN };
    LpSolution { status, objective, values, iterations: tab.iterations }
}

/// [`LpSolver`] that re-solves its model from scratch on every call.
#[derive(Debug, Clone)]
pub struct DenseSimplex {
    model: LpModel,
    max_iter: u64,
}

impl DenseSimplex {
    pub fn new(model: LpModel) -> Self {
        Self { model, max_iter: u64::MAX }
    }

    pub fn with_iteration_limit(mut self, max_iter: u64) -> Self {
        self.max_iter = max_iter;
        self
    }
}

impl LpSolver for DenseSimplex {
    fn model(&self) -> &LpModel {
        &self.model
    }

    fn add_row(&mut self, row: Row) -> Result<usize> {
        self.model.add_row(row)
    }

    fn set_bounds(&mut self, var: usize, lb: f64, ub: f64) -> Result<()> {
        self.model.set_bounds(var, lb, ub)
    }

    fn set_time_limit(&mut self, _seconds: f64) {}

    fn solve(&mut self) -> Result<LpSolution> {
        Ok(solve(&self.model, self.max_iter))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{solve_lp, FEAS_TOL};
    use super::*;

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn single_bounded_variable() {
        let mut m = LpModel::new();
        m.add_var(0.0, 1.0, 1.0, "x");
        let s = solve_lp(&m);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(approx(s.objective, 1.0));
    }

    #[test]
    fn shared_budget() {
        let mut m = LpModel::new();
        let a = m.add_var(0.0, f64::INFINITY, 1.0, "a");
        let b = m.add_var(0.0, f64::INFINITY, 1.0, "b");
        m.add_row(Row::new(vec![(a, 1.0), (b, 1.0)], Sense::Le, 1.0)).unwrap();
        let s = solve_lp(&m);
        assert!(approx(s.objective, 1.0));
    }

    #[test]
    fn crossed_bounds_are_infeasible() {
        let mut m = LpModel::new();
        m.add_var(1.0, 0.0, 1.0, "x");
        assert_eq!(solve_lp(&m).status, LpStatus::Infeasible);
    }

    #[test]
    fn rows_and_bounds_change_the_optimum() {
        let mut s = DenseSimplex::new({
            let mut m = LpModel::new();
            m.add_var(0.0, 1.0, 1.0, "x");
            m
        });
        s.add_row(Row::new(vec![(0, 1.0)], Sense::Le, 0.0)).unwrap();
        assert!(approx(s.solve().unwrap().objective, 0.0));

        let mut neg = DenseSimplex::new({
            let mut m = LpModel::new();
            m.add_var(0.0, 1.0, -1.0, "x");
            m
        });
        neg.set_bounds(0, 1.0, 1.0).unwrap();
        assert!(approx(neg.solve().unwrap().objective, -1.0));
    }

    #[test]
    fn phase_one_with_equalities_and_ge_rows() {
        // max x + 2y  s.t. x + y = 3, x - y >= 1, y <= 5
        let mut m = LpModel::new();
        let x = m.add_var(0.0, f64::INFINITY, 1.0, "x");
        let y = m.add_var(0.0, 5.0, 2.0, "y");
        m.add_row(Row::new(vec![(x, 1.0), (y, 1.0)], Sense::Eq, 3.0)).unwrap();
        m.add_row(Row::new(vec![(x, 1.0), (y, -1.0)], Sense::Ge, 1.0)).unwrap();
        let s = solve_lp(&m);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(approx(s.values[x], 2.0) && approx(s.values[y], 1.0));
        assert!(approx(s.objective, 4.0));
        assert!(m.max_violation(&s.values) < FEAS_TOL);
    }

    #[test]
    fn detects_infeasible_rows() {
        let mut m = LpModel::new();
        let x = m.add_var(0.0, 1.0, 1.0, "x");
        m.add_row(Row::new(vec![(x, 1.0)], Sense::Ge, 2.0)).unwrap();
        assert_eq!(solve_lp(&m).status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut m = LpModel::new();
        let x = m.add_var(0.0, f64::INFINITY, 1.0, "x");
        let y = m.add_var(0.0, f64::INFINITY, 0.0, "y");
        m.add_row(Row::new(vec![(x, 1.0), (y, -1.0)], Sense::Le, 1.0)).unwrap();
        assert_eq!(solve_lp(&m).status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable() {
        // max -x  s.t. x >= -2 as a row, x free
        let mut m = LpModel::new();
        let x = m.add_var(f64::NEG_INFINITY, f64::INFINITY, -1.0, "x");
        m.add_row(Row::new(vec![(x, 1.0)], Sense::Ge, -2.0)).unwrap();
        let s = solve_lp(&m);
        assert!(approx(s.values[x], -2.0));
    }

    #[test]
    fn iteration_limit_is_reported() {
        let mut m = LpModel::new();
        let vars: Vec<_> = (0..4).map(|j| m.add_var(0.0, f64::INFINITY, 1.0 + j as f64, "")).collect();
        m.add_row(Row::new(vars.iter().map(|&j| (j, 1.0)).collect(), Sense::Le, 1.0)).unwrap();
        m.add_row(Row::new(vars.iter().map(|&j| (j, 1.0)).collect(), Sense::Ge, 0.5)).unwrap();
        let s = DenseSimplex::new(m).with_iteration_limit(0).solve().unwrap();
        assert_eq!(s.status, LpStatus::IterationLimit);
    }
}
