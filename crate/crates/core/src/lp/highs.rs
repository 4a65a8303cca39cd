//! Warm-started HiGHS instance behind the [`LpSolver`] trait.

use std::ffi::{c_void, CString};
use std::os::raw::c_int;

use highs_sys::*;

use super::{LpModel, LpSolution, LpSolver, LpStatus, Row, Sense, FEAS_TOL};
use crate::error::{Error, Result};

const STATUS_ERROR: c_int = -1;
const MODEL_STATUS_OPTIMAL: c_int = 7;
const MODEL_STATUS_INFEASIBLE: c_int = 8;
const MODEL_STATUS_UNBOUNDED_OR_INFEASIBLE: c_int = 9;
const MODEL_STATUS_UNBOUNDED: c_int = 10;
const MODEL_STATUS_TIME_LIMIT: c_int = 13;
const MODEL_STATUS_ITERATION_LIMIT: c_int = 14;
const MATRIX_FORMAT_COLUMN_WISE: c_int = 1;
const OBJECTIVE_SENSE_MAXIMIZE: c_int = -1;

pub struct HighsSolver {
    ptr: *mut c_void,
    model: LpModel,
    time_limit: f64,
    /// Columns whose bounds were crossed when set and not yet pushed to HiGHS.
    stale: Vec<usize>,
}

fn row_range(sense: Sense, rhs: f64) -> (f64, f64) {
    match sense {
        Sense::Le => (f64::NEG_INFINITY, rhs),
        Sense::Ge => (rhs, f64::INFINITY),
        Sense::Eq => (rhs, rhs),
    }
}

fn check(code: c_int, what: &str) -> Result<()> {
    if code == STATUS_ERROR {
        Err(Error::Lp(format!("HiGHS call {what} failed")))
    } else {
        Ok(())
    }
}

impl HighsSolver {
    pub fn new(model: LpModel, seed: u64) -> Result<Self> {
        let ptr = unsafe { Highs_create() };
        if ptr.is_null() {
            return Err(Error::Lp("Highs_create returned null".into()));
        }
        let mut s = Self { ptr, model: LpModel::new(), time_limit: f64::INFINITY, stale: Vec::new() };
        s.set_bool("output_flag", false)?;
        s.set_int("random_seed", (seed % i32::MAX as u64) as c_int)?;
        s.set_int("threads", 1)?;
        s.pass(&model)?;
        s.model = model;
        Ok(s)
    }

    fn set_bool(&mut self, name: &str, value: bool) -> Result<()> {
        let key = CString::new(name).expect("option name");
        check(unsafe { Highs_setBoolOptionValue(self.ptr, key.as_ptr(), value as c_int) }, name)
    }

    fn set_int(&mut self, name: &str, value: c_int) -> Result<()> {
        let key = CString::new(name).expect("option name");
        check(unsafe { Highs_setIntOptionValue(self.ptr, key.as_ptr(), value) }, name)
    }

    fn set_double(&mut self, name: &str, value: f64) -> Result<()> {
        let key = CString::new(name).expect("option name");
        check(unsafe { Highs_setDoubleOptionValue(self.ptr, key.as_ptr(), value) }, name)
    }

    fn pass(&mut self, model: &LpModel) -> Result<()> {
        let nc = model.num_vars();
        let nr = model.num_rows();
        let mut cols: Vec<Vec<(c_int, f64)>> = vec![Vec::new(); nc];
        for (i, r) in model.rows().iter().enumerate() {
            for &(j, a) in &r.coeffs {
                cols[j].push((i as c_int, a));
            }
        }
        let mut start = Vec::with_capacity(nc);
        let mut index = Vec::new();
        let mut value = Vec::new();
        for col in &cols {
            start.push(index.len() as c_int);
            for &(i, a) in col {
                index.push(i);
                value.push(a);
            }
        }
        let cost: Vec<f64> = model.vars().iter().map(|v| v.obj).collect();
        let lower: Vec<f64> = model.vars().iter().map(|v| v.lb).collect();
        let upper: Vec<f64> = model.vars().iter().map(|v| v.ub).collect();
        let (row_lower, row_upper): (Vec<f64>, Vec<f64>) =
            model.rows().iter().map(|r| row_range(r.sense, r.rhs)).unzip();
        let code = unsafe {
            Highs_passLp(
                self.ptr,
                nc as c_int,
                nr as c_int,
                index.len() as c_int,
                MATRIX_FORMAT_COLUMN_WISE,
                OBJECTIVE_SENSE_MAXIMIZE,
                0.0,
                cost.as_ptr(),
                lower.as_ptr(),
                upper.as_ptr(),
                row_lower.as_ptr(),
                row_upper.as_ptr(),
                start.as_ptr(),
                index.as_ptr(),
                value.as_ptr(),
            )
        };
        check(code, "passLp")
    }
}

impl Drop for HighsSolver {
    fn drop(&mut self) {
        unsafe { Highs_destroy(self.ptr) }
    }
}

impl LpSolver for HighsSolver {
    fn model(&self) -> &LpModel {
        &self.model
    }

    fn add_row(&mut self, row: Row) -> Result<usize> {
        let id = self.model.add_row(row)?;
        let r = &self.model.rows()[id];
        let index: Vec<c_int> = r.coeffs.iter().map(|&(j, _)| j as c_int).collect();
        let value: Vec<f64> = r.coeffs.iter().map(|&(_, a)| a).collect();
        let (lo, hi) = row_range(r.sense, r.rhs);
        let code = unsafe { Highs_addRow(self.ptr, lo, hi, index.len() as c_int, index.as_ptr(), value.as_ptr()) };
        check(code, "addRow")?;
        Ok(id)
    }

    fn set_bounds(&mut self, var: usize, lb: f64, ub: f64) -> Result<()> {
        self.model.set_bounds(var, lb, ub)?;
        if lb <= ub {
            check(unsafe { Highs_changeColBounds(self.ptr, var as c_int, lb, ub) }, "changeColBounds")?;
        } else {
            self.stale.push(var);
        }
        Ok(())
    }

    fn set_time_limit(&mut self, seconds: f64) {
        self.time_limit = seconds.max(0.0);
    }

    fn solve(&mut self) -> Result<LpSolution> {
        let nv = self.model.num_vars();
        if self.model.has_crossed_bounds() {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: f64::NAN,
                values: vec![0.0; nv],
                iterations: 0,
            });
        }
        if nv == 0 {
            let feasible = self.model.max_violation(&[]) <= FEAS_TOL;
            return Ok(LpSolution {
                status: if feasible { LpStatus::Optimal } else { LpStatus::Infeasible },
                objective: if feasible { 0.0 } else { f64::NAN },
                values: Vec::new(),
                iterations: 0,
            });
        }
        for j in std::mem::take(&mut self.stale) {
            let v = &self.model.vars()[j];
            let (lb, ub) = (v.lb, v.ub);
            check(unsafe { Highs_changeColBounds(self.ptr, j as c_int, lb, ub) }, "changeColBounds")?;
        }
        let limit = if self.time_limit.is_finite() { self.time_limit } else { f64::INFINITY };
        unsafe { Highs_zeroAllClocks(self.ptr) };
        self.set_double("time_limit", limit)?;
        check(unsafe { Highs_run(self.ptr) }, "run")?;
        let status = match unsafe { Highs_getModelStatus(self.ptr) } {
            MODEL_STATUS_OPTIMAL => LpStatus::Optimal,
            MODEL_STATUS_INFEASIBLE => LpStatus::Infeasible,
            MODEL_STATUS_UNBOUNDED | MODEL_STATUS_UNBOUNDED_OR_INFEASIBLE => LpStatus::Unbounded,
            MODEL_STATUS_TIME_LIMIT => LpStatus::TimeLimit,
            MODEL_STATUS_ITERATION_LIMIT => LpStatus::IterationLimit,
            other => return Err(Error::Lp(format!("unexpected HiGHS model status {other}"))),
        };
        let nr = self.model.num_rows();
        let mut values = vec![0.0; nv];
        let mut col_dual = vec![0.0; nv];
        let mut row_value = vec![0.0; nr];
        let mut row_dual = vec![0.0; nr];
        unsafe {
            Highs_getSolution(
                self.ptr,
                values.as_mut_ptr(),
                col_dual.as_mut_ptr(),
                row_value.as_mut_ptr(),
                row_dual.as_mut_ptr(),
            )
        };
        let mut iters: c_int = 0;
        let key = CString::new("simplex_iteration_count").expect("info name");
        unsafe { Highs_getIntInfoValue(self.ptr, key.as_ptr(), &mut iters) };
        let objective =
            if status == LpStatus::Optimal { unsafe { Highs_getObjectiveValue(self.ptr) } } else { f64::NAN };
        Ok(LpSolution { status, objective, values, iterations: iters.max(0) as u64 })
    }
}
