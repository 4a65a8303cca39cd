//! Benchmark runs and their reports.
//!
//! CSV columns, in order: `instance, n, m, formulation, status, lb, ub, gap,
//! root_only, nodes, cuts_msi, cuts_indegree, cuts_blossom, cuts_lazy,
//! root_bound, wall_time_s, oracle, mismatch, error`. Optional cells are empty.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::is_connected_matching;
use crate::io::{detect_stp_mode, import_stp, parse_canonical, Instance, StpMode};
use crate::oracle::brute_force_wcm;
use crate::solver::{solve, Formulation, SolveResult, SolveStatus, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// `.stp` files are imported with the detected mode, everything else is canonical.
    Auto,
    Canonical,
    Mwcs,
    Gmwcs,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(InputFormat::Auto),
            "canonical" => Ok(InputFormat::Canonical),
            "mwcs" => Ok(InputFormat::Mwcs),
            "gmwcs" => Ok(InputFormat::Gmwcs),
            other => Err(Error::Format(format!("unknown input format `{other}`"))),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Auto => "auto",
            InputFormat::Canonical => "canonical",
            InputFormat::Mwcs => "mwcs",
            InputFormat::Gmwcs => "gmwcs",
        })
    }
}

/// Reads an instance; its name is the file stem.
pub fn load_instance(path: &Path, format: InputFormat) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
    let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
    let is_stp = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("stp"));
    match format {
        InputFormat::Canonical => parse_canonical(&text, &name),
        InputFormat::Mwcs => import_stp(&text, StpMode::Mwcs, &name),
        InputFormat::Gmwcs => import_stp(&text, StpMode::Gmwcs, &name),
        InputFormat::Auto if is_stp => import_stp(&text, detect_stp_mode(&text), &name),
        InputFormat::Auto => parse_canonical(&text, &name),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub formulation: Formulation,
    /// Solve status, or `failed` when the instance could not be solved.
    pub status: String,
    pub lb: Option<f64>,
    pub ub: Option<f64>,
    pub gap: Option<f64>,
    pub root_only: Option<bool>,
    pub nodes: Option<u64>,
    pub cuts_msi: Option<usize>,
    pub cuts_indegree: Option<usize>,
    pub cuts_blossom: Option<usize>,
    pub cuts_lazy: Option<usize>,
    pub root_bound: Option<f64>,
    pub wall_time_s: Option<f64>,
    pub oracle: Option<f64>,
    pub mismatch: Option<bool>,
    pub error: Option<String>,
}

impl ReportRow {
    pub fn from_result(inst: &Instance, formulation: Formulation, r: &SolveResult, timings: bool) -> Self {
        Self {
            instance: inst.name.clone(),
            n: inst.n(),
            m: inst.m(),
            formulation,
            status: r.status.to_string(),
            lb: Some(r.lb),
            ub: Some(r.ub),
            gap: Some(r.gap),
            root_only: Some(r.root_only),
            nodes: Some(r.nodes),
            cuts_msi: Some(r.cuts.msi),
            cuts_indegree: Some(r.cuts.indegree),
            cuts_blossom: Some(r.cuts.blossom),
            cuts_lazy: Some(r.cuts.lazy),
            root_bound: r.root_bound.is_finite().then_some(r.root_bound),
            wall_time_s: timings.then_some(r.wall_time_s),
            oracle: None,
            mismatch: None,
            error: None,
        }
    }

    pub fn failed(instance: String, formulation: Formulation, n: usize, m: usize, error: &Error) -> Self {
        Self {
            instance,
            n,
            m,
            formulation,
            status: "failed".into(),
            lb: None,
            ub: None,
            gap: None,
            root_only: None,
            nodes: None,
            cuts_msi: None,
            cuts_indegree: None,
            cuts_blossom: None,
            cuts_lazy: None,
            root_bound: None,
            wall_time_s: None,
            oracle: None,
            mismatch: None,
            error: Some(error.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregates {
    pub rows: usize,
    pub optimal: usize,
    pub root_only: usize,
    pub failed: usize,
    pub mismatches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub aggregates: Aggregates,
}

impl Report {
    pub fn from_rows(rows: Vec<ReportRow>) -> Self {
        let aggregates = Self::aggregate(&rows);
        Self { rows, aggregates }
    }

    pub fn aggregate(rows: &[ReportRow]) -> Aggregates {
        Aggregates {
            rows: rows.len(),
            optimal: rows.iter().filter(|r| r.status == "optimal").count(),
            root_only: rows.iter().filter(|r| r.root_only == Some(true)).count(),
            failed: rows.iter().filter(|r| r.status == "failed").count(),
            mismatches: rows.iter().filter(|r| r.mismatch == Some(true)).count(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<std::result::Result<Vec<ReportRow>, _>>();
        Ok(Self::from_rows(rows.map_err(|e| Error::Format(e.to_string()))?))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub solver: SolverConfig,
    pub formulations: Vec<Formulation>,
    pub format: InputFormat,
    /// Cross-check every instance the oracle accepts.
    pub oracle: bool,
    /// Record wall-clock times. Off gives byte-identical reports across runs.
    pub timings: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            formulations: vec![Formulation::Compact, Formulation::Exponential],
            format: InputFormat::Auto,
            oracle: false,
            timings: true,
        }
    }
}

/// Solves one instance under every configured formulation.
pub fn bench_instance(inst: &Instance, cfg: &BenchConfig) -> Vec<ReportRow> {
    let oracle = if cfg.oracle { brute_force_wcm(inst).ok().map(|(v, _)| v) } else { None };
    cfg.formulations
        .iter()
        .map(|&formulation| {
            let solver = SolverConfig { formulation, ..cfg.solver.clone() };
            match solve(inst, &solver) {
                Ok(r) => {
                    let mut row = ReportRow::from_result(inst, formulation, &r, cfg.timings);
                    if !is_connected_matching(&inst.graph, &r.matching) {
                        row.error = Some("incumbent is not a connected matching".into());
                    }
                    if let Some(v) = oracle {
                        row.oracle = Some(v);
                        let wrong = r.lb > v + 1e-6 || (r.status == SolveStatus::Optimal && (r.lb - v).abs() > 1e-6);
                        row.mismatch = Some(wrong);
                    }
                    row
                }
                Err(e) => ReportRow::failed(inst.name.clone(), formulation, inst.n(), inst.m(), &e),
            }
        })
        .collect()
}

/// Runs every path (sorted) and collects one row per instance and formulation.
pub fn run_benchmark(paths: &[PathBuf], cfg: &BenchConfig) -> Report {
    let mut paths = paths.to_vec();
    paths.sort();
    let mut rows = Vec::new();
    for path in &paths {
        match load_instance(path, cfg.format) {
            Ok(inst) => rows.extend(bench_instance(&inst, cfg)),
            Err(e) => {
                let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
                for &f in &cfg.formulations {
                    rows.push(ReportRow::failed(name.clone(), f, 0, 0, &e));
                }
            }
        }
    }
    Report::from_rows(rows)
}

/// Instance files directly inside `dir` (`.wcm`, `.txt`, `.stp`), sorted.
pub fn collect_instances(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries =
        std::fs::read_dir(dir).map_err(|e| Error::Io { path: dir.display().to_string(), msg: e.to_string() })?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::Io { path: dir.display().to_string(), msg: e.to_string() })?.path();
        let ext = path.extension().map(|e| e.to_string_lossy().to_ascii_lowercase());
        if path.is_file() && matches!(ext.as_deref(), Some("wcm" | "txt" | "stp")) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}
