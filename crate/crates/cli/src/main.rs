use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use wcm::bench::{collect_instances, load_instance, run_benchmark, BenchConfig, InputFormat};
use wcm::graph::is_connected_matching;
use wcm::io::{generate_gnp, write_canonical, WeightDist};
use wcm::lp::Engine;
use wcm::oracle::brute_force_wcm;
use wcm::{solve, Formulation, SolverConfig};

#[derive(Parser)]
#[command(name = "wcm", version, about = "Maximum-weight connected matching solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Write a random G(n, p) instance in canonical format.
    Gen(GenArgs),
    /// Solve every instance in a directory and write a CSV report.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Canonical,
    Mwcs,
    Gmwcs,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Auto => InputFormat::Auto,
            FormatArg::Canonical => InputFormat::Canonical,
            FormatArg::Mwcs => InputFormat::Mwcs,
            FormatArg::Gmwcs => InputFormat::Gmwcs,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormulationArg {
    Compact,
    Exponential,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Highs,
    Dense,
}

#[derive(Args)]
struct Common {
    /// Wall-clock limit per solve, in seconds.
    #[arg(long, env = "WCM_TIME_LIMIT", default_value_t = 3600.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "highs")]
    engine: EngineArg,
}

impl Common {
    fn config(&self, formulation: Formulation) -> SolverConfig {
        let engine = match self.engine {
            EngineArg::Highs => Engine::Highs,
            EngineArg::Dense => Engine::Dense,
        };
        SolverConfig { formulation, time_limit_s: self.time_limit, seed: self.seed, engine, ..SolverConfig::default() }
    }
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "exponential")]
    formulation: FormulationArg,
    #[command(flatten)]
    common: Common,
    /// Also run the brute-force oracle and compare.
    #[arg(long)]
    oracle: bool,
    /// Write the full result as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Print the solve log as JSON lines on stderr.
    #[arg(long)]
    verbose: bool,
    /// Write the root LP in LP-text format.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    /// `uniform:a,b` or `gaussian:mu,sigma`.
    #[arg(long, default_value = "uniform:-1,1")]
    dist: WeightDist,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    dir: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    formulation: FormulationArg,
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    #[command(flatten)]
    common: Common,
    /// CSV report path; a JSON mirror is written next to it.
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    oracle: bool,
    /// Leave wall times out of the report so reruns are byte-identical.
    #[arg(long)]
    no_timings: bool,
}

fn formulations(arg: FormulationArg) -> Vec<Formulation> {
    match arg {
        FormulationArg::Compact => vec![Formulation::Compact],
        FormulationArg::Exponential => vec![Formulation::Exponential],
        FormulationArg::Both => vec![Formulation::Compact, Formulation::Exponential],
    }
}

fn run_solve(args: SolveArgs) -> Result<bool> {
    let inst = load_instance(&args.file, args.format.into())?;
    let oracle = if args.oracle { Some(brute_force_wcm(&inst)?) } else { None };
    let mut ok = true;
    for formulation in formulations(args.formulation) {
        let mut cfg = args.common.config(formulation);
        cfg.record_events = args.verbose;
        cfg.dump_lp = args.dump_lp.clone();
        let r = solve(&inst, &cfg)?;
        if args.verbose {
            for e in &r.events {
                eprintln!("{}", serde_json::to_string(e)?);
            }
        }
        let edges: Vec<String> = r
            .matching
            .edges()
            .iter()
            .map(|&e| {
                let (u, v) = inst.graph.edge(e);
                format!("{}-{}", inst.labels[u], inst.labels[v])
            })
            .collect();
        println!(
            "{} {} status={} lb={} ub={} gap={:.3e} nodes={} root_only={} cuts(msi={} indegree={} blossom={} lazy={}) time={:.3}s",
            inst.name,
            formulation,
            r.status,
            r.lb,
            r.ub,
            r.gap,
            r.nodes,
            r.root_only,
            r.cuts.msi,
            r.cuts.indegree,
            r.cuts.blossom,
            r.cuts.lazy,
            r.wall_time_s
        );
        println!("matching: {}", edges.join(" "));
        if !is_connected_matching(&inst.graph, &r.matching) {
            eprintln!("error: incumbent is not a connected matching");
            ok = false;
        }
        if let Some((value, _)) = &oracle {
            let agree = (value - r.lb).abs() <= 1e-6;
            println!("oracle: {value} ({})", if agree { "agrees" } else { "MISMATCH" });
            ok &= agree || r.status != wcm::SolveStatus::Optimal;
        }
        if let Some(path) = &args.json {
            let path = if args.formulation == FormulationArg::Both {
                path.with_extension(format!("{formulation}.json"))
            } else {
                path.clone()
            };
            std::fs::write(&path, serde_json::to_string_pretty(&r)?)
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(ok)
}

fn run_gen(args: GenArgs) -> Result<bool> {
    let inst = generate_gnp(args.n, args.p, args.dist, args.seed)?;
    let text = write_canonical(&inst);
    match &args.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn run_bench(args: BenchArgs) -> Result<bool> {
    if !args.dir.is_dir() {
        bail!("{} is not a directory", args.dir.display());
    }
    let paths = collect_instances(&args.dir)?;
    let cfg = BenchConfig {
        solver: args.common.config(Formulation::Exponential),
        formulations: formulations(args.formulation),
        format: args.format.into(),
        oracle: args.oracle,
        timings: !args.no_timings,
    };
    let report = run_benchmark(&paths, &cfg);
    std::fs::write(&args.report, report.to_csv()?).with_context(|| format!("writing {}", args.report.display()))?;
    let json = args.report.with_extension("json");
    std::fs::write(&json, report.to_json()?).with_context(|| format!("writing {}", json.display()))?;
    let a = report.aggregates;
    println!(
        "rows={} optimal={} root_only={} failed={} mismatches={}",
        a.rows, a.optimal, a.root_only, a.failed, a.mismatches
    );
    Ok(a.failed == 0 && a.mismatches == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Gen(a) => run_gen(a),
        Command::Bench(a) => run_bench(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
