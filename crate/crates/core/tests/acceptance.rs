//! Acceptance suite. Criteria run in sequence inside one test so that the
//! timing checks do not compete with each other; each prints one
//! `PASS`/`FAIL` line.

mod common;

use std::path::{Path, PathBuf};
use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wcm::bench::{collect_instances, load_instance, run_benchmark, BenchConfig, InputFormat};
use wcm::flow::{gomory_hu, max_flow, CapDigraph};
use wcm::formulation::{build_compact, build_exponential_base, vertex_values};
use wcm::graph::{is_connected_matching, Graph, Matching};
use wcm::io::{generate_gnp, write_canonical, WeightDist};
use wcm::lp::{make_solver, solve_lp, Engine, LpStatus};
use wcm::oracle::{brute_force_wcm, connected_matchings, enumerate_minimal_separators, is_minimal_separator};
use wcm::separation::{
    indegree_lhs, orientation_indegrees, separate_blossom_exact, separate_blossom_heuristic, separate_indegree,
    separate_msi_fractional_with, separate_msi_integer, Cut, MsiMode, Witness,
};
use wcm::solver::{strengthen_root, CutCounts};
use wcm::{solve, Formulation, Instance, SolveStatus, SolverConfig};

type Outcome = Result<String, String>;

const UNIFORM: WeightDist = WeightDist::Uniform { low: -1.0, high: 1.0 };

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn verify_incumbent(inst: &Instance, m: &Matching, lb: f64) -> Result<(), String> {
    check(is_connected_matching(&inst.graph, m), || format!("{}: incumbent not a connected matching", inst.name))?;
    let w = m.weight(&inst.weights);
    check((w - lb).abs() <= 1e-6, || format!("{}: incumbent weight {w} but lb {lb}", inst.name))
}

fn oracle_exactness() -> Outcome {
    let start = Instant::now();
    let mut solved = 0;
    for seed in 0..200u64 {
        let n = 3 + (seed % 8) as usize;
        let p = if seed % 2 == 0 { 0.3 } else { 0.6 };
        let inst = generate_gnp(n, p, UNIFORM, seed).map_err(|e| e.to_string())?;
        let (opt, _) = brute_force_wcm(&inst).map_err(|e| e.to_string())?;
        for f in [Formulation::Compact, Formulation::Exponential] {
            let r = solve(&inst, &SolverConfig::new(f)).map_err(|e| e.to_string())?;
            check(r.status == SolveStatus::Optimal, || format!("seed {seed} {f}: status {}", r.status))?;
            check((r.lb - opt).abs() <= 1e-6, || format!("seed {seed} {f}: {} vs oracle {opt}", r.lb))?;
            verify_incumbent(&inst, &r.matching, r.lb)?;
            solved += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{solved} solves over 200 instances match brute force in {secs:.1}s"))
}

/// Separation checks on random fractional points; returns every MSI witness seen.
fn separator_exactness(witnesses: &mut Vec<(Graph, Cut)>) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut points, mut msi_hits, mut blossom_hits) = (0, 0, 0);
    while points < 300 {
        let kind = rng.gen_range(0..3);
        let (n, p) = if kind == 0 {
            (rng.gen_range(3..=7), [0.4, 0.6, 0.8][rng.gen_range(0..3)])
        } else {
            (rng.gen_range(5..=7), [0.3, 0.4, 0.5][rng.gen_range(0..3)])
        };
        let g = random_graph(&mut rng, n, p);
        let x = match kind {
            0 => random_degree_feasible_point(&mut rng, &g),
            1 => random_sparse_point(&mut rng, &g),
            _ => {
                let w: Vec<f64> = (0..g.m()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let (model, _) = build_exponential_base(&instance(g.clone(), w));
                solve_lp(&model).values
            }
        };
        let pt = vertex_values(&x, &g);
        if pt.is_integral(1e-6) {
            continue;
        }
        points += 1;
        let matchings = connected_matchings(&g).map_err(|e| e.to_string())?;

        let best_msi = max_msi_violation(&g, &x);
        let best_blossom = max_blossom_violation(&g, &x);
        let borderline = |v: f64| (v - 1e-5).abs() < 1e-7;
        for contract in [true, false] {
            let cuts = separate_msi_fractional_with(&g, &pt, MsiMode::All, contract);
            check(borderline(best_msi) || cuts.is_empty() == (best_msi <= 1e-5), || {
                format!("msi (contract={contract}) found {} cuts, oracle max violation {best_msi}", cuts.len())
            })?;
            let first = separate_msi_fractional_with(&g, &pt, MsiMode::First, contract);
            check(first.len() == usize::from(!cuts.is_empty()), || "msi first mode disagrees with all".into())?;
            witnesses.extend(cuts.into_iter().map(|c| (g.clone(), c)));
        }
        let exact = separate_blossom_exact(&g, &pt);
        check(borderline(best_blossom) || exact.is_empty() == (best_blossom <= 1e-5), || {
            format!("blossom found {} cuts, oracle max violation {best_blossom}", exact.len())
        })?;
        msi_hits += usize::from(best_msi > 1e-5);
        blossom_hits += usize::from(best_blossom > 1e-5);

        let mut all: Vec<Cut> = separate_msi_fractional_with(&g, &pt, MsiMode::All, true);
        all.extend(exact);
        all.extend(separate_blossom_heuristic(&g, &pt));
        all.extend(separate_indegree(&g, &pt));
        for cut in &all {
            let v = cut.lhs(&x) - cut.rhs;
            check(v > 1e-5, || format!("{:?} cut with violation {v}", cut.family))?;
            check(valid_for_all(&cut.coeffs, cut.rhs, &matchings), || {
                format!("{:?} cut {:?} cuts off a connected matching", cut.family, cut.witness)
            })?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "{points} points agree with exhaustive search ({msi_hits} msi-violated, {blossom_hits} blossom-violated) in {secs:.1}s"
    ))
}

fn witness_minimality(witnesses: &mut Vec<(Graph, Cut)>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut integral = 0;
    while integral < 100 {
        let n = rng.gen_range(4..=9);
        let g = random_graph(&mut rng, n, 0.4);
        let mut covered = vec![false; n];
        let mut x = vec![0.0; g.m()];
        for (xe, &(u, v)) in x.iter_mut().zip(g.edges()) {
            if !covered[u] && !covered[v] && rng.gen_bool(0.5) {
                covered[u] = true;
                covered[v] = true;
                *xe = 1.0;
            }
        }
        let cuts = separate_msi_integer(&g, &vertex_values(&x, &g)).map_err(|e| e.to_string())?;
        integral += usize::from(!cuts.is_empty());
        witnesses.extend(cuts.into_iter().map(|c| (g.clone(), c)));
    }
    let total = witnesses.len();
    for (g, cut) in witnesses.iter() {
        let Witness::Msi { a, b, separator } = &cut.witness else {
            return Err("non-msi witness".into());
        };
        check(is_minimal_separator(g, separator, *a, *b), || format!("{separator:?} not minimal for ({a}, {b})"))?;
        let listed = enumerate_minimal_separators(g, *a, *b).map_err(|e| e.to_string())?;
        check(listed.contains(separator), || format!("{separator:?} not among enumerated separators"))?;
    }
    check(total >= 100, || format!("only {total} witnesses"))?;
    Ok(format!("{total}/{total} witnesses minimal"))
}

fn indegree_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut points = 0;
    while points < 80 {
        let n = rng.gen_range(3..=7);
        let g = random_graph(&mut rng, n, 0.5);
        if g.n() + g.m() > 14 {
            continue;
        }
        points += 1;
        let x = random_degree_feasible_point(&mut rng, &g);
        let pt = vertex_values(&x, &g);
        let val = vertex_sums(&g, &x);
        let best = max_orientation_lhs(&g, &val);
        let got = indegree_lhs(&orientation_indegrees(&g, &pt), &pt.val);
        check((got - best).abs() <= 1e-9, || format!("lhs {got} but brute force {best}"))?;
        let emitted = separate_indegree(&g, &pt).is_some();
        check(emitted == (best > 1.0 + 1e-5), || format!("emitted={emitted} at max lhs {best}"))?;
    }
    Ok(format!("{points} points match all 2^m orientations"))
}

fn gomory_hu_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..60 {
        let n = 2 + i % 7;
        let g = random_graph(&mut rng, n, 0.6);
        let cap: Vec<f64> = (0..g.m()).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..3.0) }).collect();
        let tree = gomory_hu(&g, &cap);
        check(tree.flow_calls == n - 1, || format!("{} flow calls for n = {n}", tree.flow_calls))?;
        let mut d = CapDigraph::new(n);
        for (&(u, v), &c) in g.edges().iter().zip(&cap) {
            d.add_arc(u, v, c);
            d.add_arc(v, u, c);
        }
        for s in 0..n {
            for t in s + 1..n {
                let direct = max_flow(&d, s, t).value;
                let (value, side) = tree.query(s, t);
                check((value - direct).abs() <= 1e-9, || format!("({s}, {t}): tree {value}, flow {direct}"))?;
                check(side[s] && !side[t], || "query side does not separate".into())?;
                let capacity = d.cut_capacity(&side);
                check((capacity - direct).abs() <= 1e-9, || format!("({s}, {t}): side cut {capacity}"))?;
            }
        }
    }
    Ok("60 graphs, all pairs equal direct max flow with n - 1 flow calls".into())
}

fn small_traces() -> Outcome {
    let k3 = instance(Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap(), vec![1.0; 3]);
    let cfg = SolverConfig::default();
    let (_, k3_stats) = strengthen_root(&k3, build_exponential_base(&k3).0, &cfg).map_err(|e| e.to_string())?;
    let k3_bounds = k3_stats.bounds;
    check(k3_bounds.len() == 2 && (k3_bounds[0] - 1.5).abs() < 1e-9, || format!("K3 bounds {k3_bounds:?}"))?;
    let r = solve(&k3, &cfg).map_err(|e| e.to_string())?;
    let one_blossom = CutCounts { blossom: 1, ..CutCounts::default() };
    check(r.cuts == one_blossom, || format!("K3 cuts {:?}", r.cuts))?;
    check(r.root_only && (r.root_bound - 1.0).abs() < 1e-9 && (r.lb - 1.0).abs() < 1e-9, || {
        format!("K3 root_only={} bound={} lb={}", r.root_only, r.root_bound, r.lb)
    })?;

    let p6 = instance(path(6), vec![1.0, -1.0, -1.0, -1.0, 1.0]);
    let base = build_exponential_base(&p6).0;
    let base_rows = base.num_rows();
    let (model, stats) = strengthen_root(&p6, base, &cfg).map_err(|e| e.to_string())?;
    check((stats.bounds[0] - 2.0).abs() < 1e-9, || format!("P6 first bound {:?}", stats.bounds))?;
    check(stats.round_cuts[0] == CutCounts { msi: 1, ..CutCounts::default() }, || {
        format!("P6 first round cuts {:?}", stats.round_cuts[0])
    })?;
    let row = &model.rows()[base_rows];
    let ends = [1.0, 0.0, 0.0, 0.0, 1.0];
    let mut matched = false;
    for a in 0..6 {
        for b in a + 2..6 {
            for s in enumerate_minimal_separators(&p6.graph, a, b).unwrap().into_iter().filter(|s| s.len() == 1) {
                let mut coef = [0.0; 5];
                for (u, sign) in [(a, 1.0), (b, 1.0), (s[0], -1.0)] {
                    for &(_, e) in p6.graph.incident(u) {
                        coef[e] += sign;
                    }
                }
                let dense: Vec<f64> = (0..5).map(|e| row.coeffs.iter().find(|c| c.0 == e).map_or(0.0, |c| c.1)).collect();
                let violated = (0..5).map(|e| coef[e] * ends[e]).sum::<f64>() - 1.0 > 0.5;
                matched |= dense == coef && row.rhs == 1.0 && violated;
            }
        }
    }
    check(matched, || format!("P6 first cut {:?} is not a violated single-vertex separator row", row.coeffs))?;
    check((stats.bound - 1.0).abs() < 1e-9, || format!("P6 final root bound {}", stats.bound))?;
    let r = solve(&p6, &cfg).map_err(|e| e.to_string())?;
    check(r.root_only && (r.lb - 1.0).abs() < 1e-9 && r.cuts.blossom == 0 && r.cuts.indegree == 0, || {
        format!("P6 result root_only={} lb={} cuts={:?}", r.root_only, r.lb, r.cuts)
    })?;
    Ok(format!("K3 root bounds {k3_bounds:?}, P6 root bounds {:?}", stats.bounds))
}

fn bound_dominance() -> Outcome {
    let mut held = 0;
    let mut violations = Vec::new();
    let total = 50;
    for seed in 0..total as u64 {
        let n = 20 + (seed as usize * 41) % 41;
        let p = 4.0 / (n - 1) as f64;
        let inst = generate_gnp(n, p, UNIFORM, 700 + seed).map_err(|e| e.to_string())?;
        let (compact, _) = build_compact(&inst, true);
        let mut lp = make_solver(compact, Engine::default(), 0).map_err(|e| e.to_string())?;
        let sol = lp.solve().map_err(|e| e.to_string())?;
        check(sol.status == LpStatus::Optimal, || format!("compact LP status {:?}", sol.status))?;
        let cfg = SolverConfig::default();
        let (_, stats) = strengthen_root(&inst, build_exponential_base(&inst).0, &cfg).map_err(|e| e.to_string())?;
        if stats.bound <= sol.objective + 1e-6 {
            held += 1;
        } else {
            violations.push(format!("seed {seed}: root {} > compact {}", stats.bound, sol.objective));
        }
    }
    for v in &violations {
        report(&format!("  dominance violated, {v}"));
    }
    check(held * 100 >= total * 95, || format!("held on {held}/{total}"))?;
    Ok(format!("exponential root bound within compact LP bound on {held}/{total}"))
}

fn large_instance() -> Outcome {
    let mut lines = Vec::new();
    for seed in [1u64, 2] {
        let inst = generate_gnp(10_000, 0.01, WeightDist::Gaussian { mean: 0.0, sd: 1.0 }, seed)
            .map_err(|e| e.to_string())?;
        let cfg = SolverConfig { time_limit_s: 60.0, ..SolverConfig::default() };
        let start = Instant::now();
        let r = solve(&inst, &cfg).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        check(r.status == SolveStatus::Optimal && secs < 60.0, || {
            format!("seed {seed}: {} after {secs:.1}s, gap {}", r.status, r.gap)
        })?;
        verify_incumbent(&inst, &r.matching, r.lb)?;
        lines.push(format!("seed {seed} {secs:.1}s ({} nodes, {} cuts)", r.nodes, r.cuts.total()));
    }
    Ok(format!("G(10000, 0.01) optimal: {}", lines.join(", ")))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (i, n) in [8usize, 10, 12, 14, 30].into_iter().enumerate() {
        let inst = generate_gnp(n, 0.4, UNIFORM, 900 + i as u64).map_err(|e| e.to_string())?;
        std::fs::write(dir.path().join(format!("g{i}.wcm")), write_canonical(&inst)).map_err(|e| e.to_string())?;
    }
    let paths = collect_instances(dir.path()).map_err(|e| e.to_string())?;
    let cfg = BenchConfig { oracle: true, timings: false, ..BenchConfig::default() };
    let first = run_benchmark(&paths, &cfg);
    let second = run_benchmark(&paths, &cfg);
    let (csv1, csv2) = (first.to_csv().map_err(|e| e.to_string())?, second.to_csv().map_err(|e| e.to_string())?);
    let (json1, json2) = (first.to_json().map_err(|e| e.to_string())?, second.to_json().map_err(|e| e.to_string())?);
    check(csv1 == csv2 && json1 == json2, || "reports differ between runs".into())?;
    check(first.aggregates.mismatches == 0 && first.aggregates.failed == 0, || format!("{:?}", first.aggregates))?;
    Ok(format!("{} report rows byte-identical across runs", first.rows.len()))
}

fn stp_instances(dir: &Path, limit_s: f64) -> Result<usize, String> {
    let paths = collect_instances(dir).map_err(|e| e.to_string())?;
    let mut count = 0;
    for path in paths.iter().filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("stp"))) {
        let inst = load_instance(path, InputFormat::Auto).map_err(|e| format!("{}: {e}", path.display()))?;
        let oracle = brute_force_wcm(&inst).ok().map(|(v, _)| v);
        for f in [Formulation::Compact, Formulation::Exponential] {
            let cfg = SolverConfig { formulation: f, time_limit_s: limit_s, ..SolverConfig::default() };
            let r = solve(&inst, &cfg).map_err(|e| e.to_string())?;
            check(r.lb <= r.ub + 1e-6, || format!("{} {f}: lb {} > ub {}", inst.name, r.lb, r.ub))?;
            verify_incumbent(&inst, &r.matching, r.lb)?;
            if inst.weights.iter().all(|&w| w < 0.0) {
                check(r.lb == 0.0 && r.ub.abs() <= 1e-6, || format!("{} {f}: all-negative gave {}", inst.name, r.ub))?;
            }
            if let (Some(v), SolveStatus::Optimal) = (oracle, r.status) {
                check((v - r.lb).abs() <= 1e-6, || format!("{} {f}: {} vs oracle {v}", inst.name, r.lb))?;
            }
        }
        count += 1;
    }
    Ok(count)
}

fn dimacs() -> Outcome {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let synthetic = stp_instances(&fixtures, 60.0)?;
    let mut msg = format!("{synthetic} synthetic STP instances consistent");
    if let Some(dir) = std::env::var_os("WCM_DIMACS_DIR").map(PathBuf::from) {
        let limit = std::env::var("WCM_TIME_LIMIT").ok().and_then(|s| s.parse().ok()).unwrap_or(60.0);
        let real = stp_instances(&dir, limit)?;
        msg.push_str(&format!(", {real} instances from {}", dir.display()));
    } else {
        msg.push_str(" (WCM_DIMACS_DIR not set)");
    }
    Ok(msg)
}

#[test]
fn acceptance() {
    let mut witnesses = Vec::new();
    let outcomes: Vec<(&str, Outcome)> = vec![
        ("1 oracle exactness", oracle_exactness()),
        ("2 separator exactness", separator_exactness(&mut witnesses)),
        ("3 separator witnesses minimal", witness_minimality(&mut witnesses)),
        ("4 indegree orientation", indegree_exactness()),
        ("5 gomory-hu", gomory_hu_exactness()),
        ("6 small traces", small_traces()),
        ("7 bound dominance", bound_dominance()),
        ("8 large random instance", large_instance()),
        ("9 determinism", determinism()),
        ("10 dimacs-style inputs", dimacs()),
    ];
    let mut failed = Vec::new();
    for (name, outcome) in &outcomes {
        match outcome {
            Ok(msg) => report(&format!("PASS criterion {name}: {msg}")),
            Err(msg) => {
                report(&format!("FAIL criterion {name}: {msg}"));
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
