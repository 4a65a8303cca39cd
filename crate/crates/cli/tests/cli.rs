use std::path::Path;
use std::process::{Command, Output};

fn wcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcm")).args(args).env_remove("WCM_TIME_LIMIT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gen(dir: &Path, name: &str, n: &str, seed: &str) -> String {
    let path = dir.join(name).display().to_string();
    let o = wcm(&["gen", "--n", n, "--p", "0.4", "--seed", seed, "--out", &path]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn solve_agrees_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "g.wcm", "9", "4");
    let json = dir.path().join("r.json");
    let o = wcm(&["solve", &file, "--formulation", "both", "--oracle", "--json", json.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.matches("status=optimal").count(), 2);
    assert_eq!(out.matches("(agrees)").count(), 2);
    let text = std::fs::read_to_string(dir.path().join("r.exponential.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["status"], "optimal");
}

#[test]
fn verbose_log_and_lp_dump() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "g.wcm", "12", "7");
    let lp = dir.path().join("root.lp");
    let o = wcm(&["solve", &file, "--verbose", "--dump-lp", lp.to_str().unwrap()]);
    assert!(o.status.success());
    let log = String::from_utf8_lossy(&o.stderr);
    assert!(log.lines().count() > 0);
    for line in log.lines() {
        let e: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(e["kind"].is_string());
    }
    let dump = std::fs::read_to_string(lp).unwrap();
    assert!(dump.starts_with("Maximize") && dump.trim_end().ends_with("End"));
}

#[test]
fn bench_writes_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst");
    std::fs::create_dir(&inst).unwrap();
    gen(&inst, "a.wcm", "8", "1");
    gen(&inst, "b.wcm", "10", "2");
    let mut csvs = Vec::new();
    for run in ["1", "2"] {
        let report = dir.path().join(format!("r{run}.csv"));
        let o = wcm(&["bench", inst.to_str().unwrap(), "--report", report.to_str().unwrap(), "--oracle", "--no-timings"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("rows=4 optimal=4"));
        assert!(report.with_extension("json").exists());
        csvs.push(std::fs::read(&report).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.wcm");
    std::fs::write(&file, "this is not an instance\n").unwrap();
    assert_eq!(wcm(&["solve", file.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(wcm(&["solve", "/nonexistent.wcm"]).status.code(), Some(2));
}
