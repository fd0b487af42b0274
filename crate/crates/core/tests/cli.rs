use std::path::PathBuf;
use std::process::Command;

use ropt::eval::{read_episodes_file, EPISODES_FILE, EPISODE_HEADER};
use ropt::scenario::{Scenario, ScenarioConfig};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn ropt() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ropt"));
    c.env("ROPT_WORKERS", "1");
    c
}

fn header(path: &std::path::Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn scenario_fixture_is_the_default_configuration() {
    let c = ScenarioConfig::load(fixture("t_intersection.toml")).unwrap();
    assert_eq!(c, ScenarioConfig::default());
    Scenario::build(c).unwrap();
}

#[test]
fn sample_episodes_parse() {
    let rows = read_episodes_file(fixture("episodes.csv")).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.merged || r.crash || r.starved));
    assert_eq!(header(&fixture("episodes.csv")), EPISODE_HEADER.join(","));
}

#[test]
fn episode_writes_trace_events_and_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = ropt()
        .args(["episode", "--planner", "iidm", "--lambda", "3.5", "--p", "1", "--seed", "4", "--out"])
        .arg(dir.path())
        .arg("--scenario")
        .arg(fixture("t_intersection.toml"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("iidm p=1"), "{stdout}");

    for (file, fx) in [
        ("trace.csv", "trace.csv"),
        ("events.csv", "events.csv"),
        (EPISODES_FILE, "episodes.csv"),
    ] {
        assert_eq!(header(&dir.path().join(file)), header(&fixture(fx)), "{file}");
    }
    let rows = read_episodes_file(dir.path().join(EPISODES_FILE)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].seed, 4);

    // a second episode appends without repeating the header
    let again = ropt()
        .args(["episode", "--planner", "piidm", "--seed", "5", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(again.success());
    assert_eq!(read_episodes_file(dir.path().join(EPISODES_FILE)).unwrap().len(), 2);
}

#[test]
fn ropt_diagnostics_write_plans() {
    let dir = tempfile::tempdir().unwrap();
    let out = ropt()
        .args(["episode", "--planner", "ropt", "--lambda", "5", "--bt", "10", "--seed", "2", "--diagnostics", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(header(&dir.path().join("plans.csv")), header(&fixture("plans.csv")));
}

#[test]
fn small_sweep_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = ropt()
        .args(["sweep", "--planner", "iidm", "--lambda", "3.5,5", "--p", "0.5,2", "--runs", "2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["episodes.csv", "stats.csv", "risk_indicators.csv", "utility_indicators.csv"] {
        assert_eq!(header(&dir.path().join(f)), header(&fixture(f)), "{f}");
    }
    assert_eq!(read_episodes_file(dir.path().join(EPISODES_FILE)).unwrap().len(), 8);
}

#[test]
fn bad_input_exits_nonzero() {
    let unknown = ropt().args(["episode", "--planner", "mobil"]).output().unwrap();
    assert!(!unknown.status.success());

    let dir = tempfile::tempdir().unwrap();
    let workers = ropt()
        .args(["sweep", "--planner", "iidm", "--runs", "1", "--out"])
        .arg(dir.path())
        .env("ROPT_WORKERS", "zero")
        .output()
        .unwrap();
    assert!(!workers.status.success());
    assert!(String::from_utf8_lossy(&workers.stderr).contains("ROPT_WORKERS"));

    let missing = ropt()
        .args(["episode", "--planner", "iidm", "--scenario", "/nonexistent/scenario.toml"])
        .output()
        .unwrap();
    assert!(!missing.status.success());
}
