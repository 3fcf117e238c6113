use std::fs;
use std::process::Command;

fn rswarm(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_rswarm"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "rswarm {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn list_names_instances_and_heuristics() {
    let text = rswarm(&["list"]);
    for name in ["sphere", "rastrigin", "sawtooth", "rpso-leh-dd"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn run_stats_and_plot_data_chain_together() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    fs::write(
        &cfg,
        "instances = sphere:2, sawtooth:2\nheuristics = rpso, dd\nbudget = 200\nruns = 3\npost_samples = 100\n",
    )
    .unwrap();
    let results = dir.path().join("results.csv");
    let traces = dir.path().join("traces.csv");
    let p = |p: &std::path::Path| p.to_str().unwrap().to_owned();

    let msg = rswarm(&["run", "--config", &p(&cfg), "--out", &p(&results), "--traces", &p(&traces)]);
    assert!(msg.contains("12 runs"), "{msg}");
    assert_eq!(fs::read_to_string(&results).unwrap().lines().count(), 13);

    let summary_csv = dir.path().join("summary.csv");
    let report = rswarm(&["stats", "--results", &p(&results), "--one-to-one", "--csv", &p(&summary_csv)]);
    assert!(report.contains("sphere") && report.contains("rpso"), "{report}");
    assert!(summary_csv.exists());

    let plots = dir.path().join("plots");
    rswarm(&["plot-data", "--results", &p(&results), "--traces", &p(&traces), "--out-dir", &p(&plots), "--step", "50"]);
    let runs = fs::read_to_string(plots.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 13);
    let incumbent = fs::read_to_string(plots.join("incumbent.csv")).unwrap();
    assert_eq!(
        incumbent.lines().next().unwrap(),
        "instance,dimension,heuristic,evals,mean_incumbent,runs"
    );
    assert!(incumbent.lines().count() > 4);
}

#[test]
fn bad_config_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "instances = nowhere:2\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rswarm"))
        .args(["run", "--config", cfg.to_str().unwrap(), "--out", "/dev/null"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg"));
}
