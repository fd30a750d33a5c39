use gibbs_cli::commands::compare;
use gibbs_cli::config::ExperimentConfig;
use gibbs_cli::record::{RunResult, POINT_COLUMNS};
use std::path::Path;
use std::process::{Command, Output};

fn gibbs(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gibbs"))
        .args(args)
        .current_dir(cwd)
        .env("GIBBS_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn compare_writes_csv_json_and_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let out = gibbs(&["compare", "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let run = RunResult::load(&dir.path().join("run/compare.json")).unwrap();
    assert_eq!(run.records.len(), 4);
    assert!(run.records.iter().all(|r| r.modes == 1 && r.top_shell_mass.unwrap() < 1e-6));
    let csv = std::fs::read_to_string(dir.path().join("run/compare.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), POINT_COLUMNS.join(","));
    assert_eq!(csv.lines().count(), 5);
    let snapshot = ExperimentConfig::load(&dir.path().join("run/compare.config.toml")).unwrap();
    assert_eq!(snapshot, run.config);
}

#[test]
fn seed_and_thread_count_control_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = gibbs(&["compare", "--seed", "5", "--out", "a"], dir.path());
    let b = Command::new(env!("CARGO_BIN_EXE_gibbs"))
        .args(["compare", "--seed", "5", "--out", "b"])
        .current_dir(dir.path())
        .env("GIBBS_THREADS", "3")
        .output()
        .unwrap();
    let c = gibbs(&["compare", "--seed", "6", "--out", "c"], dir.path());
    assert!(a.status.success() && b.status.success() && c.status.success());
    let read = |d: &str| std::fs::read(dir.path().join(d).join("compare.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
}

#[test]
fn disabled_interaction_gives_zero_gap() {
    let mut config = ExperimentConfig::default();
    config.compare.interaction = false;
    config.compare.modes = Some(vec![[0, 0], [1, 0]]);
    config.compare.lambdas = vec![0.8, 0.5];
    config.n_samples = 500;
    let run = compare::run(&config).unwrap();
    for r in &run.records {
        assert_eq!(r.classical, 0.0);
        // Both sides vanish; only the Fock truncation of log Z remains.
        assert_eq!(r.classical_std_error, 0.0);
        assert!(r.gap <= 10.0 * r.top_shell_mass.unwrap(), "{r:?}");
    }
}

#[test]
fn fock_cap_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[compare]\ncutoff = 5.0\n");
    let out = gibbs(&["compare", "--config", &cfg, "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("exceeds the cap"));
    assert!(!dir.path().join("run").exists());
}

#[test]
fn theorem_mode_rejects_bad_scaling_and_exploratory_warns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "n_samples = 200\n[scan]\nnu = 0.2\nlambdas = [0.5, 0.3]\nreference_cutoff = 5.0\n",
    );
    let out = gibbs(&["scan-classical", "--config", &cfg, "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("8η < ν < 1/3"), "{}", stderr(&out));

    let out = gibbs(&["scan-classical", "--config", &cfg, "--mode", "exploratory", "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("warning"));
    let run = RunResult::load(&dir.path().join("run/scan-classical.json")).unwrap();
    assert!(run.warnings.iter().any(|w| w.contains("8η < ν < 1/3")));
    assert_eq!(run.records.len(), 2);
}

#[test]
fn malformed_config_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "seed = \"many\"\n");
    assert_eq!(gibbs(&["compare", "--config", &cfg], dir.path()).status.code(), Some(2));
    let out = gibbs(&["compare", "--config", "missing.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites_and_unknown_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = gibbs(&["verify", "spectral", "--out", "v"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let run = RunResult::load(&dir.path().join("v/verify.json")).unwrap();
    assert!(!run.checks.is_empty());
    assert!(run.checks.iter().all(|c| c.suite == "spectral" && c.passed));
    let names: Vec<&str> = run.checks.iter().map(|c| c.name.as_str()).collect();
    assert!(names.contains(&"green_function_log_law") && names.contains(&"n0_log_coefficient"));

    let out = gibbs(&["verify", "semiclassics", "--out", "s"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let run = RunResult::load(&dir.path().join("s/verify.json")).unwrap();
    for prefix in ["husimi", "definetti", "berezin_lieb"] {
        assert!(run.checks.iter().any(|c| c.name.starts_with(prefix)));
    }

    let out = gibbs(&["verify", "astrology"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown suite"));
}

#[test]
fn failed_invariant_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // A zero-σ acceptance band cannot hold for a Monte Carlo residual.
    let cfg = write(dir.path(), "c.toml", "n_samples = 2000\n[definetti]\nsigmas = 0.0\norders = [1]\n");
    let out = gibbs(&["definetti", "--config", &cfg, "--out", "d"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("d/definetti.csv")).unwrap();
    assert!(csv.contains("definetti_identity(k=1),false"));
}

#[test]
fn husimi_and_berezin_commands_pass() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["husimi", "berezin"] {
        let out = gibbs(&[cmd, "--out", "o"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", stderr(&out));
        assert!(dir.path().join(format!("o/{cmd}.csv")).exists());
    }
}

#[test]
fn plot_writes_one_svg_per_metric() {
    let dir = tempfile::tempdir().unwrap();
    assert!(gibbs(&["compare", "--out", "run"], dir.path()).status.success());
    let out = gibbs(&["plot", "run/compare.json", "--out", "plots"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let mut files: Vec<String> = std::fs::read_dir(dir.path().join("plots"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, ["cross_norm.svg", "gap.svg", "tau_over_log_eps.svg"]);
    let gap = std::fs::read_to_string(dir.path().join("plots/gap.svg")).unwrap();
    assert_eq!(gap.matches("class=\"marker\"").count(), 4);
    assert!(gap.contains("class=\"trend\""));
    // Deterministic output.
    assert!(gibbs(&["plot", "run/compare.json", "--out", "again"], dir.path()).status.success());
    assert_eq!(gap, std::fs::read_to_string(dir.path().join("again/gap.svg")).unwrap());
}

#[test]
fn plot_single_point_draws_marker_without_trend() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[compare]\nlambdas = [0.3]\n");
    assert!(gibbs(&["compare", "--config", &cfg, "--out", "run"], dir.path()).status.success());
    assert!(gibbs(&["plot", "run/compare.json"], dir.path()).status.success());
    let svg = std::fs::read_to_string(dir.path().join("run/gap.svg")).unwrap();
    assert_eq!(svg.matches("class=\"marker\"").count(), 1);
    assert!(!svg.contains("class=\"trend\""));
}

#[test]
fn plot_rejects_empty_and_malformed_runs() {
    let dir = tempfile::tempdir().unwrap();
    assert!(gibbs(&["husimi", "--out", "h"], dir.path()).status.success());
    let out = gibbs(&["plot", "h/husimi.json", "--out", "plots"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("plots").exists());

    let bad = write(dir.path(), "bad.json", "{\n  \"schema_version\": 1,\n  \"command\": [\n");
    let out = gibbs(&["plot", &bad, "--out", "plots"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
    assert!(!dir.path().join("plots").exists());
}
