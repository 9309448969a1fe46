use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use cmab_core::arm_model::Environment;
use cmab_core::harness::{
    prepare, run_experiment, simulate, sweep, ExperimentConfig, AGGREGATE_HEADER, TRAJECTORY_HEADER,
};
use tempfile::TempDir;

fn config(toml: &str, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_toml(toml).unwrap();
    c.output = out.to_path_buf();
    c
}

const SMALL_PMC: &str = r#"
horizon = 300
repetitions = 3
seed = 5
instance.kind = "pmc"
instance.left = 4
instance.right = 4
instance.budget = 2
instance.generate.seed = 2
instance.generate.density = 0.6
oracle.kind = "greedy_pmc"
oracle.beta_override = 0.9
options.diagnostics = true
"#;

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    out
}

/// Rows of a CSV file as string columns, header checked.
fn rows(path: &Path, header: &str) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), header);
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let mut ca = config(SMALL_PMC, &a);
    ca.repetitions = 2;
    let mut cb = ca.clone();
    cb.output = b.clone();
    run_experiment(&ca).unwrap();
    run_experiment(&cb).unwrap();
    let ta = read_tree(&a);
    let tb = read_tree(&b);
    assert_eq!(ta.keys().collect::<Vec<_>>(), tb.keys().collect::<Vec<_>>());
    for (k, v) in &ta {
        if k == "metadata.json" {
            // Only the output path differs.
            let sa = String::from_utf8(v.clone())
                .unwrap()
                .replace(a.to_str().unwrap(), "OUT");
            let sb = String::from_utf8(tb[k].clone())
                .unwrap()
                .replace(b.to_str().unwrap(), "OUT");
            assert_eq!(sa, sb);
        } else {
            assert_eq!(v, &tb[k], "{k}");
        }
    }
    assert!(ta.contains_key("runs/run_0000.csv") && ta.contains_key("runs/run_0001.csv"));
}

#[test]
fn single_round_gives_single_row() {
    let tmp = TempDir::new().unwrap();
    let mut c = config(SMALL_PMC, tmp.path());
    c.horizon = 1;
    run_experiment(&c).unwrap();
    for r in 0..3 {
        let rows = rows(&tmp.path().join(format!("runs/run_{r:04}.csv")), TRAJECTORY_HEADER);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0][1], "1");
    }
}

#[test]
fn aggregate_matches_per_run_files() {
    let tmp = TempDir::new().unwrap();
    let c = config(SMALL_PMC, tmp.path());
    let summary = run_experiment(&c).unwrap();
    let mut per_run: Vec<Vec<Vec<String>>> = Vec::new();
    for r in 0..c.repetitions {
        let rows = rows(&tmp.path().join(format!("runs/run_{r:04}.csv")), TRAJECTORY_HEADER);
        assert_eq!(rows.len() as u64, c.horizon);
        let mut cum = 0.0;
        for row in &rows {
            assert_eq!(row[0], r.to_string());
            let regret: f64 = row[5].parse().unwrap();
            cum += regret;
            let reported: f64 = row[6].parse().unwrap();
            // Files carry 12 significant digits.
            assert!(
                (reported - cum).abs() <= 1e-9 * cum.abs().max(1.0),
                "run {r} t {}: {reported} vs {cum}",
                row[1]
            );
            assert!(row[7] == "0" || row[7] == "1");
        }
        per_run.push(rows);
    }
    let agg = rows(&tmp.path().join("aggregate.csv"), AGGREGATE_HEADER);
    assert_eq!(agg.len(), summary.aggregate.len());
    for row in &agg {
        assert_eq!(row[0], "experiment");
        let t: usize = row[2].parse().unwrap();
        let vals: Vec<f64> = per_run.iter().map(|r| r[t - 1][6].parse().unwrap()).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() as f64 - 1.0);
        let stderr = (var / vals.len() as f64).sqrt();
        let got_mean: f64 = row[4].parse().unwrap();
        let got_se: f64 = row[5].parse().unwrap();
        assert!((got_mean - mean).abs() <= 1e-9 * mean.abs().max(1.0), "t {t}");
        assert!((got_se - stderr).abs() <= 1e-9 * stderr.max(1.0), "t {t}");
        assert_eq!(row[3], "3");
    }
    let ts: Vec<u64> = summary.aggregate.iter().map(|r| r.t).collect();
    assert_eq!(ts, vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 300]);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["regret"]["mode"], "exact");
    assert!((meta["oracle"]["beta"].as_f64().unwrap() - 0.9).abs() < 1e-15);
    assert_eq!(meta["config"]["horizon"], 300);
    assert!(meta["gap_profile"].is_object());
    assert!(meta["runs"][0]["diagnostics"]["bad_rounds"].is_u64());
}

#[test]
fn bounds_file_has_bound_rows() {
    let tmp = TempDir::new().unwrap();
    let c = config(SMALL_PMC, tmp.path());
    let summary = run_experiment(&c).unwrap();
    let rows = rows(&tmp.path().join("bounds.csv"), AGGREGATE_HEADER);
    assert!(rows.iter().all(|r| r[0] == "bound"));
    let t1: Vec<_> = rows.iter().filter(|r| r[1] == "theorem1").collect();
    assert_eq!(t1.first().unwrap()[2], "2");
    assert_eq!(t1.last().unwrap()[2], "300");
    let last: f64 = t1.last().unwrap()[4].parse().unwrap();
    let report = summary.bound("theorem1").unwrap();
    assert!((last - report.value).abs() <= 1e-9 * report.value);
}

#[test]
fn classical_two_arm_regret_is_logarithmic_and_bounded() {
    let toml = r#"
horizon = 100000
repetitions = 20
seed = 1
instance.kind = "classical"
instance.means = [0.4, 0.6]
options.aggregate_only = true
"#;
    let tmp = TempDir::new().unwrap();
    let c = config(toml, tmp.path());
    let s = run_experiment(&c).unwrap();
    assert!(!tmp.path().join("runs").exists());
    let final_regret = s.mean_regret_at(100_000).unwrap();
    let bound = s.bound("theorem1").unwrap().value;
    assert!(final_regret > 0.0 && final_regret <= bound, "{final_regret} vs {bound}");
    // Concave in ln n: growth per doubling shrinks on average.
    let early = s.mean_regret_at(1024).unwrap() - s.mean_regret_at(512).unwrap();
    let late = s.mean_regret_at(65536).unwrap() - s.mean_regret_at(32768).unwrap();
    assert!(late < 4.0 * early.max(1.0), "{early} vs {late}");
}

#[test]
fn simulate_streams_every_round() {
    let c = config(SMALL_PMC, Path::new("unused"));
    let prep = prepare(&c).unwrap();
    let mut seen = Vec::new();
    let summary = simulate(&prep, 1, |r| {
        seen.push(r.clone());
        Ok(())
    })
    .unwrap();
    assert_eq!(seen.len(), 300);
    let mut cum = 0.0;
    for r in &seen {
        cum += r.regret;
        assert!((r.cumulative_regret - cum).abs() < 1e-9);
    }
    assert_eq!(seen.last().unwrap().cumulative_regret, summary.final_cumulative_regret);
    let failures = seen.iter().filter(|r| r.oracle_failed).count() as u64;
    assert_eq!(failures, summary.oracle_failures);
    assert!(failures > 0);
}

#[test]
fn sweep_over_horizon_and_exploration() {
    let tmp = TempDir::new().unwrap();
    let toml = r#"
horizon = 10
repetitions = 2
seed = 4
instance.kind = "classical"
instance.means = [0.3, 0.5, 0.8]
"#;
    let c = config(toml, tmp.path());
    let entries = sweep(&c, "horizon", &[1000.0, 10000.0, 100000.0]).unwrap();
    assert_eq!(entries.len(), 3);
    for e in &entries {
        assert!(e.output.join("aggregate.csv").exists());
    }
    let index = fs::read_to_string(tmp.path().join("index.csv")).unwrap();
    let lines: Vec<&str> = index.lines().collect();
    assert_eq!(lines[0], "axis,value,output,final_mean_cumulative_regret");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("horizon,1000,"));
    assert!(tmp.path().join("horizon=100000").is_dir());

    let tmp = TempDir::new().unwrap();
    let mut c = config(toml, tmp.path());
    c.horizon = 5000;
    let entries = sweep(&c, "policy.exploration", &[3.0, 4.0, 6.0]).unwrap();
    let regrets: Vec<f64> = entries.iter().map(|e| e.final_mean_regret).collect();
    assert!(regrets.iter().all(|r| r.is_finite() && *r > 0.0));
    let meta = fs::read_to_string(entries[2].output.join("metadata.json")).unwrap();
    assert!(meta.contains("cucb(y=6ln t)"));

    assert!(sweep(&c, "horizon", &[]).is_err());
    assert!(sweep(&c, "policy.nonexistent", &[1.0]).is_err());
    assert!(sweep(&c, "instance.kind", &[1.0]).is_err());
}

#[test]
fn instance_file_is_resolved_relative_to_config() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("graph.toml"),
        "kind = \"ic\"\nnodes = 3\nbudget = 1\nedges = [[0, 1, 0.5], [1, 2, 0.5]]\n",
    )
    .unwrap();
    fs::write(
        tmp.path().join("exp.toml"),
        "horizon = 50\nseed = 1\noutput = \"res\"\ninstance.kind = \"file\"\ninstance.path = \"graph.toml\"\noracle.kind = \"exact\"\n",
    )
    .unwrap();
    let c = ExperimentConfig::load(&tmp.path().join("exp.toml")).unwrap();
    let prep = prepare(&c).unwrap();
    assert_eq!(prep.instance.num_arms(), 2);
    assert!((prep.rewards.opt - 1.75).abs() < 1e-15);
}

#[test]
fn large_ic_falls_back_to_monte_carlo() {
    let toml = r#"
horizon = 200
repetitions = 2
seed = 9
instance.kind = "ic"
instance.nodes = 6
instance.budget = 1
instance.exact_cap = 3
instance.generate.seed = 1
instance.generate.count = 10
oracle.kind = "greedy_im"
oracle.sims = 50
options.mc_samples = 20000
"#;
    let tmp = TempDir::new().unwrap();
    let c = config(toml, tmp.path());
    let s = run_experiment(&c).unwrap();
    assert!(s.bounds.is_empty());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["regret"]["mode"], "monte_carlo");
    assert!(meta["regret"]["opt_std_error"].as_f64().unwrap() > 0.0);
    assert_eq!(meta["bounds_skipped"], true);
    let bounds = fs::read_to_string(tmp.path().join("bounds.csv")).unwrap();
    assert_eq!(bounds.trim(), AGGREGATE_HEADER);
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(ExperimentConfig::from_toml(
        "horizon = 0\nseed = 1\ninstance.kind = \"classical\"\ninstance.means = [0.5]\n"
    )
    .and_then(|c| c.check())
    .is_err());
    assert!(ExperimentConfig::from_toml(
        "horizon = 5\nseed = 1\nbogus = 3\ninstance.kind = \"classical\"\ninstance.means = [0.5]\n"
    )
    .is_err());
    let c = ExperimentConfig::from_toml(
        "horizon = 5\nseed = 1\ninstance.kind = \"classical\"\ninstance.means = [0.5, 1.2]\n",
    )
    .unwrap();
    let err = prepare(&c).err().unwrap().to_string();
    assert!(err.contains("mean out of range at arm 1"), "{err}");
}

fn cmab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cmab"))
}

#[test]
fn cli_subcommands() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(
        &cfg,
        "horizon = 100\nrepetitions = 2\nseed = 1\ninstance.kind = \"classical\"\ninstance.means = [0.2, 0.7]\n",
    )
    .unwrap();
    let out = tmp.path().join("run");
    let o = cmab()
        .args([
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("runs/run_0001.csv").exists());
    let meta = fs::read_to_string(out.join("metadata.json")).unwrap();
    assert!(meta.contains("\"seed\": 3"));

    let bounds = tmp.path().join("bounds");
    let o = cmab()
        .args([
            "bounds",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            bounds.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("theorem1"));
    assert!(bounds.join("bounds.csv").exists());

    let sw = tmp.path().join("sweep");
    let o = cmab()
        .args([
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--axis",
            "horizon",
            "--values",
            "10",
            "20",
            "--out",
        ])
        .arg(&sw)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(sw.join("index.csv").exists());

    let o = cmab()
        .args(["validate", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));

    let bad = tmp.path().join("bad.toml");
    fs::write(
        &bad,
        "horizon = 10\nseed = 1\ninstance.kind = \"classical\"\ninstance.means = [0.2, 0.5, 0.1, 1.2]\n",
    )
    .unwrap();
    let o = cmab()
        .args(["validate", "--config", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("mean out of range at arm 3"));

    let o = cmab().args(["run", "--config", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
