use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use regret_core::regret::epsilon_tol;
use regret_lp::mps::read_mps;
use regret_lp::solve_lp;
use regret_planner::manifest::MANIFEST_FILE;
use regret_planner::report::FIGURES;
use regret_planner::{Manifest, Pipeline, PipelineConfig, PipelineError, Stage};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn toy_config(out: &Path) -> PipelineConfig {
    PipelineConfig {
        model: Some(data("toy/toy.json")),
        n: 8,
        seed: 3,
        k: 2,
        max_leaves: 3,
        bins: 3,
        jobs: 1,
        out: out.to_path_buf(),
        ..PipelineConfig::default()
    }
}

fn run(cfg: PipelineConfig) -> Manifest {
    Pipeline::new(cfg).unwrap().run().unwrap()
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_regret-planner")).args(args).env_remove("REGRET_PLANNER_JOBS").output().unwrap()
}

fn toy_args<'a>(out: &'a str) -> Vec<&'a str> {
    vec!["--model", concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/toy/toy.json"), "-N", "8", "--seed", "3", "--k", "2", "--out", out]
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn full_run_lists_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = run(toy_config(dir.path()));
    for f in FIGURES {
        assert!(manifest.get(&format!("figures/{f}")).is_some(), "{f}");
    }
    for f in ["summary.csv", "scenarios.csv", "optima.csv", "strategies.json", "regret_matrix.csv", "correlations.csv"] {
        assert!(manifest.get(f).is_some(), "{f}");
    }
    // The manifest covers exactly the files on disk, with their sizes.
    let mut on_disk = Vec::new();
    for entry in walk(dir.path()) {
        let rel = entry.strip_prefix(dir.path()).unwrap().to_string_lossy().into_owned();
        if rel != MANIFEST_FILE {
            on_disk.push((rel, fs::metadata(&entry).unwrap().len()));
        }
    }
    on_disk.sort();
    let listed: Vec<(String, u64)> = manifest.files.iter().map(|e| (e.path.clone(), e.bytes)).collect();
    assert_eq!(listed, on_disk);
    let stored: Manifest = serde_json::from_str(&fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(stored, manifest);
    assert!(manifest.files.iter().all(|e| e.sha256.len() == 64));
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn summary_agrees_with_the_regret_matrix() {
    let dir = tempfile::tempdir().unwrap();
    run(toy_config(dir.path()));
    let regret = rows(&dir.path().join("regret_matrix.csv"));
    let status = rows(&dir.path().join("cell_status.csv"));
    let costs = rows(&dir.path().join("costs.csv"));
    let c_opt: Vec<f64> = costs.last().unwrap()[1..].iter().map(|c| c.parse().unwrap()).collect();
    let summary = rows(&dir.path().join("summary.csv"));
    assert_eq!(summary.len(), regret.len());
    for ((r, s), line) in regret.iter().zip(&status).zip(&summary) {
        assert_eq!(r[0], line[0]);
        let valid: Vec<(f64, f64)> = r[1..]
            .iter()
            .zip(&s[1..])
            .zip(&c_opt)
            .filter(|((_, st), _)| *st == "optimal")
            .map(|((v, _), c)| (v.parse().unwrap(), *c))
            .collect();
        assert_eq!(line[1], valid.len().to_string());
        if valid.is_empty() {
            continue;
        }
        let mean = valid.iter().map(|v| v.0).sum::<f64>() / valid.len() as f64;
        let max = valid.iter().map(|v| v.0).fold(f64::MIN, f64::max);
        let share = 100.0 * valid.iter().filter(|(r, c)| *r <= epsilon_tol(*c)).count() as f64 / valid.len() as f64;
        let parsed: Vec<f64> = line[2..].iter().map(|c| c.parse().unwrap()).collect();
        // Columns: optimal_share, min, var50, mean, var90, max.
        assert!((parsed[0] - share).abs() < 1e-12);
        assert!((parsed[3] - mean).abs() <= 1e-12 * (1.0 + mean.abs()));
        assert_eq!(parsed[5], max);
    }
}

#[test]
fn reruns_and_worker_counts_give_identical_manifests() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run(toy_config(a.path()));
    let second = run(toy_config(b.path()));
    let threaded = run(PipelineConfig { jobs: 3, ..toy_config(c.path()) });
    assert_eq!(first, second);
    assert_eq!(first, threaded);
}

#[test]
fn resume_rebuilds_deleted_artifacts_identically() {
    let dir = tempfile::tempdir().unwrap();
    let before = run(toy_config(dir.path()));
    fs::remove_file(dir.path().join("summary.csv")).unwrap();
    fs::remove_dir_all(dir.path().join("figures")).unwrap();
    let scenarios = fs::metadata(dir.path().join("scenarios.csv")).unwrap().modified().unwrap();
    let after = run(toy_config(dir.path()));
    assert_eq!(before, after);
    // Upstream stages were reused rather than recomputed.
    assert_eq!(fs::metadata(dir.path().join("scenarios.csv")).unwrap().modified().unwrap(), scenarios);
}

#[test]
fn changed_analysis_settings_leave_upstream_hashes_alone() {
    let dir = tempfile::tempdir().unwrap();
    let before = run(toy_config(dir.path()));
    let after = run(PipelineConfig { bins: 4, ..toy_config(dir.path()) });
    for f in ["scenarios.csv", "optima.csv", "strategies.json", "regret_matrix.csv", "summary.csv"] {
        assert_eq!(before.get(f), after.get(f), "{f}");
    }
    let maps = |m: &Manifest| m.files.iter().filter(|e| e.path.starts_with("decision_maps/")).cloned().collect::<Vec<_>>();
    assert_ne!(maps(&before), maps(&after));
}

#[test]
fn stage_by_stage_matches_the_all_in_one_run() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let whole = run(toy_config(a.path()));
    let p = Pipeline::new(toy_config(b.path())).unwrap();
    let mut last = None;
    for stage in Stage::ALL {
        last = Some(p.run_stage(stage).unwrap());
    }
    assert_eq!(last.unwrap(), whole);
}

#[test]
fn rerunning_a_stage_drops_its_downstream_results() {
    let dir = tempfile::tempdir().unwrap();
    run(toy_config(dir.path()));
    let m = Pipeline::new(toy_config(dir.path())).unwrap().run_stage(Stage::Identify).unwrap();
    assert!(m.get("strategies.json").is_some());
    for gone in ["regret_matrix.csv", "summary.csv", "figures/regret_curves.svg"] {
        assert!(m.get(gone).is_none(), "{gone}");
        assert!(!dir.path().join(gone).exists());
    }
    // A later full run fills the gap.
    assert!(run(toy_config(dir.path())).get("figures/regret_curves.svg").is_some());
}

#[test]
fn stage_without_its_inputs_reports_the_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let err = Pipeline::new(toy_config(dir.path())).unwrap().run_stage(Stage::Evaluate).unwrap_err();
    assert!(matches!(err.root(), PipelineError::MissingArtifact(p) if p.ends_with("scenarios.csv")), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn report_needs_the_correlation_table() {
    let dir = tempfile::tempdir().unwrap();
    run(toy_config(dir.path()));
    fs::remove_file(dir.path().join("correlations.csv")).unwrap();
    let out = dir.path().to_str().unwrap();
    let res = cli(&["report", "--out", out]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("[report]") && stderr.contains("correlations.csv"), "{stderr}");
}

#[test]
fn svg_figures_are_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    run(toy_config(dir.path()));
    let read = || FIGURES.map(|f| fs::read(dir.path().join("figures").join(f)).unwrap());
    let first = read();
    let out = dir.path().to_str().unwrap();
    assert!(cli(&["report", "--out", out]).status.success());
    assert_eq!(read(), first);
    for svg in &first {
        let text = std::str::from_utf8(svg).unwrap();
        assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn cli_exit_codes_follow_the_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(cli(&["run", "--out", out]).status.code(), Some(2), "no model");
    let model = data("toy/toy.json");
    let res = cli(&["run", "--model", model.to_str().unwrap(), "--k", "1", "--out", out]);
    assert_eq!(res.status.code(), Some(2), "k below two");
    assert!(String::from_utf8_lossy(&res.stderr).contains("clusters"));
    let mut args = toy_args(out);
    args.extend(["--var", "50,120"]);
    args.insert(0, "run");
    assert_eq!(cli(&args).status.code(), Some(2), "VaR level");

    // Without the gas boiler the wood supply cannot meet the heat demand.
    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(data("toy/toy.json")).unwrap()).unwrap();
    let techs = doc["technologies"].as_array_mut().unwrap();
    techs.retain(|t| t["id"] != "BOILER_GAS");
    for g in doc["outputs"]["groups"].as_array_mut().unwrap() {
        g["technologies"].as_array_mut().unwrap().retain(|t| t != "BOILER_GAS");
    }
    let model = dir.path().join("short.json");
    fs::write(&model, doc.to_string()).unwrap();
    let res = cli(&["run", "--model", model.to_str().unwrap(), "-N", "4", "--out", &format!("{out}/short")]);
    assert_eq!(res.status.code(), Some(3), "{}", String::from_utf8_lossy(&res.stderr));
    // The failed stage still leaves its table behind for inspection.
    assert!(dir.path().join("short/optima.csv").is_file());

    let mut args = toy_args(out);
    args.insert(0, "run");
    assert!(cli(&args).status.success());
    fs::write(dir.path().join("regret_matrix.csv"), "strategy,0\nBAU,not-a-number\n").unwrap();
    assert_eq!(cli(&["analyze", "--out", out]).status.code(), Some(1), "malformed artifact");
}

#[test]
fn jobs_environment_variable_overrides_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let mut args = toy_args(out);
    args.insert(0, "sample");
    let bad = Command::new(env!("CARGO_BIN_EXE_regret-planner")).args(&args).env("REGRET_PLANNER_JOBS", "0").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("REGRET_PLANNER_JOBS"));
    let good = Command::new(env!("CARGO_BIN_EXE_regret-planner")).args(&args).env("REGRET_PLANNER_JOBS", "2").output().unwrap();
    assert!(good.status.success());
}

#[test]
fn replayed_strategies_replace_the_discovered_ones() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("replay.json");
    let none = "null, null, null, null, null, null, null, null";
    let text = format!(
        r#"{{"outputs": ["Biofuel", "Biomethane", "Hydrogen", "Low-T heat", "High-T heat", "CHP", "Chemicals", "Biochar"],
            "strategies": [
              {{"name": "Wood heat", "kind": "box", "lower": [null, null, null, 2.0, null, null, null, null], "upper": [{none}]}},
              {{"name": "Free", "kind": "box", "lower": [{none}], "upper": [{none}]}},
              {{"name": "No Biomass", "kind": "fixed", "values": [0, 0, 0, 0, 0, 0, 0, 0]}}
            ]}}"#
    );
    fs::write(&file, text).unwrap();
    let out = dir.path().join("run");
    let cfg = PipelineConfig { strategies: Some(file.clone()), ..toy_config(&out) };
    let m = run(cfg.clone());
    assert!(m.get("clusters.csv").is_none());
    let regret = rows(&out.join("regret_matrix.csv"));
    let names: Vec<&str> = regret.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["Wood heat", "Free", "No Biomass"]);
    // An unconstrained box reproduces the optimum in every scenario.
    assert!(regret[1][1..].iter().all(|v| v.parse::<f64>().unwrap() == 0.0));
    // Forbidding biomass costs something exactly where the optimum burns some.
    let optima = rows(&out.join("optima.csv"));
    for (v, o) in regret[2][1..].iter().zip(&optima) {
        let (r, used): (f64, f64) = (v.parse().unwrap(), o[3].parse().unwrap());
        assert_eq!(r > 0.0, used > 1e-9, "regret {r}, biomass {used}");
    }

    // Editing the replay file invalidates the identification and everything after it.
    fs::write(&file, fs::read_to_string(&file).unwrap().replace("2.0", "3.0")).unwrap();
    let m2 = run(cfg);
    assert_eq!(m.get("optima.csv"), m2.get("optima.csv"));
    assert_ne!(m.get("strategies.json"), m2.get("strategies.json"));
}

#[test]
fn dumped_midpoint_lp_reads_back_and_solves() {
    let dir = tempfile::tempdir().unwrap();
    run(PipelineConfig { dump_lp: true, ..toy_config(dir.path()) });
    let text = fs::read_to_string(dir.path().join("lp/midpoint.mps")).unwrap();
    let lp = read_mps(text.as_bytes()).unwrap();
    let model = regret_core::model::load_model(data("toy/toy.json")).unwrap();
    let (direct, _) = regret_core::regret::scenario_lp(&model, &vec![0.5; model.uncertain_order.len()]).unwrap();
    let (a, b) = (solve_lp(&lp).unwrap(), solve_lp(&direct).unwrap());
    assert!(a.is_optimal());
    assert!((a.objective - b.objective).abs() <= 1e-9 * (1.0 + b.objective.abs()));
}
