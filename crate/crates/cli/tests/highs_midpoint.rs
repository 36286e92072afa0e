//! The swiss-lite midpoint LP solved here and by HiGHS through the MPS dump.
//! Skipped when python3 with `highspy` is not installed.

use std::path::Path;
use std::process::Command;

use regret_core::model::load_model;
use regret_core::regret::scenario_lp;
use regret_lp::mps::write_mps;
use regret_lp::solve_lp;

const SCRIPT: &str = r#"
import sys, highspy
h = highspy.Highs()
h.setOptionValue("output_flag", False)
h.readModel(sys.argv[1])
h.run()
print(h.modelStatusToString(h.getModelStatus()))
print(repr(h.getInfo().objective_function_value))
"#;

fn highs_available() -> bool {
    Command::new("python3").args(["-c", "import highspy"]).output().is_ok_and(|o| o.status.success())
}

#[test]
fn swiss_lite_midpoint_matches_highs() {
    if !highs_available() {
        eprintln!("highspy not available; skipping");
        return;
    }
    let model = load_model(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/swiss-lite/swiss-lite.json")).unwrap();
    let (lp, _) = scenario_lp(&model, &vec![0.5; model.uncertain_order.len()]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("midpoint.mps");
    let mut f = std::fs::File::create(&path).unwrap();
    write_mps(&lp, &mut f).unwrap();
    drop(f);
    let out = Command::new("python3").args(["-c", SCRIPT]).arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("Optimal"));
    let theirs: f64 = lines.next().unwrap().parse().unwrap();
    let ours = solve_lp(&lp).unwrap();
    assert!(ours.is_optimal());
    let gap = (ours.objective - theirs).abs() / (1.0 + theirs.abs());
    assert!(gap <= 1e-7, "ours {} vs HiGHS {theirs}", ours.objective);
}
