use std::path::{Path, PathBuf};

use proptest::prelude::*;
use regret_core::model::{
    annualization_factor, load_model, parse_model, resolve_scenario, uncertain_parameters, validate_model, ModelDefinition,
    ModelError, UncertainValue,
};
use regret_core::scenarios::lhs_sample;
use regret_core::system_lp::build_lp;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn swiss_lite() -> ModelDefinition {
    load_model(data("swiss-lite/swiss-lite.json")).unwrap()
}

#[test]
fn swiss_lite_defines_the_eight_usage_groups() {
    let m = swiss_lite();
    let names: Vec<&str> = m.outputs.groups.iter().map(|g| g.name.as_str()).collect();
    assert_eq!(names, ["Biofuel", "Biomethane", "Hydrogen", "Low-T heat", "High-T heat", "CHP", "Chemicals", "Biochar"]);
    assert!(m.outputs.groups.iter().all(|g| !g.technologies.is_empty()));
}

#[test]
fn swiss_lite_is_well_formed() {
    let m = swiss_lite();
    let report = validate_model(&m);
    assert!(report.is_empty(), "{report}");
    // Validation leaves the model untouched and gives the same answer twice.
    let copy = m.clone();
    assert_eq!(validate_model(&m), report);
    assert_eq!(m, copy);
}

#[test]
fn empty_document_fails_to_parse() {
    assert!(matches!(parse_model("", Default::default()), Err(ModelError::Parse(_))));
}

#[test]
fn absent_timeseries_is_a_missing_reference() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(data("toy/toy.json")).unwrap()).unwrap();
    doc["demands"][0]["profile"] = "pv_cf".into();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    match load_model(&path) {
        Err(ModelError::MissingReference { kind, id }) => assert_eq!((kind, id.as_str()), ("timeseries", "pv_cf")),
        other => panic!("expected a missing reference, got {other:?}"),
    }
}

#[test]
fn storage_efficiency_above_one_is_reported() {
    let mut m = swiss_lite();
    m.storages[0].eta_out = 1.2;
    assert!(validate_model(&m).mentions("efficiency out of range"));
}

#[test]
fn calendar_one_day_short_is_reported() {
    let mut m = swiss_lite();
    m.time.td_weight[0] -= 1.0;
    assert!(validate_model(&m).mentions("year coverage"));
}

#[test]
fn annualization_matches_the_discounted_annuity_sum() {
    assert_eq!(annualization_factor(0.0, 20.0).unwrap(), 0.05);
    assert!((annualization_factor(0.05, 1.0).unwrap() - 1.05).abs() < 1e-15);
    // Exact rational evaluation of the closed form gives 0.06401196278645462.
    // Oracle: one over the present value of a unit payment in each year.
    let (i, n) = (0.04f64, 25);
    let pv: f64 = (1..=n).map(|t| (1.0 + i).powi(-t)).sum();
    let crf = annualization_factor(i, n as f64).unwrap();
    assert!((crf - 1.0 / pv).abs() < 1e-15, "{crf} vs {}", 1.0 / pv);
    assert!((crf - 0.064_011_962_786_454_62).abs() < 1e-15);
    assert!(matches!(annualization_factor(0.04, 0.0), Err(ModelError::Domain(_))));
}

#[test]
fn interval_forms_resolve_affinely() {
    assert!((UncertainValue::NominalSym { nv: 5.7, dev_pct: 20.0 }.resolve(0.5) - 5.7).abs() < 1e-15);
    assert_eq!(UncertainValue::Range { lb: 1.73, ub: 4.7 }.resolve(0.0), 1.73);
    assert!((UncertainValue::NominalPct { nv: 12.9, lo_pct: 30.0, hi_pct: 100.0 }.resolve(1.0) - 12.9).abs() < 1e-14);
    assert_eq!(UncertainValue::Fixed(3.0).resolve(0.9), 3.0);
}

#[test]
fn resolution_checks_the_dimension() {
    let m = swiss_lite();
    let d = m.uncertain_order.len();
    assert!(matches!(resolve_scenario(&m, &vec![0.5; d + 1]), Err(ModelError::DimensionMismatch { .. })));
    assert!(resolve_scenario(&m, &vec![0.5; d]).is_ok());
}

#[test]
fn parameters_follow_the_declared_order() {
    let m = swiss_lite();
    let names: Vec<String> = uncertain_parameters(&m).into_iter().map(|p| p.name).collect();
    assert_eq!(names, m.uncertain_order);
}

#[test]
fn sampled_biomass_availability_stays_in_band() {
    let m = swiss_lite();
    let d = m.uncertain_order.len();
    let set = lhs_sample(d, 40, 11).unwrap();
    let corners = [vec![0.0; d], vec![1.0; d]];
    for u in set.rows().chain(corners.iter().map(Vec::as_slice)) {
        let cm = resolve_scenario(&m, u).unwrap();
        let (_, layout) = build_lp(&cm).unwrap();
        let a = layout.biomass_availability;
        assert!((27.0..=31.7).contains(&a), "availability {a}");
    }
}

fn interval() -> impl Strategy<Value = UncertainValue> {
    prop_oneof![
        (-50.0f64..50.0, -50.0f64..50.0).prop_map(|(lb, ub)| UncertainValue::Range { lb, ub }),
        (0.1f64..100.0, 0.0f64..100.0, 100.0f64..200.0).prop_map(|(nv, lo_pct, hi_pct)| UncertainValue::NominalPct { nv, lo_pct, hi_pct }),
        (0.1f64..100.0, 0.0f64..60.0).prop_map(|(nv, dev_pct)| UncertainValue::NominalSym { nv, dev_pct }),
    ]
}

proptest! {
    #[test]
    fn resolution_maps_the_unit_interval_onto_the_bounds(v in interval(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = v.bounds();
        let (u0, u1) = (a.min(b), a.max(b));
        let (r0, r1) = (v.resolve(u0), v.resolve(u1));
        prop_assert!(lo <= r0 && r1 <= hi);
        // Monotone per coordinate: increasing when the declared endpoints are ordered.
        let (e0, e1) = (v.resolve(0.0), v.resolve(1.0));
        if e0 <= e1 { prop_assert!(r0 <= r1); } else { prop_assert!(r0 >= r1); }
        prop_assert_eq!((e0.min(e1), e0.max(e1)), (lo, hi));
    }
}
