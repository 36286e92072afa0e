use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;
use regret_core::model::{parse_model, ConcreteModel, Series};
use regret_core::system_lp::{
    atmosphere_balance, balance_residuals, build_lp, outputs_of_interest, reconstruct_seasonal_level, total_cost,
    write_flows_csv, BuildError, VarRef,
};
use regret_lp::{solve_lp, Status};
use serde_json::{json, Value};

const GROUPS: [&str; 8] =
    ["Biofuel", "Biomethane", "Hydrogen", "Low-T heat", "High-T heat", "CHP", "Chemicals", "Biochar"];

/// One typical day standing for the whole year.
fn one_day() -> Value {
    json!({"n_typical_days": 1, "hours_per_day": 24, "td_day_indices": [1]})
}

fn groups(with: &[(&str, &str)]) -> Value {
    let list: Vec<Value> = GROUPS
        .iter()
        .map(|g| {
            let techs: Vec<&str> = with.iter().filter(|(name, _)| name == g).map(|(_, t)| *t).collect();
            json!({"name": g, "technologies": techs})
        })
        .collect();
    json!({"biomass_layers": ["WOOD"], "groups": list})
}

fn general(net_zero: bool) -> Value {
    json!({
        "i_rate": 2.0, "recycling_pct": 0.0, "public_mobility_pct": 50.0, "dhn_pct": 50.0,
        "ntc": 0.0, "co2_extra": 0.0, "co2_compensation_cost": 1300.0, "net_zero": net_zero
    })
}

fn concrete(doc: Value, series: BTreeMap<String, Series>) -> ConcreteModel {
    let m = parse_model(&doc.to_string(), series).expect("toy model is valid");
    regret_core::model::resolve_scenario(&m, &vec![0.5; m.uncertain_order.len()]).unwrap()
}

fn boiler(gas_availability: Option<f64>, heat_twh: f64) -> ConcreteModel {
    let mut gas = json!({"id": "GAS_IMPORT", "kind": "import", "layer": "GAS", "cost": 0.02});
    if let Some(a) = gas_availability {
        gas["availability"] = json!(a);
    }
    concrete(
        json!({
            "general": general(false),
            "layers": [
                {"id": "HEAT", "resolution": "hourly"},
                {"id": "GAS", "resolution": "annual"},
                {"id": "WOOD", "resolution": "annual"}
            ],
            "resources": [gas],
            "technologies": [{
                "id": "BOILER_GAS", "dispatch": "hourly", "main_output": "HEAT",
                "modes": [{"name": "on", "flows": {"HEAT": 1.0, "GAS": -1.0 / 0.9}}],
                "c_inv": 0.0, "c_maint": 0.0, "lifetime": 20.0
            }],
            "demands": [{"layer": "HEAT", "annual_total": heat_twh}],
            "time": one_day(),
            "outputs": groups(&[]),
            "uncertain_order": []
        }),
        BTreeMap::new(),
    )
}

#[test]
fn gas_boiler_meets_constant_heat_demand() {
    let cm = boiler(None, 8.76);
    let (lp, layout) = build_lp(&cm).unwrap();
    let sol = solve_lp(&lp).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    let gas = &layout.resources[0];
    let annual_gas: f64 = gas
        .usage
        .iter()
        .enumerate()
        .map(|(k, c)| layout.clock.annual_weight(gas.grain, k) * sol.primal[c.0])
        .sum();
    // 8760 GWh of heat at 90 % efficiency.
    assert!((annual_gas - 8760.0 / 0.9).abs() < 1e-6, "{annual_gas}");
    assert!((total_cost(&sol).unwrap() - 0.02 * 8760.0 / 0.9).abs() < 1e-6);
    assert!((total_cost(&sol).unwrap() - 194.67).abs() < 5e-3);
    // Hourly heat rate is 1 GW in every slice.
    for (_, worst) in balance_residuals(&lp, &layout, &sol.primal) {
        assert!(worst < 1e-9);
    }
    assert_eq!(outputs_of_interest(&sol, &layout).unwrap().0, vec![0.0; 8]);
}

#[test]
fn demand_beyond_availability_is_infeasible() {
    let cm = boiler(Some(5.0), 8.76);
    let (lp, _) = build_lp(&cm).unwrap();
    let sol = solve_lp(&lp).unwrap();
    assert_eq!(sol.status, Status::Infeasible);
    assert!(total_cost(&sol).is_err());
}

#[test]
fn demand_without_supplier_fails_to_build() {
    let mut cm = boiler(None, 8.76);
    cm.technologies.clear();
    assert!(matches!(build_lp(&cm), Err(BuildError::NoSupplier { layer }) if layer == "HEAT"));
}

#[test]
fn layout_is_a_bijection_onto_columns() {
    let cm = storage_model();
    let (lp, layout) = build_lp(&cm).unwrap();
    assert_eq!(layout.num_cols(), lp.num_cols());
    let distinct: HashSet<VarRef> = layout.vars.iter().copied().collect();
    assert_eq!(distinct.len(), layout.vars.len());
    let names: HashSet<&String> = lp.col_names().iter().collect();
    assert_eq!(names.len(), lp.num_cols());
}

fn gasification_model() -> ConcreteModel {
    concrete(
        json!({
            "general": general(false),
            "layers": [
                {"id": "H2", "resolution": "annual"},
                {"id": "WOOD", "resolution": "annual"}
            ],
            "resources": [
                {"id": "WOOD", "kind": "local", "layer": "WOOD", "cost": 0.03, "availability": 10.0}
            ],
            "technologies": [{
                "id": "H2_GASIFICATION", "dispatch": "flat", "main_output": "H2",
                "modes": [{"name": "on", "flows": {"H2": 1.0, "WOOD": -2.0}}],
                "c_inv": 100.0, "c_maint": 5.0, "lifetime": 20.0
            }],
            "demands": [{"layer": "H2", "annual_total": 1.0}],
            "time": one_day(),
            "outputs": groups(&[("Hydrogen", "H2_GASIFICATION")]),
            "uncertain_order": []
        }),
        BTreeMap::new(),
    )
}

#[test]
fn hydrogen_from_wood_lands_in_one_group() {
    let cm = gasification_model();
    let (lp, layout) = build_lp(&cm).unwrap();
    let sol = solve_lp(&lp).unwrap();
    let y = outputs_of_interest(&sol, &layout).unwrap();
    let expected = [0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    for (got, want) in y.0.iter().zip(expected) {
        assert!((got - want).abs() < 1e-9, "{:?}", y.0);
    }
    assert!(y.total() <= layout.biomass_availability + 1e-6);
    // Capacity 1 TWh / 8760 h at annuity(2 %, 20) * 100 + 5, plus 2000 GWh of wood.
    let annuity = 0.02 * 1.02f64.powi(20) / (1.02f64.powi(20) - 1.0);
    let expected_cost = (annuity * 100.0 + 5.0) * 1000.0 / 8760.0 + 0.03 * 2000.0;
    assert!((sol.objective - expected_cost).abs() < 1e-7 * expected_cost);
}

fn storage_model() -> ConcreteModel {
    // Sun only during hours 9 to 16, constant demand; the battery shifts energy into the night.
    let sun: Vec<f64> = (0..48).map(|s| if (8..16).contains(&(s % 24)) { 0.8 } else { 0.0 }).collect();
    let mut series = BTreeMap::new();
    series.insert("pv_cf".to_string(), Series { values: sun });
    concrete(
        json!({
            "general": general(true),
            "layers": [
                {"id": "ELEC", "resolution": "hourly"},
                {"id": "DAM", "resolution": "daily"},
                {"id": "WOOD", "resolution": "annual"},
                {"id": "CO2_ATM", "resolution": "annual"}
            ],
            "resources": [
                {"id": "INFLOW", "kind": "local", "layer": "DAM", "cost": 0.0, "availability": 1.0, "constant_over_year": true},
                {"id": "GAS", "kind": "import", "layer": "ELEC", "cost": 0.5}
            ],
            "technologies": [
                {"id": "PV", "dispatch": "hourly", "main_output": "ELEC",
                 "modes": [{"name": "on", "flows": {"ELEC": 1.0}}],
                 "c_inv": 500.0, "c_maint": 10.0, "lifetime": 25.0, "c_p": "pv_cf"},
                {"id": "TURBINE", "dispatch": "hourly", "main_output": "ELEC",
                 "modes": [{"name": "on", "flows": {"ELEC": 1.0, "DAM": -1.0, "CO2_ATM": 0.0}}],
                 "c_inv": 100.0, "c_maint": 1.0, "lifetime": 40.0}
            ],
            "storages": [
                {"id": "BATTERY", "layer": "ELEC", "class": "daily", "c_inv": 100.0, "c_maint": 1.0,
                 "lifetime": 15.0, "t_charge": 4.0, "t_discharge": 4.0, "eta_in": 0.95, "eta_out": 0.95,
                 "s_loss": 0.0002},
                {"id": "RESERVOIR", "layer": "DAM", "class": "seasonal", "c_inv": 0.0, "c_maint": 0.0,
                 "lifetime": 50.0, "t_charge": 1000.0, "t_discharge": 1000.0, "eta_in": 1.0, "eta_out": 1.0,
                 "s_loss": 0.0, "f_min": 300.0, "f_max": 300.0}
            ],
            "grids": [{"id": "ELEC_GRID", "layer": "ELEC", "c_inv": 50.0, "c_maint": 0.0, "lifetime": 40.0, "loss_pct": 0.05}],
            "demands": [{"layer": "ELEC", "annual_total": 8.76}],
            "time": {"n_typical_days": 2, "hours_per_day": 24, "td_day_indices": [100, 280]},
            "outputs": groups(&[]),
            "uncertain_order": []
        }),
        series,
    )
}

#[test]
fn storage_model_balances_every_slice() {
    let cm = storage_model();
    let (lp, layout) = build_lp(&cm).unwrap();
    let sol = solve_lp(&lp).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert!(sol.objective > 0.0);
    let peak = layout.layer("ELEC").unwrap().demand.iter().fold(0.0f64, |a, &b| a.max(b));
    for (id, worst) in balance_residuals(&lp, &layout, &sol.primal) {
        assert!(worst <= 1e-6 * peak.max(1.0), "{id}: {worst}");
    }
    let battery = &layout.storages[0];
    let cap = sol.primal[battery.capacity.0];
    assert!(cap > 0.0, "battery unused");
    let levels = reconstruct_seasonal_level(&layout, 1, &sol.primal).unwrap();
    assert_eq!(levels.len(), 366);
    assert!((levels[365] - levels[0]).abs() < 1e-6 * (1.0 + levels[0].abs()));
    assert!(levels.iter().all(|&l| l >= -1e-6 && l <= 300.0 + 1e-6));
    assert_eq!(atmosphere_balance(&lp, &layout, &sol.primal).map(|a| a.abs() < 1e-9), Some(true));

    let mut csv = Vec::new();
    write_flows_csv(&layout, &sol.primal, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("tech,mode,td,hour,value\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 48);
}

#[test]
fn net_zero_buys_compensation_for_unabatable_emissions() {
    let mut cm = storage_model();
    cm.general.co2_extra = 0.1;
    let (lp, layout) = build_lp(&cm).unwrap();
    let sol = solve_lp(&lp).unwrap();
    let comp = sol.primal[layout.compensation.unwrap().0];
    assert!((comp - 100.0).abs() < 1e-6);
    assert!(atmosphere_balance(&lp, &layout, &sol.primal).unwrap().abs() < 1e-9);
    let (base_lp, _) = build_lp(&storage_model()).unwrap();
    let base = solve_lp(&base_lp).unwrap();
    // 100 kt at 1.3 MCHF/kt.
    assert!((sol.objective - base.objective - 130.0).abs() < 1e-6 * sol.objective);
}

proptest! {
    #[test]
    fn outputs_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in 0u64..1000) {
        let cm = gasification_model();
        let (lp, layout) = build_lp(&cm).unwrap();
        let n = lp.num_cols();
        let x1: Vec<f64> = (0..n).map(|i| ((seed + i as u64 * 7) % 13) as f64 - 6.0).collect();
        let x2: Vec<f64> = (0..n).map(|i| ((seed * 3 + i as u64 * 5) % 11) as f64 * 0.25).collect();
        let mix: Vec<f64> = x1.iter().zip(&x2).map(|(p, q)| a * p + b * q).collect();
        let (h1, h2, hm) = (layout.outputs_at(&x1), layout.outputs_at(&x2), layout.outputs_at(&mix));
        for g in 0..hm.len() {
            let want = a * h1.0[g] + b * h2.0[g];
            prop_assert!((hm.0[g] - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }
}
