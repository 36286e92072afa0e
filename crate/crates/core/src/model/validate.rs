use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{CapacityFactor, ModelDefinition, Resolution, StorageClass, UncertainValue};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

/// Every broken invariant of a model; empty when the model is well formed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, message: &str) -> bool {
        self.violations.iter().any(|v| v.message.contains(message))
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  {}: {}", v.path, v.message)?;
        }
        Ok(())
    }
}

fn unique<'a>(report: &mut ValidationReport, kind: &str, ids: impl IntoIterator<Item = &'a str>) {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            report.push(format!("{kind}.{id}"), "duplicate id");
        }
    }
}

fn in_unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Checks every type invariant of the model without modifying it.
pub fn validate_model(m: &ModelDefinition) -> ValidationReport {
    let mut r = ValidationReport::default();

    unique(&mut r, "layers", m.layers.iter().map(|l| l.id.as_str()));
    unique(&mut r, "resources", m.resources.iter().map(|x| x.id.as_str()));
    unique(&mut r, "technologies", m.technologies.iter().map(|x| x.id.as_str()));
    unique(&mut r, "storages", m.storages.iter().map(|x| x.id.as_str()));
    unique(&mut r, "grids", m.grids.iter().map(|x| x.id.as_str()));
    unique(&mut r, "demands", m.demands.iter().map(|x| x.layer.as_str()));

    check_uncertain(m, &mut r);
    check_general(m, &mut r);
    check_time(m, &mut r);

    for res in &m.resources {
        let path = format!("resources.{}", res.id);
        if let Some(a) = &res.availability {
            if a.bounds().0 < 0.0 {
                r.push(&path, "negative availability");
            }
        }
        if res.availability.is_some() && res.recycled_from.is_some() {
            r.push(&path, "availability given twice");
        }
        if res.carbon_intensity < 0.0 || !res.carbon_intensity.is_finite() {
            r.push(&path, "carbon intensity must be non-negative");
        }
        if res.cost.bounds().0 < 0.0 {
            r.push(&path, "negative cost");
        }
        if res.limited_by_ntc && m.layer(&res.layer).is_some_and(|l| l.resolution != Resolution::Hourly) {
            r.push(&path, "transfer limit needs an hourly layer");
        }
    }

    for t in &m.technologies {
        let path = format!("technologies.{}", t.id);
        if !(t.lifetime > 0.0) {
            r.push(&path, "lifetime must be positive");
        }
        if t.f_max.is_some_and(|fmax| t.f_min > fmax) || t.f_min < 0.0 {
            r.push(&path, "capacity bounds out of order");
        }
        if t.modes.is_empty() {
            r.push(&path, "no operating mode");
        }
        for mode in &t.modes {
            if mode.flows.get(&t.main_output) != Some(&1.0) {
                r.push(format!("{path}.{}", mode.name), "main output coefficient must be 1");
            }
            if mode.flows.values().any(|v| !v.is_finite()) {
                r.push(format!("{path}.{}", mode.name), "non-finite flow");
            }
        }
        if let CapacityFactor::Constant(c) = t.c_p {
            if !in_unit(c) {
                r.push(&path, "capacity factor out of range");
            }
        }
        if let Some(p) = &t.f_perc {
            if !(0.0 <= p.lo_pct && p.lo_pct <= p.hi_pct && p.hi_pct <= 100.0) {
                r.push(&path, "production share out of range");
            }
        }
        if t.c_inv.bounds().0 < 0.0 {
            r.push(&path, "negative investment cost");
        }
    }

    for s in &m.storages {
        let path = format!("storages.{}", s.id);
        for eta in [s.eta_in, s.eta_out] {
            if !(eta > 0.0 && eta <= 1.0) {
                r.push(&path, "efficiency out of range");
            }
        }
        if !(0.0..1.0).contains(&s.s_loss) {
            r.push(&path, "self-discharge out of range");
        }
        if !(s.t_charge > 0.0 && s.t_discharge > 0.0) {
            r.push(&path, "charge and discharge times must be positive");
        }
        if !(s.s_avail > 0.0 && s.s_avail <= 1.0) {
            r.push(&path, "availability factor out of range");
        }
        if s.f_max.is_some_and(|fmax| s.f_min > fmax) || s.f_min < 0.0 {
            r.push(&path, "capacity bounds out of order");
        }
        if !(s.lifetime > 0.0) {
            r.push(&path, "lifetime must be positive");
        }
        let needed = match s.class {
            StorageClass::Daily => Resolution::Hourly,
            StorageClass::Seasonal => Resolution::Daily,
        };
        if m.layer(&s.layer).is_some_and(|l| l.resolution != needed) {
            r.push(&path, format!("storage class needs a {needed:?} layer").to_lowercase());
        }
    }

    for g in &m.grids {
        let path = format!("grids.{}", g.id);
        if !(0.0..1.0).contains(&g.loss_pct) {
            r.push(&path, "grid loss out of range");
        }
        if !(g.lifetime > 0.0) {
            r.push(&path, "lifetime must be positive");
        }
        if m.layer(&g.layer).is_some_and(|l| l.resolution == Resolution::Annual) {
            r.push(&path, "grid needs an hourly or daily layer");
        }
    }

    let slices = m.time.slices();
    for (id, s) in &m.series {
        if s.values.len() != slices {
            r.push(format!("timeseries.{id}"), "length differs from typical days x hours");
        }
        if s.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            r.push(format!("timeseries.{id}"), "negative or non-finite value");
        }
    }
    for t in &m.technologies {
        if let CapacityFactor::Series(id) = &t.c_p {
            if m.series.get(id).is_some_and(|s| s.values.iter().any(|v| *v > 1.0)) {
                r.push(format!("technologies.{}", t.id), "capacity factor out of range");
            }
        }
    }
    for d in &m.demands {
        let path = format!("demands.{}", d.layer);
        if d.annual_total.bounds().0 < 0.0 {
            r.push(&path, "negative demand");
        }
        if let Some(s) = d.profile.as_ref().and_then(|p| m.series.get(p)) {
            let total = profile_total(&s.values, &m.time.td_weight, m.time.hours_per_day);
            if !(total > 0.0) {
                r.push(&path, "profile has no weight over the year");
            }
        }
    }

    for c in &m.import_caps {
        let (lo, hi) = c.share_pct.bounds();
        if lo < 0.0 || hi > 100.0 {
            r.push(format!("import_caps.{}", c.id), "percentage out of range");
        }
    }

    if m.outputs.groups.is_empty() {
        r.push("outputs", "no output groups");
    }
    let mut grouped = BTreeMap::new();
    for g in &m.outputs.groups {
        for t in &g.technologies {
            if let Some(prev) = grouped.insert(t.as_str(), g.name.as_str()) {
                r.push(format!("outputs.{}", g.name), format!("technology {t} already in group {prev}"));
            }
        }
    }
    r
}

/// Weighted annual sum of a per-slice profile.
pub(crate) fn profile_total(values: &[f64], td_weight: &[f64], hours: usize) -> f64 {
    values
        .chunks(hours)
        .zip(td_weight)
        .map(|(day, w)| w * day.iter().sum::<f64>())
        .sum()
}

fn check_uncertain(m: &ModelDefinition, r: &mut ValidationReport) {
    let mut declared: BTreeMap<String, UncertainValue> = BTreeMap::new();
    m.for_each_value(&mut |path, v| {
        declared.insert(path.to_string(), *v);
    });
    for (path, v) in &declared {
        if let Some(msg) = v.form_error() {
            r.push(path, msg);
        }
    }
    let mut seen = BTreeSet::new();
    for p in &m.uncertain_order {
        if !seen.insert(p.as_str()) {
            r.push(p, "listed twice in uncertain_order");
        }
        match declared.get(p) {
            None => r.push(p, "uncertain_order names an unknown parameter"),
            Some(v) if v.is_fixed() => r.push(p, "uncertain_order names a fixed parameter"),
            Some(_) => {}
        }
    }
    for (path, v) in &declared {
        if !v.is_fixed() && !seen.contains(path.as_str()) {
            r.push(path, "uncertain parameter missing from uncertain_order");
        }
    }
}

fn check_general(m: &ModelDefinition, r: &mut ValidationReport) {
    let g = &m.general;
    for (name, v) in [
        ("i_rate", &g.i_rate),
        ("recycling_pct", &g.recycling_pct),
        ("public_mobility_pct", &g.public_mobility_pct),
        ("dhn_pct", &g.dhn_pct),
    ] {
        let (lo, hi) = v.bounds();
        if lo < 0.0 || hi > 100.0 {
            r.push(format!("general.{name}"), "percentage out of range");
        }
    }
    for (name, v) in [
        ("ntc", &g.ntc),
        ("co2_extra", &g.co2_extra),
        ("co2_compensation_cost", &g.co2_compensation_cost),
    ] {
        if v.bounds().0 < 0.0 {
            r.push(format!("general.{name}"), "must be non-negative");
        }
    }
}

fn check_time(m: &ModelDefinition, r: &mut ValidationReport) {
    let t = &m.time;
    if t.n_typical_days == 0 || t.hours_per_day == 0 {
        r.push("time", "empty time structure");
    }
    if t.td_day_indices.len() != t.n_typical_days {
        r.push("time.td_day_indices", "one day index per typical day required");
    }
    if t.td_day_indices.iter().any(|&d| d == 0 || d > 365) {
        r.push("time.td_day_indices", "day index outside the year");
    }
    if t.day_to_td.len() != 365 || t.day_to_td.iter().any(|&k| k >= t.n_typical_days) {
        r.push("time.day_to_td", "every day must map to one typical day");
    }
    if t.td_weight.len() != t.n_typical_days {
        r.push("time.td_weight", "one weight per typical day required");
    }
    let total: f64 = t.td_weight.iter().sum();
    if (total - 365.0).abs() > 1e-9 {
        r.push("time.td_weight", "year coverage: weights must sum to 365");
    } else {
        let mut counts = vec![0.0; t.n_typical_days];
        for &k in &t.day_to_td {
            if let Some(c) = counts.get_mut(k) {
                *c += 1.0;
            }
        }
        if counts != t.td_weight {
            r.push("time.td_weight", "year coverage: weights disagree with day assignment");
        }
    }
}
