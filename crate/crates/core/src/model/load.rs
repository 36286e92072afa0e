use std::collections::BTreeMap;
use std::path::Path;

use super::{
    validate_model, CapacityFactor, ModelDefinition, ModelError, Series, TimeStructure, UncertainValue,
};

const DAYS_PER_YEAR: usize = 365;

#[derive(serde::Deserialize)]
struct SeriesRow {
    td: usize,
    hour: usize,
    value: f64,
}

/// Reads a model document and its timeseries, fills defaults and validates it.
pub fn load_model(path: impl AsRef<Path>) -> Result<ModelDefinition, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut model = parse_document(&text)?;
    let dir = path.parent().unwrap_or(Path::new(".")).join(&model.timeseries_dir);
    let (n_td, hours) = (model.time.n_typical_days, model.time.hours_per_day);
    for id in model.series_ids() {
        let file = dir.join(format!("{id}.csv"));
        if !file.is_file() {
            return Err(ModelError::MissingReference { kind: "timeseries", id });
        }
        let series = read_series(&file, n_td, hours)?;
        model.series.insert(id, series);
    }
    finish(model)
}

/// Builds a model from a JSON document and in-memory timeseries.
pub fn parse_model(text: &str, series: BTreeMap<String, Series>) -> Result<ModelDefinition, ModelError> {
    let mut model = parse_document(text)?;
    for id in model.series_ids() {
        let s = series.get(&id).ok_or(ModelError::MissingReference { kind: "timeseries", id: id.clone() })?;
        model.series.insert(id, s.clone());
    }
    finish(model)
}

fn parse_document(text: &str) -> Result<ModelDefinition, ModelError> {
    if text.trim().is_empty() {
        return Err(ModelError::Parse("empty document".into()));
    }
    let mut model: ModelDefinition = serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    fill_maintenance_defaults(&mut model);
    derive_calendar(&mut model.time);
    Ok(model)
}

fn finish(model: ModelDefinition) -> Result<ModelDefinition, ModelError> {
    check_references(&model)?;
    let report = validate_model(&model);
    if report.is_empty() {
        Ok(model)
    } else {
        Err(ModelError::Invalid(report))
    }
}

fn read_series(file: &Path, n_td: usize, hours: usize) -> Result<Series, ModelError> {
    let parse_err = |e: csv::Error| ModelError::Parse(format!("{}: {e}", file.display()));
    let mut reader = csv::Reader::from_path(file).map_err(parse_err)?;
    let mut values = vec![f64::NAN; n_td * hours];
    for row in reader.deserialize::<SeriesRow>() {
        let row = row.map_err(parse_err)?;
        if row.td == 0 || row.td > n_td || row.hour == 0 || row.hour > hours {
            return Err(ModelError::Parse(format!(
                "{}: slice ({}, {}) outside {n_td} days x {hours} hours",
                file.display(),
                row.td,
                row.hour
            )));
        }
        values[(row.td - 1) * hours + row.hour - 1] = row.value;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(ModelError::Parse(format!("{}: missing slices", file.display())));
    }
    Ok(Series { values })
}

/// Unspecified maintenance costs span 2 % to 5 % of the mean investment cost.
fn default_maintenance(c_inv: &UncertainValue) -> UncertainValue {
    let mean = c_inv.mean();
    UncertainValue::Range { lb: 0.02 * mean, ub: 0.05 * mean }
}

fn fill_maintenance_defaults(m: &mut ModelDefinition) {
    for t in &mut m.technologies {
        t.c_maint.get_or_insert_with(|| default_maintenance(&t.c_inv));
    }
    for s in &mut m.storages {
        s.c_maint.get_or_insert_with(|| default_maintenance(&s.c_inv));
    }
    for g in &mut m.grids {
        g.c_maint.get_or_insert_with(|| default_maintenance(&g.c_inv));
    }
}

/// Assigns each calendar day to the typical day closest on the circular year
/// (earlier typical day on ties) and counts the days behind each one.
pub(crate) fn derive_calendar(time: &mut TimeStructure) {
    if time.day_to_td.is_empty() && !time.td_day_indices.is_empty() {
        time.day_to_td = (1..=DAYS_PER_YEAR)
            .map(|day| {
                let dist = |td_day: usize| {
                    let d = day.abs_diff(td_day) % DAYS_PER_YEAR;
                    d.min(DAYS_PER_YEAR - d)
                };
                (0..time.td_day_indices.len())
                    .min_by_key(|&k| (dist(time.td_day_indices[k]), k))
                    .unwrap_or(0)
            })
            .collect();
    }
    if time.td_weight.is_empty() {
        let mut w = vec![0.0; time.n_typical_days];
        for &td in &time.day_to_td {
            if let Some(x) = w.get_mut(td) {
                *x += 1.0;
            }
        }
        time.td_weight = w;
    }
}

/// First dangling layer, timeseries, technology or resource id, if any.
fn check_references(m: &ModelDefinition) -> Result<(), ModelError> {
    let layer = |id: &str| -> Result<(), ModelError> {
        m.layer(id)
            .map(|_| ())
            .ok_or_else(|| ModelError::MissingReference { kind: "layer", id: id.to_string() })
    };
    let series = |id: &str| -> Result<(), ModelError> {
        if m.series.contains_key(id) {
            Ok(())
        } else {
            Err(ModelError::MissingReference { kind: "timeseries", id: id.to_string() })
        }
    };
    for r in &m.resources {
        layer(&r.layer)?;
        if let Some(u) = &r.uptake_layer {
            layer(u)?;
        }
        if let Some(d) = &r.recycled_from {
            layer(d)?;
        }
        if let Some(s) = &r.capacity_factor_series {
            series(s)?;
        }
    }
    for t in &m.technologies {
        layer(&t.main_output)?;
        for mode in &t.modes {
            for l in mode.flows.keys() {
                layer(l)?;
            }
        }
        if let CapacityFactor::Series(s) = &t.c_p {
            series(s)?;
        }
        if let Some(p) = &t.f_perc {
            layer(&p.layer)?;
        }
    }
    for s in &m.storages {
        layer(&s.layer)?;
    }
    for g in &m.grids {
        layer(&g.layer)?;
    }
    for d in &m.demands {
        layer(&d.layer)?;
        if let Some(sp) = &d.split {
            layer(&sp.other_layer)?;
        }
        if let Some(p) = &d.profile {
            series(p)?;
        }
    }
    for c in &m.import_caps {
        for r in &c.resources {
            m.resource(r)
                .ok_or_else(|| ModelError::MissingReference { kind: "resource", id: r.clone() })?;
        }
        for l in &c.demand_layers {
            layer(l)?;
        }
    }
    if m.general.net_zero {
        layer(&m.atmosphere_layer)?;
    }
    for l in &m.outputs.biomass_layers {
        layer(l)?;
    }
    for g in &m.outputs.groups {
        for t in &g.technologies {
            m.technology(t)
                .ok_or_else(|| ModelError::MissingReference { kind: "technology", id: t.clone() })?;
        }
    }
    Ok(())
}
