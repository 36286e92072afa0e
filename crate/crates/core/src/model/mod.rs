//! Declarative energy-system description and its scenario resolution.
//!
//! Every type is generic over the value carried by uncertain fields:
//! [`ModelDefinition`] holds [`UncertainValue`]s as read from disk and
//! [`ConcreteModel`] holds the plain numbers of one scenario.

mod load;
mod resolve;
mod uncertain;
mod validate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use load::{load_model, parse_model};
pub use resolve::{annualization_factor, resolve_scenario, uncertain_parameters, UncertainParameter};
pub use uncertain::UncertainValue;
pub use validate::{validate_model, ValidationReport, Violation};

pub type ModelDefinition = Model<UncertainValue>;
pub type ConcreteModel = Model<f64>;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown {kind} '{id}'")]
    MissingReference { kind: &'static str, id: String },
    #[error("model is invalid:\n{0}")]
    Invalid(ValidationReport),
    #[error("expected {expected} uncertain coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0}")]
    Domain(String),
}

/// Time resolution of a layer's balance equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    /// One balance per typical-day hour.
    Hourly,
    /// One balance per typical day.
    Daily,
    /// One balance for the whole year.
    Annual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub id: String,
    pub resolution: Resolution,
    #[serde(default)]
    pub unit: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "V: Deserialize<'de>"))]
pub struct General<V> {
    /// Discount rate in percent.
    pub i_rate: V,
    pub recycling_pct: V,
    pub public_mobility_pct: V,
    pub dhn_pct: V,
    /// Net transfer capacity for electricity imports, GW.
    pub ntc: V,
    /// Unabatable emissions, Mt CO2 per year.
    pub co2_extra: V,
    /// Price of purchasable compensation, CHF per tonne.
    pub co2_compensation_cost: V,
    pub net_zero: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceKind {
    Import,
    Local,
    ExportRemoval,
}

/// Physical unit family of a resource, fixing the conversion to model units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceUnits {
    /// Cost in CHF/kWh, availability in TWh/y.
    #[default]
    Energy,
    /// Cost in CHF/t, availability in Mt/y.
    Co2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "V: Deserialize<'de>"))]
pub struct Resource<V> {
    pub id: String,
    pub kind: ResourceKind,
    pub layer: String,
    #[serde(default)]
    pub units: ResourceUnits,
    pub cost: V,
    /// Annual availability; absent means unlimited.
    #[serde(default)]
    pub availability: Option<V>,
    /// Availability equals the recycling rate times this demand layer's total.
    #[serde(default)]
    pub recycled_from: Option<String>,
    #[serde(default)]
    pub carbon_intensity: f64,
    /// Layer from which the embodied carbon was absorbed before use.
    #[serde(default)]
    pub uptake_layer: Option<String>,
    #[serde(default)]
    pub constant_over_year: bool,
    /// Per-slice availability shape; use is capped by the scaled profile.
    #[serde(default)]
    pub capacity_factor_series: Option<String>,
    /// Hourly imports are limited by the transfer capacity.
    #[serde(default)]
    pub limited_by_ntc: bool,
}

/// How often a technology may change its operating point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispatch {
    Hourly,
    /// Constant within each typical day.
    Daily,
    /// Constant over the year.
    Flat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub name: String,
    /// Signed flow per unit of main-output activity: inputs negative.
    pub flows: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CapacityFactor {
    Constant(f64),
    Series(String),
}

impl Default for CapacityFactor {
    fn default() -> Self {
        Self::Constant(1.0)
    }
}

/// Bounds on a technology's share of a layer's annual demand, in percent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductionShare {
    pub layer: String,
    pub lo_pct: f64,
    pub hi_pct: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "V: Deserialize<'de>"))]
pub struct Technology<V> {
    pub id: String,
    pub dispatch: Dispatch,
    pub main_output: String,
    pub modes: Vec<Mode>,
    /// CHF per kW of main output (MCHF/GW).
    pub c_inv: V,
    /// CHF per kW and year; filled from the investment cost when absent.
    #[serde(default)]
    pub c_maint: Option<V>,
    pub lifetime: f64,
    #[serde(default)]
    pub c_p: CapacityFactor,
    #[serde(default)]
    pub f_min: f64,
    #[serde(default)]
    pub f_max: Option<f64>,
    #[serde(default)]
    pub f_perc: Option<ProductionShare>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StorageClass {
    /// Level returns to its start value within every typical day.
    Daily,
    /// Level is tracked over the 365-day sequence with annual cyclicity.
    Seasonal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "V: Deserialize<'de>"))]
pub struct Storage<V> {
    pub id: String,
    pub layer: String,
    pub class: StorageClass,
    /// CHF per kWh of capacity.
    pub c_inv: V,
    #[serde(default)]
    pub c_maint: Option<V>,
    pub lifetime: f64,
    pub t_charge: f64,
    pub t_discharge: f64,
    pub eta_in: f64,
    pub eta_out: f64,
    /// Fraction of the level lost per hour.
    #[serde(default)]
    pub s_loss: f64,
    #[serde(default = "one")]
    pub s_avail: f64,
    #[serde(default)]
    pub f_min: f64,
    #[serde(default)]
    pub f_max: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "V: Deserialize<'de>"))]
pub struct Grid<V> {
    pub id: String,
    pub layer: String,
    pub c_inv: V,
    #[serde(default)]
    pub c_maint: Option<V>,
    pub lifetime: f64,
    /// Share of transported energy lost, in `[0, 1)`.
    #[serde(default)]
    pub loss_pct: f64,
}

/// General parameter that divides a demand between two layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitShare {
    DhnPct,
    PublicMobilityPct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSplit {
    /// The named share goes to the demand's own layer, the rest to `other_layer`.
    pub share: SplitShare,
    pub other_layer: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "V: Deserialize<'de>"))]
pub struct Demand<V> {
    pub layer: String,
    /// TWh/y (or Bpkm/y, Btkm/y).
    pub annual_total: V,
    /// Timeseries id of the shape; absent means constant.
    #[serde(default)]
    pub profile: Option<String>,
    #[serde(default)]
    pub split: Option<DemandSplit>,
}

/// Joint cap on several imports as a share of several demands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "V: Deserialize<'de>"))]
pub struct ImportCap<V> {
    pub id: String,
    pub resources: Vec<String>,
    pub demand_layers: Vec<String>,
    pub share_pct: V,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeStructure {
    pub n_typical_days: usize,
    pub hours_per_day: usize,
    /// Day of year (1-based) represented by each typical day.
    pub td_day_indices: Vec<usize>,
    /// Typical day of each calendar day; derived by nearest day when empty.
    #[serde(default)]
    pub day_to_td: Vec<usize>,
    /// Days represented by each typical day; derived from `day_to_td` when empty.
    #[serde(default)]
    pub td_weight: Vec<f64>,
}

impl TimeStructure {
    pub fn slices(&self) -> usize {
        self.n_typical_days * self.hours_per_day
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputGroup {
    pub name: String,
    pub technologies: Vec<String>,
}

/// Definition of the outputs of interest: per-group biomass consumption.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputGroups {
    pub biomass_layers: Vec<String>,
    pub groups: Vec<OutputGroup>,
}

/// Per-typical-day hourly values, `n_typical_days * hours_per_day` long.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub values: Vec<f64>,
}

impl Series {
    pub fn at(&self, td: usize, hour: usize, hours_per_day: usize) -> f64 {
        self.values[td * hours_per_day + hour]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "V: Deserialize<'de>"))]
pub struct Model<V> {
    #[serde(default)]
    pub name: String,
    pub general: General<V>,
    pub layers: Vec<Layer>,
    pub resources: Vec<Resource<V>>,
    pub technologies: Vec<Technology<V>>,
    #[serde(default)]
    pub storages: Vec<Storage<V>>,
    #[serde(default)]
    pub grids: Vec<Grid<V>>,
    pub demands: Vec<Demand<V>>,
    #[serde(default)]
    pub import_caps: Vec<ImportCap<V>>,
    pub time: TimeStructure,
    pub outputs: OutputGroups,
    /// Layer whose annual balance is the net-zero constraint.
    #[serde(default = "default_atmosphere")]
    pub atmosphere_layer: String,
    pub uncertain_order: Vec<String>,
    /// Directory of the timeseries CSV files, relative to the model file.
    #[serde(default = "default_series_dir")]
    pub timeseries_dir: String,
    #[serde(skip)]
    pub series: BTreeMap<String, Series>,
}

fn default_atmosphere() -> String {
    "CO2_ATM".into()
}

fn default_series_dir() -> String {
    "timeseries".into()
}

impl<V> Model<V> {
    pub fn layer(&self, id: &str) -> Option<&Layer> {
        self.layers.iter().find(|l| l.id == id)
    }

    pub fn layer_index(&self, id: &str) -> Option<usize> {
        self.layers.iter().position(|l| l.id == id)
    }

    pub fn technology(&self, id: &str) -> Option<&Technology<V>> {
        self.technologies.iter().find(|t| t.id == id)
    }

    pub fn resource(&self, id: &str) -> Option<&Resource<V>> {
        self.resources.iter().find(|r| r.id == id)
    }

    /// Ids of every timeseries the model refers to.
    pub fn series_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .resources
            .iter()
            .filter_map(|r| r.capacity_factor_series.clone())
            .chain(self.technologies.iter().filter_map(|t| match &t.c_p {
                CapacityFactor::Series(id) => Some(id.clone()),
                CapacityFactor::Constant(_) => None,
            }))
            .chain(self.demands.iter().filter_map(|d| d.profile.clone()))
            .collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// Same model with every uncertain field passed through `f(path, value)`.
    pub fn map_values<W>(&self, f: &mut dyn FnMut(&str, &V) -> W) -> Model<W> {
        let g = &self.general;
        let general = General {
            i_rate: f("general.i_rate", &g.i_rate),
            recycling_pct: f("general.recycling_pct", &g.recycling_pct),
            public_mobility_pct: f("general.public_mobility_pct", &g.public_mobility_pct),
            dhn_pct: f("general.dhn_pct", &g.dhn_pct),
            ntc: f("general.ntc", &g.ntc),
            co2_extra: f("general.co2_extra", &g.co2_extra),
            co2_compensation_cost: f("general.co2_compensation_cost", &g.co2_compensation_cost),
            net_zero: g.net_zero,
        };
        let resources = self
            .resources
            .iter()
            .map(|r| Resource {
                id: r.id.clone(),
                kind: r.kind,
                layer: r.layer.clone(),
                units: r.units,
                cost: f(&format!("resources.{}.cost", r.id), &r.cost),
                availability: r.availability.as_ref().map(|a| f(&format!("resources.{}.availability", r.id), a)),
                recycled_from: r.recycled_from.clone(),
                carbon_intensity: r.carbon_intensity,
                uptake_layer: r.uptake_layer.clone(),
                constant_over_year: r.constant_over_year,
                capacity_factor_series: r.capacity_factor_series.clone(),
                limited_by_ntc: r.limited_by_ntc,
            })
            .collect();
        let technologies = self
            .technologies
            .iter()
            .map(|t| Technology {
                id: t.id.clone(),
                dispatch: t.dispatch,
                main_output: t.main_output.clone(),
                modes: t.modes.clone(),
                c_inv: f(&format!("technologies.{}.c_inv", t.id), &t.c_inv),
                c_maint: t.c_maint.as_ref().map(|c| f(&format!("technologies.{}.c_maint", t.id), c)),
                lifetime: t.lifetime,
                c_p: t.c_p.clone(),
                f_min: t.f_min,
                f_max: t.f_max,
                f_perc: t.f_perc.clone(),
            })
            .collect();
        let storages = self
            .storages
            .iter()
            .map(|s| Storage {
                id: s.id.clone(),
                layer: s.layer.clone(),
                class: s.class,
                c_inv: f(&format!("storages.{}.c_inv", s.id), &s.c_inv),
                c_maint: s.c_maint.as_ref().map(|c| f(&format!("storages.{}.c_maint", s.id), c)),
                lifetime: s.lifetime,
                t_charge: s.t_charge,
                t_discharge: s.t_discharge,
                eta_in: s.eta_in,
                eta_out: s.eta_out,
                s_loss: s.s_loss,
                s_avail: s.s_avail,
                f_min: s.f_min,
                f_max: s.f_max,
            })
            .collect();
        let grids = self
            .grids
            .iter()
            .map(|gr| Grid {
                id: gr.id.clone(),
                layer: gr.layer.clone(),
                c_inv: f(&format!("grids.{}.c_inv", gr.id), &gr.c_inv),
                c_maint: gr.c_maint.as_ref().map(|c| f(&format!("grids.{}.c_maint", gr.id), c)),
                lifetime: gr.lifetime,
                loss_pct: gr.loss_pct,
            })
            .collect();
        let demands = self
            .demands
            .iter()
            .map(|d| Demand {
                layer: d.layer.clone(),
                annual_total: f(&format!("demands.{}.annual_total", d.layer), &d.annual_total),
                profile: d.profile.clone(),
                split: d.split.clone(),
            })
            .collect();
        let import_caps = self
            .import_caps
            .iter()
            .map(|c| ImportCap {
                id: c.id.clone(),
                resources: c.resources.clone(),
                demand_layers: c.demand_layers.clone(),
                share_pct: f(&format!("import_caps.{}.share_pct", c.id), &c.share_pct),
            })
            .collect();
        Model {
            name: self.name.clone(),
            general,
            layers: self.layers.clone(),
            resources,
            technologies,
            storages,
            grids,
            demands,
            import_caps,
            time: self.time.clone(),
            outputs: self.outputs.clone(),
            atmosphere_layer: self.atmosphere_layer.clone(),
            uncertain_order: self.uncertain_order.clone(),
            timeseries_dir: self.timeseries_dir.clone(),
            series: self.series.clone(),
        }
    }

    /// Visits every uncertain field with its canonical path.
    pub fn for_each_value(&self, f: &mut dyn FnMut(&str, &V)) {
        self.map_values(&mut |p, v| f(p, v));
    }
}
