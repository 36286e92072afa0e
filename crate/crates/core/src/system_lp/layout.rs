//! Addressing scheme between model entities and LP columns and rows.

use regret_lp::{Col, Row};
use serde::Serialize;

use super::time::Clock;
use crate::model::{Dispatch, Resolution, StorageClass};

/// What one LP column stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarRef {
    Capacity { tech: usize },
    Activity { tech: usize, mode: usize, k: usize },
    Resource { res: usize, k: usize },
    StorageCapacity { storage: usize },
    Charge { storage: usize, k: usize },
    Discharge { storage: usize, k: usize },
    Level { storage: usize, k: usize },
    GridCapacity { grid: usize },
    Compensation,
    AtmosphereSink,
}

#[derive(Clone, Debug)]
pub struct TechCols {
    pub id: String,
    pub dispatch: Dispatch,
    pub capacity: Col,
    pub mode_names: Vec<String>,
    /// `activity[mode][k]`, rates in units of main output per hour.
    pub activity: Vec<Vec<Col>>,
}

#[derive(Clone, Debug)]
pub struct ResourceCols {
    pub id: String,
    pub grain: Dispatch,
    pub layer: usize,
    /// +1 for supplies, -1 for removals.
    pub sign: f64,
    pub usage: Vec<Col>,
    /// Annual availability in model units, infinite when unlimited.
    pub availability: f64,
}

#[derive(Clone, Debug)]
pub struct StorageCols {
    pub id: String,
    pub class: StorageClass,
    pub capacity: Col,
    pub charge: Vec<Col>,
    pub discharge: Vec<Col>,
    /// Hourly levels for daily storage, one per calendar day for seasonal storage.
    pub level: Vec<Col>,
    pub eta_in: f64,
    pub eta_out: f64,
    pub s_loss: f64,
}

/// Balance rows of one layer with the demand they carry.
#[derive(Clone, Debug)]
pub struct LayerRows {
    pub id: String,
    pub resolution: Resolution,
    pub rows: Vec<Row>,
    /// Right-hand side of each balance row.
    pub demand: Vec<f64>,
    /// Annual demand in model units.
    pub annual_demand: f64,
}

/// Sparse linear function of the primal vector.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LinearForm {
    pub terms: Vec<(usize, f64)>,
}

impl LinearForm {
    pub fn push(&mut self, col: Col, coef: f64) {
        if coef != 0.0 {
            self.terms.push((col.0, coef));
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(c, a)| a * x[c]).sum()
    }

    pub fn cols(&self) -> impl Iterator<Item = (Col, f64)> + '_ {
        self.terms.iter().map(|&(c, a)| (Col(c), a))
    }
}

/// Biomass consumed by each output group, TWh/y, in model group order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputsVector(pub Vec<f64>);

impl OutputsVector {
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct VariableLayout {
    pub clock: Clock,
    pub day_to_td: Vec<usize>,
    /// Column index to entity; a bijection onto the LP columns.
    pub vars: Vec<VarRef>,
    pub technologies: Vec<TechCols>,
    pub resources: Vec<ResourceCols>,
    pub storages: Vec<StorageCols>,
    pub grids: Vec<Col>,
    pub compensation: Option<Col>,
    pub atmosphere_sink: Option<Col>,
    pub layers: Vec<LayerRows>,
    pub atmosphere: Option<usize>,
    /// Unabatable emissions, kt/y.
    pub co2_extra: f64,
    pub output_names: Vec<String>,
    /// Outputs of interest in TWh/y.
    pub outputs: Vec<LinearForm>,
    /// Consumed biomass, TWh/y.
    pub biomass_use: LinearForm,
    /// Available biomass, TWh/y.
    pub biomass_availability: f64,
}

impl VariableLayout {
    pub fn num_cols(&self) -> usize {
        self.vars.len()
    }

    pub fn outputs_at(&self, x: &[f64]) -> OutputsVector {
        OutputsVector(self.outputs.iter().map(|f| f.eval(x)).collect())
    }

    pub fn layer(&self, id: &str) -> Option<&LayerRows> {
        self.layers.iter().find(|l| l.id == id)
    }
}
