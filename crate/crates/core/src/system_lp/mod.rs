//! Translation of a concrete model into a cost-minimisation LP and readout of its solution.
//!
//! Technology activities and resource uses are rates (GW, kt/h, Mpkm/h) held
//! at the grain of their dispatch; each layer balances them at its own
//! resolution. Energy is in GWh, carbon in kt and cost in MCHF.

mod build;
mod extract;
mod layout;
mod time;

use thiserror::Error;

use crate::model::ModelError;

pub use build::build_lp;
pub use extract::{
    atmosphere_balance, balance_residuals, biomass_consumed, outputs_of_interest, reconstruct_seasonal_level,
    total_cost, write_flows_csv,
};
pub use layout::{LayerRows, LinearForm, OutputsVector, ResourceCols, StorageCols, TechCols, VarRef, VariableLayout};
pub use time::Clock;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("layer {layer} has demand but nothing can supply it")]
    NoSupplier { layer: String },
    #[error("{0}")]
    Structure(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
