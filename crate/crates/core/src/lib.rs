//! Regret-based strategy analysis for energy-system planning.
//!
//! The pipeline samples uncertain model parameters, optimises one system
//! design per scenario, groups the designs into strategies and measures the
//! cost of committing to each strategy across all scenarios.

pub mod model;
pub mod system_lp;
pub mod analysis;
pub mod regret;
pub mod scenarios;
pub mod strategies;
