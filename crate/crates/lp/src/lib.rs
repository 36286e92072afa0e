//! Linear programming for desk-scale energy models.
//!
//! [`LinearProgram`] holds a sparse minimisation problem, [`solve_lp`] runs a
//! bounded-variable revised simplex, and [`vertex_enumeration_oracle`] gives a
//! brute-force reference answer for tiny instances.

mod error;
mod lu;
pub mod mps;
mod oracle;
mod problem;
mod simplex;
mod solution;

pub use error::{LpError, MpsError, OracleError, SolveError, StatusError};
pub use oracle::{vertex_enumeration_oracle, MAX_COLS as ORACLE_MAX_COLS, MAX_ROWS as ORACLE_MAX_ROWS};
pub use problem::{Col, LinearProgram, Row, Sense};
pub use simplex::{solve_lp, solve_with, SimplexOptions};
pub use solution::{duality_gap, Basis, Solution, Status, VarStatus};
