//! Scenario ensemble solves, strategy-constrained re-optimisation and the
//! strategy-by-scenario regret grid.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use regret_lp::{solve_with, Basis, LinearProgram, Sense, SimplexOptions, SolveError, Solution, Status};
use thiserror::Error;

use crate::model::{resolve_scenario, ModelDefinition, ModelError};
use crate::scenarios::ScenarioSet;
use crate::strategies::{Strategy, StrategyKind};
use crate::system_lp::{biomass_consumed, build_lp, BuildError, VariableLayout};

#[derive(Debug, Error)]
pub enum RegretError {
    #[error("strategy '{strategy}' constrains {got} outputs but the layout has {expected}")]
    IncompatibleLayout { strategy: String, expected: usize, got: usize },
    #[error("negative regret {value:e} (strategy cost {c_s}, optimum {c_opt})")]
    NegativeRegret { value: f64, c_s: f64, c_opt: f64 },
    #[error("strategy '{strategy}', scenario {scenario}: {source}")]
    Cell { strategy: String, scenario: usize, source: Box<RegretError> },
    #[error("scenario set has {got} parameters, the model {expected}")]
    ScenarioShape { expected: usize, got: usize },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Outcome of one solve in the grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The solver gave up; the message says why.
    Failed(String),
    /// The unconstrained solve of the scenario was not optimal.
    NoBaseline,
}

impl CellStatus {
    pub fn is_optimal(&self) -> bool {
        *self == CellStatus::Optimal
    }

    fn of(result: &Result<Solution, SolveError>) -> Self {
        match result {
            Ok(s) => match s.status {
                Status::Optimal => CellStatus::Optimal,
                Status::Infeasible => CellStatus::Infeasible,
                Status::Unbounded => CellStatus::Unbounded,
            },
            Err(e) => CellStatus::Failed(e.to_string()),
        }
    }
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellStatus::Optimal => f.write_str("optimal"),
            CellStatus::Infeasible => f.write_str("infeasible"),
            CellStatus::Unbounded => f.write_str("unbounded"),
            CellStatus::Failed(m) => write!(f, "failed: {m}"),
            CellStatus::NoBaseline => f.write_str("no-baseline"),
        }
    }
}

impl std::str::FromStr for CellStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "optimal" => CellStatus::Optimal,
            "infeasible" => CellStatus::Infeasible,
            "unbounded" => CellStatus::Unbounded,
            "no-baseline" => CellStatus::NoBaseline,
            other => match other.strip_prefix("failed: ") {
                Some(m) => CellStatus::Failed(m.to_string()),
                None => return Err(format!("unknown cell status '{other}'")),
            },
        })
    }
}

/// Clamp window for regrets: two solves legitimately disagree at roundoff.
pub fn epsilon_tol(c_opt: f64) -> f64 {
    1e-6 * (1.0 + c_opt.abs())
}

/// `c_s - c_opt`, with values just below zero clamped to zero.
pub fn regret(c_s: f64, c_opt: f64) -> Result<f64, RegretError> {
    let r = c_s - c_opt;
    if r >= 0.0 {
        Ok(r)
    } else if r > -epsilon_tol(c_opt) {
        Ok(0.0)
    } else {
        Err(RegretError::NegativeRegret { value: r, c_s, c_opt })
    }
}

/// Copy of `lp` with the strategy's rows on the outputs of interest appended.
pub fn apply_strategy_constraints(
    lp: &LinearProgram,
    layout: &VariableLayout,
    s: &Strategy,
) -> Result<LinearProgram, RegretError> {
    let forms = &layout.outputs;
    if s.dim() != forms.len() {
        return Err(RegretError::IncompatibleLayout { strategy: s.name.clone(), expected: forms.len(), got: s.dim() });
    }
    let mut out = lp.clone();
    let name = |tag: &str, j: usize| format!("{tag}[{},{}]", s.name, layout.output_names[j]);
    match &s.kind {
        StrategyKind::Box { lower, upper } => {
            for (j, f) in forms.iter().enumerate() {
                if lower[j].is_finite() {
                    out.add_row(name("y_lo", j), f.cols(), Sense::Ge, lower[j]);
                }
                if upper[j].is_finite() {
                    out.add_row(name("y_hi", j), f.cols(), Sense::Le, upper[j]);
                }
            }
        }
        StrategyKind::Fixed(values) => {
            for (j, f) in forms.iter().enumerate() {
                out.add_row(name("y_fix", j), f.cols(), Sense::Eq, values[j]);
            }
        }
        StrategyKind::Share(shares) => {
            for (j, f) in forms.iter().enumerate() {
                let sigma = shares[j] / 100.0;
                let terms = f.cols().chain(forms.iter().flat_map(|g| g.cols().map(move |(c, a)| (c, -sigma * a))));
                out.add_row(name("y_share", j), terms, Sense::Eq, 0.0);
            }
        }
    }
    Ok(out)
}

/// Unconstrained optimum of one scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioOptimum {
    pub status: CellStatus,
    /// Optimal annual cost, MCHF/y; NaN unless optimal.
    pub cost: f64,
    /// Outputs of interest, TWh/y; empty unless optimal.
    pub outputs: Vec<f64>,
    pub biomass_used: f64,
    pub biomass_available: f64,
    pub basis: Option<Basis>,
    pub iterations: usize,
}

/// Optima of every scenario, solved from a shared reference basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Exploration {
    pub output_names: Vec<String>,
    pub optima: Vec<ScenarioOptimum>,
}

impl Exploration {
    pub fn all_optimal(&self) -> bool {
        self.optima.iter().all(|o| o.status.is_optimal())
    }

    pub fn costs(&self) -> Vec<f64> {
        self.optima.iter().map(|o| o.cost).collect()
    }

    /// Output vectors of the optimal scenarios with their scenario indices.
    pub fn output_matrix(&self) -> (Vec<usize>, Vec<Vec<f64>>) {
        self.optima
            .iter()
            .enumerate()
            .filter(|(_, o)| o.status.is_optimal())
            .map(|(i, o)| (i, o.outputs.clone()))
            .unzip()
    }
}

/// Builds the LP of one hypercube point.
pub fn scenario_lp(model: &ModelDefinition, u: &[f64]) -> Result<(LinearProgram, VariableLayout), RegretError> {
    let cm = resolve_scenario(model, u)?;
    Ok(build_lp(&cm)?)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, RegretError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| RegretError::Pool(e.to_string()))
}

/// Warm-started solve; a warm start that breaks down numerically is retried cold.
fn solve_from(lp: &LinearProgram, warm: Option<&Basis>) -> Result<Solution, SolveError> {
    let opts = SimplexOptions::default();
    match solve_with(lp, &opts, warm) {
        Err(SolveError::NumericalFailure(_)) if warm.is_some() => solve_with(lp, &opts, None),
        other => other,
    }
}

/// Basis of the unconstrained problem at the centre of the hypercube, the
/// common warm start of every scenario solve.
pub fn reference_basis(model: &ModelDefinition) -> Result<Option<Basis>, RegretError> {
    let centre = vec![0.5; model.uncertain_order.len()];
    let (lp, _) = scenario_lp(model, &centre)?;
    Ok(solve_from(&lp, None).ok().and_then(|s| s.basis))
}

fn check_shape(model: &ModelDefinition, scenarios: &ScenarioSet) -> Result<(), RegretError> {
    let expected = model.uncertain_order.len();
    if scenarios.dim() != expected && !(expected == 0 && scenarios.dim() == 1) {
        return Err(RegretError::ScenarioShape { expected, got: scenarios.dim() });
    }
    Ok(())
}

/// Coordinates handed to the resolver; a model without uncertain parameters
/// is sampled in one dummy dimension.
fn coordinates<'a>(model: &ModelDefinition, row: &'a [f64]) -> &'a [f64] {
    if model.uncertain_order.is_empty() {
        &[]
    } else {
        row
    }
}

/// Optimises every scenario on `jobs` workers. Results are in scenario order
/// and do not depend on `jobs`.
pub fn explore(
    model: &ModelDefinition,
    scenarios: &ScenarioSet,
    reference: Option<&Basis>,
    jobs: usize,
) -> Result<Exploration, RegretError> {
    check_shape(model, scenarios)?;
    let solve_one = |i: usize| -> Result<ScenarioOptimum, RegretError> {
        let (lp, layout) = scenario_lp(model, coordinates(model, scenarios.row(i)))?;
        let warm = reference.filter(|b| b.cols.len() == lp.num_cols() && b.rows.len() == lp.num_rows());
        let result = solve_from(&lp, warm);
        let status = CellStatus::of(&result);
        let available = layout.biomass_availability;
        Ok(match result {
            Ok(sol) if sol.is_optimal() => ScenarioOptimum {
                status,
                cost: sol.objective,
                outputs: layout.outputs_at(&sol.primal).0,
                biomass_used: biomass_consumed(&layout, &sol.primal),
                biomass_available: available,
                iterations: sol.iterations,
                basis: sol.basis,
            },
            other => ScenarioOptimum {
                status,
                cost: f64::NAN,
                outputs: Vec::new(),
                biomass_used: f64::NAN,
                biomass_available: available,
                iterations: other.map_or(0, |s| s.iterations),
                basis: None,
            },
        })
    };
    let optima = pool(jobs)?.install(|| (0..scenarios.len()).into_par_iter().map(solve_one).collect::<Result<Vec<_>, _>>())?;
    let output_names = model.outputs.groups.iter().map(|g| g.name.clone()).collect();
    Ok(Exploration { output_names, optima })
}

/// Strategies by scenarios; `regret` and `cost` are NaN where a cell is not optimal.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretMatrix {
    pub strategies: Vec<String>,
    pub regret: Vec<Vec<f64>>,
    pub cost: Vec<Vec<f64>>,
    pub c_opt: Vec<f64>,
    pub status: Vec<Vec<CellStatus>>,
}

impl RegretMatrix {
    pub fn num_scenarios(&self) -> usize {
        self.c_opt.len()
    }

    pub fn all_optimal(&self) -> bool {
        self.status.iter().flatten().all(CellStatus::is_optimal)
    }

    /// Cells that are not optimal, as `(strategy, scenario, status)`.
    pub fn failures(&self) -> Vec<(usize, usize, &CellStatus)> {
        self.status
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().enumerate().filter(|(_, c)| !c.is_optimal()).map(move |(i, c)| (s, i, c)))
            .collect()
    }

    /// Regrets of the optimal cells of strategy `s`.
    pub fn valid_regrets(&self, s: usize) -> Vec<f64> {
        self.regret[s].iter().zip(&self.status[s]).filter(|(_, c)| c.is_optimal()).map(|(r, _)| *r).collect()
    }

    /// `(mean(R_s), mean(C^s) - mean(C^opt))` over the scenarios of row `s`.
    pub fn average_regret_identity(&self, s: usize) -> Result<(f64, f64), CellStatus> {
        if let Some(bad) = self.status[s].iter().find(|c| !c.is_optimal()) {
            return Err(bad.clone());
        }
        let n = self.num_scenarios() as f64;
        let lhs = self.regret[s].iter().sum::<f64>() / n;
        let rhs = self.cost[s].iter().sum::<f64>() / n - self.c_opt.iter().sum::<f64>() / n;
        Ok((lhs, rhs))
    }

    /// One row per entry of `rows`, scenario ids as columns.
    fn write_table(&self, out: impl Write, rows: impl Iterator<Item = (String, Vec<String>)>) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header = std::iter::once("strategy".to_string()).chain((0..self.num_scenarios()).map(|i| i.to_string()));
        w.write_record(header)?;
        for (name, cells) in rows {
            w.write_record(std::iter::once(name).chain(cells))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_regret_csv(&self, out: impl Write) -> csv::Result<()> {
        let rows = self.strategies.iter().zip(&self.regret).map(|(n, r)| (n.clone(), r.iter().map(|v| fmt17(*v)).collect()));
        self.write_table(out, rows)
    }

    /// Strategy costs plus a final `optimum` row.
    pub fn write_costs_csv(&self, out: impl Write) -> csv::Result<()> {
        let rows = self
            .strategies
            .iter()
            .zip(&self.cost)
            .map(|(n, r)| (n.clone(), r.iter().map(|v| fmt17(*v)).collect()))
            .chain(std::iter::once(("optimum".to_string(), self.c_opt.iter().map(|v| fmt17(*v)).collect())));
        self.write_table(out, rows)
    }

    pub fn write_status_csv(&self, out: impl Write) -> csv::Result<()> {
        let rows = self.strategies.iter().zip(&self.status).map(|(n, r)| (n.clone(), r.iter().map(|c| c.to_string()).collect()));
        self.write_table(out, rows)
    }
}

/// 17 significant digits, enough to round-trip every `f64`.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Solves every (strategy, scenario) cell on `jobs` workers, warm-started
/// from the scenario's unconstrained basis. Baseline costs come from
/// `exploration` and are never re-solved.
pub fn evaluate_regret(
    model: &ModelDefinition,
    scenarios: &ScenarioSet,
    exploration: &Exploration,
    strategies: &[Strategy],
    jobs: usize,
) -> Result<RegretMatrix, RegretError> {
    check_shape(model, scenarios)?;
    let n = scenarios.len();
    let cells: Vec<(usize, usize)> = (0..strategies.len()).flat_map(|s| (0..n).map(move |i| (s, i))).collect();
    let solve_cell = |&(s, i): &(usize, usize)| -> Result<(CellStatus, f64, f64), RegretError> {
        let base = &exploration.optima[i];
        if !base.status.is_optimal() {
            return Ok((CellStatus::NoBaseline, f64::NAN, f64::NAN));
        }
        let strategy = &strategies[s];
        let wrap = |e: RegretError| RegretError::Cell { strategy: strategy.name.clone(), scenario: i, source: Box::new(e) };
        let (lp, layout) = scenario_lp(model, coordinates(model, scenarios.row(i))).map_err(wrap)?;
        let constrained = apply_strategy_constraints(&lp, &layout, strategy).map_err(wrap)?;
        let extra = constrained.num_rows() - lp.num_rows();
        let warm = base
            .basis
            .as_ref()
            .filter(|b| b.cols.len() == lp.num_cols() && b.rows.len() == lp.num_rows())
            .map(|b| b.with_extra_rows(extra));
        let result = solve_from(&constrained, warm.as_ref());
        let status = CellStatus::of(&result);
        match result {
            Ok(sol) if sol.is_optimal() => {
                let r = regret(sol.objective, base.cost).map_err(wrap)?;
                // A clamped cell counts as costing exactly the optimum.
                Ok((status, r, base.cost + r))
            }
            _ => Ok((status, f64::NAN, f64::NAN)),
        }
    };
    let results = pool(jobs)?.install(|| cells.par_iter().map(solve_cell).collect::<Result<Vec<_>, _>>())?;
    let mut regret = vec![vec![f64::NAN; n]; strategies.len()];
    let mut cost = regret.clone();
    let mut status = vec![vec![CellStatus::NoBaseline; n]; strategies.len()];
    for (&(s, i), (st, r, c)) in cells.iter().zip(results) {
        regret[s][i] = r;
        cost[s][i] = c;
        status[s][i] = st;
    }
    Ok(RegretMatrix {
        strategies: strategies.iter().map(|s| s.name.clone()).collect(),
        regret,
        cost,
        c_opt: exploration.costs(),
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regret_clamps_roundoff_only() {
        assert_eq!(regret(100.0, 100.0).unwrap(), 0.0);
        assert!((regret(103.2, 100.0).unwrap() - 3.2).abs() < 1e-12);
        assert_eq!(regret(100.0 - 1e-5, 100.0).unwrap(), 0.0);
        assert!(matches!(regret(99.0, 100.0), Err(RegretError::NegativeRegret { .. })));
    }
}
