use crate::error::StatusError;
use crate::problem::LinearProgram;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Position of one variable (structural or row logical) in a simplex basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Zero,
}

impl VarStatus {
    fn code(self) -> char {
        match self {
            VarStatus::Basic => 'B',
            VarStatus::AtLower => 'L',
            VarStatus::AtUpper => 'U',
            VarStatus::Zero => 'Z',
        }
    }

    fn from_code(c: char) -> Option<Self> {
        Some(match c {
            'B' => VarStatus::Basic,
            'L' => VarStatus::AtLower,
            'U' => VarStatus::AtUpper,
            'Z' => VarStatus::Zero,
            _ => return None,
        })
    }
}

/// Simplex basis usable as a warm start: one status per column and per row logical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Basis {
    pub cols: Vec<VarStatus>,
    pub rows: Vec<VarStatus>,
}

impl Basis {
    /// All-logical basis.
    pub fn slack(num_cols: usize, num_rows: usize) -> Self {
        Self {
            cols: vec![VarStatus::AtLower; num_cols],
            rows: vec![VarStatus::Basic; num_rows],
        }
    }

    /// Same basis for a problem with `extra` rows appended; their logicals are basic.
    pub fn with_extra_rows(&self, extra: usize) -> Self {
        let mut rows = self.rows.clone();
        rows.extend(std::iter::repeat_n(VarStatus::Basic, extra));
        Self {
            cols: self.cols.clone(),
            rows,
        }
    }

    /// One character per variable, columns then `/` then rows.
    pub fn to_compact(&self) -> String {
        let mut s: String = self.cols.iter().map(|v| v.code()).collect();
        s.push('/');
        s.extend(self.rows.iter().map(|v| v.code()));
        s
    }

    pub fn from_compact(s: &str) -> Option<Self> {
        let (c, r) = s.trim().split_once('/')?;
        let parse = |t: &str| t.chars().map(VarStatus::from_code).collect::<Option<Vec<_>>>();
        Some(Self {
            cols: parse(c)?,
            rows: parse(r)?,
        })
    }
}

/// Result of an LP solve. Vectors are empty unless the status is optimal.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub status: Status,
    pub primal: Vec<f64>,
    /// Row duals: sensitivity of the optimal objective to each right-hand side.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub basis: Option<Basis>,
}

impl Solution {
    pub fn infeasible(iterations: usize) -> Self {
        Self::terminal(Status::Infeasible, f64::INFINITY, iterations)
    }

    pub fn unbounded(iterations: usize) -> Self {
        Self::terminal(Status::Unbounded, f64::NEG_INFINITY, iterations)
    }

    fn terminal(status: Status, objective: f64, iterations: usize) -> Self {
        Self {
            status,
            primal: Vec::new(),
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            objective,
            iterations,
            basis: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn objective_checked(&self) -> Result<f64, StatusError> {
        match self.status {
            Status::Optimal => Ok(self.objective),
            s => Err(StatusError(s)),
        }
    }
}

/// Contribution `v * bound` of a dual multiplier to the dual objective, choosing
/// the bound by the multiplier sign. A sizeable multiplier against an infinite
/// bound means dual infeasibility; tiny ones fall back to the primal value.
fn bound_term(v: f64, lo: f64, up: f64, primal: f64, tol: f64) -> Option<f64> {
    if v == 0.0 {
        return Some(0.0);
    }
    let bound = if v > 0.0 { lo } else { up };
    if bound.is_finite() {
        Some(v * bound)
    } else if v.abs() <= tol {
        Some(v * primal)
    } else {
        None
    }
}

/// Absolute gap between the primal objective and the dual objective built from
/// `sol.duals` and the implied reduced costs. Returns infinity when the duals
/// are infeasible for the bound structure.
pub fn duality_gap(lp: &LinearProgram, sol: &Solution) -> Result<f64, StatusError> {
    if sol.status != Status::Optimal {
        return Err(StatusError(sol.status));
    }
    let x = &sol.primal;
    let y = &sol.duals;
    let primal_obj = lp.objective_value(x);
    let tol = 1e-7;
    let mut reduced = lp.cost().to_vec();
    for (i, &yi) in y.iter().enumerate() {
        let (cols, vals) = lp.row(i);
        for (&j, &a) in cols.iter().zip(vals) {
            reduced[j] -= a * yi;
        }
    }
    let activity = lp.row_activity(x);
    let mut dual_obj = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let (lo, up) = lp.row_bounds(i);
        match bound_term(yi, lo, up, activity[i], tol) {
            Some(t) => dual_obj += t,
            None => return Ok(f64::INFINITY),
        }
    }
    for (j, &dj) in reduced.iter().enumerate() {
        match bound_term(dj, lp.lower()[j], lp.upper()[j], x[j], tol) {
            Some(t) => dual_obj += t,
            None => return Ok(f64::INFINITY),
        }
    }
    Ok((primal_obj - dual_obj).abs())
}
