use std::collections::HashSet;
use std::fmt;

use crate::error::LpError;

/// Direction of a linear constraint row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// Handle to a column (decision variable) of a [`LinearProgram`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Col(pub usize);

/// Handle to a constraint row of a [`LinearProgram`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Row(pub usize);

/// Minimisation LP `min c'x  s.t.  a_i x (<=,=,>=) b_i,  l <= x <= u`.
///
/// Rows are stored compressed by row; rows can only be appended, which keeps
/// row handles stable when extra constraints are layered on a built model.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    name: String,
    col_names: Vec<String>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    row_names: Vec<String>,
    senses: Vec<Sense>,
    rhs: Vec<f64>,
    row_start: Vec<usize>,
    row_cols: Vec<usize>,
    row_vals: Vec<f64>,
}

impl LinearProgram {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            row_start: vec![0],
            ..Self::default()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn add_col(&mut self, name: impl Into<String>, cost: f64, lower: f64, upper: f64) -> Col {
        self.col_names.push(name.into());
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        Col(self.cost.len() - 1)
    }

    /// Appends a row. Repeated columns are summed and exact zeros dropped.
    pub fn add_row<I>(&mut self, name: impl Into<String>, coeffs: I, sense: Sense, rhs: f64) -> Row
    where
        I: IntoIterator<Item = (Col, f64)>,
    {
        let mut pairs: Vec<(usize, f64)> = coeffs.into_iter().map(|(c, v)| (c.0, v)).collect();
        pairs.sort_by_key(|&(c, _)| c);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for (c, v) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        for (c, v) in merged.into_iter().filter(|&(_, v)| v != 0.0) {
            self.row_cols.push(c);
            self.row_vals.push(v);
        }
        self.row_start.push(self.row_cols.len());
        self.row_names.push(name.into());
        self.senses.push(sense);
        self.rhs.push(rhs);
        Row(self.rhs.len() - 1)
    }

    pub fn num_cols(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.row_cols.len()
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn senses(&self) -> &[Sense] {
        &self.senses
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn col_name(&self, col: Col) -> &str {
        &self.col_names[col.0]
    }

    pub fn row_name(&self, row: Row) -> &str {
        &self.row_names[row.0]
    }

    pub fn col_names(&self) -> &[String] {
        &self.col_names
    }

    pub fn row_names(&self) -> &[String] {
        &self.row_names
    }

    /// Column indices and coefficients of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_start[i], self.row_start[i + 1]);
        (&self.row_cols[s..e], &self.row_vals[s..e])
    }

    pub fn set_cost(&mut self, col: Col, cost: f64) {
        self.cost[col.0] = cost;
    }

    pub fn set_bounds(&mut self, col: Col, lower: f64, upper: f64) {
        self.lower[col.0] = lower;
        self.upper[col.0] = upper;
    }

    pub fn set_rhs(&mut self, row: Row, rhs: f64) {
        self.rhs[row.0] = rhs;
    }

    /// Scales every objective coefficient by `factor`.
    pub fn scale_objective(&mut self, factor: f64) {
        self.cost.iter_mut().for_each(|c| *c *= factor);
    }

    /// Row activities `A x`.
    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        (0..self.num_rows())
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any row or bound by `x` (0 for a feasible point).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .row_activity(x)
            .into_iter()
            .zip(self.senses.iter().zip(&self.rhs))
            .map(|(act, (&sense, &b))| match sense {
                Sense::Le => (act - b).max(0.0),
                Sense::Ge => (b - act).max(0.0),
                Sense::Eq => (act - b).abs(),
            });
        let cols = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| (l - v).max(v - u).max(0.0));
        rows.chain(cols).fold(0.0, f64::max)
    }

    /// Row-bound interval `[lo, up]` implied by sense and right-hand side.
    pub fn row_bounds(&self, i: usize) -> (f64, f64) {
        let b = self.rhs[i];
        match self.senses[i] {
            Sense::Le => (f64::NEG_INFINITY, b),
            Sense::Ge => (b, f64::INFINITY),
            Sense::Eq => (b, b),
        }
    }

    /// Checks dimensions, bound ordering, finiteness and name uniqueness.
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_cols();
        if self.lower.len() != n || self.upper.len() != n || self.col_names.len() != n {
            return Err(LpError::Dimension("column arrays differ in length".into()));
        }
        let m = self.num_rows();
        if self.senses.len() != m || self.row_names.len() != m || self.row_start.len() != m + 1 {
            return Err(LpError::Dimension("row arrays differ in length".into()));
        }
        if let Some(&j) = self.row_cols.iter().find(|&&j| j >= n) {
            return Err(LpError::Dimension(format!("row entry references column {j} of {n}")));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(LpError::InvalidBounds {
                    col: self.col_names[j].clone(),
                    lower: l,
                    upper: u,
                });
            }
            if !self.cost[j].is_finite() {
                return Err(LpError::NonFinite(format!("cost of {}", self.col_names[j])));
            }
        }
        if let Some(i) = (0..m).find(|&i| !self.rhs[i].is_finite()) {
            return Err(LpError::NonFinite(format!("rhs of {}", self.row_names[i])));
        }
        if self.row_vals.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("matrix coefficient".into()));
        }
        let mut seen = HashSet::with_capacity(n);
        if let Some(dup) = self.col_names.iter().find(|s| !seen.insert(s.as_str())) {
            return Err(LpError::DuplicateName(dup.clone()));
        }
        let mut seen = HashSet::with_capacity(m);
        if let Some(dup) = self.row_names.iter().find(|s| !seen.insert(s.as_str())) {
            return Err(LpError::DuplicateName(dup.clone()));
        }
        Ok(())
    }

    /// Column-compressed copy of the constraint matrix: `(col_start, row_idx, values)`.
    pub fn to_csc(&self) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let n = self.num_cols();
        let mut count = vec![0usize; n + 1];
        for &j in &self.row_cols {
            count[j + 1] += 1;
        }
        for j in 0..n {
            count[j + 1] += count[j];
        }
        let start = count.clone();
        let mut fill = count;
        let mut rows = vec![0usize; self.row_cols.len()];
        let mut vals = vec![0.0; self.row_cols.len()];
        for i in 0..self.num_rows() {
            let (cols, v) = self.row(i);
            for (&j, &a) in cols.iter().zip(v) {
                rows[fill[j]] = i;
                vals[fill[j]] = a;
                fill[j] += 1;
            }
        }
        (start, rows, vals)
    }
}
