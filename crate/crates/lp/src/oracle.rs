//! Brute-force reference solver for tiny LPs.
//!
//! Every vertex of `{x : rows, bounds}` is the solution of `n` linearly
//! independent active constraints, so enumerating all such subsets with dense
//! Gaussian elimination finds the optimum of any bounded, feasible, pointed
//! problem. Unboundedness is decided from the extreme rays of the recession
//! cone, each of which is the null space of `n - 1` independent cone facets.

use crate::error::OracleError;
use crate::problem::{LinearProgram, Sense};
use crate::solution::{Solution, Status};

pub const MAX_COLS: usize = 10;
pub const MAX_ROWS: usize = 20;

const FEAS_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-10;

/// One hyperplane `g' x = h` and how the inequality `g' x ? h` must hold.
#[derive(Clone, Debug)]
struct Facet {
    g: Vec<f64>,
    h: f64,
    sense: Sense,
}

impl Facet {
    fn satisfied(&self, x: &[f64]) -> bool {
        let act: f64 = self.g.iter().zip(x).map(|(a, b)| a * b).sum();
        let tol = FEAS_TOL * (1.0 + self.h.abs());
        match self.sense {
            Sense::Le => act <= self.h + tol,
            Sense::Ge => act >= self.h - tol,
            Sense::Eq => (act - self.h).abs() <= tol,
        }
    }

    /// Recession-cone version: same normal, zero right-hand side.
    fn cone_satisfied(&self, r: &[f64]) -> bool {
        let act: f64 = self.g.iter().zip(r).map(|(a, b)| a * b).sum();
        match self.sense {
            Sense::Le => act <= FEAS_TOL,
            Sense::Ge => act >= -FEAS_TOL,
            Sense::Eq => act.abs() <= FEAS_TOL,
        }
    }
}

fn facets(lp: &LinearProgram) -> Vec<Facet> {
    let n = lp.num_cols();
    let mut out = Vec::new();
    for i in 0..lp.num_rows() {
        let mut g = vec![0.0; n];
        let (cols, vals) = lp.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            g[j] = v;
        }
        out.push(Facet {
            g,
            h: lp.rhs()[i],
            sense: lp.senses()[i],
        });
    }
    for j in 0..n {
        let unit = |j: usize| {
            let mut g = vec![0.0; n];
            g[j] = 1.0;
            g
        };
        let (l, u) = (lp.lower()[j], lp.upper()[j]);
        if l.is_finite() && l == u {
            out.push(Facet { g: unit(j), h: l, sense: Sense::Eq });
            continue;
        }
        if l.is_finite() {
            out.push(Facet { g: unit(j), h: l, sense: Sense::Ge });
        }
        if u.is_finite() {
            out.push(Facet { g: unit(j), h: u, sense: Sense::Le });
        }
    }
    out
}

/// Solves the square system `a x = b` by Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < SINGULAR_TOL {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for c in k..n {
                    a[i][c] -= f * a[k][c];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| a[k][c] * x[c]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// Rank of a set of row vectors.
fn rank(rows: &[Vec<f64>]) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            break;
        };
        if a[p][c].abs() < SINGULAR_TOL {
            continue;
        }
        a.swap(r, p);
        for i in r + 1..a.len() {
            let f = a[i][c] / a[r][c];
            for k in c..cols {
                a[i][k] -= f * a[r][k];
            }
        }
        r += 1;
    }
    r
}

/// Unit vector spanning the null space of `n - 1` rows in `R^n`, if it is one-dimensional.
fn null_direction(rows: &[&[f64]], n: usize) -> Option<Vec<f64>> {
    if n == 1 {
        return Some(vec![1.0]);
    }
    // Fix each coordinate to 1 in turn and solve for the rest.
    for fixed in 0..n {
        let others: Vec<usize> = (0..n).filter(|&c| c != fixed).collect();
        let a: Vec<Vec<f64>> = rows.iter().map(|r| others.iter().map(|&c| r[c]).collect()).collect();
        let b: Vec<f64> = rows.iter().map(|r| -r[fixed]).collect();
        if let Some(sol) = solve_dense(a, b) {
            let mut v = vec![0.0; n];
            v[fixed] = 1.0;
            for (k, &c) in others.iter().enumerate() {
                v[c] = sol[k];
            }
            let norm = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            return Some(v.into_iter().map(|x| x / norm).collect());
        }
    }
    None
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact optimum of a small LP by enumerating every basic solution.
///
/// Rows are limited to [`MAX_ROWS`] and columns to [`MAX_COLS`]. The returned
/// solution carries primal values and objective only; duals are left empty.
pub fn vertex_enumeration_oracle(lp: &LinearProgram) -> Result<Solution, OracleError> {
    lp.validate()?;
    let (n, m) = (lp.num_cols(), lp.num_rows());
    if n > MAX_COLS || m > MAX_ROWS {
        return Err(OracleError::TooLarge {
            cols: n,
            rows: m,
            max_cols: MAX_COLS,
            max_rows: MAX_ROWS,
        });
    }
    let fs = facets(lp);
    let cost = lp.cost();
    if n == 0 {
        let feasible = fs.iter().all(|f| f.satisfied(&[]));
        return Ok(if feasible { optimal(Vec::new(), 0.0) } else { Solution::infeasible(0) });
    }
    let normals: Vec<Vec<f64>> = fs.iter().map(|f| f.g.clone()).collect();
    if rank(&normals) < n {
        return Err(OracleError::NoVertex);
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for_each_subset(fs.len(), n, |subset| {
        let a: Vec<Vec<f64>> = subset.iter().map(|&k| fs[k].g.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&k| fs[k].h).collect();
        let Some(x) = solve_dense(a, b) else { return };
        if !fs.iter().all(|f| f.satisfied(&x)) {
            return;
        }
        let obj: f64 = cost.iter().zip(&x).map(|(c, v)| c * v).sum();
        if best.as_ref().is_none_or(|(bo, _)| obj < *bo) {
            best = Some((obj, x));
        }
    });
    let Some((obj, x)) = best else {
        return Ok(Solution::infeasible(0));
    };

    let mut unbounded = false;
    for_each_subset(fs.len(), n - 1, |subset| {
        if unbounded {
            return;
        }
        let rows: Vec<&[f64]> = subset.iter().map(|&k| fs[k].g.as_slice()).collect();
        if n > 1 && rank(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()) < n - 1 {
            return;
        }
        let Some(dir) = null_direction(&rows, n) else { return };
        for sign in [1.0, -1.0] {
            let r: Vec<f64> = dir.iter().map(|v| v * sign).collect();
            let slope: f64 = cost.iter().zip(&r).map(|(c, v)| c * v).sum();
            if slope < -FEAS_TOL && fs.iter().all(|f| f.cone_satisfied(&r)) {
                unbounded = true;
                return;
            }
        }
    });
    if unbounded {
        return Ok(Solution::unbounded(0));
    }
    Ok(optimal(x, obj))
}

fn optimal(x: Vec<f64>, obj: f64) -> Solution {
    Solution {
        status: Status::Optimal,
        primal: x,
        duals: Vec::new(),
        reduced_costs: Vec::new(),
        objective: obj,
        iterations: 0,
        basis: None,
    }
}
