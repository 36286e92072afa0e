//! Bounded-variable revised simplex.
//!
//! Every row gets a logical `s_i = -a_i x` so the working system is `[A I] z = 0`
//! with all constraint data carried by bounds. The driver makes the start basis
//! dual feasible (bound flips, then cost shifts), runs the dual simplex to primal
//! feasibility, restores the true costs and finishes with the primal simplex.
//! Pricing is Dantzig in both phases with a switch to Bland's rule after a run
//! of degenerate pivots.

use crate::error::SolveError;
use crate::lu::LuFactor;
use crate::problem::LinearProgram;
use crate::solution::{duality_gap, Basis, Solution, Status, VarStatus};

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Product-form updates between refactorisations.
    pub refactor_interval: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_limit: usize,
    pub pivot_tol: f64,
    pub primal_tol: f64,
    pub dual_tol: f64,
    /// Relative tolerance of the final feasibility and duality-gap certificate.
    pub certify_tol: f64,
    pub scaling: bool,
    /// Small deterministic cost perturbation during the dual phase.
    pub perturb: bool,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2_000_000,
            refactor_interval: 100,
            degenerate_limit: 1000,
            pivot_tol: 1e-9,
            primal_tol: 1e-9,
            dual_tol: 1e-9,
            certify_tol: 1e-7,
            scaling: true,
            perturb: true,
        }
    }
}

/// Solves `lp` from the all-logical basis with default options.
pub fn solve_lp(lp: &LinearProgram) -> Result<Solution, SolveError> {
    solve_with(lp, &SimplexOptions::default(), None)
}

/// Solves `lp`, optionally starting from `warm`. The start basis only affects
/// the pivot path, never the certified optimal objective.
pub fn solve_with(
    lp: &LinearProgram,
    opts: &SimplexOptions,
    warm: Option<&Basis>,
) -> Result<Solution, SolveError> {
    lp.validate()?;
    if let Some(b) = warm {
        let expected = lp.num_cols() + lp.num_rows();
        let got = b.cols.len() + b.rows.len();
        if b.cols.len() != lp.num_cols() || b.rows.len() != lp.num_rows() {
            return Err(SolveError::BasisMismatch { expected, got });
        }
    }
    let mut w = Work::new(lp, opts, warm);
    let status = w.run()?;
    match status {
        Status::Infeasible => Ok(Solution::infeasible(w.iterations)),
        Status::Unbounded => Ok(Solution::unbounded(w.iterations)),
        Status::Optimal => {
            let sol = w.extract(lp);
            certify(lp, &sol, opts.certify_tol)?;
            Ok(sol)
        }
    }
}

fn certify(lp: &LinearProgram, sol: &Solution, tol: f64) -> Result<(), SolveError> {
    let bnorm = lp.rhs().iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let viol = lp.max_violation(&sol.primal);
    if viol > tol * (1.0 + bnorm) {
        return Err(SolveError::NumericalFailure(format!(
            "primal residual {viol:e} exceeds certification bound"
        )));
    }
    let gap = duality_gap(lp, sol).expect("optimal status");
    if gap > tol * (1.0 + sol.objective.abs()) {
        return Err(SolveError::NumericalFailure(format!(
            "duality gap {gap:e} exceeds certification bound"
        )));
    }
    Ok(())
}

/// Largest power of two not above `1 / v`, for exact scaling.
fn pow2_recip(v: f64) -> f64 {
    if v > 0.0 && v.is_finite() {
        (2.0f64).powi(-(v.log2().round() as i32))
    } else {
        1.0
    }
}

/// Deterministic value in [0.5, 1) from an index.
fn jitter(j: usize) -> f64 {
    let mut z = (j as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    0.5 + 0.5 * ((z >> 11) as f64 / (1u64 << 53) as f64)
}

enum LoopEnd {
    Done,
    Infeasible,
    Unbounded,
}

struct Work<'o> {
    opts: &'o SimplexOptions,
    m: usize,
    n: usize,
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    row_start: Vec<usize>,
    row_col: Vec<usize>,
    row_val: Vec<f64>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    base_cost: Vec<f64>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    x: Vec<f64>,
    d: Vec<f64>,
    status: Vec<VarStatus>,
    basic: Vec<usize>,
    slot: Vec<usize>,
    lu: LuFactor,
    iterations: usize,
    degenerate_run: usize,
    bland: bool,
    costs_modified: bool,
    rho: Vec<f64>,
    work_m: Vec<f64>,
    alpha_col: Vec<f64>,
    alpha_row: Vec<f64>,
    touched: Vec<usize>,
    in_touched: Vec<bool>,
}

impl<'o> Work<'o> {
    fn new(lp: &LinearProgram, opts: &'o SimplexOptions, warm: Option<&Basis>) -> Self {
        let m = lp.num_rows();
        let n = lp.num_cols();
        let (col_start, col_row, mut col_val) = lp.to_csc();

        let mut row_scale = vec![1.0; m];
        let mut col_scale = vec![1.0; n];
        if opts.scaling {
            for (i, rs) in row_scale.iter_mut().enumerate() {
                let (_, vals) = lp.row(i);
                *rs = pow2_recip(vals.iter().fold(0.0f64, |a, v| a.max(v.abs())));
            }
            for (j, cs) in col_scale.iter_mut().enumerate() {
                let cmax = (col_start[j]..col_start[j + 1])
                    .map(|e| (col_val[e] * row_scale[col_row[e]]).abs())
                    .fold(0.0f64, f64::max);
                *cs = pow2_recip(cmax);
            }
        }
        for j in 0..n {
            for e in col_start[j]..col_start[j + 1] {
                col_val[e] *= row_scale[col_row[e]] * col_scale[j];
            }
        }
        // Row-wise copy of the scaled matrix for pivot-row products.
        let mut row_start = vec![0usize; m + 1];
        for &i in &col_row {
            row_start[i + 1] += 1;
        }
        for i in 0..m {
            row_start[i + 1] += row_start[i];
        }
        let mut fill = row_start.clone();
        let mut row_col = vec![0usize; col_row.len()];
        let mut row_val = vec![0.0; col_row.len()];
        for j in 0..n {
            for e in col_start[j]..col_start[j + 1] {
                let i = col_row[e];
                row_col[fill[i]] = j;
                row_val[fill[i]] = col_val[e];
                fill[i] += 1;
            }
        }

        let nt = n + m;
        let mut lo = vec![0.0; nt];
        let mut up = vec![0.0; nt];
        let mut base_cost = vec![0.0; nt];
        for j in 0..n {
            lo[j] = lp.lower()[j] / col_scale[j];
            up[j] = lp.upper()[j] / col_scale[j];
            base_cost[j] = lp.cost()[j] * col_scale[j];
        }
        for i in 0..m {
            let (rlo, rup) = lp.row_bounds(i);
            lo[n + i] = -rup * row_scale[i];
            up[n + i] = -rlo * row_scale[i];
        }

        let mut w = Work {
            opts,
            m,
            n,
            col_start,
            col_row,
            col_val,
            row_start,
            row_col,
            row_val,
            row_scale,
            col_scale,
            cost: base_cost.clone(),
            base_cost,
            lo,
            up,
            x: vec![0.0; nt],
            d: vec![0.0; nt],
            status: vec![VarStatus::AtLower; nt],
            basic: Vec::with_capacity(m),
            slot: vec![NONE; nt],
            lu: LuFactor::default(),
            iterations: 0,
            degenerate_run: 0,
            bland: false,
            costs_modified: false,
            rho: vec![0.0; m],
            work_m: vec![0.0; m],
            alpha_col: vec![0.0; m],
            alpha_row: vec![0.0; nt],
            touched: Vec::new(),
            in_touched: vec![false; nt],
        };
        w.install_basis(warm);
        w
    }

    fn install_basis(&mut self, warm: Option<&Basis>) {
        let (n, m) = (self.n, self.m);
        let mut status: Vec<VarStatus> = match warm {
            Some(b) => b.cols.iter().chain(&b.rows).copied().collect(),
            None => {
                let mut s = vec![VarStatus::AtLower; n];
                s.extend(std::iter::repeat_n(VarStatus::Basic, m));
                s
            }
        };
        if status.iter().filter(|&&s| s == VarStatus::Basic).count() != m {
            status = vec![VarStatus::AtLower; n];
            status.extend(std::iter::repeat_n(VarStatus::Basic, m));
        }
        self.basic.clear();
        for (j, s) in status.iter_mut().enumerate() {
            if *s == VarStatus::Basic {
                self.slot[j] = self.basic.len();
                self.basic.push(j);
            } else {
                self.slot[j] = NONE;
                *s = self.admissible(j, *s);
            }
        }
        self.status = status;
        for j in 0..n + m {
            if self.status[j] != VarStatus::Basic {
                self.x[j] = self.nonbasic_value(j);
            }
        }
    }

    /// Nonbasic status compatible with the bounds of `j`, preferring `want`.
    fn admissible(&self, j: usize, want: VarStatus) -> VarStatus {
        let (l, u) = (self.lo[j], self.up[j]);
        match want {
            VarStatus::AtUpper if u.is_finite() => VarStatus::AtUpper,
            VarStatus::AtLower if l.is_finite() => VarStatus::AtLower,
            VarStatus::Zero if !l.is_finite() && !u.is_finite() => VarStatus::Zero,
            _ if l.is_finite() => VarStatus::AtLower,
            _ if u.is_finite() => VarStatus::AtUpper,
            _ => VarStatus::Zero,
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            VarStatus::AtLower => self.lo[j],
            VarStatus::AtUpper => self.up[j],
            _ => 0.0,
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lo[j] == self.up[j]
    }

    fn column(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1])
                .map(|e| (self.col_row[e], self.col_val[e]))
                .collect()
        } else {
            vec![(j - self.n, 1.0)]
        }
    }

    fn scatter(&self, j: usize, dst: &mut [f64], mult: f64) {
        if j < self.n {
            for e in self.col_start[j]..self.col_start[j + 1] {
                dst[self.col_row[e]] += mult * self.col_val[e];
            }
        } else {
            dst[j - self.n] += mult;
        }
    }

    fn dot_col(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1])
                .map(|e| self.col_val[e] * y[self.col_row[e]])
                .sum()
        } else {
            y[j - self.n]
        }
    }

    fn refactor(&mut self) -> Result<(), SolveError> {
        for _attempt in 0..4 {
            let cols: Vec<Vec<(usize, f64)>> = self.basic.iter().map(|&j| self.column(j)).collect();
            match LuFactor::factorize(self.m, &cols) {
                Ok(f) => {
                    self.lu = f;
                    self.compute_primal();
                    self.compute_duals();
                    return Ok(());
                }
                Err(sing) => {
                    for (&s, &r) in sing.slots.iter().zip(&sing.rows) {
                        let old = self.basic[s];
                        let logical = self.n + r;
                        if self.slot[logical] != NONE {
                            continue;
                        }
                        self.slot[old] = NONE;
                        let st = self.admissible(old, VarStatus::AtLower);
                        self.status[old] = st;
                        self.x[old] = self.nonbasic_value(old).max(self.lo[old]).min(self.up[old]);
                        if !self.x[old].is_finite() {
                            self.x[old] = 0.0;
                        }
                        self.basic[s] = logical;
                        self.slot[logical] = s;
                        self.status[logical] = VarStatus::Basic;
                    }
                }
            }
        }
        Err(SolveError::NumericalFailure("basis repair did not yield a nonsingular basis".into()))
    }

    fn compute_primal(&mut self) {
        let m = self.m;
        let mut rhs = std::mem::take(&mut self.work_m);
        rhs.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.n + m {
            if self.status[j] != VarStatus::Basic && self.x[j] != 0.0 {
                self.scatter(j, &mut rhs, -self.x[j]);
            }
        }
        let mut xb = vec![0.0; m];
        self.lu.ftran(&mut rhs, &mut xb);
        for (k, &j) in self.basic.iter().enumerate() {
            self.x[j] = xb[k];
        }
        self.work_m = rhs;
    }

    fn compute_duals(&mut self) {
        let mut cb: Vec<f64> = self.basic.iter().map(|&j| self.cost[j]).collect();
        let mut y = vec![0.0; self.m];
        self.lu.btran(&mut cb, &mut y);
        for j in 0..self.n + self.m {
            self.d[j] = if self.status[j] == VarStatus::Basic {
                0.0
            } else {
                self.cost[j] - self.dot_col(j, &y)
            };
        }
    }

    fn duals_vector(&self) -> Vec<f64> {
        let mut cb: Vec<f64> = self.basic.iter().map(|&j| self.cost[j]).collect();
        let mut y = vec![0.0; self.m];
        self.lu.btran(&mut cb, &mut y);
        y
    }

    fn primal_infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        (self.lo[j] - v).max(v - self.up[j]).max(0.0)
    }

    fn dual_infeasibility(&self, j: usize) -> f64 {
        if self.is_fixed(j) {
            return 0.0;
        }
        let dj = self.d[j];
        match self.status[j] {
            VarStatus::Basic => 0.0,
            VarStatus::AtLower => (-dj).max(0.0),
            VarStatus::AtUpper => dj.max(0.0),
            VarStatus::Zero => dj.abs(),
        }
    }

    fn max_dual_infeasibility(&self) -> f64 {
        (0..self.n + self.m).map(|j| self.dual_infeasibility(j)).fold(0.0, f64::max)
    }

    fn max_primal_infeasibility(&self) -> f64 {
        self.basic.iter().map(|&j| self.primal_infeasibility(j)).fold(0.0, f64::max)
    }

    /// Flips boxed variables and shifts costs so every reduced cost has the right sign.
    fn make_dual_feasible(&mut self) {
        let tol = self.opts.dual_tol;
        let mut flipped = false;
        for j in 0..self.n + self.m {
            if self.status[j] == VarStatus::Basic || self.is_fixed(j) {
                continue;
            }
            let dj = self.d[j];
            let wrong = match self.status[j] {
                VarStatus::AtLower => dj < -tol,
                VarStatus::AtUpper => dj > tol,
                VarStatus::Zero => dj.abs() > tol,
                VarStatus::Basic => false,
            };
            if !wrong {
                continue;
            }
            let (l, u) = (self.lo[j], self.up[j]);
            if self.status[j] == VarStatus::AtLower && u.is_finite() {
                self.status[j] = VarStatus::AtUpper;
                self.x[j] = u;
                flipped = true;
            } else if self.status[j] == VarStatus::AtUpper && l.is_finite() {
                self.status[j] = VarStatus::AtLower;
                self.x[j] = l;
                flipped = true;
            } else {
                self.cost[j] -= dj;
                self.d[j] = 0.0;
                self.costs_modified = true;
            }
        }
        if flipped {
            self.compute_primal();
        }
    }

    fn perturb_costs(&mut self) {
        let tol = self.opts.dual_tol;
        for j in 0..self.n {
            if self.status[j] == VarStatus::Basic || self.is_fixed(j) {
                continue;
            }
            let delta = 1e-7 * (1.0 + self.base_cost[j].abs()) * jitter(j);
            let signed = match self.status[j] {
                VarStatus::AtLower if self.d[j] >= -tol => delta,
                VarStatus::AtUpper if self.d[j] <= tol => -delta,
                _ => continue,
            };
            self.cost[j] += signed;
            self.d[j] += signed;
            self.costs_modified = true;
        }
    }

    fn restore_costs(&mut self) {
        if self.costs_modified {
            self.cost.copy_from_slice(&self.base_cost);
            self.costs_modified = false;
            self.compute_duals();
        }
    }

    fn run(&mut self) -> Result<Status, SolveError> {
        self.refactor()?;
        self.make_dual_feasible();
        if self.opts.perturb {
            self.perturb_costs();
        }
        for _round in 0..6 {
            match self.dual_loop()? {
                LoopEnd::Infeasible => return Ok(Status::Infeasible),
                LoopEnd::Unbounded => unreachable!("dual phase cannot detect unboundedness"),
                LoopEnd::Done => {}
            }
            self.restore_costs();
            match self.primal_loop()? {
                LoopEnd::Unbounded => return Ok(Status::Unbounded),
                LoopEnd::Infeasible => unreachable!("primal phase starts feasible"),
                LoopEnd::Done => {}
            }
            self.refactor()?;
            let ptol = self.opts.primal_tol;
            let dtol = self.opts.dual_tol;
            if self.max_primal_infeasibility() <= ptol && self.max_dual_infeasibility() <= dtol {
                return Ok(Status::Optimal);
            }
            // Numerical drift after the fresh factorisation: make the duals
            // consistent again and repeat both phases.
            self.make_dual_feasible();
        }
        Err(SolveError::NumericalFailure("phases did not converge to a consistent optimum".into()))
    }

    fn check_iterations(&self) -> Result<(), SolveError> {
        if self.iterations >= self.opts.max_iterations {
            Err(SolveError::IterationLimit(self.opts.max_iterations))
        } else {
            Ok(())
        }
    }

    fn note_step(&mut self, step: f64) {
        self.iterations += 1;
        if step.abs() <= 1e-12 {
            self.degenerate_run += 1;
            if self.degenerate_run >= self.opts.degenerate_limit {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
        }
    }

    /// `rho = B^-T e_r` followed by `alpha_row_j = rho' a_j` for all nonbasic `j`.
    fn pivot_row(&mut self, r: usize) {
        let mut e = std::mem::take(&mut self.work_m);
        e.iter_mut().for_each(|v| *v = 0.0);
        e[r] = 1.0;
        let mut rho = std::mem::take(&mut self.rho);
        self.lu.btran(&mut e, &mut rho);
        for &j in &self.touched {
            self.alpha_row[j] = 0.0;
            self.in_touched[j] = false;
        }
        self.touched.clear();
        for (i, &ri) in rho.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            for e in self.row_start[i]..self.row_start[i + 1] {
                let j = self.row_col[e];
                if !self.in_touched[j] {
                    self.in_touched[j] = true;
                    self.touched.push(j);
                }
                self.alpha_row[j] += ri * self.row_val[e];
            }
            let l = self.n + i;
            if !self.in_touched[l] {
                self.in_touched[l] = true;
                self.touched.push(l);
            }
            self.alpha_row[l] += ri;
        }
        self.touched.sort_unstable();
        self.work_m = e;
        self.rho = rho;
    }

    fn ftran_column(&mut self, q: usize) {
        let mut b = std::mem::take(&mut self.work_m);
        b.iter_mut().for_each(|v| *v = 0.0);
        self.scatter(q, &mut b, 1.0);
        let mut a = std::mem::take(&mut self.alpha_col);
        self.lu.ftran(&mut b, &mut a);
        self.work_m = b;
        self.alpha_col = a;
    }

    fn choose_leaving(&self) -> Option<usize> {
        let tol = self.opts.primal_tol;
        if self.bland {
            return (0..self.m)
                .filter(|&k| self.primal_infeasibility(self.basic[k]) > tol)
                .min_by_key(|&k| self.basic[k]);
        }
        let mut best = None;
        let mut best_val = tol;
        for (k, &j) in self.basic.iter().enumerate() {
            let inf = self.primal_infeasibility(j);
            if inf > best_val {
                best_val = inf;
                best = Some(k);
            }
        }
        best
    }

    /// Dual ratio test on the current pivot row; `sgn` is +1 when the leaving
    /// variable drops to its upper bound and -1 for its lower bound.
    fn dual_ratio(&self, sgn: f64) -> Option<usize> {
        let ptol = self.opts.pivot_tol;
        let dtol = self.opts.dual_tol;
        let candidates = self.touched.iter().copied().filter_map(|j| {
            if self.status[j] == VarStatus::Basic || self.is_fixed(j) {
                return None;
            }
            let a = sgn * self.alpha_row[j];
            if a.abs() <= ptol {
                return None;
            }
            let ok = match self.status[j] {
                VarStatus::AtLower => a > 0.0,
                VarStatus::AtUpper => a < 0.0,
                VarStatus::Zero => true,
                VarStatus::Basic => false,
            };
            ok.then_some((j, a))
        });
        if self.bland {
            let mut best: Option<(usize, f64)> = None;
            for (j, a) in candidates {
                let t = (self.d[j] / a).max(0.0);
                match best {
                    Some((_, bt)) if t >= bt - 1e-12 => {}
                    _ => best = Some((j, t)),
                }
            }
            return best.map(|(j, _)| j);
        }
        let cands: Vec<(usize, f64)> = candidates.collect();
        let mut tmax = f64::INFINITY;
        for &(j, a) in &cands {
            let relaxed = if a > 0.0 { (self.d[j] + dtol) / a } else { (self.d[j] - dtol) / a };
            tmax = tmax.min(relaxed);
        }
        if !tmax.is_finite() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for &(j, a) in &cands {
            if self.d[j] / a <= tmax {
                match best {
                    Some((_, ba)) if a.abs() <= ba => {}
                    _ => best = Some((j, a.abs())),
                }
            }
        }
        best.map(|(j, _)| j)
    }

    fn dual_loop(&mut self) -> Result<LoopEnd, SolveError> {
        let mut fresh = true;
        loop {
            if self.lu.num_etas() >= self.opts.refactor_interval {
                self.refactor()?;
                fresh = true;
            }
            self.check_iterations()?;
            let Some(r) = self.choose_leaving() else {
                return Ok(LoopEnd::Done);
            };
            let leaving = self.basic[r];
            let xr = self.x[leaving];
            let (target, sgn) = if xr < self.lo[leaving] {
                (self.lo[leaving], -1.0)
            } else {
                (self.up[leaving], 1.0)
            };
            self.pivot_row(r);
            let Some(q) = self.dual_ratio(sgn) else {
                if !fresh {
                    self.refactor()?;
                    fresh = true;
                    continue;
                }
                return Ok(LoopEnd::Infeasible);
            };
            self.ftran_column(q);
            let a_col = self.alpha_col[r];
            let a_row = self.alpha_row[q];
            if a_col.abs() <= self.opts.pivot_tol
                || (a_col - a_row).abs() > 1e-7 * (1.0 + a_col.abs())
            {
                if !fresh {
                    self.refactor()?;
                    fresh = true;
                    continue;
                }
                if a_col.abs() <= self.opts.pivot_tol {
                    return Err(SolveError::NumericalFailure("vanishing dual pivot".into()));
                }
            }

            // Reduced costs.
            let mut dq = self.d[q];
            if sgn * dq / a_row < 0.0 {
                self.cost[q] -= dq;
                self.costs_modified = true;
                dq = 0.0;
            }
            let theta_d = dq / a_row;
            if theta_d != 0.0 {
                for &j in &self.touched {
                    if self.status[j] != VarStatus::Basic {
                        self.d[j] -= theta_d * self.alpha_row[j];
                    }
                }
            }
            self.d[q] = 0.0;
            self.d[leaving] = -theta_d;

            // Primal values.
            let theta_p = (xr - target) / a_col;
            for k in 0..self.m {
                let a = self.alpha_col[k];
                if a != 0.0 {
                    self.x[self.basic[k]] -= theta_p * a;
                }
            }
            self.x[q] += theta_p;
            self.x[leaving] = target;

            self.swap_basis(r, q, leaving, if sgn < 0.0 { VarStatus::AtLower } else { VarStatus::AtUpper });
            fresh = false;
            self.note_step(theta_d);
        }
    }

    fn swap_basis(&mut self, r: usize, entering: usize, leaving: usize, leave_status: VarStatus) {
        let leave_status = if self.is_fixed(leaving) { VarStatus::AtLower } else { leave_status };
        self.basic[r] = entering;
        self.slot[entering] = r;
        self.status[entering] = VarStatus::Basic;
        self.slot[leaving] = NONE;
        self.status[leaving] = leave_status;
        self.lu.push_eta(r, &self.alpha_col);
    }

    fn choose_entering(&self) -> Option<usize> {
        let tol = self.opts.dual_tol;
        if self.bland {
            return (0..self.n + self.m).find(|&j| self.dual_infeasibility(j) > tol);
        }
        let mut best = None;
        let mut best_val = tol;
        for j in 0..self.n + self.m {
            let v = self.dual_infeasibility(j);
            if v > best_val {
                best_val = v;
                best = Some(j);
            }
        }
        best
    }

    fn primal_loop(&mut self) -> Result<LoopEnd, SolveError> {
        let ptol = self.opts.pivot_tol;
        let ftol = self.opts.primal_tol;
        let mut fresh = false;
        loop {
            if self.lu.num_etas() >= self.opts.refactor_interval {
                self.refactor()?;
                fresh = true;
            }
            self.check_iterations()?;
            let Some(q) = self.choose_entering() else {
                return Ok(LoopEnd::Done);
            };
            let dir = match self.status[q] {
                VarStatus::AtLower => 1.0,
                VarStatus::AtUpper => -1.0,
                _ => {
                    if self.d[q] < 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            self.ftran_column(q);
            let range = self.up[q] - self.lo[q];

            // Harris pass 1: relaxed step bound.
            let mut tmax = f64::INFINITY;
            for k in 0..self.m {
                let a = self.alpha_col[k] * dir;
                if a.abs() <= ptol {
                    continue;
                }
                let b = self.basic[k];
                let bound = if a > 0.0 {
                    (self.x[b] - self.lo[b] + ftol) / a
                } else {
                    (self.up[b] - self.x[b] + ftol) / -a
                };
                if bound.is_finite() {
                    tmax = tmax.min(bound);
                }
            }
            if !tmax.is_finite() && !range.is_finite() {
                if !fresh {
                    self.refactor()?;
                    fresh = true;
                    continue;
                }
                return Ok(LoopEnd::Unbounded);
            }
            // Pass 2: largest pivot among steps within the relaxed bound.
            let mut leave: Option<(usize, f64, f64)> = None;
            if !self.bland {
                for k in 0..self.m {
                    let a = self.alpha_col[k] * dir;
                    if a.abs() <= ptol {
                        continue;
                    }
                    let b = self.basic[k];
                    let t = if a > 0.0 {
                        (self.x[b] - self.lo[b]) / a
                    } else {
                        (self.up[b] - self.x[b]) / -a
                    };
                    if t.is_finite() && t <= tmax {
                        let t = t.max(0.0);
                        match leave {
                            Some((_, _, ba)) if a.abs() <= ba => {}
                            _ => leave = Some((k, t, a.abs())),
                        }
                    }
                }
            } else {
                for k in 0..self.m {
                    let a = self.alpha_col[k] * dir;
                    if a.abs() <= ptol {
                        continue;
                    }
                    let b = self.basic[k];
                    let t = if a > 0.0 {
                        (self.x[b] - self.lo[b]) / a
                    } else {
                        (self.up[b] - self.x[b]) / -a
                    };
                    if !t.is_finite() {
                        continue;
                    }
                    let t = t.max(0.0);
                    match leave {
                        Some((bk, bt, _)) if t > bt + 1e-12 || (t >= bt - 1e-12 && self.basic[bk] < b) => {}
                        _ => leave = Some((k, t, a.abs())),
                    }
                }
            }

            if range.is_finite() && leave.is_none_or(|(_, t, _)| range <= t) {
                // Bound flip of the entering variable.
                for k in 0..self.m {
                    let a = self.alpha_col[k];
                    if a != 0.0 {
                        self.x[self.basic[k]] -= range * dir * a;
                    }
                }
                if dir > 0.0 {
                    self.status[q] = VarStatus::AtUpper;
                    self.x[q] = self.up[q];
                } else {
                    self.status[q] = VarStatus::AtLower;
                    self.x[q] = self.lo[q];
                }
                self.note_step(range);
                continue;
            }
            let (r, t, _) = leave.expect("finite step");
            let leaving = self.basic[r];
            let a_r = self.alpha_col[r] * dir;
            let (target, leave_status) = if a_r > 0.0 {
                (self.lo[leaving], VarStatus::AtLower)
            } else {
                (self.up[leaving], VarStatus::AtUpper)
            };

            self.pivot_row(r);
            let a_row = self.alpha_row[q];
            let a_col = self.alpha_col[r];
            if (a_col - a_row).abs() > 1e-7 * (1.0 + a_col.abs()) && !fresh {
                self.refactor()?;
                fresh = true;
                continue;
            }
            let theta_d = self.d[q] / a_row;
            for &j in &self.touched {
                if self.status[j] != VarStatus::Basic {
                    self.d[j] -= theta_d * self.alpha_row[j];
                }
            }
            self.d[q] = 0.0;
            self.d[leaving] = -theta_d;

            for k in 0..self.m {
                let a = self.alpha_col[k];
                if a != 0.0 {
                    self.x[self.basic[k]] -= t * dir * a;
                }
            }
            self.x[q] += t * dir;
            self.x[leaving] = target;
            self.swap_basis(r, q, leaving, leave_status);
            fresh = false;
            self.note_step(t);
        }
    }

    fn extract(&self, lp: &LinearProgram) -> Solution {
        let n = self.n;
        let y = self.duals_vector();
        let primal: Vec<f64> = (0..n).map(|j| self.x[j] * self.col_scale[j]).collect();
        let duals: Vec<f64> = (0..self.m).map(|i| y[i] * self.row_scale[i]).collect();
        let reduced_costs: Vec<f64> = (0..n)
            .map(|j| if self.status[j] == VarStatus::Basic { 0.0 } else { self.d[j] / self.col_scale[j] })
            .collect();
        let basis = Basis {
            cols: self.status[..n].to_vec(),
            rows: self.status[n..].to_vec(),
        };
        Solution {
            status: Status::Optimal,
            objective: lp.objective_value(&primal),
            primal,
            duals,
            reduced_costs,
            iterations: self.iterations,
            basis: Some(basis),
        }
    }
}
