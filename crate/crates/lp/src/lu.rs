//! Sparse LU factorisation of a simplex basis with product-form updates.
//!
//! Pivots are chosen by a Markowitz search over count buckets with threshold
//! partial pivoting. Column and row singletons come out first, so the mostly
//! triangular bases of network-like models factor with very little fill.

const NONE: usize = usize::MAX;
const THRESHOLD: f64 = 0.1;
const ABS_PIVOT_TOL: f64 = 1e-11;
const SEARCH_DEPTH: usize = 4;
const ETA_DROP: f64 = 1e-14;

/// Rows and slots that could not be pivoted; the basis is singular.
#[derive(Debug, Clone)]
pub(crate) struct Singular {
    pub slots: Vec<usize>,
    pub rows: Vec<usize>,
}

/// Doubly linked lists of indices keyed by a count.
struct Buckets {
    head: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    key: Vec<usize>,
}

impl Buckets {
    fn new(n: usize, max_key: usize) -> Self {
        Self {
            head: vec![NONE; max_key + 2],
            next: vec![NONE; n],
            prev: vec![NONE; n],
            key: vec![NONE; n],
        }
    }

    fn insert(&mut self, i: usize, k: usize) {
        if k >= self.head.len() {
            self.head.resize(k + 1, NONE);
        }
        self.key[i] = k;
        self.prev[i] = NONE;
        self.next[i] = self.head[k];
        if self.head[k] != NONE {
            self.prev[self.head[k]] = i;
        }
        self.head[k] = i;
    }

    fn remove(&mut self, i: usize) {
        let k = self.key[i];
        if k == NONE {
            return;
        }
        let (p, n) = (self.prev[i], self.next[i]);
        if p != NONE {
            self.next[p] = n;
        } else {
            self.head[k] = n;
        }
        if n != NONE {
            self.prev[n] = p;
        }
        self.key[i] = NONE;
    }

    fn update(&mut self, i: usize, k: usize) {
        if self.key[i] != k && self.key[i] != NONE {
            self.remove(i);
            self.insert(i, k);
        }
    }

    fn first(&self, k: usize) -> usize {
        self.head.get(k).copied().unwrap_or(NONE)
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct LuFactor {
    m: usize,
    prow: Vec<usize>,
    pslot: Vec<usize>,
    piv: Vec<f64>,
    l_start: Vec<usize>,
    l_row: Vec<usize>,
    l_val: Vec<f64>,
    u_start: Vec<usize>,
    u_slot: Vec<usize>,
    u_val: Vec<f64>,
    eta_slot: Vec<usize>,
    eta_piv: Vec<f64>,
    eta_start: Vec<usize>,
    eta_idx: Vec<usize>,
    eta_val: Vec<f64>,
}

impl LuFactor {
    /// Factors the `m x m` matrix whose column `s` has entries `cols[s]` as `(row, value)`.
    pub fn factorize(m: usize, cols: &[Vec<(usize, f64)>]) -> Result<Self, Singular> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        let mut pattern: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (s, col) in cols.iter().enumerate() {
            for &(i, v) in col {
                if v != 0.0 {
                    rows[i].push((s, v));
                    pattern[s].push(i);
                }
            }
        }
        let mut colb = Buckets::new(m, m);
        let mut rowb = Buckets::new(m, m);
        for s in 0..m {
            colb.insert(s, pattern[s].len());
        }
        for i in 0..m {
            rowb.insert(i, rows[i].len());
        }

        let mut f = LuFactor {
            m,
            l_start: vec![0],
            u_start: vec![0],
            eta_start: vec![0],
            ..Default::default()
        };
        let mut row_done = vec![false; m];
        let mut col_done = vec![false; m];
        let mut mark = vec![NONE; m];
        let mut urow: Vec<(usize, f64)> = Vec::new();

        for _ in 0..m {
            let Some((p, s)) = find_pivot(m, &rows, &pattern, &colb, &rowb) else {
                break;
            };
            let piv = value_at(&rows[p], s);
            colb.remove(s);
            rowb.remove(p);
            row_done[p] = true;
            col_done[s] = true;

            urow.clear();
            urow.extend(rows[p].iter().copied().filter(|&(c, _)| c != s));
            for &(c, _) in rows[p].iter() {
                remove_from(&mut pattern[c], p);
                if c != s {
                    colb.update(c, pattern[c].len());
                }
            }
            rows[p] = Vec::new();

            let others = std::mem::take(&mut pattern[s]);
            for i in others {
                let pos = rows[i].iter().position(|&(c, _)| c == s).expect("pattern in sync");
                let a = rows[i].swap_remove(pos).1;
                let mult = a / piv;
                f.l_row.push(i);
                f.l_val.push(mult);
                for (idx, &(c, _)) in rows[i].iter().enumerate() {
                    mark[c] = idx;
                }
                for &(c, pv) in &urow {
                    if mark[c] != NONE {
                        rows[i][mark[c]].1 -= mult * pv;
                    } else {
                        rows[i].push((c, -mult * pv));
                        pattern[c].push(i);
                        colb.update(c, pattern[c].len());
                    }
                }
                for &(c, _) in rows[i].iter() {
                    mark[c] = NONE;
                }
                rowb.update(i, rows[i].len());
            }

            f.prow.push(p);
            f.pslot.push(s);
            f.piv.push(piv);
            f.l_start.push(f.l_row.len());
            for &(c, v) in &urow {
                f.u_slot.push(c);
                f.u_val.push(v);
            }
            f.u_start.push(f.u_slot.len());
        }

        if f.prow.len() < m {
            return Err(Singular {
                slots: (0..m).filter(|&s| !col_done[s]).collect(),
                rows: (0..m).filter(|&i| !row_done[i]).collect(),
            });
        }
        Ok(f)
    }

    pub fn num_etas(&self) -> usize {
        self.eta_slot.len()
    }

    /// Solves `B x = b`. `b` is indexed by row and is overwritten; `x` is indexed by slot.
    pub fn ftran(&self, b: &mut [f64], x: &mut [f64]) {
        for k in 0..self.m {
            let t = b[self.prow[k]];
            if t != 0.0 {
                for e in self.l_start[k]..self.l_start[k + 1] {
                    b[self.l_row[e]] -= self.l_val[e] * t;
                }
            }
        }
        for k in (0..self.m).rev() {
            let mut t = b[self.prow[k]];
            for e in self.u_start[k]..self.u_start[k + 1] {
                t -= self.u_val[e] * x[self.u_slot[e]];
            }
            x[self.pslot[k]] = t / self.piv[k];
        }
        for e in 0..self.eta_slot.len() {
            let r = self.eta_slot[e];
            let xr = x[r] / self.eta_piv[e];
            x[r] = xr;
            if xr != 0.0 {
                for k in self.eta_start[e]..self.eta_start[e + 1] {
                    x[self.eta_idx[k]] -= self.eta_val[k] * xr;
                }
            }
        }
    }

    /// Solves `B' y = c`. `c` is indexed by slot and is overwritten; `y` is indexed by row.
    pub fn btran(&self, c: &mut [f64], y: &mut [f64]) {
        for e in (0..self.eta_slot.len()).rev() {
            let r = self.eta_slot[e];
            let mut t = c[r];
            for k in self.eta_start[e]..self.eta_start[e + 1] {
                t -= self.eta_val[k] * c[self.eta_idx[k]];
            }
            c[r] = t / self.eta_piv[e];
        }
        for k in 0..self.m {
            let z = c[self.pslot[k]] / self.piv[k];
            y[self.prow[k]] = z;
            if z != 0.0 {
                for e in self.u_start[k]..self.u_start[k + 1] {
                    c[self.u_slot[e]] -= self.u_val[e] * z;
                }
            }
        }
        for k in (0..self.m).rev() {
            let mut t = y[self.prow[k]];
            for e in self.l_start[k]..self.l_start[k + 1] {
                t -= self.l_val[e] * y[self.l_row[e]];
            }
            y[self.prow[k]] = t;
        }
    }

    /// Records the replacement of basis slot `r` by a column with `B^-1 a = alpha`.
    pub fn push_eta(&mut self, r: usize, alpha: &[f64]) {
        self.eta_slot.push(r);
        self.eta_piv.push(alpha[r]);
        for (k, &a) in alpha.iter().enumerate() {
            if k != r && a.abs() > ETA_DROP {
                self.eta_idx.push(k);
                self.eta_val.push(a);
            }
        }
        self.eta_start.push(self.eta_idx.len());
    }
}

fn value_at(row: &[(usize, f64)], s: usize) -> f64 {
    row.iter().find(|&&(c, _)| c == s).map_or(0.0, |&(_, v)| v)
}

fn remove_from(list: &mut Vec<usize>, x: usize) {
    if let Some(pos) = list.iter().position(|&v| v == x) {
        list.swap_remove(pos);
    }
}

fn col_max(rows: &[Vec<(usize, f64)>], pattern: &[usize], s: usize) -> f64 {
    pattern
        .iter()
        .map(|&i| value_at(&rows[i], s).abs())
        .fold(0.0, f64::max)
}

fn acceptable(v: f64, cmax: f64) -> bool {
    v.abs() > ABS_PIVOT_TOL && v.abs() >= THRESHOLD * cmax
}

fn find_pivot(
    m: usize,
    rows: &[Vec<(usize, f64)>],
    pattern: &[Vec<usize>],
    colb: &Buckets,
    rowb: &Buckets,
) -> Option<(usize, usize)> {
    // A column singleton eliminates nothing, so it is always stable.
    let s = colb.first(1);
    if s != NONE {
        let i = pattern[s][0];
        if value_at(&rows[i], s).abs() > ABS_PIVOT_TOL {
            return Some((i, s));
        }
    }
    let mut best: Option<(usize, usize)> = None;
    let mut best_cost = usize::MAX;
    let mut searched = 0;
    for cnt in 1..=m {
        let mut s = colb.first(cnt);
        while s != NONE {
            let cmax = col_max(rows, &pattern[s], s);
            for &i in &pattern[s] {
                let v = value_at(&rows[i], s);
                if acceptable(v, cmax) {
                    let cost = (rows[i].len() - 1) * (cnt - 1);
                    if cost < best_cost {
                        best_cost = cost;
                        best = Some((i, s));
                    }
                }
            }
            searched += 1;
            if best.is_some() && (searched >= SEARCH_DEPTH || best_cost <= (cnt - 1) * (cnt - 1)) {
                return best;
            }
            s = colb.next[s];
        }
        let mut i = rowb.first(cnt);
        while i != NONE {
            for &(s, v) in &rows[i] {
                let cmax = col_max(rows, &pattern[s], s);
                if acceptable(v, cmax) {
                    let cost = (cnt - 1) * (pattern[s].len() - 1);
                    if cost < best_cost {
                        best_cost = cost;
                        best = Some((i, s));
                    }
                }
            }
            searched += 1;
            if best.is_some() && (searched >= SEARCH_DEPTH || best_cost <= cnt.saturating_sub(1) * cnt) {
                return best;
            }
            i = rowb.next[i];
        }
        // Every entry not yet examined has row and column count above `cnt`.
        if best.is_some() && best_cost <= cnt * cnt {
            return best;
        }
    }
    best
}
