//! Latin hypercube sampling of the unit hypercube and scenario bookkeeping.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, which
//! gives the same stream on every platform. Each column is an independent
//! random permutation of the strata with one uniform draw inside each stratum.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("sample size and dimension must be positive (got N = {n}, d = {d})")]
    Empty { n: usize, d: usize },
    #[error("{0} names given for {1} parameters")]
    NameCount(usize, usize),
    #[error("malformed scenario file: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `N` points of the unit hypercube `[0, 1)^d`, row-major, with the names of
/// the parameters behind each column.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSet {
    pub seed: u64,
    pub names: Vec<String>,
    points: Vec<f64>,
    n: usize,
    d: usize,
}

impl ScenarioSet {
    /// Wraps an existing matrix; `rows` must all have `names.len()` entries.
    pub fn from_rows(seed: u64, names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self, ScenarioError> {
        let d = names.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(ScenarioError::NameCount(d, bad.len()));
        }
        Ok(Self {
            seed,
            names,
            points: rows.iter().flatten().copied().collect(),
            n: rows.len(),
            d,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.d.max(1)).take(self.n)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, ScenarioError> {
        if names.len() != self.d {
            return Err(ScenarioError::NameCount(names.len(), self.d));
        }
        self.names = names;
        Ok(self)
    }

    /// Same scenarios with parameter columns reordered: column `k` of the
    /// result is column `order[k]` of `self`.
    pub fn select_columns(&self, order: &[usize]) -> Self {
        let rows: Vec<Vec<f64>> = self.rows().map(|r| order.iter().map(|&j| r[j]).collect()).collect();
        let names = order.iter().map(|&j| self.names[j].clone()).collect();
        Self::from_rows(self.seed, names, &rows).expect("consistent widths")
    }

    /// Same parameters with scenarios reordered.
    pub fn select_rows(&self, order: &[usize]) -> Self {
        let rows: Vec<Vec<f64>> = order.iter().map(|&i| self.row(i).to_vec()).collect();
        Self::from_rows(self.seed, self.names.clone(), &rows).expect("consistent widths")
    }

    /// `#seed=<seed>,N=<N>` followed by a header of parameter names and one row per scenario.
    pub fn write_csv(&self, out: impl Write) -> Result<(), ScenarioError> {
        let mut out = out;
        writeln!(out, "#seed={},N={}", self.seed, self.n)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.names)?;
        for row in self.rows() {
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(input: impl BufRead) -> Result<Self, ScenarioError> {
        let mut input = input;
        let mut meta = String::new();
        input.read_line(&mut meta)?;
        let (seed, n) = parse_meta(meta.trim()).ok_or_else(|| ScenarioError::Format(format!("meta line '{}'", meta.trim())))?;
        let mut r = csv::Reader::from_reader(input);
        let names: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::with_capacity(n);
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| ScenarioError::Format(format!("'{s}': {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(ScenarioError::Format(format!("meta line announces {n} rows, found {}", rows.len())));
        }
        Self::from_rows(seed, names, &rows)
    }
}

fn parse_meta(line: &str) -> Option<(u64, usize)> {
    let body = line.strip_prefix('#')?;
    let mut seed = None;
    let mut n = None;
    for part in body.split(',') {
        let (k, v) = part.split_once('=')?;
        match k.trim() {
            "seed" => seed = v.trim().parse().ok(),
            "N" => n = v.trim().parse().ok(),
            _ => {}
        }
    }
    Some((seed?, n?))
}

/// Latin hypercube sample of `n` points in `d` dimensions.
pub fn lhs_sample(d: usize, n: usize, seed: u64) -> Result<ScenarioSet, ScenarioError> {
    if n == 0 || d == 0 {
        return Err(ScenarioError::Empty { n, d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![0.0; n * d];
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..d {
        strata.shuffle(&mut rng);
        for (i, &k) in strata.iter().enumerate() {
            points[i * d + j] = in_stratum(k, n, rng.random::<f64>());
        }
    }
    Ok(ScenarioSet {
        seed,
        names: (0..d).map(|j| format!("u{j}")).collect(),
        points,
        n,
        d,
    })
}

/// `(k + r) / n`, pulled below the stratum's upper edge if rounding reached it.
fn in_stratum(k: usize, n: usize, r: f64) -> f64 {
    let mut u = (k as f64 + r) / n as f64;
    while stratum_of(u, n) > k {
        u = u.next_down();
    }
    u
}

fn stratum_of(u: f64, n: usize) -> usize {
    (u * n as f64).floor() as usize
}

/// True iff every column has exactly one value in each stratum `[k/N, (k+1)/N)`.
pub fn stratification_check(s: &ScenarioSet) -> bool {
    let n = s.len();
    (0..s.dim()).all(|j| {
        let mut seen = vec![false; n];
        s.rows().all(|r| {
            let u = r[j];
            if !(0.0..1.0).contains(&u) {
                return false;
            }
            let k = stratum_of(u, n);
            !std::mem::replace(&mut seen[k], true)
        })
    })
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `sample` and the uniform CDF on `[0, 1]`.
pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            (((i + 1) as f64 / n) - x).max(x - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_never_leaves_the_stratum() {
        let u = in_stratum(2, 3, 1.0 - f64::EPSILON / 2.0);
        assert!(u < 1.0);
        assert_eq!(stratum_of(u, 3), 2);
    }

    #[test]
    fn meta_line_round_trips() {
        assert_eq!(parse_meta("#seed=7,N=12"), Some((7, 12)));
        assert_eq!(parse_meta("seed=7"), None);
    }
}
