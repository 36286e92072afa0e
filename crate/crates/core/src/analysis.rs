//! Regret statistics: cumulative curves, value at risk, summary rows,
//! correlations with the uncertain parameters and binned decision maps.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("no values")]
    EmptyInput,
    #[error("{0}")]
    Domain(String),
    #[error("lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Points `(r_(k), 100 k / N)` of the empirical CDF, ascending in regret.
pub fn cumulative_curve(regrets: &[f64]) -> Result<Vec<(f64, f64)>, AnalysisError> {
    if regrets.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let n = regrets.len() as f64;
    Ok(sorted(regrets).into_iter().enumerate().map(|(k, r)| (r, 100.0 * (k + 1) as f64 / n)).collect())
}

/// Share of scenarios at exactly the lowest regret, read where the curve leaves the axis.
pub fn curve_intercept(curve: &[(f64, f64)]) -> f64 {
    let first = curve.first().map_or(0.0, |p| p.0);
    curve.iter().take_while(|p| p.0 == first).last().map_or(0.0, |p| p.1)
}

/// Regret of the first curve point at or above height `alpha`.
pub fn curve_quantile(curve: &[(f64, f64)], alpha: f64) -> Option<f64> {
    let n = curve.len();
    let k = rank(alpha, n);
    curve.get(k - 1).map(|p| p.0)
}

/// Smallest `k >= 1` with `k / n >= alpha / 100`.
fn rank(alpha: f64, n: usize) -> usize {
    let target = alpha * n as f64;
    let mut k = (target / 100.0).ceil().max(0.0) as usize;
    while k > 0 && (k - 1) as f64 * 100.0 >= target {
        k -= 1;
    }
    while (k as f64) * 100.0 < target {
        k += 1;
    }
    k.clamp(1, n.max(1))
}

/// Lower empirical quantile: the smallest `v` with `|{r <= v}| / N >= alpha / 100`.
pub fn value_at_risk(regrets: &[f64], alpha: f64) -> Result<f64, AnalysisError> {
    if !(0.0..=100.0).contains(&alpha) {
        return Err(AnalysisError::Domain(format!("confidence level {alpha} outside [0, 100]")));
    }
    if regrets.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let v = sorted(regrets);
    Ok(v[rank(alpha, v.len()) - 1])
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub strategy: String,
    /// Percentage of scenarios in which the strategy is optimal.
    pub optimal_share: f64,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    /// `(alpha, VaR_alpha)` for each requested level.
    pub var: Vec<(f64, f64)>,
}

/// Summary of one row of regrets; `optimal[i]` flags a regret within tolerance of zero.
pub fn summarise(strategy: &str, regrets: &[f64], optimal: &[bool], levels: &[f64]) -> Result<SummaryRow, AnalysisError> {
    if regrets.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    if optimal.len() != regrets.len() {
        return Err(AnalysisError::LengthMismatch(optimal.len(), regrets.len()));
    }
    let n = regrets.len() as f64;
    let var = levels.iter().map(|&a| value_at_risk(regrets, a).map(|v| (a, v))).collect::<Result<_, _>>()?;
    Ok(SummaryRow {
        strategy: strategy.to_string(),
        optimal_share: 100.0 * optimal.iter().filter(|&&o| o).count() as f64 / n,
        min: value_at_risk(regrets, 0.0)?,
        mean: regrets.iter().sum::<f64>() / n,
        max: value_at_risk(regrets, 100.0)?,
        var,
    })
}

/// Product-moment correlation; `None` when either variance vanishes.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<Option<f64>, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(AnalysisError::Domain("correlation needs at least two points".into()));
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)))
}

/// Parameter indices by descending mean absolute correlation over the
/// strategies (`corr[strategy][param]`), undefined entries counting as zero;
/// ties keep declaration order.
pub fn top_influential_params(corr: &[Vec<Option<f64>>], m: usize) -> Vec<usize> {
    let params = corr.first().map_or(0, Vec::len);
    let rows = corr.len().max(1) as f64;
    let score: Vec<f64> =
        (0..params).map(|p| corr.iter().map(|r| r[p].unwrap_or(0.0).abs()).sum::<f64>() / rows).collect();
    let mut order: Vec<usize> = (0..params).collect();
    order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
    order.truncate(m);
    order
}

/// Equal-width bins over the sampled range of `values`; the maximum falls in the last bin.
pub fn bin_indices(values: &[f64], n: usize) -> (Vec<usize>, f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / n as f64;
    let idx = values
        .iter()
        .map(|&v| if width > 0.0 { (((v - lo) / width).floor() as usize).min(n - 1) } else { 0 })
        .collect();
    (idx, lo, hi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapCell {
    pub count: usize,
    /// Mean regret of each strategy over the member scenarios; NaN when empty.
    pub mean_regret: Vec<f64>,
    /// Strategy with the lowest mean regret; `None` for an empty cell.
    pub winner: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionMapGrid {
    pub params: (usize, usize),
    pub n: usize,
    /// Sampled ranges of the two parameters.
    pub range_i: (f64, f64),
    pub range_j: (f64, f64),
    /// `cells[bi * n + bj]`.
    pub cells: Vec<MapCell>,
}

impl DecisionMapGrid {
    pub fn cell(&self, bi: usize, bj: usize) -> &MapCell {
        &self.cells[bi * self.n + bj]
    }
}

/// Winner map over the `n x n` grid of parameters `i` and `j`.
/// `regrets[s][k]` is strategy `s` in scenario `k`; `params[p][k]` parameter `p`.
pub fn decision_map(
    regrets: &[Vec<f64>],
    params: &[Vec<f64>],
    i: usize,
    j: usize,
    n: usize,
) -> Result<DecisionMapGrid, AnalysisError> {
    if i == j {
        return Err(AnalysisError::Domain("decision map needs two distinct parameters".into()));
    }
    if n == 0 {
        return Err(AnalysisError::Domain("decision map needs at least one bin".into()));
    }
    let (pi, pj) = match (params.get(i), params.get(j)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(AnalysisError::Domain(format!("parameter index out of range ({i}, {j})"))),
    };
    let scenarios = pi.len();
    if pj.len() != scenarios {
        return Err(AnalysisError::LengthMismatch(pi.len(), pj.len()));
    }
    if let Some(r) = regrets.iter().find(|r| r.len() != scenarios) {
        return Err(AnalysisError::LengthMismatch(r.len(), scenarios));
    }
    let (bi, lo_i, hi_i) = bin_indices(pi, n);
    let (bj, lo_j, hi_j) = bin_indices(pj, n);
    let strategies = regrets.len();
    let mut sums = vec![vec![0.0; strategies]; n * n];
    let mut counts = vec![0usize; n * n];
    for k in 0..scenarios {
        let c = bi[k] * n + bj[k];
        counts[c] += 1;
        for s in 0..strategies {
            sums[c][s] += regrets[s][k];
        }
    }
    let cells = sums
        .into_iter()
        .zip(counts)
        .map(|(sum, count)| {
            let mean_regret: Vec<f64> = sum.iter().map(|s| if count > 0 { s / count as f64 } else { f64::NAN }).collect();
            let winner = (count > 0 && strategies > 0).then(|| {
                (0..strategies).fold(0, |b, s| if mean_regret[s] < mean_regret[b] { s } else { b })
            });
            MapCell { count, mean_regret, winner }
        })
        .collect();
    Ok(DecisionMapGrid { params: (i, j), n, range_i: (lo_i, hi_i), range_j: (lo_j, hi_j), cells })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileBin {
    pub count: usize,
    /// NaN for an empty bin.
    pub mean: f64,
    /// Standard error of the mean with the population std; 0 for a single member.
    pub sem: f64,
    /// Fewer than two members.
    pub low_count: bool,
}

/// Mean regret and its standard error in `n` equal-width bins of `param`.
pub fn marginal_regret_profile(regrets: &[f64], param: &[f64], n: usize) -> Result<Vec<ProfileBin>, AnalysisError> {
    if regrets.len() != param.len() {
        return Err(AnalysisError::LengthMismatch(regrets.len(), param.len()));
    }
    if n == 0 {
        return Err(AnalysisError::Domain("profile needs at least one bin".into()));
    }
    let (idx, _, _) = bin_indices(param, n);
    let mut members = vec![Vec::new(); n];
    for (&b, &r) in idx.iter().zip(regrets) {
        members[b].push(r);
    }
    Ok(members
        .into_iter()
        .map(|m| {
            let count = m.len();
            if count == 0 {
                return ProfileBin { count, mean: f64::NAN, sem: f64::NAN, low_count: true };
            }
            let c = count as f64;
            let mean = m.iter().sum::<f64>() / c;
            let std = (m.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / c).sqrt();
            ProfileBin { count, mean, sem: std / c.sqrt(), low_count: count < 2 }
        })
        .collect())
}
