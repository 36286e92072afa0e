//! Strategies: constraint sets on the outputs of interest, and their
//! discovery from a cloud of scenario-optimal outputs.

mod cluster;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cluster::{adjusted_rand_index, kmeans_cluster, Clustering};
pub use tree::{fit_tree, DecisionTree, LeafStats, Node};

/// Canonical output-group order shared by the bundled model and the builtin strategies.
pub const OUTPUT_GROUPS: [&str; 8] =
    ["Biofuel", "Biomethane", "Hydrogen", "Low-T heat", "High-T heat", "CHP", "Chemicals", "Biochar"];

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("no data points")]
    DegenerateInput,
    #[error("k = {k} is outside 1..={n}")]
    BadK { k: usize, n: usize },
    #[error("{0} labels for {1} points")]
    LabelCount(usize, usize),
    #[error("output group '{0}' is not defined by the model")]
    UnknownGroup(String),
    #[error("strategy '{name}' is invalid: {reason}")]
    Invalid { name: String, reason: String },
    #[error("cannot parse strategies: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum StrategyKind {
    /// `lower <= y` and `y < upper` per output, infinite when absent.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Outputs pinned to these values, TWh/y.
    Fixed(Vec<f64>),
    /// Outputs held at these percentages of the total consumed biomass.
    Share(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    pub name: String,
    pub kind: StrategyKind,
}

impl Strategy {
    pub fn unbounded(name: impl Into<String>, dim: usize) -> Self {
        Self {
            name: name.into(),
            kind: StrategyKind::Box { lower: vec![f64::NEG_INFINITY; dim], upper: vec![f64::INFINITY; dim] },
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            StrategyKind::Box { lower, .. } => lower.len(),
            StrategyKind::Fixed(v) | StrategyKind::Share(v) => v.len(),
        }
    }

    /// Whether `y` satisfies the strategy, with the strict upper bounds of boxes.
    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        match &self.kind {
            StrategyKind::Box { lower, upper } => {
                y.iter().zip(lower.iter().zip(upper)).all(|(&v, (&lo, &up))| v >= lo - tol && v < up)
            }
            StrategyKind::Fixed(target) => y.iter().zip(target).all(|(v, t)| (v - t).abs() <= tol),
            StrategyKind::Share(shares) => {
                let total: f64 = y.iter().sum();
                y.iter().zip(shares).all(|(v, s)| (v - s / 100.0 * total).abs() <= tol)
            }
        }
    }

    pub fn validate(&self) -> Result<(), StrategyError> {
        let fail = |reason: String| Err(StrategyError::Invalid { name: self.name.clone(), reason });
        match &self.kind {
            StrategyKind::Box { lower, upper } => {
                if lower.len() != upper.len() {
                    return fail("bound vectors differ in length".into());
                }
                if let Some(j) = (0..lower.len()).find(|&j| lower[j].is_nan() || upper[j].is_nan() || lower[j] > upper[j]) {
                    return fail(format!("lower bound above upper bound for output {j}"));
                }
            }
            StrategyKind::Fixed(v) => {
                if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return fail("fixed values must be finite and non-negative".into());
                }
            }
            StrategyKind::Share(s) => {
                if s.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return fail("shares must be finite and non-negative".into());
                }
                let total: f64 = s.iter().sum();
                if (total - 100.0).abs() > 1e-9 {
                    return fail(format!("shares sum to {total} %, not 100 %"));
                }
            }
        }
        Ok(())
    }
}

/// Business-as-usual and no-biomass strategies over the output groups `names`.
pub fn builtin_strategies(names: &[String]) -> Result<Vec<Strategy>, StrategyError> {
    let bau = [
        ("Biofuel", 0.3),
        ("Biomethane", 1.4),
        ("Hydrogen", 0.0),
        ("Chemicals", 0.0),
        ("Low-T heat", 7.7),
        ("Biochar", 0.0),
        ("High-T heat", 3.1),
        ("CHP", 6.5),
    ];
    let mut values = vec![0.0; names.len()];
    for (group, v) in bau {
        let j = names.iter().position(|n| n == group).ok_or_else(|| StrategyError::UnknownGroup(group.into()))?;
        values[j] = v;
    }
    Ok(vec![
        Strategy { name: "BAU".into(), kind: StrategyKind::Fixed(values) },
        Strategy { name: "No Biomass".into(), kind: StrategyKind::Fixed(vec![0.0; names.len()]) },
    ])
}

/// One box per leaf: the conjunction of the thresholds on its root path.
pub fn strategies_from_tree(tree: &DecisionTree, names: &[String]) -> Vec<Strategy> {
    let mut taken: Vec<String> = Vec::new();
    tree.leaves()
        .map(|leaf| {
            let (lower, upper) = tree.leaf_box(leaf);
            let stats = tree.leaf_stats(leaf);
            let base = dominant_name(&stats.mean, names);
            let mut name = base.clone();
            let mut k = 2;
            while taken.contains(&name) {
                name = format!("{base} {k}");
                k += 1;
            }
            taken.push(name.clone());
            Strategy { name, kind: StrategyKind::Box { lower, upper } }
        })
        .collect()
}

/// Name of the output with the largest mean; lowest index on ties.
fn dominant_name(mean: &[f64], names: &[String]) -> String {
    let best = (0..mean.len()).fold(0, |b, j| if mean[j] > mean[b] { j } else { b });
    names.get(best).cloned().unwrap_or_else(|| format!("Leaf {best}"))
}

/// Result of [`tighten_open_leaf`].
#[derive(Clone, Debug, PartialEq)]
pub struct Tightened {
    pub strategy: Strategy,
    pub lower_bound: f64,
    /// Fraction of members meeting the new bound.
    pub retained: f64,
}

/// Adds the lower bound `mean - std` (population std over `members`) on output `j`.
pub fn tighten_open_leaf(s: &Strategy, members: &[Vec<f64>], j: usize) -> Result<Tightened, StrategyError> {
    let StrategyKind::Box { lower, upper } = &s.kind else {
        return Err(StrategyError::Invalid { name: s.name.clone(), reason: "only boxes can be tightened".into() });
    };
    if lower[j].is_finite() {
        return Err(StrategyError::Invalid { name: s.name.clone(), reason: format!("output {j} already has a lower bound") });
    }
    if members.is_empty() {
        return Err(StrategyError::DegenerateInput);
    }
    let n = members.len() as f64;
    let mean = members.iter().map(|y| y[j]).sum::<f64>() / n;
    let var = members.iter().map(|y| (y[j] - mean).powi(2)).sum::<f64>() / n;
    // Adding zero folds a -0.0 from the solver into 0.0.
    let bound = mean - var.sqrt() + 0.0;
    let mut lower = lower.clone();
    lower[j] = bound;
    let retained = members.iter().filter(|y| y[j] >= bound).count() as f64 / n;
    Ok(Tightened {
        strategy: Strategy { name: s.name.clone(), kind: StrategyKind::Box { lower, upper: upper.clone() } },
        lower_bound: bound,
        retained,
    })
}

/// A leaf box without any lower bound, i.e. one that contains the origin corner.
pub fn is_open_box(s: &Strategy) -> bool {
    matches!(&s.kind, StrategyKind::Box { lower, .. } if lower.iter().all(|v| !v.is_finite()))
}

/// Clusters, tree and box strategies found in a cloud of optimal outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Identification {
    pub clustering: Clustering,
    pub tree: DecisionTree,
    /// One box per leaf, open leaves already tightened.
    pub strategies: Vec<Strategy>,
    /// `(strategy index, output, result)` for every tightened open leaf.
    pub tightened: Vec<(usize, usize, Tightened)>,
}

/// k-means labels, a tree with at most `max_leaves` leaves fitted to them, and one box
/// per leaf. A leaf without lower bounds would admit doing nothing, so it gets
/// a lower bound on the output its members use most.
pub fn identify_strategies(
    y: &[Vec<f64>],
    names: &[String],
    k: usize,
    max_leaves: usize,
    seed: u64,
) -> Result<Identification, StrategyError> {
    let clustering = kmeans_cluster(y, k, seed)?;
    let tree = fit_tree(y, &clustering.labels, max_leaves)?;
    let mut strategies = strategies_from_tree(&tree, names);
    let mut tightened = Vec::new();
    for (idx, leaf) in tree.leaves().enumerate() {
        if !is_open_box(&strategies[idx]) {
            continue;
        }
        let stats = tree.leaf_stats(leaf);
        let j = (0..stats.mean.len()).fold(0, |b, j| if stats.mean[j] > stats.mean[b] { j } else { b });
        let members: Vec<Vec<f64>> = stats.members.iter().map(|&i| y[i].clone()).collect();
        let t = tighten_open_leaf(&strategies[idx], &members, j)?;
        strategies[idx] = t.strategy.clone();
        tightened.push((idx, j, t));
    }
    Ok(Identification { clustering, tree, strategies, tightened })
}

/// Mean relative allocation of each leaf, in percent of consumed biomass.
pub fn share_strategies_from_leaves(tree: &DecisionTree, y: &[Vec<f64>], names: &[String]) -> Vec<Strategy> {
    tree.leaves()
        .filter_map(|leaf| {
            let dim = y.first().map_or(0, Vec::len);
            let mut shares = vec![0.0; dim];
            let mut counted = 0usize;
            for &i in tree.members(leaf) {
                let total: f64 = y[i].iter().sum();
                if total > 0.0 {
                    shares.iter_mut().zip(&y[i]).for_each(|(s, v)| *s += v / total);
                    counted += 1;
                }
            }
            if counted == 0 {
                return None;
            }
            let sum: f64 = shares.iter().sum();
            shares.iter_mut().for_each(|s| *s *= 100.0 / sum);
            let stats = tree.leaf_stats(leaf);
            Some(Strategy {
                name: format!("{}_avg", dominant_name(&stats.mean, names)),
                kind: StrategyKind::Share(shares),
            })
        })
        .collect()
}

// ---------------------------------------------------------------- persistence

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum KindRepr {
    /// `null` stands for an absent bound.
    Box { lower: Vec<Option<f64>>, upper: Vec<Option<f64>> },
    Fixed { values: Vec<f64> },
    Share { shares: Vec<f64> },
}

// Unknown-field checks do not combine with a flattened enum.
#[derive(Serialize, Deserialize)]
struct StrategyRepr {
    name: String,
    #[serde(flatten)]
    kind: KindRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyFile {
    outputs: Vec<String>,
    strategies: Vec<StrategyRepr>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl From<&Strategy> for StrategyRepr {
    fn from(s: &Strategy) -> Self {
        let kind = match &s.kind {
            StrategyKind::Box { lower, upper } => KindRepr::Box {
                lower: lower.iter().copied().map(finite).collect(),
                upper: upper.iter().copied().map(finite).collect(),
            },
            StrategyKind::Fixed(v) => KindRepr::Fixed { values: v.clone() },
            StrategyKind::Share(v) => KindRepr::Share { shares: v.clone() },
        };
        Self { name: s.name.clone(), kind }
    }
}

impl From<StrategyRepr> for Strategy {
    fn from(r: StrategyRepr) -> Self {
        let kind = match r.kind {
            KindRepr::Box { lower, upper } => StrategyKind::Box {
                lower: lower.into_iter().map(|v| v.unwrap_or(f64::NEG_INFINITY)).collect(),
                upper: upper.into_iter().map(|v| v.unwrap_or(f64::INFINITY)).collect(),
            },
            KindRepr::Fixed { values } => StrategyKind::Fixed(values),
            KindRepr::Share { shares } => StrategyKind::Share(shares),
        };
        Self { name: r.name, kind }
    }
}

/// JSON document listing the output names and the strategies over them.
pub fn strategies_to_json(strategies: &[Strategy], outputs: &[String]) -> String {
    let file = StrategyFile {
        outputs: outputs.to_vec(),
        strategies: strategies.iter().map(StrategyRepr::from).collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serialises") + "\n"
}

/// Parses a strategies document; vectors are re-ordered to `outputs`. Groups
/// missing from the document stay unconstrained (boxes) or zero.
pub fn strategies_from_json(text: &str, outputs: &[String]) -> Result<Vec<Strategy>, StrategyError> {
    let file: StrategyFile = serde_json::from_str(text).map_err(|e| StrategyError::Parse(e.to_string()))?;
    let index: Vec<usize> = file
        .outputs
        .iter()
        .map(|n| outputs.iter().position(|o| o == n).ok_or_else(|| StrategyError::UnknownGroup(n.clone())))
        .collect::<Result<_, _>>()?;
    let reorder = |v: &[f64], fill: f64| {
        let mut out = vec![fill; outputs.len()];
        for (&j, &x) in index.iter().zip(v) {
            out[j] = x;
        }
        out
    };
    file.strategies
        .into_iter()
        .map(|r| {
            let s = Strategy::from(r);
            if s.dim() != file.outputs.len() {
                return Err(StrategyError::Invalid {
                    name: s.name,
                    reason: format!("expected {} values", file.outputs.len()),
                });
            }
            let kind = match &s.kind {
                StrategyKind::Box { lower, upper } => StrategyKind::Box {
                    lower: reorder(lower, f64::NEG_INFINITY),
                    upper: reorder(upper, f64::INFINITY),
                },
                StrategyKind::Fixed(v) => StrategyKind::Fixed(reorder(v, 0.0)),
                StrategyKind::Share(v) => StrategyKind::Share(reorder(v, 0.0)),
            };
            let s = Strategy { name: s.name, kind };
            s.validate()?;
            Ok(s)
        })
        .collect()
}
