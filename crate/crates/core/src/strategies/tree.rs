use std::fmt::Write;

use super::StrategyError;

#[derive(Clone, Debug, PartialEq)]
pub struct LeafStats {
    pub members: Vec<usize>,
    pub mean: Vec<f64>,
    /// Population standard deviation per output.
    pub std: Vec<f64>,
    /// Most frequent training label; lowest label on ties.
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    /// `y[feature] < threshold` goes left, the rest right.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf(LeafStats),
}

/// CART classification tree over the output space.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    parent: Vec<Option<usize>>,
    dim: usize,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// Largest decrease of `n * gini` over all features and midpoints; lowest
/// feature, then lowest threshold, on ties.
fn best_split(y: &[Vec<f64>], labels: &[usize], n_labels: usize, members: &[usize]) -> Option<Candidate> {
    let n = members.len();
    let mut total = vec![0usize; n_labels];
    for &i in members {
        total[labels[i]] += 1;
    }
    let parent = n as f64 * gini(&total, n);
    if parent <= 0.0 {
        return None;
    }
    let dim = y[members[0]].len();
    let mut best: Option<Candidate> = None;
    let mut order = members.to_vec();
    for j in 0..dim {
        order.sort_by(|&a, &b| y[a][j].total_cmp(&y[b][j]).then(a.cmp(&b)));
        let mut left = vec![0usize; n_labels];
        for pos in 0..n - 1 {
            left[labels[order[pos]]] += 1;
            let (lo, hi) = (y[order[pos]][j], y[order[pos + 1]][j]);
            if lo == hi {
                continue;
            }
            let nl = pos + 1;
            let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
            let child = nl as f64 * gini(&left, nl) + (n - nl) as f64 * gini(&right, n - nl);
            let gain = parent - child;
            let mid = 0.5 * (lo + hi);
            let threshold = if mid > lo { mid } else { hi };
            if best.is_none_or(|b| gain > b.gain) {
                best = Some(Candidate { gain, feature: j, threshold });
            }
        }
    }
    best.filter(|b| b.gain > 0.0)
}

fn leaf_stats(y: &[Vec<f64>], labels: &[usize], n_labels: usize, members: Vec<usize>) -> LeafStats {
    let dim = y.first().map_or(0, Vec::len);
    let n = members.len().max(1) as f64;
    let mean: Vec<f64> = (0..dim).map(|j| members.iter().map(|&i| y[i][j]).sum::<f64>() / n).collect();
    let std = (0..dim)
        .map(|j| (members.iter().map(|&i| (y[i][j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt())
        .collect();
    let mut counts = vec![0usize; n_labels];
    for &i in &members {
        counts[labels[i]] += 1;
    }
    let label = (0..n_labels).fold(0, |b, l| if counts[l] > counts[b] { l } else { b });
    LeafStats { members, mean, std, label }
}

/// Grows a tree best-first: the leaf whose best split removes the most
/// weighted Gini impurity is split next, until `max_leaves` leaves or purity.
pub fn fit_tree(y: &[Vec<f64>], labels: &[usize], max_leaves: usize) -> Result<DecisionTree, StrategyError> {
    if y.is_empty() || max_leaves == 0 {
        return Err(StrategyError::DegenerateInput);
    }
    if labels.len() != y.len() {
        return Err(StrategyError::LabelCount(labels.len(), y.len()));
    }
    let n_labels = labels.iter().max().map_or(0, |m| m + 1);
    let root: Vec<usize> = (0..y.len()).collect();
    let mut tree = DecisionTree {
        nodes: vec![Node::Leaf(leaf_stats(y, labels, n_labels, root))],
        parent: vec![None],
        dim: y[0].len(),
    };
    let mut candidates = vec![best_split(y, labels, n_labels, tree.members(0))];
    let mut leaves = 1;
    while leaves < max_leaves {
        let pick = (0..tree.nodes.len())
            .filter_map(|id| candidates[id].map(|c| (id, c)))
            .fold(None::<(usize, Candidate)>, |b, (id, c)| match b {
                Some((_, bc)) if c.gain <= bc.gain => b,
                _ => Some((id, c)),
            });
        let Some((id, c)) = pick else { break };
        let members = tree.members(id).to_vec();
        let (l, r): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&i| y[i][c.feature] < c.threshold);
        let (left, right) = (tree.nodes.len(), tree.nodes.len() + 1);
        candidates[id] = None;
        candidates.push(best_split(y, labels, n_labels, &l));
        candidates.push(best_split(y, labels, n_labels, &r));
        tree.nodes.push(Node::Leaf(leaf_stats(y, labels, n_labels, l)));
        tree.nodes.push(Node::Leaf(leaf_stats(y, labels, n_labels, r)));
        tree.parent.extend([Some(id), Some(id)]);
        tree.nodes[id] = Node::Split { feature: c.feature, threshold: c.threshold, left, right };
        leaves += 1;
    }
    Ok(tree)
}

impl DecisionTree {
    /// A tree from explicit nodes, e.g. a published one; node 0 is the root.
    pub fn from_nodes(nodes: Vec<Node>, dim: usize) -> Self {
        let mut parent = vec![None; nodes.len()];
        for (id, node) in nodes.iter().enumerate() {
            if let Node::Split { left, right, .. } = node {
                parent[*left] = Some(id);
                parent[*right] = Some(id);
            }
        }
        Self { nodes, parent, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Leaf node ids, left to right.
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        let mut out = Vec::new();
        let mut stack = vec![0];
        while let Some(id) = stack.pop() {
            match &self.nodes[id] {
                Node::Split { left, right, .. } => {
                    stack.push(*right);
                    stack.push(*left);
                }
                Node::Leaf(_) => out.push(id),
            }
        }
        out.into_iter()
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves().count()
    }

    pub fn leaf_stats(&self, leaf: usize) -> &LeafStats {
        match &self.nodes[leaf] {
            Node::Leaf(s) => s,
            Node::Split { .. } => panic!("node {leaf} is not a leaf"),
        }
    }

    pub fn members(&self, leaf: usize) -> &[usize] {
        &self.leaf_stats(leaf).members
    }

    /// Leaf reached by `y`.
    pub fn route(&self, y: &[f64]) -> usize {
        let mut id = 0;
        while let Node::Split { feature, threshold, left, right } = &self.nodes[id] {
            id = if y[*feature] < *threshold { *left } else { *right };
        }
        id
    }

    pub fn predict(&self, y: &[f64]) -> usize {
        self.leaf_stats(self.route(y)).label
    }

    pub fn accuracy(&self, y: &[Vec<f64>], labels: &[usize]) -> f64 {
        let hits = y.iter().zip(labels).filter(|(p, &l)| self.predict(p) == l).count();
        hits as f64 / y.len().max(1) as f64
    }

    /// Bounds `(lower, upper)` accumulated along the root path of `leaf`.
    pub fn leaf_box(&self, leaf: usize) -> (Vec<f64>, Vec<f64>) {
        let mut lower = vec![f64::NEG_INFINITY; self.dim];
        let mut upper = vec![f64::INFINITY; self.dim];
        let mut child = leaf;
        while let Some(p) = self.parent[child] {
            if let Node::Split { feature, threshold, left, .. } = &self.nodes[p] {
                if *left == child {
                    upper[*feature] = upper[*feature].min(*threshold);
                } else {
                    lower[*feature] = lower[*feature].max(*threshold);
                }
            }
            child = p;
        }
        (lower, upper)
    }

    /// Graphviz rendering with output `names` on the split nodes.
    pub fn to_dot(&self, names: &[String]) -> String {
        let mut s = String::from("digraph tree {\n  node [shape=box, fontname=\"Helvetica\"];\n");
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Split { feature, threshold, left, right } => {
                    let name = names.get(*feature).map_or("?", String::as_str);
                    let _ = writeln!(s, "  n{id} [label=\"{name} < {threshold:.3}\"];");
                    let _ = writeln!(s, "  n{id} -> n{left} [label=\"yes\"];");
                    let _ = writeln!(s, "  n{id} -> n{right} [label=\"no\"];");
                }
                Node::Leaf(st) => {
                    let _ = writeln!(s, "  n{id} [label=\"leaf {id}\\n{} scenarios\\nlabel {}\", style=rounded];", st.members.len(), st.label);
                }
            }
        }
        s.push_str("}\n");
        s
    }
}
