use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::StrategyError;

const RESTARTS: usize = 10;
const MAX_SWEEPS: usize = 1000;
const TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Index of the nearest centroid; lowest index on ties.
fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, mu) in centroids.iter().enumerate() {
        let d = dist2(p, mu);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// k-means++ seeding: the first centre uniformly, the rest with probability
/// proportional to the squared distance to the closest chosen centre.
fn seed_centroids(y: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = y.len();
    let mut centroids = vec![y[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = y.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if acc > target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.push(y[pick].clone());
        for (d, p) in d2.iter_mut().zip(y) {
            *d = d.min(dist2(p, &centroids[centroids.len() - 1]));
        }
    }
    centroids
}

fn lloyd(y: &[Vec<f64>], mut centroids: Vec<Vec<f64>>) -> Clustering {
    let k = centroids.len();
    let dim = y[0].len();
    let mut labels = vec![0; y.len()];
    let mut inertia = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let mut total = 0.0;
        for (l, p) in labels.iter_mut().zip(y) {
            let (c, d) = nearest(p, &centroids);
            *l = c;
            total += d;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&l, p) in labels.iter().zip(y) {
            counts[l] += 1;
            sums[l].iter_mut().zip(p).for_each(|(s, v)| *s += v);
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else {
                // Re-seed an empty cluster at the point worst served by its centre.
                let far = (0..y.len())
                    .max_by(|&a, &b| dist2(&y[a], &centroids[labels[a]]).total_cmp(&dist2(&y[b], &centroids[labels[b]])).then(b.cmp(&a)))
                    .expect("nonempty");
                centroids[c] = y[far].clone();
            }
        }
        let converged = (inertia - total).abs() < TOLERANCE;
        inertia = total;
        if converged {
            break;
        }
    }
    // Final assignment against the final centroids.
    inertia = 0.0;
    for (l, p) in labels.iter_mut().zip(y) {
        let (c, d) = nearest(p, &centroids);
        *l = c;
        inertia += d;
    }
    Clustering { labels, centroids, inertia }
}

/// Best of ten seeded k-means++ / Lloyd runs on raw Euclidean distances.
/// Labels are renumbered by first appearance so equal partitions compare equal.
pub fn kmeans_cluster(y: &[Vec<f64>], k: usize, seed: u64) -> Result<Clustering, StrategyError> {
    if y.is_empty() {
        return Err(StrategyError::DegenerateInput);
    }
    if k == 0 || k > y.len() {
        return Err(StrategyError::BadK { k, n: y.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Clustering> = None;
    for _ in 0..RESTARTS {
        let run = lloyd(y, seed_centroids(y, k, &mut rng));
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(canonical(best.expect("at least one restart")))
}

fn canonical(c: Clustering) -> Clustering {
    let k = c.centroids.len();
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    for &l in &c.labels {
        if map[l] == usize::MAX {
            map[l] = next;
            next += 1;
        }
    }
    for m in map.iter_mut().filter(|m| **m == usize::MAX) {
        *m = next;
        next += 1;
    }
    let mut centroids = vec![Vec::new(); k];
    for (old, mu) in c.centroids.into_iter().enumerate() {
        centroids[map[old]] = mu;
    }
    Clustering { labels: c.labels.iter().map(|&l| map[l]).collect(), centroids, inertia: c.inertia }
}

/// Adjusted Rand index between two labelings of the same points.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64, StrategyError> {
    if a.len() != b.len() {
        return Err(StrategyError::LabelCount(a.len(), b.len()));
    }
    let n = a.len();
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let pairs = |m: u64| (m * m.saturating_sub(1) / 2) as f64;
    let index: f64 = table.iter().flatten().map(|&m| pairs(m)).sum();
    let rows: f64 = table.iter().map(|r| pairs(r.iter().sum())).sum();
    let cols: f64 = (0..kb).map(|j| pairs(table.iter().map(|r| r[j]).sum())).sum();
    let total = pairs(n as u64);
    let expected = if total > 0.0 { rows * cols / total } else { 0.0 };
    let max = 0.5 * (rows + cols);
    if max == expected {
        // Both labelings trivial in the same way.
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}
