//! Normalized-Laplacian spectral clustering of points in the plane.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_CLUSTERS: usize = 3;
const KMEANS_RESTARTS: usize = 10;
const KMEANS_MAX_ITER: usize = 300;
const RESEED_ATTEMPTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    /// Cluster of each point, numbered in order of first appearance.
    pub labels: Vec<usize>,
    /// Standardized input points.
    pub embedding: Vec<(f64, f64)>,
    pub seed: u64,
}

impl ClusterModel {
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }
}

fn standardize(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    values
        .iter()
        .map(|v| if sd > 0.0 { (v - mean) / sd } else { 0.0 })
        .collect()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Clusters `points` into `k` groups (2 or 3).
pub fn spectral_cluster(points: &[(f64, f64)], k: usize, seed: u64) -> Result<ClusterModel> {
    if !(2..=MAX_CLUSTERS).contains(&k) {
        return Err(Error::validation("clusters", format!("k must be 2 or 3, got {k}")));
    }
    let n = points.len();
    if n < k {
        return Err(Error::Size(format!("{n} points cannot form {k} clusters")));
    }
    if points.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(Error::validation("points", "non-finite coordinate"));
    }
    if points.iter().all(|p| p == &points[0]) {
        return Err(Error::DegenerateGeometry("all points are identical".into()));
    }

    let xs = standardize(&points.iter().map(|p| p.0).collect::<Vec<_>>());
    let ys = standardize(&points.iter().map(|p| p.1).collect::<Vec<_>>());
    let embedding: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();

    let dist = |i: usize, j: usize| {
        let (a, b) = (embedding[i], embedding[j]);
        ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
    };
    let pairwise: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| dist(i, j))
        .collect();
    let mut sigma = median(pairwise.clone());
    if sigma <= 0.0 {
        // more than half the pairs coincide
        let positive: Vec<f64> = pairwise.into_iter().filter(|d| *d > 0.0).collect();
        sigma = positive.iter().sum::<f64>() / positive.len() as f64;
    }

    let mut w = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = (-dist(i, j).powi(2) / (2.0 * sigma * sigma)).exp();
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|i| {
            let d: f64 = w.row(i).sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut lap = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            lap[(i, j)] -= inv_sqrt_deg[i] * w[(i, j)] * inv_sqrt_deg[j];
        }
    }

    let eig = SymmetricEigen::new(lap);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let r: Vec<f64> = order[..k].iter().map(|&c| eig.eigenvectors[(i, c)]).collect();
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                r.into_iter().map(|v| v / norm).collect()
            } else {
                r
            }
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESEED_ATTEMPTS {
        if let Some(raw) = kmeans(&rows, k, &mut rng) {
            return Ok(ClusterModel {
                k,
                labels: canonical_labels(&raw),
                embedding,
                seed,
            });
        }
    }
    Err(Error::DegenerateGeometry(format!(
        "k-means left a cluster empty after {RESEED_ATTEMPTS} reseeds"
    )))
}

fn canonical_labels(raw: &[usize]) -> Vec<usize> {
    let mut map: Vec<Option<usize>> = vec![None; raw.len().max(1)];
    let mut next = 0;
    raw.iter()
        .map(|&l| {
            *map[l].get_or_insert_with(|| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Best of several k-means++ runs; `None` if the best run left a cluster empty.
fn kmeans(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..KMEANS_RESTARTS {
        let (inertia, labels) = lloyd(rows, plus_plus(rows, k, rng), k);
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, labels));
        }
    }
    let (_, labels) = best?;
    let mut seen = vec![false; k];
    labels.iter().for_each(|&l| seen[l] = true);
    seen.iter().all(|&s| s).then_some(labels)
}

fn plus_plus(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centers = vec![rows[rng.random_range(0..rows.len())].clone()];
    while centers.len() < k {
        let d: Vec<f64> = rows
            .iter()
            .map(|r| centers.iter().map(|c| sq_dist(r, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = d.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random_range(0.0..total);
            let mut chosen = d.len() - 1;
            for (i, di) in d.iter().enumerate() {
                if u < *di {
                    chosen = i;
                    break;
                }
                u -= di;
            }
            chosen
        } else {
            rng.random_range(0..rows.len())
        };
        centers.push(rows[pick].clone());
    }
    centers
}

fn lloyd(rows: &[Vec<f64>], mut centers: Vec<Vec<f64>>, k: usize) -> (f64, Vec<usize>) {
    let dim = rows[0].len();
    let mut labels = vec![usize::MAX; rows.len()];
    for _ in 0..KMEANS_MAX_ITER {
        let mut changed = false;
        for (i, r) in rows.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(r, center);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (r, &l) in rows.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(r) {
                *s += v;
            }
        }
        for c in 0..k {
            // an empty cluster keeps its old center
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    let inertia = rows
        .iter()
        .zip(&labels)
        .map(|(r, &l)| sq_dist(r, &centers[l]))
        .sum();
    (inertia, labels)
}
