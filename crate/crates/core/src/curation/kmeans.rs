//! Seeded k-means with k-means++ initialization.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::CurationError;

pub const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    /// Cluster index of each input vector.
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared distances to the assigned centroid after each
    /// iteration's centroid update.
    pub objective: Vec<f64>,
    pub iterations: usize,
}

impl KMeans {
    pub fn cluster_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.centroids.len()];
        for (i, &c) in self.assignments.iter().enumerate() {
            members[c].push(i);
        }
        members
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.0 {
            best = (d, c);
        }
    }
    best.1
}

fn seed_centroids(vectors: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = vectors.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![vectors[first].clone()];
    let mut dist: Vec<f64> = vectors.iter().map(|v| sq_dist(v, &centroids[0])).collect();

    while centroids.len() < k {
        let total: f64 = dist
            .iter()
            .zip(&chosen)
            .filter(|(_, &c)| !c)
            .map(|(d, _)| *d)
            .sum();
        let pick = if total > 0.0 && total.is_finite() {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for i in (0..n).filter(|&i| !chosen[i] && dist[i] > 0.0) {
                pick = Some(i);
                if target < dist[i] {
                    break;
                }
                target -= dist[i];
            }
            pick.expect("positive total implies a candidate")
        } else {
            // Every remaining point coincides with a centroid.
            let remaining: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            remaining[rng.random_range(0..remaining.len())]
        };
        chosen[pick] = true;
        centroids.push(vectors[pick].clone());
        for (d, v) in dist.iter_mut().zip(vectors) {
            *d = d.min(sq_dist(v, &vectors[pick]));
        }
    }
    centroids
}

fn update_centroids(vectors: &[Vec<f64>], assignments: &[usize], k: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (v, &c) in vectors.iter().zip(assignments) {
        counts[c] += 1;
        for (s, x) in sums[c].iter_mut().zip(v) {
            *s += x;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&counts) {
        for x in s.iter_mut() {
            *x /= n as f64;
        }
    }
    sums
}

/// Gives every empty cluster the point farthest from its centroid in the
/// currently largest cluster. Ties pick the lowest cluster and point index.
fn repair_empty(
    vectors: &[Vec<f64>],
    assignments: &mut [usize],
    centroids: &mut [Vec<f64>],
) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        for &c in assignments.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&n| n == 0) else {
            return;
        };
        let largest = (0..k).fold(0, |best, c| if counts[c] > counts[best] { c } else { best });
        let mut far = (f64::NEG_INFINITY, usize::MAX);
        for (i, v) in vectors.iter().enumerate() {
            if assignments[i] == largest {
                let d = sq_dist(v, &centroids[largest]);
                if d > far.0 {
                    far = (d, i);
                }
            }
        }
        assignments[far.1] = empty;
        centroids[empty] = vectors[far.1].clone();
    }
}

fn objective(vectors: &[Vec<f64>], assignments: &[usize], centroids: &[Vec<f64>]) -> f64 {
    vectors
        .iter()
        .zip(assignments)
        .map(|(v, &c)| sq_dist(v, &centroids[c]))
        .sum()
}

/// Lloyd iterations from a k-means++ seeding until the assignment stops
/// changing or [`MAX_ITERATIONS`] is reached. Deterministic for a seed.
pub fn kmeans(vectors: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeans, CurationError> {
    if k == 0 {
        return Err(CurationError::InvalidK { k, n: vectors.len() });
    }
    if k > vectors.len() {
        return Err(CurationError::InvalidK { k, n: vectors.len() });
    }
    let dim = vectors[0].len();
    if let Some(bad) = vectors.iter().position(|v| v.len() != dim) {
        return Err(CurationError::DimensionMismatch {
            expected: dim,
            found: vectors[bad].len(),
            index: bad,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(vectors, k, &mut rng);
    let mut assignments: Vec<usize> = vec![usize::MAX; vectors.len()];
    let mut trace = Vec::new();
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut next: Vec<usize> = vectors.iter().map(|v| nearest(v, &centroids)).collect();
        repair_empty(vectors, &mut next, &mut centroids);
        let changed = next != assignments;
        assignments = next;
        centroids = update_centroids(vectors, &assignments, k, dim);
        trace.push(objective(vectors, &assignments, &centroids));
        if !changed {
            break;
        }
    }

    Ok(KMeans {
        assignments,
        centroids,
        objective: trace,
        iterations,
    })
}
