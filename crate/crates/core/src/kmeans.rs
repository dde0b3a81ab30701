//! Lloyd's k-means with k-means++ seeding and restarts.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::points::{sq_dist, Points};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// 0-indexed cluster per point.
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

/// Best of `restarts` independent k-means++ runs by inertia.
pub fn kmeans(points: &Points, k: usize, restarts: usize, max_iter: usize, rng: &mut Rng) -> Result<KMeansResult> {
    if k == 0 || k > points.len() {
        return Err(Error::InvalidConfig(format!(
            "cannot form {k} clusters from {} points",
            points.len()
        )));
    }
    let mut best: Option<KMeansResult> = None;
    for _ in 0..restarts.max(1) {
        let run = kmeans_once(points, k, max_iter, rng);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.unwrap())
}

/// D² sampling: picks an index with probability proportional to `weights`.
pub(crate) fn sample_weighted(weights: &[f64], rng: &mut Rng) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut target = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if target < w {
            return Some(i);
        }
        target -= w;
    }
    weights.iter().rposition(|&w| w > 0.0)
}

fn kmeanspp_centers(points: &Points, k: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = vec![points.row(rng.random_range(0..n)).to_vec()];
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), &centers[0])).collect();
    while centers.len() < k {
        // coincident points leave zero mass; fall back to a uniform pick
        let idx = sample_weighted(&dist, rng).unwrap_or_else(|| rng.random_range(0..n));
        let c = points.row(idx).to_vec();
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(sq_dist(points.row(i), &c));
        }
        centers.push(c);
    }
    centers
}

pub(crate) fn nearest(x: &[f64], centers: &[Vec<f64>], allowed: impl Iterator<Item = usize>) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for c in allowed {
        let d = sq_dist(x, &centers[c]);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn kmeans_once(points: &Points, k: usize, max_iter: usize, rng: &mut Rng) -> KMeansResult {
    let n = points.len();
    let d = points.dim();
    let mut centers = kmeanspp_centers(points, k, rng);
    let mut labels = vec![usize::MAX; n];
    for _ in 0..max_iter.max(1) {
        let mut changed = false;
        for (i, label) in labels.iter_mut().enumerate() {
            let (c, _) = nearest(points.row(i), &centers, 0..k);
            if *label != c {
                *label = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(points.row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    let inertia = labels
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(points.row(i), &centers[c]))
        .sum();
    KMeansResult {
        labels,
        centroids: centers,
        inertia,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn separates_two_clouds() {
        let mut rows = Vec::new();
        for i in 0..20 {
            let jitter = (i as f64) * 0.01;
            rows.push(vec![jitter, 0.0]);
            rows.push(vec![10.0 + jitter, 10.0]);
        }
        let pts = Points::from_rows(&rows);
        let res = kmeans(&pts, 2, 5, 100, &mut rng::seeded(1)).unwrap();
        for i in (0..40).step_by(2) {
            assert_eq!(res.labels[i], res.labels[0]);
            assert_ne!(res.labels[i + 1], res.labels[0]);
        }
    }

    #[test]
    fn single_cluster_is_global_mean() {
        let pts = Points::from_rows(&[vec![0.0], vec![2.0], vec![4.0]]);
        let res = kmeans(&pts, 1, 1, 10, &mut rng::seeded(0)).unwrap();
        assert_eq!(res.centroids[0], vec![2.0]);
        assert_eq!(res.inertia, 8.0);
    }

    #[test]
    fn rejects_too_many_clusters() {
        let pts = Points::from_rows(&[vec![0.0]]);
        assert!(kmeans(&pts, 2, 1, 10, &mut rng::seeded(0)).is_err());
    }
}
