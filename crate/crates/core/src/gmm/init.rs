//! Semi-supervised k-means++: seed classes anchor their centroids.

use rand::Rng as _;

use super::Supervision;
use crate::error::{Error, Result};
use crate::kmeans::{nearest, sample_weighted};
use crate::points::{sq_dist, Points};
use crate::rng::Rng;

pub const MAX_LLOYD_ITERATIONS: usize = 100;

/// Initial 0-indexed hard labels for every point. Points with
/// `Supervision::Known` keep their label throughout.
pub fn ss_kmeanspp_init(points: &Points, supervision: &[Supervision], k: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    check_supervision(points, supervision, k)?;
    let n = points.len();
    let d = points.dim();

    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (i, s) in supervision.iter().enumerate() {
        if let Supervision::Known(c) = *s {
            counts[c] += 1;
            for (acc, x) in sums[c].iter_mut().zip(points.row(i)) {
                *acc += x;
            }
        }
    }
    let seeded: Vec<bool> = counts.iter().map(|&c| c > 0).collect();
    let mut centers: Vec<Option<Vec<f64>>> = (0..k)
        .map(|c| seeded[c].then(|| sums[c].iter().map(|s| s / counts[c] as f64).collect()))
        .collect();

    let free: Vec<usize> = (0..n).filter(|&i| !matches!(supervision[i], Supervision::Known(_))).collect();
    let mut labels: Vec<usize> = supervision
        .iter()
        .map(|s| match *s {
            Supervision::Known(c) => c,
            Supervision::NotFirst => 1,
            Supervision::Free => 0,
        })
        .collect();
    if free.is_empty() || k == 1 {
        return Ok(labels);
    }

    // D² seeding for components without seeds, among unsupervised points
    let mut dist: Vec<f64> = free
        .iter()
        .map(|&i| {
            centers
                .iter()
                .flatten()
                .map(|c| sq_dist(points.row(i), c))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    for c in 0..k {
        if centers[c].is_some() {
            continue;
        }
        let pick = if dist.iter().all(|x| x.is_infinite()) {
            rng.random_range(0..free.len())
        } else {
            sample_weighted(&dist, rng).unwrap_or_else(|| rng.random_range(0..free.len()))
        };
        let center = points.row(free[pick]).to_vec();
        for (slot, &i) in dist.iter_mut().zip(&free) {
            *slot = slot.min(sq_dist(points.row(i), &center));
        }
        centers[c] = Some(center);
    }
    let mut centers: Vec<Vec<f64>> = centers.into_iter().map(Option::unwrap).collect();

    let mut first = true;
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut changed = first;
        first = false;
        for &i in &free {
            let lo = usize::from(supervision[i] == Supervision::NotFirst);
            let (c, _) = nearest(points.row(i), &centers, lo..k);
            if labels[i] != c {
                labels[i] = c;
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
            for (acc, x) in sums[c].iter_mut().zip(points.row(i)) {
                *acc += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    Ok(labels)
}

/// Best of `restarts` runs of [`ss_kmeanspp_init`] by within-cluster sum of squares.
pub fn ss_kmeanspp_best(
    points: &Points,
    supervision: &[Supervision],
    k: usize,
    restarts: usize,
    rng: &mut Rng,
) -> Result<Vec<usize>> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..restarts.max(1) {
        let labels = ss_kmeanspp_init(points, supervision, k, rng)?;
        let cost = within_cluster_ss(points, &labels, k);
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, labels));
        }
    }
    Ok(best.expect("at least one restart").1)
}

fn within_cluster_ss(points: &Points, labels: &[usize], k: usize) -> f64 {
    let d = points.dim();
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (i, &c) in labels.iter().enumerate() {
        counts[c] += 1;
        for (acc, x) in sums[c].iter_mut().zip(points.row(i)) {
            *acc += x;
        }
    }
    let means: Vec<Vec<f64>> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &n)| s.iter().map(|x| x / n.max(1) as f64).collect())
        .collect();
    labels
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(points.row(i), &means[c]))
        .sum()
}

pub(crate) fn check_supervision(points: &Points, supervision: &[Supervision], k: usize) -> Result<()> {
    if supervision.len() != points.len() {
        return Err(Error::InvalidConfig(format!(
            "{} supervision entries for {} points",
            supervision.len(),
            points.len()
        )));
    }
    if k == 0 || points.dim() == 0 {
        return Err(Error::InvalidConfig("need at least one component and one dimension".into()));
    }
    for s in supervision {
        match *s {
            Supervision::Known(c) if c >= k => {
                return Err(Error::InvalidConfig(format!(
                    "seed class {} exceeds the {k} mixture components",
                    c + 1
                )))
            }
            Supervision::NotFirst if k < 2 => {
                return Err(Error::InvalidConfig(
                    "quasi-seeds need at least two mixture components".into(),
                ))
            }
            _ => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn all_seeds_unchanged() {
        let pts = Points::from_rows(&[vec![0.0], vec![1.0], vec![5.0]]);
        let sup = [Supervision::Known(1), Supervision::Known(0), Supervision::Known(1)];
        assert_eq!(ss_kmeanspp_init(&pts, &sup, 2, &mut rng::seeded(0)).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn single_component() {
        let pts = Points::from_rows(&[vec![0.0], vec![1.0], vec![5.0]]);
        let sup = [Supervision::Free; 3];
        assert_eq!(ss_kmeanspp_init(&pts, &sup, 1, &mut rng::seeded(0)).unwrap(), vec![0; 3]);
    }

    #[test]
    fn too_few_components() {
        let pts = Points::from_rows(&[vec![0.0], vec![1.0]]);
        let sup = [Supervision::Known(2), Supervision::Free];
        assert!(ss_kmeanspp_init(&pts, &sup, 2, &mut rng::seeded(0)).is_err());
    }

    #[test]
    fn quasi_seeds_avoid_first_component() {
        let pts = Points::from_rows(&[vec![0.0], vec![0.1], vec![9.0], vec![0.05]]);
        let sup = [Supervision::Known(0), Supervision::NotFirst, Supervision::Free, Supervision::Free];
        let labels = ss_kmeanspp_init(&pts, &sup, 3, &mut rng::seeded(2)).unwrap();
        assert_eq!(labels[0], 0);
        assert_ne!(labels[1], 0);
        assert_eq!(labels[3], 0);
    }
}
