//! Adjacency spectral embedding.
//!
//! For a symmetric adjacency matrix `A`, `(AᵀA)^{1/2} = |A|` shares A's
//! eigenvectors with eigenvalues `|λ|`. The embedding keeps the `dim`
//! eigenpairs of largest `|λ|` and returns `X = U |Λ|^{1/2}`, one row per
//! vertex.
//!
//! Negative eigenvalues enter through `|λ|`; downstream Euclidean geometry
//! treats those directions exactly like positive ones. Coordinates are only
//! defined up to column signs (and rotations within repeated eigenvalues), so
//! comparisons should use distances or Gram matrices.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Which eigensolver backs the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Dense up to `dense_threshold` vertices, Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy)]
pub struct EmbedConfig {
    pub solver: Solver,
    pub dense_threshold: usize,
    /// Extra Krylov dimensions beyond the requested count before the first
    /// convergence check.
    pub lanczos_padding: usize,
    /// Relative residual tolerance for Ritz pairs.
    pub tol: f64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            solver: Solver::Auto,
            dense_threshold: 256,
            lanczos_padding: 8,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    coords: DMatrix<f64>,
    singular_values: Vec<f64>,
    eigenvalues: Vec<f64>,
}

impl Embedding {
    /// `n × dim` matrix; row `v` embeds vertex `v`.
    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    /// `|λ|` of the kept eigenpairs, nonincreasing.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Signed eigenvalues in the same order as `singular_values`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.nrows()
    }

    /// The leading `dim` columns, i.e. the embedding at a smaller dimension.
    pub fn truncate(&self, dim: usize) -> Result<Embedding> {
        if dim == 0 || dim > self.dim() {
            return Err(Error::InvalidDimension { dim, n: self.dim() });
        }
        Ok(Embedding {
            coords: self.coords.columns(0, dim).into_owned(),
            singular_values: self.singular_values[..dim].to_vec(),
            eigenvalues: self.eigenvalues[..dim].to_vec(),
        })
    }

    /// Recovers `U = X |Λ|^{-1/2}` for the columns with nonzero singular value.
    pub fn basis(&self) -> DMatrix<f64> {
        let keep: Vec<usize> = (0..self.dim()).filter(|&j| self.singular_values[j] > 0.0).collect();
        DMatrix::from_fn(self.num_vertices(), keep.len(), |i, c| {
            let j = keep[c];
            self.coords[(i, j)] / self.singular_values[j].sqrt()
        })
    }

    /// Row `v` as a vector.
    pub fn point(&self, v: usize) -> DVector<f64> {
        self.coords.row(v).transpose()
    }
}

pub fn adjacency_spectral_embed(g: &Graph, dim: usize) -> Result<Embedding> {
    adjacency_spectral_embed_with(g, dim, &EmbedConfig::default())
}

pub fn adjacency_spectral_embed_with(g: &Graph, dim: usize, config: &EmbedConfig) -> Result<Embedding> {
    let (values, vectors) = top_eigenpairs(g, dim, config)?;
    let singular_values: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let mut coords = vectors;
    for (j, s) in singular_values.iter().enumerate() {
        let scale = s.sqrt();
        coords.column_mut(j).scale_mut(scale);
    }
    Ok(Embedding {
        coords,
        singular_values,
        eigenvalues: values,
    })
}

/// The `count` eigenpairs of largest `|λ|` (ties: larger signed value first,
/// then solver order). Returns signed eigenvalues and an `n × count` matrix of
/// orthonormal eigenvectors.
pub fn top_eigenpairs(g: &Graph, count: usize, config: &EmbedConfig) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = g.num_vertices();
    if count == 0 || count > n {
        return Err(Error::InvalidDimension { dim: count, n });
    }
    let dense = match config.solver {
        Solver::Dense => true,
        Solver::Lanczos => false,
        Solver::Auto => n <= config.dense_threshold,
    };
    if dense || count + config.lanczos_padding >= n {
        dense_top(g, count)
    } else {
        lanczos_top(g, count, config)
    }
}

/// Orders eigen-indices by `(|λ| desc, λ desc)`, stable in solver order.
fn order_by_magnitude(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[b]
            .abs()
            .partial_cmp(&values[a].abs())
            .unwrap()
            .then(values[b].partial_cmp(&values[a]).unwrap())
    });
    idx
}

fn dense_top(g: &Graph, count: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = g.num_vertices();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    let eig = a.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    let order = order_by_magnitude(&values);
    let chosen = &order[..count];
    let vecs = DMatrix::from_fn(n, count, |i, c| eig.eigenvectors[(i, chosen[c])]);
    Ok((chosen.iter().map(|&i| values[i]).collect(), vecs))
}

/// Lanczos with full reorthogonalization; the Krylov space grows until the
/// `count` Ritz pairs of largest magnitude have small residuals.
fn lanczos_top(g: &Graph, count: usize, config: &EmbedConfig) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = g.num_vertices();
    let mut rng = rng::seeded(0x1a2c_3e5f);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];

    let random_unit = |rng: &mut rng::Rng, basis: &[Vec<f64>]| -> Option<Vec<f64>> {
        for _ in 0..8 {
            let mut q: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            orthogonalize(&mut q, basis);
            orthogonalize(&mut q, basis);
            let norm = dot(&q, &q).sqrt();
            if norm > 1e-8 {
                q.iter_mut().for_each(|x| *x /= norm);
                return Some(q);
            }
        }
        None
    };

    let mut q = random_unit(&mut rng, &basis).ok_or_else(|| Error::Eigensolver("no start vector".into()))?;
    let first_check = (count + config.lanczos_padding).min(n);
    let mut next_check = first_check;
    loop {
        g.adjacency_matvec(&q, &mut w);
        let a = dot(&w, &q);
        basis.push(q);
        alpha.push(a);
        orthogonalize(&mut w, &basis);
        orthogonalize(&mut w, &basis);
        let b = dot(&w, &w).sqrt();
        let m = basis.len();

        if m >= next_check || m == n {
            let (ritz_vals, ritz_vecs) = tridiagonal_eigen(&alpha, &beta);
            let order = order_by_magnitude(&ritz_vals);
            let scale = ritz_vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
            let converged = m >= count
                && order[..count]
                    .iter()
                    .all(|&i| (b * ritz_vecs[(m - 1, i)]).abs() <= config.tol * scale);
            if converged || m == n {
                let chosen = &order[..count];
                let mut vecs = DMatrix::<f64>::zeros(n, count);
                for (c, &i) in chosen.iter().enumerate() {
                    for (j, qj) in basis.iter().enumerate() {
                        let s = ritz_vecs[(j, i)];
                        if s != 0.0 {
                            for (r, x) in qj.iter().enumerate() {
                                vecs[(r, c)] += s * x;
                            }
                        }
                    }
                }
                log::debug!("lanczos converged with {m} vectors");
                return Ok((chosen.iter().map(|&i| ritz_vals[i]).collect(), vecs));
            }
            next_check = m + 5;
        }

        if b > 1e-12 * (a.abs() + 1.0) {
            beta.push(b);
            q = w.iter().map(|x| x / b).collect();
        } else {
            // Invariant subspace found; continue from a fresh direction.
            beta.push(0.0);
            q = random_unit(&mut rng, &basis)
                .ok_or_else(|| Error::Eigensolver("Krylov space exhausted".into()))?;
        }
    }
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for q in basis {
        let c = dot(w, q);
        for (x, y) in w.iter_mut().zip(q) {
            *x -= c * y;
        }
    }
}

/// Suggests an embedding dimension from a scree of singular values by the
/// profile-likelihood elbow: for each split `q`, the top `q` values and the
/// rest are modeled as two Gaussians with a pooled variance, and the split
/// with the largest profile log-likelihood wins. Returns `1` for a flat scree.
pub fn scree_elbow(values: &[f64]) -> Result<usize> {
    if values.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "scree elbow needs at least 3 values, got {}",
            values.len()
        )));
    }
    let mut d = values.to_vec();
    d.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let p = d.len();
    if d.iter().all(|&x| x == d[0]) {
        return Ok(1);
    }
    let mut best = (1usize, f64::NEG_INFINITY);
    for q in 1..p {
        let (head, tail) = d.split_at(q);
        let mu1 = head.iter().sum::<f64>() / q as f64;
        let mu2 = tail.iter().sum::<f64>() / (p - q) as f64;
        let ss: f64 = head.iter().map(|x| (x - mu1).powi(2)).sum::<f64>()
            + tail.iter().map(|x| (x - mu2).powi(2)).sum::<f64>();
        let var = ss / p as f64;
        let ll = if var <= 0.0 {
            f64::INFINITY
        } else {
            // profile log-likelihood at the pooled MLE variance
            -0.5 * p as f64 * ((2.0 * std::f64::consts::PI * var).ln() + 1.0)
        };
        if ll > best.1 {
            best = (q, ll);
        }
    }
    Ok(best.0)
}
