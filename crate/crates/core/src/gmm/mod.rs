//! Semi-supervised Gaussian mixtures: EM with seed-anchored components,
//! constrained covariance families and BIC′ model selection.

mod covariance;
mod init;

pub use covariance::{parse_catalogue, CovarianceModel};
pub use init::{ss_kmeanspp_best, ss_kmeanspp_init, MAX_LLOYD_ITERATIONS};

use nalgebra::{Cholesky, DMatrix, Dyn};
use rayon::prelude::*;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::log_sum_exp;
use crate::points::Points;
use crate::rng;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// What is known about a point's component (0-indexed).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Supervision {
    /// Seed with a known component.
    Known(usize),
    /// Quasi-seed: known only to lie outside component 0.
    NotFirst,
    Free,
}

impl Supervision {
    /// Quasi-seeding view of 0-indexed seed labels: class-0 seeds stay
    /// known, every other seed only rules out component 0.
    pub fn quasi(labels: &[Option<usize>]) -> Vec<Supervision> {
        labels
            .iter()
            .map(|l| match *l {
                Some(0) => Supervision::Known(0),
                Some(_) => Supervision::NotFirst,
                None => Supervision::Free,
            })
            .collect()
    }

    pub fn full(labels: &[Option<usize>]) -> Vec<Supervision> {
        labels.iter().map(|l| l.map_or(Supervision::Free, Supervision::Known)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmConfig {
    /// Relative change in observed-data log-likelihood that stops EM.
    pub tol: f64,
    pub max_iter: usize,
    /// Ridge `ε·tr(Σ)/d` added to each covariance.
    pub ridge: f64,
    /// Smallest admissible covariance eigenvalue after the ridge.
    pub collapse_threshold: f64,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 500,
            ridge: 1e-8,
            collapse_threshold: 1e-12,
        }
    }
}

/// Slack allowed on per-iteration log-likelihood decreases.
pub const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
struct Gaussian {
    mean: Vec<f64>,
    cov: DMatrix<f64>,
    chol: DMatrix<f64>,
    log_norm: f64,
}

impl Gaussian {
    fn new(mean: Vec<f64>, cov: DMatrix<f64>, cluster: usize, cfg: &EmConfig, check: bool) -> Result<Self> {
        let d = mean.len();
        if check {
            let min = smallest_eigenvalue(&cov);
            if !(min >= cfg.collapse_threshold) {
                return Err(Error::CovarianceCollapse {
                    cluster: cluster + 1,
                    min_eigenvalue: min,
                });
            }
        }
        let chol = Cholesky::<f64, Dyn>::new(cov.clone())
            .ok_or(Error::CovarianceCollapse {
                cluster: cluster + 1,
                min_eigenvalue: smallest_eigenvalue(&cov),
            })?
            .unpack();
        let log_det: f64 = 2.0 * (0..d).map(|i| chol[(i, i)].ln()).sum::<f64>();
        Ok(Self {
            mean,
            cov,
            chol,
            log_norm: -0.5 * (d as f64 * LN_2PI + log_det),
        })
    }

    fn log_pdf(&self, x: &[f64], work: &mut [f64]) -> f64 {
        let d = self.mean.len();
        let mut quad = 0.0;
        for i in 0..d {
            let mut s = x[i] - self.mean[i];
            for j in 0..i {
                s -= self.chol[(i, j)] * work[j];
            }
            let z = s / self.chol[(i, i)];
            work[i] = z;
            quad += z * z;
        }
        self.log_norm - 0.5 * quad
    }
}

fn smallest_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let d = m.nrows();
    if (0..d).all(|i| (0..d).all(|j| i == j || m[(i, j)] == 0.0)) {
        return (0..d).map(|i| m[(i, i)]).fold(f64::INFINITY, f64::min);
    }
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// A fitted mixture.
#[derive(Debug, Clone)]
pub struct GmmModel {
    model: CovarianceModel,
    weights: Vec<f64>,
    /// Component weights renormalized over components `2..=K`, used for quasi-seeds.
    outside_weights: Vec<f64>,
    weights_fixed: bool,
    components: Vec<Gaussian>,
    log_likelihood: f64,
    observed_log_likelihood: f64,
    bic_prime: f64,
    observed_bic_prime: f64,
    unsupervised: Vec<usize>,
    responsibilities: Vec<f64>,
    hard_labels: Vec<usize>,
    trace: Vec<f64>,
    iterations: usize,
    converged: bool,
    num_points: usize,
    num_supervised: usize,
}

impl GmmModel {
    pub fn num_components(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.components[0].mean.len()
    }

    pub fn covariance_model(&self) -> CovarianceModel {
        self.model
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `π_k / (1 − π_1)` for `k ≥ 2`, zero for the first component.
    pub fn outside_weights(&self) -> &[f64] {
        &self.outside_weights
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    /// Seeds plus quasi-seeds.
    pub fn num_supervised(&self) -> usize {
        self.num_supervised
    }

    pub fn weights_fixed(&self) -> bool {
        self.weights_fixed
    }

    pub fn mean(&self, k: usize) -> &[f64] {
        &self.components[k].mean
    }

    pub fn covariance(&self, k: usize) -> &DMatrix<f64> {
        &self.components[k].cov
    }

    /// Complete-data log-likelihood at the hard labels.
    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood
    }

    /// Mixture (observed-data) log-likelihood at the final parameters.
    pub fn observed_log_likelihood(&self) -> f64 {
        self.observed_log_likelihood
    }

    /// BIC′ from the complete-data log-likelihood at the hard labels.
    pub fn bic_prime(&self) -> f64 {
        self.bic_prime
    }

    /// BIC′ from the observed-data log-likelihood.
    pub fn observed_bic_prime(&self) -> f64 {
        self.observed_bic_prime
    }

    pub fn criterion(&self, likelihood: BicLikelihood) -> f64 {
        match likelihood {
            BicLikelihood::Complete => self.bic_prime,
            BicLikelihood::Observed => self.observed_bic_prime,
        }
    }

    /// Total parameter count `τ`.
    pub fn num_params(&self) -> usize {
        num_params(self.model, self.num_components(), self.dim(), self.weights_fixed)
    }

    /// Indices of the points that are not full seeds; rows of [`Self::responsibilities`].
    pub fn unsupervised(&self) -> &[usize] {
        &self.unsupervised
    }

    /// Row-major `|unsupervised| × K` posterior membership.
    pub fn responsibilities(&self) -> &[f64] {
        &self.responsibilities
    }

    pub fn responsibility_row(&self, row: usize) -> &[f64] {
        let k = self.num_components();
        &self.responsibilities[row * k..(row + 1) * k]
    }

    /// 0-indexed component per point: seeds keep theirs, the rest take the argmax.
    pub fn hard_labels(&self) -> &[usize] {
        &self.hard_labels
    }

    /// Observed-data log-likelihood after every E-step.
    pub fn trace(&self) -> &[f64] {
        &self.trace
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Number of E-steps whose log-likelihood dropped by more than [`MONOTONE_SLACK`].
    pub fn monotonicity_violations(&self) -> usize {
        count_violations(&self.trace)
    }

    pub fn log_density(&self, k: usize, x: &[f64]) -> f64 {
        let mut work = vec![0.0; x.len()];
        self.components[k].log_pdf(x, &mut work)
    }

    /// `log(π_k f_k(x))`.
    pub fn log_weighted_density(&self, k: usize, x: &[f64]) -> f64 {
        self.weights[k].ln() + self.log_density(k, x)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.export()).expect("model export is serializable")
    }

    fn export(&self) -> ModelExport {
        ModelExport {
            covariance_model: self.model,
            components: self.num_components(),
            dim: self.dim(),
            weights: self.weights.clone(),
            weights_fixed: self.weights_fixed,
            means: self.components.iter().map(|c| c.mean.clone()).collect(),
            covariances: self
                .components
                .iter()
                .map(|c| c.cov.row_iter().map(|r| r.iter().copied().collect()).collect())
                .collect(),
            log_likelihood: self.log_likelihood,
            observed_log_likelihood: self.observed_log_likelihood,
            num_params: self.num_params(),
            bic_prime: self.bic_prime,
            observed_bic_prime: self.observed_bic_prime,
            iterations: self.iterations,
            converged: self.converged,
        }
    }
}

#[derive(Serialize)]
struct ModelExport {
    covariance_model: CovarianceModel,
    components: usize,
    dim: usize,
    weights: Vec<f64>,
    weights_fixed: bool,
    means: Vec<Vec<f64>>,
    covariances: Vec<Vec<Vec<f64>>>,
    log_likelihood: f64,
    observed_log_likelihood: f64,
    num_params: usize,
    bic_prime: f64,
    observed_bic_prime: f64,
    iterations: usize,
    converged: bool,
}

pub(crate) fn count_violations(trace: &[f64]) -> usize {
    trace
        .windows(2)
        .filter(|w| w[1] < w[0] - MONOTONE_SLACK * w[0].abs().max(1.0))
        .count()
}

/// `τ = (K−1 if π is estimated) + K·d + τ_Σ(K, d)`.
pub fn num_params(model: CovarianceModel, k: usize, d: usize, weights_fixed: bool) -> usize {
    let weights = if weights_fixed { 0 } else { k - 1 };
    weights + k * d + model.num_params(k, d)
}

/// `2ℓ − τ·log(n − m)`.
pub fn bic_prime(log_likelihood: f64, num_params: usize, n: usize, m: usize) -> Result<f64> {
    if n <= m {
        return Err(Error::InvalidConfig(format!(
            "BIC′ needs unsupervised points but n = {n}, m = {m}"
        )));
    }
    Ok(2.0 * log_likelihood - num_params as f64 * ((n - m) as f64).ln())
}

struct Fitter<'a> {
    points: &'a Points,
    supervision: &'a [Supervision],
    k: usize,
    model: CovarianceModel,
    fixed_weights: Option<&'a [f64]>,
    cfg: EmConfig,
    unsupervised: Vec<usize>,
    num_free: usize,
    has_quasi: bool,
    empties: Vec<usize>,
}

struct Params {
    weights: Vec<f64>,
    outside: Vec<f64>,
    components: Vec<Gaussian>,
}

impl<'a> Fitter<'a> {
    fn allowed(&self, s: Supervision, c: usize) -> bool {
        match s {
            Supervision::Known(j) => j == c,
            Supervision::NotFirst => c > 0,
            Supervision::Free => true,
        }
    }

    fn m_step(&mut self, resp: &mut [f64]) -> Result<Params> {
        let (k, d) = (self.k, self.points.dim());
        let mut sizes = vec![0.0; k];
        for row in 0..self.unsupervised.len() {
            for c in 0..k {
                sizes[c] += resp[row * k + c];
            }
        }
        for s in self.supervision {
            if let Supervision::Known(c) = *s {
                sizes[c] += 1.0;
            }
        }
        for c in 0..k {
            if sizes[c] > 1e-10 {
                continue;
            }
            self.empties[c] += 1;
            if self.empties[c] > 1 {
                return Err(Error::EmptyCluster { cluster: c + 1 });
            }
            // reseed at the least confidently assigned eligible point
            let pick = self
                .unsupervised
                .iter()
                .enumerate()
                .filter(|&(_, &i)| self.allowed(self.supervision[i], c))
                .map(|(row, _)| {
                    let conf = resp[row * k..(row + 1) * k].iter().copied().fold(0.0, f64::max);
                    (row, conf)
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(row, _)| row)
                .ok_or(Error::EmptyCluster { cluster: c + 1 })?;
            let r = &mut resp[pick * k..(pick + 1) * k];
            for (j, slot) in r.iter_mut().enumerate() {
                sizes[j] -= *slot;
                *slot = if j == c { 1.0 } else { 0.0 };
            }
            sizes[c] += 1.0;
        }

        let mut sums = vec![vec![0.0; d]; k];
        let weight_of = |i: usize, row: Option<usize>, c: usize| -> f64 {
            match (self.supervision[i], row) {
                (Supervision::Known(j), _) => f64::from(u8::from(j == c)),
                (_, Some(r)) => resp[r * k + c],
                _ => 0.0,
            }
        };
        let rows = self.row_index();
        for i in 0..self.points.len() {
            let x = self.points.row(i);
            for (c, sum) in sums.iter_mut().enumerate() {
                let w = weight_of(i, rows[i], c);
                if w != 0.0 {
                    for (acc, v) in sum.iter_mut().zip(x) {
                        *acc += w * v;
                    }
                }
            }
        }
        let means: Vec<Vec<f64>> = sums
            .iter()
            .zip(&sizes)
            .map(|(s, &n)| s.iter().map(|v| v / n).collect())
            .collect();
        let mut scatter = vec![DMatrix::<f64>::zeros(d, d); k];
        let mut diff = vec![0.0; d];
        for i in 0..self.points.len() {
            let x = self.points.row(i);
            for c in 0..k {
                let w = weight_of(i, rows[i], c);
                if w == 0.0 {
                    continue;
                }
                for (t, (a, b)) in diff.iter_mut().zip(x.iter().zip(&means[c])) {
                    *t = a - b;
                }
                let sc = &mut scatter[c];
                for col in 0..d {
                    let f = w * diff[col];
                    for r in col..d {
                        sc[(r, col)] += f * diff[r];
                    }
                }
            }
        }
        for sc in &mut scatter {
            for col in 0..d {
                for r in col + 1..d {
                    sc[(col, r)] = sc[(r, col)];
                }
            }
        }
        let covs = self.model.estimate(&scatter, &sizes);
        let shared = self.model.is_shared();
        let mut components = Vec::with_capacity(k);
        for (c, (mean, mut cov)) in means.into_iter().zip(covs).enumerate() {
            let ridge = self.cfg.ridge * cov.trace() / d as f64;
            for i in 0..d {
                cov[(i, i)] += ridge;
            }
            components.push(Gaussian::new(mean, cov, c, &self.cfg, !shared || c == 0)?);
        }
        let (weights, outside) = self.weights(resp);
        Ok(Params {
            weights,
            outside,
            components,
        })
    }

    fn weights(&self, resp: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let k = self.k;
        let outside_of = |w: &[f64]| -> Vec<f64> {
            let rest: f64 = w[1..].iter().sum();
            (0..k).map(|c| if c == 0 || rest <= 0.0 { 0.0 } else { w[c] / rest }).collect()
        };
        if let Some(w) = self.fixed_weights {
            return (w.to_vec(), outside_of(w));
        }
        let mut free = vec![0.0; k];
        let mut all = vec![0.0; k];
        for (row, &i) in self.unsupervised.iter().enumerate() {
            let r = &resp[row * k..(row + 1) * k];
            let target: &mut [f64] = if self.supervision[i] == Supervision::Free { &mut free } else { &mut all };
            for (t, v) in target.iter_mut().zip(r) {
                *t += v;
            }
        }
        if self.num_free == 0 {
            let w = vec![1.0 / k as f64; k];
            let o = outside_of(&w);
            return (w, o);
        }
        let na = self.num_free as f64;
        if !self.has_quasi {
            let w: Vec<f64> = free.iter().map(|r| r / na).collect();
            let o = outside_of(&w);
            return (w, o);
        }
        // π_1 from A alone; the split of the remaining mass uses A and the quasi-seeds
        let pi1 = free[0] / na;
        let pooled: Vec<f64> = (0..k).map(|c| if c == 0 { 0.0 } else { free[c] + all[c] }).collect();
        let total: f64 = pooled.iter().sum();
        let outside: Vec<f64> = if total > 0.0 {
            pooled.iter().map(|p| p / total).collect()
        } else {
            (0..k).map(|c| if c == 0 { 0.0 } else { 1.0 / (k - 1) as f64 }).collect()
        };
        let mut w: Vec<f64> = outside.iter().map(|o| (1.0 - pi1) * o).collect();
        w[0] = pi1;
        (w, outside)
    }

    fn row_index(&self) -> Vec<Option<usize>> {
        let mut rows = vec![None; self.points.len()];
        for (row, &i) in self.unsupervised.iter().enumerate() {
            rows[i] = Some(row);
        }
        rows
    }

    /// Responsibilities for non-seed rows and the observed-data log-likelihood.
    fn e_step(&self, p: &Params) -> (Vec<f64>, f64) {
        let (k, d) = (self.k, self.points.dim());
        let log_w: Vec<f64> = p.weights.iter().map(|w| w.ln()).collect();
        let log_o: Vec<f64> = p.outside.iter().map(|w| w.ln()).collect();
        let mut work = vec![0.0; d];
        let mut terms = vec![0.0; k];
        let mut resp = vec![0.0; self.unsupervised.len() * k];
        let mut total = 0.0;
        for (i, s) in self.supervision.iter().enumerate() {
            if let Supervision::Known(c) = *s {
                total += p.components[c].log_pdf(self.points.row(i), &mut work);
            }
        }
        for (row, &i) in self.unsupervised.iter().enumerate() {
            let x = self.points.row(i);
            let quasi = self.supervision[i] == Supervision::NotFirst;
            for c in 0..k {
                terms[c] = if quasi && c == 0 {
                    f64::NEG_INFINITY
                } else {
                    let lw = if quasi { log_o[c] } else { log_w[c] };
                    if lw == f64::NEG_INFINITY {
                        lw
                    } else {
                        lw + p.components[c].log_pdf(x, &mut work)
                    }
                };
            }
            let lse = log_sum_exp(&terms);
            total += lse;
            let r = &mut resp[row * k..(row + 1) * k];
            let mut norm = 0.0;
            for c in 0..k {
                r[c] = (terms[c] - lse).exp();
                norm += r[c];
            }
            for v in r.iter_mut() {
                *v /= norm;
            }
        }
        (resp, total)
    }

    fn hard_labels(&self, resp: &[f64]) -> Vec<usize> {
        let k = self.k;
        let rows = self.row_index();
        (0..self.points.len())
            .map(|i| match (self.supervision[i], rows[i]) {
                (Supervision::Known(c), _) => c,
                (_, Some(row)) => argmax(&resp[row * k..(row + 1) * k]),
                _ => unreachable!(),
            })
            .collect()
    }

    fn complete_log_likelihood(&self, p: &Params, labels: &[usize]) -> f64 {
        let mut work = vec![0.0; self.points.dim()];
        labels
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let density = p.components[c].log_pdf(self.points.row(i), &mut work);
                match self.supervision[i] {
                    Supervision::Known(_) => density,
                    Supervision::NotFirst => p.outside[c].ln() + density,
                    Supervision::Free => p.weights[c].ln() + density,
                }
            })
            .sum()
    }
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Runs EM from the hard labels `init`. `fixed_weights` pins `π`
/// (e.g. to `n_k / n` when block sizes are known).
pub fn em_fit(
    points: &Points,
    supervision: &[Supervision],
    k: usize,
    model: CovarianceModel,
    fixed_weights: Option<&[f64]>,
    init: &[usize],
    config: &EmConfig,
) -> Result<GmmModel> {
    init::check_supervision(points, supervision, k)?;
    if init.len() != points.len() {
        return Err(Error::InvalidConfig("initial labels do not cover every point".into()));
    }
    for (i, (&l, &s)) in init.iter().zip(supervision).enumerate() {
        let ok = l < k
            && match s {
                Supervision::Known(c) => c == l,
                Supervision::NotFirst => l > 0,
                Supervision::Free => true,
            };
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "initial label {} of point {i} contradicts its supervision",
                l + 1
            )));
        }
    }
    if let Some(w) = fixed_weights {
        let sum: f64 = w.iter().sum();
        if w.len() != k || w.iter().any(|&x| !(x >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("fixed weights must be a {k}-simplex vector")));
        }
    }
    let unsupervised: Vec<usize> = (0..points.len())
        .filter(|&i| !matches!(supervision[i], Supervision::Known(_)))
        .collect();
    let num_free = supervision.iter().filter(|s| **s == Supervision::Free).count();
    let has_quasi = supervision.contains(&Supervision::NotFirst);
    let mut fitter = Fitter {
        points,
        supervision,
        k,
        model,
        fixed_weights,
        cfg: *config,
        unsupervised,
        num_free,
        has_quasi,
        empties: vec![0; k],
    };

    let mut resp = vec![0.0; fitter.unsupervised.len() * k];
    for (row, &i) in fitter.unsupervised.iter().enumerate() {
        resp[row * k + init[i]] = 1.0;
    }
    let mut params = fitter.m_step(&mut resp)?;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let converged = loop {
        let (r, obs) = fitter.e_step(&params);
        resp = r;
        if !obs.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "{model} fit with {k} components produced a non-finite log-likelihood"
            )));
        }
        let done = trace
            .last()
            .is_some_and(|&prev: &f64| (obs - prev).abs() <= config.tol * obs.abs());
        trace.push(obs);
        if done {
            break true;
        }
        if iterations >= config.max_iter {
            break false;
        }
        params = fitter.m_step(&mut resp)?;
        iterations += 1;
    };

    let hard_labels = fitter.hard_labels(&resp);
    let log_likelihood = fitter.complete_log_likelihood(&params, &hard_labels);
    let num_supervised = supervision.iter().filter(|s| **s != Supervision::Free).count();
    let weights_fixed = fixed_weights.is_some();
    let tau = num_params(model, k, points.dim(), weights_fixed);
    let observed = *trace.last().unwrap();
    let (bic, observed_bic) = if points.len() > num_supervised {
        (
            bic_prime(log_likelihood, tau, points.len(), num_supervised)?,
            bic_prime(observed, tau, points.len(), num_supervised)?,
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(GmmModel {
        model,
        weights: params.weights,
        outside_weights: params.outside,
        weights_fixed,
        components: params.components,
        log_likelihood,
        observed_log_likelihood: observed,
        bic_prime: bic,
        observed_bic_prime: observed_bic,
        unsupervised: fitter.unsupervised,
        responsibilities: resp,
        hard_labels,
        trace,
        iterations,
        converged,
        num_points: points.len(),
        num_supervised,
    })
}

/// [`em_fit`] under quasi-seeding: seeds outside class 0 only exclude component 0.
pub fn quasi_seed_em_fit(
    points: &Points,
    seed_labels: &[Option<usize>],
    k: usize,
    model: CovarianceModel,
    fixed_weights: Option<&[f64]>,
    init: &[usize],
    config: &EmConfig,
) -> Result<GmmModel> {
    let supervision = Supervision::quasi(seed_labels);
    em_fit(points, &supervision, k, model, fixed_weights, init, config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectConfig {
    /// Largest component count tried.
    pub max_components: usize,
    pub catalogue: Vec<CovarianceModel>,
    /// Known block sizes: fixes `K` and `π_k = n_k / n`.
    pub block_sizes: Option<Vec<usize>>,
    pub em: EmConfig,
    pub likelihood: BicLikelihood,
    /// Initializations tried per candidate; the lowest k-means cost is kept.
    pub init_restarts: usize,
    pub rng_seed: u64,
}

pub const DEFAULT_INIT_RESTARTS: usize = 10;

/// Log-likelihood plugged into BIC′.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BicLikelihood {
    /// Complete-data value at the hard labels.
    Complete,
    /// Mixture (observed-data) value.
    #[default]
    Observed,
}

impl FromStr for BicLikelihood {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "complete" => Ok(Self::Complete),
            "observed" => Ok(Self::Observed),
            other => Err(Error::InvalidConfig(format!(
                "unknown likelihood '{other}' (expected complete or observed)"
            ))),
        }
    }
}

impl SelectConfig {
    pub fn new(max_components: usize, catalogue: Vec<CovarianceModel>, rng_seed: u64) -> Self {
        Self {
            max_components,
            catalogue,
            block_sizes: None,
            em: EmConfig::default(),
            likelihood: BicLikelihood::default(),
            init_restarts: DEFAULT_INIT_RESTARTS,
            rng_seed,
        }
    }
}

/// One row of the BIC′ table.
#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub components: usize,
    pub covariance_model: CovarianceModel,
    pub num_params: usize,
    /// BIC′ under the configured likelihood.
    pub bic_prime: Option<f64>,
    pub log_likelihood: Option<f64>,
    pub observed_log_likelihood: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Selection {
    pub best: GmmModel,
    pub candidates: Vec<Candidate>,
}

impl Selection {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "selected": self.best.to_json(),
            "candidates": self.candidates,
        })
    }
}

/// Fits every `(K, model)` pair and keeps the BIC′ maximizer. Ties go to
/// fewer parameters, then fewer components, then catalogue order.
pub fn select_model(points: &Points, supervision: &[Supervision], config: &SelectConfig) -> Result<Selection> {
    if config.catalogue.is_empty() {
        return Err(Error::InvalidConfig("empty covariance catalogue".into()));
    }
    let min_k = supervision
        .iter()
        .map(|s| match *s {
            Supervision::Known(c) => c + 1,
            Supervision::NotFirst => 2,
            Supervision::Free => 1,
        })
        .max()
        .unwrap_or(1);
    let (ks, weights): (Vec<usize>, Option<Vec<f64>>) = match &config.block_sizes {
        Some(sizes) => {
            let n: usize = sizes.iter().sum();
            if n == 0 {
                return Err(Error::InvalidConfig("block sizes sum to zero".into()));
            }
            (vec![sizes.len()], Some(sizes.iter().map(|&s| s as f64 / n as f64).collect()))
        }
        None => ((min_k..=config.max_components).collect(), None),
    };
    if ks.is_empty() || ks[0] < min_k {
        return Err(Error::InvalidConfig(format!(
            "seeds span {min_k} components but at most {} are allowed",
            config.max_components
        )));
    }
    let jobs: Vec<(usize, usize, CovarianceModel)> = ks
        .iter()
        .flat_map(|&k| config.catalogue.iter().enumerate().map(move |(ci, &m)| (k, ci, m)))
        .collect();
    let fits: Vec<Result<GmmModel>> = jobs
        .par_iter()
        .enumerate()
        .map(|(idx, &(k, _, model))| {
            let mut rng = rng::stream(config.rng_seed, idx as u64);
            let init = ss_kmeanspp_best(points, supervision, k, config.init_restarts, &mut rng)?;
            em_fit(points, supervision, k, model, weights.as_deref(), &init, &config.em)
        })
        .collect();

    let mut candidates = Vec::with_capacity(jobs.len());
    let mut best: Option<(usize, f64)> = None;
    for (idx, (&(k, _, model), fit)) in jobs.iter().zip(&fits).enumerate() {
        let tau = num_params(model, k, points.dim(), weights.is_some());
        match fit {
            Ok(m) => {
                let score = m.criterion(config.likelihood);
                candidates.push(Candidate {
                    components: k,
                    covariance_model: model,
                    num_params: tau,
                    bic_prime: Some(score),
                    log_likelihood: Some(m.log_likelihood),
                    observed_log_likelihood: Some(m.observed_log_likelihood),
                    error: None,
                });
                let better = match best {
                    None => true,
                    Some((b, best_score)) => {
                        let (bk, _, bm) = jobs[b];
                        let btau = num_params(bm, bk, points.dim(), weights.is_some());
                        score > best_score
                            || (score == best_score && (tau, k, jobs[idx].1) < (btau, bk, jobs[b].1))
                    }
                };
                if better && !score.is_nan() {
                    best = Some((idx, score));
                }
            }
            Err(e) => {
                log::warn!("skipping {model} with {k} components: {e}");
                candidates.push(Candidate {
                    components: k,
                    covariance_model: model,
                    num_params: tau,
                    bic_prime: None,
                    log_likelihood: None,
                    observed_log_likelihood: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    let (idx, _) = best.ok_or(Error::AllFitsFailed)?;
    let best = fits.into_iter().nth(idx).unwrap().expect("selected fit succeeded");
    Ok(Selection { best, candidates })
}
