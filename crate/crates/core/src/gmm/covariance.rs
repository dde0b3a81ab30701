//! Eigen-decomposed covariance parameterizations `Σ_k = λ_k U_k D_k U_kᵀ`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CovarianceModel {
    Eii,
    Vii,
    Eei,
    Vvi,
    Eee,
    Vvv,
    Eev,
}

/// Codes that parse as valid Mclust names but have no M-step here.
const UNIMPLEMENTED: &[&str] = &[
    "E", "V", "X", "VEI", "EVI", "EVE", "VEE", "VVE", "VEV", "EVV", "XII", "XXI", "XXX",
];

impl CovarianceModel {
    pub const ALL: [CovarianceModel; 7] = [
        CovarianceModel::Eii,
        CovarianceModel::Vii,
        CovarianceModel::Eei,
        CovarianceModel::Vvi,
        CovarianceModel::Eee,
        CovarianceModel::Vvv,
        CovarianceModel::Eev,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CovarianceModel::Eii => "EII",
            CovarianceModel::Vii => "VII",
            CovarianceModel::Eei => "EEI",
            CovarianceModel::Vvi => "VVI",
            CovarianceModel::Eee => "EEE",
            CovarianceModel::Vvv => "VVV",
            CovarianceModel::Eev => "EEV",
        }
    }

    /// Free covariance parameters for `k` components in `d` dimensions.
    pub fn num_params(self, k: usize, d: usize) -> usize {
        let full = d * (d + 1) / 2;
        match self {
            CovarianceModel::Eii => 1,
            CovarianceModel::Vii => k,
            CovarianceModel::Eei => d,
            CovarianceModel::Vvi => k * d,
            CovarianceModel::Eee => full,
            CovarianceModel::Vvv => k * full,
            CovarianceModel::Eev => full + k.saturating_sub(1) * d * d.saturating_sub(1) / 2,
        }
    }

    /// True when every component shares one covariance matrix.
    pub fn is_shared(self) -> bool {
        matches!(self, CovarianceModel::Eii | CovarianceModel::Eei | CovarianceModel::Eee)
    }

    /// Constrained maximizer given per-component scatter `W_k = Σ r (x-μ)(x-μ)ᵀ`
    /// and effective sizes `n_k`. Components with `n_k == 0` are estimated
    /// from the pooled scatter.
    pub fn estimate(self, scatter: &[DMatrix<f64>], sizes: &[f64]) -> Vec<DMatrix<f64>> {
        let k = scatter.len();
        let d = scatter[0].nrows();
        let total: f64 = sizes.iter().sum();
        let mut pooled = DMatrix::zeros(d, d);
        for w in scatter {
            pooled += w;
        }
        let pooled_cov = pooled / total;
        let own = |j: usize| -> Option<DMatrix<f64>> {
            (sizes[j] > 0.0).then(|| &scatter[j] / sizes[j])
        };
        match self {
            CovarianceModel::Eii => {
                let lambda = pooled_cov.trace() / d as f64;
                vec![DMatrix::identity(d, d) * lambda; k]
            }
            CovarianceModel::Vii => (0..k)
                .map(|j| {
                    let c = own(j).unwrap_or_else(|| pooled_cov.clone());
                    DMatrix::identity(d, d) * (c.trace() / d as f64)
                })
                .collect(),
            CovarianceModel::Eei => vec![DMatrix::from_diagonal(&pooled_cov.diagonal()); k],
            CovarianceModel::Vvi => (0..k)
                .map(|j| {
                    let c = own(j).unwrap_or_else(|| pooled_cov.clone());
                    DMatrix::from_diagonal(&c.diagonal())
                })
                .collect(),
            CovarianceModel::Eee => vec![pooled_cov; k],
            CovarianceModel::Vvv => (0..k)
                .map(|j| own(j).unwrap_or_else(|| pooled_cov.clone()))
                .collect(),
            CovarianceModel::Eev => eev(scatter, sizes, total),
        }
    }
}

/// Shared volume and shape, per-component orientation: with `W_k = L_k Ω_k L_kᵀ`
/// (eigenvalues descending) the maximizer is `Σ_k = L_k (Σ_j Ω_j / n) L_kᵀ`.
fn eev(scatter: &[DMatrix<f64>], sizes: &[f64], total: f64) -> Vec<DMatrix<f64>> {
    let d = scatter[0].nrows();
    let mut bases = Vec::with_capacity(scatter.len());
    let mut omega = vec![0.0; d];
    for (w, &size) in scatter.iter().zip(sizes) {
        if size > 0.0 {
            let (vals, vecs) = sorted_eigen(w);
            for (o, v) in omega.iter_mut().zip(vals.iter()) {
                *o += v.max(0.0);
            }
            bases.push(Some(vecs));
        } else {
            bases.push(None);
        }
    }
    let shape = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        omega.iter().map(|o| o / total),
    ));
    bases
        .into_iter()
        .map(|b| match b {
            Some(l) => &l * &shape * l.transpose(),
            None => shape.clone(),
        })
        .collect()
}

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
pub(crate) fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

impl fmt::Display for CovarianceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CovarianceModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let code = s.trim().to_ascii_uppercase();
        if let Some(m) = Self::ALL.iter().find(|m| m.name() == code) {
            return Ok(*m);
        }
        if UNIMPLEMENTED.contains(&code.as_str()) {
            Err(Error::UnimplementedCovariance(code))
        } else {
            Err(Error::UnknownCovariance(s.to_string()))
        }
    }
}

/// Parses a comma-separated list such as `"EEV,EEE,EII"`.
pub fn parse_catalogue(s: &str) -> Result<Vec<CovarianceModel>> {
    let models: Vec<_> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if models.is_empty() {
        return Err(Error::InvalidConfig("empty covariance catalogue".into()));
    }
    Ok(models)
}
