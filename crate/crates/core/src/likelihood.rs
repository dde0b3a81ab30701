use nalgebra::DMatrix;

use crate::error::Result;
use crate::sbm::validate_probabilities;

/// Log-space lookup tables for a Bernoulli block matrix, 0-indexed blocks.
#[derive(Debug, Clone)]
pub(crate) struct LogTables {
    pub k: usize,
    /// `log Λ[i][j]`
    pub log_p: Vec<f64>,
    /// `log(1 - Λ[i][j])`
    pub log_q: Vec<f64>,
    /// `log Λ - log(1 - Λ)`
    pub logit: Vec<f64>,
}

impl LogTables {
    pub fn new(bernoulli: &DMatrix<f64>) -> Result<Self> {
        validate_probabilities(bernoulli)?;
        let k = bernoulli.nrows();
        let mut log_p = vec![0.0; k * k];
        let mut log_q = vec![0.0; k * k];
        let mut logit = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                let p = bernoulli[(i, j)];
                log_p[i * k + j] = p.ln();
                log_q[i * k + j] = (-p).ln_1p();
                logit[i * k + j] = log_p[i * k + j] - log_q[i * k + j];
            }
        }
        Ok(Self { k, log_p, log_q, logit })
    }

    /// Log-likelihood contribution of the pair with labels `(a, b)`.
    #[inline]
    pub fn term(&self, a: usize, b: usize, adjacent: bool) -> f64 {
        if adjacent {
            self.log_p[a * self.k + b]
        } else {
            self.log_q[a * self.k + b]
        }
    }
}

/// Streaming log-sum-exp: keeps `Σ exp(x_i - max)` with a running max.
#[derive(Debug, Clone)]
pub(crate) struct LogSumExp {
    pub max: f64,
    pub sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }
}

/// `log Σ exp(x_i)` computed stably.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
