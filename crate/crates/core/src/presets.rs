//! Parameter presets for the simulation experiments.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sbm::SbmParams;

const STRUCTURED: [f64; 9] = [0.5, 0.3, 0.4, 0.3, 0.8, 0.6, 0.4, 0.6, 0.3];

/// `α Λ_structured + (1 - α) · 0.5`, a three-block family that becomes
/// Erdős–Rényi at `α = 0`.
pub fn lambda_alpha(alpha: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &STRUCTURED).map(|p| alpha * p + (1.0 - alpha) * 0.5)
}

/// The banded ten-block matrix: 0.30 on the diagonal, 0.27 and 0.24 on the
/// first two off-diagonals, 0.21 elsewhere.
pub fn ten_block_lambda() -> DMatrix<f64> {
    DMatrix::from_fn(10, 10, |i, j| match i.abs_diff(j) {
        0 => 0.30,
        1 => 0.27,
        2 => 0.24,
        _ => 0.21,
    })
}

/// Named experimental scale: model parameters plus per-block seed counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    SmallSmall,
    MediumSmall,
    LargeSmall,
    Medium,
    Large,
    TenBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub scale: Scale,
    pub params: SbmParams,
    pub seed_counts: Vec<usize>,
}

impl Setup {
    /// Number of ambiguous vertices `n - m`.
    pub fn num_ambiguous(&self) -> usize {
        self.params.num_vertices() - self.seed_counts.iter().sum::<usize>()
    }

    /// Same sizes and seeds with a replaced Bernoulli matrix.
    pub fn with_bernoulli(&self, bernoulli: DMatrix<f64>) -> Result<Self> {
        Ok(Self {
            scale: self.scale,
            params: SbmParams::new(self.params.block_sizes().to_vec(), bernoulli)?,
            seed_counts: self.seed_counts.clone(),
        })
    }
}

impl Scale {
    pub const ALL: [Scale; 6] = [
        Scale::SmallSmall,
        Scale::MediumSmall,
        Scale::LargeSmall,
        Scale::Medium,
        Scale::Large,
        Scale::TenBlock,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scale::SmallSmall => "small-small",
            Scale::MediumSmall => "medium-small",
            Scale::LargeSmall => "large-small",
            Scale::Medium => "medium",
            Scale::Large => "large",
            Scale::TenBlock => "ten-block",
        }
    }

    /// `(seed counts, ambiguous counts, α)` for the three-block scales.
    fn three_block_row(self) -> Option<([usize; 3], [usize; 3], f64)> {
        Some(match self {
            Scale::SmallSmall => ([4, 0, 0], [4, 3, 3], 1.0),
            Scale::MediumSmall => ([4, 0, 0], [7, 4, 4], 1.0),
            Scale::LargeSmall => ([4, 0, 0], [8, 5, 4], 1.0),
            Scale::Medium => ([20, 0, 0], [200, 150, 150], 0.3),
            Scale::Large => ([40, 0, 0], [4000, 3000, 3000], 0.13),
            Scale::TenBlock => return None,
        })
    }

    pub fn alpha(self) -> Option<f64> {
        self.three_block_row().map(|(_, _, a)| a)
    }

    pub fn setup(self) -> Setup {
        match self.three_block_row() {
            Some((m, amb, alpha)) => {
                let sizes = m.iter().zip(&amb).map(|(a, b)| a + b).collect();
                Setup {
                    scale: self,
                    params: SbmParams::new(sizes, lambda_alpha(alpha)).expect("preset is valid"),
                    seed_counts: m.to_vec(),
                }
            }
            None => Setup {
                scale: self,
                params: SbmParams::new(vec![100; 10], ten_block_lambda()).expect("preset is valid"),
                seed_counts: vec![20; 10],
            },
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let key = key.strip_suffix("-scale").unwrap_or(&key);
        Scale::ALL
            .into_iter()
            .find(|sc| sc.name() == key)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown preset '{s}'")))
    }
}
