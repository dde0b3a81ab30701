//! Nomination lists: orderings of the ambiguous vertices with attached scores.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeTag {
    /// Exact canonical posterior.
    Lc,
    /// Metropolis-Hastings estimate of the canonical posterior.
    Lcs,
    /// Spectral partitioning with k-means.
    Lp,
    /// Spectral partitioning with semi-supervised mixture models.
    Lep,
    /// Uniformly random order; a chance baseline.
    Random,
}

impl SchemeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeTag::Lc => "lc",
            SchemeTag::Lcs => "lcs",
            SchemeTag::Lp => "lp",
            SchemeTag::Lep => "lep",
            SchemeTag::Random => "random",
        }
    }
}

impl fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lc" => Ok(SchemeTag::Lc),
            "lcs" => Ok(SchemeTag::Lcs),
            "lp" => Ok(SchemeTag::Lp),
            "lep" => Ok(SchemeTag::Lep),
            "random" => Ok(SchemeTag::Random),
            other => Err(Error::InvalidConfig(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Ambiguous vertices in nomination order, most likely block-1 member first.
/// Scores are nonincreasing along the list.
#[derive(Debug, Clone, PartialEq)]
pub struct NominationList {
    vertices: Vec<usize>,
    scores: Vec<f64>,
    scheme: SchemeTag,
}

impl NominationList {
    /// Orders `vertices` by nonincreasing score, breaking ties by ascending vertex id.
    pub fn from_scores(vertices: &[usize], scores: &[f64], scheme: SchemeTag) -> Self {
        assert_eq!(vertices.len(), scores.len());
        let mut idx: Vec<usize> = (0..vertices.len()).collect();
        idx.sort_by(|&a, &b| {
            scores[b]
                .partial_cmp(&scores[a])
                .unwrap_or(Ordering::Equal)
                .then(vertices[a].cmp(&vertices[b]))
        });
        Self {
            vertices: idx.iter().map(|&i| vertices[i]).collect(),
            scores: idx.iter().map(|&i| scores[i]).collect(),
            scheme,
        }
    }

    /// A list in the given order; scores must already be nonincreasing.
    pub fn from_ordered(vertices: Vec<usize>, scores: Vec<f64>, scheme: SchemeTag) -> Result<Self> {
        if vertices.len() != scores.len() {
            return Err(Error::InvalidConfig("vertex and score columns differ in length".into()));
        }
        if scores.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidConfig("scores must be nonincreasing along the list".into()));
        }
        Ok(Self {
            vertices,
            scores,
            scheme,
        })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn scheme(&self) -> SchemeTag {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True when the list holds each element of `ambiguous` exactly once.
    pub fn is_permutation_of(&self, ambiguous: &[usize]) -> bool {
        let mut a = self.vertices.clone();
        let mut b = ambiguous.to_vec();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}
