//! Plain-text file formats.
//!
//! - Edge list: one `u v` pair per line, 0-indexed vertex ids, `#` comments.
//!   An optional `# vertices N` line fixes the vertex count (isolated vertices).
//! - Label file (seeds and ground truth): one `vertex block` pair per line,
//!   blocks 1-indexed.
//! - Parameters: TOML with `k`, `block_sizes` and `bernoulli` rows.
//! - Nominations: CSV with header `rank,vertex,score,scheme`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::nomination::{NominationList, SchemeTag};
use crate::sbm::{GroundTruth, SbmParams};

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_string(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_err(origin: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_string(),
        line,
        message: message.into(),
    }
}

/// Content lines with their 1-based line numbers, comments and blanks removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_pair(origin: &str, lineno: usize, line: &str) -> Result<(usize, usize)> {
    let fields: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
    if fields.len() != 2 {
        return Err(parse_err(origin, lineno, format!("expected two fields, found {}", fields.len())));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(origin, lineno, format!("'{s}' is not a nonnegative integer")))
    };
    Ok((num(fields[0])?, num(fields[1])?))
}

fn vertex_header(text: &str, origin: &str) -> Result<Option<usize>> {
    for (i, raw) in text.lines().enumerate() {
        let Some(comment) = raw.trim().strip_prefix('#') else {
            continue;
        };
        let mut words = comment.split_whitespace();
        if words.next() == Some("vertices") {
            let n = words
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| parse_err(origin, i + 1, "malformed '# vertices N' header"))?;
            return Ok(Some(n));
        }
    }
    Ok(None)
}

pub fn parse_edge_list(text: &str, origin: &str) -> Result<Graph> {
    let declared = vertex_header(text, origin)?;
    let mut edges = Vec::new();
    for (lineno, line) in content_lines(text) {
        let (u, v) = parse_pair(origin, lineno, line)?;
        if u == v {
            return Err(parse_err(origin, lineno, format!("self-loop at vertex {u}")));
        }
        if let Some(n) = declared {
            if u >= n || v >= n {
                return Err(parse_err(origin, lineno, format!("vertex id outside 0..{n}")));
            }
        }
        edges.push((u, v));
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
    Graph::from_edges(n, &edges)
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    parse_edge_list(&read_to_string(path)?, &path.display().to_string())
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("# vertices {}\n", g.num_vertices());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// `(vertex, block)` pairs; blocks are 1-indexed and vertices unique.
pub fn parse_labels(text: &str, origin: &str) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (lineno, line) in content_lines(text) {
        let (v, b) = parse_pair(origin, lineno, line)?;
        if b == 0 {
            return Err(parse_err(origin, lineno, "blocks are numbered from 1"));
        }
        if !seen.insert(v) {
            return Err(parse_err(origin, lineno, format!("vertex {v} listed twice")));
        }
        pairs.push((v, b));
    }
    Ok(pairs)
}

pub fn read_labels(path: &Path) -> Result<Vec<(usize, usize)>> {
    parse_labels(&read_to_string(path)?, &path.display().to_string())
}

pub fn format_labels(pairs: &[(usize, usize)]) -> String {
    let mut out = String::new();
    for (v, b) in pairs {
        let _ = writeln!(out, "{v} {b}");
    }
    out
}

/// Ground truth from a label file that must cover `0..n`.
pub fn truth_from_labels(pairs: &[(usize, usize)], n: usize) -> Result<GroundTruth> {
    let mut labels = vec![0; n];
    for &(v, b) in pairs {
        if v >= n {
            return Err(Error::VertexMismatch(format!("truth vertex {v} outside 0..{n}")));
        }
        labels[v] = b;
    }
    if let Some(v) = labels.iter().position(|&b| b == 0) {
        return Err(Error::VertexMismatch(format!("truth file has no block for vertex {v}")));
    }
    Ok(GroundTruth::new(labels))
}

#[derive(Debug, Serialize, Deserialize)]
struct ParamsFile {
    k: usize,
    block_sizes: Vec<usize>,
    bernoulli: Vec<Vec<f64>>,
}

pub fn parse_params(text: &str, origin: &str) -> Result<SbmParams> {
    let file: ParamsFile = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        parse_err(origin, line, e.message().to_string())
    })?;
    let k = file.k;
    if file.block_sizes.len() != k || file.bernoulli.len() != k || file.bernoulli.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidParams(format!(
            "k = {k} but block_sizes / bernoulli have other dimensions"
        )));
    }
    let m = DMatrix::from_fn(k, k, |i, j| file.bernoulli[i][j]);
    SbmParams::new(file.block_sizes, m)
}

pub fn read_params(path: &Path) -> Result<SbmParams> {
    parse_params(&read_to_string(path)?, &path.display().to_string())
}

pub fn format_params(params: &SbmParams) -> String {
    let k = params.num_blocks();
    let file = ParamsFile {
        k,
        block_sizes: params.block_sizes().to_vec(),
        bernoulli: (0..k)
            .map(|i| (0..k).map(|j| params.bernoulli()[(i, j)]).collect())
            .collect(),
    };
    toml::to_string(&file).expect("parameters serialize")
}

pub fn format_nominations(list: &NominationList) -> String {
    let mut out = String::from("rank,vertex,score,scheme\n");
    for (i, (v, s)) in list.vertices().iter().zip(list.scores()).enumerate() {
        let _ = writeln!(out, "{},{v},{s:e},{}", i + 1, list.scheme());
    }
    out
}

pub fn parse_nominations(text: &str, origin: &str) -> Result<NominationList> {
    let mut vertices = Vec::new();
    let mut scores = Vec::new();
    let mut scheme = None;
    for (lineno, line) in content_lines(text) {
        if line.starts_with("rank") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(parse_err(origin, lineno, "expected rank,vertex,score[,scheme]"));
        }
        let rank: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(origin, lineno, "bad rank"))?;
        if rank != vertices.len() + 1 {
            return Err(parse_err(origin, lineno, format!("rank {rank} out of sequence")));
        }
        vertices.push(fields[1].parse().map_err(|_| parse_err(origin, lineno, "bad vertex"))?);
        scores.push(fields[2].parse().map_err(|_| parse_err(origin, lineno, "bad score"))?);
        if let Some(tag) = fields.get(3) {
            scheme = Some(tag.parse::<SchemeTag>()?);
        }
    }
    NominationList::from_ordered(vertices, scores, scheme.unwrap_or(SchemeTag::Random))
        .map_err(|e| parse_err(origin, 0, e.to_string()))
}

pub fn read_nominations(path: &Path) -> Result<NominationList> {
    parse_nominations(&read_to_string(path)?, &path.display().to_string())
}

/// `vertex,x1,..,xd` rows.
pub fn format_embedding(emb: &Embedding) -> String {
    let c = emb.coords();
    let mut out = String::from("vertex");
    for j in 0..c.ncols() {
        let _ = write!(out, ",x{}", j + 1);
    }
    out.push('\n');
    for v in 0..c.nrows() {
        let _ = write!(out, "{v}");
        for j in 0..c.ncols() {
            let _ = write!(out, ",{:e}", c[(v, j)]);
        }
        out.push('\n');
    }
    out
}
