//! Normalized model distance and pairwise distance matrices.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::aligner::{align_models, Alignment, Description, MatchOptions};
use crate::codec::{common_model_length, model_length, transform_length_for};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeAlignment};
use crate::model::{CommonModel, Model, TransformPair};
use crate::summarizer::{summarize, SummarizerConfig};

/// Environment variable naming the model cache directory.
pub const CACHE_ENV: &str = "GRAPHSIM_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmdResult {
    /// Distance in `[0, 1]`.
    pub value: f64,
    /// Unclamped ratio.
    pub raw: f64,
    /// The raw ratio exceeded 1.
    pub clamped: bool,
    pub common_bits: f64,
    pub transform_bits: f64,
    pub model_1_bits: f64,
    pub model_2_bits: f64,
}

fn nmd_parts(cm: &CommonModel, tp: &TransformPair, m1: &Model, m2: &Model) -> Result<NmdResult> {
    if m1.structures.is_empty() && m2.structures.is_empty() {
        return Err(Error::Degenerate);
    }
    let l1 = model_length(m1, false)?;
    let l2 = model_length(m2, false)?;
    let common_bits = common_model_length(cm)?;
    let transform_bits = transform_length_for(tp, cm, false)?;
    let raw = (common_bits + transform_bits - l1.min(l2)) / l1.max(l2);
    let identical = tp.unmatched_1.is_empty() && tp.unmatched_2.is_empty() && tp.deltas.iter().all(|d| d.is_zero());
    // the formula's boundary cases are taken as definitions: nothing shared
    // is distance 1, and shared structures that reproduce both models exactly
    // are distance 0, regardless of header and bookkeeping bits
    let value = if cm.shared.is_empty() {
        1.0
    } else if identical {
        0.0
    } else {
        raw.clamp(0.0, 1.0)
    };
    Ok(NmdResult {
        value,
        raw,
        clamped: raw > 1.0,
        common_bits,
        transform_bits,
        model_1_bits: l1,
        model_2_bits: l2,
    })
}

/// NMD of a description of `m1` and `m2` (in either order). Models are
/// measured without node IDs.
pub fn nmd(desc: &Description, m1: &Model, m2: &Model) -> Result<NmdResult> {
    nmd_parts(&desc.common_model(), &desc.transform(), m1, m2)
}

/// NMD from an alignment produced by [`align_models`].
pub fn nmd_of_alignment(al: &Alignment, m1: &Model, m2: &Model) -> Result<NmdResult> {
    nmd_parts(&al.common, &al.transform, m1, m2)
}

/// Aligns `m1` and `m2` without graphs and returns their NMD.
pub fn model_distance(m1: &Model, m2: &Model, alignment: &NodeAlignment, opts: MatchOptions) -> Result<NmdResult> {
    let al = align_models(m1, m2, alignment, opts)?;
    nmd_of_alignment(&al, m1, m2)
}

/// Content hash of a graph and the configuration used to summarize it.
pub fn cache_key(g: &Graph, cfg: &SummarizerConfig) -> Result<String> {
    let mut h = Sha256::new();
    h.update(g.canonical_bytes());
    h.update(serde_json::to_vec(cfg)?);
    Ok(hex::encode(h.finalize()))
}

/// Directory from [`CACHE_ENV`], if set and non-empty.
pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// Summarizes `g`, reading and writing `<cache>/<key>.json` when a cache
/// directory is given. Unreadable cache entries are recomputed.
pub fn cached_model(g: &Graph, cfg: &SummarizerConfig, cache: Option<&Path>) -> Result<Model> {
    let Some(dir) = cache else {
        return Ok(summarize(g, cfg)?.model);
    };
    let path = dir.join(format!("{}.json", cache_key(g, cfg)?));
    if let Ok(bytes) = fs::read(&path) {
        match serde_json::from_slice::<Model>(&bytes) {
            Ok(m) if m.validate().is_ok() => return Ok(m),
            _ => log::warn!("ignoring unreadable cache entry {}", path.display()),
        }
    }
    let model = summarize(g, cfg)?.model;
    fs::create_dir_all(dir)?;
    // write to a temporary name first so concurrent readers never see a partial file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, serde_json::to_vec(&model)?)?;
    fs::rename(&tmp, &path)?;
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub i: usize,
    pub j: usize,
    pub nmd: Option<NmdResult>,
    /// Both models are empty; the distance is taken to be 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub names: Vec<String>,
    /// Symmetric, zero diagonal.
    pub values: Vec<Vec<f64>>,
    /// One entry per unordered pair `i < j`.
    pub pairs: Vec<PairResult>,
}

impl DistanceMatrix {
    pub fn to_csv(&self) -> String {
        let quote = |s: &str| {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        let mut out = String::new();
        out.push_str(&std::iter::once(String::new()).chain(self.names.iter().map(|n| quote(n))).collect::<Vec<_>>().join(","));
        out.push('\n');
        for (name, row) in self.names.iter().zip(&self.values) {
            out.push_str(&quote(name));
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// NMD of every unordered pair of `models`.
pub fn matrix_from_models(names: Vec<String>, models: &[Model], opts: MatchOptions) -> Result<DistanceMatrix> {
    let k = models.len();
    if k < 2 {
        return Err(Error::Precondition(format!("a distance matrix needs at least 2 graphs, got {k}")));
    }
    if names.len() != k {
        return Err(Error::Precondition(format!("{} names for {k} graphs", names.len())));
    }
    let index: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let pairs = index
        .par_iter()
        .map(|&(i, j)| match model_distance(&models[i], &models[j], &NodeAlignment::new(), opts) {
            Ok(r) => Ok(PairResult {
                i,
                j,
                nmd: Some(r),
                degenerate: false,
            }),
            Err(Error::Degenerate) => Ok(PairResult {
                i,
                j,
                nmd: None,
                degenerate: true,
            }),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values = vec![vec![0.0; k]; k];
    for p in &pairs {
        let v = p.nmd.map_or(0.0, |r| r.value);
        values[p.i][p.j] = v;
        values[p.j][p.i] = v;
    }
    Ok(DistanceMatrix { names, values, pairs })
}

/// Summarizes every graph (through the cache when given) and computes all
/// pairwise distances.
pub fn pairwise_matrix(
    names: Vec<String>,
    graphs: &[Graph],
    cfg: &SummarizerConfig,
    opts: MatchOptions,
    cache: Option<&Path>,
) -> Result<DistanceMatrix> {
    if graphs.len() < 2 {
        return Err(Error::Precondition(format!(
            "a distance matrix needs at least 2 graphs, got {}",
            graphs.len()
        )));
    }
    let models = graphs
        .par_iter()
        .map(|g| cached_model(g, cfg, cache))
        .collect::<Result<Vec<_>>>()?;
    matrix_from_models(names, &models, opts)
}
