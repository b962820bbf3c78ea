//! Greedy MDL graph summarization.
//!
//! The graph is decomposed into seed components, every component yields at
//! most one candidate per structure kind, same-kind candidates are merged,
//! and the candidates are then tried largest first. A candidate is kept if
//! adding it lowers the total description length `L(M) + L(G | M)`.

pub mod candidates;
pub mod clique;
pub mod decompose;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::model_length;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::maxent::{build_constraints_for, data_length, fit_from};
use crate::model::{Model, Structure, StructureKind};

pub use candidates::{grow_biclique, grow_clique, grow_star, grow_starclique, maximal_independent_set, merge_candidates};
pub use clique::max_clique;
pub use decompose::decompose;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SummarizerConfig {
    pub min_component_size: usize,
    /// Use [`SMALL_GRAPH_MIN_SIZE`] instead of `min_component_size` on
    /// graphs with fewer than [`SMALL_GRAPH_NODES`] nodes.
    pub small_graph_mode: bool,
    pub max_structures: usize,
    pub max_rejections: usize,
    /// Count only consecutive rejections towards `max_rejections`.
    pub consecutive_rejections: bool,
    pub merge_overlap: f64,
    pub merge_basis: MergeBasis,
    pub clique_attach_frac: f64,
    pub star_spoke_degree_frac: f64,
    pub star_prune_base: f64,
    pub star_prune_step: f64,
    pub biclique_seed_cap: usize,
    pub biclique_min_left: usize,
    pub biclique_min_right: usize,
    pub dense_frac: f64,
    pub sparse_frac: f64,
    pub maxent_tol: f64,
    pub maxent_max_iter: usize,
}

/// Denominator of the overlap fraction used when merging candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeBasis {
    /// Shared nodes over the union (Jaccard).
    Union,
    /// Shared nodes over the smaller set (containment).
    Smaller,
}

pub const SMALL_GRAPH_NODES: usize = 500;
pub const SMALL_GRAPH_MIN_SIZE: usize = 3;

impl Default for SummarizerConfig {
    fn default() -> Self {
        SummarizerConfig {
            min_component_size: 10,
            small_graph_mode: true,
            max_structures: 100,
            max_rejections: 300,
            consecutive_rejections: false,
            merge_overlap: 0.9,
            merge_basis: MergeBasis::Union,
            clique_attach_frac: 0.5,
            star_spoke_degree_frac: 0.05,
            star_prune_base: 0.1,
            star_prune_step: 0.01,
            biclique_seed_cap: 5,
            biclique_min_left: 3,
            biclique_min_right: 5,
            dense_frac: 0.5,
            sparse_frac: 0.05,
            maxent_tol: crate::maxent::DEFAULT_TOL,
            maxent_max_iter: crate::maxent::DEFAULT_MAX_ITER,
        }
    }
}

impl SummarizerConfig {
    pub fn validate(&self) -> Result<()> {
        let fractions = [
            ("merge_overlap", self.merge_overlap),
            ("clique_attach_frac", self.clique_attach_frac),
            ("star_spoke_degree_frac", self.star_spoke_degree_frac),
            ("star_prune_base", self.star_prune_base),
            ("star_prune_step", self.star_prune_step),
            ("dense_frac", self.dense_frac),
            ("sparse_frac", self.sparse_frac),
        ];
        for (name, v) in fractions {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        let counts = [
            ("min_component_size", self.min_component_size),
            ("max_structures", self.max_structures),
            ("max_rejections", self.max_rejections),
            ("biclique_seed_cap", self.biclique_seed_cap),
            ("biclique_min_left", self.biclique_min_left),
            ("biclique_min_right", self.biclique_min_right),
            ("maxent_max_iter", self.maxent_max_iter),
        ];
        for (name, v) in counts {
            if v < 1 {
                return Err(Error::InvalidParameter(format!("{name} must be at least 1")));
            }
        }
        if self.maxent_tol.is_nan() || self.maxent_tol <= 0.0 {
            return Err(Error::InvalidParameter("maxent_tol must be positive".into()));
        }
        Ok(())
    }

    /// Size threshold in effect for a graph with `n` nodes.
    pub fn effective_min_size(&self, n: usize) -> usize {
        if self.small_graph_mode && n < SMALL_GRAPH_NODES {
            SMALL_GRAPH_MIN_SIZE.min(self.min_component_size)
        } else {
            self.min_component_size
        }
    }
}

/// One admission decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    /// Position of the candidate in the sorted candidate list.
    pub candidate: usize,
    pub kind: StructureKind,
    pub nodes: usize,
    pub edges: u64,
    pub accepted: bool,
    /// Total length `L(M) + L(G|M)` before the decision.
    pub bits_before: f64,
    /// Total length with the candidate added.
    pub bits_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub model: Model,
    pub ledger: Vec<LedgerEntry>,
    pub min_size: usize,
    pub components: usize,
    pub candidates_generated: usize,
    pub candidates_tested: usize,
    pub accepted: usize,
    pub rejected: usize,
    /// Length of the empty model plus its data term.
    pub baseline_bits: f64,
    pub model_bits: f64,
    pub data_bits: f64,
    /// Percentage of the baseline length saved by the model.
    pub compression_pct: f64,
    /// Whether every max-ent fit met its tolerance.
    pub converged: bool,
}

impl Summary {
    pub fn total_bits(&self) -> f64 {
        self.model_bits + self.data_bits
    }

    pub fn bits_saved(&self) -> f64 {
        self.baseline_bits - self.total_bits()
    }
}

/// Candidates from every seed for every kind, merged per kind and sorted by
/// descending `(n_s, m_s)` (stable, so generation order breaks ties).
pub fn generate_candidates(g: &Graph, seeds: &[Vec<NodeId>], cfg: &SummarizerConfig, min_size: usize) -> Vec<Structure> {
    let cores: Vec<Vec<NodeId>> = seeds.par_iter().map(|seed| clique::max_clique(g, seed)).collect();
    let mut all = Vec::new();
    for kind in StructureKind::ALL {
        let found: Vec<Structure> = seeds
            .par_iter()
            .zip(&cores)
            .filter_map(|(seed, core)| candidates::grow_with_core(kind, g, seed, core, cfg, min_size))
            .collect();
        all.extend(merge_candidates(g, found, cfg.merge_overlap, cfg.merge_basis));
    }
    all.sort_by_key(|s| std::cmp::Reverse(s.size_key()));
    all
}

struct Evaluation {
    model_bits: f64,
    data_bits: f64,
    lambdas: Vec<f64>,
    converged: bool,
}

fn evaluate(g: &Graph, structures: &[Structure], warm: &[f64], cfg: &SummarizerConfig) -> Result<Evaluation> {
    let model = Model {
        n: g.node_count() as u64,
        m: g.edge_count() as u64,
        structures: structures.to_vec(),
    };
    let model_bits = model_length(&model, true)?;
    let cs = build_constraints_for(g, structures)?;
    let state = fit_from(&cs, warm, cfg.maxent_tol, cfg.maxent_max_iter);
    if !state.converged {
        log::warn!(
            "max-ent fit with {} structures stopped after {} sweeps, residual {:e}",
            structures.len(),
            state.sweeps,
            state.worst_residual
        );
    }
    Ok(Evaluation {
        model_bits,
        data_bits: data_length(&cs, &state)?,
        converged: state.converged,
        lambdas: state.lambdas,
    })
}

/// Summarizes `g`.
pub fn summarize(g: &Graph, cfg: &SummarizerConfig) -> Result<Summary> {
    cfg.validate()?;
    let min_size = cfg.effective_min_size(g.node_count());
    let seeds = decompose(g, min_size);
    let cands = generate_candidates(g, &seeds, cfg, min_size);
    let generated = cands.len();
    log::info!("{} seed components, {generated} candidates", seeds.len());

    let base = evaluate(g, &[], &[], cfg)?;
    let baseline_bits = base.model_bits + base.data_bits;
    let mut current = base;
    let mut converged = current.converged;
    let mut structures: Vec<Structure> = Vec::new();
    let mut ledger = Vec::new();
    let (mut rejected, mut streak) = (0usize, 0usize);

    for (idx, cand) in cands.into_iter().enumerate() {
        if structures.len() >= cfg.max_structures {
            break;
        }
        let limit_hit = if cfg.consecutive_rejections { streak } else { rejected };
        if limit_hit >= cfg.max_rejections {
            break;
        }
        let before = current.model_bits + current.data_bits;
        structures.push(cand);
        let trial = evaluate(g, &structures, &current.lambdas, cfg)?;
        let after = trial.model_bits + trial.data_bits;
        let s = structures.last().unwrap();
        let accepted = after < before;
        ledger.push(LedgerEntry {
            candidate: idx,
            kind: s.kind(),
            nodes: s.node_count(),
            edges: s.edge_count(),
            accepted,
            bits_before: before,
            bits_after: after,
        });
        if accepted {
            converged &= trial.converged;
            current = trial;
            streak = 0;
        } else {
            structures.pop();
            rejected += 1;
            streak += 1;
        }
    }

    let total = current.model_bits + current.data_bits;
    Ok(Summary {
        model: Model {
            n: g.node_count() as u64,
            m: g.edge_count() as u64,
            structures,
        },
        accepted: ledger.iter().filter(|e| e.accepted).count(),
        rejected,
        candidates_generated: generated,
        candidates_tested: ledger.len(),
        components: seeds.len(),
        min_size,
        ledger,
        baseline_bits,
        model_bits: current.model_bits,
        data_bits: current.data_bits,
        compression_pct: if baseline_bits > 0.0 {
            100.0 * (baseline_bits - total) / baseline_bits
        } else {
            0.0
        },
        converged,
    })
}

/// Total description length `L(M) + L(G|M)` of an arbitrary model of `g`,
/// with node IDs. Returns `(model bits, data bits)`.
pub fn description_length(g: &Graph, model: &Model, cfg: &SummarizerConfig) -> Result<(f64, f64)> {
    let e = evaluate(g, &model.structures, &[], cfg)?;
    Ok((e.model_bits, e.data_bits))
}
