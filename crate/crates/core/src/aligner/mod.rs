//! Matching of two individual models, the common model of the matched
//! structures, and the transformations back to the individual models.
//!
//! All results are expressed in canonical orientation: side 1 is the model
//! with the larger `(n, m)` (ties broken by the serialized structures), so
//! that swapping the inputs yields literally the same common model.

pub mod common;
pub mod matching;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::codec::{common_model_length, transform_length_for};
use crate::error::{Error, Result};
use crate::graph::{jaccard, Graph, NodeAlignment};
use crate::maxent::{build_constraints_for, data_length, fit_from, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::model::{CommonModel, CommonStructure, Header, Model, SlotDeltas, Structure, StructureKind, TransformPair};

pub use common::{build_common, reconstruct_shapes};
pub use matching::{aligned_jaccard, maximal_greedy, overlap_edges, MatchOptions, Matching};
pub use tree::{common_overlap_tree, overlap_tree, structure_labels, OverlapTree};

/// Whether `(a, b)` has to be swapped into canonical orientation.
pub fn needs_swap(a: &Model, b: &Model) -> Result<bool> {
    if (a.n, a.m) != (b.n, b.m) {
        return Ok((a.n, a.m) < (b.n, b.m));
    }
    Ok(serde_json::to_string(&a.structures)? < serde_json::to_string(&b.structures)?)
}

/// Matching, common model and transformations of two models.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    /// The inputs were swapped into canonical orientation.
    pub swapped: bool,
    /// Indices refer to the canonical sides.
    pub matching: Matching,
    pub common: CommonModel,
    pub transform: TransformPair,
}

/// Aligns two models. `alignment` maps nodes of the first input to nodes of
/// the second; an empty alignment selects the unaligned matching.
pub fn align_models(m1: &Model, m2: &Model, alignment: &NodeAlignment, opts: MatchOptions) -> Result<Alignment> {
    let swapped = needs_swap(m1, m2)?;
    let inverse;
    let (a, b, al) = if swapped {
        inverse = alignment.inverse();
        (m2, m1, &inverse)
    } else {
        (m1, m2, alignment)
    };
    let matching = maximal_greedy(&a.structures, &b.structures, al, opts);
    let (common, transform) = build_common(a, b, &matching)?;
    Ok(Alignment {
        swapped,
        matching,
        common,
        transform,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescribeOptions {
    pub matching: MatchOptions,
    pub maxent_tol: f64,
    pub maxent_max_iter: usize,
}

impl Default for DescribeOptions {
    fn default() -> Self {
        DescribeOptions {
            matching: MatchOptions::default(),
            maxent_tol: DEFAULT_TOL,
            maxent_max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// One shared structure with its provenance on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedEntry {
    pub kind: StructureKind,
    pub index_1: usize,
    pub index_2: usize,
    pub fractions: Vec<f64>,
    pub densities: Vec<f64>,
    /// Side-1 deviations from the common expectation.
    pub deltas: SlotDeltas,
    /// Jaccard similarity of the raw node-index sets.
    pub jaccard: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aligned_jaccard: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lengths {
    #[serde(rename = "L_M12")]
    pub common_model: f64,
    /// Transformations with node IDs for the unmatched structures.
    #[serde(rename = "L_delta")]
    pub transform: f64,
    /// `L(G1 | M1) + L(G2 | M2)` with the reconstructed individual models.
    #[serde(rename = "L_data")]
    pub data: f64,
    pub objective: f64,
}

/// Everything the comparison of two graphs produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Description {
    pub swapped: bool,
    pub header: Header,
    pub shared: Vec<SharedEntry>,
    pub unmatched_1: Vec<Structure>,
    pub unmatched_2: Vec<Structure>,
    pub lengths: Lengths,
}

impl Description {
    pub fn common_model(&self) -> CommonModel {
        CommonModel {
            header: self.header,
            shared: self
                .shared
                .iter()
                .map(|e| CommonStructure {
                    kind: e.kind,
                    fractions: e.fractions.clone(),
                    densities: e.densities.clone(),
                })
                .collect(),
        }
    }

    pub fn transform(&self) -> TransformPair {
        TransformPair {
            deltas: self.shared.iter().map(|e| e.deltas.clone()).collect(),
            unmatched_1: self.unmatched_1.clone(),
            unmatched_2: self.unmatched_2.clone(),
        }
    }
}

fn data_bits(g: &Graph, structures: &[Structure], opts: &DescribeOptions) -> Result<f64> {
    let cs = build_constraints_for(g, structures)?;
    let state = fit_from(&cs, &[], opts.maxent_tol, opts.maxent_max_iter);
    if !state.converged {
        log::warn!(
            "max-ent fit stopped after {} sweeps with residual {:e}",
            state.sweeps,
            state.worst_residual
        );
    }
    data_length(&cs, &state)
}

/// Compares `g1` (summarized as `m1`) with `g2` (summarized as `m2`).
pub fn describe(
    g1: &Graph,
    g2: &Graph,
    alignment: &NodeAlignment,
    m1: &Model,
    m2: &Model,
    opts: &DescribeOptions,
) -> Result<Description> {
    let al = align_models(m1, m2, alignment, opts.matching)?;
    let (g1, g2, m1, m2) = if al.swapped { (g2, g1, m2, m1) } else { (g1, g2, m1, m2) };
    let directed = if al.swapped { alignment.inverse() } else { alignment.clone() };

    // the shapes the transformations produce must be the models' own
    let (back1, back2) = reconstruct_shapes(&al.common, &al.transform)?;
    let mut order1: Vec<usize> = al.matching.pairs.iter().map(|p| p.0).collect();
    let mut order2: Vec<usize> = al.matching.pairs.iter().map(|p| p.1).collect();
    order1.extend(al.matching.unmatched(1, m1.structures.len()));
    order2.extend(al.matching.unmatched(2, m2.structures.len()));
    let rebuilt1: Vec<Structure> = order1.iter().map(|&i| m1.structures[i].clone()).collect();
    let rebuilt2: Vec<Structure> = order2.iter().map(|&i| m2.structures[i].clone()).collect();
    let shapes = |v: &[Structure]| v.iter().map(|s| s.shape()).collect::<Vec<_>>();
    if back1 != shapes(&rebuilt1) || back2 != shapes(&rebuilt2) {
        return Err(Error::Invariant("transformations do not reproduce the individual models".into()));
    }

    let (d1, d2) = rayon::join(|| data_bits(g1, &rebuilt1, opts), || data_bits(g2, &rebuilt2, opts));
    let data = d1? + d2?;
    let common_bits = common_model_length(&al.common)?;
    let transform_bits = transform_length_for(&al.transform, &al.common, true)?;

    let shared = al
        .matching
        .pairs
        .iter()
        .zip(al.common.shared.iter().zip(&al.transform.deltas))
        .map(|(&(i, j), (cs, d))| {
            let (x, y) = (&m1.structures[i], &m2.structures[j]);
            SharedEntry {
                kind: cs.kind,
                index_1: i,
                index_2: j,
                fractions: cs.fractions.clone(),
                densities: cs.densities.clone(),
                deltas: d.clone(),
                jaccard: jaccard(&x.nodes(), &y.nodes()),
                aligned_jaccard: (!directed.is_empty()).then(|| aligned_jaccard(x, y, &directed)),
            }
        })
        .collect();
    Ok(Description {
        swapped: al.swapped,
        header: al.common.header,
        shared,
        unmatched_1: al.transform.unmatched_1,
        unmatched_2: al.transform.unmatched_2,
        lengths: Lengths {
            common_model: common_bits,
            transform: transform_bits,
            data,
            objective: common_bits + transform_bits + data,
        },
    })
}
