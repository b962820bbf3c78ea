//! Description lengths, in bits.
//!
//! Only code lengths are computed, never actual bit streams. Every `log` is
//! base 2 and any logarithm of an argument below 1 contributes 0, so
//! `log 0 = 0` and `log log x = 0` whenever `log x < 1`.

use crate::error::{Error, Result};
use crate::model::{CommonModel, Model, Shape, StructureKind, TransformPair};

/// Normalising constant of the universal integer code.
pub const UNIVERSAL_C0: f64 = 2.865064;

/// `log2 x`, or 0 for `x < 1`.
#[inline]
pub fn log2z(x: f64) -> f64 {
    if x < 1.0 {
        0.0
    } else {
        x.log2()
    }
}

/// `log2 log2 x` with the zero guard applied at both levels.
#[inline]
pub fn loglog2z(x: f64) -> f64 {
    log2z(log2z(x))
}

/// Rissanen's universal code length for a positive integer.
pub fn universal_int(n: u64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("universal code needs n >= 1".into()));
    }
    Ok(lnat(n))
}

/// Infallible universal code length; `n` must be at least 1.
pub(crate) fn lnat(n: u64) -> f64 {
    debug_assert!(n >= 1);
    let mut bits = UNIVERSAL_C0.log2();
    let mut x = (n as f64).log2();
    while x > 0.0 {
        bits += x;
        x = x.log2();
    }
    bits
}

/// `log2 C(n, k)`.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("binomial with k={k} > n={n}")));
    }
    Ok(log2_binom(n, k))
}

pub(crate) fn log2_binom(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    if k <= 64 {
        // short products are more accurate than differences of log-gammas
        let mut acc = 0.0f64;
        for i in 1..=k {
            acc += ((n - k + i) as f64 / i as f64).ln();
        }
        return acc / std::f64::consts::LN_2;
    }
    let ln = libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0);
    ln / std::f64::consts::LN_2
}

fn pairs(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Length of a structure of the given shape in a graph with `n` nodes.
pub fn shape_length(shape: &Shape, n: u64, with_ids: bool) -> Result<f64> {
    shape.validate()?;
    match shape.kind {
        StructureKind::Clique => Ok(clique_bits(shape, n, with_ids)),
        StructureKind::Star => star_bits(shape, n, with_ids),
        StructureKind::Biclique | StructureKind::Starclique => two_sided_bits(shape, n, with_ids),
    }
}

fn clique_bits(s: &Shape, n: u64, with_ids: bool) -> f64 {
    let ns = s.nodes[0];
    let max = pairs(ns);
    let present = s.edges[0];
    let absent = max - present;
    let mut bits = lnat(ns) + 1.0 + loglog2z((max / 2) as f64) + log2z(present.min(absent) as f64);
    if with_ids {
        bits += log2_binom(n, ns.min(n));
    }
    bits
}

fn star_bits(s: &Shape, n: u64, with_ids: bool) -> Result<f64> {
    let spokes = s.nodes[0];
    let max = pairs(spokes);
    let mut bits = lnat(spokes) + loglog2z(max as f64) + log2z(s.edges[0] as f64);
    if with_ids {
        if spokes + 1 > n {
            return Err(Error::Invariant(format!("star with {} nodes in a graph of {n}", spokes + 1)));
        }
        bits += log2z(n as f64) + log2_binom(n - 1, spokes);
    }
    Ok(bits)
}

fn two_sided_bits(s: &Shape, n: u64, with_ids: bool) -> Result<f64> {
    let (nl, nr) = (s.nodes[0], s.nodes[1]);
    let ns = nl + nr;
    let (ml, mr, ma) = (s.edges[0], s.edges[1], s.edges[2]);
    let (max_l, max_r, max_a) = (pairs(nl), pairs(nr), nl * nr);
    let left_term = if s.kind == StructureKind::Starclique {
        max_l - ml
    } else {
        ml
    };
    let mut bits = lnat(ns)
        + log2z(ns as f64)
        + loglog2z(max_l as f64)
        + log2z(left_term as f64)
        + loglog2z(max_r as f64)
        + log2z(mr as f64)
        + loglog2z(max_a as f64)
        + log2z((max_a - ma) as f64);
    if with_ids {
        if ns > n {
            return Err(Error::Invariant(format!("{} with {ns} nodes in a graph of {n}", s.kind)));
        }
        bits += log2_binom(n, nl) + log2_binom(n - nl, ns - nl);
    }
    Ok(bits)
}

fn expect_kind(shape: &Shape, kinds: &[StructureKind]) -> Result<()> {
    if kinds.contains(&shape.kind) {
        Ok(())
    } else {
        Err(Error::Domain(format!("unexpected structure kind {}", shape.kind)))
    }
}

pub fn clique_length(shape: &Shape, n: u64, with_ids: bool) -> Result<f64> {
    expect_kind(shape, &[StructureKind::Clique])?;
    shape_length(shape, n, with_ids)
}

pub fn star_length(shape: &Shape, n: u64, with_ids: bool) -> Result<f64> {
    expect_kind(shape, &[StructureKind::Star])?;
    shape_length(shape, n, with_ids)
}

pub fn biclique_length(shape: &Shape, n: u64, with_ids: bool) -> Result<f64> {
    expect_kind(shape, &[StructureKind::Biclique])?;
    shape_length(shape, n, with_ids)
}

pub fn starclique_length(shape: &Shape, n: u64, with_ids: bool) -> Result<f64> {
    expect_kind(shape, &[StructureKind::Starclique])?;
    shape_length(shape, n, with_ids)
}

/// `L_N(|S|+1) + log C(|S|+|Ω|-1, |Ω|-1) + Σ_s (-log Pr(type(s)|S) + L(s))`.
pub fn structure_list_length(shapes: &[Shape], n: u64, with_ids: bool) -> Result<f64> {
    let count = shapes.len() as u64;
    let mut bits = lnat(count + 1) + log2_binom(count + StructureKind::VOCABULARY - 1, StructureKind::VOCABULARY - 1);
    let census = crate::model::census(shapes.iter().map(|s| s.kind));
    for s in shapes {
        let freq = census[s.kind.index()] as f64 / count as f64;
        bits += -freq.log2() + shape_length(s, n, with_ids)?;
    }
    Ok(bits)
}

/// Length of an individual model.
pub fn model_length(model: &Model, with_ids: bool) -> Result<f64> {
    Ok(lnat(model.n + 1) + lnat(model.m + 1) + structure_list_length(&model.shapes(), model.n, with_ids)?)
}

/// Header of the common model: both graph sizes relative to graph 1.
pub fn common_header_length(n1: u64, n2: u64, m1: u64, m2: u64) -> Result<f64> {
    if n1 < n2 {
        return Err(Error::Precondition(format!("common model needs n1 >= n2, got {n1} < {n2}")));
    }
    Ok(lnat(n1 + 1) + lnat(n1 - n2 + 1) + lnat(m1 + 1) + lnat(m1.abs_diff(m2) + 1) + 1.0)
}

/// Length of a common model. Shared structures are measured at reference
/// size `n1`, without node IDs.
pub fn common_model_length(cm: &CommonModel) -> Result<f64> {
    let h = cm.header;
    let header = common_header_length(h.n1, h.n2, h.m1, h.m2)?;
    let shapes: Vec<Shape> = cm.shared.iter().map(|s| s.shape_at(h.n1)).collect();
    Ok(header + structure_list_length(&shapes, h.n1, false)?)
}

/// Length of both transformations. `n1`, `n2` are only used when unmatched
/// structures are encoded with node IDs.
pub fn transform_length(tp: &TransformPair, kinds: &[StructureKind], n1: u64, n2: u64, with_ids: bool) -> Result<f64> {
    if tp.deltas.len() != kinds.len() {
        return Err(Error::Invariant(format!(
            "{} delta records for {} shared structures",
            tp.deltas.len(),
            kinds.len()
        )));
    }
    let mut bits = 0.0;
    for (d, kind) in tp.deltas.iter().zip(kinds) {
        if (d.nodes.len(), d.edges.len()) != kind.slot_arity() {
            return Err(Error::Invariant(format!("delta arity does not match {kind}")));
        }
        // zero deltas are free; non-zero ones send a magnitude plus a direction
        bits += d.all().filter(|&x| x != 0).map(|x| lnat(x.unsigned_abs())).sum::<f64>();
    }
    bits += log2z(tp.direction_count() as f64);
    let side1: Vec<Shape> = tp.unmatched_1.iter().map(|s| s.shape()).collect();
    let side2: Vec<Shape> = tp.unmatched_2.iter().map(|s| s.shape()).collect();
    bits += structure_list_length(&side1, n1, with_ids)?;
    bits += structure_list_length(&side2, n2, with_ids)?;
    Ok(bits)
}

/// Length of a transformation pair against its common model, without IDs.
pub fn transform_length_for(tp: &TransformPair, cm: &CommonModel, with_ids: bool) -> Result<f64> {
    let kinds: Vec<StructureKind> = cm.shared.iter().map(|s| s.kind).collect();
    transform_length(tp, &kinds, cm.header.n1, cm.header.n2, with_ids)
}
