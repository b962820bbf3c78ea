//! Common models and the transformations back to the individual models.

use crate::error::{Error, Result};
use crate::model::{CommonModel, CommonStructure, Header, Model, Shape, SlotDeltas, StructureKind, TransformPair};

use super::Matching;

fn ratio(count: u64, max: u64) -> f64 {
    if max == 0 {
        0.0
    } else {
        count as f64 / max as f64
    }
}

fn round_count(x: f64) -> Result<u64> {
    let r = x.round();
    if !(r >= 0.0 && r < u64::MAX as f64) {
        return Err(Error::Invariant(format!("reconstructed count {x} is out of range")));
    }
    Ok(r as u64)
}

/// Common structure of two same-kind shapes: per-slot means of the node
/// fractions and of the edge densities.
pub fn common_structure(a: &Shape, n1: u64, b: &Shape, n2: u64) -> Result<CommonStructure> {
    if a.kind != b.kind {
        return Err(Error::Precondition(format!("cannot average a {} and a {}", a.kind, b.kind)));
    }
    let kind = a.kind;
    let fractions = a
        .nodes
        .iter()
        .zip(&b.nodes)
        .map(|(&x, &y)| (ratio(x, n1) + ratio(y, n2)) / 2.0)
        .collect();
    let (max_a, max_b) = (kind.edge_maxima(&a.nodes), kind.edge_maxima(&b.nodes));
    let densities = a
        .edges
        .iter()
        .zip(&max_a)
        .zip(b.edges.iter().zip(&max_b))
        .map(|((&x, &mx), (&y, &my))| (ratio(x, mx) + ratio(y, my)) / 2.0)
        .collect();
    Ok(CommonStructure {
        kind,
        fractions,
        densities,
    })
}

/// Side-1 deviations from the common expectation at `n1`. Edge expectations
/// use the slot maxima of the actual side-1 node counts.
fn side_one_deltas(cs: &CommonStructure, a: &Shape, n1: u64) -> SlotDeltas {
    let expected = cs.expected_nodes(n1);
    let nodes = a.nodes.iter().zip(&expected).map(|(&c, &e)| c as i64 - e as i64).collect();
    let edges = a
        .edges
        .iter()
        .zip(cs.expected_edges(&a.nodes))
        .map(|(&c, e)| c as i64 - e as i64)
        .collect();
    SlotDeltas { nodes, edges }
}

/// Side-1 shape from the common structure and its deltas.
pub fn apply_deltas(cs: &CommonStructure, d: &SlotDeltas, n1: u64) -> Result<Shape> {
    let (nn, ne) = cs.kind.slot_arity();
    if d.nodes.len() != nn || d.edges.len() != ne {
        return Err(Error::Invariant(format!("delta arity does not match {}", cs.kind)));
    }
    let shift = |base: u64, delta: i64| {
        base.checked_add_signed(delta)
            .ok_or_else(|| Error::Invariant(format!("delta {delta} takes count {base} below zero")))
    };
    let nodes = cs
        .expected_nodes(n1)
        .into_iter()
        .zip(&d.nodes)
        .map(|(e, &x)| shift(e, x))
        .collect::<Result<Vec<_>>>()?;
    let edges = cs
        .expected_edges(&nodes)
        .into_iter()
        .zip(&d.edges)
        .map(|(e, &x)| shift(e, x))
        .collect::<Result<Vec<_>>>()?;
    Shape::new(cs.kind, nodes, edges)
}

/// Side-2 shape inferred from the exact side-1 shape through the mean
/// identity `c12 = (c1/r1 + c2/r2) / 2`.
pub fn infer_side_two(cs: &CommonStructure, side1: &Shape, n1: u64, n2: u64) -> Result<Shape> {
    let nodes = cs
        .fractions
        .iter()
        .zip(&side1.nodes)
        .map(|(&f, &c)| round_count((2.0 * f - ratio(c, n1)) * n2 as f64))
        .collect::<Result<Vec<_>>>()?;
    let max1 = cs.kind.edge_maxima(&side1.nodes);
    let max2 = cs.kind.edge_maxima(&nodes);
    let edges = cs
        .densities
        .iter()
        .zip(side1.edges.iter().zip(&max1))
        .zip(&max2)
        .map(|((&d, (&c, &m1)), &m2)| round_count((2.0 * d - ratio(c, m1)) * m2 as f64))
        .collect::<Result<Vec<_>>>()?;
    Shape::new(cs.kind, nodes, edges)
}

/// Builds the common model of `m1` and `m2` from a matching, together with
/// the side-1 deltas and the unmatched structures of both sides. Requires
/// `m1.n >= m2.n`. Every shared slot is checked to reconstruct exactly on
/// both sides.
pub fn build_common(m1: &Model, m2: &Model, matching: &Matching) -> Result<(CommonModel, TransformPair)> {
    if m1.n < m2.n {
        return Err(Error::Precondition(format!(
            "the first model must describe the larger graph ({} < {})",
            m1.n, m2.n
        )));
    }
    matching.validate(&m1.structures, &m2.structures)?;
    let (n1, n2) = (m1.n, m2.n);
    let mut shared = Vec::with_capacity(matching.len());
    let mut deltas = Vec::with_capacity(matching.len());
    for &(i, j) in &matching.pairs {
        let (a, b) = (m1.structures[i].shape(), m2.structures[j].shape());
        let cs = common_structure(&a, n1, &b, n2)?;
        let d = side_one_deltas(&cs, &a, n1);
        let back1 = apply_deltas(&cs, &d, n1)?;
        let back2 = infer_side_two(&cs, &back1, n1, n2)?;
        if back1 != a || back2 != b {
            return Err(Error::Invariant(format!(
                "pair ({i}, {j}) does not reconstruct: {:?}/{:?} vs {:?}/{:?}",
                back1.nodes, back1.edges, back2.nodes, back2.edges
            )));
        }
        shared.push(cs);
        deltas.push(d);
    }
    let pick = |m: &Model, side: u8| {
        matching
            .unmatched(side, m.structures.len())
            .into_iter()
            .map(|k| m.structures[k].clone())
            .collect()
    };
    let common = CommonModel {
        header: Header {
            n1,
            n2,
            m1: m1.m,
            m2: m2.m,
        },
        shared,
    };
    let transform = TransformPair {
        deltas,
        unmatched_1: pick(m1, 1),
        unmatched_2: pick(m2, 2),
    };
    Ok((common, transform))
}

/// Shapes of both individual models recovered from a common model and its
/// transformation: shared structures in common-model order, followed by the
/// unmatched ones.
pub fn reconstruct_shapes(common: &CommonModel, tp: &TransformPair) -> Result<(Vec<Shape>, Vec<Shape>)> {
    if common.shared.len() != tp.deltas.len() {
        return Err(Error::Invariant(format!(
            "{} delta records for {} shared structures",
            tp.deltas.len(),
            common.shared.len()
        )));
    }
    let Header { n1, n2, .. } = common.header;
    let (mut side1, mut side2) = (Vec::new(), Vec::new());
    for (cs, d) in common.shared.iter().zip(&tp.deltas) {
        let a = apply_deltas(cs, d, n1)?;
        side2.push(infer_side_two(cs, &a, n1, n2)?);
        side1.push(a);
    }
    side1.extend(tp.unmatched_1.iter().map(|s| s.shape()));
    side2.extend(tp.unmatched_2.iter().map(|s| s.shape()));
    Ok((side1, side2))
}

/// Kinds of the shared structures in common-model order.
pub fn shared_kinds(common: &CommonModel) -> Vec<StructureKind> {
    common.shared.iter().map(|s| s.kind).collect()
}
