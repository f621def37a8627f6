//! Small named graphs used in tests, examples and the CLI.

use crate::graph::{ResolutionGraph, VertexId};

/// Two nodes joined through a `-3` vertex; leaves `1..=4`, nodes 5 and 7.
///
/// ```text
///   1(-3)            8(-2) - 3(-2)
///        \          /
///         5(-2) - 6(-3) - 7(-2)
///        /                 \
///   2(-2)                   4(-2)
/// ```
pub fn two_node_example() -> ResolutionGraph {
    ResolutionGraph::new(
        [(1, -3), (2, -2), (3, -2), (4, -2), (5, -2), (6, -3), (7, -2), (8, -2)],
        [(1, 5), (2, 5), (5, 6), (6, 7), (7, 8), (8, 3), (7, 4)],
        None,
    )
    .expect("static graph")
}

/// Resolution graph of `z^2 = x^4 + y^9`: a `-1` node with a `-2` leaf and
/// two `-5, -2` arms. Leaves 1, 5, 6; node 3.
pub fn x4_y9_double_cover() -> ResolutionGraph {
    ResolutionGraph::new(
        [(1, -2), (2, -5), (3, -1), (4, -5), (5, -2), (6, -2)],
        [(1, 2), (2, 3), (3, 4), (4, 5), (3, 6)],
        None,
    )
    .expect("static graph")
}

/// The `E8` tree: a `-2` node with arms of lengths 1, 2 and 4.
/// Leaf 1 ends the long arm, leaf 5 the middle one, leaf 7 the short one.
pub fn e8() -> ResolutionGraph {
    star(-2, &[&[-2, -2, -2, -2], &[-2, -2], &[-2]])
}

/// A chain with ids `1..=n` in order.
pub fn chain(weights: &[i64]) -> ResolutionGraph {
    ResolutionGraph::new(
        weights.iter().enumerate().map(|(i, &w)| (i as VertexId + 1, w)),
        (1..weights.len() as VertexId).map(|i| (i, i + 1)),
        None,
    )
    .expect("chain")
}

/// One node with the given arms, each listed from the node outward.
///
/// Arm vertices are numbered consecutively from 1 with the leaf of arm `i`
/// getting a smaller id than every vertex of arm `i + 1`; the node comes
/// last. Hence leaf order follows arm order.
pub fn star(node_weight: i64, arms: &[&[i64]]) -> ResolutionGraph {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut next: VertexId = 1;
    let node = arms.iter().map(|a| a.len() as VertexId).sum::<VertexId>() + 1;
    for arm in arms {
        // Leaf first so that ids increase toward the node.
        let ids: Vec<VertexId> = (0..arm.len() as VertexId).map(|k| next + k).collect();
        next += arm.len() as VertexId;
        for (k, &w) in arm.iter().rev().enumerate() {
            vertices.push((ids[k], w));
        }
        for k in 1..ids.len() {
            edges.push((ids[k - 1], ids[k]));
        }
        edges.push((*ids.last().expect("non-empty arm"), node));
    }
    vertices.push((node, node_weight));
    ResolutionGraph::new(vertices, edges, None).expect("star")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let g = two_node_example();
        assert_eq!(g.leaves(), vec![1, 2, 3, 4]);
        assert_eq!(g.nodes(), vec![5, 7]);
        let e = e8();
        assert_eq!(e.len(), 8);
        assert_eq!(e.nodes(), vec![8]);
        assert_eq!(e.leaves(), vec![1, 5, 7]);
        let s = x4_y9_double_cover();
        assert_eq!(s.leaves(), vec![1, 5, 6]);
        assert!(s.validate().is_valid());
    }
}
