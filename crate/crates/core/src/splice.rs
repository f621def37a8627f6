//! Splice diagrams, linking numbers and the decomposition of a rooted graph
//! at the node nearest its root.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{has_adjacent_nodes, ResolutionGraph, VertexId};
use crate::lattice::{adjugate, determinant, intersection_matrix, is_negative_definite, IntMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramKind {
    /// Every vertex of the graph, each half-edge weighted.
    Maximal,
    /// Leaves and nodes only; chains of valency-2 vertices suppressed.
    Reduced,
}

/// A splice diagram carrying the original vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpliceDiagram<T> {
    kind: DiagramKind,
    vertices: Vec<VertexId>,
    /// `(v, u) -> weight at v on the edge toward u`.
    half_edges: BTreeMap<(VertexId, VertexId), T>,
    leaf_weights: BTreeMap<VertexId, T>,
    /// Graph vertices hidden inside each diagram edge, listed from the
    /// first endpoint to the second; keyed with the smaller id first.
    suppressed: BTreeMap<(VertexId, VertexId), Vec<VertexId>>,
    order: T,
}

/// `det(-A)` of the branch at `v` through its neighbour `n`.
fn branch_det<T: Scalar>(g: &ResolutionGraph, v: VertexId, n: VertexId) -> T {
    let sub = g.induced(&g.branch(v, n));
    determinant(&intersection_matrix::<T>(&sub).neg())
}

fn require_definite<T: Scalar>(g: &ResolutionGraph) -> Result<T> {
    if g.is_empty() || !g.is_tree() {
        return Err(Error::InvalidGraph("edge set is not a tree".into()));
    }
    let a = intersection_matrix::<T>(g);
    if !is_negative_definite(&a)? {
        return Err(Error::NotNegativeDefinite);
    }
    Ok(determinant(&a.neg()))
}

pub fn maximal_splice_diagram<T: Scalar>(g: &ResolutionGraph) -> Result<SpliceDiagram<T>> {
    let order = require_definite::<T>(g)?;
    let mut half_edges = BTreeMap::new();
    for v in g.vertex_ids() {
        for n in g.neighbors(v) {
            half_edges.insert((v, n), branch_det(g, v, n));
        }
    }
    let leaf_weights = leaf_weights(g, &half_edges);
    Ok(SpliceDiagram {
        kind: DiagramKind::Maximal,
        vertices: g.vertex_ids(),
        half_edges,
        leaf_weights,
        suppressed: BTreeMap::new(),
        order,
    })
}

pub fn splice_diagram<T: Scalar>(g: &ResolutionGraph) -> Result<SpliceDiagram<T>> {
    let order = require_definite::<T>(g)?;
    let kept: BTreeSet<VertexId> = g
        .vertex_ids()
        .into_iter()
        .filter(|&v| g.is_leaf(v) || g.is_node(v))
        .collect();
    let mut half_edges = BTreeMap::new();
    let mut suppressed = BTreeMap::new();
    for &v in &kept {
        for n in g.neighbors(v) {
            // Walk through valency-2 vertices to the next kept vertex.
            let mut inner = Vec::new();
            let (mut prev, mut cur) = (v, n);
            while !kept.contains(&cur) {
                inner.push(cur);
                let next = g
                    .neighbors(cur)
                    .into_iter()
                    .find(|&x| x != prev)
                    .expect("valency-2 vertex has a second neighbour");
                prev = cur;
                cur = next;
            }
            half_edges.insert((v, cur), branch_det(g, v, n));
            if v < cur {
                suppressed.insert((v, cur), inner);
            }
        }
    }
    let leaf_weights = leaf_weights(g, &half_edges);
    Ok(SpliceDiagram {
        kind: DiagramKind::Reduced,
        vertices: kept.into_iter().collect(),
        half_edges,
        leaf_weights,
        suppressed,
        order,
    })
}

/// Leaf weight = `det(-A)` of the graph minus the leaf; 1 for a lone vertex.
fn leaf_weights<T: Scalar>(
    g: &ResolutionGraph,
    half_edges: &BTreeMap<(VertexId, VertexId), T>,
) -> BTreeMap<VertexId, T> {
    g.leaves()
        .into_iter()
        .map(|w| {
            let lw = half_edges
                .range((w, 0)..=(w, VertexId::MAX))
                .map(|(_, x)| x.clone())
                .next()
                .unwrap_or_else(T::one);
            (w, lw)
        })
        .collect()
}

impl<T: Scalar> SpliceDiagram<T> {
    pub fn kind(&self) -> DiagramKind {
        self.kind
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// `|D|` of the source graph.
    pub fn order(&self) -> &T {
        &self.order
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.half_edges
            .range((v, 0)..=(v, VertexId::MAX))
            .map(|(&(_, u), _)| u)
            .collect()
    }

    pub fn weight(&self, v: VertexId, toward: VertexId) -> Option<&T> {
        self.half_edges.get(&(v, toward))
    }

    /// `(neighbour, weight)` pairs at `v`, by neighbour id.
    pub fn weights_at(&self, v: VertexId) -> Vec<(VertexId, T)> {
        self.half_edges
            .range((v, 0)..=(v, VertexId::MAX))
            .map(|(&(_, u), w)| (u, w.clone()))
            .collect()
    }

    pub fn half_edges(&self) -> &BTreeMap<(VertexId, VertexId), T> {
        &self.half_edges
    }

    pub fn leaf_weights(&self) -> &BTreeMap<VertexId, T> {
        &self.leaf_weights
    }

    pub fn leaf_weight(&self, w: VertexId) -> Option<&T> {
        self.leaf_weights.get(&w)
    }

    pub fn nodes(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .copied()
            .filter(|&v| self.neighbors(v).len() >= 3)
            .collect()
    }

    pub fn suppressed(&self, a: VertexId, b: VertexId) -> Option<&[VertexId]> {
        self.suppressed.get(&(a.min(b), a.max(b))).map(Vec::as_slice)
    }

    /// Diagram vertices on the path from `v` to `w`, inclusive.
    pub fn path(&self, v: VertexId, w: VertexId) -> Option<Vec<VertexId>> {
        if !self.contains(v) || !self.contains(w) {
            return None;
        }
        let mut parent = BTreeMap::from([(v, v)]);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for y in self.neighbors(x) {
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(y) {
                    e.insert(x);
                    stack.push(y);
                }
            }
        }
        let mut out = vec![w];
        let mut cur = w;
        while cur != v {
            cur = *parent.get(&cur)?;
            out.push(cur);
        }
        out.reverse();
        Some(out)
    }

    /// Product of the weights adjacent to, but not on, the path from `v` to
    /// `w`. For `v = w` this is the product of all weights at `v`.
    pub fn linking_path(&self, v: VertexId, w: VertexId) -> Result<T> {
        for x in [v, w] {
            if !self.contains(x) {
                return Err(Error::UnknownVertex(x));
            }
        }
        let path = self.path(v, w).ok_or(Error::UnknownVertex(w))?;
        let on: BTreeSet<VertexId> = path.iter().copied().collect();
        let mut acc = T::one();
        for &x in &path {
            for (y, wt) in self.weights_at(x) {
                if !on.contains(&y) {
                    acc = acc * wt;
                }
            }
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        let vertices: Vec<Value> = self
            .vertices
            .iter()
            .map(|&v| {
                let weights: Vec<Value> = self
                    .weights_at(v)
                    .into_iter()
                    .map(|(u, w)| json!({"toward": u, "weight": big_json(&w)}))
                    .collect();
                json!({"id": v, "weights": weights})
            })
            .collect();
        let leaves: Vec<Value> = self
            .leaf_weights
            .iter()
            .map(|(&v, w)| json!({"id": v, "weight": big_json(w)}))
            .collect();
        json!({
            "kind": match self.kind { DiagramKind::Maximal => "maximal", DiagramKind::Reduced => "reduced" },
            "vertices": vertices,
            "leaf_weights": leaves,
        })
    }
}

/// JSON integer, or a decimal string beyond the exactly representable range.
pub fn big_json<T: Scalar>(v: &T) -> Value {
    match v.to_i64() {
        Some(x) if x.unsigned_abs() < 1u64 << 53 => json!(x),
        _ => Value::String(v.to_string()),
    }
}

/// `(ℓ_vw) = adj(-A)`, indexed by vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkingMatrix<T> {
    ids: Vec<VertexId>,
    matrix: IntMatrix<T>,
    order: T,
}

impl<T: Scalar> LinkingMatrix<T> {
    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn matrix(&self) -> &IntMatrix<T> {
        &self.matrix
    }

    /// `|D| = det(-A)`.
    pub fn order(&self) -> &T {
        &self.order
    }

    /// Overwrites `ℓ_vw` and `ℓ_wv`; used to feed deliberately wrong data to
    /// the checkers.
    pub fn set(&mut self, v: VertexId, w: VertexId, value: T) {
        let i = self.ids.binary_search(&v).expect("known id");
        let j = self.ids.binary_search(&w).expect("known id");
        self.matrix[(i, j)] = value.clone();
        self.matrix[(j, i)] = value;
    }

    pub fn get(&self, v: VertexId, w: VertexId) -> Option<&T> {
        let i = self.ids.binary_search(&v).ok()?;
        let j = self.ids.binary_search(&w).ok()?;
        Some(&self.matrix[(i, j)])
    }

    /// `ℓ_vw`, panicking on unknown ids.
    pub fn at(&self, v: VertexId, w: VertexId) -> T {
        self.get(v, w)
            .unwrap_or_else(|| panic!("no linking entry for ({v}, {w})"))
            .clone()
    }
}

pub fn linking_matrix<T: Scalar>(g: &ResolutionGraph) -> Result<LinkingMatrix<T>> {
    let order = require_definite::<T>(g)?;
    Ok(LinkingMatrix {
        ids: g.vertex_ids(),
        matrix: adjugate(&intersection_matrix::<T>(g).neg()),
        order,
    })
}

/// Non-root leaves of `(Γ, root)` in ascending id; a lone vertex is its own
/// leaf.
pub fn rooted_leaves(g: &ResolutionGraph, root: VertexId) -> Vec<VertexId> {
    if g.len() == 1 {
        return g.vertex_ids();
    }
    g.leaves().into_iter().filter(|&w| w != root).collect()
}

/// One rooted piece `(Γ_i, *_i)` hanging off the distinguished node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part<T> {
    pub graph: ResolutionGraph,
    pub root: VertexId,
    pub order: T,
    /// Non-root leaves of the part.
    pub leaves: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedDecomposition<T> {
    pub root: VertexId,
    pub star_node: VertexId,
    /// Vertices strictly between the root and the star node.
    pub chain: Vec<VertexId>,
    /// Weight at the star node toward the root.
    pub c: T,
    /// Ordered by smallest contained leaf id.
    pub parts: Vec<Part<T>>,
}

impl<T: Scalar> RootedDecomposition<T> {
    pub fn k(&self) -> usize {
        self.parts.len()
    }

    /// `𝒟 = |D_1| ⋯ |D_k|`.
    pub fn big_d(&self) -> T {
        self.parts.iter().fold(T::one(), |a, p| a * p.order.clone())
    }

    /// `𝒟_i = 𝒟 / |D_i|`.
    pub fn big_d_i(&self, i: usize) -> T {
        self.parts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(T::one(), |a, (_, p)| a * p.order.clone())
    }

    pub fn part_of_leaf(&self, w: VertexId) -> Option<usize> {
        self.parts.iter().position(|p| p.leaves.contains(&w))
    }
}

pub fn decompose_at_root<T: Scalar>(
    g: &ResolutionGraph,
    root: VertexId,
) -> Result<RootedDecomposition<T>> {
    if !g.contains(root) {
        return Err(Error::UnknownRoot(root));
    }
    if !g.is_leaf(root) {
        return Err(Error::NotALeaf(root));
    }
    if g.is_string() {
        return Err(Error::StringGraph);
    }
    if has_adjacent_nodes(g) {
        return Err(Error::AdjacentNodes);
    }
    let mut chain = Vec::new();
    let (mut prev, mut cur) = (root, g.neighbors(root)[0]);
    while !g.is_node(cur) {
        chain.push(cur);
        let next = g
            .neighbors(cur)
            .into_iter()
            .find(|&x| x != prev)
            .expect("the path from a leaf reaches a node");
        prev = cur;
        cur = next;
    }
    let star = cur;
    let c = branch_det::<T>(g, star, prev);
    let mut parts: Vec<Part<T>> = g
        .neighbors(star)
        .into_iter()
        .filter(|&n| n != prev)
        .map(|n| {
            let sub = g.induced(&g.branch(star, n)).with_root(Some(n)).expect("n in sub");
            let order = determinant(&intersection_matrix::<T>(&sub).neg());
            let leaves = rooted_leaves(&sub, n);
            Part {
                graph: sub,
                root: n,
                order,
                leaves,
            }
        })
        .collect();
    parts.sort_by_key(|p| p.leaves.iter().min().copied());
    Ok(RootedDecomposition {
        root,
        star_node: star,
        chain,
        c,
        parts,
    })
}

/// Outcome of checking the three linking identities at a root.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinkIdentityReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl LinkIdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, with exact integers, for leaves `w`, `w'`:
/// `ℓ_w = ℓ̃_w 𝒟_i = ℓ̃_w ℓ_{v*v*} / (c |D_i|)`,
/// `ℓ_{v*v*} ℓ_{ww'} = c² ℓ_w ℓ_{w'}` across parts, and
/// `ℓ_{ww'} |D_i|² = ℓ̃_{ww'} |D| |D_i| + ℓ̃_w ℓ̃_{w'} ℓ_{v*v*}` within a part.
pub fn check_link_identities<T: Scalar>(
    g: &ResolutionGraph,
    root: VertexId,
) -> Result<LinkIdentityReport> {
    let dec = decompose_at_root::<T>(g, root)?;
    let lk = linking_matrix::<T>(g)?;
    check_link_identities_with(&dec, &lk)
}

/// As [`check_link_identities`] but against a supplied linking matrix.
pub fn check_link_identities_with<T: Scalar>(
    dec: &RootedDecomposition<T>,
    lk: &LinkingMatrix<T>,
) -> Result<LinkIdentityReport> {
    let mut rep = LinkIdentityReport::default();
    let star = dec.star_node;
    let root = dec.root;
    let l_ss = lk.at(star, star);
    let c = dec.c.clone();
    let order = lk.order().clone();
    let tilde: Vec<LinkingMatrix<T>> = dec
        .parts
        .iter()
        .map(|p| linking_matrix::<T>(&p.graph))
        .collect::<Result<_>>()?;

    let fail = |rep: &mut LinkIdentityReport, msg: String| rep.failures.push(msg);

    for (i, p) in dec.parts.iter().enumerate() {
        let di = &p.order;
        let others = dec.big_d_i(i);
        for &w in &p.leaves {
            rep.checked += 1;
            let lw = lk.at(w, root);
            let tw = tilde[i].at(w, p.root);
            if lw != tw.clone() * others.clone() {
                fail(&mut rep, format!("identity 1a at leaf {w}: {lw} != {tw} * {others}"));
            }
            if lw.clone() * c.clone() * di.clone() != tw.clone() * l_ss.clone() {
                fail(&mut rep, format!("identity 1b at leaf {w}"));
            }
        }
    }
    for (i, p) in dec.parts.iter().enumerate() {
        for q in dec.parts.iter().skip(i + 1) {
            for &w in &p.leaves {
                for &w2 in &q.leaves {
                    rep.checked += 1;
                    let lhs = l_ss.clone() * lk.at(w, w2);
                    let rhs = c.clone() * c.clone() * lk.at(w, root) * lk.at(w2, root);
                    if lhs != rhs {
                        fail(&mut rep, format!("identity 2 at leaves {w}, {w2}: {lhs} != {rhs}"));
                    }
                }
            }
        }
    }
    for (i, p) in dec.parts.iter().enumerate() {
        let di = &p.order;
        for &w in &p.leaves {
            for &w2 in p.leaves.iter().filter(|&&x| x >= w) {
                rep.checked += 1;
                let lhs = lk.at(w, w2) * di.clone() * di.clone();
                let rhs = tilde[i].at(w, w2) * order.clone() * di.clone()
                    + tilde[i].at(w, p.root) * tilde[i].at(w2, p.root) * l_ss.clone();
                if lhs != rhs {
                    fail(&mut rep, format!("identity 3 at leaves {w}, {w2}: {lhs} != {rhs}"));
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{chain, e8, star, two_node_example, x4_y9_double_cover};
    use num_bigint::BigInt;

    fn w(d: &SpliceDiagram<i64>, v: VertexId, u: VertexId) -> i64 {
        *d.weight(v, u).unwrap()
    }

    #[test]
    fn maximal_diagram_of_two_node_example() {
        let g = two_node_example();
        let d = maximal_splice_diagram::<i64>(&g).unwrap();
        // left node 5
        assert_eq!((w(&d, 5, 2), w(&d, 5, 1), w(&d, 5, 6)), (2, 3, 9));
        // chain vertex 6
        assert_eq!((w(&d, 6, 5), w(&d, 6, 7)), (7, 5));
        // right node 7
        assert_eq!((w(&d, 7, 6), w(&d, 7, 8), w(&d, 7, 4)), (15, 3, 2));
        // arm vertex 8
        assert_eq!((w(&d, 8, 7), w(&d, 8, 3)), (31, 2));
        let lw: Vec<i64> = [1, 2, 3, 4].iter().map(|v| *d.leaf_weight(*v).unwrap()).collect();
        assert_eq!(lw, vec![17, 30, 32, 39]);
        assert_eq!(*d.order(), 33);
    }

    #[test]
    fn reduced_diagrams() {
        let d = splice_diagram::<i64>(&two_node_example()).unwrap();
        assert_eq!(d.vertices(), &[1, 2, 3, 4, 5, 7]);
        assert_eq!(d.nodes(), vec![5, 7]);
        let at5: Vec<i64> = d.weights_at(5).into_iter().map(|x| x.1).collect();
        assert_eq!(at5, vec![3, 2, 9]);
        let at7: Vec<i64> = d.weights_at(7).into_iter().map(|x| x.1).collect();
        assert_eq!(at7, vec![3, 2, 15]);
        assert_eq!(d.suppressed(5, 7), Some(&[6][..]));
        assert_eq!(d.suppressed(7, 3), Some(&[8][..]));

        let s = splice_diagram::<i64>(&x4_y9_double_cover()).unwrap();
        let mut ws: Vec<i64> = s.weights_at(3).into_iter().map(|x| x.1).collect();
        ws.sort_unstable();
        assert_eq!(ws, vec![2, 9, 9]);
        assert_eq!(*s.order(), 9);

        let e = splice_diagram::<i64>(&e8()).unwrap();
        let ws: Vec<i64> = e.weights_at(8).into_iter().map(|x| x.1).collect();
        assert_eq!(ws, vec![5, 3, 2]);
    }

    #[test]
    fn chains_and_lone_vertices() {
        let d = maximal_splice_diagram::<i64>(&chain(&[-2, -3])).unwrap();
        assert_eq!((w(&d, 1, 2), w(&d, 2, 1)), (3, 2));
        let one = maximal_splice_diagram::<i64>(&chain(&[-4])).unwrap();
        assert!(one.half_edges().is_empty());
        assert_eq!(one.linking_path(1, 1).unwrap(), 1);
        assert_eq!(linking_matrix::<i64>(&chain(&[-4])).unwrap().at(1, 1), 1);
        let lk = linking_matrix::<i64>(&chain(&[-2, -3])).unwrap();
        assert_eq!(lk.matrix(), &IntMatrix::from_i64_rows(&[&[3, 1], &[1, 2]]));
    }

    #[test]
    fn path_products() {
        let d = splice_diagram::<i64>(&two_node_example()).unwrap();
        let row: Vec<i64> = [1, 2, 3, 4].iter().map(|&x| d.linking_path(1, x).unwrap()).collect();
        assert_eq!(row, vec![17, 9, 4, 6]);
        assert_eq!(d.linking_path(5, 5).unwrap(), 54);
        assert_eq!(d.linking_path(2, 3).unwrap(), 6);
        assert!(matches!(d.linking_path(6, 1), Err(Error::UnknownVertex(6))));
    }

    /// Adjugate entries agree with path products on every vertex pair.
    fn agree(g: &ResolutionGraph) {
        let d = maximal_splice_diagram::<BigInt>(g).unwrap();
        let lk = linking_matrix::<BigInt>(g).unwrap();
        for &v in lk.ids() {
            for &u in lk.ids() {
                assert_eq!(d.linking_path(v, u).unwrap(), lk.at(v, u), "pair {v} {u}");
            }
        }
        let r = splice_diagram::<BigInt>(g).unwrap();
        for &v in r.vertices() {
            for &u in r.vertices() {
                assert_eq!(r.linking_path(v, u).unwrap(), lk.at(v, u));
            }
        }
    }

    #[test]
    fn two_linking_computations_agree() {
        agree(&two_node_example());
        agree(&x4_y9_double_cover());
        agree(&e8());
        agree(&chain(&[-2, -5, -1, -3]));
        agree(&star(-1, &[&[-2], &[-3], &[-7]]));
    }

    #[test]
    fn decomposition_of_two_node_example() {
        let g = two_node_example();
        let dec = decompose_at_root::<i64>(&g, 1).unwrap();
        assert_eq!(dec.star_node, 5);
        assert!(dec.chain.is_empty());
        assert_eq!(dec.c, 3);
        assert_eq!(dec.k(), 2);
        assert_eq!(dec.parts[0].root, 2);
        assert_eq!(dec.parts[0].leaves, vec![2]);
        assert_eq!(dec.parts[0].order, 2);
        assert_eq!(dec.parts[1].root, 6);
        assert_eq!(dec.parts[1].leaves, vec![3, 4]);
        assert_eq!(dec.parts[1].order, 9);
        assert_eq!(dec.big_d(), 18);

        let dec3 = decompose_at_root::<i64>(&g, 3).unwrap();
        assert_eq!(dec3.star_node, 7);
        assert_eq!(dec3.chain, vec![8]);
        assert_eq!(dec3.c, 3);
        assert_eq!(dec3.parts.iter().map(|p| p.order).collect::<Vec<_>>(), vec![15, 2]);
    }

    #[test]
    fn decomposition_errors() {
        let g = two_node_example();
        assert!(matches!(decompose_at_root::<i64>(&g, 5), Err(Error::NotALeaf(5))));
        assert!(matches!(
            decompose_at_root::<i64>(&chain(&[-2, -2]), 1),
            Err(Error::StringGraph)
        ));
        let adj = ResolutionGraph::new(
            (1..=6).map(|i| (i, -3)),
            [(1, 2), (1, 3), (1, 4), (4, 5), (4, 6)],
            None,
        )
        .unwrap();
        assert!(matches!(decompose_at_root::<i64>(&adj, 2), Err(Error::AdjacentNodes)));
    }

    #[test]
    fn star_parts_are_strings() {
        let g = star(-2, &[&[-2], &[-3, -2], &[-5]]);
        let root = g.leaves()[0];
        let dec = decompose_at_root::<i64>(&g, root).unwrap();
        assert_eq!(dec.k(), 2);
        assert!(dec.parts.iter().all(|p| p.graph.is_string()));
    }

    #[test]
    fn link_identities_hold() {
        for g in [two_node_example(), x4_y9_double_cover(), e8()] {
            for root in g.leaves() {
                let rep = check_link_identities::<BigInt>(&g, root).unwrap();
                assert!(rep.passed(), "{:?}", rep.failures);
                assert!(rep.checked > 0);
            }
        }
    }

    #[test]
    fn identity_two_on_example_values() {
        // ℓ_{v*v*} ℓ_{Y2 Y3} = c² ℓ_{Y2} ℓ_{Y3} at root Y1: 54·6 = 9·9·4
        let lk = linking_matrix::<i64>(&two_node_example()).unwrap();
        assert_eq!(lk.at(5, 5) * lk.at(2, 3), 9 * lk.at(2, 1) * lk.at(3, 1));
    }

    #[test]
    fn corrupted_linking_is_caught() {
        let g = two_node_example();
        let dec = decompose_at_root::<i64>(&g, 1).unwrap();
        let mut lk = linking_matrix::<i64>(&g).unwrap();
        lk.set(2, 3, 7);
        let rep = check_link_identities_with(&dec, &lk).unwrap();
        assert!(!rep.passed());
        assert!(rep.failures[0].contains("identity 2"));
    }
}
