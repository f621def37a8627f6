//! Splice diagram equations for a whole graph and the diagonal action of
//! the discriminant group on the leaf variables.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dcurve::render_monomial;
use crate::error::{Error, Result};
use crate::graph::{ResolutionGraph, VertexId};
use crate::lattice::determinant;
use crate::scalar::gcd_all;
use crate::semigroup::{edges_at, grlex_cmp, leaves_beyond, Edge, NodeContext};
use crate::splice::{big_json, linking_matrix};
use crate::{DClass, Int, Matrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedWeights {
    /// `ℓ_{v w}` over the leaves `w`.
    pub unreduced: Vec<Int>,
    pub gcd: Int,
    pub reduced: Vec<Int>,
    /// `ℓ_vv / gcd`.
    pub total: Int,
}

pub fn reduced_weights(g: &ResolutionGraph, v: VertexId) -> Result<ReducedWeights> {
    if !g.is_node(v) {
        return Err(Error::NotANode(v));
    }
    let lk = linking_matrix::<Int>(g)?;
    let unreduced: Vec<Int> = g.leaves().iter().map(|&w| lk.at(v, w)).collect();
    let gcd = gcd_all(&unreduced);
    Ok(ReducedWeights {
        reduced: unreduced.iter().map(|x| x / &gcd).collect(),
        total: lk.at(v, v) / &gcd,
        unreduced,
        gcd,
    })
}

/// Row `e_v` lists `ℓ_{v w_j}` for the leaves `w_j`: `e_v` multiplies `Y_j`
/// by `ζ^{ℓ_{v w_j}}` with `ζ = exp(-2πi/|D|)`. Entries are unreduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DActionTable {
    pub order: Int,
    pub leaves: Vec<VertexId>,
    pub rows: Vec<(VertexId, Vec<Int>)>,
}

impl DActionTable {
    pub fn row(&self, v: VertexId) -> Option<&[Int]> {
        self.rows.iter().find(|(w, _)| *w == v).map(|(_, r)| r.as_slice())
    }

    /// Whether `e_v` acts on `Y_w` by `ζ^k`.
    pub fn acts_by(&self, v: VertexId, w: VertexId, k: &Int) -> bool {
        let Some(row) = self.row(v) else { return false };
        let Ok(j) = self.leaves.binary_search(&w) else { return false };
        (&row[j] - k).mod_floor(&self.order).is_zero()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": big_json(&self.order),
            "leaves": self.leaves,
            "rows": self.rows.iter().map(|(v, r)| json!({
                "generator": v,
                "zeta_exponents": r.iter().map(big_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (v, r) in &self.rows {
            let ex: Vec<String> = r.iter().map(|x| format!("z^{x}")).collect();
            s.push_str(&format!("e{v} = <{}>\n", ex.join(", ")));
        }
        s
    }
}

pub fn d_action(g: &ResolutionGraph) -> Result<DActionTable> {
    let lk = linking_matrix::<Int>(g)?;
    let order = lk.order().clone();
    let leaves = g.leaves();
    let rows = if order.is_one() {
        Vec::new()
    } else {
        leaves
            .iter()
            .map(|&v| (v, leaves.iter().map(|&w| lk.at(v, w)).collect()))
            .collect()
    };
    Ok(DActionTable {
        order,
        leaves,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeEquations {
    pub node: VertexId,
    pub edges: Vec<Edge>,
    pub weights: ReducedWeights,
    /// `M_vj`, one per edge, over all leaves.
    pub monomials: Vec<Vec<u64>>,
    /// `(δ_v - 2) × δ_v`.
    pub coefficients: Vec<Vec<Int>>,
    /// Common class of the monomials; `None` for a non-equivariant system.
    pub dclass: Option<DClass>,
    /// Higher-order terms may be added above this reduced weight.
    pub higher_order_threshold: Int,
}

impl NodeEquations {
    pub fn render(&self, leaves: &[VertexId]) -> Vec<String> {
        self.coefficients
            .iter()
            .map(|row| {
                let mut s = String::new();
                for (c, m) in row.iter().zip(&self.monomials) {
                    if c.is_zero() {
                        continue;
                    }
                    let mono = render_monomial(m, leaves);
                    let mag = c.abs();
                    let term = if mag.is_one() { mono } else { format!("{mag}*{mono}") };
                    match (s.is_empty(), c.is_negative()) {
                        (true, false) => s.push_str(&term),
                        (true, true) => s.push_str(&format!("-{term}")),
                        (false, false) => s.push_str(&format!(" + {term}")),
                        (false, true) => s.push_str(&format!(" - {term}")),
                    }
                }
                s.push_str(" = 0");
                s
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpliceSystem {
    pub graph: ResolutionGraph,
    pub leaves: Vec<VertexId>,
    pub nodes: Vec<NodeEquations>,
    pub equivariant: bool,
    pub seed: Option<u64>,
}

impl SpliceSystem {
    pub fn t(&self) -> usize {
        self.leaves.len()
    }

    pub fn equation_count(&self) -> usize {
        self.nodes.iter().map(|n| n.coefficients.len()).sum()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for n in &self.nodes {
            for line in n.render(&self.leaves) {
                s.push_str(&line);
                s.push('\n');
            }
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "leaves": self.leaves,
            "t": self.t(),
            "equation_count": self.equation_count(),
            "equivariant": self.equivariant,
            "seed": self.seed,
            "nodes": self.nodes.iter().map(|n| json!({
                "node": n.node,
                "edges": n.edges,
                "weights": n.weights.unreduced.iter().map(big_json).collect::<Vec<_>>(),
                "gcd": big_json(&n.weights.gcd),
                "reduced_weights": n.weights.reduced.iter().map(big_json).collect::<Vec<_>>(),
                "total": big_json(&n.weights.total),
                "monomials": n.monomials,
                "coefficients": n.coefficients.iter()
                    .map(|r| r.iter().map(big_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "dclass": n.dclass.as_ref().map(|c| json!({
                    "coords": c.coords().iter().map(big_json).collect::<Vec<_>>(),
                    "moduli": c.moduli().iter().map(big_json).collect::<Vec<_>>(),
                })),
                "higher_order_threshold": big_json(&n.higher_order_threshold),
                "equations": n.render(&self.leaves),
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct SystemOptions {
    /// Random coefficients instead of Vandermonde rows.
    pub seed: Option<u64>,
    /// Fall back to per-edge grlex-least monomials when the congruence
    /// condition fails.
    pub allow_non_equivariant: bool,
}

pub fn generate_splice_system(g: &ResolutionGraph, seed: Option<u64>) -> Result<SpliceSystem> {
    generate_splice_system_with(
        g,
        &SystemOptions {
            seed,
            allow_non_equivariant: false,
        },
    )
}

pub fn generate_splice_system_with(g: &ResolutionGraph, opts: &SystemOptions) -> Result<SpliceSystem> {
    g.require_valid()?;
    let ctx = NodeContext::new(g)?;
    let mut rng = opts.seed.map(ChaCha8Rng::seed_from_u64);
    let mut nodes = Vec::new();
    let mut equivariant = true;
    for v in g.nodes() {
        let edges = edges_at(g, v);
        for &e in &edges {
            if ctx.admissible_monomials(e)?.is_empty() {
                return Err(Error::SemigroupConditionFails {
                    node: v,
                    neighbor: e.1,
                });
            }
        }
        let (monomials, dclass) = match ctx.congruence_at(v, &edges)? {
            Some(w) => (w.choice.into_iter().map(|(_, m)| m).collect(), Some(w.dclass)),
            None if opts.allow_non_equivariant => {
                equivariant = false;
                let ms = edges
                    .iter()
                    .map(|&e| {
                        let mut all = ctx.admissible_monomials(e)?;
                        all.sort_by(|a, b| grlex_cmp(a, b));
                        Ok(all.swap_remove(0))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (ms, None)
            }
            None => return Err(Error::CongruenceConditionFails(v)),
        };
        let dv = edges.len();
        let coefficients = match rng.as_mut() {
            None => vandermonde(dv - 2, dv),
            Some(r) => loop {
                let c: Vec<Vec<Int>> = (0..dv - 2)
                    .map(|_| {
                        (0..dv)
                            .map(|_| {
                                let x: i64 = r.gen_range(1..=9);
                                Int::from(if r.gen_bool(0.5) { x } else { -x })
                            })
                            .collect()
                    })
                    .collect();
                if minors_nonzero(&c) {
                    break c;
                }
            },
        };
        let weights = reduced_weights(g, v)?;
        nodes.push(NodeEquations {
            node: v,
            edges,
            higher_order_threshold: weights.total.clone(),
            weights,
            monomials,
            coefficients,
            dclass,
        });
    }
    Ok(SpliceSystem {
        graph: g.clone(),
        leaves: ctx.leaves,
        nodes,
        equivariant,
        seed: opts.seed,
    })
}

/// `a_ij = j^(i-1)` over tags `1..=cols`.
fn vandermonde(rows: usize, cols: usize) -> Vec<Vec<Int>> {
    (0..rows)
        .map(|i| (1..=cols).map(|j| Int::from(j).pow(i as u32)).collect())
        .collect()
}

fn column_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every maximal minor of `c` is nonzero.
pub fn minors_nonzero(c: &[Vec<Int>]) -> bool {
    let rows = c.len();
    if rows == 0 {
        return true;
    }
    let cols = c[0].len();
    column_subsets(cols, rows).into_iter().all(|js| {
        let sub: Vec<Vec<Int>> = c
            .iter()
            .map(|r| js.iter().map(|&j| r[j].clone()).collect())
            .collect();
        !determinant(&Matrix::from_rows(sub)).is_zero()
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemReport {
    pub checks: Vec<SystemCheck>,
}

impl SystemReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&SystemCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name, "passed": c.passed, "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Re-checks supports, weight homogeneity, equivariance, minors and the
/// equation count.
pub fn verify_system(sys: &SpliceSystem) -> Result<SystemReport> {
    let g = &sys.graph;
    let ctx = NodeContext::new(g)?;
    let mut checks = Vec::new();
    let mut push = |name: String, passed: bool, detail: String| {
        checks.push(SystemCheck { name, passed, detail })
    };
    let expected = sys.t().saturating_sub(2);
    push(
        "equation count".into(),
        sys.equation_count() == expected,
        format!("{} equations, t - 2 = {expected}", sys.equation_count()),
    );
    for n in &sys.nodes {
        let v = n.node;
        let lvv = ctx.linking.at(v, v);
        for (e, m) in n.edges.iter().zip(&n.monomials) {
            let beyond = leaves_beyond(g, *e);
            let ok = ctx
                .leaves
                .iter()
                .zip(m)
                .all(|(w, k)| *k == 0 || beyond.contains(w));
            push(format!("support {v}-{}", e.1), ok, format!("{m:?}"));
            let w = ctx.v_weight(v, m);
            push(
                format!("weight {v}-{}", e.1),
                w == lvv,
                format!("v-weight {w}, expected {lvv}"),
            );
        }
        if let Some(cls) = &n.dclass {
            let ok = n.monomials.iter().all(|m| ctx.monomial_class(m) == *cls);
            push(format!("equivariance {v}"), ok, String::new());
        }
        let shape = n.coefficients.len() + 2 == n.edges.len()
            && n.coefficients.iter().all(|r| r.len() == n.edges.len());
        push(
            format!("minors {v}"),
            shape && minors_nonzero(&n.coefficients),
            format!("{}x{}", n.coefficients.len(), n.edges.len()),
        );
    }
    Ok(SystemReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{chain, star, two_node_example};
    use crate::semigroup::zeta_exponent;

    fn ints(xs: &[i64]) -> Vec<Int> {
        xs.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn example_reduced_weights() {
        let g = two_node_example();
        let l = reduced_weights(&g, 5).unwrap();
        assert_eq!(l.unreduced, ints(&[18, 27, 12, 18]));
        assert_eq!(l.gcd, Int::from(3));
        assert_eq!(l.reduced, ints(&[6, 9, 4, 6]));
        assert_eq!(l.total, Int::from(18));
        let r = reduced_weights(&g, 7).unwrap();
        assert_eq!(r.reduced, ints(&[4, 6, 10, 15]));
        assert_eq!(r.total, Int::from(30));
        assert_eq!(reduced_weights(&g, 6), Err(Error::NotANode(6)));
    }

    #[test]
    fn example_action() {
        let t = d_action(&two_node_example()).unwrap();
        assert_eq!(t.row(1).unwrap(), ints(&[17, 9, 4, 6]).as_slice());
        assert_eq!(t.row(4).unwrap(), ints(&[6, 9, 15, 39]).as_slice());
        assert!(t.acts_by(4, 4, &Int::from(6)));
        assert!(d_action(&chain(&[-1])).unwrap().rows.is_empty());
    }

    #[test]
    fn example_system() {
        let g = two_node_example();
        let sys = generate_splice_system(&g, None).unwrap();
        assert_eq!(sys.to_text(), "Y1^3 + Y2^2 + Y4^3 = 0\nY2^5 + Y3^3 + Y4^2 = 0\n");
        assert!(verify_system(&sys).unwrap().passed());
        let group = crate::lattice::discriminant_group::<Int>(&g).unwrap();
        let e1 = group.class_of(1).unwrap().clone();
        let ex: Vec<Int> = sys
            .nodes
            .iter()
            .map(|n| zeta_exponent(&group, &e1, n.dclass.as_ref().unwrap()))
            .collect();
        assert_eq!(ex, ints(&[18, 12]));
    }

    #[test]
    fn seeded_is_deterministic() {
        let g = star(-2, &[&[-2], &[-3], &[-7], &[-11]]);
        let a = generate_splice_system(&g, Some(7)).unwrap();
        let b = generate_splice_system(&g, Some(7)).unwrap();
        assert_eq!(a.to_json().to_string(), b.to_json().to_string());
        assert_eq!(a.equation_count(), 2);
        assert!(verify_system(&a).unwrap().passed());
    }

    #[test]
    fn corrupted_exponent_is_flagged() {
        let mut sys = generate_splice_system(&two_node_example(), None).unwrap();
        sys.nodes[0].monomials[0][0] += 1;
        let rep = verify_system(&sys).unwrap();
        assert!(rep.failures().iter().any(|c| c.name.starts_with("weight")));
    }

    #[test]
    fn string_has_no_equations() {
        let sys = generate_splice_system(&chain(&[-2, -3]), None).unwrap();
        assert_eq!(sys.equation_count(), 0);
        assert!(verify_system(&sys).unwrap().passed());
    }

    #[test]
    fn vandermonde_minors() {
        for d in 3..8 {
            assert!(minors_nonzero(&vandermonde(d - 2, d)));
        }
        assert!(!minors_nonzero(&[ints(&[1, 0, 2])]));
        assert!(!minors_nonzero(&[ints(&[1, 1, 1]), ints(&[2, 2, 3])]));
    }
}
