//! Seeded random graphs and the identity suite run over them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dcurve::{
    branch_count_of_end_curve, kernel_basis_check_with, milnor_data, nu_recursion, verify_maj,
};
use crate::equations::{generate_splice_system, verify_system};
use crate::error::Result;
use crate::graph::{separate_nodes, to_text, ResolutionGraph, VertexId};
use crate::lattice::{intersection_matrix, is_negative_definite};
use crate::semigroup::{congruence_condition, rooted_char_system, semigroup_condition};
use crate::splice::{
    check_link_identities_with, decompose_at_root, linking_matrix, maximal_splice_diagram, LinkingMatrix,
};
use crate::{Int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomGraphSpec {
    pub count: usize,
    pub max_vertices: usize,
    pub min_weight: i64,
    pub max_weight: i64,
    pub seed: u64,
}

impl RandomGraphSpec {
    pub fn new(count: usize, max_vertices: usize, seed: u64) -> Self {
        Self {
            count,
            max_vertices,
            min_weight: -5,
            max_weight: -1,
            seed,
        }
    }
}

/// Stream `i` under `seed`; the same `(seed, i)` always gives the
/// same graph.
fn rng_for(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

fn definite(g: &ResolutionGraph) -> bool {
    is_negative_definite(&intersection_matrix::<Int>(g)).unwrap_or(false)
}

/// Labelled tree from a Prüfer sequence with ids `1..=n`.
fn prufer_tree(rng: &mut impl Rng, n: usize) -> Vec<(VertexId, VertexId)> {
    if n < 2 {
        return Vec::new();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in &seq {
        let leaf = (0..n).find(|&j| degree[j] == 1).expect("a leaf");
        edges.push((leaf as u64 + 1, x as u64 + 1));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&j| degree[j] == 1).collect();
    edges.push((rest[0] as u64 + 1, rest[1] as u64 + 1));
    edges
}

/// Rejection-samples a negative definite tree.
pub fn random_graph(rng: &mut impl Rng, spec: &RandomGraphSpec) -> ResolutionGraph {
    loop {
        let n = rng.gen_range(1..=spec.max_vertices.max(1));
        let edges = prufer_tree(rng, n);
        let vertices: Vec<(VertexId, i64)> = (1..=n as u64)
            .map(|v| (v, rng.gen_range(spec.min_weight..=spec.max_weight)))
            .collect();
        let g = ResolutionGraph::new(vertices, edges, None).expect("tree");
        if definite(&g) {
            return g;
        }
    }
}

pub fn random_graphs(spec: &RandomGraphSpec) -> Vec<ResolutionGraph> {
    (0..spec.count)
        .into_par_iter()
        .map(|i| random_graph(&mut rng_for(spec.seed, i), spec))
        .collect()
}

/// A negative definite graph with exactly one node: 3 to `max_arms` arms of
/// 1 to `max_arm_len` vertices.
pub fn random_one_node_graph(rng: &mut impl Rng, max_arms: usize, max_arm_len: usize) -> ResolutionGraph {
    loop {
        let arms: Vec<Vec<i64>> = (0..rng.gen_range(3..=max_arms.max(3)))
            .map(|_| (0..rng.gen_range(1..=max_arm_len)).map(|_| rng.gen_range(-5..=-1)).collect())
            .collect();
        let refs: Vec<&[i64]> = arms.iter().map(|a| a.as_slice()).collect();
        let g = crate::catalog::star(rng.gen_range(-5..=-1), &refs);
        if definite(&g) {
            return g;
        }
    }
}

pub fn random_one_node_graphs(count: usize, seed: u64) -> Vec<ResolutionGraph> {
    (0..count)
        .into_par_iter()
        .map(|i| random_one_node_graph(&mut rng_for(seed, i), 5, 3))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteCheck {
    pub name: &'static str,
    pub root: Option<VertexId>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub graph: ResolutionGraph,
    pub checks: Vec<SuiteCheck>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "graph": to_text(&self.graph),
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name, "root": c.root, "passed": c.passed, "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

struct Sink<'a>(&'a mut Vec<SuiteCheck>);

impl Sink<'_> {
    fn push(&mut self, name: &'static str, root: Option<VertexId>, r: Result<(bool, String)>) {
        let (passed, detail) = match r {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        self.0.push(SuiteCheck {
            name,
            root,
            passed,
            detail,
        });
    }
}

pub fn identity_suite(g: &ResolutionGraph) -> Result<SuiteReport> {
    let lk = linking_matrix::<Int>(&separate_nodes(g))?;
    identity_suite_with_linking(g, &lk)
}

/// The suite with a caller-supplied linking matrix for the graph with
/// adjacent nodes separated.
pub fn identity_suite_with_linking(g: &ResolutionGraph, lk: &LinkingMatrix<Int>) -> Result<SuiteReport> {
    g.require_valid()?;
    let h = separate_nodes(g);
    let mut checks = Vec::new();
    let mut sink = Sink(&mut checks);

    sink.push("linking = path products", None, (|| {
        let diag = maximal_splice_diagram::<Int>(&h)?;
        for v in h.vertex_ids() {
            for w in h.vertex_ids() {
                let p = diag.linking_path(v, w)?;
                if lk.at(v, w) != p {
                    return Ok((false, format!("l({v},{w}) = {} but path product {p}", lk.at(v, w))));
                }
            }
        }
        Ok((true, String::new()))
    })());

    for root in h.leaves() {
        let r = Some(root);
        let sys = match rooted_char_system(&h, root) {
            Ok(s) => s,
            Err(e) => {
                sink.push("characters", r, Err(e));
                continue;
            }
        };
        sink.push("r = s", r, Ok((sys.r() == sys.s(), format!("r = {}, s = {}", sys.r(), sys.s()))));
        sink.push("branch count", r, branch_count_of_end_curve(&h, root).map(|b| {
            (b.consistent(), format!("r = {}, order of e = {}, |D| = {}", b.r, b.d_prime, b.order))
        }));
        sink.push("euler characteristics", r, milnor_data(&h, root, sys.order()).map(|md| {
            (
                Rational::from_integer(md.chi_f.clone()) == md.chi_fz,
                format!("{} vs {}", md.chi_f, md.chi_fz),
            )
        }));
        sink.push("gap inequalities", r, verify_maj(&h, root).map(|m| (m.holds(), m.to_json().to_string())));
        if h.is_string() {
            continue;
        }
        let dec = match decompose_at_root::<Int>(&h, root) {
            Ok(d) => d,
            Err(e) => {
                sink.push("decomposition", r, Err(e));
                continue;
            }
        };
        sink.push("link identities", r, check_link_identities_with(&dec, lk).map(|rep| {
            (rep.passed(), rep.failures.join("; "))
        }));
        sink.push("nu recursion", r, nu_recursion(&h, root).map(|(a, b)| (a == b, format!("{a} vs {b}"))));
        sink.push("kernel images", r, kernel_basis_check_with(&dec, &sys).map(|k| {
            (k.passed(), k.failures.join("; "))
        }));
    }

    let conditions = (|| -> Result<bool> {
        Ok(semigroup_condition(g)?.values().all(|&b| b)
            && congruence_condition(g)?.values().all(Option::is_some))
    })();
    if let Ok(true) = conditions {
        sink.push("splice equations", None, generate_splice_system(g, None).and_then(|s| {
            let rep = verify_system(&s)?;
            let bad: Vec<String> = rep.failures().iter().map(|c| format!("{} {}", c.name, c.detail)).collect();
            Ok((rep.passed(), bad.join("; ")))
        }));
    } else if let Err(e) = conditions {
        sink.push("conditions", None, Err(e));
    }
    Ok(SuiteReport {
        graph: g.clone(),
        checks,
    })
}

/// Suite reports in index order.
pub fn run_suite(graphs: &[ResolutionGraph]) -> Vec<Result<SuiteReport>> {
    graphs.par_iter().map(identity_suite).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::two_node_example;

    #[test]
    fn generator_is_deterministic() {
        let spec = RandomGraphSpec::new(20, 8, 3);
        let a = random_graphs(&spec);
        assert_eq!(a, random_graphs(&spec));
        assert!(a.iter().all(|g| g.len() <= 8 && definite(g) && g.is_tree()));
    }

    #[test]
    fn prufer_gives_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 2..12 {
            let e = prufer_tree(&mut rng, n);
            let g = ResolutionGraph::new((1..=n as u64).map(|v| (v, -2)), e, None).unwrap();
            assert!(g.is_tree());
        }
    }

    #[test]
    fn example_suite_passes() {
        let rep = identity_suite(&two_node_example()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert!(rep.checks.iter().any(|c| c.name == "splice equations"));
    }

    #[test]
    fn corrupted_linking_is_caught() {
        let g = two_node_example();
        let mut lk = linking_matrix::<Int>(&g).unwrap();
        lk.set(2, 3, Int::from(7));
        let rep = identity_suite_with_linking(&g, &lk).unwrap();
        let bad: Vec<&str> = rep.failures().map(|c| c.name).collect();
        assert!(bad.contains(&"linking = path products"));
        assert!(bad.contains(&"link identities"));
    }
}
