//! Invariants of the curve attached to a rooted graph: `ν`, the recursive
//! gap bound, complete-intersection presentations, and the Euler
//! characteristic and linking formulas.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{separate_nodes, ResolutionGraph, VertexId};
use crate::scalar::gcd_all;
use crate::semigroup::{conditions_away_from_root, rooted_char_system, GChar, RootedCharSystem};
use crate::splice::{big_json, decompose_at_root, linking_matrix, RootedDecomposition};
use crate::{Int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NuValue {
    pub value: Int,
    /// Non-zero contributions `(δ'_v - 2) ℓ_{*v}`.
    pub contributions: BTreeMap<VertexId, Int>,
}

/// `ν(Γ, *) = Σ_v (δ'_v - 2) ℓ_{*v}` where `δ'` is the valency, raised by one
/// at `*`. For a leaf root the root term vanishes; a lone vertex gives `-1`.
pub fn nu(g: &ResolutionGraph, root: VertexId) -> Result<NuValue> {
    if !g.contains(root) {
        return Err(Error::UnknownRoot(root));
    }
    if !g.is_leaf(root) {
        return Err(Error::NotALeaf(root));
    }
    nu_at(g, root)
}

/// [`nu`] at an arbitrary vertex.
pub fn nu_at(g: &ResolutionGraph, v1: VertexId) -> Result<NuValue> {
    if !g.contains(v1) {
        return Err(Error::UnknownVertex(v1));
    }
    let lk = linking_matrix::<Int>(g)?;
    let mut value = Int::zero();
    let mut contributions = BTreeMap::new();
    for v in g.vertex_ids() {
        let dv = g.valency(v) as i64 + i64::from(v == v1);
        let c = Int::from(dv - 2) * lk.at(v1, v);
        if !c.is_zero() {
            value += &c;
            contributions.insert(v, c);
        }
    }
    Ok(NuValue {
        value,
        contributions,
    })
}

/// Right-hand side of the recursive bound
/// `2δ - r ≤ Σ 𝒟_i (2δ_i - r_i) + (k - 1) 𝒟`; `-1` for strings.
pub fn delta_recursive_bound(g: &ResolutionGraph, root: VertexId) -> Result<Int> {
    let g = separate_nodes(g);
    if g.is_string() {
        return Ok(-Int::one());
    }
    let dec = decompose_at_root::<Int>(&g, root)?;
    let mut acc = Int::from(dec.k() as i64 - 1) * dec.big_d();
    for (i, p) in dec.parts.iter().enumerate() {
        let sys = rooted_char_system(&p.graph, p.root)?;
        let rep = sys.delta()?;
        acc += dec.big_d_i(i) * (Int::from(2) * rep.delta - sys.r());
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeCount {
    /// Direct count of lattice points.
    pub n: u64,
    /// `(k - 1)𝒬 - Σ 𝒬_i + h`.
    pub formula_two_n: Int,
    pub h: Int,
}

impl LatticeCount {
    pub fn holds(&self) -> bool {
        Int::from(2 * self.n) == self.formula_two_n
    }
}

/// Counts `x ∈ Z^k` with `x_1 < 0`, `0 ≤ x_i < q_i` for `i ≥ 2` and
/// `Σ x_i / q_i ≥ 0`, alongside the closed form.
pub fn lattice_count_check(q: &[u64]) -> Result<LatticeCount> {
    if q.is_empty() || q.contains(&0) {
        return Err(Error::InvalidGraph("q must be non-empty and positive".into()));
    }
    let k = q.len();
    let big_q: Int = q.iter().map(|&x| Int::from(x)).product();
    let qi: Vec<Int> = q.iter().map(|&x| &big_q / Int::from(x)).collect();
    let h = gcd_all(&qi);
    let formula_two_n = Int::from(k as i64 - 1) * &big_q - qi.iter().sum::<Int>() + &h;

    // Scaled by 𝒬 the condition reads Σ x_i 𝒬_i ≥ 0.
    let qq: Vec<i128> = qi
        .iter()
        .map(|x| x.to_i128().ok_or_else(|| Error::CapacityExceeded(x.to_string())))
        .collect::<Result<_>>()?;
    let mut n = 0u64;
    let mut rest = vec![0u64; k - 1];
    loop {
        let s: i128 = rest.iter().zip(&qq[1..]).map(|(&x, &w)| x as i128 * w).sum();
        // x_1 < 0 with x_1 𝒬_1 ≥ -s
        n += (s / qq[0]) as u64;
        let mut i = 0;
        loop {
            if i == k - 1 {
                return Ok(LatticeCount {
                    n,
                    formula_two_n,
                    h,
                });
            }
            rest[i] += 1;
            if rest[i] < q[i + 1] {
                break;
            }
            rest[i] = 0;
            i += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstructiveExample {
    pub s: Int,
    pub two_delta_minus_r: Int,
    pub delta: Int,
    pub mu: Int,
}

/// Closed forms for the curve `Y_1^{n_1} = Y_i^{n_i}` in the one-node case:
/// `s = r = gcd(𝒩_i)`, `2δ - r = (m - 1)𝒩 - Σ 𝒩_i`, `μ = 2δ - r + 1`.
pub fn instructive_example(n: &[u64]) -> InstructiveExample {
    let m = n.len();
    let big_n: Int = n.iter().map(|&x| Int::from(x)).product();
    let ni: Vec<Int> = n.iter().map(|&x| &big_n / Int::from(x)).collect();
    let s = gcd_all(&ni);
    let two_delta_minus_r = Int::from(m as i64 - 1) * &big_n - ni.iter().sum::<Int>();
    let delta = (&two_delta_minus_r + &s) / Int::from(2);
    InstructiveExample {
        mu: &two_delta_minus_r + Int::one(),
        s,
        two_delta_minus_r,
        delta,
    }
}

/// A relation `Y^lhs = Y^rhs` over the presentation's variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binomial {
    pub lhs: Vec<u64>,
    pub rhs: Vec<u64>,
}

impl Binomial {
    pub fn render(&self, vars: &[VertexId]) -> String {
        format!("{} - {}", render_monomial(&self.lhs, vars), render_monomial(&self.rhs, vars))
    }
}

/// `Y2^5*Y3^1`; `1` for the empty monomial.
pub fn render_monomial(a: &[u64], vars: &[VertexId]) -> String {
    let parts: Vec<String> = a
        .iter()
        .zip(vars)
        .filter(|(k, _)| **k > 0)
        .map(|(k, v)| format!("Y{v}^{k}"))
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvePresentation {
    pub root: VertexId,
    /// Non-root leaves.
    pub variables: Vec<VertexId>,
    pub equations: Vec<Binomial>,
    pub branch_count: Int,
}

impl CurvePresentation {
    pub fn to_json(&self) -> Value {
        json!({
            "root": self.root,
            "variables": self.variables,
            "branch_count": big_json(&self.branch_count),
            "equations": self.equations.iter().map(|b| json!({
                "lhs": b.lhs, "rhs": b.rhs, "text": b.render(&self.variables),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Binomial complete-intersection presentation built part by part, gluing
/// with `Y^{Q_1} = Y^{Q_i}` where `Q_i` is the grlex-least witness of the
/// part's distinguished character.
pub fn curve_presentation(g: &ResolutionGraph, root: VertexId) -> Result<CurvePresentation> {
    let g = separate_nodes(g);
    let sys = rooted_char_system(&g, root)?;
    let variables = sys.leaves().to_vec();
    let equations = presentation_rec(&g, root, &variables)?;
    Ok(CurvePresentation {
        root,
        variables,
        equations,
        branch_count: sys.r().clone(),
    })
}

fn presentation_rec(g: &ResolutionGraph, root: VertexId, vars: &[VertexId]) -> Result<Vec<Binomial>> {
    if g.is_string() {
        return Ok(Vec::new());
    }
    let dec = decompose_at_root::<Int>(g, root)?;
    let mut out = Vec::new();
    let mut glue: Vec<Vec<u64>> = Vec::new();
    for p in &dec.parts {
        let local = p.leaves.clone();
        let embed = |a: &[u64]| {
            let mut full = vec![0u64; vars.len()];
            for (w, k) in local.iter().zip(a) {
                full[vars.binary_search(w).expect("part leaf is a variable")] = *k;
            }
            full
        };
        for b in presentation_rec(&p.graph, p.root, &local)? {
            out.push(Binomial {
                lhs: embed(&b.lhs),
                rhs: embed(&b.rhs),
            });
        }
        let sys = rooted_char_system(&p.graph, p.root)?;
        let q = sys
            .member(sys.qhat())?
            .ok_or(Error::QhatNotInSemigroup(p.root))?;
        glue.push(embed(&q));
    }
    for q in &glue[1..] {
        out.push(Binomial {
            lhs: glue[0].clone(),
            rhs: q.clone(),
        });
    }
    Ok(out)
}

/// Whether both sides of every binomial carry the same character.
pub fn presentation_is_balanced(pres: &CurvePresentation, sys: &RootedCharSystem) -> bool {
    pres.equations
        .iter()
        .all(|b| sys.char_of_exponents(&b.lhs) == sys.char_of_exponents(&b.rhs))
}

/// Gap count of the monoid `N^m / ~`, where `~` is generated by the
/// binomial moves, read against the `r` characters per weight level.
///
/// Monomials of each level are merged with a union-find under the moves;
/// the number of gaps at a level is `r` minus the number of merged classes
/// that are also distinct characters. Returns `(delta, consistent)`, where
/// `consistent` says every class carries a single character and distinct
/// classes carry distinct characters up to `max_weight`.
pub fn presentation_delta(
    pres: &CurvePresentation,
    sys: &RootedCharSystem,
    max_weight: &Int,
    monomial_budget: usize,
) -> Result<(Int, bool)> {
    let s = sys.s().clone();
    let steps: Vec<u64> = sys
        .generators()
        .iter()
        .map(|g| (&g.weight / &s).to_u64().expect("small weight"))
        .collect();
    let top = (max_weight / &s)
        .to_u64()
        .ok_or_else(|| Error::CapacityExceeded(max_weight.to_string()))?;
    let r = sys.r().clone();
    let mut delta = Int::zero();
    let mut consistent = true;
    let mut budget = monomial_budget;
    for level in 0..=top {
        let monos = monomials_of_level(&steps, level, &mut budget)?;
        let index: HashMap<&[u64], usize> =
            monos.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
        let mut uf: Vec<usize> = (0..monos.len()).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for (i, m) in monos.iter().enumerate() {
            for b in &pres.equations {
                for (from, to) in [(&b.lhs, &b.rhs), (&b.rhs, &b.lhs)] {
                    if m.iter().zip(from.iter()).all(|(x, f)| x >= f) {
                        let moved: Vec<u64> = m
                            .iter()
                            .zip(from.iter().zip(to.iter()))
                            .map(|(x, (f, t))| x - f + t)
                            .collect();
                        if let Some(&j) = index.get(moved.as_slice()) {
                            let (a, c) = (find(&mut uf, i), find(&mut uf, j));
                            uf[a] = c;
                        }
                    }
                }
            }
        }
        let mut class_char: HashMap<usize, GChar> = HashMap::new();
        for (i, m) in monos.iter().enumerate() {
            let root = find(&mut uf, i);
            let ch = sys.char_of_exponents(m);
            match class_char.get(&root) {
                Some(prev) if *prev != ch => consistent = false,
                Some(_) => {}
                None => {
                    class_char.insert(root, ch);
                }
            }
        }
        let classes = class_char.len();
        let mut distinct: Vec<&GChar> = class_char.values().collect();
        distinct.sort();
        distinct.dedup();
        if distinct.len() != classes {
            consistent = false;
        }
        delta += &r - Int::from(classes);
    }
    Ok((delta, consistent))
}

fn monomials_of_level(steps: &[u64], level: u64, budget: &mut usize) -> Result<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; steps.len()];
    fn rec(
        j: usize,
        rem: u64,
        steps: &[u64],
        cur: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        budget: &mut usize,
    ) -> Result<()> {
        if j == steps.len() {
            if rem == 0 {
                if *budget == 0 {
                    return Err(Error::CapacityExceeded("monomial budget".into()));
                }
                *budget -= 1;
                out.push(cur.clone());
            }
            return Ok(());
        }
        let mut a = 0;
        while a * steps[j] <= rem {
            cur[j] = a;
            rec(j + 1, rem - a * steps[j], steps, cur, out, budget)?;
            a += 1;
        }
        cur[j] = 0;
        Ok(())
    }
    rec(0, level, steps, &mut cur, &mut out, budget)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelBasisReport {
    /// Images of the parts' distinguished characters in `Ĝ(Γ, *)`.
    pub images: Vec<GChar>,
    /// `𝒟 = |D_1| ⋯ |D_k|`.
    pub expected_weight: Int,
    pub failures: Vec<String>,
}

impl KernelBasisReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Maps each part's `Q̂_i` (as a signed exponent vector) into `Ĝ(Γ, *)` and
/// checks all images coincide with weight `𝒟`.
pub fn kernel_basis_check(g: &ResolutionGraph, root: VertexId) -> Result<KernelBasisReport> {
    let g = separate_nodes(g);
    let dec = decompose_at_root::<Int>(&g, root)?;
    let sys = rooted_char_system(&g, root)?;
    kernel_basis_check_with(&dec, &sys)
}

pub fn kernel_basis_check_with(
    dec: &RootedDecomposition<Int>,
    sys: &RootedCharSystem,
) -> Result<KernelBasisReport> {
    let expected_weight = dec.big_d();
    let mut images = Vec::new();
    let mut failures = Vec::new();
    for p in &dec.parts {
        let part = rooted_char_system(&p.graph, p.root)?;
        let mut full = vec![Int::zero(); sys.m()];
        for (w, k) in part.leaves().iter().zip(part.qhat_tuple()) {
            let pos = sys.leaves().binary_search(w).expect("part leaf");
            full[pos] = k.clone();
        }
        let img = sys.char_of_monomial(&full);
        if img.weight != expected_weight {
            failures.push(format!(
                "part rooted at {}: weight {} != {}",
                p.root, img.weight, expected_weight
            ));
        }
        images.push(img);
    }
    if images.windows(2).any(|w| w[0] != w[1]) {
        failures.push("images of the distinguished characters differ".into());
    }
    Ok(KernelBasisReport {
        images,
        expected_weight,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajReport {
    pub root: VertexId,
    pub delta: Int,
    pub r: Int,
    pub two_delta_minus_r: Int,
    pub nu: Int,
    /// Recursive bound, absent for strings.
    pub bound: Option<Int>,
    pub equality: bool,
    pub conditions_away_from_root: bool,
    /// Whether every part's distinguished character lies in its semigroup.
    pub qhat_in_parts: Option<bool>,
}

impl MajReport {
    /// `2δ - r ≤ bound ≤ ν`, and equality forces the node conditions and
    /// the membership of every `Q̂_i`.
    pub fn holds(&self) -> bool {
        let chain = match &self.bound {
            Some(b) => self.two_delta_minus_r <= *b && *b <= self.nu,
            None => self.two_delta_minus_r <= self.nu,
        };
        chain && (!self.equality || (self.conditions_away_from_root && self.qhat_in_parts != Some(false)))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "root": self.root,
            "delta": big_json(&self.delta),
            "r": big_json(&self.r),
            "two_delta_minus_r": big_json(&self.two_delta_minus_r),
            "nu": big_json(&self.nu),
            "bound": self.bound.as_ref().map(big_json),
            "equality": self.equality,
            "conditions_away_from_root": self.conditions_away_from_root,
            "qhat_in_parts": self.qhat_in_parts,
            "holds": self.holds(),
        })
    }
}

pub fn verify_maj(g: &ResolutionGraph, root: VertexId) -> Result<MajReport> {
    let g = separate_nodes(g);
    let sys = rooted_char_system(&g, root)?;
    let rep = sys.delta()?;
    let nu = nu(&g, root)?.value;
    let two_delta_minus_r = Int::from(2) * &rep.delta - sys.r();
    let (bound, qhat_in_parts) = if g.is_string() {
        (None, None)
    } else {
        let dec = decompose_at_root::<Int>(&g, root)?;
        let mut all_in = true;
        for p in &dec.parts {
            let ps = rooted_char_system(&p.graph, p.root)?;
            if ps.member(ps.qhat())?.is_none() {
                all_in = false;
            }
        }
        (Some(delta_recursive_bound(&g, root)?), Some(all_in))
    };
    Ok(MajReport {
        root,
        delta: rep.delta,
        r: sys.r().clone(),
        equality: two_delta_minus_r == nu,
        two_delta_minus_r,
        nu,
        bound,
        conditions_away_from_root: conditions_away_from_root(&g, root)?,
        qhat_in_parts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilnorData {
    /// `χ(F) = -ν(Γ, v_1)`.
    pub chi_f: Int,
    /// `(d/|D|) Σ_v (2 - δ'_v) ℓ_{v_1 v}`.
    pub chi_fz: Rational,
    /// `(r + ν) / 2`.
    pub delta_top: Rational,
    /// `1 - χ(F)`.
    pub mu: Int,
}

pub fn milnor_data(g: &ResolutionGraph, v1: VertexId, d: &Int) -> Result<MilnorData> {
    if !d.is_positive() {
        return Err(Error::InvalidGraph("d must be positive".into()));
    }
    let nu = nu(g, v1)?.value;
    let lk = linking_matrix::<Int>(g)?;
    let mut sum = Int::zero();
    for v in g.vertex_ids() {
        let dv = g.valency(v) as i64 + i64::from(v == v1);
        sum += Int::from(2 - dv) * lk.at(v1, v);
    }
    let sys = rooted_char_system(g, v1)?;
    Ok(MilnorData {
        chi_f: -nu.clone(),
        chi_fz: Rational::new(d * sum, lk.order().clone()),
        delta_top: Rational::new(sys.r() + &nu, Int::from(2)),
        mu: Int::one() + nu,
    })
}

/// Linking number of the knots at `v` and `w`: `ℓ_vw / |D|`.
pub fn knot_linking(g: &ResolutionGraph, v: VertexId, w: VertexId) -> Result<Rational> {
    let lk = linking_matrix::<Int>(g)?;
    let x = lk.get(v, w).ok_or(Error::UnknownVertex(if g.contains(v) { w } else { v }))?;
    Ok(Rational::new(x.clone(), lk.order().clone()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchCount {
    pub r: Int,
    /// Order of the leaf's class in `D`.
    pub d_prime: Int,
    pub order: Int,
}

impl BranchCount {
    pub fn consistent(&self) -> bool {
        &self.r * &self.d_prime == self.order
    }
}

pub fn branch_count_of_end_curve(g: &ResolutionGraph, leaf: VertexId) -> Result<BranchCount> {
    let sys = rooted_char_system(g, leaf)?;
    let e = sys.group().class_of(leaf).expect("leaf class");
    Ok(BranchCount {
        r: sys.r().clone(),
        d_prime: sys.group().element_order(e),
        order: sys.order().clone(),
    })
}

/// `|D|` of a one-node graph from its arms: `(Π n_i)(b - Σ p_i / n_i)`,
/// with `n_i` the arm determinant and `p_i` that of the arm minus the
/// vertex next to the node.
pub fn one_node_order(g: &ResolutionGraph) -> Result<Rational> {
    let nodes = g.nodes();
    let [node] = nodes[..] else {
        return Err(Error::InvalidGraph("expected exactly one node".into()));
    };
    let b = -g.weight(node).expect("node weight");
    let mut prod = Int::one();
    let mut sum = Rational::zero();
    for n in g.neighbors(node) {
        let arm = g.branch(node, n);
        let ni = crate::lattice::determinant(
            &crate::lattice::intersection_matrix::<Int>(&g.induced(&arm)).neg(),
        );
        let mut rest = arm.clone();
        rest.remove(&n);
        let pi = crate::lattice::determinant(
            &crate::lattice::intersection_matrix::<Int>(&g.induced(&rest)).neg(),
        );
        sum += Rational::new(pi, ni.clone());
        prod *= ni;
    }
    Ok(Rational::from_integer(prod) * (Rational::from_integer(Int::from(b)) - sum))
}

/// `ν` checked against the recursion `Σ 𝒟_i ν_i + (k - 1)𝒟`.
pub fn nu_recursion(g: &ResolutionGraph, root: VertexId) -> Result<(Int, Int)> {
    let g = separate_nodes(g);
    let whole = nu(&g, root)?.value;
    let dec = decompose_at_root::<Int>(&g, root)?;
    let mut rhs = Int::from(dec.k() as i64 - 1) * dec.big_d();
    for (i, p) in dec.parts.iter().enumerate() {
        rhs += dec.big_d_i(i) * nu(&p.graph, p.root)?.value;
    }
    Ok((whole, rhs))
}
