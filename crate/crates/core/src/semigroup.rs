//! Value semigroups of rooted diagrams inside the character group
//! `Ĝ ⊂ Z ⊕ D`, their gaps, and the semigroup and congruence conditions at
//! the nodes of a graph.
//!
//! Weights are kept on the unreduced linking-number scale throughout.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{ResolutionGraph, VertexId};
use crate::lattice::{discriminant_group, integer_kernel, IntMatrix};
use crate::scalar::{ext_gcd, gcd_all};
use crate::splice::{big_json, linking_matrix, rooted_leaves, LinkingMatrix};
use crate::{DClass, DiscriminantGroup, Int};

/// Environment variable capping the number of weight levels a gap scan may
/// visit.
pub const MAX_LEVELS_ENV: &str = "SPLICEKIT_MAX_WEIGHT_LEVELS";

/// Largest knapsack target handled by the dense reachability tables.
const MAX_DENSE_TARGET: u64 = 50_000_000;

/// Upper bound on enumerated admissible monomials per edge.
const MAX_SOLUTIONS: usize = 1_000_000;

/// A character: unreduced weight and a class of `D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GChar {
    pub weight: Int,
    pub dclass: DClass,
}

impl GChar {
    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            weight: &self.weight + &other.weight,
            dclass: self.dclass.add(&other.dclass)?,
        })
    }

    pub fn scale(&self, k: &Int) -> Self {
        Self {
            weight: &self.weight * k,
            dclass: self.dclass.scale(k),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "weight": big_json(&self.weight),
            "class": self.dclass.coords().iter().map(big_json).collect::<Vec<_>>(),
        })
    }
}

/// Mixed-radix indexing of `D` into `0..|D|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Codec {
    moduli: Vec<u64>,
}

impl Codec {
    pub(crate) fn new(group: &DiscriminantGroup) -> Result<Self> {
        group
            .order()
            .to_u64()
            .ok_or_else(|| Error::CapacityExceeded(format!("|D| = {}", group.order())))?;
        Ok(Self {
            moduli: group
                .elementary_divisors()
                .iter()
                .map(|d| d.to_u64().expect("divisor of a u64"))
                .collect(),
        })
    }

    pub(crate) fn encode(&self, c: &DClass) -> u64 {
        let mut idx = 0u64;
        for (x, m) in c.coords().iter().zip(&self.moduli).rev() {
            idx = idx * m + x.to_u64().expect("reduced coordinate");
        }
        idx
    }

    pub(crate) fn coords(&self, mut idx: u64) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|m| {
                let c = idx % m;
                idx /= m;
                c
            })
            .collect()
    }

    pub(crate) fn decode(&self, idx: u64) -> DClass {
        let moduli: Vec<Int> = self.moduli.iter().map(|&m| Int::from(m)).collect();
        DClass::new(self.coords(idx).into_iter().map(Int::from).collect(), moduli)
    }

    /// `idx + coords`, componentwise mod the divisors.
    pub(crate) fn shift(&self, idx: u64, by: &[u64]) -> u64 {
        let mut out = 0u64;
        let mut rest = idx;
        let mut place = 1u64;
        for (m, b) in self.moduli.iter().zip(by) {
            let c = rest % m;
            rest /= m;
            out += ((c + b) % m) * place;
            place *= m;
        }
        out
    }

    pub(crate) fn neg_coords(&self, by: &[u64]) -> Vec<u64> {
        by.iter()
            .zip(&self.moduli)
            .map(|(b, m)| (m - b % m) % m)
            .collect()
    }
}

/// Generators of a value semigroup, in level units (weight / s).
#[derive(Debug, Clone)]
struct LevelGens {
    steps: Vec<usize>,
    shifts: Vec<Vec<u64>>,
    codec: Codec,
}

/// Characters of a rooted graph and the data derived from them.
#[derive(Debug, Clone)]
pub struct RootedCharSystem {
    graph: ResolutionGraph,
    root: VertexId,
    leaves: Vec<VertexId>,
    generators: Vec<GChar>,
    group: DiscriminantGroup,
    s: Int,
    r: Int,
    qhat: GChar,
    qhat_tuple: Vec<Int>,
    bezout: Vec<Int>,
    weight_zero_classes: Vec<DClass>,
}

pub fn rooted_char_system(g: &ResolutionGraph, root: VertexId) -> Result<RootedCharSystem> {
    if !g.contains(root) {
        return Err(Error::UnknownRoot(root));
    }
    if !g.is_leaf(root) {
        return Err(Error::NotALeaf(root));
    }
    let group = discriminant_group::<Int>(g)?;
    let lk = linking_matrix::<Int>(g)?;
    let leaves = rooted_leaves(g, root);
    let generators: Vec<GChar> = leaves
        .iter()
        .map(|&w| GChar {
            weight: lk.at(w, root),
            dclass: group.class_of(w).expect("leaf class").clone(),
        })
        .collect();
    let weights: Vec<Int> = generators.iter().map(|x| x.weight.clone()).collect();
    let s = gcd_all(&weights);
    let m = generators.len();

    // r: image in D of the weight-zero lattice.
    let row = IntMatrix::from_rows(vec![weights.clone()]);
    let k0 = integer_kernel(&row);
    let weight_zero_classes: Vec<DClass> = k0.iter().map(|a| combine(&generators, a, &group)).collect();
    let r = group.subgroup_order(&weight_zero_classes);

    // Q̂: least positive weight on the kernel of Z^m -> D.
    let divisors = group.elementary_divisors().to_vec();
    let kk = divisors.len();
    let mut mat = IntMatrix::zeros(kk, m + kk);
    for (c, gch) in generators.iter().enumerate() {
        for (rr, x) in gch.dclass.coords().iter().enumerate() {
            mat[(rr, c)] = x.clone();
        }
    }
    for (rr, d) in divisors.iter().enumerate() {
        mat[(rr, m + rr)] = d.clone();
    }
    let ker: Vec<Vec<Int>> = integer_kernel(&mat)
        .into_iter()
        .map(|v| v[..m].to_vec())
        .collect();
    let mut qhat_tuple = vec![Int::zero(); m];
    let mut qw = Int::zero();
    for b in &ker {
        let wb: Int = b.iter().zip(&weights).map(|(x, y)| x * y).sum();
        let (g2, x, y) = ext_gcd(&qw, &wb);
        if g2.is_zero() {
            continue;
        }
        for (t, bi) in qhat_tuple.iter_mut().zip(b) {
            *t = &*t * &x + bi * &y;
        }
        qw = g2;
    }
    let qhat = GChar {
        weight: qw,
        dclass: combine(&generators, &qhat_tuple, &group),
    };
    debug_assert!(qhat.dclass.is_zero());

    let bezout = bezout_tuple(&weights);
    Ok(RootedCharSystem {
        graph: g.clone(),
        root,
        leaves,
        generators,
        group,
        s,
        r,
        qhat,
        qhat_tuple,
        bezout,
        weight_zero_classes,
    })
}

fn combine(gens: &[GChar], a: &[Int], group: &DiscriminantGroup) -> DClass {
    gens.iter()
        .zip(a)
        .fold(group.zero(), |acc, (g, k)| acc.add(&g.dclass.scale(k)).expect("same profile"))
}

/// Integers `t` with `Σ t_i x_i = gcd(x)`.
fn bezout_tuple(xs: &[Int]) -> Vec<Int> {
    let mut t = vec![Int::zero(); xs.len()];
    let mut g = Int::zero();
    for (i, x) in xs.iter().enumerate() {
        let (g2, a, b) = ext_gcd(&g, x);
        for tj in t.iter_mut().take(i) {
            *tj = &*tj * &a;
        }
        t[i] = b;
        g = g2;
    }
    t
}

/// Options for [`RootedCharSystem::delta_with`].
#[derive(Debug, Clone, Default)]
pub struct DeltaOptions {
    /// Collect the gap characters themselves.
    pub collect_gaps: bool,
    /// Cap on weight levels; `None` reads the environment variable.
    pub max_levels: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemigroupReport {
    pub delta: Int,
    pub r: Int,
    pub s: Int,
    /// Smallest weight from which every character of `Ĝ` lies in `S`.
    pub conductor_weight: Int,
    /// `(weight, number of gaps)` for each weight with gaps.
    pub gap_counts: Vec<(Int, u64)>,
    pub gaps: Option<Vec<GChar>>,
}

impl SemigroupReport {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "delta": big_json(&self.delta),
            "r": big_json(&self.r),
            "s": big_json(&self.s),
            "conductor_weight": big_json(&self.conductor_weight),
            "gap_counts": self.gap_counts.iter()
                .map(|(w, c)| json!({"weight": big_json(w), "count": c}))
                .collect::<Vec<_>>(),
        });
        if let Some(g) = &self.gaps {
            v["gaps"] = Value::Array(g.iter().map(GChar::to_json).collect());
        }
        v
    }
}

fn env_level_cap() -> Option<u64> {
    std::env::var(MAX_LEVELS_ENV).ok().and_then(|v| v.trim().parse().ok())
}

impl RootedCharSystem {
    pub fn graph(&self) -> &ResolutionGraph {
        &self.graph
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Non-root leaves, in generator order.
    pub fn leaves(&self) -> &[VertexId] {
        &self.leaves
    }

    pub fn generators(&self) -> &[GChar] {
        &self.generators
    }

    pub fn m(&self) -> usize {
        self.generators.len()
    }

    pub fn group(&self) -> &DiscriminantGroup {
        &self.group
    }

    pub fn order(&self) -> &Int {
        self.group.order()
    }

    pub fn s(&self) -> &Int {
        &self.s
    }

    /// Number of branches: order of the image of the weight-zero lattice.
    pub fn r(&self) -> &Int {
        &self.r
    }

    pub fn qhat(&self) -> &GChar {
        &self.qhat
    }

    /// An integer (possibly signed) exponent vector representing `Q̂`.
    pub fn qhat_tuple(&self) -> &[Int] {
        &self.qhat_tuple
    }

    pub fn weight_zero_classes(&self) -> &[DClass] {
        &self.weight_zero_classes
    }

    pub fn char_of_monomial(&self, a: &[Int]) -> GChar {
        assert_eq!(a.len(), self.m(), "exponent count");
        GChar {
            weight: self
                .generators
                .iter()
                .zip(a)
                .map(|(g, k)| &g.weight * k)
                .sum(),
            dclass: combine(&self.generators, a, &self.group),
        }
    }

    pub fn char_of_exponents(&self, a: &[u64]) -> GChar {
        let a: Vec<Int> = a.iter().map(|&x| Int::from(x)).collect();
        self.char_of_monomial(&a)
    }

    /// Whether `x` lies in `Ĝ`: weight divisible by `s` and class in the
    /// right coset of the weight-zero image.
    pub fn in_g_hat(&self, x: &GChar) -> bool {
        if !x.weight.is_multiple_of(&self.s) {
            return false;
        }
        let base = self.level_class(&(&x.weight / &self.s));
        let diff = x.dclass.add(&base.neg()).expect("same profile");
        let mut gens = self.weight_zero_classes.clone();
        let before = self.group.subgroup_order(&gens);
        gens.push(diff);
        self.group.subgroup_order(&gens) == before
    }

    /// Class of some character of weight `level * s`.
    fn level_class(&self, level: &Int) -> DClass {
        let t: Vec<Int> = self.bezout.iter().map(|b| b * level).collect();
        combine(&self.generators, &t, &self.group)
    }

    fn level_gens(&self) -> Result<LevelGens> {
        let codec = Codec::new(&self.group)?;
        let mut steps = Vec::new();
        for g in &self.generators {
            let st = (&g.weight / &self.s)
                .to_u64()
                .filter(|&x| x <= MAX_DENSE_TARGET)
                .ok_or_else(|| Error::CapacityExceeded(format!("generator weight {}", g.weight)))?;
            steps.push(st as usize);
        }
        let shifts = self
            .generators
            .iter()
            .map(|g| codec.coords(codec.encode(&g.dclass)))
            .collect();
        Ok(LevelGens {
            steps,
            shifts,
            codec,
        })
    }

    pub fn delta(&self) -> Result<SemigroupReport> {
        self.delta_with(&DeltaOptions::default())
    }

    /// Gap count by a level-by-level scan of reachable classes.
    ///
    /// Level `L` holds the classes of monomials of weight `L·s`. Every level
    /// of `Ĝ` has exactly `r` classes, so the gaps at a level are `r` minus
    /// the reachable count. Once `min step` consecutive levels are full,
    /// every later level is full too.
    pub fn delta_with(&self, opts: &DeltaOptions) -> Result<SemigroupReport> {
        let lg = self.level_gens()?;
        let r = self
            .r
            .to_u64()
            .ok_or_else(|| Error::CapacityExceeded(format!("r = {}", self.r)))?;
        let cap = opts.max_levels.or_else(env_level_cap);
        let max_step = *lg.steps.iter().max().expect("at least one generator");
        let min_step = *lg.steps.iter().min().expect("at least one generator");

        let coset = if opts.collect_gaps {
            Some(self.subgroup_elements(&lg.codec)?)
        } else {
            None
        };

        let mut window: VecDeque<HashSet<u64>> = VecDeque::with_capacity(max_step + 1);
        let mut delta = Int::zero();
        let mut gap_counts = Vec::new();
        let mut gaps = opts.collect_gaps.then(Vec::new);
        let mut full_run = 0usize;
        let mut last_gap_level: Option<u64> = None;
        let mut level: u64 = 0;
        loop {
            if let Some(c) = cap {
                if level >= c {
                    return Err(Error::LevelCapExceeded(c));
                }
            }
            let mut here: HashSet<u64> = HashSet::new();
            if level == 0 {
                here.insert(0);
            } else {
                for (st, sh) in lg.steps.iter().zip(&lg.shifts) {
                    if (*st as u64) <= level {
                        let src = &window[window.len() - st];
                        here.extend(src.iter().map(|&c| lg.codec.shift(c, sh)));
                    }
                }
            }
            let missing = r - here.len() as u64;
            if missing > 0 {
                full_run = 0;
                last_gap_level = Some(level);
                delta += missing;
                let w = Int::from(level) * &self.s;
                gap_counts.push((w.clone(), missing));
                if let (Some(list), Some(sub)) = (gaps.as_mut(), coset.as_ref()) {
                    let base = lg.codec.encode(&self.level_class(&Int::from(level)));
                    let base_coords = lg.codec.coords(base);
                    let mut cls: Vec<u64> = sub
                        .iter()
                        .map(|&h| lg.codec.shift(h, &base_coords))
                        .filter(|c| !here.contains(c))
                        .collect();
                    cls.sort_unstable();
                    list.extend(cls.into_iter().map(|c| GChar {
                        weight: w.clone(),
                        dclass: lg.codec.decode(c),
                    }));
                }
            } else {
                full_run += 1;
            }
            window.push_back(here);
            if window.len() > max_step {
                window.pop_front();
            }
            if full_run >= min_step {
                break;
            }
            level += 1;
        }
        let conductor_weight = last_gap_level.map_or_else(Int::zero, |l| Int::from(l + 1) * &self.s);
        Ok(SemigroupReport {
            delta,
            r: self.r.clone(),
            s: self.s.clone(),
            conductor_weight,
            gap_counts,
            gaps,
        })
    }

    /// Elements of the weight-zero image subgroup, as indices.
    fn subgroup_elements(&self, codec: &Codec) -> Result<Vec<u64>> {
        let gens: Vec<Vec<u64>> = self
            .weight_zero_classes
            .iter()
            .map(|c| codec.coords(codec.encode(c)))
            .collect();
        let mut seen = BTreeSet::from([0u64]);
        let mut queue = VecDeque::from([0u64]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = codec.shift(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// A grlex-minimal exponent vector realizing `target`, if it lies in `S`.
    ///
    /// Minimal total degree first; ties go to the lexicographically smallest
    /// vector, comparing the first exponent first.
    pub fn member(&self, target: &GChar) -> Result<Option<Vec<u64>>> {
        if target.weight.is_negative() || !target.weight.is_multiple_of(&self.s) {
            return Ok(None);
        }
        let lg = self.level_gens()?;
        let goal_level = (&target.weight / &self.s)
            .to_usize()
            .filter(|&x| x as u64 <= MAX_DENSE_TARGET)
            .ok_or_else(|| Error::CapacityExceeded(format!("target weight {}", target.weight)))?;
        let goal_class = lg.codec.encode(&target.dclass);
        Ok(grlex_min(&lg.steps, &lg.shifts, &lg.codec, goal_level, goal_class))
    }
}

/// Suffix tables `F_j(level, class)` = least degree using generators
/// `j..m`, then a greedy pass choosing each exponent as small as possible.
fn grlex_min(
    steps: &[usize],
    shifts: &[Vec<u64>],
    codec: &Codec,
    goal_level: usize,
    goal_class: u64,
) -> Option<Vec<u64>> {
    let m = steps.len();
    let mut tables: Vec<Vec<HashMap<u64, u64>>> = vec![Vec::new(); m + 1];
    let mut base = vec![HashMap::new(); goal_level + 1];
    base[0].insert(0u64, 0u64);
    tables[m] = base;
    for j in (0..m).rev() {
        let mut t = tables[j + 1].clone();
        let st = steps[j];
        if st > 0 {
            for lvl in st..=goal_level {
                let (lo, hi) = t.split_at_mut(lvl);
                for (&c, &d) in &lo[lvl - st] {
                    let c2 = codec.shift(c, &shifts[j]);
                    let e = hi[0].entry(c2).or_insert(u64::MAX);
                    if d + 1 < *e {
                        *e = d + 1;
                    }
                }
            }
        }
        tables[j] = t;
    }
    let mut best = *tables[0][goal_level].get(&goal_class)?;
    let mut out = vec![0u64; m];
    let (mut lvl, mut cls) = (goal_level, goal_class);
    for j in 0..m {
        let neg = codec.neg_coords(&shifts[j]);
        let mut a = 0u64;
        loop {
            if let Some(&d) = tables[j + 1][lvl].get(&cls) {
                if d + a == best {
                    break;
                }
            }
            if steps[j] == 0 || lvl < steps[j] {
                return None;
            }
            lvl -= steps[j];
            cls = codec.shift(cls, &neg);
            a += 1;
        }
        out[j] = a;
        best -= a;
    }
    Some(out)
}

/// Compares exponent vectors by total degree, then lexicographically.
pub fn grlex_cmp(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    let da: u64 = a.iter().sum();
    let db: u64 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// All non-negative `α` with `Σ α_i x_i = target`.
pub fn knapsack_solutions(weights: &[u64], target: u64) -> Result<Vec<Vec<u64>>> {
    if target > MAX_DENSE_TARGET {
        return Err(Error::CapacityExceeded(format!("knapsack target {target}")));
    }
    let n = weights.len();
    let t = target as usize;
    // reach[j][x]: x is a sum of multiples of weights[j..].
    let mut reach = vec![vec![false; t + 1]; n + 1];
    reach[n][0] = true;
    for j in (0..n).rev() {
        let w = weights[j] as usize;
        let mut row = reach[j + 1].clone();
        if w > 0 {
            for x in w..=t {
                if row[x - w] {
                    row[x] = true;
                }
            }
        }
        reach[j] = row;
    }
    let mut out = Vec::new();
    if !reach[0][t] {
        return Ok(out);
    }
    let mut cur = vec![0u64; n];
    fn rec(
        j: usize,
        rem: usize,
        weights: &[u64],
        reach: &[Vec<bool>],
        cur: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) -> Result<()> {
        if j == weights.len() {
            if rem == 0 {
                if out.len() >= MAX_SOLUTIONS {
                    return Err(Error::CapacityExceeded("admissible monomial count".into()));
                }
                out.push(cur.clone());
            }
            return Ok(());
        }
        let w = weights[j] as usize;
        let mut a = 0usize;
        loop {
            let used = a * w;
            if used > rem {
                break;
            }
            if reach[j + 1][rem - used] {
                cur[j] = a as u64;
                rec(j + 1, rem - used, weights, reach, cur, out)?;
            }
            if w == 0 {
                break;
            }
            a += 1;
        }
        cur[j] = 0;
        Ok(())
    }
    rec(0, t, weights, &reach, &mut cur, &mut out)?;
    Ok(out)
}

/// Exponent `k` with `x` acting on characters of class `y` by `ζ^k`, where
/// `ζ = exp(-2πi/|D|)`; equals `Σ a_j ℓ_{v w_j}` for `x = e_v` and `y` the
/// class of `Π Y_j^{a_j}`.
pub fn zeta_exponent(group: &DiscriminantGroup, x: &DClass, y: &DClass) -> Int {
    let n = group.order().clone();
    let p = group.pair_classes(x, y) * crate::Rational::from_integer(n.clone());
    (-p.to_integer()).mod_floor(&n)
}

/// An edge at a node, named by the node and its neighbour in the graph.
pub type Edge = (VertexId, VertexId);

/// Leaves beyond the edge `(v, n)`, i.e. in the branch at `v` through `n`.
pub fn leaves_beyond(g: &ResolutionGraph, (v, n): Edge) -> Vec<VertexId> {
    let branch = g.branch(v, n);
    g.leaves().into_iter().filter(|w| branch.contains(w)).collect()
}

/// Edges at `v` ordered by the smallest leaf beyond each.
pub fn edges_at(g: &ResolutionGraph, v: VertexId) -> Vec<Edge> {
    let mut es: Vec<Edge> = g.neighbors(v).into_iter().map(|n| (v, n)).collect();
    es.sort_by_key(|&e| leaves_beyond(g, e).into_iter().min());
    es
}

/// Node data shared by the admissibility and congruence computations.
#[derive(Debug, Clone)]
pub struct NodeContext {
    pub graph: ResolutionGraph,
    pub leaves: Vec<VertexId>,
    pub linking: LinkingMatrix<Int>,
    pub group: DiscriminantGroup,
}

impl NodeContext {
    pub fn new(g: &ResolutionGraph) -> Result<Self> {
        Ok(Self {
            graph: g.clone(),
            leaves: g.leaves(),
            linking: linking_matrix::<Int>(g)?,
            group: discriminant_group::<Int>(g)?,
        })
    }

    /// Class in `D` of a monomial over all leaves (in leaf order).
    pub fn monomial_class(&self, a: &[u64]) -> DClass {
        self.leaves.iter().zip(a).fold(self.group.zero(), |acc, (w, k)| {
            acc.add(&self.group.class_of(*w).expect("leaf").scale(&Int::from(*k)))
                .expect("same profile")
        })
    }

    /// `v`-weight of a monomial over all leaves.
    pub fn v_weight(&self, v: VertexId, a: &[u64]) -> Int {
        self.leaves
            .iter()
            .zip(a)
            .map(|(w, k)| self.linking.at(v, *w) * Int::from(*k))
            .sum()
    }

    /// All monomials in the leaves beyond `e` of `v`-weight `ℓ_vv`, as
    /// exponent vectors over all leaves, sorted grlex.
    pub fn admissible_monomials(&self, e: Edge) -> Result<Vec<Vec<u64>>> {
        let (v, _) = e;
        if !self.graph.is_node(v) {
            return Err(Error::NotANode(v));
        }
        if !self.graph.has_edge(e.0, e.1) {
            return Err(Error::MissingEdge(e.0, e.1));
        }
        let beyond = leaves_beyond(&self.graph, e);
        let to_u64 = |x: Int| {
            x.to_u64()
                .ok_or_else(|| Error::CapacityExceeded(format!("weight {x}")))
        };
        let weights: Vec<u64> = beyond
            .iter()
            .map(|&w| to_u64(self.linking.at(v, w)))
            .collect::<Result<_>>()?;
        let target = to_u64(self.linking.at(v, v))?;
        let pos: Vec<usize> = beyond
            .iter()
            .map(|w| self.leaves.binary_search(w).expect("leaf"))
            .collect();
        let mut out: Vec<Vec<u64>> = knapsack_solutions(&weights, target)?
            .into_iter()
            .map(|sol| {
                let mut full = vec![0u64; self.leaves.len()];
                for (p, x) in pos.iter().zip(sol) {
                    full[*p] = x;
                }
                full
            })
            .collect();
        out.sort_by(|a, b| grlex_cmp(a, b));
        Ok(out)
    }
}

pub fn admissible_monomials(g: &ResolutionGraph, e: Edge) -> Result<Vec<Vec<u64>>> {
    NodeContext::new(g)?.admissible_monomials(e)
}

/// Semigroup condition flag for every (node, edge).
pub fn semigroup_condition(g: &ResolutionGraph) -> Result<BTreeMap<Edge, bool>> {
    let ctx = NodeContext::new(g)?;
    let mut out = BTreeMap::new();
    for v in g.nodes() {
        for e in edges_at(g, v) {
            out.insert(e, !ctx.admissible_monomials(e)?.is_empty());
        }
    }
    Ok(out)
}

/// A common character at a node with one admissible monomial per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceWitness {
    pub node: VertexId,
    pub dclass: DClass,
    /// One monomial per edge, over all leaves.
    pub choice: Vec<(Edge, Vec<u64>)>,
}

impl NodeContext {
    /// Common class of admissible monomials over `edges` at `v`, choosing
    /// for each class the grlex-least monomial per edge and among classes
    /// the grlex-least sequence.
    pub fn congruence_at(&self, v: VertexId, edges: &[Edge]) -> Result<Option<CongruenceWitness>> {
        let mut per_edge: Vec<BTreeMap<DClass, Vec<u64>>> = Vec::new();
        for &e in edges {
            let mut best: BTreeMap<DClass, Vec<u64>> = BTreeMap::new();
            // Sorted grlex, so the first monomial of each class wins.
            for mono in self.admissible_monomials(e)? {
                best.entry(self.monomial_class(&mono)).or_insert(mono);
            }
            if best.is_empty() {
                return Ok(None);
            }
            per_edge.push(best);
        }
        let Some(first) = per_edge.first() else {
            return Ok(Some(CongruenceWitness {
                node: v,
                dclass: self.group.zero(),
                choice: Vec::new(),
            }));
        };
        let mut winner: Option<(DClass, Vec<Vec<u64>>)> = None;
        for cls in first.keys() {
            let seq: Option<Vec<Vec<u64>>> = per_edge.iter().map(|m| m.get(cls).cloned()).collect();
            let Some(seq) = seq else { continue };
            let better = match &winner {
                None => true,
                Some((_, cur)) => {
                    seq.iter()
                        .zip(cur)
                        .map(|(a, b)| grlex_cmp(a, b))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .is_lt()
                }
            };
            if better {
                winner = Some((cls.clone(), seq));
            }
        }
        Ok(winner.map(|(dclass, seq)| CongruenceWitness {
            node: v,
            dclass,
            choice: edges.iter().copied().zip(seq).collect(),
        }))
    }
}

/// Congruence witness per node, `None` where the condition fails.
pub fn congruence_condition(g: &ResolutionGraph) -> Result<BTreeMap<VertexId, Option<CongruenceWitness>>> {
    let ctx = NodeContext::new(g)?;
    g.nodes()
        .into_iter()
        .map(|v| Ok((v, ctx.congruence_at(v, &edges_at(g, v))?)))
        .collect()
}

/// Edges at `v` other than the one leading toward `root`.
pub fn edges_away_from(g: &ResolutionGraph, v: VertexId, root: VertexId) -> Vec<Edge> {
    let toward = g.path(v, root).and_then(|p| p.get(1).copied());
    edges_at(g, v)
        .into_iter()
        .filter(|&(_, n)| Some(n) != toward)
        .collect()
}

/// Semigroup and congruence conditions at every node, using only the edges
/// pointing away from `root`.
pub fn conditions_away_from_root(g: &ResolutionGraph, root: VertexId) -> Result<bool> {
    let ctx = NodeContext::new(g)?;
    for v in g.nodes() {
        if ctx.congruence_at(v, &edges_away_from(g, v, root))?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{chain, e8, star, two_node_example};

    fn int(x: i64) -> Int {
        Int::from(x)
    }

    fn weights(sys: &RootedCharSystem) -> Vec<i64> {
        sys.generators().iter().map(|g| g.weight.to_i64().unwrap()).collect()
    }

    #[test]
    fn example_rooted_at_first_leaf() {
        let sys = rooted_char_system(&two_node_example(), 1).unwrap();
        assert_eq!(sys.leaves(), &[2, 3, 4]);
        assert_eq!(weights(&sys), vec![9, 4, 6]);
        assert_eq!(*sys.s(), int(1));
        assert_eq!(*sys.r(), int(1));
        assert_eq!(sys.qhat().weight, int(33));
        assert!(sys.qhat().dclass.is_zero());
        assert_eq!(sys.char_of_monomial(sys.qhat_tuple()), *sys.qhat());
        let rep = sys.delta().unwrap();
        // <4, 6, 9> misses 1, 2, 3, 5, 7, 11
        assert_eq!(rep.delta, int(6));
        assert_eq!(rep.conductor_weight, int(12));
    }

    #[test]
    fn e8_roots() {
        let g = e8();
        let cases = [(1, vec![2, 3], 1), (7, vec![3, 5], 4), (5, vec![2, 5], 2)];
        for (root, ws, delta) in cases {
            let sys = rooted_char_system(&g, root).unwrap();
            assert_eq!(weights(&sys), ws, "root {root}");
            assert_eq!(sys.delta().unwrap().delta, int(delta), "root {root}");
        }
        let sys = rooted_char_system(&g, 1).unwrap();
        let rep = sys.delta_with(&DeltaOptions { collect_gaps: true, max_levels: None }).unwrap();
        let gaps = rep.gaps.unwrap();
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].weight, int(1));
    }

    #[test]
    fn strings_and_lone_vertices() {
        let lone = rooted_char_system(&chain(&[-5]), 1).unwrap();
        assert_eq!(weights(&lone), vec![1]);
        assert_eq!(*lone.r(), int(1));
        assert_eq!(lone.qhat().weight, int(5));
        assert_eq!(lone.delta().unwrap().delta, int(0));
        let s = rooted_char_system(&chain(&[-2, -3, -2]), 1).unwrap();
        assert_eq!(weights(&s), vec![1]);
        assert_eq!(s.qhat().weight, *s.order());
        assert_eq!(s.delta().unwrap().delta, int(0));
        assert!(matches!(rooted_char_system(&chain(&[-2, -3, -2]), 2), Err(Error::NotALeaf(2))));
    }

    #[test]
    fn weight_zero_gaps_and_two_branches() {
        // Two -2 arms and a -3 root arm on a -2 node: weights (2, 2), s = 2.
        let g = star(-2, &[&[-2], &[-2], &[-3]]);
        let root = *g.leaves().last().unwrap();
        let sys = rooted_char_system(&g, root).unwrap();
        assert_eq!(*sys.s(), int(2));
        assert!(*sys.r() > int(1));
        let rep = sys.delta().unwrap();
        let zero_gaps: u64 = rep
            .gap_counts
            .iter()
            .filter(|(w, _)| w.is_zero())
            .map(|x| x.1)
            .sum();
        assert_eq!(Int::from(zero_gaps) + 1, *sys.r());
    }

    #[test]
    fn level_cap_is_an_error() {
        let sys = rooted_char_system(&two_node_example(), 1).unwrap();
        let opts = DeltaOptions { collect_gaps: false, max_levels: Some(3) };
        assert_eq!(sys.delta_with(&opts), Err(Error::LevelCapExceeded(3)));
    }

    #[test]
    fn membership() {
        let g = e8();
        let sys = rooted_char_system(&g, 1).unwrap();
        for (i, gen) in sys.generators().iter().enumerate() {
            let mut unit = vec![0; sys.m()];
            unit[i] = 1;
            assert_eq!(sys.member(gen).unwrap(), Some(unit));
        }
        let one = GChar { weight: int(1), dclass: sys.group().zero() };
        assert_eq!(sys.member(&one).unwrap(), None);
        let six = GChar { weight: int(6), dclass: sys.group().zero() };
        // 6 = 3·2 = 2·3; degree 2 wins
        assert_eq!(sys.member(&six).unwrap(), Some(vec![0, 2]));

        let ex = rooted_char_system(&two_node_example(), 1).unwrap();
        let w = ex.member(ex.qhat()).unwrap().unwrap();
        assert_eq!(ex.char_of_exponents(&w), *ex.qhat());
    }

    #[test]
    fn knapsack_enumeration() {
        assert_eq!(knapsack_solutions(&[2, 3], 1).unwrap(), Vec::<Vec<u64>>::new());
        let mut sols = knapsack_solutions(&[3, 2], 12).unwrap();
        sols.sort();
        assert_eq!(sols, vec![vec![0, 6], vec![2, 3], vec![4, 0]]);
    }

    fn mono(v: &[u64]) -> Vec<u64> {
        v.to_vec()
    }

    #[test]
    fn admissible_sets_of_example() {
        let g = two_node_example();
        let ctx = NodeContext::new(&g).unwrap();
        assert_eq!(edges_at(&g, 5), vec![(5, 1), (5, 2), (5, 6)]);
        assert_eq!(edges_at(&g, 7), vec![(7, 6), (7, 8), (7, 4)]);
        assert_eq!(ctx.admissible_monomials((5, 1)).unwrap(), vec![mono(&[3, 0, 0, 0])]);
        assert_eq!(ctx.admissible_monomials((5, 2)).unwrap(), vec![mono(&[0, 2, 0, 0])]);
        assert_eq!(
            ctx.admissible_monomials((5, 6)).unwrap(),
            vec![mono(&[0, 0, 0, 3]), mono(&[0, 0, 3, 1])]
        );
        assert_eq!(
            ctx.admissible_monomials((7, 6)).unwrap(),
            vec![mono(&[0, 5, 0, 0]), mono(&[3, 3, 0, 0]), mono(&[6, 1, 0, 0])]
        );
        assert_eq!(ctx.admissible_monomials((7, 8)).unwrap(), vec![mono(&[0, 0, 3, 0])]);
        assert_eq!(ctx.admissible_monomials((7, 4)).unwrap(), vec![mono(&[0, 0, 0, 2])]);
        assert!(matches!(ctx.admissible_monomials((6, 5)), Err(Error::NotANode(6))));
        assert!(semigroup_condition(&g).unwrap().values().all(|&f| f));
    }

    #[test]
    fn congruence_of_example() {
        let g = two_node_example();
        let ctx = NodeContext::new(&g).unwrap();
        let e1 = ctx.group.class_of(1).unwrap().clone();
        let wit = congruence_condition(&g).unwrap();
        let left = wit[&5].as_ref().unwrap();
        let right = wit[&7].as_ref().unwrap();
        assert_eq!(zeta_exponent(&ctx.group, &e1, &left.dclass), int(18));
        assert_eq!(zeta_exponent(&ctx.group, &e1, &right.dclass), int(12));
        assert_eq!(left.choice[2].1, mono(&[0, 0, 0, 3]));
        assert_eq!(right.choice[0].1, mono(&[0, 5, 0, 0]));
        for (_, m) in left.choice.iter().chain(&right.choice) {
            assert_eq!(ctx.monomial_class(m), if left.choice.iter().any(|c| &c.1 == m) { left.dclass.clone() } else { right.dclass.clone() });
        }
    }

    #[test]
    fn character_equality_is_weight_and_class() {
        let g = two_node_example();
        let ctx = NodeContext::new(&g).unwrap();
        // Y4^3 and Y1^3 share the left node's weight 54 and class.
        let a = [0, 0, 0, 3];
        let b = [3, 0, 0, 0];
        assert_eq!(ctx.v_weight(5, &a), int(54));
        assert_eq!(ctx.v_weight(5, &b), int(54));
        assert_eq!(ctx.monomial_class(&a), ctx.monomial_class(&b));
        let zero = ctx.monomial_class(&[0, 0, 0, 0]);
        assert!(zero.is_zero());
    }

    #[test]
    fn trivial_group_congruence_equals_semigroup() {
        let g = e8();
        let sg = semigroup_condition(&g).unwrap();
        let cg = congruence_condition(&g).unwrap();
        assert!(sg.values().all(|&f| f));
        assert!(cg.values().all(Option::is_some));
    }

    #[test]
    fn g_hat_membership() {
        let sys = rooted_char_system(&two_node_example(), 1).unwrap();
        let x = sys.char_of_exponents(&[1, 2, 0]);
        assert!(sys.in_g_hat(&x));
    }
}
