//! Brute-force references that share no code with the library's lattice,
//! splice or semigroup modules.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use splicekit::ResolutionGraph;

type Q = Ratio<i128>;

/// `|D| (-A)^{-1}` and `|D| = det(-A)` by Gauss-Jordan over the rationals.
pub struct Linking {
    pub ids: Vec<u64>,
    pub order: i128,
    pub l: Vec<Vec<i128>>,
}

impl Linking {
    pub fn at(&self, v: u64, w: u64) -> i128 {
        let i = self.ids.iter().position(|&x| x == v).unwrap();
        let j = self.ids.iter().position(|&x| x == w).unwrap();
        self.l[i][j]
    }
}

pub fn linking(g: &ResolutionGraph) -> Linking {
    let ids = g.vertex_ids();
    let n = ids.len();
    let mut a = vec![vec![Q::zero(); 2 * n]; n];
    for (i, &v) in ids.iter().enumerate() {
        a[i][i] = Q::from_integer(-g.weight(v).unwrap() as i128);
        for (j, &w) in ids.iter().enumerate() {
            if g.has_edge(v, w) {
                a[i][j] = Q::from_integer(-1);
            }
        }
        a[i][n + i] = Q::from_integer(1);
    }
    let mut det = Q::from_integer(1);
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("nonsingular");
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c];
        det *= piv;
        for x in a[c].iter_mut() {
            *x /= piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c];
                for k in 0..2 * n {
                    let t = a[c][k] * f;
                    a[r][k] -= t;
                }
            }
        }
    }
    assert!(det.is_integer() && det.is_positive());
    let order = det.to_integer();
    let l = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = a[i][n + j] * Q::from_integer(order);
                    assert!(x.is_integer());
                    x.to_integer()
                })
                .collect()
        })
        .collect();
    Linking { ids, order, l }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleDelta {
    pub delta: i128,
    pub r: usize,
    pub s: i128,
    pub conductor: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// Gap count by listing every monomial of each weight level and counting
/// the distinct characters, a character being the weight together with
/// the vector of pairings with all vertices.
pub fn oracle_delta(g: &ResolutionGraph, root: u64) -> OracleDelta {
    let lk = linking(g);
    let n = lk.ids.len();
    let vars: Vec<u64> = if g.len() == 1 {
        vec![root]
    } else {
        g.vertex_ids()
            .into_iter()
            .filter(|&v| v != root && g.neighbors(v).len() <= 1)
            .collect()
    };
    let d = lk.order;
    let w: Vec<i128> = vars.iter().map(|&x| lk.at(root, x)).collect();
    let cls: Vec<Vec<i128>> = vars
        .iter()
        .map(|&x| lk.ids.iter().map(|&v| lk.at(v, x).rem_euclid(d)).collect())
        .collect();
    let s = w.iter().fold(0, |a, &b| gcd(a, b));

    // Weight-zero lattice from the pairwise syzygies, closed up in (Z/d)^n.
    let mut gens: Vec<Vec<i128>> = Vec::new();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            let g2 = gcd(w[i], w[j]);
            let (a, b) = (w[j] / g2, w[i] / g2);
            gens.push((0..n).map(|k| (a * cls[i][k] - b * cls[j][k]).rem_euclid(d)).collect());
        }
    }
    let zero = vec![0i128; n];
    let mut seen: HashSet<Vec<i128>> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(x) = queue.pop_front() {
        for gv in &gens {
            let y: Vec<i128> = x.iter().zip(gv).map(|(p, q)| (p + q).rem_euclid(d)).collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let r = seen.len();

    let max_w = *w.iter().max().unwrap();
    let window = max_w / s;
    let mut delta = 0i128;
    let mut full_run = 0i128;
    let mut level = 0i128;
    let mut conductor = 0i128;
    while full_run < window {
        let mut chars: BTreeSet<Vec<i128>> = BTreeSet::new();
        let mut cur = vec![0i128; n];
        tuples(&w, &cls, 0, level, &mut cur, d, &mut chars);
        assert!(chars.len() <= r, "more characters than the level holds");
        if chars.len() == r {
            full_run += 1;
        } else {
            delta += r as i128 - chars.len() as i128;
            full_run = 0;
            conductor = level + s;
        }
        level += s;
    }
    OracleDelta {
        delta,
        r,
        s,
        conductor,
    }
}

fn tuples(
    w: &[i128],
    cls: &[Vec<i128>],
    j: usize,
    rem: i128,
    cur: &mut Vec<i128>,
    d: i128,
    out: &mut BTreeSet<Vec<i128>>,
) {
    if j == w.len() {
        if rem == 0 {
            out.insert(cur.clone());
        }
        return;
    }
    let saved = cur.clone();
    let mut k = 0;
    while k * w[j] <= rem {
        tuples(w, cls, j + 1, rem - k * w[j], cur, d, out);
        for (c, x) in cur.iter_mut().zip(&cls[j]) {
            *c = (*c + x).rem_euclid(d);
        }
        k += 1;
    }
    *cur = saved;
}

/// Points `x` with `x_1 < 0`, `0 ≤ x_i < q_i` and `Σ x_i / q_i ≥ 0`, counted
/// one by one.
pub fn naive_lattice_count(q: &[i64]) -> i64 {
    let k = q.len();
    let lo = -((k as i64 - 1) * q[0]);
    let mut count = 0;
    let mut x = vec![0i64; k];
    fn rec(i: usize, q: &[i64], lo: i64, x: &mut Vec<i64>, count: &mut i64) {
        if i == q.len() {
            let s: Q = x.iter().zip(q).map(|(&a, &b)| Q::new(a as i128, b as i128)).sum();
            if x[0] < 0 && s >= Q::zero() {
                *count += 1;
            }
            return;
        }
        let range = if i == 0 { lo..0 } else { 0..q[i] };
        for v in range {
            x[i] = v;
            rec(i + 1, q, lo, x, count);
        }
    }
    rec(0, q, lo, &mut x, &mut count);
    count
}

/// `((k - 1)𝒬 - Σ 𝒬_i + gcd 𝒬_i) / 2` in plain integers.
pub fn lattice_formula(q: &[i64]) -> i64 {
    let big: i64 = q.iter().product();
    let qi: Vec<i64> = q.iter().map(|x| big / x).collect();
    let h = qi.iter().fold(0i64, |a, &b| a.gcd(&b));
    ((q.len() as i64 - 1) * big - qi.iter().sum::<i64>() + h) / 2
}
