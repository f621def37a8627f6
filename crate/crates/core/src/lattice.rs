//! Exact integer linear algebra over any [`Scalar`]: fraction-free
//! determinants and adjugates, Smith normal form, integer kernels, and the
//! discriminant group `coker A` with its rational linking pairing.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{ResolutionGraph, VertexId};
use crate::scalar::Scalar;

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> IntMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| T::of(x)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn neg(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x.clone()).collect(),
        }
    }

    pub fn scale(&self, k: &T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * k.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Square submatrix on the given row and column index sets.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|&i| cols.iter().map(|&j| self[(i, j)].clone()).collect())
                .collect(),
        )
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> IntMatrix<U> {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &T) {
        for j in 0..self.cols {
            let v = self[(src, j)].clone() * k.clone();
            self[(dst, j)] = self[(dst, j)].clone() + v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &T) {
        for i in 0..self.rows {
            let v = self[(i, src)].clone() * k.clone();
            self[(i, dst)] = self[(i, dst)].clone() + v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)].clone();
        }
    }

}

impl<T> std::ops::Index<(usize, usize)> for IntMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for IntMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> fmt::Display for IntMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// `A(Γ)`: weights on the diagonal, 1 for each edge, in ascending-id order.
pub fn intersection_matrix<T: Scalar>(g: &ResolutionGraph) -> IntMatrix<T> {
    let idx = g.index_map();
    let mut m = IntMatrix::zeros(g.len(), g.len());
    for (id, w) in g.vertices() {
        let i = idx[&id];
        m[(i, i)] = T::of(w);
    }
    for &(a, b) in g.edges() {
        let (i, j) = (idx[&a], idx[&b]);
        m[(i, j)] = m[(i, j)].clone() + T::one();
        m[(j, i)] = m[(j, i)].clone() + T::one();
    }
    m
}

/// Determinant by Bareiss fraction-free elimination.
pub fn determinant<T: Scalar>(m: &IntMatrix<T>) -> T {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.nrows();
    if n == 0 {
        return T::one();
    }
    let mut a = m.clone();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(i, k);
                    sign = -sign;
                }
                None => return T::zero(),
            }
        }
        let p = a[(k, k)].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = p.clone() * a[(i, j)].clone() - a[(i, k)].clone() * a[(k, j)].clone();
                a[(i, j)] = v / prev.clone();
            }
            a[(i, k)] = T::zero();
        }
        prev = p;
    }
    sign * a[(n - 1, n - 1)].clone()
}

/// Classical adjugate, `M · adj(M) = det(M) · I`.
///
/// Nonsingular input goes through fraction-free Gauss-Jordan on `[M | I]`;
/// singular input falls back to cofactors.
pub fn adjugate<T: Scalar>(m: &IntMatrix<T>) -> IntMatrix<T> {
    assert!(m.is_square(), "adjugate of a non-square matrix");
    let n = m.nrows();
    if n == 0 {
        return IntMatrix::zeros(0, 0);
    }
    if n == 1 {
        return IntMatrix::identity(1);
    }
    let mut a = IntMatrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = m[(i, j)].clone();
        }
        a[(i, n + i)] = T::one();
    }
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(i, k);
                    sign = -sign;
                }
                None => return adjugate_by_cofactors(m),
            }
        }
        let p = a[(k, k)].clone();
        for i in (0..n).filter(|&i| i != k) {
            let f = a[(i, k)].clone();
            for j in 0..2 * n {
                let v = p.clone() * a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                a[(i, j)] = v / prev.clone();
            }
        }
        prev = p;
    }
    let mut adj = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            adj[(i, j)] = sign.clone() * a[(i, n + j)].clone();
        }
    }
    adj
}

fn adjugate_by_cofactors<T: Scalar>(m: &IntMatrix<T>) -> IntMatrix<T> {
    let n = m.nrows();
    let mut adj = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let minor = determinant(&m.submatrix(&rows, &cols));
            adj[(i, j)] = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    adj
}

/// Smith normal form: `U · M · V = S` with `U`, `V` unimodular and `S`
/// diagonal with non-negative entries `d_1 | d_2 | ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm<T> {
    pub u: IntMatrix<T>,
    pub s: IntMatrix<T>,
    pub v: IntMatrix<T>,
}

impl<T: Scalar> SmithForm<T> {
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.s.nrows().min(self.s.ncols()))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form<T: Scalar>(m: &IntMatrix<T>) -> SmithForm<T> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        // Smallest non-zero entry of the trailing block becomes the pivot.
        let Some((pi, pj)) = min_abs_entry(&s, t) else {
            break;
        };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..r {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = nearest_quotient(&s[(i, t)], &s[(t, t)]);
                s.add_row(i, t, &-q.clone());
                u.add_row(i, t, &-q);
                if !s[(i, t)].is_zero() {
                    s.swap_rows(i, t);
                    u.swap_rows(i, t);
                    dirty = true;
                }
            }
            for j in t + 1..c {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = nearest_quotient(&s[(t, j)], &s[(t, t)]);
                s.add_col(j, t, &-q.clone());
                v.add_col(j, t, &-q);
                if !s[(t, j)].is_zero() {
                    s.swap_cols(j, t);
                    v.swap_cols(j, t);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row.
            let p = s[(t, t)].clone();
            let offender = (t + 1..r)
                .find(|&i| (t + 1..c).any(|j| !s[(i, j)].is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    s.add_row(t, i, &T::one());
                    u.add_row(t, i, &T::one());
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { u, s, v }
}

/// Quotient with the remainder of least absolute value; keeps `U`, `V` small.
fn nearest_quotient<T: Scalar>(a: &T, b: &T) -> T {
    let (q, r) = a.div_mod_floor(b);
    let two_r = r.clone() + r;
    // r shares the sign of b, so stepping q up moves r toward zero.
    if two_r.abs() > b.abs() {
        q + T::one()
    } else {
        q
    }
}

fn min_abs_entry<T: Scalar>(m: &IntMatrix<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, T)> = None;
    for i in t..m.nrows() {
        for j in t..m.ncols() {
            let a = m[(i, j)].abs();
            if !a.is_zero() && best.as_ref().is_none_or(|b| a < b.2) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Basis (as columns) of the integer kernel `{x : M x = 0}`.
pub fn integer_kernel<T: Scalar>(m: &IntMatrix<T>) -> Vec<Vec<T>> {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    (rank..m.ncols()).map(|j| snf.v.column(j)).collect()
}

/// Order of the finite cokernel `Z^r / M Z^c`, or `None` when infinite.
pub fn cokernel_order<T: Scalar>(m: &IntMatrix<T>) -> Option<T> {
    let snf = smith_normal_form(m);
    if snf.rank() < m.nrows() {
        return None;
    }
    Some(snf.diagonal().into_iter().fold(T::one(), |a, d| a * d))
}

/// True iff every leading principal minor of `-M` is positive.
pub fn is_negative_definite<T: Scalar>(m: &IntMatrix<T>) -> Result<bool> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.nrows();
    let mut a = m.neg();
    let mut prev = T::one();
    // Without pivoting, the k-th Bareiss pivot is the k-th leading minor.
    for k in 0..n {
        let p = a[(k, k)].clone();
        if !p.is_positive() {
            return Ok(false);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = p.clone() * a[(i, j)].clone() - a[(i, k)].clone() * a[(k, j)].clone();
                a[(i, j)] = v / prev.clone();
            }
        }
        prev = p;
    }
    Ok(true)
}

/// Leading principal minors of `M`, by cofactor-free direct determinants.
pub fn leading_minors<T: Scalar>(m: &IntMatrix<T>) -> Vec<T> {
    (1..=m.nrows())
        .map(|k| {
            let idx: Vec<usize> = (0..k).collect();
            determinant(&m.submatrix(&idx, &idx))
        })
        .collect()
}

/// Element of a finite abelian group in Smith coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DClass<T> {
    coords: Vec<T>,
    moduli: Vec<T>,
}

impl<T: Scalar> DClass<T> {
    pub fn new(coords: Vec<T>, moduli: Vec<T>) -> Self {
        assert_eq!(coords.len(), moduli.len(), "coordinate count");
        let coords = coords
            .into_iter()
            .zip(&moduli)
            .map(|(c, d)| c.mod_floor(d))
            .collect();
        Self { coords, moduli }
    }

    pub fn zero(moduli: &[T]) -> Self {
        Self {
            coords: vec![T::zero(); moduli.len()],
            moduli: moduli.to_vec(),
        }
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn moduli(&self) -> &[T] {
        &self.moduli
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.moduli != other.moduli {
            return Err(Error::ProfileMismatch(
                self.moduli.iter().map(ToString::to_string).collect(),
                other.moduli.iter().map(ToString::to_string).collect(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
            self.moduli.clone(),
        ))
    }

    pub fn neg(&self) -> Self {
        Self::new(
            self.coords.iter().map(|a| -a.clone()).collect(),
            self.moduli.clone(),
        )
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::new(
            self.coords.iter().map(|a| a.clone() * k.clone()).collect(),
            self.moduli.clone(),
        )
    }
}

/// `D(Γ) = coker A(Γ)`, with vertex classes and the pairing `A^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminantGroup<T: Scalar> {
    order: T,
    elementary_divisors: Vec<T>,
    vertex_ids: Vec<VertexId>,
    vertex_class: BTreeMap<VertexId, DClass<T>>,
    /// Exact `A(Γ)^{-1}`; its entries are `e_v · e_w = -ℓ_vw/|D|`.
    pairing: Vec<Vec<Ratio<T>>>,
    /// Columns lift Smith coordinates back to `Z^n`.
    lift: IntMatrix<T>,
}

impl<T: Scalar> DiscriminantGroup<T> {
    pub fn order(&self) -> &T {
        &self.order
    }

    pub fn elementary_divisors(&self) -> &[T] {
        &self.elementary_divisors
    }

    pub fn is_cyclic(&self) -> bool {
        self.elementary_divisors.len() <= 1
    }

    pub fn is_trivial(&self) -> bool {
        self.elementary_divisors.is_empty()
    }

    pub fn zero(&self) -> DClass<T> {
        DClass::zero(&self.elementary_divisors)
    }

    pub fn class_of(&self, v: VertexId) -> Option<&DClass<T>> {
        self.vertex_class.get(&v)
    }

    pub fn vertex_classes(&self) -> &BTreeMap<VertexId, DClass<T>> {
        &self.vertex_class
    }

    /// Exact `e_v · e_w` (not reduced mod 1).
    pub fn pairing(&self, v: VertexId, w: VertexId) -> Option<&Ratio<T>> {
        let i = self.vertex_ids.binary_search(&v).ok()?;
        let j = self.vertex_ids.binary_search(&w).ok()?;
        Some(&self.pairing[i][j])
    }

    pub fn pairing_matrix(&self) -> &[Vec<Ratio<T>>] {
        &self.pairing
    }

    /// The linking form `x · y` in `[0, 1)` for arbitrary classes.
    pub fn pair_classes(&self, x: &DClass<T>, y: &DClass<T>) -> Ratio<T> {
        let lx = self.lift_class(x);
        let ly = self.lift_class(y);
        let n = self.vertex_ids.len();
        let mut acc = Ratio::zero();
        for i in 0..n {
            if lx[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if ly[j].is_zero() {
                    continue;
                }
                acc = acc
                    + self.pairing[i][j].clone()
                        * Ratio::from_integer(lx[i].clone() * ly[j].clone());
            }
        }
        frac(&acc)
    }

    /// A vector in `Z^n` whose class is `x`.
    pub fn lift_class(&self, x: &DClass<T>) -> Vec<T> {
        self.lift.mul_vec(x.coords())
    }

    /// Class of an integer combination of vertex basis vectors.
    pub fn class_of_vector(&self, coeffs: &BTreeMap<VertexId, T>) -> DClass<T> {
        coeffs.iter().fold(self.zero(), |acc, (v, k)| {
            acc.add(&self.vertex_class[v].scale(k)).expect("same profile")
        })
    }

    /// Order of the subgroup generated by `gens`.
    pub fn subgroup_order(&self, gens: &[DClass<T>]) -> T {
        let k = self.elementary_divisors.len();
        if k == 0 {
            return T::one();
        }
        let mut m = IntMatrix::zeros(k, gens.len() + k);
        for (c, g) in gens.iter().enumerate() {
            for (r, x) in g.coords().iter().enumerate() {
                m[(r, c)] = x.clone();
            }
        }
        for (r, d) in self.elementary_divisors.iter().enumerate() {
            m[(r, gens.len() + r)] = d.clone();
        }
        let index = cokernel_order(&m).expect("full rank by construction");
        self.order.clone() / index
    }

    pub fn element_order(&self, x: &DClass<T>) -> T {
        self.subgroup_order(std::slice::from_ref(x))
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac<T: Scalar>(q: &Ratio<T>) -> Ratio<T> {
    q.clone() - q.floor()
}

/// Builds `D(Γ)` for a negative definite graph.
pub fn discriminant_group<T: Scalar>(g: &ResolutionGraph) -> Result<DiscriminantGroup<T>> {
    let a: IntMatrix<T> = intersection_matrix(g);
    if g.is_empty() || !is_negative_definite(&a)? {
        return Err(Error::NotNegativeDefinite);
    }
    let minus_a = a.neg();
    let snf = smith_normal_form(&minus_a);
    let diag = snf.diagonal();
    let nontrivial: Vec<usize> = (0..diag.len()).filter(|&i| !diag[i].is_one()).collect();
    let divisors: Vec<T> = nontrivial.iter().map(|&i| diag[i].clone()).collect();
    let order = determinant(&minus_a);
    debug_assert_eq!(
        divisors.iter().fold(T::one(), |x, d| x * d.clone()),
        order
    );

    let ids = g.vertex_ids();
    let mut vertex_class = BTreeMap::new();
    for (col, &id) in ids.iter().enumerate() {
        let coords = nontrivial.iter().map(|&r| snf.u[(r, col)].clone()).collect();
        vertex_class.insert(id, DClass::new(coords, divisors.clone()));
    }

    // U is unimodular, so U^{-1} = ± adj(U); keep the columns for the
    // nontrivial coordinates.
    let det_u = determinant(&snf.u);
    let u_inv = adjugate(&snf.u).scale(&det_u);
    let n = ids.len();
    let mut lift = IntMatrix::zeros(n, nontrivial.len());
    for (c, &r) in nontrivial.iter().enumerate() {
        for i in 0..n {
            lift[(i, c)] = u_inv[(i, r)].clone();
        }
    }

    // A^{-1} = -adj(-A) / det(-A)
    let adj = adjugate(&minus_a);
    let pairing = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Ratio::new(-adj[(i, j)].clone(), order.clone()))
                .collect()
        })
        .collect();

    Ok(DiscriminantGroup {
        order,
        elementary_divisors: divisors,
        vertex_ids: ids,
        vertex_class,
        pairing,
        lift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Signed};
    use proptest::prelude::*;

    fn chain(weights: &[i64]) -> ResolutionGraph {
        ResolutionGraph::new(
            weights.iter().enumerate().map(|(i, &w)| (i as u64 + 1, w)),
            (1..weights.len() as u64).map(|i| (i, i + 1)),
            None,
        )
        .unwrap()
    }

    /// Laplace expansion along the first row; independent of Bareiss.
    fn cofactor_det(m: &IntMatrix<i128>) -> i128 {
        let n = m.nrows();
        if n == 0 {
            return 1;
        }
        let mut acc = 0;
        for j in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = cofactor_det(&m.submatrix(&rows, &cols));
            let term = m[(0, j)] * minor;
            acc += if j % 2 == 0 { term } else { -term };
        }
        acc
    }

    #[test]
    fn small_matrices() {
        let g = chain(&[-2, -3]);
        let a: IntMatrix<i64> = intersection_matrix(&g);
        assert_eq!(a, IntMatrix::from_i64_rows(&[&[-2, 1], &[1, -3]]));
        assert_eq!(determinant(&a.neg()), 5);
        assert_eq!(
            adjugate(&a.neg()),
            IntMatrix::from_i64_rows(&[&[3, 1], &[1, 2]])
        );
        let one = IntMatrix::<i64>::from_i64_rows(&[&[2]]);
        assert_eq!(adjugate(&one), IntMatrix::from_i64_rows(&[&[1]]));
        assert_eq!(
            intersection_matrix::<i64>(&chain(&[-2])),
            IntMatrix::from_i64_rows(&[&[-2]])
        );
    }

    #[test]
    fn e8_is_unimodular() {
        let g = parse_graph(
            "vertex 1 -2\nvertex 2 -2\nvertex 3 -2\nvertex 4 -2\nvertex 5 -2\nvertex 6 -2\n\
             vertex 7 -2\nvertex 8 -2\nedge 1 2\nedge 2 3\nedge 3 4\nedge 4 5\nedge 5 6\n\
             edge 6 7\nedge 3 8\n",
        )
        .unwrap();
        let a: IntMatrix<i128> = intersection_matrix(&g);
        assert_eq!(cofactor_det(&a.neg()), 1);
        assert_eq!(determinant(&a.neg()), 1);
        let d = discriminant_group::<BigInt>(&g).unwrap();
        assert!(d.is_trivial());
        assert!(d.elementary_divisors().is_empty());
    }

    #[test]
    fn definiteness() {
        let m = IntMatrix::<i64>::from_i64_rows(&[&[-2]]);
        assert!(is_negative_definite(&m).unwrap());
        let star = ResolutionGraph::new(
            (1..=5).map(|i| (i, -2)),
            (2..=5).map(|i| (1, i)),
            None,
        )
        .unwrap();
        let a: IntMatrix<i64> = intersection_matrix(&star);
        assert!(!is_negative_definite(&a).unwrap());
        assert_eq!(*leading_minors(&a.neg()).last().unwrap(), 0);
        let asym = IntMatrix::<i64>::from_i64_rows(&[&[-2, 1], &[0, -2]]);
        assert_eq!(is_negative_definite(&asym), Err(Error::NotSymmetric));
    }

    #[test]
    fn smith_of_one_by_one() {
        let m = IntMatrix::<i64>::from_i64_rows(&[&[-2]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diagonal(), vec![2]);
        assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.s);
    }

    #[test]
    fn lone_vertex_group() {
        let d = discriminant_group::<i64>(&chain(&[-5])).unwrap();
        assert_eq!(*d.order(), 5);
        assert_eq!(d.elementary_divisors(), &[5]);
        assert_eq!(d.pairing(1, 1), Some(&Ratio::new(-1, 5)));
    }

    #[test]
    fn dclass_arithmetic() {
        let d = discriminant_group::<i64>(&chain(&[-2, -2, -2])).unwrap();
        let c = d.class_of(1).unwrap().clone();
        assert!(c.add(&c.neg()).unwrap().is_zero());
        assert!(c.scale(&4).is_zero());
        let gen = DClass::new(vec![1i64], vec![4]);
        assert!(gen.scale(&4).is_zero());
        let other = DClass::new(vec![1i64, 1], vec![2, 2]);
        assert!(matches!(gen.add(&other), Err(Error::ProfileMismatch(..))));
        assert_eq!(d.element_order(&c), 4);
    }

    #[test]
    fn pair_classes_matches_vertex_pairing() {
        let g = chain(&[-2, -3, -4]);
        let d = discriminant_group::<i64>(&g).unwrap();
        for v in 1..=3 {
            for w in 1..=3 {
                let direct = frac(d.pairing(v, w).unwrap());
                let via = d.pair_classes(d.class_of(v).unwrap(), d.class_of(w).unwrap());
                assert_eq!(direct, via);
            }
        }
    }

    fn arb_matrix(max_n: usize, range: i64) -> impl Strategy<Value = IntMatrix<i128>> {
        (1..=max_n, 1..=max_n).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(-range..=range, r * c).prop_map(move |v| {
                IntMatrix::from_rows(
                    v.chunks(c)
                        .map(|row| row.iter().map(|&x| i128::from(x)).collect())
                        .collect(),
                )
            })
        })
    }

    fn arb_square(max_n: usize, range: i64) -> impl Strategy<Value = IntMatrix<i128>> {
        (1..=max_n).prop_flat_map(move |n| {
            proptest::collection::vec(-range..=range, n * n).prop_map(move |v| {
                IntMatrix::from_rows(
                    v.chunks(n)
                        .map(|row| row.iter().map(|&x| i128::from(x)).collect())
                        .collect(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor_expansion(m in arb_square(6, 6)) {
            prop_assert_eq!(determinant(&m), cofactor_det(&m));
        }

        #[test]
        fn adjugate_identity(m in arb_square(6, 5)) {
            let det = determinant(&m);
            let n = m.nrows();
            prop_assert_eq!(m.mul(&adjugate(&m)), IntMatrix::identity(n).scale(&det));
            prop_assert_eq!(adjugate(&m), adjugate_by_cofactors(&m));
        }

        #[test]
        fn smith_form_is_valid(m in arb_matrix(5, 9)) {
            let m: IntMatrix<BigInt> = m.map(|x| BigInt::from(*x));
            let zero = BigInt::zero();
            let snf = smith_normal_form(&m);
            prop_assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.s.clone());
            prop_assert!(determinant(&snf.u).abs().is_one());
            prop_assert!(determinant(&snf.v).abs().is_one());
            let d = snf.diagonal();
            for i in 0..snf.s.nrows() {
                for j in 0..snf.s.ncols() {
                    if i != j {
                        prop_assert!(snf.s[(i, j)].is_zero());
                    }
                }
            }
            for w in d.windows(2) {
                prop_assert!(w[0] >= zero);
                if w[0].is_zero() { prop_assert!(w[1].is_zero()); } else { prop_assert!(w[1].is_multiple_of(&w[0])); }
            }
        }

        #[test]
        fn kernel_vectors_are_killed(m in arb_matrix(4, 6)) {
            let m: IntMatrix<BigInt> = m.map(|x| BigInt::from(*x));
            let ker = integer_kernel(&m);
            let snf = smith_normal_form(&m);
            prop_assert_eq!(ker.len(), m.ncols() - snf.rank());
            for x in &ker {
                prop_assert!(m.mul_vec(x).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn scalar_types_agree(m in arb_square(5, 7)) {
            let big: IntMatrix<BigInt> = m.map(|x| BigInt::from(*x));
            prop_assert_eq!(determinant(&big), BigInt::from(determinant(&m)));
            prop_assert_eq!(adjugate(&big), adjugate(&m).map(|x| BigInt::from(*x)));
        }
    }
}
