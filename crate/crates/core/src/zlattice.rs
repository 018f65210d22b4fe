//! Exact integer linear algebra over finitely generated abelian groups.
//!
//! Everything here works with arbitrary-precision integers. The Smith normal
//! form is the workhorse: cokernels, kernels, integer solving, sublattice
//! saturation and subgroup coordinates are all read off from it.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;

/// Shorthand for building a [`BigInt`] from a machine integer.
pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "] ({}x{})", self.rows, self.cols)
    }
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<Int>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix row");
            data.extend(row);
        }
        IntegerMatrix { rows: n, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| int_vec(r)).collect(), cols)
    }

    /// Matrix whose columns are the given vectors, each of length `n`.
    pub fn from_columns(columns: &[Vec<Int>], n: usize) -> Self {
        let mut m = Self::zeros(n, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), n, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn diagonal(entries: &[Int]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Int] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Int> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Int>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..other.cols {
                out[(r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        out
    }

    pub fn vstack(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntegerMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Sub-matrix of the given rows (in order).
    pub fn select_rows(&self, rows: &[usize]) -> IntegerMatrix {
        Self::from_rows(rows.iter().map(|&r| self.row(r).to_vec()).collect(), self.cols)
    }

    pub fn select_columns(&self, cols: &[usize]) -> IntegerMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out[(r, j)] = self[(r, c)].clone();
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let s = &self.data[src * self.cols + c];
            if !s.is_zero() {
                let t = s * k;
                self.data[dst * self.cols + c] += t;
            }
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let s = &self.data[r * self.cols + src];
            if !s.is_zero() {
                let t = s * k;
                self.data[r * self.cols + dst] += t;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = &mut self.data[r * self.cols + c];
            *v = -std::mem::take(v);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = &mut self.data[r * self.cols + c];
            *v = -std::mem::take(v);
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = v / &prev;
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = Int;
    fn index(&self, (r, c): (usize, usize)) -> &Int {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Int {
        &mut self.data[r * self.cols + c]
    }
}

/// Result of [`smith_normal_form`]: `u * a * v == d`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    /// Nonzero diagonal entries of `d`, each dividing the next.
    pub invariant_factors: Vec<Int>,
    pub rank: usize,
}

/// Smith normal form with unimodular transforms.
///
/// Pivot choice is the smallest nonzero absolute value in the active
/// submatrix, ties broken by row-major position, so the output is fully
/// deterministic.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut u_inv = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);
    let mut rank = 0;

    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &d[(i, j)];
                    if x.is_zero() {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => x.magnitude() < d[(bi, bj)].magnitude(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, u_inv, d, v, rank);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                let nq = -q.clone();
                d.add_row_multiple(i, t, &nq);
                u.add_row_multiple(i, t, &nq);
                u_inv.add_col_multiple(t, i, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&d[(t, t)]))
            });
            if let Some(i) = bad {
                let one = Int::one();
                d.add_row_multiple(t, i, &one);
                u.add_row_multiple(t, i, &one);
                u_inv.add_col_multiple(i, t, &-one);
                continue;
            }
            break;
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        rank += 1;
    }
    finish(u, u_inv, d, v, rank)
}

fn finish(
    u: IntegerMatrix,
    u_inv: IntegerMatrix,
    d: IntegerMatrix,
    v: IntegerMatrix,
    rank: usize,
) -> SmithForm {
    let invariant_factors = (0..rank).map(|i| d[(i, i)].clone()).collect();
    SmithForm { u, u_inv, d, v, invariant_factors, rank }
}

/// Row-style Hermite normal form: returns `(h, t)` with `t` unimodular and
/// `t * a == h`. Nonzero rows come first, pivots are positive and strictly
/// increase in column, entries above a pivot lie in `[0, pivot)`.
pub fn hermite_normal_form(a: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut t = IntegerMatrix::identity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let pivot = (r..m)
                .filter(|&i| !h[(i, c)].is_zero())
                .min_by(|&i, &j| h[(i, c)].magnitude().cmp(h[(j, c)].magnitude()).then(i.cmp(&j)));
            let Some(p) = pivot else { break };
            h.swap_rows(r, p);
            t.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = -h[(i, c)].div_floor(&h[(r, c)]);
                h.add_row_multiple(i, r, &q);
                t.add_row_multiple(i, r, &q);
                if !h[(i, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m && !h[(r, c)].is_zero() {
            if h[(r, c)].is_negative() {
                h.negate_row(r);
                t.negate_row(r);
            }
            for i in 0..r {
                let q = -h[(i, c)].div_floor(&h[(r, c)]);
                h.add_row_multiple(i, r, &q);
                t.add_row_multiple(i, r, &q);
            }
            r += 1;
        }
    }
    (h, t)
}

/// Canonical basis (HNF rows) of the lattice spanned by `generators` in Z^n.
pub fn lattice_basis(generators: &[Vec<Int>], n: usize) -> Vec<Vec<Int>> {
    if generators.is_empty() {
        return Vec::new();
    }
    let (h, _) = hermite_normal_form(&IntegerMatrix::from_rows(generators.to_vec(), n));
    h.to_rows().into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
}

/// A basis of the integer kernel `{x : a x = 0}`, in Hermite normal form.
pub fn kernel_basis(a: &IntegerMatrix) -> Vec<Vec<Int>> {
    let snf = smith_normal_form(a);
    let raw: Vec<Vec<Int>> = (snf.rank..a.cols()).map(|j| snf.v.column(j)).collect();
    lattice_basis(&raw, a.cols())
}

/// Finds an integer `x` with `a x = b`, or `None` if there is none.
pub fn solve_integer(a: &IntegerMatrix, b: &[Int]) -> Option<Vec<Int>> {
    solve_with(&smith_normal_form(a), b)
}

/// Integer solve reusing a precomputed Smith form of the system matrix.
pub fn solve_with(snf: &SmithForm, b: &[Int]) -> Option<Vec<Int>> {
    let ub = snf.u.mul_vec(b);
    let mut y = vec![Int::zero(); snf.v.rows()];
    for (i, c) in ub.iter().enumerate() {
        if i < snf.rank {
            let (q, r) = c.div_rem(&snf.invariant_factors[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Basis of `(L ⊗ Q) ∩ Z^n` for the lattice `L` spanned by `generators`.
pub fn sublattice_saturation(generators: &[Vec<Int>], n: usize) -> Vec<Vec<Int>> {
    if generators.is_empty() {
        return Vec::new();
    }
    let snf = smith_normal_form(&IntegerMatrix::from_columns(generators, n));
    let cols: Vec<Vec<Int>> = (0..snf.rank).map(|j| snf.u_inv.column(j)).collect();
    lattice_basis(&cols, n)
}

/// `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with `d_i | d_{i+1}` and every `d_i ≥ 2`.
///
/// Elements are coordinate vectors: free coordinates first, then torsion
/// residues reduced into `[0, d_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmbientAbelianGroup {
    free_rank: usize,
    torsion: Vec<Int>,
}

impl AmbientAbelianGroup {
    pub fn free(rank: usize) -> Self {
        AmbientAbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    /// Normalizes an arbitrary list of cyclic orders into invariant factors.
    /// Orders of 0 count as free summands, orders of 1 vanish.
    pub fn new(free_rank: usize, cyclic_orders: &[Int]) -> Self {
        let mut extra_free = 0;
        let finite: Vec<Int> = cyclic_orders
            .iter()
            .filter(|d| {
                if d.is_zero() {
                    extra_free += 1;
                    false
                } else {
                    true
                }
            })
            .map(|d| d.abs())
            .collect();
        let torsion = invariant_factors_of(&finite);
        AmbientAbelianGroup { free_rank: free_rank + extra_free, torsion }
    }

    /// Accepts a torsion list only if it is already in invariant-factor form.
    pub fn from_invariants(free_rank: usize, torsion: Vec<Int>) -> Result<Self, String> {
        for (i, d) in torsion.iter().enumerate() {
            if *d < int(2) {
                return Err(format!("torsion[{i}] = {d} must be at least 2"));
            }
            if i > 0 && !d.is_multiple_of(&torsion[i - 1]) {
                return Err(format!("torsion[{}] = {} does not divide torsion[{i}] = {d}", i - 1, torsion[i - 1]));
            }
        }
        Ok(AmbientAbelianGroup { free_rank, torsion })
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[Int] {
        &self.torsion
    }

    /// Number of coordinates of an element.
    pub fn dim(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn zero(&self) -> Vec<Int> {
        vec![Int::zero(); self.dim()]
    }

    pub fn reduce(&self, x: &mut [Int]) {
        for (i, d) in self.torsion.iter().enumerate() {
            let v = &mut x[self.free_rank + i];
            *v = v.mod_floor(d);
        }
    }

    pub fn reduced(&self, mut x: Vec<Int>) -> Vec<Int> {
        self.reduce(&mut x);
        x
    }

    pub fn add(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        self.reduced(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        self.reduced(a.iter().zip(b).map(|(x, y)| x - y).collect())
    }

    pub fn scale(&self, k: &Int, a: &[Int]) -> Vec<Int> {
        self.reduced(a.iter().map(|x| x * k).collect())
    }

    pub fn neg(&self, a: &[Int]) -> Vec<Int> {
        self.reduced(a.iter().map(|x| -x).collect())
    }

    pub fn contains_element(&self, x: &[Int]) -> bool {
        x.len() == self.dim()
            && self
                .torsion
                .iter()
                .enumerate()
                .all(|(i, d)| !x[self.free_rank + i].is_negative() && x[self.free_rank + i] < *d)
    }

    /// Columns `d_i e_{r+i}` generating the kernel of `Z^dim → self`.
    pub fn relation_columns(&self) -> IntegerMatrix {
        let mut m = IntegerMatrix::zeros(self.dim(), self.torsion.len());
        for (i, d) in self.torsion.iter().enumerate() {
            m[(self.free_rank + i, i)] = d.clone();
        }
        m
    }

    /// Direct sum, coordinates `(free_a, free_b, tors_a, tors_b)` re-normalized.
    /// Returns the group together with the two coordinate embeddings.
    pub fn direct_sum(&self, other: &Self) -> (Self, IntegerMatrix, IntegerMatrix) {
        let raw_dim = self.dim() + other.dim();
        let mut rel = IntegerMatrix::zeros(raw_dim, self.torsion.len() + other.torsion.len());
        for (i, d) in self.torsion.iter().enumerate() {
            rel[(self.free_rank + i, i)] = d.clone();
        }
        for (i, d) in other.torsion.iter().enumerate() {
            rel[(self.dim() + other.free_rank + i, self.torsion.len() + i)] = d.clone();
        }
        let q = Quotient::of(&rel);
        let ia = q.proj.select_columns(&(0..self.dim()).collect::<Vec<_>>());
        let ib = q.proj.select_columns(&(self.dim()..raw_dim).collect::<Vec<_>>());
        (q.group, ia, ib)
    }

    pub fn to_finite(&self) -> Option<FiniteAbelianGroup> {
        (self.free_rank == 0).then(|| FiniteAbelianGroup { factors: self.torsion.clone() })
    }
}

impl fmt::Display for AmbientAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", self.free_rank) });
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

fn invariant_factors_of(orders: &[Int]) -> Vec<Int> {
    if orders.is_empty() {
        return Vec::new();
    }
    let snf = smith_normal_form(&IntegerMatrix::diagonal(orders));
    snf.invariant_factors.into_iter().filter(|d| !d.is_one()).collect()
}

/// A finite abelian group in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<Int>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup { factors: Vec::new() }
    }

    pub fn cyclic(n: i64) -> Self {
        Self::from_orders(&[int(n)])
    }

    /// Normalizes any list of positive cyclic orders.
    pub fn from_orders(orders: &[Int]) -> Self {
        assert!(orders.iter().all(|d| d.is_positive()), "finite group orders must be positive");
        FiniteAbelianGroup { factors: invariant_factors_of(orders) }
    }

    pub fn factors(&self) -> &[Int] {
        &self.factors
    }

    pub fn order(&self) -> Int {
        self.factors.iter().product()
    }

    /// Smallest positive integer annihilating the group (1 when trivial).
    pub fn exponent(&self) -> Int {
        self.factors.last().cloned().unwrap_or_else(Int::one)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn as_ambient(&self) -> AmbientAbelianGroup {
        AmbientAbelianGroup { free_rank: 0, torsion: self.factors.clone() }
    }

    /// All elements as residue vectors, in lexicographic order.
    pub fn elements(&self) -> Vec<Vec<Int>> {
        let mut out = vec![Vec::new()];
        for d in &self.factors {
            let mut next = Vec::new();
            for prefix in &out {
                let mut k = Int::zero();
                while k < *d {
                    let mut e = prefix.clone();
                    e.push(k.clone());
                    next.push(e);
                    k += 1;
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_ambient())
    }
}

/// A quotient `Z^n / image(A)` together with the coordinate projection and a
/// coordinate section.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: AmbientAbelianGroup,
    /// `group.dim() × n`; apply then reduce.
    pub proj: IntegerMatrix,
    /// `n × group.dim()`; `proj ∘ lift` is the identity on coordinates.
    pub lift: IntegerMatrix,
}

impl Quotient {
    /// Quotient of `Z^n` by the column span of `a` (an `n × m` matrix).
    pub fn of(a: &IntegerMatrix) -> Self {
        let n = a.rows();
        let snf = smith_normal_form(a);
        let mut order: Vec<usize> = (snf.rank..n).collect();
        let mut torsion = Vec::new();
        for (i, d) in snf.invariant_factors.iter().enumerate() {
            if !d.is_one() {
                order.push(i);
                torsion.push(d.clone());
            }
        }
        let group = AmbientAbelianGroup { free_rank: n - snf.rank, torsion };
        let proj = snf.u.select_rows(&order);
        let lift = snf.u_inv.select_columns(&order);
        Quotient { group, proj, lift }
    }

    pub fn project(&self, x: &[Int]) -> Vec<Int> {
        self.group.reduced(self.proj.mul_vec(x))
    }
}

/// The cokernel `Z^n / image(A)` of a map `A: Z^m → Z^n`.
pub fn cokernel(a: &IntegerMatrix) -> AmbientAbelianGroup {
    Quotient::of(a).group
}

/// A subgroup `H` of an ambient group, with coordinates identifying `H` with
/// an abstract group in normal form.
#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: AmbientAbelianGroup,
    /// HNF basis of the lift of `H` to `Z^dim` (contains the torsion relations).
    basis: Vec<Vec<Int>>,
    pivots: Vec<usize>,
    quotient: Quotient,
}

impl Subgroup {
    pub fn generated_by(ambient: &AmbientAbelianGroup, generators: &[Vec<Int>]) -> Self {
        let n = ambient.dim();
        let mut all: Vec<Vec<Int>> = generators.to_vec();
        all.extend(ambient.relation_columns().columns());
        let basis = lattice_basis(&all, n);
        let pivots = basis
            .iter()
            .map(|row| row.iter().position(|x| !x.is_zero()).expect("nonzero basis row"))
            .collect();
        let mut sg = Subgroup {
            ambient: ambient.clone(),
            basis,
            pivots,
            quotient: Quotient::of(&IntegerMatrix::zeros(0, 0)),
        };
        let rel_coords: Vec<Vec<Int>> = ambient
            .relation_columns()
            .columns()
            .iter()
            .map(|c| sg.lattice_coords(c).expect("relation lies in subgroup lift"))
            .collect();
        let h = sg.basis.len();
        sg.quotient = Quotient::of(&IntegerMatrix::from_columns(&rel_coords, h));
        sg
    }

    pub fn ambient(&self) -> &AmbientAbelianGroup {
        &self.ambient
    }

    /// The abstract isomorphism type of the subgroup.
    pub fn structure(&self) -> &AmbientAbelianGroup {
        &self.quotient.group
    }

    fn lattice_coords(&self, y: &[Int]) -> Option<Vec<Int>> {
        let mut rest = y.to_vec();
        let mut c = Vec::with_capacity(self.basis.len());
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (x, b) in rest.iter_mut().zip(row) {
                    *x -= &q * b;
                }
            }
            c.push(q);
        }
        rest.iter().all(Zero::is_zero).then_some(c)
    }

    pub fn contains(&self, y: &[Int]) -> bool {
        self.lattice_coords(y).is_some()
    }

    /// Coordinates of `y ∈ H` in [`Self::structure`], or `None` if `y ∉ H`.
    pub fn coords(&self, y: &[Int]) -> Option<Vec<Int>> {
        self.lattice_coords(y).map(|c| self.quotient.project(&c))
    }

    /// Inverse of [`Self::coords`].
    pub fn embed(&self, coords: &[Int]) -> Vec<Int> {
        let c = self.quotient.lift.mul_vec(coords);
        let mut y = self.ambient.zero();
        for (k, row) in c.iter().zip(&self.basis) {
            if k.is_zero() {
                continue;
            }
            for (x, b) in y.iter_mut().zip(row) {
                *x += k * b;
            }
        }
        self.ambient.reduced(y)
    }

    /// Canonical representative of the coset `y + H`, in `Z^dim`.
    pub fn coset_representative(&self, y: &[Int]) -> Vec<Int> {
        let mut rest = y.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let q = rest[p].div_floor(&row[p]);
            if !q.is_zero() {
                for (x, b) in rest.iter_mut().zip(row) {
                    *x -= &q * b;
                }
            }
        }
        rest
    }

    /// Canonical description: HNF rows of the lifted lattice.
    pub fn canonical_basis(&self) -> &[Vec<Int>] {
        &self.basis
    }
}

/// Primitive part of an integer vector (divided by the gcd of its entries).
pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = v.iter().fold(Int::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        v.to_vec()
    } else {
        v.iter().map(|x| x / &g).collect()
    }
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_zero_vec(v: &[Int]) -> bool {
    v.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_i64(rows)
    }

    fn check_smith(a: &IntegerMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntegerMatrix::identity(a.rows()));
        assert!(s.u.determinant().abs().is_one());
        assert!(s.v.determinant().abs().is_one());
        s
    }

    #[test]
    fn smith_examples() {
        assert_eq!(check_smith(&m(&[&[2, 0], &[0, 3]])).invariant_factors, int_vec(&[1, 6]));
        assert_eq!(check_smith(&IntegerMatrix::identity(2)).invariant_factors, int_vec(&[1, 1]));
        assert!(check_smith(&IntegerMatrix::zeros(2, 2)).invariant_factors.is_empty());
        assert_eq!(
            check_smith(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])).invariant_factors,
            int_vec(&[2, 6, 12])
        );
    }

    #[test]
    fn smith_of_empty_shapes() {
        let s = check_smith(&IntegerMatrix::zeros(3, 0));
        assert_eq!(s.rank, 0);
        let s = check_smith(&IntegerMatrix::zeros(0, 2));
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel(&m(&[&[2]])), AmbientAbelianGroup::new(0, &int_vec(&[2])));
        assert_eq!(cokernel(&m(&[&[2, 0], &[0, 3]])), AmbientAbelianGroup::new(0, &int_vec(&[6])));
        assert_eq!(cokernel(&m(&[&[1], &[0]])), AmbientAbelianGroup::free(1));
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve_integer(&m(&[&[2]]), &int_vec(&[4])), Some(int_vec(&[2])));
        assert_eq!(solve_integer(&m(&[&[2]]), &int_vec(&[3])), None);
        assert_eq!(solve_integer(&m(&[&[2, 0], &[0, 3]]), &int_vec(&[4, 9])), Some(int_vec(&[2, 3])));
    }

    #[test]
    fn saturation_examples() {
        let n2 = vec![int_vec(&[1, 0]), int_vec(&[0, 1])];
        assert_eq!(sublattice_saturation(&[int_vec(&[2, 0]), int_vec(&[0, 2])], 2), n2);
        assert_eq!(sublattice_saturation(&[int_vec(&[1, 1])], 2), vec![int_vec(&[1, 1])]);
        assert_eq!(sublattice_saturation(&[int_vec(&[2, 4])], 2), vec![int_vec(&[1, 2])]);
    }

    #[test]
    fn hnf_is_echelon_and_reduced() {
        let a = m(&[&[4, 6, 2], &[2, 2, 2], &[6, 8, 4]]);
        let (h, t) = hermite_normal_form(&a);
        assert_eq!(t.mul(&a), h);
        assert!(t.determinant().abs().is_one());
        assert_eq!(h, m(&[&[2, 0, 4], &[0, 2, -2], &[0, 0, 0]]));
    }

    #[test]
    fn subgroup_coordinates_roundtrip() {
        let amb = AmbientAbelianGroup::new(1, &int_vec(&[2]));
        let h = Subgroup::generated_by(&amb, &[int_vec(&[2, 1])]);
        assert_eq!(h.structure(), &AmbientAbelianGroup::free(1));
        let y = int_vec(&[4, 0]);
        let c = h.coords(&y).unwrap();
        assert_eq!(h.embed(&c), y);
        assert!(!h.contains(&int_vec(&[2, 0])));
        let t = Subgroup::generated_by(&amb, &[int_vec(&[0, 1])]);
        assert_eq!(t.structure(), &AmbientAbelianGroup::new(0, &int_vec(&[2])));
    }

    #[test]
    fn ambient_normalization() {
        let g = AmbientAbelianGroup::new(0, &int_vec(&[4, 6]));
        assert_eq!(g.torsion(), &int_vec(&[2, 12])[..]);
        assert!(AmbientAbelianGroup::from_invariants(0, int_vec(&[4, 6])).is_err());
        assert_eq!(FiniteAbelianGroup::from_orders(&int_vec(&[2, 3])).factors(), &int_vec(&[6])[..]);
        assert_eq!(FiniteAbelianGroup::from_orders(&int_vec(&[2, 2])).elements().len(), 4);
    }
}
