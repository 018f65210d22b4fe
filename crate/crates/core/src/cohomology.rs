//! Cohomology over prime fields: finite groups, degreewise Čech complexes of
//! standard Kummer covers, and Koszul complexes of characters.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::monoid::MonoidElement;
use crate::morphism::{is_prime, self_product_decomposition, MonoidHom, SelfProduct};
use crate::zlattice::{solve_integer, AmbientAbelianGroup, FiniteAbelianGroup, Int, IntegerMatrix};

/// Dense matrix over `F_ℓ`, row-major, entries in `[0, ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ModMatrix { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    fn add_to(&mut self, r: usize, c: usize, v: u64, ell: u64) {
        let e = &mut self.entries[r * self.cols + c];
        *e = (*e + v) % ell;
    }

    pub fn mul(&self, other: &ModMatrix, ell: u64) -> ModMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ModMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        out.add_to(i, j, mul_mod(a, b, ell), ell);
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }
}

fn mul_mod(a: u64, b: u64, ell: u64) -> u64 {
    ((a as u128 * b as u128) % ell as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, ell: u64) -> u64 {
    let mut acc = 1 % ell;
    base %= ell;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, ell);
        }
        base = mul_mod(base, base, ell);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, ell: u64) -> u64 {
    pow_mod(a, ell - 2, ell)
}

/// Rank over `F_ℓ` by Gaussian elimination.
pub fn rank_mod(m: &ModMatrix, ell: u64) -> usize {
    // eliminate along the shorter side
    let (rows, cols, mut a) = if m.rows <= m.cols {
        (m.rows, m.cols, m.entries.clone())
    } else {
        let mut t = vec![0u64; m.entries.len()];
        for r in 0..m.rows {
            for c in 0..m.cols {
                t[c * m.rows + r] = m.get(r, c);
            }
        }
        (m.cols, m.rows, t)
    };
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
        }
        let inv = inv_mod(a[rank * cols + c], ell);
        for j in c..cols {
            a[rank * cols + j] = mul_mod(a[rank * cols + j], inv, ell);
        }
        for r in rank + 1..rows {
            let f = a[r * cols + c];
            if f == 0 {
                continue;
            }
            for j in c..cols {
                let sub = mul_mod(f, a[rank * cols + j], ell);
                a[r * cols + j] = (a[r * cols + j] + ell - sub) % ell;
            }
        }
        rank += 1;
    }
    rank
}

/// A bounded cochain complex `C^0 → C^1 → ⋯` over `F_ℓ`; `differentials[i]`
/// maps `C^i` to `C^{i+1}`.
#[derive(Clone, Debug)]
pub struct PrimeFieldComplex {
    ell: u64,
    dims: Vec<usize>,
    differentials: Vec<ModMatrix>,
}

impl PrimeFieldComplex {
    /// Checks shapes and `d ∘ d = 0`.
    pub fn new(ell: u64, dims: Vec<usize>, differentials: Vec<ModMatrix>) -> Result<Self> {
        if !is_prime(ell) {
            return Err(Error::InvalidCharacteristic(ell));
        }
        if dims.is_empty() || differentials.len() + 1 != dims.len() {
            return Err(Error::InvalidInput("need one differential between consecutive terms".into()));
        }
        for (i, d) in differentials.iter().enumerate() {
            if d.rows != dims[i + 1] || d.cols != dims[i] {
                return Err(Error::InvalidInput(format!("differential {i} has the wrong shape")));
            }
        }
        for i in 1..differentials.len() {
            if !differentials[i].mul(&differentials[i - 1], ell).is_zero() {
                return Err(Error::Diagnostic(format!("d∘d ≠ 0 at degree {i}")));
            }
        }
        Ok(PrimeFieldComplex { ell, dims, differentials })
    }

    pub fn characteristic(&self) -> u64 {
        self.ell
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn differentials(&self) -> &[ModMatrix] {
        &self.differentials
    }

    /// `dim H^i` for every term; the last term is treated as having a zero
    /// outgoing differential.
    pub fn cohomology(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.differentials.iter().map(|d| rank_mod(d, self.ell)).collect();
        (0..self.dims.len())
            .map(|i| {
                let out = if i < ranks.len() { ranks[i] } else { 0 };
                let inc = if i > 0 { ranks[i - 1] } else { 0 };
                self.dims[i] - out - inc
            })
            .collect()
    }
}

/// `dim H^i(G, F_ℓ)` for `i ≤ max_degree`, trivial coefficients, from the
/// tensor product of the periodic resolutions of the cyclic factors.
pub fn finite_group_cohomology(g: &FiniteAbelianGroup, ell: u64, max_degree: usize) -> Result<Vec<usize>> {
    if !is_prime(ell) {
        return Err(Error::InvalidCharacteristic(ell));
    }
    let orders: Vec<u64> = g.factors().iter().map(|d| (d % Int::from(ell)).to_u64().unwrap()).collect();
    let s = orders.len();
    let top = max_degree + 1;
    let basis: Vec<Vec<Vec<usize>>> = (0..=top).map(|n| multi_indices(s, n)).collect();
    let index: Vec<HashMap<Vec<usize>, usize>> =
        basis.iter().map(|b| b.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect()).collect();
    let mut differentials = Vec::new();
    for n in 0..top {
        let mut d = ModMatrix::zeros(basis[n + 1].len(), basis[n].len());
        for (c, idx) in basis[n].iter().enumerate() {
            let mut sign_deg = 0;
            for k in 0..s {
                // cochain differential of Z/d: 0 out of even degrees, ×d out of odd
                if idx[k] % 2 == 1 && orders[k] != 0 {
                    let mut next = idx.clone();
                    next[k] += 1;
                    let v = if sign_deg % 2 == 0 { orders[k] } else { ell - orders[k] };
                    d.add_to(index[n + 1][&next], c, v, ell);
                }
                sign_deg += idx[k];
            }
        }
        differentials.push(d);
    }
    let dims = basis.iter().map(Vec::len).collect();
    let cx = PrimeFieldComplex::new(ell, dims, differentials)?;
    let mut h = cx.cohomology();
    h.truncate(max_degree + 1);
    Ok(h)
}

/// Exponent vectors in `N^s` of total degree `n`, lexicographically.
fn multi_indices(s: usize, n: usize) -> Vec<Vec<usize>> {
    if s == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=n).rev() {
        for mut rest in multi_indices(s - 1, n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Augmented and unaugmented dimensions of one slice.
type SliceDims = (Vec<usize>, Vec<usize>);

/// Degreewise Čech data for a Kummer map: self-products up to a length, the
/// inverses of their identifications, and the coface maps transported to
/// `Q ⊕ G^{j-1}`.
pub struct CechData {
    ell: u64,
    u: MonoidHom,
    products: Vec<SelfProduct>,
    /// `cofaces[j-1][i]` is `Ψ_i: Q ⊕ G^{j-1} → Q ⊕ G^j` on raw target
    /// coordinates, for `i = 0..=j`.
    cofaces: Vec<Vec<IntegerMatrix>>,
    group_elements: Vec<Vec<Int>>,
    group: FiniteAbelianGroup,
    cache: Mutex<HashMap<Vec<ModMatrix>, SliceDims>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechSlice {
    pub degree: MonoidElement,
    pub dims: Vec<usize>,
    /// Cohomology of the augmented complex; all but the last entry vanish
    /// when it is exact.
    pub augmented: Vec<usize>,
    /// Cohomology without the augmentation term.
    pub unaugmented: Vec<usize>,
    pub exact: bool,
}

impl CechData {
    /// Self-products for `j = 1..=length-1`, so the augmented complex has
    /// `length` terms `k[P]_q, k[Q]_q, k[Q ⊕ G]_q, …`.
    pub fn new(u: &MonoidHom, ell: u64, length: usize) -> Result<Self> {
        if !is_prime(ell) {
            return Err(Error::InvalidCharacteristic(ell));
        }
        if length < 2 {
            return Err(Error::InvalidInput("the augmented complex needs at least two terms".into()));
        }
        let products = (1..length).map(|j| self_product_decomposition(u, j)).collect::<Result<Vec<_>>>()?;
        let group = products[0].galois_group.clone();
        if group.order().clone() % Int::from(ell) == Int::zero() {
            return Err(Error::Precondition(format!("{ell} divides |G| = {}", group.order())));
        }
        for sp in &products {
            if !sp.certified {
                return Err(Error::Diagnostic(sp.counterexample.clone().unwrap_or_default()));
            }
        }
        let mut cofaces = Vec::new();
        for j in 1..products.len() {
            cofaces.push(coface_maps(&products[j - 1], &products[j], j)?);
        }
        let group_elements = products[0].class_group().to_finite().expect("Kummer cokernel is finite").elements();
        Ok(CechData {
            ell,
            u: products[0].tight_map.clone(),
            products,
            cofaces,
            group_elements,
            group,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn galois_group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    /// The Kummer map between tightened monoids; degrees live in the
    /// codomain's group.
    pub fn tight_map(&self) -> &MonoidHom {
        &self.u
    }

    /// The degree-`q` slice of the augmented complex.
    pub fn slice(&self, q: &[Int]) -> Result<CechSlice> {
        let (dims, diffs, q) = self.slice_matrices(q)?;
        let cached = self.cache.lock().expect("cache lock").get(&diffs).cloned();
        let (augmented, unaugmented) = match cached {
            Some(h) => h,
            None => {
                let h = slice_cohomology(self.ell, &dims, &diffs)?;
                self.cache.lock().expect("cache lock").insert(diffs, h.clone());
                h
            }
        };
        let last = augmented.len() - 1;
        let exact = augmented[..last].iter().all(|&h| h == 0);
        Ok(CechSlice { degree: q, dims, augmented, unaugmented, exact })
    }

    /// The degree-`q` slice as a complex, without caching.
    pub fn slice_complex(&self, q: &[Int]) -> Result<PrimeFieldComplex> {
        let (dims, diffs, _) = self.slice_matrices(q)?;
        PrimeFieldComplex::new(self.ell, dims, diffs)
    }

    fn slice_matrices(&self, q: &[Int]) -> Result<(Vec<usize>, Vec<ModMatrix>, MonoidElement)> {
        let u = &self.u;
        let qm = u.codomain();
        if q.len() != qm.ambient().dim() {
            return Err(Error::AmbientMismatch(format!(
                "degree has {} coordinates, the codomain ambient has {}",
                q.len(),
                qm.ambient().dim()
            )));
        }
        let q = qm.ambient().reduced(q.to_vec());
        let in_q = qm.contains(&q);
        let in_p = in_q && u.image().contains(&q);
        let gcount = self.group_elements.len();
        let mut dims = vec![usize::from(in_p)];
        for j in 1..=self.products.len() {
            dims.push(if in_q { gcount.pow(j as u32 - 1) } else { 0 });
        }
        let mut diffs = Vec::new();
        let mut aug = ModMatrix::zeros(dims[1], dims[0]);
        if in_p {
            aug.entries[0] = 1;
        }
        diffs.push(aug);
        for j in 1..self.products.len() {
            let mut d = ModMatrix::zeros(dims[j + 1], dims[j]);
            for c in 0..dims[j] {
                let raw = self.raw_point(&q, j, c);
                for (i, psi) in self.cofaces[j - 1].iter().enumerate() {
                    let r = self.decode(&q, &psi.mul_vec(&raw), j + 1)?;
                    let v = if i % 2 == 0 { 1 } else { self.ell - 1 };
                    d.add_to(r, c, v, self.ell);
                }
            }
            diffs.push(d);
        }
        Ok((dims, diffs, q))
    }

    /// Raw target coordinates of the `c`-th monomial `(q, g_2, …, g_j)`.
    fn raw_point(&self, q: &[Int], j: usize, mut c: usize) -> Vec<Int> {
        let gd = self.products[0].class_group().dim();
        let mut raw = q.to_vec();
        raw.resize(q.len() + (j - 1) * gd, Int::zero());
        let gc = self.group_elements.len();
        for a in 0..j - 1 {
            let g = &self.group_elements[c % gc];
            c /= gc;
            raw[q.len() + a * gd..q.len() + (a + 1) * gd].clone_from_slice(g);
        }
        raw
    }

    /// Index of a raw target point in the monomial basis of degree `q`.
    fn decode(&self, q: &[Int], raw: &[Int], j: usize) -> Result<usize> {
        let sp = &self.products[0];
        let classes = sp.class_group();
        let n = q.len();
        let head = self.u.codomain().ambient().reduced(raw[..n].to_vec());
        if head != q {
            return Err(Error::Diagnostic("coface map does not preserve the degree".into()));
        }
        let gd = classes.dim();
        let gc = self.group_elements.len();
        let mut idx = 0;
        for a in (0..j - 1).rev() {
            let g = classes.reduced(raw[n + a * gd..n + (a + 1) * gd].to_vec());
            let pos = self.group_elements.iter().position(|e| *e == g).expect("class in G");
            idx = idx * gc + pos;
        }
        Ok(idx)
    }
}

fn slice_cohomology(ell: u64, dims: &[usize], diffs: &[ModMatrix]) -> Result<(Vec<usize>, Vec<usize>)> {
    let full = PrimeFieldComplex::new(ell, dims.to_vec(), diffs.to_vec())?;
    let un = PrimeFieldComplex::new(ell, dims[1..].to_vec(), diffs[1..].to_vec())?;
    Ok((full.cohomology(), un.cohomology()))
}

/// The degree-`q` slice of the augmented Čech complex of length `length`.
/// Fails with a diagnostic when the slice is not exact.
pub fn cech_complex_degreewise(
    u: &MonoidHom,
    ell: u64,
    q: &[Int],
    length: usize,
) -> Result<(PrimeFieldComplex, CechSlice)> {
    let data = CechData::new(u, ell, length)?;
    let slice = data.slice(q)?;
    if !slice.exact {
        return Err(Error::Diagnostic(format!(
            "augmented complex in degree {} has cohomology {:?}",
            crate::morphism::fmt_vec(&slice.degree),
            slice.augmented
        )));
    }
    Ok((data.slice_complex(q)?, slice))
}

impl SelfProduct {
    /// `G` as the ambient group of class coordinates.
    pub fn class_group(&self) -> AmbientAbelianGroup {
        self.tight_map.gp_cokernel_quotient().group
    }
}

/// `Ψ_i = Φ_{j+1} ∘ ∂_i ∘ Φ_j^{-1}` for `i = 0..=j`, with `∂_i` the coface
/// `S_j → S_{j+1}` that skips insertion `i`.
fn coface_maps(lower: &SelfProduct, upper: &SelfProduct, j: usize) -> Result<Vec<IntegerMatrix>> {
    let n = lower.tight_map.codomain().ambient().dim();
    let phi_inv = inverse_on_raw(lower)?;
    let mut out = Vec::new();
    for i in 0..=j {
        // copies: a ↦ a for a < i, a ↦ a + 1 otherwise
        let mut m = IntegerMatrix::zeros((j + 1) * n, j * n);
        for a in 0..j {
            let b = if a < i { a } else { a + 1 };
            for t in 0..n {
                m[(b * n + t, a * n + t)] = Int::from(1);
            }
        }
        let on_products = upper.copies.proj.mul(&m).mul(&lower.copies.lift);
        let to_raw = upper.target_coords.lift.mul(&upper.phi.group_map().clone());
        out.push(to_raw.mul(&on_products).mul(&phi_inv));
    }
    Ok(out)
}

/// `Φ^{-1}` from raw target coordinates to the product ambient.
fn inverse_on_raw(sp: &SelfProduct) -> Result<IntegerMatrix> {
    let phi = sp.phi.group_map();
    let tgt = sp.target.ambient();
    let src_dim = sp.product.ambient().dim();
    let mut system = phi.clone();
    system = system.hstack(&tgt.relation_columns());
    let raw_dim = sp.target_coords.proj.cols();
    let mut cols = Vec::new();
    for t in 0..raw_dim {
        let b = sp.target_coords.proj.column(t);
        let b = tgt.reduced(b);
        let sol = solve_integer(&system, &b).ok_or_else(|| Error::Diagnostic("canonical map is not onto".into()))?;
        cols.push(sp.product.ambient().reduced(sol[..src_dim].to_vec()));
    }
    Ok(IntegerMatrix::from_columns(&cols, src_dim))
}

/// Per-degree comparison of Čech cohomology with `H^*(G, k)`.
#[derive(Clone, Debug)]
pub struct CechComparison {
    pub group_cohomology: Vec<usize>,
    /// Sum of the unaugmented Čech dimensions over degrees in `u(P)`.
    pub cech_trivial_class: Vec<usize>,
    /// Number of such degrees.
    pub trivial_class_degrees: usize,
    /// The sum above divided by the number of degrees.
    pub cech_normalized: Vec<usize>,
    /// The same normalization over the box of half the radius.
    pub cech_normalized_inner: Vec<usize>,
    pub stable: bool,
    pub degrees_checked: usize,
    /// Degrees whose augmented slice is not exact.
    pub non_exact: Vec<MonoidElement>,
    /// Degrees outside `u(P)` with nonzero unaugmented cohomology.
    pub nontrivial_class_nonzero: Vec<MonoidElement>,
    pub matches: bool,
}

/// Compares the unaugmented Čech cohomology in each degree `q ∈ u(P)` with
/// coordinates in `[-bound, bound]` against `H^i(G, F_ℓ)`, requires every
/// other degree of `Q` to be acyclic, and checks the normalized totals agree
/// with those of the half-radius box.
pub fn cech_vs_group_cohomology(u: &MonoidHom, ell: u64, max_degree: usize, bound: i64) -> Result<CechComparison> {
    use rayon::prelude::*;
    let data = CechData::new(u, ell, max_degree + 3)?;
    let h = finite_group_cohomology(data.galois_group(), ell, max_degree)?;
    let qm = data.tight_map().codomain();
    let image = data.tight_map().image();
    let mut degrees: Vec<MonoidElement> =
        box_degrees(qm.ambient().dim(), bound).into_iter().map(|q| qm.ambient().reduced(q)).collect();
    degrees.sort();
    degrees.dedup();
    degrees.retain(|q| qm.contains(q));
    let slices = degrees.par_iter().map(|q| data.slice(q)).collect::<Result<Vec<_>>>()?;
    let inner_bound = bound / 2;
    let mut sum = vec![0usize; max_degree + 1];
    let mut sum_inner = vec![0usize; max_degree + 1];
    let (mut trivial, mut trivial_inner) = (0usize, 0usize);
    let mut non_exact = Vec::new();
    let mut mismatch = Vec::new();
    let mut per_degree_ok = true;
    for s in &slices {
        if !s.exact {
            non_exact.push(s.degree.clone());
        }
        let un = &s.unaugmented[..=max_degree];
        if image.contains(&s.degree) {
            per_degree_ok &= un == &h[..];
            trivial += 1;
            sum.iter_mut().zip(un).for_each(|(a, x)| *a += x);
            if s.degree.iter().all(|x| x.magnitude() <= &num_bigint::BigUint::from(inner_bound as u64)) {
                trivial_inner += 1;
                sum_inner.iter_mut().zip(un).for_each(|(a, x)| *a += x);
            }
        } else if un.iter().any(|&x| x != 0) {
            mismatch.push(s.degree.clone());
        }
    }
    let normalize = |sum: &[usize], n: usize| -> Vec<usize> { sum.iter().map(|s| s.checked_div(n).unwrap_or(0)).collect() };
    let normalized = normalize(&sum, trivial);
    let inner = normalize(&sum_inner, trivial_inner);
    let stable = normalized == inner;
    let matches =
        per_degree_ok && stable && non_exact.is_empty() && mismatch.is_empty() && trivial > 0 && normalized == h;
    Ok(CechComparison {
        group_cohomology: h,
        cech_trivial_class: sum,
        trivial_class_degrees: trivial,
        cech_normalized: normalized,
        cech_normalized_inner: inner,
        stable,
        degrees_checked: degrees.len(),
        non_exact,
        nontrivial_class_nonzero: mismatch,
        matches,
    })
}

/// Integer vectors with entries in `[-bound, bound]`, lexicographically.
pub fn box_degrees(dim: usize, bound: i64) -> Vec<Vec<Int>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::new();
        for v in &out {
            for x in -bound..=bound {
                let mut w: Vec<Int> = v.clone();
                w.push(Int::from(x));
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Smallest prime `ℓ ≡ 1 (mod m)`.
pub fn smallest_prime_one_mod(m: u64) -> u64 {
    let mut ell = m + 1;
    while !is_prime(ell) {
        ell += m;
    }
    ell
}

/// Smallest prime not dividing `order`.
pub fn smallest_prime_not_dividing(order: &Int) -> u64 {
    let mut p = 2;
    loop {
        if is_prime(p) && !(order % Int::from(p)).is_zero() {
            return p;
        }
        p += 1;
    }
}

fn smallest_primitive_root(ell: u64) -> u64 {
    let phi = ell - 1;
    let mut factors = Vec::new();
    let mut x = phi;
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            factors.push(d);
            while x.is_multiple_of(d) {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        factors.push(x);
    }
    (2..ell).find(|&g| factors.iter().all(|&f| pow_mod(g, phi / f, ell) != 1)).unwrap_or(1)
}

/// A character of `Ẑ^n` of level `m`: exponents `a_k = numerators[k] / m`,
/// evaluated with a primitive `m`-th root of unity `ζ ∈ F_ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterDatum {
    pub level: u64,
    pub numerators: Vec<u64>,
    pub ell: u64,
    pub zeta: u64,
}

impl CharacterDatum {
    /// `ζ = g^{(ℓ-1)/m}` for the smallest primitive root `g`.
    pub fn new(level: u64, numerators: Vec<u64>, ell: u64) -> Result<Self> {
        if !is_prime(ell) {
            return Err(Error::InvalidCharacteristic(ell));
        }
        if level == 0 || !(ell - 1).is_multiple_of(level) {
            return Err(Error::Precondition(format!("F_{ell} has no primitive {level}-th root of unity")));
        }
        if let Some(a) = numerators.iter().find(|&&a| a >= level) {
            return Err(Error::InvalidInput(format!("exponent numerator {a} is not below the level {level}")));
        }
        let zeta = pow_mod(smallest_primitive_root(ell), (ell - 1) / level, ell);
        Ok(CharacterDatum { level, numerators, ell, zeta })
    }

    pub fn n(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.numerators.iter().all(|&a| a == 0)
    }

    /// The commuting scalars `ζ^{m a_k} - 1`.
    pub fn scalars(&self) -> Vec<u64> {
        self.numerators.iter().map(|&a| (pow_mod(self.zeta, a, self.ell) + self.ell - 1) % self.ell).collect()
    }
}

/// The Koszul complex of the scalars of `cd` on a one-dimensional space.
pub fn koszul_complex(cd: &CharacterDatum) -> PrimeFieldComplex {
    let n = cd.n();
    let ell = cd.ell;
    let c = cd.scalars();
    let subsets: Vec<Vec<u32>> = (0..=n).map(|k| (0u32..1 << n).filter(|s| s.count_ones() as usize == k).collect()).collect();
    let index: Vec<HashMap<u32, usize>> =
        subsets.iter().map(|s| s.iter().enumerate().map(|(i, &m)| (m, i)).collect()).collect();
    let mut diffs = Vec::new();
    for k in 0..n {
        let mut d = ModMatrix::zeros(subsets[k + 1].len(), subsets[k].len());
        for (col, &s) in subsets[k].iter().enumerate() {
            for (t, &ct) in c.iter().enumerate() {
                if s & (1 << t) != 0 || ct == 0 {
                    continue;
                }
                let below = (s & ((1 << t) - 1)).count_ones();
                let v = if below % 2 == 0 { ct } else { ell - ct };
                d.add_to(index[k + 1][&(s | 1 << t)], col, v, ell);
            }
        }
        diffs.push(d);
    }
    let dims = subsets.iter().map(Vec::len).collect();
    PrimeFieldComplex::new(ell, dims, diffs).expect("Koszul differentials square to zero")
}

/// `dim H^i` of the Koszul complex for `i ≤ max_degree` (zero above `n`).
pub fn koszul_cohomology(cd: &CharacterDatum, max_degree: usize) -> Vec<usize> {
    let mut h = koszul_complex(cd).cohomology();
    h.resize(max_degree + 1, 0);
    h
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolydiscReport {
    pub n: usize,
    pub level: u64,
    pub ell: u64,
    pub dims: Vec<usize>,
    /// Characters with nonzero cohomology.
    pub contributing: Vec<Vec<u64>>,
    pub characters: usize,
}

/// Sums Koszul cohomology over all characters of level `m` in `n` variables.
pub fn polydisc_cohomology(n: usize, m: u64, ell: Option<u64>) -> Result<PolydiscReport> {
    let ell = ell.unwrap_or_else(|| smallest_prime_one_mod(m));
    let mut dims = vec![0usize; n + 1];
    let mut contributing = Vec::new();
    let mut numerators = vec![0u64; n];
    let mut characters = 0;
    loop {
        let cd = CharacterDatum::new(m, numerators.clone(), ell)?;
        let h = koszul_cohomology(&cd, n);
        characters += 1;
        if h.iter().any(|&x| x != 0) {
            contributing.push(numerators.clone());
        }
        for (d, x) in dims.iter_mut().zip(&h) {
            *d += x;
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(PolydiscReport { n, level: m, ell, dims, contributing, characters });
            }
            numerators[i] += 1;
            if numerators[i] < m {
                break;
            }
            numerators[i] = 0;
            i += 1;
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::AffineMonoid;
    use crate::zlattice::{int, int_vec};

    fn power(n: i64) -> MonoidHom {
        MonoidHom::new(AffineMonoid::free(1), AffineMonoid::free(1), IntegerMatrix::from_i64(&[&[n]])).unwrap()
    }

    fn diag23() -> MonoidHom {
        MonoidHom::new(AffineMonoid::free(2), AffineMonoid::free(2), IntegerMatrix::from_i64(&[&[2, 0], &[0, 3]]))
            .unwrap()
    }

    fn g(orders: &[i64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_orders(&orders.iter().map(|&d| int(d)).collect::<Vec<_>>())
    }

    #[test]
    fn group_cohomology_examples() {
        assert_eq!(finite_group_cohomology(&g(&[6]), 5, 3).unwrap(), vec![1, 0, 0, 0]);
        assert_eq!(finite_group_cohomology(&g(&[2]), 2, 4).unwrap(), vec![1; 5]);
        assert_eq!(finite_group_cohomology(&g(&[2, 2]), 2, 3).unwrap(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn cyclic_l_groups_have_one_dimensional_cohomology() {
        for (d, ell) in [(3, 3), (9, 3), (4, 2), (8, 2), (5, 5)] {
            assert_eq!(finite_group_cohomology(&g(&[d]), ell, 5).unwrap(), vec![1; 6]);
        }
    }

    #[test]
    fn complex_rejects_nonzero_square() {
        let d = ModMatrix { rows: 1, cols: 1, entries: vec![1] };
        assert!(PrimeFieldComplex::new(3, vec![1, 1, 1], vec![d.clone(), d]).is_err());
    }

    #[test]
    fn cech_examples() {
        let data = CechData::new(&power(2), 3, 4).unwrap();
        let s = data.slice(&int_vec(&[3])).unwrap();
        assert!(s.exact);
        assert_eq!(s.dims[0], 0);
        let s = data.slice(&int_vec(&[2])).unwrap();
        assert!(s.exact);
        assert_eq!(&s.unaugmented[..2], &[1, 0]);

        let id = MonoidHom::identity(&AffineMonoid::free(1));
        let data = CechData::new(&id, 7, 5).unwrap();
        for q in -3..=3 {
            assert!(data.slice(&int_vec(&[q])).unwrap().exact);
        }
    }

    #[test]
    fn cech_rejects_characteristic_dividing_group_order() {
        assert!(CechData::new(&power(2), 2, 3).is_err());
    }

    #[test]
    fn cech_matches_group_cohomology() {
        for (u, ell) in [(power(2), 3), (diag23(), 5), (MonoidHom::identity(&AffineMonoid::free(1)), 7)] {
            let c = cech_vs_group_cohomology(&u, ell, 2, 4).unwrap();
            assert!(c.matches, "{c:?}");
            assert_eq!(c.cech_normalized, vec![1, 0, 0]);
        }
    }

    #[test]
    fn koszul_examples() {
        let cd = CharacterDatum::new(6, vec![0, 0], 7).unwrap();
        assert_eq!(koszul_cohomology(&cd, 2), vec![1, 2, 1]);
        let cd = CharacterDatum::new(2, vec![1, 0], 3).unwrap();
        assert_eq!(koszul_cohomology(&cd, 2), vec![0, 0, 0]);
        let cd = CharacterDatum::new(2, vec![0], 3).unwrap();
        assert_eq!(koszul_cohomology(&cd, 1), vec![1, 1]);
        assert!(CharacterDatum::new(4, vec![0], 7).is_err());
    }

    #[test]
    fn zeta_is_primitive() {
        for m in [2u64, 3, 4, 6, 12] {
            let ell = smallest_prime_one_mod(m);
            let cd = CharacterDatum::new(m, vec![], ell).unwrap();
            assert_eq!(pow_mod(cd.zeta, m, ell), 1);
            for d in 1..m {
                if m % d == 0 {
                    assert_ne!(pow_mod(cd.zeta, d, ell), 1);
                }
            }
        }
    }

    #[test]
    fn polydisc_examples() {
        assert_eq!(polydisc_cohomology(2, 6, Some(7)).unwrap().dims, vec![1, 2, 1]);
        assert_eq!(polydisc_cohomology(1, 2, Some(3)).unwrap().dims, vec![1, 1]);
        let r = polydisc_cohomology(0, 5, None).unwrap();
        assert_eq!(r.dims, vec![1]);
        assert_eq!(r.contributing, vec![Vec::<u64>::new()]);
    }

    #[test]
    fn smallest_primes() {
        assert_eq!(smallest_prime_one_mod(2), 3);
        assert_eq!(smallest_prime_one_mod(6), 7);
        assert_eq!(smallest_prime_one_mod(4), 5);
        assert_eq!(smallest_prime_not_dividing(&int(6)), 5);
        assert_eq!(smallest_prime_not_dividing(&int(1)), 2);
    }
}
