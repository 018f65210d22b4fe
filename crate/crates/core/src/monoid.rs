//! Finitely presented and affine commutative monoids.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cone::{self, facet_values};
use crate::error::{Error, Result};
use crate::morphism::MonoidHom;
use crate::zlattice::{
    int, is_zero_vec, smith_normal_form, solve_with, AmbientAbelianGroup, Int, IntegerMatrix, Quotient, SmithForm,
    Subgroup,
};

/// Coordinates of an ambient-group element, torsion residues reduced.
pub type MonoidElement = Vec<Int>;

/// Generators `0..generator_count` subject to relations `lhs = rhs`, written
/// additively as exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidPresentation {
    generator_count: usize,
    relations: Vec<(Vec<u64>, Vec<u64>)>,
}

impl MonoidPresentation {
    pub fn new(generator_count: usize, relations: Vec<(Vec<u64>, Vec<u64>)>) -> Result<Self> {
        for (i, (l, r)) in relations.iter().enumerate() {
            if l.len() != generator_count || r.len() != generator_count {
                return Err(Error::InvalidInput(format!(
                    "relations[{i}] must have two exponent vectors of length {generator_count}"
                )));
            }
        }
        Ok(MonoidPresentation { generator_count, relations })
    }

    pub fn free(n: usize) -> Self {
        MonoidPresentation { generator_count: n, relations: Vec::new() }
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn relations(&self) -> &[(Vec<u64>, Vec<u64>)] {
        &self.relations
    }
}

/// `P^gp` as `Z^s` modulo the relation differences, with the images of the
/// generators.
pub fn groupify(p: &MonoidPresentation) -> (AmbientAbelianGroup, Vec<MonoidElement>) {
    let s = p.generator_count;
    let cols: Vec<Vec<Int>> = p
        .relations
        .iter()
        .map(|(l, r)| l.iter().zip(r).map(|(a, b)| Int::from(*a) - Int::from(*b)).collect())
        .collect();
    let q = Quotient::of(&IntegerMatrix::from_columns(&cols, s));
    let images = (0..s).map(|i| q.group.reduced(q.proj.column(i))).collect();
    (q.group, images)
}

/// `P^int`, the image of `P` in `P^gp`.
pub fn integralize(p: &MonoidPresentation) -> AffineMonoid {
    let (group, images) = groupify(p);
    AffineMonoid::new(group, images).expect("groupification images live in the group")
}

/// A finitely generated submonoid of an ambient abelian group.
#[derive(Clone)]
pub struct AffineMonoid {
    ambient: AmbientAbelianGroup,
    generators: Vec<MonoidElement>,
    analysis: OnceLock<Arc<Analysis>>,
}

struct Analysis {
    /// `M^gp` with coordinates; its structure is `Z^rank ⊕ torsion`.
    group: Subgroup,
    rank: usize,
    /// Facet normals of the cone of `M` in the free coordinates of `M^gp`.
    facets: Vec<Vec<Int>>,
    /// Facet values of each generator.
    values: Vec<Vec<Int>>,
    /// Generators lying in the minimal face, i.e. units.
    face: Vec<usize>,
    rest: Vec<usize>,
    units: Subgroup,
    /// SNF of `[face generators | ambient relations]` for solving unit
    /// coefficients.
    unit_solver: SmithForm,
    /// A relation `Σ p_j f_j = 0` with every `p_j ≥ 1`, over `face`.
    unit_relation: Vec<Int>,
}

impl fmt::Debug for AffineMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AffineMonoid")
            .field("ambient", &self.ambient)
            .field("generators", &self.generators)
            .finish()
    }
}

impl fmt::Display for AffineMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let parts: Vec<String> = g.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        write!(f, "> in {}", self.ambient)
    }
}

/// Structural equality: same ambient and the same canonical form.
impl PartialEq for AffineMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.canonical_form() == other.canonical_form()
    }
}

impl Eq for AffineMonoid {}

/// Units-lattice basis (HNF) plus the sorted irreducibles of the sharp
/// quotient, reduced modulo units.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub units: Vec<Vec<Int>>,
    pub sharp: Vec<Vec<Int>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonoidProperties {
    pub fine: bool,
    pub sharp: bool,
    pub saturated: bool,
    pub fs: bool,
    pub dimension: usize,
}

#[derive(Clone, Debug)]
pub struct UnitsAndQuotient {
    /// A basis of `M*` (one unit per cyclic summand of its structure).
    pub units: Vec<MonoidElement>,
    pub unit_group: AmbientAbelianGroup,
    pub sharp: AffineMonoid,
    pub projection: MonoidHom,
}

impl AffineMonoid {
    /// Reduces generators, drops zeros and duplicates (first occurrence wins).
    pub fn new(ambient: AmbientAbelianGroup, generators: Vec<MonoidElement>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut gens = Vec::new();
        for (i, g) in generators.into_iter().enumerate() {
            if g.len() != ambient.dim() {
                return Err(Error::AmbientMismatch(format!(
                    "generator {i} has {} coordinates, ambient {ambient} needs {}",
                    g.len(),
                    ambient.dim()
                )));
            }
            let g = ambient.reduced(g);
            if !is_zero_vec(&g) && seen.insert(g.clone()) {
                gens.push(g);
            }
        }
        Ok(AffineMonoid { ambient, generators: gens, analysis: OnceLock::new() })
    }

    /// `N^n` inside `Z^n`.
    pub fn free(n: usize) -> Self {
        let gens = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect();
        AffineMonoid::new(AmbientAbelianGroup::free(n), gens).unwrap()
    }

    /// Convenience constructor for a torsion-free ambient `Z^n`.
    pub fn from_i64(n: usize, generators: &[&[i64]]) -> Result<Self> {
        let gens = generators.iter().map(|g| g.iter().map(|&x| int(x)).collect()).collect();
        AffineMonoid::new(AmbientAbelianGroup::free(n), gens)
    }

    pub fn ambient(&self) -> &AmbientAbelianGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &[MonoidElement] {
        &self.generators
    }

    fn analysis(&self) -> &Analysis {
        self.analysis.get_or_init(|| Arc::new(Analysis::compute(&self.ambient, &self.generators)))
    }

    /// `M^gp` as a subgroup of the ambient.
    pub fn group(&self) -> &Subgroup {
        &self.analysis().group
    }

    /// Free rank of `M^gp`, the dimension of the cone.
    pub fn rank(&self) -> usize {
        self.analysis().rank
    }

    /// Facet normals in the free coordinates of [`Self::group`].
    pub fn facets(&self) -> &[Vec<Int>] {
        &self.analysis().facets
    }

    /// Free coordinates of `x ∈ M^gp`.
    pub fn free_coordinates(&self, x: &[Int]) -> Option<Vec<Int>> {
        let a = self.analysis();
        a.group.coords(x).map(|mut c| {
            c.truncate(a.rank);
            c
        })
    }

    pub fn is_unit(&self, x: &[Int]) -> bool {
        self.analysis().units.contains(&self.ambient.reduced(x.to_vec()))
    }

    pub fn is_sharp(&self) -> bool {
        self.analysis().face.is_empty()
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        matches!(self.membership(x), Ok(Some(_)))
    }

    /// Non-negative coefficients `c` with `Σ c_i g_i = x`, or `None` when no
    /// such combination exists. The search is exhaustive.
    pub fn membership(&self, x: &[Int]) -> Result<Option<Vec<Int>>> {
        if x.len() != self.ambient.dim() {
            return Err(Error::AmbientMismatch(format!(
                "element has {} coordinates, ambient {} needs {}",
                x.len(),
                self.ambient,
                self.ambient.dim()
            )));
        }
        let x = self.ambient.reduced(x.to_vec());
        let a = self.analysis();
        let Some(coords) = a.group.coords(&x) else {
            return Ok(None);
        };
        let target = facet_values(&a.facets, &coords[..a.rank]);
        if target.iter().any(Signed::is_negative) {
            return Ok(None);
        }
        // support[k]: facets on which some generator rest[k..] is positive
        let nf = a.rest.len();
        let mut support = vec![vec![false; a.facets.len()]; nf + 1];
        for k in (0..nf).rev() {
            let vals = &a.values[a.rest[k]];
            support[k] = support[k + 1].iter().zip(vals).map(|(s, v)| *s || v.is_positive()).collect();
        }
        let mut coeffs = vec![Int::zero(); nf];
        let found = self.search(a, &x, target, 0, &support, &mut coeffs);
        Ok(found)
    }

    fn search(
        &self,
        a: &Analysis,
        x: &[Int],
        remaining: Vec<Int>,
        k: usize,
        support: &[Vec<bool>],
        coeffs: &mut Vec<Int>,
    ) -> Option<Vec<Int>> {
        if remaining.iter().zip(&support[k]).any(|(r, s)| r.is_positive() && !s) {
            return None;
        }
        if k == a.rest.len() {
            let mut rem = x.to_vec();
            for (c, &g) in coeffs.iter().zip(&a.rest) {
                if !c.is_zero() {
                    rem = self.ambient.sub(&rem, &self.ambient.scale(c, &self.generators[g]));
                }
            }
            let unit_coeffs = a.unit_coefficients(&rem)?;
            let mut cert = vec![Int::zero(); self.generators.len()];
            for (c, &g) in coeffs.iter().zip(&a.rest) {
                cert[g] = c.clone();
            }
            for (c, &g) in unit_coeffs.iter().zip(&a.face) {
                cert[g] = c.clone();
            }
            return Some(cert);
        }
        let vals = &a.values[a.rest[k]];
        let bound = vals
            .iter()
            .zip(&remaining)
            .filter(|(v, _)| v.is_positive())
            .map(|(v, r)| r.div_floor(v))
            .min()
            .expect("non-face generator is positive on some facet");
        let mut c = bound;
        while !c.is_negative() {
            let next: Vec<Int> = remaining.iter().zip(vals).map(|(r, v)| r - &c * v).collect();
            coeffs[k] = c.clone();
            if let Some(cert) = self.search(a, x, next, k + 1, support, coeffs) {
                return Some(cert);
            }
            c -= 1;
        }
        coeffs[k] = Int::zero();
        None
    }

    /// Every element of `saturate(M)` lies in `M`.
    pub fn is_saturated(&self) -> bool {
        self.saturate().generators.iter().all(|g| self.contains(g))
    }

    /// `M^sat = {x ∈ M^gp : k·x ∈ M for some k ≥ 1}`, listed by unit-lattice
    /// basis (with negatives), torsion generators of `M^gp`, and the Hilbert
    /// basis of the sharp part.
    pub fn saturate(&self) -> AffineMonoid {
        let a = self.analysis();
        let structure = a.group.structure();
        let dim = structure.dim();
        let pad = |free: &[Int]| -> Vec<Int> {
            let mut v = free.to_vec();
            v.resize(dim, Int::zero());
            v
        };
        let free_gens: Vec<Vec<Int>> = self
            .generators
            .iter()
            .map(|g| a.group.coords(g).expect("generator in M^gp")[..a.rank].to_vec())
            .collect();
        let sat = cone::saturated_cone(&free_gens, a.rank);
        let mut gens = Vec::new();
        for u in &sat.units {
            gens.push(a.group.embed(&pad(u)));
            let neg: Vec<Int> = u.iter().map(|x| -x).collect();
            gens.push(a.group.embed(&pad(&neg)));
        }
        for i in a.rank..dim {
            let mut e = vec![Int::zero(); dim];
            e[i] = Int::one();
            gens.push(a.group.embed(&e));
        }
        for h in &sat.hilbert_basis {
            gens.push(a.group.embed(&pad(h)));
        }
        let out = AffineMonoid::new(self.ambient.clone(), gens).expect("same ambient");
        crate::fault::maybe_drop_generator(out)
    }

    pub fn classify(&self) -> MonoidProperties {
        let saturated = self.is_saturated();
        MonoidProperties { fine: true, sharp: self.is_sharp(), saturated, fs: saturated, dimension: self.rank() }
    }

    pub fn units_and_sharp_quotient(&self) -> Result<UnitsAndQuotient> {
        let a = self.analysis();
        let ustruct = a.units.structure().clone();
        let units: Vec<MonoidElement> = (0..ustruct.dim())
            .map(|i| {
                let mut e = vec![Int::zero(); ustruct.dim()];
                e[i] = Int::one();
                a.units.embed(&e)
            })
            .collect();
        let mut cols: Vec<Vec<Int>> = a.face.iter().map(|&i| self.generators[i].clone()).collect();
        cols.extend(self.ambient.relation_columns().columns());
        let q = Quotient::of(&IntegerMatrix::from_columns(&cols, self.ambient.dim()));
        let sharp_gens = a.rest.iter().map(|&i| q.project(&self.generators[i])).collect();
        let sharp = AffineMonoid::new(q.group.clone(), sharp_gens)?;
        if !sharp.is_sharp() {
            return Err(Error::Diagnostic(format!("quotient {sharp} still has units")));
        }
        let projection = MonoidHom::new_unchecked(self.clone(), sharp.clone(), q.proj.clone());
        Ok(UnitsAndQuotient { units, unit_group: ustruct, sharp, projection })
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        let a = self.analysis();
        let face_gens: Vec<MonoidElement> = a.face.iter().map(|&i| self.generators[i].clone()).collect();
        let mut reps: Vec<Vec<Int>> = Vec::new();
        let mut seen = HashSet::new();
        for &i in &a.rest {
            let r = self.ambient.reduced(a.units.coset_representative(&self.generators[i]));
            if seen.insert(r.clone()) {
                reps.push(r);
            }
        }
        // drop representatives generated by the others; irreducibles survive
        let mut k = 0;
        while k < reps.len() {
            let mut others = face_gens.clone();
            others.extend(reps.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, r)| r.clone()));
            let sub = AffineMonoid::new(self.ambient.clone(), others).expect("same ambient");
            if sub.contains(&reps[k]) {
                reps.remove(k);
            } else {
                k += 1;
            }
        }
        reps.sort();
        CanonicalForm { units: a.units.canonical_basis().to_vec(), sharp: reps }
    }

    /// The same monoid inside its own group `M^gp`, plus the coordinates.
    pub fn tighten(&self) -> (AffineMonoid, Subgroup) {
        let a = self.analysis();
        let gens = self.generators.iter().map(|g| a.group.coords(g).expect("generator in M^gp")).collect();
        let m = AffineMonoid::new(a.group.structure().clone(), gens).expect("coordinates fit structure");
        (m, a.group.clone())
    }

    /// Integer matrix sending ambient elements of `M^gp` to their free
    /// coordinates, when `M^gp` is torsion-free and its free projection is a
    /// direct summand of the ambient free part.
    pub fn coordinate_extension(&self) -> Option<IntegerMatrix> {
        let a = self.analysis();
        if a.group.structure().dim() != a.rank {
            return None;
        }
        let r = self.ambient.free_rank();
        let cols: Vec<Vec<Int>> = (0..a.rank)
            .map(|j| {
                let mut e = vec![Int::zero(); a.rank];
                e[j] = Int::one();
                a.group.embed(&e)[..r].to_vec()
            })
            .collect();
        let mut c = IntegerMatrix::zeros(a.rank, self.ambient.dim());
        if a.rank == 0 {
            return Some(c);
        }
        let b = IntegerMatrix::from_columns(&cols, r);
        let snf = smith_normal_form(&b);
        if snf.rank != a.rank || !snf.invariant_factors.iter().all(One::is_one) {
            return None;
        }
        let top: Vec<usize> = (0..a.rank).collect();
        let left = snf.v.mul(&snf.u.select_rows(&top));
        for i in 0..a.rank {
            for j in 0..r {
                c[(i, j)] = left[(i, j)].clone();
            }
        }
        Some(c)
    }
}

impl Analysis {
    fn compute(ambient: &AmbientAbelianGroup, gens: &[MonoidElement]) -> Analysis {
        let group = Subgroup::generated_by(ambient, gens);
        let rank = group.structure().free_rank();
        let coords: Vec<Vec<Int>> = gens.iter().map(|g| group.coords(g).expect("generator in M^gp")).collect();
        let free: Vec<Vec<Int>> = coords.iter().map(|c| c[..rank].to_vec()).collect();
        let facets = if rank == 0 { Vec::new() } else { cone::polar(&free, rank).rays };
        let values: Vec<Vec<Int>> = free.iter().map(|f| facet_values(&facets, f)).collect();
        let (face, rest): (Vec<usize>, Vec<usize>) = (0..gens.len()).partition(|&i| is_zero_vec(&values[i]));
        let face_gens: Vec<Vec<Int>> = face.iter().map(|&i| gens[i].clone()).collect();
        let units = Subgroup::generated_by(ambient, &face_gens);
        let mut cols = face_gens.clone();
        cols.extend(ambient.relation_columns().columns());
        let unit_solver = smith_normal_form(&IntegerMatrix::from_columns(&cols, ambient.dim()));

        // positive relation among the face generators
        let face_free: Vec<Vec<Int>> = face.iter().map(|&i| free[i].clone()).collect();
        let mut unit_relation = vec![Int::zero(); face.len()];
        for j in 0..face.len() {
            let target: Vec<Int> = face_free[j].iter().map(|x| -x).collect();
            let lambda =
                cone::nonneg_combination(&target, &face_free).expect("face generators span a linear space");
            let den = cone::common_denominator(&lambda);
            let mut rel: Vec<Int> = lambda.iter().map(|l| (l * num_rational::BigRational::from_integer(den.clone())).to_integer()).collect();
            rel[j] += &den;
            let mut sum = ambient.zero();
            for (c, g) in rel.iter().zip(&face_gens) {
                sum = ambient.add(&sum, &ambient.scale(c, g));
            }
            let order = torsion_order(group.structure(), &group.coords(&sum).expect("sum in M^gp"));
            for (u, c) in unit_relation.iter_mut().zip(&rel) {
                *u += c * &order;
            }
        }
        Analysis { group, rank, facets, values, face, rest, units, unit_solver, unit_relation }
    }

    /// Non-negative coefficients over the face generators summing to `y`.
    fn unit_coefficients(&self, y: &[Int]) -> Option<Vec<Int>> {
        if self.face.is_empty() {
            return is_zero_vec(y).then(Vec::new);
        }
        let sol = solve_with(&self.unit_solver, y)?;
        let mut k: Vec<Int> = sol[..self.face.len()].to_vec();
        let mut shift = Int::zero();
        for (c, p) in k.iter().zip(&self.unit_relation) {
            if c.is_negative() {
                let need = (-c).div_ceil(p);
                if need > shift {
                    shift = need;
                }
            }
        }
        if !shift.is_zero() {
            for (c, p) in k.iter_mut().zip(&self.unit_relation) {
                *c += &shift * p;
            }
        }
        Some(k)
    }
}

/// Order of a torsion element given in coordinates of `group`.
fn torsion_order(group: &AmbientAbelianGroup, x: &[Int]) -> Int {
    debug_assert!(x[..group.free_rank()].iter().all(Zero::is_zero));
    group
        .torsion()
        .iter()
        .zip(&x[group.free_rank()..])
        .fold(Int::one(), |acc, (d, v)| acc.lcm(&(d / d.gcd(v))))
}

/// The exact embedding `P → N^s` given by the facet functionals, `s` the
/// number of facets, ordered lexicographically descending.
pub fn exact_embedding(p: &AffineMonoid) -> Result<MonoidHom> {
    if !p.is_sharp() {
        return Err(Error::Precondition(format!("{p} is not sharp")));
    }
    if !p.is_saturated() {
        return Err(Error::Precondition(format!("{p} is not saturated")));
    }
    let c = p.coordinate_extension().ok_or_else(|| {
        Error::Precondition(format!("the group of {p} is not a direct summand of the ambient; tighten first"))
    })?;
    let mut facets = p.facets().to_vec();
    facets.sort_by(|a, b| b.cmp(a));
    let s = facets.len();
    let f = IntegerMatrix::from_rows(facets, p.rank());
    let target = AffineMonoid::free(s);
    Ok(MonoidHom::new_unchecked(p.clone(), target, f.mul(&c)))
}

/// A monoid section `s: Q → M` of a surjection `f: M → Q` onto a sharp fs
/// monoid, reduced modulo `ker(f^gp)` for determinism.
pub fn splitting_section(f: &MonoidHom) -> Result<MonoidHom> {
    let (m, q) = (f.domain(), f.codomain());
    if !q.is_sharp() || !q.is_saturated() {
        return Err(Error::Precondition(format!("codomain {q} is not sharp fs")));
    }
    let images = AffineMonoid::new(q.ambient().clone(), m.generators().iter().map(|g| f.apply(g)).collect())?;
    if let Some(g) = q.generators().iter().find(|g| !images.contains(g)) {
        return Err(Error::Precondition(format!("f is not surjective: {g:?} has no preimage")));
    }
    let c_q = q.coordinate_extension().ok_or_else(|| {
        Error::Precondition(format!("the group of {q} is not a direct summand of the ambient; tighten first"))
    })?;
    let kernel = f.gp_kernel_elements();
    for k in &kernel {
        let neg = m.ambient().neg(k);
        if !m.contains(k) || !m.contains(&neg) {
            let bad = if m.contains(k) { neg } else { k.clone() };
            return Err(Error::KernelNotContained(format!("{bad:?} lies in ker(f^gp) but not in {m}")));
        }
    }
    let ksub = Subgroup::generated_by(m.ambient(), &kernel);
    let qa = q.analysis();
    let mut cols = Vec::new();
    for j in 0..qa.rank {
        let mut e = vec![Int::zero(); qa.rank];
        e[j] = Int::one();
        let b = qa.group.embed(&e);
        let y = f.gp_preimage(&b).ok_or_else(|| Error::Diagnostic(format!("no group preimage of {b:?}")))?;
        cols.push(m.ambient().reduced(ksub.coset_representative(&y)));
    }
    let y = IntegerMatrix::from_columns(&cols, m.ambient().dim());
    let s = MonoidHom::new_unchecked(q.clone(), m.clone(), if qa.rank == 0 { IntegerMatrix::zeros(m.ambient().dim(), q.ambient().dim()) } else { y.mul(&c_q) });
    for g in q.generators() {
        let img = s.apply(g);
        if f.apply(&img) != *g {
            return Err(Error::Diagnostic(format!("section fails f∘s = id on {g:?}")));
        }
        if !m.contains(&img) {
            return Err(Error::Diagnostic(format!("section image {img:?} escapes {m}")));
        }
    }
    Ok(s)
}

/// `P^{1/n}` and the inclusion `P ↪ P^{1/n}`; the refinement is carried by
/// the same generators, the inclusion being multiplication by `n`.
pub fn fractional_refinement(p: &AffineMonoid, n: u64) -> Result<(AffineMonoid, MonoidHom)> {
    if !p.ambient().is_torsion_free() {
        return Err(Error::Precondition(format!("ambient {} has torsion", p.ambient())));
    }
    if n == 0 {
        return Err(Error::InvalidInput("refinement level must be at least 1".into()));
    }
    let d = p.ambient().dim();
    let m = IntegerMatrix::diagonal(&vec![Int::from(n); d]);
    let refined = p.clone();
    Ok((refined.clone(), MonoidHom::new_unchecked(p.clone(), refined, m)))
}

/// Searches for words `a`, `b` with `a + b = a` in the presented monoid and
/// `b ≠ 0`. Words have total degree at most `bound`; equalities are decided by
/// breadth-first rewriting along the relations in both directions.
pub fn find_pseudo_integrality_violation(p: &MonoidPresentation, bound: u64) -> Option<(Vec<u64>, Vec<u64>)> {
    let (group, images) = groupify(p);
    let words = words_up_to(p.generator_count, bound);
    let widest = p
        .relations
        .iter()
        .map(|(l, r)| l.iter().sum::<u64>().max(r.iter().sum::<u64>()))
        .max()
        .unwrap_or(0);
    let cap = 2 * bound + widest;
    let image = |w: &[u64]| -> Vec<Int> {
        let mut acc = group.zero();
        for (e, g) in w.iter().zip(&images) {
            acc = group.add(&acc, &group.scale(&Int::from(*e), g));
        }
        acc
    };
    for a in &words {
        for b in words.iter().filter(|b| b.iter().any(|&e| e > 0)) {
            if !is_zero_vec(&image(b)) {
                continue;
            }
            let ab: Vec<u64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            if rewrites_to(p, &ab, a, cap) && !rewrites_to(p, b, &vec![0; b.len()], cap) {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

const REWRITE_NODE_LIMIT: usize = 50_000;

fn rewrites_to(p: &MonoidPresentation, from: &[u64], to: &[u64], cap: u64) -> bool {
    if from == to {
        return true;
    }
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(from.to_vec());
    queue.push_back(from.to_vec());
    while let Some(w) = queue.pop_front() {
        for (l, r) in &p.relations {
            for (src, dst) in [(l, r), (r, l)] {
                if w.iter().zip(src).any(|(x, s)| x < s) {
                    continue;
                }
                let next: Vec<u64> = w.iter().zip(src).zip(dst).map(|((x, s), d)| x - s + d).collect();
                if next.iter().sum::<u64>() > cap || seen.contains(&next) {
                    continue;
                }
                if next == to {
                    return true;
                }
                if seen.len() >= REWRITE_NODE_LIMIT {
                    return false;
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    false
}

/// Exponent vectors of total degree at most `bound`, by degree then with
/// earlier generators first.
fn words_up_to(s: usize, bound: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for deg in 0..=bound {
        let mut w = vec![0u64; s];
        compositions(deg, 0, &mut w, &mut out);
    }
    out
}

fn compositions(left: u64, i: usize, w: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if i + 1 >= w.len() {
        if w.is_empty() {
            if left == 0 {
                out.push(Vec::new());
            }
            return;
        }
        w[i] = left;
        out.push(w.clone());
        return;
    }
    for e in (0..=left).rev() {
        w[i] = e;
        compositions(left - e, i + 1, w, out);
    }
    w[i] = 0;
}

pub(crate) fn to_u64(x: &Int) -> Option<u64> {
    x.to_u64()
}
