//! Monoid homomorphisms and chart criteria.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::cone;
use crate::error::{Error, Result};
use crate::monoid::{AffineMonoid, MonoidElement, MonoidPresentation};
use crate::zlattice::{
    is_zero_vec, kernel_basis, smith_normal_form, solve_with, AmbientAbelianGroup, FiniteAbelianGroup, Int,
    IntegerMatrix, Quotient, SmithForm, Subgroup,
};

/// A monoid map given by an ambient group map sending every domain generator
/// into the codomain.
#[derive(Clone)]
pub struct MonoidHom {
    domain: AffineMonoid,
    codomain: AffineMonoid,
    group_map: IntegerMatrix,
    gp: OnceLock<Arc<GpData>>,
}

/// `u^gp` in structure coordinates of `P^gp` and `Q^gp`.
struct GpData {
    /// Columns: domain ambient elements for the structure basis of `P^gp`.
    embed: IntegerMatrix,
    /// `[A | R_Q]` with `A` the map in structure coordinates and `R_Q` the
    /// torsion relations of `Q^gp`.
    system: IntegerMatrix,
    solver: SmithForm,
    /// Lifted kernel generators in `P^gp` structure coordinates.
    kernel: Vec<Vec<Int>>,
}

impl fmt::Debug for MonoidHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonoidHom")
            .field("domain", &self.domain)
            .field("codomain", &self.codomain)
            .field("group_map", &self.group_map)
            .finish()
    }
}

impl MonoidHom {
    pub fn new(domain: AffineMonoid, codomain: AffineMonoid, group_map: IntegerMatrix) -> Result<Self> {
        let (da, ca) = (domain.ambient(), codomain.ambient());
        if group_map.rows() != ca.dim() || group_map.cols() != da.dim() {
            return Err(Error::AmbientMismatch(format!(
                "group map is {}x{}, expected {}x{}",
                group_map.rows(),
                group_map.cols(),
                ca.dim(),
                da.dim()
            )));
        }
        // free coordinates in the domain must not be mixed with torsion ones;
        // each torsion relation d·e_i has to map to zero
        for (i, col) in da.relation_columns().columns().iter().enumerate() {
            let img = ca.reduced(group_map.mul_vec(col));
            if !is_zero_vec(&img) {
                return Err(Error::InvalidInput(format!(
                    "group map is not well defined on torsion summand {i} of {da}"
                )));
            }
        }
        let hom = MonoidHom::new_unchecked(domain, codomain, group_map);
        for (i, g) in hom.domain.generators().iter().enumerate() {
            let img = hom.apply(g);
            if !hom.codomain.contains(&img) {
                return Err(Error::InvalidInput(format!(
                    "image {} of generator {i} is not in the codomain {}",
                    fmt_vec(&img),
                    hom.codomain
                )));
            }
        }
        Ok(hom)
    }

    /// Skips validation; callers guarantee the image condition.
    pub fn new_unchecked(domain: AffineMonoid, codomain: AffineMonoid, group_map: IntegerMatrix) -> Self {
        MonoidHom { domain, codomain, group_map, gp: OnceLock::new() }
    }

    /// The identity of `p`.
    pub fn identity(p: &AffineMonoid) -> Self {
        MonoidHom::new_unchecked(p.clone(), p.clone(), IntegerMatrix::identity(p.ambient().dim()))
    }

    pub fn domain(&self) -> &AffineMonoid {
        &self.domain
    }

    pub fn codomain(&self) -> &AffineMonoid {
        &self.codomain
    }

    pub fn group_map(&self) -> &IntegerMatrix {
        &self.group_map
    }

    pub fn apply(&self, x: &[Int]) -> MonoidElement {
        self.codomain.ambient().reduced(self.group_map.mul_vec(x))
    }

    /// `self ∘ first`.
    pub fn compose_after(&self, first: &MonoidHom) -> MonoidHom {
        MonoidHom::new_unchecked(first.domain.clone(), self.codomain.clone(), self.group_map.mul(&first.group_map))
    }

    fn gp(&self) -> &GpData {
        self.gp.get_or_init(|| Arc::new(GpData::compute(self)))
    }

    /// Kernel and cokernel of `u^gp: P^gp → Q^gp`.
    pub fn gp_kernel_cokernel(&self) -> (AmbientAbelianGroup, AmbientAbelianGroup) {
        let gp = self.gp();
        let pstruct = self.domain.group().structure();
        let kernel = Subgroup::generated_by(pstruct, &gp.kernel).structure().clone();
        let coker = Quotient::of(&gp.system).group;
        (kernel, coker)
    }

    /// The cokernel `Q^gp / u^gp(P^gp)` with its projection from
    /// structure coordinates of `Q^gp`.
    pub fn gp_cokernel_quotient(&self) -> Quotient {
        Quotient::of(&self.gp().system)
    }

    /// Generators of `ker(u^gp)` as domain ambient elements (zeros dropped).
    pub fn gp_kernel_elements(&self) -> Vec<MonoidElement> {
        let gp = self.gp();
        gp.kernel
            .iter()
            .map(|c| self.domain.ambient().reduced(gp.embed.mul_vec(c)))
            .filter(|x| !is_zero_vec(x))
            .collect()
    }

    pub fn is_gp_injective(&self) -> bool {
        self.gp_kernel_elements().is_empty()
    }

    /// Some `x ∈ P^gp` with `u(x) = b`, for `b` in the codomain ambient.
    pub fn gp_preimage(&self, b: &[Int]) -> Option<MonoidElement> {
        let gp = self.gp();
        let cb = self.codomain.group().coords(b)?;
        let sol = solve_with(&gp.solver, &cb)?;
        let k = gp.embed.cols();
        Some(self.domain.ambient().reduced(gp.embed.mul_vec(&sol[..k])))
    }

    /// The submonoid of the codomain generated by the images of the domain
    /// generators.
    pub fn image(&self) -> AffineMonoid {
        let gens = self.domain.generators().iter().map(|g| self.apply(g)).collect();
        AffineMonoid::new(self.codomain.ambient().clone(), gens).expect("same ambient")
    }
}

impl GpData {
    fn compute(h: &MonoidHom) -> GpData {
        let pg = h.domain.group();
        let qg = h.codomain.group();
        let k = pg.structure().dim();
        let m = qg.structure().dim();
        let embed_cols: Vec<Vec<Int>> = (0..k).map(|i| pg.embed(&unit(k, i))).collect();
        let embed = IntegerMatrix::from_columns(&embed_cols, h.domain.ambient().dim());
        let mut cols: Vec<Vec<Int>> = embed_cols
            .iter()
            .map(|c| qg.coords(&h.apply(c)).expect("image of P^gp lies in Q^gp"))
            .collect();
        cols.extend(qg.structure().relation_columns().columns());
        let system = IntegerMatrix::from_columns(&cols, m);
        let solver = smith_normal_form(&system);
        let kernel = if cols.is_empty() {
            Vec::new()
        } else {
            kernel_basis(&system).into_iter().map(|v| v[..k].to_vec()).filter(|v| !is_zero_vec(v)).collect()
        };
        GpData { embed, system, solver, kernel }
    }
}

fn unit(d: usize, i: usize) -> Vec<Int> {
    let mut v = vec![Int::zero(); d];
    v[i] = Int::one();
    v
}

pub fn fmt_vec(v: &[Int]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Outcome of an exactness test; `witness` is an element of the preimage
/// monoid outside the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactVerdict {
    pub exact: bool,
    pub witness: Option<MonoidElement>,
}

/// `P = (u^gp)^{-1}(Q)`, tested on the Hilbert basis of the preimage.
pub fn is_exact(u: &MonoidHom) -> Result<ExactVerdict> {
    if !u.codomain.is_saturated() {
        return Err(Error::Precondition(format!("codomain {} is not saturated", u.codomain)));
    }
    let gp = u.gp();
    let p = &u.domain;
    let q = &u.codomain;
    let pstruct = p.group().structure();
    let rp = pstruct.free_rank();
    let rq = q.rank();
    // inequalities on the free coordinates of P^gp pulled back from Q's facets
    let mut rows = Vec::new();
    for f in q.facets() {
        let row: Vec<Int> = (0..rp)
            .map(|j| (0..rq).map(|i| &f[i] * &gp.system[(i, j)]).sum())
            .collect();
        if !is_zero_vec(&row) {
            rows.push(row);
        }
    }
    let preimage_cone = cone::polar(&rows, rp);
    let mut gens = preimage_cone.rays.clone();
    for l in &preimage_cone.lineality {
        gens.push(l.clone());
        gens.push(l.iter().map(|x| -x).collect());
    }
    let sat = cone::saturated_cone(&gens, rp);
    let pad = |v: &[Int]| -> Vec<Int> {
        let mut out = v.to_vec();
        out.resize(pstruct.dim(), Int::zero());
        out
    };
    let mut candidates: Vec<Vec<Int>> = Vec::new();
    for unit_vec in &sat.units {
        candidates.push(pad(unit_vec));
        candidates.push(pad(&unit_vec.iter().map(|x| -x).collect::<Vec<_>>()));
    }
    for i in rp..pstruct.dim() {
        candidates.push(unit(pstruct.dim(), i));
    }
    for h in &sat.hilbert_basis {
        candidates.push(pad(h));
    }
    for c in candidates {
        let x = p.group().embed(&c);
        if !p.contains(&x) {
            return Ok(ExactVerdict { exact: false, witness: Some(x) });
        }
    }
    Ok(ExactVerdict { exact: true, witness: None })
}

/// Result of the Kummer test with the Galois group on success.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KummerVerdict {
    pub kummer: bool,
    pub galois_group: Option<FiniteAbelianGroup>,
    pub reason: Option<String>,
}

impl KummerVerdict {
    fn fail(reason: String) -> Self {
        KummerVerdict { kummer: false, galois_group: None, reason: Some(reason) }
    }
}

/// Injectivity of `u^gp`, finiteness of the cokernel, and `e·q ∈ u(P)` for
/// each codomain generator `q`, `e` the cokernel exponent. Saturation is not
/// checked here.
pub fn kummer_conditions(u: &MonoidHom) -> KummerVerdict {
    if let Some(k) = u.gp_kernel_elements().first() {
        return KummerVerdict::fail(format!("u^gp is not injective: {} maps to 0", fmt_vec(k)));
    }
    let (_, coker) = u.gp_kernel_cokernel();
    let Some(g) = coker.to_finite() else {
        return KummerVerdict::fail(format!("cokernel {coker} is infinite"));
    };
    let e = g.exponent();
    let image = u.image();
    for q in u.codomain.generators() {
        let eq = u.codomain.ambient().scale(&e, q);
        if !image.contains(&eq) {
            return KummerVerdict::fail(format!("{e}·{} is not in the image", fmt_vec(q)));
        }
    }
    KummerVerdict { kummer: true, galois_group: Some(g), reason: None }
}

pub fn is_kummer(u: &MonoidHom) -> Result<KummerVerdict> {
    for (name, m) in [("domain", &u.domain), ("codomain", &u.codomain)] {
        if !m.is_saturated() {
            return Err(Error::Precondition(format!("{name} {m} is not saturated")));
        }
    }
    Ok(kummer_conditions(u))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartClassification {
    pub injective: bool,
    pub exact: bool,
    pub kummer: bool,
    pub log_smooth: bool,
    pub log_etale: bool,
    pub kummer_etale: bool,
    pub residue_characteristic: u64,
    pub galois_group: Option<FiniteAbelianGroup>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn coprime_to(order: &Int, p: u64) -> bool {
    p == 0 || !order.is_multiple_of(&Int::from(p))
}

fn group_order(g: &AmbientAbelianGroup) -> Option<Int> {
    g.to_finite().map(|f| f.order())
}

pub fn chart_classification(u: &MonoidHom, p: u64) -> Result<ChartClassification> {
    if p != 0 && !is_prime(p) {
        return Err(Error::InvalidCharacteristic(p));
    }
    for (name, m) in [("domain", &u.domain), ("codomain", &u.codomain)] {
        if !m.is_saturated() {
            return Err(Error::Precondition(format!("{name} {m} is not fs")));
        }
    }
    let (kernel, coker) = u.gp_kernel_cokernel();
    let injective = kernel.is_trivial();
    let kernel_ok = group_order(&kernel).is_some_and(|o| coprime_to(&o, p));
    let torsion_order: Int = coker.torsion().iter().product();
    let log_smooth = kernel_ok && coprime_to(&torsion_order, p);
    let log_etale = kernel_ok && group_order(&coker).is_some_and(|o| coprime_to(&o, p));
    let exact = is_exact(u)?.exact;
    let kv = kummer_conditions(u);
    let kummer_etale = kv.kummer && kv.galois_group.as_ref().is_some_and(|g| coprime_to(&g.order(), p));
    Ok(ChartClassification {
        injective,
        exact,
        kummer: kv.kummer,
        log_smooth,
        log_etale,
        kummer_etale,
        residue_characteristic: p,
        galois_group: kv.galois_group,
    })
}

/// Exponent of the Galois group of a Kummer map.
pub fn ramification_index(u: &MonoidHom) -> Result<Int> {
    let kv = is_kummer(u)?;
    match kv.galois_group {
        Some(g) if kv.kummer => Ok(g.exponent()),
        _ => Err(Error::NotKummer(kv.reason.unwrap_or_default())),
    }
}

fn require_kummer(u: &MonoidHom) -> Result<FiniteAbelianGroup> {
    let kv = is_kummer(u)?;
    match kv.galois_group {
        Some(g) if kv.kummer => Ok(g),
        _ => Err(Error::NotKummer(kv.reason.unwrap_or_default())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PushoutMode {
    Raw,
    Fine,
    Fs,
}

/// An amalgamated sum `Q ⊕_P R` with its two insertions.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub monoid: AffineMonoid,
    pub left: MonoidHom,
    pub right: MonoidHom,
}

#[derive(Clone, Debug)]
pub enum PushoutOutput {
    /// Generators are those of `Q` followed by those of `R`.
    Raw(MonoidPresentation),
    Affine(Pushout),
}

fn check_common_domain(u: &MonoidHom, v: &MonoidHom) -> Result<()> {
    if u.domain.ambient() != v.domain.ambient() || u.domain.generators() != v.domain.generators() {
        return Err(Error::Precondition("the two maps must share their domain".into()));
    }
    Ok(())
}

/// Fine (`saturate = false`) or fs pushout, computed in the ambient
/// `(A_Q ⊕ A_R) / {(u(p), -v(p))}`.
pub fn pushout(u: &MonoidHom, v: &MonoidHom, saturate: bool) -> Result<Pushout> {
    check_common_domain(u, v)?;
    let (sum, e1, e2) = u.codomain.ambient().direct_sum(v.codomain.ambient());
    let mut cols: Vec<Vec<Int>> = u
        .domain
        .generators()
        .iter()
        .map(|p| {
            let a = e1.mul_vec(&u.apply(p));
            let b = e2.mul_vec(&v.apply(p));
            a.iter().zip(&b).map(|(x, y)| x - y).collect()
        })
        .collect();
    cols.extend(sum.relation_columns().columns());
    let q = Quotient::of(&IntegerMatrix::from_columns(&cols, sum.dim()));
    let left_map = q.proj.mul(&e1);
    let right_map = q.proj.mul(&e2);
    let mut gens: Vec<MonoidElement> = u.codomain.generators().iter().map(|g| q.group.reduced(left_map.mul_vec(g))).collect();
    gens.extend(v.codomain.generators().iter().map(|g| q.group.reduced(right_map.mul_vec(g))));
    let mut monoid = AffineMonoid::new(q.group.clone(), gens)?;
    if saturate {
        monoid = monoid.saturate();
    }
    let left = MonoidHom::new_unchecked(u.codomain.clone(), monoid.clone(), left_map);
    let right = MonoidHom::new_unchecked(v.codomain.clone(), monoid.clone(), right_map);
    Ok(Pushout { monoid, left, right })
}

pub fn pushout_with_mode(u: &MonoidHom, v: &MonoidHom, mode: PushoutMode) -> Result<PushoutOutput> {
    match mode {
        PushoutMode::Raw => pushout_presentation(u, v).map(PushoutOutput::Raw),
        PushoutMode::Fine => pushout(u, v, false).map(PushoutOutput::Affine),
        PushoutMode::Fs => pushout(u, v, true).map(PushoutOutput::Affine),
    }
}

/// A presentation of `Q ⊕_P R` on the generators of `Q` then `R`: relations
/// from a lattice basis of the generator relations of each factor, plus one
/// amalgamation relation per generator of `P` read off membership
/// certificates. Its integralization is the fine pushout.
pub fn pushout_presentation(u: &MonoidHom, v: &MonoidHom) -> Result<MonoidPresentation> {
    check_common_domain(u, v)?;
    let nq = u.codomain.generators().len();
    let nr = v.codomain.generators().len();
    let mut relations = Vec::new();
    for (m, offset) in [(&u.codomain, 0), (&v.codomain, nq)] {
        for rel in generator_relations(m) {
            let mut l = vec![0u64; nq + nr];
            let mut r = vec![0u64; nq + nr];
            for (i, c) in rel.iter().enumerate() {
                let mag = to_u64(&c.magnitude().clone().into())?;
                if c > &Int::zero() {
                    l[offset + i] = mag;
                } else {
                    r[offset + i] = mag;
                }
            }
            relations.push((l, r));
        }
    }
    for p in u.domain.generators() {
        let cq = u.codomain.membership(&u.apply(p))?.ok_or_else(|| Error::Diagnostic("u(p) not in Q".into()))?;
        let cr = v.codomain.membership(&v.apply(p))?.ok_or_else(|| Error::Diagnostic("v(p) not in R".into()))?;
        let mut l = vec![0u64; nq + nr];
        let mut r = vec![0u64; nq + nr];
        for (i, c) in cq.iter().enumerate() {
            l[i] = to_u64(c)?;
        }
        for (i, c) in cr.iter().enumerate() {
            r[nq + i] = to_u64(c)?;
        }
        relations.push((l, r));
    }
    MonoidPresentation::new(nq + nr, relations)
}

fn to_u64(x: &Int) -> Result<u64> {
    crate::monoid::to_u64(x).ok_or_else(|| Error::Diagnostic(format!("exponent {x} does not fit in 64 bits")))
}

/// Lattice basis of `{c : Σ c_i g_i = 0}` for the generators of `m`.
fn generator_relations(m: &AffineMonoid) -> Vec<Vec<Int>> {
    let n = m.generators().len();
    if n == 0 {
        return Vec::new();
    }
    let mut cols = m.generators().to_vec();
    cols.extend(m.ambient().relation_columns().columns());
    if m.ambient().dim() == 0 {
        return (0..n).map(|i| unit(n, i)).collect();
    }
    let a = IntegerMatrix::from_columns(&cols, m.ambient().dim());
    crate::zlattice::lattice_basis(
        &kernel_basis(&a).into_iter().map(|v| v[..n].to_vec()).filter(|v| !is_zero_vec(v)).collect::<Vec<_>>(),
        n,
    )
}

/// `u` restricted to `P^gp → Q^gp`, both monoids inside their own groups.
pub fn tighten(u: &MonoidHom) -> MonoidHom {
    let (pt, _) = u.domain.tighten();
    let (qt, _) = u.codomain.tighten();
    let gp = u.gp();
    let k = gp.embed.cols();
    let m = gp.system.select_columns(&(0..k).collect::<Vec<_>>());
    MonoidHom::new_unchecked(pt, qt, m)
}

/// The `j`-fold fs self-pushout of a Kummer map and its identification with
/// `Q ⊕ G^{j-1}`.
#[derive(Clone, Debug)]
pub struct SelfProduct {
    /// `u` between the tightened monoids; every map below starts from its
    /// codomain.
    pub tight_map: MonoidHom,
    /// `(Q ⊕_P ⋯ ⊕_P Q)^sat`.
    pub product: AffineMonoid,
    /// The `j` insertions `Q → product`.
    pub insertions: Vec<MonoidHom>,
    /// `Q ⊕ G^{j-1}`.
    pub target: AffineMonoid,
    /// `(q_1, …, q_j) ↦ (Σ q_i, [q_2], …, [q_j])`.
    pub phi: MonoidHom,
    pub galois_group: FiniteAbelianGroup,
    pub certified: bool,
    pub counterexample: Option<String>,
    /// `Z^{jn}` modulo the amalgamation relations, presenting the product's
    /// ambient group.
    pub copies: Quotient,
    /// Raw coordinates `Z^n ⊕ (Z^{dim G})^{j-1}` onto the target's ambient.
    pub target_coords: Quotient,
}

pub fn self_product_decomposition(u: &MonoidHom, j: usize) -> Result<SelfProduct> {
    if j == 0 {
        return Err(Error::InvalidInput("self-product length must be at least 1".into()));
    }
    let g = require_kummer(u)?;
    let ut = tighten(u);
    let q = ut.codomain.clone();
    let a_q = q.ambient().clone();
    let n = a_q.dim();

    // copies (x_1, …, x_j) ∈ Z^{jn} modulo torsion and ι_1 u(p) - ι_a u(p)
    let copy = |a: usize, x: &[Int]| -> Vec<Int> {
        let mut v = vec![Int::zero(); j * n];
        v[a * n..(a + 1) * n].clone_from_slice(x);
        v
    };
    let mut cols = Vec::new();
    for a in 0..j {
        for r in a_q.relation_columns().columns() {
            cols.push(copy(a, &r));
        }
    }
    for p in ut.domain.generators() {
        let up = ut.apply(p);
        let first = copy(0, &up);
        for a in 1..j {
            cols.push(first.iter().zip(copy(a, &up)).map(|(x, y)| x - y).collect());
        }
    }
    let quo = Quotient::of(&IntegerMatrix::from_columns(&cols, j * n));
    let insert_maps: Vec<IntegerMatrix> = (0..j)
        .map(|a| quo.proj.select_columns(&(a * n..(a + 1) * n).collect::<Vec<_>>()))
        .collect();
    let mut gens = Vec::new();
    for m in &insert_maps {
        for x in q.generators() {
            gens.push(quo.group.reduced(m.mul_vec(x)));
        }
    }
    let product = AffineMonoid::new(quo.group.clone(), gens)?.saturate();
    let insertions: Vec<MonoidHom> =
        insert_maps.iter().map(|m| MonoidHom::new_unchecked(q.clone(), product.clone(), m.clone())).collect();

    // Q ⊕ G^{j-1} on raw coordinates Z^n ⊕ (Z^{|G factors|})^{j-1}
    let cq = ut.gp_cokernel_quotient();
    let gd = cq.group.dim();
    let raw_dim = n + (j - 1) * gd;
    let mut rels: Vec<Vec<Int>> = Vec::new();
    let raw_unit = |i: usize, d: &Int| {
        let mut v = vec![Int::zero(); raw_dim];
        v[i] = d.clone();
        v
    };
    for (i, d) in a_q.torsion().iter().enumerate() {
        rels.push(raw_unit(a_q.free_rank() + i, d));
    }
    for a in 1..j {
        for (r, d) in cq.group.torsion().iter().enumerate() {
            rels.push(raw_unit(n + (a - 1) * gd + r, d));
        }
    }
    let norm = Quotient::of(&IntegerMatrix::from_columns(&rels, raw_dim));
    let mut phi_copies = IntegerMatrix::zeros(raw_dim, j * n);
    for a in 0..j {
        for i in 0..n {
            phi_copies[(i, a * n + i)] = Int::one();
        }
        if a > 0 {
            for r in 0..gd {
                for i in 0..n {
                    phi_copies[(n + (a - 1) * gd + r, a * n + i)] = cq.proj[(r, i)].clone();
                }
            }
        }
    }
    let mut tgens: Vec<MonoidElement> = q
        .generators()
        .iter()
        .map(|x| {
            let mut v = x.clone();
            v.resize(raw_dim, Int::zero());
            norm.project(&v)
        })
        .collect();
    for i in n..raw_dim {
        tgens.push(norm.project(&raw_unit(i, &Int::one())));
    }
    let target = AffineMonoid::new(norm.group.clone(), tgens)?;
    let phi_map = norm.proj.mul(&phi_copies).mul(&quo.lift);
    let phi = MonoidHom::new_unchecked(product.clone(), target.clone(), phi_map);
    let image = phi.image();
    let mut counterexample = None;
    if image != target {
        counterexample = Some(format!("image of the canonical map is {image}, expected {target}"));
    } else if let Some(k) = phi.gp_kernel_elements().first() {
        counterexample = Some(format!("canonical map kills {}", fmt_vec(k)));
    }
    Ok(SelfProduct {
        certified: counterexample.is_none(),
        counterexample,
        tight_map: ut,
        product,
        insertions,
        target,
        phi,
        galois_group: g,
        copies: quo,
        target_coords: norm,
    })
}

/// Least `n` with `Q ⊆ P^{1/n}` inside `P^gp ⊗ Q`. The codomain need not be
/// saturated, but `u` must satisfy the Kummer conditions and `Q^gp` must be
/// torsion-free.
pub fn abhyankar_index(u: &MonoidHom) -> Result<Int> {
    let kv = kummer_conditions(u);
    let Some(g) = kv.galois_group.filter(|_| kv.kummer) else {
        return Err(Error::NotKummer(kv.reason.unwrap_or_default()));
    };
    if !u.domain.group().structure().is_torsion_free() || !u.codomain.group().structure().is_torsion_free() {
        return Err(Error::Precondition("P^gp and Q^gp must be torsion-free".into()));
    }
    let e = g.exponent();
    let mut coords: Vec<Vec<Int>> = Vec::new();
    for q in u.codomain.generators() {
        let eq = u.codomain.ambient().scale(&e, q);
        let x = u.gp_preimage(&eq).ok_or_else(|| Error::Diagnostic("e·q has no preimage".into()))?;
        coords.push(u.domain.group().coords(&x).expect("preimage in P^gp"));
    }
    let n = coords.iter().flatten().fold(Int::one(), |acc, x| acc.lcm(&(&e / e.gcd(x))));
    // every m < n leaves some coordinate m·x/e non-integral
    let mut m = Int::one();
    while m < n {
        let contained = coords.iter().flatten().all(|x| (&m * x).is_multiple_of(&e));
        if contained {
            return Err(Error::Diagnostic(format!("{m} < {n} already contains the codomain")));
        }
        m += 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::fractional_refinement;
    use crate::zlattice::{int, int_vec};

    pub(crate) fn power(n: i64) -> MonoidHom {
        MonoidHom::new(AffineMonoid::free(1), AffineMonoid::free(1), IntegerMatrix::from_i64(&[&[n]])).unwrap()
    }

    fn diag23() -> MonoidHom {
        MonoidHom::new(AffineMonoid::free(2), AffineMonoid::free(2), IntegerMatrix::from_i64(&[&[2, 0], &[0, 3]]))
            .unwrap()
    }

    fn diagonal() -> MonoidHom {
        MonoidHom::new(AffineMonoid::free(1), AffineMonoid::free(2), IntegerMatrix::from_i64(&[&[1], &[1]])).unwrap()
    }

    fn mon(n: usize, gens: &[&[i64]]) -> AffineMonoid {
        AffineMonoid::from_i64(n, gens).unwrap()
    }

    #[test]
    fn construction_rejects_images_outside_codomain() {
        let err = MonoidHom::new(AffineMonoid::free(2), mon(2, &[&[2, 0], &[0, 1]]), IntegerMatrix::identity(2));
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn kernel_cokernel_examples() {
        let (k, c) = power(2).gp_kernel_cokernel();
        assert!(k.is_trivial());
        assert_eq!(c, AmbientAbelianGroup::new(0, &[int(2)]));
        let (_, c) = diag23().gp_kernel_cokernel();
        assert_eq!(c, AmbientAbelianGroup::new(0, &[int(6)]));
        let (k, c) = diagonal().gp_kernel_cokernel();
        assert!(k.is_trivial());
        assert_eq!(c, AmbientAbelianGroup::free(1));
    }

    #[test]
    fn exactness_examples() {
        assert!(is_exact(&diagonal()).unwrap().exact);
        let inc = MonoidHom::new(AffineMonoid::free(1), mon(1, &[&[1], &[-1]]), IntegerMatrix::identity(1)).unwrap();
        assert_eq!(is_exact(&inc).unwrap(), ExactVerdict { exact: false, witness: Some(int_vec(&[-1])) });
        let inc = MonoidHom::new(mon(1, &[&[2], &[3]]), AffineMonoid::free(1), IntegerMatrix::identity(1)).unwrap();
        assert_eq!(is_exact(&inc).unwrap(), ExactVerdict { exact: false, witness: Some(int_vec(&[1])) });
    }

    #[test]
    fn kummer_examples() {
        for n in 1..=5 {
            let v = is_kummer(&power(n)).unwrap();
            assert!(v.kummer);
            assert_eq!(v.galois_group.unwrap().order(), int(n));
        }
        assert!(!is_kummer(&diagonal()).unwrap().kummer);
        let p = mon(2, &[&[1, 0], &[1, 1], &[1, 2]]);
        let (_, inc) = fractional_refinement(&p, 3).unwrap();
        assert!(is_kummer(&inc).unwrap().kummer);
    }

    #[test]
    fn chart_classification_examples() {
        let c = chart_classification(&power(2), 3).unwrap();
        assert!(c.log_etale && c.kummer_etale);
        let c = chart_classification(&power(3), 3).unwrap();
        assert!(c.kummer && !c.kummer_etale);
        for p in [0, 2, 3, 5] {
            let c = chart_classification(&diagonal(), p).unwrap();
            assert!(c.log_smooth && !c.log_etale);
        }
        assert_eq!(chart_classification(&power(2), 4), Err(Error::InvalidCharacteristic(4)));
    }

    #[test]
    fn ramification_examples() {
        assert_eq!(ramification_index(&power(6)).unwrap(), int(6));
        assert_eq!(ramification_index(&diag23()).unwrap(), int(6));
        assert_eq!(ramification_index(&MonoidHom::identity(&AffineMonoid::free(2))).unwrap(), int(1));
        assert!(matches!(ramification_index(&diagonal()), Err(Error::NotKummer(_))));
    }

    #[test]
    fn pushout_examples() {
        let triv = AffineMonoid::free(0);
        let u = MonoidHom::new_unchecked(triv.clone(), AffineMonoid::free(1), IntegerMatrix::zeros(1, 0));
        let v = MonoidHom::new_unchecked(triv, mon(1, &[&[2], &[3]]), IntegerMatrix::zeros(1, 0));
        let po = pushout(&u, &v, false).unwrap();
        assert_eq!(po.monoid.rank(), 2);
        assert_eq!(po.monoid.generators().len(), 3);

        let po = pushout(&power(2), &power(2), true).unwrap();
        assert_eq!(po.monoid.ambient(), &AmbientAbelianGroup::new(1, &[int(2)]));
        assert_eq!(po.monoid.group().structure(), &AmbientAbelianGroup::new(1, &[int(2)]));
        assert!(po.monoid.classify().fs);

        let po = pushout(&power(2), &diagonal(), true).unwrap();
        let kv = is_kummer(&po.right).unwrap();
        assert!(kv.kummer);
        assert_eq!(kv.galois_group.unwrap(), FiniteAbelianGroup::cyclic(2));
    }

    #[test]
    fn raw_pushout_presentation_integralizes_to_fine_pushout() {
        let raw = pushout_presentation(&power(2), &diagonal()).unwrap();
        assert_eq!(raw.generator_count(), 3);
        let fine = pushout(&power(2), &diagonal(), false).unwrap().monoid;
        let int = crate::monoid::integralize(&raw);
        assert_eq!(int.group().structure(), fine.group().structure());
        assert_eq!(int.rank(), 2);
    }

    #[test]
    fn self_product_examples() {
        let sp = self_product_decomposition(&power(2), 2).unwrap();
        assert!(sp.certified, "{:?}", sp.counterexample);
        assert_eq!(sp.target.ambient(), &AmbientAbelianGroup::new(1, &[int(2)]));
        let sp = self_product_decomposition(&power(3), 1).unwrap();
        assert!(sp.certified);
        assert_eq!(sp.product.canonical_form(), sp.tight_map.codomain().canonical_form());
        let sp = self_product_decomposition(&diag23(), 3).unwrap();
        assert!(sp.certified, "{:?}", sp.counterexample);
        assert_eq!(sp.target.ambient(), &AmbientAbelianGroup::new(2, &[int(6), int(6)]));
    }

    #[test]
    fn self_product_projections_recover_insertions() {
        let sp = self_product_decomposition(&diag23(), 3).unwrap();
        let q = sp.tight_map.codomain();
        let cq = sp.tight_map.gp_cokernel_quotient();
        for (a, ins) in sp.insertions.iter().enumerate() {
            for g in q.generators() {
                let img = sp.phi.apply(&ins.apply(g));
                assert_eq!(&img[..2], &g[..]);
                let class = cq.project(g);
                assert_eq!(img[2..].iter().any(|x| !x.is_zero()), a > 0 && class.iter().any(|x| !x.is_zero()));
            }
        }
    }

    #[test]
    fn abhyankar_examples() {
        assert_eq!(abhyankar_index(&power(4)).unwrap(), int(4));
        // ⟨1/2, 1/3⟩ over N, scaled by 6
        let u = MonoidHom::new(AffineMonoid::free(1), mon(1, &[&[3], &[2]]), IntegerMatrix::from_i64(&[&[6]])).unwrap();
        assert_eq!(abhyankar_index(&u).unwrap(), int(6));
        assert_eq!(abhyankar_index(&diag23()).unwrap(), int(6));
    }
}
