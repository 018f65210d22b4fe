//! The acceptance battery: eight criteria, each checked against an
//! independent oracle.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cohomology::{
    cech_vs_group_cohomology, koszul_cohomology, polydisc_cohomology, smallest_prime_not_dividing, CharacterDatum,
};
use crate::covers::{classify_covers, fiber_functor, galois_correspondence_check, standard_point, EquivariantFiniteSet};
use crate::io::{hom_to_json, monoid_to_json, vectors_to_json};
use crate::monoid::{fractional_refinement, AffineMonoid};
use crate::morphism::{is_exact, is_kummer, ramification_index, self_product_decomposition, MonoidHom};
use crate::zlattice::{
    hermite_normal_form, smith_normal_form, solve_integer, AmbientAbelianGroup, FiniteAbelianGroup, Int,
    IntegerMatrix, Subgroup,
};

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Smoke,
    Full,
}

impl Scale {
    fn pick<T>(self, smoke: T, full: T) -> T {
        match self {
            Scale::Smoke => smoke,
            Scale::Full => full,
        }
    }

    pub fn name(self) -> &'static str {
        self.pick("smoke", "full")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub scale: Scale,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { scale: Scale::Full, seed: DEFAULT_SEED }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub details: Value,
    pub counterexample: Option<Value>,
    /// Kept out of `to_json` so reports are reproducible.
    pub duration: Duration,
}

impl Outcome {
    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "passed": self.passed,
            "summary": self.summary,
            "details": self.details,
            "counterexample": self.counterexample,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub scale: Scale,
    pub seed: u64,
    pub outcomes: Vec<Outcome>,
    pub duration: Duration,
    pub time_limit: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed) && self.duration <= self.time_limit
    }

    pub fn to_json(&self) -> Value {
        json!({
            "scale": self.scale.name(),
            "seed": self.seed.to_string(),
            "criteria": self.outcomes.iter().map(Outcome::to_json).collect::<Vec<_>>(),
            "passed": self.outcomes.iter().all(|o| o.passed),
        })
    }
}

pub const CRITERIA: [(u8, &str); 8] = [
    (1, "saturation matches the box oracle"),
    (2, "Kummer iff exact with finite cokernel"),
    (3, "standard-cover identity"),
    (4, "Čech exactness and group cohomology"),
    (5, "cover classification over log points"),
    (6, "polydisc cohomology counts"),
    (7, "SNF/HNF properties"),
    (8, "ramification catalog"),
];

pub fn run_criterion(id: u8, cfg: SuiteConfig) -> Outcome {
    let start = Instant::now();
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown");
    let mut out = match id {
        1 => saturation_oracle(cfg),
        2 => kummer_vs_exact(cfg),
        3 => standard_cover_identity(cfg),
        4 => cech_exactness(cfg),
        5 => cover_classification(cfg),
        6 => polydisc_counts(cfg),
        7 => normal_forms(cfg),
        8 => ramification_catalog(cfg),
        _ => Check::new().fail("no such criterion", None),
    };
    out.id = id;
    out.name = name;
    out.duration = start.elapsed();
    if id == 1 && cfg.scale == Scale::Full && out.duration > Duration::from_secs(60) {
        out.passed = false;
        out.summary = format!("{} (took {:.1?}, limit 60s)", out.summary, out.duration);
    }
    out
}

pub fn run_suite(cfg: SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let outcomes = CRITERIA.iter().map(|&(id, _)| run_criterion(id, cfg)).collect();
    SuiteReport {
        scale: cfg.scale,
        seed: cfg.seed,
        outcomes,
        duration: start.elapsed(),
        time_limit: Duration::from_secs(cfg.scale.pick(30, 300)),
    }
}

/// Accumulates failures; the first counterexample is kept.
struct Check {
    failures: usize,
    counterexample: Option<Value>,
}

impl Check {
    fn new() -> Self {
        Check { failures: 0, counterexample: None }
    }

    fn record(&mut self, ok: bool, counterexample: impl FnOnce() -> Value) {
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(counterexample());
            }
        }
    }

    fn finish(self, summary: String, details: Value) -> Outcome {
        Outcome {
            id: 0,
            name: "",
            passed: self.failures == 0,
            summary,
            details,
            counterexample: self.counterexample,
            duration: Duration::ZERO,
        }
    }

    fn fail(mut self, summary: &str, counterexample: Option<Value>) -> Outcome {
        self.failures += 1;
        self.counterexample = counterexample;
        self.finish(summary.to_string(), Value::Null)
    }
}

fn rng(cfg: SuiteConfig, criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(criterion))
}

fn to_i64(v: &[Int]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().expect("small coordinate")).collect()
}

fn to_int(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

// ---------------------------------------------------------------------------
// Oracles

type Q64 = Ratio<i64>;

/// Solves `cols · λ = x` over the rationals; `None` when inconsistent or when
/// the columns are dependent.
fn rational_solve(cols: &[&[i64]], x: &[i64]) -> Option<Vec<Q64>> {
    let rows = x.len();
    let k = cols.len();
    let mut a: Vec<Vec<Q64>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Q64> = cols.iter().map(|c| Q64::from_integer(c[r])).collect();
            row.push(Q64::from_integer(x[r]));
            row
        })
        .collect();
    let mut r = 0;
    for c in 0..k {
        let p = (r..rows).find(|&i| !a[i][c].is_zero())?;
        a.swap(r, p);
        let inv = a[r][c].recip();
        for j in 0..=k {
            a[r][j] *= inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c];
                for j in 0..=k {
                    let t = a[r][j] * f;
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    if a[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| a[i][k]).collect())
}

fn rational_rank(vectors: &[Vec<i64>]) -> usize {
    let Some(n) = vectors.first().map(Vec::len) else { return 0 };
    let mut a: Vec<Vec<Q64>> = vectors.iter().map(|v| v.iter().map(|&x| Q64::from_integer(x)).collect()).collect();
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        for i in rank + 1..a.len() {
            let f = a[i][c] / a[rank][c];
            for j in c..n {
                let t = a[rank][j] * f;
                a[i][j] -= t;
            }
        }
        rank += 1;
    }
    rank
}

/// Carathéodory: `x` lies in the real cone of the generators iff it is a
/// non-negative combination of some linearly independent subset.
struct OracleCone {
    gens: Vec<Vec<i64>>,
    independent: Vec<Vec<usize>>,
}

impl OracleCone {
    fn new(gens: &[Vec<i64>]) -> Self {
        let s = gens.len();
        let mut independent = Vec::new();
        for mask in 1u32..(1 << s) {
            let subset: Vec<usize> = (0..s).filter(|i| mask & (1 << i) != 0).collect();
            let vs: Vec<Vec<i64>> = subset.iter().map(|&i| gens[i].clone()).collect();
            if rational_rank(&vs) == subset.len() {
                independent.push(subset);
            }
        }
        OracleCone { gens: gens.to_vec(), independent }
    }

    fn contains(&self, x: &[i64]) -> bool {
        if x.iter().all(|&v| v == 0) {
            return true;
        }
        self.independent.iter().any(|subset| {
            let cols: Vec<&[i64]> = subset.iter().map(|&i| self.gens[i].as_slice()).collect();
            rational_solve(&cols, x).is_some_and(|l| l.iter().all(|q| !q.is_negative()))
        })
    }
}

/// Hilbert basis of the saturation of a monoid generated by non-negative
/// vectors: lattice points of `[0, R]^r` in `M^gp ∩ cone(M)` that are not a
/// sum of two nonzero such points. Summands of a point are dominated by it,
/// so the decomposition search never leaves the box.
fn box_hilbert_basis(gens: &[Vec<i64>], r: usize, radius: i64) -> BTreeSet<Vec<i64>> {
    let ambient = AmbientAbelianGroup::free(r);
    let lattice = Subgroup::generated_by(&ambient, &gens.iter().map(|g| to_int(g)).collect::<Vec<_>>());
    let cone = OracleCone::new(gens);
    let mut points = Vec::new();
    let mut x = vec![0i64; r];
    loop {
        if x.iter().any(|&v| v != 0) && cone.contains(&x) && lattice.contains(&to_int(&x)) {
            points.push(x.clone());
        }
        let mut i = 0;
        loop {
            if i == r {
                let set: HashSet<&Vec<i64>> = points.iter().collect();
                return points
                    .iter()
                    .filter(|p| {
                        !points.iter().any(|y| {
                            y != *p && y.iter().zip(p.iter()).all(|(a, b)| a <= b) && {
                                let z: Vec<i64> = p.iter().zip(y).map(|(a, b)| a - b).collect();
                                set.contains(&z)
                            }
                        })
                    })
                    .cloned()
                    .collect();
            }
            x[i] += 1;
            if x[i] <= radius {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

fn random_nonneg_vectors(rng: &mut ChaCha8Rng, r: usize, count: usize, max: i64) -> Vec<Vec<i64>> {
    (0..count)
        .map(|_| loop {
            let v: Vec<i64> = (0..r).map(|_| rng.gen_range(0..=max)).collect();
            if v.iter().any(|&x| x != 0) {
                break v;
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// 1

fn saturation_oracle(cfg: SuiteConfig) -> Outcome {
    let count = cfg.scale.pick(40, 200);
    let mut rng = rng(cfg, 1);
    let mut check = Check::new();
    let mut hb_sizes = 0usize;
    for _ in 0..count {
        let r = rng.gen_range(1..=3usize);
        let s = rng.gen_range(1..=5usize);
        let gens = random_nonneg_vectors(&mut rng, r, s, 4);
        let m = AffineMonoid::new(AmbientAbelianGroup::free(r), gens.iter().map(|g| to_int(g)).collect())
            .expect("generators match the ambient");
        let lib: BTreeSet<Vec<i64>> = m.saturate().generators().iter().map(|g| to_i64(g)).collect();
        let oracle = box_hilbert_basis(&gens, r, (4 * r as i64).max(8));
        hb_sizes += oracle.len();
        check.record(lib == oracle, || {
            json!({
                "monoid": monoid_to_json(&m),
                "saturate": lib.iter().map(|v| to_int(v)).collect::<Vec<_>>().iter().map(|v| crate::io::vector_to_json(v)).collect::<Vec<_>>(),
                "oracle": oracle.iter().map(|v| crate::io::vector_to_json(&to_int(v))).collect::<Vec<_>>(),
            })
        });
    }
    let failures = check.failures;
    check.finish(
        format!("{} monoids, {failures} mismatches", count),
        json!({ "monoids": count, "mismatches": failures, "oracle_basis_elements": hb_sizes }),
    )
}

// ---------------------------------------------------------------------------
// 2

fn random_kummer_candidate(rng: &mut ChaCha8Rng) -> (MonoidHom, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    loop {
        let r = rng.gen_range(1..=3usize);
        let s = rng.gen_range(r..=r + 2);
        let p0 = random_nonneg_vectors(rng, r, s, 3);
        if rational_rank(&p0) < r {
            continue;
        }
        // codomain rank r, or r + 1 for an infinite cokernel
        let rq = if rng.gen_bool(0.2) { r + 1 } else { r };
        let a: Vec<Vec<i64>> = (0..rq).map(|_| (0..r).map(|_| rng.gen_range(0..=3)).collect()).collect();
        let columns: Vec<Vec<i64>> = (0..r).map(|c| a.iter().map(|row| row[c]).collect()).collect();
        if rational_rank(&columns) < r {
            continue;
        }
        let p = AffineMonoid::new(AmbientAbelianGroup::free(r), p0.iter().map(|g| to_int(g)).collect())
            .expect("ambient")
            .saturate();
        let am = IntegerMatrix::from_rows(a.iter().map(|row| to_int(row)).collect(), r);
        let mut q0: Vec<Vec<Int>> = p.generators().iter().map(|g| am.mul_vec(g)).collect();
        if rng.gen_bool(0.5) {
            let extra = rng.gen_range(1..=2);
            q0.extend(random_nonneg_vectors(rng, rq, extra, 3).iter().map(|v| to_int(v)));
        }
        if q0.iter().all(|v| v.iter().all(Zero::is_zero)) {
            continue;
        }
        let q = AffineMonoid::new(AmbientAbelianGroup::free(rq), q0).expect("ambient").saturate();
        let u = MonoidHom::new(p, q, am).expect("image of P lies in Q");
        return (u, p0, a);
    }
}

/// Injective, finite cokernel, and every codomain generator has a multiple
/// `k q = A x` with `x` in the saturation of the original domain generators.
fn oracle_kummer(u: &MonoidHom, p0: &[Vec<i64>], a: &[Vec<i64>]) -> bool {
    let r = p0[0].len();
    let columns: Vec<Vec<i64>> = (0..r).map(|c| a.iter().map(|row| row[c]).collect()).collect();
    let qgens: Vec<Vec<i64>> = u.codomain().generators().iter().map(|g| to_i64(g)).collect();
    if rational_rank(&columns) < r || rational_rank(&qgens) != r {
        return false;
    }
    let pgp = Subgroup::generated_by(&AmbientAbelianGroup::free(r), &p0.iter().map(|g| to_int(g)).collect::<Vec<_>>());
    let pcone = OracleCone::new(p0);
    let bound = u.gp_kernel_cokernel().1.to_finite().map(|g| g.order()).and_then(|o| o.to_i64()).unwrap_or(1);
    let cols: Vec<&[i64]> = columns.iter().map(Vec::as_slice).collect();
    qgens.iter().all(|q| {
        (1..=bound).any(|k| {
            let kq: Vec<i64> = q.iter().map(|x| k * x).collect();
            rational_solve(&cols, &kq).is_some_and(|x| {
                x.iter().all(|c| c.is_integer()) && {
                    let xi: Vec<i64> = x.iter().map(|c| c.to_integer()).collect();
                    pcone.contains(&xi) && pgp.contains(&to_int(&xi))
                }
            })
        })
    })
}

fn kummer_vs_exact(cfg: SuiteConfig) -> Outcome {
    let count = cfg.scale.pick(30, 120);
    let mut rng = rng(cfg, 2);
    let mut check = Check::new();
    let (mut kummer_true, mut kummer_false) = (0, 0);
    for _ in 0..count {
        let (u, p0, a) = random_kummer_candidate(&mut rng);
        let kummer = is_kummer(&u).map(|v| v.kummer);
        let exact = is_exact(&u).map(|v| v.exact);
        let finite = u.gp_kernel_cokernel().1.to_finite().is_some();
        let oracle = oracle_kummer(&u, &p0, &a);
        let ok = matches!((&kummer, &exact), (Ok(k), Ok(e)) if *k == (*e && finite) && *k == oracle);
        if kummer == Ok(true) {
            kummer_true += 1;
        } else {
            kummer_false += 1;
        }
        check.record(ok, || {
            json!({
                "hom": hom_to_json(&u),
                "is_kummer": format!("{kummer:?}"),
                "is_exact": format!("{exact:?}"),
                "finite_cokernel": finite,
                "oracle_kummer": oracle,
            })
        });
    }
    let enough = count >= 100 || cfg.scale == Scale::Smoke;
    check.record(enough && kummer_true > 0 && kummer_false > 0, || json!({ "reason": "sample lacks variety" }));
    let failures = check.failures;
    check.finish(
        format!("{count} homs ({kummer_true} Kummer), {failures} discrepancies"),
        json!({ "homs": count, "kummer": kummer_true, "not_kummer": kummer_false, "discrepancies": failures }),
    )
}

// ---------------------------------------------------------------------------
// Catalog shared by 3, 4 and 8

pub struct CatalogEntry {
    pub name: String,
    pub hom: MonoidHom,
    /// Cyclic factors of `G` and its exponent, known in closed form.
    pub group_factors: Vec<i64>,
    pub ramification: u64,
}

impl CatalogEntry {
    pub fn group_order(&self) -> u64 {
        self.group_factors.iter().product::<i64>() as u64
    }
}

fn diagonal_hom(entries: &[i64]) -> MonoidHom {
    let n = entries.len();
    let rows: Vec<Vec<Int>> =
        (0..n).map(|i| (0..n).map(|j| Int::from(if i == j { entries[i] } else { 0 })).collect()).collect();
    MonoidHom::new(AffineMonoid::free(n), AffineMonoid::free(n), IntegerMatrix::from_rows(rows, n))
        .expect("diagonal maps of free monoids")
}

/// `P = ⟨(1,0),(1,1),(1,2)⟩`, not simplicial as a monoid.
pub fn non_simplicial_monoid() -> AffineMonoid {
    AffineMonoid::from_i64(2, &[&[1, 0], &[1, 1], &[1, 2]]).expect("rank 2")
}

pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for n in 2..=6i64 {
        out.push(CatalogEntry { name: format!("[{n}]: N → N"), hom: diagonal_hom(&[n]), group_factors: vec![n], ramification: n as u64 });
    }
    out.push(CatalogEntry {
        name: "diag(2,3): N² → N²".into(),
        hom: diagonal_hom(&[2, 3]),
        group_factors: vec![2, 3],
        ramification: 2u64.lcm(&3),
    });
    let (_, half) = fractional_refinement(&non_simplicial_monoid(), 2).expect("level 2");
    out.push(CatalogEntry { name: "P → P^{1/2}".into(), hom: half, group_factors: vec![2, 2], ramification: 2 });
    out
}

// ---------------------------------------------------------------------------
// 3

fn group_signature(g: &AmbientAbelianGroup) -> (usize, Vec<Int>) {
    let t: Vec<Int> = g.torsion().to_vec();
    let normal = if t.is_empty() { Vec::new() } else { FiniteAbelianGroup::from_orders(&t).factors().to_vec() };
    (g.free_rank(), normal)
}

fn standard_cover_identity(cfg: SuiteConfig) -> Outcome {
    let max_j = cfg.scale.pick(2, 3);
    let mut check = Check::new();
    let mut certified = 0;
    let mut rows = Vec::new();
    for entry in catalog() {
        for j in 1..=max_j {
            match self_product_decomposition(&entry.hom, j) {
                Ok(sp) => {
                    // Q ⊕ G^{j-1} built independently from the closed-form |G|
                    let q = sp.tight_map.codomain().ambient();
                    let mut orders: Vec<Int> = q.torsion().to_vec();
                    for &d in &entry.group_factors {
                        orders.extend(std::iter::repeat_n(Int::from(d), j - 1));
                    }
                    let expected = group_signature(&AmbientAbelianGroup::new(q.free_rank(), &orders));
                    let got = group_signature(sp.product.ambient());
                    let order_ok = sp.galois_group.order() == Int::from(entry.group_order());
                    let ok = sp.certified && expected == got && order_ok;
                    certified += usize::from(ok);
                    rows.push(json!({ "cover": entry.name, "j": j, "certified": sp.certified }));
                    check.record(ok, || {
                        json!({
                            "cover": entry.name,
                            "j": j,
                            "certified": sp.certified,
                            "counterexample": sp.counterexample,
                            "product_group": sp.product.ambient().to_string(),
                        })
                    });
                }
                Err(e) => check.record(false, || json!({ "cover": entry.name, "j": j, "error": e.to_string() })),
            }
        }
    }
    let total = rows.len();
    check.finish(format!("{certified}/{total} self-products certified (j ≤ {max_j})"), json!({ "cases": rows }))
}

// ---------------------------------------------------------------------------
// 4

fn cech_exactness(cfg: SuiteConfig) -> Outcome {
    let bound = cfg.scale.pick(4, 12);
    let max_degree = cfg.scale.pick(2, 3);
    let mut check = Check::new();
    let mut rows = Vec::new();
    let expected: Vec<usize> = (0..=max_degree).map(|i| usize::from(i == 0)).collect();
    for entry in catalog() {
        let ell = smallest_prime_not_dividing(&Int::from(entry.group_order()));
        match cech_vs_group_cohomology(&entry.hom, ell, max_degree, bound) {
            Ok(c) => {
                let ok = c.matches && c.group_cohomology == expected && c.cech_normalized == expected;
                rows.push(json!({
                    "cover": entry.name,
                    "characteristic": ell,
                    "degrees": c.degrees_checked,
                    "cech": c.cech_normalized,
                    "group": c.group_cohomology,
                    "stable": c.stable,
                }));
                check.record(ok, || {
                    json!({
                        "cover": entry.name,
                        "characteristic": ell,
                        "non_exact_degrees": vectors_to_json(&c.non_exact),
                        "nonzero_outside_image": vectors_to_json(&c.nontrivial_class_nonzero),
                        "cech": c.cech_normalized,
                        "group": c.group_cohomology,
                    })
                });
            }
            Err(e) => check.record(false, || json!({ "cover": entry.name, "error": e.to_string() })),
        }
    }
    check.finish(
        format!("catalog exact up to coordinate bound {bound}, length {}", max_degree + 3),
        json!({ "covers": rows }),
    )
}

// ---------------------------------------------------------------------------
// 5

/// Subgroups of `(Z/n)^r`, each as the sorted list of its elements, found by
/// closing every `r`-tuple of elements.
fn oracle_subgroups(r: usize, n: u64) -> BTreeSet<Vec<Vec<u64>>> {
    let mut elements = vec![Vec::new()];
    for _ in 0..r {
        elements = elements
            .into_iter()
            .flat_map(|e: Vec<u64>| (0..n).map(move |x| [e.clone(), vec![x]].concat()))
            .collect();
    }
    let mut out = BTreeSet::new();
    let mut tuple = vec![0usize; r];
    loop {
        let gens: Vec<&Vec<u64>> = tuple.iter().map(|&i| &elements[i]).collect();
        let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
        let mut queue = VecDeque::from([vec![0u64; r]]);
        while let Some(x) = queue.pop_front() {
            if !seen.insert(x.clone()) {
                continue;
            }
            for g in &gens {
                queue.push_back(x.iter().zip(g.iter()).map(|(a, b)| (a + b) % n).collect());
            }
        }
        out.insert(seen.into_iter().collect());
        let mut i = 0;
        loop {
            if i == r {
                return out;
            }
            tuple[i] += 1;
            if tuple[i] < elements.len() {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

/// Counts equivariant maps by trying every function.
fn brute_force_equivariant(x: &EquivariantFiniteSet, y: &EquivariantFiniteSet) -> u64 {
    let (nx, ny) = (x.len(), y.len());
    let mut f = vec![0usize; nx];
    let mut count = 0;
    if nx == 0 {
        return 1;
    }
    if ny == 0 {
        return 0;
    }
    loop {
        let ok = x.action.iter().zip(&y.action).all(|(gx, gy)| (0..nx).all(|s| f[gx[s]] == gy[f[s]]));
        count += u64::from(ok);
        let mut i = 0;
        loop {
            if i == nx {
                return count;
            }
            f[i] += 1;
            if f[i] < ny {
                break;
            }
            f[i] = 0;
            i += 1;
        }
    }
}

fn cover_classification(_cfg: SuiteConfig) -> Outcome {
    let mut check = Check::new();
    let mut rows = Vec::new();
    for (r, n, expected_covers, expected_pairs) in [(1usize, 2u64, 2usize, 4usize), (2, 2, 5, 25), (1, 6, 4, 16)] {
        let pt = standard_point(r);
        let oracle = oracle_subgroups(r, n).len();
        let result = classify_covers(&pt, n).and_then(|covers| {
            let report = galois_correspondence_check(&pt, n)?;
            let fibers = covers.iter().map(|c| fiber_functor(&pt, c, n)).collect::<crate::Result<Vec<_>>>()?;
            let brute_ok = report
                .pairs
                .iter()
                .all(|p| brute_force_equivariant(&fibers[p.left], &fibers[p.right]) == p.equivariant_maps);
            Ok((covers.len(), report, brute_ok))
        });
        match result {
            Ok((count, report, brute_ok)) => {
                let matched = report.pairs.iter().filter(|p| p.matches).count();
                let ok = count == oracle
                    && count == expected_covers
                    && report.pairs.len() == expected_pairs
                    && report.passed
                    && brute_ok;
                rows.push(json!({
                    "rank": r, "level": n, "covers": count, "oracle_subgroups": oracle,
                    "pairs": report.pairs.len(), "pairs_matching": matched, "brute_force_agrees": brute_ok,
                }));
                check.record(ok, || json!({ "rank": r, "level": n, "covers": count, "oracle": oracle, "pairs_matching": matched }));
            }
            Err(e) => check.record(false, || json!({ "rank": r, "level": n, "error": e.to_string() })),
        }
    }
    check.finish("cover counts and Galois correspondence".into(), json!({ "cases": rows }))
}

// ---------------------------------------------------------------------------
// 6

fn pascal_row(n: usize) -> Vec<usize> {
    let mut row = vec![1usize];
    for _ in 0..n {
        let mut next = vec![1usize; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

fn oracle_prime_one_mod(m: u64) -> u64 {
    (2..).find(|&p: &u64| p % m == 1 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).expect("Dirichlet")
}

fn polydisc_counts(cfg: SuiteConfig) -> Outcome {
    let max_n = cfg.scale.pick(3, 4);
    let mut check = Check::new();
    let mut rows = Vec::new();
    for m in [2u64, 6] {
        let ell = oracle_prime_one_mod(m);
        for n in 0..=max_n {
            match polydisc_cohomology(n, m, Some(ell)) {
                Ok(rep) => {
                    let expected = pascal_row(n);
                    let zero = vec![0u64; n];
                    // Euler characteristic of each nonzero character vanishes
                    let mut euler_ok = true;
                    if n >= 1 {
                        let cd = CharacterDatum::new(m, (0..n as u64).map(|k| (k + 1) % m).collect(), ell)
                            .expect("valid character");
                        let h = koszul_cohomology(&cd, n);
                        let chi: i64 = h.iter().enumerate().map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) }).sum();
                        euler_ok = chi == 0;
                    }
                    let ok = rep.dims == expected && rep.contributing == vec![zero] && rep.ell == ell && euler_ok;
                    rows.push(json!({ "n": n, "level": m, "char": ell, "dims": rep.dims }));
                    check.record(ok, || {
                        json!({ "n": n, "level": m, "char": ell, "dims": rep.dims, "expected": expected,
                                "contributing": rep.contributing })
                    });
                }
                Err(e) => check.record(false, || json!({ "n": n, "level": m, "error": e.to_string() })),
            }
        }
    }
    check.finish(format!("binomial counts for n ≤ {max_n}, m ∈ {{2, 6}}"), json!({ "cases": rows }))
}

// ---------------------------------------------------------------------------
// 7

fn laplace_det(m: &[Vec<Int>]) -> Int {
    match m.len() {
        0 => Int::from(1),
        1 => m[0][0].clone(),
        n => (0..n)
            .filter(|&c| !m[0][c].is_zero())
            .map(|c| {
                let minor: Vec<Vec<Int>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][c] * laplace_det(&minor);
                if c % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == k).map(|s| (0..n).filter(|i| s & (1 << i) != 0).collect()).collect()
}

fn minor_gcd(a: &IntegerMatrix, k: usize) -> Int {
    let rows = a.to_rows();
    let mut g = Int::zero();
    for rs in subsets(a.rows(), k) {
        for cs in subsets(a.cols(), k) {
            let sub: Vec<Vec<Int>> = rs.iter().map(|&r| cs.iter().map(|&c| rows[r][c].clone()).collect()).collect();
            g = g.gcd(&laplace_det(&sub));
        }
    }
    g
}

fn snf_hnf_properties(a: &IntegerMatrix) -> std::result::Result<(), String> {
    let (m, n) = (a.rows(), a.cols());
    let snf = smith_normal_form(a);
    if snf.u.mul(a).mul(&snf.v) != snf.d {
        return Err("U·A·V ≠ D".into());
    }
    for (name, t) in [("U", &snf.u), ("V", &snf.v)] {
        if laplace_det(&t.to_rows()).abs() != Int::from(1) {
            return Err(format!("{name} is not unimodular"));
        }
    }
    if snf.u.mul(&snf.u_inv) != IntegerMatrix::identity(m) {
        return Err("U·U⁻¹ ≠ I".into());
    }
    for r in 0..m {
        for c in 0..n {
            let on_diag = r == c && r < snf.rank;
            if !on_diag && !snf.d[(r, c)].is_zero() {
                return Err(format!("D has an off-pattern entry at ({r}, {c})"));
            }
        }
    }
    let f = &snf.invariant_factors;
    if f.iter().any(|d| !d.is_positive()) || f.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
        return Err("divisibility chain broken".into());
    }
    let mut prod = Int::from(1);
    for k in 1..=m.min(n) {
        prod = if k <= f.len() { prod * &f[k - 1] } else { Int::zero() };
        if minor_gcd(a, k) != prod {
            return Err(format!("gcd of {k}×{k} minors differs from the product of the first {k} factors"));
        }
    }
    let (h, t) = hermite_normal_form(a);
    if t.mul(a) != h || laplace_det(&t.to_rows()).abs() != Int::from(1) {
        return Err("HNF transform is wrong".into());
    }
    let mut last_pivot: Option<usize> = None;
    let mut zero_seen = false;
    for r in 0..m {
        let row = h.row(r);
        match row.iter().position(|x| !x.is_zero()) {
            None => zero_seen = true,
            Some(p) => {
                if zero_seen || last_pivot.is_some_and(|q| p <= q) || !row[p].is_positive() {
                    return Err("HNF is not in echelon form".into());
                }
                for above in 0..r {
                    let x = &h[(above, p)];
                    if x.is_negative() || x >= &row[p] {
                        return Err("HNF entry above a pivot is not reduced".into());
                    }
                }
                last_pivot = Some(p);
            }
        }
    }
    // same row lattice, checked by integer solves in both directions
    let a_t = a.transpose();
    let h_t = h.transpose();
    for r in 0..m {
        if solve_integer(&a_t, h.row(r)).is_none() || solve_integer(&h_t, a.row(r)).is_none() {
            return Err("HNF changes the row lattice".into());
        }
    }
    Ok(())
}

fn normal_forms(cfg: SuiteConfig) -> Outcome {
    let count = cfg.scale.pick(100, 500);
    let mut rng = rng(cfg, 7);
    let mut check = Check::new();
    for _ in 0..count {
        let m = rng.gen_range(1..=5usize);
        let n = rng.gen_range(1..=5usize);
        let rows: Vec<Vec<Int>> = (0..m).map(|_| (0..n).map(|_| Int::from(rng.gen_range(-10..=10i64))).collect()).collect();
        let a = IntegerMatrix::from_rows(rows, n);
        let res = snf_hnf_properties(&a);
        check.record(res.is_ok(), || json!({ "matrix": crate::io::matrix_to_json(&a), "failure": res.unwrap_err() }));
    }
    let failures = check.failures;
    check.finish(format!("{count} matrices, {failures} failures"), json!({ "matrices": count, "failures": failures }))
}

// ---------------------------------------------------------------------------
// 8

fn ramification_catalog(_cfg: SuiteConfig) -> Outcome {
    let mut check = Check::new();
    let mut rows = Vec::new();
    let mut entries = catalog();
    for (name, m) in [("identity on N", AffineMonoid::free(1)), ("identity on N²", AffineMonoid::free(2)), ("identity on P", non_simplicial_monoid())] {
        entries.push(CatalogEntry { name: name.into(), hom: MonoidHom::identity(&m), group_factors: vec![], ramification: 1 });
    }
    for entry in entries {
        let e = ramification_index(&entry.hom);
        let g = is_kummer(&entry.hom).ok().and_then(|v| v.galois_group);
        let ok = match (&e, &g) {
            (Ok(e), Some(g)) => {
                *e == Int::from(entry.ramification)
                    && g.order() == Int::from(entry.group_order())
                    && (e == &Int::from(1)) == g.is_trivial()
            }
            _ => false,
        };
        let shown = e.as_ref().map(|x| x.to_string()).unwrap_or_else(|err| err.to_string());
        rows.push(json!({ "hom": entry.name, "ramification": shown, "expected": entry.ramification.to_string() }));
        check.record(ok, || json!({ "hom": entry.name, "ramification": shown, "expected": entry.ramification.to_string() }));
    }
    check.finish("ramification indices match closed forms".into(), json!({ "cases": rows }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_cone_membership() {
        let c = OracleCone::new(&[vec![1, 0], vec![1, 2]]);
        assert!(c.contains(&[1, 1]));
        assert!(c.contains(&[3, 0]));
        assert!(!c.contains(&[0, 1]));
    }

    #[test]
    fn box_oracle_on_numerical_monoid() {
        let hb = box_hilbert_basis(&[vec![2], vec![3]], 1, 8);
        assert_eq!(hb, BTreeSet::from([vec![1]]));
        // (1,1) is outside the group generated by (1,0), (1,2)
        let hb = box_hilbert_basis(&[vec![1, 0], vec![1, 2]], 2, 8);
        assert_eq!(hb, BTreeSet::from([vec![1, 0], vec![1, 2]]));
        let hb = box_hilbert_basis(&[vec![1, 0], vec![0, 2], vec![1, 1]], 2, 8);
        assert_eq!(hb, BTreeSet::from([vec![0, 1], vec![1, 0]]));
    }

    #[test]
    fn oracle_subgroup_counts() {
        assert_eq!(oracle_subgroups(1, 2).len(), 2);
        assert_eq!(oracle_subgroups(2, 2).len(), 5);
        assert_eq!(oracle_subgroups(1, 6).len(), 4);
        assert_eq!(oracle_subgroups(2, 3).len(), 6);
    }

    #[test]
    fn laplace_matches_library_determinant() {
        let a = IntegerMatrix::from_i64(&[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        assert_eq!(laplace_det(&a.to_rows()), a.determinant());
    }

    #[test]
    fn oracle_primes() {
        assert_eq!(oracle_prime_one_mod(2), 3);
        assert_eq!(oracle_prime_one_mod(6), 7);
    }

    #[test]
    fn smoke_criteria_pass() {
        let cfg = SuiteConfig { scale: Scale::Smoke, seed: DEFAULT_SEED };
        for id in [2, 3, 5, 6, 7, 8] {
            let o = run_criterion(id, cfg);
            assert!(o.passed, "criterion {id}: {} {:?}", o.summary, o.counterexample);
        }
    }
}
