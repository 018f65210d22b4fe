//! Finite Kummer étale covers of fs log points.
//!
//! Everything happens at a finite level `n`: with `P^gp = Z^r`, the lattice
//! `(1/n) P^gp` is identified with `Z^r` by multiplying by `n`, so `P` is
//! generated by `n·p` and `P^{1/n}` by the `p` themselves. A cover is then
//! `cone(P) ∩ L` for a lattice `n Z^r ⊆ L ⊆ Z^r`.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::monoid::AffineMonoid;
use crate::morphism::{is_kummer, is_prime, MonoidHom};
use crate::zlattice::{
    dot, lattice_basis, AmbientAbelianGroup, FiniteAbelianGroup, Int, IntegerMatrix, Quotient,
};

/// A log point with sharp fs monoid `P`; `excluded_primes` are the primes
/// not invertible in its residue field.
#[derive(Clone, Debug)]
pub struct LogPoint {
    sharp_monoid: AffineMonoid,
    excluded_primes: Vec<u64>,
    /// `P` inside `P^gp = Z^r`.
    tight: AffineMonoid,
}

impl LogPoint {
    pub fn new(sharp_monoid: AffineMonoid, mut excluded_primes: Vec<u64>) -> Result<Self> {
        if !sharp_monoid.is_sharp() || !sharp_monoid.is_saturated() {
            return Err(Error::Precondition(format!("{sharp_monoid} is not sharp fs")));
        }
        if let Some(p) = excluded_primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::InvalidInput(format!("excluded prime {p} is not prime")));
        }
        excluded_primes.sort_unstable();
        excluded_primes.dedup();
        let (tight, _) = sharp_monoid.tighten();
        debug_assert!(tight.ambient().is_torsion_free());
        Ok(LogPoint { sharp_monoid, excluded_primes, tight })
    }

    pub fn sharp_monoid(&self) -> &AffineMonoid {
        &self.sharp_monoid
    }

    pub fn excluded_primes(&self) -> &[u64] {
        &self.excluded_primes
    }

    pub fn rank(&self) -> usize {
        self.tight.ambient().free_rank()
    }

    fn check_level(&self, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidInput("level must be positive".into()));
        }
        if let Some(p) = self.excluded_primes.iter().find(|&&p| n.is_multiple_of(p)) {
            return Err(Error::Precondition(format!("level {n} is divisible by the excluded prime {p}")));
        }
        Ok(())
    }

    /// `P` in level-`n` coordinates, generated by `n·p`.
    pub fn base_at_level(&self, n: u64) -> AffineMonoid {
        let scale = Int::from(n);
        let gens = self.tight.generators().iter().map(|g| g.iter().map(|x| x * &scale).collect()).collect();
        AffineMonoid::new(self.tight.ambient().clone(), gens).expect("same ambient")
    }
}

/// `π_1` of a log point: `Hom(P^gp, Ẑ'(1))`, recorded by its rank and the
/// primes removed from `Ẑ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi1Descriptor {
    pub rank: usize,
    pub excluded_primes: Vec<u64>,
}

pub fn pi1_descriptor(pt: &LogPoint) -> Pi1Descriptor {
    Pi1Descriptor { rank: pt.rank(), excluded_primes: pt.excluded_primes.clone() }
}

/// The finite layer `P^{1/n}` of the divisible tower `P^{1/∞}`.
#[derive(Clone, Debug)]
pub struct TowerDescriptor {
    pub base: LogPoint,
    pub level: u64,
}

impl TowerDescriptor {
    pub fn new(base: LogPoint, level: u64) -> Result<Self> {
        base.check_level(level)?;
        Ok(TowerDescriptor { base, level })
    }

    /// `P ↪ P^{1/n}` in level-`n` coordinates.
    pub fn layer(&self) -> MonoidHom {
        let base = self.base.base_at_level(self.level);
        let top = self.base.tight.clone();
        MonoidHom::new_unchecked(base, top, IntegerMatrix::identity(self.base.rank()))
    }

    /// `P^{1/m} ⊆ P^{1/n}` exactly when `m | n`.
    pub fn is_contained_in(&self, other: &TowerDescriptor) -> bool {
        other.level.is_multiple_of(self.level)
    }
}

/// A connected cover `P → Q` with `P ⊆ Q ⊆ P^{1/n}`, in level-`n`
/// coordinates.
#[derive(Clone, Debug)]
pub struct CoverDescriptor {
    pub level: u64,
    /// HNF basis of the lattice `L = Q^gp`, with `n Z^r ⊆ L ⊆ Z^r`.
    pub lattice: Vec<Vec<Int>>,
    pub monoid: AffineMonoid,
    pub inclusion: MonoidHom,
    pub galois_group: FiniteAbelianGroup,
}

impl CoverDescriptor {
    /// The same cover described at a level `n` divisible by `self.level`.
    pub fn at_level(&self, pt: &LogPoint, n: u64) -> Result<CoverDescriptor> {
        if !n.is_multiple_of(self.level) {
            return Err(Error::Precondition(format!("level {} does not divide {n}", self.level)));
        }
        let k = Int::from(n / self.level);
        let rows: Vec<Vec<Int>> = self.lattice.iter().map(|r| r.iter().map(|x| x * &k).collect()).collect();
        cover_from_lattice(pt, n, &rows)
    }

    /// Sort key making cover lists deterministic.
    fn key(&self) -> (Int, Vec<Vec<Int>>) {
        (self.galois_group.order(), self.lattice.clone())
    }
}

/// All lattices `L` with `n Z^r ⊆ L ⊆ Z^r`, as row-style HNF bases.
pub fn intermediate_lattices(r: usize, n: u64) -> Vec<Vec<Vec<Int>>> {
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut out = Vec::new();
    let mut diag = vec![0u64; r];
    enumerate_diagonals(&divisors, 0, &mut diag, &mut |d| {
        // free entries above the diagonal: row i, column j > i, in [0, d_j)
        let slots: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
        let mut vals = vec![0u64; slots.len()];
        loop {
            let mut rows = vec![vec![Int::zero(); r]; r];
            for i in 0..r {
                rows[i][i] = Int::from(d[i]);
            }
            for (&(i, j), &v) in slots.iter().zip(&vals) {
                rows[i][j] = Int::from(v);
            }
            if contains_scaled_identity(&rows, n) {
                out.push(rows);
            }
            let mut k = 0;
            loop {
                if k == slots.len() {
                    return;
                }
                vals[k] += 1;
                if vals[k] < d[slots[k].1] {
                    break;
                }
                vals[k] = 0;
                k += 1;
            }
        }
    });
    out
}

fn enumerate_diagonals(divisors: &[u64], i: usize, diag: &mut Vec<u64>, f: &mut dyn FnMut(&[u64])) {
    if i == diag.len() {
        f(diag);
        return;
    }
    for &d in divisors {
        diag[i] = d;
        enumerate_diagonals(divisors, i + 1, diag, f);
    }
}

/// Whether `n e_k` lies in the lattice with upper-triangular basis `rows`.
fn contains_scaled_identity(rows: &[Vec<Int>], n: u64) -> bool {
    let r = rows.len();
    (0..r).all(|k| {
        let mut rest = vec![Int::zero(); r];
        rest[k] = Int::from(n);
        for (i, row) in rows.iter().enumerate() {
            let (q, rem) = rest[i].div_rem(&row[i]);
            if !rem.is_zero() {
                return false;
            }
            for (x, b) in rest.iter_mut().zip(row) {
                *x -= &q * b;
            }
        }
        true
    })
}

fn cover_from_lattice(pt: &LogPoint, n: u64, rows: &[Vec<Int>]) -> Result<CoverDescriptor> {
    let r = pt.rank();
    let lattice = lattice_basis(rows, r);
    let base = pt.base_at_level(n);
    // lattice basis vectors pushed into the interior of the cone
    let interior: Vec<Int> = base
        .generators()
        .iter()
        .fold(vec![Int::zero(); r], |acc, g| acc.iter().zip(g).map(|(a, b)| a + b).collect());
    let facets = pt.tight.facets();
    let mut gens = base.generators().to_vec();
    for b in &lattice {
        let mut k = Int::zero();
        for f in facets {
            let fb = dot(f, b);
            if fb.is_negative() {
                let need = (-fb).div_ceil(&dot(f, &interior));
                if need > k {
                    k = need;
                }
            }
        }
        gens.push(b.iter().zip(&interior).map(|(x, w)| x + &k * w).collect());
    }
    let monoid = AffineMonoid::new(AmbientAbelianGroup::free(r), gens)?.saturate();
    let inclusion = MonoidHom::new_unchecked(base, monoid.clone(), IntegerMatrix::identity(r));
    let verdict = is_kummer(&inclusion)?;
    let galois_group = match (verdict.kummer, verdict.galois_group) {
        (true, Some(g)) => g,
        _ => return Err(Error::Diagnostic(format!("cover {monoid} is not Kummer over the base"))),
    };
    Ok(CoverDescriptor { level: n, lattice, monoid, inclusion, galois_group })
}

/// One connected cover per subgroup of `(P^{1/n})^gp / P^gp ≅ (Z/n)^r`.
pub fn classify_covers(pt: &LogPoint, n: u64) -> Result<Vec<CoverDescriptor>> {
    pt.check_level(n)?;
    let mut covers = intermediate_lattices(pt.rank(), n)
        .iter()
        .map(|rows| cover_from_lattice(pt, n, rows))
        .collect::<Result<Vec<_>>>()?;
    covers.sort_by_key(|c| c.key());
    Ok(covers)
}

fn common_level(pt: &LogPoint, a: &CoverDescriptor, b: &CoverDescriptor) -> Result<(CoverDescriptor, CoverDescriptor)> {
    if a.monoid.ambient().dim() != pt.rank() || b.monoid.ambient().dim() != pt.rank() {
        return Err(Error::Precondition("covers are not over this log point".into()));
    }
    let n = a.level.lcm(&b.level);
    Ok((a.at_level(pt, n)?, b.at_level(pt, n)?))
}

/// `|Hom(ξ_{Q1}, ξ_{Q2})|`: zero unless `Q2 ⊆ Q1`, else `|Q2^gp / P^gp|`.
pub fn hom_count(pt: &LogPoint, q1: &CoverDescriptor, q2: &CoverDescriptor) -> Result<Int> {
    let (q1, q2) = common_level(pt, q1, q2)?;
    if q2.monoid.generators().iter().all(|g| q1.monoid.contains(g)) {
        Ok(q2.galois_group.order())
    } else {
        Ok(Int::zero())
    }
}

/// A finite set with an action of `(Z/N)^r`, one permutation per standard
/// generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantFiniteSet {
    pub level: u64,
    /// Each element is a character `G → Z/N`, stored by its values on the
    /// generators of `G`.
    pub elements: Vec<Vec<u64>>,
    pub action: Vec<Vec<usize>>,
}

impl EquivariantFiniteSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() <= 1
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let mut orbit = vec![s];
            seen[s] = true;
            let mut k = 0;
            while k < orbit.len() {
                let x = orbit[k];
                for perm in &self.action {
                    let y = perm[x];
                    if !seen[y] {
                        seen[y] = true;
                        orbit.push(y);
                    }
                }
                k += 1;
            }
            out.push(orbit);
        }
        out
    }
}

/// `Hom(Q^gp/P^gp, Z/N)` with `π_1` acting through the pairing
/// `⟨s, x⟩ = Σ s_i x_i N/n`.
pub fn fiber_functor(pt: &LogPoint, q: &CoverDescriptor, level: u64) -> Result<EquivariantFiniteSet> {
    let exponent = q.galois_group.exponent().to_u64().expect("small exponent");
    if level == 0 || !level.is_multiple_of(exponent) {
        return Err(Error::Precondition(format!("level {level} is not a multiple of the exponent {exponent}")));
    }
    let r = pt.rank();
    let n = Int::from(q.level);
    let big_n = Int::from(level);
    // G = L / n Z^r in lattice coordinates of L
    let l = IntegerMatrix::from_rows(q.lattice.clone(), r);
    let scaled: Vec<Vec<Int>> = (0..r)
        .map(|k| {
            let mut v = vec![Int::zero(); r];
            v[k] = n.clone();
            crate::zlattice::solve_integer(&l.transpose(), &v).expect("n Z^r ⊆ L")
        })
        .collect();
    let quo = Quotient::of(&IntegerMatrix::from_columns(&scaled, r));
    let g = &quo.group;
    debug_assert!(g.free_rank() == 0);
    let orders: Vec<u64> = g.torsion().iter().map(|d| d.to_u64().unwrap()).collect();
    // generator t of G as a vector of Z^r: lift to lattice coordinates, then to Z^r
    let gen_vectors: Vec<Vec<Int>> = (0..orders.len())
        .map(|t| {
            let coords = quo.lift.column(t);
            l.transpose().mul_vec(&coords)
        })
        .collect();
    // characters: values c_t ∈ (N/d_t)·Z/N
    let mut elements = Vec::new();
    let mut counter = vec![0u64; orders.len()];
    loop {
        elements.push(counter.iter().zip(&orders).map(|(c, d)| c * (level / d)).collect::<Vec<u64>>());
        let mut i = 0;
        loop {
            if i == orders.len() {
                break;
            }
            counter[i] += 1;
            if counter[i] < orders[i] {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
        if i == orders.len() {
            break;
        }
    }
    let index: HashMap<Vec<u64>, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let action = (0..r)
        .map(|k| {
            let shift: Vec<u64> = gen_vectors
                .iter()
                .map(|v| {
                    let (q, rem) = (&v[k] * &big_n).div_rem(&n);
                    assert!(rem.is_zero(), "pairing is integral once the level kills G");
                    q.mod_floor(&big_n).to_u64().unwrap()
                })
                .collect();
            elements
                .iter()
                .map(|e| {
                    let moved: Vec<u64> = e.iter().zip(&shift).map(|(a, b)| (a + b) % level).collect();
                    index[&moved]
                })
                .collect()
        })
        .collect();
    Ok(EquivariantFiniteSet { level, elements, action })
}

/// Number of maps `X → Y` commuting with every generator of the action,
/// found by fixing the image of one point per orbit and propagating.
pub fn equivariant_map_count(x: &EquivariantFiniteSet, y: &EquivariantFiniteSet) -> u64 {
    assert_eq!(x.action.len(), y.action.len(), "actions of different groups");
    let mut total = 1u64;
    for orbit in x.orbits() {
        let seed = orbit[0];
        let mut count = 0u64;
        for target in 0..y.len() {
            let mut image: Vec<Option<usize>> = vec![None; x.len()];
            image[seed] = Some(target);
            let mut stack = vec![seed];
            let mut ok = true;
            while let Some(p) = stack.pop() {
                let fp = image[p].unwrap();
                for (px, py) in x.action.iter().zip(&y.action) {
                    let (q, fq) = (px[p], py[fp]);
                    match image[q] {
                        None => {
                            image[q] = Some(fq);
                            stack.push(q);
                        }
                        Some(v) if v != fq => ok = false,
                        _ => {}
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok {
                count += 1;
            }
        }
        total *= count;
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCheck {
    pub left: usize,
    pub right: usize,
    pub hom_count: Int,
    pub equivariant_maps: u64,
    pub matches: bool,
}

#[derive(Clone, Debug)]
pub struct CorrespondenceReport {
    pub level: u64,
    pub covers: Vec<CoverDescriptor>,
    pub pairs: Vec<PairCheck>,
    pub passed: bool,
}

/// Compares `hom_count` with equivariant maps between fibers for every
/// ordered pair of covers at level `n`.
pub fn galois_correspondence_check(pt: &LogPoint, n: u64) -> Result<CorrespondenceReport> {
    let covers = classify_covers(pt, n)?;
    let fibers = covers.iter().map(|c| fiber_functor(pt, c, n)).collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for (i, a) in covers.iter().enumerate() {
        for (j, b) in covers.iter().enumerate() {
            let h = hom_count(pt, a, b)?;
            let e = equivariant_map_count(&fibers[i], &fibers[j]);
            pairs.push(PairCheck { left: i, right: j, matches: h == Int::from(e), hom_count: h, equivariant_maps: e });
        }
    }
    let passed = pairs.iter().all(|p| p.matches);
    Ok(CorrespondenceReport { level: n, covers, pairs, passed })
}

/// `N` as a log point with residue characteristic 0.
pub fn standard_point(r: usize) -> LogPoint {
    LogPoint::new(AffineMonoid::free(r), Vec::new()).expect("N^r is sharp fs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zlattice::int;

    fn half_line(pt: &LogPoint, n: u64, lattice: &[&[i64]]) -> CoverDescriptor {
        let rows: Vec<Vec<Int>> = lattice.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        cover_from_lattice(pt, n, &rows).unwrap()
    }

    #[test]
    fn pi1_examples() {
        assert_eq!(pi1_descriptor(&standard_point(1)).rank, 1);
        assert_eq!(pi1_descriptor(&standard_point(3)).rank, 3);
        let p = AffineMonoid::from_i64(2, &[&[1, 0], &[1, 1], &[1, 2]]).unwrap();
        assert_eq!(pi1_descriptor(&LogPoint::new(p, vec![]).unwrap()).rank, 2);
    }

    #[test]
    fn cover_counts() {
        assert_eq!(classify_covers(&standard_point(1), 2).unwrap().len(), 2);
        assert_eq!(classify_covers(&standard_point(2), 2).unwrap().len(), 5);
        assert_eq!(classify_covers(&standard_point(1), 6).unwrap().len(), 4);
    }

    #[test]
    fn excluded_primes_block_levels() {
        let pt = LogPoint::new(AffineMonoid::free(1), vec![3]).unwrap();
        assert!(classify_covers(&pt, 6).is_err());
        assert_eq!(classify_covers(&pt, 4).unwrap().len(), 3);
    }

    #[test]
    fn hom_count_examples() {
        let pt = standard_point(1);
        let half = half_line(&pt, 2, &[&[1]]);
        let base = half_line(&pt, 2, &[&[2]]);
        assert_eq!(hom_count(&pt, &half, &half).unwrap(), int(2));
        assert_eq!(hom_count(&pt, &base, &half).unwrap(), int(0));
        let sixth = half_line(&pt, 6, &[&[1]]);
        assert_eq!(hom_count(&pt, &sixth, &half).unwrap(), int(2));
    }

    #[test]
    fn fiber_functor_examples() {
        let pt = standard_point(1);
        let f = fiber_functor(&pt, &half_line(&pt, 2, &[&[1]]), 2).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.is_transitive());
        let f = fiber_functor(&pt, &half_line(&pt, 2, &[&[2]]), 5).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.action, vec![vec![0]]);

        let pt2 = standard_point(2);
        let f = fiber_functor(&pt2, &half_line(&pt2, 2, &[&[1, 0], &[0, 2]]), 2).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.action[0], vec![1, 0]);
        assert_eq!(f.action[1], vec![0, 1]);
    }

    #[test]
    fn fiber_functor_rejects_small_level() {
        let pt = standard_point(1);
        assert!(fiber_functor(&pt, &half_line(&pt, 6, &[&[1]]), 4).is_err());
    }

    #[test]
    fn correspondence_examples() {
        let r = galois_correspondence_check(&standard_point(1), 2).unwrap();
        assert!(r.passed);
        assert_eq!(r.pairs.len(), 4);
        let r = galois_correspondence_check(&standard_point(2), 2).unwrap();
        assert!(r.passed);
        assert_eq!(r.pairs.len(), 25);
        let trivial = LogPoint::new(AffineMonoid::free(0), vec![]).unwrap();
        let r = galois_correspondence_check(&trivial, 5).unwrap();
        assert_eq!(r.pairs.len(), 1);
        assert!(r.passed);
    }

    #[test]
    fn tower_layers_nest() {
        let pt = standard_point(2);
        let small = TowerDescriptor::new(pt.clone(), 2).unwrap();
        let big = TowerDescriptor::new(pt.clone(), 6).unwrap();
        assert!(small.is_contained_in(&big));
        assert!(!big.is_contained_in(&small));
        assert!(is_kummer(&big.layer()).unwrap().kummer);
    }
}
