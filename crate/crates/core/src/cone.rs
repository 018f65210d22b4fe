//! Rational polyhedral cones in `Q^d` with the lattice `Z^d`.
//!
//! Facets come from enumerating hyperplanes spanned by generator subsets,
//! Hilbert bases from a pulling triangulation whose simplicial pieces have
//! their fundamental parallelepipeds enumerated and globally reduced.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::zlattice::{dot, is_zero_vec, kernel_basis, primitive, smith_normal_form, Int, IntegerMatrix, Quotient};

/// `{c : v·c ≥ 0 for every input v}` as rays plus a lineality basis.
#[derive(Clone, Debug, Default)]
pub struct Polar {
    pub rays: Vec<Vec<Int>>,
    pub lineality: Vec<Vec<Int>>,
}

/// Subsets of `0..n` of size `k` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub(crate) fn rank_of(vectors: &[Vec<Int>], d: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    IntegerMatrix::from_rows(vectors.to_vec(), d).rank()
}

/// Dual description of the cone polar to `cone(vectors)`.
///
/// For a full-dimensional cone the rays are exactly its primitive inward
/// facet normals; otherwise the lineality part lists the implicit equations.
pub fn polar(vectors: &[Vec<Int>], d: usize) -> Polar {
    let vs: Vec<Vec<Int>> = vectors.iter().filter(|v| !is_zero_vec(v)).cloned().collect();
    let lineality = if vs.is_empty() {
        (0..d).map(|i| unit(d, i)).collect()
    } else {
        kernel_basis(&IntegerMatrix::from_rows(vs.clone(), d))
    };
    let w = d - lineality.len();
    let mut rays = Vec::new();
    if w == 0 {
        return Polar { rays, lineality };
    }
    let mut seen = HashSet::new();
    for subset in combinations(vs.len(), w - 1) {
        let mut rows: Vec<Vec<Int>> = subset.iter().map(|&i| vs[i].clone()).collect();
        rows.extend(lineality.iter().cloned());
        let ker = if rows.is_empty() {
            (0..d).map(|i| unit(d, i)).collect()
        } else {
            kernel_basis(&IntegerMatrix::from_rows(rows, d))
        };
        if ker.len() != 1 {
            continue;
        }
        let c = &ker[0];
        let mut pos = false;
        let mut neg = false;
        for v in &vs {
            let s = dot(v, c);
            if s.is_positive() {
                pos = true;
            } else if s.is_negative() {
                neg = true;
            }
            if pos && neg {
                break;
            }
        }
        if pos && neg {
            continue;
        }
        let ray = if neg { c.iter().map(|x| -x).collect() } else { c.clone() };
        let ray = primitive(&ray);
        if seen.insert(ray.clone()) {
            rays.push(ray);
        }
    }
    Polar { rays, lineality }
}

fn unit(d: usize, i: usize) -> Vec<Int> {
    let mut v = vec![Int::zero(); d];
    v[i] = Int::one();
    v
}

pub(crate) fn facet_values(facets: &[Vec<Int>], x: &[Int]) -> Vec<Int> {
    facets.iter().map(|f| dot(f, x)).collect()
}

/// Coordinates (column indices) on which projecting the span of `vectors`
/// is injective.
fn injective_coordinates(vectors: &[Vec<Int>], d: usize) -> Vec<usize> {
    let target = rank_of(vectors, d);
    let mut chosen: Vec<usize> = Vec::new();
    for c in 0..d {
        if chosen.len() == target {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(c);
        let proj: Vec<Vec<Int>> = vectors.iter().map(|v| trial.iter().map(|&i| v[i].clone()).collect()).collect();
        if rank_of(&proj, trial.len()) == trial.len() {
            chosen = trial;
        }
    }
    chosen
}

/// Pulling triangulation of a pointed cone given by its extreme rays.
///
/// Returns index sets of linearly independent rays whose simplicial cones
/// cover the cone.
pub fn triangulate(rays: &[Vec<Int>]) -> Vec<Vec<usize>> {
    if rays.is_empty() {
        return Vec::new();
    }
    let d = rays[0].len();
    triangulate_subset(rays, (0..rays.len()).collect(), d)
}

fn triangulate_subset(rays: &[Vec<Int>], idx: Vec<usize>, d: usize) -> Vec<Vec<usize>> {
    let members: Vec<Vec<Int>> = idx.iter().map(|&i| rays[i].clone()).collect();
    let k = rank_of(&members, d);
    if idx.len() == k {
        return vec![idx];
    }
    let coords = injective_coordinates(&members, d);
    let proj: Vec<Vec<Int>> = members.iter().map(|v| coords.iter().map(|&i| v[i].clone()).collect()).collect();
    let facets = polar(&proj, k).rays;
    let apex = &proj[0];
    let mut out = Vec::new();
    for f in &facets {
        if !dot(f, apex).is_positive() {
            continue;
        }
        let sub: Vec<usize> = idx
            .iter()
            .zip(&proj)
            .filter(|(_, p)| dot(f, p).is_zero())
            .map(|(&i, _)| i)
            .collect();
        for mut s in triangulate_subset(rays, sub, d) {
            s.push(idx[0]);
            out.push(s);
        }
    }
    out
}

/// Lattice points `Σ λ_i v_i` with `0 ≤ λ_i < 1` for linearly independent
/// columns `v_i` spanning `Q^d`. Includes the origin.
pub fn parallelepiped_points(rays: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let d = rays.len();
    let v = IntegerMatrix::from_columns(rays, d);
    let snf = smith_normal_form(&v);
    assert_eq!(snf.rank, d, "simplicial cone rays must be independent");
    let det: Int = snf.invariant_factors.iter().product();
    // |det| · V^{-1} = W · diag(|det| / D_i) · U; only W · diag(...) is needed
    // because coset representatives are enumerated in U-coordinates.
    let scaled: Vec<Int> = snf.invariant_factors.iter().map(|f| &det / f).collect();
    let mut out = Vec::new();
    let mut counter = vec![Int::zero(); d];
    loop {
        let e: Vec<Int> = counter.iter().zip(&scaled).map(|(c, s)| c * s).collect();
        let lambda = snf.v.mul_vec(&e);
        let mut p = vec![Int::zero(); d];
        for (l, ray) in lambda.iter().zip(rays) {
            let frac = l.mod_floor(&det);
            if frac.is_zero() {
                continue;
            }
            for (x, r) in p.iter_mut().zip(ray) {
                *x += &frac * r;
            }
        }
        for x in p.iter_mut() {
            *x = &*x / &det;
        }
        out.push(p);
        // advance the mixed-radix counter over Π [0, D_i)
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            counter[i] += 1;
            if counter[i] < snf.invariant_factors[i] {
                break;
            }
            counter[i] = Int::zero();
            i += 1;
        }
    }
}

/// Saturated monoid `cone(generators) ∩ Z^d` for a full-dimensional cone.
#[derive(Clone, Debug)]
pub struct SaturatedCone {
    /// Primitive inward facet normals.
    pub facets: Vec<Vec<Int>>,
    /// Basis (HNF) of the unit lattice `Z^d ∩ lineality`.
    pub units: Vec<Vec<Int>>,
    /// Hilbert basis of the sharp part, lifted to `Z^d`.
    pub hilbert_basis: Vec<Vec<Int>>,
}

pub fn saturated_cone(generators: &[Vec<Int>], d: usize) -> SaturatedCone {
    let gens: Vec<Vec<Int>> = generators.iter().filter(|g| !is_zero_vec(g)).cloned().collect();
    let pol = polar(&gens, d);
    assert!(pol.lineality.is_empty() || d == 0, "cone must be full-dimensional");
    let facets = pol.rays;
    if d == 0 {
        return SaturatedCone { facets, units: Vec::new(), hilbert_basis: Vec::new() };
    }
    let units = if facets.is_empty() {
        (0..d).map(|i| unit(d, i)).collect()
    } else {
        kernel_basis(&IntegerMatrix::from_rows(facets.clone(), d))
    };
    if units.len() == d {
        return SaturatedCone { facets, units, hilbert_basis: Vec::new() };
    }
    if units.is_empty() {
        let hb = pointed_hilbert_basis(&gens, &facets, d);
        return SaturatedCone { facets, units, hilbert_basis: hb };
    }
    let q = Quotient::of(&IntegerMatrix::from_columns(&units, d));
    debug_assert!(q.group.is_torsion_free());
    let e = q.group.free_rank();
    let projected: Vec<Vec<Int>> =
        gens.iter().map(|g| q.project(g)).filter(|g| !is_zero_vec(g)).collect();
    let pfacets = polar(&projected, e).rays;
    let hb = pointed_hilbert_basis(&projected, &pfacets, e)
        .into_iter()
        .map(|h| q.lift.mul_vec(&h))
        .collect();
    SaturatedCone { facets, units, hilbert_basis: hb }
}

/// Extreme rays (primitive) of a pointed full-dimensional cone.
pub fn extreme_rays(generators: &[Vec<Int>], facets: &[Vec<Int>], d: usize) -> Vec<Vec<Int>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in generators {
        if is_zero_vec(g) {
            continue;
        }
        let tight: Vec<Vec<Int>> = facets.iter().filter(|f| dot(f, g).is_zero()).cloned().collect();
        if rank_of(&tight, d) + 1 == d {
            let r = primitive(g);
            if seen.insert(r.clone()) {
                out.push(r);
            }
        }
    }
    out
}

fn pointed_hilbert_basis(gens: &[Vec<Int>], facets: &[Vec<Int>], d: usize) -> Vec<Vec<Int>> {
    let rays = extreme_rays(gens, facets, d);
    let mut seen: HashSet<Vec<Int>> = HashSet::new();
    let mut candidates = Vec::new();
    for r in &rays {
        if seen.insert(r.clone()) {
            candidates.push(r.clone());
        }
    }
    for simplex in triangulate(&rays) {
        let cols: Vec<Vec<Int>> = simplex.iter().map(|&i| rays[i].clone()).collect();
        for p in parallelepiped_points(&cols) {
            if !is_zero_vec(&p) && seen.insert(p.clone()) {
                candidates.push(p);
            }
        }
    }
    reduce_candidates(candidates, facets)
}

/// Irreducible elements of the monoid generated by `candidates` inside a
/// pointed cone, assuming the candidates generate its lattice points.
pub fn reduce_candidates(candidates: Vec<Vec<Int>>, facets: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let mut graded: Vec<(Vec<Int>, Int, Vec<Int>)> = candidates
        .into_iter()
        .map(|c| {
            let vals = facet_values(facets, &c);
            let deg: Int = vals.iter().sum();
            (vals, deg, c)
        })
        .collect();
    graded.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.2.cmp(&b.2)));
    let mut basis: Vec<(Vec<Int>, Int, Vec<Int>)> = Vec::new();
    for (vals, deg, c) in graded {
        let reducible = basis
            .iter()
            .any(|(bv, bd, _)| *bd < deg && bv.iter().zip(&vals).all(|(b, v)| b <= v));
        if !reducible {
            basis.push((vals, deg, c));
        }
    }
    basis.into_iter().map(|(_, _, c)| c).collect()
}

/// A non-negative rational combination of `vectors` equal to `target`, found
/// among linearly independent subsets (Carathéodory). `None` if `target` is
/// outside the cone.
pub fn nonneg_combination(target: &[Int], vectors: &[Vec<Int>]) -> Option<Vec<BigRational>> {
    let d = target.len();
    let n = vectors.len();
    if is_zero_vec(target) {
        return Some(vec![BigRational::zero(); n]);
    }
    let r = rank_of(vectors, d);
    for subset in combinations(n, r) {
        let cols: Vec<Vec<Int>> = subset.iter().map(|&i| vectors[i].clone()).collect();
        if rank_of(&cols, d) != r {
            continue;
        }
        if let Some(lambda) = rational_solve(&cols, target) {
            if lambda.iter().all(|l| !l.is_negative()) {
                let mut out = vec![BigRational::zero(); n];
                for (&i, l) in subset.iter().zip(lambda) {
                    out[i] = l;
                }
                return Some(out);
            }
        }
    }
    None
}

/// Solves `Σ λ_i cols_i = target` over Q for independent columns.
pub(crate) fn rational_solve(cols: &[Vec<Int>], target: &[Int]) -> Option<Vec<BigRational>> {
    let d = target.len();
    let k = cols.len();
    // augmented system, Gaussian elimination over Q
    let mut m: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| BigRational::from_integer(c[i].clone())).collect();
            row.push(BigRational::from_integer(target[i].clone()));
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for c in 0..k {
        let p = (pivot_row..d).find(|&r| !m[r][c].is_zero())?;
        m.swap(pivot_row, p);
        let inv = m[pivot_row][c].recip();
        for x in m[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..d {
            if r != pivot_row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in 0..=k {
                    let t = &m[pivot_row][j] * &f;
                    m[r][j] -= t;
                }
            }
        }
        pivots.push(c);
        pivot_row += 1;
    }
    if (pivot_row..d).any(|r| !m[r][k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| m[i][k].clone()).collect())
}

/// Least common multiple of the denominators.
pub(crate) fn common_denominator(values: &[BigRational]) -> BigInt {
    values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zlattice::int_vec;

    fn vs(rows: &[&[i64]]) -> Vec<Vec<Int>> {
        rows.iter().map(|r| int_vec(r)).collect()
    }

    #[test]
    fn combinations_enumerate_all() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn facets_of_cone_over_square() {
        let gens = vs(&[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1], &[1, 1, 1]]);
        let p = polar(&gens, 3);
        assert_eq!(p.rays.len(), 4);
        assert!(p.lineality.is_empty());
    }

    #[test]
    fn facets_of_half_plane_and_line() {
        let p = polar(&vs(&[&[1, 0], &[-1, 0], &[0, 1]]), 2);
        assert_eq!(p.rays, vs(&[&[0, 1]]));
        let p = polar(&vs(&[&[1, 0], &[-1, 0]]), 2);
        assert!(p.rays.is_empty());
        assert_eq!(p.lineality.len(), 1);
    }

    #[test]
    fn parallelepiped_of_rays_2_1() {
        // cone((1,0),(1,2)) in Z^2: determinant 2, interior point (1,1)
        let pts = parallelepiped_points(&vs(&[&[1, 0], &[1, 2]]));
        let set: HashSet<_> = pts.into_iter().collect();
        assert_eq!(set, vs(&[&[0, 0], &[1, 1]]).into_iter().collect());
    }

    #[test]
    fn hilbert_basis_of_numerical_and_planar_cones() {
        let s = saturated_cone(&vs(&[&[2], &[3]]), 1);
        assert_eq!(s.hilbert_basis, vs(&[&[1]]));
        let s = saturated_cone(&vs(&[&[1, 0], &[1, 3]]), 2);
        let hb: HashSet<_> = s.hilbert_basis.into_iter().collect();
        assert_eq!(hb, vs(&[&[1, 0], &[1, 1], &[1, 2], &[1, 3]]).into_iter().collect());
    }

    #[test]
    fn hilbert_basis_with_lineality() {
        let s = saturated_cone(&vs(&[&[1, 1], &[-1, -1], &[1, 0]]), 2);
        assert_eq!(s.units.len(), 1);
        assert_eq!(s.hilbert_basis.len(), 1);
    }

    #[test]
    fn triangulation_of_square_cone_has_two_simplices() {
        let rays = vs(&[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1], &[1, 1, 1]]);
        let t = triangulate(&rays);
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|s| s.len() == 3));
    }

    #[test]
    fn caratheodory_combination() {
        let v = vs(&[&[1, 0], &[0, 1], &[1, 1]]);
        let c = nonneg_combination(&int_vec(&[2, 3]), &v).unwrap();
        let sum: Vec<BigRational> = (0..2)
            .map(|i| c.iter().zip(&v).map(|(l, g)| l * BigRational::from_integer(g[i].clone())).sum())
            .collect();
        assert_eq!(sum, vec![BigRational::from_integer(int_vec(&[2])[0].clone()), BigRational::from_integer(int_vec(&[3])[0].clone())]);
        assert!(nonneg_combination(&int_vec(&[-1, 0]), &v).is_none());
    }
}
