use std::collections::BTreeSet;

use logchart::cohomology::{
    finite_group_cohomology, koszul_cohomology, rank_mod, smallest_prime_one_mod, CechData, CharacterDatum, ModMatrix,
};
use logchart::covers::{
    classify_covers, equivariant_map_count, fiber_functor, hom_count, standard_point, LogPoint,
};
use logchart::monoid::{exact_embedding, integralize, splitting_section, AffineMonoid, MonoidPresentation};
use logchart::morphism::{
    abhyankar_index, chart_classification, is_exact, is_kummer, pushout, ramification_index,
    self_product_decomposition, MonoidHom,
};
use logchart::verify::{catalog, non_simplicial_monoid};
use logchart::zlattice::{
    smith_normal_form, solve_integer, sublattice_saturation, AmbientAbelianGroup, FiniteAbelianGroup, Int,
    IntegerMatrix,
};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn matrix(rows: &[Vec<i64>], cols: usize) -> IntegerMatrix {
    IntegerMatrix::from_rows(rows.iter().map(|r| ints(r)).collect(), cols)
}

fn small_matrix(max_dim: usize, entry: i64) -> impl Strategy<Value = (Vec<Vec<i64>>, usize)> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(m, n)| {
        (prop::collection::vec(prop::collection::vec(-entry..=entry, n), m), Just(n))
    })
}

/// Non-negative generators, so the monoid is sharp.
fn sharp_generators(max_rank: usize, max_gens: usize, max_coord: i64) -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1..=max_rank).prop_flat_map(move |r| {
        let v = prop::collection::vec(0..=max_coord, r).prop_filter("nonzero", |v| v.iter().any(|&x| x != 0));
        (Just(r), prop::collection::vec(v, 1..=max_gens))
    })
}

fn monoid(r: usize, gens: &[Vec<i64>]) -> AffineMonoid {
    AffineMonoid::new(AmbientAbelianGroup::free(r), gens.iter().map(|g| ints(g)).collect()).unwrap()
}

fn box_points(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| (-radius..=radius).map(move |x| [v.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

// zlattice

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn snf_is_a_unimodular_diagonalization((rows, n) in small_matrix(5, 10)) {
        let a = matrix(&rows, n);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert!(s.u.determinant().abs().is_one());
        prop_assert!(s.v.determinant().abs().is_one());
        for w in s.invariant_factors.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
    }

    #[test]
    fn solve_integer_is_sound_and_complete_on_a_box(
        rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 2), 2),
        b in prop::collection::vec(-6i64..=6, 2),
    ) {
        let a = matrix(&rows, 2);
        let b = ints(&b);
        match solve_integer(&a, &b) {
            Some(x) => prop_assert_eq!(a.mul_vec(&x), b),
            None => {
                for x in box_points(2, 12) {
                    prop_assert_ne!(a.mul_vec(&ints(&x)), b.clone());
                }
            }
        }
    }

    #[test]
    fn sublattice_saturation_is_idempotent(gens in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 1..4)) {
        let gens: Vec<Vec<Int>> = gens.iter().map(|g| ints(g)).collect();
        let sat = sublattice_saturation(&gens, 3);
        let twice = sublattice_saturation(&sat, 3);
        prop_assert_eq!(&twice, &sat);
        let basis = IntegerMatrix::from_columns(&sat, 3);
        for g in &gens {
            prop_assert!(sat.is_empty() && g.iter().all(Zero::is_zero) || solve_integer(&basis, g).is_some());
        }
    }
}

// monoid

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn saturation_is_idempotent_and_contains_m((r, gens) in sharp_generators(3, 4, 4)) {
        let m = monoid(r, &gens);
        let s = m.saturate();
        prop_assert_eq!(&s.saturate(), &s);
        for g in m.generators() {
            prop_assert!(s.contains(g));
        }
        // every Hilbert basis element has a small multiple in M
        for h in s.generators() {
            let found = (1..=64).any(|k| m.contains(&h.iter().map(|x| x * Int::from(k)).collect::<Vec<_>>()));
            prop_assert!(found, "no multiple of {:?} in {}", h, m);
        }
    }

    #[test]
    fn fs_iff_saturation_is_the_identity((r, gens) in sharp_generators(3, 4, 3)) {
        let m = monoid(r, &gens);
        prop_assert_eq!(m.classify().fs, m.saturate() == m);
    }

    #[test]
    fn exact_embedding_cuts_out_p((r, gens) in sharp_generators(2, 4, 3)) {
        let p = monoid(r, &gens).saturate().tighten().0;
        let phi = exact_embedding(&p).unwrap();
        let dim = p.ambient().dim();
        for x in box_points(dim, 4) {
            let x = ints(&x);
            let img = phi.apply(&x);
            prop_assert_eq!(img.iter().all(|v| !v.is_negative()), p.contains(&x), "at {:?}", x);
        }
    }

    #[test]
    fn splitting_section_is_a_right_inverse((r, gens) in sharp_generators(2, 4, 3)) {
        // M = P ⊕ Z with f the projection onto P
        let p = monoid(r, &gens).saturate().tighten().0;
        let rp = p.ambient().dim();
        let mut mgens: Vec<Vec<Int>> = p.generators().iter().map(|g| [g.clone(), vec![Int::zero()]].concat()).collect();
        let mut e = vec![Int::zero(); rp + 1];
        e[rp] = Int::one();
        mgens.push(e.clone());
        mgens.push(e.iter().map(|x| -x).collect());
        let m = AffineMonoid::new(AmbientAbelianGroup::free(rp + 1), mgens).unwrap();
        let proj = IntegerMatrix::from_rows(
            (0..rp).map(|i| (0..=rp).map(|j| Int::from(i64::from(i == j))).collect()).collect(),
            rp + 1,
        );
        let f = MonoidHom::new(m, p.clone(), proj).unwrap();
        let s = splitting_section(&f).unwrap();
        for g in p.generators() {
            prop_assert_eq!(&f.apply(&s.apply(g)), g);
        }
    }

    #[test]
    fn saturated_integralization_matches_box_oracle(
        a in 1u64..=3, b in 1u64..=3, c in 0u64..=2, d in 0u64..=2,
    ) {
        // one relation x^a y^c = x^d y^b on two generators
        let p = MonoidPresentation::new(2, vec![(vec![a, c], vec![d, b])]).unwrap();
        let m = integralize(&p);
        let s = m.saturate();
        let amb = m.ambient().clone();
        let group = m.group();
        for x in box_points(amb.free_rank(), 3) {
            let mut x = ints(&x);
            x.resize(amb.dim(), Int::zero());
            let x = amb.reduced(x);
            if !group.contains(&x) {
                continue;
            }
            let oracle = (1..=24).any(|k| m.contains(&amb.scale(&Int::from(k), &x)));
            prop_assert_eq!(s.contains(&x), oracle, "at {:?}", x);
        }
    }
}

// morphism

fn nonneg_square(r: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(0i64..=3, r), r)
}

fn free_map(rows: &[Vec<i64>]) -> MonoidHom {
    let r = rows.len();
    MonoidHom::new(AffineMonoid::free(r), AffineMonoid::free(r), matrix(rows, r)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chart_conditions_are_monotone(rows in (1usize..=3).prop_flat_map(nonneg_square), p in prop::sample::select(vec![0u64, 2, 3, 5])) {
        let u = free_map(&rows);
        let c = chart_classification(&u, p).unwrap();
        prop_assert!(!c.kummer_etale || c.log_etale);
        prop_assert!(!c.log_etale || c.log_smooth);
    }

    #[test]
    fn kummer_iff_exact_for_finite_coprime_cokernel(rows in (1usize..=3).prop_flat_map(nonneg_square)) {
        let u = free_map(&rows);
        let (kernel, coker) = u.gp_kernel_cokernel();
        prop_assume!(kernel.is_trivial());
        let Some(g) = coker.to_finite() else { return Ok(()) };
        prop_assume!(g.order().is_odd());
        prop_assert_eq!(is_kummer(&u).unwrap().kummer, is_exact(&u).unwrap().exact);
    }

    #[test]
    fn ramification_one_iff_trivial_kernel_and_cokernel(diag in prop::collection::vec(1i64..=4, 1..=3)) {
        let r = diag.len();
        let rows: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| if i == j { diag[i] } else { 0 }).collect()).collect();
        let u = free_map(&rows);
        let e = ramification_index(&u).unwrap();
        let (k, c) = u.gp_kernel_cokernel();
        prop_assert_eq!(e.is_one(), k.is_trivial() && c.is_trivial());
        prop_assert_eq!(e, diag.iter().fold(Int::one(), |acc, &d| acc.lcm(&Int::from(d))));
    }

    #[test]
    fn pushout_factorization_is_unique(a in 1i64..=4, b in 1i64..=4, t in 1i64..=3) {
        // P = N into Q = N by [a] and R = N by [b]; test maps Q → Z by [t b'], R → Z by [t a']
        let g = a.gcd(&b);
        let (ca, cb) = (t * b / g, t * a / g);
        let u = free_map(&[vec![a]]);
        let v = free_map(&[vec![b]]);
        let po = pushout(&u, &v, false).unwrap();
        let amb = po.monoid.ambient().clone();
        prop_assume!(amb.free_rank() == 1);
        let mut count = 0;
        for phi in -40i64..=40 {
            // φ on the free coordinate; torsion must go to zero in Z
            let row: Vec<Int> = (0..amb.dim()).map(|i| if i == 0 { Int::from(phi) } else { Int::zero() }).collect();
            let lq = po.left.apply(&ints(&[1]));
            let lr = po.right.apply(&ints(&[1]));
            let val = |x: &[Int]| -> Int { x.iter().zip(&row).map(|(p, q)| p * q).sum() };
            if val(&lq) == Int::from(ca) && val(&lr) == Int::from(cb) {
                count += 1;
            }
        }
        prop_assert_eq!(count, 1);
    }
}

#[test]
fn self_products_project_to_insertions() {
    for entry in catalog() {
        for j in 1..=3 {
            let sp = self_product_decomposition(&entry.hom, j).unwrap();
            assert!(sp.certified, "{} j={j}", entry.name);
            let q = sp.tight_map.codomain();
            let n = q.ambient().dim();
            let classes = sp.tight_map.gp_cokernel_quotient();
            for (a, ins) in sp.insertions.iter().enumerate() {
                for g in q.generators() {
                    let raw = sp.target_coords.lift.mul_vec(&sp.phi.apply(&ins.apply(g)));
                    assert_eq!(q.ambient().reduced(raw[..n].to_vec()), q.ambient().reduced(g.clone()));
                    let gd = classes.group.dim();
                    for b in 1..j {
                        let block = classes.group.reduced(raw[n + (b - 1) * gd..n + b * gd].to_vec());
                        let expected = if a == b { classes.project(g) } else { vec![Int::zero(); gd] };
                        assert_eq!(block, expected, "{} j={j} insertion {a} block {b}", entry.name);
                    }
                }
            }
        }
    }
}

#[test]
fn abhyankar_index_is_least_refining_level() {
    // Q sits in P^{1/m} when v: P → P^{1/m} factors through u
    for entry in catalog() {
        let u = &entry.hom;
        let n = u64::try_from(&abhyankar_index(u).unwrap()).unwrap();
        let e = Int::from(entry.group_order());
        for m in 1..=2 * n {
            let (_, v) = logchart::monoid::fractional_refinement(u.domain(), m).unwrap();
            let factors = u.codomain().generators().iter().all(|q| {
                let eq: Vec<Int> = q.iter().map(|x| x * &e).collect();
                let x = solve_integer(u.group_map(), &eq).expect("e·q lies in the image");
                let w: Vec<Int> = v.group_map().mul_vec(&x);
                w.iter().all(|c| c.is_multiple_of(&e)) && v.codomain().contains(&w.iter().map(|c| c / &e).collect::<Vec<_>>())
            });
            assert_eq!(factors, m % n == 0, "{} at level {m}", entry.name);
        }
    }
}

// covers

/// Subgroups of `(Z/n)^r` by growing from the trivial group one element at
/// a time.
fn subgroup_count(r: usize, n: u64) -> usize {
    let mut elements: Vec<Vec<u64>> = vec![Vec::new()];
    for _ in 0..r {
        elements = elements.into_iter().flat_map(|v| (0..n).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    let close = |gens: &[Vec<u64>]| -> BTreeSet<Vec<u64>> {
        let mut set = BTreeSet::from([vec![0u64; r]]);
        let mut frontier = vec![vec![0u64; r]];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % n).collect();
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    };
    let mut seen: BTreeSet<BTreeSet<Vec<u64>>> = BTreeSet::new();
    let mut stack = vec![close(&[])];
    while let Some(h) = stack.pop() {
        if !seen.insert(h.clone()) {
            continue;
        }
        for g in &elements {
            if !h.contains(g) {
                let gens: Vec<Vec<u64>> = h.iter().cloned().chain([g.clone()]).collect();
                let bigger = close(&gens);
                if !seen.contains(&bigger) {
                    stack.push(bigger);
                }
            }
        }
    }
    seen.len()
}

#[test]
fn cover_counts_match_subgroup_enumeration() {
    let cases: Vec<(usize, u64)> = (1..=16)
        .map(|n| (1, n))
        .chain([(1, 64), (1, 360), (1, 512)])
        .chain((2..=6).map(|n| (2, n)))
        .chain([(3, 2), (3, 3)])
        .collect();
    for (r, n) in cases {
        let covers = classify_covers(&standard_point(r), n).unwrap();
        assert_eq!(covers.len(), subgroup_count(r, n), "rank {r}, level {n}");
    }
}

#[test]
fn covers_are_kummer_with_matching_groups() {
    for (r, n) in [(1usize, 6u64), (2, 4), (2, 6)] {
        let pt = standard_point(r);
        for c in classify_covers(&pt, n).unwrap() {
            assert!(c.monoid.classify().fs);
            let kv = is_kummer(&c.inclusion).unwrap();
            assert!(kv.kummer);
            assert_eq!(kv.galois_group.as_ref(), Some(&c.galois_group));
            let det = IntegerMatrix::from_rows(c.lattice.clone(), r).determinant().abs();
            assert_eq!(c.galois_group.order() * det, Int::from(n).pow(r as u32));
            assert_eq!(hom_count(&pt, &c, &c).unwrap(), c.galois_group.order());
        }
    }
}

fn lattice_contains(big: &[Vec<Int>], small: &[Vec<Int>], r: usize) -> bool {
    let basis = IntegerMatrix::from_columns(big, r);
    small.iter().all(|v| solve_integer(&basis, v).is_some())
}

#[test]
fn fiber_functor_is_functorial() {
    for (r, n) in [(1usize, 6u64), (2, 2), (2, 4)] {
        let pt = standard_point(r);
        let covers = classify_covers(&pt, n).unwrap();
        let fibers: Vec<_> = covers.iter().map(|c| fiber_functor(&pt, c, n).unwrap()).collect();
        for (i, q1) in covers.iter().enumerate() {
            assert!(fibers[i].is_transitive());
            assert_eq!(Int::from(fibers[i].len()), q1.galois_group.order());
            for (j, q2) in covers.iter().enumerate() {
                if lattice_contains(&q1.lattice, &q2.lattice, r) {
                    // maps between transitive sets of an abelian group are onto
                    let maps = equivariant_map_count(&fibers[i], &fibers[j]);
                    assert_eq!(maps, fibers[j].len() as u64, "Q{j} ⊆ Q{i} at rank {r}, level {n}");
                }
            }
        }
    }
}

#[test]
fn tower_levels_embed() {
    for (r, m, n) in [(1usize, 2u64, 6u64), (1, 3, 12), (2, 2, 4)] {
        let pt = standard_point(r);
        let big: Vec<_> = classify_covers(&pt, n).unwrap().into_iter().map(|c| (c.lattice, c.galois_group)).collect();
        for c in classify_covers(&pt, m).unwrap() {
            let up = c.at_level(&pt, n).unwrap();
            assert!(big.contains(&(up.lattice.clone(), up.galois_group.clone())));
            assert_eq!(up.galois_group, c.galois_group);
        }
    }
}

#[test]
fn excluded_primes_restrict_levels() {
    let pt = LogPoint::new(AffineMonoid::free(1), vec![2]).unwrap();
    assert!(classify_covers(&pt, 4).is_err());
    assert_eq!(classify_covers(&pt, 9).unwrap().len(), 3);
}

// cohomology

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn koszul_euler_characteristic_vanishes(
        m in prop::sample::select(vec![2u64, 3, 4, 6]),
        nums in prop::collection::vec(0u64..12, 1..=4),
    ) {
        let ell = smallest_prime_one_mod(m);
        let nums: Vec<u64> = nums.iter().map(|a| a % m).collect();
        let n = nums.len();
        let cd = CharacterDatum::new(m, nums.clone(), ell).unwrap();
        let h = koszul_cohomology(&cd, n);
        let chi: i64 = h.iter().enumerate().map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) }).sum();
        prop_assert_eq!(chi, 0);
        if nums.iter().any(|&a| a != 0) {
            prop_assert!(h.iter().all(|&d| d == 0));
        }
    }

    #[test]
    fn coprime_group_cohomology_is_trivial(orders in prop::collection::vec(2i64..=6, 1..=2), ell in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])) {
        let g = FiniteAbelianGroup::from_orders(&ints(&orders));
        prop_assume!(g.order() <= Int::from(36));
        prop_assume!(!g.order().is_multiple_of(&Int::from(ell)));
        let h = finite_group_cohomology(&g, ell, 4).unwrap();
        prop_assert_eq!(h, vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn rank_mod_matches_row_reduction(
        rows in 1usize..=24, cols in 1usize..=24, seed in any::<u64>(), ell in prop::sample::select(vec![2u64, 3, 5, 7]),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<u64> = (0..rows * cols).map(|_| if rng.gen_bool(0.3) { rng.gen_range(0..ell) } else { 0 }).collect();
        let m = ModMatrix { rows, cols, entries: entries.clone() };
        prop_assert_eq!(rank_mod(&m, ell), oracle_rank(entries, rows, cols, ell));
    }
}

/// Plain row reduction, eliminating below and above each pivot.
fn oracle_rank(mut a: Vec<u64>, rows: usize, cols: usize, ell: u64) -> usize {
    let inv = |x: u64| (1..ell).find(|y| x * y % ell == 1).unwrap();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r * cols + c] != 0) else { continue };
        for j in 0..cols {
            a.swap(p * cols + j, rank * cols + j);
        }
        let k = inv(a[rank * cols + c]);
        for j in 0..cols {
            a[rank * cols + j] = a[rank * cols + j] * k % ell;
        }
        for r in 0..rows {
            if r != rank && a[r * cols + c] != 0 {
                let f = a[r * cols + c];
                for j in 0..cols {
                    a[r * cols + j] = (a[r * cols + j] + ell * ell - f * a[rank * cols + j]) % ell;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn rank_mod_on_large_matrices() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (rows, cols) = (rng.gen_range(30..=64), rng.gen_range(30..=64));
        let ell = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        // low rank products mixed with sparse noise
        let entries: Vec<u64> = (0..rows * cols).map(|_| if rng.gen_bool(0.05) { rng.gen_range(0..ell) } else { 0 }).collect();
        let m = ModMatrix { rows, cols, entries: entries.clone() };
        assert_eq!(rank_mod(&m, ell), oracle_rank(entries, rows, cols, ell));
    }
}

#[test]
fn cyclic_l_groups_have_all_ones() {
    for (ell, k) in [(2u64, 1u32), (2, 3), (3, 2), (5, 1), (7, 1)] {
        let g = FiniteAbelianGroup::from_orders(&[Int::from(ell.pow(k))]);
        assert_eq!(finite_group_cohomology(&g, ell, 5).unwrap(), vec![1; 6]);
    }
}

#[test]
fn cech_slices_of_the_power_maps_are_exact() {
    for entry in catalog().into_iter().filter(|e| e.hom.domain().ambient().dim() == 1) {
        let ell = logchart::cohomology::smallest_prime_not_dividing(&Int::from(entry.group_order()));
        let data = CechData::new(&entry.hom, ell, 6).unwrap();
        for q in 0..=12 {
            let s = data.slice(&ints(&[q])).unwrap();
            assert!(s.exact, "{} q={q}: {:?}", entry.name, s.augmented);
            assert_eq!(s.dims[0], usize::from(q % entry.group_order() as i64 == 0));
        }
    }
}

#[test]
fn non_simplicial_half_cover_is_exact_off_the_image() {
    let (_, u) = logchart::monoid::fractional_refinement(&non_simplicial_monoid(), 2).unwrap();
    let data = CechData::new(&u, 3, 5).unwrap();
    for q in [[1i64, 1], [2, 1], [3, 5], [4, 2], [6, 12]] {
        let s = data.slice(&ints(&q)).unwrap();
        assert!(s.exact, "{q:?}: {:?}", s.augmented);
    }
}
