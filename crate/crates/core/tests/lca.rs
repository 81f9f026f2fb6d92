use heisenberg_core::lca::*;
use heisenberg_core::linalg::random_vector;
use heisenberg_core::rational::ratio;
use heisenberg_core::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn group(orders: &[usize]) -> FiniteAbelianGroup {
    FiniteAbelianGroup::new(orders.to_vec()).unwrap()
}

/// Every abelian group of order ≤ 200 with at most two cyclic factors, plus a few of rank 3.
fn groups_up_to_200() -> Vec<FiniteAbelianGroup> {
    let mut out = Vec::new();
    for n in 1..=200usize {
        for m in (1..=n).filter(|m| n % m == 0 && m * n <= 200) {
            out.push(if m == 1 { group(&[n]) } else { group(&[m, n]) });
        }
    }
    for o in [
        [2, 2, 2],
        [2, 2, 4],
        [2, 2, 6],
        [3, 3, 3],
        [2, 4, 4],
        [2, 2, 10],
    ] {
        out.push(group(&o));
    }
    out
}

#[test]
fn annihilator_orders_and_biduality() {
    let mut count = 0;
    for g in groups_up_to_200() {
        for h in all_subgroups(&g) {
            let perp = annihilator(&g, &h).unwrap();
            assert_eq!(
                h.len() * perp.len(),
                g.cardinality(),
                "{:?} {:?}",
                g.orders(),
                h.generators()
            );
            assert_eq!(
                annihilator(&g, &perp).unwrap().member_indices(),
                h.member_indices()
            );
            count += 1;
        }
    }
    assert!(count > 1000);
}

#[test]
fn annihilator_examples() {
    let g = group(&[10]);
    let h = subgroup_from_generators(&g, &[vec![2]]).unwrap();
    assert_eq!(
        annihilator(&g, &h).unwrap().elements(),
        vec![vec![0], vec![5]]
    );
    let trivial = subgroup_from_generators(&g, &[]).unwrap();
    assert_eq!(annihilator(&g, &trivial).unwrap().len(), 10);
    let full = subgroup_from_generators(&g, &[vec![1]]).unwrap();
    assert_eq!(annihilator(&g, &full).unwrap().elements(), vec![vec![0]]);
}

#[test]
fn transversal_examples() {
    let g = group(&[10]);
    let h = subgroup_from_generators(&g, &[vec![5]]).unwrap();
    let k = quotient_transversal(&g, &h).unwrap();
    assert_eq!(k, (0..5).map(|i| vec![i]).collect::<Vec<_>>());
    let full = subgroup_from_generators(&g, &[vec![1]]).unwrap();
    assert_eq!(quotient_transversal(&g, &full).unwrap(), vec![vec![0]]);
    let trivial = subgroup_from_generators(&g, &[]).unwrap();
    assert_eq!(quotient_transversal(&g, &trivial).unwrap().len(), 10);
}

#[test]
fn transversal_has_zero_and_one_point_per_coset() {
    for g in [
        group(&[12]),
        group(&[2, 6]),
        group(&[3, 3]),
        group(&[2, 2, 2]),
    ] {
        for h in all_subgroups(&g) {
            let k = quotient_transversal(&g, &h).unwrap();
            assert_eq!(k[0], g.zero());
            assert_eq!(k.len() * h.len(), g.cardinality());
            assert_eq!(k, quotient_transversal(&g, &h).unwrap());
            for (i, a) in k.iter().enumerate() {
                for b in &k[i + 1..] {
                    assert!(!h.contains(&g.sub(a, b)));
                }
            }
        }
    }
}

#[test]
fn covolume_examples() {
    let g = group(&[10]);
    let ps = g.phase_space();
    let l = subgroup_from_generators(&ps, &[vec![2, 0], vec![0, 2]]).unwrap();
    assert_eq!(covolume(&g, &l).unwrap(), ratio(2, 5));
    let full = subgroup_from_generators(&ps, &[vec![1, 0], vec![0, 1]]).unwrap();
    assert_eq!(covolume(&g, &full).unwrap(), ratio(1, 10));
    // aℤ_N × bℤ_M in ℤ_d has s = ab/d.
    for (d, a, b) in [(12, 3, 2), (12, 4, 6), (8, 2, 2), (9, 3, 3)] {
        let g = group(&[d]);
        let ps = g.phase_space();
        let l = subgroup_from_generators(&ps, &[vec![a, 0], vec![0, b]]).unwrap();
        assert_eq!(covolume(&g, &l).unwrap(), ratio((a * b) as i64, d as i64));
    }
}

fn poisson_residual(g: &FiniteAbelianGroup, h: &Subgroup, f: &[Complex64]) -> f64 {
    let perp = annihilator(g, h).unwrap();
    let left: Complex64 = h.member_indices().iter().map(|&i| f[i]).sum();
    let mut right = Complex64::new(0.0, 0.0);
    for w in perp.elements() {
        for (i, x) in g.elements().enumerate() {
            right += f[i] * g.character(&w, &x).unwrap().conj();
        }
    }
    let s = subgroup_covolume(g, h);
    right *= *s.denom() as f64 / *s.numer() as f64;
    (left - right).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poisson_summation(orders in prop::sample::select(vec![vec![12], vec![2, 4], vec![3, 6], vec![16], vec![2, 2, 2]]), seed in any::<u64>()) {
        let g = group(&orders);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_vector(&mut rng, g.cardinality());
        for h in all_subgroups(&g) {
            prop_assert!(poisson_residual(&g, &h, &f) < 1e-10);
        }
    }

    /// Indicator test functions: the mass of a set equals the sum of its
    /// coset-wise masses, with each coset of Λ weighted s(Λ)/#cosets.
    #[test]
    fn weil_formula_on_indicators(d in 2usize..9, picks in prop::collection::vec(any::<prop::sample::Index>(), 1..20), which in any::<prop::sample::Index>()) {
        let g = group(&[d]);
        let ps = g.phase_space();
        let lattices = all_subgroups(&ps);
        let l = which.get(&lattices);
        let n = ps.cardinality();
        let mut f = vec![0i64; n];
        for p in &picks {
            f[p.index(n)] = 1;
        }
        let rep = coset_representatives(&ps, l);
        let reps: Vec<usize> = (0..n).filter(|&i| rep[i] == i).collect();
        let inner: i64 = reps
            .iter()
            .map(|&r| l.elements().iter().map(|y| f[ps.index_of(&ps.add(&ps.element(r), y))]).sum::<i64>())
            .sum();
        let s = covolume(&g, l).unwrap();
        let lhs = ratio(f.iter().sum(), d as i64);
        prop_assert_eq!(lhs, s / reps.len() as i64 * inner);
    }

    #[test]
    fn reduce_and_index_round_trip(orders in prop::collection::vec(1usize..7, 1..4), raw in prop::collection::vec(-50i64..50, 4)) {
        let g = group(&orders);
        let x = g.reduce(&raw[..orders.len()]).unwrap();
        prop_assert_eq!(g.element(g.index_of(&x)), x.clone());
        prop_assert_eq!(g.add(&x, &g.neg(&x)), g.zero());
    }
}
