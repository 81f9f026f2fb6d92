use super::*;
use crate::lca::FiniteAbelianGroup;
use crate::linalg::{hermitian_eigenvalues, max_entry_diff};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn rand_element(
    rng: &mut ChaCha8Rng,
    side: Side,
    support: &PhaseSubgroup,
    weight: Rational,
) -> AlgebraElement {
    let c = rand_vec(rng, support.len());
    AlgebraElement::new(side, support.clone(), c, weight).unwrap()
}

fn setup(orders: Vec<usize>, gens: &[(Vec<usize>, Vec<usize>)]) -> PhaseSubgroup {
    let g = FiniteAbelianGroup::new(orders).unwrap();
    let d = Domain::full(&g);
    PhaseSubgroup::from_labels(&d, gens).unwrap()
}

#[test]
fn single_shift_product_picks_up_cocycle() {
    let l = setup(vec![6], &[(vec![1], vec![0]), (vec![0], vec![1])]);
    let d = l.domain().clone();
    for &p in l.points() {
        for &q in l.points().iter().step_by(5) {
            let a = AlgebraElement::delta(Side::A, l.clone(), p, Rational::one()).unwrap();
            let b = AlgebraElement::delta(Side::A, l.clone(), q, Rational::one()).unwrap();
            let prod = a.mul(&b).unwrap();
            let expect = d.cocycle(p, q);
            assert!((prod.coeff(d.phase_add(p, q)) - expect).norm() < 1e-15);
            assert!((prod.norm1() - 1.0).abs() < 1e-15);
        }
    }
}

#[test]
fn identity_acts_trivially() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let l = setup(vec![8], &[(vec![2], vec![0]), (vec![0], vec![4])]);
    let f = rand_vec(&mut rng, 8);
    for side in [Side::A, Side::B] {
        let w = Rational::new(1, 2);
        let e = AlgebraElement::identity(side, l.clone(), w);
        let a = rand_element(&mut rng, side, &l, w);
        assert!(max_abs(&e.act(&f).unwrap(), &f) < 1e-14);
        assert!(a.mul(&e).unwrap().sub(&a).unwrap().norm1() < 1e-14);
        assert!(e.mul(&a).unwrap().sub(&a).unwrap().norm1() < 1e-14);
    }
}

fn max_abs(a: &[Complex64], b: &[Complex64]) -> f64 {
    crate::timefreq::max_abs_diff(a, b)
}

#[test]
fn involution_of_delta() {
    let l = setup(vec![5], &[(vec![1], vec![2])]);
    let d = l.domain().clone();
    let p = l.points()[1];
    let a = AlgebraElement::delta(Side::A, l.clone(), p, Rational::one()).unwrap();
    let s = a.involution();
    assert!((s.coeff(d.phase_neg(p)) - d.cocycle(p, p)).norm() < 1e-15);
    let e = AlgebraElement::identity(Side::A, l.clone(), Rational::one());
    assert!(e.involution().sub(&e).unwrap().norm1() == 0.0);
}

#[test]
fn g_delta_full_z2_module_norm_is_two() {
    let l = setup(vec![2], &[(vec![1], vec![0]), (vec![0], vec![1])]);
    let g = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let n = module_norm(&[g.clone()], &l).unwrap();
    assert!((n * n - 2.0).abs() < 1e-12);
    let r = module_norm_right(&[g], &l).unwrap();
    assert!((r * r - 2.0).abs() < 1e-12);
}

#[test]
fn trace_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let l = setup(
        vec![2, 4],
        &[(vec![1, 0], vec![0, 2]), (vec![0, 1], vec![1, 1])],
    );
    let n = l.domain().n();
    let f = rand_vec(&mut rng, n);
    let g = rand_vec(&mut rng, n);
    let ip = inner(&f, &g);
    assert!((inner_left(&f, &g, &l).unwrap().trace() - ip).norm() < 1e-12);
    assert!((inner_right(&g, &f, &l).unwrap().trace() - ip).norm() < 1e-12);
    let fs = vec![f.clone(), rand_vec(&mut rng, n)];
    let gs = vec![g.clone(), rand_vec(&mut rng, n)];
    let expect: Complex64 = fs.iter().zip(&gs).map(|(a, b)| inner(a, b)).sum();
    assert!((matrix_inner_left(&fs, &gs, &l).unwrap().trace() - expect).norm() < 1e-12);
    assert!((matrix_inner_right(&gs, &fs, &l).unwrap().trace() - expect).norm() < 1e-12);
}

#[test]
fn positivity_of_left_inner_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let l = setup(vec![9], &[(vec![3], vec![1])]);
    for _ in 0..10 {
        let f = rand_vec(&mut rng, 9);
        let ev = hermitian_eigenvalues(&inner_left(&f, &f, &l).unwrap().realize());
        assert!(ev[0] >= -1e-10);
    }
}

#[test]
fn neumann_examples() {
    let l = setup(vec![7], &[(vec![1], vec![3])]);
    let w = Rational::new(2, 3);
    let b = AlgebraElement::identity(Side::B, l.clone(), w).scale(Complex64::new(2.0, 0.0));
    let r = neumann_inverse(&b, 1e-12, 100).unwrap();
    let half = AlgebraElement::identity(Side::B, l.clone(), w).scale(Complex64::new(0.5, 0.0));
    assert!(r.inverse.sub(&half).unwrap().norm1() < 1e-14);

    let p = l.points()[2];
    let one = AlgebraElement::identity(Side::B, l.clone(), w);
    let chi = AlgebraElement::delta(Side::B, l.clone(), p, w)
        .unwrap()
        .scale(Complex64::new(0.45, 0.0));
    let b = one.add(&chi).unwrap().add(&chi.involution()).unwrap();
    let r = neumann_inverse(&b, 1e-12, 500).unwrap();
    assert!(r.residual < 1e-10);
    let dense_inv = b.realize().try_inverse().unwrap();
    assert!(max_entry_diff(&r.inverse.realize(), &dense_inv) < 1e-10);

    let far = one.add(&chi.scale(Complex64::new(10.0, 0.0))).unwrap();
    assert!(matches!(
        neumann_inverse(&far, 1e-12, 100),
        Err(Error::NotDiagonallyDominant { .. })
    ));
}

#[test]
fn janssen_inverse_of_near_tight_window() {
    // A smooth bump on ℤ₁₂ with a redundant lattice is close to tight.
    let g = FiniteAbelianGroup::cyclic(12);
    let d = Domain::full(&g);
    let l = PhaseSubgroup::from_labels(&d, &[(vec![2], vec![0]), (vec![0], vec![2])]).unwrap();
    let w: Vec<Complex64> = (0..12)
        .map(|t| {
            Complex64::new(
                (-std::f64::consts::PI * ((t as f64 + 6.0) % 12.0 - 6.0).powi(2) / 6.0).exp(),
                0.0,
            )
        })
        .collect();
    let b = inner_right(&w, &w, &l).unwrap();
    let r = neumann_inverse(&b, 1e-12, 2000).unwrap();
    let s_inv = b.realize().try_inverse().unwrap();
    assert!(max_entry_diff(&r.inverse.realize(), &s_inv) < 1e-8);
}

#[test]
fn projection_from_dual_pair_and_negative_control() {
    let g = FiniteAbelianGroup::cyclic(10);
    let d = Domain::full(&g);
    let l = PhaseSubgroup::from_labels(&d, &[(vec![2], vec![0]), (vec![0], vec![2])]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let gw = rand_vec(&mut rng, 10);
    let s = matrix_inner_right(&[gw.clone()], &[gw.clone()], &l)
        .unwrap()
        .entry(0, 0)
        .realize();
    let h = crate::linalg::solve(&s, &gw).unwrap();
    let p = matrix_inner_left(&[gw.clone()], &[h.clone()], &l).unwrap();
    let rep = is_projection(&p, 1e-9).unwrap();
    assert!(
        rep.idempotent_residual < 1e-9 && rep.selfadjoint_residual < 1e-9,
        "{rep:?}"
    );
    let bad = matrix_inner_left(&[gw.clone()], &[gw.clone()], &l).unwrap();
    assert!(is_projection(&bad, 1e-9).unwrap().idempotent_residual > 1e-3);
}

fn phase_subgroups() -> impl Strategy<Value = (Vec<usize>, usize, u64)> {
    (
        prop_oneof![
            Just(vec![4]),
            Just(vec![6]),
            Just(vec![2, 2]),
            Just(vec![8]),
            Just(vec![2, 4]),
            Just(vec![3, 3])
        ],
        0usize..1000,
        any::<u64>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn realization_is_a_homomorphism((orders, pick, seed) in phase_subgroups()) {
        let g = FiniteAbelianGroup::new(orders).unwrap();
        let d = Domain::full(&g);
        let all = PhaseSubgroup::all(&d);
        let l = &all[pick % all.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for side in [Side::A, Side::B] {
            let w = Rational::new(l.len() as i64, d.n() as i64);
            let a = rand_element(&mut rng, side, l, w);
            let b = rand_element(&mut rng, side, l, w);
            let ab = a.mul(&b).unwrap();
            prop_assert!(max_entry_diff(&ab.realize(), &(a.realize() * b.realize())) < 1e-10);
            prop_assert!(max_entry_diff(&a.involution().realize(), &a.realize().adjoint()) < 1e-12);
            prop_assert!(ab.norm1() <= a.norm1() * b.norm1() * (1.0 + 1e-12));
            prop_assert!(a.involution().involution().sub(&a).unwrap().norm1() < 1e-12);
            let f = rand_vec(&mut rng, d.n());
            let direct = crate::linalg::mat_vec(&a.realize(), &f);
            prop_assert!(max_abs(&a.act(&f).unwrap(), &direct) < 1e-12);
        }
    }

    #[test]
    fn fundamental_identity((orders, pick, seed) in phase_subgroups()) {
        let g = FiniteAbelianGroup::new(orders).unwrap();
        let d = Domain::full(&g);
        let all = PhaseSubgroup::all(&d);
        let l = &all[pick % all.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = d.n();
        let (f, gg, h) = (rand_vec(&mut rng, n), rand_vec(&mut rng, n), rand_vec(&mut rng, n));
        let lhs = inner_left(&f, &gg, l).unwrap().act(&h).unwrap();
        let rhs = inner_right(&gg, &h, l).unwrap().act(&f).unwrap();
        prop_assert!(max_abs(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn tuple_associativity_and_norms((orders, pick, seed) in phase_subgroups()) {
        let g = FiniteAbelianGroup::new(orders).unwrap();
        let d = Domain::full(&g);
        let all = PhaseSubgroup::all(&d);
        let l = &all[pick % all.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = d.n();
        let fs = vec![rand_vec(&mut rng, n), rand_vec(&mut rng, n)];
        let gs = vec![rand_vec(&mut rng, n), rand_vec(&mut rng, n)];
        let hs = vec![rand_vec(&mut rng, n), rand_vec(&mut rng, n)];
        let lhs = matrix_inner_left(&fs, &gs, l).unwrap().act(&hs).unwrap();
        let rhs = matrix_inner_right(&gs, &hs, l).unwrap().entry(0, 0).clone();
        for j in 0..2 {
            prop_assert!(max_abs(&lhs[j], &rhs.act(&fs[j]).unwrap()) < 1e-10);
        }
        let a = module_norm(&gs, l).unwrap();
        let b = module_norm_right(&gs, l).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a.max(1e-300));
    }
}
