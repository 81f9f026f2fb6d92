use heisenberg_core::lca::{all_subgroups, FiniteAbelianGroup};
use heisenberg_core::linalg::random_vector;
use heisenberg_core::timefreq::*;
use heisenberg_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng, g: &FiniteAbelianGroup) -> PhasePoint {
    let pick = |rng: &mut ChaCha8Rng| g.element(rng.random_range(0..g.cardinality()));
    PhasePoint::new(pick(rng), pick(rng))
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-12
}

fn scaled(c: Complex64, v: Vec<Complex64>) -> Vec<Complex64> {
    v.into_iter().map(|x| x * c).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn cocycle_and_shift_identities(orders in prop::sample::select(vec![vec![7], vec![12], vec![2, 6], vec![3, 3], vec![2, 2, 2]]), seed in any::<u64>()) {
        let g = FiniteAbelianGroup::new(orders).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_point(&mut rng, &g), random_point(&mut rng, &g), random_point(&mut rng, &g));
        let f = random_vector(&mut rng, g.cardinality());
        let cc = |p: &PhasePoint, q: &PhasePoint| cocycle(&g, p, q).unwrap();
        let shift = |p: &PhasePoint, v: &[Complex64]| tf_shift(&g, p, v).unwrap();
        let shift_adj = |p: &PhasePoint, v: &[Complex64]| tf_shift_adjoint(&g, p, v).unwrap();

        // conj c(χ₁,χ₂) = c(−χ₁,χ₂) = c(χ₁,−χ₂)
        prop_assert!(close(cc(&a, &b).conj(), cc(&a.neg(&g), &b)));
        prop_assert!(close(cc(&a, &b).conj(), cc(&a, &b.neg(&g))));
        // bicharacter in each slot
        prop_assert!(close(cc(&a.add(&g, &b), &c), cc(&a, &c) * cc(&b, &c)));
        prop_assert!(close(cc(&a, &b.add(&g, &c)), cc(&a, &b) * cc(&a, &c)));
        // π(χ₁)π(χ₂) = c(χ₁,χ₂)π(χ₁+χ₂)
        let ab = shift(&a, &shift(&b, &f));
        prop_assert!(max_abs_diff(&ab, &scaled(cc(&a, &b), shift(&a.add(&g, &b), &f))) < 1e-12);
        // π(χ₁)π(χ₂) = c_s(χ₁,χ₂)π(χ₂)π(χ₁)
        let cs = symplectic_cocycle(&g, &a, &b).unwrap();
        prop_assert!(max_abs_diff(&ab, &scaled(cs, shift(&b, &shift(&a, &f)))) < 1e-12);
        // π(χ)* = c(χ,χ)π(−χ), checked against ⟨π(χ)f, h⟩ = ⟨f, π(χ)*h⟩
        let h = random_vector(&mut rng, g.cardinality());
        prop_assert!(close(inner(&shift(&a, &f), &h), inner(&f, &shift_adj(&a, &h))));
        // π(χ₁)*π(χ₂)* = conj c(χ₂,χ₁) π(χ₁+χ₂)*
        let lhs = shift_adj(&a, &shift_adj(&b, &f));
        prop_assert!(max_abs_diff(&lhs, &scaled(cc(&b, &a).conj(), shift_adj(&a.add(&g, &b), &f))) < 1e-12);
        // c_s(χ₁,χ₂)·c_s(χ₂,χ₁) = 1
        prop_assert!(close(cs * symplectic_cocycle(&g, &b, &a).unwrap(), Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn shifts_are_unitary(d in 1usize..40, seed in any::<u64>()) {
        let g = FiniteAbelianGroup::cyclic(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_vector(&mut rng, d);
        let p = random_point(&mut rng, &g);
        prop_assert!((norm2(&tf_shift(&g, &p, &f).unwrap()) - norm2(&f)).abs() < 1e-14 * norm2(&f).max(1.0));
    }

    #[test]
    fn real_adjoint_pairs_integrally(a in prop::array::uniform4(-3.0f64..3.0)) {
        let Ok(l) = LatticeR2::new([[a[0], a[1]], [a[2], a[3]]]) else { return Ok(()) };
        prop_assume!(l.covolume() > 0.05);
        let adj = l.adjoint().unwrap();
        prop_assert!((adj.covolume() * l.covolume() - 1.0).abs() < 1e-9);
        for i in 0..2 {
            for j in 0..2 {
                let s = symplectic_form(adj.column(i), l.column(j));
                prop_assert!((s - s.round()).abs() < 1e-9, "σ = {}", s);
            }
        }
    }
}

#[test]
fn shift_examples() {
    let g = FiniteAbelianGroup::cyclic(4);
    let delta0: Vec<Complex64> = (0..4)
        .map(|i| Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0))
        .collect();
    let moved = tf_shift(&g, &PhasePoint::new(vec![1], vec![0]), &delta0).unwrap();
    assert_eq!(moved[1], Complex64::new(1.0, 0.0));
    assert_eq!(norm2(&moved), 1.0);
    let id = tf_shift(&g, &PhasePoint::new(vec![0], vec![0]), &delta0).unwrap();
    assert_eq!(id, delta0);
    let d = 9;
    let g = FiniteAbelianGroup::cyclic(d);
    let cs = symplectic_cocycle(
        &g,
        &PhasePoint::new(vec![1], vec![0]),
        &PhasePoint::new(vec![0], vec![1]),
    )
    .unwrap();
    let want = Complex64::from_polar(1.0, -std::f64::consts::TAU / d as f64);
    assert!((cs - want).norm() < 1e-14);
}

#[test]
fn stft_orthogonality_on_full_phase_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [3usize, 8, 12] {
        let domain = Domain::full(&FiniteAbelianGroup::cyclic(d));
        let full = PhaseSubgroup::full(&domain);
        let f = random_vector(&mut rng, d);
        let g = random_vector(&mut rng, d);
        let v = stft(&f, &g, &full).unwrap();
        let lhs: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() / d as f64;
        let rhs = norm2(&f).powi(2) * norm2(&g).powi(2);
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
    }
}

#[test]
fn adjoint_is_an_involution_on_small_cyclic_phase_spaces() {
    for d in 1..=12 {
        let domain = Domain::full(&FiniteAbelianGroup::cyclic(d));
        for l in PhaseSubgroup::all(&domain) {
            let adj = l.adjoint();
            assert!(adj.adjoint().same_points(&l), "d = {d}");
            assert_eq!(l.len() * adj.len(), d * d);
        }
    }
}

#[test]
fn adjoint_sizes_on_z12_squared() {
    let g = FiniteAbelianGroup::cyclic(12);
    for l in all_subgroups(&g.phase_space()) {
        assert_eq!(l.len() * adjoint_subgroup(&g, &l).unwrap().len(), 144);
    }
}

#[test]
fn adjoint_examples() {
    let g = FiniteAbelianGroup::cyclic(10);
    let domain = Domain::full(&g);
    let l = PhaseSubgroup::from_labels(&domain, &[(vec![2], vec![0]), (vec![0], vec![2])]).unwrap();
    let mut labels = l.adjoint().labels();
    labels.sort();
    assert_eq!(
        labels,
        vec![
            (vec![0], vec![0]),
            (vec![0], vec![5]),
            (vec![5], vec![0]),
            (vec![5], vec![5])
        ]
    );
    assert_eq!(PhaseSubgroup::full(&domain).adjoint().len(), 1);

    let (alpha, beta, q) = (0.8, 1.25, 0.5);
    let sep = LatticeR2::separable(alpha, beta)
        .unwrap()
        .adjoint()
        .unwrap();
    assert!(same_lattice(
        &sep,
        &LatticeR2::separable(1.0 / beta, 1.0 / alpha).unwrap(),
        1e-12
    ));
    let sheared = LatticeR2::new([[alpha, q * alpha], [0.0, beta]])
        .unwrap()
        .adjoint()
        .unwrap();
    let want = LatticeR2::new([[q / beta, 1.0 / beta], [1.0 / alpha, 0.0]]).unwrap();
    assert!(same_lattice(&sheared, &want, 1e-12));
}
