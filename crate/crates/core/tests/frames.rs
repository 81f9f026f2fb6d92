use heisenberg_core::algebra::{inner_left, Side};
use heisenberg_core::frames::*;
use heisenberg_core::lca::FiniteAbelianGroup;
use heisenberg_core::linalg::{hermitian_residual, mat_vec, random_vector, CMatrix};
use heisenberg_core::rational::ratio;
use heisenberg_core::timefreq::{inner, norm2, Domain, PhaseSubgroup};
use heisenberg_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn separable(d: usize, a: usize, b: usize) -> PhaseSubgroup {
    let domain = Domain::full(&FiniteAbelianGroup::cyclic(d));
    PhaseSubgroup::from_labels(&domain, &[(vec![a % d], vec![0]), (vec![0], vec![b % d])]).unwrap()
}

fn zero(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

fn unit(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let n = norm2(&v);
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// A random lattice of ℤ_d with a frame of ⌈s(Λ)⌉ random windows, and its canonical dual.
fn random_frame(
    rng: &mut ChaCha8Rng,
) -> Option<(PhaseSubgroup, Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)> {
    let d = rng.random_range(2..=12usize);
    let domain = Domain::full(&FiniteAbelianGroup::cyclic(d));
    let all = PhaseSubgroup::all(&domain);
    let l = all[rng.random_range(0..all.len())].clone();
    let n = l.covolume().ceil().to_integer().max(1) as usize;
    let gs: Vec<_> = (0..n).map(|_| random_vector(rng, d)).collect();
    let (a, b) = frame_bounds(&gs, &l).unwrap();
    if !is_frame_bounds(a, b) {
        return None;
    }
    let hs = canonical_dual(&gs, &l).unwrap();
    Some((l, gs, hs))
}

#[test]
fn full_lattice_frame_operator_is_scalar() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for d in [4usize, 7, 10] {
        let l = separable(d, 1, 1);
        let g = unit(random_vector(&mut rng, d));
        let s = frame_operator(&[g.clone()], &l).unwrap();
        let want = CMatrix::identity(d, d) * Complex64::new(d as f64, 0.0);
        assert!((s - want).camax() < 1e-12);
        let (a, b) = frame_bounds(&[g.clone()], &l).unwrap();
        assert!((a - d as f64).abs() < 1e-10 && (b - d as f64).abs() < 1e-10);
        let h = canonical_dual(&[g.clone()], &l).unwrap();
        let want: Vec<Complex64> = g.iter().map(|x| x / d as f64).collect();
        assert!(heisenberg_core::timefreq::max_abs_diff(&h[0], &want) < 1e-12);
        assert!((bessel_constant(&[g.clone()], &l).unwrap() - d as f64).abs() < 1e-10);
        let janssen = frame_operator_janssen(&[g], &l).unwrap();
        assert_eq!(janssen.side(), Side::B);
        assert_eq!(janssen.support().len(), 1);
    }
}

#[test]
fn zero_window_gives_zero_operator_and_no_frame() {
    let l = separable(6, 2, 3);
    let s = frame_operator(&[zero(6)], &l).unwrap();
    assert_eq!(s.camax(), 0.0);
    assert_eq!(bessel_constant(&[zero(6)], &l).unwrap(), 0.0);
    let (a, b) = frame_bounds(&[zero(6)], &l).unwrap();
    assert!(!is_frame_bounds(a, b));
    assert!(canonical_dual(&[zero(6)], &l).is_err());
}

#[test]
fn modulation_only_delta_is_not_a_frame() {
    let d = 8;
    let domain = Domain::full(&FiniteAbelianGroup::cyclic(d));
    let l = PhaseSubgroup::from_labels(&domain, &[(vec![0], vec![1])]).unwrap();
    let mut delta = zero(d);
    delta[0] = Complex64::new(1.0, 0.0);
    let (a, b) = frame_bounds(&[delta], &l).unwrap();
    assert!(a.abs() < 1e-12 && (b - d as f64).abs() < 1e-12);
    assert!(!is_frame_bounds(a, b));
}

#[test]
fn tight_frame_dual_and_janssen_element() {
    // S^{-1/2} g is tight with bound 1; its Janssen element is δ₀.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let l = separable(10, 2, 2);
    let g = random_vector(&mut rng, 10);
    let s = frame_operator(&[g.clone()], &l).unwrap();
    let eig = s.clone().symmetric_eigen();
    let inv_sqrt = &eig.eigenvectors
        * CMatrix::from_diagonal(&eig.eigenvalues.map(|v| Complex64::new(1.0 / v.sqrt(), 0.0)))
        * eig.eigenvectors.adjoint();
    let t = mat_vec(&inv_sqrt, &g);
    let (a, b) = frame_bounds(&[t.clone()], &l).unwrap();
    assert!((a - 1.0).abs() < 1e-10 && (b - 1.0).abs() < 1e-10);
    let h = canonical_dual(&[t.clone()], &l).unwrap();
    assert!(heisenberg_core::timefreq::max_abs_diff(&h[0], &t) < 1e-10);
    let j = frame_operator_janssen(&[t.clone()], &l).unwrap();
    let origin = j.support().slot(0).unwrap();
    for (i, c) in j.coeffs().iter().enumerate() {
        if i != origin {
            assert!(c.norm() < 1e-9);
        }
    }
    let chain = frame_bound_sandwich(&[t.clone()], &h, &l).unwrap();
    assert!(chain.holds && (chain.a_opt - chain.b_opt).abs() < 1e-9);
}

#[test]
fn canonical_dual_on_z10_two_fifths() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let l = separable(10, 2, 2);
    assert_eq!(l.covolume(), ratio(2, 5));
    let g = vec![random_vector(&mut rng, 10)];
    let h = canonical_dual(&g, &l).unwrap();
    assert!(wexler_raz_residual(&g, &h, &l).unwrap() < 1e-10);
    assert!(span_residual(&g, &h, &l).unwrap() < 1e-8);
    // (g, g) is not a dual pair unless g happens to be tight.
    assert!(wexler_raz_residual(&g, &g, &l).unwrap() > 1e-3);
    let report = frame_report(&g, Some(&h), &l).unwrap();
    assert!(report.is_frame && report.wr_residual.unwrap() < 1e-10);
}

#[test]
fn zero_windows_contribute_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let l = separable(10, 2, 2);
    let g = random_vector(&mut rng, 10);
    let h = canonical_dual(&[g.clone()], &l).unwrap().remove(0);
    let one = wexler_raz_residual(&[g.clone()], &[h.clone()], &l).unwrap();
    let two = wexler_raz_residual(&[g, zero(10)], &[h, zero(10)], &l).unwrap();
    assert!((one - two).abs() < 1e-15);
}

#[test]
fn bessel_constant_dominates_upper_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let domain = Domain::full(&FiniteAbelianGroup::cyclic(12));
    let all = PhaseSubgroup::all(&domain);
    for _ in 0..100 {
        let l = &all[rng.random_range(0..all.len())];
        let gs: Vec<_> = (0..rng.random_range(1..3))
            .map(|_| random_vector(&mut rng, 12))
            .collect();
        let (a, b) = frame_bounds(&gs, l).unwrap();
        assert!(a <= b + 1e-12);
        assert!(bessel_constant(&gs, l).unwrap() >= b - 1e-9 * b.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn frame_operator_is_hermitian_and_matches_janssen(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(2..=12usize);
        let domain = Domain::full(&FiniteAbelianGroup::cyclic(d));
        let all = PhaseSubgroup::all(&domain);
        let l = &all[rng.random_range(0..all.len())];
        let gs: Vec<_> = (0..2).map(|_| random_vector(&mut rng, d)).collect();
        let s = frame_operator(&gs, l).unwrap();
        prop_assert!(hermitian_residual(&s) < 1e-12);
        let j = frame_operator_janssen(&gs, l).unwrap().realize();
        prop_assert!((s - j).camax() < 1e-10);
    }

    /// Frame inequality in trace form: tr⟨f,f⟩ scales A and B, and the sum
    /// Σ_j tr(⟨f,g_j⟩⟨g_j,f⟩) = Σ_λ |⟨f, π(λ)g_j⟩|² lies between them.
    #[test]
    fn trace_form_of_the_frame_inequality(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(2..=12usize);
        let domain = Domain::full(&FiniteAbelianGroup::cyclic(d));
        let all = PhaseSubgroup::all(&domain);
        let l = &all[rng.random_range(0..all.len())];
        let gs: Vec<_> = (0..2).map(|_| random_vector(&mut rng, d)).collect();
        let (a, b) = frame_bounds(&gs, l).unwrap();
        let f = random_vector(&mut rng, d);
        let ff = inner_left(&f, &f, l).unwrap();
        let tr_ff = ff.trace().re;
        let mut mid = 0.0;
        for g in &gs {
            let fg = inner_left(&f, g, l).unwrap();
            mid += fg.mul(&fg.involution()).unwrap().trace().re;
        }
        prop_assert!((tr_ff - norm2(&f).powi(2)).abs() < 1e-8 * tr_ff);
        prop_assert!(a * tr_ff <= mid * (1.0 + 1e-8) + 1e-8);
        prop_assert!(mid <= b * tr_ff * (1.0 + 1e-8) + 1e-8);
    }

    #[test]
    fn dual_pair_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some((l, gs, hs)) = random_frame(&mut rng) else { return Ok(()) };
        let d = l.domain().n();
        let wr = wexler_raz_residual(&gs, &hs, &l).unwrap();
        let rw = wexler_raz_residual(&hs, &gs, &l).unwrap();
        prop_assert!(wr < 1e-9 && (wr - rw).abs() < 1e-12);
        let (a, b) = frame_bounds(&gs, &l).unwrap();
        let (_, bh) = frame_bounds(&hs, &l).unwrap();
        prop_assert!(a >= 1.0 / bh - 1e-8 * a);
        let s = heisenberg_core::rational::to_f64(l.covolume());
        let energy: f64 = gs.iter().map(|g| norm2(g).powi(2)).sum();
        prop_assert!(a * s <= energy * (1.0 + 1e-9) && energy <= b * s * (1.0 + 1e-9));
        prop_assert!(s < gs.len() as f64 + 1e-12);
        let f = random_vector(&mut rng, d);
        prop_assert!(reconstruction_residual(&gs, &hs, &l, &f).unwrap() < 1e-9);
        let sum: Complex64 = gs.iter().zip(&hs).map(|(g, h)| inner(h, g)).sum();
        prop_assert!((sum.re - s).abs() < 1e-9 && sum.im.abs() < 1e-9);
    }
}
