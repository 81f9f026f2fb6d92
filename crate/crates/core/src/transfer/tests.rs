use super::*;
use crate::lca::{subgroup_from_generators, FiniteAbelianGroup};
use crate::linalg::random_vector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn z(d: usize) -> FiniteAbelianGroup {
    FiniteAbelianGroup::cyclic(d)
}

fn sub(g: &FiniteAbelianGroup, gens: &[usize]) -> Subgroup {
    let gens: Vec<Vec<usize>> = gens.iter().map(|&x| vec![x]).collect();
    subgroup_from_generators(g, &gens).unwrap()
}

fn sep(domain: &Arc<Domain>, a: usize, b: usize) -> PhaseSubgroup {
    PhaseSubgroup::from_labels(domain, &[(vec![a], vec![0]), (vec![0], vec![b])]).unwrap()
}

fn canonical_pair(lambda: &PhaseSubgroup, seed: u64) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = vec![random_vector(&mut rng, lambda.domain().n())];
    let h = frames::canonical_dual(&g, lambda).unwrap();
    (g, h)
}

#[test]
fn phi_transversal_for_z10() {
    let g = z(10);
    let phi = build_phi(&g, &sub(&g, &[2])).unwrap();
    assert_eq!(phi.kind, EmbeddingKind::Phi);
    assert_eq!(phi.transversal, vec![0, 1, 2, 3, 4]);
    assert!(phi.is_injective_embedding());
}

#[test]
fn phi_for_h_equal_g_is_identity() {
    let g = z(6);
    let phi = build_phi(&g, &sub(&g, &[1])).unwrap();
    // H^⊥ = {0}, so the transversal is all of Ĝ.
    assert_eq!(phi.transversal, (0..6).collect::<Vec<_>>());
    for p in 0..phi.source.phase_len() {
        assert_eq!(
            phi.source.point_labels(p),
            phi.target.point_labels(phi.map(p))
        );
    }
}

#[test]
fn embeddings_intertwine() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (orders, gens) in [
        (vec![10], vec![vec![2]]),
        (vec![12], vec![vec![3]]),
        (vec![4, 6], vec![vec![2, 3]]),
    ] {
        let g = FiniteAbelianGroup::new(orders).unwrap();
        let h = subgroup_from_generators(&g, &gens).unwrap();
        for e in [build_phi(&g, &h).unwrap(), build_psi(&g, &h).unwrap()] {
            assert!(e.is_injective_embedding());
            assert!(e.intertwining_residual(&mut rng, 50).unwrap() < 1e-12);
        }
    }
}

#[test]
fn sampling_z12_onto_even_subgroup() {
    let g = z(12);
    let full = Domain::full(&g);
    let h = sub(&g, &[2]);
    let lambda = sep(&full, 2, 3);
    let (gs, hs) = canonical_pair(&lambda, 1);
    let target = default_target(Mode::Sample, &lambda, &h).unwrap();
    let out = sample_generators(&lambda, &target, &gs, &hs).unwrap();
    let r = &out.report;
    assert!(r.hypotheses.holds());
    assert!(r.wr_residual_after < 1e-9);
    assert!(r.bound_chain.as_ref().unwrap().holds);
    // Separable lattices keep canonical pairs canonical.
    assert!(r.hypotheses.strengthened);
    assert_eq!(r.canonical_preserved, Some(true));
    assert_eq!(
        r.c_squared * r.s_lambda,
        r.s_lambda_tilde * Rational::from_integer(2)
    );
}

#[test]
fn periodizing_z12_by_order_two_subgroup() {
    let g = z(12);
    let full = Domain::full(&g);
    let h = sub(&g, &[6]);
    let lambda = sep(&full, 3, 2);
    let (gs, hs) = canonical_pair(&lambda, 2);
    let target = default_target(Mode::Periodize, &lambda, &h).unwrap();
    let out = periodize_generators(&lambda, &target, &gs, &hs).unwrap();
    assert!(out.report.wr_residual_after < 1e-9);
    assert!(out.report.bound_chain.unwrap().holds);
    assert_eq!(out.gs[0].len(), 6);
}

#[test]
fn trivial_periodization_is_identity() {
    let g = z(8);
    let full = Domain::full(&g);
    let lambda = sep(&full, 2, 2);
    let (gs, hs) = canonical_pair(&lambda, 5);
    let target = default_target(Mode::Periodize, &lambda, &sub(&g, &[0])).unwrap();
    let out = periodize_generators(&lambda, &target, &gs, &hs).unwrap();
    assert_eq!(out.report.c_squared, Rational::from_integer(1));
    assert!(max_abs_diff(&out.gs[0], &gs[0]) == 0.0);
}

#[test]
fn oversampling_with_h_equal_g() {
    let g = z(12);
    let full = Domain::full(&g);
    let lambda = sep(&full, 2, 3);
    let small = Domain::subgroup(&g, &sub(&g, &[1])).unwrap();
    let finer = sep(&small, 1, 3);
    let (gs, hs) = canonical_pair(&lambda, 7);
    let out = sample_generators(&lambda, &finer, &gs, &hs).unwrap();
    assert_eq!(out.report.c_squared, finer.covolume() / lambda.covolume());
    assert!((out.report.c - 0.5f64.sqrt()).abs() < 1e-15);
    assert!(out.report.wr_residual_after < 1e-9);
}

#[test]
fn undersized_adjoint_breaks_canonical_preservation() {
    let g = z(12);
    let full = Domain::full(&g);
    let h = sub(&g, &[2]);
    let lambda = sep(&full, 2, 3);
    let small = Domain::subgroup(&g, &h).unwrap();
    // Λ̃ = all of H×Ĥ, so Λ̃° = {0}: (ii) holds, (ii*) does not.
    let everything = PhaseSubgroup::full(&small);
    let checks = check_hypotheses(Mode::Sample, &lambda, &everything).unwrap();
    assert!(checks.holds() && !checks.strengthened);
    assert!(!check_canonical_preservation(Mode::Sample, &lambda, &everything).unwrap());
    let (gs, hs) = canonical_pair(&lambda, 11);
    let out = sample_generators(&lambda, &everything, &gs, &hs).unwrap();
    assert!(out.report.wr_residual_after < 1e-9);
    assert_eq!(out.report.canonical_preserved, None);
    assert!(canonical_gap(&out.gs, &out.hs, &everything).unwrap() > 1e-6);
}

#[test]
fn h_equal_g_and_same_lattice_is_trivially_canonical() {
    let g = z(6);
    let full = Domain::full(&g);
    let lambda = sep(&full, 1, 2);
    let small = Domain::subgroup(&g, &sub(&g, &[1])).unwrap();
    let same = sep(&small, 1, 2);
    assert!(check_canonical_preservation(Mode::Sample, &lambda, &same).unwrap());
}

#[test]
fn violations_are_named() {
    let g = z(12);
    let full = Domain::full(&g);
    let h = sub(&g, &[2]);
    let lambda = sep(&full, 3, 3);
    let (gs, hs) = canonical_pair(&lambda, 4);
    let small = Domain::subgroup(&g, &h).unwrap();
    let target = PhaseSubgroup::full(&small);
    match sample_generators(&lambda, &target, &gs, &hs) {
        Err(Error::HypothesisViolation {
            which: Hypothesis::LatticeInStrip,
            ..
        }) => {}
        other => panic!("expected (i) to fail, got {other:?}"),
    }
    // (ii): Λ̃ too coarse, its adjoint too large.
    let lambda = sep(&full, 2, 3);
    let (gs, hs) = canonical_pair(&lambda, 4);
    let coarse = PhaseSubgroup::trivial(&small);
    match sample_generators(&lambda, &coarse, &gs, &hs) {
        Err(Error::HypothesisViolation {
            which: Hypothesis::AdjointEmbeds,
            ..
        }) => {}
        other => panic!("expected (ii) to fail, got {other:?}"),
    }
}

#[test]
fn non_dual_inputs_are_rejected() {
    let g = z(12);
    let full = Domain::full(&g);
    let h = sub(&g, &[2]);
    let lambda = sep(&full, 2, 3);
    let (gs, _) = canonical_pair(&lambda, 4);
    let target = default_target(Mode::Sample, &lambda, &h).unwrap();
    let err = sample_generators(&lambda, &target, &gs, &gs).unwrap_err();
    assert!(matches!(err, Error::PreconditionViolation(_)));
}

#[test]
fn fourier_route_matches_periodization() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (orders, gens) in [
        (vec![12], vec![vec![4]]),
        (vec![2, 6], vec![vec![1, 2]]),
        (vec![9], vec![vec![3]]),
    ] {
        let g = FiniteAbelianGroup::new(orders).unwrap();
        let h = subgroup_from_generators(&g, &gens).unwrap();
        let f = random_vector(&mut rng, g.cardinality());
        assert!(fourier_route_residual(&g, &h, &f).unwrap() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn prefactor_ignores_window_scale(seed in 0u64..1000, scale in 0.1f64..10.0) {
        let g = z(12);
        let full = Domain::full(&g);
        let lambda = sep(&full, 2, 3);
        let target = default_target(Mode::Sample, &lambda, &sub(&g, &[2])).unwrap();
        let (gs, hs) = canonical_pair(&lambda, seed);
        let s = Complex64::new(scale, 0.0);
        let gs2: Vec<_> = gs.iter().map(|v| v.iter().map(|x| x * s).collect()).collect();
        let hs2: Vec<_> = hs.iter().map(|v| v.iter().map(|x| x / s).collect()).collect();
        let a = sample_generators(&lambda, &target, &gs, &hs).unwrap().report;
        let b = sample_generators(&lambda, &target, &gs2, &hs2).unwrap().report;
        prop_assert_eq!(a.c_squared, b.c_squared);
        prop_assert!(b.wr_residual_after < 1e-9);
    }

    #[test]
    fn default_targets_satisfy_adjoint_embedding(d in prop::sample::select(vec![4usize, 6, 8, 9, 12]), k in 1usize..12, a in 1usize..12, b in 1usize..12) {
        let g = z(d);
        let full = Domain::full(&g);
        let hgen = k % d;
        let h = sub(&g, &[hgen]);
        let lambda = sep(&full, (a * hgen) % d, b % d);
        for mode in [Mode::Sample, Mode::Periodize] {
            let target = default_target(mode, &lambda, &h).unwrap();
            let checks = check_hypotheses(mode, &lambda, &target).unwrap();
            prop_assert!(checks.adjoint_embeds);
            prop_assert!(!checks.strengthened || checks.adjoint_embeds);
        }
    }
}
