use super::*;
use crate::continuous::{inner_product, painless_dual, restrict_within};
use crate::rational::ratio;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn l2_sq(a: &Window, b: &Window) -> f64 {
    let f = difference(a, b);
    inner_product(&f, &f).unwrap().re
}

#[test]
fn embed_of_a_scalar() {
    let s = q_embed(&[c(3.0)], 1.0).unwrap();
    assert_eq!(s.indices(), 0..1);
    assert_eq!(s.get(0), c(3.0));
}

#[test]
fn embed_d4_is_centered() {
    let v: Vec<Complex64> = (0..4).map(|i| c(i as f64 + 10.0)).collect();
    let s = q_embed(&v, 1.0).unwrap();
    assert_eq!(s.indices(), -1..3);
    let got: Vec<Complex64> = s.indices().map(|k| s.get(k)).collect();
    assert_eq!(got, vec![v[3], v[0], v[1], v[2]]);
}

#[test]
fn embed_windows_for_small_d() {
    for d in 1..=9i64 {
        let v: Vec<Complex64> = (0..d).map(|i| c(i as f64 + 1.0)).collect();
        let s = q_embed(&v, 0.5).unwrap();
        let lo = -((d - 1) / 2);
        let hi = d / 2;
        for k in lo - 3..=hi + 3 {
            let want = if (lo..=hi).contains(&k) {
                v[k.rem_euclid(d) as usize]
            } else {
                c(0.0)
            };
            assert_eq!(s.get(k), want, "d = {d}, k = {k}");
        }
        assert_eq!(s.norm1(), v.iter().map(|z| z.norm()).sum::<f64>());
    }
}

#[test]
fn interp_of_delta_is_the_hat() {
    let gamma = 0.3;
    let s = SampledSequence::new(gamma, 0, vec![c(1.0)]).unwrap();
    let q = q_interp(&s).unwrap();
    let hat = Window::triangle(gamma);
    for i in -50..=50 {
        let t = i as f64 * 0.01;
        assert!((q.eval(t) - hat.eval(t)).norm() < 1e-15);
    }
    assert!((q_interp_bound(&s) - (2.0 * gamma / 3.0).sqrt()).abs() < 1e-15);
    // ‖∧_γ‖² = 2γ/3, so the bound is attained by a single hat.
    assert!((inner_product(&q, &q).unwrap().re - 2.0 * gamma / 3.0).abs() < 1e-15);
}

#[test]
fn interp_error_of_a_triangle_off_grid() {
    // Triangle(1) sampled at (2/3)ℤ: the interpolant differs on 2/3 ≤ |t| ≤ 4/3
    // by a hat of height 1/6 and half-width 1/3, so ‖g − Qg‖² = 2·2(1/6)²(1/3)/3.
    let g = Window::triangle(1.0);
    let s = restrict(&g, 2.0 / 3.0, EPS_TAIL).unwrap();
    let q = q_interp(&s).unwrap();
    assert!((l2_sq(&g, &q) - 1.0 / 81.0).abs() < 1e-15);
}

#[test]
fn pipeline_errors_for_a_narrow_triangle() {
    // Triangle(0.7): one-sided errors are hats over [0.5, 0.75] (d = 16) and
    // [0.5, 1] (d = 4) peaking at t = 0.7 with heights 2/35 and 6/35.
    let g = Window::triangle(0.7);
    let e16 = l2_sq(&g, &approx_pipeline(&g, 16).unwrap().window);
    let e4 = l2_sq(&g, &approx_pipeline(&g, 4).unwrap().window);
    assert!((e16 - 2.0 / 3675.0).abs() < 1e-15, "{e16}");
    assert!((e4 - 36.0 / 3675.0).abs() < 1e-15, "{e4}");
}

#[test]
fn grid_aligned_windows_are_fixed_points() {
    for d in [4, 16, 64, 256] {
        let g = Window::triangle(1.0);
        let k = approx_pipeline(&g, d).unwrap().window;
        assert_eq!(l2_sq(&g, &k), 0.0);
    }
}

#[test]
fn pipeline_is_interpolated_restriction_for_small_support() {
    let g = Window::triangle(0.7);
    for d in [9, 16, 25] {
        let gamma = 1.0 / (d as f64).sqrt();
        let a = approx_pipeline(&g, d).unwrap().window;
        let b = q_interp(&restrict(&g, gamma, EPS_TAIL).unwrap()).unwrap();
        for i in -200..=200 {
            let t = i as f64 * 0.01;
            assert!((a.eval(t) - b.eval(t)).norm() < 1e-15);
        }
    }
}

#[test]
fn pipeline_wraps_wide_support() {
    // d = 4: period 2, so Triangle(1.5) has samples at ±1 folded onto ∓1.
    let g = Window::triangle(1.5);
    let out = approx_pipeline(&g, 4).unwrap();
    let w = 1.0 - 1.0 / 1.5;
    assert!((out.vector[2] - c(2.0 * w)).norm() < 1e-15);
    assert!((out.window.eval(1.0) - c(2.0 * w)).norm() < 1e-15);
    assert_eq!(out.window.eval(-1.0), c(0.0));
}

#[test]
fn gaussian_pipeline_carries_a_tail() {
    let out = approx_pipeline(&Window::gaussian(0.0, 1.0), 64).unwrap();
    assert!(out.tail_bound <= EPS_TAIL);
    assert!((out.window.eval(0.0) - c(1.0)).norm() < 1e-12);
}

#[test]
fn distance_to_itself_is_zero() {
    let g = vec![Window::triangle(0.7)];
    let l = RationalLattice::separable(ratio(1, 1), ratio(2, 5)).unwrap();
    let p = proxy_params(ratio(1, 1), ratio(2, 5), 16).unwrap();
    let r = module_distance(&g, &g, &l, Some(&p), &DistanceOptions::default()).unwrap();
    assert_eq!(r.upper, 0.0);
    assert_eq!(r.proxy.unwrap().value, 0.0);
}

#[test]
fn distance_scales_quadratically() {
    let g = Window::triangle(0.7);
    let half = g.clone().scaled(c(0.5));
    let l = RationalLattice::separable(ratio(1, 1), ratio(2, 5)).unwrap();
    let opts = DistanceOptions::default();
    let r = module_distance(&[g.clone()], &[half], &l, None, &opts).unwrap();
    let adj = l.adjoint().to_f64();
    let full = janssen_coefficients(
        &[g.clone()],
        &adj,
        2.5,
        &janssen_opts(&[g], &adj, opts.freq_radius),
    )
    .unwrap();
    assert!((r.upper - 0.25 * full.norm1()).abs() <= 1e-15 * r.upper);
}

#[test]
fn proxy_dimension_for_two_fifths() {
    let p = proxy_params(ratio(1, 1), ratio(2, 5), 1024).unwrap();
    assert_eq!((p.a, p.m, p.b, p.n), (22, 55, 22, 55));
    assert_eq!(p.validate().unwrap(), 1210);
}

#[test]
fn convergents_of_inverse_root_two() {
    let c = convergents(std::f64::consts::FRAC_1_SQRT_2, 6);
    assert_eq!(
        c,
        vec![
            ratio(0, 1),
            ratio(1, 1),
            ratio(2, 3),
            ratio(5, 7),
            ratio(12, 17),
            ratio(29, 41)
        ]
    );
    assert_eq!(
        convergents(0.4, 10),
        vec![ratio(0, 1), ratio(1, 2), ratio(2, 5)]
    );
}

#[test]
fn rational_step_at_theta_itself_gives_the_canonical_dual() {
    let g = vec![Window::gaussian(0.0, 1.0)];
    let (hs, r) = rational_step(&g, 0.5, ratio(1, 2)).unwrap();
    // ‖1 − c b‖ is the Neumann residual at θ, dominated by the box tail.
    assert!(
        r.perturbation.e_norm <= 1.001 * r.reference.residual,
        "{r:?}"
    );
    assert!(r.perturbation.e_norm < 1e-6);
    assert!(r.wr_residual < 1e-8);
    let lambda = LatticeR2::separable(1.0, 0.5).unwrap();
    let (h2, _) = crate::transfer::real::neumann_dual(&g, &lambda, 1e-14).unwrap();
    for i in -40..=40 {
        let t = i as f64 * 0.1;
        assert!((hs[0].eval(t) - h2[0].eval(t)).norm() < 1e-10);
    }
}

#[test]
fn sweep_rejects_bad_inputs() {
    let g = Window::triangle(1.0);
    let l = RationalLattice::separable(ratio(1, 1), ratio(2, 5)).unwrap();
    let opts = SweepOptions::default();
    assert!(matches!(
        convergence_sweep(&[g.clone()], &[g.clone()], &l, &[4], &opts),
        Err(Error::PreconditionViolation(_))
    ));
    let h = painless_dual(&g, 1.0, 0.4).unwrap().h;
    assert!(matches!(
        convergence_sweep(&[g.clone()], &[h], &l, &[16, 4], &opts),
        Err(Error::InvalidArgument(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restrict_after_interp_is_identity(
        offset in -20i64..20,
        vals in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..30),
        gi in 1usize..8,
    ) {
        let gamma = [0.125, 0.25, 0.5, 1.0, 1.0 / 3.0, 0.2, 0.7][gi - 1];
        let coeffs: Vec<Complex64> = vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let s = SampledSequence::new(gamma, offset, coeffs).unwrap();
        let q = q_interp(&s).unwrap();
        let lo = gamma * (offset - 2) as f64;
        let hi = gamma * (offset + s.coeffs.len() as i64 + 2) as f64;
        let back = restrict_within(&q, gamma, lo, hi).unwrap();
        for k in back.indices() {
            prop_assert_eq!(back.get(k), s.get(k));
        }
    }

    #[test]
    fn pipeline_is_linear(scale in -5.0f64..5.0, d in prop::sample::select(vec![4usize, 9, 16, 36])) {
        let g = Window::triangle(0.8);
        let a = approx_pipeline(&g.clone().scaled(c(scale)), d).unwrap();
        let b = approx_pipeline(&g, d).unwrap();
        for (x, y) in a.vector.iter().zip(&b.vector) {
            prop_assert!((x - y * scale).norm() <= 1e-15 * scale.abs().max(1.0));
        }
    }
}
