use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::time::Instant;

use heisenberg_core::approx::*;
use heisenberg_core::continuous::{
    inner_product_with_error, janssen_coefficients, painless_dual, JanssenOptions, Window,
};
use heisenberg_core::rational::ratio;
use heisenberg_core::transfer::real::RationalLattice;
use heisenberg_core::{Complex64, Error};

fn two_fifths() -> RationalLattice {
    RationalLattice::separable(ratio(1, 1), ratio(2, 5)).unwrap()
}

fn triangle_pair() -> (Window, Window) {
    let g = Window::triangle(1.0);
    let h = painless_dual(&g, 1.0, 0.4).unwrap().h;
    (g, h)
}

#[test]
fn janssen_sum_of_a_difference_matches_quadrature() {
    let (_, h) = triangle_pair();
    let k = approx_pipeline(&h, 64).unwrap().window;
    let f = difference(&h, &k);
    let adj = two_fifths().adjoint().to_f64();
    let b = janssen_coefficients(
        &[f.clone()],
        &adj,
        2.5,
        &JanssenOptions::with_radius([2, 2048]),
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for m1 in -2..=2i64 {
        for m2 in -8..=8i64 {
            let [x, w] = adj.point(m1, m2);
            let shifted = f
                .clone()
                .tf_shift(-x, -w)
                .scaled(Complex64::from_polar(1.0, -TAU * x * w));
            let q = inner_product_with_error(&f, &shifted, 1e-14).unwrap();
            worst = worst.max((q.value - b.get(m1, m2)).norm());
        }
    }
    // The sampled path is allowed an aliasing error inside the recorded tail.
    assert!(worst <= b.tail, "{worst:e} vs {:e}", b.tail);
    assert!(
        worst < 1e-5 * b.get(0, 0).re,
        "{worst:e} {:e}",
        b.get(0, 0).re
    );
}

#[test]
fn distance_upper_dominates_proxy() {
    let (_, h) = triangle_pair();
    let k = approx_pipeline(&h, 64).unwrap().window;
    let p = proxy_params(ratio(1, 1), ratio(2, 5), 256).unwrap();
    let r = module_distance(
        &[h],
        &[k],
        &two_fifths(),
        Some(&p),
        &DistanceOptions::default(),
    )
    .unwrap();
    eprintln!("{r:?}");
    let proxy = r.proxy.unwrap();
    assert_eq!(proxy.d, 360);
    assert!(r.upper > 0.0 && r.upper.is_finite());
    assert!(proxy.value <= r.upper + 1e-8);
}

#[test]
fn triangle_sweep() {
    let t = Instant::now();
    let (g, h) = triangle_pair();
    let rows = convergence_sweep(
        &[g],
        &[h],
        &two_fifths(),
        &[16, 64, 256],
        &SweepOptions::default(),
    )
    .unwrap();
    for r in &rows {
        eprintln!("{r:?}");
        assert!(r.error.is_none());
        assert!(r.proxy_opnorm.unwrap() <= r.module_distance_upper + 1e-8);
    }
    eprintln!("{:?}", t.elapsed());
    assert_eq!(
        rows.iter().map(|r| r.d).collect::<Vec<_>>(),
        vec![16, 64, 256]
    );
    assert!(rows
        .windows(2)
        .all(|w| w[1].module_distance_upper < w[0].module_distance_upper));
    assert!(rows[2].module_distance_upper < 0.1 * rows[0].module_distance_upper);
}

#[test]
fn irrational_theta_through_convergents() {
    let t = Instant::now();
    let g = vec![Window::gaussian(0.0, 1.0)];
    let mut e_norms = Vec::new();
    for tt in [ratio(2, 3), ratio(5, 7), ratio(12, 17)] {
        let (_, r) = rational_step(&g, FRAC_1_SQRT_2, tt).unwrap();
        eprintln!("{r:?}");
        assert!(r.wr_residual < 1e-6);
        e_norms.push(r.perturbation.e_norm);
    }
    // Better convergents are closer in the sense the Neumann series measures.
    assert!(e_norms.windows(2).all(|w| w[1] < w[0]), "{e_norms:?}");
    match rational_step(&g, FRAC_1_SQRT_2, ratio(1, 10)) {
        Err(Error::ThetaTooFar { norm }) => assert!(norm >= 1.0),
        other => panic!("expected ThetaTooFar, got {other:?}"),
    }
    eprintln!("{:?}", t.elapsed());
}
