use heisenberg_core::continuous::{painless_dual, Window};
use heisenberg_core::rational::ratio;
use heisenberg_core::transfer::real::*;
use heisenberg_core::Error;
use std::time::Instant;

fn triangle_pair(beta: f64) -> (Vec<Window>, Vec<Window>) {
    let g = Window::triangle(1.0);
    let h = painless_dual(&g, 1.0, beta).unwrap().h;
    (vec![g], vec![h])
}

#[test]
fn adjoint_of_separable_lattice() {
    let l = RationalLattice::separable(ratio(1, 1), ratio(2, 5)).unwrap();
    let a = l.adjoint();
    assert_eq!(
        a.generator,
        [[ratio(5, 2), ratio(0, 1)], [ratio(0, 1), ratio(1, 1)]]
    );
    assert_eq!(a.covolume() * l.covolume(), ratio(1, 1));
    assert_eq!(a.adjoint(), l.hermite());
}

#[test]
fn adjoint_of_sheared_lattice() {
    let p = ShearedParams::preset();
    let l = p.lattice().unwrap();
    let a = l.adjoint();
    // Columns (q/β, 1/α) and (1/β, 0).
    assert!(a.contains([ratio(5, 4), ratio(1, 1)]));
    assert!(a.contains([ratio(5, 2), ratio(0, 1)]));
    assert_eq!(a.covolume(), ratio(5, 2));
    assert_eq!(
        a.generator,
        [[ratio(5, 2), ratio(5, 4)], [ratio(0, 1), ratio(1, 1)]]
    );
}

#[test]
fn structural_checks() {
    let chain = ChainParams::theta_2_5();
    let c = check_real_sampling(&chain.lattice().unwrap(), chain.gamma()).unwrap();
    assert!(c.hypotheses.holds() && c.hypotheses.strengthened && c.hypotheses.structural);
    assert_eq!(c.period_count, 5);
    assert_eq!(c.c_squared, ratio(1, 2));

    let p = ShearedParams::preset();
    let c = check_real_sampling(&p.lattice().unwrap(), p.gamma()).unwrap();
    assert_eq!(p.gamma(), ratio(1, 4));
    assert_eq!(c.period_count, 10);
    assert!(c.hypotheses.holds() && c.hypotheses.strengthened);

    // Sampling on a grid that misses the lattice times violates (i).
    let l = RationalLattice::separable(ratio(1, 1), ratio(2, 5)).unwrap();
    let c = check_real_sampling(&l, ratio(1, 3)).unwrap_err();
    assert!(matches!(c, Error::InvalidArgument(_)));
    let l = RationalLattice::separable(ratio(3, 2), ratio(1, 2)).unwrap();
    let c = check_real_sampling(&l, ratio(1, 1)).unwrap();
    assert!(!c.hypotheses.lattice_in_strip);
}

#[test]
fn chain_parameters_are_validated() {
    assert_eq!(ChainParams::theta_2_5().validate().unwrap(), 10);
    let bad = ChainParams {
        b: 3,
        ..ChainParams::theta_2_5()
    };
    assert!(matches!(bad.validate(), Err(Error::InvalidArgument(_))));
}

#[test]
fn theta_two_fifths_chain() {
    let t = Instant::now();
    let (gs, hs) = triangle_pair(0.4);
    let out = chain_r_to_zd(
        &gs,
        &hs,
        &ChainParams::theta_2_5(),
        &ChainOptions { canonical: true },
    )
    .unwrap();
    let r = &out.report;
    eprintln!("{}", serde_json::to_string_pretty(r).unwrap());
    eprintln!("stage one {:?}, {:?}", out.stage_one.sampled, t.elapsed());
    assert_eq!(out.d, 10);
    assert_eq!(r.s_lambda_tilde, ratio(2, 5));
    assert!(out.stage_one.sampled.residual + out.stage_one.sampled.tail_bound < 1e-8);
    assert!(r.wr_residual_after + r.tail_bound < 1e-8);
    assert!(r.hypotheses.strengthened);
    assert_eq!(r.canonical_preserved, Some(true));
    assert!(r.bound_chain.as_ref().unwrap().holds);
}

#[test]
fn theta_one_half_chain() {
    let (gs, hs) = triangle_pair(0.5);
    let params = ChainParams {
        alpha: ratio(1, 1),
        beta: ratio(1, 2),
        a: 1,
        b: 1,
        m: 2,
        n: 2,
    };
    let out = chain_r_to_zd(&gs, &hs, &params, &ChainOptions::default()).unwrap();
    assert_eq!(out.d, 2);
    assert!(out.report.wr_residual_after + out.report.tail_bound < 1e-8);
    // √(α/a) with α = 1 is √(1/a).
    assert_eq!(out.report.c, 1.0);
}

#[test]
fn non_dual_inputs_fail_on_the_real_line() {
    let g = Window::triangle(1.0);
    let err = chain_r_to_zd(
        &[g.clone()],
        &[g],
        &ChainParams::theta_2_5(),
        &ChainOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::PreconditionViolation(_)));
}

#[test]
fn sheared_gaussian_stage_one() {
    let t = Instant::now();
    let r = sheared_sampling(&Window::gaussian(0.0, 1.0), &ShearedParams::preset()).unwrap();
    eprintln!("{r:?} {:?}", t.elapsed());
    assert!(r.sampled.residual + r.sampled.tail_bound < 1e-8);
}

#[test]
fn product_preset_is_consistent() {
    let c = ProductParams::preset().check().unwrap();
    assert_eq!((c.r_inverse, c.s_inverse), (1, 1));
    assert!(c.adjoint_pairings_integral);
    assert!(c.hypotheses.holds() && c.hypotheses.strengthened);
    assert_eq!(c.period_count, 10);
    assert_eq!(c.adjoint_count, 8);
    assert_eq!(c.s_lambda, ratio(4, 5));
    let p = ProductParams {
        q: 3,
        r: 2,
        s: 1,
        a: 6,
        m: 5,
        ..ProductParams::preset()
    };
    let c = p.check().unwrap();
    assert_eq!(c.r_inverse, 2);
    let bad = ProductParams {
        q: 2,
        r: 2,
        ..ProductParams::preset()
    };
    assert!(bad.check().is_err());
}
