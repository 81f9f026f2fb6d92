use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::piecewise::{PeriodicPoly, PiecewisePoly};
use super::poly::{self, Poly};
use super::window::{QuotientWindow, Window};
use crate::error::{Error, Result};

const GRID_START: usize = 128;
const GRID_MAX: usize = 1 << 20;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PainlessDual {
    pub h: Window,
    /// Certified lower bound of m(t) = Σ_k |g(t − αk)|².
    pub m0: f64,
    pub m: PeriodicPoly,
}

/// m(t) = Σ_k |g(t − αk)|² as an α-periodic piecewise polynomial.
pub fn periodic_square_sum(g: &PiecewisePoly, alpha: f64) -> Result<PeriodicPoly> {
    let sq = g.abs_sq();
    let (lo, hi) = sq.support();
    let k0 = ((lo - alpha) / alpha).floor() as i64;
    let k1 = (hi / alpha).ceil() as i64;
    let translates: Vec<PiecewisePoly> = (-k1..=-k0)
        .map(|k| sq.translate(alpha * k as f64))
        .collect();
    let mut knots = vec![0.0, alpha];
    for t in &translates {
        knots.extend(t.knots.iter().copied().filter(|&k| k > 0.0 && k < alpha));
    }
    knots.sort_by(|a, b| a.total_cmp(b));
    knots.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * alpha);
    let pieces: Vec<Poly> = knots
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let mut acc: Poly = vec![Complex64::new(0.0, 0.0)];
            for t in &translates {
                if let Some(i) = t.locate(mid, false) {
                    poly::add_into(&mut acc, &t.local(i, w[0]));
                }
            }
            acc
        })
        .collect();
    PeriodicPoly::new(alpha, knots, pieces)
}

/// Lower bound of a real periodic polynomial: grid minimum minus the largest
/// possible dip between grid points. Refines the grid until the bound is
/// positive or the grid minimum itself is not.
pub fn certified_lower_bound(m: &PeriodicPoly) -> f64 {
    let slope: f64 = m
        .pieces
        .iter()
        .zip(m.knots.windows(2))
        .map(|(p, w)| poly::sup_bound(&poly::derivative(p), w[1] - w[0]))
        .fold(0.0, f64::max);
    let mut n = GRID_START;
    loop {
        let h = m.period / n as f64;
        let mut min = f64::INFINITY;
        for i in 0..n {
            min = min.min(m.eval(i as f64 * h).re);
        }
        for &k in &m.knots {
            min = min.min(m.derivs(k, true)[0].re);
        }
        let bound = min - 0.5 * h * slope;
        if bound > 0.0 || min <= 0.0 || n >= GRID_MAX {
            return bound;
        }
        n *= 2;
    }
}

/// h = β g / m for Λ = αℤ×βℤ, valid when supp g fits in an interval of length 1/β.
pub fn painless_dual(g: &Window, alpha: f64, beta: f64) -> Result<PainlessDual> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::invalid("lattice parameters must be positive"));
    }
    let pp = g.to_piecewise_poly().ok_or_else(|| {
        Error::PainlessPrecondition(
            "the window must be a compactly supported piecewise polynomial".into(),
        )
    })?;
    let (lo, hi) = pp.support();
    if hi - lo > (1.0 / beta) * (1.0 + 1e-12) {
        return Err(Error::PainlessPrecondition(format!(
            "support length {} exceeds 1/beta = {}",
            hi - lo,
            1.0 / beta
        )));
    }
    let m = periodic_square_sum(&pp, alpha)?;
    let m0 = certified_lower_bound(&m);
    if !(m0 > 0.0) {
        return Err(Error::NotAFrame(format!(
            "Σ_k |g(t − αk)|² is not bounded below (bound {m0:e})"
        )));
    }
    let c0 = m.pieces[0][0];
    let constant = m.pieces.iter().all(|p| {
        (p[0] - c0).norm() <= 1e-14 * c0.norm()
            && p[1..].iter().all(|c| c.norm() <= 1e-14 * c0.norm())
    });
    let h = if constant {
        Window::PiecewisePoly(pp.scale(Complex64::new(beta, 0.0) / c0))
    } else {
        Window::Quotient(QuotientWindow {
            num: pp.scale(Complex64::new(beta, 0.0)),
            den: m.clone(),
            den_min: m0,
        })
    };
    Ok(PainlessDual { h, m0, m })
}
