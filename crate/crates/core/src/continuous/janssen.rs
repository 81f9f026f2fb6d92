use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::quad::EPS_QUAD;
use super::window::{
    self, atoms_support, inner_atoms, product_variation, tf_shift_atoms, variation_stats, Atom,
    Prim, Window,
};
use crate::algebra::LatticeElement;
use crate::error::{Error, Result};
use crate::timefreq::LatticeR2;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JanssenOptions {
    /// Target for the certified ℓ¹ tail when the box is chosen adaptively.
    pub eps_tail: f64,
    /// Fixed box radii in lattice coordinates; chosen adaptively when absent.
    pub radius: Option<[i64; 2]>,
    pub max_radius: i64,
    /// Budget for the aliasing error of the sampled path, summed over the box.
    pub alias_tol: f64,
}

impl Default for JanssenOptions {
    fn default() -> Self {
        JanssenOptions {
            eps_tail: 1e-12,
            radius: None,
            max_radius: 4096,
            alias_tol: 1e-10,
        }
    }
}

impl JanssenOptions {
    pub fn with_radius(radius: [i64; 2]) -> Self {
        JanssenOptions {
            radius: Some(radius),
            ..Default::default()
        }
    }
}

enum Kind {
    Gaussian,
    Poly,
    Compact,
}

fn classify(lists: &[Vec<Atom>]) -> Result<Kind> {
    let all = |p: fn(&Prim) -> bool| lists.iter().flatten().all(|a| p(&a.prim));
    if all(|p| matches!(p, Prim::Gaussian { .. })) {
        Ok(Kind::Gaussian)
    } else if all(|p| matches!(p, Prim::Poly(_))) {
        Ok(Kind::Poly)
    } else if lists.iter().all(|l| atoms_support(l).is_some()) {
        Ok(Kind::Compact)
    } else {
        Err(Error::invalid(
            "Janssen coefficients need all-Gaussian or all-compact windows",
        ))
    }
}

/// π(λ°)* f = e^{−2πiωx} π(−x,−ω) f.
fn adjoint_shift(f: &[Atom], p: [f64; 2]) -> Vec<Atom> {
    let phase = Complex64::from_polar(1.0, -TAU * p[0] * p[1]);
    tf_shift_atoms(f, -p[0], -p[1])
        .into_iter()
        .map(|a| Atom {
            coeff: a.coeff * phase,
            ..a
        })
        .collect()
}

fn closed_coeff(gs: &[Vec<Atom>], fs: &[Vec<Atom>], p: [f64; 2]) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (g, f) in gs.iter().zip(fs) {
        acc += inner_atoms(g, &adjoint_shift(f, p), EPS_QUAD)?.value;
    }
    Ok(acc)
}

fn ring(r: i64) -> Vec<(i64, i64)> {
    if r == 0 {
        return vec![(0, 0)];
    }
    let mut v = Vec::with_capacity(8 * r as usize);
    for m in -r..=r {
        v.push((m, -r));
        v.push((m, r));
    }
    for m in -r + 1..r {
        v.push((-r, m));
        v.push((r, m));
    }
    v
}

fn ring_sum(gs: &[Vec<Atom>], fs: &[Vec<Atom>], lattice: &LatticeR2, r: i64) -> Result<f64> {
    ring(r)
        .par_iter()
        .map(|&(m1, m2)| closed_coeff(gs, fs, lattice.point(m1, m2)).map(|c| c.norm()))
        .sum()
}

/// Σ_j ⟨g_j, π(λ°)* f_j⟩ over a box of Λ°, as a B-side element with the given
/// weight and a recorded bound on the dropped ℓ¹ mass.
///
/// Gaussian windows use closed forms on any lattice; the tail is extrapolated
/// geometrically from ring sums outside the box. Compactly supported windows
/// need a rectangular Λ°; there the time direction is finite and the frequency
/// tail follows from the 1/ω² decay with the product-rule variation bound.
pub fn janssen_cross(
    fs: &[Window],
    gs: &[Window],
    adjoint: &LatticeR2,
    weight: f64,
    opts: &JanssenOptions,
) -> Result<LatticeElement> {
    if fs.len() != gs.len() || fs.is_empty() {
        return Err(Error::invalid(
            "tuples must be nonempty and of equal length",
        ));
    }
    let fa: Vec<Vec<Atom>> = fs.iter().map(|w| w.atoms()).collect();
    let ga: Vec<Vec<Atom>> = gs.iter().map(|w| w.atoms()).collect();
    let both: Vec<Vec<Atom>> = fa.iter().chain(&ga).cloned().collect();
    match classify(&both)? {
        Kind::Gaussian => gaussian_box(&fa, &ga, adjoint, weight, opts),
        kind => compact_box(&fa, &ga, adjoint, weight, opts, matches!(kind, Kind::Poly)),
    }
}

/// ⟨(g_j), (g_j)⟩_{Λ°} with weight 1/s(Λ).
pub fn janssen_coefficients(
    gs: &[Window],
    adjoint: &LatticeR2,
    weight: f64,
    opts: &JanssenOptions,
) -> Result<LatticeElement> {
    janssen_cross(gs, gs, adjoint, weight, opts)
}

fn gaussian_box(
    fa: &[Vec<Atom>],
    ga: &[Vec<Atom>],
    lattice: &LatticeR2,
    weight: f64,
    opts: &JanssenOptions,
) -> Result<LatticeElement> {
    let mut rings = vec![ring_sum(ga, fa, lattice, 0)?];
    let total0 = rings[0].max(f64::MIN_POSITIVE);
    // Extrapolated mass beyond ring r, from the observed geometric decay.
    let beyond = |rings: &[f64]| -> Option<f64> {
        let n = rings.len();
        if n < 3 {
            return None;
        }
        let (a, b) = (rings[n - 2], rings[n - 1]);
        if b <= 1e-30 * total0 {
            return Some(b);
        }
        let q = b / a;
        (q < 0.9).then(|| b * q / (1.0 - q))
    };
    let r = match opts.radius {
        Some([r1, r2]) => {
            if r1 != r2 {
                return Err(Error::invalid("Gaussian boxes are square"));
            }
            r1
        }
        None => {
            let mut r = 0;
            loop {
                r += 1;
                if r > opts.max_radius {
                    return Err(Error::Truncation {
                        tail: rings[rings.len() - 1],
                        tol: opts.eps_tail,
                    });
                }
                rings.push(ring_sum(ga, fa, lattice, r)?);
                if beyond(&rings).is_some_and(|t| t <= opts.eps_tail) {
                    break r;
                }
            }
        }
    };
    let mut out = LatticeElement::zero(*lattice, [r, r], weight);
    let values: Vec<Result<Complex64>> = (0..out.coeffs.len())
        .into_par_iter()
        .map(|i| closed_coeff(ga, fa, out.point(i)))
        .collect();
    for (c, v) in out.coeffs.iter_mut().zip(values) {
        *c = v?;
    }
    // Tail: rings beyond the box, summed until the geometric extrapolation is negligible.
    let mut outside = Vec::new();
    let mut tail = 0.0;
    let mut rr = r;
    loop {
        rr += 1;
        let s = ring_sum(ga, fa, lattice, rr)?;
        tail += s;
        outside.push(s);
        if let Some(t) =
            beyond(&outside).filter(|&t| t <= 1e-3 * tail.max(1e-300) || t <= 1e-30 * total0)
        {
            tail += t;
            break;
        }
        if rr > r + 4 * (r + 8) {
            return Err(Error::Truncation {
                tail,
                tol: opts.eps_tail,
            });
        }
    }
    out.tail = tail;
    Ok(out)
}

fn compact_box(
    fa: &[Vec<Atom>],
    ga: &[Vec<Atom>],
    lattice: &LatticeR2,
    weight: f64,
    opts: &JanssenOptions,
    closed: bool,
) -> Result<LatticeElement> {
    if !lattice.is_rectangular() {
        return Err(Error::invalid(
            "compactly supported windows need a rectangular adjoint lattice",
        ));
    }
    let b11 = lattice.generator[0][0];
    let b22 = lattice.generator[1][1];
    // x-range where some g_j(t) f_j(t + x) can be nonzero.
    let mut xlo = f64::INFINITY;
    let mut xhi = f64::NEG_INFINITY;
    let mut v_total = 0.0;
    for (f, g) in fa.iter().zip(ga) {
        let (f0, f1) = atoms_support(f).expect("compact");
        let (g0, g1) = atoms_support(g).expect("compact");
        xlo = xlo.min(f0 - g1);
        xhi = xhi.max(f1 - g0);
        v_total += product_variation(&variation_stats(f)?, &variation_stats(g)?);
    }
    let (m_lo, m_hi) = {
        let (a, b) = (xlo / b11, xhi / b11);
        (a.min(b).ceil() as i64, a.max(b).floor() as i64)
    };
    let nx = (m_hi - m_lo + 1).max(0) as f64;
    let freq_tail = |m: i64| nx * 2.0 * v_total / (4.0 * PI * PI * b22 * b22 * m.max(1) as f64);
    let r2 = match opts.radius {
        Some([_, r2]) => r2,
        None => {
            let need = (nx * 2.0 * v_total / (4.0 * PI * PI * b22 * b22 * opts.eps_tail)).ceil();
            if need > opts.max_radius as f64 {
                return Err(Error::Truncation {
                    tail: freq_tail(opts.max_radius),
                    tol: opts.eps_tail,
                });
            }
            need as i64
        }
    };
    let r1 = match opts.radius {
        Some([r1, _]) => r1,
        None => m_lo.abs().max(m_hi.abs()),
    };
    let mut out = LatticeElement::zero(*lattice, [r1, r2], weight);
    let mut tail = if r2 == 0 && nx > 0.0 {
        f64::INFINITY
    } else {
        freq_tail(r2)
    };
    if r1 < m_lo.abs().max(m_hi.abs()) {
        // Columns outside the box are not bounded by anything cheaper than computing them.
        return Err(Error::invalid(
            "time radius of the box misses nonzero columns",
        ));
    }
    let columns: Vec<i64> = (m_lo..=m_hi).collect();
    let alias_budget = (opts.alias_tol).max(0.1 * tail);
    let results: Vec<Result<(i64, Vec<Complex64>, f64)>> = columns
        .par_iter()
        .map(|&m1| {
            let x = b11 * m1 as f64;
            if closed {
                let vals = (-r2..=r2)
                    .map(|m2| closed_coeff(ga, fa, lattice.point(m1, m2)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((m1, vals, 0.0))
            } else {
                sampled_column(fa, ga, x, b22, r2, v_total, alias_budget / nx.max(1.0))
                    .map(|(v, e)| (m1, v, e))
            }
        })
        .collect();
    for r in results {
        let (m1, vals, err) = r?;
        tail += err;
        for (k, v) in vals.into_iter().enumerate() {
            out.set(m1, k as i64 - r2, v);
        }
    }
    out.tail = tail;
    Ok(out)
}

/// Frequency coefficients of one x-column by sampling the periodized product
/// u_x(t) = Σ_j g_j(t) conj(f_j(t + x)) and one FFT. Returns the values for
/// m = −r..=r and the summed aliasing bound.
fn sampled_column(
    fa: &[Vec<Atom>],
    ga: &[Vec<Atom>],
    x: f64,
    b22: f64,
    r: i64,
    v_total: f64,
    budget: f64,
) -> Result<(Vec<Complex64>, f64)> {
    let period = 1.0 / b22;
    let count = (2 * r + 1) as f64;
    // Per coefficient |error| ≤ V P² / (4 N²).
    let n_alias = (v_total * period * period * count / (4.0 * budget)).sqrt();
    let n = (n_alias.max((2 * r + 2) as f64) as usize).next_power_of_two();
    if n > 1 << 24 {
        return Err(Error::Truncation {
            tail: v_total * period * period * count / (4.0 * (n as f64).powi(2)),
            tol: budget,
        });
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (f, g) in fa.iter().zip(ga) {
        let (f0, f1) = atoms_support(f).expect("compact");
        let (g0, g1) = atoms_support(g).expect("compact");
        lo = lo.min(g0.max(f0 - x));
        hi = hi.max(g1.min(f1 - x));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    if hi > lo {
        let h = period / n as f64;
        let j0 = (lo / h).floor() as i64;
        let j1 = (hi / h).ceil() as i64;
        for j in j0..=j1 {
            let t = j as f64 * h;
            let mut u = Complex64::new(0.0, 0.0);
            for (f, g) in fa.iter().zip(ga) {
                let gv = window::eval_atoms(g, t);
                if gv != Complex64::new(0.0, 0.0) {
                    u += gv * window::eval_atoms(f, t + x).conj();
                }
            }
            buf[j.rem_euclid(n as i64) as usize] += u * h;
        }
    }
    // Σ_n U(nP/N) e^{2πi m n / N} is the unnormalized inverse DFT.
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let vals = (-r..=r)
        .map(|m| {
            let omega = b22 * m as f64;
            Complex64::from_polar(1.0, TAU * omega * x) * buf[m.rem_euclid(n as i64) as usize]
        })
        .collect();
    let err = v_total * period * period * count / (4.0 * (n as f64).powi(2));
    Ok((vals, err))
}

/// g·b = w Σ b(λ°) π(λ°)* g as a finite sum of shifted copies of g.
/// The recorded tail of b is not carried over; callers bound it separately.
pub fn right_action(g: &Window, b: &LatticeElement) -> Window {
    let terms = (0..b.coeffs.len())
        .filter(|&i| b.coeffs[i] != Complex64::new(0.0, 0.0))
        .map(|i| {
            let [x, omega] = b.point(i);
            let c = b.coeffs[i] * b.weight * Complex64::from_polar(1.0, -TAU * omega * x);
            g.clone().tf_shift(-x, -omega).scaled(c)
        })
        .collect();
    Window::sum(terms)
}
