use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::piecewise::{PeriodicPoly, PiecewisePoly};
use super::poly;
use super::quad::{self, Integral, EPS_QUAD};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// β·g/m with a compactly supported numerator and a positive periodic denominator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientWindow {
    pub num: PiecewisePoly,
    pub den: PeriodicPoly,
    /// Certified lower bound of the denominator.
    pub den_min: f64,
}

impl QuotientWindow {
    pub fn eval(&self, t: f64) -> Complex64 {
        let n = self.num.eval(t);
        if n == ZERO {
            return ZERO;
        }
        n / self.den.eval(t)
    }

    pub fn derivs(&self, t: f64, left: bool) -> [Complex64; 3] {
        let [f0, f1, f2] = self.num.derivs(t, left);
        if f0 == ZERO && f1 == ZERO && f2 == ZERO {
            return [ZERO; 3];
        }
        let [g0, g1, g2] = self.den.derivs(t, left);
        let q0 = f0 / g0;
        let q1 = (f1 - q0 * g1) / g0;
        let q2 = (f2 - q0 * g2 - q1 * g1 * 2.0) / g0;
        [q0, q1, q2]
    }
}

/// Symbolic windows on ℝ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Window {
    /// exp(−π (t − center)² / width²).
    Gaussian {
        center: f64,
        width: f64,
    },
    PiecewisePoly(PiecewisePoly),
    /// ∧_γ(t) = (1 − |t/γ|)⁺.
    Triangle {
        gamma: f64,
    },
    Modulated {
        base: Box<Window>,
        omega: f64,
    },
    Translated {
        base: Box<Window>,
        x: f64,
    },
    Scaled {
        base: Box<Window>,
        c: Complex64,
    },
    Sum {
        terms: Vec<Window>,
    },
    Quotient(QuotientWindow),
}

#[derive(Clone, Debug)]
pub enum Prim {
    Gaussian { width: f64 },
    Poly(Arc<PiecewisePoly>),
    Quotient(Arc<QuotientWindow>),
}

impl Prim {
    fn support(&self) -> Option<(f64, f64)> {
        match self {
            Prim::Gaussian { .. } => None,
            Prim::Poly(p) => Some(p.support()),
            Prim::Quotient(q) => Some(q.num.support()),
        }
    }

    fn derivs(&self, s: f64, left: bool) -> [Complex64; 3] {
        match self {
            Prim::Gaussian { width } => {
                let w2 = width * width;
                let g = (-PI * s * s / w2).exp();
                let a = -TAU * s / w2;
                [
                    Complex64::new(g, 0.0),
                    Complex64::new(a * g, 0.0),
                    Complex64::new((a * a - TAU / w2) * g, 0.0),
                ]
            }
            Prim::Poly(p) => p.derivs(s, left),
            Prim::Quotient(q) => q.derivs(s, left),
        }
    }

    fn eval(&self, s: f64) -> Complex64 {
        match self {
            Prim::Gaussian { width } => Complex64::new((-PI * s * s / (width * width)).exp(), 0.0),
            Prim::Poly(p) => p.eval(s),
            Prim::Quotient(q) => q.eval(s),
        }
    }

    /// Breakpoints of the primitive (in its own variable) inside (a, b).
    fn breaks(&self, a: f64, b: f64) -> Vec<f64> {
        match self {
            Prim::Gaussian { .. } => Vec::new(),
            Prim::Poly(p) => p
                .knots
                .iter()
                .copied()
                .filter(|&k| k > a && k < b)
                .collect(),
            Prim::Quotient(q) => {
                let mut v: Vec<f64> = q
                    .num
                    .knots
                    .iter()
                    .copied()
                    .filter(|&k| k > a && k < b)
                    .collect();
                v.extend(q.den.breaks_in(a, b));
                v
            }
        }
    }
}

/// coeff · e^{2πi freq t} · prim(t − shift).
#[derive(Clone, Debug)]
pub struct Atom {
    pub coeff: Complex64,
    pub shift: f64,
    pub freq: f64,
    pub prim: Prim,
}

impl Atom {
    pub fn support(&self) -> Option<(f64, f64)> {
        self.prim
            .support()
            .map(|(a, b)| (a + self.shift, b + self.shift))
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let p = self.prim.eval(t - self.shift);
        if p == ZERO {
            return ZERO;
        }
        self.coeff * Complex64::from_polar(1.0, TAU * self.freq * t) * p
    }

    pub fn derivs(&self, t: f64, left: bool) -> [Complex64; 3] {
        let [p0, p1, p2] = self.prim.derivs(t - self.shift, left);
        let e = self.coeff * Complex64::from_polar(1.0, TAU * self.freq * t);
        let ik = Complex64::new(0.0, TAU * self.freq);
        [
            e * p0,
            e * (ik * p0 + p1),
            e * (ik * ik * p0 + ik * p1 * 2.0 + p2),
        ]
    }

    /// π(x, ω) applied to the atom.
    pub fn tf_shift(&self, x: f64, omega: f64) -> Atom {
        Atom {
            coeff: self.coeff * Complex64::from_polar(1.0, -TAU * self.freq * x),
            shift: self.shift + x,
            freq: self.freq + omega,
            prim: self.prim.clone(),
        }
    }

    fn breaks(&self, a: f64, b: f64) -> Vec<f64> {
        self.prim
            .breaks(a - self.shift, b - self.shift)
            .into_iter()
            .map(|s| s + self.shift)
            .collect()
    }
}

impl Window {
    pub fn triangle(gamma: f64) -> Window {
        Window::Triangle { gamma }
    }

    pub fn gaussian(center: f64, width: f64) -> Window {
        Window::Gaussian { center, width }
    }

    pub fn sum(terms: Vec<Window>) -> Window {
        Window::Sum { terms }
    }

    pub fn scaled(self, c: Complex64) -> Window {
        Window::Scaled {
            base: Box::new(self),
            c,
        }
    }

    /// π(x,ω)w = Modulated(Translated(w, x), ω).
    pub fn tf_shift(self, x: f64, omega: f64) -> Window {
        Window::Modulated {
            base: Box::new(Window::Translated {
                base: Box::new(self),
                x,
            }),
            omega,
        }
    }

    /// Checks the invariants that deserialization cannot enforce.
    pub fn validate(&self) -> Result<()> {
        match self {
            Window::Gaussian { center, width } => {
                if !(width.is_finite() && *width > 0.0 && center.is_finite()) {
                    return Err(Error::invalid(
                        "Gaussian needs a finite center and positive width",
                    ));
                }
            }
            Window::PiecewisePoly(p) => {
                PiecewisePoly::new(p.knots.clone(), p.pieces.clone())?;
            }
            Window::Triangle { gamma } => {
                PiecewisePoly::triangle(*gamma)?;
            }
            Window::Modulated { base, omega } | Window::Translated { base, x: omega } => {
                if !omega.is_finite() {
                    return Err(Error::invalid("shift parameters must be finite"));
                }
                base.validate()?;
            }
            Window::Scaled { base, c } => {
                if !c.is_finite() {
                    return Err(Error::invalid("scale must be finite"));
                }
                base.validate()?;
            }
            Window::Sum { terms } => terms.iter().try_for_each(|t| t.validate())?,
            Window::Quotient(q) => {
                PiecewisePoly::new(q.num.knots.clone(), q.num.pieces.clone())?;
                if !(q.den_min > 0.0) {
                    return Err(Error::invalid(
                        "quotient denominator needs a positive lower bound",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Normal form as a list of atoms.
    pub fn atoms(&self) -> Vec<Atom> {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Window::Gaussian { center, width } => {
                vec![Atom {
                    coeff: one,
                    shift: *center,
                    freq: 0.0,
                    prim: Prim::Gaussian { width: *width },
                }]
            }
            Window::PiecewisePoly(p) => vec![Atom {
                coeff: one,
                shift: 0.0,
                freq: 0.0,
                prim: Prim::Poly(Arc::new(p.clone())),
            }],
            Window::Triangle { gamma } => {
                let p = PiecewisePoly::triangle(*gamma).expect("validated half-width");
                vec![Atom {
                    coeff: one,
                    shift: 0.0,
                    freq: 0.0,
                    prim: Prim::Poly(Arc::new(p)),
                }]
            }
            Window::Modulated { base, omega } => base
                .atoms()
                .into_iter()
                .map(|a| Atom {
                    freq: a.freq + omega,
                    ..a
                })
                .collect(),
            Window::Translated { base, x } => base
                .atoms()
                .into_iter()
                .map(|a| a.tf_shift(*x, 0.0))
                .collect(),
            Window::Scaled { base, c } => base
                .atoms()
                .into_iter()
                .map(|a| Atom {
                    coeff: a.coeff * c,
                    ..a
                })
                .collect(),
            Window::Sum { terms } => terms.iter().flat_map(|t| t.atoms()).collect(),
            Window::Quotient(q) => {
                vec![Atom {
                    coeff: one,
                    shift: 0.0,
                    freq: 0.0,
                    prim: Prim::Quotient(Arc::new(q.clone())),
                }]
            }
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        eval_atoms(&self.atoms(), t)
    }

    /// Convex hull of the support, or None for windows with Gaussian tails.
    pub fn support(&self) -> Option<(f64, f64)> {
        atoms_support(&self.atoms())
    }

    /// The window as a single piecewise polynomial, when it is one.
    pub fn to_piecewise_poly(&self) -> Option<PiecewisePoly> {
        let atoms = self.atoms();
        let mut parts = Vec::new();
        for a in &atoms {
            match &a.prim {
                Prim::Poly(p) if a.freq == 0.0 => parts.push(p.scale(a.coeff).translate(a.shift)),
                _ => return None,
            }
        }
        PiecewisePoly::sum(&parts).ok()
    }
}

pub fn eval_atoms(atoms: &[Atom], t: f64) -> Complex64 {
    atoms.iter().map(|a| a.eval(t)).sum()
}

pub fn derivs_atoms(atoms: &[Atom], t: f64, left: bool) -> [Complex64; 3] {
    let mut out = [ZERO; 3];
    for a in atoms {
        let d = a.derivs(t, left);
        for k in 0..3 {
            out[k] += d[k];
        }
    }
    out
}

pub fn tf_shift_atoms(atoms: &[Atom], x: f64, omega: f64) -> Vec<Atom> {
    atoms.iter().map(|a| a.tf_shift(x, omega)).collect()
}

pub fn atoms_support(atoms: &[Atom]) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for a in atoms {
        let (a0, a1) = a.support()?;
        lo = lo.min(a0);
        hi = hi.max(a1);
    }
    (lo <= hi).then_some((lo, hi))
}

/// Sorted breakpoints of all atoms inside [a, b], including a and b.
pub fn atoms_breaks(atoms: &[Atom], a: f64, b: f64) -> Vec<f64> {
    let mut v = vec![a, b];
    for at in atoms {
        if let Some((s0, s1)) = at.support() {
            for s in [s0, s1] {
                if s > a && s < b {
                    v.push(s);
                }
            }
        }
        v.extend(at.breaks(a, b));
    }
    v.sort_by(|x, y| x.total_cmp(y));
    v.dedup_by(|x, y| (*x - *y).abs() <= 1e-13 * x.abs().max(1.0));
    v
}

fn gauss_gauss(a: &Atom, wa: f64, b: &Atom, wb: f64) -> Complex64 {
    let (ia, ib) = (1.0 / (wa * wa), 1.0 / (wb * wb));
    let p = PI * (ia + ib);
    let q = Complex64::new(TAU * (a.shift * ia + b.shift * ib), TAU * (a.freq - b.freq));
    let r = -PI * (a.shift * a.shift * ia + b.shift * b.shift * ib);
    a.coeff * b.coeff.conj() * (PI / p).sqrt() * (q * q / (4.0 * p) + r).exp()
}

fn poly_poly(a: &Atom, pa: &PiecewisePoly, b: &Atom, pb: &PiecewisePoly) -> Complex64 {
    let (a0, a1) = a.support().expect("compact");
    let (b0, b1) = b.support().expect("compact");
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    if !(hi > lo) {
        return ZERO;
    }
    let mut breaks: Vec<f64> = vec![lo, hi];
    breaks.extend(
        pa.knots
            .iter()
            .map(|k| k + a.shift)
            .filter(|&k| k > lo && k < hi),
    );
    breaks.extend(
        pb.knots
            .iter()
            .map(|k| k + b.shift)
            .filter(|&k| k > lo && k < hi),
    );
    breaks.sort_by(|x, y| x.total_cmp(y));
    breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * x.abs().max(1.0));
    let kappa = TAU * (a.freq - b.freq);
    let mut acc = ZERO;
    for w in breaks.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let (Some(ia), Some(ib)) = (
            pa.locate(mid - a.shift, false),
            pb.locate(mid - b.shift, false),
        ) else {
            continue;
        };
        let qa = pa.local(ia, w[0] - a.shift);
        let qb = poly::conj(&pb.local(ib, w[0] - b.shift));
        let prod = poly::mul(&qa, &qb);
        acc += Complex64::from_polar(1.0, kappa * w[0])
            * poly::integrate_exp(&prod, kappa, w[1] - w[0]);
    }
    a.coeff * b.coeff.conj() * acc
}

fn numeric_pair(a: &Atom, b: &Atom, tol: f64) -> Result<Integral> {
    let (lo, hi) = match (a.support(), b.support()) {
        (Some((a0, a1)), Some((b0, b1))) => (a0.max(b0), a1.min(b1)),
        (Some(s), None) | (None, Some(s)) => s,
        (None, None) => unreachable!("Gaussian pairs are closed form"),
    };
    if !(hi > lo) {
        return Ok(Integral {
            value: ZERO,
            error: 0.0,
        });
    }
    let pair = [a.clone(), b.clone()];
    let breaks = atoms_breaks(&pair, lo, hi);
    quad::integrate_pieces(|t| a.eval(t) * b.eval(t).conj(), &breaks, tol)
}

/// ⟨a, b⟩ = ∫ a conj(b) for atom lists, with an absolute error bound.
pub fn inner_atoms(a: &[Atom], b: &[Atom], tol: f64) -> Result<Integral> {
    let pairs = (a.len() * b.len()).max(1) as f64;
    let mut out = Integral {
        value: ZERO,
        error: 0.0,
    };
    for x in a {
        for y in b {
            match (&x.prim, &y.prim) {
                (Prim::Gaussian { width: wa }, Prim::Gaussian { width: wb }) => {
                    out.value += gauss_gauss(x, *wa, y, *wb)
                }
                (Prim::Poly(pa), Prim::Poly(pb)) => out.value += poly_poly(x, pa, y, pb),
                _ => {
                    let r = numeric_pair(x, y, tol / pairs)?;
                    out.value += r.value;
                    out.error += r.error;
                }
            }
        }
    }
    Ok(out)
}

/// ⟨w₁, w₂⟩_{L²(ℝ)}: closed form for Gaussian and piecewise-polynomial pairs,
/// adaptive quadrature otherwise.
pub fn inner_product(w1: &Window, w2: &Window) -> Result<Complex64> {
    Ok(inner_product_with_error(w1, w2, EPS_QUAD)?.value)
}

pub fn inner_product_with_error(w1: &Window, w2: &Window, tol: f64) -> Result<Integral> {
    inner_atoms(&w1.atoms(), &w2.atoms(), tol)
}

/// ∫ w(t) e^{2πiξt} dt.
pub fn exp_integral(atoms: &[Atom], xi: f64, tol: f64) -> Result<Integral> {
    let mut out = Integral {
        value: ZERO,
        error: 0.0,
    };
    for a in atoms {
        let nu = a.freq + xi;
        let kappa = TAU * nu;
        match &a.prim {
            Prim::Gaussian { width } => {
                out.value += a.coeff
                    * Complex64::from_polar(1.0, kappa * a.shift)
                    * (width * (-PI * width * width * nu * nu).exp());
            }
            Prim::Poly(p) => {
                for (i, piece) in p.pieces.iter().enumerate() {
                    let start = p.knots[i] + a.shift;
                    out.value += a.coeff
                        * Complex64::from_polar(1.0, kappa * start)
                        * poly::integrate_exp(piece, kappa, p.knots[i + 1] - p.knots[i]);
                }
            }
            Prim::Quotient(_) => {
                let (lo, hi) = a.support().expect("compact");
                let breaks = atoms_breaks(std::slice::from_ref(a), lo, hi);
                let r = quad::integrate_pieces(
                    |t| a.eval(t) * Complex64::from_polar(1.0, TAU * xi * t),
                    &breaks,
                    tol / atoms.len() as f64,
                )?;
                out.value += r.value;
                out.error += r.error;
            }
        }
    }
    Ok(out)
}

/// Sup norms and total variations of a compactly supported window and its derivative.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VariationStats {
    pub sup: f64,
    pub sup_d1: f64,
    /// TV(f) = ∫|f'|.
    pub tv: f64,
    /// TV(f') = ∫|f''| plus the jumps of f' at breakpoints.
    pub tv_d1: f64,
}

/// Estimated by sampling and adaptive quadrature of |f'|, |f''| between breakpoints.
pub fn variation_stats(atoms: &[Atom]) -> Result<VariationStats> {
    let (lo, hi) = atoms_support(atoms)
        .ok_or_else(|| Error::invalid("variation bounds need compact support"))?;
    let breaks = atoms_breaks(atoms, lo, hi);
    let mut st = VariationStats {
        sup: 0.0,
        sup_d1: 0.0,
        tv: 0.0,
        tv_d1: 0.0,
    };
    for (i, &b) in breaks.iter().enumerate() {
        let left = if i == 0 {
            [ZERO; 3]
        } else {
            derivs_atoms(atoms, b, true)
        };
        let right = if i + 1 == breaks.len() {
            [ZERO; 3]
        } else {
            derivs_atoms(atoms, b, false)
        };
        st.tv_d1 += (right[1] - left[1]).norm();
        st.sup = st.sup.max(left[0].norm()).max(right[0].norm());
        st.sup_d1 = st.sup_d1.max(left[1].norm()).max(right[1].norm());
    }
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let inner = |t: f64| derivs_atoms(atoms, t.clamp(a, b), false);
        for k in 0..=64 {
            let t = a + (b - a) * k as f64 / 64.0;
            let d = if k == 64 {
                derivs_atoms(atoms, b, true)
            } else {
                inner(t)
            };
            st.sup = st.sup.max(d[0].norm());
            st.sup_d1 = st.sup_d1.max(d[1].norm());
        }
        let tol = 1e-10 * (b - a);
        st.tv += quad::integrate(|t| Complex64::new(inner(t)[1].norm(), 0.0), a, b, tol)?
            .value
            .re;
        st.tv_d1 += quad::integrate(|t| Complex64::new(inner(t)[2].norm(), 0.0), a, b, tol)?
            .value
            .re;
    }
    Ok(st)
}

/// V ≥ TV((f(·−x) conj g)′) for every shift x, by the product rule.
pub fn product_variation(f: &VariationStats, g: &VariationStats) -> f64 {
    f.tv_d1 * g.sup + f.sup_d1 * g.tv + f.tv * g.sup_d1 + f.sup * g.tv_d1
}
