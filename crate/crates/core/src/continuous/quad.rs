//! Adaptive Gauss–Kronrod 7/15 quadrature for complex integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance.
pub const EPS_QUAD: f64 = 1e-12;
/// Cap on the number of subintervals per integral.
pub const MAX_SUBINTERVALS: usize = 1_000_000;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

#[derive(Clone, Copy, Debug)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
}

/// ∫_a^b f with absolute error target `tol`.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Result<Integral> {
    if !(b > a) {
        return Ok(Integral {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    let total = b - a;
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut stack = vec![(a, b)];
    let mut count = 0usize;
    while let Some((lo, hi)) = stack.pop() {
        count += 1;
        if count > MAX_SUBINTERVALS {
            return Err(Error::Quadrature {
                estimate: error,
                tol,
            });
        }
        let (v, e) = gk15(&f, lo, hi);
        let share = tol * (hi - lo) / total;
        if e <= share || (hi - lo) <= 1e-13 * total.max(1.0) {
            value += v;
            error += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    if error > tol * 10.0 {
        return Err(Error::Quadrature {
            estimate: error,
            tol,
        });
    }
    Ok(Integral { value, error })
}

/// Integrates over consecutive breakpoints, splitting the tolerance by length.
pub fn integrate_pieces(
    f: impl Fn(f64) -> Complex64,
    breaks: &[f64],
    tol: f64,
) -> Result<Integral> {
    let mut out = Integral {
        value: Complex64::new(0.0, 0.0),
        error: 0.0,
    };
    if breaks.len() < 2 {
        return Ok(out);
    }
    let total = breaks[breaks.len() - 1] - breaks[0];
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let r = integrate(&f, w[0], w[1], tol * (w[1] - w[0]) / total)?;
        out.value += r.value;
        out.error += r.error;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_oscillatory() {
        let r = integrate(|t| Complex64::new(t * t, 0.0), 0.0, 3.0, 1e-13).unwrap();
        assert!((r.value.re - 9.0).abs() < 1e-12);
        let r = integrate(|t| Complex64::from_polar(1.0, 40.0 * t), 0.0, 1.0, 1e-12).unwrap();
        let exact = (Complex64::from_polar(1.0, 40.0) - 1.0) / Complex64::new(0.0, 40.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn kink_needs_breakpoints_or_subdivision() {
        let f = |t: f64| Complex64::new((1.0 - t.abs()).max(0.0).powi(2), 0.0);
        let r = integrate(f, -1.0, 1.0, 1e-12).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-12);
        let r = integrate_pieces(f, &[-1.0, 0.0, 1.0], 1e-12).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-14);
    }
}
