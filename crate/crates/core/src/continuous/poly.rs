//! Dense polynomials in a local variable u, coefficients low to high.

use num_complex::Complex64;

pub type Poly = Vec<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn eval(p: &[Complex64], u: f64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, c| acc * u + c)
}

pub fn derivative(p: &[Complex64]) -> Poly {
    if p.len() <= 1 {
        return vec![ZERO];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![ZERO];
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add_into(acc: &mut Poly, p: &[Complex64]) {
    if acc.len() < p.len() {
        acc.resize(p.len(), ZERO);
    }
    for (a, c) in acc.iter_mut().zip(p) {
        *a += c;
    }
}

pub fn scale(p: &[Complex64], s: Complex64) -> Poly {
    p.iter().map(|c| c * s).collect()
}

pub fn conj(p: &[Complex64]) -> Poly {
    p.iter().map(|c| c.conj()).collect()
}

/// q(u) = p(u + delta).
pub fn shift(p: &[Complex64], delta: f64) -> Poly {
    if delta == 0.0 {
        return p.to_vec();
    }
    let n = p.len();
    let mut q = vec![ZERO; n];
    // Repeated synthetic division (Horner's Taylor shift).
    let mut c = p.to_vec();
    for j in 0..n {
        for k in (j + 1..n).rev() {
            let t = c[k] * delta;
            c[k - 1] += t;
        }
        q[j] = c[j];
    }
    q
}

/// J_k = ∫_0^L u^k e^{iκu} du for k = 0..=kmax.
pub fn exp_moments(kappa: f64, len: f64, kmax: usize) -> Vec<Complex64> {
    let z = Complex64::new(0.0, kappa);
    if (kappa * len).abs() <= 4.0 {
        // Power series of the exponential; terms (κL)^m/m! shrink fast here.
        let mut out = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            let mut term = Complex64::new(1.0, 0.0);
            let mut sum = ZERO;
            for m in 0..80 {
                sum += term / (k + m + 1) as f64;
                term = term * z * len / (m + 1) as f64;
                if term.norm() < 1e-18 * sum.norm().max(1e-300) && m > 4 {
                    break;
                }
            }
            out.push(sum * len.powi(k as i32 + 1));
        }
        return out;
    }
    let e = Complex64::from_polar(1.0, kappa * len);
    let mut out = Vec::with_capacity(kmax + 1);
    out.push((e - 1.0) / z);
    for k in 1..=kmax {
        let prev = out[k - 1];
        out.push((e * len.powi(k as i32) - prev * k as f64) / z);
    }
    out
}

/// ∫_0^L p(u) e^{iκu} du.
pub fn integrate_exp(p: &[Complex64], kappa: f64, len: f64) -> Complex64 {
    if p.is_empty() || len <= 0.0 {
        return ZERO;
    }
    let j = exp_moments(kappa, len, p.len() - 1);
    p.iter().zip(&j).map(|(a, b)| a * b).sum()
}

/// Upper bound for sup_{[0,L]} |p|.
pub fn sup_bound(p: &[Complex64], len: f64) -> f64 {
    p.iter()
        .enumerate()
        .map(|(k, c)| c.norm() * len.powi(k as i32))
        .sum()
}

/// Upper bound for ∫_0^L |p|, refined by splitting [0,L] into `pieces` parts.
pub fn abs_integral_bound(p: &[Complex64], len: f64, pieces: usize) -> f64 {
    let h = len / pieces as f64;
    (0..pieces)
        .map(|i| {
            let q = shift(p, i as f64 * h);
            q.iter()
                .enumerate()
                .map(|(k, c)| c.norm() * h.powi(k as i32 + 1) / (k + 1) as f64)
                .sum::<f64>()
        })
        .sum()
}
