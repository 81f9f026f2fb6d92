use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::{self, Poly};
use crate::error::{Error, Result};

/// Highest degree accepted from users for compactly supported pieces.
pub const MAX_DEGREE: usize = 3;

/// A compactly supported piecewise polynomial. Piece i lives on
/// [knots[i], knots[i+1]] in the local variable u = t − knots[i]; the function
/// vanishes outside [knots[0], knots[last]].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    pub knots: Vec<f64>,
    pub pieces: Vec<Poly>,
}

fn degree(p: &[Complex64]) -> usize {
    p.iter()
        .rposition(|c| *c != Complex64::new(0.0, 0.0))
        .unwrap_or(0)
}

impl PiecewisePoly {
    /// Validated constructor: sorted knots, degree ≤ 3, continuous on ℝ.
    pub fn new(knots: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        let p = Self::raw(knots, pieces)?;
        if let Some(bad) = p.pieces.iter().find(|q| degree(q) > MAX_DEGREE) {
            return Err(Error::invalid(format!(
                "piece of degree {} exceeds {MAX_DEGREE}",
                degree(bad)
            )));
        }
        let jump = p.max_jump();
        let scale = p
            .pieces
            .iter()
            .map(|q| poly::sup_bound(q, 0.0))
            .fold(1.0, f64::max);
        if jump > 1e-9 * scale {
            return Err(Error::invalid(format!(
                "piecewise polynomial is discontinuous (jump {jump:e})"
            )));
        }
        Ok(p)
    }

    /// Structural checks only; used for derived objects such as products and derivatives.
    pub(crate) fn raw(knots: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        if knots.len() < 2 || pieces.len() + 1 != knots.len() {
            return Err(Error::invalid("need k+1 knots for k pieces, k ≥ 1"));
        }
        if knots.iter().any(|k| !k.is_finite()) || knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "knots must be finite and strictly increasing",
            ));
        }
        if pieces
            .iter()
            .any(|q| q.is_empty() || q.iter().any(|c| !c.is_finite()))
        {
            return Err(Error::invalid("pieces need finite coefficients"));
        }
        Ok(PiecewisePoly { knots, pieces })
    }

    /// ∧_γ(t) = (1 − |t/γ|) on [−γ, γ].
    pub fn triangle(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::invalid("triangle half-width must be positive"));
        }
        let c = |v: f64| Complex64::new(v, 0.0);
        Self::new(
            vec![-gamma, 0.0, gamma],
            vec![vec![c(0.0), c(1.0 / gamma)], vec![c(1.0), c(-1.0 / gamma)]],
        )
    }

    /// The continuous piecewise-linear function through (t_i, v_i), zero beyond
    /// the first and last nodes, which must carry value 0.
    pub fn linear_through(nodes: &[f64], values: &[Complex64]) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(Error::invalid("need matching nodes and values"));
        }
        let pieces = nodes
            .windows(2)
            .zip(values.windows(2))
            .map(|(t, v)| vec![v[0], (v[1] - v[0]) / (t[1] - t[0])])
            .collect();
        Self::new(nodes.to_vec(), pieces)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    pub fn len(&self) -> f64 {
        self.support().1 - self.support().0
    }

    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|q| degree(q)).max().unwrap_or(0)
    }

    /// Piece containing t, with ties at knots resolved to the right (or to the
    /// left when `left` is set). None outside the support.
    pub fn locate(&self, t: f64, left: bool) -> Option<usize> {
        let (a, b) = self.support();
        if t < a || t > b || (left && t == a) || (!left && t == b) {
            return None;
        }
        let i = if left {
            self.knots.partition_point(|&k| k < t)
        } else {
            self.knots.partition_point(|&k| k <= t)
        };
        Some(i - 1)
    }

    /// Value and first two derivatives, one-sided at knots.
    pub fn derivs(&self, t: f64, left: bool) -> [Complex64; 3] {
        let z = Complex64::new(0.0, 0.0);
        match self.locate(t, left) {
            None => [z; 3],
            Some(i) => {
                let p = &self.pieces[i];
                let u = t - self.knots[i];
                let d1 = poly::derivative(p);
                let d2 = poly::derivative(&d1);
                [poly::eval(p, u), poly::eval(&d1, u), poly::eval(&d2, u)]
            }
        }
    }

    /// Right-continuous evaluation; the right end of the support evaluates to 0,
    /// which continuity makes the value there.
    pub fn eval(&self, t: f64) -> Complex64 {
        match self.locate(t, false) {
            None => Complex64::new(0.0, 0.0),
            Some(i) => poly::eval(&self.pieces[i], t - self.knots[i]),
        }
    }

    /// Largest discontinuity, including the jumps to zero at both ends.
    pub fn max_jump(&self) -> f64 {
        let n = self.pieces.len();
        let mut worst = poly::eval(&self.pieces[0], 0.0).norm();
        for i in 0..n {
            let end = poly::eval(&self.pieces[i], self.knots[i + 1] - self.knots[i]);
            let next = if i + 1 < n {
                poly::eval(&self.pieces[i + 1], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((end - next).norm());
        }
        worst
    }

    pub fn scale(&self, c: Complex64) -> Self {
        PiecewisePoly {
            knots: self.knots.clone(),
            pieces: self.pieces.iter().map(|p| poly::scale(p, c)).collect(),
        }
    }

    pub fn translate(&self, x: f64) -> Self {
        PiecewisePoly {
            knots: self.knots.iter().map(|k| k + x).collect(),
            pieces: self.pieces.clone(),
        }
    }

    /// Piece i re-expressed in u = t − start.
    pub fn local(&self, i: usize, start: f64) -> Poly {
        poly::shift(&self.pieces[i], start - self.knots[i])
    }

    /// |p|² as a piecewise polynomial of twice the degree.
    pub fn abs_sq(&self) -> Self {
        PiecewisePoly {
            knots: self.knots.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| poly::mul(p, &poly::conj(p)))
                .collect(),
        }
    }

    /// Sum of piecewise polynomials on the union of their knots.
    pub fn sum(terms: &[PiecewisePoly]) -> Result<Self> {
        let mut knots: Vec<f64> = terms.iter().flat_map(|t| t.knots.iter().copied()).collect();
        knots.sort_by(|a, b| a.total_cmp(b));
        knots.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
        if knots.len() < 2 {
            return Err(Error::invalid("empty sum"));
        }
        let pieces = knots
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let mut acc: Poly = vec![Complex64::new(0.0, 0.0)];
                for t in terms {
                    if let Some(i) = t.locate(mid, false) {
                        poly::add_into(&mut acc, &t.local(i, w[0]));
                    }
                }
                acc
            })
            .collect();
        Self::raw(knots, pieces)
    }
}

/// A periodic piecewise polynomial on [0, period), pieces in local variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoly {
    pub period: f64,
    /// 0 = knots[0] < … < knots[last] = period.
    pub knots: Vec<f64>,
    pub pieces: Vec<Poly>,
}

impl PeriodicPoly {
    pub fn new(period: f64, knots: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        if !(period > 0.0) || knots.len() != pieces.len() + 1 || knots.is_empty() {
            return Err(Error::invalid("malformed periodic polynomial"));
        }
        if knots[0] != 0.0 || (knots[knots.len() - 1] - period).abs() > 1e-12 * period {
            return Err(Error::invalid("periodic knots must span [0, period]"));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("knots must be strictly increasing"));
        }
        Ok(PeriodicPoly {
            period,
            knots,
            pieces,
        })
    }

    fn reduce(&self, t: f64, left: bool) -> (usize, f64) {
        let mut u = t.rem_euclid(self.period);
        if left && u == 0.0 {
            u = self.period;
        }
        let i = if left {
            self.knots.partition_point(|&k| k < u)
        } else {
            self.knots.partition_point(|&k| k <= u)
        };
        let i = i.clamp(1, self.pieces.len()) - 1;
        (i, u - self.knots[i])
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let (i, u) = self.reduce(t, false);
        poly::eval(&self.pieces[i], u)
    }

    pub fn derivs(&self, t: f64, left: bool) -> [Complex64; 3] {
        let (i, u) = self.reduce(t, left);
        let p = &self.pieces[i];
        let d1 = poly::derivative(p);
        let d2 = poly::derivative(&d1);
        [poly::eval(p, u), poly::eval(&d1, u), poly::eval(&d2, u)]
    }

    /// Breakpoints k + j·period inside [a, b].
    pub fn breaks_in(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let j0 = (a / self.period).floor() as i64 - 1;
        let j1 = (b / self.period).ceil() as i64 + 1;
        for j in j0..=j1 {
            for &k in &self.knots[..self.knots.len() - 1] {
                let t = k + j as f64 * self.period;
                if t > a && t < b {
                    out.push(t);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_values() {
        let t = PiecewisePoly::triangle(1.0).unwrap();
        assert_eq!(t.eval(0.0).re, 1.0);
        assert_eq!(t.eval(1.0).re, 0.0);
        assert_eq!(t.eval(-1.0).re, 0.0);
        assert_eq!(t.eval(0.5).re, 0.5);
        assert_eq!(t.eval(3.0).re, 0.0);
        let t2 = PiecewisePoly::triangle(0.25).unwrap();
        assert_eq!(t2.eval(0.125).re, 0.5);
    }

    #[test]
    fn rejects_discontinuity_and_high_degree() {
        let c = |v: f64| Complex64::new(v, 0.0);
        assert!(PiecewisePoly::new(vec![0.0, 1.0], vec![vec![c(1.0)]]).is_err());
        let quartic = vec![c(0.0), c(0.0), c(0.0), c(0.0), c(1.0)];
        assert!(
            PiecewisePoly::new(vec![0.0, 1.0, 2.0], vec![quartic, vec![c(1.0), c(-1.0)]]).is_err()
        );
    }

    #[test]
    fn sum_of_shifted_triangles() {
        let t = PiecewisePoly::triangle(1.0).unwrap();
        let s = PiecewisePoly::sum(&[t.clone(), t.translate(1.0)]).unwrap();
        for x in [-0.5, 0.0, 0.3, 1.0, 1.7] {
            assert!((s.eval(x) - t.eval(x) - t.eval(x - 1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn periodic_evaluation() {
        let c = |v: f64| Complex64::new(v, 0.0);
        let p = PeriodicPoly::new(
            1.0,
            vec![0.0, 0.5, 1.0],
            vec![vec![c(1.0), c(1.0)], vec![c(1.5), c(-1.0)]],
        )
        .unwrap();
        assert!((p.eval(2.25).re - 1.25).abs() < 1e-14);
        assert!((p.eval(-0.25).re - 1.25).abs() < 1e-14);
        assert_eq!(p.breaks_in(0.1, 1.2), vec![0.5, 1.0]);
    }
}
