use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The lattice A·ℤ² ⊂ ℝ² = phase space of ℝ; columns of A are the basis vectors,
/// first coordinate time, second frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeR2 {
    pub generator: [[f64; 2]; 2],
}

/// σ((x,ω),(x',ω')) = ωx' − ω'x; e^{2πiσ} is the symplectic cocycle on ℝ².
pub fn symplectic_form(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[1] * b[0] - b[1] * a[0]
}

impl LatticeR2 {
    pub fn new(generator: [[f64; 2]; 2]) -> Result<Self> {
        let l = LatticeR2 { generator };
        if !(l.det().abs() > 0.0) || generator.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "lattice generator must be finite and nonsingular",
            ));
        }
        Ok(l)
    }

    /// αℤ × βℤ.
    pub fn separable(alpha: f64, beta: f64) -> Result<Self> {
        Self::new([[alpha, 0.0], [0.0, beta]])
    }

    pub fn det(&self) -> f64 {
        let a = self.generator;
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }

    pub fn covolume(&self) -> f64 {
        self.det().abs()
    }

    pub fn column(&self, j: usize) -> [f64; 2] {
        [self.generator[0][j], self.generator[1][j]]
    }

    pub fn point(&self, m1: i64, m2: i64) -> [f64; 2] {
        let a = self.generator;
        [
            a[0][0] * m1 as f64 + a[0][1] * m2 as f64,
            a[1][0] * m1 as f64 + a[1][1] * m2 as f64,
        ]
    }

    /// True when the generator is diagonal, so Λ = αℤ × βℤ.
    pub fn is_rectangular(&self) -> bool {
        self.generator[0][1] == 0.0 && self.generator[1][0] == 0.0
    }

    /// Generator of the adjoint lattice {z : σ(z, λ) ∈ ℤ for all λ}, in canonical form.
    pub fn adjoint(&self) -> Result<LatticeR2> {
        lattice_adjoint_r2(self)
    }
}

/// Solves Bᵀ J A = I with J = [[0,−1],[1,0]], then canonicalizes B.
pub fn lattice_adjoint_r2(l: &LatticeR2) -> Result<LatticeR2> {
    let a = l.generator;
    let det = l.det();
    if !(det.abs() > 0.0) {
        return Err(Error::invalid("singular lattice generator"));
    }
    // JA = [[-a10, -a11], [a00, a01]], det(JA) = det A.
    let ja = [[-a[1][0], -a[1][1]], [a[0][0], a[0][1]]];
    let inv = [
        [ja[1][1] / det, -ja[0][1] / det],
        [-ja[1][0] / det, ja[0][0] / det],
    ];
    let b = [[inv[0][0], inv[1][0]], [inv[0][1], inv[1][1]]];
    Ok(canonical_basis(LatticeR2 { generator: b }))
}

fn snap(v: f64, scale: f64) -> f64 {
    if v.abs() <= 1e-12 * scale {
        0.0
    } else {
        v
    }
}

/// Column-Hermite form [[b11, b12], [0, b22]] with b11, b22 > 0 and 0 ≤ b12 < b11
/// when the frequency coordinates are commensurable; otherwise a Lagrange-reduced basis.
pub fn canonical_basis(l: LatticeR2) -> LatticeR2 {
    let mut c1 = l.column(0);
    let mut c2 = l.column(1);
    let scale = c1
        .iter()
        .chain(c2.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut steps = 0;
    while snap(c1[1], scale) != 0.0 && snap(c2[1], scale) != 0.0 && steps < 200 {
        if c1[1].abs() < c2[1].abs() {
            std::mem::swap(&mut c1, &mut c2);
        }
        let k = (c1[1] / c2[1]).round();
        c1 = [c1[0] - k * c2[0], c1[1] - k * c2[1]];
        steps += 1;
    }
    if snap(c1[1], scale) != 0.0 && snap(c2[1], scale) != 0.0 {
        return lagrange_reduce(l);
    }
    // Put the column with vanishing frequency first.
    if snap(c1[1], scale) != 0.0 {
        std::mem::swap(&mut c1, &mut c2);
    }
    c1[1] = 0.0;
    if c1[0] < 0.0 {
        c1 = [-c1[0], 0.0];
    }
    if c2[1] < 0.0 {
        c2 = [-c2[0], -c2[1]];
    }
    let k = (c2[0] / c1[0]).floor();
    c2[0] -= k * c1[0];
    c2[0] = snap(c2[0], scale);
    if c2[0] >= c1[0] * (1.0 - 1e-12) {
        c2[0] = 0.0;
    }
    let out = LatticeR2 {
        generator: [[c1[0], c2[0]], [c1[1], c2[1]]],
    };
    // Snapping a small but nonzero remainder (incommensurable frequencies)
    // distorts the lattice; keep the Hermite form only when it is exact.
    if (out.covolume() - l.covolume()).abs() > 1e-9 * l.covolume() || !same_lattice(&out, &l, 1e-9)
    {
        return lagrange_reduce(l);
    }
    out
}

fn lagrange_reduce(l: LatticeR2) -> LatticeR2 {
    let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
    let mut u = l.column(0);
    let mut v = l.column(1);
    for _ in 0..100 {
        if dot(u, u) > dot(v, v) {
            std::mem::swap(&mut u, &mut v);
        }
        let k = (dot(u, v) / dot(u, u)).round();
        if k == 0.0 {
            break;
        }
        v = [v[0] - k * u[0], v[1] - k * u[1]];
    }
    LatticeR2 {
        generator: [[u[0], v[0]], [u[1], v[1]]],
    }
}

/// True when every column of `b` is an integer combination of the columns of `a`
/// and vice versa.
pub fn same_lattice(a: &LatticeR2, b: &LatticeR2, tol: f64) -> bool {
    let contained = |outer: &LatticeR2, inner: &LatticeR2| {
        let m = outer.generator;
        let det = outer.det();
        (0..2).all(|j| {
            let v = inner.column(j);
            let c0 = (m[1][1] * v[0] - m[0][1] * v[1]) / det;
            let c1 = (-m[1][0] * v[0] + m[0][0] * v[1]) / det;
            (c0 - c0.round()).abs() < tol && (c1 - c1.round()).abs() < tol
        })
    };
    contained(a, b) && contained(b, a)
}
