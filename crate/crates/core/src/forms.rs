use serde::{Deserialize, Serialize};

use crate::dual::Dual2;

/// A quadratic form `uu du² + 2 uv du dv + vv dv²` with first partials of
/// each coefficient. Holds `(E, F, G)` for metrics and `(e, f, g)` for
/// second forms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FormJet {
    pub uu: Dual2,
    pub uv: Dual2,
    pub vv: Dual2,
}

impl FormJet {
    pub fn new(uu: Dual2, uv: Dual2, vv: Dual2) -> Self {
        FormJet { uu, uv, vv }
    }

    pub fn constant(uu: f64, uv: f64, vv: f64) -> Self {
        FormJet { uu: Dual2::constant(uu), uv: Dual2::constant(uv), vv: Dual2::constant(vv) }
    }

    pub fn zero() -> Self {
        FormJet::default()
    }

    /// `EG - F²` with partials.
    pub fn det(&self) -> Dual2 {
        self.uu * self.vv - self.uv * self.uv
    }

    /// Coefficient `(i, j)` with `i, j ∈ {0, 1}`.
    pub fn coef(&self, i: usize, j: usize) -> Dual2 {
        match (i, j) {
            (0, 0) => self.uu,
            (1, 1) => self.vv,
            _ => self.uv,
        }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.uu.val, self.uv.val], [self.uv.val, self.vv.val]]
    }

    /// Evaluates the form on a pair of chart vectors.
    pub fn apply(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        self.uu.val * x[0] * y[0] + self.uv.val * (x[0] * y[1] + x[1] * y[0]) + self.vv.val * x[1] * y[1]
    }

    pub fn norm2(&self, x: [f64; 2]) -> f64 {
        self.apply(x, x)
    }

    pub fn add(&self, o: &FormJet) -> FormJet {
        FormJet { uu: self.uu + o.uu, uv: self.uv + o.uv, vv: self.vv + o.vv }
    }

    pub fn scale(&self, s: Dual2) -> FormJet {
        FormJet { uu: self.uu * s, uv: self.uv * s, vv: self.vv * s }
    }

    /// Symmetric product `a ⊙ b = a_i b_j du^i du^j` of two one-forms given
    /// as `(a_u, a_v)` with partials.
    pub fn sym_product(a: [Dual2; 2], b: [Dual2; 2]) -> FormJet {
        FormJet { uu: a[0] * b[0], uv: (a[0] * b[1] + a[1] * b[0]) * 0.5, vv: a[1] * b[1] }
    }

    /// Values only, partials dropped.
    pub fn values(&self) -> [f64; 3] {
        [self.uu.val, self.uv.val, self.vv.val]
    }
}

/// Inverse of a 2×2 symmetric positive form at a point.
pub fn inverse2(m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}
