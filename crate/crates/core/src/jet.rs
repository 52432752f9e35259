//! Third-order jets in two chart variables.
//!
//! A [`Jet3`] carries a value together with every partial derivative through
//! order three in the chart variables `(u, v)`. Mixed partials have a single
//! slot per multi-index, so symmetry holds by construction. Arithmetic
//! propagates derivatives exactly via the Leibniz rule and the univariate
//! chain rule (Faà di Bruno through order three).

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::dual::Dual2;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet3 {
    pub f: f64,
    pub f_u: f64,
    pub f_v: f64,
    pub f_uu: f64,
    pub f_uv: f64,
    pub f_vv: f64,
    pub f_uuu: f64,
    pub f_uuv: f64,
    pub f_uvv: f64,
    pub f_vvv: f64,
}

impl Jet3 {
    pub fn constant(f: f64) -> Self {
        Jet3 { f, ..Default::default() }
    }

    /// Independent variable `u` seeded at `value`.
    pub fn var_u(value: f64) -> Self {
        Jet3 { f: value, f_u: 1.0, ..Default::default() }
    }

    /// Independent variable `v` seeded at `value`.
    pub fn var_v(value: f64) -> Self {
        Jet3 { f: value, f_v: 1.0, ..Default::default() }
    }

    pub fn components(&self) -> [f64; 10] {
        [self.f, self.f_u, self.f_v, self.f_uu, self.f_uv, self.f_vv, self.f_uuu, self.f_uuv, self.f_uvv, self.f_vvv]
    }

    pub fn from_components(c: [f64; 10]) -> Self {
        Jet3 {
            f: c[0],
            f_u: c[1],
            f_v: c[2],
            f_uu: c[3],
            f_uv: c[4],
            f_vv: c[5],
            f_uuu: c[6],
            f_uuv: c[7],
            f_uvv: c[8],
            f_vvv: c[9],
        }
    }

    pub const COMPONENT_NAMES: [&'static str; 10] =
        ["f", "f_u", "f_v", "f_uu", "f_uv", "f_vv", "f_uuu", "f_uuv", "f_uvv", "f_vvv"];

    fn map_components(self, other: Jet3, op: impl Fn(f64, f64) -> f64) -> Jet3 {
        let a = self.components();
        let b = other.components();
        let mut c = [0.0; 10];
        for i in 0..10 {
            c[i] = op(a[i], b[i]);
        }
        Jet3::from_components(c)
    }

    pub fn scale(self, s: f64) -> Jet3 {
        let mut c = self.components();
        c.iter_mut().for_each(|x| *x *= s);
        Jet3::from_components(c)
    }

    /// Composition `phi(self)` given the univariate derivatives of `phi`
    /// at `self.f`: `d[0] = phi`, `d[1] = phi'`, `d[2] = phi''`, `d[3] = phi'''`.
    pub fn compose(self, d: [f64; 4]) -> Jet3 {
        let g = self;
        let (d0, d1, d2, d3) = (d[0], d[1], d[2], d[3]);
        Jet3 {
            f: d0,
            f_u: d1 * g.f_u,
            f_v: d1 * g.f_v,
            f_uu: d2 * g.f_u * g.f_u + d1 * g.f_uu,
            f_uv: d2 * g.f_u * g.f_v + d1 * g.f_uv,
            f_vv: d2 * g.f_v * g.f_v + d1 * g.f_vv,
            f_uuu: d3 * g.f_u.powi(3) + 3.0 * d2 * g.f_u * g.f_uu + d1 * g.f_uuu,
            f_uuv: d3 * g.f_u * g.f_u * g.f_v + d2 * (2.0 * g.f_u * g.f_uv + g.f_v * g.f_uu) + d1 * g.f_uuv,
            f_uvv: d3 * g.f_u * g.f_v * g.f_v + d2 * (2.0 * g.f_v * g.f_uv + g.f_u * g.f_vv) + d1 * g.f_uvv,
            f_vvv: d3 * g.f_v.powi(3) + 3.0 * d2 * g.f_v * g.f_vv + d1 * g.f_vvv,
        }
    }

    pub fn sin(self) -> Jet3 {
        let (s, c) = self.f.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Jet3 {
        let (s, c) = self.f.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn tan(self) -> Jet3 {
        let t = self.f.tan();
        let sec2 = 1.0 + t * t;
        self.compose([t, sec2, 2.0 * t * sec2, 2.0 * sec2 * (1.0 + 3.0 * t * t)])
    }

    pub fn sinh(self) -> Jet3 {
        let (s, c) = (self.f.sinh(), self.f.cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(self) -> Jet3 {
        let (s, c) = (self.f.sinh(), self.f.cosh());
        self.compose([c, s, c, s])
    }

    pub fn exp(self) -> Jet3 {
        let e = self.f.exp();
        self.compose([e, e, e, e])
    }

    /// Natural logarithm; the caller guarantees `self.f > 0`.
    pub fn ln(self) -> Jet3 {
        let x = self.f;
        self.compose([x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    /// Square root; the caller guarantees `self.f > 0`.
    pub fn sqrt(self) -> Jet3 {
        let s = self.f.sqrt();
        let x = self.f;
        self.compose([s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)])
    }

    /// `self^p` for a constant real exponent `p` (requires `self.f > 0`
    /// unless `p` is an integer).
    pub fn powf(self, p: f64) -> Jet3 {
        let x = self.f;
        if p == 0.0 {
            return Jet3::constant(1.0);
        }
        let is_int = p.fract() == 0.0 && p.abs() < 1e9;
        let pw = |e: f64| -> f64 {
            if is_int {
                x.powi(e as i32)
            } else {
                x.powf(e)
            }
        };
        // falling-factorial coefficients vanish exactly for small integer
        // exponents, which keeps x = 0 finite for polynomials
        let term = |coef: f64, e: f64| if coef == 0.0 { 0.0 } else { coef * pw(e) };
        let d1 = term(p, p - 1.0);
        let d2 = term(p * (p - 1.0), p - 2.0);
        let d3 = term(p * (p - 1.0) * (p - 2.0), p - 3.0);
        self.compose([pw(p), d1, d2, d3])
    }

    pub fn recip(self) -> Jet3 {
        let x = self.f;
        let r = 1.0 / x;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn atan(self) -> Jet3 {
        let x = self.f;
        let w = 1.0 / (1.0 + x * x);
        self.compose([x.atan(), w, -2.0 * x * w * w, (6.0 * x * x - 2.0) * w * w * w])
    }

    /// Two-argument arctangent with the principal value of `f64::atan2`.
    pub fn atan2(y: Jet3, x: Jet3) -> Jet3 {
        let value = y.f.atan2(x.f);
        let mut jet = if x.f.abs() >= y.f.abs() { (y / x).atan() } else { -(x / y).atan() };
        jet.f = value;
        jet
    }

    /// First-order jet of `∂u self`.
    pub fn d_u(&self) -> Dual2 {
        Dual2::new(self.f_u, self.f_uu, self.f_uv)
    }

    /// First-order jet of `∂v self`.
    pub fn d_v(&self) -> Dual2 {
        Dual2::new(self.f_v, self.f_uv, self.f_vv)
    }

    pub fn d_uu(&self) -> Dual2 {
        Dual2::new(self.f_uu, self.f_uuu, self.f_uuv)
    }

    pub fn d_uv(&self) -> Dual2 {
        Dual2::new(self.f_uv, self.f_uuv, self.f_uvv)
    }

    pub fn d_vv(&self) -> Dual2 {
        Dual2::new(self.f_vv, self.f_uvv, self.f_vvv)
    }

    pub fn value_dual(&self) -> Dual2 {
        Dual2::new(self.f, self.f_u, self.f_v)
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|x| x.is_finite())
    }
}

impl From<f64> for Jet3 {
    fn from(f: f64) -> Self {
        Jet3::constant(f)
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, rhs: Jet3) -> Jet3 {
        self.map_components(rhs, |a, b| a + b)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: Jet3) -> Jet3 {
        self.map_components(rhs, |a, b| a - b)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-1.0)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, b: Jet3) -> Jet3 {
        let a = self;
        Jet3 {
            f: a.f * b.f,
            f_u: a.f_u * b.f + a.f * b.f_u,
            f_v: a.f_v * b.f + a.f * b.f_v,
            f_uu: a.f_uu * b.f + 2.0 * a.f_u * b.f_u + a.f * b.f_uu,
            f_uv: a.f_uv * b.f + a.f_u * b.f_v + a.f_v * b.f_u + a.f * b.f_uv,
            f_vv: a.f_vv * b.f + 2.0 * a.f_v * b.f_v + a.f * b.f_vv,
            f_uuu: a.f_uuu * b.f + 3.0 * a.f_uu * b.f_u + 3.0 * a.f_u * b.f_uu + a.f * b.f_uuu,
            f_uuv: a.f_uuv * b.f
                + a.f_uu * b.f_v
                + 2.0 * a.f_uv * b.f_u
                + 2.0 * a.f_u * b.f_uv
                + a.f_v * b.f_uu
                + a.f * b.f_uuv,
            f_uvv: a.f_uvv * b.f
                + a.f_vv * b.f_u
                + 2.0 * a.f_uv * b.f_v
                + 2.0 * a.f_v * b.f_uv
                + a.f_u * b.f_vv
                + a.f * b.f_uvv,
            f_vvv: a.f_vvv * b.f + 3.0 * a.f_vv * b.f_v + 3.0 * a.f_v * b.f_vv + a.f * b.f_vvv,
        }
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet3) -> Jet3 {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet3 {
    type Output = Jet3;
    fn add(mut self, rhs: f64) -> Jet3 {
        self.f += rhs;
        self
    }
}

impl Sub<f64> for Jet3 {
    type Output = Jet3;
    fn sub(mut self, rhs: f64) -> Jet3 {
        self.f -= rhs;
        self
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: f64) -> Jet3 {
        self.scale(rhs)
    }
}

impl Mul<Jet3> for f64 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        rhs.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn bilinear_product() {
        let u = Jet3::var_u(2.0);
        let v = Jet3::var_v(3.0);
        let p = u * v;
        assert_eq!(p.f, 6.0);
        assert_eq!(p.f_u, 3.0);
        assert_eq!(p.f_v, 2.0);
        assert_eq!(p.f_uv, 1.0);
        for (i, c) in p.components().iter().enumerate() {
            if ![0, 1, 2, 4].contains(&i) {
                assert_eq!(*c, 0.0, "component {}", Jet3::COMPONENT_NAMES[i]);
            }
        }
    }

    #[test]
    fn cubic_polynomial_exact() {
        // u^2 v + v^3 at (1.5, -0.5)
        let u = Jet3::var_u(1.5);
        let v = Jet3::var_v(-0.5);
        let p = u * u * v + v * v * v;
        assert!(close(p.f, 1.5 * 1.5 * -0.5 + -0.125, 1e-15));
        assert!(close(p.f_uu, 2.0 * -0.5, 1e-15));
        assert!(close(p.f_uuv, 2.0, 1e-15));
        assert!(close(p.f_vvv, 6.0, 1e-15));
        assert!(close(p.f_uvv, 0.0, 1e-15));
        assert!(close(p.f_vv, 6.0 * -0.5, 1e-15));
    }

    #[test]
    fn chain_rule_matches_closed_form() {
        // exp(sin(u)) third derivative: e^{sin u}(cos^3 u - 3 sin u cos u - cos u)
        let x = 0.4_f64;
        let j = Jet3::var_u(x).sin().exp();
        let e = x.sin().exp();
        let (s, c) = x.sin_cos();
        assert!(close(j.f_u, e * c, 1e-14));
        assert!(close(j.f_uu, e * (c * c - s), 1e-14));
        assert!(close(j.f_uuu, e * (c * c * c - 3.0 * s * c - c), 1e-14));
    }

    #[test]
    fn atan2_branches_agree() {
        let y = Jet3::var_u(0.3) * Jet3::var_v(1.2).cos();
        let x = Jet3::var_v(0.1) + 0.2;
        let a = Jet3::atan2(y, x);
        let b = Jet3::atan2(x, y);
        // atan2(y,x) + atan2(x,y) = pi/2 for positive x,y
        let s = a + b;
        assert!(close(s.f, std::f64::consts::FRAC_PI_2, 1e-14));
        for c in &s.components()[1..] {
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn powf_integer_negative_base() {
        let j = Jet3::var_u(-2.0).powf(3.0);
        assert_eq!(j.f, -8.0);
        assert_eq!(j.f_u, 12.0);
        assert_eq!(j.f_uu, -12.0);
        assert_eq!(j.f_uuu, 6.0);
    }
}
