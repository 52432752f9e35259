//! First-order jets in the two chart variables.
//!
//! Quadratic-form coefficients and every curvature quantity derived from them
//! are carried as [`Dual2`] values, so first partials (needed by the Codazzi
//! equations, the Christoffel symbols and `dH`) come out of the same
//! arithmetic that produces the values.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Dual2 {
    pub val: f64,
    pub du: f64,
    pub dv: f64,
}

impl Dual2 {
    pub const ZERO: Dual2 = Dual2 { val: 0.0, du: 0.0, dv: 0.0 };

    pub const fn new(val: f64, du: f64, dv: f64) -> Self {
        Dual2 { val, du, dv }
    }

    pub const fn constant(val: f64) -> Self {
        Dual2 { val, du: 0.0, dv: 0.0 }
    }

    /// Partial derivative along chart direction `i` (0 = u, 1 = v).
    pub fn d(&self, i: usize) -> f64 {
        if i == 0 {
            self.du
        } else {
            self.dv
        }
    }

    pub fn gradient(&self) -> [f64; 2] {
        [self.du, self.dv]
    }

    fn chain(self, f: f64, df: f64) -> Dual2 {
        Dual2 { val: f, du: df * self.du, dv: df * self.dv }
    }

    pub fn sqrt(self) -> Dual2 {
        let s = self.val.sqrt();
        self.chain(s, 0.5 / s)
    }

    pub fn recip(self) -> Dual2 {
        let r = 1.0 / self.val;
        self.chain(r, -r * r)
    }

    pub fn sqr(self) -> Dual2 {
        self * self
    }

    pub fn abs(self) -> Dual2 {
        if self.val < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn scale(self, s: f64) -> Dual2 {
        Dual2 { val: self.val * s, du: self.du * s, dv: self.dv * s }
    }
}

impl From<f64> for Dual2 {
    fn from(v: f64) -> Self {
        Dual2::constant(v)
    }
}

impl Add for Dual2 {
    type Output = Dual2;
    fn add(self, o: Dual2) -> Dual2 {
        Dual2 { val: self.val + o.val, du: self.du + o.du, dv: self.dv + o.dv }
    }
}

impl AddAssign for Dual2 {
    fn add_assign(&mut self, o: Dual2) {
        *self = *self + o;
    }
}

impl Sub for Dual2 {
    type Output = Dual2;
    fn sub(self, o: Dual2) -> Dual2 {
        Dual2 { val: self.val - o.val, du: self.du - o.du, dv: self.dv - o.dv }
    }
}

impl Neg for Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        self.scale(-1.0)
    }
}

impl Mul for Dual2 {
    type Output = Dual2;
    fn mul(self, o: Dual2) -> Dual2 {
        Dual2 { val: self.val * o.val, du: self.du * o.val + self.val * o.du, dv: self.dv * o.val + self.val * o.dv }
    }
}

impl Div for Dual2 {
    type Output = Dual2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Dual2) -> Dual2 {
        self * o.recip()
    }
}

impl Mul<f64> for Dual2 {
    type Output = Dual2;
    fn mul(self, s: f64) -> Dual2 {
        self.scale(s)
    }
}

impl Mul<Dual2> for f64 {
    type Output = Dual2;
    fn mul(self, d: Dual2) -> Dual2 {
        d.scale(self)
    }
}

impl Add<f64> for Dual2 {
    type Output = Dual2;
    fn add(mut self, s: f64) -> Dual2 {
        self.val += s;
        self
    }
}

impl Sub<f64> for Dual2 {
    type Output = Dual2;
    fn sub(mut self, s: f64) -> Dual2 {
        self.val -= s;
        self
    }
}

impl Div<f64> for Dual2 {
    type Output = Dual2;
    fn div(self, s: f64) -> Dual2 {
        self.scale(1.0 / s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_rule() {
        let x = Dual2::new(2.0, 1.0, 0.0);
        let y = Dual2::new(3.0, 0.0, 1.0);
        let q = x / y;
        assert!((q.val - 2.0 / 3.0).abs() < 1e-15);
        assert!((q.du - 1.0 / 3.0).abs() < 1e-15);
        assert!((q.dv + 2.0 / 9.0).abs() < 1e-15);
    }
}
