//! Parametric curves in a chart, used for disk boundaries, Lemma-3 test
//! curves and winding loops.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::expr::{Expr, Params};

pub type CurveFn = dyn Fn(f64) -> Result<([f64; 2], [f64; 2])> + Send + Sync;

#[derive(Clone)]
pub enum CurveShape {
    /// Straight segment, `t ∈ [0, 1]`.
    Segment { from: [f64; 2], to: [f64; 2] },
    /// `u(t)`, `v(t)` given by expressions in `t`.
    Exprs { u: Expr, v: Expr, params: Params },
    /// Circle of the given radius, `t` the polar angle.
    Circle { center: [f64; 2], radius: f64 },
    /// Point and velocity from a closure.
    Custom(Arc<CurveFn>),
}

impl fmt::Debug for CurveShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveShape::Segment { from, to } => write!(f, "Segment({from:?} -> {to:?})"),
            CurveShape::Exprs { u, v, .. } => write!(f, "Exprs(u = {u}, v = {v})"),
            CurveShape::Circle { center, radius } => write!(f, "Circle({center:?}, r = {radius})"),
            CurveShape::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A curve `s ↦ γ(t0 + s (t1 − t0))` for `s ∈ [0, 1]`. Swapping `t0` and
/// `t1` reverses the orientation.
#[derive(Debug, Clone)]
pub struct ChartCurve {
    pub shape: CurveShape,
    pub t0: f64,
    pub t1: f64,
}

impl ChartCurve {
    pub fn segment(from: [f64; 2], to: [f64; 2]) -> Self {
        ChartCurve { shape: CurveShape::Segment { from, to }, t0: 0.0, t1: 1.0 }
    }

    pub fn exprs(u: Expr, v: Expr, params: Params, t0: f64, t1: f64) -> Self {
        ChartCurve { shape: CurveShape::Exprs { u, v, params }, t0, t1 }
    }

    /// Counter-clockwise circle starting at angle 0.
    pub fn circle(center: [f64; 2], radius: f64) -> Self {
        ChartCurve { shape: CurveShape::Circle { center, radius }, t0: 0.0, t1: std::f64::consts::TAU }
    }

    pub fn custom(f: Arc<CurveFn>, t0: f64, t1: f64) -> Self {
        ChartCurve { shape: CurveShape::Custom(f), t0, t1 }
    }

    pub fn reversed(&self) -> Self {
        ChartCurve { shape: self.shape.clone(), t0: self.t1, t1: self.t0 }
    }

    fn raw(&self, t: f64) -> Result<([f64; 2], [f64; 2])> {
        match &self.shape {
            CurveShape::Segment { from, to } => {
                let d = [to[0] - from[0], to[1] - from[1]];
                Ok(([from[0] + t * d[0], from[1] + t * d[1]], d))
            }
            CurveShape::Exprs { u, v, params } => {
                let a = u.eval_curve(t, params)?;
                let b = v.eval_curve(t, params)?;
                Ok(([a[0], b[0]], [a[1], b[1]]))
            }
            CurveShape::Circle { center, radius } => {
                let (s, c) = t.sin_cos();
                Ok(([center[0] + radius * c, center[1] + radius * s], [-radius * s, radius * c]))
            }
            CurveShape::Custom(f) => f(t),
        }
    }

    /// Point and velocity `dγ/ds` at `s ∈ [0, 1]`.
    pub fn eval(&self, s: f64) -> Result<([f64; 2], [f64; 2])> {
        let dt = self.t1 - self.t0;
        let (p, d) = self.raw(self.t0 + s * dt)?;
        Ok((p, [d[0] * dt, d[1] * dt]))
    }

    pub fn point(&self, s: f64) -> Result<[f64; 2]> {
        Ok(self.eval(s)?.0)
    }

    pub fn start(&self) -> Result<[f64; 2]> {
        self.point(0.0)
    }

    pub fn end(&self) -> Result<[f64; 2]> {
        self.point(1.0)
    }

    /// `n + 1` equally spaced parameters including both ends.
    pub fn params(n: usize) -> impl Iterator<Item = f64> {
        (0..=n).map(move |i| i as f64 / n as f64)
    }

    pub fn samples(&self, n: usize) -> Result<Vec<([f64; 2], [f64; 2])>> {
        Self::params(n).map(|s| self.eval(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{params, parse};

    #[test]
    fn reversal_flips_velocity() {
        let c = ChartCurve::exprs(parse("t").unwrap(), parse("t^2").unwrap(), params([]), 0.0, 2.0);
        let (p, d) = c.eval(0.25).unwrap();
        assert_eq!(p, [0.5, 0.25]);
        assert_eq!(d, [2.0, 2.0]);
        let r = c.reversed();
        let (p, d) = r.eval(0.75).unwrap();
        assert_eq!(p, [0.5, 0.25]);
        assert_eq!(d, [-2.0, -2.0]);
        assert_eq!(r.start().unwrap(), [2.0, 4.0]);
    }
}
