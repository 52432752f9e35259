use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::ast::{BinOp, Expr, ExprKind, Func, Var};
use super::quad;
use crate::error::{Error, Result};
use crate::jet::Jet3;

/// Named scalar parameters bound into an expression.
pub type Params = BTreeMap<String, f64>;

/// Number types the evaluator can run on: plain reals and order-3 jets.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn value(&self) -> f64;
    fn is_constant(&self) -> bool;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn atan2(y: Self, x: Self) -> Self;
    /// Assembles `∫_lo^hi g` from its quadrature `value` and `g_derivs(x)`,
    /// which returns `[g, g', g'', g''']` at `x`.
    fn integral(value: f64, lo: Self, hi: Self, g_derivs: &dyn Fn(f64) -> Result<[f64; 4]>) -> Result<Self>;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_constant(&self) -> bool {
        true
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        if p.fract() == 0.0 && p.abs() < 1e9 {
            self.powi(p as i32)
        } else {
            f64::powf(self, p)
        }
    }
    fn atan2(y: Self, x: Self) -> Self {
        y.atan2(x)
    }
    fn integral(value: f64, _lo: Self, _hi: Self, _g: &dyn Fn(f64) -> Result<[f64; 4]>) -> Result<Self> {
        Ok(value)
    }
}

impl Scalar for Jet3 {
    fn from_f64(x: f64) -> Self {
        Jet3::constant(x)
    }
    fn value(&self) -> f64 {
        self.f
    }
    fn is_constant(&self) -> bool {
        self.components()[1..].iter().all(|c| *c == 0.0)
    }
    fn sin(self) -> Self {
        Jet3::sin(self)
    }
    fn cos(self) -> Self {
        Jet3::cos(self)
    }
    fn tan(self) -> Self {
        Jet3::tan(self)
    }
    fn sinh(self) -> Self {
        Jet3::sinh(self)
    }
    fn cosh(self) -> Self {
        Jet3::cosh(self)
    }
    fn exp(self) -> Self {
        Jet3::exp(self)
    }
    fn ln(self) -> Self {
        Jet3::ln(self)
    }
    fn sqrt(self) -> Self {
        Jet3::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        Jet3::powf(self, p)
    }
    fn atan2(y: Self, x: Self) -> Self {
        Jet3::atan2(y, x)
    }
    fn integral(value: f64, lo: Self, hi: Self, g: &dyn Fn(f64) -> Result<[f64; 4]>) -> Result<Self> {
        // d/dhi ∫ g = g(hi): the antiderivative's derivatives are g, g', g''
        let mut out = Jet3::constant(0.0);
        if !hi.is_constant() {
            let d = g(hi.f)?;
            out = out + hi.compose([0.0, d[0], d[1], d[2]]);
        }
        if !lo.is_constant() {
            let d = g(lo.f)?;
            out = out - lo.compose([0.0, d[0], d[1], d[2]]);
        }
        out.f = value;
        Ok(out)
    }
}

/// Variable bindings for one evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Bindings<S> {
    pub u: Option<S>,
    pub v: Option<S>,
    pub t: Option<S>,
}

impl<S> Default for Bindings<S> {
    fn default() -> Self {
        Bindings { u: None, v: None, t: None }
    }
}

impl<S: Scalar> Bindings<S> {
    pub fn uv(u: S, v: S) -> Self {
        Bindings { u: Some(u), v: Some(v), t: None }
    }

    pub fn t(t: S) -> Self {
        Bindings { u: None, v: None, t: Some(t) }
    }

    fn get(&self, var: Var) -> Option<S> {
        match var {
            Var::U => self.u,
            Var::V => self.v,
            Var::T => self.t,
        }
    }

    fn point(&self) -> String {
        let mut parts = Vec::new();
        for var in [Var::U, Var::V, Var::T] {
            if let Some(s) = self.get(var) {
                parts.push(format!("{}={}", var.name(), s.value()));
            }
        }
        if parts.is_empty() {
            "constant input".to_string()
        } else {
            parts.join(", ")
        }
    }
}

struct Env<'a, S> {
    vars: Bindings<S>,
    bound: Vec<(&'a str, S)>,
    params: &'a Params,
    // describes the outermost evaluation point for error messages
    origin: &'a str,
}

fn domain_error<S: Scalar>(env: &Env<'_, S>, what: &str, e: &Expr, arg: f64) -> Error {
    Error::Domain {
        function: format!("{} (argument {}, offset {})", what, arg, e.span.start),
        point: env.origin.to_string(),
    }
}

fn eval_in<'a, S: Scalar>(e: &'a Expr, env: &Env<'a, S>) -> Result<S> {
    use ExprKind::*;
    let out = match &e.kind {
        Num(x) => S::from_f64(*x),
        Pi => S::from_f64(std::f64::consts::PI),
        Var(var) => env.vars.get(*var).ok_or_else(|| Error::Unbound(var.name().to_string()))?,
        Bound(name) => env
            .bound
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, s)| *s)
            .ok_or_else(|| Error::Unbound(name.clone()))?,
        Param(name) => {
            if let Some((_, s)) = env.bound.iter().rev().find(|(n, _)| n == name) {
                *s
            } else {
                S::from_f64(*env.params.get(name).ok_or_else(|| Error::Unbound(name.clone()))?)
            }
        }
        Neg(a) => -eval_in(a, env)?,
        Binary(op, a, b) => {
            let x = eval_in(a, env)?;
            let y = eval_in(b, env)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.value() == 0.0 {
                        return Err(domain_error(env, "division by zero", e, y.value()));
                    }
                    x / y
                }
                BinOp::Pow => power(x, y, env, e)?,
            }
        }
        Call(func, args) => {
            let x = eval_in(&args[0], env)?;
            match func {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => {
                    if x.value().cos().abs() < 1e-300 {
                        return Err(domain_error(env, "tan", e, x.value()));
                    }
                    x.tan()
                }
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Exp => x.exp(),
                Func::Log => {
                    if x.value() <= 0.0 {
                        return Err(domain_error(env, "log of nonpositive", e, x.value()));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    let val = x.value();
                    if val < 0.0 || (val == 0.0 && !x.is_constant()) {
                        return Err(domain_error(env, "sqrt of negative", e, val));
                    }
                    x.sqrt()
                }
                Func::Atan2 => {
                    let xx = eval_in(&args[1], env)?;
                    if x.value() == 0.0 && xx.value() == 0.0 {
                        return Err(domain_error(env, "atan2(0, 0)", e, 0.0));
                    }
                    S::atan2(x, xx)
                }
            }
        }
        Integral { integrand, var, lower, upper } => {
            let lo = eval_in(lower, env)?;
            let hi = eval_in(upper, env)?;
            let scalar = |r: f64| -> Result<f64> {
                let mut bound: Vec<(&str, f64)> = env.bound.iter().map(|(n, s)| (*n, s.value())).collect();
                bound.push((var.as_str(), r));
                let sub = Env { vars: Bindings::default(), bound, params: env.params, origin: env.origin };
                eval_in(integrand, &sub)
            };
            let value = quad::integrate(&scalar, lo.value(), hi.value())?;
            let g_derivs = |r: f64| -> Result<[f64; 4]> {
                let mut bound: Vec<(&str, Jet3)> =
                    env.bound.iter().map(|(n, s)| (*n, Jet3::constant(s.value()))).collect();
                bound.push((var.as_str(), Jet3::var_u(r)));
                let sub = Env { vars: Bindings::default(), bound, params: env.params, origin: env.origin };
                let j = eval_in(integrand, &sub)?;
                Ok([j.f, j.f_u, j.f_uu, j.f_uuu])
            };
            S::integral(value, lo, hi, &g_derivs)?
        }
    };
    if !out.value().is_finite() {
        return Err(domain_error(env, "non-finite result", e, out.value()));
    }
    Ok(out)
}

fn power<S: Scalar>(x: S, y: S, env: &Env<'_, S>, e: &Expr) -> Result<S> {
    let base = x.value();
    if y.is_constant() {
        let p = y.value();
        let integral = p.fract() == 0.0;
        if base < 0.0 && !integral {
            return Err(domain_error(env, "negative base with fractional exponent", e, base));
        }
        if base == 0.0 && (p < 0.0 || (!integral && !x.is_constant())) {
            return Err(domain_error(env, "zero base", e, base));
        }
        Ok(x.powf(p))
    } else {
        if base <= 0.0 {
            return Err(domain_error(env, "nonpositive base with variable exponent", e, base));
        }
        Ok((y * x.ln()).exp())
    }
}

impl Expr {
    /// Evaluates on any [`Scalar`] with the given variable bindings.
    pub fn eval_with<S: Scalar>(&self, vars: Bindings<S>, params: &Params) -> Result<S> {
        let origin = vars.point();
        let env = Env { vars, bound: Vec::new(), params, origin: &origin };
        eval_in(self, &env)
    }

    /// Real-valued evaluation at chart point `(u, v)`.
    pub fn eval_f64(&self, u: f64, v: f64, params: &Params) -> Result<f64> {
        self.eval_with(Bindings::uv(u, v), params)
    }

    /// Jet evaluation with the chart variables given as jets.
    pub fn eval_jet(&self, u: Jet3, v: Jet3, params: &Params) -> Result<Jet3> {
        self.eval_with(Bindings::uv(u, v), params)
    }

    /// Evaluates a curve expression in `t`, returning `[x, x', x'', x''']`.
    pub fn eval_curve(&self, t: f64, params: &Params) -> Result<[f64; 4]> {
        let j: Jet3 = self.eval_with(Bindings::t(Jet3::var_u(t)), params)?;
        Ok([j.f, j.f_u, j.f_uu, j.f_uuu])
    }
}

/// Jets of `u` and `v` seeded at a chart point.
pub fn seed(u: f64, v: f64) -> (Jet3, Jet3) {
    (Jet3::var_u(u), Jet3::var_v(v))
}

/// Evaluates `ast` at jets `u`, `v`; a free function form of [`Expr::eval_jet`].
pub fn eval_jet(ast: &Expr, u: Jet3, v: Jet3, params: &Params) -> Result<Jet3> {
    ast.eval_jet(u, v, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn bilinear_jet() {
        let e = parse("u*v").unwrap();
        let (u, v) = seed(2.0, 3.0);
        let j = e.eval_jet(u, v, &Params::new()).unwrap();
        assert_eq!(j.components(), [6.0, 3.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn integral_upper_bound_derivative() {
        let e = parse("integral(cos(r), r, 0, t)").unwrap();
        let j: Jet3 = e.eval_with(Bindings::t(Jet3::var_u(FRAC_PI_2)), &Params::new()).unwrap();
        assert!((j.f - 1.0).abs() < 1e-12);
        assert!(j.f_u.abs() < 1e-15);
        assert!((j.f_uu + 1.0).abs() < 1e-15);
        assert!(j.f_uuu.abs() < 1e-15);
    }

    #[test]
    fn integral_derivatives_are_integrand_jets() {
        let e = parse("integral(sqrt(1 - b^2*cos(r)^2), r, 0, v^2)").unwrap();
        let g = parse("sqrt(1 - b^2*cos(v)^2)").unwrap();
        let params: Params = [("b".to_string(), 0.7)].into_iter().collect();
        let v0 = 1.1_f64;
        let hi = Jet3::var_v(v0) * Jet3::var_v(v0);
        let j = e.eval_jet(Jet3::var_u(0.0), Jet3::var_v(v0), &params).unwrap();
        let gj = g.eval_jet(Jet3::var_u(0.0), Jet3::var_v(v0 * v0), &params).unwrap();
        let expected = hi.compose([0.0, gj.f, gj.f_v, gj.f_vv]);
        for (a, b) in j.components()[1..].iter().zip(expected.components()[1..].iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn domain_errors_carry_point() {
        let e = parse("sqrt(u - 2)").unwrap();
        let err = e.eval_f64(1.0, 0.5, &Params::new()).unwrap_err();
        match err {
            Error::Domain { point, .. } => assert!(point.contains("u=1")),
            other => panic!("{:?}", other),
        }
        assert!(parse("log(v)").unwrap().eval_f64(0.0, -1.0, &Params::new()).is_err());
    }

    #[test]
    fn unbound_parameter() {
        let e = parse("a*u").unwrap();
        assert!(matches!(e.eval_f64(1.0, 1.0, &Params::new()), Err(Error::Unbound(_))));
    }
}
