//! A small expression language evaluated on reals or on order-3 jets.
//!
//! Expressions describe immersion coordinates, abstract quadratic-form
//! coefficients and boundary curves. Besides arithmetic and the usual
//! elementary functions the language has a one-variable definite integral,
//! `integral(integrand, r, lower, upper)`, whose value comes from adaptive
//! Simpson quadrature and whose derivatives with respect to the bounds come
//! from the integrand's own jets.

mod ast;
mod eval;
mod parse;
pub mod quad;

pub use ast::{BinOp, Expr, ExprKind, Func, Span, Var};
pub use eval::{eval_jet, seed, Bindings, Params, Scalar};
pub use parse::parse;

/// Builds a [`Params`] map from `(name, value)` pairs.
pub fn params<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Params {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
