//! Curvature calculus for fundamental pairs on parametrized surfaces: umbilic
//! detection, curvature-line tracing, index audits and a gallery of test
//! surfaces in space forms and product spaces.

// Negated comparisons route NaN to the failure branch on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod curve;
pub mod dual;
pub mod error;
pub mod exec;
pub mod expr;
pub mod forms;
pub mod gallery;
pub mod isothermal;
pub mod jet;
pub mod lines;
pub mod pairs;
pub mod product;

pub use ambient::{AmbientSpace, Rect, SurfacePatch};
pub use curve::ChartCurve;
pub use dual::Dual2;
pub use error::{Error, Result};
pub use exec::Exec;
pub use forms::FormJet;
pub use jet::Jet3;
pub use pairs::{Pair, PairField, PairJet};
