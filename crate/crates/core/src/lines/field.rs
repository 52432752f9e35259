//! Principal-direction fields and curvature-line tracing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairs::{frame_coefficients, lines_form_of, shape_of, PairField, PairJet};

use super::region::Region;

/// Skew curvature normalised by `H² + |K_e| + 1`.
pub fn q_normalized_of(p: &PairJet) -> f64 {
    shape_of(p).q_normalized()
}

/// `A`-orthonormal frame `e₁ = ∂u/√E`, `e₂ ⟂ e₁`, as chart vectors.
pub(crate) fn orthonormal_frame(p: &PairJet) -> ([f64; 2], [f64; 2]) {
    let [e, f, _] = p.a.values();
    let d = p.a.det().val;
    let s = (e * d).sqrt();
    ([1.0 / e.sqrt(), 0.0], [-f / s, e / s])
}

/// The complex coefficient `c = (P₁₁ − P₂₂)/2 − i P₁₂` of the traceless part
/// of `B` in the frame [`orthonormal_frame`]. `|c|² = q` and `arg c = −2φ₁`,
/// where `φ₁` is the frame angle of the `k₁` direction.
pub fn frame_coefficient(p: &PairJet) -> (f64, f64) {
    let c = frame_coefficients(p);
    (0.5 * (c.p11.val - c.p22.val), -c.p12.val)
}

/// Frame angle `φ₁ ∈ (−π/2, π/2]` of the `k₁` direction.
pub fn principal_frame_angle(p: &PairJet) -> f64 {
    let (re, im) = frame_coefficient(p);
    0.5 * (-im).atan2(re)
}

/// Doubled chart angle of the `k₁` line field (well defined mod 2π).
pub fn doubled_chart_angle(p: &PairJet) -> f64 {
    let d = principal_vectors(p).0;
    (2.0 * d[0] * d[1]).atan2(d[0] * d[0] - d[1] * d[1])
}

/// A-unit chart vectors along the `k₁` and `k₂` directions.
pub(crate) fn principal_vectors(p: &PairJet) -> ([f64; 2], [f64; 2]) {
    let (e1, e2) = orthonormal_frame(p);
    let phi = principal_frame_angle(p);
    let (s, c) = phi.sin_cos();
    let d1 = [c * e1[0] + s * e2[0], c * e1[1] + s * e2[1]];
    let d2 = [-s * e1[0] + c * e2[0], -s * e1[1] + c * e2[1]];
    (d1, d2)
}

/// Principal directions `(k₁, k₂)` as A-unit chart vectors.
pub fn principal_directions(pair: &dyn PairField, u: f64, v: f64, q_floor: f64) -> Result<([f64; 2], [f64; 2])> {
    let p = pair.eval(u, v)?;
    let qn = q_normalized_of(&p);
    if !(qn > q_floor) {
        return Err(Error::UmbilicPoint { u, v, q: qn });
    }
    Ok(principal_vectors(&p))
}

/// Value of `W` on the chart vector `d`, divided by `‖d‖²_A`.
pub fn lines_form_on(p: &PairJet, d: [f64; 2]) -> f64 {
    let [a, b, c] = lines_form_of(p);
    (a * d[0] * d[0] + b * d[0] * d[1] + c * d[1] * d[1]) / (p.a.det().val.sqrt() * p.a.norm2(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Lines tangent to the `k₁` direction.
    First,
    /// Lines tangent to the `k₂` direction.
    Second,
}

impl Family {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Family::First),
            2 => Ok(Family::Second),
            _ => Err(Error::InvalidParameter(format!("line family must be 1 or 2, got {i}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub family: Family,
    /// RK4 step in A-arclength.
    pub step: f64,
    pub max_len: f64,
    pub q_floor: f64,
    /// Start against the field's initial orientation.
    pub backward: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    LeftRegion,
    NearUmbilic,
    MaxLength,
    EvaluationFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub length: f64,
    pub stop: StopReason,
}

fn oriented(
    pair: &dyn PairField,
    x: [f64; 2],
    family: Family,
    prev: [f64; 2],
    q_floor: f64,
) -> std::result::Result<[f64; 2], StopReason> {
    if !pair.contains(x[0], x[1]) {
        return Err(StopReason::LeftRegion);
    }
    let p = pair.eval(x[0], x[1]).map_err(|_| StopReason::EvaluationFailed)?;
    if q_normalized_of(&p) <= 10.0 * q_floor {
        return Err(StopReason::NearUmbilic);
    }
    let (d1, d2) = principal_vectors(&p);
    let d = if family == Family::First { d1 } else { d2 };
    let dot = p.a.apply(d, prev);
    Ok(if dot < 0.0 { [-d[0], -d[1]] } else { d })
}

/// Traces a curvature line from `start` with fixed-step RK4 on the A-unit
/// direction field. The sign of the field is chosen at every stage to agree
/// with the previous step.
pub fn trace_line(pair: &dyn PairField, start: [f64; 2], opts: &TraceOptions, region: &Region) -> Result<Polyline> {
    let p0 = pair.eval(start[0], start[1])?;
    let qn = q_normalized_of(&p0);
    if !(qn > opts.q_floor) {
        return Err(Error::UmbilicPoint { u: start[0], v: start[1], q: qn });
    }
    let (d1, d2) = principal_vectors(&p0);
    let mut dir = if opts.family == Family::First { d1 } else { d2 };
    if opts.backward {
        dir = [-dir[0], -dir[1]];
    }
    let mut x = start;
    let mut points = vec![x];
    let mut length = 0.0;
    let h = opts.step;
    let stop = loop {
        if length >= opts.max_len {
            break StopReason::MaxLength;
        }
        let f = |y: [f64; 2], prev: [f64; 2]| oriented(pair, y, opts.family, prev, opts.q_floor);
        let add = |a: [f64; 2], b: [f64; 2], s: f64| [a[0] + s * b[0], a[1] + s * b[1]];
        let k1 = match f(x, dir) {
            Ok(k) => k,
            Err(why) => break why,
        };
        let stages = (|| {
            let k2 = f(add(x, k1, h / 2.0), k1)?;
            let k3 = f(add(x, k2, h / 2.0), k2)?;
            let k4 = f(add(x, k3, h), k3)?;
            Ok((k2, k3, k4))
        })();
        let (k2, k3, k4) = match stages {
            Ok(s) => s,
            Err(why) => break why,
        };
        let next = [
            x[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            x[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if !region.contains(next[0], next[1]) || !pair.contains(next[0], next[1]) {
            break StopReason::LeftRegion;
        }
        dir = [next[0] - x[0], next[1] - x[1]];
        x = next;
        points.push(x);
        length += h;
    };
    Ok(Polyline { points, length, stop })
}
