//! Boundary analysis of disks: vertex angles in `A`, curvature-line
//! residuals of boundary curves and boundary rotation indices.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::curve::{ChartCurve, CurveShape};
use crate::error::{Error, Result};
use crate::isothermal::{hopf_q, IsothermalChart};
use crate::pairs::{lines_form_of, PairField, PairJet};

use super::field::{orthonormal_frame, principal_frame_angle, q_normalized_of};
use super::region::DiskRegion;
use super::umbilics::{lifted_change, slope};
use super::{snap, BOUNDARY_SNAP_LIMIT};

const CURVE_SAMPLES: usize = 256;
/// Allowed deviation of `θ(k + 2)/π` from an integer.
pub const QUANTIZATION_TOL: f64 = 0.02;

fn tangents(disk: &DiskRegion, j: usize) -> Result<([f64; 2], [f64; 2], [f64; 2])> {
    let n = disk.curves.len();
    let (p, d_in) = disk.curves[j].eval(1.0)?;
    let (_, d_out) = disk.curves[(j + 1) % n].eval(0.0)?;
    Ok((p, [-d_in[0], -d_in[1]], d_out))
}

/// Interior angle at junction `j`, measured in `A`. The branch `θ` or
/// `2π − θ` is picked by probing along the A-bisector.
pub fn vertex_angle(pair: &dyn PairField, disk: &DiskRegion, j: usize) -> Result<f64> {
    let (p, t1, t2) = tangents(disk, j)?;
    let a = pair.eval_extended(p[0], p[1])?.a;
    let (n1, n2) = (a.norm2(t1).sqrt(), a.norm2(t2).sqrt());
    if !(n1 > 1e-14 && n2 > 1e-14) {
        return Err(Error::Vertex(format!("vanishing one-sided tangent at junction {j}")));
    }
    let theta0 = (a.apply(t1, t2) / (n1 * n2)).clamp(-1.0, 1.0).acos();
    let b = [t1[0] / n1 + t2[0] / n2, t1[1] / n1 + t2[1] / n2];
    let bl = b[0].hypot(b[1]);
    let scale = disk.bbox().width().min(disk.bbox().height());
    let straight = bl < 1e-8 * (t1[0].hypot(t1[1]) / n1 + t2[0].hypot(t2[1]) / n2);
    if straight {
        return Ok(PI);
    }
    let delta = 1e-4 * scale;
    let probe = [p[0] + delta * b[0] / bl, p[1] + delta * b[1] / bl];
    Ok(if disk.contains(probe[0], probe[1]) { theta0 } else { TAU - theta0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureLineCheck {
    /// Supremum of the normalised `W(γ′, γ′)` over non-umbilic samples.
    pub residual: f64,
    /// Every sample was umbilic, so the condition holds vacuously.
    pub vacuous: bool,
    pub samples: usize,
    pub skipped: usize,
}

/// `|W(γ′)| / (‖γ′‖²_A µ)` with `µ = √((b²/4 − ac)/(EG − F²))`, the scale of
/// the coefficients of `√(EG − F²)·W`.
pub fn curvature_line_residual(p: &PairJet, d: [f64; 2]) -> f64 {
    let [a, b, c] = lines_form_of(p);
    let mu = ((0.25 * b * b - a * c).max(0.0) / p.a.det().val).sqrt();
    (a * d[0] * d[0] + b * d[0] * d[1] + c * d[1] * d[1]).abs() / (p.a.norm2(d) * mu)
}

pub fn boundary_is_curvature_line(
    pair: &dyn PairField,
    curve: &ChartCurve,
    q_floor: f64,
) -> Result<CurvatureLineCheck> {
    let mut residual = 0.0f64;
    let mut skipped = 0;
    for (pt, d) in curve.samples(CURVE_SAMPLES)? {
        if d[0] == 0.0 && d[1] == 0.0 {
            return Err(Error::Precondition("boundary curve has a vanishing tangent".into()));
        }
        let p = pair.eval_extended(pt[0], pt[1])?;
        if q_normalized_of(&p) <= q_floor {
            skipped += 1;
            continue;
        }
        residual = residual.max(curvature_line_residual(&p, d));
    }
    let samples = CURVE_SAMPLES + 1;
    Ok(CurvatureLineCheck { residual, vacuous: skipped == samples, samples, skipped })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderMethod {
    /// Regression of `log|Q|` on `log r` in an isothermal chart.
    HopfRegression,
    /// Turning of the line field across the interior sector.
    SectorWinding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub junction: usize,
    pub location: [f64; 2],
    pub theta: f64,
    pub k: u32,
    pub order_method: OrderMethod,
    /// Fitted (non-integer) order before rounding.
    pub k_fit: f64,
    pub quantization_error: f64,
    /// `1 − θ(k + 2)/(2π)` before snapping.
    pub i_star: f64,
    /// Boundary index `I*/2` snapped to a multiple of 1/4.
    pub index: f64,
    pub index_raw: f64,
    pub snap_residual: f64,
    /// Index from reflection doubling, when the adjacent curves are
    /// coordinate lines of an orthogonal chart.
    pub reflection_index: Option<f64>,
    pub reflection_raw: Option<f64>,
    pub methods_agree: Option<bool>,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryOptions<'a> {
    pub chart: Option<&'a IsothermalChart>,
    pub q_floor: f64,
    /// Curvature-line residual the adjacent curves must meet.
    pub line_tol: f64,
    /// Sector radius as a fraction of the smaller bounding-box side.
    pub radius_fraction: f64,
}

impl Default for BoundaryOptions<'_> {
    fn default() -> Self {
        BoundaryOptions { chart: None, q_floor: super::DEFAULT_Q_FLOOR, line_tol: 1e-6, radius_fraction: 0.02 }
    }
}

/// Chart angle swept counter-clockwise from `t2` to `t1`.
fn ccw_angle(t2: [f64; 2], t1: [f64; 2]) -> f64 {
    let a = t1[1].atan2(t1[0]) - t2[1].atan2(t2[0]);
    let a = a.rem_euclid(TAU);
    if a == 0.0 {
        TAU
    } else {
        a
    }
}

fn choose_order(s: f64, theta: f64) -> u32 {
    let s = s.max(0.0);
    let (kf, kc) = (s.floor(), s.floor() + 1.0);
    let (rf, rc) = ((s - kf).abs(), (s - kc).abs());
    let quant = |k: f64| {
        let x = theta * (k + 2.0) / PI;
        (x - x.round()).abs()
    };
    let ambiguous = rf.max(rc) <= 2.0 * rf.min(rc);
    let k = if ambiguous {
        if quant(kf) <= quant(kc) {
            kf
        } else {
            kc
        }
    } else if rf < rc {
        kf
    } else {
        kc
    };
    k as u32
}

/// Mean `log|Q|` over interior sector directions at radius `r`.
fn sector_log_q(
    pair: &dyn PairField,
    chart: &IsothermalChart,
    p: [f64; 2],
    beta: f64,
    width: f64,
    r: f64,
) -> Result<f64> {
    let fr = [0.25, 0.5, 0.75];
    let mut acc = 0.0;
    for f in fr {
        let a = beta + f * width;
        let (u, v) = (p[0] + r * a.cos(), p[1] + r * a.sin());
        let h = hopf_q(pair, chart, u, chart.w_of_v(v))?;
        acc += h.q.norm().max(1e-300).ln();
    }
    Ok(acc / fr.len() as f64)
}

/// Lifted turning of the frame angle of the line field from the `t2` side
/// to the `t1` side of the interior sector at chart radius `r`.
fn sector_turning(pair: &dyn PairField, p: [f64; 2], beta: f64, width: f64, r: f64, q_floor: f64) -> Result<f64> {
    let angle = |t: f64| -> Result<f64> {
        let a = beta + t * width;
        let x = pair.eval_extended(p[0] + r * a.cos(), p[1] + r * a.sin())?;
        if q_normalized_of(&x) <= q_floor {
            return Err(Error::NotIsolated { u: p[0], v: p[1], reason: "umbilic inside the vertex sector".into() });
        }
        Ok(2.0 * principal_frame_angle(&x))
    };
    Ok(0.5 * lifted_change(&angle, 32)?)
}

fn is_coordinate_line(c: &ChartCurve) -> Result<Option<usize>> {
    if let CurveShape::Segment { from, to } = c.shape {
        if from[0] == to[0] {
            return Ok(Some(0));
        }
        if from[1] == to[1] {
            return Ok(Some(1));
        }
        return Ok(None);
    }
    let pts = c.samples(32)?;
    for axis in 0..2 {
        if pts.iter().all(|(p, _)| (p[axis] - pts[0].0[axis]).abs() <= 1e-12 * (1.0 + p[axis].abs())) {
            return Ok(Some(axis));
        }
    }
    Ok(None)
}

/// Reflection doubling in the A-orthonormal frame at the vertex: the sector
/// of angle `θ` is opened to a half disk, the line field is pulled back and
/// reflected across the diameter, and the full doubled-angle winding is
/// halved.
fn reflection_index(pair: &dyn PairField, p: [f64; 2], t2: [f64; 2], theta: f64, r: f64, q_floor: f64) -> Result<f64> {
    let pv = pair.eval_extended(p[0], p[1])?;
    let (e1, e2) = orthonormal_frame(&pv);
    // Frame angle of t2: solve t2 = x e1 + y e2.
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    let x = (t2[0] * e2[1] - t2[1] * e2[0]) / det;
    let y = (e1[0] * t2[1] - e1[1] * t2[0]) / det;
    let beta = y.atan2(x);
    let scale = (e1[0].hypot(e1[1])).max(e2[0].hypot(e2[1]));
    let reach = r / scale;
    let upper = |alpha: f64| -> Result<f64> {
        let g = beta + alpha * theta / PI;
        let (s, c) = g.sin_cos();
        let q = [p[0] + reach * (c * e1[0] + s * e2[0]), p[1] + reach * (c * e1[1] + s * e2[1])];
        let x = pair.eval_extended(q[0], q[1])?;
        if q_normalized_of(&x) <= q_floor {
            return Err(Error::NotIsolated { u: p[0], v: p[1], reason: "umbilic inside the doubled sector".into() });
        }
        Ok(principal_frame_angle(&x) - beta + (1.0 - theta / PI) * alpha)
    };
    let doubled = |t: f64| -> Result<f64> {
        let alpha = TAU * t;
        let psi = if alpha <= PI { upper(alpha)? } else { -upper(TAU - alpha)? };
        Ok(2.0 * psi)
    };
    let total = lifted_change(&doubled, 64)?;
    Ok(total / (2.0 * TAU))
}

pub fn boundary_index(
    pair: &dyn PairField,
    disk: &DiskRegion,
    j: usize,
    opts: &BoundaryOptions,
) -> Result<VertexRecord> {
    let n = disk.curves.len();
    for c in [&disk.curves[j], &disk.curves[(j + 1) % n]] {
        let chk = boundary_is_curvature_line(pair, c, opts.q_floor)?;
        if !chk.vacuous && chk.residual > opts.line_tol {
            return Err(Error::Precondition(format!(
                "boundary curve next to junction {j} is not a curvature line (residual {:e})",
                chk.residual
            )));
        }
    }
    let theta = vertex_angle(pair, disk, j)?;
    let (p, t1, t2) = tangents(disk, j)?;
    let beta = t2[1].atan2(t2[0]);
    let width = ccw_angle(t2, t1);
    let bb = disk.bbox();
    let r0 = opts.radius_fraction * bb.width().min(bb.height());

    let (order_method, k_fit, sector_i_star) = match opts.chart {
        Some(chart) => {
            let radii: Vec<f64> = (0..4).map(|i| r0 / f64::powi(2.0, i)).collect();
            let ys = radii.iter().map(|&r| sector_log_q(pair, chart, p, beta, width, r)).collect::<Result<Vec<_>>>()?;
            let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
            (OrderMethod::HopfRegression, slope(&xs, &ys), None)
        }
        None => {
            let turning = sector_turning(pair, p, beta, width, r0, opts.q_floor)?;
            let i_star = (turning - theta + PI) / PI;
            (OrderMethod::SectorWinding, TAU * (1.0 - i_star) / theta - 2.0, Some(i_star))
        }
    };
    let k = choose_order(k_fit, theta);
    let x = theta * (k as f64 + 2.0) / PI;
    let quantization_error = (x - x.round()).abs();
    if quantization_error > QUANTIZATION_TOL {
        return Err(Error::Vertex(format!(
            "angle {theta:.6} at junction {j} is not a multiple of pi/{} (error {quantization_error:.4})",
            k + 2
        )));
    }
    let i_star = sector_i_star.unwrap_or(1.0 - theta * (k as f64 + 2.0) / TAU);
    let index_raw = i_star / 2.0;
    let (index, snap_residual) = snap(index_raw, 0.25);
    if snap_residual > BOUNDARY_SNAP_LIMIT {
        return Err(Error::SnapResidual { u: p[0], v: p[1], residual: snap_residual, limit: BOUNDARY_SNAP_LIMIT });
    }

    let aligned =
        is_coordinate_line(&disk.curves[j])?.is_some() && is_coordinate_line(&disk.curves[(j + 1) % n])?.is_some();
    let a = pair.eval_extended(p[0], p[1])?.a;
    let orthogonal = a.uv.val.abs() <= 1e-8 * (a.uu.val * a.vv.val).sqrt();
    let (reflection_index, reflection_raw) = if aligned && orthogonal {
        let i_star = reflection_index(pair, p, t2, theta, r0, opts.q_floor)?;
        let raw = i_star / 2.0;
        (Some(snap(raw, 0.25).0), Some(raw))
    } else {
        (None, None)
    };
    Ok(VertexRecord {
        junction: j,
        location: p,
        theta,
        k,
        order_method,
        k_fit,
        quantization_error,
        i_star,
        index,
        index_raw,
        snap_residual,
        reflection_index,
        reflection_raw,
        methods_agree: reflection_index.map(|r| r == index),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Rect;
    use crate::expr::{params, parse};
    use crate::pairs::{AbstractPair, Pair};

    fn flat_pair() -> Pair {
        Pair::Abstract(AbstractPair {
            domain: Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap(),
            a: ["1", "0", "1"].map(|s| parse(s).unwrap()),
            b: ["2", "0", "4"].map(|s| parse(s).unwrap()),
            params: params([]),
        })
    }

    #[test]
    fn quadrant_and_complement_angles() {
        let pair = flat_pair();
        let sq = DiskRegion::rectangle(Rect::new(0.0, 1.0, 0.0, 1.0).unwrap()).unwrap();
        // Junction 3 closes the loop at the origin: incoming along the left
        // edge downwards, outgoing along the bottom edge.
        assert!((vertex_angle(&pair, &sq, 3).unwrap() - PI / 2.0).abs() < 1e-12);
        // L-shaped region whose reflex corner sits at the origin.
        let c = [[0.0, 0.0], [0.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, 0.0]];
        let curves = (0..6).map(|i| ChartCurve::segment(c[i], c[(i + 1) % 6])).collect();
        let l = DiskRegion::new(curves).unwrap();
        assert!((vertex_angle(&pair, &l, 5).unwrap() - 1.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn tilted_line_is_not_a_curvature_line() {
        let pair = flat_pair();
        let c = ChartCurve::segment([-0.5, -0.5], [0.5, 0.5]);
        let r = boundary_is_curvature_line(&pair, &c, 1e-6).unwrap();
        assert!((r.residual - 1.0).abs() < 1e-12);
        let axis = ChartCurve::segment([-0.5, 0.2], [0.5, 0.2]);
        assert!(boundary_is_curvature_line(&pair, &axis, 1e-6).unwrap().residual < 1e-15);
    }

    #[test]
    fn rectangle_corners_have_quarter_index() {
        let pair = flat_pair();
        let sq = DiskRegion::rectangle(Rect::new(0.0, 1.0, 0.0, 1.0).unwrap()).unwrap();
        for j in 0..4 {
            let v = boundary_index(&pair, &sq, j, &BoundaryOptions::default()).unwrap();
            assert_eq!((v.k, v.index), (0, 0.25));
            assert_eq!(v.methods_agree, Some(true));
        }
    }

    #[test]
    fn order_choice_prefers_quantization_when_ambiguous() {
        assert_eq!(choose_order(0.02, PI / 2.0), 0);
        assert_eq!(choose_order(0.98, PI), 1);
        // Halfway between 0 and 1: θ = π/3 fits k = 1 exactly.
        assert_eq!(choose_order(0.5, PI / 3.0), 1);
    }
}
