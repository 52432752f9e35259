//! Pairs built from surfaces in M²(ε)×ℝ: the Abresch–Rosenberg form
//! `B = 2H·II − ε dh² + (ε/2)‖∇h‖² I` and the K-surface metric
//! `A = I + ε/(K − ε) dh²`, plus the horizontal / gradient-line classifier
//! for curves.

use serde::{Deserialize, Serialize};

use crate::ambient::{product_geometry_of, AmbientSpace, SurfaceJet, SurfacePatch};
use crate::curve::ChartCurve;
use crate::dual::Dual2;
use crate::error::{Error, Result};
use crate::forms::FormJet;
use crate::pairs::{mean_curvature_dual, PairJet};

pub(crate) fn check_k(amb: AmbientSpace, k: f64) -> Result<()> {
    if !amb.is_product() {
        return Err(Error::NotProduct);
    }
    let min = (amb.epsilon() as f64).max(0.0);
    if !(k > min) {
        return Err(Error::InvalidParameter(format!("K-pair needs K > {min}, got {k}")));
    }
    Ok(())
}

fn dh_squared(amb: AmbientSpace, sj: &SurfaceJet) -> Result<(FormJet, Dual2)> {
    let g = product_geometry_of(amb, sj)?;
    Ok((FormJet::sym_product(g.dh, g.dh), g.nu))
}

pub(crate) fn ar_forms(amb: AmbientSpace, sj: &SurfaceJet) -> Result<(FormJet, FormJet)> {
    let (dh2, nu) = dh_squared(amb, sj)?;
    let eps = amb.epsilon() as f64;
    let h = mean_curvature_dual(&PairJet { a: sj.first, b: sj.second });
    // ‖∇h‖² = 1 − ν², keeping the product identity exact inside B.
    let grad2 = Dual2::constant(1.0) - nu * nu;
    let b = sj
        .second
        .scale(h.scale(2.0))
        .add(&dh2.scale(Dual2::constant(-eps)))
        .add(&sj.first.scale(grad2.scale(eps / 2.0)));
    Ok((sj.first, b))
}

pub(crate) fn k_forms(amb: AmbientSpace, k: f64, sj: &SurfaceJet, u: f64, v: f64) -> Result<(FormJet, FormJet)> {
    check_k(amb, k)?;
    let (dh2, _) = dh_squared(amb, sj)?;
    let eps = amb.epsilon() as f64;
    let a = sj.first.add(&dh2.scale(Dual2::constant(eps / (k - eps))));
    let det = a.det().val;
    if !(a.uu.val > 0.0 && det > 0.0) {
        return Err(Error::Internal(format!("K-pair metric not positive definite at ({u}, {v}): det {det:e}")));
    }
    Ok((a, sj.second))
}

/// `(I, B)` at a point of a product surface.
pub fn ar_pair(patch: &SurfacePatch, u: f64, v: f64) -> Result<(FormJet, FormJet)> {
    ar_forms(patch.ambient, &patch.surface_jet(u, v)?)
}

/// `(A, II)` at a point of a product surface.
pub fn k_pair(patch: &SurfacePatch, k: f64, u: f64, v: f64) -> Result<(FormJet, FormJet)> {
    check_k(patch.ambient, k)?;
    k_forms(patch.ambient, k, &patch.surface_jet(u, v)?, u, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveClass {
    Horizontal,
    GradientLine,
    Neither,
}

pub const CLASSIFY_TOL: f64 = 1e-8;
const GRADIENT_FLOOR: f64 = 1e-10;
const CURVE_SAMPLES: usize = 256;

fn cross_sine(a: &FormJet, x: [f64; 2], y: [f64; 2]) -> f64 {
    let det = a.det().val;
    det.sqrt() * (x[0] * y[1] - x[1] * y[0]).abs() / (a.norm2(x).sqrt() * a.norm2(y).sqrt())
}

/// Classifies a chart curve as horizontal (`dh(γ′) = 0`), an integral curve
/// of `∇h`, or neither. Both tests are relative to `‖γ′‖_I`, so the result
/// is independent of the parametrization.
pub fn classify_curve(patch: &SurfacePatch, curve: &ChartCurve) -> Result<CurveClass> {
    let mut horizontal = true;
    let mut gradient = true;
    for (p, d) in curve.samples(CURVE_SAMPLES)? {
        let sj = patch.surface_jet(p[0], p[1])?;
        let g = product_geometry_of(patch.ambient, &sj)?;
        let speed = sj.first.norm2(d).sqrt();
        let dh = g.dh[0].val * d[0] + g.dh[1].val * d[1];
        if dh.abs() >= CLASSIFY_TOL * speed {
            horizontal = false;
        }
        if g.grad_h_norm2.sqrt() >= GRADIENT_FLOOR && cross_sine(&sj.first, d, g.grad_h) >= CLASSIFY_TOL {
            gradient = false;
        }
    }
    Ok(if horizontal {
        CurveClass::Horizontal
    } else if gradient {
        CurveClass::GradientLine
    } else {
        CurveClass::Neither
    })
}

/// Curvature-line residuals of a curve under `(I, II)` and `(A, II)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Report {
    pub class: CurveClass,
    pub residual_first: f64,
    pub residual_k_pair: f64,
    pub tolerance: f64,
    /// Both residuals below tolerance, or both above.
    pub equivalent: bool,
}

/// `|II(γ̂, n̂)| / ‖II‖_I`, with `n` the `M`-orthogonal complement of `γ′`
/// and both unit vectors measured in I.
fn line_residual(first: &FormJet, m: &FormJet, second: &FormJet, d: [f64; 2]) -> f64 {
    let md = [m.uu.val * d[0] + m.uv.val * d[1], m.uv.val * d[0] + m.vv.val * d[1]];
    let n = [-md[1], md[0]];
    let (gd, gn) = (first.norm2(d).sqrt(), first.norm2(n).sqrt());
    let inv = crate::forms::inverse2(first.matrix());
    let b = second.matrix();
    let mut s = [[0.0; 2]; 2];
    for k in 0..2 {
        for j in 0..2 {
            s[k][j] = inv[k][0] * b[0][j] + inv[k][1] * b[1][j];
        }
    }
    let norm = (s[0][0] * s[0][0] + s[1][1] * s[1][1] + 2.0 * s[0][1] * s[1][0]).max(0.0).sqrt();
    let val = second.apply(d, n) / (gd * gn);
    if norm > 0.0 {
        val.abs() / norm
    } else {
        val.abs()
    }
}

pub fn lemma3_check(patch: &SurfacePatch, k: f64, curve: &ChartCurve) -> Result<Lemma3Report> {
    check_k(patch.ambient, k)?;
    let class = classify_curve(patch, curve)?;
    if class == CurveClass::Neither {
        return Err(Error::Precondition("curve is neither horizontal nor a gradient line of h".into()));
    }
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    for (p, d) in curve.samples(CURVE_SAMPLES)? {
        let sj = patch.surface_jet(p[0], p[1])?;
        let (a, _) = k_forms(patch.ambient, k, &sj, p[0], p[1])?;
        r1 = r1.max(line_residual(&sj.first, &sj.first, &sj.second, d));
        r2 = r2.max(line_residual(&sj.first, &a, &sj.second, d));
    }
    let tolerance = CLASSIFY_TOL;
    Ok(Lemma3Report {
        class,
        residual_first: r1,
        residual_k_pair: r2,
        tolerance,
        equivalent: (r1 < tolerance) == (r2 < tolerance),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Rect;
    use crate::expr::{params, parse};
    use crate::pairs::{pair_curvatures, Pair};

    fn cylinder() -> SurfacePatch {
        // Vertical cylinder over a circle of radius 0.8 in H².
        let src = ["cosh(0.8)", "sinh(0.8)*cos(u)", "sinh(0.8)*sin(u)", "v"];
        SurfacePatch::from_exprs(
            AmbientSpace::Product(-1),
            Rect::new(-3.0, 3.0, -1.0, 1.0).unwrap(),
            src.iter().map(|s| parse(s).unwrap()).collect(),
            params([]),
        )
        .unwrap()
    }

    #[test]
    fn k_coefficient_checks() {
        assert!(check_k(AmbientSpace::Product(1), 1.0).is_err());
        assert!(check_k(AmbientSpace::Product(-1), 0.0).is_err());
        assert!(check_k(AmbientSpace::EUCLIDEAN, 2.0).is_err());
        check_k(AmbientSpace::Product(-1), 1.0).unwrap();
    }

    #[test]
    fn cylinder_ar_mean_curvature() {
        let p = cylinder();
        let h = pair_curvatures(&Pair::Immersed(p.clone()), 0.3, 0.2).unwrap().h;
        let hb = pair_curvatures(&Pair::ProductAR(p), 0.3, 0.2).unwrap().h;
        assert!((hb - 2.0 * h * h).abs() < 1e-12);
    }

    #[test]
    fn cylinder_curve_classes() {
        let p = cylinder();
        let parallel = ChartCurve::segment([-1.0, 0.1], [1.0, 0.1]);
        let ruling = ChartCurve::segment([0.5, -0.5], [0.5, 0.5]);
        let diagonal = ChartCurve::segment([0.0, 0.0], [0.5, 0.5]);
        assert_eq!(classify_curve(&p, &parallel).unwrap(), CurveClass::Horizontal);
        assert_eq!(classify_curve(&p, &ruling).unwrap(), CurveClass::GradientLine);
        assert_eq!(classify_curve(&p, &diagonal).unwrap(), CurveClass::Neither);
        assert_eq!(classify_curve(&p, &parallel.reversed()).unwrap(), CurveClass::Horizontal);
    }
}
