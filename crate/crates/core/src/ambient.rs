//! Ambient spaces as flat-model submanifolds and immersed surface patches.
//!
//! Every ambient space lives inside a flat vector space with a constant
//! diagonal bilinear form: ℝ³ itself, the unit sphere S³ ⊂ ℝ⁴, the upper
//! hyperboloid H³ in Minkowski ℝ⁴ (time coordinate first), and the products
//! S²×ℝ, H²×ℝ ⊂ ℝ⁴ with the height as last coordinate. Because the form is
//! constant, the second fundamental form of a surface is the flat second
//! derivative of the immersion paired with a unit normal tangent to the
//! model.
//!
//! Normal orientation: `⟨N, X⟩` is a positive multiple of
//! `det(X, ψ_u, ψ_v)` in ℝ³ and of `det(X, ψ_u, ψ_v, c)` in ℝ⁴, where `c`
//! is the position vector (space forms) or its horizontal part (products).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dual::Dual2;
use crate::error::{Error, Result};
use crate::expr::{Expr, Params};
use crate::forms::FormJet;
use crate::jet::Jet3;

/// Lower bound on `EG - F²` below which a chart point is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Model residual accepted by patch validation.
pub const MODEL_TOL: f64 = 1e-9;
/// Probe grid size used by patch validation.
pub const PROBE_GRID: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "epsilon")]
pub enum AmbientSpace {
    /// ℝ³ (ε = 0), S³ (ε = 1) or H³ (ε = −1).
    SpaceForm(i8),
    /// M²(ε)×ℝ with ε = ±1.
    Product(i8),
}

impl AmbientSpace {
    pub const EUCLIDEAN: AmbientSpace = AmbientSpace::SpaceForm(0);
    pub const SPHERE: AmbientSpace = AmbientSpace::SpaceForm(1);
    pub const HYPERBOLIC: AmbientSpace = AmbientSpace::SpaceForm(-1);

    pub fn space_form(epsilon: i8) -> Result<Self> {
        match epsilon {
            -1..=1 => Ok(AmbientSpace::SpaceForm(epsilon)),
            _ => Err(Error::InvalidParameter(format!("space-form curvature must be -1, 0 or 1, got {epsilon}"))),
        }
    }

    pub fn product(epsilon: i8) -> Result<Self> {
        match epsilon {
            -1 | 1 => Ok(AmbientSpace::Product(epsilon)),
            _ => Err(Error::InvalidParameter(format!("product factor curvature must be -1 or 1, got {epsilon}"))),
        }
    }

    pub fn epsilon(&self) -> i8 {
        match *self {
            AmbientSpace::SpaceForm(e) | AmbientSpace::Product(e) => e,
        }
    }

    pub fn is_product(&self) -> bool {
        matches!(self, AmbientSpace::Product(_))
    }

    /// Dimension of the flat model.
    pub fn dim(&self) -> usize {
        match self {
            AmbientSpace::SpaceForm(0) => 3,
            _ => 4,
        }
    }

    /// Diagonal entry `η_ii` of the flat bilinear form.
    pub fn metric_sign(&self, i: usize) -> f64 {
        if i == 0 && self.epsilon() == -1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).enumerate().map(|(i, (x, y))| self.metric_sign(i) * x * y).sum()
    }

    fn inner_dual(&self, a: &[Dual2], b: &[Dual2]) -> Dual2 {
        let mut s = Dual2::ZERO;
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            s += (*x * *y).scale(self.metric_sign(i));
        }
        s
    }

    /// `|⟨p, p⟩ − ε|` over the model coordinates (horizontal ones for
    /// products); zero for ℝ³.
    pub fn residual(&self, p: &[f64]) -> f64 {
        let eps = self.epsilon() as f64;
        match self {
            AmbientSpace::SpaceForm(0) => 0.0,
            AmbientSpace::SpaceForm(_) => (self.inner(p, p) - eps).abs(),
            AmbientSpace::Product(_) => (self.inner(&p[..3], &p[..3]) - eps).abs(),
        }
    }

    pub fn name(&self) -> &'static str {
        match *self {
            AmbientSpace::SpaceForm(0) => "R3",
            AmbientSpace::SpaceForm(1) => "S3",
            AmbientSpace::SpaceForm(_) => "H3",
            AmbientSpace::Product(1) => "S2xR",
            AmbientSpace::Product(_) => "H2xR",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "R3" => Some(AmbientSpace::EUCLIDEAN),
            "S3" => Some(AmbientSpace::SPHERE),
            "H3" => Some(AmbientSpace::HYPERBOLIC),
            "S2xR" => Some(AmbientSpace::Product(1)),
            "H2xR" => Some(AmbientSpace::Product(-1)),
            _ => None,
        }
    }
}

/// Closed chart rectangle `[u0, u1] × [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Result<Self> {
        if !(u0 < u1 && v0 < v1) || ![u0, u1, v0, v1].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter(format!("empty or non-finite rectangle [{u0}, {u1}] x [{v0}, {v1}]")));
        }
        Ok(Rect { u0, u1, v0, v1 })
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let su = 1e-12 * (self.u1 - self.u0).max(1.0);
        let sv = 1e-12 * (self.v1 - self.v0).max(1.0);
        u >= self.u0 - su && u <= self.u1 + su && v >= self.v0 - sv && v <= self.v1 + sv
    }

    pub fn width(&self) -> f64 {
        self.u1 - self.u0
    }

    pub fn height(&self) -> f64 {
        self.v1 - self.v0
    }

    /// Point at fractional position `(s, t) ∈ [0, 1]²`.
    pub fn lerp(&self, s: f64, t: f64) -> (f64, f64) {
        (self.u0 + s * self.width(), self.v0 + t * self.height())
    }

    /// Centres of an `n × n` cell grid, row-major in `v`.
    pub fn cell_centres(&self, n: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                out.push(self.lerp((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64));
            }
        }
        out
    }

    /// Rectangle shrunk by `margin` on every side.
    pub fn inset(&self, margin: f64) -> Rect {
        Rect { u0: self.u0 + margin, u1: self.u1 - margin, v0: self.v0 + margin, v1: self.v1 - margin }
    }
}

pub type ImmersionFn = dyn Fn(Jet3, Jet3) -> Result<Vec<Jet3>> + Send + Sync;

/// Coordinate functions of an immersion into the flat model.
#[derive(Clone)]
pub enum Immersion {
    Exprs(Vec<Expr>),
    Custom(Arc<ImmersionFn>),
}

impl fmt::Debug for Immersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Immersion::Exprs(e) => {
                let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                f.debug_tuple("Exprs").field(&parts).finish()
            }
            Immersion::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A chart domain with an immersion into an ambient model.
#[derive(Debug, Clone)]
pub struct SurfacePatch {
    pub ambient: AmbientSpace,
    pub domain: Rect,
    /// Optional region mask; a point belongs to the patch when the mask
    /// expression is nonnegative there.
    pub mask: Option<Expr>,
    pub immersion: Immersion,
    pub params: Params,
}

/// Immersion jets at a point together with I, N and II.
#[derive(Debug, Clone)]
pub struct SurfaceJet {
    pub coords: Vec<Jet3>,
    pub first: FormJet,
    pub normal: Vec<Dual2>,
    pub second: FormJet,
}

impl SurfaceJet {
    pub fn position(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.f).collect()
    }

    pub fn tangent_u(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.f_u).collect()
    }

    pub fn tangent_v(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.f_v).collect()
    }

    pub fn normal_value(&self) -> Vec<f64> {
        self.normal.iter().map(|n| n.val).collect()
    }
}

/// Height and angle data of a surface in M²(ε)×ℝ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductGeometry {
    pub h: f64,
    /// `(h_u, h_v)` with their partials.
    pub dh: [Dual2; 2],
    /// Chart components of the I-gradient of `h`.
    pub grad_h: [f64; 2],
    /// `‖∇h‖²` in I, computed by inverting the metric.
    pub grad_h_norm2: f64,
    /// `ν = ⟨N, ξ⟩` with partials.
    pub nu: Dual2,
    /// Tangent part of the vertical field, `ξᵀ = ξ − νN`, in model coordinates.
    pub xi_tangent: [f64; 4],
    /// `|‖∇h‖² + ν² − 1|`.
    pub identity_residual: f64,
}

impl SurfacePatch {
    pub fn new(ambient: AmbientSpace, domain: Rect, immersion: Immersion, params: Params) -> Result<Self> {
        if let Immersion::Exprs(e) = &immersion {
            if e.len() != ambient.dim() {
                return Err(Error::InvalidParameter(format!(
                    "{} needs {} coordinate expressions, got {}",
                    ambient.name(),
                    ambient.dim(),
                    e.len()
                )));
            }
        }
        Ok(SurfacePatch { ambient, domain, mask: None, immersion, params })
    }

    pub fn from_exprs(ambient: AmbientSpace, domain: Rect, exprs: Vec<Expr>, params: Params) -> Result<Self> {
        Self::new(ambient, domain, Immersion::Exprs(exprs), params)
    }

    pub fn with_mask(mut self, mask: Expr) -> Self {
        self.mask = Some(mask);
        self
    }

    pub fn with_domain(mut self, domain: Rect) -> Self {
        self.domain = domain;
        self
    }

    /// Whether `(u, v)` lies in the rectangle and passes the mask.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        if !self.domain.contains(u, v) {
            return false;
        }
        match &self.mask {
            Some(m) => m.eval_f64(u, v, &self.params).map(|x| x >= 0.0).unwrap_or(false),
            None => true,
        }
    }

    /// Order-3 jets of every model coordinate at `(u, v)`.
    pub fn eval_immersion(&self, u: f64, v: f64) -> Result<Vec<Jet3>> {
        if !self.contains(u, v) {
            return Err(Error::OutOfDomain { u, v });
        }
        self.eval_unchecked(u, v)
    }

    /// Jets without the domain check (used for one-sided probes just
    /// outside a boundary).
    pub fn eval_unchecked(&self, u: f64, v: f64) -> Result<Vec<Jet3>> {
        let (ju, jv) = (Jet3::var_u(u), Jet3::var_v(v));
        let coords = match &self.immersion {
            Immersion::Exprs(e) => e.iter().map(|x| x.eval_jet(ju, jv, &self.params)).collect::<Result<Vec<_>>>()?,
            Immersion::Custom(f) => f(ju, jv)?,
        };
        if coords.len() != self.ambient.dim() {
            return Err(Error::Internal(format!("immersion returned {} coordinates", coords.len())));
        }
        if let Some(bad) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Domain { function: format!("coordinate {bad}"), point: format!("u = {u}, v = {v}") });
        }
        Ok(coords)
    }

    pub fn position(&self, u: f64, v: f64) -> Result<Vec<f64>> {
        Ok(self.eval_immersion(u, v)?.iter().map(|c| c.f).collect())
    }

    /// Full first-/second-order surface data at a point.
    pub fn surface_jet(&self, u: f64, v: f64) -> Result<SurfaceJet> {
        let coords = self.eval_immersion(u, v)?;
        self.surface_jet_from(coords, u, v)
    }

    pub(crate) fn surface_jet_from(&self, coords: Vec<Jet3>, u: f64, v: f64) -> Result<SurfaceJet> {
        let amb = self.ambient;
        let pu: Vec<Dual2> = coords.iter().map(|c| c.d_u()).collect();
        let pv: Vec<Dual2> = coords.iter().map(|c| c.d_v()).collect();
        let first = FormJet::new(amb.inner_dual(&pu, &pu), amb.inner_dual(&pu, &pv), amb.inner_dual(&pv, &pv));
        let det = first.det().val;
        if !(det > DEGENERACY_TOL) {
            return Err(Error::DegenerateMetric { u, v, det });
        }
        let raw = match amb.dim() {
            3 => cross(&pu, &pv),
            _ => {
                let c: Vec<Dual2> = match amb {
                    AmbientSpace::Product(_) => {
                        vec![coords[0].value_dual(), coords[1].value_dual(), coords[2].value_dual(), Dual2::ZERO]
                    }
                    _ => coords.iter().map(|x| x.value_dual()).collect(),
                };
                normal4(amb, &pu, &pv, &c)
            }
        };
        let n2 = amb.inner_dual(&raw, &raw);
        if !(n2.val > DEGENERACY_TOL * DEGENERACY_TOL) {
            return Err(Error::DegenerateMetric { u, v, det: n2.val });
        }
        let inv = n2.sqrt().recip();
        let normal: Vec<Dual2> = raw.iter().map(|x| *x * inv).collect();
        let puu: Vec<Dual2> = coords.iter().map(|c| c.d_uu()).collect();
        let puv: Vec<Dual2> = coords.iter().map(|c| c.d_uv()).collect();
        let pvv: Vec<Dual2> = coords.iter().map(|c| c.d_vv()).collect();
        let second =
            FormJet::new(amb.inner_dual(&puu, &normal), amb.inner_dual(&puv, &normal), amb.inner_dual(&pvv, &normal));
        Ok(SurfaceJet { coords, first, normal, second })
    }

    pub fn first_form(&self, u: f64, v: f64) -> Result<FormJet> {
        Ok(self.surface_jet(u, v)?.first)
    }

    pub fn unit_normal(&self, u: f64, v: f64) -> Result<Vec<Dual2>> {
        Ok(self.surface_jet(u, v)?.normal)
    }

    pub fn second_form(&self, u: f64, v: f64) -> Result<FormJet> {
        Ok(self.surface_jet(u, v)?.second)
    }

    pub fn model_residual(&self, u: f64, v: f64) -> Result<f64> {
        let p = self.eval_unchecked(u, v)?;
        let p: Vec<f64> = p.iter().map(|c| c.f).collect();
        Ok(self.ambient.residual(&p))
    }

    pub fn product_geometry(&self, u: f64, v: f64) -> Result<ProductGeometry> {
        let sj = self.surface_jet(u, v)?;
        product_geometry_of(self.ambient, &sj)
    }

    /// Gaussian curvature of I by the Brioschi formula, using second
    /// derivatives of the metric coefficients.
    pub fn intrinsic_curvature(&self, u: f64, v: f64) -> Result<f64> {
        let coords = self.eval_immersion(u, v)?;
        brioschi(self.ambient, &coords, u, v)
    }

    /// Checks the model residual and the rank of dψ on a probe grid of cell
    /// centres. Masked-out probes are skipped.
    pub fn validate(&self) -> Result<()> {
        for (u, v) in self.domain.cell_centres(PROBE_GRID) {
            if !self.contains(u, v) {
                continue;
            }
            let r = self.model_residual(u, v)?;
            if !(r < MODEL_TOL) {
                return Err(Error::Validation(format!(
                    "model residual {r:e} at ({u}, {v}) exceeds {MODEL_TOL:e} for {}",
                    self.ambient.name()
                )));
            }
            self.surface_jet(u, v).map_err(|e| Error::Validation(e.to_string()))?;
        }
        Ok(())
    }
}

pub(crate) fn product_geometry_of(amb: AmbientSpace, sj: &SurfaceJet) -> Result<ProductGeometry> {
    if !amb.is_product() {
        return Err(Error::NotProduct);
    }
    let hj = sj.coords[3];
    let dh = [hj.d_u(), hj.d_v()];
    let i = sj.first.matrix();
    let inv = crate::forms::inverse2(i);
    let g0 = inv[0][0] * dh[0].val + inv[0][1] * dh[1].val;
    let g1 = inv[1][0] * dh[0].val + inv[1][1] * dh[1].val;
    let grad_h_norm2 = g0 * dh[0].val + g1 * dh[1].val;
    let nu = sj.normal[3];
    let mut xi_tangent = [0.0; 4];
    for (k, slot) in xi_tangent.iter_mut().enumerate() {
        let xi = if k == 3 { 1.0 } else { 0.0 };
        *slot = xi - nu.val * sj.normal[k].val;
    }
    Ok(ProductGeometry {
        h: hj.f,
        dh,
        grad_h: [g0, g1],
        grad_h_norm2,
        nu,
        xi_tangent,
        identity_residual: (grad_h_norm2 + nu.val * nu.val - 1.0).abs(),
    })
}

fn cross(a: &[Dual2], b: &[Dual2]) -> Vec<Dual2> {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn det3(m: [[Dual2; 3]; 3]) -> Dual2 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `N^i = η_ii det(e_i, a, b, c)`, so that `⟨N, X⟩ = det(X, a, b, c)`.
fn normal4(amb: AmbientSpace, a: &[Dual2], b: &[Dual2], c: &[Dual2]) -> Vec<Dual2> {
    (0..4)
        .map(|i| {
            let cols: Vec<usize> = (0..4).filter(|&j| j != i).collect();
            let row = |r: &[Dual2]| [r[cols[0]], r[cols[1]], r[cols[2]]];
            let minor = det3([row(a), row(b), row(c)]);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            minor.scale(sign * amb.metric_sign(i))
        })
        .collect()
}

fn brioschi(amb: AmbientSpace, coords: &[Jet3], u: f64, v: f64) -> Result<f64> {
    let get = |f: fn(&Jet3) -> f64| -> Vec<f64> { coords.iter().map(f).collect() };
    let (pu, pv) = (get(|c| c.f_u), get(|c| c.f_v));
    let (puu, puv, pvv) = (get(|c| c.f_uu), get(|c| c.f_uv), get(|c| c.f_vv));
    let (puuv, puvv) = (get(|c| c.f_uuv), get(|c| c.f_uvv));
    let ip = |a: &[f64], b: &[f64]| amb.inner(a, b);
    let e = ip(&pu, &pu);
    let f = ip(&pu, &pv);
    let g = ip(&pv, &pv);
    let e_u = 2.0 * ip(&puu, &pu);
    let e_v = 2.0 * ip(&puv, &pu);
    let f_u = ip(&puu, &pv) + ip(&pu, &puv);
    let f_v = ip(&puv, &pv) + ip(&pu, &pvv);
    let g_u = 2.0 * ip(&puv, &pv);
    let g_v = 2.0 * ip(&pvv, &pv);
    let e_vv = 2.0 * (ip(&puvv, &pu) + ip(&puv, &puv));
    let g_uu = 2.0 * (ip(&puuv, &pv) + ip(&puv, &puv));
    let f_uv = ip(&puuv, &pv) + ip(&puu, &pvv) + ip(&puv, &puv) + ip(&pu, &puvv);
    let det = e * g - f * f;
    if !(det > DEGENERACY_TOL) {
        return Err(Error::DegenerateMetric { u, v, det });
    }
    let d3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m1 =
        [[-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v], [f_v - 0.5 * g_u, e, f], [0.5 * g_v, f, g]];
    let m2 = [[0.0, 0.5 * e_v, 0.5 * g_u], [0.5 * e_v, e, f], [0.5 * g_u, f, g]];
    Ok((d3(m1) - d3(m2)) / (det * det))
}
