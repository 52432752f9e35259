//! Fundamental pairs `(A, B)` and their pointwise calculus.
//!
//! A pair is any rule that yields a Riemannian metric `A` and a second
//! quadratic form `B` with first partials at chart points. Curvatures are
//! coefficients of the shape operator `S = A⁻¹B`; the Codazzi tensor uses the
//! Levi-Civita connection of `A`.

use serde::{Deserialize, Serialize};

use crate::ambient::{Rect, SurfacePatch, DEGENERACY_TOL};
use crate::dual::Dual2;
use crate::error::{Error, Result};
use crate::expr::{Expr, Params};
use crate::forms::FormJet;
use crate::jet::Jet3;

/// `A` and `B` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairJet {
    pub a: FormJet,
    pub b: FormJet,
}

/// A pointwise source of fundamental pairs.
pub trait PairField: Send + Sync {
    fn eval(&self, u: f64, v: f64) -> Result<PairJet>;

    fn domain(&self) -> Rect;

    fn contains(&self, u: f64, v: f64) -> bool {
        self.domain().contains(u, v)
    }

    /// Position in the ambient model, when the pair comes from an immersion.
    fn position(&self, _u: f64, _v: f64) -> Option<Vec<f64>> {
        None
    }

    /// Evaluation that skips the domain check, for one-sided probes with the
    /// pair extended past a disk boundary. Defaults to [`PairField::eval`].
    fn eval_extended(&self, u: f64, v: f64) -> Result<PairJet> {
        self.eval(u, v)
    }
}

/// Coefficients of `A` and `B` given by expressions over a flat chart.
#[derive(Debug, Clone)]
pub struct AbstractPair {
    pub domain: Rect,
    /// `[E, F, G]`.
    pub a: [Expr; 3],
    /// `[e, f, g]`.
    pub b: [Expr; 3],
    pub params: Params,
}

impl AbstractPair {
    fn form(exprs: &[Expr; 3], u: f64, v: f64, params: &Params) -> Result<FormJet> {
        let (ju, jv) = (Jet3::var_u(u), Jet3::var_v(v));
        let c = |e: &Expr| e.eval_jet(ju, jv, params).map(|j| j.value_dual());
        Ok(FormJet::new(c(&exprs[0])?, c(&exprs[1])?, c(&exprs[2])?))
    }

    fn eval_any(&self, u: f64, v: f64) -> Result<PairJet> {
        let a = Self::form(&self.a, u, v, &self.params)?;
        let det = a.det().val;
        if !(a.uu.val > 0.0 && det > DEGENERACY_TOL) {
            return Err(Error::DegenerateMetric { u, v, det });
        }
        Ok(PairJet { a, b: Self::form(&self.b, u, v, &self.params)? })
    }
}

/// The pair sources known to the library.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Pair {
    /// `(I, II)` of an immersion.
    Immersed(SurfacePatch),
    /// `(I, B)` with `B` the Abresch–Rosenberg form of a product surface.
    ProductAR(SurfacePatch),
    /// `(A, II)` with `A = I + ε/(K − ε) dh²` on a product surface.
    KPair {
        patch: SurfacePatch,
        k: f64,
    },
    Abstract(AbstractPair),
}

impl Pair {
    pub fn patch(&self) -> Option<&SurfacePatch> {
        match self {
            Pair::Immersed(p) | Pair::ProductAR(p) | Pair::KPair { patch: p, .. } => Some(p),
            Pair::Abstract(_) => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Pair::Immersed(_) => "I-II",
            Pair::ProductAR(_) => "AR",
            Pair::KPair { .. } => "K-pair",
            Pair::Abstract(_) => "abstract",
        }
    }

    /// Builds a K-pair after checking `K > max{0, ε}`.
    pub fn k_pair(patch: SurfacePatch, k: f64) -> Result<Pair> {
        crate::product::check_k(patch.ambient, k)?;
        Ok(Pair::KPair { patch, k })
    }

    fn eval_impl(&self, u: f64, v: f64, checked: bool) -> Result<PairJet> {
        let sj = |p: &SurfacePatch| {
            let coords = if checked { p.eval_immersion(u, v)? } else { p.eval_unchecked(u, v)? };
            p.surface_jet_from(coords, u, v)
        };
        match self {
            Pair::Immersed(p) => {
                let s = sj(p)?;
                Ok(PairJet { a: s.first, b: s.second })
            }
            Pair::ProductAR(p) => {
                let s = sj(p)?;
                let (a, b) = crate::product::ar_forms(p.ambient, &s)?;
                Ok(PairJet { a, b })
            }
            Pair::KPair { patch, k } => {
                let s = sj(patch)?;
                let (a, b) = crate::product::k_forms(patch.ambient, *k, &s, u, v)?;
                Ok(PairJet { a, b })
            }
            Pair::Abstract(ap) => {
                if checked && !ap.domain.contains(u, v) {
                    return Err(Error::OutOfDomain { u, v });
                }
                ap.eval_any(u, v)
            }
        }
    }
}

impl PairField for Pair {
    fn eval(&self, u: f64, v: f64) -> Result<PairJet> {
        self.eval_impl(u, v, true)
    }

    fn eval_extended(&self, u: f64, v: f64) -> Result<PairJet> {
        self.eval_impl(u, v, false)
    }

    fn domain(&self) -> Rect {
        match self {
            Pair::Abstract(a) => a.domain,
            _ => self.patch().expect("immersed pair").domain,
        }
    }

    fn contains(&self, u: f64, v: f64) -> bool {
        match self.patch() {
            Some(p) => p.contains(u, v),
            None => self.domain().contains(u, v),
        }
    }

    fn position(&self, u: f64, v: f64) -> Option<Vec<f64>> {
        self.patch().and_then(|p| p.position(u, v).ok())
    }
}

/// Shape operator and curvature invariants at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeData {
    /// `S = A⁻¹B`, row `k` column `j` holding `S^k_j`.
    pub s: [[f64; 2]; 2],
    pub h: f64,
    pub k_e: f64,
    pub q: f64,
    pub k1: f64,
    pub k2: f64,
}

impl ShapeData {
    /// `q / (H² + |K_e| + 1)`, the scale-normalised skew curvature used by
    /// umbilic detection.
    pub fn q_normalized(&self) -> f64 {
        self.q / (self.h * self.h + self.k_e.abs() + 1.0)
    }
}

/// Components of `B` in an A-orthonormal frame `e₁ ∥ ∂u`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FrameCoefficients {
    pub p11: Dual2,
    pub p12: Dual2,
    pub p22: Dual2,
}

pub(crate) fn frame_coefficients(p: &PairJet) -> FrameCoefficients {
    let (e, f) = (p.a.uu, p.a.uv);
    let (l, m, n) = (p.b.uu, p.b.uv, p.b.vv);
    let d = p.a.det();
    let ed = e * d;
    FrameCoefficients {
        p11: l / e,
        p12: (e * m - f * l) / (e * d.sqrt()),
        p22: (e * e * n - (e * f * m).scale(2.0) + f * f * l) / ed,
    }
}

/// `H` with partials.
pub fn mean_curvature_dual(p: &PairJet) -> Dual2 {
    let (e, f, g) = (p.a.uu, p.a.uv, p.a.vv);
    let (l, m, n) = (p.b.uu, p.b.uv, p.b.vv);
    (e * n - (f * m).scale(2.0) + g * l) / p.a.det().scale(2.0)
}

/// `K_e` with partials.
pub fn extrinsic_curvature_dual(p: &PairJet) -> Dual2 {
    (p.b.uu * p.b.vv - p.b.uv * p.b.uv) / p.a.det()
}

/// `q = H² − K_e` with partials, evaluated as a sum of squares so that it is
/// nonnegative to rounding.
pub fn skew_curvature_dual(p: &PairJet) -> Dual2 {
    let c = frame_coefficients(p);
    let half = (c.p11 - c.p22).scale(0.5);
    half * half + c.p12 * c.p12
}

fn check_metric(p: &PairJet, u: f64, v: f64) -> Result<()> {
    let det = p.a.det().val;
    if !(p.a.uu.val > 0.0 && det > DEGENERACY_TOL) {
        return Err(Error::DegenerateMetric { u, v, det });
    }
    Ok(())
}

pub fn shape_of(p: &PairJet) -> ShapeData {
    let inv = crate::forms::inverse2(p.a.matrix());
    let b = p.b.matrix();
    let mut s = [[0.0; 2]; 2];
    for k in 0..2 {
        for j in 0..2 {
            s[k][j] = inv[k][0] * b[0][j] + inv[k][1] * b[1][j];
        }
    }
    let h = mean_curvature_dual(p).val;
    let k_e = extrinsic_curvature_dual(p).val;
    let q = skew_curvature_dual(p).val;
    let r = q.max(0.0).sqrt();
    ShapeData { s, h, k_e, q, k1: h + r, k2: h - r }
}

pub fn pair_curvatures(pair: &dyn PairField, u: f64, v: f64) -> Result<ShapeData> {
    let p = pair.eval(u, v)?;
    check_metric(&p, u, v)?;
    Ok(shape_of(&p))
}

/// `(a, b, c)` of `√(EG − F²)·W = a du² + b du dv + c dv²`.
pub fn lines_form_of(p: &PairJet) -> [f64; 3] {
    let [e, f, g] = p.a.values();
    let [l, m, n] = p.b.values();
    [e * m - f * l, e * n - g * l, f * n - g * m]
}

pub fn lines_form(pair: &dyn PairField, u: f64, v: f64) -> Result<[f64; 3]> {
    let p = pair.eval(u, v)?;
    check_metric(&p, u, v)?;
    Ok(lines_form_of(&p))
}

/// Levi-Civita symbols `Γᵏᵢⱼ` of a metric, symmetric in `i, j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChristoffelSymbols {
    pub g1_11: f64,
    pub g2_11: f64,
    pub g1_12: f64,
    pub g2_12: f64,
    pub g1_22: f64,
    pub g2_22: f64,
}

impl ChristoffelSymbols {
    /// `Γᵏᵢⱼ` with zero-based indices.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        match (k, i + j) {
            (0, 0) => self.g1_11,
            (1, 0) => self.g2_11,
            (0, 1) => self.g1_12,
            (1, 1) => self.g2_12,
            (0, _) => self.g1_22,
            _ => self.g2_22,
        }
    }
}

pub fn christoffel(a: &FormJet) -> Result<ChristoffelSymbols> {
    let (e, f, g) = (a.uu, a.uv, a.vv);
    let d = e.val * g.val - f.val * f.val;
    if !(d > DEGENERACY_TOL) {
        return Err(Error::DegenerateMetric { u: f64::NAN, v: f64::NAN, det: d });
    }
    let (ee, ff, gg) = (e.val, f.val, g.val);
    let two_d = 2.0 * d;
    Ok(ChristoffelSymbols {
        g1_11: (gg * e.du - 2.0 * ff * f.du + ff * e.dv) / two_d,
        g2_11: (2.0 * ee * f.du - ee * e.dv - ff * e.du) / two_d,
        g1_12: (gg * e.dv - ff * g.du) / two_d,
        g2_12: (ee * g.du - ff * e.dv) / two_d,
        g1_22: (2.0 * gg * f.dv - gg * g.du - ff * g.dv) / two_d,
        g2_22: (ee * g.dv - 2.0 * ff * f.dv + ff * g.du) / two_d,
    })
}

pub fn codazzi_residual_of(p: &PairJet) -> Result<[f64; 2]> {
    let c = christoffel(&p.a)?;
    let (e, f, g) = (p.b.uu, p.b.uv, p.b.vv);
    let r1 = e.dv - f.du - (e.val * c.g1_12 + f.val * (c.g2_12 - c.g1_11) - g.val * c.g2_11);
    let r2 = f.dv - g.du - (e.val * c.g1_22 + f.val * (c.g2_22 - c.g1_12) - g.val * c.g2_12);
    Ok([r1, r2])
}

pub fn codazzi_residual(pair: &dyn PairField, u: f64, v: f64) -> Result<[f64; 2]> {
    let p = pair.eval(u, v)?;
    check_metric(&p, u, v).and_then(|_| codazzi_residual_of(&p)).map_err(|e| with_point(e, u, v))
}

fn with_point(e: Error, u: f64, v: f64) -> Error {
    match e {
        Error::DegenerateMetric { det, .. } => Error::DegenerateMetric { u, v, det },
        other => other,
    }
}

/// Codazzi tensor data at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodazziReport {
    pub residual: [f64; 2],
    /// `T_S(∂u, ∂v)` in chart components.
    pub tensor: [f64; 2],
    pub function: f64,
    pub traceless_tensor: [f64; 2],
    pub traceless_function: f64,
}

type DualMatrix = [[Dual2; 2]; 2];

/// `S = A⁻¹B` with partials.
fn shape_operator_dual(p: &PairJet) -> DualMatrix {
    let (e, f, g) = (p.a.uu, p.a.uv, p.a.vv);
    let d = p.a.det();
    let inv = [[g / d, -f / d], [-f / d, e / d]];
    let b = [[p.b.uu, p.b.uv], [p.b.uv, p.b.vv]];
    let mut s = [[Dual2::ZERO; 2]; 2];
    for k in 0..2 {
        for j in 0..2 {
            s[k][j] = inv[k][0] * b[0][j] + inv[k][1] * b[1][j];
        }
    }
    s
}

/// `T(X, Y) = ∇_X(SY) − ∇_Y(SX) − S[X, Y]` for constant chart fields.
#[allow(clippy::needless_range_loop)]
fn codazzi_tensor(s: &DualMatrix, c: &ChristoffelSymbols, x: [f64; 2], y: [f64; 2]) -> [f64; 2] {
    let mut t = [0.0; 2];
    for (k, tk) in t.iter_mut().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let mut term = s[k][j].d(i) - s[k][i].d(j);
                for l in 0..2 {
                    term += c.get(k, i, l) * s[l][j].val - c.get(k, j, l) * s[l][i].val;
                }
                *tk += w * term;
            }
        }
    }
    t
}

/// `‖T_S(X, Y)‖²_A / ‖X ∧ Y‖²_A` for constant chart vectors `X, Y`.
pub fn codazzi_function_on(p: &PairJet, traceless: bool, x: [f64; 2], y: [f64; 2]) -> Result<f64> {
    let c = christoffel(&p.a)?;
    let s = operator(p, traceless);
    let t = codazzi_tensor(&s, &c, x, y);
    let wedge = p.a.norm2(x) * p.a.norm2(y) - p.a.apply(x, y).powi(2);
    Ok(p.a.norm2(t) / wedge)
}

fn operator(p: &PairJet, traceless: bool) -> DualMatrix {
    let mut s = shape_operator_dual(p);
    if traceless {
        let h = mean_curvature_dual(p);
        s[0][0] = s[0][0] - h;
        s[1][1] = s[1][1] - h;
    }
    s
}

pub fn codazzi_report_of(p: &PairJet) -> Result<CodazziReport> {
    let c = christoffel(&p.a)?;
    let d = p.a.det().val;
    let (x, y) = ([1.0, 0.0], [0.0, 1.0]);
    let tensor = codazzi_tensor(&operator(p, false), &c, x, y);
    let traceless_tensor = codazzi_tensor(&operator(p, true), &c, x, y);
    Ok(CodazziReport {
        residual: codazzi_residual_of(p)?,
        tensor,
        function: p.a.norm2(tensor) / d,
        traceless_tensor,
        traceless_function: p.a.norm2(traceless_tensor) / d,
    })
}

pub fn codazzi_tensor_and_function(pair: &dyn PairField, u: f64, v: f64) -> Result<CodazziReport> {
    let p = pair.eval(u, v)?;
    check_metric(&p, u, v).and_then(|_| codazzi_report_of(&p)).map_err(|e| with_point(e, u, v))
}

/// `‖dH‖²_A`.
pub fn dh_norm2_of(p: &PairJet) -> f64 {
    let h = mean_curvature_dual(p);
    let [e, f, g] = p.a.values();
    (g * h.du * h.du - 2.0 * f * h.du * h.dv + e * h.dv * h.dv) / (e * g - f * f)
}

/// `‖dH‖_A`.
pub fn dh_norm(pair: &dyn PairField, u: f64, v: f64) -> Result<f64> {
    let p = pair.eval(u, v)?;
    check_metric(&p, u, v)?;
    Ok(dh_norm2_of(&p).max(0.0).sqrt())
}

/// Relative gap `|a − b| / max(|a|, |b|)`, zero when both vanish to
/// `floor`.
pub fn rel_gap(a: f64, b: f64, floor: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale <= floor {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
