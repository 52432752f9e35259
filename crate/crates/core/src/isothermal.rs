//! Conformal charts for the metric `A` and the Hopf coefficient `Q`.
//!
//! Two kinds of chart are supported: the identity (the caller asserts the
//! chart is already isothermal, which is then checked pointwise) and the
//! rotational chart for metrics `E(v) du² + G(v) dv²`, where `dw = √(G/E) dv`
//! turns `A` into `E (du² + dw²)`. With `A = 2λ|dz|²` this gives `λ = E/2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ambient::Rect;
use crate::dual::Dual2;
use crate::error::{Error, Result};
use crate::expr::quad;
use crate::forms::FormJet;
use crate::pairs::{codazzi_report_of, dh_norm2_of, lines_form_of, rel_gap, shape_of, PairField, PairJet};

pub const DEFAULT_CHART_TOL: f64 = 1e-8;
const TABLE_NODES: usize = 512;

#[derive(Debug, Clone)]
enum ChartKind {
    Identity,
    Rotational { table: Vec<Node> },
}

#[derive(Debug, Clone, Copy)]
struct Node {
    v: f64,
    w: f64,
    /// `dw/dv = √(G/E)`.
    slope: f64,
}

/// Cubic Hermite value and derivative at `v ∈ [a.v, b.v]`.
fn hermite(a: &Node, b: &Node, v: f64) -> (f64, f64) {
    let h = b.v - a.v;
    let t = (v - a.v) / h;
    let (t2, t3) = (t * t, t * t * t);
    let val = (2.0 * t3 - 3.0 * t2 + 1.0) * a.w
        + (t3 - 2.0 * t2 + t) * h * a.slope
        + (-2.0 * t3 + 3.0 * t2) * b.w
        + (t3 - t2) * h * b.slope;
    let der = (6.0 * t2 - 6.0 * t) / h * a.w
        + (3.0 * t2 - 4.0 * t + 1.0) * a.slope
        + (-6.0 * t2 + 6.0 * t) / h * b.w
        + (3.0 * t2 - 2.0 * t) * b.slope;
    (val, der)
}

/// A chart `(x, y)` on which `A` is conformal to the flat metric.
#[derive(Debug, Clone)]
pub struct IsothermalChart {
    kind: ChartKind,
    domain: Rect,
    pub tol: f64,
}

/// Conformality defect `max(|E − G|, 2|F|) / E`.
pub fn conformal_defect(a: &FormJet) -> f64 {
    let [e, f, g] = a.values();
    (e - g).abs().max(2.0 * f.abs()) / e
}

impl IsothermalChart {
    /// The original chart, asserted isothermal.
    pub fn identity(pair: &dyn PairField) -> Self {
        IsothermalChart { kind: ChartKind::Identity, domain: pair.domain(), tol: DEFAULT_CHART_TOL }
    }

    /// Reparametrizes the profile variable `v` by `w = ∫ √(G/E) dv`, with
    /// `w = 0` at `v_ref`. The metric must be diagonal with coefficients
    /// independent of `u`.
    pub fn rotational(pair: &dyn PairField, v_ref: f64) -> Result<Self> {
        let d = pair.domain();
        let u_ref = 0.5 * (d.u0 + d.u1);
        for (u, v) in d.cell_centres(6) {
            let a = pair.eval(u, v)?.a;
            let scale = a.uu.val.abs().max(a.vv.val.abs());
            let off = [a.uv.val, a.uu.du, a.vv.du].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if off > 1e-9 * scale.max(1.0) {
                return Err(Error::Precondition(format!(
                    "metric is not rotational (diagonal, u-independent) near ({u}, {v})"
                )));
            }
        }
        let n = TABLE_NODES;
        let mut vs: Vec<f64> = (0..=n).map(|i| d.v0 + d.height() * i as f64 / n as f64).collect();
        vs.push(v_ref.clamp(d.v0, d.v1));
        vs.sort_by(|a, b| a.total_cmp(b));
        vs.dedup();
        let rate = |v: f64| -> Result<f64> { speed(pair, u_ref, v) };
        let iref = vs.iter().position(|&v| v == v_ref.clamp(d.v0, d.v1)).unwrap();
        let mut w = vec![0.0; vs.len()];
        for i in iref + 1..vs.len() {
            w[i] = w[i - 1] + quad::integrate(&rate, vs[i - 1], vs[i])?;
        }
        for i in (0..iref).rev() {
            w[i] = w[i + 1] - quad::integrate(&rate, vs[i], vs[i + 1])?;
        }
        let table = vs.iter().zip(w).map(|(&v, w)| Ok(Node { v, w, slope: rate(v)? })).collect::<Result<Vec<_>>>()?;
        let domain = Rect::new(d.u0, d.u1, table[0].w, table[table.len() - 1].w)?;
        Ok(IsothermalChart { kind: ChartKind::Rotational { table }, domain, tol: DEFAULT_CHART_TOL })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, ChartKind::Identity)
    }

    /// Domain in chart coordinates `(x, y)`.
    pub fn domain(&self) -> Rect {
        self.domain
    }

    /// `w(v)` for rotational charts, `v` itself for the identity. Between
    /// table nodes `w` is the cubic Hermite interpolant of the quadrature
    /// values and the exact slopes `√(G/E)`.
    pub fn w_of_v(&self, v: f64) -> f64 {
        match &self.kind {
            ChartKind::Identity => v,
            ChartKind::Rotational { table, .. } => {
                let k = table.partition_point(|n| n.v < v).clamp(1, table.len() - 1);
                hermite(&table[k - 1], &table[k], v).0
            }
        }
    }

    /// Original chart point for chart coordinates `(x, y)`.
    pub fn to_original(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        match &self.kind {
            ChartKind::Identity => Ok((x, y)),
            ChartKind::Rotational { table, .. } => {
                let (lo, hi) = (table[0].w, table[table.len() - 1].w);
                if y < lo - 1e-12 || y > hi + 1e-12 {
                    return Err(Error::OutOfDomain { u: x, v: y });
                }
                let k = table.partition_point(|n| n.w < y).clamp(1, table.len() - 1);
                let (a, b) = (&table[k - 1], &table[k]);
                // Newton on the interpolant, falling back to bisection of the
                // bracket when a step is not finite or leaves it.
                let (mut lo, mut hi) = (a.v, b.v);
                let mut v = a.v + (b.v - a.v) * (y - a.w) / (b.w - a.w);
                for _ in 0..100 {
                    let (w, dw) = hermite(a, b, v);
                    if w < y {
                        lo = v;
                    } else {
                        hi = v;
                    }
                    let newton = v - (w - y) / dw;
                    let next = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
                    let done = (next - v).abs() < 1e-15 * (1.0 + v.abs()) || hi - lo < 1e-15 * (1.0 + v.abs());
                    v = next;
                    if done {
                        break;
                    }
                }
                Ok((x, v))
            }
        }
    }

    /// Rewrites a pair evaluated at an original point in chart coordinates.
    pub fn pull_back(&self, p: &PairJet) -> PairJet {
        match self.kind {
            ChartKind::Identity => *p,
            ChartKind::Rotational { .. } => {
                let tau = (p.a.uu / p.a.vv).sqrt();
                let conv = |c: Dual2| Dual2::new(c.val, c.du, c.dv * tau.val);
                let form = |f: &FormJet| FormJet::new(conv(f.uu), conv(f.uv * tau), conv(f.vv * tau * tau));
                PairJet { a: form(&p.a), b: form(&p.b) }
            }
        }
    }
}

fn speed(pair: &dyn PairField, u: f64, v: f64) -> Result<f64> {
    let a = pair.eval(u, v)?.a;
    if !(a.uu.val > 1e-12) {
        return Err(Error::Precondition(format!("E vanishes at v = {v}; rotational chart breaks")));
    }
    Ok((a.vv.val / a.uu.val).sqrt())
}

/// A pair viewed through an isothermal chart.
pub struct ChartedPair<'a> {
    pub pair: &'a dyn PairField,
    pub chart: &'a IsothermalChart,
}

impl PairField for ChartedPair<'_> {
    fn eval(&self, x: f64, y: f64) -> Result<PairJet> {
        let (u, v) = self.chart.to_original(x, y)?;
        Ok(self.chart.pull_back(&self.pair.eval(u, v)?))
    }

    fn eval_extended(&self, x: f64, y: f64) -> Result<PairJet> {
        let (u, v) = self.chart.to_original(x, y)?;
        Ok(self.chart.pull_back(&self.pair.eval_extended(u, v)?))
    }

    fn domain(&self) -> Rect {
        self.chart.domain()
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        self.chart.to_original(x, y).map(|(u, v)| self.pair.contains(u, v)).unwrap_or(false)
    }

    fn position(&self, x: f64, y: f64) -> Option<Vec<f64>> {
        let (u, v) = self.chart.to_original(x, y).ok()?;
        self.pair.position(u, v)
    }
}

/// Hopf coefficient data at a chart point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfData {
    pub q: Complex64,
    pub q_zbar: Complex64,
    pub lambda: f64,
    pub defect: f64,
    /// Largest gap between `−2 Im(Q dz²)` and `W` over sample directions,
    /// relative to the largest `W` coefficient.
    pub lines_form_gap: f64,
}

/// `Q = (e − g − 2if)/4` and `Q_z̄` from a pair already in conformal
/// coordinates.
pub fn hopf_of(p: &PairJet) -> (Complex64, Complex64) {
    let (e, f, g) = (p.b.uu, p.b.uv, p.b.vv);
    let q = Complex64::new(e.val - g.val, -2.0 * f.val) / 4.0;
    let qx = Complex64::new(e.du - g.du, -2.0 * f.du) / 4.0;
    let qy = Complex64::new(e.dv - g.dv, -2.0 * f.dv) / 4.0;
    (q, (qx + Complex64::i() * qy) / 2.0)
}

pub fn hopf_q(pair: &dyn PairField, chart: &IsothermalChart, x: f64, y: f64) -> Result<HopfData> {
    let p = ChartedPair { pair, chart }.eval(x, y)?;
    hopf_checked(&p, chart.tol, x, y)
}

fn hopf_checked(p: &PairJet, tol: f64, x: f64, y: f64) -> Result<HopfData> {
    let defect = conformal_defect(&p.a);
    if !(defect < tol) {
        return Err(Error::ChartNotConformal { u: x, v: y, defect });
    }
    let (q, q_zbar) = hopf_of(p);
    let [a, b, c] = lines_form_of(p);
    let root = p.a.det().val.sqrt();
    let scale = a.abs().max(b.abs()).max(c.abs()) / root;
    let mut gap = 0.0f64;
    for k in 0..8 {
        let t = k as f64 * std::f64::consts::PI / 8.0;
        let (dx, dy) = (t.cos(), t.sin());
        let w = (a * dx * dx + b * dx * dy + c * dy * dy) / root;
        let dz2 = Complex64::new(dx * dx - dy * dy, 2.0 * dx * dy);
        gap = gap.max((-2.0 * (q * dz2).im - w).abs());
    }
    let lines_form_gap = if scale > 0.0 { gap / scale } else { gap };
    Ok(HopfData { q, q_zbar, lambda: p.a.uu.val / 2.0, defect, lines_form_gap })
}

/// Both sides of the two Lemma-2 style identities at a chart point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub traceless_codazzi: f64,
    /// `2|Q_z̄|²/λ³`.
    pub hopf_side: f64,
    /// `‖dH‖²_A`.
    pub dh_side: f64,
    pub hopf_gap: f64,
    pub dh_gap: f64,
    /// `|Q|²` against `λ² q`.
    pub modulus_gap: f64,
    pub codazzi_residual: f64,
    pub q_normalized: f64,
    pub defect: f64,
}

pub fn lemma2_check(
    pair: &dyn PairField,
    chart: &IsothermalChart,
    x: f64,
    y: f64,
    q_floor: f64,
) -> Result<Lemma2Report> {
    let p = ChartedPair { pair, chart }.eval(x, y)?;
    let hopf = hopf_checked(&p, chart.tol, x, y)?;
    let shape = shape_of(&p);
    let qn = shape.q_normalized();
    if !(qn > q_floor) {
        return Err(Error::QBelowFloor { u: x, v: y, q: qn, floor: q_floor });
    }
    let codazzi = codazzi_report_of(&p)?;
    let hopf_side = 2.0 * hopf.q_zbar.norm_sqr() / hopf.lambda.powi(3);
    let dh_side = dh_norm2_of(&p);
    let t = codazzi.traceless_function;
    let floor = 1e-14 * (1.0 + shape.h * shape.h);
    Ok(Lemma2Report {
        traceless_codazzi: t,
        hopf_side,
        dh_side,
        hopf_gap: rel_gap(t, hopf_side, floor),
        dh_gap: rel_gap(t, dh_side, floor),
        modulus_gap: rel_gap(hopf.q.norm_sqr(), hopf.lambda * hopf.lambda * shape.q, 1e-300),
        codazzi_residual: codazzi.residual[0].abs().max(codazzi.residual[1].abs()),
        q_normalized: qn,
        defect: hopf.defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{params, parse};
    use crate::pairs::{AbstractPair, Pair};

    fn flat(b: [&str; 3]) -> Pair {
        Pair::Abstract(AbstractPair {
            domain: Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap(),
            a: ["1", "0", "1"].map(|s| parse(s).unwrap()),
            b: b.map(|s| parse(s).unwrap()),
            params: params([]),
        })
    }

    #[test]
    fn hopf_of_synthetic_linear_pair() {
        // e = 2 + u, g = 2 - u, f = -v, so Q = z/2 and Q_z̄ = 0.
        let pair = flat(["2+u", "-v", "2-u"]);
        let chart = IsothermalChart::identity(&pair);
        let h = hopf_q(&pair, &chart, 0.3, -0.4).unwrap();
        assert!((h.q - Complex64::new(0.15, -0.2)).norm() < 1e-15);
        assert!(h.q_zbar.norm() < 1e-15);
        assert!(h.lines_form_gap < 1e-12);
        assert_eq!(h.lambda, 0.5);
    }

    #[test]
    fn non_codazzi_flat_pair_keeps_hopf_identity() {
        // H ≡ 0 but the traceless Codazzi function is 1.
        let pair = flat(["v", "0", "-v"]);
        let chart = IsothermalChart::identity(&pair);
        let r = lemma2_check(&pair, &chart, 0.2, 0.5, 1e-6).unwrap();
        assert!((r.traceless_codazzi - 1.0).abs() < 1e-14);
        assert!(r.hopf_gap < 1e-12);
        assert!((r.codazzi_residual - 1.0).abs() < 1e-14);
        assert_eq!(r.dh_side, 0.0);
        assert_eq!(r.dh_gap, 1.0);
    }

    #[test]
    fn identity_chart_rejects_non_conformal_metric() {
        let pair = Pair::Abstract(AbstractPair {
            domain: Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap(),
            a: ["2", "0", "1"].map(|s| parse(s).unwrap()),
            b: ["0", "0", "0"].map(|s| parse(s).unwrap()),
            params: params([]),
        });
        let chart = IsothermalChart::identity(&pair);
        assert!(matches!(hopf_q(&pair, &chart, 0.0, 0.0), Err(Error::ChartNotConformal { .. })));
    }
}
