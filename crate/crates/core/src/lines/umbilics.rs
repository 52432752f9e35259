//! Umbilic detection, zero order and interior rotation index.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::dual::Dual2;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::pairs::{extrinsic_curvature_dual, mean_curvature_dual, shape_of, skew_curvature_dual, PairField, PairJet};

use super::field::{doubled_chart_angle, frame_coefficient, lines_form_on, q_normalized_of};
use super::region::Region;
use super::{snap, INTERIOR_SNAP_LIMIT};

/// Largest allowed change of a lifted angle between neighbouring samples.
pub const MAX_ANGLE_STEP: f64 = PI / 4.0;
const MAX_BISECTIONS: u32 = 30;
const NEWTON_ITERS: usize = 30;
const NEWTON_GRAD_TOL: f64 = 1e-12;
/// Fraction of samples below `q_tol` that marks a region totally umbilical.
pub const TOTALLY_UMBILICAL_FRACTION: f64 = 0.95;

fn wrap(a: f64) -> f64 {
    let mut x = a % TAU;
    if x > PI {
        x -= TAU;
    } else if x <= -PI {
        x += TAU;
    }
    x
}

/// Lifts a mod-2π angle along `t ∈ [0, 1]`, bisecting wherever consecutive
/// samples differ by `MAX_ANGLE_STEP` or more, and returns the total change.
pub(crate) fn lifted_change<F>(angle: &F, n0: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let n0 = n0.max(8);
    let mut total = 0.0;
    let mut prev = angle(0.0)?;
    for i in 1..=n0 {
        let (t0, t1) = ((i - 1) as f64 / n0 as f64, i as f64 / n0 as f64);
        let next = angle(t1)?;
        total += refine(angle, t0, t1, prev, next, 0)?;
        prev = next;
    }
    Ok(total)
}

fn refine<F>(angle: &F, t0: f64, t1: f64, a0: f64, a1: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let d = wrap(a1 - a0);
    if d.abs() < MAX_ANGLE_STEP {
        return Ok(d);
    }
    if depth >= MAX_BISECTIONS {
        return Err(Error::Winding(format!("angle jumps by {d:.3} rad over parameter width {:e}", t1 - t0)));
    }
    let tm = 0.5 * (t0 + t1);
    let am = angle(tm)?;
    Ok(refine(angle, t0, tm, a0, am, depth + 1)? + refine(angle, tm, t1, am, a1, depth + 1)?)
}

/// Loop evaluator that rejects points where the loop meets an umbilic or
/// leaves the pair's domain.
fn loop_pair<'a>(
    pair: &'a dyn PairField,
    center: [f64; 2],
    radius: f64,
    q_floor: f64,
) -> impl Fn(f64) -> Result<PairJet> + 'a {
    move |t: f64| {
        let (s, c) = (TAU * t).sin_cos();
        let (u, v) = (center[0] + radius * c, center[1] + radius * s);
        if !pair.contains(u, v) {
            return Err(Error::NotIsolated {
                u: center[0],
                v: center[1],
                reason: format!("loop of radius {radius:e} leaves the domain"),
            });
        }
        let p = pair.eval(u, v)?;
        let qn = q_normalized_of(&p);
        if !(qn > q_floor) {
            return Err(Error::NotIsolated {
                u: center[0],
                v: center[1],
                reason: format!("loop of radius {radius:e} passes an umbilic near ({u:.6}, {v:.6}), q = {qn:e}"),
            });
        }
        Ok(p)
    }
}

/// Winding of `c` and of the line field around a loop, and the local
/// growth rate of `|c|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroOrder {
    /// Zero order `k = |winding|`.
    pub k: u32,
    /// Signed winding number of the frame coefficient `c`.
    pub winding: i32,
    /// Rotation index from the doubled-angle winding of the line field.
    pub direction_index: f64,
    /// `−2 × direction_index`; equals `k` when the zero has the model form
    /// `c ≈ (z − z₀)ᵏ·g`, whose index is `−k/2`.
    pub k_from_direction: i32,
    pub agree: bool,
    /// Regression slope of `log|c|` against `log r`.
    pub order_fit: f64,
    pub fit_residual: f64,
}

pub fn zero_order(pair: &dyn PairField, center: [f64; 2], radius: f64, q_floor: f64) -> Result<ZeroOrder> {
    let eval = loop_pair(pair, center, radius, q_floor);
    let total_c = lifted_change(
        &|t| {
            let (re, im) = frame_coefficient(&eval(t)?);
            Ok(im.atan2(re))
        },
        64,
    )?;
    let w = total_c / TAU;
    let winding = w.round();
    if (w - winding).abs() > 0.1 {
        return Err(Error::Winding(format!("coefficient winding {w:.4} is not integer-consistent")));
    }
    let winding = winding as i32;
    let qc = q_normalized_of(&pair.eval(center[0], center[1])?);
    if winding == 0 && qc > q_floor {
        return Err(Error::NotUmbilic { u: center[0], v: center[1] });
    }
    let total_d = lifted_change(&|t| Ok(doubled_chart_angle(&eval(t)?)), 64)?;
    let direction_index = snap(total_d / (2.0 * TAU), 0.5).0;
    let k_from_direction = (-2.0 * direction_index).round() as i32;
    let k = winding.unsigned_abs();
    let order_fit = order_slope(pair, center, radius)?;
    Ok(ZeroOrder {
        k,
        winding,
        direction_index,
        k_from_direction,
        agree: k as i32 == k_from_direction,
        order_fit,
        fit_residual: (order_fit - k as f64).abs(),
    })
}

/// Least-squares slope of the loop mean of `½ log q` against `log r`
/// over radii `r, r/2, r/4, r/8`.
fn order_slope(pair: &dyn PairField, center: [f64; 2], radius: f64) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in 0..4 {
        let r = radius / f64::powi(2.0, j);
        let m = 32;
        let mut acc = 0.0;
        for i in 0..m {
            let (s, c) = (TAU * i as f64 / m as f64).sin_cos();
            let q = shape_of(&pair.eval(center[0] + r * c, center[1] + r * s)?).q;
            acc += 0.5 * q.max(1e-300).ln();
        }
        xs.push(r.ln());
        ys.push(acc / m as f64);
    }
    Ok(slope(&xs, &ys))
}

pub(crate) fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub index: f64,
    pub raw: f64,
    pub snap_residual: f64,
}

/// Rotation index of the line field around `center`, from the doubled chart
/// angle of the `k₁` direction.
pub fn interior_index(
    pair: &dyn PairField,
    center: [f64; 2],
    loop_radius: f64,
    samples: usize,
    q_floor: f64,
) -> Result<IndexReport> {
    let eval = loop_pair(pair, center, loop_radius, q_floor);
    let total = lifted_change(&|t| Ok(doubled_chart_angle(&eval(t)?)), samples)?;
    let raw = total / (2.0 * TAU);
    let (index, snap_residual) = snap(raw, 0.5);
    if snap_residual > INTERIOR_SNAP_LIMIT {
        return Err(Error::SnapResidual {
            u: center[0],
            v: center[1],
            residual: snap_residual,
            limit: INTERIOR_SNAP_LIMIT,
        });
    }
    Ok(IndexReport { index, raw, snap_residual })
}

/// Number of radial curvature-line directions per family on a small circle,
/// i.e. half the number of sign changes of `W` on radial vectors.
pub fn separatrix_count(pair: &dyn PairField, center: [f64; 2], radius: f64, samples: usize) -> Result<usize> {
    let vals = (0..samples)
        .map(|i| {
            let (s, c) = (TAU * i as f64 / samples as f64).sin_cos();
            let p = pair.eval(center[0] + radius * c, center[1] + radius * s)?;
            Ok(lines_form_on(&p, [c, s]))
        })
        .collect::<Result<Vec<_>>>()?;
    let changes = (0..samples).filter(|&i| (vals[i] > 0.0) != (vals[(i + 1) % samples] > 0.0)).count();
    Ok(changes / 2)
}

/// One grid sample of a region scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub u: f64,
    pub v: f64,
    pub h: f64,
    pub k_e: f64,
    pub q: f64,
    pub q_normalized: f64,
}

/// Cell-centre samples of a region; `None` outside the region or where the
/// pair cannot be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScan {
    pub n: usize,
    pub cells: Vec<Option<GridSample>>,
    pub spacing: f64,
}

impl GridScan {
    pub fn at(&self, i: usize, j: usize) -> Option<&GridSample> {
        self.cells[j * self.n + i].as_ref()
    }

    pub fn valid(&self) -> impl Iterator<Item = &GridSample> {
        self.cells.iter().flatten()
    }
}

pub fn scan_grid(pair: &dyn PairField, region: &Region, n: usize, exec: Exec) -> GridScan {
    let r = region.bbox();
    let pts = r.cell_centres(n);
    let cells = exec.map(pts.len(), |i| {
        let (u, v) = pts[i];
        if !region.contains(u, v) || !pair.contains(u, v) {
            return None;
        }
        let p = pair.eval(u, v).ok()?;
        let s = shape_of(&p);
        Some(GridSample { u, v, h: s.h, k_e: s.k_e, q: s.q, q_normalized: s.q_normalized() })
    });
    GridScan { n, cells, spacing: (r.width() / n as f64).min(r.height() / n as f64) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UmbilicRecord {
    pub u: f64,
    pub v: f64,
    pub position: Option<Vec<f64>>,
    /// Normalised skew curvature at the reported location.
    pub q_min: f64,
    /// Newton refinement converged (otherwise the grid location is kept).
    pub refined: bool,
    pub loop_radius: f64,
    pub zero_order: Option<ZeroOrder>,
    pub index: Option<IndexReport>,
    /// Why the order or index could not be resolved, if so.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UmbilicScan {
    TotallyUmbilical { fraction: f64 },
    Isolated { records: Vec<UmbilicRecord> },
}

impl UmbilicScan {
    pub fn is_totally_umbilical(&self) -> bool {
        matches!(self, UmbilicScan::TotallyUmbilical { .. })
    }

    pub fn records(&self) -> &[UmbilicRecord] {
        match self {
            UmbilicScan::TotallyUmbilical { .. } => &[],
            UmbilicScan::Isolated { records: r } => r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UmbilicOptions {
    pub grid_n: usize,
    pub q_tol: f64,
    pub q_floor: f64,
    pub loop_samples: usize,
}

impl Default for UmbilicOptions {
    fn default() -> Self {
        UmbilicOptions { grid_n: 64, q_tol: super::DEFAULT_Q_FLOOR, q_floor: super::DEFAULT_Q_FLOOR, loop_samples: 64 }
    }
}

fn qn_dual(p: &PairJet) -> Dual2 {
    let h = mean_curvature_dual(p);
    let k = extrinsic_curvature_dual(p);
    skew_curvature_dual(p) / (h * h + k.abs() + 1.0)
}

fn qn_and_grad(pair: &dyn PairField, x: [f64; 2]) -> Option<(f64, [f64; 2])> {
    let p = pair.eval(x[0], x[1]).ok()?;
    let d = qn_dual(&p);
    Some((d.val, d.gradient()))
}

/// Newton iteration on `∇q_n` with a difference Hessian and backtracking.
fn newton_refine(pair: &dyn PairField, start: [f64; 2], h: f64, region: &Region) -> Option<([f64; 2], f64)> {
    let mut x = start;
    let (mut q, mut g) = qn_and_grad(pair, x)?;
    let delta = 1e-4 * h;
    for _ in 0..NEWTON_ITERS {
        if g[0].hypot(g[1]) < NEWTON_GRAD_TOL {
            break;
        }
        let gu = |s: f64| qn_and_grad(pair, [x[0] + s, x[1]]).map(|r| r.1);
        let gv = |s: f64| qn_and_grad(pair, [x[0], x[1] + s]).map(|r| r.1);
        let (up, um, vp, vm) = (gu(delta)?, gu(-delta)?, gv(delta)?, gv(-delta)?);
        let h00 = (up[0] - um[0]) / (2.0 * delta);
        let h11 = (vp[1] - vm[1]) / (2.0 * delta);
        let h01 = 0.25 * ((up[1] - um[1]) + (vp[0] - vm[0])) / delta;
        let det = h00 * h11 - h01 * h01;
        let mut step = if det > 0.0 && h00 > 0.0 {
            [-(h11 * g[0] - h01 * g[1]) / det, -(-h01 * g[0] + h00 * g[1]) / det]
        } else {
            let scale = h00.abs().max(h11.abs()).max(1e-300);
            [-g[0] / scale, -g[1] / scale]
        };
        let len = step[0].hypot(step[1]);
        if len > h {
            step = [step[0] * h / len, step[1] * h / len];
        }
        let mut accepted = false;
        for _ in 0..20 {
            let y = [x[0] + step[0], x[1] + step[1]];
            if region.contains(y[0], y[1]) {
                if let Some((qy, gy)) = qn_and_grad(pair, y) {
                    if qy <= q {
                        x = y;
                        q = qy;
                        g = gy;
                        accepted = true;
                        break;
                    }
                }
            }
            step = [step[0] * 0.5, step[1] * 0.5];
        }
        if !accepted || step[0].hypot(step[1]) < 1e-16 * (1.0 + x[0].abs() + x[1].abs()) {
            break;
        }
    }
    Some((x, q))
}

/// Grid scan for umbilics: local minima of `q_n` refined by Newton, kept
/// when `q_n < q_tol` or, failing refinement, when a loop at twice the grid
/// spacing has nonzero index.
pub fn find_umbilics(pair: &dyn PairField, region: &Region, opts: &UmbilicOptions, exec: Exec) -> UmbilicScan {
    let scan = scan_grid(pair, region, opts.grid_n, exec);
    let valid: Vec<&GridSample> = scan.valid().collect();
    if !valid.is_empty() {
        let below = valid.iter().filter(|s| s.q_normalized < opts.q_tol).count() as f64 / valid.len() as f64;
        if below >= TOTALLY_UMBILICAL_FRACTION {
            return UmbilicScan::TotallyUmbilical { fraction: below };
        }
    }
    let n = scan.n;
    let h = scan.spacing;
    let mut candidates = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let Some(c) = scan.at(i, j) else { continue };
            let mut is_min = true;
            let mut neighbours = 0;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= n as i64 || jj >= n as i64 {
                        continue;
                    }
                    if let Some(o) = scan.at(ii as usize, jj as usize) {
                        neighbours += 1;
                        if o.q_normalized < c.q_normalized {
                            is_min = false;
                        }
                    }
                }
            }
            if is_min && neighbours >= 3 {
                candidates.push(*c);
            }
        }
    }
    let refined: Vec<Option<(f64, f64, f64, bool)>> = exec.map(candidates.len(), |i| {
        let c = candidates[i];
        if let Some((x, q)) = newton_refine(pair, [c.u, c.v], h, region) {
            if q < opts.q_tol && region.contains(x[0], x[1]) {
                return Some((x[0], x[1], q, true));
            }
        }
        let r = 2.0 * h;
        match interior_index(pair, [c.u, c.v], r, opts.loop_samples, opts.q_floor) {
            Ok(ix) if ix.index != 0.0 => Some((c.u, c.v, c.q_normalized, false)),
            _ => None,
        }
    });
    let mut found: Vec<(f64, f64, f64, bool)> = Vec::new();
    for (u, v, q, ok) in refined.into_iter().flatten() {
        match found.iter_mut().find(|f| (f.0 - u).hypot(f.1 - v) < h) {
            Some(f) => {
                if q < f.2 {
                    *f = (u, v, q, ok);
                }
            }
            None => found.push((u, v, q, ok)),
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let dom = pair.domain();
    let records = exec.map(found.len(), |i| {
        let (u, v, q, ok) = found[i];
        let nearest = found
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, f)| (f.0 - u).hypot(f.1 - v))
            .fold(f64::INFINITY, f64::min);
        let edge = Region::Rect(dom).boundary_distance(u, v);
        let limit = (0.4 * nearest).min(0.5 * edge);
        let mut rec = UmbilicRecord {
            u,
            v,
            position: pair.position(u, v),
            q_min: q,
            refined: ok,
            loop_radius: h.min(limit),
            zero_order: None,
            index: None,
            failure: None,
        };
        // Degenerate umbilics have a flat q_n, so a loop at one grid spacing
        // can still read as umbilic; widen it while the neighbours allow.
        let mut radius = h.min(limit);
        loop {
            let got = zero_order(pair, [u, v], radius, opts.q_floor)
                .and_then(|z| interior_index(pair, [u, v], radius, opts.loop_samples, opts.q_floor).map(|ix| (z, ix)));
            rec.loop_radius = radius;
            match got {
                Ok((z, ix)) => {
                    rec.zero_order = Some(z);
                    rec.index = Some(ix);
                    rec.failure = None;
                    break;
                }
                Err(e) => {
                    rec.failure = Some(e.to_string());
                    let wider = 2.0 * radius;
                    if !matches!(e, Error::NotIsolated { .. }) || wider > limit || wider > 8.0 * h {
                        break;
                    }
                    radius = wider;
                }
            }
        }
        rec
    });
    UmbilicScan::Isolated { records }
}
