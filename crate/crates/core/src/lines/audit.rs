//! Hypothesis screening, Poincaré–Hopf audits and the umbilical-disk
//! verdict.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::ambient::Rect;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::isothermal::IsothermalChart;
use crate::pairs::{codazzi_residual_of, dh_norm2_of, shape_of, PairField};

use super::disk::{boundary_index, boundary_is_curvature_line, vertex_angle, BoundaryOptions, VertexRecord};
use super::region::{DiskRegion, Region};
use super::umbilics::{find_umbilics, UmbilicOptions, UmbilicRecord, UmbilicScan};
use super::DEFAULT_Q_FLOOR;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditOptions {
    pub grid_n: usize,
    pub q_tol: f64,
    pub q_floor: f64,
    pub loop_samples: usize,
    /// Bound on `‖dH‖/√q` for hypothesis 1.
    pub bound: f64,
    pub codazzi_tol: f64,
    pub boundary_tol: f64,
    /// Allowed gap between the pre-snap index sum and its expected value.
    pub sum_tol: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            grid_n: 64,
            q_tol: DEFAULT_Q_FLOOR,
            q_floor: DEFAULT_Q_FLOOR,
            loop_samples: 64,
            bound: 1e6,
            codazzi_tol: 1e-6,
            boundary_tol: 1e-6,
            sum_tol: 0.05,
        }
    }
}

impl AuditOptions {
    fn umbilic(&self) -> UmbilicOptions {
        UmbilicOptions {
            grid_n: self.grid_n,
            q_tol: self.q_tol,
            q_floor: self.q_floor,
            loop_samples: self.loop_samples,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Hypothesis1Status {
    Pass,
    FailUnbounded,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis1Report {
    pub status: Hypothesis1Status,
    pub grid_n: usize,
    pub sup_coarse: f64,
    pub sup_fine: f64,
    /// `sup_fine / sup_coarse − 1`.
    pub growth: f64,
    /// Ratio of ring suprema at radii `h/4` and `h` around each detected
    /// umbilic.
    pub ring_ratios: Vec<f64>,
    pub bound: f64,
    pub q_floor: f64,
}

fn rho_sup(pair: &dyn PairField, region: &Region, n: usize, q_floor: f64, exec: Exec) -> f64 {
    let pts = region.bbox().cell_centres(n);
    exec.map(pts.len(), |i| {
        let (u, v) = pts[i];
        if !region.contains(u, v) {
            return 0.0;
        }
        rho_at(pair, u, v, q_floor).unwrap_or(0.0)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

fn rho_at(pair: &dyn PairField, u: f64, v: f64, q_floor: f64) -> Option<f64> {
    let p = pair.eval(u, v).ok()?;
    let s = shape_of(&p);
    if s.q_normalized() <= q_floor {
        return None;
    }
    Some(dh_norm2_of(&p).max(0.0).sqrt() / s.q.sqrt())
}

fn ring_sup(pair: &dyn PairField, c: [f64; 2], r: f64, q_floor: f64) -> f64 {
    (0..32)
        .filter_map(|i| {
            let (s, co) = (TAU * i as f64 / 32.0).sin_cos();
            rho_at(pair, c[0] + r * co, c[1] + r * s, q_floor)
        })
        .fold(0.0, f64::max)
}

/// Screens `‖dH‖ ≤ h√q` by sampling `ρ = ‖dH‖/√q` on grids of size `n`
/// and `2n`, and on rings of radius `h` and `h/4` around detected umbilics
/// (`h` the coarse grid spacing).
pub fn hypothesis1_check(pair: &dyn PairField, region: &Region, opts: &AuditOptions, exec: Exec) -> Hypothesis1Report {
    let n = opts.grid_n;
    let sup_coarse = rho_sup(pair, region, n, opts.q_floor, exec);
    let sup_fine = rho_sup(pair, region, 2 * n, opts.q_floor, exec);
    let growth = if sup_coarse > 0.0 {
        sup_fine / sup_coarse - 1.0
    } else if sup_fine > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let bb = region.bbox();
    let h = (bb.width() / n as f64).min(bb.height() / n as f64);
    let scan = find_umbilics(pair, region, &opts.umbilic(), exec);
    let ring_ratios: Vec<f64> = scan
        .records()
        .iter()
        .map(|r| {
            let outer = ring_sup(pair, [r.u, r.v], h, opts.q_floor);
            let inner = ring_sup(pair, [r.u, r.v], h / 4.0, opts.q_floor);
            if outer > 0.0 {
                inner / outer
            } else if inner > 0.0 {
                f64::INFINITY
            } else {
                1.0
            }
        })
        .collect();
    let status = if ring_ratios.iter().any(|&r| r >= 2.0) || growth >= 1.0 {
        Hypothesis1Status::FailUnbounded
    } else if sup_fine <= opts.bound && growth < 0.1 {
        Hypothesis1Status::Pass
    } else {
        Hypothesis1Status::Inconclusive
    };
    Hypothesis1Report {
        status,
        grid_n: n,
        sup_coarse,
        sup_fine,
        growth,
        ring_ratios,
        bound: opts.bound,
        q_floor: opts.q_floor,
    }
}

/// One chart of a closed-surface audit.
pub struct ClosedChart<'a> {
    pub pair: &'a dyn PairField,
    pub region: Rect,
    /// Umbilics closer than this (in chart units) to the region boundary
    /// must be found in the interior of another chart.
    pub margin: f64,
}

pub enum AuditTarget<'a> {
    Disk { pair: &'a dyn PairField, disk: &'a DiskRegion, chart: Option<&'a IsothermalChart> },
    Closed { charts: Vec<ClosedChart<'a>>, euler: i32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub kind: String,
    pub interior: Vec<UmbilicRecord>,
    pub boundary: Vec<VertexRecord>,
    pub index_sum: f64,
    pub raw_sum: f64,
    pub expected: f64,
    pub discrepancy: f64,
    pub pass: bool,
    /// Set when the audit does not apply (totally umbilical region).
    pub not_applicable: Option<String>,
}

impl AuditReport {
    fn not_applicable(kind: &str, expected: f64, why: String) -> Self {
        AuditReport {
            kind: kind.into(),
            interior: Vec::new(),
            boundary: Vec::new(),
            index_sum: 0.0,
            raw_sum: 0.0,
            expected,
            discrepancy: 0.0,
            pass: false,
            not_applicable: Some(why),
        }
    }

    fn finish(kind: &str, interior: Vec<UmbilicRecord>, boundary: Vec<VertexRecord>, expected: f64, tol: f64) -> Self {
        let idx = |r: &UmbilicRecord| r.index.expect("resolved index");
        let index_sum =
            interior.iter().map(|r| idx(r).index).sum::<f64>() + boundary.iter().map(|v| v.index).sum::<f64>();
        let raw_sum =
            interior.iter().map(|r| idx(r).raw).sum::<f64>() + boundary.iter().map(|v| v.index_raw).sum::<f64>();
        let discrepancy = (raw_sum - expected).abs();
        AuditReport {
            kind: kind.into(),
            interior,
            boundary,
            index_sum,
            raw_sum,
            expected,
            discrepancy,
            pass: discrepancy <= tol && (index_sum - expected).abs() < 1e-12,
            not_applicable: None,
        }
    }
}

fn require_resolved(records: &[UmbilicRecord]) -> Result<()> {
    for r in records {
        if r.index.is_none() {
            let why = r.failure.clone().unwrap_or_else(|| "index unresolved".into());
            return Err(Error::NotIsolated { u: r.u, v: r.v, reason: why });
        }
    }
    Ok(())
}

pub fn poincare_hopf_audit(target: &AuditTarget, opts: &AuditOptions, exec: Exec) -> Result<AuditReport> {
    match target {
        AuditTarget::Disk { pair, disk, chart } => {
            let region = Region::Disk((*disk).clone());
            let scan = find_umbilics(*pair, &region, &opts.umbilic(), exec);
            let interior = match scan {
                UmbilicScan::TotallyUmbilical { fraction } => {
                    return Ok(AuditReport::not_applicable(
                        "disk",
                        1.0,
                        format!("region is totally umbilical ({:.1}% of samples below q_tol)", 100.0 * fraction),
                    ))
                }
                UmbilicScan::Isolated { records: r } => r,
            };
            require_resolved(&interior)?;
            let bopts = BoundaryOptions {
                chart: *chart,
                q_floor: opts.q_floor,
                line_tol: opts.boundary_tol,
                ..BoundaryOptions::default()
            };
            let boundary =
                disk.vertices.iter().map(|&j| boundary_index(*pair, disk, j, &bopts)).collect::<Result<Vec<_>>>()?;
            Ok(AuditReport::finish("disk", interior, boundary, 1.0, opts.sum_tol))
        }
        AuditTarget::Closed { charts, euler } => {
            let expected = *euler as f64;
            let mut kept: Vec<UmbilicRecord> = Vec::new();
            let mut edge: Vec<UmbilicRecord> = Vec::new();
            for c in charts {
                let region = Region::Rect(c.region);
                match find_umbilics(c.pair, &region, &opts.umbilic(), exec) {
                    UmbilicScan::TotallyUmbilical { .. } => {
                        return Ok(AuditReport::not_applicable(
                            "closed",
                            expected,
                            "a chart is totally umbilical".into(),
                        ))
                    }
                    UmbilicScan::Isolated { records: recs } => {
                        for r in recs {
                            if region.boundary_distance(r.u, r.v) >= c.margin {
                                kept.push(r);
                            } else {
                                edge.push(r);
                            }
                        }
                    }
                }
            }
            require_resolved(&kept)?;
            let same = |a: &UmbilicRecord, b: &UmbilicRecord| match (&a.position, &b.position) {
                (Some(p), Some(q)) => p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt() < 1e-6,
                _ => (a.u - b.u).hypot(a.v - b.v) < 1e-6,
            };
            let mut unique: Vec<UmbilicRecord> = Vec::new();
            for r in kept {
                if !unique.iter().any(|o| same(o, &r)) {
                    unique.push(r);
                }
            }
            if let Some(e) = edge.iter().find(|e| !unique.iter().any(|o| same(o, e))) {
                return Err(Error::Precondition(format!(
                    "umbilic near ({}, {}) is not interior to any chart",
                    e.u, e.v
                )));
            }
            unique.sort_by(|a, b| {
                let key = |r: &UmbilicRecord| r.position.clone().unwrap_or_else(|| vec![r.u, r.v]);
                key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
            });
            Ok(AuditReport::finish("closed", unique, Vec::new(), expected, opts.sum_tol))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Consistent,
    Contradiction,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub failing: Vec<String>,
    pub checks: Vec<CheckItem>,
    pub hypothesis1: Hypothesis1Report,
    pub vertex_angles: Vec<f64>,
    pub totally_umbilical: bool,
    pub max_q_normalized: f64,
}

/// Evaluates the four structural hypotheses on a disk and compares the
/// outcome with the umbilicity of the region.
pub fn umbilical_disk_verdict(
    pair: &dyn PairField,
    disk: &DiskRegion,
    opts: &AuditOptions,
    exec: Exec,
) -> Result<VerdictReport> {
    let region = Region::Disk(disk.clone());
    let pts = disk.bbox().cell_centres(opts.grid_n);
    let per_point = exec.map(pts.len(), |i| {
        let (u, v) = pts[i];
        if !disk.contains(u, v) {
            return None;
        }
        let p = pair.eval(u, v).ok()?;
        let r = codazzi_residual_of(&p).ok()?;
        Some((r[0].abs().max(r[1].abs()), shape_of(&p).q_normalized()))
    });
    let (codazzi_sup, max_q) =
        per_point.iter().flatten().fold((0.0f64, 0.0f64), |(a, b), (r, q)| (a.max(*r), b.max(*q)));

    let hyp1 = hypothesis1_check(pair, &region, opts, exec);
    let vertex_angles = disk.vertices.iter().map(|&j| vertex_angle(pair, disk, j)).collect::<Result<Vec<_>>>()?;
    let acute = vertex_angles.iter().filter(|&&t| t < std::f64::consts::PI - 1e-9).count();
    let mut boundary_sup = 0.0f64;
    let mut vacuous = 0;
    for c in &disk.curves {
        let chk = boundary_is_curvature_line(pair, c, opts.q_floor)?;
        if chk.vacuous {
            vacuous += 1;
        }
        boundary_sup = boundary_sup.max(chk.residual);
    }
    let checks = vec![
        CheckItem {
            name: "codazzi".into(),
            pass: codazzi_sup < opts.codazzi_tol,
            value: codazzi_sup,
            tolerance: opts.codazzi_tol,
            detail: "sup of |Codazzi residual| over the disk grid".into(),
        },
        CheckItem {
            name: "hypothesis-1".into(),
            pass: hyp1.status == Hypothesis1Status::Pass,
            value: hyp1.sup_fine,
            tolerance: opts.bound,
            detail: format!("{:?}: sup |dH|/sqrt(q) {:.6e} -> {:.6e}", hyp1.status, hyp1.sup_coarse, hyp1.sup_fine),
        },
        CheckItem {
            name: "hypothesis-2".into(),
            pass: acute <= 3,
            value: acute as f64,
            tolerance: 3.0,
            detail: format!("{acute} vertices with angle < pi out of {}", vertex_angles.len()),
        },
        CheckItem {
            name: "hypothesis-3".into(),
            pass: boundary_sup < opts.boundary_tol,
            value: boundary_sup,
            tolerance: opts.boundary_tol,
            detail: format!("boundary curvature-line residual; {vacuous} curve(s) vacuous"),
        },
    ];
    let failing: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    let totally_umbilical =
        failing.is_empty() && find_umbilics(pair, &region, &opts.umbilic(), exec).is_totally_umbilical();
    let verdict = if !failing.is_empty() {
        Verdict::NotApplicable
    } else if totally_umbilical {
        Verdict::Consistent
    } else {
        Verdict::Contradiction
    };
    Ok(VerdictReport {
        verdict,
        failing,
        checks,
        hypothesis1: hyp1,
        vertex_angles,
        totally_umbilical,
        max_q_normalized: max_q,
    })
}
