//! Curvature-line fields, umbilics and rotation-index calculus.
//!
//! Line fields are mod-π objects, so every winding computation lifts a
//! doubled angle with adaptive bisection keeping each step below π/4.
//! Interior indices are half-integers and boundary indices multiples of 1/4;
//! both are snapped with a residual gate.

mod audit;
mod disk;
mod field;
mod region;
mod umbilics;

pub use audit::{
    hypothesis1_check, poincare_hopf_audit, umbilical_disk_verdict, AuditOptions, AuditReport, AuditTarget, CheckItem,
    ClosedChart, Hypothesis1Report, Hypothesis1Status, Verdict, VerdictReport,
};
pub use disk::{
    boundary_index, boundary_is_curvature_line, curvature_line_residual, vertex_angle, BoundaryOptions,
    CurvatureLineCheck, OrderMethod, VertexRecord, QUANTIZATION_TOL,
};
pub use field::{
    doubled_chart_angle, frame_coefficient, lines_form_on, principal_directions, principal_frame_angle,
    q_normalized_of, trace_line, Family, Polyline, StopReason, TraceOptions,
};
pub use region::{DiskRegion, Region};
pub use umbilics::{
    find_umbilics, interior_index, scan_grid, separatrix_count, zero_order, GridSample, GridScan, IndexReport,
    UmbilicOptions, UmbilicRecord, UmbilicScan, ZeroOrder,
};

/// Default floor on the normalised skew curvature `q / (H² + |K_e| + 1)`.
pub const DEFAULT_Q_FLOOR: f64 = 1e-6;
pub const INTERIOR_SNAP_LIMIT: f64 = 0.05;
pub const BOUNDARY_SNAP_LIMIT: f64 = 0.05;

/// Rounds `x` to the nearest multiple of `step`, returning the snapped value
/// and the absolute residual.
pub fn snap(x: f64, step: f64) -> (f64, f64) {
    let s = (x / step).round() * step;
    let s = if s == 0.0 { 0.0 } else { s };
    (s, (x - s).abs())
}
