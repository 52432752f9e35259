//! End-to-end scenarios on gallery surfaces. Reference values come from
//! closed-form geometry written out here, not from library calls.

use std::f64::consts::{FRAC_PI_2, PI};

use umbilic_core::gallery::{args, build, GalleryArgs};
use umbilic_core::isothermal::{lemma2_check, IsothermalChart};
use umbilic_core::lines::{
    find_umbilics, hypothesis1_check, poincare_hopf_audit, umbilical_disk_verdict, AuditOptions, AuditTarget,
    ClosedChart, Hypothesis1Status, Region, UmbilicOptions, Verdict,
};
use umbilic_core::pairs::{codazzi_residual, pair_curvatures, PairField};
use umbilic_core::{Exec, Rect};

/// Umbilics of `x²/a² + y²/b² + z²/c² = 1` with `a > b > c`.
fn ellipsoid_umbilics(a: f64, b: f64, c: f64) -> Vec<[f64; 3]> {
    let x = a * ((a * a - b * b) / (a * a - c * c)).sqrt();
    let z = c * ((b * b - c * c) / (a * a - c * c)).sqrt();
    let mut out = Vec::new();
    for sx in [-1.0, 1.0] {
        for sz in [-1.0, 1.0] {
            out.push([sx * x, 0.0, sz * z]);
        }
    }
    out
}

#[test]
fn ellipsoid_closed_audit() {
    let s = build("ellipsoid", &GalleryArgs::new()).unwrap();
    let atlas = s.closed.as_ref().unwrap();
    let charts = atlas
        .charts
        .iter()
        .map(|(p, r)| ClosedChart { pair: p as &dyn PairField, region: *r, margin: atlas.margin })
        .collect();
    let opts = AuditOptions::default();
    let rep = poincare_hopf_audit(&AuditTarget::Closed { charts, euler: atlas.euler }, &opts, Exec::default()).unwrap();
    assert_eq!(rep.interior.len(), 4, "{:#?}", rep.interior);
    let expected = ellipsoid_umbilics(1.5, 1.0, 0.5);
    for r in &rep.interior {
        let p = r.position.as_ref().unwrap();
        let d = expected
            .iter()
            .map(|e| (0..3).map(|i| (e[i] - p[i]).powi(2)).sum::<f64>().sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1e-4, "umbilic {p:?} off by {d}");
        assert_eq!(r.index.unwrap().index, 0.5);
    }
    assert_eq!(rep.index_sum, 2.0);
    assert!(rep.pass);
}

#[test]
fn ellipsoid_hypothesis1_fails_unbounded() {
    let s = build("ellipsoid", &GalleryArgs::new()).unwrap();
    let region = Region::Rect(Rect::new(0.0, 2.0 * PI, -1.2, 1.2).unwrap());
    let rep = hypothesis1_check(&s.pair, &region, &AuditOptions::default(), Exec::default());
    assert_eq!(rep.status, Hypothesis1Status::FailUnbounded, "{rep:?}");
}

#[test]
fn ellipsoid_disk_audit_and_verdict() {
    let s = build("ellipsoid", &GalleryArgs::new()).unwrap();
    let disk = s.disk.as_ref().unwrap();
    let opts = AuditOptions::default();
    let rep =
        poincare_hopf_audit(&AuditTarget::Disk { pair: &s.pair, disk, chart: None }, &opts, Exec::default()).unwrap();
    assert_eq!(rep.interior.len(), 2);
    assert!(rep.pass, "{rep:?}");
    let v = umbilical_disk_verdict(&s.pair, disk, &opts, Exec::default()).unwrap();
    assert_eq!(v.verdict, Verdict::NotApplicable);
    assert_eq!(v.failing, vec!["hypothesis-1".to_string()], "{:#?}", v.checks);
}

#[test]
fn cgc_sharpness_scenario() {
    let s = build("cgc_rotational", &args([("K", "1"), ("b", "0.7")])).unwrap();
    let patch = s.patch.as_ref().unwrap();
    let disk = s.disk.as_ref().unwrap();
    for (u, v) in disk.bbox().cell_centres(16) {
        assert!((patch.intrinsic_curvature(u, v).unwrap() - 1.0).abs() < 1e-6);
        assert!(pair_curvatures(&s.pair, u, v).unwrap().q > 0.0);
    }
    let v_ref = s.isothermal_ref.unwrap();
    let chart = IsothermalChart::rotational(&s.pair, v_ref).unwrap();
    let opts = AuditOptions::default();
    let rep =
        poincare_hopf_audit(&AuditTarget::Disk { pair: &s.pair, disk, chart: Some(&chart) }, &opts, Exec::default())
            .unwrap();
    assert!(rep.interior.is_empty());
    assert_eq!(rep.boundary.len(), 4);
    for b in &rep.boundary {
        assert!((b.theta - FRAC_PI_2).abs() < 1e-6, "{b:?}");
        assert_eq!(b.index, 0.25);
        assert_eq!(b.methods_agree, Some(true), "{b:?}");
    }
    assert!((rep.raw_sum - 1.0).abs() < 0.05);
    let v = umbilical_disk_verdict(&s.pair, disk, &opts, Exec::default()).unwrap();
    assert_eq!(v.verdict, Verdict::NotApplicable);
    assert_eq!(v.failing, vec!["hypothesis-2".to_string()], "{:#?}", v.checks);
    let c3 = v.checks.iter().find(|c| c.name == "hypothesis-3").unwrap();
    assert!(c3.value < 1e-8, "{c3:?}");
}

#[test]
fn complete_cgc_sphere_is_totally_umbilical() {
    let s = build("cgc_rotational", &args([("K", "1"), ("b", "1")])).unwrap();
    let region = Region::Rect(s.domain());
    let scan = find_umbilics(&s.pair, &region, &UmbilicOptions::default(), Exec::default());
    assert!(scan.is_totally_umbilical());
    for (u, v) in s.domain().cell_centres(32) {
        assert!(pair_curvatures(&s.pair, u, v).unwrap().q < 1e-9);
    }
}

#[test]
fn space_form_codazzi_on_grids() {
    let cases: Vec<(&str, GalleryArgs)> = vec![
        ("plane", GalleryArgs::new()),
        ("round_sphere", GalleryArgs::new()),
        ("ellipsoid", GalleryArgs::new()),
        ("torus", GalleryArgs::new()),
        ("cgc_rotational", args([("K", "1"), ("b", "0.7")])),
        ("s3_small_sphere", GalleryArgs::new()),
        ("h3_equidistant", GalleryArgs::new()),
    ];
    for (name, a) in cases {
        let s = build(name, &a).unwrap();
        let mut worst = 0.0f64;
        for (u, v) in s.domain().cell_centres(64) {
            let r = codazzi_residual(&s.pair, u, v).unwrap();
            worst = worst.max(r[0].abs()).max(r[1].abs());
        }
        assert!(worst < 1e-7, "{name}: {worst:e}");
    }
}

#[test]
fn lemma2_on_isothermal_charts() {
    for (name, a) in [("torus", GalleryArgs::new()), ("cgc_rotational", args([("K", "1"), ("b", "0.7")]))] {
        let s = build(name, &a).unwrap();
        let chart = IsothermalChart::rotational(&s.pair, s.isothermal_ref.unwrap()).unwrap();
        let d = chart.domain().inset(0.05);
        let mut n = 0;
        for (x, y) in d.cell_centres(12) {
            let Ok(r) = lemma2_check(&s.pair, &chart, x, y, 0.01) else { continue };
            n += 1;
            assert!(r.hopf_gap < 1e-5 && r.dh_gap < 1e-5 && r.modulus_gap < 1e-8, "{name} at ({x}, {y}): {r:?}");
        }
        assert!(n >= 100, "{name}: only {n} probes above the q floor");
    }
}

#[test]
fn traced_lines_follow_the_principal_fields() {
    use umbilic_core::lines::q_normalized_of;
    use umbilic_core::lines::{curvature_line_residual, trace_line, Family, StopReason, TraceOptions};

    // Torus: no umbilics, and the lines are its meridians and parallels.
    let torus = build("torus", &args([])).unwrap();
    let dom = torus.domain();
    let region = Region::Rect(dom);
    for (i, family) in [Family::First, Family::Second].into_iter().enumerate() {
        for backward in [false, true] {
            let start = [dom.u0 + 0.3 * dom.width(), dom.v0 + (0.2 + 0.3 * i as f64) * dom.height()];
            let opts = TraceOptions { family, step: 0.01, max_len: 3.0, q_floor: 1e-6, backward };
            let line = trace_line(&torus.pair, start, &opts, &region).unwrap();
            assert_ne!(line.stop, StopReason::NearUmbilic);
            assert!(line.points.len() > 10);
            let spread = |k: usize| {
                let xs = line.points.iter().map(|p| p[k]);
                xs.clone().fold(f64::NEG_INFINITY, f64::max) - xs.fold(f64::INFINITY, f64::min)
            };
            assert!(spread(0).min(spread(1)) < 1e-6, "{family:?}: spreads {} {}", spread(0), spread(1));
        }
    }

    // Ellipsoid chart with a non-unit metric: W vanishes along the polyline.
    let ell = build("ellipsoid", &args([])).unwrap();
    let region = Region::Rect(ell.domain());
    for family in [Family::First, Family::Second] {
        let opts = TraceOptions { family, step: 0.005, max_len: 1.0, q_floor: 1e-6, backward: false };
        let line = trace_line(&ell.pair, [1.0, 0.3], &opts, &region).unwrap();
        for w in line.points.windows(2) {
            let mid = [(w[0][0] + w[1][0]) / 2.0, (w[0][1] + w[1][1]) / 2.0];
            let p = ell.pair.eval(mid[0], mid[1]).unwrap();
            if q_normalized_of(&p) < 1e-4 {
                continue;
            }
            let d = [w[1][0] - w[0][0], w[1][1] - w[0][1]];
            let r = curvature_line_residual(&p, d);
            assert!(r < 1e-4, "{family:?} residual {r} at {mid:?}");
        }
    }
}
