//! Property tests for pointwise invariants.

use proptest::prelude::*;
use umbilic_core::expr::{params, parse};
use umbilic_core::gallery::{args, build, make};
use umbilic_core::lines::{doubled_chart_angle, frame_coefficient, scan_grid, snap, Region};
use umbilic_core::pairs::shape_of;
use umbilic_core::{Exec, FormJet, Jet3, PairJet, Rect};

/// Symmetric positive definite `A = LLᵀ` and arbitrary symmetric `B`.
fn pair_strategy() -> impl Strategy<Value = PairJet> {
    (0.2f64..3.0, -2.0f64..2.0, 0.2f64..3.0, -5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0).prop_map(
        |(l11, l21, l22, e, f, g)| PairJet {
            a: FormJet::constant(l11 * l11, l11 * l21, l21 * l21 + l22 * l22),
            b: FormJet::constant(e, f, g),
        },
    )
}

proptest! {
    #[test]
    fn skew_curvature_is_nonnegative_and_matches_invariants(p in pair_strategy()) {
        let s = shape_of(&p);
        prop_assert!(s.q >= 0.0);
        let scale = s.h * s.h + s.k_e.abs() + 1.0;
        prop_assert!((s.q - (s.h * s.h - s.k_e)).abs() <= 1e-9 * scale);
        // H and K_e are half the trace and the determinant of S = A⁻¹B.
        let tr = s.s[0][0] + s.s[1][1];
        let det = s.s[0][0] * s.s[1][1] - s.s[0][1] * s.s[1][0];
        prop_assert!((tr - 2.0 * s.h).abs() <= 1e-9 * scale);
        prop_assert!((det - s.k_e).abs() <= 1e-9 * scale);
        prop_assert!(s.k1 >= s.k2);
    }

    #[test]
    fn principal_direction_is_an_eigenvector(p in pair_strategy()) {
        let s = shape_of(&p);
        prop_assume!(s.q > 1e-6 * (s.h * s.h + s.k_e.abs() + 1.0));
        let (re, im) = frame_coefficient(&p);
        prop_assert!((re * re + im * im - s.q).abs() <= 1e-9 * (1.0 + s.q));
        let half = 0.5 * doubled_chart_angle(&p);
        let d = [half.cos(), half.sin()];
        let sd = [s.s[0][0] * d[0] + s.s[0][1] * d[1], s.s[1][0] * d[0] + s.s[1][1] * d[1]];
        let scale = s.k1.abs().max(s.k2.abs()).max(1.0);
        prop_assert!((sd[0] - s.k1 * d[0]).abs() <= 1e-8 * scale && (sd[1] - s.k1 * d[1]).abs() <= 1e-8 * scale,
            "S d = {sd:?}, k1 d = {:?}", [s.k1 * d[0], s.k1 * d[1]]);
    }

    #[test]
    fn scaling_b_scales_h_linearly_and_q_quadratically(p in pair_strategy(), t in 0.1f64..10.0) {
        // B → tB scales H by t and q by t².
        let scaled = PairJet { a: p.a, b: FormJet::constant(t * p.b.uu.val, t * p.b.uv.val, t * p.b.vv.val) };
        let (s0, s1) = (shape_of(&p), shape_of(&scaled));
        prop_assert!((s1.h - t * s0.h).abs() <= 1e-9 * (1.0 + t * s0.h.abs()));
        prop_assert!((s1.q - t * t * s0.q).abs() <= 1e-9 * (1.0 + t * t * s0.q));
    }

    #[test]
    fn snap_lands_on_the_lattice(x in -10.0f64..10.0, k in 1u32..5) {
        let step = 1.0 / f64::from(k);
        let (s, r) = snap(x, step);
        prop_assert!(r <= 0.5 * step + 1e-12);
        prop_assert!(((s / step) - (s / step).round()).abs() < 1e-9);
        prop_assert!((x - s).abs() == r);
    }

    #[test]
    fn jets_match_central_differences(a in -2.0f64..2.0, b in -2.0f64..2.0, u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let e = parse("a*sin(u*v) + exp(b*u)*cos(v) + u^3*v/(2 + v^2)").unwrap();
        let ps = params([("a", a), ("b", b)]);
        let j = e.eval_jet(Jet3::var_u(u), Jet3::var_v(v), &ps).unwrap();
        let f = |x: f64, y: f64| e.eval_f64(x, y, &ps).unwrap();
        let h = 1e-4;
        let fu = (f(u + h, v) - f(u - h, v)) / (2.0 * h);
        let fv = (f(u, v + h) - f(u, v - h)) / (2.0 * h);
        let fuv = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4.0 * h * h);
        let c = j.components();
        prop_assert!((c[0] - f(u, v)).abs() < 1e-12 * (1.0 + c[0].abs()));
        prop_assert!((c[1] - fu).abs() < 1e-6 * (1.0 + fu.abs()));
        prop_assert!((c[2] - fv).abs() < 1e-6 * (1.0 + fv.abs()));
        prop_assert!((c[4] - fuv).abs() < 1e-4 * (1.0 + fuv.abs()));
    }

    #[test]
    fn product_identity_holds_on_tilted_graphs(
        eps in prop::sample::select(vec!["-1", "1"]),
        cu in -0.5f64..0.5,
        cv in -0.5f64..0.5,
        su in 0.1f64..0.9,
        sv in 0.1f64..0.9,
    ) {
        let f = format!("{cu}*u + {cv}*v + 0.1*u*v");
        let patch = make("tilted_graph", &args([("eps", eps), ("f", f.as_str())])).unwrap();
        let d = patch.domain;
        let (u, v) = (d.u0 + su * d.width(), d.v0 + sv * d.height());
        let g = patch.product_geometry(u, v).unwrap();
        prop_assert!(g.identity_residual < 1e-10, "residual {}", g.identity_residual);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sequential_and_parallel_grids_are_identical(n in 2usize..24, name in prop::sample::select(vec!["torus", "ellipsoid", "cgc_rotational"])) {
        let s = build(name, &args([])).unwrap();
        let region = Region::Rect(s.domain());
        let seq = scan_grid(&s.pair, &region, n, Exec::Sequential);
        let par = scan_grid(&s.pair, &region, n, Exec::default());
        prop_assert_eq!(seq, par);
    }

    #[test]
    fn rect_contains_its_corners(u0 in -5.0f64..5.0, w in 0.01f64..3.0, v0 in -5.0f64..5.0, h in 0.01f64..3.0) {
        let r = Rect::new(u0, u0 + w, v0, v0 + h).unwrap();
        prop_assert!(r.contains(u0, v0) && r.contains(u0 + w, v0 + h));
        prop_assert!(!r.contains(u0 - 1e-9 - 1e-9 * u0.abs(), v0));
    }
}
