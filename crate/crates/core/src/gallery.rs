//! Built-in surfaces with known geometry.
//!
//! Every entry is a [`SurfacePatch`] (or, for the synthetic Hopf entries, an
//! abstract pair) together with a parameter schema and a list of properties
//! that [`verify`] checks numerically. Rotational entries use the rotation
//! angle as `u` and the profile parameter as `v`, and keep a 1e−3 margin
//! from the axis.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ambient::{AmbientSpace, Rect, SurfacePatch};
use crate::curve::ChartCurve;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::expr::{parse, Expr, Params};
use crate::lines::{
    boundary_is_curvature_line, interior_index, zero_order, DiskRegion, DEFAULT_Q_FLOOR, INTERIOR_SNAP_LIMIT,
};
use crate::pairs::{codazzi_residual_of, mean_curvature_dual, shape_of, AbstractPair, Pair, PairField, PairJet};
use crate::product::lemma3_check;

/// Distance kept from rotation axes and other chart poles.
pub const POLE_MARGIN: f64 = 1e-3;
const PROBE_N: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ParamKind {
    Real {
        min: f64,
        max: f64,
        min_open: bool,
        max_open: bool,
    },
    /// `ε ∈ {−1, 1}`.
    Sign,
    Integer {
        min: i64,
        max: i64,
    },
    Expression,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: &'static str,
    pub doc: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryInfo {
    pub name: &'static str,
    pub ambient: Option<&'static str>,
    pub params: Vec<ParamSpec>,
    pub doc: &'static str,
    /// Built from a construction checked only through its oracles.
    pub derived: bool,
}

fn real(
    name: &'static str,
    min: f64,
    max: f64,
    open: (bool, bool),
    default: &'static str,
    doc: &'static str,
) -> ParamSpec {
    ParamSpec { name, kind: ParamKind::Real { min, max, min_open: open.0, max_open: open.1 }, default, doc }
}

fn positive(name: &'static str, default: &'static str, doc: &'static str) -> ParamSpec {
    real(name, 0.0, f64::INFINITY, (true, true), default, doc)
}

fn sign(default: &'static str) -> ParamSpec {
    ParamSpec { name: "eps", kind: ParamKind::Sign, default, doc: "curvature sign of the factor M²(ε)" }
}

fn expression(name: &'static str, default: &'static str, doc: &'static str) -> ParamSpec {
    ParamSpec { name, kind: ParamKind::Expression, default, doc }
}

/// All gallery entries in a fixed order.
pub fn entries() -> Vec<EntryInfo> {
    let e = |name, ambient, params, doc| EntryInfo { name, ambient, params, doc, derived: false };
    vec![
        e("plane", Some("R3"), vec![], "the plane z = 0 over [-1, 1]²"),
        e("round_sphere", Some("R3"), vec![positive("r", "1", "radius")], "round sphere, rotational chart"),
        e(
            "ellipsoid",
            Some("R3"),
            vec![
                positive("a", "1.5", "x semi-axis"),
                positive("b", "1", "y semi-axis"),
                positive("c", "0.5", "z semi-axis"),
                real(
                    "lambda",
                    0.0,
                    f64::INFINITY,
                    (false, true),
                    "0",
                    "confocal parameter of the disk boundary; 0 picks (a²+b²)/2",
                ),
            ],
            "triaxial ellipsoid; chart poles on the z axis",
        ),
        e(
            "torus",
            Some("R3"),
            vec![positive("R", "2", "centre-line radius"), positive("r", "0.5", "tube radius")],
            "torus of revolution",
        ),
        e(
            "graph",
            Some("R3"),
            vec![expression("f", "0.5*u^2 + 0.2*u*v + v^2", "height over (u, v)")],
            "graph z = f(u, v) over [-1, 1]²",
        ),
        e("s3_great_sphere", Some("S3"), vec![], "totally geodesic sphere in S³"),
        e(
            "s3_small_sphere",
            Some("S3"),
            vec![real("rho", 0.0, FRAC_PI_2, (true, true), "0.8", "spherical radius")],
            "geodesic sphere in S³",
        ),
        e(
            "h3_equidistant",
            Some("H3"),
            vec![real("d", 0.0, f64::INFINITY, (false, true), "0.5", "distance to the totally geodesic plane")],
            "equidistant surface in H³ over [-1, 1]²",
        ),
        e(
            "cgc_rotational",
            Some("R3"),
            vec![
                positive("K", "1", "Gaussian curvature"),
                real("b", 0.0, 1.0, (true, false), "0.7", "profile amplitude, b√K ≤ 1"),
            ],
            "rotational surface of constant Gaussian curvature; b = 1 is the round sphere",
        ),
        e(
            "slice",
            None,
            vec![sign("-1"), real("t0", f64::NEG_INFINITY, f64::INFINITY, (true, true), "0", "height")],
            "horizontal slice M²(ε) × {t0}",
        ),
        e(
            "vertical_cylinder",
            None,
            vec![sign("-1"), positive("r", "0.8", "geodesic radius of the base circle")],
            "vertical cylinder over a geodesic circle",
        ),
        e(
            "tilted_graph",
            None,
            vec![sign("-1"), expression("f", "0.3*u + 0.2*v", "height over the base chart")],
            "graph of f over the base chart of M²(ε)",
        ),
        EntryInfo {
            name: "k_rotational_product",
            ambient: None,
            params: vec![
                sign("-1"),
                positive("K", "1", "Gaussian curvature, K > max(0, ε)"),
                positive("seed", "0.5", "initial profile slope k'(0); needs seed·√K ≤ 1"),
            ],
            doc: "rotational K-surface in M²(ε)×ℝ with profile fixed by K(I) = K",
            derived: true,
        },
        EntryInfo {
            name: "synthetic_qz",
            ambient: None,
            params: vec![
                ParamSpec {
                    name: "k",
                    kind: ParamKind::Integer { min: 1, max: 8 },
                    default: "1",
                    doc: "order of the zero",
                },
                real("H", f64::NEG_INFINITY, f64::INFINITY, (true, true), "1", "constant mean curvature"),
            ],
            doc: "abstract Codazzi pair on [-1, 1]² with flat A and Hopf differential zᵏ",
            derived: false,
        },
    ]
}

pub fn info(name: &str) -> Result<EntryInfo> {
    entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown gallery entry '{name}'")))
}

/// Raw `name = value` arguments; numbers and expressions alike.
pub type GalleryArgs = BTreeMap<String, String>;

pub fn args<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> GalleryArgs {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

struct Resolved {
    numbers: Params,
    exprs: BTreeMap<String, String>,
}

impl Resolved {
    fn num(&self, k: &str) -> f64 {
        self.numbers[k]
    }

    fn eps(&self) -> i8 {
        self.numbers["eps"] as i8
    }
}

fn resolve(info: &EntryInfo, given: &GalleryArgs) -> Result<Resolved> {
    if let Some(k) = given.keys().find(|k| !info.params.iter().any(|p| p.name == k.as_str())) {
        return Err(Error::InvalidParameter(format!("'{}' has no parameter '{k}'", info.name)));
    }
    let mut numbers = Params::new();
    let mut exprs = BTreeMap::new();
    for p in &info.params {
        let raw = given.get(p.name).map(String::as_str).unwrap_or(p.default).trim();
        let bad = |why: String| Error::InvalidParameter(format!("{}.{} = '{raw}': {why}", info.name, p.name));
        match &p.kind {
            ParamKind::Expression => {
                parse(raw)?;
                exprs.insert(p.name.to_string(), raw.to_string());
            }
            kind => {
                let x: f64 = raw.parse().map_err(|_| bad("not a number".into()))?;
                let ok = match *kind {
                    ParamKind::Real { min, max, min_open, max_open } => {
                        x.is_finite()
                            && (if min_open { x > min } else { x >= min })
                            && (if max_open { x < max } else { x <= max })
                    }
                    ParamKind::Sign => x == 1.0 || x == -1.0,
                    ParamKind::Integer { min, max } => x.fract() == 0.0 && x >= min as f64 && x <= max as f64,
                    ParamKind::Expression => unreachable!(),
                };
                if !ok {
                    return Err(bad(format!("outside {:?}", kind)));
                }
                numbers.insert(p.name.to_string(), x);
            }
        }
    }
    Ok(Resolved { numbers, exprs })
}

fn exprs(src: &[&str]) -> Result<Vec<Expr>> {
    src.iter().map(|s| parse(s)).collect()
}

fn rect(u0: f64, u1: f64, v0: f64, v1: f64) -> Rect {
    Rect::new(u0, u1, v0, v1).expect("static gallery rectangle")
}

/// Base chart of M²(ε): `(cos v cos u, cos v sin u, sin v)` on S², the
/// global chart `(cosh u cosh v, sinh u, cosh u sinh v)` on H².
fn base_chart(eps: i8) -> (&'static [&'static str; 3], Rect) {
    if eps > 0 {
        (
            &["cos(v)*cos(u)", "cos(v)*sin(u)", "sin(v)"],
            rect(0.0, TAU, -FRAC_PI_2 + POLE_MARGIN, FRAC_PI_2 - POLE_MARGIN),
        )
    } else {
        (&["cosh(u)*cosh(v)", "sinh(u)", "cosh(u)*sinh(v)"], rect(-1.0, 1.0, -1.0, 1.0))
    }
}

/// Real and imaginary parts of `(u + iv)^k` as polynomial source.
fn z_power(k: u32) -> (String, String) {
    let mut re = Vec::new();
    let mut im = Vec::new();
    let mut binom = 1u64;
    for j in 0..=k {
        if j > 0 {
            binom = binom * (k - j + 1) as u64 / j as u64;
        }
        let mut term = format!("{binom}");
        if k - j > 0 {
            term += &format!("*u^{}", k - j);
        }
        if j > 0 {
            term += &format!("*v^{j}");
        }
        let negative = (j / 2) % 2 == 1;
        let signed = if negative { format!("-{term}") } else { format!("+{term}") };
        if j % 2 == 0 {
            re.push(signed);
        } else {
            im.push(signed);
        }
    }
    (re.join(""), im.join(""))
}

/// Abstract pair with `A = du² + dv²`, mean curvature `h` and Hopf
/// differential `zᵏ`.
pub fn synthetic_qz(k: u32, h: f64) -> Result<AbstractPair> {
    let (re, im) = z_power(k);
    let params = crate::expr::params([("H", h)]);
    Ok(AbstractPair {
        domain: rect(-1.0, 1.0, -1.0, 1.0),
        a: [parse("1")?, parse("0")?, parse("1")?],
        b: [parse(&format!("H + 2*({re})"))?, parse(&format!("-2*({im})"))?, parse(&format!("H - 2*({re})"))?],
        params,
    })
}

fn cgc_height(k: &str) -> String {
    format!("integral(sqrt(1 - b^2*{k}*cos(sqrt({k})*r)^2), r, 0, v)")
}

/// The immersion of an entry. Fails for entries without one.
pub fn make(name: &str, given: &GalleryArgs) -> Result<SurfacePatch> {
    let info = info(name)?;
    let r = resolve(&info, given)?;
    make_resolved(&info, &r)
}

fn make_resolved(info: &EntryInfo, r: &Resolved) -> Result<SurfacePatch> {
    let n = &r.numbers;
    let patch = match info.name {
        "plane" => SurfacePatch::from_exprs(
            AmbientSpace::EUCLIDEAN,
            rect(-1.0, 1.0, -1.0, 1.0),
            exprs(&["u", "v", "0"])?,
            Params::new(),
        )?,
        "round_sphere" => SurfacePatch::from_exprs(
            AmbientSpace::EUCLIDEAN,
            rect(0.0, TAU, -FRAC_PI_2 + POLE_MARGIN, FRAC_PI_2 - POLE_MARGIN),
            exprs(&["r*cos(v)*sin(u)", "r*cos(v)*cos(u)", "r*sin(v)"])?,
            n.clone(),
        )?,
        "ellipsoid" => ellipsoid_chart(r.num("a"), r.num("b"), r.num("c"), 1)?,
        "torus" => {
            if r.num("r") >= r.num("R") {
                return Err(Error::InvalidParameter("torus needs r < R".into()));
            }
            SurfacePatch::from_exprs(
                AmbientSpace::EUCLIDEAN,
                rect(0.0, TAU, 0.0, TAU),
                exprs(&["(R + r*cos(v))*sin(u)", "(R + r*cos(v))*cos(u)", "r*sin(v)"])?,
                n.clone(),
            )?
        }
        "graph" => SurfacePatch::from_exprs(
            AmbientSpace::EUCLIDEAN,
            rect(-1.0, 1.0, -1.0, 1.0),
            vec![parse("u")?, parse("v")?, parse(&r.exprs["f"])?],
            Params::new(),
        )?,
        "s3_great_sphere" | "s3_small_sphere" => {
            let rho = if info.name == "s3_great_sphere" { FRAC_PI_2 } else { r.num("rho") };
            SurfacePatch::from_exprs(
                AmbientSpace::SPHERE,
                rect(0.0, TAU, -FRAC_PI_2 + POLE_MARGIN, FRAC_PI_2 - POLE_MARGIN),
                exprs(&["cos(rho)", "sin(rho)*cos(v)*sin(u)", "sin(rho)*cos(v)*cos(u)", "sin(rho)*sin(v)"])?,
                crate::expr::params([("rho", rho)]),
            )?
        }
        "h3_equidistant" => SurfacePatch::from_exprs(
            AmbientSpace::HYPERBOLIC,
            rect(-1.0, 1.0, -1.0, 1.0),
            exprs(&["cosh(d)*cosh(u)*cosh(v)", "sinh(d)", "cosh(d)*sinh(u)", "cosh(d)*cosh(u)*sinh(v)"])?,
            n.clone(),
        )?,
        "cgc_rotational" => {
            let (k, b) = (r.num("K"), r.num("b"));
            if b * k.sqrt() > 1.0 + 1e-15 {
                return Err(Error::InvalidParameter(format!("cgc_rotational needs b√K ≤ 1, got {}", b * k.sqrt())));
            }
            let t1 = PI / k.sqrt();
            SurfacePatch::from_exprs(
                AmbientSpace::EUCLIDEAN,
                rect(0.0, TAU, POLE_MARGIN, t1 - POLE_MARGIN),
                vec![parse("sin(u)*b*sin(sqrt(K)*v)")?, parse("cos(u)*b*sin(sqrt(K)*v)")?, parse(&cgc_height("K"))?],
                n.clone(),
            )?
        }
        "slice" => {
            let (base, dom) = base_chart(r.eps());
            let mut e = exprs(base)?;
            e.push(parse("t0")?);
            SurfacePatch::from_exprs(AmbientSpace::product(r.eps())?, dom, e, n.clone())?
        }
        "vertical_cylinder" => {
            let e = if r.eps() > 0 {
                if r.num("r") >= PI {
                    return Err(Error::InvalidParameter("vertical_cylinder on S² needs r < π".into()));
                }
                ["cos(r)", "sin(r)*cos(u)", "sin(r)*sin(u)", "v"]
            } else {
                ["cosh(r)", "sinh(r)*cos(u)", "sinh(r)*sin(u)", "v"]
            };
            SurfacePatch::from_exprs(AmbientSpace::product(r.eps())?, rect(0.0, TAU, -1.0, 1.0), exprs(&e)?, n.clone())?
        }
        "tilted_graph" => {
            let (base, dom) = base_chart(r.eps());
            let mut e = exprs(base)?;
            e.push(parse(&r.exprs["f"])?);
            SurfacePatch::from_exprs(AmbientSpace::product(r.eps())?, dom, e, Params::new())?
        }
        "k_rotational_product" => k_rotational_product(r.eps(), r.num("K"), r.num("seed"))?,
        "synthetic_qz" => {
            return Err(Error::InvalidParameter("synthetic_qz is an abstract pair without an immersion".into()))
        }
        other => return Err(Error::Internal(format!("entry '{other}' has no factory"))),
    };
    Ok(patch)
}

/// Ellipsoid charts: `1` has its poles on the z axis, `2` on the x axis.
pub fn ellipsoid_chart(a: f64, b: f64, c: f64, which: u8) -> Result<SurfacePatch> {
    let src: [&str; 3] = match which {
        1 => ["a*cos(v)*sin(u)", "b*cos(v)*cos(u)", "c*sin(v)"],
        2 => ["-a*sin(v)", "b*cos(v)*cos(u)", "c*cos(v)*sin(u)"],
        _ => return Err(Error::InvalidParameter(format!("ellipsoid chart {which} does not exist"))),
    };
    SurfacePatch::from_exprs(
        AmbientSpace::EUCLIDEAN,
        rect(0.0, TAU, -FRAC_PI_2 + POLE_MARGIN, FRAC_PI_2 - POLE_MARGIN),
        exprs(&src)?,
        crate::expr::params([("a", a), ("b", b), ("c", c)]),
    )
}

/// Rotational surface in M²(ε)×ℝ with `K(I) = K`.
///
/// With `t` the profile arclength and `k(t)` the warping function of the
/// base circles (`k = sin ρ` on S², `sinh ρ` on H², `ρ` the base distance
/// to the axis) the metric is `k² ds² + dt²`. Its curvature is `−k''/k`, so
/// the shooting problem `k'' = −K k`, `k(0) = 0`, `k'(0) = seed` has the
/// solution `k = seed · sin(√K t)`. The height follows from unit speed,
/// `h' = √(1 − k'²/(1 − εk²))`.
pub fn k_rotational_product(eps: i8, k: f64, seed: f64) -> Result<SurfacePatch> {
    let amb = AmbientSpace::product(eps)?;
    crate::product::check_k(amb, k)?;
    if !(seed > 0.0) || seed * k.sqrt() > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "k_rotational_product needs 0 < seed·√K ≤ 1, got {}",
            seed * k.sqrt()
        )));
    }
    let prof = "seed*sin(sqrt(K)*v)";
    let axis = if eps > 0 { format!("sqrt(1 - ({prof})^2)") } else { format!("sqrt(1 + ({prof})^2)") };
    let h = "integral(sqrt(1 - (seed*sqrt(K)*cos(sqrt(K)*r))^2 / (1 - eps*(seed*sin(sqrt(K)*r))^2)), r, 0, v)";
    let t1 = PI / k.sqrt();
    SurfacePatch::from_exprs(
        amb,
        rect(0.0, TAU, POLE_MARGIN, t1 - POLE_MARGIN),
        vec![parse(&axis)?, parse(&format!("({prof})*cos(u)"))?, parse(&format!("({prof})*sin(u)"))?, parse(h)?],
        crate::expr::params([("eps", eps as f64), ("K", k), ("seed", seed)]),
    )
}

/// Disk on chart 1 of the ellipsoid bounded by its intersection with the
/// confocal two-sheeted hyperboloid of parameter `lambda ∈ (b², a²)`. The
/// boundary is a closed curvature line around the cap at `(a, 0, 0)` and
/// has no vertices.
pub fn ellipsoid_confocal_disk(a: f64, b: f64, c: f64, lambda: f64) -> Result<DiskRegion> {
    if !(a > b && b > c && c > 0.0) {
        return Err(Error::InvalidParameter("confocal disk needs a > b > c > 0".into()));
    }
    if !(lambda > b * b && lambda < a * a) {
        return Err(Error::InvalidParameter(format!("confocal parameter must lie in ({}, {})", b * b, a * a)));
    }
    let (p, q, s) = (a * a - lambda, lambda - b * b, lambda - c * c);
    let centre = [FRAC_PI_2, 0.0];
    // F and its chart gradient.
    let f = move |u: f64, v: f64| {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let (x, y, z) = (a * cv * su, b * cv * cu, c * sv);
        let val = x * x / p - y * y / q - z * z / s - 1.0;
        let fu = 2.0 * x * (a * cv * cu) / p - 2.0 * y * (-b * cv * su) / q;
        let fv = 2.0 * x * (-a * sv * su) / p - 2.0 * y * (-b * sv * cu) / q - 2.0 * z * (c * cv) / s;
        (val, fu, fv)
    };
    let curve = move |alpha: f64| -> Result<([f64; 2], [f64; 2])> {
        let (sa, ca) = alpha.sin_cos();
        let at = |r: f64| f(centre[0] + r * ca, centre[1] + r * sa);
        let step = 1e-2;
        let mut lo = 0.0;
        let mut hi = step;
        while at(hi).0 > 0.0 {
            lo = hi;
            hi += step;
            if hi > FRAC_PI_2 {
                return Err(Error::Internal(format!("confocal ray at angle {alpha} has no crossing")));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if at(mid).0 > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = 0.5 * (lo + hi);
        let (_, fu, fv) = at(r);
        let fr = fu * ca + fv * sa;
        let fa = r * (-fu * sa + fv * ca);
        let dr = -fa / fr;
        Ok(([centre[0] + r * ca, centre[1] + r * sa], [dr * ca - r * sa, dr * sa + r * ca]))
    };
    DiskRegion::with_vertices(vec![ChartCurve::custom(Arc::new(curve), 0.0, TAU)], vec![])
}

/// Charts covering a closed surface, with the Euler characteristic.
#[derive(Debug, Clone)]
pub struct ClosedAtlas {
    pub charts: Vec<(Pair, Rect)>,
    /// Umbilics closer than this to a chart edge must also be seen in the
    /// interior of another chart.
    pub margin: f64,
    pub euler: i32,
}

pub fn ellipsoid_atlas(a: f64, b: f64, c: f64) -> Result<ClosedAtlas> {
    let region = rect(0.0, TAU, -1.2, 1.2);
    Ok(ClosedAtlas {
        charts: vec![
            (Pair::Immersed(ellipsoid_chart(a, b, c, 1)?), region),
            (Pair::Immersed(ellipsoid_chart(a, b, c, 2)?), region),
        ],
        margin: 0.05,
        euler: 2,
    })
}

/// An entry with its default pair and the regions it comes with.
#[derive(Debug, Clone)]
pub struct GallerySurface {
    pub name: String,
    pub numbers: Params,
    pub patch: Option<SurfacePatch>,
    pub pair: Pair,
    pub disk: Option<DiskRegion>,
    /// Reference profile value for the rotational isothermal chart.
    pub isothermal_ref: Option<f64>,
    pub closed: Option<ClosedAtlas>,
}

impl GallerySurface {
    pub fn domain(&self) -> Rect {
        self.pair.domain()
    }
}

/// Builds an entry: immersion, default pair (`(I, II)` in space forms, the
/// AR pair in products, the K-pair for `k_rotational_product`), and any
/// disk or closed atlas attached to it.
pub fn build(name: &str, given: &GalleryArgs) -> Result<GallerySurface> {
    let info = info(name)?;
    let r = resolve(&info, given)?;
    let mut out = GallerySurface {
        name: name.to_string(),
        numbers: r.numbers.clone(),
        patch: None,
        pair: Pair::Abstract(synthetic_qz(1, 1.0)?),
        disk: None,
        isothermal_ref: None,
        closed: None,
    };
    if name == "synthetic_qz" {
        out.pair = Pair::Abstract(synthetic_qz(r.num("k") as u32, r.num("H"))?);
        return Ok(out);
    }
    let patch = make_resolved(&info, &r)?;
    out.pair = match name {
        "k_rotational_product" => Pair::k_pair(patch.clone(), r.num("K"))?,
        _ if patch.ambient.is_product() => Pair::ProductAR(patch.clone()),
        _ => Pair::Immersed(patch.clone()),
    };
    match name {
        "cgc_rotational" => {
            out.disk = Some(DiskRegion::rectangle(rect(0.0, FRAC_PI_2, 0.6, 2.0))?);
            out.isothermal_ref = Some(FRAC_PI_2 / r.num("K").sqrt());
        }
        "torus" => out.isothermal_ref = Some(0.0),
        "ellipsoid" => {
            let (a, b, c) = (r.num("a"), r.num("b"), r.num("c"));
            if a > b && b > c {
                let lambda = if r.num("lambda") > 0.0 { r.num("lambda") } else { 0.5 * (a * a + b * b) };
                out.disk = Some(ellipsoid_confocal_disk(a, b, c, lambda)?);
                out.closed = Some(ellipsoid_atlas(a, b, c)?);
            }
        }
        _ => {}
    }
    out.patch = Some(patch);
    Ok(out)
}

/// Checkable properties of gallery entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// Image lies on the model quadric.
    ModelResidual,
    /// Codazzi residual of `(I, II)` in a space form.
    SpaceFormCodazzi,
    TotallyUmbilical,
    NoUmbilics,
    /// `‖∇h‖² + ν² = 1`.
    HeightIdentity,
    /// `H(I, B) = 2H²`.
    ArMeanCurvature,
    ArTotallyUmbilical,
    ArCodazzi,
    /// Brioschi curvature of I equals the parameter `K`.
    IntrinsicCurvature,
    /// The profile is parametrized by arclength.
    UnitSpeedProfile,
    /// Meridians and parallels are curvature lines of `(I, II)`.
    CurvatureLines,
    /// `K_e(A, II) = K − ε`.
    KPairExtrinsic,
    KPairCodazzi,
    /// Meridians and parallels are curvature lines of both `(I, II)` and
    /// `(A, II)`.
    CurveClassification,
    /// The zero at the origin has order `k` and index `−k/2`.
    SyntheticIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedProperty {
    pub property: Property,
    pub tolerance: f64,
    pub description: &'static str,
}

fn prop(property: Property, tolerance: f64, description: &'static str) -> ExpectedProperty {
    ExpectedProperty { property, tolerance, description }
}

pub fn expected_properties(name: &str) -> Result<Vec<ExpectedProperty>> {
    use Property::*;
    info(name)?;
    let model = prop(ModelResidual, 1e-9, "image on the model quadric");
    let codazzi = prop(SpaceFormCodazzi, 1e-7, "Codazzi residual of (I,II)");
    let umbilical = prop(TotallyUmbilical, 1e-9, "q = 0 everywhere");
    let product = [
        model.clone(),
        prop(HeightIdentity, 1e-10, "|grad h|^2 + nu^2 = 1"),
        prop(ArMeanCurvature, 1e-9, "H(I,B) = 2H^2"),
    ];
    Ok(match name {
        "plane" | "round_sphere" | "s3_great_sphere" | "s3_small_sphere" | "h3_equidistant" => {
            vec![model, codazzi, umbilical]
        }
        "ellipsoid" | "graph" => vec![model, codazzi],
        "torus" => vec![
            model,
            codazzi,
            prop(NoUmbilics, DEFAULT_Q_FLOOR, "no umbilics"),
            prop(CurvatureLines, 1e-8, "meridian/parallel are curvature lines"),
        ],
        "cgc_rotational" => vec![
            model,
            codazzi,
            prop(IntrinsicCurvature, 1e-6, "K(I)=K"),
            prop(UnitSpeedProfile, 1e-10, "k'^2 + h'^2 = 1"),
            prop(CurvatureLines, 1e-8, "meridian/parallel are curvature lines"),
        ],
        "slice" => {
            let mut v = product.to_vec();
            v.push(prop(ArTotallyUmbilical, 1e-10, "AR pair totally umbilical"));
            v
        }
        "vertical_cylinder" => {
            let mut v = product.to_vec();
            v.push(prop(ArCodazzi, 1e-7, "Codazzi residual of (I,B)"));
            v
        }
        "tilted_graph" => product.to_vec(),
        "k_rotational_product" => {
            let mut v = product.to_vec();
            v.extend([
                prop(IntrinsicCurvature, 1e-5, "K(I)=K"),
                prop(KPairExtrinsic, 1e-5, "K_e(A,II) = K - eps"),
                prop(KPairCodazzi, 1e-5, "Codazzi residual of (A,II)"),
                prop(CurveClassification, 1e-8, "meridian/parallel are curvature lines of (I,II) and (A,II)"),
            ]);
            v
        }
        "synthetic_qz" => vec![
            prop(ArCodazzi, 1e-9, "Codazzi residual of (A,B)"),
            prop(SyntheticIndex, INTERIOR_SNAP_LIMIT, "order k, index -k/2 at the origin"),
        ],
        other => return Err(Error::Internal(format!("no properties for '{other}'"))),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub property: Property,
    pub description: &'static str,
    pub tolerance: f64,
    /// Worst observed value of the checked quantity.
    pub value: f64,
    pub pass: bool,
}

/// Probe points: cell centres of the domain shrunk by 5%.
fn probes(domain: Rect) -> Vec<(f64, f64)> {
    domain.inset(0.05 * domain.width().min(domain.height())).cell_centres(PROBE_N)
}

fn sup<F>(pts: &[(f64, f64)], exec: Exec, f: F) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let vals = exec.map(pts.len(), |i| f(pts[i].0, pts[i].1));
    vals.into_iter().try_fold(0.0f64, |m, x| Ok(m.max(x?)))
}

fn need_patch(s: &GallerySurface) -> Result<&SurfacePatch> {
    s.patch.as_ref().ok_or_else(|| Error::Precondition(format!("'{}' has no immersion", s.name)))
}

fn pair_max<F>(pair: &dyn PairField, pts: &[(f64, f64)], exec: Exec, f: F) -> Result<f64>
where
    F: Fn(&PairJet) -> Result<f64> + Sync,
{
    sup(pts, exec, |u, v| f(&pair.eval(u, v)?))
}

fn codazzi_sup(p: &PairJet) -> Result<f64> {
    let r = codazzi_residual_of(p)?;
    Ok(r[0].abs().max(r[1].abs()))
}

/// Meridians `u = const` and parallels `v = const` through the probe box.
fn coordinate_lines(domain: Rect) -> (Vec<ChartCurve>, Vec<ChartCurve>) {
    let d = domain.inset(0.05 * domain.width().min(domain.height()));
    let meridians = (1..4)
        .map(|i| {
            let u = d.u0 + d.width() * i as f64 / 4.0;
            ChartCurve::segment([u, d.v0], [u, d.v1])
        })
        .collect();
    let parallels = (1..4)
        .map(|i| {
            let v = d.v0 + d.height() * i as f64 / 4.0;
            ChartCurve::segment([d.u0, v], [d.u1, v])
        })
        .collect();
    (meridians, parallels)
}

fn check(s: &GallerySurface, p: &ExpectedProperty, exec: Exec) -> Result<f64> {
    use Property::*;
    let pts = probes(s.domain());
    let k_param = || s.numbers.get("K").copied().ok_or_else(|| Error::Internal("entry has no K".into()));
    match p.property {
        ModelResidual => {
            let patch = need_patch(s)?;
            sup(&pts, exec, |u, v| patch.model_residual(u, v))
        }
        SpaceFormCodazzi => {
            let pair = Pair::Immersed(need_patch(s)?.clone());
            pair_max(&pair, &pts, exec, codazzi_sup)
        }
        TotallyUmbilical | NoUmbilics => {
            let pair = Pair::Immersed(need_patch(s)?.clone());
            let qs = exec.map(pts.len(), |i| pair.eval(pts[i].0, pts[i].1).map(|j| shape_of(&j).q_normalized()));
            let qs = qs.into_iter().collect::<Result<Vec<_>>>()?;
            Ok(if p.property == TotallyUmbilical {
                qs.iter().copied().fold(0.0, f64::max)
            } else {
                qs.iter().copied().fold(f64::INFINITY, f64::min)
            })
        }
        HeightIdentity => {
            let patch = need_patch(s)?;
            sup(&pts, exec, |u, v| Ok(patch.product_geometry(u, v)?.identity_residual))
        }
        ArMeanCurvature => {
            let patch = need_patch(s)?;
            let ar = Pair::ProductAR(patch.clone());
            let im = Pair::Immersed(patch.clone());
            sup(&pts, exec, |u, v| {
                let h = mean_curvature_dual(&im.eval(u, v)?).val;
                let hb = mean_curvature_dual(&ar.eval(u, v)?).val;
                Ok((hb - 2.0 * h * h).abs())
            })
        }
        ArTotallyUmbilical => {
            let ar = Pair::ProductAR(need_patch(s)?.clone());
            pair_max(&ar, &pts, exec, |j| Ok(shape_of(j).q))
        }
        ArCodazzi => pair_max(&s.pair, &pts, exec, codazzi_sup),
        IntrinsicCurvature => {
            let patch = need_patch(s)?;
            let k = k_param()?;
            sup(&pts, exec, |u, v| Ok((patch.intrinsic_curvature(u, v)? - k).abs()))
        }
        UnitSpeedProfile => {
            let patch = need_patch(s)?;
            sup(&pts, exec, |u, v| Ok((patch.first_form(u, v)?.vv.val - 1.0).abs()))
        }
        CurvatureLines => {
            let pair = Pair::Immersed(need_patch(s)?.clone());
            let (m, par) = coordinate_lines(s.domain());
            m.iter()
                .chain(&par)
                .try_fold(0.0f64, |acc, c| Ok(acc.max(boundary_is_curvature_line(&pair, c, DEFAULT_Q_FLOOR)?.residual)))
        }
        KPairExtrinsic => {
            let eps = need_patch(s)?.ambient.epsilon() as f64;
            let target = k_param()? - eps;
            pair_max(&s.pair, &pts, exec, |j| Ok((shape_of(j).k_e - target).abs()))
        }
        KPairCodazzi => pair_max(&s.pair, &pts, exec, codazzi_sup),
        CurveClassification => {
            let patch = need_patch(s)?;
            let k = k_param()?;
            let (m, par) = coordinate_lines(s.domain());
            m.iter().chain(&par).try_fold(0.0f64, |acc, c| {
                let r = lemma3_check(patch, k, c)?;
                Ok(acc.max(r.residual_first).max(r.residual_k_pair))
            })
        }
        SyntheticIndex => {
            let k = s.numbers["k"];
            let order = zero_order(&s.pair, [0.0, 0.0], 0.5, DEFAULT_Q_FLOOR)?;
            let idx = interior_index(&s.pair, [0.0, 0.0], 0.5, 64, DEFAULT_Q_FLOOR)?;
            if order.k as f64 != k {
                return Ok(f64::INFINITY);
            }
            Ok((idx.raw + k / 2.0).abs())
        }
    }
}

/// Evaluates every expected property of an entry.
pub fn verify(s: &GallerySurface, exec: Exec) -> Result<Vec<PropertyCheck>> {
    expected_properties(&s.name)?
        .into_iter()
        .map(|p| {
            let value = check(s, &p, exec)?;
            let pass = match p.property {
                Property::NoUmbilics => value > p.tolerance,
                _ => value < p.tolerance,
            };
            Ok(PropertyCheck { property: p.property, description: p.description, tolerance: p.tolerance, value, pass })
        })
        .collect()
}
