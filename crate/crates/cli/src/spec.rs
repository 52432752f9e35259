//! Surface-definition files and gallery selection.
//!
//! A surface file is a JSON document:
//!
//! ```json
//! {
//!   "ambient": "R3",
//!   "immersion": ["u", "v", "u^2 - v^2"],
//!   "params": {},
//!   "domain": [-1, 1, -1, 1],
//!   "mask": "1 - u^2 - v^2",
//!   "pair": {"kind": "I-II"},
//!   "disk": {"rect": [-0.5, 0.5, -0.5, 0.5]},
//!   "isothermal": {"kind": "identity"}
//! }
//! ```
//!
//! `pair` is one of `{"kind": "I-II"}`, `{"kind": "AR"}`,
//! `{"kind": "K-pair", "K": 2}` or
//! `{"kind": "abstract", "A": [E, F, G], "B": [e, f, g]}`; abstract pairs
//! need no ambient or immersion. A disk is either `{"rect": [u0, u1, v0, v1]}`
//! or `{"curves": [{"u": .., "v": .., "t0": 0, "t1": 1}, ..], "vertices": [..]}`
//! with curves in `t`, traversed with the region on the left.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use umbilic_core::curve::ChartCurve;
use umbilic_core::expr::parse;
use umbilic_core::gallery::{self, ClosedAtlas, GalleryArgs};
use umbilic_core::lines::DiskRegion;
use umbilic_core::pairs::{AbstractPair, Pair};
use umbilic_core::{AmbientSpace, Rect, SurfacePatch};

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub ambient: Option<String>,
    #[serde(default)]
    pub immersion: Vec<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub domain: [f64; 4],
    pub mask: Option<String>,
    #[serde(default)]
    pub pair: PairSpec,
    pub disk: Option<DiskSpec>,
    pub isothermal: Option<ChartSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(tag = "kind")]
pub enum PairSpec {
    #[default]
    #[serde(rename = "I-II")]
    Immersed,
    #[serde(rename = "AR")]
    Ar,
    #[serde(rename = "K-pair")]
    KPair {
        #[serde(rename = "K")]
        k: f64,
    },
    #[serde(rename = "abstract")]
    Abstract {
        #[serde(rename = "A")]
        a: [String; 3],
        #[serde(rename = "B")]
        b: [String; 3],
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSpec {
    pub rect: Option<[f64; 4]>,
    #[serde(default)]
    pub curves: Vec<CurveSpec>,
    pub vertices: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub u: String,
    pub v: String,
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "one")]
    pub t1: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChartSpec {
    Identity,
    Rotational { v_ref: f64 },
}

/// Everything a command may need about its input.
pub struct Loaded {
    /// Description and digest of the input, echoed in reports.
    pub input: Value,
    pub pair: Pair,
    pub patch: Option<SurfacePatch>,
    pub disk: Option<DiskRegion>,
    pub chart: Option<ChartSpec>,
    pub closed: Option<ClosedAtlas>,
    pub gallery: Option<gallery::GallerySurface>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn rect(r: [f64; 4]) -> CliResult<Rect> {
    Ok(Rect::new(r[0], r[1], r[2], r[3])?)
}

pub fn disk_from_spec(d: &DiskSpec, params: &BTreeMap<String, f64>) -> CliResult<DiskRegion> {
    match (&d.rect, d.curves.is_empty()) {
        (Some(r), true) => Ok(DiskRegion::rectangle(rect(*r)?)?),
        (None, false) => {
            let curves = d
                .curves
                .iter()
                .map(|c| Ok(ChartCurve::exprs(parse(&c.u)?, parse(&c.v)?, params.clone(), c.t0, c.t1)))
                .collect::<CliResult<Vec<_>>>()?;
            let n = curves.len();
            let vertices = d.vertices.clone().unwrap_or_else(|| (0..n).collect());
            Ok(DiskRegion::with_vertices(curves, vertices)?)
        }
        _ => Err(CliError::Spec("disk needs exactly one of 'rect' or 'curves'".into())),
    }
}

pub fn load_file(path: &Path) -> CliResult<Loaded> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let spec: SurfaceSpec =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Spec(format!("{}: {e}", path.display())))?;
    let domain = rect(spec.domain)?;
    let params = spec.params.clone();
    let patch = if spec.immersion.is_empty() {
        None
    } else {
        let name = spec.ambient.as_deref().ok_or_else(|| CliError::Spec("an immersion needs 'ambient'".into()))?;
        let amb = AmbientSpace::from_name(name)
            .ok_or_else(|| CliError::Spec(format!("unknown ambient '{name}' (R3, S3, H3, S2xR, H2xR)")))?;
        let exprs = spec.immersion.iter().map(|s| parse(s)).collect::<Result<Vec<_>, _>>()?;
        let mut p = SurfacePatch::from_exprs(amb, domain, exprs, params.clone())?;
        if let Some(m) = &spec.mask {
            p = p.with_mask(parse(m)?);
        }
        p.validate()?;
        Some(p)
    };
    let need = |what: &str| patch.clone().ok_or_else(|| CliError::Spec(format!("pair '{what}' needs an immersion")));
    let pair = match &spec.pair {
        PairSpec::Immersed => Pair::Immersed(need("I-II")?),
        PairSpec::Ar => {
            let p = need("AR")?;
            if !p.ambient.is_product() {
                return Err(CliError::Spec("pair 'AR' needs a product ambient".into()));
            }
            Pair::ProductAR(p)
        }
        PairSpec::KPair { k } => Pair::k_pair(need("K-pair")?, *k)?,
        PairSpec::Abstract { a, b } => {
            let f = |s: &[String; 3]| -> CliResult<[umbilic_core::expr::Expr; 3]> {
                Ok([parse(&s[0])?, parse(&s[1])?, parse(&s[2])?])
            };
            Pair::Abstract(AbstractPair { domain, a: f(a)?, b: f(b)?, params: params.clone() })
        }
    };
    let disk = spec.disk.as_ref().map(|d| disk_from_spec(d, &params)).transpose()?;
    Ok(Loaded {
        input: json!({"kind": "file", "path": path.display().to_string(), "sha256": sha256_hex(&bytes)}),
        pair,
        patch,
        disk,
        chart: spec.isothermal,
        closed: None,
        gallery: None,
    })
}

/// Splits `k=v,k=v` at commas outside parentheses, so expression values may
/// contain function calls with several arguments.
pub fn parse_params(items: &[String]) -> CliResult<GalleryArgs> {
    let mut out = GalleryArgs::new();
    for item in items {
        let mut depth = 0i32;
        let mut start = 0;
        let bytes = item.as_bytes();
        let mut parts = Vec::new();
        for (i, &c) in bytes.iter().enumerate() {
            match c {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b',' if depth == 0 => {
                    parts.push(&item[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        parts.push(&item[start..]);
        for p in parts.into_iter().filter(|p| !p.trim().is_empty()) {
            let (k, v) = p.split_once('=').ok_or_else(|| CliError::Usage(format!("parameter '{p}' is not k=v")))?;
            out.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(out)
}

pub fn load_gallery(name: &str, given: &GalleryArgs) -> CliResult<Loaded> {
    let s = gallery::build(name, given)?;
    let canonical: Vec<String> = given.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let digest = sha256_hex(format!("gallery:{name}?{}", canonical.join("&")).as_bytes());
    Ok(Loaded {
        input: json!({"kind": "gallery", "name": name, "params": given, "resolved": s.numbers, "sha256": digest}),
        pair: s.pair.clone(),
        patch: s.patch.clone(),
        disk: s.disk.clone(),
        chart: s.isothermal_ref.map(|v_ref| ChartSpec::Rotational { v_ref }),
        closed: s.closed.clone(),
        gallery: Some(s),
    })
}
