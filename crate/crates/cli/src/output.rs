//! Report rendering: JSON, indented text, SVG portraits and CSV grids.

use std::fmt::Write as _;

use serde_json::Value;
use umbilic_core::lines::{Family, GridScan, Polyline, UmbilicRecord};
use umbilic_core::Rect;

use crate::error::{CliError, CliResult};

pub fn json(doc: &Value) -> CliResult<String> {
    serde_json::to_string_pretty(doc).map_err(|e| CliError::Io(e.to_string()))
}

/// Indented `key: value` rendering of a report.
pub fn human(doc: &Value) -> String {
    let mut out = String::new();
    render(doc, 0, &mut out);
    out.trim_end().to_string()
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| matches!(x, Value::Number(_) | Value::Null)) => {
            Some(format!("[{}]", a.iter().map(|x| scalar(x).unwrap()).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}- [{i}]");
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}

const SIZE: f64 = 800.0;
const PAD: f64 = 20.0;

struct View {
    bbox: Rect,
    scale: f64,
    height: f64,
}

impl View {
    fn new(bbox: Rect) -> Self {
        let scale = (SIZE - 2.0 * PAD) / bbox.width().max(bbox.height());
        View { bbox, scale, height: bbox.height() * scale + 2.0 * PAD }
    }

    fn width(&self) -> f64 {
        self.bbox.width() * self.scale + 2.0 * PAD
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (PAD + (p[0] - self.bbox.u0) * self.scale, self.height - PAD - (p[1] - self.bbox.v0) * self.scale)
    }

    fn path(&self, pts: &[[f64; 2]], closed: bool) -> String {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.map(*p);
            let _ = write!(d, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
        }
        if closed {
            d.push('Z');
        }
        d.trim_end().to_string()
    }
}

fn index_label(x: f64) -> String {
    let q = (x * 4.0).round() as i64;
    match q {
        0 => "0".into(),
        _ if q % 4 == 0 => format!("{:+}", q / 4),
        _ if q % 2 == 0 => format!("{:+}/2", q / 2),
        _ => format!("{q:+}/4"),
    }
}

/// SVG 1.1 portrait in chart coordinates: first-family lines in blue,
/// second-family lines in red, umbilics as labelled dots, disk boundary in
/// black.
pub fn svg(
    bbox: Rect,
    lines: &[(Family, Polyline)],
    umbilics: &[UmbilicRecord],
    boundary: Option<&[[f64; 2]]>,
) -> String {
    let view = View::new(bbox);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#,
        w = view.width(),
        h = view.height
    );
    let _ =
        writeln!(s, r##"<rect x="0" y="0" width="{:.2}" height="{:.2}" fill="#ffffff"/>"##, view.width(), view.height);
    let frame = [[bbox.u0, bbox.v0], [bbox.u1, bbox.v0], [bbox.u1, bbox.v1], [bbox.u0, bbox.v1]];
    let _ = writeln!(s, r##"<path d="{}" fill="none" stroke="#bbbbbb" stroke-width="0.5"/>"##, view.path(&frame, true));
    for (family, line) in lines {
        if line.points.len() < 2 {
            continue;
        }
        let colour = if *family == Family::First { "#1f5fbf" } else { "#c0392b" };
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="0.8"/>"#,
            view.path(&line.points, false)
        );
    }
    if let Some(b) = boundary {
        let _ = writeln!(s, r##"<path d="{}" fill="none" stroke="#000000" stroke-width="1.5"/>"##, view.path(b, true));
    }
    for r in umbilics {
        let (x, y) = view.map([r.u, r.v]);
        let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#000000"/>"##);
        let k = r.zero_order.as_ref().map(|z| z.k.to_string()).unwrap_or_else(|| "?".into());
        let idx = r.index.as_ref().map(|i| index_label(i.index)).unwrap_or_else(|| "?".into());
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">k={k}, index {idx}</text>"#,
            x + 6.0,
            y - 6.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn csv(scan: &GridScan) -> String {
    let mut s = String::from("i,j,u,v,H,K_e,q,q_normalized\n");
    for i in 0..scan.n {
        for j in 0..scan.n {
            if let Some(c) = scan.at(i, j) {
                let _ = writeln!(s, "{i},{j},{},{},{},{},{},{}", c.u, c.v, c.h, c.k_e, c.q, c.q_normalized);
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_labels() {
        assert_eq!(index_label(0.5), "+1/2");
        assert_eq!(index_label(-1.0), "-1");
        assert_eq!(index_label(0.25), "+1/4");
        assert_eq!(index_label(0.0), "0");
    }

    #[test]
    fn human_rendering_flattens_scalars() {
        let v = serde_json::json!({"a": 1, "b": {"c": [1.5, 2]}, "d": [{"e": true}]});
        assert_eq!(human(&v), "a: 1\nb:\n  c: [1.5, 2]\nd:\n  - [0]\n    e: true");
    }

    #[test]
    fn svg_maps_chart_y_upwards() {
        let view = View::new(Rect::new(0.0, 1.0, 0.0, 1.0).unwrap());
        let (_, y0) = view.map([0.0, 0.0]);
        let (_, y1) = view.map([0.0, 1.0]);
        assert!(y1 < y0);
    }
}
