//! Command implementations. Each returns the full report document.

use serde_json::{json, Map, Value};
use umbilic_core::gallery;
use umbilic_core::isothermal::{IsothermalChart, DEFAULT_CHART_TOL};
use umbilic_core::lines::{
    boundary_index, find_umbilics, interior_index, poincare_hopf_audit, scan_grid, separatrix_count, trace_line,
    umbilical_disk_verdict, zero_order, AuditOptions, AuditTarget, BoundaryOptions, ClosedChart, DiskRegion, Family,
    Region, TraceOptions, UmbilicOptions, BOUNDARY_SNAP_LIMIT, INTERIOR_SNAP_LIMIT, QUANTIZATION_TOL,
};
use umbilic_core::pairs::{codazzi_report_of, shape_of, PairField};
use umbilic_core::{Exec, Rect};

use crate::error::{CliError, CliResult};
use crate::spec::{load_file, load_gallery, parse_params, ChartSpec, Loaded};
use crate::{output, parse_list, parse_pair, Cli, Command};

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn exec(cli: &Cli) -> Exec {
    if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn load(cli: &Cli) -> CliResult<Loaded> {
    match (&cli.surface, &cli.gallery) {
        (Some(p), None) => load_file(p),
        (None, Some(g)) => load_gallery(g, &parse_params(&cli.params)?),
        _ => Err(CliError::Usage("give exactly one of --surface FILE or --gallery NAME".into())),
    }
}

fn at(cli: &Cli) -> CliResult<[f64; 2]> {
    let s = cli.at.as_deref().ok_or_else(|| CliError::Usage("this command needs --at u,v".into()))?;
    parse_pair(s, "at")
}

fn override_disk(cli: &Cli) -> CliResult<Option<DiskRegion>> {
    let Some(s) = &cli.disk else { return Ok(None) };
    let v = parse_list(s, "disk")?;
    if v.len() != 4 {
        return Err(CliError::Usage("--disk expects u0,u1,v0,v1".into()));
    }
    Ok(Some(DiskRegion::rectangle(Rect::new(v[0], v[1], v[2], v[3])?)?))
}

/// `--disk` when given, otherwise the disk attached to the input.
fn disk(cli: &Cli, l: &Loaded) -> CliResult<DiskRegion> {
    if let Some(d) = override_disk(cli)? {
        return Ok(d);
    }
    l.disk.clone().ok_or_else(|| CliError::Usage("no disk: pass --disk u0,u1,v0,v1 or attach one to the input".into()))
}

/// Scans run over `--disk` when given and over the full domain otherwise.
fn scan_region(cli: &Cli, l: &Loaded) -> CliResult<Region> {
    Ok(match override_disk(cli)? {
        Some(d) => Region::Disk(d),
        None => Region::Rect(l.pair.domain()),
    })
}

fn chart(l: &Loaded) -> CliResult<Option<IsothermalChart>> {
    Ok(match l.chart {
        None => None,
        Some(ChartSpec::Identity) => Some(IsothermalChart::identity(&l.pair)),
        Some(ChartSpec::Rotational { v_ref }) => Some(IsothermalChart::rotational(&l.pair, v_ref)?),
    })
}

fn umbilic_opts(cli: &Cli) -> UmbilicOptions {
    UmbilicOptions { grid_n: cli.grid, q_tol: cli.q_floor, q_floor: cli.q_floor, ..UmbilicOptions::default() }
}

fn audit_opts(cli: &Cli) -> AuditOptions {
    AuditOptions { grid_n: cli.grid, q_tol: cli.q_floor, q_floor: cli.q_floor, ..AuditOptions::default() }
}

fn audit_tolerances(o: &AuditOptions) -> Value {
    json!({
        "grid_n": o.grid_n,
        "q_tol": o.q_tol,
        "q_floor": o.q_floor,
        "loop_samples": o.loop_samples,
        "hypothesis1_bound": o.bound,
        "codazzi_tol": o.codazzi_tol,
        "boundary_tol": o.boundary_tol,
        "sum_tol": o.sum_tol,
        "interior_snap_limit": INTERIOR_SNAP_LIMIT,
        "boundary_snap_limit": BOUNDARY_SNAP_LIMIT,
        "quantization_tol": QUANTIZATION_TOL,
        "chart_tol": DEFAULT_CHART_TOL,
    })
}

pub fn dispatch(cli: &Cli) -> CliResult<Value> {
    let (input, tolerances, results) = match cli.command {
        Command::Gallery => (Value::Null, json!({}), gallery_cmd(cli)?),
        cmd => {
            let l = load(cli)?;
            let (t, r) = match cmd {
                Command::Analyze => analyze(cli, &l)?,
                Command::Scan => scan(cli, &l)?,
                Command::Lines => lines(cli, &l)?,
                Command::Index => index(cli, &l)?,
                Command::Audit => audit(cli, &l)?,
                Command::Verdict => verdict(cli, &l)?,
                Command::Verify => verify(cli, &l)?,
                Command::Gallery => unreachable!(),
            };
            (l.input.clone(), t, r)
        }
    };
    let mut doc = Map::new();
    doc.insert("tool".into(), json!("umbilic-atlas"));
    doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    doc.insert("command".into(), to_value(&cli.command));
    doc.insert("options".into(), to_value(cli));
    doc.insert("input".into(), input);
    doc.insert("tolerances".into(), tolerances);
    doc.insert("results".into(), results);
    Ok(Value::Object(doc))
}

fn analyze(cli: &Cli, l: &Loaded) -> CliResult<(Value, Value)> {
    let [u, v] = at(cli)?;
    let p = l.pair.eval(u, v)?;
    let s = shape_of(&p);
    let qn = s.q_normalized();
    let cod = codazzi_report_of(&p)?;
    let mut r = Map::new();
    r.insert("point".into(), json!([u, v]));
    r.insert("pair".into(), json!(l.pair.kind()));
    r.insert("H".into(), json!(s.h));
    r.insert("K_e".into(), json!(s.k_e));
    r.insert("q".into(), json!(s.q));
    r.insert("q_normalized".into(), json!(qn));
    r.insert("umbilic".into(), json!(qn <= cli.q_floor));
    r.insert("k1".into(), json!(s.k1));
    r.insert("k2".into(), json!(s.k2));
    r.insert("first_form".into(), json!(p.a.values()));
    r.insert("second_form".into(), json!(p.b.values()));
    r.insert("codazzi".into(), to_value(&cod));
    if let Some(patch) = &l.patch {
        r.insert("position".into(), json!(patch.position(u, v)?));
        if patch.ambient.is_product() {
            let g = patch.product_geometry(u, v)?;
            r.insert(
                "product".into(),
                json!({
                    "h": g.h,
                    "nu": g.nu.val,
                    "grad_h_norm": g.grad_h_norm2.max(0.0).sqrt(),
                    "identity_residual": g.identity_residual,
                }),
            );
        }
    }
    Ok((json!({"q_floor": cli.q_floor}), Value::Object(r)))
}

fn scan(cli: &Cli, l: &Loaded) -> CliResult<(Value, Value)> {
    let region = scan_region(cli, l)?;
    let opts = umbilic_opts(cli);
    let found = find_umbilics(&l.pair, &region, &opts, exec(cli));
    let grid = scan_grid(&l.pair, &region, cli.grid, exec(cli));
    let valid: Vec<_> = grid.valid().collect();
    let min_q = valid.iter().map(|c| c.q_normalized).fold(f64::INFINITY, f64::min);
    if let Some(path) = &cli.csv {
        std::fs::write(path, output::csv(&grid)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let results = json!({
        "region": region_value(&region),
        "grid": {"n": grid.n, "valid_cells": valid.len(), "spacing": grid.spacing, "min_q_normalized": if valid.is_empty() { Value::Null } else { json!(min_q) }},
        "umbilics": to_value(&found),
        "csv": cli.csv.as_ref().map(|p| p.display().to_string()),
    });
    Ok((
        json!({"grid_n": opts.grid_n, "q_tol": opts.q_tol, "q_floor": opts.q_floor, "loop_samples": opts.loop_samples, "interior_snap_limit": INTERIOR_SNAP_LIMIT}),
        results,
    ))
}

fn region_value(r: &Region) -> Value {
    let b = r.bbox();
    json!({"kind": if matches!(r, Region::Rect(_)) { "rect" } else { "disk" }, "bbox": [b.u0, b.u1, b.v0, b.v1]})
}

fn lines(cli: &Cli, l: &Loaded) -> CliResult<(Value, Value)> {
    let region = scan_region(cli, l)?;
    let bbox = region.bbox();
    let found = find_umbilics(&l.pair, &region, &umbilic_opts(cli), exec(cli));
    let (cu, cv) = bbox.lerp(0.5, 0.5);
    let a = l.pair.eval(cu, cv)?.a;
    let metric_scale = (0.5 * (a.uu.val + a.vv.val)).sqrt();
    let diag = bbox.width().hypot(bbox.height()) * metric_scale;
    let step = diag / 400.0;
    let seeds: Vec<(f64, f64)> =
        bbox.cell_centres(cli.seeds.max(1)).into_iter().filter(|&(u, v)| region.contains(u, v)).collect();
    let mut jobs = Vec::new();
    for family in [Family::First, Family::Second] {
        for &(u, v) in &seeds {
            for backward in [false, true] {
                jobs.push((family, [u, v], backward));
            }
        }
    }
    let traced = exec(cli).map(jobs.len(), |i| {
        let (family, start, backward) = jobs[i];
        let opts = TraceOptions { family, step, max_len: 2.0 * diag, q_floor: cli.q_floor, backward };
        trace_line(&l.pair, start, &opts, &region).map(|p| (family, p))
    });
    let traced: Vec<_> = traced.into_iter().filter_map(|r| r.ok()).collect();
    let mut stops: std::collections::BTreeMap<String, usize> = Default::default();
    for (_, p) in &traced {
        *stops.entry(format!("{:?}", p.stop)).or_default() += 1;
    }
    let length = |f: Family| traced.iter().filter(|(g, _)| *g == f).map(|(_, p)| p.length).sum::<f64>();
    if let Some(path) = &cli.out {
        let boundary = match &region {
            Region::Disk(d) => Some(d.polygon()),
            Region::Rect(_) => None,
        };
        let doc = output::svg(bbox, &traced, found.records(), boundary);
        std::fs::write(path, doc).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let results = json!({
        "region": region_value(&region),
        "seeds": seeds.len(),
        "polylines": traced.len(),
        "failed_traces": jobs.len() - traced.len(),
        "length_first": length(Family::First),
        "length_second": length(Family::Second),
        "stops": stops,
        "umbilics": to_value(&found),
        "svg": cli.out.as_ref().map(|p| p.display().to_string()),
    });
    Ok((json!({"q_floor": cli.q_floor, "step": step, "max_len": 2.0 * diag, "grid_n": cli.grid}), results))
}

fn index(cli: &Cli, l: &Loaded) -> CliResult<(Value, Value)> {
    if cli.at.is_some() {
        let c = at(cli)?;
        let d = l.pair.domain();
        let radius = cli.radius.unwrap_or(0.02 * d.width().min(d.height()));
        let idx = interior_index(&l.pair, c, radius, 64, cli.q_floor)?;
        let order = zero_order(&l.pair, c, radius, cli.q_floor)?;
        let seps = separatrix_count(&l.pair, c, radius, 256)?;
        let results = json!({"kind": "interior", "center": c, "radius": radius, "index": to_value(&idx), "zero_order": to_value(&order), "separatrices": seps});
        return Ok((
            json!({"q_floor": cli.q_floor, "loop_samples": 64, "interior_snap_limit": INTERIOR_SNAP_LIMIT}),
            results,
        ));
    }
    let disk = disk(cli, l)?;
    let chart = chart(l)?;
    let opts = BoundaryOptions { chart: chart.as_ref(), q_floor: cli.q_floor, ..BoundaryOptions::default() };
    let vertices =
        disk.vertices.iter().map(|&j| boundary_index(&l.pair, &disk, j, &opts)).collect::<Result<Vec<_>, _>>()?;
    let results = json!({"kind": "boundary", "vertices": to_value(&vertices)});
    Ok((
        json!({"q_floor": opts.q_floor, "line_tol": opts.line_tol, "radius_fraction": opts.radius_fraction, "quantization_tol": QUANTIZATION_TOL, "boundary_snap_limit": BOUNDARY_SNAP_LIMIT}),
        results,
    ))
}

fn audit(cli: &Cli, l: &Loaded) -> CliResult<(Value, Value)> {
    let opts = audit_opts(cli);
    let rep = if cli.closed {
        let atlas = l
            .closed
            .as_ref()
            .ok_or_else(|| CliError::Usage("--closed needs a gallery surface with a closed atlas".into()))?;
        let charts = atlas
            .charts
            .iter()
            .map(|(p, r)| ClosedChart { pair: p as &dyn PairField, region: *r, margin: atlas.margin })
            .collect();
        poincare_hopf_audit(&AuditTarget::Closed { charts, euler: atlas.euler }, &opts, exec(cli))?
    } else {
        let d = disk(cli, l)?;
        let chart = chart(l)?;
        poincare_hopf_audit(&AuditTarget::Disk { pair: &l.pair, disk: &d, chart: chart.as_ref() }, &opts, exec(cli))?
    };
    Ok((audit_tolerances(&opts), to_value(&rep)))
}

fn verdict(cli: &Cli, l: &Loaded) -> CliResult<(Value, Value)> {
    let opts = audit_opts(cli);
    let d = disk(cli, l)?;
    let rep = umbilical_disk_verdict(&l.pair, &d, &opts, exec(cli))?;
    Ok((audit_tolerances(&opts), to_value(&rep)))
}

fn verify(cli: &Cli, l: &Loaded) -> CliResult<(Value, Value)> {
    let s = l.gallery.as_ref().ok_or_else(|| CliError::Usage("verify needs --gallery NAME".into()))?;
    let checks = gallery::verify(s, exec(cli))?;
    let pass = checks.iter().all(|c| c.pass);
    let tol: Map<String, Value> = checks
        .iter()
        .map(|c| (serde_json::to_value(c.property).unwrap().as_str().unwrap().to_string(), json!(c.tolerance)))
        .collect();
    Ok((Value::Object(tol), json!({"entry": s.name, "pass": pass, "checks": to_value(&checks)})))
}

fn gallery_cmd(cli: &Cli) -> CliResult<Value> {
    Ok(match &cli.gallery {
        Some(name) => {
            json!({"entry": to_value(&gallery::info(name)?), "expected_properties": to_value(&gallery::expected_properties(name)?)})
        }
        None => json!({"entries": to_value(&gallery::entries())}),
    })
}
