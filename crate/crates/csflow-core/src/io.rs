//! File formats: the shared curve CSV format and canonical JSON reports.
//!
//! Curve files are UTF-8 CSV with a single header line
//! `# csflow-curve v1, dim=<n>, closed=<0|1>` followed by one vertex per
//! line. All floats are written with 17 significant digits so files
//! round-trip exactly and reports are byte-identical across runs.

use crate::flow::{FlowConfig, FlowState, TerminationReason, Trajectory};
use crate::geometry::{Curve, CurveError};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use thiserror::Error;

pub const CURVE_FORMAT: &str = "csflow-curve v1";
pub const TRAJECTORY_FORMAT: &str = "csflow-trajectory v1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("bad curve header: {0}")]
    BadHeader(String),
    #[error("line {line}: {msg}")]
    BadLine { line: usize, msg: String },
    #[error("{0}")]
    Curve(#[from] CurveError),
    #[error("bad json: {0}")]
    BadJson(String),
}

/// A float with full round-trip precision: 17 significant digits,
/// scientific notation.
pub fn fmt_f64(x: f64) -> String {
    debug_assert!(x.is_finite(), "only finite values are serialized");
    format!("{x:.16e}")
}

/// Serialize a curve in the shared curve file format.
pub fn curve_to_string(curve: &Curve) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {CURVE_FORMAT}, dim={}, closed={}",
        curve.dim(),
        if curve.is_closed() { 1 } else { 0 }
    );
    for v in curve.iter_vertices() {
        let line: Vec<String> = v.iter().map(|x| fmt_f64(*x)).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

pub fn write_curve(path: &Path, curve: &Curve) -> Result<(), IoError> {
    fs::write(path, curve_to_string(curve))?;
    Ok(())
}

pub fn curve_from_str(text: &str) -> Result<Curve, IoError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| IoError::BadHeader("empty file".into()))?;
    let (dim, closed) = parse_header(header)?;
    let mut verts = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim {
            return Err(IoError::BadLine {
                line: i + 2,
                msg: format!("expected {dim} coordinates, got {}", fields.len()),
            });
        }
        for f in fields {
            let x: f64 = f.trim().parse().map_err(|e| IoError::BadLine {
                line: i + 2,
                msg: format!("bad float {f:?}: {e}"),
            })?;
            verts.push(x);
        }
    }
    let curve = if closed { Curve::closed(dim, verts)? } else { Curve::open(dim, verts)? };
    Ok(curve)
}

pub fn read_curve(path: &Path) -> Result<Curve, IoError> {
    curve_from_str(&fs::read_to_string(path)?)
}

fn parse_header(header: &str) -> Result<(usize, bool), IoError> {
    let body = header
        .strip_prefix('#')
        .ok_or_else(|| IoError::BadHeader(header.to_string()))?
        .trim();
    let mut parts = body.split(',').map(str::trim);
    let tag = parts.next().unwrap_or("");
    if tag != CURVE_FORMAT {
        return Err(IoError::BadHeader(format!("unknown format tag {tag:?}")));
    }
    let mut dim = None;
    let mut closed = None;
    for p in parts {
        if let Some(v) = p.strip_prefix("dim=") {
            dim = v.parse::<usize>().ok();
        } else if let Some(v) = p.strip_prefix("closed=") {
            closed = match v {
                "0" => Some(false),
                "1" => Some(true),
                _ => None,
            };
        }
    }
    match (dim, closed) {
        (Some(d), Some(c)) => Ok((d, c)),
        _ => Err(IoError::BadHeader(header.to_string())),
    }
}

/// A deterministic JSON tree. Object keys keep insertion order and floats
/// are written with 17 significant digits, so identical inputs produce
/// byte-identical reports.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj() -> Json {
        Json::Obj(Vec::new())
    }

    pub fn push(&mut self, key: &str, value: Json) -> &mut Self {
        match self {
            Json::Obj(fields) => fields.push((key.to_string(), value)),
            _ => panic!("push on non-object"),
        }
        self
    }

    pub fn to_pretty_string(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        match self {
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(x) => out.push_str(&fmt_f64(*x)),
            Json::Str(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        '\r' => out.push_str("\\r"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    let _ = write!(out, "{pad}  ");
                    item.write(out, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                let _ = write!(out, "{pad}]");
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                for (i, (k, v)) in fields.iter().enumerate() {
                    let _ = write!(out, "{pad}  \"{k}\": ");
                    v.write(out, indent + 1);
                    out.push_str(if i + 1 < fields.len() { ",\n" } else { "\n" });
                }
                let _ = write!(out, "{pad}}}");
            }
        }
    }
}

impl From<f64> for Json {
    fn from(x: f64) -> Json {
        Json::Num(x)
    }
}

impl From<&[f64]> for Json {
    fn from(xs: &[f64]) -> Json {
        Json::Arr(xs.iter().map(|x| Json::Num(*x)).collect())
    }
}

/// Read back a JSON report written by [`Json::to_pretty_string`].
pub fn parse_json(text: &str) -> Result<serde_json::Value, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::BadJson(e.to_string()))
}

pub fn flow_config_json(config: &FlowConfig) -> Json {
    let mut obj = Json::obj();
    obj.push("cfl_safety", Json::Num(config.cfl_safety));
    obj.push("resample_count", Json::Int(config.resample_count as i64));
    obj.push("resample_trigger", Json::Num(config.resample_trigger));
    if let Some(k) = config.stop_kappa_sq {
        obj.push("stop_kappa_sq", Json::Num(k));
    }
    if let Some(t) = config.stop_time {
        obj.push("stop_time", Json::Num(t));
    }
    obj.push("snapshot_stride", Json::Int(config.snapshot_stride as i64));
    obj
}

/// The `trajectory.json` body: per-snapshot scalars plus file references,
/// the flow configuration, any extra configuration echo, and the
/// termination reason.
pub fn trajectory_report(traj: &Trajectory, config_echo: &[(String, String)]) -> Json {
    let mut report = Json::obj();
    report.push("format_version", Json::Str(TRAJECTORY_FORMAT.into()));
    report.push("termination_reason", Json::Str(traj.termination.as_str().into()));
    report.push("flow", flow_config_json(&traj.config));
    if !config_echo.is_empty() {
        let mut echo = Json::obj();
        for (k, v) in config_echo {
            echo.push(k, Json::Str(v.clone()));
        }
        report.push("config", echo);
    }
    let snapshots: Vec<Json> = traj
        .snapshots
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let d = &s.diagnostics;
            let mut row = Json::obj();
            row.push("index", Json::Int(i as i64));
            row.push("file", Json::Str(format!("snap_{i}.csv")));
            row.push("t", Json::Num(s.t));
            row.push("L", Json::Num(d.length));
            row.push("K_t", Json::Num(d.sup_kappa_sq));
            row.push("tac", Json::Num(d.tac));
            row.push("tac_torsion", Json::Num(d.tac_torsion));
            row.push("pca_residual", Json::Num(d.pca_residual));
            row.push("sup_tau1", Json::Num(d.sup_tau1));
            row
        })
        .collect();
    report.push("snapshots", Json::Arr(snapshots));
    report
}

/// Write a trajectory as `snap_<i>.csv` files plus `trajectory.json`.
pub fn write_trajectory(
    dir: &Path,
    traj: &Trajectory,
    config_echo: &[(String, String)],
) -> Result<(), IoError> {
    fs::create_dir_all(dir)?;
    for (i, s) in traj.snapshots.iter().enumerate() {
        write_curve(&dir.join(format!("snap_{i}.csv")), &s.curve)?;
    }
    fs::write(
        dir.join("trajectory.json"),
        trajectory_report(traj, config_echo).to_pretty_string(),
    )?;
    Ok(())
}

/// Load a trajectory written by [`write_trajectory`]. Snapshot times and
/// the termination reason come from the report; every diagnostic is
/// recomputed from the stored curves, so hand-edited snapshots show up in
/// the downstream identity checks.
pub fn load_trajectory(dir: &Path) -> Result<Trajectory, IoError> {
    let text = fs::read_to_string(dir.join("trajectory.json"))?;
    let report = parse_json(&text)?;
    let termination = report
        .get("termination_reason")
        .and_then(|v| v.as_str())
        .and_then(TerminationReason::parse)
        .ok_or_else(|| IoError::BadJson("missing or unknown termination_reason".into()))?;
    let flow = report
        .get("flow")
        .ok_or_else(|| IoError::BadJson("missing flow configuration".into()))?;
    let get = |key: &str| flow.get(key).and_then(|v| v.as_f64());
    let config = FlowConfig {
        cfl_safety: get("cfl_safety").unwrap_or(0.25),
        resample_count: get("resample_count").unwrap_or(256.0) as usize,
        resample_trigger: get("resample_trigger").unwrap_or(1.05),
        stop_kappa_sq: get("stop_kappa_sq"),
        stop_time: get("stop_time"),
        snapshot_stride: get("snapshot_stride").unwrap_or(50.0) as usize,
    };
    let rows = report
        .get("snapshots")
        .and_then(|v| v.as_array())
        .ok_or_else(|| IoError::BadJson("missing snapshots array".into()))?;
    let mut snapshots = Vec::with_capacity(rows.len());
    for row in rows {
        let t = row
            .get("t")
            .and_then(|v| v.as_f64())
            .ok_or_else(|| IoError::BadJson("snapshot without a time".into()))?;
        let file = row
            .get("file")
            .and_then(|v| v.as_str())
            .ok_or_else(|| IoError::BadJson("snapshot without a file".into()))?;
        let curve = read_curve(&dir.join(file))?;
        let state = FlowState::new(t, curve)
            .map_err(|e| IoError::BadJson(format!("snapshot {file}: {e}")))?;
        snapshots.push(state);
    }
    Ok(Trajectory { snapshots, config, termination })
}

/// Fetch a float at a dotted path inside a parsed report.
pub fn json_f64(value: &serde_json::Value, path: &str) -> Option<f64> {
    json_at(value, path)?.as_f64()
}

pub fn json_at<'a>(value: &'a serde_json::Value, path: &str) -> Option<&'a serde_json::Value> {
    let mut cur = value;
    for key in path.split('.') {
        cur = match key.parse::<usize>() {
            Ok(idx) => cur.get(idx)?,
            Err(_) => cur.get(key)?,
        };
    }
    Some(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        let x = std::f64::consts::PI;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn curve_roundtrip_is_exact() {
        let c = reference::circle(3, 1.0, 1, 64).unwrap();
        let text = curve_to_string(&c);
        assert!(text.starts_with("# csflow-curve v1, dim=3, closed=1\n"));
        let back = curve_from_str(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn open_curve_roundtrip() {
        let c = reference::grim_reaper(1.0, 0.0, 33).unwrap();
        let back = curve_from_str(&curve_to_string(&c)).unwrap();
        assert!(!back.is_closed());
        assert_eq!(c, back);
    }

    #[test]
    fn bad_headers_are_rejected() {
        assert!(curve_from_str("").is_err());
        assert!(curve_from_str("# wrong v9, dim=2, closed=1\n0,0\n").is_err());
        assert!(curve_from_str("# csflow-curve v1, dim=2\n0,0\n").is_err());
    }

    #[test]
    fn trajectory_roundtrip_preserves_times_and_curves() {
        let circle = reference::circle(2, 1.0, 1, 64).unwrap();
        let mut config = crate::flow::FlowConfig::until(64, 0.02);
        config.snapshot_stride = 20;
        let traj = crate::flow::evolve(&circle, &config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_trajectory(dir.path(), &traj, &[("initial.kind".into(), "circle".into())])
            .unwrap();
        let back = load_trajectory(dir.path()).unwrap();
        assert_eq!(back.termination, traj.termination);
        assert_eq!(back.len(), traj.len());
        for (a, b) in traj.snapshots.iter().zip(&back.snapshots) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.curve, b.curve);
            assert!((a.diagnostics.length - b.diagnostics.length).abs() < 1e-14);
        }
    }

    #[test]
    fn json_writer_is_deterministic_and_parseable() {
        let mut report = Json::obj();
        report.push("format_version", Json::Str("test v1".into()));
        report.push("lambda", Json::Num(1.5203456789));
        report.push("grid", Json::Arr(vec![Json::Int(1), Json::Int(2)]));
        let a = report.to_pretty_string();
        let b = report.to_pretty_string();
        assert_eq!(a, b);
        let parsed = parse_json(&a).unwrap();
        assert_eq!(json_f64(&parsed, "lambda").unwrap(), 1.5203456789);
        assert_eq!(json_at(&parsed, "grid.1").unwrap().as_i64(), Some(2));
    }
}
