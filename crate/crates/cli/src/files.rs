//! On-disk formats: point clouds (CSV or JSON), registration results and
//! generation manifests.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use pivotsweep::{MatchPair, PivotSolution, Point2, PointCloud, RegistrationResult};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `.json` files hold `{label, points: [[x, y], ...]}`; anything else is CSV
/// with an `x,y` header.
pub fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

#[derive(Debug, Serialize, Deserialize)]
struct CloudJson {
    #[serde(default)]
    label: Option<String>,
    points: Vec<[f64; 2]>,
}

pub fn read_cloud(path: &Path) -> Result<PointCloud, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let parsed = if is_json(path) {
        parse_json(&text)
    } else {
        parse_csv(&text)
    };
    parsed.map_err(|msg| CliError::input(format!("{}: {msg}", path.display())))
}

pub fn write_cloud(path: &Path, cloud: &PointCloud) -> Result<(), CliError> {
    let text = if is_json(path) {
        to_json(cloud)
    } else {
        to_csv(cloud)
    };
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_text(path, &to_json_string(value))
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// 17 significant digits, enough to round-trip every `f64`.
pub fn to_csv(cloud: &PointCloud) -> String {
    let mut out = String::from("x,y\n");
    for p in cloud.points() {
        writeln!(out, "{:.16e},{:.16e}", p.x, p.y).unwrap();
    }
    out
}

pub fn to_json(cloud: &PointCloud) -> String {
    to_json_string(&CloudJson {
        label: cloud.label().map(str::to_owned),
        points: cloud.points().iter().map(|p| [p.x, p.y]).collect(),
    })
}

/// Parses the CSV form, reporting problems by 1-based line number.
pub fn parse_csv(text: &str) -> Result<PointCloud, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, header)) if header.replace(' ', "") == "x,y" => {}
        Some((n, other)) => return Err(format!("line {n}: expected header `x,y`, found `{other}`")),
        None => return Err("empty file".into()),
    }
    let mut points = Vec::new();
    let mut line_of = Vec::new();
    for (n, line) in lines {
        let mut fields = line.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(format!("line {n}: expected two comma-separated values"));
        };
        let x = parse_coord(a, n)?;
        let y = parse_coord(b, n)?;
        points.push(Point2::new(x, y));
        line_of.push(n);
    }
    build(points, None, |i| format!("line {}", line_of[i]))
}

fn parse_coord(field: &str, line: usize) -> Result<f64, String> {
    let v: f64 = field
        .parse()
        .map_err(|_| format!("line {line}: `{field}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("line {line}: non-finite coordinate `{field}`"))
    }
}

pub fn parse_json(text: &str) -> Result<PointCloud, String> {
    let raw: CloudJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let points = raw.points.iter().map(|&[x, y]| Point2::new(x, y)).collect();
    build(points, raw.label, |i| format!("index {i}"))
}

fn build(
    points: Vec<Point2>,
    label: Option<String>,
    locate: impl Fn(usize) -> String,
) -> Result<PointCloud, String> {
    if points.is_empty() {
        return Err("no points".into());
    }
    // checked here rather than by PointCloud::new so the message names lines
    let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
        if let Some(&first) = seen.get(&key) {
            return Err(format!(
                "duplicate point at {} (same as {})",
                locate(i),
                locate(first)
            ));
        }
        seen.insert(key, i);
    }
    PointCloud::new(points, label).map_err(|e| e.to_string())
}

/// JSON result of `register`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub pivot_p: usize,
    pub pivot_q: usize,
    /// Radians, maps `Y` onto `X` as `x_p + R(theta)(y - y_q)`.
    pub theta: f64,
    pub plateau: [f64; 2],
    pub k_total: usize,
    pub energy: usize,
    pub delta: f64,
    pub delta_ok: bool,
    pub injective: bool,
    pub pairs: Vec<MatchPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_optima: Option<Vec<PivotSolution>>,
    pub runtime_ms: f64,
}

impl ResultFile {
    pub fn new(r: &RegistrationResult, delta: f64, runtime_ms: f64) -> Self {
        Self {
            pivot_p: r.best.p,
            pivot_q: r.best.q,
            theta: r.best.theta,
            plateau: r.best.plateau,
            k_total: r.best.k_total,
            energy: r.energy,
            delta,
            delta_ok: r.delta_ok,
            injective: r.injective,
            pairs: r.pairs.clone(),
            all_optima: r.all_optima.clone(),
            runtime_ms,
        }
    }
}

/// Ground truth written next to generated clouds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    pub seed: u64,
    pub n: usize,
    pub x_points: usize,
    pub y_points: Option<usize>,
    /// Rotation applied to produce `Y`, radians.
    pub rotation: Option<f64>,
    /// Angle registration should report: `-rotation` mod 2 pi.
    pub expected_theta: Option<f64>,
    pub sigma: Option<f64>,
    /// 1-based inclusive index ranges removed before moving the copy.
    pub deleted_ranges: Vec<(usize, usize)>,
    pub n_outliers: usize,
    pub outlier_sigma: Option<f64>,
    /// 0-based `(i, j)`: `y[j]` is the moved image of `x[i]`.
    pub correspondences: Vec<(usize, usize)>,
}
