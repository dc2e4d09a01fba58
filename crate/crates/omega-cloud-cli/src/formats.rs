//! On-disk formats. Both files are UTF-8 JSON with a format-version field.
//! Numbers are written as the shortest decimal that round-trips the f64
//! bit pattern, so save followed by load is exact. Cloud files carry
//! redundant fields (center, radius, endpoints, measure) and the loader
//! cross-checks them instead of trusting any single one.

use omega_cloud::{
    validate_convex, Arc, Circle, Cloud, CloudError, Config, ConvexPolygon, GeometryError, Pivot,
    PivotKind, Point2,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug)]
pub enum FormatError {
    Io(std::io::Error),
    Json(serde_json::Error),
    Version(u32),
    Polygon(GeometryError),
    Cloud(CloudError),
    Arc(usize, GeometryError),
    EmptyArcList,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Io(e) => write!(f, "io error: {e}"),
            FormatError::Json(e) => write!(f, "json error: {e}"),
            FormatError::Version(v) => {
                write!(
                    f,
                    "unsupported format-version {v} (expected {FORMAT_VERSION})"
                )
            }
            FormatError::Polygon(e) => write!(f, "invalid polygon: {e}"),
            FormatError::Cloud(e) => write!(f, "invalid cloud: {e}"),
            FormatError::Arc(i, e) => write!(f, "invalid arc {i}: {e}"),
            FormatError::EmptyArcList => write!(f, "cloud file has an empty arc list"),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<std::io::Error> for FormatError {
    fn from(e: std::io::Error) -> Self {
        FormatError::Io(e)
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PolygonFile {
    #[serde(rename = "format-version")]
    pub format_version: u32,
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ArcRecord {
    pub center: [f64; 2],
    pub radius: f64,
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub measure: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CloudFile {
    #[serde(rename = "format-version")]
    pub format_version: u32,
    pub omega: Option<f64>,
    pub maximal: bool,
    pub arcs: Vec<ArcRecord>,
}

fn point(p: [f64; 2]) -> Point2 {
    Point2 { x: p[0], y: p[1] }
}

fn pair(p: Point2) -> [f64; 2] {
    [p.x, p.y]
}

pub fn polygon_to_file(p: &ConvexPolygon) -> PolygonFile {
    PolygonFile {
        format_version: FORMAT_VERSION,
        vertices: p.vertices().iter().map(|v| pair(*v)).collect(),
    }
}

pub fn file_to_polygon(f: &PolygonFile) -> Result<ConvexPolygon, FormatError> {
    if f.format_version != FORMAT_VERSION {
        return Err(FormatError::Version(f.format_version));
    }
    let pts: Vec<Point2> = f.vertices.iter().map(|v| point(*v)).collect();
    validate_convex(&pts).map_err(FormatError::Polygon)
}

pub fn cloud_to_file(c: &Cloud) -> CloudFile {
    CloudFile {
        format_version: FORMAT_VERSION,
        omega: c.omega(),
        maximal: c.is_maximal(),
        arcs: c
            .arcs()
            .iter()
            .map(|a| ArcRecord {
                center: pair(a.circle.center),
                radius: a.circle.radius,
                start: pair(a.start),
                end: pair(a.end),
                measure: a.measure,
            })
            .collect(),
    }
}

pub fn file_to_cloud(f: &CloudFile, config: &Config) -> Result<Cloud, FormatError> {
    if f.format_version != FORMAT_VERSION {
        return Err(FormatError::Version(f.format_version));
    }
    if f.arcs.is_empty() {
        return Err(FormatError::EmptyArcList);
    }
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for r in &f.arcs {
        min_x = min_x.min(r.center[0] - r.radius);
        min_y = min_y.min(r.center[1] - r.radius);
        max_x = max_x.max(r.center[0] + r.radius);
        max_y = max_y.max(r.center[1] + r.radius);
    }
    let scale = ((max_x - min_x).powi(2) + (max_y - min_y).powi(2)).sqrt();
    let tol = config.tolerances(scale);
    let mut arcs = Vec::with_capacity(f.arcs.len());
    for (i, r) in f.arcs.iter().enumerate() {
        let circle = Circle::new(point(r.center), r.radius);
        let arc = Arc::new(circle, point(r.start), point(r.end), r.measure, &tol)
            .map_err(|e| FormatError::Arc(i, e))?;
        arcs.push(arc);
    }
    // Junction annotations are not stored; the loader rebuilds them from
    // the arc starts and leaves the kind unclassified.
    let pivots: Vec<Pivot> = if arcs.len() == 1 {
        Vec::new()
    } else {
        arcs.iter()
            .enumerate()
            .map(|(i, a)| Pivot {
                location: a.start,
                kind: PivotKind::Plain,
                index: i,
            })
            .collect()
    };
    Cloud::from_parts(arcs, pivots, f.omega, f.maximal, config).map_err(FormatError::Cloud)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    s.push('\n');
    s
}

pub fn save_polygon(path: &Path, p: &ConvexPolygon) -> Result<(), FormatError> {
    fs::write(path, to_json(&polygon_to_file(p)))?;
    Ok(())
}

pub fn load_polygon(path: &Path, _config: &Config) -> Result<ConvexPolygon, FormatError> {
    let text = fs::read_to_string(path)?;
    let file: PolygonFile = serde_json::from_str(&text)?;
    file_to_polygon(&file)
}

pub fn save_cloud(path: &Path, c: &Cloud) -> Result<(), FormatError> {
    fs::write(path, to_json(&cloud_to_file(c)))?;
    Ok(())
}

pub fn load_cloud(path: &Path, config: &Config) -> Result<Cloud, FormatError> {
    let text = fs::read_to_string(path)?;
    let file: CloudFile = serde_json::from_str(&text)?;
    file_to_cloud(&file, config)
}

/// Loads a file that may hold either format, telling them apart by their
/// top-level fields.
pub enum Loaded {
    Polygon(ConvexPolygon),
    Cloud(Cloud),
}

pub fn load_any(path: &Path, config: &Config) -> Result<Loaded, FormatError> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("vertices").is_some() {
        let file: PolygonFile = serde_json::from_value(value)?;
        Ok(Loaded::Polygon(file_to_polygon(&file)?))
    } else {
        let file: CloudFile = serde_json::from_value(value)?;
        Ok(Loaded::Cloud(file_to_cloud(&file, config)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use omega_cloud::{maximal_cloud, omega_cloud, random_convex_polygon};

    #[test]
    fn polygon_file_round_trips_bit_exactly() {
        let p = random_convex_polygon(9, 42).unwrap();
        let file = polygon_to_file(&p);
        let text = serde_json::to_string(&file).unwrap();
        let back: PolygonFile = serde_json::from_str(&text).unwrap();
        let q = file_to_polygon(&back).unwrap();
        assert_eq!(p.vertices(), q.vertices());
    }

    #[test]
    fn cloud_file_round_trips_bit_exactly() {
        let p = random_convex_polygon(7, 7).unwrap();
        let c = maximal_cloud(&omega_cloud(&p, 1.3).unwrap()).unwrap();
        let file = cloud_to_file(&c);
        let text = serde_json::to_string(&file).unwrap();
        let back: CloudFile = serde_json::from_str(&text).unwrap();
        let d = file_to_cloud(&back, &Config::default()).unwrap();
        assert_eq!(c.len(), d.len());
        for (a, b) in c.arcs().iter().zip(d.arcs()) {
            assert_eq!(a.circle.center.x, b.circle.center.x);
            assert_eq!(a.circle.center.y, b.circle.center.y);
            assert_eq!(a.circle.radius, b.circle.radius);
            assert_eq!(a.measure, b.measure);
        }
        assert_eq!(c.omega(), d.omega());
        assert_eq!(c.is_maximal(), d.is_maximal());
    }

    #[test]
    fn loader_rejects_tampered_measure() {
        let p = random_convex_polygon(5, 11).unwrap();
        let c = omega_cloud(&p, 1.0).unwrap();
        let mut file = cloud_to_file(&c);
        file.arcs[0].measure *= 1.001;
        assert!(file_to_cloud(&file, &Config::default()).is_err());
    }

    #[test]
    fn loader_rejects_broken_chain() {
        let p = random_convex_polygon(5, 12).unwrap();
        let c = omega_cloud(&p, 1.0).unwrap();
        let mut file = cloud_to_file(&c);
        file.arcs.rotate_left(1);
        file.arcs.swap(0, 1);
        assert!(file_to_cloud(&file, &Config::default()).is_err());
    }

    #[test]
    fn loader_rejects_empty_and_wrong_version() {
        let empty = CloudFile {
            format_version: FORMAT_VERSION,
            omega: None,
            maximal: false,
            arcs: Vec::new(),
        };
        assert!(matches!(
            file_to_cloud(&empty, &Config::default()),
            Err(FormatError::EmptyArcList)
        ));
        let p = random_convex_polygon(4, 3).unwrap();
        let mut file = polygon_to_file(&p);
        file.format_version = 99;
        assert!(matches!(
            file_to_polygon(&file),
            Err(FormatError::Version(99))
        ));
    }
}
