//! Curve files: `{"closed": true, "points": [[x, y, z], ...]}`.

use crate::curve::ClosedPolyline;
use crate::error::{Error, Result};
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
struct CurveFile {
    closed: bool,
    points: Vec<[f64; 3]>,
}

pub fn parse(text: &str) -> Result<ClosedPolyline> {
    let file: CurveFile =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    if !file.closed {
        return Err(Error::invalid("only closed curves are supported"));
    }
    let mut points: Vec<Vec3> = file.points.into_iter().map(Vec3::from_array).collect();
    // A duplicated closing point is common; drop it.
    if points.len() >= 2 && points.first() == points.last() {
        points.pop();
    }
    ClosedPolyline::new(points)
}

pub fn load(path: &Path) -> Result<ClosedPolyline> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn to_string(curve: &ClosedPolyline) -> String {
    let file = CurveFile {
        closed: true,
        points: curve.vertices().iter().map(|v| v.to_array()).collect(),
    };
    serde_json::to_string_pretty(&file).expect("curve serialization cannot fail")
}

pub fn save(path: &Path, curve: &ClosedPolyline) -> Result<()> {
    std::fs::write(path, to_string(curve))?;
    Ok(())
}
