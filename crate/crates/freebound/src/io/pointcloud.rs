//! Sampled support surfaces: `{"points": [...], "normals": [...]}`.

use crate::error::{Error, Result};
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
pub struct PointCloudFile {
    pub points: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
}

pub fn parse(text: &str) -> Result<(Vec<Vec3>, Vec<Vec3>)> {
    let file: PointCloudFile =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    if file.points.len() != file.normals.len() {
        return Err(Error::invalid(format!(
            "points ({}) and normals ({}) must have equal length",
            file.points.len(),
            file.normals.len()
        )));
    }
    let points: Vec<Vec3> = file.points.into_iter().map(Vec3::from_array).collect();
    let mut normals = Vec::with_capacity(points.len());
    for (i, n) in file.normals.into_iter().enumerate() {
        let n = Vec3::from_array(n);
        if !n.is_finite() || !points[i].is_finite() {
            return Err(Error::invalid(format!("non-finite sample at index {i}")));
        }
        let unit = n
            .normalized()
            .ok_or_else(|| Error::invalid(format!("zero normal at index {i}")))?;
        normals.push(unit);
    }
    Ok((points, normals))
}

pub fn load(path: &Path) -> Result<(Vec<Vec3>, Vec<Vec3>)> {
    parse(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatched_lengths_rejected() {
        let text = r#"{"points": [[0,0,1]], "normals": []}"#;
        assert!(parse(text).is_err());
    }

    #[test]
    fn normals_are_normalized() {
        let text = r#"{"points": [[0,0,1]], "normals": [[0,0,2]]}"#;
        let (_, normals) = parse(text).unwrap();
        assert!((normals[0].norm() - 1.0).abs() < 1e-15);
    }
}
