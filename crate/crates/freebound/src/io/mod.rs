//! File formats: OFF (canonical interchange), OBJ (ingestion only),
//! JSON curves and point clouds, CSV profiles.

pub mod curve_json;
pub mod obj;
pub mod off;
pub mod pointcloud;

use crate::error::Result;
use crate::mesh::TriangleMesh;
use std::path::Path;

/// Mesh format selector for [`load_mesh`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    /// Guess from the file extension; defaults to OFF.
    pub fn from_path(path: &Path) -> MeshFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("obj") => MeshFormat::Obj,
            _ => MeshFormat::Off,
        }
    }
}

pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<TriangleMesh> {
    let text = std::fs::read_to_string(path)?;
    match format {
        MeshFormat::Off => off::parse(&text),
        MeshFormat::Obj => obj::parse(&text),
    }
}

pub fn save_mesh(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    std::fs::write(path, off::to_string(mesh))?;
    Ok(())
}
