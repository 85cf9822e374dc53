//! Fields on disk: row-major little-endian `f64` values plus a JSON sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::field::{BoundaryCondition, GridField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub resolution: usize,
    pub seed: Option<u64>,
    pub boundary_condition: BoundaryCondition,
    pub layout: String,
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Write `path` (binary) and `path` with a `.json` extension.
pub fn write_field(field: &GridField, path: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(field.values().len() * 8);
    for v in field.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    let sidecar = FieldSidecar {
        resolution: field.resolution(),
        seed: field.seed(),
        boundary_condition: field.boundary(),
        layout: "row-major f64le, (N+1)x(N+1) vertices".into(),
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, bytes)?;
    fs::write(sidecar_path(path), json + "\n")?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<GridField> {
    let json = fs::read_to_string(sidecar_path(path))?;
    let sidecar: FieldSidecar = serde_json::from_str(&json).map_err(|e| Error::Io(e.to_string()))?;
    let bytes = fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Io(format!("{} is not a whole number of f64 values", path.display())));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridField::from_parts(sidecar.resolution, values, sidecar.seed, sidecar.boundary_condition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lqg::field::sample_dgff;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.bin");
        let f = sample_dgff(64, 3).unwrap();
        write_field(&f, &path).unwrap();
        assert_eq!(read_field(&path).unwrap(), f);
        let side: FieldSidecar = serde_json::from_str(&fs::read_to_string(dir.path().join("h.json")).unwrap()).unwrap();
        assert_eq!(side.seed, Some(3));
        assert_eq!(side.boundary_condition, BoundaryCondition::ZeroDirichlet);
        fs::write(&path, [0u8; 12]).unwrap();
        assert!(read_field(&path).is_err());
    }
}
