//! Surface file format: a single JSON document with canonical key order.
//!
//! ```json
//! {
//!   "polygons": [{"id": 0, "vertices": [[x, y], ...]}, ...],
//!   "pairings": [[[pid, eidx], [pid, eidx]], ...],
//!   "marked_points": [[pid, vidx], ...]
//! }
//! ```
//!
//! The writer emits two-space-indented JSON with fields in the order above,
//! so canonical files are byte-stable and diffable.

use dilaflow_core::surface::{EdgeRef, Surface, SurfaceSpec};
use dilaflow_core::PlanarPoint;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonFile {
    pub id: usize,
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub polygons: Vec<PolygonFile>,
    pub pairings: Vec<[[usize; 2]; 2]>,
    #[serde(default)]
    pub marked_points: Vec<[usize; 2]>,
}

impl SurfaceFile {
    pub fn from_spec(spec: &SurfaceSpec) -> Self {
        SurfaceFile {
            polygons: spec
                .polygons
                .iter()
                .enumerate()
                .map(|(id, vs)| PolygonFile {
                    id,
                    vertices: vs.iter().map(|p| [p.x, p.y]).collect(),
                })
                .collect(),
            pairings: spec
                .pairings
                .iter()
                .map(|(e, f)| [[e.polygon, e.edge_index], [f.polygon, f.edge_index]])
                .collect(),
            marked_points: spec.marked_points.iter().map(|&(p, v)| [p, v]).collect(),
        }
    }

    pub fn from_surface(surface: &Surface) -> Self {
        let spec = SurfaceSpec {
            polygons: surface.polygons.iter().map(|p| p.vertices.clone()).collect(),
            pairings: surface.pairings.iter().map(|p| (p.e, p.f)).collect(),
            marked_points: surface
                .singularities
                .iter()
                .filter(|s| s.is_marked)
                .map(|s| s.corners[0])
                .collect(),
        };
        Self::from_spec(&spec)
    }

    pub fn into_spec(self) -> SurfaceSpec {
        SurfaceSpec {
            polygons: self
                .polygons
                .into_iter()
                .map(|p| p.vertices.into_iter().map(|[x, y]| PlanarPoint::new(x, y)).collect())
                .collect(),
            pairings: self
                .pairings
                .into_iter()
                .map(|[[p0, e0], [p1, e1]]| (EdgeRef::new(p0, e0), EdgeRef::new(p1, e1)))
                .collect(),
            marked_points: self.marked_points.into_iter().map(|[p, v]| (p, v)).collect(),
        }
    }

    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("surface file serializes");
        s.push('\n');
        s
    }
}

/// Read a surface file from a path, or stdin when the path is `-`.
pub fn read_surface(path: &str) -> Result<Surface, String> {
    let text = read_input(path)?;
    let file: SurfaceFile =
        serde_json::from_str(&text).map_err(|e| format!("invalid surface file: {e}"))?;
    Surface::validate(file.into_spec()).map_err(|e| format!("invalid surface: {e}"))
}

pub fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("reading stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(Path::new(path)).map_err(|e| format!("reading {path}: {e}"))
    }
}

/// Write text to a path, or stdout when the path is `-`.
pub fn write_output(path: &str, text: &str) -> Result<(), String> {
    if path == "-" {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("writing stdout: {e}"))
    } else {
        std::fs::write(Path::new(path), text).map_err(|e| format!("writing {path}: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dilaflow_core::build_torus;

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let s = build_torus().unwrap();
        let file = SurfaceFile::from_surface(&s);
        let text = file.to_canonical_json();
        let parsed: SurfaceFile = serde_json::from_str(&text).unwrap();
        let again = parsed.to_canonical_json();
        assert_eq!(text, again);
        let surface = Surface::validate(
            serde_json::from_str::<SurfaceFile>(&text).unwrap().into_spec(),
        )
        .unwrap();
        assert_eq!(surface.genus, 1);
    }
}
