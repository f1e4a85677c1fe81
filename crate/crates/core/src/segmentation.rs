//! Segmentation output: JSON description, labelled PLY and one OFF file per patch.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::decompose::{BoundaryLabel, PantsDecomposition};
use crate::error::{Error, Result};
use crate::mesh::io::{save_labelled_ply, save_mesh, MeshFormat};
use crate::mesh::{CurveKind, CurvePoint, Point3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeRecord {
    pub g: usize,
    pub b: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chi: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchRecord {
    pub id: usize,
    #[serde(rename = "type")]
    pub patch_type: TypeRecord,
    /// Curve id per boundary loop, or `null` for a loop of the input boundary.
    pub boundary_curves: Vec<Option<usize>>,
    /// Indices into the faces of the labelled mesh (patches concatenated in order).
    pub face_ids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRecord {
    Edge { edge: [usize; 2], t: f64 },
    Vertex { vertex: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub id: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level: Option<f64>,
    pub points: Vec<PointRecord>,
    pub positions: Vec<Point3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    pub surface_type: TypeRecord,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub algorithm: Option<String>,
    pub patches: Vec<PatchRecord>,
    pub curves: Vec<CurveRecord>,
}

impl Segmentation {
    pub fn from_decomposition(d: &PantsDecomposition) -> Self {
        let st = d.source_type;
        let mut next_face = 0;
        let patches = d
            .patches
            .iter()
            .enumerate()
            .map(|(id, p)| {
                let f = p.mesh.num_faces();
                let face_ids = (next_face..next_face + f).collect();
                next_face += f;
                PatchRecord {
                    id,
                    patch_type: TypeRecord {
                        g: p.surface_type.genus,
                        b: p.surface_type.boundary_count,
                        chi: None,
                    },
                    boundary_curves: p
                        .boundary
                        .iter()
                        .map(|l| match l {
                            BoundaryLabel::Curve(c) => Some(*c),
                            BoundaryLabel::Source(_) => None,
                        })
                        .collect(),
                    face_ids,
                }
            })
            .collect();
        let curves = d
            .curves
            .iter()
            .enumerate()
            .map(|(id, c)| CurveRecord {
                id,
                kind: match c.kind {
                    CurveKind::Iso { .. } => "iso".into(),
                    CurveKind::PathLoop => "path".into(),
                },
                level: c.level().map(|l| l.value),
                points: c
                    .points
                    .iter()
                    .map(|p| match *p {
                        CurvePoint::Edge { u, v, t } => PointRecord::Edge { edge: [u, v], t },
                        CurvePoint::Vertex(v) => PointRecord::Vertex { vertex: v },
                    })
                    .collect(),
                positions: c.positions.clone(),
            })
            .collect();
        Segmentation {
            surface_type: TypeRecord {
                g: st.genus,
                b: st.boundary_count,
                chi: Some(st.euler_characteristic),
            },
            algorithm: Some(d.algorithm.to_string()),
            patches,
            curves,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("segmentation serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

pub fn save_segmentation(d: &PantsDecomposition, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, Segmentation::from_decomposition(d).to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_segmentation(path: impl AsRef<Path>) -> Result<Segmentation> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Segmentation::from_json(&text)
}

/// Writes `<stem>.json`, `<stem>.ply` and `<stem>_patch<i>.off` into `dir`.
pub fn save_outputs(
    d: &PantsDecomposition,
    dir: impl AsRef<Path>,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let json = dir.join(format!("{stem}.json"));
    save_segmentation(d, &json)?;
    written.push(json);
    let (mesh, labels) = d.labelled_mesh()?;
    let ply = dir.join(format!("{stem}.ply"));
    save_labelled_ply(&mesh, &labels, &ply)?;
    written.push(ply);
    for (i, p) in d.patches.iter().enumerate() {
        let off = dir.join(format!("{stem}_patch{i}.off"));
        save_mesh(&p.mesh, &off, Some(MeshFormat::Off))?;
        written.push(off);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{decompose, Algorithm};
    use crate::field::ScalarField;
    use crate::synth::plate;

    #[test]
    fn json_round_trip() {
        let m = plate(2, 0, 12).unwrap();
        let f = ScalarField::coordinate(&m, 2);
        let d = decompose(&m, &f, Algorithm::Reeb).unwrap();
        let s = Segmentation::from_decomposition(&d);
        let back = Segmentation::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
        assert_eq!(back.patches.len(), 2);
        assert_eq!(back.curves.len(), 3);
        let faces: usize = back.patches.iter().map(|p| p.face_ids.len()).sum();
        assert_eq!(faces, d.labelled_mesh().unwrap().0.num_faces());
    }

    #[test]
    fn writes_all_outputs() {
        let m = plate(2, 0, 12).unwrap();
        let f = ScalarField::coordinate(&m, 2);
        let d = decompose(&m, &f, Algorithm::Handle).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = save_outputs(&d, dir.path(), "out").unwrap();
        assert_eq!(files.len(), 2 + d.patches.len());
        assert!(files.iter().all(|p| p.exists()));
        assert_eq!(load_segmentation(&files[0]).unwrap().patches.len(), 2);
    }
}
