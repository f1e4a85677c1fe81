//! Pants decompositions: the handle-based sweep, the Reeb-graph algorithm, and validation.

mod handle;
mod reeb_based;

use std::fmt;
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::mesh::{CutCurve, SurfaceType, TriMesh};
use crate::morse::critical_points;

pub use handle::{
    handle_decompose, handle_decompose_degenerate, handle_decompose_multi_boundary,
    handle_decompose_one_boundary, handle_sweep, map_path_into_piece, SweepResult,
};
pub use reeb_based::reeb_decompose;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Algorithm {
    Handle,
    Reeb,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Handle => write!(f, "handle"),
            Algorithm::Reeb => write!(f, "reeb"),
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "handle" => Ok(Algorithm::Handle),
            "reeb" => Ok(Algorithm::Reeb),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm '{other}'"
            ))),
        }
    }
}

/// What a patch boundary loop came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BoundaryLabel {
    /// Boundary loop `i` of the input mesh.
    Source(usize),
    /// Curve `i` of the decomposition.
    Curve(usize),
}

#[derive(Debug, Clone)]
pub struct Patch {
    pub mesh: TriMesh,
    pub surface_type: SurfaceType,
    /// One label per loop of `mesh.boundary_components()`.
    pub boundary: Vec<BoundaryLabel>,
}

impl Patch {
    /// Ids of the curves bounding this patch.
    pub fn provenance(&self) -> Vec<usize> {
        self.boundary
            .iter()
            .filter_map(|b| match b {
                BoundaryLabel::Curve(c) => Some(*c),
                BoundaryLabel::Source(_) => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timings {
    pub classify: Duration,
    pub cut: Duration,
    /// Field solves performed inside recursive steps.
    pub field: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone)]
pub struct PantsDecomposition {
    pub curves: Vec<CutCurve>,
    pub patches: Vec<Patch>,
    pub source_type: SurfaceType,
    pub algorithm: Algorithm,
    pub timings: Timings,
}

impl PantsDecomposition {
    /// Patch meshes concatenated in order, with the patch index of every face.
    pub fn labelled_mesh(&self) -> Result<(TriMesh, Vec<usize>)> {
        let mesh = TriMesh::disjoint_union(self.patches.iter().map(|p| &p.mesh))?;
        let labels = self
            .patches
            .iter()
            .enumerate()
            .flat_map(|(i, p)| std::iter::repeat_n(i, p.mesh.num_faces()))
            .collect();
        Ok((mesh, labels))
    }
}

/// Outcome of [`validate_decomposition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub patch_types: Vec<SurfaceType>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.is_ok() {
            Ok(self)
        } else {
            Err(Error::Validation(self.failures.join("; ")))
        }
    }
}

/// Checks that every patch is a pair of pants and that the counts match the source type.
pub fn validate_decomposition(d: &PantsDecomposition) -> ValidationReport {
    let mut failures = Vec::new();
    let mut patch_types = Vec::with_capacity(d.patches.len());
    let mut chi_sum = 0i64;
    let mut uses = vec![0usize; d.curves.len()];
    for (i, p) in d.patches.iter().enumerate() {
        match p.mesh.validate() {
            Ok(t) => {
                if !t.is_pants() {
                    failures.push(format!("patch {i} has type {t}, expected (0,3)"));
                }
                if t != p.surface_type {
                    failures.push(format!(
                        "patch {i} is tagged {} but classifies as {t}",
                        p.surface_type
                    ));
                }
                chi_sum += t.euler_characteristic;
                patch_types.push(t);
            }
            Err(e) => {
                failures.push(format!("patch {i} is not a valid surface: {e}"));
                chi_sum += p.mesh.euler_characteristic();
            }
        }
        for c in p.provenance() {
            match uses.get_mut(c) {
                Some(u) => *u += 1,
                None => failures.push(format!("patch {i} references unknown curve {c}")),
            }
        }
    }
    let st = d.source_type;
    if d.patches.len() != st.pants_count() {
        failures.push(format!(
            "{} patches, expected {} for {st}",
            d.patches.len(),
            st.pants_count()
        ));
    }
    if d.curves.len() != st.curve_count() {
        failures.push(format!(
            "{} curves, expected {} for {st}",
            d.curves.len(),
            st.curve_count()
        ));
    }
    if chi_sum != st.euler_characteristic {
        failures.push(format!(
            "patch Euler characteristics sum to {chi_sum}, source has {}",
            st.euler_characteristic
        ));
    }
    for (c, &u) in uses.iter().enumerate() {
        if u != 2 {
            failures.push(format!("curve {c} bounds {u} patch loop(s), expected 2"));
        }
    }
    ValidationReport {
        patch_types,
        failures,
    }
}

/// Runs the chosen algorithm, picking the handle variant from the surface and field, and
/// validates the result.
pub fn decompose(
    mesh: &TriMesh,
    field: &ScalarField,
    algorithm: Algorithm,
) -> Result<PantsDecomposition> {
    let st = mesh.validate()?;
    if field.len() != mesh.num_vertices() {
        return Err(Error::FieldLength {
            expected: mesh.num_vertices(),
            got: field.len(),
        });
    }
    match algorithm {
        Algorithm::Reeb => reeb_decompose(mesh, field),
        Algorithm::Handle => {
            let report = critical_points(mesh, field)?;
            match (st.boundary_count, report.is_degenerate()) {
                (0, false) => handle_decompose(mesh, field),
                (0, true) => handle_decompose_degenerate(mesh, field),
                (1, _) => handle_decompose_one_boundary(mesh, field),
                _ => handle_decompose_multi_boundary(mesh, field),
            }
        }
    }
}
