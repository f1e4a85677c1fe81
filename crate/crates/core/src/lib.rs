//! Pants decompositions of triangulated surfaces driven by scalar fields.

pub mod decompose;
pub mod error;
pub mod field;
pub mod mesh;
pub mod morse;
pub mod noise;
pub mod reeb;
pub mod segmentation;
pub mod synth;
mod union_find;

pub use decompose::{
    decompose, validate_decomposition, Algorithm, BoundaryLabel, PantsDecomposition, Patch,
    Timings, ValidationReport,
};
pub use error::{Error, Result};
pub use field::{Level, ScalarField};
pub use mesh::{CutCurve, Point3, SurfaceType, TriMesh};
pub use morse::{critical_points, CriticalKind, CriticalPoint, CriticalReport};
pub use reeb::ReebGraph;
pub use segmentation::{load_segmentation, save_outputs, save_segmentation, Segmentation};
