use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-triangle face {face} with {arity} vertices")]
    NonTriangleFace { face: usize, arity: usize },

    #[error("face {face} references vertex {vertex}, but the mesh has {count} vertices")]
    IndexOutOfRange {
        face: usize,
        vertex: usize,
        count: usize,
    },

    #[error("face {face} repeats vertex {vertex}")]
    DegenerateFace { face: usize, vertex: usize },

    #[error("non-manifold edge ({u}, {v}) with {faces} incident faces")]
    NonManifoldEdge { u: usize, v: usize, faces: usize },

    #[error("non-manifold vertex {vertex}: its one-ring splits into {fans} fans")]
    NonManifoldVertex { vertex: usize, fans: usize },

    #[error("non-orientable or inconsistently oriented at edge ({u}, {v})")]
    NonOrientable { u: usize, v: usize },

    #[error("vertex {vertex} is not referenced by any face")]
    IsolatedVertex { vertex: usize },

    #[error(
        "mesh is disconnected: {components} components (face {face} is not reachable from face 0)"
    )]
    Disconnected { components: usize, face: usize },

    #[error("mesh is empty")]
    EmptyMesh,

    #[error("field has {got} values but the mesh has {expected} vertices")]
    FieldLength { expected: usize, got: usize },

    #[error("field value at vertex {vertex} is not finite")]
    NonFiniteValue { vertex: usize },

    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),

    #[error("coincident vertex positions on edge ({u}, {v})")]
    CoincidentVertices { u: usize, v: usize },

    #[error("({u}, {v}) is not an edge of the mesh")]
    NotAnEdge { u: usize, v: usize },

    #[error("harmonic solve did not converge: relative residual {residual:e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("field is not constant on boundary component {component}")]
    BoundaryNotConstant { component: usize },

    #[error("level {level} is not regular: {reason}")]
    IrregularLevel { level: f64, reason: String },

    #[error("invalid cut curve: {0}")]
    InvalidCurve(String),

    #[error("saddle loop at vertex {vertex}: {reason}")]
    SaddleLoop { vertex: usize, reason: String },

    #[error("empty regular-value window")]
    EmptyWindow,

    #[error("reeb graph: {0}")]
    Reeb(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unexpected patch of type (g={genus}, b={boundary}) during {stage}")]
    UnexpectedPatch {
        genus: usize,
        boundary: usize,
        stage: &'static str,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("recursion depth {depth} exceeded the bound {bound}")]
    RecursionDepth { depth: usize, bound: usize },

    #[error("decomposition failed validation: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by malformed input rather than by an algorithm stage.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::NonTriangleFace { .. }
                | Error::IndexOutOfRange { .. }
                | Error::DegenerateFace { .. }
                | Error::NonManifoldEdge { .. }
                | Error::NonManifoldVertex { .. }
                | Error::NonOrientable { .. }
                | Error::IsolatedVertex { .. }
                | Error::Disconnected { .. }
                | Error::EmptyMesh
                | Error::FieldLength { .. }
                | Error::NonFiniteValue { .. }
                | Error::InvalidConstraints(_)
                | Error::InvalidArgument(_)
        )
    }
}
