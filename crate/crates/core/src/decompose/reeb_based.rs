//! Pants decomposition from the Reeb graph.

use std::time::Instant;

use super::handle::{child_labels, recurse_patch, Builder};
use super::{validate_decomposition, Algorithm, BoundaryLabel, PantsDecomposition, Patch};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::mesh::{cut_along_iso_curves, TriMesh};
use crate::morse::critical_points;
use crate::reeb::{cut_point_to_curve, cut_points, ReebGraph};

/// Cuts at one level inside every skeleton edge between two branching nodes. Pieces that are
/// not pants (left by degenerate saddles) are decomposed again with boundary-aware fields.
pub fn reeb_decompose(mesh: &TriMesh, field: &ScalarField) -> Result<PantsDecomposition> {
    let start = Instant::now();
    let st = mesh.validate()?;
    if st.euler_characteristic >= 0 {
        return Err(Error::Precondition(format!(
            "pants decomposition needs χ < 0, surface is {st}"
        )));
    }
    if field.len() != mesh.num_vertices() {
        return Err(Error::FieldLength {
            expected: mesh.num_vertices(),
            got: field.len(),
        });
    }
    let mut out = Builder::default();
    let t0 = Instant::now();
    let graph = ReebGraph::build(mesh, field)?;
    let (_, cps) = cut_points(&graph, field)?;
    out.timings.classify += t0.elapsed();

    let t1 = Instant::now();
    let curves = cps
        .iter()
        .map(|cp| cut_point_to_curve(mesh, field, &graph, cp))
        .collect::<Result<Vec<_>>>()?;
    let pieces = cut_along_iso_curves(mesh, field, &curves)?;
    out.timings.cut += t1.elapsed();
    let ids: Vec<usize> = curves.into_iter().map(|c| out.push_curve(c)).collect();

    let labels: Vec<BoundaryLabel> = (0..st.boundary_count).map(BoundaryLabel::Source).collect();
    let bound = critical_points(mesh, field)?.multiplicity_sum().max(1);
    for piece in &pieces {
        let piece_labels = child_labels(mesh, &labels, piece, &ids)?;
        let t = piece.mesh.validate()?;
        if t.is_pants() {
            out.patches.push(Patch {
                mesh: piece.mesh.clone(),
                surface_type: t,
                boundary: piece_labels,
            });
        } else if t.euler_characteristic < 0 {
            recurse_patch(&piece.mesh, piece_labels, bound, &mut out)?;
        } else {
            return Err(Error::UnexpectedPatch {
                genus: t.genus,
                boundary: t.boundary_count,
                stage: "reeb cut",
            });
        }
    }
    out.timings.total = start.elapsed();
    let d = PantsDecomposition {
        curves: out.curves,
        patches: out.patches,
        source_type: st,
        algorithm: Algorithm::Reeb,
        timings: out.timings,
    };
    validate_decomposition(&d).into_result()?;
    Ok(d)
}
