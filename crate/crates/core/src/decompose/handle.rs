//! The handle-based sweep.
//!
//! The surface is cut along every component of the level sets at regular values between
//! consecutive critical points (inside a window that depends on the boundary and on whether the
//! field has degenerate saddles). Cylinders are merged into a neighbour, the surface is re-cut
//! along the curves that still separate different groups, and each remaining piece is resolved:
//! pants are kept, a genus-one end piece is opened along a saddle loop, and anything else is
//! decomposed again with a fresh boundary-aware field.

use std::time::Instant;

use log::debug;

use super::{Algorithm, BoundaryLabel, PantsDecomposition, Patch, Timings};
use crate::error::{Error, Result};
use crate::field::{solve_boundary_aware, BoundaryMode, Level, ScalarField, SolveOptions};
use crate::mesh::{cut_along_iso_curves, cut_along_path_loop, CutCurve, CutPiece, Side, TriMesh};
use crate::morse::{
    critical_points, extract_level_set, saddle_loop, CriticalKind, CriticalReport, Direction,
};
use crate::union_find::UnionFind;

#[derive(Debug, Default)]
pub(super) struct Builder {
    pub curves: Vec<CutCurve>,
    pub patches: Vec<Patch>,
    pub timings: Timings,
}

impl Builder {
    pub fn push_curve(&mut self, c: CutCurve) -> usize {
        self.curves.push(c);
        self.curves.len() - 1
    }
}

/// Labels of the boundary loops of `piece`, which was cut out of `parent` along curves whose
/// decomposition ids are `ids`.
pub(super) fn child_labels(
    parent: &TriMesh,
    parent_labels: &[BoundaryLabel],
    piece: &CutPiece,
    ids: &[usize],
) -> Result<Vec<BoundaryLabel>> {
    let mut loop_of = vec![usize::MAX; parent.num_vertices()];
    for (k, lp) in parent.boundary_components().iter().enumerate() {
        for &v in lp {
            loop_of[v] = k;
        }
    }
    piece
        .mesh
        .boundary_components()
        .iter()
        .zip(&piece.boundary_curves)
        .map(|(lp, bc)| match bc {
            Some((c, _)) => Ok(BoundaryLabel::Curve(ids[*c])),
            None => lp
                .iter()
                .find_map(|&v| piece.original_vertex(v))
                .and_then(|o| parent_labels.get(loop_of[o]).copied())
                .ok_or_else(|| {
                    Error::Validation("cannot trace a boundary loop to its source".into())
                }),
        })
        .collect()
}

/// Maps a vertex path of the source mesh into a piece cut from it.
pub fn map_path_into_piece(piece: &CutPiece, path: &[usize]) -> Option<CutCurve> {
    let mut local = std::collections::HashMap::with_capacity(piece.mesh.num_vertices());
    for v in 0..piece.mesh.num_vertices() {
        if let Some(o) = piece.original_vertex(v) {
            local.insert(o, v);
        }
    }
    let mapped: Option<Vec<usize>> = path.iter().map(|v| local.get(v).copied()).collect();
    Some(CutCurve::path(&piece.mesh, mapped?))
}

/// Inclusive gap window `[lo, hi]` for `n` critical points, or `None` if empty.
fn level_window(n: usize, boundary_count: usize, degenerate: bool) -> Option<(usize, usize)> {
    let n = n as i64;
    let (lo, hi) = match (boundary_count, degenerate) {
        (0, false) => (2, n - 4),
        (0, true) => (1, n - 3),
        (1, false) => (0, n - 4),
        (1, true) => (0, n - 3),
        _ => (0, n - 2),
    };
    (lo <= hi).then_some((lo as usize, hi as usize))
}

/// Pieces of one sweep after cylinder merging.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub levels: Vec<Level>,
    /// All level-set components at the sweep levels.
    pub level_curves: usize,
    /// Curves kept after merging, in the order used for the final cut.
    pub curves: Vec<CutCurve>,
    pub pieces: Vec<CutPiece>,
}

/// Cuts at the sweep levels and merges cylinders, without resolving the pieces.
pub fn handle_sweep(mesh: &TriMesh, field: &ScalarField) -> Result<SweepResult> {
    let report = critical_points(mesh, field)?;
    let mut timings = Timings::default();
    sweep(mesh, field, &report, &mut timings)
}

fn sweep(
    mesh: &TriMesh,
    field: &ScalarField,
    report: &CriticalReport,
    timings: &mut Timings,
) -> Result<SweepResult> {
    let t0 = Instant::now();
    let c = &report.points;
    let b = mesh.boundary_components().len();
    let mut levels = Vec::new();
    if let Some((lo, hi)) = level_window(c.len(), b, report.is_degenerate()) {
        for j in lo..=hi {
            let mid = 0.5 * (c[j].value + c[j + 1].value);
            levels.push(Level::between(field, mid, c[j].rank, c[j + 1].rank)?);
        }
    }
    let mut curves = Vec::new();
    for &level in &levels {
        curves.extend(extract_level_set(mesh, field, level)?);
    }
    let pieces = cut_along_iso_curves(mesh, field, &curves)?;

    // Sides of every curve.
    let mut sides = vec![[usize::MAX; 2]; curves.len()];
    for (p, piece) in pieces.iter().enumerate() {
        for &(cv, side) in &piece.curve_sides {
            sides[cv][(side == Side::Above) as usize] = p;
        }
    }
    let chi: Vec<i64> = pieces
        .iter()
        .map(|p| p.mesh.euler_characteristic())
        .collect();
    let mut uf = UnionFind::new(pieces.len());
    loop {
        let (group, count) = uf.labels();
        let mut group_chi = vec![0i64; count];
        for (p, &g) in group.iter().enumerate() {
            group_chi[g] += chi[p];
        }
        // First group (in piece order) that is a disk or cylinder with an outgoing curve; it is
        // merged across its lowest-bounding curve if it has one.
        let mut merge = None;
        'groups: for g in 0..count {
            if group_chi[g] < 0 {
                continue;
            }
            let mut fallback = None;
            for s in &sides {
                let (gb, ga) = (group[s[0]], group[s[1]]);
                if gb == ga {
                    continue;
                }
                if ga == g {
                    merge = Some((s[0], s[1]));
                    break 'groups;
                }
                if gb == g && fallback.is_none() {
                    fallback = Some((s[0], s[1]));
                }
            }
            if let Some(m) = fallback {
                merge = Some(m);
                break;
            }
        }
        match merge {
            Some((x, y)) => {
                uf.union(x, y);
            }
            None => break,
        }
    }
    let (group, _) = uf.labels();
    let kept: Vec<usize> = (0..curves.len())
        .filter(|&cv| group[sides[cv][0]] != group[sides[cv][1]])
        .collect();
    let level_curves = curves.len();
    let result = if kept.len() == curves.len() {
        SweepResult {
            levels,
            level_curves,
            curves,
            pieces,
        }
    } else {
        let kept_curves: Vec<CutCurve> = kept.iter().map(|&i| curves[i].clone()).collect();
        let pieces = cut_along_iso_curves(mesh, field, &kept_curves)?;
        SweepResult {
            levels,
            level_curves,
            curves: kept_curves,
            pieces,
        }
    };
    timings.cut += t0.elapsed();
    debug!(
        "sweep: {} levels, {} curves, {} kept, {} pieces",
        result.levels.len(),
        level_curves,
        result.curves.len(),
        result.pieces.len()
    );
    Ok(result)
}

struct Ctx {
    bound: usize,
}

fn check_field(mesh: &TriMesh, field: &ScalarField, report: &CriticalReport) -> Result<()> {
    let loops = mesh.boundary_components();
    for (k, lp) in loops.iter().enumerate() {
        if lp.iter().any(|&v| field.value(v) != field.value(lp[0])) {
            return Err(Error::BoundaryNotConstant { component: k });
        }
    }
    let (mins, maxs) = (report.minima(), report.maxima());
    let ok = match loops.len() {
        0 => mins == 1 && maxs == 1,
        1 => mins == 0 && maxs == 1,
        _ => mins == 0 && maxs == 0,
    };
    if !ok {
        return Err(Error::Precondition(format!(
            "field has {mins} interior minima and {maxs} interior maxima, which does not suit a \
             surface with {} boundary loop(s)",
            loops.len()
        )));
    }
    Ok(())
}

fn run_handle(
    mesh: &TriMesh,
    labels: &[BoundaryLabel],
    field: &ScalarField,
    depth: usize,
    ctx: &Ctx,
    out: &mut Builder,
) -> Result<()> {
    let t0 = Instant::now();
    let report = critical_points(mesh, field)?;
    out.timings.classify += t0.elapsed();
    check_field(mesh, field, &report)?;
    let sweep = sweep(mesh, field, &report, &mut out.timings)?;

    let ids: Vec<usize> = sweep
        .curves
        .iter()
        .map(|c| out.push_curve(c.clone()))
        .collect();
    let has_extremum = report.minima() + report.maxima() > 0;
    if ids.is_empty() && !has_extremum {
        let t = mesh.validate()?;
        if !t.is_pants() {
            return Err(Error::Unsupported(format!(
                "sweep of a {t} patch found no cutting level"
            )));
        }
    }
    for piece in &sweep.pieces {
        let piece_labels = child_labels(mesh, labels, piece, &ids)?;
        resolve(mesh, field, &report, piece, piece_labels, depth, ctx, out)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn resolve(
    mesh: &TriMesh,
    field: &ScalarField,
    report: &CriticalReport,
    piece: &CutPiece,
    labels: Vec<BoundaryLabel>,
    depth: usize,
    ctx: &Ctx,
    out: &mut Builder,
) -> Result<()> {
    let t = piece.mesh.validate()?;
    if t.is_pants() {
        out.patches.push(Patch {
            mesh: piece.mesh.clone(),
            surface_type: t,
            boundary: labels,
        });
        return Ok(());
    }
    if t.euler_characteristic >= 0 {
        return Err(Error::UnexpectedPatch {
            genus: t.genus,
            boundary: t.boundary_count,
            stage: "sweep",
        });
    }
    if t.genus >= 1 {
        let in_piece: std::collections::HashSet<usize> = (0..piece.mesh.num_vertices())
            .filter_map(|v| piece.original_vertex(v))
            .collect();
        for (kind, direction) in [
            (CriticalKind::Minimum, Direction::Down),
            (CriticalKind::Maximum, Direction::Up),
        ] {
            if !report
                .points
                .iter()
                .any(|p| p.kind == kind && in_piece.contains(&p.vertex))
            {
                continue;
            }
            let mut simple = report
                .points
                .iter()
                .filter(|p| p.multiplicity() == 1 && in_piece.contains(&p.vertex));
            let saddle = match direction {
                Direction::Down => simple.next(),
                Direction::Up => simple.next_back(),
            };
            let Some(saddle) = saddle else { continue };
            match open_handle(mesh, field, piece, &labels, saddle.vertex, direction, out) {
                Ok(()) => return Ok(()),
                Err(e) => debug!("saddle loop at {} failed: {e}; recursing", saddle.vertex),
            }
        }
    }
    recurse(&piece.mesh, labels, depth + 1, ctx, out)
}

/// Cuts a genus-carrying end piece along the loop through `saddle`, then resolves the result.
fn open_handle(
    mesh: &TriMesh,
    field: &ScalarField,
    piece: &CutPiece,
    labels: &[BoundaryLabel],
    saddle: usize,
    direction: Direction,
    out: &mut Builder,
) -> Result<()> {
    let t0 = Instant::now();
    let lp = saddle_loop(mesh, field, saddle, direction)?;
    let local = map_path_into_piece(piece, &lp.vertices()).ok_or_else(|| Error::SaddleLoop {
        vertex: saddle,
        reason: "loop leaves the patch".into(),
    })?;
    if local
        .vertices()
        .iter()
        .any(|&v| piece.mesh.is_boundary_vertex(v))
    {
        return Err(Error::SaddleLoop {
            vertex: saddle,
            reason: "loop touches the patch boundary".into(),
        });
    }
    let cut = cut_along_path_loop(&piece.mesh, &piece.field, &local)?;
    out.timings.cut += t0.elapsed();
    if cut.len() != 1 {
        return Err(Error::SaddleLoop {
            vertex: saddle,
            reason: "loop separates the patch".into(),
        });
    }
    let opened = &cut[0];
    let t = opened.mesh.validate()?;
    if !t.is_pants() {
        return Err(Error::UnexpectedPatch {
            genus: t.genus,
            boundary: t.boundary_count,
            stage: "saddle loop",
        });
    }
    let id = out.push_curve(local);
    let new_labels = match child_labels(&piece.mesh, labels, opened, &[id]) {
        Ok(l) => l,
        Err(e) => {
            out.curves.pop();
            return Err(e);
        }
    };
    out.patches.push(Patch {
        mesh: opened.mesh.clone(),
        surface_type: t,
        boundary: new_labels,
    });
    Ok(())
}

/// Decomposes a patch with boundary using a fresh boundary-aware field, trying each boundary
/// loop as the source in turn.
fn recurse(
    mesh: &TriMesh,
    labels: Vec<BoundaryLabel>,
    depth: usize,
    ctx: &Ctx,
    out: &mut Builder,
) -> Result<()> {
    if depth > ctx.bound {
        return Err(Error::RecursionDepth {
            depth,
            bound: ctx.bound,
        });
    }
    let b = labels.len();
    let modes: Vec<BoundaryMode> = match b {
        0 => {
            return Err(Error::Precondition(
                "cannot recurse on a closed patch".into(),
            ))
        }
        1 => vec![BoundaryMode::OneBoundary { p_max: None }],
        _ => (0..b)
            .map(|source| BoundaryMode::MultiBoundary { source })
            .collect(),
    };
    let mut last = None;
    for mode in modes {
        let t0 = Instant::now();
        let field = solve_boundary_aware(mesh, mode, SolveOptions::default())?;
        out.timings.field += t0.elapsed();
        let (nc, np) = (out.curves.len(), out.patches.len());
        match run_handle(mesh, &labels, &field, depth, ctx, out) {
            Ok(()) => return Ok(()),
            Err(e) => {
                debug!("recursion with {mode:?} failed: {e}");
                out.curves.truncate(nc);
                out.patches.truncate(np);
                last = Some(e);
            }
        }
    }
    Err(last.expect("at least one mode"))
}

fn top_level(
    mesh: &TriMesh,
    field: &ScalarField,
    expect: impl Fn(usize) -> bool,
    what: &str,
) -> Result<PantsDecomposition> {
    let start = Instant::now();
    let st = mesh.validate()?;
    if !expect(st.boundary_count) {
        return Err(Error::Precondition(format!(
            "{what} does not apply to a {st} surface"
        )));
    }
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
    let report = critical_points(mesh, field)?;
    let ctx = Ctx {
        bound: report.multiplicity_sum().max(1),
    };
    let labels: Vec<BoundaryLabel> = (0..st.boundary_count).map(BoundaryLabel::Source).collect();
    let mut out = Builder::default();
    run_handle(mesh, &labels, field, 0, &ctx, &mut out)?;
    out.timings.total = start.elapsed();
    let d = PantsDecomposition {
        curves: out.curves,
        patches: out.patches,
        source_type: st,
        algorithm: Algorithm::Handle,
        timings: out.timings,
    };
    super::validate_decomposition(&d).into_result()?;
    Ok(d)
}

/// Closed surfaces with a field that has one minimum, one maximum and simple saddles.
pub fn handle_decompose(mesh: &TriMesh, field: &ScalarField) -> Result<PantsDecomposition> {
    if critical_points(mesh, field)?.is_degenerate() {
        return handle_decompose_degenerate(mesh, field);
    }
    top_level(mesh, field, |b| b == 0, "the closed-surface sweep")
}

/// Surfaces with one boundary loop, with the field constant on it and one interior maximum.
pub fn handle_decompose_one_boundary(
    mesh: &TriMesh,
    field: &ScalarField,
) -> Result<PantsDecomposition> {
    top_level(mesh, field, |b| b == 1, "the one-boundary sweep")
}

/// Surfaces with several boundary loops and a field without interior extrema.
pub fn handle_decompose_multi_boundary(
    mesh: &TriMesh,
    field: &ScalarField,
) -> Result<PantsDecomposition> {
    top_level(mesh, field, |b| b >= 2, "the multi-boundary sweep")
}

/// Any boundary configuration, with degenerate saddles allowed.
pub fn handle_decompose_degenerate(
    mesh: &TriMesh,
    field: &ScalarField,
) -> Result<PantsDecomposition> {
    top_level(mesh, field, |_| true, "the degenerate sweep")
}

pub(super) fn recurse_patch(
    mesh: &TriMesh,
    labels: Vec<BoundaryLabel>,
    bound: usize,
    out: &mut Builder,
) -> Result<()> {
    recurse(mesh, labels, 1, &Ctx { bound }, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        // Closed genus 2: min, 4 saddles, max.
        assert_eq!(level_window(6, 0, false), Some((2, 2)));
        assert_eq!(level_window(10, 0, false), Some((2, 6)));
        assert_eq!(level_window(4, 0, true), Some((1, 1)));
        // (1,1): 2 saddles and a max, no level.
        assert_eq!(level_window(3, 1, false), None);
        assert_eq!(level_window(5, 1, false), Some((0, 1)));
        // (0,3): one saddle.
        assert_eq!(level_window(1, 3, false), None);
        assert_eq!(level_window(2, 4, false), Some((0, 0)));
    }
}
