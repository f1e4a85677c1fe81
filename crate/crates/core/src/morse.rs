//! Piecewise-linear critical points, level sets and descending paths.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Level, ScalarField};
use crate::mesh::{CurvePoint, CutCurve, TriMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriticalKind {
    Minimum,
    Maximum,
    /// A saddle of multiplicity `m` has `2 + 2m` sign changes around its link.
    Saddle {
        multiplicity: usize,
    },
}

impl fmt::Display for CriticalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriticalKind::Minimum => write!(f, "min"),
            CriticalKind::Maximum => write!(f, "max"),
            CriticalKind::Saddle { multiplicity: 1 } => write!(f, "saddle"),
            CriticalKind::Saddle { multiplicity } => write!(f, "saddle(m={multiplicity})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub vertex: usize,
    pub kind: CriticalKind,
    pub rank: usize,
    pub value: f64,
}

impl CriticalPoint {
    /// Saddle multiplicity, or 0 for extrema.
    pub fn multiplicity(&self) -> usize {
        match self.kind {
            CriticalKind::Saddle { multiplicity } => multiplicity,
            _ => 0,
        }
    }

    pub fn is_saddle(&self) -> bool {
        matches!(self.kind, CriticalKind::Saddle { .. })
    }
}

/// Number of sign changes of `f(w) − f(v)` around a closed ring.
fn sign_changes(field: &ScalarField, v: usize, ring: &[usize]) -> usize {
    let n = ring.len();
    (0..n)
        .filter(|&i| field.less(ring[i], v) != field.less(ring[(i + 1) % n], v))
        .count()
}

/// Classifies an interior vertex; `None` for regular or boundary vertices.
pub fn classify_vertex(mesh: &TriMesh, field: &ScalarField, v: usize) -> Option<CriticalKind> {
    if mesh.is_boundary_vertex(v) {
        return None;
    }
    let fan = mesh.one_ring(v);
    if fan.ring.is_empty() {
        return None;
    }
    match sign_changes(field, v, &fan.ring) {
        0 if field.less(v, fan.ring[0]) => Some(CriticalKind::Minimum),
        0 => Some(CriticalKind::Maximum),
        2 => None,
        s => Some(CriticalKind::Saddle {
            multiplicity: s / 2 - 1,
        }),
    }
}

/// Interior critical points of a field, sorted by rank.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalReport {
    pub points: Vec<CriticalPoint>,
}

impl CriticalReport {
    pub fn minima(&self) -> usize {
        self.count(|k| k == CriticalKind::Minimum)
    }

    pub fn maxima(&self) -> usize {
        self.count(|k| k == CriticalKind::Maximum)
    }

    pub fn saddles(&self) -> usize {
        self.count(|k| matches!(k, CriticalKind::Saddle { .. }))
    }

    fn count(&self, pred: impl Fn(CriticalKind) -> bool) -> usize {
        self.points.iter().filter(|p| pred(p.kind)).count()
    }

    /// Sum of saddle multiplicities.
    pub fn multiplicity_sum(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity()).sum()
    }

    /// `n_min − Σ m + n_max`, which equals χ on a closed surface.
    pub fn morse_sum(&self) -> i64 {
        self.minima() as i64 - self.multiplicity_sum() as i64 + self.maxima() as i64
    }

    pub fn is_degenerate(&self) -> bool {
        self.points.iter().any(|p| p.multiplicity() > 1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the Morse identity against a closed mesh.
    pub fn check_identity(&self, mesh: &TriMesh) -> Result<()> {
        if mesh.has_boundary() {
            return Ok(());
        }
        let chi = mesh.euler_characteristic();
        if self.morse_sum() != chi {
            return Err(Error::Validation(format!(
                "critical points give {} but χ = {chi}",
                self.morse_sum()
            )));
        }
        Ok(())
    }
}

pub fn critical_points(mesh: &TriMesh, field: &ScalarField) -> Result<CriticalReport> {
    if field.len() != mesh.num_vertices() {
        return Err(Error::FieldLength {
            expected: mesh.num_vertices(),
            got: field.len(),
        });
    }
    let mut points: Vec<CriticalPoint> = (0..mesh.num_vertices())
        .filter_map(|v| {
            classify_vertex(mesh, field, v).map(|kind| CriticalPoint {
                vertex: v,
                kind,
                rank: field.rank(v),
                value: field.value(v),
            })
        })
        .collect();
    points.sort_by_key(|p| p.rank);
    Ok(CriticalReport { points })
}

/// A level between every pair of consecutive critical points; entry `j` lies in gap `j`.
pub fn regular_midvalues(field: &ScalarField, report: &CriticalReport) -> Result<Vec<Level>> {
    report
        .points
        .windows(2)
        .map(|w| Level::between(field, 0.5 * (w[0].value + w[1].value), w[0].rank, w[1].rank))
        .collect()
}

/// The crossing of the level on side `k` of face `f`, as `(edge, rising)` where `rising` means
/// the face traverses the side from below to above.
fn face_crossings(
    mesh: &TriMesh,
    field: &ScalarField,
    level: &Level,
    f: usize,
) -> Option<((usize, usize), (usize, usize))> {
    let t = mesh.triangle(f);
    let mut rising = None;
    let mut falling = None;
    for k in 0..3 {
        let (a, b) = (t[k], t[(k + 1) % 3]);
        match (level.is_below(field, a), level.is_below(field, b)) {
            (true, false) => rising = Some((a, b)),
            (false, true) => falling = Some((b, a)),
            _ => {}
        }
    }
    Some((rising?, falling?))
}

/// Traces the level-set loop through face `start`. Segments enter each face through the side
/// the face traverses from below to above.
pub fn trace_loop(
    mesh: &TriMesh,
    field: &ScalarField,
    level: Level,
    start: usize,
) -> Result<(CutCurve, Vec<usize>)> {
    let open = || Error::IrregularLevel {
        level: level.value,
        reason: "level set has an open arc".into(),
    };
    let mut faces = vec![start];
    let (first, _) =
        face_crossings(mesh, field, &level, start).ok_or_else(|| Error::IrregularLevel {
            level: level.value,
            reason: format!("face {start} does not cross the level"),
        })?;
    let mut points = Vec::new();
    let mut face = start;
    loop {
        let (entry, exit) = face_crossings(mesh, field, &level, face).ok_or_else(open)?;
        points.push(CurvePoint::Edge {
            u: entry.0,
            v: entry.1,
            t: level.interpolate(field, entry.0, entry.1),
        });
        let e = mesh.edge_id(exit.0, exit.1).unwrap();
        let next = mesh
            .edge_faces(e)
            .iter()
            .copied()
            .find(|&g| g != face)
            .ok_or_else(open)?;
        if next == start {
            break;
        }
        if faces.len() > mesh.num_faces() {
            return Err(open());
        }
        face = next;
        faces.push(face);
    }
    debug_assert!(matches!(points[0], CurvePoint::Edge { u, v, .. } if (u, v) == first));
    Ok((CutCurve::iso(mesh, level, points), faces))
}

/// All closed components of the level set, in order of their lowest face.
pub fn extract_level_set(
    mesh: &TriMesh,
    field: &ScalarField,
    level: Level,
) -> Result<Vec<CutCurve>> {
    let mut seen = vec![false; mesh.num_faces()];
    let mut curves = Vec::new();
    for f in 0..mesh.num_faces() {
        if seen[f] || face_crossings(mesh, field, &level, f).is_none() {
            continue;
        }
        let (curve, faces) = trace_loop(mesh, field, level, f)?;
        for g in faces {
            seen[g] = true;
        }
        curves.push(curve);
    }
    Ok(curves)
}

/// Steepest-descent path in the symbolic order, from `v` to a local minimum.
pub fn descending_path(mesh: &TriMesh, field: &ScalarField, v: usize) -> Vec<usize> {
    let mut path = vec![v];
    let mut cur = v;
    loop {
        let low = mesh
            .neighbors(cur)
            .into_iter()
            .min_by_key(|&w| field.rank(w));
        match low {
            Some(w) if field.less(w, cur) => {
                path.push(w);
                cur = w;
            }
            _ => return path,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Loop through the saddle and the region below it.
    Down,
    /// Loop through the saddle and the region above it.
    Up,
}

/// Closed edge path through a simple saddle `p`, built from the descending paths of the lowest
/// vertex in each of its two lower-link runs and trimmed at their first common vertex.
pub fn saddle_loop(
    mesh: &TriMesh,
    field: &ScalarField,
    p: usize,
    direction: Direction,
) -> Result<CutCurve> {
    let reversed;
    let f = match direction {
        Direction::Down => field,
        Direction::Up => {
            reversed = field.reversed();
            &reversed
        }
    };
    let fail = |reason: &str| Error::SaddleLoop {
        vertex: p,
        reason: reason.into(),
    };
    if mesh.is_boundary_vertex(p) {
        return Err(fail("vertex is on the boundary"));
    }
    let ring = mesh.one_ring(p).ring;
    let n = ring.len();
    let below: Vec<bool> = ring.iter().map(|&w| f.less(w, p)).collect();
    let starts: Vec<usize> = (0..n)
        .filter(|&i| below[i] && !below[(i + n - 1) % n])
        .collect();
    if starts.len() != 2 {
        return Err(fail(&format!(
            "expected 2 lower-link runs, found {}",
            starts.len()
        )));
    }
    let lowest_in_run = |s: usize| {
        let mut best = ring[s];
        let mut i = s;
        while below[i] {
            if f.less(ring[i], best) {
                best = ring[i];
            }
            i = (i + 1) % n;
        }
        best
    };
    let path_a = descending_path(mesh, f, lowest_in_run(starts[0]));
    let path_b = descending_path(mesh, f, lowest_in_run(starts[1]));
    let in_b: HashSet<usize> = path_b.iter().copied().collect();
    let ia = path_a
        .iter()
        .position(|v| in_b.contains(v))
        .ok_or_else(|| fail("descending paths reach different minima"))?;
    let w = path_a[ia];
    let ib = path_b.iter().position(|&v| v == w).unwrap();
    let mut verts = vec![p];
    verts.extend_from_slice(&path_a[..=ia]);
    verts.extend(path_b[..ib].iter().rev());
    Ok(CutCurve::path(mesh, verts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::icosahedron;

    #[test]
    fn height_on_icosahedron_has_two_extrema() {
        let m = icosahedron();
        let f = ScalarField::coordinate(&m, 2);
        let r = critical_points(&m, &f).unwrap();
        assert_eq!(r.minima(), 1);
        assert_eq!(r.maxima(), 1);
        assert_eq!(r.morse_sum(), 2);
        r.check_identity(&m).unwrap();
        assert_eq!(r.points[0].vertex, f.vertex_at_rank(0));
    }

    #[test]
    fn monkey_saddle_multiplicity() {
        // Hexagon fan around the origin with f = Re((x+iy)^3): six alternations.
        let mut positions = vec![[0.0, 0.0, 0.0]];
        for k in 0..6 {
            let a = std::f64::consts::PI / 3.0 * k as f64 + 0.1;
            positions.push([a.cos(), a.sin(), 0.0]);
        }
        // Close the disk with a cone apex so the centre is interior and the mesh is a sphere.
        positions.push([0.0, 0.0, -1.0]);
        let mut tris: Vec<[usize; 3]> = (0..6).map(|k| [0, 1 + k, 1 + (k + 1) % 6]).collect();
        tris.extend((0..6).map(|k| [7, 1 + (k + 1) % 6, 1 + k]));
        let m = TriMesh::new(positions.clone(), tris).unwrap();
        let vals: Vec<f64> = positions
            .iter()
            .map(|p| p[0].powi(3) - 3.0 * p[0] * p[1] * p[1])
            .collect();
        let f = ScalarField::new(vals).unwrap();
        assert_eq!(
            classify_vertex(&m, &f, 0),
            Some(CriticalKind::Saddle { multiplicity: 2 })
        );
    }

    #[test]
    fn level_set_on_sphere_is_one_loop() {
        let m = icosahedron();
        let f = ScalarField::coordinate(&m, 2);
        for r in 0..m.num_vertices() - 1 {
            let level = Level::above_rank(&f, r).unwrap();
            let curves = extract_level_set(&m, &f, level).unwrap();
            assert_eq!(curves.len(), 1, "rank {r}");
            // Every crossed edge appears exactly once.
            let crossed = m
                .edges()
                .iter()
                .filter(|&&[a, b]| level.crosses(&f, a, b))
                .count();
            assert_eq!(curves[0].len(), crossed);
        }
    }

    #[test]
    fn descending_path_ends_at_minimum() {
        let m = icosahedron();
        let f = ScalarField::coordinate(&m, 2);
        for v in 0..m.num_vertices() {
            let path = descending_path(&m, &f, v);
            assert_eq!(*path.last().unwrap(), f.vertex_at_rank(0));
            assert!(path.windows(2).all(|w| f.less(w[1], w[0])));
        }
    }

    #[test]
    fn saddle_loop_rejects_regular_vertex() {
        let m = icosahedron();
        let f = ScalarField::coordinate(&m, 2);
        let v = f.vertex_at_rank(5);
        assert!(matches!(
            saddle_loop(&m, &f, v, Direction::Down),
            Err(Error::SaddleLoop { .. })
        ));
    }
}
