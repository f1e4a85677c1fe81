//! Cutting a mesh along closed curves.
//!
//! Iso-curves run through edge interiors, so cutting along them first inserts a vertex on
//! every crossed edge, splits each crossed triangle into polygons and triangulates those.
//! Path loops run along existing edges and only need the edges to be unglued.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::{Level, ScalarField};
use crate::mesh::{edge_key, lerp, Point3, SurfaceType, TriMesh};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvePoint {
    /// Point on the edge `(u, v)` at parameter `t` from `u`. On iso-curves `u` is below the
    /// level and `v` above it.
    Edge {
        u: usize,
        v: usize,
        t: f64,
    },
    Vertex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    Iso { level: Level },
    PathLoop,
}

/// A closed curve on a mesh. The last point connects back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct CutCurve {
    pub kind: CurveKind,
    pub points: Vec<CurvePoint>,
    pub positions: Vec<Point3>,
}

impl CutCurve {
    pub fn iso(mesh: &TriMesh, level: Level, points: Vec<CurvePoint>) -> Self {
        let positions = points.iter().map(|p| point_position(mesh, p)).collect();
        CutCurve {
            kind: CurveKind::Iso { level },
            points,
            positions,
        }
    }

    pub fn path(mesh: &TriMesh, vertices: Vec<usize>) -> Self {
        let positions = vertices.iter().map(|&v| mesh.position(v)).collect();
        CutCurve {
            kind: CurveKind::PathLoop,
            points: vertices.into_iter().map(CurvePoint::Vertex).collect(),
            positions,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn level(&self) -> Option<Level> {
        match self.kind {
            CurveKind::Iso { level } => Some(level),
            CurveKind::PathLoop => None,
        }
    }

    /// Vertices of a path loop.
    pub fn vertices(&self) -> Vec<usize> {
        self.points
            .iter()
            .filter_map(|p| match p {
                CurvePoint::Vertex(v) => Some(*v),
                CurvePoint::Edge { .. } => None,
            })
            .collect()
    }

    /// Length of the closed polyline.
    pub fn length(&self) -> f64 {
        let n = self.positions.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.positions[i], self.positions[(i + 1) % n]);
                ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
            })
            .sum()
    }
}

fn point_position(mesh: &TriMesh, p: &CurvePoint) -> Point3 {
    match *p {
        CurvePoint::Edge { u, v, t } => lerp(mesh.position(u), mesh.position(v), t),
        CurvePoint::Vertex(v) => mesh.position(v),
    }
}

/// Which side of a curve a piece lies on. Iso-curves have a below and an above side; path
/// loops have a left side (faces traversing the loop edges in loop direction) and a right side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Below,
    Above,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexOrigin {
    Original(usize),
    /// Inserted on edge `(u, v)` of the source mesh by `curve`, at parameter `t` from `u`.
    OnEdge {
        u: usize,
        v: usize,
        curve: usize,
        t: f64,
    },
}

/// One connected piece of a cut mesh.
#[derive(Debug, Clone)]
pub struct CutPiece {
    pub mesh: TriMesh,
    /// The source field carried over; inserted vertices take the level value.
    pub field: ScalarField,
    pub vertex_origin: Vec<VertexOrigin>,
    /// Source face of every face.
    pub face_origin: Vec<usize>,
    /// For each loop of `mesh.boundary_components()`, the curve that produced it, if any.
    pub boundary_curves: Vec<Option<(usize, Side)>>,
    /// Sorted, deduplicated `(curve, side)` pairs bounding this piece.
    pub curve_sides: Vec<(usize, Side)>,
}

impl CutPiece {
    pub fn surface_type(&self) -> Result<SurfaceType> {
        self.mesh.validate()
    }

    pub fn original_vertex(&self, v: usize) -> Option<usize> {
        match self.vertex_origin[v] {
            VertexOrigin::Original(o) => Some(o),
            VertexOrigin::OnEdge { .. } => None,
        }
    }

    /// Indices of boundary loops not produced by any curve.
    pub fn source_boundary_loops(&self) -> Vec<usize> {
        (0..self.boundary_curves.len())
            .filter(|&i| self.boundary_curves[i].is_none())
            .collect()
    }
}

/// Unglues the mesh along the given edges. Returns the new mesh (same faces, in order) and
/// the source vertex of every new vertex.
pub fn split_along_edges(mesh: &TriMesh, cut: &[[usize; 2]]) -> Result<(TriMesh, Vec<usize>)> {
    let mut is_cut = vec![false; mesh.num_edges()];
    for &[u, v] in cut {
        let e = mesh.edge_id(u, v).ok_or(Error::NotAnEdge { u, v })?;
        is_cut[e] = true;
    }
    let tris = mesh.triangles();
    let corner = |f: usize, x: usize| 3 * f + tris[f].iter().position(|&y| y == x).unwrap();
    let mut uf = UnionFind::new(3 * tris.len());
    for (e, &[u, v]) in mesh.edges().iter().enumerate() {
        if is_cut[e] || mesh.edge_face_count(e) != 2 {
            continue;
        }
        let ef = mesh.edge_faces(e);
        let (f0, f1) = (ef[0], ef[1]);
        uf.union(corner(f0, u), corner(f1, u));
        uf.union(corner(f0, v), corner(f1, v));
    }
    let (labels, count) = uf.labels();
    let mut origin = vec![0usize; count];
    for (f, t) in tris.iter().enumerate() {
        for k in 0..3 {
            origin[labels[3 * f + k]] = t[k];
        }
    }
    let triangles = (0..tris.len())
        .map(|f| [labels[3 * f], labels[3 * f + 1], labels[3 * f + 2]])
        .collect();
    let positions = origin.iter().map(|&v| mesh.position(v)).collect();
    Ok((TriMesh::new(positions, triangles)?, origin))
}

/// Cuts along iso-curves of `field`.
pub fn cut_along_iso_curves(
    mesh: &TriMesh,
    field: &ScalarField,
    curves: &[CutCurve],
) -> Result<Vec<CutPiece>> {
    if curves.iter().any(|c| c.kind == CurveKind::PathLoop) {
        return Err(Error::InvalidCurve("expected iso-curves only".into()));
    }
    cut_along_curves(mesh, field, curves)
}

/// Cuts along a closed edge path. The result may have one or two pieces.
pub fn cut_along_path_loop(
    mesh: &TriMesh,
    field: &ScalarField,
    curve: &CutCurve,
) -> Result<Vec<CutPiece>> {
    if curve.kind != CurveKind::PathLoop {
        return Err(Error::InvalidCurve("expected a path loop".into()));
    }
    cut_along_curves(mesh, field, std::slice::from_ref(curve))
}

/// Polygon corner during triangle clipping: vertex id, symbolic height, and bitmask of the
/// source triangle sides it lies on.
#[derive(Debug, Clone, Copy)]
struct Corner {
    id: usize,
    h: u64,
    sides: u8,
}

struct Insertion {
    rank: usize,
    curve: usize,
    t: f64,
}

/// Cuts along any mix of disjoint iso-curves, or along disjoint path loops (not both).
pub fn cut_along_curves(
    mesh: &TriMesh,
    field: &ScalarField,
    curves: &[CutCurve],
) -> Result<Vec<CutPiece>> {
    let n = mesh.num_vertices();
    if field.len() != n {
        return Err(Error::FieldLength {
            expected: n,
            got: field.len(),
        });
    }
    let has_iso = curves.iter().any(|c| c.level().is_some());
    let has_path = curves.iter().any(|c| c.level().is_none());
    if has_iso && has_path {
        return Err(Error::InvalidCurve(
            "cannot mix iso-curves and path loops in one cut".into(),
        ));
    }

    let mut positions = mesh.positions().to_vec();
    let mut values = field.values().to_vec();
    let mut heights: Vec<u64> = (0..n).map(|v| 2 * field.rank(v) as u64).collect();
    let mut origin: Vec<VertexOrigin> = (0..n).map(VertexOrigin::Original).collect();

    let mut edge_inserts: HashMap<usize, Vec<Insertion>> = HashMap::new();
    let mut face_curves: HashMap<usize, Vec<usize>> = HashMap::new();
    // Intermediate edge key -> (curve, directed first vertex).
    let mut cut_edges: HashMap<u64, (usize, usize)> = HashMap::new();
    let mut cut_list: Vec<[usize; 2]> = Vec::new();

    for (c, curve) in curves.iter().enumerate() {
        let bad = |why: String| Error::InvalidCurve(format!("curve {c}: {why}"));
        if curve.points.len() < 3 {
            return Err(bad(format!("only {} points", curve.points.len())));
        }
        match curve.kind {
            CurveKind::Iso { level } => {
                let mut edges = Vec::with_capacity(curve.points.len());
                for p in &curve.points {
                    let CurvePoint::Edge { u, v, t } = *p else {
                        return Err(bad("iso-curve point on a vertex".into()));
                    };
                    let e = mesh.edge_id(u, v).ok_or(Error::NotAnEdge { u, v })?;
                    if !(level.is_below(field, u) && !level.is_below(field, v)) {
                        return Err(bad(format!(
                            "edge ({u},{v}) does not cross the level upward"
                        )));
                    }
                    let list = edge_inserts.entry(e).or_default();
                    if list.iter().any(|ins| ins.curve == c) {
                        return Err(bad(format!("crosses edge ({u},{v}) twice")));
                    }
                    list.push(Insertion {
                        rank: level.rank,
                        curve: c,
                        t,
                    });
                    edges.push(e);
                }
                let k = edges.len();
                for i in 0..k {
                    let (e1, e2) = (edges[i], edges[(i + 1) % k]);
                    let f = mesh
                        .edge_faces(e1)
                        .iter()
                        .copied()
                        .find(|f| mesh.edge_faces(e2).contains(f))
                        .ok_or_else(|| {
                            bad(format!(
                                "consecutive points {i} and {} share no face",
                                (i + 1) % k
                            ))
                        })?;
                    let list = face_curves.entry(f).or_default();
                    if list.contains(&c) {
                        return Err(bad(format!("passes face {f} twice")));
                    }
                    list.push(c);
                }
            }
            CurveKind::PathLoop => {
                let vs = curve.vertices();
                if vs.len() != curve.points.len() {
                    return Err(bad("path loop point inside an edge".into()));
                }
                let mut sorted = vs.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(bad("path loop is not simple".into()));
                }
                for i in 0..vs.len() {
                    let (a, b) = (vs[i], vs[(i + 1) % vs.len()]);
                    let e = mesh.edge_id(a, b).ok_or(Error::NotAnEdge { u: a, v: b })?;
                    if mesh.edge_face_count(e) != 2 {
                        return Err(bad(format!("edge ({a},{b}) is not interior")));
                    }
                    if cut_edges.insert(edge_key(a, b), (c, a)).is_some() {
                        return Err(bad(format!("edge ({a},{b}) used twice")));
                    }
                    cut_list.push([a, b]);
                }
            }
        }
    }

    // Inserted vertices, ordered along each edge by level.
    let mut inserted: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edge_ids: Vec<usize> = edge_inserts.keys().copied().collect();
    edge_ids.sort_unstable();
    for e in edge_ids {
        let list = edge_inserts.get_mut(&e).unwrap();
        list.sort_by_key(|ins| ins.rank);
        let [a, b] = mesh.edges()[e];
        let (u, v) = if field.less(a, b) { (a, b) } else { (b, a) };
        let mut last = 0.0f64;
        for ins in list.iter() {
            let t = if ins.t > last {
                ins.t
            } else {
                (last + 1e-9).min(1.0 - 1e-9)
            };
            last = t;
            let level = curves[ins.curve].level().unwrap();
            let id = positions.len();
            positions.push(lerp(mesh.position(u), mesh.position(v), t));
            values.push(level.value);
            heights.push(2 * level.rank as u64 + 1);
            origin.push(VertexOrigin::OnEdge {
                u,
                v,
                curve: ins.curve,
                t,
            });
            inserted.insert((e, ins.curve), id);
        }
    }

    let mut triangles: Vec<[usize; 3]> =
        Vec::with_capacity(mesh.num_faces() + 4 * face_curves.len());
    let mut face_origin: Vec<usize> = Vec::with_capacity(triangles.capacity());
    for (f, &t) in mesh.triangles().iter().enumerate() {
        let Some(list) = face_curves.get(&f) else {
            triangles.push(t);
            face_origin.push(f);
            continue;
        };
        let mut order = list.clone();
        order.sort_by_key(|&c| curves[c].level().unwrap().rank);
        let mut poly: Vec<Corner> = (0..3)
            .map(|k| Corner {
                id: t[k],
                h: heights[t[k]],
                sides: (1 << k) | (1 << ((k + 2) % 3)),
            })
            .collect();
        for c in order {
            let hc = 2 * curves[c].level().unwrap().rank as u64 + 1;
            let m = poly.len();
            let crossings: Vec<usize> = (0..m)
                .filter(|&i| (poly[i].h < hc) != (poly[(i + 1) % m].h < hc))
                .collect();
            if crossings.len() != 2 {
                return Err(Error::InvalidCurve(format!(
                    "curve {c}: face {f} is crossed {} times",
                    crossings.len()
                )));
            }
            let mut new_pts = [0usize; 2];
            let mut new_sides = [0u8; 2];
            for (j, &i) in crossings.iter().enumerate() {
                let common = poly[i].sides & poly[(i + 1) % m].sides;
                if common.count_ones() != 1 {
                    return Err(Error::InvalidCurve(format!(
                        "curve {c}: face {f} splits inconsistently"
                    )));
                }
                let k = common.trailing_zeros() as usize;
                let e = mesh.edge_id(t[k], t[(k + 1) % 3]).unwrap();
                new_pts[j] = *inserted.get(&(e, c)).ok_or_else(|| {
                    Error::InvalidCurve(format!(
                        "curve {c}: level crosses edge ({},{}) of face {f} but the curve does not",
                        t[k],
                        t[(k + 1) % 3]
                    ))
                })?;
                new_sides[j] = common;
            }
            // Walk the polygon with the two new corners spliced in.
            let mut below = Vec::new();
            let mut above = Vec::new();
            for i in 0..m {
                let cur = poly[i];
                if cur.h < hc {
                    below.push(cur);
                } else {
                    above.push(cur);
                }
                if let Some(j) = crossings.iter().position(|&x| x == i) {
                    let p = Corner {
                        id: new_pts[j],
                        h: hc,
                        sides: new_sides[j],
                    };
                    below.push(p);
                    above.push(p);
                }
            }
            triangulate(&below, f, &mut triangles, &mut face_origin)?;
            let (a, b) = (new_pts[0], new_pts[1]);
            cut_edges.insert(edge_key(a, b), (c, a));
            cut_list.push([a, b]);
            poly = above;
        }
        triangulate(&poly, f, &mut triangles, &mut face_origin)?;
    }

    let inter = TriMesh::new(positions, triangles)?;
    let (split, split_origin) = split_along_edges(&inter, &cut_list)?;

    let mut pieces = Vec::new();
    for sub in split.connected_components() {
        let inter_v: Vec<usize> = sub.vertex_map.iter().map(|&v| split_origin[v]).collect();
        let piece_values: Vec<f64> = inter_v.iter().map(|&v| values[v]).collect();
        let piece_keys: Vec<u64> = inter_v.iter().map(|&v| heights[v]).collect();
        let piece_field = ScalarField::with_keys(piece_values, &piece_keys)?;
        let boundary_curves: Vec<Option<(usize, Side)>> = sub
            .mesh
            .boundary_components()
            .iter()
            .map(|lp| {
                (0..lp.len()).find_map(|i| {
                    let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
                    let &(c, first) = cut_edges.get(&edge_key(inter_v[a], inter_v[b]))?;
                    let side = match curves[c].level() {
                        Some(level) => {
                            let e = sub.mesh.edge_id(a, b).unwrap();
                            let face = sub.mesh.triangle(sub.mesh.edge_faces(e)[0]);
                            let third = *face.iter().find(|&&x| x != a && x != b).unwrap();
                            if heights[inter_v[third]] < 2 * level.rank as u64 + 1 {
                                Side::Below
                            } else {
                                Side::Above
                            }
                        }
                        // Boundary loops follow their face, so the face runs a -> b.
                        None if inter_v[a] == first => Side::Left,
                        None => Side::Right,
                    };
                    Some((c, side))
                })
            })
            .collect();
        let mut curve_sides: Vec<(usize, Side)> =
            boundary_curves.iter().flatten().copied().collect();
        curve_sides.sort_unstable();
        curve_sides.dedup();
        pieces.push(CutPiece {
            vertex_origin: inter_v.iter().map(|&v| origin[v]).collect(),
            face_origin: sub.face_map.iter().map(|&f| face_origin[f]).collect(),
            field: piece_field,
            boundary_curves,
            curve_sides,
            mesh: sub.mesh,
        });
    }

    let total: i64 = pieces.iter().map(|p| p.mesh.euler_characteristic()).sum();
    if total != mesh.euler_characteristic() {
        return Err(Error::Validation(format!(
            "cut changed the Euler characteristic from {} to {total}",
            mesh.euler_characteristic()
        )));
    }
    Ok(pieces)
}

/// Ear clipping that never emits a triangle whose corners lie on one source side.
fn triangulate(
    poly: &[Corner],
    face: usize,
    out: &mut Vec<[usize; 3]>,
    face_origin: &mut Vec<usize>,
) -> Result<()> {
    let mut p = poly.to_vec();
    while p.len() > 3 {
        let m = p.len();
        let ear = (0..m)
            .find(|&i| p[(i + m - 1) % m].sides & p[i].sides & p[(i + 1) % m].sides == 0)
            .ok_or_else(|| {
                Error::InvalidCurve(format!("face {face}: degenerate clipped polygon"))
            })?;
        out.push([p[(ear + m - 1) % m].id, p[ear].id, p[(ear + 1) % m].id]);
        face_origin.push(face);
        p.remove(ear);
    }
    if p.len() == 3 {
        if p[0].sides & p[1].sides & p[2].sides != 0 {
            return Err(Error::InvalidCurve(format!(
                "face {face}: degenerate clipped polygon"
            )));
        }
        out.push([p[0].id, p[1].id, p[2].id]);
        face_origin.push(face);
    }
    Ok(())
}
