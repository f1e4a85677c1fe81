//! Indexed triangle meshes, topology queries and validation.

pub mod cut;
pub mod io;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::union_find::UnionFind;

pub use cut::{
    cut_along_iso_curves, cut_along_path_loop, split_along_edges, CurveKind, CurvePoint, CutCurve,
    CutPiece, Side, VertexOrigin,
};

pub type Point3 = [f64; 3];

/// Topological type `(g, b)` of a compact connected orientable surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceType {
    pub genus: usize,
    pub boundary_count: usize,
    pub euler_characteristic: i64,
}

impl SurfaceType {
    pub const PANTS: SurfaceType = SurfaceType {
        genus: 0,
        boundary_count: 3,
        euler_characteristic: -1,
    };

    pub fn new(genus: usize, boundary_count: usize) -> Self {
        SurfaceType {
            genus,
            boundary_count,
            euler_characteristic: 2 - 2 * genus as i64 - boundary_count as i64,
        }
    }

    /// Recovers the genus from `χ = 2 − 2g − b`; `None` if that has no non-negative integer solution.
    pub fn from_euler(euler_characteristic: i64, boundary_count: usize) -> Option<Self> {
        let twice_genus = 2 - euler_characteristic - boundary_count as i64;
        if twice_genus < 0 || twice_genus % 2 != 0 {
            return None;
        }
        Some(SurfaceType {
            genus: (twice_genus / 2) as usize,
            boundary_count,
            euler_characteristic,
        })
    }

    pub fn is_pants(&self) -> bool {
        self.genus == 0 && self.boundary_count == 3
    }

    pub fn is_cylinder(&self) -> bool {
        self.genus == 0 && self.boundary_count == 2
    }

    /// `2g − 2 + b`, the number of pants in any pants decomposition.
    pub fn pants_count(&self) -> usize {
        (-self.euler_characteristic).max(0) as usize
    }

    /// `3g − 3 + b`, the number of curves in any pants decomposition.
    pub fn curve_count(&self) -> usize {
        (3 * self.genus + self.boundary_count).saturating_sub(3)
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(g={}, b={}, chi={})",
            self.genus, self.boundary_count, self.euler_characteristic
        )
    }
}

/// Ordered neighbours of a vertex, counter-clockwise with respect to the face orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    pub ring: Vec<usize>,
    /// Closed fans belong to interior vertices; open fans start and end on the boundary.
    pub closed: bool,
}

#[derive(Debug, Clone, Copy)]
struct EdgeFaces {
    faces: [usize; 2],
    count: u32,
}

/// Indexed triangle mesh with edge table and vertex-face incidence.
///
/// Immutable after construction; every cutting operation returns new meshes.
#[derive(Debug, Clone)]
pub struct TriMesh {
    positions: Vec<Point3>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_lookup: HashMap<u64, usize>,
    edge_faces: Vec<EdgeFaces>,
    vertex_face_offsets: Vec<usize>,
    vertex_face_data: Vec<usize>,
    boundary_vertex: Vec<bool>,
}

#[inline]
pub(crate) fn edge_key(u: usize, v: usize) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    ((a as u64) << 32) | b as u64
}

/// A connected component extracted from a larger mesh.
#[derive(Debug, Clone)]
pub struct SubMesh {
    pub mesh: TriMesh,
    /// Parent vertex of every vertex in `mesh`.
    pub vertex_map: Vec<usize>,
    /// Parent face of every face in `mesh`.
    pub face_map: Vec<usize>,
}

impl TriMesh {
    pub fn new(positions: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let n = positions.len();
        for (f, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= n {
                    return Err(Error::IndexOutOfRange {
                        face: f,
                        vertex: v,
                        count: n,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                let vertex = if tri[0] == tri[1] || tri[0] == tri[2] {
                    tri[0]
                } else {
                    tri[1]
                };
                return Err(Error::DegenerateFace { face: f, vertex });
            }
        }

        let mut edges = Vec::with_capacity(triangles.len() * 3 / 2 + 3);
        let mut edge_lookup = HashMap::with_capacity(triangles.len() * 3 / 2 + 3);
        let mut edge_faces: Vec<EdgeFaces> = Vec::with_capacity(edges.capacity());
        for (f, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                let id = *edge_lookup.entry(edge_key(u, v)).or_insert_with(|| {
                    edges.push([u.min(v), u.max(v)]);
                    edge_faces.push(EdgeFaces {
                        faces: [usize::MAX; 2],
                        count: 0,
                    });
                    edges.len() - 1
                });
                let entry = &mut edge_faces[id];
                if (entry.count as usize) < 2 {
                    entry.faces[entry.count as usize] = f;
                }
                entry.count += 1;
            }
        }

        let mut counts = vec![0usize; n + 1];
        for tri in &triangles {
            for &v in tri {
                counts[v + 1] += 1;
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let mut data = vec![0usize; offsets[n]];
        for (f, tri) in triangles.iter().enumerate() {
            for &v in tri {
                data[cursor[v]] = f;
                cursor[v] += 1;
            }
        }

        let mut boundary_vertex = vec![false; n];
        for (e, ef) in edge_faces.iter().enumerate() {
            if ef.count == 1 {
                boundary_vertex[edges[e][0]] = true;
                boundary_vertex[edges[e][1]] = true;
            }
        }

        Ok(TriMesh {
            positions,
            triangles,
            edges,
            edge_lookup,
            edge_faces,
            vertex_face_offsets: offsets,
            vertex_face_data: data,
            boundary_vertex,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.triangles.len()
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> Point3 {
        self.positions[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, f: usize) -> [usize; 3] {
        self.triangles[f]
    }

    /// Edges as sorted vertex pairs.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_lookup.get(&edge_key(u, v)).copied()
    }

    /// Faces incident to an edge (at most two are stored).
    pub fn edge_faces(&self, e: usize) -> &[usize] {
        let ef = &self.edge_faces[e];
        &ef.faces[..(ef.count as usize).min(2)]
    }

    pub fn edge_face_count(&self, e: usize) -> usize {
        self.edge_faces[e].count as usize
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_faces[e].count == 1
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary_vertex.iter().any(|&b| b)
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_face_data[self.vertex_face_offsets[v]..self.vertex_face_offsets[v + 1]]
    }

    /// Link edges `a → b` of every face around `v`, following the face orientation.
    fn link_edges(&self, v: usize) -> Vec<(usize, usize)> {
        self.vertex_faces(v)
            .iter()
            .map(|&f| {
                let t = self.triangles[f];
                let k = t.iter().position(|&x| x == v).expect("incident face");
                (t[(k + 1) % 3], t[(k + 2) % 3])
            })
            .collect()
    }

    /// All fans around `v`. A manifold vertex has exactly one.
    pub fn fans(&self, v: usize) -> Vec<Fan> {
        let links = self.link_edges(v);
        let mut next: HashMap<usize, usize> = HashMap::with_capacity(links.len());
        let mut has_pred: HashMap<usize, bool> = HashMap::with_capacity(links.len());
        for &(a, b) in &links {
            next.insert(a, b);
            has_pred.insert(b, true);
        }
        let mut visited: HashMap<usize, bool> = HashMap::new();
        let mut fans = Vec::new();
        let mut starts: Vec<usize> = links
            .iter()
            .map(|&(a, _)| a)
            .filter(|a| !has_pred.contains_key(a))
            .collect();
        starts.sort_unstable();
        starts.dedup();
        for s in starts {
            let mut ring = vec![s];
            visited.insert(s, true);
            let mut cur = s;
            while let Some(&n) = next.get(&cur) {
                if visited.contains_key(&n) {
                    break;
                }
                visited.insert(n, true);
                ring.push(n);
                cur = n;
            }
            fans.push(Fan {
                ring,
                closed: false,
            });
        }
        let mut rest: Vec<usize> = links.iter().map(|&(a, _)| a).collect();
        rest.sort_unstable();
        rest.dedup();
        for s in rest {
            if visited.contains_key(&s) {
                continue;
            }
            let mut ring = vec![s];
            visited.insert(s, true);
            let mut cur = s;
            while let Some(&n) = next.get(&cur) {
                if n == s || visited.contains_key(&n) {
                    break;
                }
                visited.insert(n, true);
                ring.push(n);
                cur = n;
            }
            fans.push(Fan { ring, closed: true });
        }
        fans
    }

    /// The one-ring fan of a manifold vertex.
    pub fn one_ring(&self, v: usize) -> Fan {
        self.fans(v).into_iter().next().unwrap_or(Fan {
            ring: Vec::new(),
            closed: false,
        })
    }

    /// Unordered neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .vertex_faces(v)
            .iter()
            .flat_map(|&f| self.triangles[f])
            .filter(|&w| w != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    /// Closed boundary loops, each oriented like its incident faces and starting at its
    /// smallest vertex; loops are sorted by that vertex.
    pub fn boundary_components(&self) -> Vec<Vec<usize>> {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for (e, ef) in self.edge_faces.iter().enumerate() {
            if ef.count != 1 {
                continue;
            }
            let t = self.triangles[ef.faces[0]];
            let [a, b] = self.edges[e];
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                if (u, v) == (a, b) || (u, v) == (b, a) {
                    next.insert(u, v);
                }
            }
        }
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut seen = vec![false; self.num_vertices()];
        let mut loops = Vec::new();
        for s in starts {
            if seen[s] {
                continue;
            }
            let mut lp = vec![s];
            seen[s] = true;
            let mut cur = s;
            while let Some(&n) = next.get(&cur) {
                if n == s || seen[n] {
                    break;
                }
                seen[n] = true;
                lp.push(n);
                cur = n;
            }
            loops.push(lp);
        }
        loops
    }

    /// Checks manifoldness, orientability and connectedness and returns the surface type.
    pub fn validate(&self) -> Result<SurfaceType> {
        if self.triangles.is_empty() {
            return Err(Error::EmptyMesh);
        }
        for (e, ef) in self.edge_faces.iter().enumerate() {
            let [u, v] = self.edges[e];
            if ef.count > 2 {
                return Err(Error::NonManifoldEdge {
                    u,
                    v,
                    faces: ef.count as usize,
                });
            }
            if ef.count == 2 {
                let d0 = self.directed(ef.faces[0], u, v);
                let d1 = self.directed(ef.faces[1], u, v);
                if d0 == d1 {
                    return Err(Error::NonOrientable { u, v });
                }
            }
        }
        for v in 0..self.num_vertices() {
            if self.vertex_faces(v).is_empty() {
                return Err(Error::IsolatedVertex { vertex: v });
            }
            let fans = self.fans(v);
            let covered: usize = fans
                .iter()
                .map(|f| {
                    if f.closed {
                        f.ring.len()
                    } else {
                        f.ring.len() - 1
                    }
                })
                .sum();
            if fans.len() != 1 || covered != self.vertex_faces(v).len() {
                return Err(Error::NonManifoldVertex {
                    vertex: v,
                    fans: fans.len().max(2),
                });
            }
        }
        let (labels, count) = self.face_components();
        if count > 1 {
            let face = labels.iter().position(|&l| l != labels[0]).unwrap_or(0);
            return Err(Error::Disconnected {
                components: count,
                face,
            });
        }
        let chi = self.euler_characteristic();
        let b = self.boundary_components().len();
        SurfaceType::from_euler(chi, b).ok_or_else(|| {
            Error::Validation(format!(
                "χ = {chi} with {b} boundary loops has no integral genus"
            ))
        })
    }

    /// True if face `f` traverses `u → v` (as opposed to `v → u`).
    fn directed(&self, f: usize, u: usize, v: usize) -> bool {
        let t = self.triangles[f];
        (0..3).any(|k| t[k] == u && t[(k + 1) % 3] == v)
    }

    /// Labels faces by edge-connected component.
    pub fn face_components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.num_faces());
        for ef in &self.edge_faces {
            if ef.count >= 2 {
                uf.union(ef.faces[0], ef.faces[1]);
            }
        }
        uf.labels()
    }

    /// Splits into edge-connected components; vertices are renumbered in order of first use.
    pub fn connected_components(&self) -> Vec<SubMesh> {
        let (labels, count) = self.face_components();
        let mut face_lists: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (f, &l) in labels.iter().enumerate() {
            face_lists[l].push(f);
        }
        face_lists
            .into_iter()
            .map(|faces| self.extract_faces(&faces))
            .collect()
    }

    /// Builds the sub-mesh spanned by the given faces.
    pub fn extract_faces(&self, faces: &[usize]) -> SubMesh {
        let mut local = HashMap::new();
        let mut vertex_map = Vec::new();
        let mut triangles = Vec::with_capacity(faces.len());
        for &f in faces {
            let t = self.triangles[f];
            let mut nt = [0usize; 3];
            for k in 0..3 {
                nt[k] = *local.entry(t[k]).or_insert_with(|| {
                    vertex_map.push(t[k]);
                    vertex_map.len() - 1
                });
            }
            triangles.push(nt);
        }
        let positions = vertex_map.iter().map(|&v| self.positions[v]).collect();
        let mesh = TriMesh::new(positions, triangles).expect("sub-mesh of a valid mesh");
        SubMesh {
            mesh,
            vertex_map,
            face_map: faces.to_vec(),
        }
    }

    /// Axis-aligned bounding box diagonal length.
    pub fn bbox_diagonal(&self) -> f64 {
        if self.positions.is_empty() {
            return 0.0;
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.positions {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2) + (hi[2] - lo[2]).powi(2)).sqrt()
    }

    /// Same connectivity with new vertex positions.
    pub fn with_positions(&self, positions: Vec<Point3>) -> Result<TriMesh> {
        if positions.len() != self.num_vertices() {
            return Err(Error::InvalidArgument(format!(
                "expected {} positions, got {}",
                self.num_vertices(),
                positions.len()
            )));
        }
        let mut m = self.clone();
        m.positions = positions;
        Ok(m)
    }

    /// Concatenates meshes into one (disconnected) mesh.
    pub fn disjoint_union<'a>(meshes: impl IntoIterator<Item = &'a TriMesh>) -> Result<TriMesh> {
        let mut positions = Vec::new();
        let mut triangles = Vec::new();
        for m in meshes {
            let base = positions.len();
            positions.extend_from_slice(&m.positions);
            triangles.extend(
                m.triangles
                    .iter()
                    .map(|t| [t[0] + base, t[1] + base, t[2] + base]),
            );
        }
        TriMesh::new(positions, triangles)
    }
}

pub(crate) fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn lerp(a: Point3, b: Point3, t: f64) -> Point3 {
    [
        (1.0 - t) * a[0] + t * b[0],
        (1.0 - t) * a[1] + t * b[1],
        (1.0 - t) * a[2] + t * b[2],
    ]
}
