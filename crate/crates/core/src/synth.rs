//! Synthetic test surfaces.
//!
//! Most shapes are boundaries of layered solids on a triangular lattice: layer `k` is a set of
//! lattice cells extruded between heights `k` and `k + 1`. Horizontal faces come from the
//! symmetric difference of neighbouring layers and walls from the boundary edges of each layer.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::mesh::{Point3, TriMesh};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Lattice triangle: `(i, j, up)`.
pub type Cell = (i32, i32, bool);

fn cell_vertices((i, j, up): Cell) -> [(i32, i32); 3] {
    if up {
        [(i, j), (i + 1, j), (i, j + 1)]
    } else {
        [(i + 1, j), (i + 1, j + 1), (i, j + 1)]
    }
}

/// Hexagonal lattice distance.
pub fn hex_distance(a: (i32, i32), b: (i32, i32)) -> i32 {
    let (di, dj) = (a.0 - b.0, a.1 - b.1);
    (di.abs() + dj.abs() + (di + dj).abs()) / 2
}

/// All cells in `[-extent, extent]²` whose three corners satisfy `pred`.
fn cells_where(extent: i32, pred: impl Fn((i32, i32)) -> bool) -> Vec<Cell> {
    let mut out = Vec::new();
    for j in -extent..=extent {
        for i in -extent..=extent {
            for up in [true, false] {
                let c = (i, j, up);
                if cell_vertices(c).iter().all(|&v| pred(v)) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Cells of the lattice hexagon of the given radius around `centre`.
pub fn hexagon(centre: (i32, i32), radius: i32) -> Vec<Cell> {
    let ext = radius + centre.0.abs().max(centre.1.abs()) + 1;
    cells_where(ext, |v| hex_distance(v, centre) <= radius)
}

/// Boundary surface of a layered solid. `open` lists horizontal faces `(height, cell)` to leave
/// out, which opens boundary loops. Vertices sit at `(x, y, height)` in lattice coordinates.
pub fn layered_solid(layers: &[Vec<Cell>], open: &[(usize, Cell)]) -> Result<TriMesh> {
    let sets: Vec<HashSet<Cell>> = layers.iter().map(|l| l.iter().copied().collect()).collect();
    let open: HashSet<(usize, Cell)> = open.iter().copied().collect();
    let empty = HashSet::new();
    let mut ids: HashMap<(i32, i32, usize), usize> = HashMap::new();
    let mut positions: Vec<Point3> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut vid = |v: (i32, i32), h: usize, positions: &mut Vec<Point3>| -> usize {
        *ids.entry((v.0, v.1, h)).or_insert_with(|| {
            positions.push([
                v.0 as f64 + 0.5 * v.1 as f64,
                SQRT3_2 * v.1 as f64,
                h as f64,
            ]);
            positions.len() - 1
        })
    };

    for h in 0..=sets.len() {
        let below = if h == 0 { &empty } else { &sets[h - 1] };
        let above = sets.get(h).unwrap_or(&empty);
        let mut cells: Vec<Cell> = below.symmetric_difference(above).copied().collect();
        cells.sort_unstable();
        for c in cells {
            if open.contains(&(h, c)) {
                continue;
            }
            let [a, b, d] = cell_vertices(c);
            let (a, b, d) = (
                vid(a, h, &mut positions),
                vid(b, h, &mut positions),
                vid(d, h, &mut positions),
            );
            if below.contains(&c) {
                triangles.push([a, b, d]);
            } else {
                triangles.push([a, d, b]);
            }
        }
    }
    for (k, set) in sets.iter().enumerate() {
        let mut count: HashMap<((i32, i32), (i32, i32)), usize> = HashMap::new();
        let mut directed = Vec::new();
        let mut cells: Vec<Cell> = set.iter().copied().collect();
        cells.sort_unstable();
        for c in cells {
            let v = cell_vertices(c);
            for s in 0..3 {
                let (a, b) = (v[s], v[(s + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
                directed.push((a, b));
            }
        }
        for (a, b) in directed {
            if count[&(a.min(b), a.max(b))] != 1 {
                continue;
            }
            let a0 = vid(a, k, &mut positions);
            let b0 = vid(b, k, &mut positions);
            let a1 = vid(a, k + 1, &mut positions);
            let b1 = vid(b, k + 1, &mut positions);
            triangles.push([a0, b0, b1]);
            triangles.push([a0, b1, a1]);
        }
    }
    TriMesh::new(positions, triangles)
}

/// Small fixed rotation that breaks the symmetries of lattice shapes.
fn generic_rotation(p: Point3) -> Point3 {
    let (a, b, c) = (0.0131f64, 0.0213f64, 0.0172f64);
    let rot = |p: Point3, (i, j): (usize, usize), t: f64| {
        let mut q = p;
        q[i] = t.cos() * p[i] - t.sin() * p[j];
        q[j] = t.sin() * p[i] + t.cos() * p[j];
        q
    };
    rot(rot(rot(p, (0, 1), a), (1, 2), b), (0, 2), c)
}

/// Size parameters for [`plate`] at a given resolution.
#[derive(Debug, Clone, Copy)]
struct PlateDims {
    r: i32,
    m: i32,
    h: i32,
    w: i32,
}

fn plate_dims(slots: usize, res: usize) -> PlateDims {
    let r = (res as i32 / 6).max(2);
    let m = r.max(2);
    let h = r + m;
    let span = slots.max(1) as i32 * (2 * r + m) + m;
    PlateDims {
        r,
        m,
        h,
        w: span / 2 + h + 1,
    }
}

fn slot_centres(slots: usize, d: PlateDims) -> Vec<(i32, i32)> {
    let pitch = 2 * d.r + d.m;
    let first = -((slots as i32 - 1) * pitch) / 2;
    (0..slots as i32).map(|k| (first + k * pitch, 0)).collect()
}

/// A thick plate with `genus` holes and `boundaries` disks removed from its top face, stretched
/// along the height axis. With no holes and no boundaries it is a sphere. Larger `res` gives a finer mesh (vertex count grows as `res²`).
pub fn plate(genus: usize, boundaries: usize, res: usize) -> Result<TriMesh> {
    let slots = genus + boundaries;
    let d = plate_dims(slots, res);
    let centres = slot_centres(slots, d);
    let (holes, disks) = centres.split_at(genus);
    let inside = |v: (i32, i32)| v.0.abs() <= d.w && v.1.abs() <= d.h && (v.0 + v.1).abs() <= d.w;
    let domain: Vec<Cell> = cells_where(d.w + d.h + 1, |v| {
        inside(v) && holes.iter().all(|&c| hex_distance(v, c) >= d.r)
    });
    let mut open = Vec::new();
    for &c in disks {
        open.extend(hexagon(c, d.r).into_iter().map(|cell| (1, cell)));
    }
    let raw = layered_solid(&[domain], &open)?;
    // Lattice x becomes the height axis.
    let positions = raw
        .positions()
        .iter()
        .map(|p| generic_rotation([p[1], p[2], p[0]]))
        .collect();
    raw.with_positions(positions)
}

/// Upright torus with `n` major and `m` minor segments, tilted slightly so its height field is
/// generic.
pub fn torus(n: usize, m: usize, major: f64, minor: f64) -> Result<TriMesh> {
    if n < 3 || m < 3 {
        return Err(Error::InvalidArgument(
            "torus needs at least 3x3 segments".into(),
        ));
    }
    let mut positions = Vec::with_capacity(n * m);
    for a in 0..n {
        let u = std::f64::consts::TAU * a as f64 / n as f64;
        for b in 0..m {
            let v = std::f64::consts::TAU * b as f64 / m as f64;
            let rr = major + minor * v.cos();
            // Axis of revolution along y, so the ring stands upright in z.
            positions.push(generic_rotation([
                rr * u.cos(),
                minor * v.sin(),
                rr * u.sin(),
            ]));
        }
    }
    let id = |a: usize, b: usize| (a % n) * m + (b % m);
    let mut triangles = Vec::with_capacity(2 * n * m);
    for a in 0..n {
        for b in 0..m {
            let (p, q, r, s) = (id(a, b), id(a + 1, b), id(a + 1, b + 1), id(a, b + 1));
            triangles.push([p, r, q]);
            triangles.push([p, s, r]);
        }
    }
    TriMesh::new(positions, triangles)
}

/// A genus-2 solid made of two hexagonal slabs joined by three pillars, exactly symmetric under
/// rotation by a third of a turn. Returns the mesh and the centres of its bottom and top faces.
///
/// The harmonic field pinned to 0 and 1 at those centres has two monkey saddles.
pub fn tripod(scale: usize) -> Result<(TriMesh, usize, usize)> {
    let s = scale.max(1) as i32;
    let (rp, d, big) = (2 * s, 5 * s, 9 * s);
    let slab = hexagon((0, 0), big);
    let mut pillars = Vec::new();
    for c in [(d, 0), (-d, d), (0, -d)] {
        pillars.extend(hexagon(c, rp));
    }
    let mesh = layered_solid(&[slab.clone(), pillars, slab], &[])?;
    let find = |z: f64| {
        mesh.positions()
            .iter()
            .position(|p| p[0] == 0.0 && p[1] == 0.0 && p[2] == z)
            .expect("slab centre vertex")
    };
    let (bottom, top) = (find(0.0), find(3.0));
    Ok((mesh, bottom, top))
}
