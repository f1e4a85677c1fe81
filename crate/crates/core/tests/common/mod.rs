#![allow(dead_code)]

use std::collections::HashMap;

use pantscut::field::harmonic::{
    solve_boundary_aware, solve_harmonic, BoundaryMode, DirichletConstraints, SolveOptions,
};
use pantscut::field::{Level, ScalarField};
use pantscut::{Point3, TriMesh};

pub fn harmonic(mesh: &TriMesh) -> ScalarField {
    let c = DirichletConstraints::default_for(mesh).unwrap();
    solve_harmonic(mesh, &c, SolveOptions::default()).unwrap()
}

/// Harmonic field for any surface: pinned extrema when closed, constant on boundary loops
/// otherwise.
pub fn boundary_field(mesh: &TriMesh) -> ScalarField {
    let mode = match mesh.boundary_components().len() {
        0 => return harmonic(mesh),
        1 => BoundaryMode::OneBoundary { p_max: None },
        _ => BoundaryMode::MultiBoundary { source: 0 },
    };
    solve_boundary_aware(mesh, mode, SolveOptions::default()).unwrap()
}

pub fn height(mesh: &TriMesh) -> ScalarField {
    ScalarField::coordinate(mesh, 2)
}

/// Open cylinder with `n` segments around and `m` rings, slightly sheared so heights are generic.
pub fn cylinder(n: usize, m: usize) -> TriMesh {
    let mut positions: Vec<Point3> = Vec::new();
    for k in 0..m {
        for a in 0..n {
            let u = std::f64::consts::TAU * a as f64 / n as f64;
            positions.push([
                u.cos(),
                u.sin(),
                k as f64 + 0.01 * u.cos() + 0.003 * a as f64 / n as f64,
            ]);
        }
    }
    let id = |k: usize, a: usize| k * n + a % n;
    let mut tris = Vec::new();
    for k in 0..m - 1 {
        for a in 0..n {
            tris.push([id(k, a), id(k, a + 1), id(k + 1, a + 1)]);
            tris.push([id(k, a), id(k + 1, a + 1), id(k + 1, a)]);
        }
    }
    TriMesh::new(positions, tris).unwrap()
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

fn union(p: &mut [usize], a: usize, b: usize) {
    let (a, b) = (find(p, a), find(p, b));
    if a != b {
        p[a] = b;
    }
}

/// `(genus, boundary loops, components)` from the raw triangle list.
pub fn brute_type(mesh: &TriMesh) -> (usize, usize, usize) {
    let tris = mesh.triangles();
    let n = mesh.num_vertices();
    let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
    for t in tris {
        for s in 0..3 {
            let (a, b) = (t[s], t[(s + 1) % 3]);
            *edge_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut comp: Vec<usize> = (0..n).collect();
    for t in tris {
        union(&mut comp, t[0], t[1]);
        union(&mut comp, t[1], t[2]);
    }
    let used: Vec<bool> = {
        let mut u = vec![false; n];
        tris.iter().flatten().for_each(|&v| u[v] = true);
        u
    };
    let components = (0..n)
        .filter(|&v| used[v] && find(&mut comp, v) == v)
        .count();
    let mut bnd: Vec<usize> = (0..n).collect();
    let mut on_boundary = vec![false; n];
    for (&(a, b), &c) in &edge_count {
        if c == 1 {
            union(&mut bnd, a, b);
            on_boundary[a] = true;
            on_boundary[b] = true;
        }
    }
    let b = (0..n)
        .filter(|&v| on_boundary[v] && find(&mut bnd, v) == v)
        .count();
    let chi =
        used.iter().filter(|&&u| u).count() as i64 - edge_count.len() as i64 + tris.len() as i64;
    let g2 = 2 * components as i64 - chi - b as i64;
    assert!(g2 >= 0 && g2 % 2 == 0, "inconsistent characteristic");
    ((g2 / 2) as usize, b, components)
}

/// Number of level-set components: crossing edges joined through the triangles they share.
pub fn brute_loop_count(mesh: &TriMesh, field: &ScalarField, level: Level) -> usize {
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut parent = Vec::new();
    let mut id_of = |a: usize, b: usize, parent: &mut Vec<usize>| {
        let key = (a.min(b), a.max(b));
        *ids.entry(key).or_insert_with(|| {
            parent.push(parent.len());
            parent.len() - 1
        })
    };
    for t in mesh.triangles() {
        let crossing: Vec<usize> = (0..3)
            .filter(|&s| level.crosses(field, t[s], t[(s + 1) % 3]))
            .map(|s| id_of(t[s], t[(s + 1) % 3], &mut parent))
            .collect();
        assert!(crossing.is_empty() || crossing.len() == 2);
        if crossing.len() == 2 {
            union(&mut parent, crossing[0], crossing[1]);
        }
    }
    (0..parent.len())
        .filter(|&i| find(&mut parent, i) == i)
        .count()
}
