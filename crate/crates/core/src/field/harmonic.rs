//! Harmonic fields from the mean-value Laplacian with Dirichlet constraints.
//!
//! The discrete Laplacian at `v_i` is `Σ_j w_ij (f(v_j) − f(v_i))` with mean-value weights
//! `w_ij = (tan(θ_ij/2) + tan(φ_ij/2)) / |v_j − v_i|`, where `θ_ij`, `φ_ij` are the angles at
//! `v_i` of the faces on either side of the edge. The weights are positive, so the solution
//! obeys a discrete maximum principle. The system is not symmetric; it is solved with a
//! sparse LU factorisation followed by iterative refinement against the row-normalised residual.

use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_2;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use log::{debug, warn};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::mesh::{dot, norm, sub, TriMesh};

/// Largest half-angle fed to `tan`; larger (obtuse) half-angles are clamped here.
pub const MAX_HALF_ANGLE: f64 = FRAC_PI_2 - 1e-6;
/// Smallest half-angle fed to `tan`, keeping weights strictly positive on needle triangles.
pub const MIN_HALF_ANGLE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Bound on `|Σ_j w_ij (f_j − f_i)| / Σ_j w_ij` at every unconstrained vertex.
    pub tol: f64,
    /// Iteration cap; `None` means `100 · V`.
    pub max_iter: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: None,
        }
    }
}

/// Prescribed values `f(v_i) = c_i` on a set of distinct vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletConstraints {
    pairs: Vec<(usize, f64)>,
}

impl DirichletConstraints {
    pub fn new(pairs: Vec<(usize, f64)>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::InvalidConstraints(format!(
                "need at least 2 constrained vertices, got {}",
                pairs.len()
            )));
        }
        let mut seen: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidConstraints(format!(
                "vertex {} constrained twice",
                w[0]
            )));
        }
        if let Some(&(v, _)) = pairs.iter().find(|p| !p.1.is_finite()) {
            return Err(Error::NonFiniteValue { vertex: v });
        }
        Ok(DirichletConstraints { pairs })
    }

    /// `v_min → 0`, `v_max → 1`.
    pub fn min_max(v_min: usize, v_max: usize) -> Result<Self> {
        Self::new(vec![(v_min, 0.0), (v_max, 1.0)])
    }

    /// Lowest and highest vertex by z coordinate (ties by index), valued 0 and 1.
    pub fn default_for(mesh: &TriMesh) -> Result<Self> {
        let z = ScalarField::coordinate(mesh, 2);
        let order = z.order();
        if order.len() < 2 {
            return Err(Error::InvalidConstraints(
                "mesh has fewer than 2 vertices".into(),
            ));
        }
        Self::min_max(order[0], order[order.len() - 1])
    }

    pub fn pairs(&self) -> &[(usize, f64)] {
        &self.pairs
    }

    /// Applies `c ↦ a·c + β`.
    pub fn affine(&self, a: f64, beta: f64) -> Self {
        DirichletConstraints {
            pairs: self.pairs.iter().map(|&(v, c)| (v, a * c + beta)).collect(),
        }
    }
}

fn corner_angle(mesh: &TriMesh, at: usize, a: usize, b: usize) -> Result<(f64, f64, f64)> {
    let p = mesh.position(at);
    let ea = sub(mesh.position(a), p);
    let eb = sub(mesh.position(b), p);
    let (la, lb) = (norm(ea), norm(eb));
    if la == 0.0 {
        return Err(Error::CoincidentVertices { u: at, v: a });
    }
    if lb == 0.0 {
        return Err(Error::CoincidentVertices { u: at, v: b });
    }
    let cross = [
        ea[1] * eb[2] - ea[2] * eb[1],
        ea[2] * eb[0] - ea[0] * eb[2],
        ea[0] * eb[1] - ea[1] * eb[0],
    ];
    let angle = norm(cross).atan2(dot(ea, eb));
    Ok((angle, la, lb))
}

fn half_tan(angle: f64, clamped: &mut usize) -> f64 {
    let half = 0.5 * angle;
    if !(MIN_HALF_ANGLE..=MAX_HALF_ANGLE).contains(&half) {
        *clamped += 1;
    }
    half.clamp(MIN_HALF_ANGLE, MAX_HALF_ANGLE).tan()
}

/// Mean-value weight of the directed edge `v_i → v_j`.
pub fn mean_value_weight(mesh: &TriMesh, i: usize, j: usize) -> Result<f64> {
    let e = mesh.edge_id(i, j).ok_or(Error::NotAnEdge { u: i, v: j })?;
    let len = norm(sub(mesh.position(j), mesh.position(i)));
    if len == 0.0 {
        return Err(Error::CoincidentVertices { u: i, v: j });
    }
    let mut clamped = 0;
    let mut sum = 0.0;
    for &f in mesh.edge_faces(e) {
        let t = mesh.triangle(f);
        let k = t
            .iter()
            .position(|&x| x != i && x != j)
            .expect("third vertex");
        let (angle, _, _) = corner_angle(mesh, i, j, t[k])?;
        sum += half_tan(angle, &mut clamped);
    }
    if clamped > 0 {
        warn!("mean-value weight ({i},{j}): clamped {clamped} half-angle(s)");
    }
    Ok(sum / len)
}

/// Row `i` of the weight matrix as sorted `(j, w_ij)`.
fn weight_rows(mesh: &TriMesh) -> Result<Vec<Vec<(usize, f64)>>> {
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); mesh.num_vertices()];
    let mut clamped = 0usize;
    for t in mesh.triangles() {
        for k in 0..3 {
            let (i, a, b) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let (angle, la, lb) = corner_angle(mesh, i, a, b)?;
            let h = half_tan(angle, &mut clamped);
            rows[i].push((a, h / la));
            rows[i].push((b, h / lb));
        }
    }
    if clamped > 0 {
        warn!("mean-value weights: clamped {clamped} half-angle(s)");
    }
    for row in &mut rows {
        row.sort_by_key(|p| p.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len() / 2 + 1);
        for &(j, w) in row.iter() {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += w,
                _ => merged.push((j, w)),
            }
        }
        *row = merged;
    }
    Ok(rows)
}

/// Solves `Δf = 0` on unconstrained vertices with `f(v_i) = c_i` on constrained ones.
pub fn solve_harmonic(
    mesh: &TriMesh,
    constraints: &DirichletConstraints,
    opts: SolveOptions,
) -> Result<ScalarField> {
    let n = mesh.num_vertices();
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    for &(v, c) in constraints.pairs() {
        if v >= n {
            return Err(Error::InvalidConstraints(format!(
                "constrained vertex {v} out of range (mesh has {n} vertices)"
            )));
        }
        fixed[v] = Some(c);
    }
    let max_iter = opts.max_iter.unwrap_or(100 * n).max(1);

    let rows = weight_rows(mesh)?;
    let mut unknown = vec![usize::MAX; n];
    let mut free = Vec::new();
    for v in 0..n {
        if fixed[v].is_none() {
            unknown[v] = free.len();
            free.push(v);
        }
    }
    let mut values: Vec<f64> = fixed.iter().map(|c| c.unwrap_or(0.0)).collect();
    if free.is_empty() {
        return ScalarField::new(values);
    }

    let m = free.len();
    let mut triplets = Vec::with_capacity(m * 7);
    let mut rhs = vec![0.0; m];
    let mut row_sums = vec![0.0; m];
    for (r, &v) in free.iter().enumerate() {
        let total: f64 = rows[v].iter().map(|p| p.1).sum();
        if !(total > 0.0) {
            return Err(Error::Solver(format!("vertex {v} has no positive weights")));
        }
        row_sums[r] = total;
        triplets.push(Triplet::new(r, r, 1.0));
        for &(j, w) in &rows[v] {
            match fixed[j] {
                Some(c) => rhs[r] += w * c / total,
                None => triplets.push(Triplet::new(r, unknown[j], -w / total)),
            }
        }
    }
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(m, m, &triplets)
        .map_err(|e| Error::Solver(format!("{e:?}")))?;
    let lu = a.sp_lu().map_err(|e| Error::Solver(format!("{e:?}")))?;

    let residual = |x: &[f64]| -> Vec<f64> {
        free.iter()
            .enumerate()
            .map(|(r, &v)| {
                let mut acc = rhs[r] - x[r];
                for &(j, w) in &rows[v] {
                    if fixed[j].is_none() {
                        acc += w * x[unknown[j]] / row_sums[r];
                    }
                }
                acc
            })
            .collect()
    };
    let max_abs = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let b = Col::<f64>::from_fn(m, |i| rhs[i]);
    let sol = lu.solve(&b);
    let mut x: Vec<f64> = (0..m).map(|i| sol[i]).collect();
    let mut res = residual(&x);
    let mut iterations = 1;
    while max_abs(&res) > opts.tol && iterations < max_iter.min(64) {
        let rc = Col::<f64>::from_fn(m, |i| res[i]);
        let dx = lu.solve(&rc);
        for i in 0..m {
            x[i] += dx[i];
        }
        res = residual(&x);
        iterations += 1;
    }
    let worst = max_abs(&res);
    if !worst.is_finite() || worst > opts.tol {
        return Err(Error::NonConvergence {
            residual: worst,
            iterations,
        });
    }
    debug!("harmonic solve: {m} unknowns, {iterations} iteration(s), residual {worst:e}");
    for (r, &v) in free.iter().enumerate() {
        values[v] = x[r];
    }
    ScalarField::new(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// The single boundary loop is fixed to 0 and `p_max` (default: the interior vertex
    /// farthest from the boundary in edge hops) to 1.
    OneBoundary { p_max: Option<usize> },
    /// Boundary loop `source` is fixed to 0 and every other loop to 1.
    MultiBoundary { source: usize },
}

/// Interior vertex with the largest hop distance to the boundary; ties go to the lower index.
pub fn farthest_interior_vertex(mesh: &TriMesh) -> Option<usize> {
    let n = mesh.num_vertices();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if mesh.is_boundary_vertex(v) {
            dist[v] = 0;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for w in mesh.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    (0..n)
        .filter(|&v| !mesh.is_boundary_vertex(v) && dist[v] != usize::MAX)
        .max_by(|&a, &b| dist[a].cmp(&dist[b]).then(b.cmp(&a)))
}

/// Harmonic field that is constant on each boundary loop, as required by the boundary variants
/// of the handle-based algorithm.
pub fn solve_boundary_aware(
    mesh: &TriMesh,
    mode: BoundaryMode,
    opts: SolveOptions,
) -> Result<ScalarField> {
    let loops = mesh.boundary_components();
    let mut pairs = Vec::new();
    match mode {
        BoundaryMode::OneBoundary { p_max } => {
            if loops.len() != 1 {
                return Err(Error::Precondition(format!(
                    "one-boundary field needs exactly 1 boundary loop, mesh has {}",
                    loops.len()
                )));
            }
            let top = match p_max {
                Some(v) => v,
                None => farthest_interior_vertex(mesh)
                    .ok_or_else(|| Error::Precondition("mesh has no interior vertex".into()))?,
            };
            if top >= mesh.num_vertices() || mesh.is_boundary_vertex(top) {
                return Err(Error::Precondition(format!(
                    "p_max {top} is not an interior vertex"
                )));
            }
            pairs.extend(loops[0].iter().map(|&v| (v, 0.0)));
            pairs.push((top, 1.0));
        }
        BoundaryMode::MultiBoundary { source } => {
            if loops.len() < 2 {
                return Err(Error::Precondition(format!(
                    "multi-boundary field needs at least 2 boundary loops, mesh has {}",
                    loops.len()
                )));
            }
            if source >= loops.len() {
                return Err(Error::Precondition(format!(
                    "source loop {source} out of range ({} loops)",
                    loops.len()
                )));
            }
            for (k, lp) in loops.iter().enumerate() {
                let c = if k == source { 0.0 } else { 1.0 };
                pairs.extend(lp.iter().map(|&v| (v, c)));
            }
        }
    }
    solve_harmonic(mesh, &DirichletConstraints::new(pairs)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Regular hexagonal fan: centre 0, unit spokes.
    fn hex_fan(closed: bool) -> TriMesh {
        let mut positions = vec![[0.0, 0.0, 0.0]];
        for k in 0..6 {
            let a = std::f64::consts::PI / 3.0 * k as f64;
            positions.push([a.cos(), a.sin(), 0.0]);
        }
        let count = if closed { 6 } else { 5 };
        let tris = (0..count).map(|k| [0, 1 + k, 1 + (k + 1) % 6]).collect();
        TriMesh::new(positions, tris).unwrap()
    }

    #[test]
    fn equilateral_weight() {
        let m = hex_fan(true);
        let w = mean_value_weight(&m, 0, 1).unwrap();
        assert!((w - 2.0 * (30f64.to_radians()).tan()).abs() < 1e-12);
        assert!((w - 1.1547005383792515).abs() < 1e-12);
    }

    #[test]
    fn boundary_edge_has_one_sided_weight() {
        let m = hex_fan(false);
        // Edge (0,1) now borders only the face (0,1,2).
        let w = mean_value_weight(&m, 0, 1).unwrap();
        assert!((w - 30f64.to_radians().tan()).abs() < 1e-12);
    }

    #[test]
    fn weight_errors() {
        let m = hex_fan(true);
        assert!(matches!(
            mean_value_weight(&m, 1, 4),
            Err(Error::NotAnEdge { .. })
        ));
        let mut p = m.positions().to_vec();
        p[1] = p[0];
        let degenerate = m.with_positions(p).unwrap();
        assert!(matches!(
            mean_value_weight(&degenerate, 0, 1),
            Err(Error::CoincidentVertices { .. })
        ));
    }

    /// Oracle: angles recomputed from law of cosines.
    fn oracle_weight(m: &TriMesh, i: usize, j: usize) -> f64 {
        let d = |a: usize, b: usize| norm(sub(m.position(a), m.position(b)));
        let e = m.edge_id(i, j).unwrap();
        let mut s = 0.0;
        for &f in m.edge_faces(e) {
            let t = m.triangle(f);
            let k = *t.iter().find(|&&x| x != i && x != j).unwrap();
            let (a, b, c) = (d(i, j), d(i, k), d(j, k));
            let cos = ((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0);
            s += (cos.acos() / 2.0).tan();
        }
        s / d(i, j)
    }

    #[test]
    fn random_one_rings_have_positive_weights() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let k = rng.random_range(3..9);
            let mut positions = vec![[0.0, 0.0, rng.random_range(-0.2..0.2)]];
            for s in 0..k {
                let a = std::f64::consts::TAU * (s as f64 + rng.random_range(0.1..0.9)) / k as f64;
                let r = rng.random_range(0.5..2.0);
                positions.push([r * a.cos(), r * a.sin(), rng.random_range(-0.3..0.3)]);
            }
            let tris = (0..k).map(|s| [0, 1 + s, 1 + (s + 1) % k]).collect();
            let m = TriMesh::new(positions, tris).unwrap();
            for j in 1..=k {
                let w = mean_value_weight(&m, 0, j).unwrap();
                assert!(w > 0.0);
                assert!((w - oracle_weight(&m, 0, j)).abs() < 1e-9 * w.max(1.0));
            }
        }
    }

    fn strip(n: usize) -> TriMesh {
        let mut positions = Vec::new();
        for i in 0..n {
            positions.push([i as f64, 0.0, 0.0]);
            positions.push([i as f64, 1.0, 0.0]);
        }
        let mut tris = Vec::new();
        for i in 0..n - 1 {
            let (a, b, c, d) = (2 * i, 2 * i + 2, 2 * i + 3, 2 * i + 1);
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
        TriMesh::new(positions, tris).unwrap()
    }

    #[test]
    fn strip_obeys_maximum_principle() {
        let m = strip(12);
        let c = DirichletConstraints::min_max(0, 2 * 11 + 1).unwrap();
        let f = solve_harmonic(&m, &c, SolveOptions::default()).unwrap();
        assert_eq!(f.value(0), 0.0);
        assert_eq!(f.value(23), 1.0);
        for v in 1..23 {
            assert!(
                f.value(v) > 0.0 && f.value(v) < 1.0,
                "v{v} = {}",
                f.value(v)
            );
        }
    }

    #[test]
    fn equal_constraints_give_constant_field() {
        let m = strip(6);
        let c = DirichletConstraints::new(vec![(0, 0.5), (11, 0.5)]).unwrap();
        let f = solve_harmonic(&m, &c, SolveOptions::default()).unwrap();
        for v in 0..m.num_vertices() {
            assert!((f.value(v) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn constraint_validation() {
        assert!(DirichletConstraints::new(vec![(0, 0.0)]).is_err());
        assert!(DirichletConstraints::new(vec![(0, 0.0), (0, 1.0)]).is_err());
        let m = strip(3);
        let c = DirichletConstraints::min_max(0, 99).unwrap();
        assert!(matches!(
            solve_harmonic(&m, &c, SolveOptions::default()),
            Err(Error::InvalidConstraints(_))
        ));
    }

    #[test]
    fn residual_bound_holds() {
        let m = strip(20);
        let c = DirichletConstraints::min_max(3, 30).unwrap();
        let f = solve_harmonic(&m, &c, SolveOptions::default()).unwrap();
        for v in 0..m.num_vertices() {
            if v == 3 || v == 30 {
                continue;
            }
            let mut lap = 0.0;
            let mut total = 0.0;
            for w in m.neighbors(v) {
                let wt = mean_value_weight(&m, v, w).unwrap();
                lap += wt * (f.value(w) - f.value(v));
                total += wt;
            }
            assert!(lap.abs() <= 1e-10 * total);
        }
    }
}
