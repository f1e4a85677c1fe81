//! Reeb graphs of PL fields and the skeleton used to place cuts.
//!
//! Nodes are the interior critical points plus the boundary loops (which must each carry a
//! constant value). Between consecutive nodes in rank order lies a slab; within a slab the
//! level sets do not change topology. Pieces `(triangle, slab)` are grouped into slab
//! components through shared edges, and slab components are chained across a node unless they
//! touch it. Each resulting chain is one arc.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::field::{Level, ScalarField};
use crate::mesh::{CutCurve, TriMesh};
use crate::morse::{critical_points, trace_loop, CriticalKind};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Critical(CriticalKind),
    /// Boundary loop `component` of `mesh.boundary_components()`.
    Boundary {
        component: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReebNode {
    pub kind: NodeKind,
    /// The critical vertex, or the first vertex of the boundary loop.
    pub vertex: usize,
    /// Rank block `[lo, hi]` occupied by the node.
    pub lo: usize,
    pub hi: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReebArc {
    pub lower: usize,
    pub upper: usize,
    /// Slab component of the arc in each slab from `lower` up to `upper − 1`.
    components: Vec<usize>,
}

impl ReebArc {
    /// First and one-past-last level rank of the arc: levels `a..b` cut through it.
    pub fn rank_span(&self, graph: &ReebGraph) -> (usize, usize) {
        (graph.nodes[self.lower].hi, graph.nodes[self.upper].lo)
    }
}

#[derive(Debug, Clone)]
pub struct ReebGraph {
    pub nodes: Vec<ReebNode>,
    pub arcs: Vec<ReebArc>,
    /// Faces of every slab component.
    component_faces: Vec<Vec<usize>>,
}

impl ReebGraph {
    pub fn build(mesh: &TriMesh, field: &ScalarField) -> Result<Self> {
        let report = critical_points(mesh, field)?;
        let n = mesh.num_vertices();
        let mut nodes: Vec<ReebNode> = report
            .points
            .iter()
            .map(|p| ReebNode {
                kind: NodeKind::Critical(p.kind),
                vertex: p.vertex,
                lo: p.rank,
                hi: p.rank,
                value: p.value,
            })
            .collect();
        let loops = mesh.boundary_components();
        for (c, lp) in loops.iter().enumerate() {
            let value = field.value(lp[0]);
            if lp.iter().any(|&v| field.value(v) != value) {
                return Err(Error::BoundaryNotConstant { component: c });
            }
            let lo = lp.iter().map(|&v| field.rank(v)).min().unwrap();
            let hi = lp.iter().map(|&v| field.rank(v)).max().unwrap();
            if hi - lo + 1 != lp.len() {
                return Err(Error::BoundaryNotConstant { component: c });
            }
            nodes.push(ReebNode {
                kind: NodeKind::Boundary { component: c },
                vertex: lp[0],
                lo,
                hi,
                value,
            });
        }
        nodes.sort_by_key(|nd| nd.lo);
        if nodes.len() < 2 {
            return Err(Error::Reeb(format!("only {} node(s)", nodes.len())));
        }
        let mut node_of_vertex = vec![usize::MAX; n];
        for (k, nd) in nodes.iter().enumerate() {
            match nd.kind {
                NodeKind::Critical(_) => node_of_vertex[nd.vertex] = k,
                NodeKind::Boundary { component } => {
                    for &v in &loops[component] {
                        node_of_vertex[v] = k;
                    }
                }
            }
        }

        // Slab s holds the levels a[s]..b[s].
        let slabs = nodes.len() - 1;
        let a: Vec<usize> = (0..slabs).map(|s| nodes[s].hi).collect();
        let b: Vec<usize> = (0..slabs).map(|s| nodes[s + 1].lo).collect();
        // Slabs overlapping the levels lo..hi (hi exclusive).
        let slab_range = |lo: usize, hi: usize| -> (usize, usize) {
            let first = b.partition_point(|&x| x <= lo);
            let end = a.partition_point(|&x| x < hi);
            (first, end.max(first))
        };

        let faces = mesh.triangles();
        let mut first_slab = Vec::with_capacity(faces.len());
        let mut offset = Vec::with_capacity(faces.len() + 1);
        offset.push(0usize);
        for t in faces {
            let r = t.map(|v| field.rank(v));
            let (s0, s1) = slab_range(*r.iter().min().unwrap(), *r.iter().max().unwrap());
            first_slab.push(s0);
            offset.push(offset.last().unwrap() + (s1 - s0));
        }
        let piece = |f: usize, s: usize| offset[f] + s - first_slab[f];
        let total = *offset.last().unwrap();

        let mut uf = UnionFind::new(total);
        for (e, &[u, v]) in mesh.edges().iter().enumerate() {
            if mesh.edge_face_count(e) != 2 {
                continue;
            }
            let (ru, rv) = (field.rank(u), field.rank(v));
            let (s0, s1) = slab_range(ru.min(rv), ru.max(rv));
            let ef = mesh.edge_faces(e);
            for s in s0..s1 {
                uf.union(piece(ef[0], s), piece(ef[1], s));
            }
        }
        let (labels, ncomp) = uf.labels();
        let mut comp_slab = vec![0usize; ncomp];
        let mut comp_faces: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
        let mut touches_upper = vec![false; ncomp];
        for f in 0..faces.len() {
            for p in offset[f]..offset[f + 1] {
                let s = first_slab[f] + p - offset[f];
                let c = labels[p];
                comp_slab[c] = s;
                comp_faces[c].push(f);
                if faces[f].iter().any(|&v| node_of_vertex[v] == s + 1) {
                    touches_upper[c] = true;
                }
            }
        }

        let mut chain = UnionFind::new(ncomp);
        for f in 0..faces.len() {
            for p in offset[f]..offset[f + 1].saturating_sub(1) {
                let (c1, c2) = (labels[p], labels[p + 1]);
                if !touches_upper[c1] {
                    chain.union(c1, c2);
                }
            }
        }
        let (arc_of, narcs) = chain.labels();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); narcs];
        for c in 0..ncomp {
            members[arc_of[c]].push(c);
        }
        let mut arcs = Vec::with_capacity(narcs);
        for mut comps in members {
            comps.sort_by_key(|&c| comp_slab[c]);
            let lo = comp_slab[comps[0]];
            for (k, &c) in comps.iter().enumerate() {
                if comp_slab[c] != lo + k {
                    return Err(Error::Reeb(format!(
                        "arc has {} components across slabs {lo}..{}",
                        comps.len(),
                        comp_slab[*comps.last().unwrap()]
                    )));
                }
            }
            arcs.push(ReebArc {
                lower: lo,
                upper: lo + comps.len(),
                components: comps,
            });
        }
        arcs.sort_by_key(|arc| (arc.lower, arc.upper, arc.components[0]));
        Ok(ReebGraph {
            nodes,
            arcs,
            component_faces: comp_faces,
        })
    }

    /// Number of arcs at each node; an arc whose ends coincide counts twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for arc in &self.arcs {
            d[arc.lower] += 1;
            d[arc.upper] += 1;
        }
        d
    }

    pub fn connected_components(&self) -> usize {
        let mut uf = UnionFind::new(self.nodes.len());
        for arc in &self.arcs {
            uf.union(arc.lower, arc.upper);
        }
        uf.labels().1
    }

    /// First Betti number `E − N + components`.
    pub fn loop_rank(&self) -> usize {
        (self.arcs.len() + self.connected_components()) - self.nodes.len()
    }

    /// Faces of the arc inside the slab just above node `slab`.
    pub fn arc_faces(&self, arc: usize, slab: usize) -> &[usize] {
        let a = &self.arcs[arc];
        &self.component_faces[a.components[slab - a.lower]]
    }
}

/// An edge of the simplified graph: a chain of original arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonEdge {
    pub ends: [usize; 2],
    pub segments: Vec<usize>,
}

/// The Reeb graph after leaf retraction and degree-2 smoothing.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    pub edges: Vec<SkeletonEdge>,
    num_nodes: usize,
}

impl Skeleton {
    pub fn from_graph(graph: &ReebGraph) -> Self {
        Skeleton {
            edges: graph
                .arcs
                .iter()
                .enumerate()
                .map(|(i, a)| SkeletonEdge {
                    ends: [a.lower, a.upper],
                    segments: vec![i],
                })
                .collect(),
            num_nodes: graph.nodes.len(),
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_nodes];
        for e in &self.edges {
            d[e.ends[0]] += 1;
            d[e.ends[1]] += 1;
        }
        d
    }

    fn incident(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_nodes];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.ends[0]].push(i);
            if e.ends[1] != e.ends[0] {
                inc[e.ends[1]].push(i);
            }
        }
        inc
    }
}

fn is_critical(graph: &ReebGraph, n: usize) -> bool {
    matches!(graph.nodes[n].kind, NodeKind::Critical(_))
}

/// Repeatedly removes the edge at every degree-1 node that comes from a critical point.
pub fn retract_leaves(graph: &ReebGraph, sk: &mut Skeleton) {
    let inc = sk.incident();
    let mut deg = sk.degrees();
    let mut alive = vec![true; sk.edges.len()];
    let mut queue: VecDeque<usize> = (0..sk.num_nodes)
        .filter(|&n| deg[n] == 1 && is_critical(graph, n))
        .collect();
    while let Some(n) = queue.pop_front() {
        if deg[n] != 1 {
            continue;
        }
        let Some(&e) = inc[n].iter().find(|&&e| alive[e]) else {
            continue;
        };
        alive[e] = false;
        let [x, y] = sk.edges[e].ends;
        deg[x] -= 1;
        deg[y] -= 1;
        let other = if x == n { y } else { x };
        if deg[other] == 1 && is_critical(graph, other) {
            queue.push_back(other);
        }
    }
    let mut k = 0;
    sk.edges.retain(|_| {
        k += 1;
        alive[k - 1]
    });
}

/// Merges the two edges at every degree-2 critical node, except a node whose only edge is a
/// loop.
pub fn smooth_degree2(graph: &ReebGraph, sk: &mut Skeleton) {
    loop {
        let deg = sk.degrees();
        let inc = sk.incident();
        let target =
            (0..sk.num_nodes).find(|&n| deg[n] == 2 && is_critical(graph, n) && inc[n].len() == 2);
        let Some(n) = target else { break };
        let (e1, e2) = (inc[n][0], inc[n][1]);
        let far = |e: usize| {
            let [x, y] = sk.edges[e].ends;
            if x == n {
                y
            } else {
                x
            }
        };
        let mut segments = sk.edges[e1].segments.clone();
        segments.extend_from_slice(&sk.edges[e2].segments);
        let merged = SkeletonEdge {
            ends: [far(e1), far(e2)],
            segments,
        };
        let (hi, lo) = (e1.max(e2), e1.min(e2));
        sk.edges.remove(hi);
        sk.edges[lo] = merged;
    }
}

/// A regular level inside one arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPoint {
    pub arc: usize,
    pub level: Level,
}

/// One cut per skeleton edge whose two ends both have degree at least 3, placed at the median
/// level of the widest arc in the edge.
pub fn select_cut_points(
    graph: &ReebGraph,
    field: &ScalarField,
    sk: &Skeleton,
) -> Result<Vec<CutPoint>> {
    let deg = sk.degrees();
    let mut out = Vec::new();
    for e in &sk.edges {
        if deg[e.ends[0]] < 3 || deg[e.ends[1]] < 3 {
            continue;
        }
        let &arc = e
            .segments
            .iter()
            .max_by_key(|&&s| {
                let (a, b) = graph.arcs[s].rank_span(graph);
                (b - a, std::cmp::Reverse(s))
            })
            .expect("skeleton edge has a segment");
        let (a, b) = graph.arcs[arc].rank_span(graph);
        let r = a + (b - a - 1) / 2;
        out.push(CutPoint {
            arc,
            level: Level::above_rank(field, r)?,
        });
    }
    Ok(out)
}

/// The level-set loop of a cut point, traced from one of the arc's faces.
pub fn cut_point_to_curve(
    mesh: &TriMesh,
    field: &ScalarField,
    graph: &ReebGraph,
    cp: &CutPoint,
) -> Result<CutCurve> {
    let arc = &graph.arcs[cp.arc];
    let r = cp.level.rank;
    let slab = (arc.lower..arc.upper)
        .find(|&s| graph.nodes[s].hi <= r && r < graph.nodes[s + 1].lo)
        .ok_or_else(|| Error::Reeb(format!("level rank {r} is outside arc {}", cp.arc)))?;
    let faces = graph.arc_faces(cp.arc, slab);
    let start = faces
        .iter()
        .copied()
        .find(|&f| {
            let t = mesh.triangle(f);
            (0..3).any(|k| cp.level.crosses(field, t[k], t[(k + 1) % 3]))
        })
        .ok_or_else(|| Error::Reeb(format!("arc {} does not meet its level", cp.arc)))?;
    let (curve, traced) = trace_loop(mesh, field, cp.level, start)?;
    let mut own: Vec<usize> = faces.to_vec();
    own.sort_unstable();
    if traced.iter().any(|f| own.binary_search(f).is_err()) {
        return Err(Error::Reeb(format!(
            "loop of arc {} leaves the arc",
            cp.arc
        )));
    }
    Ok(curve)
}

/// Skeleton after leaf retraction and smoothing, and its cut points.
pub fn cut_points(graph: &ReebGraph, field: &ScalarField) -> Result<(Skeleton, Vec<CutPoint>)> {
    let mut sk = Skeleton::from_graph(graph);
    retract_leaves(graph, &mut sk);
    smooth_degree2(graph, &mut sk);
    let cps = select_cut_points(graph, field, &sk)?;
    Ok((sk, cps))
}
