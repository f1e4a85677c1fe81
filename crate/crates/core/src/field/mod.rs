//! Per-vertex scalar fields under a strict symbolic order.
//!
//! Every comparison between vertices goes through [`ScalarField::rank`], which orders
//! vertices by `(value, key, index)`. Keys default to the vertex index, so the order is
//! plain `(value, index)` unless a field was transported through a cut.

pub mod harmonic;

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

pub use harmonic::{
    mean_value_weight, solve_boundary_aware, solve_harmonic, BoundaryMode, DirichletConstraints,
    SolveOptions,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
    rank: Vec<usize>,
    order: Vec<usize>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let keys: Vec<u64> = (0..values.len() as u64).collect();
        Self::with_keys(values, &keys)
    }

    /// Field whose ties are broken first by `keys`, then by vertex index.
    pub fn with_keys(values: Vec<f64>, keys: &[u64]) -> Result<Self> {
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue { vertex: v });
        }
        assert_eq!(values.len(), keys.len());
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| {
            values[a]
                .total_cmp(&values[b])
                .then(keys[a].cmp(&keys[b]))
                .then(a.cmp(&b))
        });
        let mut rank = vec![0; values.len()];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        Ok(ScalarField {
            values,
            rank,
            order,
        })
    }

    pub fn for_mesh(mesh: &TriMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::FieldLength {
                expected: mesh.num_vertices(),
                got: values.len(),
            });
        }
        Self::new(values)
    }

    /// One coordinate of the vertex positions (0 = x, 1 = y, 2 = z).
    pub fn coordinate(mesh: &TriMesh, axis: usize) -> Self {
        Self::new(mesh.positions().iter().map(|p| p[axis]).collect())
            .expect("mesh coordinates are finite")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, v: usize) -> f64 {
        self.values[v]
    }

    /// Position of `v` in the ascending symbolic order.
    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    /// Vertices in ascending symbolic order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn vertex_at_rank(&self, r: usize) -> usize {
        self.order[r]
    }

    pub fn value_at_rank(&self, r: usize) -> f64 {
        self.values[self.order[r]]
    }

    pub fn less(&self, u: usize, v: usize) -> bool {
        self.rank[u] < self.rank[v]
    }

    pub fn cmp(&self, u: usize, v: usize) -> Ordering {
        self.rank[u].cmp(&self.rank[v])
    }

    /// `−f` with the symbolic order exactly reversed.
    pub fn reversed(&self) -> Self {
        let n = self.len();
        let values = self.values.iter().map(|x| -x).collect();
        let rank = self.rank.iter().map(|r| n - 1 - r).collect();
        let order = self.order.iter().rev().copied().collect();
        ScalarField {
            values,
            rank,
            order,
        }
    }

    /// Applies a strictly increasing map to the values; the symbolic order is kept.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue { vertex: v });
        }
        Ok(ScalarField {
            values,
            rank: self.rank.clone(),
            order: self.order.clone(),
        })
    }
}

/// A regular level of a field: the cut between ranks `rank` and `rank + 1`.
///
/// Vertices with rank `<= rank` lie below the level. `value` is the real number used to
/// place iso-curve points on edges and always satisfies
/// `f(rank) <= value <= f(rank + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub value: f64,
    pub rank: usize,
}

impl Level {
    /// The level just above rank `r`, valued at the midpoint of its neighbouring values.
    pub fn above_rank(field: &ScalarField, r: usize) -> Result<Level> {
        if r + 1 >= field.len() {
            return Err(Error::IrregularLevel {
                level: f64::NAN,
                reason: format!("no vertex above rank {r}"),
            });
        }
        let value = 0.5 * (field.value_at_rank(r) + field.value_at_rank(r + 1));
        Ok(Level { value, rank: r })
    }

    /// The regular level nearest to `value`, clamped so that it separates ranks `lo` and `hi`.
    pub fn between(field: &ScalarField, value: f64, lo: usize, hi: usize) -> Result<Level> {
        if lo >= hi {
            return Err(Error::EmptyWindow);
        }
        // Largest rank whose value is <= value.
        let order = field.order();
        let mut r = order.partition_point(|&v| field.value(v) <= value);
        r = r.saturating_sub(1);
        let r = r.clamp(lo, hi - 1);
        let (a, b) = (field.value_at_rank(r), field.value_at_rank(r + 1));
        if a <= value && value <= b {
            Ok(Level { value, rank: r })
        } else {
            Ok(Level {
                value: 0.5 * (a + b),
                rank: r,
            })
        }
    }

    pub fn is_below(&self, field: &ScalarField, v: usize) -> bool {
        field.rank(v) <= self.rank
    }

    /// True if the edge `(u, v)` crosses the level.
    pub fn crosses(&self, field: &ScalarField, u: usize, v: usize) -> bool {
        self.is_below(field, u) != self.is_below(field, v)
    }

    /// Interpolation parameter from `below` toward `above`, kept inside `(0, 1)`.
    pub fn interpolate(&self, field: &ScalarField, below: usize, above: usize) -> f64 {
        let (a, b) = (field.value(below), field.value(above));
        let t = if b > a {
            (self.value - a) / (b - a)
        } else {
            0.5
        };
        t.clamp(T_MARGIN, 1.0 - T_MARGIN)
    }
}

/// Iso-curve points never sit closer than this to an edge endpoint (in edge parameter).
pub const T_MARGIN: f64 = 1e-6;

/// Reads one value per line; blank lines and `#` comments are skipped.
pub fn load_field(path: impl AsRef<Path>, mesh: &TriMesh) -> Result<ScalarField> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let values = parse_field(&text)?;
    ScalarField::for_mesh(mesh, values)
}

pub fn parse_field(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("cannot parse '{line}' as a number"),
        })?;
        if !x.is_finite() {
            return Err(Error::NonFiniteValue {
                vertex: values.len(),
            });
        }
        values.push(x);
    }
    Ok(values)
}

pub fn save_field(field: &ScalarField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::with_capacity(24 * field.len());
    for v in field.values() {
        s.push_str(&format!("{v}\n"));
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_break_by_index() {
        let f = ScalarField::new(vec![1.0, 0.5, 1.0, 0.5]).unwrap();
        assert_eq!(f.order(), &[1, 3, 0, 2]);
        assert!(f.less(0, 2));
        assert!(!f.less(2, 0));
    }

    #[test]
    fn keys_break_ties_before_index() {
        let f = ScalarField::with_keys(vec![1.0, 1.0, 1.0], &[5, 1, 3]).unwrap();
        assert_eq!(f.order(), &[1, 2, 0]);
    }

    #[test]
    fn reversed_order_is_exact_mirror() {
        let f = ScalarField::new(vec![0.0, 0.0, 2.0, 1.0]).unwrap();
        let g = f.reversed();
        for u in 0..4 {
            for v in 0..4 {
                if u != v {
                    assert_eq!(f.less(u, v), g.less(v, u));
                }
            }
        }
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            ScalarField::new(vec![0.0, f64::NAN]),
            Err(Error::NonFiniteValue { vertex: 1 })
        ));
        assert!(parse_field("1\ninf\n").is_err());
    }

    #[test]
    fn level_between_midpoint_and_clamp() {
        let f = ScalarField::new(vec![0.0, 0.3, 0.5, 1.0]).unwrap();
        let l = Level::between(&f, 0.4, 1, 2).unwrap();
        assert_eq!(l.rank, 1);
        assert!((l.value - 0.4).abs() < 1e-15);
        // Equal values: the level still separates ranks 1 and 2.
        let g = ScalarField::new(vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        let l = Level::between(&g, 0.5, 1, 2).unwrap();
        assert_eq!(l.rank, 1);
        assert!(l.is_below(&g, 1) && !l.is_below(&g, 2));
        assert!(Level::between(&g, 0.5, 2, 2).is_err());
    }

    #[test]
    fn parse_field_skips_comments() {
        assert_eq!(
            parse_field("# header\n1.5\n\n-2\n").unwrap(),
            vec![1.5, -2.0]
        );
    }
}
