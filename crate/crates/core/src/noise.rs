//! Seeded vertex jitter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

/// Moves every vertex by a uniform random vector in the ball of radius
/// `amplitude · bbox_diagonal`. Connectivity is unchanged.
pub fn add_noise(mesh: &TriMesh, amplitude: f64, seed: u64) -> Result<TriMesh> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise amplitude must be a finite non-negative number, got {amplitude}"
        )));
    }
    let radius = amplitude * mesh.bbox_diagonal();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = mesh
        .positions()
        .iter()
        .map(|p| {
            let d = loop {
                let d: [f64; 3] = [
                    rng.random_range(-1.0..=1.0),
                    rng.random_range(-1.0..=1.0),
                    rng.random_range(-1.0..=1.0),
                ];
                if d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= 1.0 {
                    break d;
                }
            };
            [
                p[0] + radius * d[0],
                p[1] + radius * d[1],
                p[2] + radius * d[2],
            ]
        })
        .collect();
    mesh.with_positions(positions)
}
