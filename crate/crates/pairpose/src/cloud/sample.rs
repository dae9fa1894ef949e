//! Uniform surface sampling of a triangle mesh.
//!
//! Triangles are chosen with probability proportional to their area, then a
//! point is drawn uniformly inside the chosen triangle with the square-root
//! barycentric trick. Each sample carries the face normal of its triangle,
//! so the result is an oriented model-frame cloud.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CloudError, Frame, OrientedCloud, TriangleMesh};
use crate::geom::OrientedPoint;

/// Draws `count` oriented samples from the surface of `mesh`.
///
/// Zero-area triangles are never selected. The generator is seeded from
/// `seed` alone, so equal inputs give bit-identical clouds.
pub fn sample_surface(mesh: &TriangleMesh, count: usize, seed: u64) -> Result<OrientedCloud, CloudError> {
    if count == 0 {
        return Err(CloudError::TooFewPoints { needed: 1, got: 0 });
    }

    let mut cumulative = Vec::with_capacity(mesh.triangles.len());
    let mut usable = Vec::with_capacity(mesh.triangles.len());
    let mut total = 0.0f64;
    for i in 0..mesh.triangles.len() {
        let area = mesh.triangle_area(i);
        if area > 0.0 {
            total += area;
            cumulative.push(total);
            usable.push(i);
        }
    }
    if usable.is_empty() {
        return Err(CloudError::EmptyMesh);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let u = rng.random_range(0.0..total);
        let pick = cumulative.partition_point(|&c| c <= u).min(usable.len() - 1);
        let tri = usable[pick];
        let [a, b, c] = mesh.triangles[tri];
        let (va, vb, vc) = (mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]);

        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let s = r1.sqrt();
        let position = va * (1.0 - s) + vb * (s * (1.0 - r2)) + vc * (s * r2);

        let normal = mesh
            .triangle_normal(tri)
            .expect("positive-area triangle has a normal");
        points.push(OrientedPoint::new(position, normal));
    }

    Ok(OrientedCloud::new(points, Frame::Model))
}
