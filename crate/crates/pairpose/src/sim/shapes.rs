//! Built-in watertight test meshes at tabletop scale.
//!
//! All three builders wind triangles counterclockwise seen from outside,
//! so sampled face normals point outward. The blob is the default
//! benchmark object: a subdivided icosahedron whose radius is modulated
//! by low-order polynomial harmonics of the direction, which breaks every
//! rotational symmetry while staying smooth and star-shaped.

use std::collections::HashMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloud::TriangleMesh;
use crate::geom::Vec3;

/// Axis-aligned cube centered at the origin.
pub fn cube(side: f64) -> TriangleMesh {
    let h = side / 2.0;
    let vertices = vec![
        Vec3::new(-h, -h, -h),
        Vec3::new(h, -h, -h),
        Vec3::new(h, h, -h),
        Vec3::new(-h, h, -h),
        Vec3::new(-h, -h, h),
        Vec3::new(h, -h, h),
        Vec3::new(h, h, h),
        Vec3::new(-h, h, h),
    ];
    let triangles = vec![
        [0, 2, 1],
        [0, 3, 2],
        [4, 5, 6],
        [4, 6, 7],
        [0, 1, 5],
        [0, 5, 4],
        [1, 2, 6],
        [1, 6, 5],
        [2, 3, 7],
        [2, 7, 6],
        [3, 0, 4],
        [3, 4, 7],
    ];
    TriangleMesh::new(vertices, triangles).expect("cube is well formed")
}

/// Closed cylinder along the z axis, centered at the origin.
pub fn cylinder(radius: f64, height: f64, segments: usize) -> TriangleMesh {
    assert!(segments >= 3, "cylinder needs at least 3 segments");
    let h = height / 2.0;
    let mut vertices = Vec::with_capacity(2 * segments + 2);
    for level in [-h, h] {
        for s in 0..segments {
            let phi = std::f64::consts::TAU * s as f64 / segments as f64;
            vertices.push(Vec3::new(radius * phi.cos(), radius * phi.sin(), level));
        }
    }
    let bottom_center = vertices.len();
    vertices.push(Vec3::new(0.0, 0.0, -h));
    let top_center = vertices.len();
    vertices.push(Vec3::new(0.0, 0.0, h));

    let mut triangles = Vec::with_capacity(4 * segments);
    for s in 0..segments {
        let next = (s + 1) % segments;
        let (b0, b1) = (s, next);
        let (t0, t1) = (segments + s, segments + next);
        triangles.push([b0, b1, t1]);
        triangles.push([b0, t1, t0]);
        triangles.push([bottom_center, b1, b0]);
        triangles.push([top_center, t0, t1]);
    }
    TriangleMesh::new(vertices, triangles).expect("cylinder is well formed")
}

/// The eight direction polynomials used to modulate the blob radius.
fn harmonics(n: &Vec3) -> [f64; 8] {
    let (x, y, z) = (n.x, n.y, n.z);
    [x, y, z, x * y, y * z, z * x, x * x - y * y, 3.0 * z * z - 1.0]
}

/// Randomly shaped smooth star-shaped solid with no rotational symmetry.
///
/// An icosahedron is subdivided twice (162 vertices, 320 triangles) and
/// each unit vertex direction `n` is pushed to radius
/// `base_radius * (1 + sum_k c_k h_k(n))` with seeded coefficients
/// `c_k ~ U(-0.04, 0.04)`; the harmonic magnitudes bound the modulation
/// away from zero radius.
pub fn blob(base_radius: f64, seed: u64) -> TriangleMesh {
    let (directions, triangles) = icosphere(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coefficients: [f64; 8] = std::array::from_fn(|_| rng.random_range(-0.04..0.04));

    let vertices = directions
        .iter()
        .map(|n| {
            let wobble: f64 = harmonics(n)
                .iter()
                .zip(&coefficients)
                .map(|(h, c)| h * c)
                .sum();
            n * (base_radius * (1.0 + wobble))
        })
        .collect();
    TriangleMesh::new(vertices, triangles).expect("blob is well formed")
}

/// Unit-sphere triangulation: an icosahedron subdivided `levels` times
/// with midpoints reprojected onto the sphere.
fn icosphere(levels: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();

    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..levels {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vec3>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let v = (vertices[a] + vertices[b]).normalize();
                vertices.push(v);
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for [a, b, c] in triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }
    (vertices, triangles)
}
