//! From a triangle mesh to an oriented cloud ready for the solver.
//!
//! Walks the usual preprocessing chain: build a mesh, sample its surface
//! with area weighting, re-estimate normals from positions alone the way
//! a depth sensor pipeline must, and pick well-spread anchors with
//! farthest point sampling.

use pairpose::cloud::{
    diameter, estimate_normals, farthest_point_sampling, sample_surface, DEFAULT_NORMAL_K,
};
use pairpose::geom::Vec3;
use pairpose::sim::shapes;

fn main() {
    let mesh = shapes::blob(0.06, 7);
    println!(
        "blob mesh: {} vertices, {} triangles",
        mesh.vertices.len(),
        mesh.triangles.len()
    );

    let cloud = sample_surface(&mesh, 1500, 0).expect("blob has positive area");
    println!(
        "sampled {} surface points, cloud diameter {:.4} m",
        cloud.len(),
        diameter(&cloud).unwrap()
    );

    // Re-estimate normals from positions and compare with the mesh face
    // normals the sampler attached.
    let positions = cloud.positions();
    let viewpoint = Vec3::new(0.0, 0.0, 1.0);
    let estimated = estimate_normals(&positions, DEFAULT_NORMAL_K, &viewpoint)
        .expect("enough points for a neighborhood");
    let mut agreement = 0usize;
    for (est, truth) in estimated.cloud.points.iter().zip(&cloud.points) {
        if est.normal.dot(&truth.normal).abs() > 0.9 {
            agreement += 1;
        }
    }
    let ambiguous = estimated.ambiguous.iter().filter(|&&a| a).count();
    println!(
        "estimated normals agree with face normals at {}/{} points ({} ambiguous)",
        agreement,
        cloud.len(),
        ambiguous
    );

    let anchors = farthest_point_sampling(&cloud, 8, 0).unwrap();
    println!("farthest point anchors:");
    for &i in &anchors {
        let p = cloud.points[i].position;
        println!("  point {i:>4}  at ({:+.4}, {:+.4}, {:+.4})", p.x, p.y, p.z);
    }

    let mut min_separation = f64::INFINITY;
    for (a, &i) in anchors.iter().enumerate() {
        for &j in &anchors[a + 1..] {
            let d = (cloud.points[i].position - cloud.points[j].position).norm();
            min_separation = min_separation.min(d);
        }
    }
    println!(
        "minimum anchor separation {:.4} m on a {:.4} m object",
        min_separation,
        diameter(&cloud).unwrap()
    );
}
