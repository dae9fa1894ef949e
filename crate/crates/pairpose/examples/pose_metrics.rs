//! What the pose metrics measure, and when they disagree.
//!
//! The index-matched distance punishes any deviation from the true pose,
//! while its symmetric variant matches each point to the nearest
//! transformed point, so motions that map the object onto itself stay
//! cheap. A cylinder spun about its axis separates the two cleanly. The
//! second half aggregates errors from a batch of perturbed poses into
//! accuracy and threshold-curve area.

use pairpose::cloud::{diameter, sample_surface};
use pairpose::metrics::{accuracy_at, add, adds, auc, MetricConfig};
use pairpose::sim::{oracle_pr, sample_pose, shapes};

fn main() {
    let mesh = shapes::cylinder(0.045, 0.14, 48);
    let model = sample_surface(&mesh, 1000, 0).expect("cylinder has positive area");
    let positions = model.positions();
    let diam = diameter(&model).unwrap();
    println!("cylinder model: {} points, diameter {:.4} m", model.len(), diam);

    let gt = sample_pose(1, 0.5);
    let spun = {
        let spin = pairpose::geom::RigidTransform::from_rotation(
            pairpose::geom::Rotation::from_axis_angle(
                &pairpose::geom::Vec3::z(),
                30f64.to_radians(),
            ),
        );
        gt * spin
    };
    let index_matched = add(&spun, &gt, &positions).unwrap();
    let symmetric = adds(&spun, &gt, &positions).unwrap();
    println!("pose spun 30 degrees about the cylinder axis:");
    println!(
        "  index-matched distance {:.2} mm ({:.0}% of diameter)",
        index_matched * 1000.0,
        100.0 * index_matched / diam
    );
    println!(
        "  symmetric distance     {:.2} mm ({:.1}% of diameter)",
        symmetric * 1000.0,
        100.0 * symmetric / diam
    );

    // A batch of noisy poses, summarized the way benchmark tables are.
    let seeds = oracle_pr(&gt, 500, 2f64.to_radians(), 0.002, 9);
    let errors: Vec<f64> = seeds
        .poses
        .iter()
        .map(|p| add(p, &gt, &positions).unwrap())
        .collect();
    let config = MetricConfig::default();
    let threshold = config.accuracy_threshold.resolved(diam);
    println!(
        "500 perturbed poses: accuracy at {:.1} mm = {:.1}%, curve area = {:.1}",
        threshold * 1000.0,
        100.0 * accuracy_at(&errors, threshold).unwrap(),
        auc(&errors, &config).unwrap()
    );
    let tight = accuracy_at(&errors, 0.002).unwrap();
    println!("tightening the threshold to 2 mm drops accuracy to {:.1}%", 100.0 * tight);
}
