//! RANSAC over correspondences with a least-squares model.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{kabsch, CorrespondenceSet, SolverError};
use crate::cloud::{Frame, OrientedCloud};
use crate::geom::RigidTransform;

/// Robust pose fit: repeatedly aligns a random 3-point sample, scores it
/// by how many correspondences land within `inlier_threshold`, and refits
/// on the best consensus set.
///
/// Ties on inlier count go to the hypothesis with the lower total inlier
/// residual. The sequential seeded sampling makes the result a pure
/// function of the inputs. When the winning consensus set is itself too
/// small or degenerate to refit, the raw winning hypothesis is returned.
pub fn ransac(
    corr: &CorrespondenceSet,
    inlier_threshold: f64,
    iterations: usize,
    seed: u64,
) -> Result<RigidTransform, SolverError> {
    let n = corr.len();
    if n < 3 {
        return Err(SolverError::TooFewPoints { needed: 3, got: n });
    }
    debug_assert!(inlier_threshold > 0.0, "inlier threshold must be positive");
    debug_assert!(iterations >= 1, "need at least one iteration");

    let camera = &corr.camera().points;
    let model = &corr.model().points;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best: Option<(usize, f64, RigidTransform, Vec<usize>)> = None;
    for _ in 0..iterations {
        let picks = rand::seq::index::sample(&mut rng, n, 3).into_vec();
        let sample = subset(corr, &picks);
        let Ok(hypothesis) = kabsch(&sample) else {
            continue;
        };

        let mut inliers = Vec::new();
        let mut residual_sum = 0.0;
        for i in 0..n {
            let r = (hypothesis.apply_point(&model[i].position) - camera[i].position).norm();
            if r < inlier_threshold {
                inliers.push(i);
                residual_sum += r;
            }
        }

        let better = match &best {
            None => true,
            Some((count, total, _, _)) => {
                inliers.len() > *count || (inliers.len() == *count && residual_sum < *total)
            }
        };
        if better {
            best = Some((inliers.len(), residual_sum, hypothesis, inliers));
        }
    }

    let Some((_, _, hypothesis, inliers)) = best else {
        return Err(SolverError::NoValidHypothesis);
    };

    if inliers.len() >= 3 {
        if let Ok(refit) = kabsch(&subset(corr, &inliers)) {
            return Ok(refit);
        }
    }
    Ok(hypothesis)
}

fn subset(corr: &CorrespondenceSet, indices: &[usize]) -> CorrespondenceSet {
    let camera = indices.iter().map(|&i| corr.camera().points[i]).collect();
    let model = indices.iter().map(|&i| corr.model().points[i]).collect();
    CorrespondenceSet::new(
        OrientedCloud::new(camera, Frame::Camera),
        OrientedCloud::new(model, Frame::Model),
    )
    .expect("subset of a valid correspondence set")
}

#[cfg(test)]
mod tests {
    use super::super::tests::{clean_correspondences, pose_errors, random_model_cloud, random_transform};
    use super::*;
    use crate::geom::{OrientedPoint, Vec3};
    use rand::{RngExt, SeedableRng};

    #[test]
    fn clean_correspondences_make_every_point_an_inlier() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gt = random_transform(&mut rng);
        let model = random_model_cloud(&mut rng, 50);
        let corr = clean_correspondences(&model, &gt);

        let fit = ransac(&corr, 0.005, 50, 7).unwrap();
        let (rot, trans) = pose_errors(&fit, &gt);
        assert!(rot < 1e-9 && trans < 1e-9);

        let inliers = corr
            .camera()
            .points
            .iter()
            .zip(&corr.model().points)
            .filter(|(s, m)| (fit.apply_point(&m.position) - s.position).norm() < 0.005)
            .count();
        assert_eq!(inliers, corr.len());
    }

    #[test]
    fn thirty_percent_outliers_are_rejected() {
        let mut outer = ChaCha8Rng::seed_from_u64(2);
        let trials = 100;
        let mut recovered = 0;
        for trial in 0..trials {
            let gt = random_transform(&mut outer);
            let model = random_model_cloud(&mut outer, 100);
            let mut corr = clean_correspondences(&model, &gt);
            let mut camera = corr.camera().clone();
            for k in 0..30 {
                let junk = Vec3::new(
                    outer.random_range(-0.5..0.5),
                    outer.random_range(-0.5..0.5),
                    outer.random_range(-0.5..0.5),
                );
                camera.points[k * 3].position = junk;
            }
            corr = CorrespondenceSet::new(camera, corr.model().clone()).unwrap();

            let fit = ransac(&corr, 0.005, 500, trial).unwrap();
            let (rot, trans) = pose_errors(&fit, &gt);
            if rot < 1.0f64.to_radians() && trans < 0.005 {
                recovered += 1;
            }
        }
        assert!(recovered >= 95, "recovered the pose in only {recovered}/{trials} trials");
    }

    #[test]
    fn single_degenerate_iteration_has_no_hypothesis() {
        let up = Vec3::new(0.0, 0.0, 1.0);
        let points: Vec<OrientedPoint> = (0..3)
            .map(|i| OrientedPoint::new(Vec3::new(i as f64 * 0.01, 0.0, 0.0), up))
            .collect();
        let model = OrientedCloud::new(points, Frame::Model);
        let camera = model.transformed(&RigidTransform::identity(), Frame::Camera);
        let corr = CorrespondenceSet::new(camera, model).unwrap();
        assert!(matches!(ransac(&corr, 0.01, 1, 0), Err(SolverError::NoValidHypothesis)));
    }

    #[test]
    fn same_seed_same_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gt = random_transform(&mut rng);
        let model = random_model_cloud(&mut rng, 40);
        let corr = clean_correspondences(&model, &gt);
        let a = ransac(&corr, 0.01, 20, 5).unwrap();
        let b = ransac(&corr, 0.01, 20, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_threshold_still_returns_the_raw_hypothesis() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let gt = random_transform(&mut rng);
        let model = random_model_cloud(&mut rng, 20);
        let mut corr = clean_correspondences(&model, &gt);
        let mut camera = corr.camera().clone();
        for p in &mut camera.points {
            for k in 0..3 {
                p.position[k] += 0.01 * rng.sample::<f64, _>(rand_distr::StandardNormal);
            }
        }
        corr = CorrespondenceSet::new(camera, corr.model().clone()).unwrap();
        let fit = ransac(&corr, 1e-12, 10, 0).unwrap();
        assert!(fit.rotation.orthonormality_defect() < 1e-9);
    }
}
