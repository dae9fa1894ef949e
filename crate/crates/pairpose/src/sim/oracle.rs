//! Correspondence and pose-seed oracles.
//!
//! These fabricate what the learned front end of a pose pipeline would
//! predict, with controllable quality: noisy two-way correspondences
//! between scene and model, and pose seeds scattered around the ground
//! truth. Because the corruption model is explicit, every downstream
//! accuracy number has a known cause.
//!
//! Correspondence noise `sigma` is in meters and applied to the generated
//! side's positions; the matching normals get a dimensionless Gaussian
//! perturbation of scale `20 * sigma` before renormalization, which keeps
//! angular and positional error at comparable severity. An
//! `outlier_ratio` fraction (rounded up) of generated entries is replaced
//! outright: positions uniform over the generated side's bounding box,
//! normals uniform over the sphere.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, UnitSphere};

use crate::cloud::{Frame, OrientedCloud};
use crate::geom::{OrientedPoint, RigidTransform, Rotation, Vec3};
use crate::solver::{Branch, CorrespondenceSet, PoseSet, SolverError};

use super::SceneInstance;

const NORMAL_NOISE_SCALE: f64 = 20.0;

fn perturbed_unit(rng: &mut ChaCha8Rng, direction: &Vec3, scale: f64) -> Vec3 {
    if scale == 0.0 {
        return *direction;
    }
    let eta = Vec3::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    );
    let bent = direction + scale * eta;
    let norm = bent.norm();
    if norm < 1e-12 {
        *direction
    } else {
        bent / norm
    }
}

fn gaussian_offset(rng: &mut ChaCha8Rng, sigma: f64) -> Vec3 {
    if sigma == 0.0 {
        return Vec3::zeros();
    }
    sigma
        * Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        )
}

fn bounding_box(points: &[OrientedPoint]) -> (Vec3, Vec3) {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(&p.position);
        hi = hi.sup(&p.position);
    }
    (lo, hi)
}

fn replace_outliers(rng: &mut ChaCha8Rng, generated: &mut [OrientedPoint], outlier_ratio: f64) {
    let n = generated.len();
    let count = (outlier_ratio * n as f64).ceil() as usize;
    if count == 0 {
        return;
    }
    let (lo, hi) = bounding_box(generated);
    let mut picks: Vec<usize> = rand::seq::index::sample(rng, n, count.min(n)).into_vec();
    picks.sort_unstable();
    for i in picks {
        let position = Vec3::new(
            rng.random_range(lo.x..=hi.x),
            rng.random_range(lo.y..=hi.y),
            rng.random_range(lo.z..=hi.z),
        );
        let sphere: [f64; 3] = rng.sample(UnitSphere);
        generated[i] = OrientedPoint::new(position, Vec3::new(sphere[0], sphere[1], sphere[2]));
    }
}

/// Predicts a model-frame twin for every observed scene point.
///
/// The generated model side is the ground-truth pullback of the scene
/// plus correspondence noise, so the set is exact at `sigma = 0`,
/// `outlier_ratio = 0` up to the scene's own corruption.
pub fn oracle_bcm_s(
    instance: &SceneInstance,
    corr_noise_sigma: f64,
    outlier_ratio: f64,
    seed: u64,
) -> Result<CorrespondenceSet, SolverError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inverse = instance.gt_pose.invert();
    let mut generated: Vec<OrientedPoint> = instance
        .scene
        .points
        .iter()
        .map(|p| {
            let position = inverse.apply_point(&p.position) + gaussian_offset(&mut rng, corr_noise_sigma);
            let pulled = inverse.rotation.apply(&p.normal);
            let normal = perturbed_unit(&mut rng, &pulled, NORMAL_NOISE_SCALE * corr_noise_sigma);
            OrientedPoint::new(position, normal)
        })
        .collect();
    replace_outliers(&mut rng, &mut generated, outlier_ratio);
    CorrespondenceSet::new(
        instance.scene.clone(),
        OrientedCloud::new(generated, Frame::Model),
    )
}

/// Predicts a camera-frame twin for every model point.
///
/// Mirror of [`oracle_bcm_s`]: the generated side is the ground-truth
/// image of the clean model cloud plus the same corruption model, so its
/// correspondences cover the whole object, including occluded parts.
pub fn oracle_bcm_m(
    instance: &SceneInstance,
    corr_noise_sigma: f64,
    outlier_ratio: f64,
    seed: u64,
) -> Result<CorrespondenceSet, SolverError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut generated: Vec<OrientedPoint> = instance
        .model
        .points
        .iter()
        .map(|p| {
            let position =
                instance.gt_pose.apply_point(&p.position) + gaussian_offset(&mut rng, corr_noise_sigma);
            let pushed = instance.gt_pose.rotation.apply(&p.normal);
            let normal = perturbed_unit(&mut rng, &pushed, NORMAL_NOISE_SCALE * corr_noise_sigma);
            OrientedPoint::new(position, normal)
        })
        .collect();
    replace_outliers(&mut rng, &mut generated, outlier_ratio);
    CorrespondenceSet::new(
        OrientedCloud::new(generated, Frame::Camera),
        instance.model.clone(),
    )
}

/// Scatters pose seeds around the ground truth.
///
/// Each seed left-composes a random-axis rotation with angle
/// `|N(0, rot_sigma)|` radians onto the true rotation and adds isotropic
/// Gaussian noise of scale `trans_sigma` to the true translation.
pub fn oracle_pr(
    gt_pose: &RigidTransform,
    count: usize,
    rot_sigma: f64,
    trans_sigma: f64,
    seed: u64,
) -> PoseSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poses = (0..count)
        .map(|_| {
            let axis: [f64; 3] = rng.sample(UnitSphere);
            let angle: f64 = rot_sigma * rng.sample::<f64, _>(StandardNormal).abs();
            let wobble = Rotation::from_axis_angle(&Vec3::new(axis[0], axis[1], axis[2]), angle);
            let rotation = wobble * gt_pose.rotation;
            let translation = gt_pose.translation + gaussian_offset(&mut rng, trans_sigma);
            RigidTransform::new(rotation, translation)
        })
        .collect();
    PoseSet {
        poses,
        source: Branch::Pr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::geodesic_angle;
    use crate::sim::{make_scene, ScenarioConfig};
    use crate::solver::{ensemble, kabsch};

    fn test_instance(seed: u64) -> SceneInstance {
        let config = ScenarioConfig {
            seed,
            model_points: 400,
            scene_points: 400,
            ..ScenarioConfig::default()
        };
        make_scene(&config).unwrap()
    }

    #[test]
    fn clean_oracles_recover_the_pose_through_kabsch() {
        let instance = test_instance(1);
        for corr in [
            oracle_bcm_s(&instance, 0.0, 0.0, 10).unwrap(),
            oracle_bcm_m(&instance, 0.0, 0.0, 11).unwrap(),
        ] {
            let fit = kabsch(&corr).unwrap();
            let rot = geodesic_angle(&fit.rotation, &instance.gt_pose.rotation);
            let trans = (fit.translation - instance.gt_pose.translation).norm();
            assert!(rot < 1e-9, "rotation error {rot}");
            assert!(trans < 1e-9, "translation error {trans}");
        }
    }

    #[test]
    fn corr_noise_displacement_matches_the_chi_mean() {
        let instance = test_instance(2);
        let sigma = 0.002;
        let corr = oracle_bcm_s(&instance, sigma, 0.0, 7).unwrap();
        let inverse = instance.gt_pose.invert();
        let mean: f64 = corr
            .camera()
            .points
            .iter()
            .zip(&corr.model().points)
            .map(|(cam, gen)| (gen.position - inverse.apply_point(&cam.position)).norm())
            .sum::<f64>()
            / corr.len() as f64;
        let expected = sigma * (8.0 / std::f64::consts::PI).sqrt();
        assert!(
            (mean - expected).abs() < 0.1 * expected,
            "mean displacement {mean}, expected about {expected}"
        );
        for p in &corr.model().points {
            assert!((p.normal.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn outlier_count_is_exactly_the_ceiling() {
        let instance = test_instance(3);
        let inverse = instance.gt_pose.invert();
        for (ratio, expected) in [(0.3, 120), (0.249, 100), (0.0, 0)] {
            let corr = oracle_bcm_s(&instance, 0.0, ratio, 5).unwrap();
            let moved = corr
                .camera()
                .points
                .iter()
                .zip(&corr.model().points)
                .filter(|(cam, gen)| {
                    (gen.position - inverse.apply_point(&cam.position)).norm() > 1e-12
                })
                .count();
            assert_eq!(moved, expected, "ratio {ratio}");
        }
    }

    #[test]
    fn all_outliers_make_kabsch_unrelated_to_the_truth() {
        let mut unrelated = 0;
        for seed in 0..20 {
            let instance = test_instance(100 + seed);
            let corr = oracle_bcm_m(&instance, 0.0, 1.0, seed).unwrap();
            let fit = kabsch(&corr).unwrap();
            let rot = geodesic_angle(&fit.rotation, &instance.gt_pose.rotation);
            let trans = (fit.translation - instance.gt_pose.translation).norm();
            if rot > 0.1 || trans > 0.01 {
                unrelated += 1;
            }
        }
        assert!(unrelated >= 18, "only {unrelated}/20 fits were unrelated");
    }

    #[test]
    fn pose_seed_angles_match_the_half_normal_mean() {
        let gt = crate::sim::sample_pose(8, 0.5);
        let rot_sigma = 3.0f64.to_radians();
        let set = oracle_pr(&gt, 4000, rot_sigma, 0.003, 9);
        assert_eq!(set.poses.len(), 4000);
        assert_eq!(set.source, Branch::Pr);
        let mean_angle: f64 = set
            .poses
            .iter()
            .map(|p| geodesic_angle(&p.rotation, &gt.rotation))
            .sum::<f64>()
            / 4000.0;
        let expected = rot_sigma * (2.0 / std::f64::consts::PI).sqrt();
        assert!(
            (mean_angle - expected).abs() < 0.1 * expected,
            "mean angle {mean_angle}, expected about {expected}"
        );
    }

    #[test]
    fn pose_seed_ensemble_concentrates_on_the_truth() {
        let gt = crate::sim::sample_pose(12, 0.5);
        let set = oracle_pr(&gt, 1000, 3.0f64.to_radians(), 0.003, 13);
        let pooled = ensemble(&[set]).unwrap();
        let rot = geodesic_angle(&pooled.rotation, &gt.rotation).to_degrees();
        let trans = (pooled.translation - gt.translation).norm();
        assert!(rot < 0.5, "pooled rotation error {rot} degrees");
        assert!(trans < 0.0005, "pooled translation error {trans}");
    }

    #[test]
    fn oracles_are_deterministic_in_the_seed() {
        let instance = test_instance(4);
        let a = oracle_bcm_s(&instance, 0.001, 0.2, 42).unwrap();
        let b = oracle_bcm_s(&instance, 0.001, 0.2, 42).unwrap();
        for (pa, pb) in a.model().points.iter().zip(&b.model().points) {
            assert_eq!(pa.position, pb.position);
            assert_eq!(pa.normal, pb.normal);
        }
        let c = oracle_bcm_s(&instance, 0.001, 0.2, 43).unwrap();
        assert!(a
            .model()
            .points
            .iter()
            .zip(&c.model().points)
            .any(|(pa, pc)| pa.position != pc.position));
    }
}
