//! Candidate generation, scoring, filtering, and pose averaging.

use rayon::prelude::*;

use super::{Branch, CorrespondenceSet, Direction, PoseCandidate, PoseSet, SolverError};
use crate::cloud::farthest_point_sampling;
use crate::geom::{pair_pose, rotation_mean, RigidTransform, Vec3};

/// Mean model-space residual of `t` over all correspondences:
/// the camera points are pulled back through the inverse transform and
/// compared against their model mates.
pub fn score_candidate(t: &RigidTransform, corr: &CorrespondenceSet) -> f64 {
    let inv = t.invert();
    let sum: f64 = corr
        .camera()
        .points
        .iter()
        .zip(&corr.model().points)
        .map(|(s, m)| (inv.apply_point(&s.position) - m.position).norm())
        .sum();
    sum / corr.len() as f64
}

/// Mean camera-space residual: model points pushed forward through `t`
/// and compared against their camera mates. This measures the same
/// alignment as [`score_candidate`] from the other frame, which is the
/// natural form for model-anchored candidates.
pub fn score_candidate_camera(t: &RigidTransform, corr: &CorrespondenceSet) -> f64 {
    let sum: f64 = corr
        .camera()
        .points
        .iter()
        .zip(&corr.model().points)
        .map(|(s, m)| (t.apply_point(&m.position) - s.position).norm())
        .sum();
    sum / corr.len() as f64
}

/// Builds one scored pose hypothesis per ordered pair of the `z`
/// correspondences selected by farthest point sampling.
///
/// The sampling runs over the anchoring side's positions (camera side for
/// scene-anchored pairs, model side for model-anchored ones). Pairs whose
/// anchor-frame projection is too small to define a roll angle are
/// skipped, so up to `z * (z - 1)` candidates come back. Candidate `pair`
/// fields hold original correspondence indices.
pub fn generate_candidates(
    corr: &CorrespondenceSet,
    z: usize,
    seed: u64,
    direction: Direction,
) -> Result<Vec<PoseCandidate>, SolverError> {
    if z < 2 {
        return Err(SolverError::TooFewPoints { needed: 2, got: z });
    }
    if corr.len() < z {
        return Err(SolverError::TooFewPoints { needed: z, got: corr.len() });
    }

    let anchor_cloud = match direction {
        Direction::BcmS => corr.camera(),
        Direction::BcmM => corr.model(),
    };
    let mut selected =
        farthest_point_sampling(anchor_cloud, z, seed).expect("selection size already validated");
    selected.sort_unstable();

    let mut pairs = Vec::with_capacity(z * (z - 1));
    for &r in &selected {
        for &i in &selected {
            if r != i {
                pairs.push((r, i));
            }
        }
    }

    let camera = &corr.camera().points;
    let model = &corr.model().points;
    let candidates: Vec<Option<PoseCandidate>> = pairs
        .par_iter()
        .map(|&(r, i)| {
            let built = match direction {
                Direction::BcmS => {
                    pair_pose(&model[r], &model[i].position, &camera[r], &camera[i].position)
                }
                Direction::BcmM => {
                    pair_pose(&camera[r], &camera[i].position, &model[r], &model[i].position)
                        .map(|t| t.invert())
                }
            };
            built.ok().map(|transform| {
                let error = match direction {
                    Direction::BcmS => score_candidate(&transform, corr),
                    Direction::BcmM => score_candidate_camera(&transform, corr),
                };
                PoseCandidate { transform, error, pair: (r, i) }
            })
        })
        .collect();

    let candidates: Vec<PoseCandidate> = candidates.into_iter().flatten().collect();
    if candidates.is_empty() {
        return Err(SolverError::AllPairsDegenerate);
    }
    Ok(candidates)
}

/// Keeps the lowest-error `ceil(keep_fraction * count)` candidates as a
/// pose set tagged with `source`. Ties on error are broken by the pair
/// indices so the cut is reproducible.
pub fn filter_candidates(
    candidates: &[PoseCandidate],
    keep_fraction: f64,
    source: Branch,
) -> Result<PoseSet, SolverError> {
    debug_assert!(
        keep_fraction > 0.0 && keep_fraction <= 1.0,
        "keep_fraction {keep_fraction} outside (0, 1]"
    );
    if candidates.is_empty() {
        return Err(SolverError::EmptyInput);
    }

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        candidates[a]
            .error
            .total_cmp(&candidates[b].error)
            .then_with(|| candidates[a].pair.cmp(&candidates[b].pair))
    });

    let keep = (keep_fraction * candidates.len() as f64).ceil() as usize;
    let keep = keep.clamp(1, candidates.len());
    let poses = order[..keep].iter().map(|&i| candidates[i].transform).collect();
    Ok(PoseSet { poses, source })
}

/// Averages all poses across the given sets with equal per-pose weight:
/// the translation is the arithmetic mean and the rotation is the
/// quaternion-space mean, so the result is a proper rotation by
/// construction.
pub fn ensemble(sets: &[PoseSet]) -> Result<RigidTransform, SolverError> {
    let total: usize = sets.iter().map(|s| s.poses.len()).sum();
    if total == 0 {
        return Err(SolverError::EmptyInput);
    }

    let mut translation = Vec3::zeros();
    let mut rotations = Vec::with_capacity(total);
    for set in sets {
        for pose in &set.poses {
            translation += pose.translation;
            rotations.push(pose.rotation);
        }
    }
    translation /= total as f64;
    let rotation = rotation_mean(&rotations).expect("pose pool checked non-empty");
    Ok(RigidTransform::new(rotation, translation))
}
