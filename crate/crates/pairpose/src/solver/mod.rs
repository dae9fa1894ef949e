//! Pose estimation from oriented correspondences.
//!
//! The main pipeline turns a correspondence set into a pose in three
//! steps, each exposed on its own:
//!
//! 1. [`generate_candidates`]: downsample to `z` spread-out
//!    correspondences with farthest point sampling, then build one pose
//!    hypothesis per ordered pair of selected indices from the two
//!    oriented anchor points;
//! 2. [`filter_candidates`]: keep the lowest-error fraction of the
//!    hypotheses, scored as the mean residual over all correspondences;
//! 3. [`ensemble`]: average the surviving poses of every branch, with the
//!    rotation mean taken in quaternion space.
//!
//! [`solve`] wires those steps for the scene-anchored and model-anchored
//! correspondence branches plus an optional externally regressed pose set,
//! and reports per-branch diagnostics. [`kabsch`] and [`ransac`] are
//! self-contained least-squares baselines over the same correspondence
//! type.
//!
//! Every returned pose maps model-frame coordinates into the camera
//! frame. All operations are deterministic given their seeds: parallel
//! loops write into index-ordered slots and every selection rule has an
//! explicit tie-break.

mod candidates;
mod kabsch;
mod ransac;

pub use candidates::{
    ensemble, filter_candidates, generate_candidates, score_candidate, score_candidate_camera,
};
pub use kabsch::kabsch;
pub use ransac::ransac;

use serde::Serialize;

use crate::cloud::{Frame, OrientedCloud};
use crate::geom::RigidTransform;
use crate::rng::mix;

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("need at least {needed} correspondences, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("every sampled point pair was degenerate for pose construction")]
    AllPairsDegenerate,
    #[error("no poses to combine")]
    EmptyInput,
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(&'static str),
    #[error("no hypothesis could be fitted from the sampled triples")]
    NoValidHypothesis,
    #[error("correspondence sides differ in length: camera {camera}, model {model}")]
    LengthMismatch { camera: usize, model: usize },
    #[error("{side}-side cloud carries the wrong frame tag")]
    FrameMismatch { side: &'static str },
}

/// Paired observations: `camera()[i]` and `model()[i]` are hypothesized to
/// be the same physical surface point, expressed in the camera and model
/// frames respectively.
///
/// Construction checks the frame tags and that both sides have the same
/// nonzero length, so holders of a value can rely on those invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceSet {
    camera: OrientedCloud,
    model: OrientedCloud,
}

impl CorrespondenceSet {
    pub fn new(camera: OrientedCloud, model: OrientedCloud) -> Result<Self, SolverError> {
        if camera.frame != Frame::Camera {
            return Err(SolverError::FrameMismatch { side: "camera" });
        }
        if model.frame != Frame::Model {
            return Err(SolverError::FrameMismatch { side: "model" });
        }
        if camera.len() != model.len() {
            return Err(SolverError::LengthMismatch { camera: camera.len(), model: model.len() });
        }
        if camera.is_empty() {
            return Err(SolverError::TooFewPoints { needed: 1, got: 0 });
        }
        Ok(Self { camera, model })
    }

    pub fn camera(&self) -> &OrientedCloud {
        &self.camera
    }

    pub fn model(&self) -> &OrientedCloud {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.camera.len()
    }

    pub fn is_empty(&self) -> bool {
        self.camera.is_empty()
    }
}

/// Which side of a correspondence set anchors the pair construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Scene-anchored: real camera points with predicted model mates.
    BcmS,
    /// Model-anchored: real model points with predicted camera mates.
    BcmM,
}

/// Origin tag of a pose set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Externally regressed poses.
    Pr,
    /// Poses from scene-anchored pairs.
    BcmS,
    /// Poses from model-anchored pairs.
    BcmM,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Pr => "PR",
            Branch::BcmS => "BCM-S",
            Branch::BcmM => "BCM-M",
        })
    }
}

impl From<Direction> for Branch {
    fn from(d: Direction) -> Self {
        match d {
            Direction::BcmS => Branch::BcmS,
            Direction::BcmM => Branch::BcmM,
        }
    }
}

/// One pose hypothesis built from the ordered pair of correspondence
/// indices `pair`, with its mean residual over the full set.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseCandidate {
    pub transform: RigidTransform,
    pub error: f64,
    pub pair: (usize, usize),
}

/// A group of poses from one branch.
#[derive(Debug, Clone)]
pub struct PoseSet {
    pub poses: Vec<RigidTransform>,
    pub source: Branch,
}

/// Tuning knobs for [`solve`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Number of correspondences kept per branch by farthest point
    /// sampling before pair enumeration.
    pub z: usize,
    /// Fraction of candidates kept after sorting by error.
    pub keep_fraction: f64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { z: 100, keep_fraction: 0.10, seed: 0 }
    }
}

/// Candidate-error summary and bookkeeping for one branch.
#[derive(Debug, Clone, Serialize)]
pub struct BranchReport {
    pub branch: String,
    pub correspondences: usize,
    pub candidates_generated: usize,
    pub candidates_kept: usize,
    pub error_min: f64,
    pub error_q25: f64,
    pub error_median: f64,
    pub error_q75: f64,
    pub error_max: f64,
    pub error_mean: f64,
}

/// What [`solve`] did: per-branch candidate statistics, pool sizes, and
/// any branches that were skipped.
#[derive(Debug, Clone, Serialize)]
pub struct SolveDiagnostics {
    pub scene_points: usize,
    pub model_points: usize,
    pub branches: Vec<BranchReport>,
    pub pr_pose_count: usize,
    pub pooled_pose_count: usize,
    pub warnings: Vec<String>,
}

fn branch_report(branch: Branch, correspondences: usize, candidates: &[PoseCandidate], kept: usize) -> BranchReport {
    let mut errors: Vec<f64> = candidates.iter().map(|c| c.error).collect();
    errors.sort_by(f64::total_cmp);
    let q = |p: f64| -> f64 {
        let idx = ((errors.len() - 1) as f64 * p).round() as usize;
        errors[idx]
    };
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    BranchReport {
        branch: branch.to_string(),
        correspondences,
        candidates_generated: candidates.len(),
        candidates_kept: kept,
        error_min: errors[0],
        error_q25: q(0.25),
        error_median: q(0.5),
        error_q75: q(0.75),
        error_max: errors[errors.len() - 1],
        error_mean: mean,
    }
}

/// Runs the full pipeline over the available branches and ensembles the
/// surviving poses.
///
/// A branch given as `None` is noted in the warnings; a branch that fails
/// (for example, every pair degenerate) is skipped with a warning rather
/// than aborting the solve. If nothing is left to ensemble, the first
/// branch error is propagated, or [`SolverError::EmptyInput`] when no pose
/// source was supplied at all.
pub fn solve(
    scene: &OrientedCloud,
    model: &OrientedCloud,
    bcm_s: Option<&CorrespondenceSet>,
    bcm_m: Option<&CorrespondenceSet>,
    pr_poses: Option<&PoseSet>,
    options: &SolveOptions,
) -> Result<(RigidTransform, SolveDiagnostics), SolverError> {
    if scene.frame != Frame::Camera {
        return Err(SolverError::FrameMismatch { side: "scene" });
    }
    if model.frame != Frame::Model {
        return Err(SolverError::FrameMismatch { side: "model" });
    }

    let mut diagnostics = SolveDiagnostics {
        scene_points: scene.len(),
        model_points: model.len(),
        branches: Vec::new(),
        pr_pose_count: 0,
        pooled_pose_count: 0,
        warnings: Vec::new(),
    };

    let mut sets: Vec<PoseSet> = Vec::new();
    let mut first_error: Option<SolverError> = None;

    let branches = [
        (Direction::BcmS, bcm_s, mix(options.seed, 0)),
        (Direction::BcmM, bcm_m, mix(options.seed, 1)),
    ];
    for (direction, corr, seed) in branches {
        let branch = Branch::from(direction);
        let Some(corr) = corr else {
            diagnostics.warnings.push(format!("{branch}: no correspondences supplied, branch skipped"));
            continue;
        };
        let run = generate_candidates(corr, options.z, seed, direction)
            .and_then(|candidates| {
                filter_candidates(&candidates, options.keep_fraction, branch).map(|set| (candidates, set))
            });
        match run {
            Ok((candidates, set)) => {
                diagnostics.branches.push(branch_report(branch, corr.len(), &candidates, set.poses.len()));
                sets.push(set);
            }
            Err(e) => {
                diagnostics.warnings.push(format!("{branch}: {e}, branch skipped"));
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }

    match pr_poses {
        Some(set) if !set.poses.is_empty() => {
            diagnostics.pr_pose_count = set.poses.len();
            sets.push(set.clone());
        }
        Some(_) => diagnostics.warnings.push("PR: empty pose set supplied, branch skipped".into()),
        None => diagnostics.warnings.push("PR: no pose set supplied, branch skipped".into()),
    }

    diagnostics.pooled_pose_count = sets.iter().map(|s| s.poses.len()).sum();
    if sets.is_empty() {
        return Err(first_error.unwrap_or(SolverError::EmptyInput));
    }

    let pose = ensemble(&sets)?;
    Ok((pose, diagnostics))
}
