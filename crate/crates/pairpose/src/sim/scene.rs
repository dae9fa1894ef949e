//! Scene synthesis: pose a model view, occlude, add depth noise,
//! re-estimate normals.
//!
//! The scene is an independent surface resample of the mesh, not a copy
//! of the model cloud, so scene and model points never correspond one to
//! one. Occlusion removes one contiguous patch, the nearest neighbors of
//! a random scene point, which mimics self-occlusion better than random
//! dropout. Scene normals are always re-estimated from the surviving
//! positions with the viewpoint at the camera origin, because a real
//! sensor never sees mesh normals.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cloud::{
    estimate_normals, load_mesh, sample_surface, Frame, OrientedCloud, TriangleMesh,
    DEFAULT_NORMAL_K,
};
use crate::geom::{Rotation, RigidTransform, Vec3};
use crate::rng::mix;

use super::{shapes, ScenarioConfig, SimError};

const SHAPE_STREAM: u64 = 0xB10B;
const MODEL_SAMPLE_STREAM: u64 = 1;
const RESAMPLE_STREAM: u64 = 2;
const POSE_STREAM: u64 = 3;
const OCCLUSION_STREAM: u64 = 4;
const DEPTH_NOISE_STREAM: u64 = 5;

/// One synthetic observation with its ground truth.
///
/// `scene` lives in the camera frame with re-estimated normals, `model`
/// in the model frame with mesh face normals. `visibility[i]` tells
/// whether the i-th resampled surface point survived occlusion; the
/// surviving points appear in `scene` in their original order.
#[derive(Debug, Clone)]
pub struct SceneInstance {
    pub gt_pose: RigidTransform,
    pub scene: OrientedCloud,
    pub model: OrientedCloud,
    pub visibility: Vec<bool>,
}

/// Draws a uniformly random rotation and a translation uniform in the
/// cube `[-range, range]^3`.
///
/// The rotation comes from four standard normal draws normalized to a
/// unit quaternion, which is the standard construction for the uniform
/// distribution on rotations.
pub fn sample_pose(seed: u64, translation_range: f64) -> RigidTransform {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, x, y, z): (f64, f64, f64, f64) = (
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    );
    let q = nalgebra::Quaternion::new(w, x, y, z);
    let rotation = Rotation::from_quaternion(&nalgebra::UnitQuaternion::from_quaternion(q));
    let translation = Vec3::new(
        rng.random_range(-translation_range..translation_range),
        rng.random_range(-translation_range..translation_range),
        rng.random_range(-translation_range..translation_range),
    );
    RigidTransform::new(rotation, translation)
}

/// Resolves the configured model source into a mesh.
///
/// `"cube"`, `"cylinder"` and `"blob"` are built in at fixed tabletop
/// dimensions; the blob shape is itself seeded from the scenario seed.
/// Anything else is treated as a mesh file path.
pub fn build_model_mesh(config: &ScenarioConfig) -> Result<TriangleMesh, SimError> {
    match config.model.as_str() {
        "cube" => Ok(shapes::cube(0.12)),
        "cylinder" => Ok(shapes::cylinder(0.045, 0.14, 48)),
        "blob" => Ok(shapes::blob(0.06, mix(config.seed, SHAPE_STREAM))),
        path => Ok(load_mesh(path)?),
    }
}

/// Builds the mesh named by the config and synthesizes one scene from it.
pub fn make_scene(config: &ScenarioConfig) -> Result<SceneInstance, SimError> {
    let mesh = build_model_mesh(config)?;
    make_scene_with_mesh(config, &mesh)
}

/// Synthesizes one scene from an already built mesh.
///
/// Splitting the mesh out lets a sweep build the object once and reuse it
/// across hundreds of scenes, the way a benchmark reuses one object model.
pub fn make_scene_with_mesh(
    config: &ScenarioConfig,
    mesh: &TriangleMesh,
) -> Result<SceneInstance, SimError> {
    config.validate()?;
    let seed = config.seed;
    let n = config.scene_points;

    let model = sample_surface(mesh, config.model_points, mix(seed, MODEL_SAMPLE_STREAM))?;
    let gt_pose = sample_pose(mix(seed, POSE_STREAM), config.translation_range);

    let resample = sample_surface(mesh, n, mix(seed, RESAMPLE_STREAM))?;
    let viewed = resample.transformed(&gt_pose, Frame::Camera);

    let removed = (config.occlusion_fraction * n as f64).ceil() as usize;
    let mut visibility = vec![true; n];
    if removed > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, OCCLUSION_STREAM));
        let patch_seed = viewed.points[rng.random_range(0..n)].position;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let da = (viewed.points[a].position - patch_seed).norm_squared();
            let db = (viewed.points[b].position - patch_seed).norm_squared();
            da.total_cmp(&db).then(a.cmp(&b))
        });
        for &i in &order[..removed] {
            visibility[i] = false;
        }
    }

    let mut positions: Vec<Vec3> = viewed
        .points
        .iter()
        .zip(&visibility)
        .filter(|(_, &visible)| visible)
        .map(|(p, _)| p.position)
        .collect();

    if config.depth_noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, DEPTH_NOISE_STREAM));
        for p in &mut positions {
            let eta = Vec3::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            );
            *p += config.depth_noise_sigma * eta;
        }
    }

    let estimated = estimate_normals(&positions, DEFAULT_NORMAL_K, &Vec3::zeros())?;

    Ok(SceneInstance {
        gt_pose,
        scene: estimated.cloud,
        model,
        visibility,
    })
}
