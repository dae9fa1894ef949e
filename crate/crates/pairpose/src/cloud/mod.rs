//! Oriented point clouds and the mesh-to-cloud pipeline.
//!
//! A cloud is an ordered list of oriented points tagged with the frame its
//! coordinates live in, so that camera-frame observations and model-frame
//! references cannot be mixed up silently. The submodules cover the path
//! from a triangle mesh to a usable cloud:
//!
//! * [`mesh`]: indexed triangle meshes, loaded from ASCII OBJ or PLY;
//! * [`sample`]: area-weighted surface sampling with face normals;
//! * [`normals`]: k-nearest-neighbor plane fits for clouds that arrive
//!   without normals, oriented toward a viewpoint;
//! * [`fps`]: farthest point sampling for picking spread-out seed indices.
//!
//! Queries that need no acceleration structure (nearest neighbor, cloud
//! diameter) live here; they are exact linear scans with deterministic
//! tie-breaking, not approximations.

mod fps;
mod mesh;
mod normals;
pub(crate) mod ply;
mod sample;

pub use fps::farthest_point_sampling;
pub use mesh::{load_mesh, TriangleMesh};
pub use normals::{estimate_normals, EstimatedNormals, DEFAULT_NORMAL_K};
pub use sample::sample_surface;

use crate::geom::{OrientedPoint, RigidTransform, Vec3};

/// Coordinate frame a cloud's points are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Sensor frame of the observed scene.
    Camera,
    /// Canonical frame of the reference model.
    Model,
}

#[derive(Debug, thiserror::Error)]
pub enum CloudError {
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("mesh has no vertices or no triangles with positive area")]
    EmptyMesh,
    #[error("cloud is empty")]
    EmptyCloud,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("sample count {z} out of range 1..={max}")]
    ZOutOfRange { z: usize, max: usize },
    #[error("point {index}: {msg}")]
    InvalidPoint { index: usize, msg: String },
}

/// An ordered list of oriented points in a known frame.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedCloud {
    pub points: Vec<OrientedPoint>,
    pub frame: Frame,
}

impl OrientedCloud {
    pub fn new(points: Vec<OrientedPoint>, frame: Frame) -> Self {
        Self { points, frame }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Positions only, in cloud order.
    pub fn positions(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| p.position).collect()
    }

    /// Applies a rigid transform to every point and retags the frame.
    pub fn transformed(&self, t: &RigidTransform, frame: Frame) -> Self {
        Self {
            points: self.points.iter().map(|p| p.transformed(t)).collect(),
            frame,
        }
    }

    /// Checks that every coordinate is finite and every normal has unit
    /// length within `1e-6`. Readers call this on ingested data; clouds
    /// built by this crate satisfy it by construction.
    pub fn validate(&self) -> Result<(), CloudError> {
        for (i, p) in self.points.iter().enumerate() {
            let finite =
                p.position.iter().all(|v| v.is_finite()) && p.normal.iter().all(|v| v.is_finite());
            if !finite {
                return Err(CloudError::InvalidPoint { index: i, msg: "non-finite coordinate".into() });
            }
            let len = p.normal.norm();
            if (len - 1.0).abs() > 1e-6 {
                return Err(CloudError::InvalidPoint {
                    index: i,
                    msg: format!("normal length {len} is not 1 within 1e-6"),
                });
            }
        }
        Ok(())
    }
}

/// Index and distance of the closest position to `query`, ties resolved to
/// the lowest index.
pub fn nearest_neighbor(cloud: &OrientedCloud, query: &Vec3) -> Result<(usize, f64), CloudError> {
    if cloud.is_empty() {
        return Err(CloudError::EmptyCloud);
    }
    let mut best = 0usize;
    let mut best_d2 = f64::INFINITY;
    for (i, p) in cloud.points.iter().enumerate() {
        let d2 = (p.position - query).norm_squared();
        if d2 < best_d2 {
            best = i;
            best_d2 = d2;
        }
    }
    Ok((best, best_d2.sqrt()))
}

/// Largest pairwise distance in the cloud, by exact exhaustive scan.
pub fn diameter(cloud: &OrientedCloud) -> Result<f64, CloudError> {
    if cloud.len() < 2 {
        return Err(CloudError::TooFewPoints { needed: 2, got: cloud.len() });
    }
    let pos: Vec<Vec3> = cloud.positions();
    let mut max_d2 = 0.0f64;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            let d2 = (pos[i] - pos[j]).norm_squared();
            if d2 > max_d2 {
                max_d2 = d2;
            }
        }
    }
    Ok(max_d2.sqrt())
}
