//! SE(3) primitives and the oriented point-pair pose construction.
//!
//! Conventions used throughout the crate:
//!
//! - lengths are meters, angles radians, frames right-handed
//! - a pose is a [`RigidTransform`] `[R | t]` mapping model-frame
//!   coordinates into camera-frame coordinates
//! - normals are unit vectors and transform by rotation only
//!
//! The centerpiece is [`pair_pose`]: one oriented point pair and its
//! correspondent fully determine a rigid transform (anchor position,
//! anchor normal, and one in-plane angle). Everything else here is the
//! supporting algebra: rotations, transforms, averaging, and angular
//! distance.

mod pair;
mod rotation;
mod transform;

pub use pair::{align_to_x, pair_pose, PROJECTION_EPS};
pub use rotation::{geodesic_angle, rot_x, rotation_mean, Rotation};
pub use transform::{OrientedPoint, RigidTransform};

/// 3-vector of f64, the only vector type used in this crate.
pub type Vec3 = nalgebra::Vector3<f64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    /// The second point of a pair lies on the anchor's normal axis, so the
    /// in-plane angle is undefined.
    #[error("degenerate pair: second point lies on the anchor normal axis")]
    DegeneratePair,
    #[error("empty input")]
    EmptyInput,
}
