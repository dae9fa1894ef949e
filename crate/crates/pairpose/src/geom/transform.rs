use std::ops::Mul;

use super::{Rotation, Vec3};

/// Rigid transform `[R | t]`: rotation followed by translation.
///
/// In pipeline code this is always the model-to-camera pose unless a
/// variable name says otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RigidTransform {
    pub rotation: Rotation,
    pub translation: Vec3,
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(rotation: Rotation, translation: Vec3) -> Self {
        Self { rotation, translation }
    }

    pub fn from_rotation(rotation: Rotation) -> Self {
        Self { rotation, translation: Vec3::zeros() }
    }

    /// `R p + t`.
    pub fn apply_point(&self, p: &Vec3) -> Vec3 {
        self.rotation.apply(p) + self.translation
    }

    /// `R n`; normals carry no translation.
    pub fn apply_normal(&self, n: &Vec3) -> Vec3 {
        self.rotation.apply(n)
    }

    /// `[R^T | -R^T t]`.
    pub fn invert(&self) -> Self {
        let inv_rot = self.rotation.inverse();
        let translation = -inv_rot.apply(&self.translation);
        Self { rotation: inv_rot, translation }
    }
}

impl Mul for RigidTransform {
    type Output = RigidTransform;

    /// Composition: `(a * b)` applies `b` first, then `a`.
    fn mul(self, rhs: RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * rhs.rotation,
            translation: self.rotation.apply(&rhs.translation) + self.translation,
        }
    }
}

impl Mul for &RigidTransform {
    type Output = RigidTransform;

    fn mul(self, rhs: &RigidTransform) -> RigidTransform {
        *self * *rhs
    }
}

/// A surface point with its unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedPoint {
    pub position: Vec3,
    pub normal: Vec3,
}

impl OrientedPoint {
    /// Builds an oriented point, normalizing `normal`.
    pub fn new(position: Vec3, normal: Vec3) -> Self {
        debug_assert!(normal.norm() > 0.0, "oriented point needs a nonzero normal");
        Self { position, normal: normal.normalize() }
    }

    pub fn transformed(&self, t: &RigidTransform) -> Self {
        Self {
            position: t.apply_point(&self.position),
            normal: t.apply_normal(&self.normal),
        }
    }
}
