use std::ops::Mul;

use nalgebra::{Matrix3, Matrix4, Quaternion, Rotation3, UnitQuaternion};

use super::{GeomError, Vec3};

/// A proper rotation: orthonormal 3x3 matrix with determinant +1.
///
/// Stored as a matrix; a unit-quaternion view is available through
/// [`Rotation::quaternion`] (q and -q denote the same rotation).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    m: Matrix3<f64>,
}

impl Rotation {
    pub fn identity() -> Self {
        Self { m: Matrix3::identity() }
    }

    /// Wraps a matrix that the caller guarantees to be a proper rotation.
    pub fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self { m }
    }

    pub fn from_quaternion(q: &UnitQuaternion<f64>) -> Self {
        Self { m: q.to_rotation_matrix().into_inner() }
    }

    /// Rotation by `angle` about `axis` (need not be unit length).
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let axis = nalgebra::Unit::new_normalize(*axis);
        Self { m: Rotation3::from_axis_angle(&axis, angle).into_inner() }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn quaternion(&self) -> UnitQuaternion<f64> {
        UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(self.m))
    }

    /// Inverse rotation (the transpose).
    pub fn inverse(&self) -> Self {
        Self { m: self.m.transpose() }
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.m * v
    }

    /// Largest deviation from orthonormality: max entry of |R^T R - I|
    /// together with |det(R) - 1|. Zero for an exact rotation.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.m.transpose() * self.m - Matrix3::identity();
        let det_err = (self.m.determinant() - 1.0).abs();
        gram.iter().fold(det_err, |acc, e| acc.max(e.abs()))
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation { m: self.m * rhs.m }
    }
}

impl Mul for &Rotation {
    type Output = Rotation;

    fn mul(self, rhs: &Rotation) -> Rotation {
        Rotation { m: self.m * rhs.m }
    }
}

/// Rotation by `alpha` about the +x axis, right-hand rule.
pub fn rot_x(alpha: f64) -> Rotation {
    let (s, c) = alpha.sin_cos();
    Rotation::from_matrix_unchecked(Matrix3::new(
        1.0, 0.0, 0.0, //
        0.0, c, -s, //
        0.0, s, c,
    ))
}

/// Angular distance between two rotations in radians, in [0, pi].
///
/// Mathematically this is arccos((trace(R1^T R2) - 1) / 2); it is evaluated
/// through the quaternion representation, which keeps full precision near 0
/// and pi where the arccos form bottoms out around 2e-8.
pub fn geodesic_angle(r1: &Rotation, r2: &Rotation) -> f64 {
    let q1 = r1.quaternion().into_inner().coords;
    let mut q2 = r2.quaternion().into_inner().coords;
    if q1.dot(&q2) < 0.0 {
        q2 = -q2;
    }
    4.0 * (q1 - q2).norm().atan2((q1 + q2).norm())
}

/// Chordal L2 mean of a set of rotations.
///
/// Returns the rotation whose unit quaternion maximizes the sum of squared
/// dot products with the inputs, computed as the principal eigenvector of
/// the 4x4 quaternion outer-product sum. Quaternions are sign-canonicalized
/// and accumulated in sorted order, so the result is bit-for-bit invariant
/// to list order and to per-element sign flips.
pub fn rotation_mean(rotations: &[Rotation]) -> Result<Rotation, GeomError> {
    if rotations.is_empty() {
        return Err(GeomError::EmptyInput);
    }
    let mut quats: Vec<nalgebra::Vector4<f64>> = rotations
        .iter()
        .map(|r| {
            let q = r.quaternion().into_inner().coords;
            match q.iter().find(|c| **c != 0.0) {
                Some(c) if *c < 0.0 => -q,
                _ => q,
            }
        })
        .collect();
    quats.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut accum = Matrix4::<f64>::zeros();
    for q in &quats {
        accum += q * q.transpose();
    }
    let eigen = nalgebra::SymmetricEigen::new(accum);
    let mut best = 0;
    for i in 1..4 {
        if eigen.eigenvalues[i] > eigen.eigenvalues[best] {
            best = i;
        }
    }
    let v = eigen.eigenvectors.column(best);
    let q = Quaternion::new(v[3], v[0], v[1], v[2]);
    Ok(Rotation::from_quaternion(&UnitQuaternion::from_quaternion(q)))
}
