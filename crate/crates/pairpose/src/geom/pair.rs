//! Pose from one oriented point pair and its correspondent.
//!
//! An oriented anchor point fixes all but one degree of freedom of a rigid
//! transform: move the anchor to the origin and turn its normal onto +x.
//! A second point then pins the remaining rotation about x. Given a source
//! pair and a destination pair, the transform mapping one onto the other is
//!
//! ```text
//! phi = inverse(align(dst_anchor)) * rot_x(alpha) * align(src_anchor)
//! ```
//!
//! where `alpha` is the signed angle between the two second points after
//! each has been brought into its anchor's aligned frame and projected onto
//! the y-z plane.

use super::{GeomError, OrientedPoint, RigidTransform, Rotation, Vec3};
use nalgebra::Matrix3;

/// Minimum norm of the y-z projection of the second point in the aligned
/// frame. Below this the pair carries no in-plane angle information and is
/// rejected as degenerate.
pub const PROJECTION_EPS: f64 = 1e-8;

/// The transform taking `p.position` to the origin and `p.normal` to +x.
///
/// The rotation is the minimal-angle rotation about `normal x e_x`. When
/// the normal is exactly -x (axis undefined) the rotation is a half turn
/// about +z.
pub fn align_to_x(p: &OrientedPoint) -> RigidTransform {
    let n = p.normal;
    // n x e_x has components (0, n.z, -n.y), copied exactly, so the axis
    // direction stays accurate even arbitrarily close to the antipode.
    let sin2 = n.z * n.z + n.y * n.y;
    let rotation = if sin2 == 0.0 {
        if n.x >= 0.0 {
            Rotation::identity()
        } else {
            Rotation::from_matrix_unchecked(Matrix3::new(
                -1.0, 0.0, 0.0, //
                0.0, -1.0, 0.0, //
                0.0, 0.0, 1.0,
            ))
        }
    } else {
        let sin = sin2.sqrt();
        let (ay, az) = (n.z / sin, -n.y / sin);
        let k = 1.0 - n.x;
        Rotation::from_matrix_unchecked(Matrix3::new(
            n.x,
            -sin * az,
            sin * ay,
            sin * az,
            1.0 - k * az * az,
            k * ay * az,
            -sin * ay,
            k * ay * az,
            1.0 - k * ay * ay,
        ))
    };
    let translation = -rotation.apply(&p.position);
    RigidTransform { rotation, translation }
}

/// Rigid transform mapping the source pair onto the destination pair.
///
/// `src_anchor`/`src_other` and `dst_anchor`/`dst_other` are corresponding
/// pairs in two frames. The result maps `src_anchor.position` to
/// `dst_anchor.position` and `src_anchor.normal` to `dst_anchor.normal`
/// exactly (to roundoff), and turns the source's second point into the
/// destination's in-plane direction.
///
/// In the pipeline the source pair lives in model space and the destination
/// pair in camera space, so the result is a model-to-camera pose; callers
/// that feed the roles swapped invert the output.
pub fn pair_pose(
    src_anchor: &OrientedPoint,
    src_other: &Vec3,
    dst_anchor: &OrientedPoint,
    dst_other: &Vec3,
) -> Result<RigidTransform, GeomError> {
    let src_align = align_to_x(src_anchor);
    let dst_align = align_to_x(dst_anchor);
    let s = src_align.apply_point(src_other);
    let d = dst_align.apply_point(dst_other);
    if s.y.hypot(s.z) < PROJECTION_EPS || d.y.hypot(d.z) < PROJECTION_EPS {
        return Err(GeomError::DegeneratePair);
    }
    let alpha = d.z.atan2(d.y) - s.z.atan2(s.y);
    Ok(dst_align.invert() * RigidTransform::from_rotation(super::rot_x(alpha)) * src_align)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::geodesic_angle;
    use approx::assert_abs_diff_eq;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(rng: &mut impl RngExt) -> Vec3 {
        loop {
            let v = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 1e-2 && n <= 1.0 {
                return v / n;
            }
        }
    }

    fn random_transform(rng: &mut impl RngExt) -> RigidTransform {
        RigidTransform::new(
            Rotation::from_axis_angle(&random_unit(rng), rng.random_range(-3.1..3.1)),
            Vec3::new(
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
            ),
        )
    }

    #[test]
    fn align_identity_case() {
        let t = align_to_x(&OrientedPoint::new(Vec3::zeros(), Vec3::x()));
        assert_eq!(t.rotation.matrix(), &Matrix3::identity());
        assert_eq!(t.translation, Vec3::zeros());
    }

    #[test]
    fn align_quarter_turn_case() {
        // Normal +y goes to +x via a -pi/2 turn about z; the anchor lands at
        // the origin.
        let p = OrientedPoint::new(Vec3::new(1.0, 2.0, 3.0), Vec3::y());
        let t = align_to_x(&p);
        assert_abs_diff_eq!(t.apply_point(&p.position), Vec3::zeros(), epsilon = 1e-12);
        assert_abs_diff_eq!(t.rotation.apply(&p.normal), Vec3::x(), epsilon = 1e-12);
        let expected = Rotation::from_axis_angle(&Vec3::z(), -std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(t.rotation.matrix(), expected.matrix(), epsilon = 1e-12);
    }

    #[test]
    fn align_postconditions_hold_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut worst_pos: f64 = 0.0;
        let mut worst_norm: f64 = 0.0;
        let mut check = |p: OrientedPoint| {
            let t = align_to_x(&p);
            worst_pos = worst_pos.max(t.apply_point(&p.position).norm());
            worst_norm = worst_norm.max((t.rotation.apply(&p.normal) - Vec3::x()).norm());
            assert!(t.rotation.orthonormality_defect() < 1e-11);
        };
        for _ in 0..1_000_000 {
            let position = Vec3::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            check(OrientedPoint::new(position, random_unit(&mut rng)));
        }
        // Adversarial normals at and near the poles of the construction.
        for n in [
            Vec3::x(),
            -Vec3::x(),
            Vec3::new(-1.0, 1e-8, 0.0),
            Vec3::new(-1.0, -1e-12, 1e-12),
            Vec3::new(1.0, 1e-9, -1e-9),
            Vec3::new(-0.999_999_999, 4e-5, -2e-5),
        ] {
            check(OrientedPoint::new(Vec3::new(0.3, -0.7, 0.2), n));
        }
        assert!(worst_pos < 1e-11, "worst position residual {worst_pos:e}");
        assert!(worst_norm < 1e-11, "worst normal residual {worst_norm:e}");
    }

    #[test]
    fn pair_pose_identity_when_pairs_coincide() {
        let anchor = OrientedPoint::new(Vec3::new(0.2, 0.1, -0.4), Vec3::new(0.3, -0.5, 0.8));
        let other = Vec3::new(-0.6, 0.3, 0.2);
        let phi = pair_pose(&anchor, &other, &anchor, &other).unwrap();
        assert!(geodesic_angle(&phi.rotation, &Rotation::identity()) < 1e-12);
        assert!(phi.translation.norm() < 1e-12);
    }

    #[test]
    fn pair_pose_recovers_sampled_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..2000 {
            let t_star = random_transform(&mut rng);
            let src_anchor = OrientedPoint::new(
                Vec3::new(
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                ),
                random_unit(&mut rng),
            );
            let src_other = src_anchor.position
                + 0.2 * random_unit(&mut rng)
                + Vec3::new(0.05, 0.0, 0.0);
            let dst_anchor = src_anchor.transformed(&t_star);
            let dst_other = t_star.apply_point(&src_other);
            let phi = match pair_pose(&src_anchor, &src_other, &dst_anchor, &dst_other) {
                Ok(phi) => phi,
                Err(GeomError::DegeneratePair) => continue,
                Err(e) => panic!("unexpected error {e}"),
            };
            assert!(geodesic_angle(&phi.rotation, &t_star.rotation) <= 1e-9);
            assert!((phi.translation - t_star.translation).norm() <= 1e-9);
        }
    }

    #[test]
    fn pair_pose_anchor_exactness_under_noise() {
        // The second points disagree with any rigid motion, but the anchors
        // must still map exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..2000 {
            let src_anchor = OrientedPoint::new(
                Vec3::new(
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                ),
                random_unit(&mut rng),
            );
            let dst_anchor = OrientedPoint::new(
                Vec3::new(
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                ),
                random_unit(&mut rng),
            );
            let src_other = src_anchor.position + 0.3 * random_unit(&mut rng);
            let dst_other = dst_anchor.position + 0.3 * random_unit(&mut rng);
            let phi = match pair_pose(&src_anchor, &src_other, &dst_anchor, &dst_other) {
                Ok(phi) => phi,
                Err(_) => continue,
            };
            assert!((phi.apply_point(&src_anchor.position) - dst_anchor.position).norm() <= 1e-11);
            assert!((phi.apply_normal(&src_anchor.normal) - dst_anchor.normal).norm() <= 1e-11);
        }
    }

    #[test]
    fn pair_pose_rejects_on_axis_second_point() {
        let anchor = OrientedPoint::new(Vec3::new(0.1, 0.2, 0.3), Vec3::new(0.0, 0.6, 0.8));
        let on_axis = anchor.position + anchor.normal;
        let err = pair_pose(&anchor, &on_axis, &anchor, &(anchor.position + Vec3::x()));
        assert_eq!(err, Err(GeomError::DegeneratePair));
    }
}
