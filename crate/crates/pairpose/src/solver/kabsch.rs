//! Least-squares rigid alignment of paired points.

use nalgebra::Matrix3;

use super::{CorrespondenceSet, SolverError};
use crate::geom::{RigidTransform, Rotation, Vec3};

/// Smallest fraction of the dominant covariance eigenvalue the mid
/// eigenvalue may have before the model points count as collinear.
const COLLINEARITY_RATIO: f64 = 1e-12;

/// The rigid transform minimizing the summed squared distance between
/// transformed model points and their camera mates.
///
/// Centroids are subtracted, the cross-covariance is factored by singular
/// values, and the rotation sign is corrected so the result is always a
/// proper rotation. Needs at least three correspondences whose model
/// positions span a plane; collinear or coincident model points leave the
/// rotation underdetermined.
pub fn kabsch(corr: &CorrespondenceSet) -> Result<RigidTransform, SolverError> {
    let n = corr.len();
    if n < 3 {
        return Err(SolverError::TooFewPoints { needed: 3, got: n });
    }

    let camera = &corr.camera().points;
    let model = &corr.model().points;

    let mut camera_centroid = Vec3::zeros();
    let mut model_centroid = Vec3::zeros();
    for (s, m) in camera.iter().zip(model) {
        camera_centroid += s.position;
        model_centroid += m.position;
    }
    camera_centroid /= n as f64;
    model_centroid /= n as f64;

    let mut cross = Matrix3::zeros();
    let mut model_scatter = Matrix3::zeros();
    for (s, m) in camera.iter().zip(model) {
        let dm = m.position - model_centroid;
        let ds = s.position - camera_centroid;
        cross += dm * ds.transpose();
        model_scatter += dm * dm.transpose();
    }

    let mut eigenvalues: Vec<f64> = model_scatter.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    if eigenvalues[2] <= 0.0 {
        return Err(SolverError::DegenerateConfiguration("model points coincident"));
    }
    if eigenvalues[1] <= eigenvalues[2] * COLLINEARITY_RATIO {
        return Err(SolverError::DegenerateConfiguration("model points collinear"));
    }

    let svd = cross.svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut rotation = v_t.transpose() * u.transpose();
    if rotation.determinant() < 0.0 {
        let mut flip = Matrix3::identity();
        flip[(2, 2)] = -1.0;
        rotation = v_t.transpose() * flip * u.transpose();
    }
    let rotation = Rotation::from_matrix_unchecked(rotation);
    let translation = camera_centroid - rotation.apply(&model_centroid);
    Ok(RigidTransform::new(rotation, translation))
}
