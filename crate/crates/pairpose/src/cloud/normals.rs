//! Normal estimation for position-only clouds.
//!
//! Each point's normal is the smallest-eigenvalue direction of the
//! covariance of its local neighborhood (the point itself plus its `k`
//! nearest others), flipped so it faces the viewpoint. That sign
//! convention makes the natural viewpoint the sensor origin, so the
//! resulting cloud is tagged with the camera frame.
//!
//! A plane fit cannot distinguish a surface patch from a curve: when the
//! two smallest eigenvalues nearly coincide the fitted direction is
//! arbitrary within a plane, and the point is flagged ambiguous instead of
//! being silently trusted.

use nalgebra::Matrix3;
use rayon::prelude::*;

use super::{CloudError, Frame, OrientedCloud};
use crate::geom::{OrientedPoint, Vec3};

/// Neighborhood size used when the caller has no reason to pick another.
pub const DEFAULT_NORMAL_K: usize = 10;

/// Ratio of the two smallest covariance eigenvalues above which the fitted
/// normal direction is reported as ambiguous.
const AMBIGUITY_RATIO: f64 = 0.99;

/// A cloud with estimated normals plus a per-point ambiguity mask aligned
/// with `cloud.points`.
#[derive(Debug, Clone)]
pub struct EstimatedNormals {
    pub cloud: OrientedCloud,
    pub ambiguous: Vec<bool>,
}

/// Estimates an oriented normal for every position.
///
/// Needs `k >= 3` and at least `k + 1` points. Neighborhoods are picked by
/// squared distance with index as tie-break, so the result is a pure
/// function of the inputs.
pub fn estimate_normals(positions: &[Vec3], k: usize, viewpoint: &Vec3) -> Result<EstimatedNormals, CloudError> {
    debug_assert!(k >= 3, "plane fit needs at least 3 neighbors, got k = {k}");
    if positions.len() < k + 1 {
        return Err(CloudError::TooFewPoints { needed: k + 1, got: positions.len() });
    }

    let fitted: Vec<(OrientedPoint, bool)> = (0..positions.len())
        .into_par_iter()
        .map(|i| fit_one(positions, k, viewpoint, i))
        .collect();

    let mut points = Vec::with_capacity(fitted.len());
    let mut ambiguous = Vec::with_capacity(fitted.len());
    for (p, a) in fitted {
        points.push(p);
        ambiguous.push(a);
    }
    Ok(EstimatedNormals { cloud: OrientedCloud::new(points, Frame::Camera), ambiguous })
}

fn fit_one(positions: &[Vec3], k: usize, viewpoint: &Vec3, i: usize) -> (OrientedPoint, bool) {
    let p = positions[i];

    let mut others: Vec<(f64, usize)> = positions
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, q)| ((q - p).norm_squared(), j))
        .collect();
    others.select_nth_unstable_by(k - 1, |a, b| {
        a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1))
    });
    others.truncate(k);

    let mut centroid = p;
    for &(_, j) in &others {
        centroid += positions[j];
    }
    centroid /= (k + 1) as f64;

    let mut cov = Matrix3::zeros();
    let d = p - centroid;
    cov += d * d.transpose();
    for &(_, j) in &others {
        let d = positions[j] - centroid;
        cov += d * d.transpose();
    }

    let eigen = cov.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let lambda_small = eigen.eigenvalues[order[0]].max(0.0);
    let lambda_mid = eigen.eigenvalues[order[1]].max(0.0);

    let mut normal: Vec3 = eigen.eigenvectors.column(order[0]).into_owned().normalize();
    if normal.dot(&(viewpoint - p)) < 0.0 {
        normal = -normal;
    }

    let ambiguous = lambda_mid <= 0.0 || lambda_small / lambda_mid > AMBIGUITY_RATIO;
    (OrientedPoint::new(p, normal), ambiguous)
}
