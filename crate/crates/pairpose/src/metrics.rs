//! Pose-quality metrics: average distance metrics over a model cloud,
//! threshold accuracy, area under the accuracy curve, and the paired
//! cloud loss.
//!
//! [`add`] and [`adds`] measure how far a predicted pose displaces the
//! model from its ground-truth placement, in meters: `add` matches points
//! by index, `adds` matches each ground-truth-placed point to its nearest
//! predicted-placed point, which is the appropriate measure for objects
//! whose symmetry makes index matching meaningless. [`accuracy_at`] and
//! [`auc`] aggregate per-scene errors into benchmark-style scores, and
//! [`bcm_loss`] is the position-plus-weighted-normal distance between two
//! equally sized oriented clouds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::OrientedCloud;
use crate::geom::{RigidTransform, Vec3};

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("model cloud is empty")]
    EmptyModel,
    #[error("no errors to aggregate")]
    EmptyInput,
    #[error("clouds differ in length: {generated} vs {target}")]
    LengthMismatch { generated: usize, target: usize },
}

/// Accuracy threshold given either directly in meters or relative to the
/// model diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyThreshold {
    Meters(f64),
    DiameterFraction(f64),
}

impl AccuracyThreshold {
    /// The threshold in meters for a model of the given diameter.
    pub fn resolved(&self, diameter: f64) -> f64 {
        match *self {
            AccuracyThreshold::Meters(m) => m,
            AccuracyThreshold::DiameterFraction(f) => f * diameter,
        }
    }
}

/// Knobs shared by the aggregate metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricConfig {
    /// Upper end of the threshold range the accuracy curve is integrated
    /// over, in meters.
    pub auc_max_threshold: f64,
    /// Number of grid points used for the integration.
    pub auc_steps: usize,
    /// Threshold used when reporting plain accuracy.
    pub accuracy_threshold: AccuracyThreshold,
    /// Weight of the normal term in [`bcm_loss`].
    pub lambda: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            auc_max_threshold: 0.10,
            auc_steps: 1000,
            accuracy_threshold: AccuracyThreshold::DiameterFraction(0.1),
            lambda: 0.05,
        }
    }
}

/// Mean index-matched distance between the model under `pred` and under
/// `gt`.
pub fn add(pred: &RigidTransform, gt: &RigidTransform, model_points: &[Vec3]) -> Result<f64, MetricError> {
    if model_points.is_empty() {
        return Err(MetricError::EmptyModel);
    }
    let sum: f64 = model_points
        .iter()
        .map(|x| (gt.apply_point(x) - pred.apply_point(x)).norm())
        .sum();
    Ok(sum / model_points.len() as f64)
}

/// Mean nearest-point distance from the model under `gt` to the model
/// under `pred`.
pub fn adds(pred: &RigidTransform, gt: &RigidTransform, model_points: &[Vec3]) -> Result<f64, MetricError> {
    if model_points.is_empty() {
        return Err(MetricError::EmptyModel);
    }
    let predicted: Vec<Vec3> = model_points.iter().map(|x| pred.apply_point(x)).collect();
    let distances: Vec<f64> = model_points
        .par_iter()
        .map(|x| {
            let q = gt.apply_point(x);
            predicted
                .iter()
                .map(|p| (p - q).norm_squared())
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .collect();
    Ok(distances.iter().sum::<f64>() / model_points.len() as f64)
}

/// Fraction of errors strictly below `threshold`.
pub fn accuracy_at(errors: &[f64], threshold: f64) -> Result<f64, MetricError> {
    if errors.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    debug_assert!(threshold > 0.0, "threshold must be positive");
    let below = errors.iter().filter(|&&e| e < threshold).count();
    Ok(below as f64 / errors.len() as f64)
}

/// Area under the accuracy-vs-threshold curve from zero to
/// `auc_max_threshold`, as a percentage of the ideal area.
///
/// The curve is sampled on a uniform grid and integrated with the
/// trapezoid rule. Accuracy uses a strict comparison, so at threshold
/// zero the integrand takes its right-limit (the fraction of exactly-zero
/// errors); otherwise an all-zero error list would lose half a grid cell
/// and score below 100.
pub fn auc(errors: &[f64], config: &MetricConfig) -> Result<f64, MetricError> {
    if errors.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    debug_assert!(config.auc_steps >= 2, "need at least two grid points");
    debug_assert!(config.auc_max_threshold > 0.0);

    let mut sorted: Vec<f64> = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let fraction_below = |t: f64| -> f64 { sorted.partition_point(|&e| e < t) as f64 / n };

    let steps = config.auc_steps;
    let max = config.auc_max_threshold;
    let dt = max / (steps - 1) as f64;
    let mut area = 0.0;
    let mut prev = sorted.partition_point(|&e| e <= 0.0) as f64 / n;
    for j in 1..steps {
        let f = fraction_below(j as f64 * dt);
        area += 0.5 * (prev + f);
        prev = f;
    }
    Ok(100.0 * area / (steps - 1) as f64)
}

/// Mean position distance plus `lambda`-weighted mean normal distance
/// between two index-aligned oriented clouds.
pub fn bcm_loss(generated: &OrientedCloud, target: &OrientedCloud, lambda: f64) -> Result<f64, MetricError> {
    if generated.len() != target.len() {
        return Err(MetricError::LengthMismatch { generated: generated.len(), target: target.len() });
    }
    if generated.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let sum: f64 = generated
        .points
        .iter()
        .zip(&target.points)
        .map(|(g, t)| (g.position - t.position).norm() + lambda * (g.normal - t.normal).norm())
        .sum();
    Ok(sum / generated.len() as f64)
}
