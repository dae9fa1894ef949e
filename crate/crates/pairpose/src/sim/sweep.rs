//! Benchmark sweeps: one corruption variable, a grid of levels, many
//! scenes per level, several methods per scene.
//!
//! Scenes are independent jobs scheduled with rayon but written in grid
//! order, and every per-scene seed is derived from the base seed, the
//! level index and the scene index, so a report is byte-identical across
//! thread counts. A method failing on a scene records infinite errors
//! and counts as a failure in the aggregates; it never aborts the sweep.

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{diameter, Frame, OrientedCloud};
use crate::geom::geodesic_angle;
use crate::metrics::{accuracy_at, add, adds, auc, MetricConfig};
use crate::rng::mix;
use crate::solver::{kabsch, ransac, solve, CorrespondenceSet, PoseSet, SolveOptions};

use super::{
    build_model_mesh, make_scene_with_mesh, oracle_bcm_m, oracle_bcm_s, oracle_pr, ScenarioConfig,
    SceneInstance, SimError,
};

const BCM_S_STREAM: u64 = 10;
const BCM_M_STREAM: u64 = 11;
const PR_STREAM: u64 = 12;
const SOLVE_STREAM: u64 = 13;
const RANSAC_STREAM: u64 = 16;

const RANSAC_ITERATIONS: usize = 500;
const ADDS_ACCURACY_THRESHOLD: f64 = 0.02;

/// Which scenario field the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Occlusion,
    Z,
    CorrNoise,
    OutlierRatio,
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SweepVariable::Occlusion => "occlusion",
            SweepVariable::Z => "z",
            SweepVariable::CorrNoise => "corr_noise",
            SweepVariable::OutlierRatio => "outlier_ratio",
        };
        f.write_str(name)
    }
}

/// Pose estimation methods the sweep can compare.
///
/// `Bico` is the full two-branch ensemble, the `Only` variants ablate one
/// branch, and the baselines consume both correspondence sets pooled into
/// one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bico,
    BcmSOnly,
    BcmMOnly,
    Kabsch,
    Ransac,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Bico,
        Method::BcmSOnly,
        Method::BcmMOnly,
        Method::Kabsch,
        Method::Ransac,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::Bico => "bico",
            Method::BcmSOnly => "bcm_s_only",
            Method::BcmMOnly => "bcm_m_only",
            Method::Kabsch => "kabsch",
            Method::Ransac => "ransac",
        };
        f.write_str(name)
    }
}

fn default_scenes_per_value() -> usize {
    200
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

/// Full description of one sweep experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub sweep: SweepVariable,
    pub values: Vec<f64>,
    #[serde(default = "default_scenes_per_value")]
    pub scenes_per_value: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub metrics: MetricConfig,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let err = |field: &str, msg: String| {
            Err(SimError::InvalidConfig {
                field: field.to_string(),
                msg,
            })
        };
        if self.values.is_empty() {
            return err("values", "needs at least one level".into());
        }
        if self.scenes_per_value == 0 {
            return err("scenes_per_value", "must be positive".into());
        }
        if self.methods.is_empty() {
            return err("methods", "needs at least one method".into());
        }
        for &v in &self.values {
            if !v.is_finite() {
                return err("values", format!("{v} is not finite"));
            }
            apply_value(&self.scenario, self.sweep, v)?.validate()?;
        }
        self.scenario.validate()
    }
}

/// Returns the scenario with the swept field set to `value`.
fn apply_value(
    scenario: &ScenarioConfig,
    variable: SweepVariable,
    value: f64,
) -> Result<ScenarioConfig, SimError> {
    let mut out = scenario.clone();
    match variable {
        SweepVariable::Occlusion => out.occlusion_fraction = value,
        SweepVariable::CorrNoise => out.corr_noise_sigma = value,
        SweepVariable::OutlierRatio => out.outlier_ratio = value,
        SweepVariable::Z => {
            if value.fract() != 0.0 || value < 0.0 {
                return Err(SimError::InvalidConfig {
                    field: "values".to_string(),
                    msg: format!("z level {value} is not a non-negative integer"),
                });
            }
            out.z = value as usize;
        }
    }
    Ok(out)
}

/// One method's result on one scene.
#[derive(Debug, Clone, Serialize)]
pub struct SceneRecord {
    pub sweep: SweepVariable,
    pub value: f64,
    pub scene_id: usize,
    pub method: Method,
    pub add_m: f64,
    pub adds_m: f64,
    pub rot_deg: f64,
    pub trans_m: f64,
    /// Model cloud diameter for this scene, used by diameter-relative
    /// accuracy; not part of the CSV row.
    #[serde(skip)]
    diameter_m: f64,
}

/// Accuracy summary for one (level, method) cell.
#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub value: f64,
    pub method: Method,
    pub scenes: usize,
    pub failures: usize,
    pub add_auc: f64,
    pub adds_auc: f64,
    pub add_accuracy: f64,
    pub adds_accuracy: f64,
    pub mean_add_m: Option<f64>,
    pub median_add_m: f64,
    pub median_adds_m: f64,
    pub median_rot_deg: f64,
    pub median_trans_m: f64,
}

/// Everything a sweep produces: per-scene rows plus per-cell aggregates.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub sweep: SweepVariable,
    pub values: Vec<f64>,
    pub scenes_per_value: usize,
    pub records: Vec<SceneRecord>,
    pub aggregates: Vec<Aggregate>,
}

fn fmt_metric(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

impl Report {
    /// Writes one CSV row per scene and method.
    pub fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "sweep,value,scene_id,method,add_m,adds_m,rot_deg,trans_m")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.sweep,
                r.value,
                r.scene_id,
                r.method,
                fmt_metric(r.add_m),
                fmt_metric(r.adds_m),
                fmt_metric(r.rot_deg),
                fmt_metric(r.trans_m),
            )?;
        }
        Ok(())
    }

    /// Serializes the run metadata and per-cell aggregates as pretty
    /// JSON, leaving out the per-scene rows. Non-finite statistics
    /// become `null`.
    pub fn aggregates_json(&self) -> String {
        #[derive(Serialize)]
        struct View<'a> {
            sweep: SweepVariable,
            values: &'a [f64],
            scenes_per_value: usize,
            aggregates: &'a [Aggregate],
        }
        let view = View {
            sweep: self.sweep,
            values: &self.values,
            scenes_per_value: self.scenes_per_value,
            aggregates: &self.aggregates,
        };
        serde_json::to_string_pretty(&view).expect("report serialization cannot fail") + "\n"
    }

    /// Renders the aggregates as an aligned text table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:>12}  {:>10}  {:>7}  {:>8}  {:>8}  {:>9}  {:>9}  {:>12}  {:>12}\n",
            self.sweep.to_string(),
            "method",
            "scenes",
            "fail",
            "add_auc",
            "adds_auc",
            "add_acc",
            "med_add_cm",
            "med_rot_deg",
        ));
        for a in &self.aggregates {
            out.push_str(&format!(
                "{:>12}  {:>10}  {:>7}  {:>8}  {:>8.2}  {:>9.2}  {:>9.3}  {:>12.3}  {:>12.3}\n",
                format!("{:.4}", a.value),
                a.method.to_string(),
                a.scenes,
                a.failures,
                a.add_auc,
                a.adds_auc,
                a.add_accuracy,
                a.median_add_m * 100.0,
                a.median_rot_deg,
            ));
        }
        out
    }
}

fn median(sorted: &[f64]) -> f64 {
    if sorted.is_empty() {
        return f64::INFINITY;
    }
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn failure_record(
    variable: SweepVariable,
    value: f64,
    scene_id: usize,
    method: Method,
) -> SceneRecord {
    SceneRecord {
        sweep: variable,
        value,
        scene_id,
        method,
        add_m: f64::INFINITY,
        adds_m: f64::INFINITY,
        rot_deg: f64::INFINITY,
        trans_m: f64::INFINITY,
        diameter_m: f64::INFINITY,
    }
}

fn pooled_correspondences(
    bcm_s: &CorrespondenceSet,
    bcm_m: &CorrespondenceSet,
) -> CorrespondenceSet {
    let mut camera = bcm_s.camera().points.clone();
    camera.extend(bcm_m.camera().points.iter().cloned());
    let mut model = bcm_s.model().points.clone();
    model.extend(bcm_m.model().points.iter().cloned());
    CorrespondenceSet::new(
        OrientedCloud::new(camera, Frame::Camera),
        OrientedCloud::new(model, Frame::Model),
    )
    .expect("pooled sides have equal length and matching frames")
}

fn evaluate_scene(
    config: &SweepConfig,
    scenario: &ScenarioConfig,
    instance: &SceneInstance,
    scene_seed: u64,
    value: f64,
    scene_id: usize,
) -> Vec<SceneRecord> {
    let model_positions = instance.model.positions();
    let model_diameter = diameter(&instance.model).expect("model cloud is never empty");

    let bcm_s = oracle_bcm_s(
        instance,
        scenario.corr_noise_sigma,
        scenario.outlier_ratio,
        mix(scene_seed, BCM_S_STREAM),
    );
    let bcm_m = oracle_bcm_m(
        instance,
        scenario.corr_noise_sigma,
        scenario.outlier_ratio,
        mix(scene_seed, BCM_M_STREAM),
    );
    let pr = scenario.use_pr.then(|| {
        oracle_pr(
            &instance.gt_pose,
            scenario.pr_count,
            scenario.pr_rot_sigma_deg.to_radians(),
            scenario.pr_trans_sigma,
            mix(scene_seed, PR_STREAM),
        )
    });

    let options = SolveOptions {
        z: scenario.z,
        keep_fraction: scenario.keep_fraction,
        seed: mix(scene_seed, SOLVE_STREAM),
    };

    config
        .methods
        .iter()
        .map(|&method| {
            let estimate = match method {
                Method::Bico => run_solve(instance, bcm_s.as_ref().ok(), bcm_m.as_ref().ok(), pr.as_ref(), &options),
                Method::BcmSOnly => run_solve(instance, bcm_s.as_ref().ok(), None, None, &options),
                Method::BcmMOnly => run_solve(instance, None, bcm_m.as_ref().ok(), None, &options),
                Method::Kabsch => match (&bcm_s, &bcm_m) {
                    (Ok(s), Ok(m)) => kabsch(&pooled_correspondences(s, m)).ok(),
                    _ => None,
                },
                Method::Ransac => match (&bcm_s, &bcm_m) {
                    (Ok(s), Ok(m)) => ransac(
                        &pooled_correspondences(s, m),
                        0.05 * model_diameter,
                        RANSAC_ITERATIONS,
                        mix(scene_seed, RANSAC_STREAM),
                    )
                    .ok(),
                    _ => None,
                },
            };
            match estimate {
                Some(pose) => {
                    let add_m = add(&pose, &instance.gt_pose, &model_positions)
                        .expect("model positions are non-empty");
                    let adds_m = adds(&pose, &instance.gt_pose, &model_positions)
                        .expect("model positions are non-empty");
                    SceneRecord {
                        sweep: config.sweep,
                        value,
                        scene_id,
                        method,
                        add_m,
                        adds_m,
                        rot_deg: geodesic_angle(&pose.rotation, &instance.gt_pose.rotation)
                            .to_degrees(),
                        trans_m: (pose.translation - instance.gt_pose.translation).norm(),
                        diameter_m: model_diameter,
                    }
                }
                None => failure_record(config.sweep, value, scene_id, method),
            }
        })
        .collect()
}

fn run_solve(
    instance: &SceneInstance,
    bcm_s: Option<&CorrespondenceSet>,
    bcm_m: Option<&CorrespondenceSet>,
    pr: Option<&PoseSet>,
    options: &SolveOptions,
) -> Option<crate::geom::RigidTransform> {
    solve(&instance.scene, &instance.model, bcm_s, bcm_m, pr, options)
        .map(|(pose, _)| pose)
        .ok()
}

fn aggregate_cell(
    value: f64,
    method: Method,
    rows: &[&SceneRecord],
    metrics: &MetricConfig,
) -> Aggregate {
    let scenes = rows.len();
    let failures = rows.iter().filter(|r| !r.add_m.is_finite()).count();
    let adds_errors: Vec<f64> = rows.iter().map(|r| r.adds_m).collect();
    let add_errors: Vec<f64> = rows.iter().map(|r| r.add_m).collect();

    let add_pass = rows
        .iter()
        .filter(|r| r.add_m < 0.1 * r.diameter_m && r.add_m.is_finite())
        .count();

    let mut sorted_add = add_errors.clone();
    sorted_add.sort_by(f64::total_cmp);
    let mut sorted_adds = adds_errors.clone();
    sorted_adds.sort_by(f64::total_cmp);
    let mut sorted_rot: Vec<f64> = rows.iter().map(|r| r.rot_deg).collect();
    sorted_rot.sort_by(f64::total_cmp);
    let mut sorted_trans: Vec<f64> = rows.iter().map(|r| r.trans_m).collect();
    sorted_trans.sort_by(f64::total_cmp);

    let mean_add_m = if failures == 0 {
        Some(add_errors.iter().sum::<f64>() / scenes as f64)
    } else {
        None
    };

    Aggregate {
        value,
        method,
        scenes,
        failures,
        add_auc: auc(&add_errors, metrics).unwrap_or(0.0),
        adds_auc: auc(&adds_errors, metrics).unwrap_or(0.0),
        add_accuracy: add_pass as f64 / scenes as f64,
        adds_accuracy: accuracy_at(&adds_errors, ADDS_ACCURACY_THRESHOLD).unwrap_or(0.0),
        mean_add_m,
        median_add_m: median(&sorted_add),
        median_adds_m: median(&sorted_adds),
        median_rot_deg: median(&sorted_rot),
        median_trans_m: median(&sorted_trans),
    }
}

/// Runs the whole grid and aggregates per (level, method) cell.
///
/// The object mesh is built once from the base scenario, then each scene
/// gets the seed `mix(mix(base, level_index), scene_index)`, so levels
/// and scenes are statistically independent but fully reproducible.
pub fn run_sweep(config: &SweepConfig) -> Result<Report, SimError> {
    config.validate()?;
    let mesh = build_model_mesh(&config.scenario)?;

    let jobs: Vec<(usize, usize)> = (0..config.values.len())
        .flat_map(|ci| (0..config.scenes_per_value).map(move |si| (ci, si)))
        .collect();

    let per_scene: Vec<Vec<SceneRecord>> = jobs
        .par_iter()
        .map(|&(ci, si)| {
            let value = config.values[ci];
            let mut scenario = apply_value(&config.scenario, config.sweep, value)
                .expect("validated before the run");
            let scene_seed = mix(mix(config.scenario.seed, ci as u64), si as u64);
            scenario.seed = scene_seed;
            match make_scene_with_mesh(&scenario, &mesh) {
                Ok(instance) => {
                    evaluate_scene(config, &scenario, &instance, scene_seed, value, si)
                }
                Err(_) => config
                    .methods
                    .iter()
                    .map(|&m| failure_record(config.sweep, value, si, m))
                    .collect(),
            }
        })
        .collect();
    let records: Vec<SceneRecord> = per_scene.into_iter().flatten().collect();

    let mut aggregates = Vec::with_capacity(config.values.len() * config.methods.len());
    for (ci, &value) in config.values.iter().enumerate() {
        for &method in &config.methods {
            let rows: Vec<&SceneRecord> = records
                [ci * config.scenes_per_value * config.methods.len()..]
                .iter()
                .take(config.scenes_per_value * config.methods.len())
                .filter(|r| r.method == method)
                .collect();
            aggregates.push(aggregate_cell(value, method, &rows, &config.metrics));
        }
    }

    Ok(Report {
        sweep: config.sweep,
        values: config.values.clone(),
        scenes_per_value: config.scenes_per_value,
        records,
        aggregates,
    })
}
