//! File formats for poses, correspondences and oriented clouds.
//!
//! Three formats cover the pipeline's borders:
//!
//! - poses as JSON objects `{"rotation": [r00, r01, ..., r22],
//!   "translation": [x, y, z]}` with the rotation in row-major order,
//!   either alone or as an array of such objects,
//! - correspondences as CSV with the fixed header
//!   `sx,sy,sz,snx,sny,snz,mx,my,mz,mnx,mny,mnz`, scene columns first,
//! - oriented clouds as ASCII PLY with per-vertex `x y z nx ny nz`.
//!
//! Readers validate what the types assume: rotations must be orthonormal
//! with determinant one within 1e-6, normals must have unit length. All
//! numbers are written in shortest round-trip form, so write followed by
//! read reproduces every value bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloud::{Frame, OrientedCloud};
use crate::geom::{OrientedPoint, RigidTransform, Rotation, Vec3};
use crate::solver::CorrespondenceSet;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: {msg}")]
    Invalid { path: PathBuf, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FileError + '_ {
    move |source| FileError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseJson {
    rotation: Vec<f64>,
    translation: [f64; 3],
}

impl PoseJson {
    fn from_transform(t: &RigidTransform) -> Self {
        let m = t.rotation.matrix();
        Self {
            rotation: (0..3)
                .flat_map(|r| (0..3).map(move |c| m[(r, c)]))
                .collect(),
            translation: [t.translation.x, t.translation.y, t.translation.z],
        }
    }

    fn into_transform(self, path: &Path) -> Result<RigidTransform, FileError> {
        if self.rotation.len() != 9 {
            return Err(FileError::Invalid {
                path: path.to_path_buf(),
                msg: format!("rotation has {} entries, expected 9", self.rotation.len()),
            });
        }
        let m = Matrix3::from_row_slice(&self.rotation);
        let rotation = Rotation::from_matrix_unchecked(m);
        let defect = rotation.orthonormality_defect();
        if defect.is_nan() || defect > 1e-6 {
            return Err(FileError::Invalid {
                path: path.to_path_buf(),
                msg: format!(
                    "rotation is not orthonormal with determinant +1 (defect {defect:.2e})"
                ),
            });
        }
        let t = Vec3::new(self.translation[0], self.translation[1], self.translation[2]);
        if !(self.rotation.iter().all(|v| v.is_finite()) && t.iter().all(|v| v.is_finite())) {
            return Err(FileError::Invalid {
                path: path.to_path_buf(),
                msg: "pose contains non-finite values".to_string(),
            });
        }
        Ok(RigidTransform::new(rotation, t))
    }
}

/// Renders one pose as the JSON object [`write_pose`] uses, without the
/// trailing newline.
pub fn pose_to_json(pose: &RigidTransform) -> String {
    serde_json::to_string_pretty(&PoseJson::from_transform(pose))
        .expect("pose serialization cannot fail")
}

/// Reads one pose from a JSON file.
pub fn read_pose(path: &Path) -> Result<RigidTransform, FileError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let pose: PoseJson = serde_json::from_str(&text).map_err(|e| FileError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    pose.into_transform(path)
}

/// Writes one pose as pretty-printed JSON.
pub fn write_pose(path: &Path, pose: &RigidTransform) -> Result<(), FileError> {
    let json = serde_json::to_string_pretty(&PoseJson::from_transform(pose))
        .expect("pose serialization cannot fail");
    fs::write(path, json + "\n").map_err(io_err(path))
}

/// Reads a JSON array of poses.
pub fn read_pose_set(path: &Path) -> Result<Vec<RigidTransform>, FileError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let poses: Vec<PoseJson> = serde_json::from_str(&text).map_err(|e| FileError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    poses.into_iter().map(|p| p.into_transform(path)).collect()
}

/// Writes poses as a pretty-printed JSON array.
pub fn write_pose_set(path: &Path, poses: &[RigidTransform]) -> Result<(), FileError> {
    let list: Vec<PoseJson> = poses.iter().map(PoseJson::from_transform).collect();
    let json = serde_json::to_string_pretty(&list).expect("pose serialization cannot fail");
    fs::write(path, json + "\n").map_err(io_err(path))
}

const CORR_HEADER: &str = "sx,sy,sz,snx,sny,snz,mx,my,mz,mnx,mny,mnz";

/// Reads a correspondence CSV into scene-side and model-side clouds.
pub fn read_correspondences(path: &Path) -> Result<CorrespondenceSet, FileError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let parse_err = |line: usize, msg: String| FileError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == CORR_HEADER => {}
        Some((_, header)) => {
            return Err(parse_err(
                1,
                format!("expected header `{CORR_HEADER}`, found `{}`", header.trim_end()),
            ))
        }
        None => return Err(parse_err(1, "file is empty".to_string())),
    }

    let mut camera = Vec::new();
    let mut model = Vec::new();
    for (index, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(parse_err(
                index + 1,
                format!("expected 12 fields, found {}", fields.len()),
            ));
        }
        let mut values = [0.0f64; 12];
        for (v, field) in values.iter_mut().zip(&fields) {
            *v = field.trim().parse().map_err(|_| {
                parse_err(index + 1, format!("`{}` is not a number", field.trim()))
            })?;
        }
        camera.push(OrientedPoint {
            position: Vec3::new(values[0], values[1], values[2]),
            normal: Vec3::new(values[3], values[4], values[5]),
        });
        model.push(OrientedPoint {
            position: Vec3::new(values[6], values[7], values[8]),
            normal: Vec3::new(values[9], values[10], values[11]),
        });
    }

    let camera = OrientedCloud::new(camera, Frame::Camera);
    let model = OrientedCloud::new(model, Frame::Model);
    for side in [&camera, &model] {
        side.validate().map_err(|e| FileError::Invalid {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
    }
    CorrespondenceSet::new(camera, model).map_err(|e| FileError::Invalid {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

/// Writes a correspondence set as CSV, scene columns first.
pub fn write_correspondences(path: &Path, corr: &CorrespondenceSet) -> Result<(), FileError> {
    let mut out = String::with_capacity(corr.len() * 96 + CORR_HEADER.len() + 1);
    out.push_str(CORR_HEADER);
    out.push('\n');
    for (cam, gen) in corr.camera().points.iter().zip(&corr.model().points) {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            cam.position.x,
            cam.position.y,
            cam.position.z,
            cam.normal.x,
            cam.normal.y,
            cam.normal.z,
            gen.position.x,
            gen.position.y,
            gen.position.z,
            gen.normal.x,
            gen.normal.y,
            gen.normal.z,
        )
        .expect("writing to a string cannot fail");
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Reads an oriented cloud from an ASCII PLY with `x y z nx ny nz`
/// vertex properties, tagging it with the given frame.
pub fn read_oriented_cloud(path: &Path, frame: Frame) -> Result<OrientedCloud, FileError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let ply = crate::cloud::ply::parse_ascii_ply(&text).map_err(|e| FileError::Parse {
        path: path.to_path_buf(),
        line: e.line,
        msg: e.msg,
    })?;
    let invalid = |msg: String| FileError::Invalid {
        path: path.to_path_buf(),
        msg,
    };
    let vertex = ply
        .element("vertex")
        .ok_or_else(|| invalid("missing vertex element".to_string()))?;
    let mut columns = [0usize; 6];
    for (slot, name) in columns.iter_mut().zip(["x", "y", "z", "nx", "ny", "nz"]) {
        *slot = vertex
            .scalar_index(name)
            .ok_or_else(|| invalid(format!("missing vertex property {name}")))?;
    }
    let points = vertex
        .rows
        .iter()
        .map(|row| OrientedPoint {
            position: Vec3::new(row[columns[0]], row[columns[1]], row[columns[2]]),
            normal: Vec3::new(row[columns[3]], row[columns[4]], row[columns[5]]),
        })
        .collect();
    let cloud = OrientedCloud::new(points, frame);
    cloud.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(cloud)
}

/// Writes an oriented cloud as ASCII PLY with `x y z nx ny nz`.
pub fn write_oriented_cloud(path: &Path, cloud: &OrientedCloud) -> Result<(), FileError> {
    let mut out = String::with_capacity(cloud.len() * 96 + 200);
    out.push_str("ply\nformat ascii 1.0\n");
    writeln!(out, "element vertex {}", cloud.len()).expect("writing to a string cannot fail");
    for name in ["x", "y", "z", "nx", "ny", "nz"] {
        writeln!(out, "property double {name}").expect("writing to a string cannot fail");
    }
    out.push_str("end_header\n");
    for p in &cloud.points {
        writeln!(
            out,
            "{} {} {} {} {} {}",
            p.position.x, p.position.y, p.position.z, p.normal.x, p.normal.y, p.normal.z
        )
        .expect("writing to a string cannot fail");
    }
    fs::write(path, out).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{make_scene, oracle_bcm_s, sample_pose, ScenarioConfig};

    fn tmp(name: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        (dir, path)
    }

    #[test]
    fn pose_roundtrip_is_exact() {
        let (_dir, path) = tmp("pose.json");
        for seed in 0..20 {
            let pose = sample_pose(seed, 0.5);
            write_pose(&path, &pose).unwrap();
            let back = read_pose(&path).unwrap();
            assert_eq!(back.rotation.matrix(), pose.rotation.matrix());
            assert_eq!(back.translation, pose.translation);
        }
    }

    #[test]
    fn pose_set_roundtrip_is_exact() {
        let (_dir, path) = tmp("poses.json");
        let poses: Vec<RigidTransform> = (0..7).map(|s| sample_pose(s, 0.5)).collect();
        write_pose_set(&path, &poses).unwrap();
        let back = read_pose_set(&path).unwrap();
        assert_eq!(back.len(), poses.len());
        for (a, b) in back.iter().zip(&poses) {
            assert_eq!(a.rotation.matrix(), b.rotation.matrix());
            assert_eq!(a.translation, b.translation);
        }
    }

    #[test]
    fn non_orthonormal_rotation_is_rejected() {
        let (_dir, path) = tmp("pose.json");
        fs::write(
            &path,
            r#"{"rotation": [1,0,0, 0,1,0, 0,0,1.01], "translation": [0,0,0]}"#,
        )
        .unwrap();
        assert!(matches!(
            read_pose(&path),
            Err(FileError::Invalid { msg, .. }) if msg.contains("orthonormal")
        ));
    }

    #[test]
    fn reflection_is_rejected() {
        let (_dir, path) = tmp("pose.json");
        fs::write(
            &path,
            r#"{"rotation": [1,0,0, 0,1,0, 0,0,-1], "translation": [0,0,0]}"#,
        )
        .unwrap();
        assert!(matches!(
            read_pose(&path),
            Err(FileError::Invalid { msg, .. }) if msg.contains("defect")
        ));
    }

    #[test]
    fn malformed_pose_json_reports_the_line() {
        let (_dir, path) = tmp("pose.json");
        fs::write(&path, "{\n  \"rotation\": [1,2\n").unwrap();
        match read_pose(&path) {
            Err(FileError::Parse { line, .. }) => assert!(line >= 2),
            other => panic!("expected Parse error, got {other:?}"),
        }
    }

    #[test]
    fn rotation_matrix_is_written_row_major() {
        let (_dir, path) = tmp("pose.json");
        let pose = RigidTransform::new(
            Rotation::from_axis_angle(&Vec3::z(), std::f64::consts::FRAC_PI_2),
            Vec3::new(1.0, 2.0, 3.0),
        );
        write_pose(&path, &pose).unwrap();
        let raw: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let r = raw["rotation"].as_array().unwrap();
        let m = pose.rotation.matrix();
        assert_eq!(r[1].as_f64().unwrap(), m[(0, 1)]);
        assert_eq!(r[3].as_f64().unwrap(), m[(1, 0)]);
        assert_eq!(raw["translation"][0].as_f64().unwrap(), 1.0);
    }

    fn test_correspondences(seed: u64) -> CorrespondenceSet {
        let config = ScenarioConfig {
            seed,
            model_points: 60,
            scene_points: 60,
            ..ScenarioConfig::default()
        };
        let instance = make_scene(&config).unwrap();
        oracle_bcm_s(&instance, 0.001, 0.1, seed).unwrap()
    }

    #[test]
    fn correspondence_roundtrip_is_exact() {
        let (_dir, path) = tmp("corr.csv");
        let corr = test_correspondences(5);
        write_correspondences(&path, &corr).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(CORR_HEADER));
        let back = read_correspondences(&path).unwrap();
        assert_eq!(back.len(), corr.len());
        for (a, b) in back.camera().points.iter().zip(&corr.camera().points) {
            assert_eq!(a.position, b.position);
            assert_eq!(a.normal, b.normal);
        }
        for (a, b) in back.model().points.iter().zip(&corr.model().points) {
            assert_eq!(a.position, b.position);
            assert_eq!(a.normal, b.normal);
        }
    }

    #[test]
    fn correspondence_errors_carry_path_and_line() {
        let (_dir, path) = tmp("corr.csv");
        fs::write(&path, "wrong,header\n").unwrap();
        match read_correspondences(&path) {
            Err(FileError::Parse { line: 1, msg, .. }) => assert!(msg.contains("header")),
            other => panic!("expected header error, got {other:?}"),
        }

        fs::write(&path, format!("{CORR_HEADER}\n1,2,3\n")).unwrap();
        match read_correspondences(&path) {
            Err(FileError::Parse { line: 2, msg, .. }) => assert!(msg.contains("12 fields")),
            other => panic!("expected field count error, got {other:?}"),
        }

        fs::write(
            &path,
            format!("{CORR_HEADER}\n0,0,0,0,0,1,0,0,0,0,0,1\n0,0,0,0,0,oops,0,0,0,0,0,1\n"),
        )
        .unwrap();
        match read_correspondences(&path) {
            Err(FileError::Parse { line: 3, msg, .. }) => assert!(msg.contains("oops")),
            other => panic!("expected number error, got {other:?}"),
        }
    }

    #[test]
    fn non_unit_normals_in_csv_are_rejected() {
        let (_dir, path) = tmp("corr.csv");
        fs::write(
            &path,
            format!("{CORR_HEADER}\n0,0,0,0,0,2,0,0,0,0,0,1\n"),
        )
        .unwrap();
        assert!(matches!(
            read_correspondences(&path),
            Err(FileError::Invalid { .. })
        ));
    }

    #[test]
    fn oriented_cloud_roundtrip_is_exact() {
        let (_dir, path) = tmp("cloud.ply");
        let config = ScenarioConfig {
            seed: 3,
            model_points: 80,
            scene_points: 80,
            ..ScenarioConfig::default()
        };
        let instance = make_scene(&config).unwrap();
        write_oriented_cloud(&path, &instance.scene).unwrap();
        let back = read_oriented_cloud(&path, Frame::Camera).unwrap();
        assert_eq!(back.len(), instance.scene.len());
        assert_eq!(back.frame, Frame::Camera);
        for (a, b) in back.points.iter().zip(&instance.scene.points) {
            assert_eq!(a.position, b.position);
            assert_eq!(a.normal, b.normal);
        }
    }

    #[test]
    fn cloud_without_normal_columns_is_rejected() {
        let (_dir, path) = tmp("cloud.ply");
        fs::write(
            &path,
            "ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\nproperty double y\nproperty double z\nend_header\n0 0 0\n",
        )
        .unwrap();
        assert!(matches!(
            read_oriented_cloud(&path, Frame::Model),
            Err(FileError::Invalid { msg, .. }) if msg.contains("nx")
        ));
    }

    #[test]
    fn missing_file_reports_io_error_with_path() {
        let err = read_pose(Path::new("/no/such/pose.json")).unwrap_err();
        assert!(err.to_string().contains("/no/such/pose.json"));
    }
}
