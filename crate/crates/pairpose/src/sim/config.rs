//! Scenario parameters for the synthetic benchmark.
//!
//! A `ScenarioConfig` fully determines one scene family: the object, the
//! sampling densities, every corruption level, and the solver settings.
//! Identical configs reproduce identical scenes bit for bit, so configs
//! double as experiment identifiers in sweep reports.

use serde::{Deserialize, Serialize};

use super::SimError;

/// All knobs of one synthetic scenario.
///
/// `model` names a built-in shape (`"cube"`, `"cylinder"`, `"blob"`) or
/// gives a mesh file path. Fractions are of the scene resample count `N`;
/// noise sigmas are in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub model: String,
    pub model_points: usize,
    pub scene_points: usize,
    pub occlusion_fraction: f64,
    pub depth_noise_sigma: f64,
    pub corr_noise_sigma: f64,
    pub outlier_ratio: f64,
    pub z: usize,
    pub keep_fraction: f64,
    pub translation_range: f64,
    pub use_pr: bool,
    pub pr_count: usize,
    pub pr_rot_sigma_deg: f64,
    pub pr_trans_sigma: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            model: "blob".to_string(),
            model_points: 1000,
            scene_points: 1000,
            occlusion_fraction: 0.0,
            depth_noise_sigma: 0.0,
            corr_noise_sigma: 0.0,
            outlier_ratio: 0.0,
            z: 100,
            keep_fraction: 0.10,
            translation_range: 0.5,
            use_pr: false,
            pr_count: 100,
            pr_rot_sigma_deg: 3.0,
            pr_trans_sigma: 0.003,
        }
    }
}

impl ScenarioConfig {
    /// Checks every field range and the interactions that would make a
    /// scene unbuildable, such as occlusion leaving too few survivors for
    /// normal estimation.
    pub fn validate(&self) -> Result<(), SimError> {
        let err = |field: &str, msg: String| {
            Err(SimError::InvalidConfig {
                field: field.to_string(),
                msg,
            })
        };
        if self.model.is_empty() {
            return err("model", "must name a shape or a mesh file".into());
        }
        if self.model_points == 0 {
            return err("model_points", "must be positive".into());
        }
        if self.scene_points == 0 {
            return err("scene_points", "must be positive".into());
        }
        if !(0.0..1.0).contains(&self.occlusion_fraction) {
            return err(
                "occlusion_fraction",
                format!("{} is outside [0, 1)", self.occlusion_fraction),
            );
        }
        if !(0.0..1.0).contains(&self.outlier_ratio) {
            return err(
                "outlier_ratio",
                format!("{} is outside [0, 1)", self.outlier_ratio),
            );
        }
        for (field, value) in [
            ("depth_noise_sigma", self.depth_noise_sigma),
            ("corr_noise_sigma", self.corr_noise_sigma),
            ("pr_rot_sigma_deg", self.pr_rot_sigma_deg),
            ("pr_trans_sigma", self.pr_trans_sigma),
        ] {
            if !value.is_finite() || value < 0.0 {
                return err(field, format!("{value} must be finite and non-negative"));
            }
        }
        if self.z < 2 {
            return err("z", format!("{} anchors cannot form a pair", self.z));
        }
        if !(self.keep_fraction > 0.0 && self.keep_fraction <= 1.0) {
            return err(
                "keep_fraction",
                format!("{} is outside (0, 1]", self.keep_fraction),
            );
        }
        if !(self.translation_range.is_finite() && self.translation_range > 0.0) {
            return err(
                "translation_range",
                format!("{} must be positive", self.translation_range),
            );
        }
        if self.use_pr && self.pr_count == 0 {
            return err("pr_count", "must be positive when use_pr is set".into());
        }
        let removed = (self.occlusion_fraction * self.scene_points as f64).ceil() as usize;
        let survivors = self.scene_points.saturating_sub(removed);
        let needed = crate::cloud::DEFAULT_NORMAL_K + 1;
        if survivors < needed {
            return err(
                "occlusion_fraction",
                format!("leaves {survivors} scene points, normal estimation needs {needed}"),
            );
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let config = ScenarioConfig::default();
        config.validate().unwrap();
        assert_eq!(config.model, "blob");
        assert_eq!(config.z, 100);
        assert_eq!(config.keep_fraction, 0.10);
        assert_eq!((config.model_points, config.scene_points), (1000, 1000));
    }

    type Mutator = fn(&mut ScenarioConfig);

    #[test]
    fn out_of_range_fields_name_themselves() {
        let cases: Vec<(&str, Mutator)> = vec![
            ("occlusion_fraction", |c| c.occlusion_fraction = 1.0),
            ("outlier_ratio", |c| c.outlier_ratio = -0.1),
            ("z", |c| c.z = 1),
            ("keep_fraction", |c| c.keep_fraction = 0.0),
            ("corr_noise_sigma", |c| c.corr_noise_sigma = f64::NAN),
            ("translation_range", |c| c.translation_range = 0.0),
            ("model_points", |c| c.model_points = 0),
        ];
        for (field, mutate) in cases {
            let mut config = ScenarioConfig::default();
            mutate(&mut config);
            match config.validate() {
                Err(SimError::InvalidConfig { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected InvalidConfig for {field}, got {other:?}"),
            }
        }
    }

    #[test]
    fn heavy_occlusion_on_a_tiny_scene_is_rejected() {
        let config = ScenarioConfig {
            scene_points: 20,
            occlusion_fraction: 0.6,
            ..ScenarioConfig::default()
        };
        assert!(matches!(
            config.validate(),
            Err(SimError::InvalidConfig { field, .. }) if field == "occlusion_fraction"
        ));
    }

    #[test]
    fn toml_roundtrip_and_unknown_keys() {
        let config = ScenarioConfig {
            seed: 7,
            occlusion_fraction: 0.4,
            ..ScenarioConfig::default()
        };
        let text = toml::to_string(&config).unwrap();
        let back: ScenarioConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, config);

        let sparse: ScenarioConfig = toml::from_str("seed = 3\nz = 50\n").unwrap();
        assert_eq!(sparse.seed, 3);
        assert_eq!(sparse.z, 50);
        assert_eq!(sparse.keep_fraction, 0.10);

        assert!(toml::from_str::<ScenarioConfig>("zz = 50\n").is_err());
    }
}
