//! Experiment plumbing: configuration files, synthetic scenes and the
//! per-sample result table.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate, EstimatorConfig};
use crate::geometry::raster::project_target;
use crate::geometry::{builtin, render_with_edges, BinaryImage, CameraParams, Pose, Target};
use crate::partition::{PartitionConfig, PoseSpace};
use crate::store::CandidateStore;
use crate::witness::Tightening;

/// Pose-space bounds as written in configuration files: translation in
/// target units, angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseSpaceDegrees {
    pub lo: [f64; 6],
    pub hi: [f64; 6],
}

impl PoseSpaceDegrees {
    pub fn to_space(&self) -> Result<PoseSpace> {
        PoseSpace::from_degrees(self.lo, self.hi)
            .map_err(|e| Error::Config(format!("pose_space: {e}")))
    }
}

impl Default for PoseSpaceDegrees {
    fn default() -> Self {
        Self {
            lo: [-4.0, -4.0, 80.0, -6.0, -6.0, -6.0],
            hi: [4.0, 4.0, 110.0, 6.0, 6.0, 6.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Built-in target name or path to a target JSON file.
    pub target: String,
    pub camera: CameraParams,
    pub pose_space: PoseSpaceDegrees,
    pub partition: PartitionConfig,
    /// Noise budget as a fraction of `width * height`.
    pub noise: f64,
    pub samples: usize,
    pub seed: u64,
    pub tightening: Tightening,
    pub volume_samples: usize,
    /// Remove isolated on-pixels before estimation.
    pub denoise: bool,
    /// Minimum distance in pixels between projected vertices and the image
    /// border for sampled poses.
    pub margin: f64,
    /// Write phase timings to the table; off gives byte-identical reruns.
    pub timings: bool,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            target: "stripes".into(),
            camera: CameraParams::new(125.0, 100, 100).expect("valid camera"),
            pose_space: PoseSpaceDegrees::default(),
            partition: PartitionConfig::default(),
            noise: 0.0,
            samples: 50,
            seed: 0,
            tightening: Tightening::Boundary,
            volume_samples: 20_000,
            denoise: false,
            margin: 1.0,
            timings: true,
            out: PathBuf::from("certipose-out"),
        }
    }
}

impl ExperimentConfig {
    /// Reads TOML or JSON, chosen by file extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let cfg: Self = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => {
                serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
            }
            _ => toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.camera
            .validate()
            .map_err(|e| Error::Config(format!("camera: {e}")))?;
        self.pose_space.to_space()?;
        self.partition.validate()?;
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::Config(format!(
                "noise {} outside [0, 1]",
                self.noise
            )));
        }
        if self.volume_samples == 0 {
            return Err(Error::Config("volume_samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<PoseSpace> {
        self.pose_space.to_space()
    }

    pub fn load_target(&self) -> Result<Target> {
        resolve_target(&self.target)
    }

    /// Noise budget in pixels.
    pub fn noise_budget(&self) -> usize {
        (self.noise * self.camera.pixel_count() as f64).round() as usize
    }

    pub fn estimator(&self) -> EstimatorConfig {
        EstimatorConfig {
            noise_budget: self.noise_budget(),
            tightening: self.tightening,
            volume_samples: self.volume_samples,
            seed: self.seed,
        }
    }
}

/// A built-in name, or otherwise a path to a target JSON file.
pub fn resolve_target(spec: &str) -> Result<Target> {
    match builtin(spec) {
        Ok(t) => Ok(t),
        Err(_) if Path::new(spec).exists() => Target::load(Path::new(spec)),
        Err(_) => Err(Error::Config(format!(
            "unknown target '{spec}': not a built-in name and no such file"
        ))),
    }
}

/// A synthetic observation with its ground truth.
#[derive(Debug, Clone)]
pub struct Scene {
    pub pose: Pose,
    pub clean: BinaryImage,
    pub observed: BinaryImage,
    pub edges: BinaryImage,
}

/// True if every projected vertex lies at least `margin` pixels inside the
/// image.
pub fn vertices_in_view(target: &Target, cam: &CameraParams, pose: &Pose, margin: f64) -> bool {
    let Ok(polys) = project_target(target, cam, pose) else {
        return false;
    };
    let (w, h) = (cam.width as f64, cam.height as f64);
    polys.iter().flat_map(|p| &p.vertices).all(|v| {
        v[0] >= 0.5 + margin
            && v[0] <= w + 0.5 - margin
            && v[1] >= 0.5 + margin
            && v[1] <= h + 0.5 - margin
    })
}

/// Rejection-samples a pose whose target is fully in view, renders it and
/// flips `noise_budget` pixels that are not on a target edge.
pub fn sample_scene<R: Rng + ?Sized>(
    target: &Target,
    cam: &CameraParams,
    space: &PoseSpace,
    noise_budget: usize,
    margin: f64,
    rng: &mut R,
) -> Result<Scene> {
    for _ in 0..10_000 {
        let pose = space.sample(rng);
        if !vertices_in_view(target, cam, &pose, margin) {
            continue;
        }
        let (clean, edges) = render_with_edges(target, cam, &pose)?;
        let observed = if noise_budget > 0 {
            clean.apply_noise(noise_budget, rng, &edges)
        } else {
            clean.clone()
        };
        return Ok(Scene {
            pose,
            clean,
            observed,
            edges,
        });
    }
    Err(Error::Config(
        "no pose in the space keeps the target in view".into(),
    ))
}

/// One row of the experiment table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentRow {
    pub sample: usize,
    pub contained: bool,
    pub candidates_after_filter: usize,
    #[serde(rename = "timeFilter_s")]
    pub time_filter_s: f64,
    #[serde(rename = "timeRefine_s")]
    pub time_refine_s: f64,
    pub norm_vol_filter: f64,
    pub norm_vol_ours: f64,
}

/// Samples `cfg.samples` scenes and estimates each one from `store`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    target: &Target,
    store: &CandidateStore,
) -> Result<Vec<ExperimentRow>> {
    let space = cfg.space()?;
    let est_cfg = cfg.estimator();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::with_capacity(cfg.samples);
    for sample in 0..cfg.samples {
        let scene = sample_scene(
            target,
            &cfg.camera,
            &space,
            est_cfg.noise_budget,
            cfg.margin,
            &mut rng,
        )?;
        let obs = if cfg.denoise {
            scene.observed.denoise()
        } else {
            scene.observed
        };
        let est = estimate(&obs, store, &cfg.camera, target, &est_cfg)?;
        let s = &est.summary;
        rows.push(ExperimentRow {
            sample,
            contained: est.contains(&scene.pose),
            candidates_after_filter: s.candidates_after_filter,
            time_filter_s: if cfg.timings { s.time_filter_s } else { 0.0 },
            time_refine_s: if cfg.timings { s.time_refine_s } else { 0.0 },
            norm_vol_filter: s.norm_vol_filter,
            norm_vol_ours: s.norm_vol_ours,
        });
    }
    Ok(rows)
}

pub fn write_csv<W: std::io::Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_toml_and_json() {
        let cfg = ExperimentConfig::default();
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("c.toml");
        std::fs::write(&t, toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(ExperimentConfig::load(&t).unwrap(), cfg);
        let j = dir.path().join("c.json");
        std::fs::write(&j, serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(ExperimentConfig::load(&j).unwrap(), cfg);
    }

    #[test]
    fn partial_config_uses_defaults_and_rejects_typos() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(
            &p,
            "samples = 3\nnoise = 0.01\n[camera]\nfocal = 100.0\nwidth = 64\nheight = 48\n",
        )
        .unwrap();
        let cfg = ExperimentConfig::load(&p).unwrap();
        assert_eq!(cfg.samples, 3);
        assert_eq!(cfg.noise_budget(), 31);
        assert_eq!(cfg.target, "stripes");
        std::fs::write(&p, "sampels = 3\n").unwrap();
        assert!(matches!(ExperimentConfig::load(&p), Err(Error::Config(_))));
        std::fs::write(&p, "noise = 2.0\n").unwrap();
        assert!(matches!(ExperimentConfig::load(&p), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_target_is_a_config_error() {
        assert!(matches!(
            resolve_target("no-such-target"),
            Err(Error::Config(_))
        ));
        assert!(resolve_target("digits").is_ok());
    }

    #[test]
    fn sampled_scenes_keep_target_in_view() {
        let cfg = ExperimentConfig::default();
        let t = cfg.load_target().unwrap();
        let space = cfg.space().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let s = sample_scene(&t, &cfg.camera, &space, 50, 1.0, &mut rng).unwrap();
            assert!(vertices_in_view(&t, &cfg.camera, &s.pose, 1.0));
            assert!(space.contains(&s.pose));
            assert!(s.edges.is_subset_of(&s.clean));
            assert!(s.edges.is_subset_of(&s.observed));
            let flipped = s.clean.count_and_not(&s.observed) + s.observed.count_and_not(&s.clean);
            assert!(flipped > 0 && flipped <= 50);
        }
    }
}
