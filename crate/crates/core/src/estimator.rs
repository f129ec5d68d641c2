//! Online phase: filter precomputed candidates against an observed image and
//! refine the survivors into constrained pose sets.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::forward::PoseCandidateArtifacts;
use crate::geometry::polytope::Point2;
use crate::geometry::{BinaryImage, CameraParams, Pose, Target};
use crate::preimage::{preimage_constraints, stack, ConstrainedPoseSet, Constraints};
use crate::store::CandidateStore;
use crate::witness::{
    collect_witnesses, is_standalone, own_surroundings, tighten_boundary, triangle_filter,
    witness_polytope, Tightening,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    /// Noise budget: maximum number of flipped pixels.
    pub noise_budget: usize,
    /// Tightening for standalone vertices. The triangle step is skipped when
    /// `noise_budget > 0`.
    pub tightening: Tightening,
    /// Monte Carlo samples per piece for the volume report.
    pub volume_samples: usize,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            noise_budget: 0,
            tightening: Tightening::Boundary,
            volume_samples: 20_000,
            seed: 0,
        }
    }
}

/// One refined candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatePiece {
    pub candidate_index: usize,
    pub set: ConstrainedPoseSet,
    pub feasible: bool,
    pub volume_estimate: f64,
    pub volume_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EstimateSummary {
    pub candidates: usize,
    pub candidates_after_filter: usize,
    pub time_filter_s: f64,
    pub time_refine_s: f64,
    /// Volume of the surviving candidate boxes over the pose-space volume.
    pub norm_vol_filter: f64,
    /// Estimated volume of the refined pieces over the pose-space volume.
    pub norm_vol_ours: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedPoseEstimate {
    pub pieces: Vec<EstimatePiece>,
    pub summary: EstimateSummary,
}

impl CertifiedPoseEstimate {
    pub fn contains(&self, pose: &Pose) -> bool {
        self.pieces
            .iter()
            .any(|p| p.feasible && p.set.contains(pose))
    }

    /// True if some surviving candidate box (before refinement) holds `pose`.
    pub fn filter_contains(&self, pose: &Pose) -> bool {
        self.pieces
            .iter()
            .any(|p| p.set.base.contains(pose, crate::preimage::CONTAINS_TOL))
    }

    /// Pieces as `{candidateIndex, o, Gdiag, C, d, feasible, volumeEstimate}`
    /// plus the summary record.
    pub fn to_json(&self) -> serde_json::Value {
        let pieces: Vec<_> = self
            .pieces
            .iter()
            .map(|p| {
                json!({
                    "candidateIndex": p.candidate_index,
                    "o": p.set.base.center(),
                    "Gdiag": p.set.base.radius(),
                    "C": p.set.constraints.c,
                    "d": p.set.constraints.d,
                    "feasible": p.feasible,
                    "volumeEstimate": p.volume_estimate,
                    "volumeStderr": p.volume_stderr,
                })
            })
            .collect();
        json!({ "pieces": pieces, "summary": self.summary })
    }
}

/// Cheap necessary condition for the candidate to have produced `obs`: at
/// most `noise_budget` on-pixels fall outside the outer image, and every
/// vertex region sees at least one on-pixel.
pub fn filter_candidate(
    obs: &BinaryImage,
    art: &PoseCandidateArtifacts,
    noise_budget: usize,
) -> bool {
    obs.count_and_not(&art.outer_image) <= noise_budget
        && art
            .vertices
            .iter()
            .flatten()
            .all(|v| v.bitmap.intersects(obs))
}

/// Outward bisector of the corner at vertex `k` of the projected polygon.
pub fn outward_direction(projection: &[Point2], k: usize) -> Point2 {
    let n = projection.len();
    let v = projection[k];
    let unit = |p: Point2| {
        let d = [p[0] - v[0], p[1] - v[1]];
        let l = d[0].hypot(d[1]);
        if l > 0.0 {
            [d[0] / l, d[1] / l]
        } else {
            [0.0, 0.0]
        }
    };
    let a = unit(projection[(k + n - 1) % n]);
    let b = unit(projection[(k + 1) % n]);
    let d = [-(a[0] + b[0]), -(a[1] + b[1])];
    let len = d[0].hypot(d[1]);
    if len > 1e-12 {
        [d[0] / len, d[1] / len]
    } else {
        // Degenerate corner: fall back to the direction away from the centroid.
        let c = projection.iter().fold([0.0, 0.0], |acc, p| {
            [acc[0] + p[0] / n as f64, acc[1] + p[1] / n as f64]
        });
        let d = [v[0] - c[0], v[1] - c[1]];
        let len = d[0].hypot(d[1]);
        if len > 0.0 {
            [d[0] / len, d[1] / len]
        } else {
            [1.0, 0.0]
        }
    }
}

fn vertex_constraints(
    obs: &BinaryImage,
    art: &PoseCandidateArtifacts,
    i: usize,
    k: usize,
    cfg: &EstimatorConfig,
) -> Result<Constraints> {
    let vertex = &art.vertices[i][k];
    let mut w = collect_witnesses(obs, &vertex.bitmap, i, k)?;
    if cfg.tightening != Tightening::None {
        let siblings = art.vertices[i]
            .iter()
            .enumerate()
            .filter(|&(kk, _)| kk != k)
            .map(|(_, v)| &v.bitmap);
        let foreign = || {
            art.polygon_images
                .iter()
                .enumerate()
                .filter(|&(ii, _)| ii != i)
                .map(|(_, img)| img)
        };
        if is_standalone(&vertex.bitmap, siblings.chain(foreign())) {
            let outward = outward_direction(&art.center_projection[i], k);
            let outside = own_surroundings(obs, &vertex.bitmap, foreign());
            w = tighten_boundary(&w, outward, cfg.noise_budget, &outside);
            if cfg.tightening == Tightening::BoundaryTriangle && cfg.noise_budget == 0 {
                w = triangle_filter(&w, [-outward[1], outward[0]], obs);
            }
        }
    }
    let u = witness_polytope(&w)?;
    Ok(preimage_constraints(vertex, &u))
}

/// Constraints from the witness pixels of every vertex; the infeasible
/// sentinel if some vertex has none.
pub fn refine_candidate(
    obs: &BinaryImage,
    art: &PoseCandidateArtifacts,
    cfg: &EstimatorConfig,
) -> ConstrainedPoseSet {
    let mut blocks = Vec::new();
    for i in 0..art.vertices.len() {
        for k in 0..art.vertices[i].len() {
            match vertex_constraints(obs, art, i, k, cfg) {
                Ok(c) => blocks.push(c),
                Err(_) => return ConstrainedPoseSet::infeasible(art.pose.clone()),
            }
        }
    }
    ConstrainedPoseSet::new(art.pose.clone(), stack(&blocks))
}

fn piece_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Runs filter and refinement over `candidates`. `space_volume` normalizes
/// the reported volumes.
pub fn estimate_candidates(
    obs: &BinaryImage,
    candidates: &[PoseCandidateArtifacts],
    space_volume: f64,
    cfg: &EstimatorConfig,
) -> CertifiedPoseEstimate {
    let t0 = Instant::now();
    let survivors: Vec<usize> = candidates
        .par_iter()
        .enumerate()
        .filter(|(_, art)| filter_candidate(obs, art, cfg.noise_budget))
        .map(|(i, _)| i)
        .collect();
    let time_filter_s = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let refined: Vec<(usize, ConstrainedPoseSet, bool)> = survivors
        .par_iter()
        .map(|&i| {
            let set = refine_candidate(obs, &candidates[i], cfg);
            let feasible = !set.is_certainly_empty();
            (i, set, feasible)
        })
        .collect();
    let time_refine_s = t1.elapsed().as_secs_f64();

    let pieces: Vec<EstimatePiece> = refined
        .into_par_iter()
        .map(|(i, set, feasible)| {
            let (volume_estimate, volume_stderr) = if feasible {
                set.volume_estimate(cfg.volume_samples, &mut piece_rng(cfg.seed, i))
            } else {
                (0.0, 0.0)
            };
            EstimatePiece {
                candidate_index: i,
                set,
                feasible,
                volume_estimate,
                volume_stderr,
            }
        })
        .collect();
    let filter_vol: f64 = pieces.iter().map(|p| p.set.base.volume()).sum();
    let ours_vol: f64 = pieces.iter().map(|p| p.volume_estimate).sum();
    CertifiedPoseEstimate {
        summary: EstimateSummary {
            candidates: candidates.len(),
            candidates_after_filter: survivors.len(),
            time_filter_s,
            time_refine_s,
            norm_vol_filter: filter_vol / space_volume,
            norm_vol_ours: ours_vol / space_volume,
        },
        pieces,
    }
}

/// Estimate from a precomputed store after checking that it was built for
/// `cam` and `target`.
pub fn estimate(
    obs: &BinaryImage,
    store: &CandidateStore,
    cam: &CameraParams,
    target: &Target,
    cfg: &EstimatorConfig,
) -> Result<CertifiedPoseEstimate> {
    store.check_matches(cam, target)?;
    if obs.width() != cam.width || obs.height() != cam.height {
        return Err(Error::ImageFormat(format!(
            "image is {}x{}, camera expects {}x{}",
            obs.width(),
            obs.height(),
            cam.width,
            cam.height
        )));
    }
    Ok(estimate_candidates(
        obs,
        &store.candidates,
        store.manifest.pose_space.volume(),
        cfg,
    ))
}
