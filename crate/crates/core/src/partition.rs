//! Offline phase: hierarchical bisection of the pose space into candidates
//! whose forward enclosures are tight enough.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Invisibility, Result};
use crate::forward::{
    enclose_vertices, forward_enclose, HullConfig, PoseCandidateArtifacts, UncertainPose, POSE_DIM,
};
use crate::geometry::{CameraParams, Pose, Target};
use crate::set::Interval;

/// Axis-aligned region of poses: translation in target units, angles in
/// radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Interval", into = "Interval")]
pub struct PoseSpace {
    bounds: Interval,
}

impl TryFrom<Interval> for PoseSpace {
    type Error = Error;

    fn try_from(bounds: Interval) -> Result<Self> {
        if bounds.dim() != POSE_DIM {
            return Err(Error::DimensionMismatch {
                expected: POSE_DIM,
                found: bounds.dim(),
            });
        }
        if bounds.lo().iter().zip(bounds.hi()).any(|(l, h)| !(l < h)) {
            return Err(Error::InvalidInterval(
                "pose space needs lo < hi in every dimension".into(),
            ));
        }
        Ok(Self { bounds })
    }
}

impl From<PoseSpace> for Interval {
    fn from(s: PoseSpace) -> Self {
        s.bounds
    }
}

impl PoseSpace {
    pub fn new(lo: [f64; POSE_DIM], hi: [f64; POSE_DIM]) -> Result<Self> {
        Interval::new(lo.to_vec(), hi.to_vec())?.try_into()
    }

    /// Angles given in degrees.
    pub fn from_degrees(lo: [f64; POSE_DIM], hi: [f64; POSE_DIM]) -> Result<Self> {
        let rad = |v: [f64; POSE_DIM]| {
            let mut v = v;
            for a in &mut v[3..] {
                *a = a.to_radians();
            }
            v
        };
        Self::new(rad(lo), rad(hi))
    }

    /// Small desk-sized setup: the target about a metre-equivalent in front
    /// of a 100x100 camera, a few degrees of tilt.
    pub fn desk() -> Self {
        Self::from_degrees(
            [-4.0, -4.0, 80.0, -6.0, -6.0, -6.0],
            [4.0, 4.0, 110.0, 6.0, 6.0, 6.0],
        )
        .expect("valid bounds")
    }

    pub fn bounds(&self) -> &Interval {
        &self.bounds
    }

    pub fn volume(&self) -> f64 {
        self.bounds.volume()
    }

    pub fn contains(&self, pose: &Pose) -> bool {
        self.bounds.contains(&pose.to_array(), 0.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pose {
        Pose::from_array(std::array::from_fn(|j| {
            rng.gen_range(self.bounds.lo()[j]..=self.bounds.hi()[j])
        }))
    }

    pub fn as_candidate(&self) -> UncertainPose {
        UncertainPose::new(self.bounds.clone()).expect("six-dimensional")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PartitionConfig {
    /// Boxes with a mean error ratio above this are split. JSON has no
    /// infinity, so `null` stands for "never split".
    #[serde(deserialize_with = "epsilon_or_null")]
    pub epsilon: f64,
    pub max_depth: usize,
    /// Dimensions bisected per split: 1, 2, 3 or 6.
    pub split_dims: usize,
    pub hull: HullConfig,
}

fn epsilon_or_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            max_depth: 10,
            split_dims: 2,
            hull: HullConfig::default(),
        }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if ![1, 2, 3, 6].contains(&self.split_dims) {
            return Err(Error::Config(format!(
                "split_dims must be 1, 2, 3 or 6, got {}",
                self.split_dims
            )));
        }
        Ok(())
    }
}

/// An accepted candidate with its artifacts.
#[derive(Debug, Clone)]
pub struct Leaf {
    pub artifacts: PoseCandidateArtifacts,
    pub depth: usize,
    /// Accepted only because `max_depth` was reached.
    pub depth_capped: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Partition {
    /// Leaves in depth-first order; this order is the candidate index.
    pub leaves: Vec<Leaf>,
    /// Boxes dropped because no pose in them turns on any pixel.
    pub discarded_invisible: usize,
    /// Boxes dropped at `max_depth` whose depth range still reached the
    /// camera plane.
    pub discarded_depth: usize,
}

impl Partition {
    pub fn candidates(&self) -> Vec<UncertainPose> {
        self.leaves
            .iter()
            .map(|l| l.artifacts.pose.clone())
            .collect()
    }

    /// Index of the first leaf (in candidate order) whose box holds `pose`.
    pub fn locate(&self, pose: &Pose) -> Option<usize> {
        self.leaves
            .iter()
            .position(|l| l.artifacts.pose.contains(pose, 0.0))
    }

    fn merge(mut self, other: Partition) -> Partition {
        self.leaves.extend(other.leaves);
        self.discarded_invisible += other.discarded_invisible;
        self.discarded_depth += other.discarded_depth;
        self
    }
}

fn mean_err_norm(sets: &[Vec<crate::set::PolyZonotope>]) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for s in sets.iter().flatten() {
        let (_, err) = s.split_linear_error(&crate::forward::POSE_IDS)?;
        let r = err.generator_radius();
        sum += r[0].hypot(r[1]);
        n += 1;
    }
    Ok(if n > 0 { sum / n as f64 } else { 0.0 })
}

/// Weight of the linear contribution in [`sensitivity_scores`]. Splitting a
/// dimension that only acts linearly shrinks the linear radius but not the
/// remainder, which raises the error ratio, so it only breaks ties.
pub const LINEAR_WEIGHT: f64 = 1e-3;

/// Per-dimension split priority: the drop in mean remainder radius when
/// that dimension is collapsed to its center, plus [`LINEAR_WEIGHT`] times
/// the mean linear contribution of the pose factor to the vertex hulls.
pub fn sensitivity_scores(
    target: &Target,
    cam: &CameraParams,
    art: &PoseCandidateArtifacts,
) -> Result<[f64; POSE_DIM]> {
    let verts: Vec<_> = art.vertices.iter().flatten().collect();
    let n = verts.len().max(1) as f64;
    let full = verts
        .iter()
        .map(|v| {
            let r = v.err_radius();
            r[0].hypot(r[1])
        })
        .sum::<f64>()
        / n;
    let radius = art.pose.radius();
    let mut scores = [0.0; POSE_DIM];
    for j in 0..POSE_DIM {
        if radius[j] == 0.0 {
            continue;
        }
        let lin = verts
            .iter()
            .map(|v| v.lin_gen[j][0].abs() + v.lin_gen[j][1].abs())
            .sum::<f64>()
            / n;
        let mut lo = art.pose.bounds().lo().to_vec();
        let mut hi = art.pose.bounds().hi().to_vec();
        let c = art.pose.center()[j];
        lo[j] = c;
        hi[j] = c;
        let collapsed = UncertainPose::new(Interval::new(lo, hi)?)?;
        let drop = match enclose_vertices(target, &collapsed, cam) {
            Ok(sets) => (full - mean_err_norm(&sets)?).max(0.0),
            Err(Error::DomainCrossesPole { .. }) => 0.0,
            Err(e) => return Err(e),
        };
        scores[j] = drop + LINEAR_WEIGHT * lin;
    }
    Ok(scores)
}

fn top_dims(scores: &[f64; POSE_DIM], radius: &[f64; POSE_DIM], k: usize) -> Vec<usize> {
    let mut dims: Vec<usize> = (0..POSE_DIM).filter(|&j| radius[j] > 0.0).collect();
    dims.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    dims.truncate(k);
    dims.sort_unstable();
    dims
}

fn split(u: &UncertainPose, dims: &[usize]) -> Vec<UncertainPose> {
    let mut boxes = vec![u.bounds().clone()];
    for &d in dims {
        boxes = boxes
            .into_iter()
            .flat_map(|b| {
                let (l, r) = b.bisect(d);
                [l, r]
            })
            .collect();
    }
    boxes
        .into_iter()
        .map(|b| UncertainPose::new(b).expect("six-dimensional"))
        .collect()
}

fn recurse(
    target: &Target,
    cam: &CameraParams,
    space: &PoseSpace,
    u: UncertainPose,
    depth: usize,
    cfg: &PartitionConfig,
) -> Result<Partition> {
    let children = match forward_enclose(target, &u, cam, &cfg.hull) {
        Ok(art) => {
            if art.error_ratio <= cfg.epsilon || depth >= cfg.max_depth {
                let depth_capped = art.error_ratio > cfg.epsilon;
                return Ok(Partition {
                    leaves: vec![Leaf {
                        artifacts: art,
                        depth,
                        depth_capped,
                    }],
                    ..Default::default()
                });
            }
            let scores = sensitivity_scores(target, cam, &art)?;
            split(&u, &top_dims(&scores, &u.radius(), cfg.split_dims))
        }
        Err(Error::InvisibleCandidate(Invisibility::EmptyImage)) => {
            return Ok(Partition {
                discarded_invisible: 1,
                ..Default::default()
            })
        }
        Err(Error::InvisibleCandidate(Invisibility::DepthCrossesCamera { .. })) => {
            if depth >= cfg.max_depth {
                return Ok(Partition {
                    discarded_depth: 1,
                    ..Default::default()
                });
            }
            // No artifacts to rank by: split the relatively widest dimensions.
            let full = space.as_candidate().radius();
            let r = u.radius();
            let rel: [f64; POSE_DIM] = std::array::from_fn(|j| r[j] / full[j]);
            split(&u, &top_dims(&rel, &r, cfg.split_dims))
        }
        Err(e) => return Err(e),
    };
    children
        .into_par_iter()
        .map(|c| recurse(target, cam, space, c, depth + 1, cfg))
        .collect::<Result<Vec<_>>>()
        .map(|parts| {
            parts
                .into_iter()
                .fold(Partition::default(), Partition::merge)
        })
}

/// Recursively bisects `space` until every box's error ratio is at most
/// `cfg.epsilon` or `cfg.max_depth` is reached. Invisible boxes are dropped.
pub fn partition(
    target: &Target,
    cam: &CameraParams,
    space: &PoseSpace,
    cfg: &PartitionConfig,
) -> Result<Partition> {
    cfg.validate()?;
    cam.validate()?;
    recurse(target, cam, space, space.as_candidate(), 0, cfg)
}
