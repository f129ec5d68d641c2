//! Certified camera pose estimation from binary images.
//!
//! Offline, a pose space is partitioned into boxes and every box gets a
//! sound enclosure of all images it can produce ([`forward`],
//! [`partition`], [`store`]). Online, an observed image filters those boxes
//! and the survivors are cut down by linear constraints derived from
//! witness pixels ([`witness`], [`preimage`], [`estimator`]). The result is
//! a union of constrained boxes that contains every pose consistent with the
//! image under the noise budget.
//!
//! ```no_run
//! use certipose::estimator::{estimate, EstimatorConfig};
//! use certipose::geometry::{builtin, render, CameraParams, Pose};
//! use certipose::partition::{PartitionConfig, PoseSpace};
//! use certipose::store::precompute_store;
//!
//! let target = builtin("stripes")?;
//! let cam = CameraParams::new(125.0, 100, 100)?;
//! let store = precompute_store(&target, &cam, &PoseSpace::desk(), &PartitionConfig::default())?;
//! let truth = Pose::from_array([0.5, -1.0, 95.0, 0.02, -0.01, 0.03]);
//! let obs = render(&target, &cam, &truth)?;
//! let est = estimate(&obs, &store, &cam, &target, &EstimatorConfig::default())?;
//! assert!(est.contains(&truth));
//! # Ok::<(), certipose::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod error;
pub mod set;

pub use error::{Error, Invisibility, Result};
pub mod estimator;
pub mod forward;
pub mod geometry;
pub mod harness;
pub mod nonlin;
pub mod partition;
pub mod preimage;
pub mod store;
pub mod witness;
