//! Set representations: boxes and sparse polynomial zonotopes.

mod interval;
mod zonotope;

pub use interval::Interval;
pub use zonotope::{FactorAssignment, FactorId, FactorIds, MatPolyZonotope, PolyZonotope};
