//! Preimage constraints: restricting a pose candidate's latent hypercube by
//! requiring its uncertain projected vertices to land in given polytopes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::forward::{UncertainPose, VertexEnclosure, POSE_DIM};
use crate::geometry::polytope::HPolytope2;
use crate::geometry::Pose;

/// Absolute slack on containment checks.
pub const CONTAINS_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 50;

pub type Row = [f64; POSE_DIM];

/// Linear constraints `C α <= d` on the latent hypercube.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub c: Vec<Row>,
    pub d: Vec<f64>,
}

impl Constraints {
    /// The infeasible marker `0 α <= -1`.
    pub fn sentinel() -> Self {
        Self {
            c: vec![[0.0; POSE_DIM]],
            d: vec![-1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn is_sentinel(&self) -> bool {
        self.len() == 1 && self.c[0] == [0.0; POSE_DIM] && self.d[0] == -1.0
    }

    pub fn satisfied_by(&self, alpha: &Row, tol: f64) -> bool {
        self.c
            .iter()
            .zip(&self.d)
            .all(|(row, &d)| dot(row, alpha) <= d + tol)
    }
}

fn dot(a: &Row, b: &Row) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `C = A G̃`, `d = b - A õ + |A Ĝ| 1`: every `α` whose vertex lands in `u`
/// satisfies `C α <= d`.
pub fn preimage_constraints(vertex: &VertexEnclosure, u: &HPolytope2) -> Constraints {
    let mut out = Constraints {
        c: Vec::with_capacity(u.len()),
        d: Vec::with_capacity(u.len()),
    };
    for (a, &b) in u.a().iter().zip(u.b()) {
        let row: Row =
            std::array::from_fn(|j| a[0] * vertex.lin_gen[j][0] + a[1] * vertex.lin_gen[j][1]);
        let shift = a[0] * vertex.lin_offset[0] + a[1] * vertex.lin_offset[1];
        let err: f64 = vertex
            .err_gens
            .iter()
            .map(|g| (a[0] * g[0] + a[1] * g[1]).abs())
            .sum();
        out.c.push(row);
        out.d.push(b - shift + err);
    }
    out
}

/// Row-wise concatenation; the result describes the intersection.
pub fn stack<'a>(blocks: impl IntoIterator<Item = &'a Constraints>) -> Constraints {
    let mut out = Constraints::default();
    for b in blocks {
        out.c.extend_from_slice(&b.c);
        out.d.extend_from_slice(&b.d);
    }
    out
}

/// Pose box restricted by `C α <= d`; one piece of a certified estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedPoseSet {
    pub base: UncertainPose,
    pub constraints: Constraints,
}

/// Outcome of interval constraint propagation over the latent box.
#[derive(Debug, Clone, PartialEq)]
pub enum Propagation {
    Empty,
    /// Bounds on `α` that every feasible point satisfies.
    Box {
        lo: Row,
        hi: Row,
    },
}

impl ConstrainedPoseSet {
    pub fn new(base: UncertainPose, constraints: Constraints) -> Self {
        Self { base, constraints }
    }

    pub fn unconstrained(base: UncertainPose) -> Self {
        Self::new(base, Constraints::default())
    }

    pub fn infeasible(base: UncertainPose) -> Self {
        Self::new(base, Constraints::sentinel())
    }

    pub fn is_infeasible_marker(&self) -> bool {
        self.constraints.is_sentinel()
    }

    /// Membership of a concrete pose, with slack [`CONTAINS_TOL`].
    pub fn contains(&self, pose: &Pose) -> bool {
        let (o, g, p) = (self.base.center(), self.base.radius(), pose.to_array());
        let mut alpha = [0.0; POSE_DIM];
        for j in 0..POSE_DIM {
            if g[j] > 0.0 {
                alpha[j] = (p[j] - o[j]) / g[j];
                if alpha[j].abs() > 1.0 + CONTAINS_TOL {
                    return false;
                }
            } else if (p[j] - o[j]).abs() > CONTAINS_TOL {
                return false;
            }
        }
        self.constraints.satisfied_by(&alpha, CONTAINS_TOL)
    }

    /// Interval constraint propagation of `C α <= d` over `[-1, 1]^6`.
    pub fn propagate(&self) -> Propagation {
        let mut lo = [-1.0; POSE_DIM];
        let mut hi = [1.0; POSE_DIM];
        let Constraints { c, d } = &self.constraints;
        for _ in 0..MAX_SWEEPS {
            let mut changed = false;
            for (row, &rhs) in c.iter().zip(d) {
                let scale = 1.0 + rhs.abs() + row.iter().map(|x| x.abs()).sum::<f64>();
                let slack = 1e-9 * scale;
                let mins: Row = std::array::from_fn(|j| {
                    if row[j] >= 0.0 {
                        row[j] * lo[j]
                    } else {
                        row[j] * hi[j]
                    }
                });
                let total: f64 = mins.iter().sum();
                if total > rhs + slack {
                    return Propagation::Empty;
                }
                for j in 0..POSE_DIM {
                    if row[j].abs() < 1e-12 * scale {
                        continue;
                    }
                    let bound = (rhs + slack - (total - mins[j])) / row[j];
                    if row[j] > 0.0 {
                        if bound < hi[j] - 1e-12 {
                            hi[j] = bound;
                            changed = true;
                        }
                    } else if bound > lo[j] + 1e-12 {
                        lo[j] = bound;
                        changed = true;
                    }
                    if lo[j] > hi[j] {
                        return Propagation::Empty;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Propagation::Box { lo, hi }
    }

    /// True only if the set is provably empty.
    pub fn is_certainly_empty(&self) -> bool {
        matches!(self.propagate(), Propagation::Empty)
    }

    /// Monte Carlo volume in pose units with its standard error. Samples are
    /// drawn from the propagated latent box, which contains the whole set.
    pub fn volume_estimate<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> (f64, f64) {
        let (lo, hi) = match self.propagate() {
            Propagation::Empty => return (0.0, 0.0),
            Propagation::Box { lo, hi } => (lo, hi),
        };
        let g = self.base.radius();
        let base: f64 = g.iter().map(|r| 2.0 * r).product();
        let frac_box: f64 = (0..POSE_DIM).map(|j| (hi[j] - lo[j]) / 2.0).product();
        let scale = base * frac_box;
        if scale == 0.0 {
            return (0.0, 0.0);
        }
        if self.constraints.is_empty() {
            return (scale, 0.0);
        }
        let n = samples.max(1);
        let mut hits = 0usize;
        let mut alpha = [0.0; POSE_DIM];
        for _ in 0..n {
            for j in 0..POSE_DIM {
                alpha[j] = if hi[j] > lo[j] {
                    rng.gen_range(lo[j]..hi[j])
                } else {
                    lo[j]
                };
            }
            if self.constraints.satisfied_by(&alpha, 0.0) {
                hits += 1;
            }
        }
        let f = hits as f64 / n as f64;
        (scale * f, scale * (f * (1.0 - f) / n as f64).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::Interval;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_base() -> UncertainPose {
        UncertainPose::new(Interval::new(vec![-1.0; 6], vec![1.0; 6]).unwrap()).unwrap()
    }

    #[test]
    fn sentinel_is_empty_and_has_no_volume() {
        let s = ConstrainedPoseSet::infeasible(unit_base());
        assert!(s.is_certainly_empty());
        assert!(s.is_infeasible_marker());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(s.volume_estimate(100, &mut rng), (0.0, 0.0));
        assert!(!s.contains(&Pose::from_array([0.0; 6])));
    }

    #[test]
    fn unconstrained_box_volume_is_exact() {
        let s = ConstrainedPoseSet::unconstrained(unit_base());
        assert!(!s.is_certainly_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(s.volume_estimate(10, &mut rng), (64.0, 0.0));
        assert!(s.contains(&Pose::from_array([0.0; 6])));
        assert!(!s.contains(&Pose::from_array([1.5, 0.0, 0.0, 0.0, 0.0, 0.0])));
    }

    #[test]
    fn half_space_halves_volume() {
        let mut row = [0.0; 6];
        row[0] = 1.0;
        // Tilted so propagation alone cannot make it exact.
        row[1] = 0.5;
        let s = ConstrainedPoseSet::new(
            unit_base(),
            Constraints {
                c: vec![row],
                d: vec![0.0],
            },
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (v, se) = s.volume_estimate(20_000, &mut rng);
        assert!((v - 32.0).abs() <= 3.0 * se + 1e-9, "{v} ± {se}");
        assert!(se > 0.0);
    }

    #[test]
    fn stack_is_concatenation() {
        assert!(stack(std::iter::empty()).is_empty());
        let a = Constraints {
            c: vec![[1.0; 6]],
            d: vec![2.0],
        };
        assert_eq!(stack([&a]), a);
        let both = stack([&a, &a]);
        assert_eq!(both.len(), 2);
    }

    #[test]
    fn propagation_detects_conflict() {
        let mut up = [0.0; 6];
        up[2] = 1.0;
        let mut down = [0.0; 6];
        down[2] = -1.0;
        let s = ConstrainedPoseSet::new(
            unit_base(),
            Constraints {
                c: vec![up, down],
                d: vec![-0.5, -0.6],
            },
        );
        assert!(s.is_certainly_empty());
        let s = ConstrainedPoseSet::new(
            unit_base(),
            Constraints {
                c: vec![up, down],
                d: vec![0.5, 0.4],
            },
        );
        match s.propagate() {
            Propagation::Box { lo, hi } => {
                assert!((hi[2] - 0.5).abs() < 1e-6 && (lo[2] + 0.4).abs() < 1e-6);
            }
            Propagation::Empty => panic!("feasible set reported empty"),
        }
    }

    #[test]
    fn removing_rows_keeps_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let rows: Vec<Row> = (0..4)
                .map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
                .collect();
            let d: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.5..1.0)).collect();
            let full = ConstrainedPoseSet::new(
                unit_base(),
                Constraints {
                    c: rows.clone(),
                    d: d.clone(),
                },
            );
            let fewer = ConstrainedPoseSet::new(
                unit_base(),
                Constraints {
                    c: rows[..2].to_vec(),
                    d: d[..2].to_vec(),
                },
            );
            let p = Pose::from_array(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
            if full.contains(&p) {
                assert!(fewer.contains(&p));
            }
        }
    }
}
