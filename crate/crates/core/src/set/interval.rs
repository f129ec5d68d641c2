use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box `[lo, hi]` in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Interval {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if let Some(i) = (0..lo.len()).find(|&i| !(lo[i] <= hi[i])) {
            return Err(Error::InvalidInterval(format!(
                "lo[{i}] = {} exceeds hi[{i}] = {}",
                lo[i], hi[i]
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Scalar interval `[lo, hi]`.
    pub fn scalar(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn point(p: &[f64]) -> Self {
        Self {
            lo: p.to_vec(),
            hi: p.to_vec(),
        }
    }

    pub fn from_center_radius(center: &[f64], radius: &[f64]) -> Result<Self> {
        if center.len() != radius.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                found: radius.len(),
            });
        }
        let lo = center
            .iter()
            .zip(radius)
            .map(|(c, r)| c - r.abs())
            .collect();
        let hi = center
            .iter()
            .zip(radius)
            .map(|(c, r)| c + r.abs())
            .collect();
        Self::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }

    pub fn radius(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (h - l))
            .collect()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    /// Membership with absolute slack `tol` on every bound.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (l, h))| *x >= l - tol && *x <= h + tol)
    }

    /// Smallest box containing both operands.
    pub fn hull(&self, other: &Interval) -> Result<Interval> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let lo = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(a, b)| a.min(*b))
            .collect();
        let hi = self
            .hi
            .iter()
            .zip(&other.hi)
            .map(|(a, b)| a.max(*b))
            .collect();
        Ok(Interval { lo, hi })
    }

    /// Splits dimension `dim` at its midpoint.
    pub fn bisect(&self, dim: usize) -> (Interval, Interval) {
        let mid = 0.5 * (self.lo[dim] + self.hi[dim]);
        let mut left = self.clone();
        let mut right = self.clone();
        left.hi[dim] = mid;
        right.lo[dim] = mid;
        (left, right)
    }

    /// Keeps the given coordinates, in order.
    pub fn project(&self, dims: &[usize]) -> Interval {
        Interval {
            lo: dims.iter().map(|&d| self.lo[d]).collect(),
            hi: dims.iter().map(|&d| self.hi[d]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_bounds() {
        assert!(Interval::new(vec![1.0], vec![0.0]).is_err());
        assert!(Interval::new(vec![f64::NAN], vec![0.0]).is_err());
        assert!(Interval::new(vec![0.0, 1.0], vec![0.0]).is_err());
    }

    #[test]
    fn center_radius_round_trip() {
        let iv = Interval::new(vec![-1.0, 2.0], vec![3.0, 2.0]).unwrap();
        assert_eq!(iv.center(), vec![1.0, 2.0]);
        assert_eq!(iv.radius(), vec![2.0, 0.0]);
        let back = Interval::from_center_radius(&iv.center(), &iv.radius()).unwrap();
        assert_eq!(back, iv);
        assert_eq!(iv.volume(), 0.0);
    }

    #[test]
    fn bisect_covers_parent() {
        let iv = Interval::new(vec![0.0, -2.0], vec![4.0, 2.0]).unwrap();
        let (a, b) = iv.bisect(0);
        assert_eq!(a.hi()[0], 2.0);
        assert_eq!(b.lo()[0], 2.0);
        assert_eq!(a.hull(&b).unwrap(), iv);
    }
}
