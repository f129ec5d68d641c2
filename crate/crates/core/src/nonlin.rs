//! Sound linear enclosures of `sin`, `cos` and `1/x` over polynomial
//! zonotopes.
//!
//! Each entry is replaced by `a x + b ± d`: the line comes from a discrete
//! least-squares fit over the entry's interval hull, and `d` is the exact
//! maximum of `|f - (a x + b)|`, found from the endpoints and the closed-form
//! stationary points of the error function.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::{Interval, PolyZonotope};

/// Sample count for the least-squares fit.
const FIT_SAMPLES: usize = 1001;
/// Added to every error radius to absorb round-off in evaluating the line.
const RADIUS_SLACK: f64 = 1e-12;
/// Smallest admissible lower bound for a reciprocal domain.
pub const RECIP_MIN_DOMAIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementaryFn {
    Sin,
    Cos,
    Recip,
}

impl ElementaryFn {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            ElementaryFn::Sin => x.sin(),
            ElementaryFn::Cos => x.cos(),
            ElementaryFn::Recip => 1.0 / x,
        }
    }

    fn derivative(self, x: f64) -> f64 {
        match self {
            ElementaryFn::Sin => x.cos(),
            ElementaryFn::Cos => -x.sin(),
            ElementaryFn::Recip => -1.0 / (x * x),
        }
    }

    /// Interior points of `[lo, hi]` where `f'(x) = slope`.
    fn stationary_points(self, slope: f64, lo: f64, hi: f64) -> Vec<f64> {
        let mut bases = Vec::new();
        match self {
            ElementaryFn::Sin if slope.abs() <= 1.0 => {
                let t = slope.acos();
                bases.extend([t, -t]);
            }
            ElementaryFn::Cos if slope.abs() <= 1.0 => {
                let t = (-slope).asin();
                bases.extend([t, PI - t]);
            }
            ElementaryFn::Recip if slope < 0.0 => {
                let x = (-1.0 / slope).sqrt();
                return if x > lo && x < hi {
                    vec![x]
                } else {
                    Vec::new()
                };
            }
            _ => return Vec::new(),
        }
        let mut out = Vec::new();
        for base in bases {
            let k_lo = ((lo - base) / (2.0 * PI)).floor() as i64;
            let k_hi = ((hi - base) / (2.0 * PI)).ceil() as i64;
            for k in k_lo..=k_hi {
                let x = base + 2.0 * PI * k as f64;
                if x > lo && x < hi {
                    out.push(x);
                }
            }
        }
        out
    }
}

/// `|f(x) - (slope x + intercept)| <= error_radius` on `domain`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearApproxEnclosure {
    pub function: ElementaryFn,
    pub slope: f64,
    pub intercept: f64,
    pub error_radius: f64,
    pub domain: Interval,
}

impl LinearApproxEnclosure {
    pub fn line(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

fn check_domain(f: ElementaryFn, lo: f64, hi: f64) -> Result<()> {
    if f == ElementaryFn::Recip && lo <= RECIP_MIN_DOMAIN {
        return Err(Error::DomainCrossesPole { lo, hi });
    }
    Ok(())
}

/// Fits `f` on a scalar domain.
pub fn fit_linear(f: ElementaryFn, domain: &Interval) -> Result<LinearApproxEnclosure> {
    if domain.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: domain.dim(),
        });
    }
    let (lo, hi) = (domain.lo()[0], domain.hi()[0]);
    check_domain(f, lo, hi)?;

    if lo == hi {
        let slope = f.derivative(lo);
        return Ok(LinearApproxEnclosure {
            function: f,
            slope,
            intercept: f.eval(lo) - slope * lo,
            error_radius: 0.0,
            domain: domain.clone(),
        });
    }

    let (slope, intercept) = if hi - lo < 1e-9 {
        let c = 0.5 * (lo + hi);
        let slope = f.derivative(c);
        (slope, f.eval(c) - slope * c)
    } else {
        least_squares(f, lo, hi)
    };

    let mut e_min = f64::INFINITY;
    let mut e_max = f64::NEG_INFINITY;
    let candidates = [lo, hi]
        .into_iter()
        .chain(f.stationary_points(slope, lo, hi));
    for x in candidates {
        let e = f.eval(x) - (slope * x + intercept);
        e_min = e_min.min(e);
        e_max = e_max.max(e);
    }
    // Shifting the line to the middle of the error band halves the radius.
    let intercept = intercept + 0.5 * (e_max + e_min);
    let error_radius = 0.5 * (e_max - e_min) + RADIUS_SLACK;
    Ok(LinearApproxEnclosure {
        function: f,
        slope,
        intercept,
        error_radius,
        domain: domain.clone(),
    })
}

fn least_squares(f: ElementaryFn, lo: f64, hi: f64) -> (f64, f64) {
    let n = FIT_SAMPLES as f64;
    let step = (hi - lo) / (FIT_SAMPLES - 1) as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..FIT_SAMPLES {
        let x = lo + step * i as f64;
        let y = f.eval(x);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let mx = sx / n;
    let my = sy / n;
    let var = sxx / n - mx * mx;
    let slope = if var > 0.0 {
        (sxy / n - mx * my) / var
    } else {
        0.0
    };
    (slope, my - slope * mx)
}

/// Encloses `f` applied to every entry of `p`. The dependent structure of
/// `p` is kept (scaled by the per-entry slope); each entry gains one
/// independent generator carrying its error radius.
pub fn enclose_elementwise(f: ElementaryFn, p: &PolyZonotope) -> Result<PolyZonotope> {
    Ok(enclose_with_fits(f, p)?.0)
}

/// Like [`enclose_elementwise`] but also returns the per-entry fits.
pub fn enclose_with_fits(
    f: ElementaryFn,
    p: &PolyZonotope,
) -> Result<(PolyZonotope, Vec<LinearApproxEnclosure>)> {
    let n = p.dim();
    let ih = p.interval_hull();
    let fits = (0..n)
        .map(|i| fit_linear(f, &ih.project(&[i])))
        .collect::<Result<Vec<_>>>()?;
    let mut diag = vec![0.0; n * n];
    let mut shift = vec![0.0; n];
    let mut err = vec![0.0; n * n];
    for (i, fit) in fits.iter().enumerate() {
        diag[i * n + i] = fit.slope;
        shift[i] = fit.intercept;
        err[i * n + i] = fit.error_radius;
    }
    let out = p.affine_map(&diag, &shift)?.with_indep(&err)?;
    Ok((out, fits))
}
