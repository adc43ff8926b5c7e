//! Black-box convex functions.
//!
//! Everything here relies on one fact: for convex `f` and `x0 ∈ dom f`, the
//! difference quotient `(f(x0 + t u) - f(x0)) / t` is nondecreasing in `t`
//! and tends to `f_∞(u)`. Each quotient is therefore a lower bound on the
//! recession function.
//!
//! Oracles are evaluated sequentially. An oracle that is safe to call from
//! several threads can be shared across independent analyses by the caller.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{all_finite, axpy};
use crate::maxaffine::MaxAffine;

/// Quotients above this are reported as `+inf`.
pub const DIVERGENCE_CAP: f64 = 1e12;

/// Recession estimates at or below this count as zero.
pub const RECESSION_TOL: f64 = 1e-6;

/// Horizon used by [`is_constant_on_line`].
pub const LINE_HORIZON: f64 = 1e8;

/// Horizon used by [`classify_ray`].
pub const RAY_HORIZON: f64 = 1e6;

/// Half-width of the band separating the ray alternatives.
pub const RAY_BAND: f64 = 1e-8;

/// A convex function `R^n -> (-inf, +inf]`, given by evaluation only.
pub trait ConvexOracle {
    fn dim(&self) -> usize;

    /// `f(x)`; may be `+inf` outside the domain.
    fn evaluate(&self, x: &[f64]) -> f64;

    /// A point with finite value. Defaults to the origin.
    fn base_point(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }
}

impl ConvexOracle for MaxAffine {
    fn dim(&self) -> usize {
        MaxAffine::dim(self)
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.value(x)
    }
}

impl<T: ConvexOracle + ?Sized> ConvexOracle for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        (**self).evaluate(x)
    }

    fn base_point(&self) -> Vec<f64> {
        (**self).base_point()
    }
}

/// Oracle backed by a closure.
pub struct FnOracle<F> {
    dim: usize,
    f: F,
    base: Vec<f64>,
}

impl<F: Fn(&[f64]) -> f64> FnOracle<F> {
    /// Oracle with base point at the origin.
    pub fn new(dim: usize, f: F) -> Self {
        FnOracle {
            dim,
            f,
            base: vec![0.0; dim],
        }
    }

    pub fn with_base_point(dim: usize, f: F, base: Vec<f64>) -> Result<Self> {
        check_dim(dim, base.len())?;
        Ok(FnOracle { dim, f, base })
    }
}

impl<F: Fn(&[f64]) -> f64> ConvexOracle for FnOracle<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn base_point(&self) -> Vec<f64> {
        self.base.clone()
    }
}

/// `x ↦ max(f(x), floor)`, which is bounded below.
pub struct Floored<O> {
    pub inner: O,
    pub floor: f64,
}

impl<O: ConvexOracle> ConvexOracle for Floored<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.inner.evaluate(x).max(self.floor)
    }

    fn base_point(&self) -> Vec<f64> {
        self.inner.base_point()
    }
}

fn check_direction(o: &dyn ConvexOracle, u: &[f64]) -> Result<()> {
    check_dim(o.dim(), u.len())?;
    if !all_finite(u) {
        return Err(Error::NonFinite("direction"));
    }
    if u.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroDirection);
    }
    Ok(())
}

fn along(x: &[f64], t: f64, u: &[f64]) -> Vec<f64> {
    let mut p = x.to_vec();
    axpy(t, u, &mut p);
    p
}

/// Lower bound on `f_∞(u)` from the base point.
pub fn estimate_recession(o: &dyn ConvexOracle, u: &[f64], t_max: f64) -> Result<f64> {
    let x0 = o.base_point();
    estimate_recession_from(o, &x0, u, t_max)
}

/// Difference quotient from `x0` at the largest `t` of `1, 2, 4, ..., t_max`
/// (with `t_max` itself as the last step).
///
/// Returns `+inf` when the ray leaves the domain, when the quotient passes
/// [`DIVERGENCE_CAP`], or when the quotient keeps rising by
/// non-shrinking amounts above [`RECESSION_TOL`] over the last three
/// doublings: a convergent quotient has shrinking increments, a divergent
/// one (`½t`, `log t`) does not.
pub fn estimate_recession_from(
    o: &dyn ConvexOracle,
    x0: &[f64],
    u: &[f64],
    t_max: f64,
) -> Result<f64> {
    check_direction(o, u)?;
    check_dim(o.dim(), x0.len())?;
    if !(t_max >= 1.0) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "t_max must be finite and >= 1, got {t_max}"
        )));
    }
    let f0 = o.evaluate(x0);
    if !f0.is_finite() {
        return Err(Error::InfiniteBasePoint);
    }
    let mut quotients: Vec<(f64, f64)> = Vec::new();
    let mut t: f64 = 1.0;
    loop {
        let ft = o.evaluate(&along(x0, t, u));
        if ft == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        if ft.is_nan() {
            return Err(Error::NonFinite("oracle value"));
        }
        let q = (ft - f0) / t;
        if q > DIVERGENCE_CAP {
            return Ok(f64::INFINITY);
        }
        quotients.push((t, q));
        if t >= t_max {
            break;
        }
        t = (2.0 * t).min(t_max);
    }
    // Increments per doubling over the last three steps; the final step may
    // be shorter than a doubling.
    if quotients.len() >= 4 {
        let tail = &quotients[quotients.len() - 4..];
        let inc: Vec<f64> = tail
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 / w[0].0).log2())
            .collect();
        let (qb, qc) = (tail[2].1, tail[3].1);
        let growing = inc.windows(2).all(|w| w[1] >= 0.9 * w[0]);
        if growing && qc - qb > RECESSION_TOL * (1.0 + qc.abs()) {
            return Ok(f64::INFINITY);
        }
    }
    Ok(quotients.last().expect("at least one step").1)
}

/// Which of the three alternatives `t ↦ f(x + t u)` follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RayPattern {
    NonIncreasing,
    NonDecreasing,
    DecreaseThenIncrease,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayReport {
    pub pattern: RayPattern,
    /// Estimate of `lim_{t→∞} f(x + t u)`.
    #[serde(with = "crate::format::extended")]
    pub limit_estimate: f64,
    /// `(f(x + T u) - f(x)) / T`.
    #[serde(with = "crate::format::extended")]
    pub recession_lower_bound: f64,
    /// Secant slopes over `[T/2, T]` and `[-T, -T/2]`.
    #[serde(with = "crate::format::extended")]
    pub right_slope: f64,
    #[serde(with = "crate::format::extended")]
    pub left_slope: f64,
    /// Approximate minimizing `t` for the decrease-then-increase pattern.
    pub turning_point: Option<f64>,
    /// Largest move against the reported pattern between neighbouring
    /// samples, relative to the sampled magnitude.
    pub monotonicity_violation: f64,
}

impl RayReport {
    /// `f` stays bounded above along `x + R_+ u`, i.e. `f_∞(u) <= 0`.
    pub fn bounded_above(&self) -> bool {
        self.pattern == RayPattern::NonIncreasing
    }
}

fn secant(fa: f64, fb: f64, h: f64) -> f64 {
    if fb == f64::INFINITY {
        return f64::INFINITY;
    }
    if fa == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    (fb - fa) / h
}

/// Band for a secant slope: the fixed band plus the rounding of the two
/// values it was formed from.
fn band(fa: f64, fb: f64, h: f64) -> f64 {
    let mag = if fa.is_finite() && fb.is_finite() {
        fa.abs() + fb.abs()
    } else {
        0.0
    };
    RAY_BAND + 8.0 * f64::EPSILON * mag / h
}

/// Classifies `t ↦ f(x + t u)` on the horizon `[-T, T]`, `T = 10^6`.
pub fn classify_ray(o: &dyn ConvexOracle, x: &[f64], u: &[f64]) -> Result<RayReport> {
    check_direction(o, u)?;
    check_dim(o.dim(), x.len())?;
    let phi = |t: f64| o.evaluate(&along(x, t, u));
    let f0 = phi(0.0);
    if !f0.is_finite() {
        return Err(Error::InfiniteBasePoint);
    }
    let big = RAY_HORIZON;
    let half = big / 2.0;
    let (f_half, f_big) = (phi(half), phi(big));
    let (f_mhalf, f_mbig) = (phi(-half), phi(-big));
    let right = secant(f_half, f_big, half);
    let left = secant(f_mbig, f_mhalf, half);
    let right_band = band(f_half, f_big, half);
    let left_band = band(f_mbig, f_mhalf, half);

    let pattern = if right <= right_band {
        RayPattern::NonIncreasing
    } else if left >= -left_band {
        RayPattern::NonDecreasing
    } else {
        RayPattern::DecreaseThenIncrease
    };

    let limit_estimate = if right > right_band {
        f64::INFINITY
    } else if right < -right_band {
        f64::NEG_INFINITY
    } else {
        f_big
    };

    // Samples t = ±2^k up to the horizon, in increasing order.
    let mut ts: Vec<f64> = Vec::new();
    let mut s = 1.0;
    while s < big {
        ts.push(s);
        s *= 2.0;
    }
    ts.push(big);
    let mut grid: Vec<f64> = ts.iter().rev().map(|t| -t).collect();
    grid.push(0.0);
    grid.extend(ts.iter().copied());
    let values: Vec<f64> = grid.iter().map(|&t| phi(t)).collect();

    let turning_point = if pattern == RayPattern::DecreaseThenIncrease {
        Some(golden_section(&phi, &grid, &values))
    } else {
        None
    };
    let monotonicity_violation = violation(pattern, &grid, &values, turning_point);

    Ok(RayReport {
        pattern,
        limit_estimate,
        recession_lower_bound: secant(f0, f_big, big),
        right_slope: right,
        left_slope: left,
        turning_point,
        monotonicity_violation,
    })
}

fn violation(pattern: RayPattern, grid: &[f64], values: &[f64], turn: Option<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 1..grid.len() {
        let (a, b) = (values[k - 1], values[k]);
        if !a.is_finite() || !b.is_finite() {
            continue;
        }
        let should_increase = match pattern {
            RayPattern::NonIncreasing => false,
            RayPattern::NonDecreasing => true,
            RayPattern::DecreaseThenIncrease => grid[k - 1] >= turn.unwrap_or(0.0),
        };
        let against = if should_increase { a - b } else { b - a };
        let straddles = matches!(turn, Some(t) if grid[k - 1] < t && t < grid[k]);
        if !straddles {
            worst = worst.max(against / (1.0 + a.abs().max(b.abs())));
        }
    }
    worst
}

/// Minimizer of a convex `phi` bracketed by the smallest grid sample.
fn golden_section(phi: &dyn Fn(f64) -> f64, grid: &[f64], values: &[f64]) -> f64 {
    let k = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("grid is nonempty");
    let mut lo = grid[k.saturating_sub(1)];
    let mut hi = grid[(k + 1).min(grid.len() - 1)];
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..200 {
        if hi - lo <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = phi(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = phi(d);
        }
    }
    (lo + hi) / 2.0
}

/// Whether `f` is constant on the line `x + R u`.
///
/// Decided twice: by the recession estimates `f_∞(±u) <= 1e-6` at horizon
/// `10^8`, and by sampling 21 points `t ∈ {0, ±10^k : k = -1..8}`. Disagreement
/// between the two means the oracle is noisy or not convex.
pub fn is_constant_on_line(o: &dyn ConvexOracle, x: &[f64], u: &[f64]) -> Result<bool> {
    check_direction(o, u)?;
    check_dim(o.dim(), x.len())?;
    let minus: Vec<f64> = u.iter().map(|v| -v).collect();
    let by_recession = estimate_recession_from(o, x, u, LINE_HORIZON)? <= RECESSION_TOL
        && estimate_recession_from(o, x, &minus, LINE_HORIZON)? <= RECESSION_TOL;

    let f0 = o.evaluate(x);
    let slack = 1e-9 * (1.0 + f0.abs());
    let by_sampling = (-1..=8).all(|k| {
        let t = 10f64.powi(k);
        [t, -t].iter().all(|&s| {
            let ft = o.evaluate(&along(x, s, u));
            (ft - f0).abs() <= RECESSION_TOL * s.abs() + slack
        })
    });

    if by_recession != by_sampling {
        return Err(Error::RouteDisagreement {
            by_recession,
            by_sampling,
        });
    }
    Ok(by_recession)
}
