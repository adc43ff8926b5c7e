//! Support functions, polytope projection and the envelope
//! `φ_C = (½‖·‖²) ∇ s_C`.
//!
//! For a compact convex `C`,
//! `φ_C(x) = sup_{y ∈ C} <x, y> - ½‖y‖² = ½‖x‖² - ½ dist(x, C)²`, the sup
//! being attained at `y = Pr_C(x)`. The value is computed as
//! `<x, y> - ½‖y‖²`, which avoids the cancellation between the two squares
//! when `x` is far from `C`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm, sub, unit_coordinate, Subspace};
use crate::oracle::{self, ConvexOracle};
use crate::polytope::VPolytope;
use crate::sample::{gaussian_vector, unit_vector};

/// Relative tolerance of the projection's optimality test.
pub const PROJECTION_TOL: f64 = 1e-9;

/// Deviation allowed between the estimated recession of `φ_C` and `s_C`.
pub const RECESSION_IDENTITY_TOL: f64 = 1e-5;

/// Horizon used when estimating recession values of `φ_C`.
pub const RECESSION_HORIZON: f64 = 1e8;

/// `s_C(x) = max_i <x, p_i>`.
pub fn support_function(c: &VPolytope, x: &[f64]) -> Result<f64> {
    c.support(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub nearest: Vec<f64>,
    pub distance: f64,
    /// Convex weights over the generators reproducing `nearest`.
    pub weights: Vec<f64>,
}

/// Nearest point of `C` to `x` by Wolfe's minimum-norm-point method applied
/// to `C - x`.
///
/// Affine minimizers are solved in coordinates relative to one generator of
/// the current corral, so large `‖x‖` does not wash out the geometry of `C`.
pub fn project_onto(c: &VPolytope, x: &[f64]) -> Result<ProjectionResult> {
    check_dim(c.dim(), x.len())?;
    let p = c.points();
    let m = p.len();
    let n = c.dim();
    let diam = p
        .iter()
        .map(|q| norm(&sub(q, &p[0])))
        .fold(0.0, f64::max);

    let first = (0..m)
        .min_by(|&i, &j| norm(&sub(&p[i], x)).total_cmp(&norm(&sub(&p[j], x))))
        .expect("polytopes are nonempty");
    let mut corral = vec![first];
    let mut lambda = vec![1.0];
    let cap = 10 * m * n.max(1);

    for _ in 0..cap {
        let y = combine(p, &corral, &lambda);
        let w: Vec<f64> = sub(x, &y);
        let scale = norm(&w) * diam;
        // Most violated generator of <x - y, p_i - y> <= 0.
        let (best, gain) = (0..m)
            .map(|i| (i, directional_gain(p, &corral, &lambda, i, &w)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("polytopes are nonempty");
        if gain <= PROJECTION_TOL * scale || corral.contains(&best) || scale == 0.0 {
            return Ok(finish(m, x, y, &corral, &lambda));
        }
        corral.push(best);
        lambda.push(0.0);

        loop {
            let Some(alpha) = affine_minimizer(p, &corral, x) else {
                // The new point is affinely dependent on the corral: no
                // further progress is representable.
                corral.pop();
                lambda.pop();
                return Ok(finish(m, x, combine(p, &corral, &lambda), &corral, &lambda));
            };
            if alpha.iter().all(|a| *a > 0.0) {
                lambda = alpha;
                break;
            }
            // Step from λ toward α until a weight hits zero, then drop it.
            let (mut theta, mut hit) = (f64::INFINITY, 0);
            for (k, (l, a)) in lambda.iter().zip(&alpha).enumerate() {
                if *a <= 0.0 && l / (l - a) < theta {
                    theta = l / (l - a);
                    hit = k;
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l += theta * (a - *l);
            }
            lambda[hit] = 0.0;
            let mut k = 0;
            while k < corral.len() {
                if lambda[k] <= 0.0 {
                    corral.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
        }
    }
    Err(Error::IterationCap(cap))
}

fn combine(p: &[Vec<f64>], corral: &[usize], lambda: &[f64]) -> Vec<f64> {
    // p_{s0} + Σ λ_j (p_{sj} - p_{s0}) keeps rounding at the scale of C.
    let base = &p[corral[0]];
    let mut y = base.clone();
    for (&j, l) in corral.iter().zip(lambda).skip(1) {
        for (yk, (pk, bk)) in y.iter_mut().zip(p[j].iter().zip(base)) {
            *yk += l * (pk - bk);
        }
    }
    y
}

/// `<x - y, p_i - y>` with `p_i - y = Σ λ_j (p_i - p_j)`.
fn directional_gain(p: &[Vec<f64>], corral: &[usize], lambda: &[f64], i: usize, w: &[f64]) -> f64 {
    corral
        .iter()
        .zip(lambda)
        .map(|(&j, l)| l * dot(w, &sub(&p[i], &p[j])))
        .sum()
}

/// Weights of the point of `aff{p_j : j ∈ corral}` nearest to `x`, or
/// `None` when the corral is affinely dependent.
fn affine_minimizer(p: &[Vec<f64>], corral: &[usize], x: &[f64]) -> Option<Vec<f64>> {
    let k = corral.len() - 1;
    let base = &p[corral[0]];
    let d: Vec<Vec<f64>> = corral[1..].iter().map(|&j| sub(&p[j], base)).collect();
    let r = sub(x, base);
    // (DᵀD) μ = Dᵀ (x - p_{s0})
    let mut a: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut row: Vec<f64> = (0..k).map(|j| dot(&d[i], &d[j])).collect();
            row.push(dot(&d[i], &r));
            row
        })
        .collect();
    let diag_scale = (0..k).map(|i| a[i][i]).fold(0.0, f64::max);
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * diag_scale {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..k {
            let factor = a[row][col] / a[col][col];
            for j in col..=k {
                a[row][j] -= factor * a[col][j];
            }
        }
    }
    let mut mu = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| a[i][j] * mu[j]).sum();
        mu[i] = (a[i][k] - s) / a[i][i];
    }
    let mut alpha = vec![1.0 - mu.iter().sum::<f64>()];
    alpha.extend(mu);
    Some(alpha)
}

fn finish(m: usize, x: &[f64], y: Vec<f64>, corral: &[usize], lambda: &[f64]) -> ProjectionResult {
    let mut weights = vec![0.0; m];
    for (&j, l) in corral.iter().zip(lambda) {
        weights[j] += l;
    }
    ProjectionResult {
        distance: norm(&sub(x, &y)),
        nearest: y,
        weights,
    }
}

/// `φ_C(x) = ½‖x‖² - ½ dist(x, C)²`.
pub fn phi_c(c: &VPolytope, x: &[f64]) -> Result<f64> {
    let y = project_onto(c, x)?.nearest;
    Ok(dot(x, &y) - 0.5 * dot(&y, &y))
}

/// `scale · φ_C` as an oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiOracle {
    pub polytope: VPolytope,
    pub scale: f64,
}

impl PhiOracle {
    pub fn new(polytope: VPolytope) -> Self {
        PhiOracle {
            polytope,
            scale: 1.0,
        }
    }
}

impl ConvexOracle for PhiOracle {
    fn dim(&self) -> usize {
        self.polytope.dim()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        match phi_c(&self.polytope, x) {
            Ok(v) => self.scale * v,
            Err(_) => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecessionIdentityReport {
    pub trials: usize,
    /// Largest `|est(u) - s_C(u)| / (1 + |s_C(u)|)`.
    pub max_deviation: f64,
    pub worst_direction: Vec<f64>,
    pub passed: bool,
}

/// Compares the estimated recession of `φ_C` with `s_C` on random unit
/// directions.
pub fn verify_recession_identity<R: Rng + ?Sized>(
    c: &VPolytope,
    trials: usize,
    rng: &mut R,
) -> Result<RecessionIdentityReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if c.dim() == 0 {
        return Err(Error::InvalidArgument("polytope must live in R^n, n >= 1".into()));
    }
    let o = PhiOracle::new(c.clone());
    let mut max_deviation: f64 = 0.0;
    let mut worst_direction = vec![0.0; c.dim()];
    for _ in 0..trials {
        let u = unit_vector(rng, c.dim());
        let est = oracle::estimate_recession(&o, &u, RECESSION_HORIZON)?;
        let s = support_function(c, &u)?;
        let dev = (est - s).abs() / (1.0 + s.abs());
        if dev > max_deviation || dev.is_nan() {
            max_deviation = dev;
            worst_direction = u;
        }
    }
    Ok(RecessionIdentityReport {
        trials,
        max_deviation,
        worst_direction,
        passed: max_deviation <= RECESSION_IDENTITY_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqCollapse {
    pub n: usize,
    pub q: f64,
    /// `‖ξ‖₂ / ‖ξ‖_q`.
    pub ratio: f64,
    /// `ξ_k = k^{-1/2}`, `k = 1..n`.
    pub witness: Vec<f64>,
}

/// Ratio of the Euclidean and `ℓ_q` norms of `ξ = (k^{-1/2})_{k <= n}`.
///
/// The numerator grows like `√(ln n)` while the denominator converges for
/// `q > 2`, so no uniform `α` with `‖x‖_q >= α‖x‖₂` survives as `n` grows.
pub fn lq_inradius_collapse(n: usize, q: f64) -> Result<LqCollapse> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    if !(q > 2.0) || !q.is_finite() {
        return Err(Error::InvalidArgument(format!("q must be finite and > 2, got {q}")));
    }
    let witness: Vec<f64> = (1..=n).map(|k| 1.0 / (k as f64).sqrt()).collect();
    let lq = witness.iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q);
    Ok(LqCollapse {
        n,
        q,
        ratio: norm(&witness) / lq,
        witness,
    })
}

/// Findings for `f = 2φ_C` with `C = conv{0, e_1, ..., e_n, e_1 + ... + e_n}`,
/// a bounded stand-in for the nonnegative orthant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub dim: usize,
    /// Side length of the box the orthant is truncated to.
    pub truncation_radius: f64,
    pub directions_sampled: usize,
    pub constant_lines_found: usize,
    /// `{0}` unless a sampled direction was constant.
    pub lineality_estimate: Subspace,
    #[serde(with = "crate::format::extended")]
    pub recession_plus_e1: f64,
    #[serde(with = "crate::format::extended")]
    pub recession_minus_e1: f64,
    /// Sampled directions `u <= 0` along which the recession estimate is 0.
    pub negative_directions_sampled: usize,
    pub bounded_negative_rays: usize,
    pub directionally_coercive: bool,
}

pub const TRUNCATION_DIRECTIONS: usize = 20;

pub fn orthant_truncation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TruncationReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let mut points = vec![vec![0.0; n]];
    points.extend((0..n).map(|i| unit_coordinate(n, i)));
    points.push(vec![1.0; n]);
    let o = PhiOracle {
        polytope: VPolytope::new(points)?,
        scale: 2.0,
    };

    let mut constant = Vec::new();
    for _ in 0..TRUNCATION_DIRECTIONS {
        let u = unit_vector(rng, n);
        let x = gaussian_vector(rng, n);
        if oracle::is_constant_on_line(&o, &x, &u)? {
            constant.push(u);
        }
    }
    let lineality_estimate = crate::linalg::orthonormalize(&constant, n)?;

    let e1 = unit_coordinate(n, 0);
    let minus_e1: Vec<f64> = e1.iter().map(|v| -v).collect();
    let recession_plus_e1 = oracle::estimate_recession(&o, &e1, RECESSION_HORIZON)?;
    let recession_minus_e1 = oracle::estimate_recession(&o, &minus_e1, RECESSION_HORIZON)?;

    let mut bounded = 0;
    for _ in 0..TRUNCATION_DIRECTIONS {
        let u: Vec<f64> = unit_vector(rng, n).iter().map(|v| -v.abs()).collect();
        if oracle::estimate_recession(&o, &u, RECESSION_HORIZON)? <= oracle::RECESSION_TOL {
            bounded += 1;
        }
    }

    Ok(TruncationReport {
        dim: n,
        truncation_radius: 1.0,
        directions_sampled: TRUNCATION_DIRECTIONS,
        constant_lines_found: constant.len(),
        lineality_estimate,
        recession_plus_e1,
        recession_minus_e1,
        negative_directions_sampled: TRUNCATION_DIRECTIONS,
        bounded_negative_rays: bounded,
        directionally_coercive: bounded == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn poly(points: &[&[f64]]) -> VPolytope {
        VPolytope::new(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn square() -> VPolytope {
        poly(&[&[1.0, 1.0], &[1.0, -1.0], &[-1.0, 1.0], &[-1.0, -1.0]])
    }

    #[test]
    fn support_examples() {
        assert_eq!(support_function(&poly(&[&[-1.0], &[1.0]]), &[3.0]).unwrap(), 3.0);
        assert_eq!(support_function(&poly(&[&[0.0, 0.0]]), &[4.0, -2.0]).unwrap(), 0.0);
        let seg = poly(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(support_function(&seg, &[2.0, 5.0]).unwrap(), 5.0);
        assert!(support_function(&seg, &[1.0]).is_err());
    }

    #[test]
    fn projection_examples() {
        let seg = poly(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let r = project_onto(&seg, &[1.0, 0.0]).unwrap();
        assert_eq!(r.distance, 0.0);
        assert_eq!(r.nearest, vec![1.0, 0.0]);

        let r = project_onto(&seg, &[0.0, 0.0]).unwrap();
        assert!((r.nearest[0] - 0.5).abs() < 1e-12 && (r.nearest[1] - 0.5).abs() < 1e-12);
        assert!((r.distance - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

        let r = project_onto(&square(), &[2.0, 0.5]).unwrap();
        assert!((r.nearest[0] - 1.0).abs() < 1e-12 && (r.nearest[1] - 0.5).abs() < 1e-12);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_inside_is_identity() {
        let r = project_onto(&square(), &[0.3, -0.2]).unwrap();
        assert!(r.distance < 1e-12);
    }

    #[test]
    fn projection_far_away() {
        let x = [1e8, 3.0e7];
        let r = project_onto(&square(), &x).unwrap();
        assert_eq!(r.nearest, vec![1.0, 1.0]);
        let x = [1e8, 0.25];
        let r = project_onto(&square(), &x).unwrap();
        assert!((r.nearest[0] - 1.0).abs() < 1e-12);
        assert!((r.nearest[1] - 0.25).abs() < 1e-9);
    }

    #[test]
    fn phi_examples() {
        let origin = poly(&[&[0.0, 0.0]]);
        assert_eq!(phi_c(&origin, &[3.0, -4.0]).unwrap(), 0.0);
        let c = [1.5, -2.0];
        let single = poly(&[&c]);
        let x = [0.5, 4.0];
        assert!((phi_c(&single, &x).unwrap() - (dot(&x, &c) - 0.5 * dot(&c, &c))).abs() < 1e-12);
        let interval = poly(&[&[-1.0], &[1.0]]);
        assert!((phi_c(&interval, &[2.0]).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn recession_identity_examples() {
        let mut rng = StdRng::seed_from_u64(3);
        let interval = poly(&[&[-1.0], &[1.0]]);
        assert!(verify_recession_identity(&interval, 10, &mut rng).unwrap().passed);
        let single = poly(&[&[0.7, -0.2]]);
        assert!(verify_recession_identity(&single, 10, &mut rng).unwrap().passed);
        let r = verify_recession_identity(&square(), 100, &mut rng).unwrap();
        assert!(r.max_deviation < 1e-5, "{r:?}");
        assert!(verify_recession_identity(&square(), 0, &mut rng).is_err());
    }

    #[test]
    fn lq_examples() {
        for q in [2.5, 4.0, 10.0] {
            assert!((lq_inradius_collapse(1, q).unwrap().ratio - 1.0).abs() < 1e-15);
        }
        let r10 = lq_inradius_collapse(10, 4.0).unwrap().ratio;
        let r100 = lq_inradius_collapse(100, 4.0).unwrap().ratio;
        let r1000 = lq_inradius_collapse(1000, 4.0).unwrap().ratio;
        assert!(r10 < r100 && r100 < r1000);
        assert!(lq_inradius_collapse(10, 2.0).is_err());
        assert!(lq_inradius_collapse(0, 4.0).is_err());
    }

    #[test]
    fn truncation_one_dim() {
        let o = PhiOracle {
            polytope: poly(&[&[0.0], &[1.0], &[1.0]]),
            scale: 2.0,
        };
        for x in [-0.1, -3.0, -1e4] {
            assert_eq!(o.evaluate(&[x]), 0.0);
        }
        let mut rng = StdRng::seed_from_u64(7);
        let r = orthant_truncation(1, &mut rng).unwrap();
        assert!(r.recession_plus_e1 > 0.0);
        assert!(r.recession_minus_e1.abs() < 1e-12);
    }

    #[test]
    fn truncation_two_dim() {
        let mut rng = StdRng::seed_from_u64(8);
        let r = orthant_truncation(2, &mut rng).unwrap();
        assert_eq!(r.constant_lines_found, 0);
        assert!(r.lineality_estimate.is_zero());
        assert!((r.recession_plus_e1 - 2.0).abs() < 1e-6);
        assert_eq!(r.bounded_negative_rays, r.negative_directions_sampled);
        assert!(!r.directionally_coercive);
    }
}
