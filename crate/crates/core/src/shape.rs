//! Shape classification of max-affine functions.
//!
//! Writing `g = f_∞` and `B = ∂g(0) = conv{a_i}`:
//!
//! * `L_{x*} = {u : g(±u) = ±<u, x*>} = [B - x*]^⊥`, and for any `x* ∈ B`
//!   this is the lineality space `L_f = [B - B]^⊥`;
//! * `x*` is in the relative interior of `B` iff some strictly positive
//!   convex combination of the generators equals `x*`, and in the interior
//!   iff additionally `B` is full-dimensional;
//! * `f` is directionally coercive iff `0 ∈ int B`, in which case
//!   `f_∞(x) >= α‖x‖` with `α` the inradius of `B` about the origin.
//!
//! In `R^n` the quasi-(relative) interiors of the general theory coincide
//! with the classical interior and relative interior, so those are what the
//! membership tests decide.

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, complement, dot, norm, orthonormalize, sub, Subspace};
use crate::lp::{self, LinearProgram, LpOutcome};
use crate::maxaffine::MaxAffine;
use crate::polytope::VPolytope;
use crate::sample::unit_vector;

/// Margin the strict-positivity LP must clear in [`ri_membership`].
pub const RI_MARGIN: f64 = 1e-9;

/// Relative tolerance for the exact line and ray tests.
pub const LINE_TOL: f64 = 1e-9;

/// Subset budget for exact facet enumeration above dimension 3.
pub const FACET_SUBSET_BUDGET: u128 = 200_000;

/// Directions sampled when facet enumeration is too expensive.
pub const COERCIVITY_SAMPLES: usize = 100_000;

fn line_tol(f: &MaxAffine, u: &[f64], extra: f64) -> f64 {
    let largest = f.slopes().iter().map(|a| norm(a)).fold(0.0, f64::max);
    LINE_TOL * (1.0 + largest + extra) * norm(u)
}

fn nonzero_direction(u: &[f64]) -> Result<()> {
    if u.iter().all(|v| *v == 0.0) {
        Err(Error::ZeroDirection)
    } else {
        Ok(())
    }
}

/// `L_{x*} = span{a_i - x*}^⊥`.
pub fn lineality_at(f: &MaxAffine, xstar: &[f64]) -> Result<Subspace> {
    check_dim(f.dim(), xstar.len())?;
    let diffs: Vec<Vec<f64>> = f.slopes().iter().map(|a| sub(a, xstar)).collect();
    Ok(complement(&orthonormalize(&diffs, f.dim())?))
}

/// `L_f = span{a_i - a_1}^⊥`.
pub fn lineality(f: &MaxAffine) -> Subspace {
    complement(&f.conjugate_domain().direction_space())
}

/// `f` is constant on every line parallel to `u` iff `f_∞(u) = f_∞(-u) = 0`.
pub fn constant_line_test(f: &MaxAffine, u: &[f64]) -> Result<bool> {
    affine_line_test(f, u, &vec![0.0; f.dim()])
}

/// `f(x0 + t u) - f(x0) = t <u, u*>` for all `t` iff `f_∞(±u) = ±<u, u*>`.
pub fn affine_line_test(f: &MaxAffine, u: &[f64], ustar: &[f64]) -> Result<bool> {
    check_dim(f.dim(), u.len())?;
    check_dim(f.dim(), ustar.len())?;
    nonzero_direction(u)?;
    let g = f.recession();
    let minus: Vec<f64> = u.iter().map(|v| -v).collect();
    let tol = line_tol(f, u, norm(ustar));
    let slope = dot(u, ustar);
    Ok((g.value(u) - slope).abs() <= tol && (g.value(&minus) + slope).abs() <= tol)
}

/// `f` is bounded above on every ray `x + R_+ u` iff `f_∞(u) <= 0`.
pub fn ray_bounded(f: &MaxAffine, u: &[f64]) -> Result<bool> {
    check_dim(f.dim(), u.len())?;
    nonzero_direction(u)?;
    Ok(f.recession().value(u) <= line_tol(f, u, 0.0))
}

/// Largest `ε` with `y = Σ λ_i p_i`, `Σ λ_i = 1`, `λ_i >= ε`, or `None`
/// when `y ∉ conv{p_i}`.
pub fn ri_margin(p: &VPolytope, y: &[f64]) -> Result<Option<f64>> {
    check_dim(p.dim(), y.len())?;
    let m = p.len();
    // λ_i = μ_i + ε with μ_i >= 0 and ε free.
    let mut rows: Vec<Vec<f64>> = (0..p.dim())
        .map(|k| {
            let mut r: Vec<f64> = p.points().iter().map(|q| q[k]).collect();
            r.push(p.points().iter().map(|q| q[k]).sum());
            r
        })
        .collect();
    let mut simplex = vec![1.0; m];
    simplex.push(m as f64);
    rows.push(simplex);
    let mut rhs = y.to_vec();
    rhs.push(1.0);
    let mut objective = vec![0.0; m];
    objective.push(1.0);
    let mut lower = vec![0.0; m];
    lower.push(f64::NEG_INFINITY);
    let prog = LinearProgram::new(objective, rows, rhs, lower)?;
    match lp::solve(&prog)? {
        LpOutcome::Optimal { value, .. } => Ok(Some(value)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::LpFailure("margin program is bounded")),
    }
}

/// `y ∈ ri conv{p_i}`.
pub fn ri_membership(p: &VPolytope, y: &[f64]) -> Result<bool> {
    Ok(ri_margin(p, y)?.is_some_and(|eps| eps > RI_MARGIN))
}

/// `y ∈ int conv{p_i}`: relative interior of a full-dimensional polytope.
pub fn qi_membership(p: &VPolytope, y: &[f64]) -> Result<bool> {
    Ok(ri_membership(p, y)? && p.direction_space().is_full())
}

/// `[f_∞ <= 0] = {0}`, i.e. `0 ∈ int conv{a_i}`.
pub fn is_directionally_coercive(f: &MaxAffine) -> bool {
    qi_membership(&f.conjugate_domain(), &vec![0.0; f.dim()])
        .expect("conjugate domain lives in R^n")
}

/// Slope barycenter, a relative-interior point of `dom f*`.
pub fn essential_certificate(f: &MaxAffine) -> Vec<f64> {
    f.conjugate_domain().barycenter()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoercivityMethod {
    /// Exact: minimum distance from the origin to a facet hyperplane.
    FacetEnumeration,
    /// Minimum of the support function over sampled unit directions. This
    /// can only overestimate the true constant.
    SampledUpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoercivityConstant {
    pub alpha: f64,
    pub method: CoercivityMethod,
}

impl CoercivityConstant {
    pub fn is_exact(&self) -> bool {
        self.method == CoercivityMethod::FacetEnumeration
    }
}

fn binomial(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    (0..k).fold(1u128, |acc, i| acc * (m - i) as u128 / (i + 1) as u128)
}

/// Calls `visit` with every increasing `k`-subset of `0..m`.
fn for_each_subset(m: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + m - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Inradius about the origin of a polytope containing it in the interior,
/// by enumerating hyperplanes through affinely independent generator subsets.
fn inradius_by_facets(points: &[Vec<f64>], n: usize) -> f64 {
    let radius = points.iter().map(|p| norm(p)).fold(0.0, f64::max);
    let tol = LINE_TOL * (1.0 + radius);
    let mut alpha = f64::INFINITY;
    for_each_subset(points.len(), n, |subset| {
        let base = &points[subset[0]];
        let diffs: Vec<Vec<f64>> = subset[1..].iter().map(|&i| sub(&points[i], base)).collect();
        let span = orthonormalize(&diffs, n).expect("points share dimension n");
        if span.dim() + 1 != n {
            return;
        }
        let normal = complement(&span).basis()[0].clone();
        let mut offset = dot(&normal, base);
        let sign = if offset < 0.0 { -1.0 } else { 1.0 };
        offset *= sign;
        let supporting = points
            .iter()
            .all(|p| sign * dot(&normal, p) <= offset + tol);
        if supporting {
            alpha = alpha.min(offset);
        }
    });
    alpha
}

fn inradius_by_sampling(points: &[Vec<f64>], n: usize, samples: usize) -> f64 {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    (0..samples)
        .map(|_| {
            let u = unit_vector(&mut rng, n);
            points
                .iter()
                .map(|p| dot(p, &u))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest `α` with `f_∞(x) - <x, x*> >= α‖x‖` for all `x`.
///
/// Requires `x* ∈ int conv{a_i}`; otherwise no positive `α` exists and
/// [`Error::NotInterior`] is returned. Exact (facet enumeration) for
/// `n <= 3`, and above that whenever the number of generator subsets stays
/// under [`FACET_SUBSET_BUDGET`]; beyond it a sampled estimate is returned
/// and flagged as an upper bound.
pub fn coercivity_constant(f: &MaxAffine, xstar: &[f64]) -> Result<CoercivityConstant> {
    let domain = f.conjugate_domain();
    if !qi_membership(&domain, xstar)? {
        return Err(Error::NotInterior);
    }
    let n = f.dim();
    if n == 0 {
        return Ok(CoercivityConstant {
            alpha: f64::INFINITY,
            method: CoercivityMethod::FacetEnumeration,
        });
    }
    let shifted = domain.translate(xstar)?;
    let points = shifted.points();
    if n <= 3 || binomial(points.len(), n) <= FACET_SUBSET_BUDGET {
        Ok(CoercivityConstant {
            alpha: inradius_by_facets(points, n),
            method: CoercivityMethod::FacetEnumeration,
        })
    } else {
        Ok(CoercivityConstant {
            alpha: inradius_by_sampling(points, n, COERCIVITY_SAMPLES),
            method: CoercivityMethod::SampledUpperBound,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub dim: usize,
    pub lineality: Subspace,
    pub conjugate_domain: VPolytope,
    pub directionally_coercive: bool,
    pub essential_certificate: Vec<f64>,
    /// Present when the function is directionally coercive (`x* = 0`).
    pub coercivity_constant: Option<CoercivityConstant>,
}

pub fn analyze(f: &MaxAffine) -> Result<ShapeReport> {
    let lineality = lineality(f);
    let directionally_coercive = is_directionally_coercive(f);
    let coercivity_constant = if directionally_coercive {
        Some(coercivity_constant(f, &vec![0.0; f.dim()])?)
    } else {
        None
    };
    Ok(ShapeReport {
        dim: f.dim(),
        lineality,
        conjugate_domain: f.conjugate_domain(),
        directionally_coercive,
        essential_certificate: essential_certificate(f),
        coercivity_constant,
    })
}

impl ShapeReport {
    /// Checks the report's structural invariants.
    pub fn check(&self) -> bool {
        let spread = self.conjugate_domain.direction_space();
        let orthogonal = self.lineality.is_subspace_of(&linalg::complement(&spread), 1e-9);
        orthogonal && (!self.directionally_coercive || self.lineality.is_zero())
    }
}
