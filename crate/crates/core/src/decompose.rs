//! Quotient factorizations of max-affine functions.
//!
//! For `x* ∈ dom f*` put `Y = L_{x*}` and let `Q` be an orthonormal basis of
//! `Z = Y^⊥`. Then `f(x) = h(Qᵀx) + <x, x*>` where `h` has slopes
//! `Qᵀ(a_i - x*)` and the same offsets. Taking `Y = L_f` instead, all slopes
//! share one projection `v` onto `Y`, which gives `f = c∘Qᵀ + <·, v>`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{complement, distance, dot, project, sub, Subspace};
use crate::lp::{self, LinearProgram, LpOutcome};
use crate::maxaffine::MaxAffine;
use crate::shape::{essential_certificate, lineality, lineality_at, ri_membership};

/// Tolerance of the Fenchel-equality check at a quotient minimizer.
pub const FENCHEL_TOL: f64 = 1e-7;

/// `f = h∘Qᵀ + <·, x*>` with `Y = L_{x*}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    pub lineality: Subspace,
    pub quotient: Subspace,
    pub h: MaxAffine,
    pub certificate: Vec<f64>,
}

impl Factorization {
    /// `h(Qᵀx) + <x, x*>`.
    pub fn reconstruct(&self, x: &[f64]) -> Result<f64> {
        let w = self.quotient.coordinates(x)?;
        Ok(self.h.eval(&w)? + dot(x, &self.certificate))
    }
}

fn quotient_slopes(f: &MaxAffine, z: &Subspace, shift: &[f64]) -> Result<MaxAffine> {
    let slopes = f
        .slopes()
        .iter()
        .map(|a| z.coordinates(&sub(a, shift)))
        .collect::<Result<Vec<_>>>()?;
    MaxAffine::with_dim(z.dim(), slopes, f.offsets().to_vec())
}

pub fn factor(f: &MaxAffine, xstar: &[f64]) -> Result<Factorization> {
    let y = lineality_at(f, xstar)?;
    let z = complement(&y);
    let h = quotient_slopes(f, &z, xstar)?;
    Ok(Factorization {
        lineality: y,
        quotient: z,
        h,
        certificate: xstar.to_vec(),
    })
}

/// `f = c∘Qᵀ + <·, v>` with `Y = L_f`, `Z = Y^⊥`, `v = Pr_Y a_1`.
///
/// `c - <·, z_shift>` is directionally coercive on `R^{dim Z}`, where
/// `z_shift` holds the `Z`-coordinates of `certificate - v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub y: Subspace,
    pub z: Subspace,
    pub v: Vec<f64>,
    pub certificate: Vec<f64>,
    pub c: MaxAffine,
    pub z_shift: Vec<f64>,
}

impl Decomposition {
    /// `c(Qᵀx) + <x, v>`.
    pub fn reconstruct(&self, x: &[f64]) -> Result<f64> {
        let w = self.z.coordinates(x)?;
        Ok(self.c.eval(&w)? + dot(x, &self.v))
    }

    /// `c - <·, z_shift>` as a model on `Z`-coordinates.
    pub fn coercive_part(&self) -> MaxAffine {
        self.c
            .tilt(&self.z_shift)
            .expect("z_shift has dim Z entries")
    }

    /// Largest `|f(x) - reconstruct(x)| / (1 + |f(x)|)` over `points`.
    pub fn residual(&self, f: &MaxAffine, points: &[Vec<f64>]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for x in points {
            let fx = f.eval(x)?;
            let r = (fx - self.reconstruct(x)?).abs() / (1.0 + fx.abs());
            worst = worst.max(r);
        }
        Ok(worst)
    }

    /// Largest pairwise distance between the projections of the slopes onto
    /// `Y`; zero in exact arithmetic.
    pub fn v_spread(&self, f: &MaxAffine) -> f64 {
        f.slopes()
            .iter()
            .map(|a| distance(&project(&self.y, a).expect("slope dims"), &self.v))
            .fold(0.0, f64::max)
    }
}

pub fn decompose_hilbert(f: &MaxAffine) -> Decomposition {
    build(f, essential_certificate(f))
}

/// As [`decompose_hilbert`] with a caller-chosen certificate, which must lie
/// in the relative interior of `conv{a_i}`.
pub fn decompose_with_certificate(f: &MaxAffine, certificate: &[f64]) -> Result<Decomposition> {
    check_dim(f.dim(), certificate.len())?;
    if !ri_membership(&f.conjugate_domain(), certificate)? {
        return Err(Error::CertificateNotRelativeInterior);
    }
    Ok(build(f, certificate.to_vec()))
}

fn build(f: &MaxAffine, certificate: Vec<f64>) -> Decomposition {
    let y = lineality(f);
    let z = complement(&y);
    let v = project(&y, &f.slopes()[0]).expect("slope dims");
    let c = quotient_slopes(f, &z, &vec![0.0; f.dim()]).expect("slope dims");
    let z_shift = z
        .coordinates(&sub(&certificate, &v))
        .expect("certificate dims");
    Decomposition {
        y,
        z,
        v,
        certificate,
        c,
        z_shift,
    }
}

/// Infimum of `h` in `f = h∘Qᵀ + <·, x*>`, with a minimizer when attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientMin {
    /// `-f*(x*)`; `-inf` outside `conv{a_i}`.
    #[serde(with = "crate::format::extended")]
    pub value: f64,
    pub attained: bool,
    /// Minimizer of `h` in `Z`-coordinates.
    pub argmin: Option<Vec<f64>>,
    /// `Q · argmin`, a point where `x* ∈ ∂f`.
    pub preimage: Option<Vec<f64>>,
}

pub fn quotient_min(f: &MaxAffine, xstar: &[f64]) -> Result<QuotientMin> {
    check_dim(f.dim(), xstar.len())?;
    let value = -f.conjugate_value(xstar)?;
    // Polyhedral functions attain their infimum whenever it is finite, and
    // Im ∂f = conv{a_i}.
    if value == f64::NEG_INFINITY {
        return Ok(QuotientMin {
            value,
            attained: false,
            argmin: None,
            preimage: None,
        });
    }
    let fac = factor(f, xstar)?;
    let w = minimize_max_affine(&fac.h)?;
    let x = fac.quotient.lift(&w)?;
    let gap = f.eval(&x)? - dot(&x, xstar) - value;
    if gap.abs() > FENCHEL_TOL * (1.0 + value.abs() + f.eval(&x)?.abs()) {
        return Err(Error::LpFailure("minimizer fails the Fenchel equality"));
    }
    Ok(QuotientMin {
        value,
        attained: true,
        argmin: Some(w),
        preimage: Some(x),
    })
}

/// Minimizer of a max-affine `h` via `min t` s.t. `<s_i, w> + b_i <= t`.
fn minimize_max_affine(h: &MaxAffine) -> Result<Vec<f64>> {
    let k = h.dim();
    let m = h.num_pieces();
    // Variables: w (k, free), t (free), σ (m, >= 0).
    // Rows: t - <s_i, w> - σ_i = b_i.
    let rows: Vec<Vec<f64>> = h
        .slopes()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut r: Vec<f64> = s.iter().map(|v| -v).collect();
            r.push(1.0);
            r.extend((0..m).map(|j| if i == j { -1.0 } else { 0.0 }));
            r
        })
        .collect();
    let mut objective = vec![0.0; k + 1 + m];
    objective[k] = -1.0;
    let mut lower = vec![f64::NEG_INFINITY; k + 1];
    lower.extend(std::iter::repeat_n(0.0, m));
    let prog = LinearProgram::new(objective, rows, h.offsets().to_vec(), lower)?;
    match lp::solve(&prog)? {
        LpOutcome::Optimal { point, .. } => Ok(point[..k].to_vec()),
        LpOutcome::Unbounded => Err(Error::LpFailure("quotient is unbounded below")),
        LpOutcome::Infeasible => Err(Error::LpFailure("epigraph program is feasible")),
    }
}
