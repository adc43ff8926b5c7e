//! Dense vectors, orthonormal bases and subspaces of `R^n`.
//!
//! Every lineality space, quotient and projection in the engine is a
//! [`Subspace`]: an explicit orthonormal basis together with the ambient
//! dimension. Bases are built with two-pass (re-orthogonalized)
//! Gram-Schmidt, which is accurate enough for the dimensions handled here.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Relative rank tolerance used by [`orthonormalize`].
pub const RANK_TOL: f64 = 1e-10;

/// Orthonormality tolerance enforced on every [`Subspace`] basis.
pub const BASIS_TOL: f64 = 1e-10;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += s * x`
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// A linear subspace of `R^n` stored as an orthonormal basis.
///
/// The basis may be empty (the zero subspace). Values are immutable once
/// built; use [`orthonormalize`] or [`complement`] to construct them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceDoc", into = "SubspaceDoc")]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceDoc {
    ambient_dim: usize,
    dim: usize,
    basis: Vec<Vec<f64>>,
}

impl From<Subspace> for SubspaceDoc {
    fn from(s: Subspace) -> Self {
        SubspaceDoc {
            ambient_dim: s.ambient_dim,
            dim: s.basis.len(),
            basis: s.basis,
        }
    }
}

impl TryFrom<SubspaceDoc> for Subspace {
    type Error = Error;

    fn try_from(doc: SubspaceDoc) -> Result<Self> {
        check_dim(doc.dim, doc.basis.len())?;
        Subspace::from_orthonormal(doc.ambient_dim, doc.basis)
    }
}

impl Subspace {
    /// The zero subspace of `R^n`.
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    /// All of `R^n`, with the standard basis.
    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| unit_coordinate(ambient_dim, i))
            .collect();
        Subspace { ambient_dim, basis }
    }

    /// Wraps a basis that is already orthonormal, checking it.
    pub fn from_orthonormal(ambient_dim: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        if basis.len() > ambient_dim {
            return Err(Error::InvalidArgument(format!(
                "{} basis vectors in dimension {ambient_dim}",
                basis.len()
            )));
        }
        for b in &basis {
            check_dim(ambient_dim, b.len())?;
            if !all_finite(b) {
                return Err(Error::NonFinite("subspace basis"));
            }
        }
        for (i, a) in basis.iter().enumerate() {
            if (dot(a, a) - 1.0).abs() > BASIS_TOL {
                return Err(Error::InvalidArgument("basis vector is not unit-norm".into()));
            }
            for b in &basis[i + 1..] {
                if dot(a, b).abs() > BASIS_TOL {
                    return Err(Error::InvalidArgument("basis is not orthogonal".into()));
                }
            }
        }
        Ok(Subspace { ambient_dim, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Coordinates `Q^T x` of `x` in this basis.
    pub fn coordinates(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.ambient_dim, x.len())?;
        Ok(self.basis.iter().map(|q| dot(q, x)).collect())
    }

    /// Maps coordinates back into `R^n`: `Q w`.
    pub fn lift(&self, coords: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.basis.len(), coords.len())?;
        let mut out = vec![0.0; self.ambient_dim];
        for (q, c) in self.basis.iter().zip(coords) {
            axpy(*c, q, &mut out);
        }
        Ok(out)
    }

    /// Distance from `x` to the subspace.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        let p = project(self, x)?;
        Ok(distance(x, &p))
    }

    /// Whether `x` lies in the subspace up to `tol` (absolute residual).
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.residual(x)? <= tol)
    }

    /// Subspace equality by mutual projection: equal dimension and every
    /// basis vector of each lies in the other within `tol`.
    pub fn same_span(&self, other: &Subspace, tol: f64) -> bool {
        if self.ambient_dim != other.ambient_dim || self.dim() != other.dim() {
            return false;
        }
        let inside = |a: &Subspace, b: &Subspace| {
            a.basis
                .iter()
                .all(|q| b.residual(q).map(|r| r <= tol).unwrap_or(false))
        };
        inside(self, other) && inside(other, self)
    }

    /// Whether `self` is contained in `other` (basis residuals within `tol`).
    pub fn is_subspace_of(&self, other: &Subspace, tol: f64) -> bool {
        self.ambient_dim == other.ambient_dim
            && self
                .basis
                .iter()
                .all(|q| other.residual(q).map(|r| r <= tol).unwrap_or(false))
    }
}

pub fn unit_coordinate(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Removes from `w` its components along the (orthonormal) `basis`, twice.
fn reorthogonalize(basis: &[Vec<f64>], w: &mut [f64]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

/// Rank-revealing orthonormalization of `vectors`.
///
/// A vector whose residual after projecting out the current basis falls
/// below [`RANK_TOL`] times the largest input norm is treated as dependent
/// and dropped.
pub fn orthonormalize(vectors: &[Vec<f64>], ambient_dim: usize) -> Result<Subspace> {
    for v in vectors {
        check_dim(ambient_dim, v.len())?;
        if !all_finite(v) {
            return Err(Error::NonFinite("vector"));
        }
    }
    let largest = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    if largest == 0.0 {
        return Ok(Subspace::zero(ambient_dim));
    }
    let threshold = RANK_TOL * largest;
    for v in vectors {
        if basis.len() == ambient_dim {
            break;
        }
        let mut w = v.clone();
        reorthogonalize(&basis, &mut w);
        let r = norm(&w);
        if r >= threshold {
            basis.push(scale(&w, 1.0 / r));
        }
    }
    Ok(Subspace { ambient_dim, basis })
}

/// Orthogonal complement `S^⊥`.
///
/// Completes the basis of `S` with standard basis vectors, always taking the
/// one with the largest residual next so no near-dependent vector is
/// normalized.
pub fn complement(s: &Subspace) -> Subspace {
    let n = s.ambient_dim;
    let mut basis = s.basis.clone();
    let mut out = Vec::with_capacity(n - s.dim());
    while basis.len() < n {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for i in 0..n {
            let mut w = unit_coordinate(n, i);
            reorthogonalize(&basis, &mut w);
            let r = norm(&w);
            if best.as_ref().is_none_or(|(rb, _)| r > *rb) {
                best = Some((r, w));
            }
        }
        let (r, w) = best.expect("n > 0 whenever the basis is incomplete");
        let q = scale(&w, 1.0 / r);
        basis.push(q.clone());
        out.push(q);
    }
    Subspace {
        ambient_dim: n,
        basis: out,
    }
}

/// Orthogonal projection of `x` onto `S`.
pub fn project(s: &Subspace, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(s.ambient_dim, x.len())?;
    let mut out = vec![0.0; s.ambient_dim];
    for q in &s.basis {
        axpy(dot(q, x), q, &mut out);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn collinear_pair_collapses() {
        let s = orthonormalize(&[vec![1.0, 0.0], vec![2.0, 0.0]], 2).unwrap();
        assert_eq!(s.dim(), 1);
        assert_close(&s.basis()[0], &[1.0, 0.0], 1e-15);
    }

    #[test]
    fn empty_input_gives_zero_subspace() {
        let s = orthonormalize(&[], 3).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.ambient_dim(), 3);
    }

    #[test]
    fn diagonal_pair_spans_plane() {
        let s = orthonormalize(&[vec![1.0, 1.0], vec![1.0, -1.0]], 2).unwrap();
        assert_eq!(s.dim(), 2);
        // Q Q^T = I
        for i in 0..2 {
            for j in 0..2 {
                let qqt: f64 = s.basis().iter().map(|q| q[i] * q[j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((qqt - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let err = orthonormalize(&[vec![1.0, 0.0], vec![1.0]], 2).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn complement_of_axis() {
        let s = orthonormalize(&[vec![1.0, 0.0]], 2).unwrap();
        let c = complement(&s);
        assert_eq!(c.dim(), 1);
        assert!((c.basis()[0][0]).abs() < 1e-15);
        assert!((c.basis()[0][1].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complement_of_zero_is_everything() {
        let c = complement(&Subspace::zero(3));
        assert!(c.is_full());
        assert!(c.same_span(&Subspace::full(3), 1e-12));
    }

    #[test]
    fn double_complement_round_trip() {
        let s = orthonormalize(&[vec![1.0, 1.0, 0.0]], 3).unwrap();
        let c = complement(&s);
        assert_eq!(c.dim(), 2);
        for q in c.basis() {
            assert!(dot(q, &s.basis()[0]).abs() < 1e-12);
        }
        assert!(complement(&c).same_span(&s, 1e-12));
    }

    #[test]
    fn projection_examples() {
        let axis = orthonormalize(&[vec![1.0, 0.0]], 2).unwrap();
        assert_close(&project(&axis, &[3.0, 4.0]).unwrap(), &[3.0, 0.0], 1e-15);

        let full = Subspace::full(4);
        let x = [1.5, -2.0, 0.25, 7.0];
        assert_close(&project(&full, &x).unwrap(), &x, 1e-15);

        let diag = orthonormalize(&[vec![1.0, 1.0]], 2).unwrap();
        assert_close(&project(&diag, &[1.0, 0.0]).unwrap(), &[0.5, 0.5], 1e-12);
    }

    #[test]
    fn projection_dimension_checked() {
        let axis = Subspace::full(2);
        assert!(project(&axis, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn coordinates_and_lift_invert_on_span() {
        let s = orthonormalize(&[vec![1.0, 2.0, 2.0], vec![0.0, 1.0, -1.0]], 3).unwrap();
        let x = [0.3, -1.2, 4.0];
        let p = project(&s, &x).unwrap();
        let back = s.lift(&s.coordinates(&x).unwrap()).unwrap();
        assert_close(&p, &back, 1e-12);
    }

    #[test]
    fn from_orthonormal_rejects_bad_basis() {
        assert!(Subspace::from_orthonormal(2, vec![vec![1.0, 1.0]]).is_err());
        assert!(Subspace::from_orthonormal(2, vec![vec![1.0, 0.0], vec![1.0, 0.0]]).is_err());
        assert!(Subspace::from_orthonormal(2, vec![vec![0.0, 1.0]]).is_ok());
    }

    #[test]
    fn serde_round_trip() {
        let s = orthonormalize(&[vec![1.0, 1.0, 0.0]], 3).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: Subspace = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }
}
