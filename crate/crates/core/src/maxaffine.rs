//! Exact polyhedral model `f(x) = max_i(<a_i, x> + b_i)`.
//!
//! For such `f` everything the shape analysis needs is available in closed
//! form or through a small LP:
//!
//! * the recession function keeps the slopes and drops the offsets,
//!   `f_∞(u) = max_i <a_i, u>`;
//! * the closed conjugate domain is `conv{a_i}`, which is also `∂f_∞(0)`;
//! * `f*(y) = min{ -Σ λ_i b_i : Σ λ_i a_i = y, λ in the unit simplex }`.
//!
//! Because `f` is polyhedral, every point of `dom f* = conv{a_i}` is attained
//! as a subgradient somewhere (`Im ∂f = dom f*`). The decomposition code
//! relies on this; `tests/maxaffine_props.rs` checks it on random models.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{all_finite, dot, sub};
use crate::lp::{self, LinearProgram, LpOutcome};
use crate::polytope::VPolytope;

/// Relative slack used to call a piece active in [`MaxAffine::subdifferential`].
pub const ACTIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaxAffineDoc", into = "MaxAffineDoc")]
pub struct MaxAffine {
    dim: usize,
    slopes: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

/// JSON shape: `{"dim": n, "pieces": [{"slope": [...], "offset": b}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxAffineDoc {
    pub dim: usize,
    pub pieces: Vec<PieceDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub slope: Vec<f64>,
    pub offset: f64,
}

impl From<MaxAffine> for MaxAffineDoc {
    fn from(f: MaxAffine) -> Self {
        MaxAffineDoc {
            dim: f.dim,
            pieces: f
                .slopes
                .into_iter()
                .zip(f.offsets)
                .map(|(slope, offset)| PieceDoc { slope, offset })
                .collect(),
        }
    }
}

impl TryFrom<MaxAffineDoc> for MaxAffine {
    type Error = Error;

    fn try_from(doc: MaxAffineDoc) -> Result<Self> {
        let (slopes, offsets) = doc.pieces.into_iter().map(|p| (p.slope, p.offset)).unzip();
        MaxAffine::with_dim(doc.dim, slopes, offsets)
    }
}

impl MaxAffine {
    /// Builds a model from matching slope and offset lists; the dimension
    /// is taken from the first slope.
    pub fn new(slopes: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        let dim = slopes.first().ok_or(Error::NoPieces)?.len();
        Self::with_dim(dim, slopes, offsets)
    }

    /// Like [`MaxAffine::new`] but with an explicit dimension, which may be
    /// zero (a constant function on `R^0`).
    pub fn with_dim(dim: usize, slopes: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        if slopes.is_empty() {
            return Err(Error::NoPieces);
        }
        check_dim(slopes.len(), offsets.len())?;
        for a in &slopes {
            check_dim(dim, a.len())?;
            if !all_finite(a) {
                return Err(Error::NonFinite("slope"));
            }
        }
        if !all_finite(&offsets) {
            return Err(Error::NonFinite("offset"));
        }
        Ok(MaxAffine {
            dim,
            slopes,
            offsets,
        })
    }

    /// `<a, x> + b`.
    pub fn affine(slope: Vec<f64>, offset: f64) -> Result<Self> {
        Self::new(vec![slope], vec![offset])
    }

    /// `‖x‖_1 + offset` on `R^n`, one piece per sign pattern.
    pub fn l1_norm(dim: usize, offset: f64) -> Result<Self> {
        if dim == 0 || dim > 16 {
            return Err(Error::InvalidArgument(format!(
                "l1 norm needs 1 <= dim <= 16, got {dim}"
            )));
        }
        let slopes: Vec<Vec<f64>> = (0..1usize << dim)
            .map(|mask| {
                (0..dim)
                    .map(|k| if mask >> k & 1 == 1 { -1.0 } else { 1.0 })
                    .collect()
            })
            .collect();
        let offsets = vec![offset; slopes.len()];
        Self::new(slopes, offsets)
    }

    /// `‖x‖_∞ + offset` on `R^n` (slopes `±e_k`).
    pub fn linf_norm(dim: usize, offset: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("linf norm needs dim >= 1".into()));
        }
        let mut slopes = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; dim];
                e[k] = s;
                slopes.push(e);
            }
        }
        Self::new(slopes, vec![offset; 2 * dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_pieces(&self) -> usize {
        self.slopes.len()
    }

    pub fn slopes(&self) -> &[Vec<f64>] {
        &self.slopes
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        self.slopes
            .iter()
            .zip(&self.offsets)
            .map(|(a, b)| dot(a, x) + b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.value(x))
    }

    /// `f_∞(u) = max_i <a_i, u>`: same slopes, zero offsets.
    pub fn recession(&self) -> MaxAffine {
        MaxAffine {
            dim: self.dim,
            slopes: self.slopes.clone(),
            offsets: vec![0.0; self.offsets.len()],
        }
    }

    /// `cl dom f* = conv{a_i}`. No redundancy elimination.
    pub fn conjugate_domain(&self) -> VPolytope {
        VPolytope::new(self.slopes.clone()).expect("slopes validated at construction")
    }

    /// `f*(y)`, or `+inf` when `y ∉ conv{a_i}`.
    pub fn conjugate_value(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.dim, y.len())?;
        let m = self.slopes.len();
        let mut rows: Vec<Vec<f64>> = (0..self.dim)
            .map(|k| self.slopes.iter().map(|a| a[k]).collect())
            .collect();
        rows.push(vec![1.0; m]);
        let mut rhs = y.to_vec();
        rhs.push(1.0);
        // max Σ λ_i b_i, then negate.
        let prog = LinearProgram::nonnegative(self.offsets.clone(), rows, rhs)?;
        match lp::solve(&prog)? {
            LpOutcome::Optimal { value, .. } => Ok(-value),
            LpOutcome::Infeasible => Ok(f64::INFINITY),
            LpOutcome::Unbounded => Err(Error::LpFailure("conjugate program is bounded")),
        }
    }

    /// Indices of the pieces active at `x` (within the activity tolerance).
    pub fn active_pieces(&self, x: &[f64]) -> Result<Vec<usize>> {
        let fx = self.eval(x)?;
        let tol = ACTIVITY_TOL * (1.0 + fx.abs());
        Ok(self
            .slopes
            .iter()
            .zip(&self.offsets)
            .enumerate()
            .filter(|(_, (a, b))| dot(a, x) + *b >= fx - tol)
            .map(|(i, _)| i)
            .collect())
    }

    /// `∂f(x) = conv{a_i : piece i active at x}`.
    pub fn subdifferential(&self, x: &[f64]) -> Result<VPolytope> {
        let active = self.active_pieces(x)?;
        VPolytope::new(active.into_iter().map(|i| self.slopes[i].clone()).collect())
    }

    /// `f - <·, y>`: every slope shifted by `-y`.
    pub fn tilt(&self, y: &[f64]) -> Result<MaxAffine> {
        check_dim(self.dim, y.len())?;
        Ok(MaxAffine {
            dim: self.dim,
            slopes: self.slopes.iter().map(|a| sub(a, y)).collect(),
            offsets: self.offsets.clone(),
        })
    }

    /// `x ↦ self(A x) + <x, linear>` for a `k × n` matrix `A` given by rows,
    /// where `k = self.dim()`.
    pub fn precompose(&self, rows: &[Vec<f64>], linear: &[f64]) -> Result<MaxAffine> {
        check_dim(self.dim, rows.len())?;
        let n = linear.len();
        for r in rows {
            check_dim(n, r.len())?;
        }
        let slopes = self
            .slopes
            .iter()
            .map(|s| {
                let mut a = linear.to_vec();
                for (sk, r) in s.iter().zip(rows) {
                    for (aj, rj) in a.iter_mut().zip(r) {
                        *aj += sk * rj;
                    }
                }
                a
            })
            .collect();
        MaxAffine::with_dim(n, slopes, self.offsets.clone())
    }

    /// Same function with the pieces listed in `order`.
    pub fn permuted(&self, order: &[usize]) -> Result<MaxAffine> {
        check_dim(self.slopes.len(), order.len())?;
        let mut seen = vec![false; order.len()];
        for &i in order {
            if i >= order.len() || seen[i] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(MaxAffine {
            dim: self.dim,
            slopes: order.iter().map(|&i| self.slopes[i].clone()).collect(),
            offsets: order.iter().map(|&i| self.offsets[i]).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs() -> MaxAffine {
        MaxAffine::new(vec![vec![1.0], vec![-1.0]], vec![0.0, 0.0]).unwrap()
    }

    fn abs_minus_one() -> MaxAffine {
        MaxAffine::new(vec![vec![1.0], vec![-1.0]], vec![-1.0, -1.0]).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(MaxAffine::new(vec![], vec![]).unwrap_err(), Error::NoPieces);
        assert!(MaxAffine::new(vec![vec![1.0]], vec![0.0, 1.0]).is_err());
        assert!(MaxAffine::new(vec![vec![1.0], vec![1.0, 0.0]], vec![0.0, 0.0]).is_err());
        assert!(MaxAffine::new(vec![vec![f64::INFINITY]], vec![0.0]).is_err());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(abs().eval(&[3.0]).unwrap(), 3.0);
        let aff = MaxAffine::affine(vec![2.0, -1.0], 0.5).unwrap();
        assert_eq!(aff.eval(&[1.0, 1.0]).unwrap(), 1.5);
        let f =
            MaxAffine::new(vec![vec![1.0, 1.0], vec![-1.0, 1.0]], vec![0.0, 0.0]).unwrap();
        // pieces: 2 + 5 = 7 and -2 + 5 = 3
        assert_eq!(f.eval(&[2.0, 5.0]).unwrap(), 7.0);
        assert!(f.eval(&[1.0]).is_err());
    }

    #[test]
    fn zero_dimensional_model_is_constant() {
        let c = MaxAffine::with_dim(0, vec![vec![], vec![]], vec![1.0, 3.0]).unwrap();
        assert_eq!(c.eval(&[]).unwrap(), 3.0);
    }

    #[test]
    fn recession_of_shifted_norm_is_norm() {
        let r = abs_minus_one().recession();
        assert_eq!(r, abs());
        let aff = MaxAffine::affine(vec![2.0, 3.0], 7.0).unwrap().recession();
        assert_eq!(aff.offsets(), &[0.0]);
        assert_eq!(aff.slopes(), &[vec![2.0, 3.0]]);
    }

    #[test]
    fn conjugate_domain_examples() {
        assert_eq!(abs().conjugate_domain().points(), &[vec![1.0], vec![-1.0]]);
        let aff = MaxAffine::affine(vec![4.0], 1.0).unwrap();
        assert_eq!(aff.conjugate_domain().len(), 1);
        let l1 = MaxAffine::l1_norm(2, 0.0).unwrap();
        let mut pts = l1.conjugate_domain().points().to_vec();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            pts,
            vec![
                vec![-1.0, -1.0],
                vec![-1.0, 1.0],
                vec![1.0, -1.0],
                vec![1.0, 1.0]
            ]
        );
    }

    #[test]
    fn conjugate_value_examples() {
        // f = |x| - 1 has f* = indicator of [-1, 1] plus 1.
        assert!((abs_minus_one().conjugate_value(&[0.5]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(abs().conjugate_value(&[2.0]).unwrap(), f64::INFINITY);
        assert!(abs().conjugate_value(&[0.0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn subdifferential_examples() {
        assert_eq!(abs().subdifferential(&[2.0]).unwrap().points(), &[vec![1.0]]);
        assert_eq!(
            abs().subdifferential(&[0.0]).unwrap().points(),
            &[vec![1.0], vec![-1.0]]
        );
    }

    #[test]
    fn precompose_matches_direct_evaluation() {
        let h = abs();
        // f(x, y) = |x - y| + <(x, y), (0, 2)>
        let f = h.precompose(&[vec![1.0, -1.0]], &[0.0, 2.0]).unwrap();
        let x = [3.0, 5.0];
        assert!((f.eval(&x).unwrap() - (2.0 + 10.0)).abs() < 1e-12);
    }

    #[test]
    fn permuted_rejects_non_permutations() {
        assert!(abs().permuted(&[0, 0]).is_err());
        assert_eq!(abs().permuted(&[1, 0]).unwrap().slopes()[0], vec![-1.0]);
    }

    #[test]
    fn json_document_shape() {
        let f = abs_minus_one();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"dim": 1, "pieces": [
                {"slope": [1.0], "offset": -1.0},
                {"slope": [-1.0], "offset": -1.0}
            ]})
        );
        let back: MaxAffine = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
        let bad = serde_json::json!({"dim": 2, "pieces": [{"slope": [1.0], "offset": 0.0}]});
        assert!(serde_json::from_value::<MaxAffine>(bad).is_err());
    }
}
