//! V-polytopes: convex hulls of finite point lists.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{all_finite, dot, orthonormalize, sub, Subspace};
use crate::lp::{self, LinearProgram, LpOutcome};

/// `conv{points}`. Generators are kept as given; redundant ones are
/// harmless to every LP built on top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeDoc", into = "PolytopeDoc")]
pub struct VPolytope {
    dim: usize,
    points: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct PolytopeDoc {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl From<VPolytope> for PolytopeDoc {
    fn from(p: VPolytope) -> Self {
        PolytopeDoc {
            dim: p.dim,
            points: p.points,
        }
    }
}

impl TryFrom<PolytopeDoc> for VPolytope {
    type Error = Error;

    fn try_from(doc: PolytopeDoc) -> Result<Self> {
        let p = VPolytope::new(doc.points)?;
        check_dim(doc.dim, p.dim)?;
        Ok(p)
    }
}

impl VPolytope {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points.first().ok_or(Error::NoGenerators)?;
        let dim = first.len();
        for p in &points {
            check_dim(dim, p.len())?;
            if !all_finite(p) {
                return Err(Error::NonFinite("polytope generator"));
            }
        }
        Ok(VPolytope { dim, points })
    }

    pub fn singleton(point: Vec<f64>) -> Result<Self> {
        Self::new(vec![point])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Mean of the generators; always a relative-interior point.
    pub fn barycenter(&self) -> Vec<f64> {
        let m = self.points.len() as f64;
        let mut c = vec![0.0; self.dim];
        for p in &self.points {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi / m;
            }
        }
        c
    }

    /// Direction space of the affine hull, `span{p_i - p_1}`.
    pub fn direction_space(&self) -> Subspace {
        let base = &self.points[0];
        let diffs: Vec<Vec<f64>> = self.points[1..].iter().map(|p| sub(p, base)).collect();
        orthonormalize(&diffs, self.dim).expect("generators share one dimension")
    }

    /// Same polytope translated by `-shift`.
    pub fn translate(&self, shift: &[f64]) -> Result<VPolytope> {
        check_dim(self.dim, shift.len())?;
        Ok(VPolytope {
            dim: self.dim,
            points: self.points.iter().map(|p| sub(p, shift)).collect(),
        })
    }

    /// `max_i <x, p_i>`.
    pub fn support(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self
            .points
            .iter()
            .map(|p| dot(p, x))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Membership `y ∈ conv{p_i}`, decided by an LP feasibility solve.
    pub fn contains(&self, y: &[f64]) -> Result<bool> {
        check_dim(self.dim, y.len())?;
        let m = self.points.len();
        let mut rows: Vec<Vec<f64>> = (0..self.dim)
            .map(|k| self.points.iter().map(|p| p[k]).collect())
            .collect();
        rows.push(vec![1.0; m]);
        let mut rhs = y.to_vec();
        rhs.push(1.0);
        let prog = LinearProgram::nonnegative(vec![0.0; m], rows, rhs)?;
        Ok(!matches!(lp::solve(&prog)?, LpOutcome::Infeasible))
    }
}
