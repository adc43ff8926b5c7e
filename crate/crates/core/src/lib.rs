//! Global shape of finite-dimensional convex functions.
//!
//! The engine computes recession functions, lineality spaces, coercivity
//! classifications and the orthogonal factorization
//! `f = c∘Pr_Z + <·, v>` exactly for max-affine models, and numerically for
//! black-box convex oracles.

pub mod decompose;
pub mod error;
pub mod format;
pub mod infconv;
pub mod linalg;
pub mod lp;
pub mod maxaffine;
pub mod oracle;
pub mod polytope;
pub mod sample;
pub mod shape;

pub use decompose::{Decomposition, Factorization, QuotientMin};
pub use error::{Error, Result};
pub use format::FunctionSpec;
pub use linalg::Subspace;
pub use lp::{LinearProgram, LpOutcome};
pub use maxaffine::MaxAffine;
pub use oracle::{ConvexOracle, RayPattern, RayReport};
pub use polytope::VPolytope;
pub use shape::ShapeReport;
