//! JSON input documents and extended-real serialization.
//!
//! A function document carries a `kind` tag:
//!
//! ```json
//! {"kind": "max_affine", "dim": 2, "pieces": [{"slope": [1, 1], "offset": 0}]}
//! {"kind": "phi_C", "dim": 1, "points": [[-1], [1]], "scale": 1.0}
//! {"kind": "builtin", "dim": 3, "name": "euclidean_norm"}
//! ```
//!
//! A document without `kind` is read as `max_affine`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::maxaffine::{MaxAffine, MaxAffineDoc, PieceDoc};
use crate::oracle::ConvexOracle;
use crate::polytope::VPolytope;
use crate::infconv::PhiOracle;

/// Serde adapter writing `±inf` and NaN as the strings `"inf"`, `"-inf"`
/// and `"nan"`, since JSON numbers cannot hold them.
pub mod extended {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    struct Extended;

    impl Visitor<'_> for Extended {
        type Value = f64;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(Extended)
    }
}

/// Smooth or nonpolyhedral convex functions available by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `½‖x‖²`
    HalfNormSquared,
    /// `Σ max(0, x_k)²`
    PositivePartSquared,
    /// `‖x‖₂`
    EuclideanNorm,
    /// `log Σ exp(x_k)`
    LogSumExp,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [
        Builtin::HalfNormSquared,
        Builtin::PositivePartSquared,
        Builtin::EuclideanNorm,
        Builtin::LogSumExp,
    ];

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Builtin::HalfNormSquared => 0.5 * dot(x, x),
            Builtin::PositivePartSquared => x.iter().map(|v| v.max(0.0).powi(2)).sum(),
            Builtin::EuclideanNorm => norm(x),
            Builtin::LogSumExp => {
                let top = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if !top.is_finite() {
                    return top;
                }
                top + x.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuiltinOracle {
    pub name: Builtin,
    pub dim: usize,
}

impl ConvexOracle for BuiltinOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.name.eval(x)
    }
}

/// A parsed function document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub enum FunctionSpec {
    MaxAffine(MaxAffine),
    PhiC { polytope: VPolytope, scale: f64 },
    Builtin { name: Builtin, dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum Kind {
    #[serde(rename = "max_affine")]
    MaxAffine,
    #[serde(rename = "phi_C")]
    PhiC,
    #[serde(rename = "builtin")]
    Builtin,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<Kind>,
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pieces: Option<Vec<PieceDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<Builtin>,
}

fn unexpected(kind: &str, field: &str) -> Error {
    Error::InvalidArgument(format!("field `{field}` is not allowed for kind `{kind}`"))
}

fn missing(kind: &str, field: &str) -> Error {
    Error::InvalidArgument(format!("kind `{kind}` requires field `{field}`"))
}

impl TryFrom<RawSpec> for FunctionSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        match raw.kind.unwrap_or(Kind::MaxAffine) {
            Kind::MaxAffine => {
                for (present, field) in [
                    (raw.points.is_some(), "points"),
                    (raw.scale.is_some(), "scale"),
                    (raw.name.is_some(), "name"),
                ] {
                    if present {
                        return Err(unexpected("max_affine", field));
                    }
                }
                let pieces = raw.pieces.ok_or_else(|| missing("max_affine", "pieces"))?;
                let f = MaxAffine::try_from(MaxAffineDoc {
                    dim: raw.dim,
                    pieces,
                })?;
                Ok(FunctionSpec::MaxAffine(f))
            }
            Kind::PhiC => {
                if raw.pieces.is_some() {
                    return Err(unexpected("phi_C", "pieces"));
                }
                if raw.name.is_some() {
                    return Err(unexpected("phi_C", "name"));
                }
                let points = raw.points.ok_or_else(|| missing("phi_C", "points"))?;
                let polytope = VPolytope::new(points)?;
                crate::error::check_dim(raw.dim, polytope.dim())?;
                let scale = raw.scale.unwrap_or(1.0);
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "scale must be finite and positive, got {scale}"
                    )));
                }
                Ok(FunctionSpec::PhiC { polytope, scale })
            }
            Kind::Builtin => {
                for (present, field) in [
                    (raw.pieces.is_some(), "pieces"),
                    (raw.points.is_some(), "points"),
                    (raw.scale.is_some(), "scale"),
                ] {
                    if present {
                        return Err(unexpected("builtin", field));
                    }
                }
                let name = raw.name.ok_or_else(|| missing("builtin", "name"))?;
                if raw.dim == 0 {
                    return Err(Error::InvalidArgument("builtin needs dim >= 1".into()));
                }
                Ok(FunctionSpec::Builtin { name, dim: raw.dim })
            }
        }
    }
}

impl From<FunctionSpec> for RawSpec {
    fn from(spec: FunctionSpec) -> Self {
        let empty = RawSpec {
            kind: None,
            dim: 0,
            pieces: None,
            points: None,
            scale: None,
            name: None,
        };
        match spec {
            FunctionSpec::MaxAffine(f) => {
                let doc = MaxAffineDoc::from(f);
                RawSpec {
                    kind: Some(Kind::MaxAffine),
                    dim: doc.dim,
                    pieces: Some(doc.pieces),
                    ..empty
                }
            }
            FunctionSpec::PhiC { polytope, scale } => RawSpec {
                kind: Some(Kind::PhiC),
                dim: polytope.dim(),
                points: Some(polytope.points().to_vec()),
                scale: Some(scale),
                ..empty
            },
            FunctionSpec::Builtin { name, dim } => RawSpec {
                kind: Some(Kind::Builtin),
                dim,
                name: Some(name),
                ..empty
            },
        }
    }
}

impl FunctionSpec {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specs always serialize")
    }

    pub fn dim(&self) -> usize {
        match self {
            FunctionSpec::MaxAffine(f) => f.dim(),
            FunctionSpec::PhiC { polytope, .. } => polytope.dim(),
            FunctionSpec::Builtin { dim, .. } => *dim,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FunctionSpec::MaxAffine(_) => "max_affine",
            FunctionSpec::PhiC { .. } => "phi_C",
            FunctionSpec::Builtin { .. } => "builtin",
        }
    }

    pub fn as_max_affine(&self) -> Option<&MaxAffine> {
        match self {
            FunctionSpec::MaxAffine(f) => Some(f),
            _ => None,
        }
    }

    pub fn oracle(&self) -> Box<dyn ConvexOracle + Send + Sync> {
        match self {
            FunctionSpec::MaxAffine(f) => Box::new(f.clone()),
            FunctionSpec::PhiC { polytope, scale } => Box::new(PhiOracle {
                polytope: polytope.clone(),
                scale: *scale,
            }),
            FunctionSpec::Builtin { name, dim } => Box::new(BuiltinOracle {
                name: *name,
                dim: *dim,
            }),
        }
    }
}
