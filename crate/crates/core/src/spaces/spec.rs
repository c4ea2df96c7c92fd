//! JSON description of a normed space.
//!
//! ```json
//! {"dim": 2, "kind": "lp", "p": "inf"}
//! {"dim": 2, "kind": "wlp", "p": 3, "weights": [1, 2]}
//! {"dim": 2, "kind": "polytope", "vertices": [[1, 0], [-1, 0], [0, 1], [0, -1]]}
//! {"dim": 2, "kind": "quadratic", "matrix": [[2, 0], [0, 1]]}
//! ```

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{NormKind, NormedSpace};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKindTag {
    Lp,
    Wlp,
    Polytope,
    Quadratic,
}

/// Exponent written either as a number or as the string `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Text(String),
}

impl PValue {
    pub fn value(&self) -> Result<f64> {
        match self {
            PValue::Number(p) => Ok(*p),
            PValue::Text(s) if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") => {
                Ok(f64::INFINITY)
            }
            PValue::Text(s) => s
                .parse::<f64>()
                .map_err(|_| Error::Spec(format!("cannot read exponent {s:?}"))),
        }
    }

    pub fn from_f64(p: f64) -> Self {
        if p.is_infinite() {
            PValue::Text("inf".into())
        } else {
            PValue::Number(p)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub dim: usize,
    pub kind: SpaceKindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<PValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

impl SpaceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn build(&self) -> Result<NormedSpace> {
        let p = || {
            self.p
                .as_ref()
                .ok_or_else(|| Error::Spec("missing \"p\"".into()))?
                .value()
        };
        let space = match self.kind {
            SpaceKindTag::Lp => NormedSpace::lp(self.dim, p()?),
            SpaceKindTag::Wlp => {
                let w = self
                    .weights
                    .clone()
                    .ok_or_else(|| Error::Spec("missing \"weights\"".into()))?;
                if w.len() != self.dim {
                    return Err(Error::Spec(format!(
                        "{} weights given for dimension {}",
                        w.len(),
                        self.dim
                    )));
                }
                NormedSpace::weighted_lp(p()?, w)
            }
            SpaceKindTag::Polytope => {
                let v = self
                    .vertices
                    .as_ref()
                    .ok_or_else(|| Error::Spec("missing \"vertices\"".into()))?;
                NormedSpace::polytope(self.dim, v)
            }
            SpaceKindTag::Quadratic => {
                let rows = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::Spec("missing \"matrix\"".into()))?;
                if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
                    return Err(Error::Spec(format!("matrix must be {0}x{0}", self.dim)));
                }
                NormedSpace::quadratic(DMatrix::from_fn(self.dim, self.dim, |i, j| rows[i][j]))
            }
        };
        space.map_err(|e| match e {
            Error::Argument(m) | Error::Geometry(m) => Error::Spec(m),
            other => other,
        })
    }

    pub fn from_space(space: &NormedSpace) -> Self {
        let mut spec = SpaceSpec {
            dim: space.dim(),
            kind: SpaceKindTag::Lp,
            p: None,
            weights: None,
            vertices: None,
            matrix: None,
        };
        match space.kind() {
            NormKind::Lp { p } => spec.p = Some(PValue::from_f64(*p)),
            NormKind::WeightedLp { p, weights } => {
                spec.kind = SpaceKindTag::Wlp;
                spec.p = Some(PValue::from_f64(*p));
                spec.weights = Some(weights.clone());
            }
            NormKind::Polytope(poly) => {
                spec.kind = SpaceKindTag::Polytope;
                spec.vertices = Some(poly.vertices().to_vec());
            }
            NormKind::Quadratic(q) => {
                spec.kind = SpaceKindTag::Quadratic;
                let g = q.gram();
                spec.matrix = Some((0..g.nrows()).map(|i| g.row(i).iter().copied().collect()).collect());
            }
        }
        spec
    }
}
