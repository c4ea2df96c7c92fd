//! JSON description of a problem.
//!
//! ```json
//! {"fem1d": {"elements": 8, "epsilon": 0.1, "beta": 1, "variant": "petrov_shifted", "coarsen": 2}}
//! {"random": {"n": 6, "seed": 11, "coarse_dim": 3},
//!  "trial_norm": {"dim": 6, "kind": "lp", "p": 4},
//!  "test_norm": {"dim": 6, "kind": "lp", "p": "inf"}}
//! ```
//!
//! FEM problems default to the `H¹₀` Gram matrices of their bases, random
//! problems to Euclidean norms.

use serde::{Deserialize, Serialize};

use super::{assemble_fem_1d, random_problem, FemVariant, PgProblem};
use crate::error::{Error, Result};
use crate::spaces::{NormedSpace, SpaceSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fem1dSpec {
    pub elements: usize,
    pub epsilon: f64,
    pub beta: f64,
    pub variant: FemVariant,
    #[serde(default = "default_coarsen")]
    pub coarsen: usize,
}

fn default_coarsen() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub n: usize,
    pub seed: u64,
    pub coarse_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fem1d: Option<Fem1dSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial_norm: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_norm: Option<SpaceSpec>,
}

fn to_spec(e: Error) -> Error {
    match e {
        Error::Argument(m) | Error::Geometry(m) => Error::Spec(m),
        other => other,
    }
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn build(&self) -> Result<PgProblem> {
        let norm = |s: &Option<SpaceSpec>| s.as_ref().map(|s| s.build()).transpose();
        let (trial, test) = (norm(&self.trial_norm)?, norm(&self.test_norm)?);
        match (&self.fem1d, &self.random) {
            (Some(f), None) => {
                let p = assemble_fem_1d(f.elements, f.epsilon, f.beta, f.variant, f.coarsen).map_err(to_spec)?;
                if trial.is_none() && test.is_none() {
                    return Ok(p);
                }
                let x = trial.unwrap_or_else(|| p.x_space().clone());
                let y = test.unwrap_or_else(|| p.y_space().clone());
                p.with_norms(x, y).map_err(to_spec)
            }
            (None, Some(r)) => {
                let eu = || NormedSpace::euclidean(r.n).map_err(to_spec);
                let x = trial.map_or_else(eu, Ok)?;
                let y = test.map_or_else(eu, Ok)?;
                random_problem(r.n, r.seed, x, y, r.coarse_dim).map_err(to_spec)
            }
            _ => Err(Error::Spec("give exactly one of \"fem1d\" and \"random\"".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_kinds() {
        let fem = ProblemSpec::from_json(r#"{"fem1d": {"elements": 8, "epsilon": 0.1, "beta": 1, "variant": "petrov_shifted"}}"#)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!((fem.n(), fem.n_h()), (7, 3));
        let rnd = ProblemSpec::from_json(
            r#"{"random": {"n": 6, "seed": 11, "coarse_dim": 3},
                "trial_norm": {"dim": 6, "kind": "lp", "p": 4},
                "test_norm": {"dim": 6, "kind": "lp", "p": "inf"}}"#,
        )
        .unwrap()
        .build()
        .unwrap();
        assert_eq!(rnd.x_space().label(), NormedSpace::lp(6, 4.0).unwrap().label());
    }

    #[test]
    fn rejects_malformed() {
        for text in [
            r#"{}"#,
            r#"{"fem1d": {"elements": 8, "epsilon": 1, "beta": 0, "variant": "galerkin"}, "random": {"n": 3, "seed": 1, "coarse_dim": 1}}"#,
            r#"{"fem1d": {"elements": 7, "epsilon": 1, "beta": 0, "variant": "galerkin"}}"#,
            r#"{"fem1d": {"elements": 8, "epsilon": 1, "beta": 0, "variant": "upwind"}}"#,
            r#"{"random": {"n": 3, "seed": 1, "coarse_dim": 3}}"#,
            r#"{"random": {"n": 3, "seed": 1, "coarse_dim": 1}, "trial_norm": {"dim": 2, "kind": "lp", "p": 2}}"#,
        ] {
            assert!(matches!(ProblemSpec::from_json(text).and_then(|s| s.build()), Err(Error::Spec(_))), "{text}");
        }
    }
}
