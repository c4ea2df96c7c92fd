//! Operator norms between normed spaces.
//!
//! [`operator_norm`] picks the strongest method available for the pair of
//! spaces:
//!
//! | domain / codomain | method | bounds |
//! |-------------------|--------|--------|
//! | unit ball is a polytope (`ℓ1`, `ℓ∞`, polytope, dim 1) | [`Method::ExactVertex`] | exact |
//! | both inner-product norms | [`Method::ExactSvd`] | exact |
//! | planar domain | [`Method::Grid2d`] | certified upper bound |
//! | otherwise | [`Method::Multistart`] | lower bound only |
//!
//! The multistart ascent is the nonlinear power iteration
//! `x <- J*(Tᵀ J(T x))`, where `J` returns a norming functional in the
//! codomain and `J*` a norming vector in the domain. Each step does not
//! decrease `|T x|`, for any pair of norms.

pub mod grid2d;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::linalg;
use crate::rng;
use crate::spaces::{Norm, NormedSpace};
pub use grid2d::{maximize_ratio_2d, Grid2dConfig, Ratio2d};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactVertex,
    ExactSvd,
    Grid2d,
    Multistart,
}

/// Two-sided estimate of a supremum, with the vector attaining `lower`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    /// `+∞` when no certificate is available (multistart).
    #[serde(serialize_with = "ser_upper", deserialize_with = "de_upper")]
    pub upper: f64,
    pub witness: Vec<f64>,
    pub method: Method,
}

fn ser_upper<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_some(v)
    } else {
        s.serialize_none()
    }
}

fn de_upper<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    let v: Option<f64> = Deserialize::deserialize(d)?;
    Ok(v.unwrap_or(f64::INFINITY))
}

impl NormEstimate {
    pub fn exact(value: f64, witness: Vec<f64>, method: Method) -> Self {
        Self {
            lower: value,
            upper: value,
            witness,
            method,
        }
    }

    /// True when only a lower bound is known.
    pub fn is_heuristic(&self) -> bool {
        !self.upper.is_finite()
    }

    /// Value used on the bounding side of an inequality: the certified upper
    /// bound when one exists, the best value found otherwise.
    pub fn bound(&self) -> f64 {
        if self.upper.is_finite() {
            self.upper
        } else {
            self.lower
        }
    }
}

/// A matrix acting from `domain` (columns) to `codomain` (rows).
#[derive(Clone, Debug)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
    domain: NormedSpace,
    codomain: NormedSpace,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>, domain: NormedSpace, codomain: NormedSpace) -> Result<Self> {
        if matrix.ncols() == 0 {
            return arg("linear map has a zero-dimensional domain");
        }
        if matrix.ncols() != domain.dim() || matrix.nrows() != codomain.dim() {
            return arg(format!(
                "matrix is {}x{} but spaces have dimensions {} -> {}",
                matrix.nrows(),
                matrix.ncols(),
                domain.dim(),
                codomain.dim()
            ));
        }
        if !linalg::is_finite_slice(matrix.as_slice()) {
            return arg("matrix has non-finite entries");
        }
        Ok(Self {
            matrix,
            domain,
            codomain,
        })
    }

    pub fn identity(space: &NormedSpace) -> Self {
        let n = space.dim();
        Self {
            matrix: DMatrix::identity(n, n),
            domain: space.clone(),
            codomain: space.clone(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn domain(&self) -> &NormedSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &NormedSpace {
        &self.codomain
    }

    /// The transpose, acting between the dual spaces.
    pub fn adjoint(&self) -> Result<LinearMap> {
        LinearMap::new(self.matrix.transpose(), self.codomain.dual()?, self.domain.dual()?)
    }

    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap> {
        LinearMap::new(&self.matrix * &inner.matrix, inner.domain.clone(), self.codomain.clone())
    }

    fn apply(&self, x: &[f64]) -> DVector<f64> {
        &self.matrix * DVector::from_column_slice(x)
    }

    fn image_norm(&self, x: &[f64]) -> f64 {
        self.codomain.norm(self.apply(x).as_slice())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpNormConfig {
    pub grid: Grid2dConfig,
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Largest vertex count enumerated by the exact vertex method.
    pub vertex_limit: usize,
}

impl Default for OpNormConfig {
    fn default() -> Self {
        Self {
            grid: Grid2dConfig::default(),
            starts: 64,
            seed: 0,
            max_iters: 500,
            vertex_limit: 1 << 16,
        }
    }
}

pub fn operator_norm(t: &LinearMap) -> Result<NormEstimate> {
    operator_norm_with(t, &OpNormConfig::default())
}

pub fn operator_norm_with(t: &LinearMap, cfg: &OpNormConfig) -> Result<NormEstimate> {
    if let Some(vertices) = t.domain.ball_vertices(cfg.vertex_limit) {
        return Ok(vertex_norm(t, &vertices));
    }
    if let (Some(gd), Some(gc)) = (t.domain.gram(), t.codomain.gram()) {
        return svd_norm(t, &gd, &gc);
    }
    if t.domain.dim() == 2 {
        return Ok(grid_norm(t, &cfg.grid));
    }
    multistart_norm(t, cfg)
}

/// `|T⁻¹|` for a square invertible map; the inverse acts from the codomain
/// back to the domain.
pub fn inverse_norm(t: &LinearMap) -> Result<NormEstimate> {
    inverse_norm_with(t, &OpNormConfig::default())
}

pub fn inverse_norm_with(t: &LinearMap, cfg: &OpNormConfig) -> Result<NormEstimate> {
    let inv = linalg::checked_inverse(&t.matrix)?;
    let map = LinearMap::new(inv, t.codomain.clone(), t.domain.clone())?;
    operator_norm_with(&map, cfg)
}

fn vertex_norm(t: &LinearMap, vertices: &[Vec<f64>]) -> NormEstimate {
    let mut best = f64::NEG_INFINITY;
    let mut witness = vertices[0].clone();
    for v in vertices {
        let val = t.image_norm(v) / t.domain.norm(v);
        if val > best {
            best = val;
            witness = v.clone();
        }
    }
    let scale = t.domain.norm(&witness);
    let witness = witness.iter().map(|w| w / scale).collect();
    NormEstimate::exact(best, witness, Method::ExactVertex)
}

/// Largest singular value of `L_cᵀ T L_d⁻ᵀ` where `G = L Lᵀ`.
fn svd_norm(t: &LinearMap, gd: &DMatrix<f64>, gc: &DMatrix<f64>) -> Result<NormEstimate> {
    let ld = gd
        .clone()
        .cholesky()
        .ok_or_else(|| crate::Error::Geometry("domain Gram matrix is not definite".into()))?
        .l();
    let lc = gc
        .clone()
        .cholesky()
        .ok_or_else(|| crate::Error::Geometry("codomain Gram matrix is not definite".into()))?
        .l();
    let ld_t_inv = ld
        .transpose()
        .try_inverse()
        .ok_or_else(|| crate::Error::Geometry("domain Cholesky factor is singular".into()))?;
    let m = lc.transpose() * &t.matrix * &ld_t_inv;
    // The top eigenvector of MᵀM; nalgebra's SVD with vectors can misreport
    // the leading singular value of rank-deficient matrices.
    let eig = (m.transpose() * &m).symmetric_eigen();
    let k = eig.eigenvalues.imax();
    let v = eig.eigenvectors.column(k).into_owned();
    let sigma = (&m * &v).norm();
    let x = &ld_t_inv * v;
    let scale = t.domain.norm(x.as_slice());
    let witness = (x / scale).iter().copied().collect();
    Ok(NormEstimate::exact(sigma, witness, Method::ExactSvd))
}

fn grid_norm(t: &LinearMap, cfg: &Grid2dConfig) -> NormEstimate {
    let r = maximize_ratio_2d(
        |u| t.image_norm(u),
        |u| {
            let g = t.domain.subgradient(u);
            (t.domain.norm(u), [g[0], g[1]])
        },
        cfg,
    );
    let u = [r.theta.cos(), r.theta.sin()];
    let d = t.domain.norm(&u);
    NormEstimate {
        lower: r.lower,
        upper: r.upper,
        witness: vec![u[0] / d, u[1] / d],
        method: Method::Grid2d,
    }
}

fn multistart_norm(t: &LinearMap, cfg: &OpNormConfig) -> Result<NormEstimate> {
    let dual_domain = t.domain.dual()?;
    let tt = t.matrix.transpose();
    let mut best = f64::NEG_INFINITY;
    let mut witness = Vec::new();
    for start in 0..cfg.starts.max(1) {
        let x0 = t
            .domain
            .sample_unit_sphere(1, rng::derive_seed(cfg.seed, start as u64))?
            .remove(0);
        let (val, x) = power_ascent(t, &tt, &dual_domain, x0, cfg.max_iters);
        if val > best {
            best = val;
            witness = x;
        }
    }
    Ok(NormEstimate {
        lower: best,
        upper: f64::INFINITY,
        witness,
        method: Method::Multistart,
    })
}

fn power_ascent(
    t: &LinearMap,
    tt: &DMatrix<f64>,
    dual_domain: &NormedSpace,
    x0: DVector<f64>,
    max_iters: usize,
) -> (f64, Vec<f64>) {
    let mut x: Vec<f64> = x0.iter().copied().collect();
    let mut val = t.image_norm(&x);
    for _ in 0..max_iters {
        let y = t.apply(&x);
        let g = t.codomain.subgradient(y.as_slice());
        let z = tt * DVector::from_vec(g);
        if z.iter().all(|v| *v == 0.0) {
            break;
        }
        let next = dual_domain.subgradient(z.as_slice());
        let scale = t.domain.norm(&next);
        if !(scale > 0.0) {
            break;
        }
        let next: Vec<f64> = next.iter().map(|v| v / scale).collect();
        let next_val = t.image_norm(&next);
        if next_val <= val * (1.0 + 1e-15) {
            if next_val > val {
                val = next_val;
                x = next;
            }
            break;
        }
        val = next_val;
        x = next;
    }
    (val, x)
}
