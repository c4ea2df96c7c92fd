//! Finite-dimensional real normed spaces.
//!
//! A [`NormedSpace`] couples a dimension with one of four norm families:
//!
//! | kind | norm of `x` |
//! |------|-------------|
//! | `Lp(p)` | `(Σ |x_i|^p)^(1/p)`, `max |x_i|` for `p = ∞` |
//! | `WeightedLp(p, w)` | `(Σ w_i |x_i|^p)^(1/p)`, `max w_i |x_i|` for `p = ∞` |
//! | `Polytope(V)` | gauge of the symmetric hull of `V` |
//! | `Quadratic(G)` | `sqrt(xᵀ G x)` |
//!
//! `p = ∞` is represented by `f64::INFINITY` and evaluated with max-abs
//! formulas. Dual spaces use the standard pairing `<f, x> = Σ f_i x_i`; the
//! dual of `WeightedLp(p, w)` for `1 < p < ∞` is `WeightedLp(q, w^(-q/p))`,
//! and the endpoint cases map `(1, w) <-> (∞, 1/w)`.

mod polytope;
pub mod spec;

pub use polytope::Polytope;
pub use spec::{PValue, SpaceKindTag, SpaceSpec};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{arg, Error, Result};
use crate::linalg;
use crate::rng;

/// Anything that evaluates a norm and a norming functional.
///
/// `subgradient(x)` returns `g` with `<g, x> = |x|` and dual norm 1 (zero for
/// `x = 0`).
pub trait Norm: Sync {
    fn dim(&self) -> usize;
    fn norm(&self, x: &[f64]) -> f64;
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;
}

#[derive(Clone, Debug)]
pub struct NormedSpace {
    dim: usize,
    kind: NormKind,
}

#[derive(Clone, Debug)]
pub enum NormKind {
    Lp { p: f64 },
    WeightedLp { p: f64, weights: Vec<f64> },
    Polytope(Polytope),
    Quadratic(Quadratic),
}

/// Positive-definite Gram matrix with its Cholesky factor.
#[derive(Clone, Debug)]
pub struct Quadratic {
    gram: DMatrix<f64>,
    lower: DMatrix<f64>,
}

impl Quadratic {
    fn new(gram: DMatrix<f64>) -> Result<Self> {
        if !gram.is_square() || gram.nrows() == 0 {
            return arg("quadratic norm needs a non-empty square matrix");
        }
        if !linalg::is_finite_slice(gram.as_slice()) {
            return arg("quadratic norm matrix has non-finite entries");
        }
        let scale = gram.amax().max(f64::MIN_POSITIVE);
        let asym = (&gram - gram.transpose()).amax();
        if asym > 1e-10 * scale {
            return arg(format!("quadratic norm matrix is not symmetric (asymmetry {asym:.2e})"));
        }
        let sym = (&gram + gram.transpose()) * 0.5;
        let min_eig = sym.clone().symmetric_eigenvalues().min();
        if !(min_eig > 1e-14 * scale) {
            return arg(format!(
                "quadratic norm matrix is not positive definite (min eigenvalue {min_eig:.3e})"
            ));
        }
        let chol = Cholesky::<f64, Dyn>::new(sym.clone())
            .ok_or_else(|| Error::Argument("Cholesky factorization failed".into()))?;
        Ok(Self {
            gram: sym,
            lower: chol.l(),
        })
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Lower Cholesky factor `L` with `G = L Lᵀ`, so `|x| = |Lᵀ x|_2`.
    pub fn cholesky_lower(&self) -> &DMatrix<f64> {
        &self.lower
    }
}

impl NormedSpace {
    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        check_dim(dim)?;
        check_p(p)?;
        Ok(Self {
            dim,
            kind: NormKind::Lp { p },
        })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::lp(dim, 2.0)
    }

    pub fn weighted_lp(p: f64, weights: Vec<f64>) -> Result<Self> {
        check_dim(weights.len())?;
        check_p(p)?;
        if !weights.iter().all(|w| w.is_finite() && *w > 0.0) {
            return arg("weights must be finite and positive");
        }
        Ok(Self {
            dim: weights.len(),
            kind: NormKind::WeightedLp { p, weights },
        })
    }

    pub fn polytope(dim: usize, vertices: &[Vec<f64>]) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            kind: NormKind::Polytope(Polytope::new(dim, vertices)?),
        })
    }

    pub fn quadratic(gram: DMatrix<f64>) -> Result<Self> {
        let dim = gram.nrows();
        check_dim(dim)?;
        Ok(Self {
            dim,
            kind: NormKind::Quadratic(Quadratic::new(gram)?),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    /// Short human-readable label, e.g. `lp(3)` or `quadratic`.
    pub fn label(&self) -> String {
        match &self.kind {
            NormKind::Lp { p } => format!("lp({})", fmt_p(*p)),
            NormKind::WeightedLp { p, .. } => format!("wlp({})", fmt_p(*p)),
            NormKind::Polytope(_) => "polytope".into(),
            NormKind::Quadratic(_) => "quadratic".into(),
        }
    }

    /// True when the norm comes from an inner product.
    pub fn is_hilbert(&self) -> bool {
        match &self.kind {
            NormKind::Lp { p } | NormKind::WeightedLp { p, .. } => *p == 2.0,
            NormKind::Quadratic(_) => true,
            NormKind::Polytope(_) => false,
        }
    }

    /// Gram matrix of the inner product when [`is_hilbert`](Self::is_hilbert).
    pub fn gram(&self) -> Option<DMatrix<f64>> {
        match &self.kind {
            NormKind::Lp { p } if *p == 2.0 => Some(DMatrix::identity(self.dim, self.dim)),
            NormKind::WeightedLp { p, weights } if *p == 2.0 => {
                Some(DMatrix::from_diagonal(&DVector::from_column_slice(weights)))
            }
            NormKind::Quadratic(q) => Some(q.gram.clone()),
            _ => None,
        }
    }

    /// Checked norm evaluation.
    pub fn eval_norm(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return arg(format!(
                "vector has length {}, space has dimension {}",
                x.len(),
                self.dim
            ));
        }
        if !linalg::is_finite_slice(x) {
            return arg("vector has non-finite entries");
        }
        Ok(self.norm(x))
    }

    /// The space carrying the dual norm under the standard pairing.
    pub fn dual(&self) -> Result<NormedSpace> {
        let kind = match &self.kind {
            NormKind::Lp { p } => NormKind::Lp { p: conjugate(*p) },
            NormKind::WeightedLp { p, weights } => {
                let q = conjugate(*p);
                let w = if p.is_infinite() || *p == 1.0 {
                    weights.iter().map(|w| 1.0 / w).collect()
                } else {
                    weights.iter().map(|w| w.powf(-q / p)).collect()
                };
                NormKind::WeightedLp { p: q, weights: w }
            }
            NormKind::Quadratic(q) => {
                let inv = q
                    .gram
                    .clone()
                    .cholesky()
                    .ok_or_else(|| Error::Geometry("Gram matrix lost definiteness".into()))?
                    .inverse();
                let inv = (&inv + inv.transpose()) * 0.5;
                NormKind::Quadratic(Quadratic::new(inv)?)
            }
            NormKind::Polytope(poly) => NormKind::Polytope(poly.polar()),
        };
        Ok(Self {
            dim: self.dim,
            kind,
        })
    }

    /// Dual norm of a functional given in coordinates.
    pub fn dual_norm(&self, f: &[f64]) -> Result<f64> {
        self.dual()?.eval_norm(f)
    }

    /// The norm inherited by the column span of `basis` (an `n x k` matrix of
    /// full column rank), in coefficient coordinates: `c -> |basis · c|`.
    ///
    /// Closed forms exist for quadratic norms (any basis), for `ℓp` and
    /// weighted `ℓp` on coordinate subspaces, for `ℓ∞`/`ℓ1` on small spaces
    /// (as polytopes), and for polytopes (section = polar of the projected
    /// polar). Other combinations return an argument error.
    pub fn restrict(&self, basis: &DMatrix<f64>) -> Result<NormedSpace> {
        if basis.nrows() != self.dim {
            return arg(format!(
                "subspace basis has {} rows, space has dimension {}",
                basis.nrows(),
                self.dim
            ));
        }
        let k = basis.ncols();
        check_dim(k)?;
        if linalg::rank(basis, 1e-10) < k {
            return Err(Error::Geometry("subspace basis is rank deficient".into()));
        }
        if let Some(g) = self.gram() {
            return NormedSpace::quadratic(basis.transpose() * g * basis);
        }
        let coords = linalg::coordinate_columns(basis);
        match (&self.kind, coords) {
            (NormKind::Lp { p }, Some(cols)) => {
                if cols.iter().all(|(_, v)| *v == 1.0 || *v == -1.0) {
                    NormedSpace::lp(k, *p)
                } else {
                    NormedSpace::weighted_lp(*p, cols.iter().map(|(_, v)| scaled_weight(1.0, *v, *p)).collect())
                }
            }
            (NormKind::WeightedLp { p, weights }, Some(cols)) => NormedSpace::weighted_lp(
                *p,
                cols.iter().map(|(i, v)| scaled_weight(weights[*i], *v, *p)).collect(),
            ),
            (NormKind::Polytope(poly), _) => {
                let proj: Vec<Vec<f64>> = poly
                    .facets()
                    .iter()
                    .map(|a| (basis.transpose() * DVector::from_column_slice(a)).iter().copied().collect())
                    .collect();
                NormedSpace::polytope(k, &proj)?.dual()
            }
            (NormKind::Lp { p }, None) if p.is_infinite() => {
                // |Ec|_∞ = max_i |row_i · c|: section of a cube.
                let rows: Vec<Vec<f64>> = (0..self.dim)
                    .flat_map(|i| {
                        let r: Vec<f64> = basis.row(i).iter().copied().collect();
                        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
                        [r, neg]
                    })
                    .collect();
                NormedSpace::polytope(k, &rows)?.dual()
            }
            (NormKind::Lp { p }, None) if *p == 1.0 && self.dim <= 12 => {
                let pts: Vec<Vec<f64>> = (0..1u32 << self.dim)
                    .map(|mask| {
                        (0..k)
                            .map(|j| {
                                (0..self.dim)
                                    .map(|i| if mask >> i & 1 == 1 { -basis[(i, j)] } else { basis[(i, j)] })
                                    .sum()
                            })
                            .collect()
                    })
                    .collect();
                NormedSpace::polytope(k, &pts)?.dual()
            }
            _ => arg(format!(
                "the norm {} restricted to a non-coordinate subspace has no closed form",
                self.label()
            )),
        }
    }

    /// `count` vectors of norm one from Gaussian directions of a seeded
    /// SplitMix64 stream.
    pub fn sample_unit_sphere(&self, count: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
        if count == 0 {
            return arg("sample count must be at least 1");
        }
        let mut rng = rng::stream(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let g = rng::gaussian_vector(&mut rng, self.dim);
            let n = self.norm(g.as_slice());
            if n > 0.0 && n.is_finite() {
                out.push(g / n);
            }
        }
        Ok(out)
    }

    /// Vertices of the unit ball when it is a polytope with few vertices.
    pub(crate) fn ball_vertices(&self, limit: usize) -> Option<Vec<Vec<f64>>> {
        let n = self.dim;
        match &self.kind {
            NormKind::Lp { p } if *p == 1.0 => Some(signed_axes(n, |_| 1.0)),
            NormKind::WeightedLp { p, weights } if *p == 1.0 => Some(signed_axes(n, |i| 1.0 / weights[i])),
            NormKind::Lp { p } if p.is_infinite() && n < 63 && (1usize << n) <= limit => {
                Some(sign_corners(n, |_| 1.0))
            }
            NormKind::WeightedLp { p, weights } if p.is_infinite() && n < 63 && (1usize << n) <= limit => {
                Some(sign_corners(n, |i| 1.0 / weights[i]))
            }
            NormKind::Polytope(poly) => Some(poly.vertices().to_vec()),
            _ if n == 1 => {
                let r = 1.0 / self.norm(&[1.0]);
                Some(vec![vec![r], vec![-r]])
            }
            _ => None,
        }
    }

    pub fn to_spec(&self) -> SpaceSpec {
        SpaceSpec::from_space(self)
    }
}

impl Norm for NormedSpace {
    fn dim(&self) -> usize {
        self.dim
    }

    /// Unchecked evaluation; callers guarantee the length.
    fn norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            NormKind::Lp { p } => lp_norm(x, *p, None),
            NormKind::WeightedLp { p, weights } => lp_norm(x, *p, Some(weights)),
            NormKind::Polytope(poly) => poly.gauge(x),
            NormKind::Quadratic(q) => {
                let mut s = 0.0;
                // |Lᵀ x|², column by column of L.
                for j in 0..self.dim {
                    let mut t = 0.0;
                    for i in j..self.dim {
                        t += q.lower[(i, j)] * x[i];
                    }
                    s += t * t;
                }
                s.sqrt()
            }
        }
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let norm = self.norm(x);
        if norm == 0.0 {
            return vec![0.0; n];
        }
        match &self.kind {
            NormKind::Lp { p } => lp_subgradient(x, *p, norm, None),
            NormKind::WeightedLp { p, weights } => lp_subgradient(x, *p, norm, Some(weights)),
            NormKind::Polytope(poly) => poly.subgradient(x),
            NormKind::Quadratic(q) => {
                let g = &q.gram * DVector::from_column_slice(x) / norm;
                g.iter().copied().collect()
            }
        }
    }
}

/// A two-dimensional subspace `span{b1, b2}` with the inherited norm,
/// evaluated on coefficient pairs `(s, t) -> |s b1 + t b2|`.
#[derive(Clone, Debug)]
pub struct TwoDimSubspace {
    ambient: NormedSpace,
    b1: DVector<f64>,
    b2: DVector<f64>,
}

impl TwoDimSubspace {
    pub fn new(ambient: NormedSpace, b1: DVector<f64>, b2: DVector<f64>) -> Result<Self> {
        let n = ambient.dim();
        if b1.len() != n || b2.len() != n {
            return arg("subspace basis vectors must match the ambient dimension");
        }
        if !linalg::is_finite_slice(b1.as_slice()) || !linalg::is_finite_slice(b2.as_slice()) {
            return arg("subspace basis has non-finite entries");
        }
        let (n1, n2) = (b1.norm(), b2.norm());
        if n1 == 0.0 || n2 == 0.0 {
            return Err(Error::Geometry("subspace basis contains a zero vector".into()));
        }
        let c = b1.dot(&b2) / (n1 * n2);
        if 1.0 - c * c < 1e-10 {
            return Err(Error::Geometry("subspace basis vectors are linearly dependent".into()));
        }
        Ok(Self { ambient, b1, b2 })
    }

    /// Subspace spanned by `x` and `y`, with a Euclidean-orthonormal basis.
    pub fn spanned_by(ambient: NormedSpace, x: &DVector<f64>, y: &DVector<f64>) -> Result<Self> {
        let m = DMatrix::from_columns(&[x.clone(), y.clone()]);
        let q = linalg::orthonormalize(&m)
            .ok_or_else(|| Error::Geometry("vectors are linearly dependent".into()))?;
        Self::new(ambient, q.column(0).into_owned(), q.column(1).into_owned())
    }

    pub fn ambient(&self) -> &NormedSpace {
        &self.ambient
    }

    pub fn basis(&self) -> (&DVector<f64>, &DVector<f64>) {
        (&self.b1, &self.b2)
    }

    pub fn embed(&self, c: &[f64]) -> DVector<f64> {
        &self.b1 * c[0] + &self.b2 * c[1]
    }

    /// Coefficients of a vector of the subspace (least squares).
    pub fn coordinates(&self, x: &DVector<f64>) -> [f64; 2] {
        let g11 = self.b1.dot(&self.b1);
        let g12 = self.b1.dot(&self.b2);
        let g22 = self.b2.dot(&self.b2);
        let r1 = self.b1.dot(x);
        let r2 = self.b2.dot(x);
        let det = g11 * g22 - g12 * g12;
        [(g22 * r1 - g12 * r2) / det, (g11 * r2 - g12 * r1) / det]
    }
}

impl Norm for TwoDimSubspace {
    fn dim(&self) -> usize {
        2
    }

    fn norm(&self, c: &[f64]) -> f64 {
        self.ambient.norm(self.embed(c).as_slice())
    }

    fn subgradient(&self, c: &[f64]) -> Vec<f64> {
        let g = DVector::from_vec(self.ambient.subgradient(self.embed(c).as_slice()));
        vec![g.dot(&self.b1), g.dot(&self.b2)]
    }
}

/// Point of the unit sphere of a planar norm in direction `theta`.
pub fn boundary_point_2d<N: Norm + ?Sized>(norm: &N, theta: f64) -> [f64; 2] {
    let u = [theta.cos(), theta.sin()];
    let n = norm.norm(&u);
    [u[0] / n, u[1] / n]
}

/// Hölder conjugate exponent.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn fmt_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return arg("dimension must be positive");
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return arg(format!("exponent p must lie in [1, inf], got {p}"));
    }
    Ok(())
}

/// Weight of `v · e_i` in a weighted ℓp norm with base weight `w`.
fn scaled_weight(w: f64, v: f64, p: f64) -> f64 {
    if p.is_infinite() {
        w * v.abs()
    } else {
        w * v.abs().powf(p)
    }
}

fn signed_axes(n: usize, radius: impl Fn(usize) -> f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s * radius(i);
            out.push(e);
        }
    }
    out
}

fn sign_corners(n: usize, radius: impl Fn(usize) -> f64) -> Vec<Vec<f64>> {
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .map(|i| if mask >> i & 1 == 1 { -radius(i) } else { radius(i) })
                .collect()
        })
        .collect()
}

fn lp_norm(x: &[f64], p: f64, weights: Option<&Vec<f64>>) -> f64 {
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    if p.is_infinite() {
        return x
            .iter()
            .enumerate()
            .fold(0.0, |m, (i, v)| f64::max(m, w(i) * v.abs()));
    }
    if p == 1.0 {
        return x.iter().enumerate().map(|(i, v)| w(i) * v.abs()).sum();
    }
    if p == 2.0 {
        return x
            .iter()
            .enumerate()
            .map(|(i, v)| w(i) * v * v)
            .sum::<f64>()
            .sqrt();
    }
    let scale = x.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| w(i) * (v.abs() / scale).powf(p))
        .sum();
    scale * s.powf(1.0 / p)
}

fn lp_subgradient(x: &[f64], p: f64, norm: f64, weights: Option<&Vec<f64>>) -> Vec<f64> {
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let n = x.len();
    if p.is_infinite() {
        let mut best = 0;
        let mut best_val = -1.0;
        for (i, v) in x.iter().enumerate() {
            let val = w(i) * v.abs();
            if val > best_val {
                best_val = val;
                best = i;
            }
        }
        let mut g = vec![0.0; n];
        g[best] = w(best) * x[best].signum();
        return g;
    }
    if p == 1.0 {
        return x
            .iter()
            .enumerate()
            .map(|(i, v)| if *v == 0.0 { 0.0 } else { w(i) * v.signum() })
            .collect();
    }
    x.iter()
        .enumerate()
        .map(|(i, v)| {
            if *v == 0.0 {
                0.0
            } else {
                w(i) * v.signum() * (v.abs() / norm).powf(p - 1.0)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn l1_diamond() -> NormedSpace {
        NormedSpace::polytope(
            2,
            &[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
        )
        .unwrap()
    }

    #[test]
    fn eval_norm_examples() {
        let x = [3.0, -4.0];
        assert_eq!(NormedSpace::lp(2, f64::INFINITY).unwrap().eval_norm(&x).unwrap(), 4.0);
        assert_eq!(NormedSpace::lp(2, 2.0).unwrap().eval_norm(&x).unwrap(), 5.0);
        // Oracle: explicit ℓ1 formula.
        let l1: f64 = x.iter().map(|v: &f64| v.abs()).sum();
        let gauge = l1_diamond().eval_norm(&x).unwrap();
        assert!((gauge - l1).abs() < 1e-12);
        assert!((gauge - 7.0).abs() < 1e-12);
    }

    #[test]
    fn eval_norm_errors() {
        let s = NormedSpace::lp(3, 2.0).unwrap();
        assert!(matches!(s.eval_norm(&[1.0, 2.0]), Err(Error::Argument(_))));
        assert!(matches!(s.eval_norm(&[1.0, f64::NAN, 0.0]), Err(Error::Argument(_))));
        assert!(NormedSpace::lp(2, 0.5).is_err());
        assert!(NormedSpace::weighted_lp(2.0, vec![1.0, -1.0]).is_err());
        assert!(NormedSpace::quadratic(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
    }

    #[test]
    fn dual_examples() {
        let d = NormedSpace::lp(2, 1.0).unwrap().dual().unwrap();
        assert!(matches!(d.kind(), NormKind::Lp { p } if p.is_infinite()));
        assert_eq!(d.dim(), 2);
        let q = NormedSpace::quadratic(DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0])))
            .unwrap()
            .dual()
            .unwrap();
        let g = q.gram().unwrap();
        assert!((g[(0, 0)] - 0.25).abs() < 1e-15 && (g[(1, 1)] - 1.0).abs() < 1e-15);
        assert!(g[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn dual_l3_matches_angle_grid() {
        let s = NormedSpace::lp(2, 3.0).unwrap();
        let f = [1.0, 1.0];
        // Oracle: maximize <f, x> over the ℓ3 unit circle on a dense grid.
        let oracle = (0..200_000)
            .map(|k| {
                let x = boundary_point_2d(&s, 2.0 * PI * k as f64 / 200_000.0);
                f[0] * x[0] + f[1] * x[1]
            })
            .fold(f64::MIN, f64::max);
        let dual = s.dual_norm(&f).unwrap();
        assert!((dual - 2f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((dual - oracle).abs() < 1e-8);
    }

    #[test]
    fn sample_unit_sphere_contract() {
        let s = NormedSpace::lp(3, 2.0).unwrap();
        let v = s.sample_unit_sphere(5, 7).unwrap();
        assert_eq!(v.len(), 5);
        for x in &v {
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(v, s.sample_unit_sphere(5, 7).unwrap());
        let l1 = NormedSpace::lp(2, 1.0).unwrap();
        let x = &l1.sample_unit_sphere(1, 1).unwrap()[0];
        assert!((x[0].abs() + x[1].abs() - 1.0).abs() < 1e-12);
        assert!(s.sample_unit_sphere(0, 1).is_err());
    }

    #[test]
    fn boundary_point_examples() {
        let l2 = NormedSpace::lp(2, 2.0).unwrap();
        let p = boundary_point_2d(&l2, 0.0);
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
        let linf = NormedSpace::lp(2, f64::INFINITY).unwrap();
        let p = boundary_point_2d(&linf, FRAC_PI_4);
        assert!((p[0] - 1.0).abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12);
        let l1 = NormedSpace::lp(2, 1.0).unwrap();
        let p = boundary_point_2d(&l1, FRAC_PI_4);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn subgradients_are_norming() {
        let spaces = [
            NormedSpace::lp(3, 1.0).unwrap(),
            NormedSpace::lp(3, 3.0).unwrap(),
            NormedSpace::lp(3, f64::INFINITY).unwrap(),
            NormedSpace::weighted_lp(1.5, vec![1.0, 2.0, 0.5]).unwrap(),
            NormedSpace::quadratic(DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.1, 0.0, 0.1, 3.0]))
                .unwrap(),
        ];
        let x = [0.3, -1.2, 0.7];
        for s in &spaces {
            let g = s.subgradient(&x);
            let pairing: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!((pairing - s.norm(&x)).abs() < 1e-12, "{}", s.label());
            assert!((s.dual_norm(&g).unwrap() - 1.0).abs() < 1e-12, "{}", s.label());
        }
    }

    #[test]
    fn weighted_dual_endpoints() {
        let s = NormedSpace::weighted_lp(1.0, vec![2.0, 4.0]).unwrap();
        // Dual of Σ w|x| is max |f|/w.
        assert!((s.dual_norm(&[1.0, 1.0]).unwrap() - 0.5).abs() < 1e-15);
        let t = NormedSpace::weighted_lp(f64::INFINITY, vec![2.0, 4.0]).unwrap();
        assert!((t.dual_norm(&[1.0, 1.0]).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn restriction_closed_forms() {
        let e = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let l3 = NormedSpace::lp(3, 3.0).unwrap().restrict(&e).unwrap();
        assert!((l3.norm(&[1.0, 2.0]) - 9f64.powf(1.0 / 3.0)).abs() < 1e-12);

        let g = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        for base in [
            NormedSpace::lp(3, f64::INFINITY).unwrap(),
            NormedSpace::lp(3, 1.0).unwrap(),
            NormedSpace::lp(3, 2.0).unwrap(),
            NormedSpace::polytope(
                3,
                &signed_axes(3, |i| 1.0 + i as f64),
            )
            .unwrap(),
        ] {
            let r = base.restrict(&g).unwrap();
            for c in [[1.0, 0.0], [0.3, -2.0], [-1.0, 1.0]] {
                let full = &g * DVector::from_column_slice(&c);
                assert!((r.norm(&c) - base.norm(full.as_slice())).abs() < 1e-12, "{}", base.label());
            }
        }
    }

    #[test]
    fn two_dim_subspace_norm() {
        let amb = NormedSpace::lp(3, 1.0).unwrap();
        let b1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let b2 = DVector::from_vec(vec![0.0, 1.0, 1.0]);
        let sub = TwoDimSubspace::new(amb.clone(), b1.clone(), b2.clone()).unwrap();
        assert!((sub.norm(&[2.0, -1.0]) - 4.0).abs() < 1e-15);
        assert!(TwoDimSubspace::new(amb, b1.clone(), b1 * 2.0).is_err());
    }
}
