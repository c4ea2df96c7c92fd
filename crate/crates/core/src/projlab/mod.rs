//! Oblique projections and audits of the bound
//!
//! ```text
//! |I - P| <= C |P|,   C = min{1 + |P|⁻¹, C_BM(X)}
//! ```
//!
//! together with its per-vector form
//! `|(I - P)x| <= d_BM(span{Px, (I - P)x}, ℓ2²)² |P| |x|`.

use std::cell::OnceCell;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::geoconst::{plane_distance, DbmConfig};
use crate::linalg;
use crate::opnorm::{operator_norm_with, LinearMap, NormEstimate, OpNormConfig};
use crate::rng;
use crate::spaces::{Norm, NormedSpace, TwoDimSubspace};

/// An idempotent map on a normed space with its range and kernel bases.
#[derive(Clone, Debug)]
pub struct Projection {
    map: LinearMap,
    range_basis: Vec<DVector<f64>>,
    kernel_basis: Vec<DVector<f64>>,
    trivial: bool,
}

impl Projection {
    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        self.map.matrix()
    }

    pub fn space(&self) -> &NormedSpace {
        self.map.domain()
    }

    pub fn range_basis(&self) -> &[DVector<f64>] {
        &self.range_basis
    }

    pub fn kernel_basis(&self) -> &[DVector<f64>] {
        &self.kernel_basis
    }

    /// True for `P = 0` and `P = I`.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn rank(&self) -> usize {
        self.range_basis.len()
    }

    /// `I - P`, whose range is the kernel of `P` and vice versa.
    pub fn complement(&self) -> Projection {
        let n = self.space().dim();
        let m = DMatrix::identity(n, n) - self.matrix();
        Projection {
            map: LinearMap::new(m, self.space().clone(), self.space().clone()).expect("same shape"),
            range_basis: self.kernel_basis.clone(),
            kernel_basis: self.range_basis.clone(),
            trivial: self.trivial,
        }
    }

    /// Wraps a matrix already known to be the projection onto
    /// `span(range_basis)` along `span(kernel_basis)`.
    pub fn from_parts(
        matrix: DMatrix<f64>,
        space: &NormedSpace,
        range_basis: Vec<DVector<f64>>,
        kernel_basis: Vec<DVector<f64>>,
    ) -> Result<Projection> {
        let n = space.dim();
        if range_basis.len() + kernel_basis.len() != n {
            return Err(Error::Geometry(format!(
                "range and kernel dimensions {} + {} do not add up to {n}",
                range_basis.len(),
                kernel_basis.len()
            )));
        }
        let sq = &matrix * &matrix;
        let defect = linalg::frobenius(&(&sq - &matrix));
        if defect > 1e-9 * (1.0 + linalg::frobenius(&matrix)) {
            return Err(Error::Geometry(format!("matrix is not idempotent (defect {defect:.3e})")));
        }
        let trivial = range_basis.is_empty() || kernel_basis.is_empty();
        Ok(Projection {
            map: LinearMap::new(matrix, space.clone(), space.clone())?,
            range_basis,
            kernel_basis,
            trivial,
        })
    }
}

/// The projection with the given range along the given kernel.
pub fn make_projection(
    range_basis: &[DVector<f64>],
    kernel_basis: &[DVector<f64>],
    space: &NormedSpace,
) -> Result<Projection> {
    let n = space.dim();
    if n == 0 {
        return arg("space has dimension 0");
    }
    for v in range_basis.iter().chain(kernel_basis) {
        if v.len() != n {
            return arg(format!("basis vector of length {} in dimension {n}", v.len()));
        }
        if !linalg::is_finite_slice(v.as_slice()) {
            return arg("basis vector has non-finite entries");
        }
    }
    let r = range_basis.len();
    if r + kernel_basis.len() != n {
        return Err(Error::Geometry(format!(
            "range and kernel dimensions {} + {} do not add up to {n}",
            r,
            kernel_basis.len()
        )));
    }
    let cols: Vec<DVector<f64>> = range_basis.iter().chain(kernel_basis).cloned().collect();
    let b = DMatrix::from_columns(&cols);
    if linalg::rank(&b, 1e-12) < n {
        return Err(Error::Geometry("range and kernel are not complementary".into()));
    }
    let b_inv = linalg::checked_inverse(&b)
        .map_err(|e| Error::Geometry(format!("range and kernel are nearly dependent: {e}")))?;
    let mut d = DMatrix::zeros(n, n);
    for i in 0..r {
        d[(i, i)] = 1.0;
    }
    let p = &b * d * b_inv;
    Projection::from_parts(p, space, range_basis.to_vec(), kernel_basis.to_vec())
}

/// `(|P|, |I - P|)`.
pub fn projection_norms(p: &Projection, cfg: &OpNormConfig) -> Result<(NormEstimate, NormEstimate)> {
    if p.is_trivial() {
        return Err(Error::Contract("projection is trivial (P = 0 or P = I)".into()));
    }
    let np = operator_norm_with(p.map(), cfg)?;
    let nq = operator_norm_with(p.complement().map(), cfg)?;
    Ok((np, nq))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditConfig {
    /// Random unit vectors checked per projection, besides the norm witnesses.
    pub samples: usize,
    /// Absolute tolerance, scaled by `|x|` in the per-vector check.
    pub tol: f64,
    pub opnorm: OpNormConfig,
    pub dbm: DbmConfig,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            samples: 512,
            tol: 1e-6,
            opnorm: OpNormConfig::default(),
            dbm: DbmConfig::coarse(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionAudit {
    pub dim: usize,
    pub rank: usize,
    pub norm_p: NormEstimate,
    pub norm_i_minus_p: NormEstimate,
    pub cbm: f64,
    /// `min{1 + 1/|P|, C_BM}` with the lower estimate of `|P|`.
    pub bound_c: f64,
    /// `min{1 + |P|, C_BM |P|}` from the bounding estimate of `|P|`.
    pub operator_bound: f64,
    pub operator_slack: f64,
    /// `|I - P| / |P|` from the lower estimates.
    pub observed_ratio: f64,
    /// Smallest per-vector slack; `None` when no sample needed the distance.
    pub per_vector_worst_slack: Option<f64>,
    pub worst_x: Option<Vec<f64>>,
    pub vectors_checked: usize,
    pub distance_evaluations: usize,
    pub violations: Vec<String>,
}

impl ProjectionAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per-vector slack `d² |P| |x| + tol |x| - |(I - P)x|`, or `None` when
/// `Px = 0` or `(I - P)x = 0`.
pub fn vector_slack(p: &Projection, x: &DVector<f64>, norm_p: f64, tol: f64, dbm: &DbmConfig) -> Result<Option<f64>> {
    Ok(VectorCheck::new(p, dbm)?.slack(x, norm_p, tol)?.map(|(s, _)| s))
}

struct VectorCheck<'a> {
    p: &'a Projection,
    dbm: &'a DbmConfig,
    /// Distance of the whole space when it is a plane, computed on demand.
    plane_d: OnceCell<f64>,
}

impl<'a> VectorCheck<'a> {
    fn new(p: &'a Projection, dbm: &'a DbmConfig) -> Result<Self> {
        Ok(Self {
            p,
            dbm,
            plane_d: OnceCell::new(),
        })
    }

    /// Slack and whether a distance had to be computed.
    fn slack(&self, x: &DVector<f64>, norm_p: f64, tol: f64) -> Result<Option<(f64, bool)>> {
        let space = self.p.space();
        let px = self.p.matrix() * x;
        let qx = x - &px;
        let (nx, npx, nqx) = (space.norm(x.as_slice()), space.norm(px.as_slice()), space.norm(qx.as_slice()));
        let scale = nx.max(f64::MIN_POSITIVE);
        if npx <= 1e-14 * scale || nqx <= 1e-14 * scale {
            return Ok(None);
        }
        let base = norm_p * nx + tol * nx - nqx;
        if base >= 0.0 {
            // d >= 1, so the check passes without the distance.
            return Ok(Some((base, false)));
        }
        let d = if space.dim() == 2 {
            match self.plane_d.get() {
                Some(d) => *d,
                None => {
                    let d = plane_distance(space, self.dbm)?.value;
                    let _ = self.plane_d.set(d);
                    d
                }
            }
        } else {
            let plane = match TwoDimSubspace::spanned_by(space.clone(), &px, &qx) {
                Ok(plane) => plane,
                Err(Error::Geometry(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            plane_distance(&plane, self.dbm)?.value
        };
        Ok(Some((d * d * norm_p * nx + tol * nx - nqx, true)))
    }
}

/// Audits one nontrivial projection against a trusted value (or upper
/// bound) `cbm` of `C_BM` for its space.
pub fn audit_projection(p: &Projection, seed: u64, cbm: f64, cfg: &AuditConfig) -> Result<ProjectionAudit> {
    if !(cbm.is_finite() && cbm >= 1.0) {
        return arg(format!("C_BM value must be finite and at least 1, got {cbm}"));
    }
    if !(cfg.tol > 0.0) {
        return arg("tolerance must be positive");
    }
    let (np, nq) = projection_norms(p, &cfg.opnorm)?;
    let space = p.space();
    let n = space.dim();

    let mut xs: Vec<DVector<f64>> = vec![
        DVector::from_column_slice(&nq.witness),
        DVector::from_column_slice(&np.witness),
    ];
    if cfg.samples > 0 {
        xs.extend(space.sample_unit_sphere(cfg.samples, seed)?);
    }
    // Without a certificate, |P| is at least every observed ratio.
    let mut p_bound = np.bound();
    if np.is_heuristic() {
        for x in &xs {
            let r = space.norm((p.matrix() * x).as_slice()) / space.norm(x.as_slice());
            if r.is_finite() {
                p_bound = p_bound.max(r);
            }
        }
    }

    let mut violations = Vec::new();
    let operator_bound = (1.0 + p_bound).min(cbm * p_bound);
    let operator_slack = operator_bound + cfg.tol - nq.lower;
    if operator_slack < 0.0 {
        violations.push(format!(
            "|I-P| >= {:.12e} exceeds min{{1+|P|, C_BM |P|}} = {:.12e}",
            nq.lower, operator_bound
        ));
    }
    if np.lower < 1.0 - 1e-9 {
        violations.push(format!("|P| = {:.12e} < 1 for a nontrivial projection", np.lower));
    }

    let check = VectorCheck::new(p, &cfg.dbm)?;
    let mut worst: Option<(f64, usize)> = None;
    let mut checked = 0;
    let mut evaluations = 0;
    for (i, x) in xs.iter().enumerate() {
        if let Some((s, used)) = check.slack(x, p_bound, cfg.tol)? {
            checked += 1;
            evaluations += used as usize;
            if worst.is_none_or(|(w, _)| s < w) {
                worst = Some((s, i));
            }
        }
    }
    if let Some((s, i)) = worst {
        if s < 0.0 {
            violations.push(format!("per-vector bound fails at sample {i} with slack {s:.6e}"));
        }
    }

    Ok(ProjectionAudit {
        dim: n,
        rank: p.rank(),
        bound_c: (1.0 + 1.0 / np.lower).min(cbm),
        observed_ratio: nq.lower / np.lower,
        norm_p: np,
        norm_i_minus_p: nq,
        cbm,
        operator_bound,
        operator_slack,
        per_vector_worst_slack: worst.map(|w| w.0),
        worst_x: worst.map(|(_, i)| xs[i].iter().copied().collect()),
        vectors_checked: checked,
        distance_evaluations: evaluations,
        violations,
    })
}

/// Projection with range and kernel spanned by the columns of a seeded
/// Gaussian matrix, split at a random rank in `1..n`.
pub fn random_projection(space: &NormedSpace, seed: u64) -> Result<Projection> {
    let n = space.dim();
    if n < 2 {
        return arg("nontrivial projections need dimension at least 2");
    }
    let mut r = rng::stream(seed);
    let rank = rng::index(&mut r, 1, n);
    for _ in 0..100 {
        let b = rng::gaussian_matrix(&mut r, n, n);
        if linalg::condition(&b) > 1e6 {
            continue;
        }
        let cols: Vec<DVector<f64>> = b.column_iter().map(|c| c.into_owned()).collect();
        match make_projection(&cols[..rank], &cols[rank..], space) {
            Ok(p) => return Ok(p),
            Err(Error::Geometry(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Generation("no well-conditioned basis in 100 draws".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn shear(space: &NormedSpace) -> Projection {
        make_projection(&[v(&[1.0, 0.0])], &[v(&[1.0, -1.0])], space).unwrap()
    }

    #[test]
    fn construction_examples() {
        let l2 = NormedSpace::lp(2, 2.0).unwrap();
        let p = make_projection(&[v(&[1.0, 0.0])], &[v(&[0.0, 1.0])], &l2).unwrap();
        assert_eq!(p.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        assert!(!p.is_trivial());

        let s = shear(&l2);
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        assert!((s.matrix() - &expect).abs().max() < 1e-15);
        assert!((s.matrix() * v(&[1.0, -1.0])).norm() < 1e-15);
        assert!((s.matrix() * v(&[1.0, 0.0]) - v(&[1.0, 0.0])).norm() < 1e-15);

        let id = make_projection(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])], &[], &l2).unwrap();
        assert!(id.is_trivial());
        assert_eq!(id.matrix(), &DMatrix::identity(2, 2));
        assert!(matches!(projection_norms(&id, &OpNormConfig::default()), Err(Error::Contract(_))));
    }

    #[test]
    fn non_complementary_is_rejected() {
        let l2 = NormedSpace::lp(2, 2.0).unwrap();
        let r = make_projection(&[v(&[1.0, 1.0])], &[v(&[2.0, 2.0])], &l2);
        assert!(matches!(r, Err(Error::Geometry(_))));
        let r = make_projection(&[v(&[1.0, 1.0])], &[], &l2);
        assert!(matches!(r, Err(Error::Geometry(_))));
    }

    #[test]
    fn norm_examples() {
        let cfg = OpNormConfig::default();
        let l2 = NormedSpace::lp(2, 2.0).unwrap();
        let p = make_projection(&[v(&[1.0, 0.0])], &[v(&[0.0, 1.0])], &l2).unwrap();
        let (a, b) = projection_norms(&p, &cfg).unwrap();
        assert!((a.lower - 1.0).abs() < 1e-12 && (b.lower - 1.0).abs() < 1e-12);

        let linf = NormedSpace::lp(2, f64::INFINITY).unwrap();
        let (a, b) = projection_norms(&shear(&linf), &cfg).unwrap();
        assert!((a.lower - 2.0).abs() < 1e-12 && (b.lower - 1.0).abs() < 1e-12);

        let (a, b) = projection_norms(&shear(&l2), &cfg).unwrap();
        // Oracle: singular values of [[1,1],[0,0]] and [[0,-1],[0,1]].
        let s: f64 = DMatrix::from_row_slice(2, 2, &[1.0f64, 1.0, 0.0, 0.0]).singular_values().max();
        assert!((a.lower - s).abs() < 1e-9 && (b.lower - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn audit_examples() {
        let cfg = AuditConfig {
            samples: 64,
            ..AuditConfig::default()
        };
        let l2 = NormedSpace::lp(2, 2.0).unwrap();
        let p = make_projection(&[v(&[1.0, 0.0])], &[v(&[0.0, 1.0])], &l2).unwrap();
        let a = audit_projection(&p, 1, 1.0, &cfg).unwrap();
        assert!(a.passed(), "{:?}", a.violations);
        assert!(a.norm_i_minus_p.lower <= a.norm_p.upper + 1e-12);

        let linf = NormedSpace::lp(2, f64::INFINITY).unwrap();
        let a = audit_projection(&shear(&linf), 2, 2.0, &cfg).unwrap();
        assert!(a.passed(), "{:?}", a.violations);
        assert!((a.operator_bound - 3.0).abs() < 1e-12);

        let s = vector_slack(&shear(&linf), &v(&[1.0, 0.0]), 2.0, 1e-6, &cfg.dbm).unwrap();
        assert_eq!(s, None);
    }

    #[test]
    fn a_wrong_constant_is_caught() {
        // On ℓ∞², |I-P| = 2 |P| is impossible to certify with C_BM = 1.
        let linf = NormedSpace::lp(2, f64::INFINITY).unwrap();
        let p = make_projection(&[v(&[1.0, 1.0])], &[v(&[0.0, 1.0])], &linf).unwrap();
        let a = audit_projection(&p, 0, 1.0, &AuditConfig { samples: 16, ..AuditConfig::default() }).unwrap();
        assert!(a.norm_i_minus_p.lower > a.norm_p.upper + 0.1);
        assert!(!a.passed());
    }

    #[test]
    fn random_projections_are_idempotent_and_seeded() {
        for n in 2..6 {
            let space = NormedSpace::lp(n, 3.0).unwrap();
            let p = random_projection(&space, n as u64).unwrap();
            let q = random_projection(&space, n as u64).unwrap();
            assert_eq!(p.matrix(), q.matrix());
            assert!(!p.is_trivial());
            let m = p.matrix();
            assert!(linalg::frobenius(&(m * m - m)) <= 1e-9 * (1.0 + linalg::frobenius(m)));
        }
        assert!(random_projection(&NormedSpace::lp(1, 2.0).unwrap(), 0).is_err());
    }

    #[test]
    fn hilbert_identity() {
        let g = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0]);
        let space = NormedSpace::quadratic(g).unwrap();
        for seed in 0..20 {
            let p = random_projection(&space, seed).unwrap();
            let (a, b) = projection_norms(&p, &OpNormConfig::default()).unwrap();
            assert!((a.lower - b.lower).abs() <= 1e-8 * a.lower.max(1.0), "{} {}", a.lower, b.lower);
        }
    }
}
