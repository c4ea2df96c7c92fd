//! Petrov-Galerkin problems `a(u, v) = <f, v>` on a fine pair of spaces
//! `(X, Y)` and their discretizations on `X_h ⊂ X`, `Y_h ⊂ Y`.
//!
//! The matrix convention is `A[i][j] = a(φ_j, ψ_i)`: columns are trial
//! directions, rows are test directions. For the quantities
//!
//! ```text
//! M   = |A : X -> Y*|                     (continuity)
//! m   = 1 / |A⁻¹ : Y* -> X|               (inf-sup)
//! m_h = 1 / |A_h⁻¹ : Y_h* -> X_h|         (discrete inf-sup)
//! ```
//!
//! with `A_h = E_Yᵀ A E_X` and inherited subspace norms, [`verify_bounds`]
//! checks the Babuška bound `(1 + M/m_h)`, the sharpened bound
//! `min{1 + m_h/M, C_BM} M/m_h`, the Hilbert-space bound `M/m_h` and Céa's
//! lemma where they apply.

mod best;
mod fem;
mod spec;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use best::{best_approximation_in, BestApproximation, BestMethod};
pub use fem::{assemble_fem_1d, prolongation, upwind_alpha, FemVariant};
pub use spec::{Fem1dSpec, ProblemSpec, RandomSpec};

use crate::error::{arg, Error, Result};
use crate::linalg;
use crate::opnorm::{inverse_norm_with, operator_norm_with, LinearMap, NormEstimate, OpNormConfig};
use crate::projlab::Projection;
use crate::rng;
use crate::spaces::{Norm, NormedSpace};

/// Subspace of a coordinate space: a set of coordinates or the column span
/// of an inclusion matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Selector {
    Indices(Vec<usize>),
    Inclusion(DMatrix<f64>),
}

impl Selector {
    pub fn dim(&self) -> usize {
        match self {
            Selector::Indices(ix) => ix.len(),
            Selector::Inclusion(e) => e.ncols(),
        }
    }

    /// The `n x dim` embedding matrix.
    pub fn embedding(&self, n: usize) -> DMatrix<f64> {
        match self {
            Selector::Indices(ix) => {
                let mut e = DMatrix::zeros(n, ix.len());
                for (j, &i) in ix.iter().enumerate() {
                    e[(i, j)] = 1.0;
                }
                e
            }
            Selector::Inclusion(e) => e.clone(),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Selector::Indices(ix) => {
                let mut seen = vec![false; n];
                for &i in ix {
                    if i >= n || seen[i] {
                        return arg(format!("selector index {i} is out of range or repeated"));
                    }
                    seen[i] = true;
                }
            }
            Selector::Inclusion(e) => {
                if e.nrows() != n {
                    return arg(format!("inclusion matrix has {} rows, space has dimension {n}", e.nrows()));
                }
                if !linalg::is_finite_slice(e.as_slice()) {
                    return arg("inclusion matrix has non-finite entries");
                }
                if e.ncols() > 0 && linalg::rank(e, 1e-12) < e.ncols() {
                    return Err(Error::Geometry("inclusion matrix is rank deficient".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PgProblem {
    a: DMatrix<f64>,
    x_space: NormedSpace,
    y_space: NormedSpace,
    f: DVector<f64>,
    trial: Selector,
    test: Selector,
    label: String,
}

impl PgProblem {
    pub fn new(
        a: DMatrix<f64>,
        x_space: NormedSpace,
        y_space: NormedSpace,
        f: DVector<f64>,
        trial: Selector,
        test: Selector,
        label: impl Into<String>,
    ) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() || n == 0 {
            return arg("the system matrix must be square and non-empty");
        }
        if x_space.dim() != n || y_space.dim() != n || f.len() != n {
            return arg(format!(
                "dimensions disagree: A is {n}x{n}, X has {}, Y has {}, f has {}",
                x_space.dim(),
                y_space.dim(),
                f.len()
            ));
        }
        if !linalg::is_finite_slice(a.as_slice()) || !linalg::is_finite_slice(f.as_slice()) {
            return arg("A and f must be finite");
        }
        trial.validate(n)?;
        test.validate(n)?;
        if trial.dim() != test.dim() {
            return arg(format!(
                "discrete trial and test spaces differ in dimension ({} vs {})",
                trial.dim(),
                test.dim()
            ));
        }
        Ok(Self {
            a,
            x_space,
            y_space,
            f,
            trial,
            test,
            label: label.into(),
        })
    }

    /// Replaces the trial and test norms.
    pub fn with_norms(mut self, x_space: NormedSpace, y_space: NormedSpace) -> Result<Self> {
        let n = self.n();
        if x_space.dim() != n || y_space.dim() != n {
            return arg(format!("norms must have dimension {n}"));
        }
        self.x_space = x_space;
        self.y_space = y_space;
        Ok(self)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn x_space(&self) -> &NormedSpace {
        &self.x_space
    }

    pub fn y_space(&self) -> &NormedSpace {
        &self.y_space
    }

    pub fn f(&self) -> &DVector<f64> {
        &self.f
    }

    pub fn trial(&self) -> &Selector {
        &self.trial
    }

    pub fn test(&self) -> &Selector {
        &self.test
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_h(&self) -> usize {
        self.trial.dim()
    }

    pub fn e_x(&self) -> DMatrix<f64> {
        self.trial.embedding(self.n())
    }

    pub fn e_y(&self) -> DMatrix<f64> {
        self.test.embedding(self.n())
    }

    /// `A_h = E_Yᵀ A E_X`.
    pub fn a_h(&self) -> DMatrix<f64> {
        self.e_y().transpose() * &self.a * self.e_x()
    }

    /// Both the full and the discrete systems are numerically invertible.
    pub fn is_well_posed(&self) -> bool {
        linalg::checked_inverse(&self.a).is_ok() && (self.n_h() == 0 || linalg::checked_inverse(&self.a_h()).is_ok())
    }
}

/// Gaussian system with nested coordinate subspaces `[0, coarse_dim)`.
pub fn random_problem(
    n: usize,
    seed: u64,
    trial_norm: NormedSpace,
    test_norm: NormedSpace,
    coarse_dim: usize,
) -> Result<PgProblem> {
    if coarse_dim == 0 || coarse_dim >= n {
        return arg(format!("coarse dimension must lie in 1..{n}, got {coarse_dim}"));
    }
    if trial_norm.dim() != n || test_norm.dim() != n {
        return arg(format!("norms must have dimension {n}"));
    }
    let mut r = rng::stream(seed);
    for _ in 0..100 {
        let a = rng::gaussian_matrix(&mut r, n, n);
        let f = rng::gaussian_vector(&mut r, n);
        let ah = a.view((0, 0), (coarse_dim, coarse_dim)).into_owned();
        if linalg::smallest_singular_value(&a) <= 1e-6 || linalg::smallest_singular_value(&ah) <= 1e-6 {
            continue;
        }
        let sel = Selector::Indices((0..coarse_dim).collect());
        return PgProblem::new(
            a,
            trial_norm,
            test_norm,
            f,
            sel.clone(),
            sel,
            format!("random(n={n}, seed={seed}, coarse_dim={coarse_dim})"),
        );
    }
    Err(Error::Generation(format!("no well-conditioned system in 100 draws (n={n}, seed={seed})")))
}

/// `M`, the norm of `A : X -> Y*`.
pub fn continuity_constant(prob: &PgProblem, cfg: &OpNormConfig) -> Result<NormEstimate> {
    let map = LinearMap::new(prob.a.clone(), prob.x_space.clone(), prob.y_space.dual()?)?;
    operator_norm_with(&map, cfg)
}

/// `|A⁻¹|` on the full spaces, or `|A_h⁻¹|` on the inherited subspaces.
/// `None` when the discrete system is singular.
pub fn inverse_estimate(prob: &PgProblem, restricted: bool, cfg: &OpNormConfig) -> Result<Option<NormEstimate>> {
    let map = if restricted {
        if prob.n_h() == 0 {
            return Err(Error::Contract("the discrete spaces are empty".into()));
        }
        let xh = prob.x_space.restrict(&prob.e_x())?;
        let yh = prob.y_space.restrict(&prob.e_y())?;
        LinearMap::new(prob.a_h(), xh, yh.dual()?)?
    } else {
        LinearMap::new(prob.a.clone(), prob.x_space.clone(), prob.y_space.dual()?)?
    };
    match inverse_norm_with(&map, cfg) {
        Ok(e) => Ok(Some(e)),
        Err(Error::Singular { .. }) if restricted => Ok(None),
        Err(e) => Err(e),
    }
}

/// `m` or `m_h` as `1 / bound(|A⁻¹|)`; a singular discrete system gives 0.
pub fn infsup_constant(prob: &PgProblem, restricted: bool, cfg: &OpNormConfig) -> Result<f64> {
    Ok(inverse_estimate(prob, restricted, cfg)?.map_or(0.0, |e| 1.0 / e.bound()))
}

/// `(u, u_h)` in full coordinates.
pub fn solve_pg(prob: &PgProblem) -> Result<(DVector<f64>, DVector<f64>)> {
    let u = linalg::checked_solve(&prob.a, &prob.f)?;
    if prob.n_h() == 0 {
        return Ok((u, DVector::zeros(prob.n())));
    }
    let rhs = prob.e_y().transpose() * &prob.f;
    let c = linalg::checked_solve(&prob.a_h(), &rhs)?;
    Ok((u, prob.e_x() * c))
}

/// `P_h = E_X A_h⁻¹ E_Yᵀ A`, mapping the exact solution to the discrete one.
pub fn pg_projection(prob: &PgProblem) -> Result<Projection> {
    let n = prob.n();
    let (ex, ey) = (prob.e_x(), prob.e_y());
    let range: Vec<DVector<f64>> = ex.column_iter().map(|c| c.into_owned()).collect();
    if prob.n_h() == 0 {
        let kernel = (0..n).map(|i| DVector::from_fn(n, |j, _| (i == j) as u8 as f64)).collect();
        return Projection::from_parts(DMatrix::zeros(n, n), &prob.x_space, range, kernel);
    }
    let ah_inv = linalg::checked_inverse(&prob.a_h())?;
    let p = &ex * ah_inv * ey.transpose() * &prob.a;
    let a_inv = linalg::checked_inverse(&prob.a)?;
    let null = linalg::null_space(&ey.transpose(), 1e-12);
    let kernel: Vec<DVector<f64>> = (&a_inv * null).column_iter().map(|c| c.into_owned()).collect();
    Projection::from_parts(p, &prob.x_space, range, kernel)
}

/// Best approximation of `u` from `X_h` in the norm of `X`.
pub fn best_approximation(u: &DVector<f64>, prob: &PgProblem) -> Result<BestApproximation> {
    best_approximation_in(&prob.x_space, &prob.e_x(), u)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub opnorm: OpNormConfig,
    /// Relative tolerance of the bound assertions.
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            opnorm: OpNormConfig::default(),
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub problem_id: String,
    pub n: usize,
    pub n_h: usize,
    #[serde(rename = "M")]
    pub m_cont: f64,
    pub m: f64,
    pub m_h: f64,
    pub err: f64,
    pub best: f64,
    /// `err / best`; undefined when `best = 0`.
    pub effectivity: Option<f64>,
    pub cbm: f64,
    #[serde(rename = "C_used")]
    pub c_used: f64,
    pub bound_babuska: f64,
    pub bound_sharp: f64,
    /// Only for inner-product trial norms.
    pub bound_xz: Option<f64>,
    /// Only for coercive Galerkin problems with equal inner-product norms.
    pub bound_cea: Option<f64>,
    pub slack_babuska: f64,
    pub slack_sharp: f64,
    pub slack_xz: Option<f64>,
    pub slack_cea: Option<f64>,
    pub galerkin_residual: f64,
    pub norm_ph: NormEstimate,
    pub norm_i_minus_ph: NormEstimate,
    /// `|P_h| m_h / M`, at most 1.
    pub ph_ratio: f64,
    pub violations: Vec<String>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn csv_header() -> Vec<&'static str> {
        vec![
            "problem_id",
            "n",
            "n_h",
            "M",
            "m",
            "m_h",
            "err",
            "best",
            "effectivity",
            "C_used",
            "bound_babuska",
            "bound_sharp",
            "bound_xz",
            "slack_babuska",
            "slack_sharp",
            "slack_xz",
            "bound_cea",
            "slack_cea",
            "ph_ratio",
            "violations",
        ]
    }

    pub fn csv_record(&self) -> Vec<String> {
        let num = |v: f64| format!("{v:.17e}");
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        vec![
            self.problem_id.clone(),
            self.n.to_string(),
            self.n_h.to_string(),
            num(self.m_cont),
            num(self.m),
            num(self.m_h),
            num(self.err),
            num(self.best),
            opt(self.effectivity),
            num(self.c_used),
            num(self.bound_babuska),
            num(self.bound_sharp),
            opt(self.bound_xz),
            num(self.slack_babuska),
            num(self.slack_sharp),
            opt(self.slack_xz),
            opt(self.bound_cea),
            opt(self.slack_cea),
            num(self.ph_ratio),
            self.violations.len().to_string(),
        ]
    }
}

/// Coercivity constant `min a(x, x) / |x|²` when `X` carries an inner
/// product, `Y = X` and `Y_h = X_h`.
fn coercivity(prob: &PgProblem) -> Option<f64> {
    let g = prob.x_space.gram()?;
    let gy = prob.y_space.gram()?;
    if (&g - &gy).amax() > 1e-12 * g.amax() || prob.trial != prob.test {
        return None;
    }
    let l = g.cholesky()?.l();
    let l_inv = l.try_inverse()?;
    let sym = (&prob.a + prob.a.transpose()) * 0.5;
    let m = &l_inv * sym * l_inv.transpose();
    let min = m.symmetric_eigenvalues().min();
    (min > 0.0).then_some(min)
}

/// Computes every constant and checks the error-bound chain. Failed checks
/// are listed in `violations`; errors are reserved for invalid input.
pub fn verify_bounds(prob: &PgProblem, cbm: f64, cfg: &VerifyConfig) -> Result<BoundReport> {
    if !(cbm.is_finite() && cbm >= 1.0) {
        return arg(format!("C_BM value must be finite and at least 1, got {cbm}"));
    }
    if !(cfg.tol > 0.0) {
        return arg("tolerance must be positive");
    }
    if prob.n_h() == 0 {
        return Err(Error::Contract("the discrete spaces are empty".into()));
    }
    let tol = cfg.tol;
    let x = &prob.x_space;
    let m_est = continuity_constant(prob, &cfg.opnorm)?;
    let m_cont = m_est.bound();
    let m = 1.0 / inverse_estimate(prob, false, &cfg.opnorm)?.expect("full system").bound();
    let m_h = infsup_constant(prob, true, &cfg.opnorm)?;

    let (u, u_h) = solve_pg(prob)?;
    let err = x.norm((&u - &u_h).as_slice());
    let best = best_approximation(&u, prob)?.value;
    let mut violations = Vec::new();
    let u_norm = x.norm(u.as_slice());
    let abs_tol = 1e-10 * u_norm;
    let exceeds = |value: f64, bound: f64| value > bound * (1.0 + tol) + abs_tol;

    if best > err * (1.0 + 1e-9) + 1e-12 {
        violations.push(format!("best approximation {best:.12e} exceeds the discrete error {err:.12e}"));
    }
    let residual = (prob.e_y().transpose() * &prob.a * (&u - &u_h)).amax();
    let u2 = u.norm();
    if residual > 1e-10 * linalg::frobenius(&prob.a) * u2.max(f64::MIN_POSITIVE) {
        violations.push(format!("Galerkin orthogonality residual {residual:.3e}"));
    }
    if m_cont < m_h - 1e-9 {
        violations.push(format!("M = {m_cont:.12e} is smaller than m_h = {m_h:.12e}"));
    }

    let ratio = if m_h > 0.0 { m_cont / m_h } else { f64::INFINITY };
    let c_used = (1.0 + m_h / m_cont).min(cbm);
    let bound_babuska = (1.0 + ratio) * best;
    let bound_sharp = c_used * ratio * best;
    if exceeds(err, bound_babuska) {
        violations.push(format!("Babuška bound: err {err:.12e} > {bound_babuska:.12e}"));
    }
    if exceeds(err, bound_sharp) {
        violations.push(format!("sharpened bound: err {err:.12e} > {bound_sharp:.12e}"));
    }
    let bound_xz = x.is_hilbert().then_some(ratio * best);
    if let Some(b) = bound_xz {
        if exceeds(err, b) {
            violations.push(format!("Hilbert-space bound: err {err:.12e} > {b:.12e}"));
        }
    }
    let bound_cea = coercivity(prob).map(|mt| m_cont / mt * best);
    if let Some(b) = bound_cea {
        if exceeds(err, b) {
            violations.push(format!("Céa bound: err {err:.12e} > {b:.12e}"));
        }
    }

    let ph = pg_projection(prob)?;
    let consistency = (ph.matrix() * &u - &u_h).norm();
    if consistency > 1e-10 * u2.max(f64::MIN_POSITIVE) {
        violations.push(format!("P_h u differs from u_h by {consistency:.3e}"));
    }
    let (norm_ph, norm_i_minus_ph) = if ph.is_trivial() {
        let n = prob.n();
        let id = LinearMap::identity(x);
        let z = LinearMap::new(DMatrix::zeros(n, n), x.clone(), x.clone())?;
        let (a, b) = if ph.rank() == 0 { (z, id) } else { (id, z) };
        (operator_norm_with(&a, &cfg.opnorm)?, operator_norm_with(&b, &cfg.opnorm)?)
    } else {
        crate::projlab::projection_norms(&ph, &cfg.opnorm)?
    };
    if exceeds(norm_ph.lower, ratio) {
        violations.push(format!("|P_h| = {:.12e} exceeds M/m_h = {ratio:.12e}", norm_ph.lower));
    }
    if !norm_i_minus_ph.is_heuristic() && exceeds(err, norm_i_minus_ph.upper * best) {
        violations.push(format!(
            "err {err:.12e} exceeds |I - P_h| best = {:.12e}",
            norm_i_minus_ph.upper * best
        ));
    }

    Ok(BoundReport {
        problem_id: prob.label.clone(),
        n: prob.n(),
        n_h: prob.n_h(),
        m_cont,
        m,
        m_h,
        err,
        best,
        effectivity: (best > 0.0).then(|| err / best),
        cbm,
        c_used,
        bound_babuska,
        bound_sharp,
        bound_xz,
        bound_cea,
        slack_babuska: bound_babuska - err,
        slack_sharp: bound_sharp - err,
        slack_xz: bound_xz.map(|b| b - err),
        slack_cea: bound_cea.map(|b| b - err),
        galerkin_residual: residual,
        ph_ratio: norm_ph.lower / ratio,
        norm_ph,
        norm_i_minus_ph,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eu(n: usize) -> NormedSpace {
        NormedSpace::euclidean(n).unwrap()
    }

    fn diag_problem(d: &[f64], sel: Vec<usize>) -> PgProblem {
        let n = d.len();
        PgProblem::new(
            DMatrix::from_diagonal(&DVector::from_column_slice(d)),
            eu(n),
            eu(n),
            DVector::from_element(n, 1.0),
            Selector::Indices(sel.clone()),
            Selector::Indices(sel),
            "diag",
        )
        .unwrap()
    }

    #[test]
    fn constants_examples() {
        let cfg = OpNormConfig::default();
        let id = diag_problem(&[1.0, 1.0, 1.0], vec![0]);
        assert!((continuity_constant(&id, &cfg).unwrap().lower - 1.0).abs() < 1e-12);
        assert!((infsup_constant(&id, false, &cfg).unwrap() - 1.0).abs() < 1e-12);

        let d = diag_problem(&[2.0, 1.0, 0.5], vec![0, 1]);
        assert!((continuity_constant(&d, &cfg).unwrap().lower - 2.0).abs() < 1e-12);
        assert!((infsup_constant(&d, false, &cfg).unwrap() - 0.5).abs() < 1e-12);
        assert!((infsup_constant(&d, true, &cfg).unwrap() - 1.0).abs() < 1e-12);

        // ℓ1 -> (ℓ∞)* = ℓ1; oracle: largest ℓ1 column norm.
        let p = PgProblem::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]),
            NormedSpace::lp(2, 1.0).unwrap(),
            NormedSpace::lp(2, f64::INFINITY).unwrap(),
            DVector::from_element(2, 1.0),
            Selector::Indices(vec![0]),
            Selector::Indices(vec![0]),
            "shear",
        )
        .unwrap();
        assert!((continuity_constant(&p, &cfg).unwrap().lower - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_discrete_system_gives_zero() {
        let p = PgProblem::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            eu(2),
            eu(2),
            DVector::from_element(2, 1.0),
            Selector::Indices(vec![0]),
            Selector::Indices(vec![0]),
            "swap",
        )
        .unwrap();
        assert_eq!(infsup_constant(&p, true, &OpNormConfig::default()).unwrap(), 0.0);
        assert!(matches!(solve_pg(&p), Err(Error::Singular { .. })));
    }

    #[test]
    fn solve_examples() {
        let mut p = diag_problem(&[1.0, 1.0], vec![0]);
        p.f = DVector::from_vec(vec![1.0, 0.0]);
        let (u, uh) = solve_pg(&p).unwrap();
        assert_eq!(u, uh);

        let p = PgProblem::new(
            DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]),
            eu(2),
            eu(2),
            DVector::from_vec(vec![1.0, -1.0]),
            Selector::Indices(vec![0, 1]),
            Selector::Indices(vec![0, 1]),
            "full",
        )
        .unwrap();
        let (u, uh) = solve_pg(&p).unwrap();
        assert!((u - uh).amax() < 1e-12);
        assert!(pg_projection(&p).unwrap().is_trivial());
    }

    #[test]
    fn projection_examples() {
        let p = diag_problem(&[1.0, 1.0], vec![0]);
        let ph = pg_projection(&p).unwrap();
        assert_eq!(ph.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));

        let p = PgProblem::new(
            DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]),
            eu(2),
            eu(2),
            DVector::from_element(2, 1.0),
            Selector::Indices(vec![0]),
            Selector::Indices(vec![0]),
            "sym",
        )
        .unwrap();
        let ph = pg_projection(&p).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 0.0]);
        assert!((ph.matrix() - &expect).amax() < 1e-15);
        let m = ph.matrix();
        assert!((m * m - m).amax() < 1e-15);
    }

    #[test]
    fn identity_report() {
        let p = diag_problem(&[1.0, 1.0, 1.0], vec![0, 2]);
        let r = verify_bounds(&p, 1.0, &VerifyConfig::default()).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert!((r.err - r.best).abs() < 1e-12);
        assert!((r.effectivity.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.slack_babuska >= 0.0 && r.slack_sharp >= -1e-12 && r.slack_xz.unwrap() >= -1e-12);
    }

    #[test]
    fn fem_reports_pass() {
        for variant in [FemVariant::Galerkin, FemVariant::PetrovShifted] {
            for (eps, beta) in [(1.0, 0.0), (0.1, 1.0)] {
                let p = assemble_fem_1d(8, eps, beta, variant, 2).unwrap();
                let r = verify_bounds(&p, 1.0, &VerifyConfig::default()).unwrap();
                assert!(r.passed(), "{}: {:?}", p.label(), r.violations);
                assert!(r.slack_xz.unwrap() >= -1e-9);
                if variant == FemVariant::Galerkin {
                    assert!(r.bound_cea.is_some());
                }
            }
        }
    }

    #[test]
    fn fem_error_decreases_under_refinement() {
        let mut last = f64::INFINITY;
        for elements in [4, 8, 16, 32] {
            let p = assemble_fem_1d(elements, 1.0, 0.0, FemVariant::Galerkin, 2).unwrap();
            let (u, uh) = solve_pg(&p).unwrap();
            let err = p.x_space().norm((&u - &uh).as_slice());
            assert!(err <= last + 1e-12, "{elements}: {err} > {last}");
            last = err;
        }
    }

    #[test]
    fn random_problems() {
        let a = random_problem(4, 3, eu(4), eu(4), 2).unwrap();
        let b = random_problem(4, 3, eu(4), eu(4), 2).unwrap();
        assert_eq!(a.a(), b.a());
        assert_eq!(a.f(), b.f());
        assert!(a.is_well_posed());
        assert!(random_problem(4, 3, eu(4), eu(4), 4).is_err());
        let c = random_problem(5, 1, eu(5), eu(5), 4).unwrap();
        assert_eq!(c.n_h(), 4);

        let x = NormedSpace::lp(6, 4.0).unwrap();
        let y = NormedSpace::lp(6, f64::INFINITY).unwrap();
        let p = random_problem(6, 11, x, y, 3).unwrap();
        let r = verify_bounds(&p, 2.0, &VerifyConfig::default()).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert!(r.effectivity.unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn selectors_must_match() {
        let r = PgProblem::new(
            DMatrix::identity(2, 2),
            eu(2),
            eu(2),
            DVector::zeros(2),
            Selector::Indices(vec![0]),
            Selector::Indices(vec![0, 1]),
            "bad",
        );
        assert!(r.is_err());
    }
}
