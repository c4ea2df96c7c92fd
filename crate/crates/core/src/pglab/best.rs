//! `inf { |u - E c|_X : c }` for the trial subspace `X_h = range(E)`.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::spaces::{Norm, NormKind, NormedSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BestMethod {
    NormalEquations,
    Coordinates,
    LinearProgram,
    Descent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestApproximation {
    pub value: f64,
    /// Minimizer in full coordinates, `E c`.
    pub argmin: DVector<f64>,
    pub coefficients: DVector<f64>,
    pub method: BestMethod,
}

/// Best approximation of `u` from the column span of `e` in the norm of
/// `space`. Non-unique minimizers (polyhedral norms) are resolved towards
/// the coefficient vector with lexicographically smallest absolute values.
pub fn best_approximation_in(space: &NormedSpace, e: &DMatrix<f64>, u: &DVector<f64>) -> Result<BestApproximation> {
    let k = e.ncols();
    if k == 0 {
        return Ok(finish(space, e, u, DVector::zeros(0), BestMethod::Coordinates));
    }
    if let Some(g) = space.gram() {
        let et_g = e.transpose() * &g;
        let c = linalg::checked_solve(&(&et_g * e), &(&et_g * u))?;
        return Ok(finish(space, e, u, c, BestMethod::NormalEquations));
    }
    if let Some(cols) = linalg::coordinate_columns(e) {
        let weighted = match space.kind() {
            NormKind::Lp { p } => Some((*p, vec![1.0; space.dim()])),
            NormKind::WeightedLp { p, weights } => Some((*p, weights.clone())),
            _ => None,
        };
        if let Some((p, w)) = weighted {
            return Ok(coordinate_best(space, e, u, &cols, p, &w));
        }
    }
    match space.kind() {
        NormKind::Lp { p } | NormKind::WeightedLp { p, .. } if *p > 1.0 && p.is_finite() => descent_best(space, e, u),
        _ => lp_best(space, e, u),
    }
}

fn finish(space: &NormedSpace, e: &DMatrix<f64>, u: &DVector<f64>, c: DVector<f64>, method: BestMethod) -> BestApproximation {
    let argmin = if c.is_empty() { DVector::zeros(u.len()) } else { e * &c };
    BestApproximation {
        value: space.norm((u - &argmin).as_slice()),
        argmin,
        coefficients: c,
        method,
    }
}

/// Coordinate subspaces of (weighted) `ℓp`: the selected entries are matched
/// exactly, except for `p = ∞` where any value within the residual level is
/// optimal and the one closest to zero is taken.
fn coordinate_best(
    space: &NormedSpace,
    e: &DMatrix<f64>,
    u: &DVector<f64>,
    cols: &[(usize, f64)],
    p: f64,
    w: &[f64],
) -> BestApproximation {
    let mut c = DVector::zeros(cols.len());
    for (j, &(i, m)) in cols.iter().enumerate() {
        c[j] = u[i] / m;
    }
    if p.is_infinite() {
        let selected: Vec<usize> = cols.iter().map(|c| c.0).collect();
        let level = (0..u.len())
            .filter(|i| !selected.contains(i))
            .map(|i| w[i] * u[i].abs())
            .fold(0.0, f64::max);
        for (j, &(i, m)) in cols.iter().enumerate() {
            // |u_i - m c| w_i <= level  <=>  c within radius level/(w_i |m|).
            let r = level / (w[i] * m.abs());
            c[j] = if c[j].abs() <= r { 0.0 } else { c[j] - r * c[j].signum() };
        }
    }
    finish(space, e, u, c, BestMethod::Coordinates)
}

/// Residual constraints `s >= gauge(u - E c)` for polyhedral norms, as rows
/// `a` with `a · (u - E c) <= s` (weighted by `t_i` for `ℓ1`).
enum Polyhedral {
    /// `Σ w_i t_i` with `t_i >= |r_i|`.
    Sum(Vec<f64>),
    /// `max_k a_k · r`.
    Max(Vec<Vec<f64>>),
}

fn polyhedral(space: &NormedSpace) -> Option<Polyhedral> {
    let n = space.dim();
    let axis_rows = |w: &dyn Fn(usize) -> f64| -> Vec<Vec<f64>> {
        (0..n)
            .flat_map(|i| {
                let mut a = vec![0.0; n];
                a[i] = w(i);
                let b: Vec<f64> = a.iter().map(|v| -v).collect();
                [a, b]
            })
            .collect()
    };
    match space.kind() {
        NormKind::Lp { p } if *p == 1.0 => Some(Polyhedral::Sum(vec![1.0; n])),
        NormKind::WeightedLp { p, weights } if *p == 1.0 => Some(Polyhedral::Sum(weights.clone())),
        NormKind::Lp { p } if p.is_infinite() => Some(Polyhedral::Max(axis_rows(&|_| 1.0))),
        NormKind::WeightedLp { p, weights } if p.is_infinite() => Some(Polyhedral::Max(axis_rows(&|i| weights[i]))),
        NormKind::Polytope(poly) => Some(Polyhedral::Max(poly.facets().to_vec())),
        _ => None,
    }
}

fn lp_error(e: microlp::Error) -> Error {
    Error::Numerical(format!("linear program failed: {e}"))
}

/// Builds the LP in variables `(c, s or t)`; returns the problem, the
/// coefficient variables and the objective variables.
fn build_lp(
    kind: &Polyhedral,
    e: &DMatrix<f64>,
    u: &DVector<f64>,
    objective: bool,
) -> (Problem, Vec<microlp::Variable>, Vec<(microlp::Variable, f64)>) {
    let (n, k) = (e.nrows(), e.ncols());
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let c: Vec<_> = (0..k).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let mut obj = Vec::new();
    match kind {
        Polyhedral::Sum(w) => {
            for i in 0..n {
                let t = lp.add_var(if objective { w[i] } else { 0.0 }, (0.0, f64::INFINITY));
                obj.push((t, w[i]));
                // t >= ±(u_i - e_i c)
                for sign in [1.0, -1.0] {
                    let mut terms = vec![(t, 1.0)];
                    terms.extend((0..k).map(|j| (c[j], sign * e[(i, j)])));
                    lp.add_constraint(terms.as_slice(), ComparisonOp::Ge, sign * u[i]);
                }
            }
        }
        Polyhedral::Max(rows) => {
            let s = lp.add_var(if objective { 1.0 } else { 0.0 }, (0.0, f64::INFINITY));
            obj.push((s, 1.0));
            for a in rows {
                // a·u - (aᵀE) c <= s
                let at_e: Vec<f64> = (0..k).map(|j| (0..n).map(|i| a[i] * e[(i, j)]).sum()).collect();
                let au: f64 = (0..n).map(|i| a[i] * u[i]).sum();
                let mut terms = vec![(s, 1.0)];
                terms.extend((0..k).map(|j| (c[j], at_e[j])));
                lp.add_constraint(terms.as_slice(), ComparisonOp::Ge, au);
            }
        }
    }
    (lp, c, obj)
}

fn lp_best(space: &NormedSpace, e: &DMatrix<f64>, u: &DVector<f64>) -> Result<BestApproximation> {
    let kind = polyhedral(space).ok_or_else(|| {
        Error::Argument(format!("no best-approximation method for the norm {}", space.label()))
    })?;
    let k = e.ncols();
    let (lp, c_vars, _) = build_lp(&kind, e, u, true);
    let sol = lp.solve().map_err(lp_error)?.into_solution().map_err(|_| Error::Numerical("linear program interrupted".into()))?;
    let optimum = sol.objective();
    let c0 = DVector::from_iterator(k, c_vars.iter().map(|&v| sol.var_value(v)));
    let cap = optimum * (1.0 + 1e-12) + 1e-13 * (1.0 + u.amax());

    // Lexicographic tie-break on |c_1|, |c_2|, ...; stops early if the
    // solver cannot hold the optimum within the cap.
    let mut fixed: Vec<(f64, f64)> = Vec::new();
    let mut c_tie = c0.clone();
    for j in 0..k {
        let (mut lp, c, obj) = build_lp(&kind, e, u, false);
        lp.add_constraint(obj.as_slice(), ComparisonOp::Le, cap);
        for (jj, &(lo, hi)) in fixed.iter().enumerate() {
            lp.add_constraint([(c[jj], 1.0)], ComparisonOp::Ge, lo);
            lp.add_constraint([(c[jj], 1.0)], ComparisonOp::Le, hi);
        }
        let a = lp.add_var(1.0, (0.0, f64::INFINITY));
        lp.add_constraint([(a, 1.0), (c[j], -1.0)], ComparisonOp::Ge, 0.0);
        lp.add_constraint([(a, 1.0), (c[j], 1.0)], ComparisonOp::Ge, 0.0);
        let Ok(Ok(sol)) = lp.solve().map(|s| s.into_solution()) else {
            break;
        };
        let v = sol.var_value(c[j]);
        let slack = 1e-12 * (1.0 + v.abs());
        fixed.push((v - slack, v + slack));
        c_tie = DVector::from_iterator(k, c.iter().map(|&var| sol.var_value(var)));
    }
    let f = |c: &DVector<f64>| space.norm((u - e * c).as_slice());
    let c_final = if f(&c_tie) <= f(&c0) + 1e-14 * (1.0 + u.amax()) { c_tie } else { c0 };
    Ok(finish(space, e, u, c_final, BestMethod::LinearProgram))
}

/// Gradient descent on `|u - E c|` for strictly convex `ℓp`, started from the
/// Euclidean projection and from zero.
fn descent_best(space: &NormedSpace, e: &DMatrix<f64>, u: &DVector<f64>) -> Result<BestApproximation> {
    let k = e.ncols();
    let f = |c: &DVector<f64>| space.norm((u - e * c).as_slice());
    let grad = |c: &DVector<f64>| {
        let r = u - e * c;
        -(e.transpose() * DVector::from_vec(space.subgradient(r.as_slice())))
    };
    let ls = linalg::checked_solve(&(e.transpose() * e), &(e.transpose() * u))?;
    let mut best: Option<(f64, DVector<f64>)> = None;
    for start in [ls, DVector::zeros(k)] {
        let mut c = start;
        let mut fc = f(&c);
        let mut step = 1.0;
        let scale = u.amax().max(1e-300);
        let mut converged = false;
        for _ in 0..20_000 {
            let g = grad(&c);
            let gn = g.norm();
            if gn <= 1e-10 || fc <= 1e-15 * scale {
                converged = true;
                break;
            }
            let mut moved = false;
            while step >= 1e-14 {
                let trial = &c - &g * (step / gn) * scale;
                let ft = f(&trial);
                if ft < fc {
                    c = trial;
                    fc = ft;
                    step = (step * 2.0).min(1.0);
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                // No decrease along the gradient at the finest step.
                converged = gn <= 1e-6 * (1.0 + e.norm());
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "descent stalled at |u - Ec| = {fc:.6e} with gradient norm {:.3e}",
                grad(&c).norm()
            )));
        }
        if best.as_ref().is_none_or(|b| fc < b.0) {
            best = Some((fc, c));
        }
    }
    let (_, c) = best.expect("two starts");
    Ok(finish(space, e, u, c, BestMethod::Descent))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(n: usize, i: usize) -> DMatrix<f64> {
        let mut e = DMatrix::zeros(n, 1);
        e[(i, 0)] = 1.0;
        e
    }

    #[test]
    fn inside_subspace() {
        let space = NormedSpace::lp(3, 1.0).unwrap();
        let e = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 2.0]);
        let u = &e * DVector::from_vec(vec![0.5, -1.0]);
        let b = best_approximation_in(&space, &e, &u).unwrap();
        assert!(b.value < 1e-9);
        assert!((b.argmin - u).amax() < 1e-9);
    }

    #[test]
    fn euclidean_example() {
        let space = NormedSpace::lp(2, 2.0).unwrap();
        let b = best_approximation_in(&space, &col(2, 0), &DVector::from_vec(vec![3.0, 4.0])).unwrap();
        assert!((b.value - 4.0).abs() < 1e-12);
        assert!((b.argmin - DVector::from_vec(vec![3.0, 0.0])).amax() < 1e-12);
    }

    #[test]
    fn sup_norm_tie_break() {
        let space = NormedSpace::lp(2, f64::INFINITY).unwrap();
        let u = DVector::from_vec(vec![0.0, 1.0]);
        let b = best_approximation_in(&space, &col(2, 0), &u).unwrap();
        assert_eq!(b.value, 1.0);
        assert_eq!(b.coefficients[0], 0.0);
        // Oracle: scan over t.
        let scan = (-400..=400)
            .map(|k| {
                let t = k as f64 / 100.0;
                space.norm(&[-t, 1.0])
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(scan, b.value);
        // Same answer from the LP path with a non-coordinate copy of e1.
        let e = DMatrix::from_row_slice(2, 1, &[2.0, 1e-300]);
        let b = best_approximation_in(&space, &e, &u).unwrap();
        assert!((b.value - 1.0).abs() < 1e-9 && b.coefficients[0].abs() < 1e-9);
    }

    #[test]
    fn lp_matches_scan_oracle() {
        let e = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, -1.0]);
        let u = DVector::from_vec(vec![1.0, 0.5, 2.0]);
        for p in [1.0, f64::INFINITY] {
            let space = NormedSpace::lp(3, p).unwrap();
            let b = best_approximation_in(&space, &e, &u).unwrap();
            let scan = (-40_000..=40_000)
                .map(|k| space.norm((&u - &e * (k as f64 / 10_000.0)).as_slice()))
                .fold(f64::INFINITY, f64::min);
            assert!(b.value <= scan + 1e-12 && b.value >= scan - 1e-3, "p={p}: {} vs {scan}", b.value);
            assert_eq!(b.method, BestMethod::LinearProgram);
        }
    }

    #[test]
    fn descent_matches_scan_oracle() {
        let e = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, -1.0]);
        let u = DVector::from_vec(vec![1.0, 0.5, 2.0]);
        let space = NormedSpace::lp(3, 3.0).unwrap();
        let b = best_approximation_in(&space, &e, &u).unwrap();
        assert_eq!(b.method, BestMethod::Descent);
        let scan = (-40_000..=40_000)
            .map(|k| space.norm((&u - &e * (k as f64 / 10_000.0)).as_slice()))
            .fold(f64::INFINITY, f64::min);
        assert!(b.value <= scan + 1e-12 && b.value >= scan - 1e-6);
    }

    #[test]
    fn coordinate_closed_forms() {
        let u = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        let e = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 0.0]);
        for (p, expect) in [(1.0, 4.0), (2.0, 10f64.sqrt()), (f64::INFINITY, 3.0)] {
            let b = best_approximation_in(&NormedSpace::lp(3, p).unwrap(), &e, &u).unwrap();
            assert!((b.value - expect).abs() < 1e-12);
        }
        // ℓ∞: |−2 − c| <= 3 admits c = 0.
        let b = best_approximation_in(&NormedSpace::lp(3, f64::INFINITY).unwrap(), &e, &u).unwrap();
        assert_eq!(b.coefficients[0], 0.0);
    }
}
