//! Linear finite elements for `-ε u'' + β u' = 1` on `(0, 1)` with
//! homogeneous Dirichlet conditions.
//!
//! Trial functions are the interior hats `φ_i` of a uniform mesh with `N`
//! elements. Test functions are either the same hats (`galerkin`) or the
//! upwinded functions `ψ_i = φ_i + α F_i` (`petrov_shifted`), where `F_i` is
//! the quadratic bubble `3ξ(1-ξ)` on the element left of node `i` and its
//! negative on the element to the right, and
//! `α = sign(β) (coth Pe - 1/Pe)` with `Pe = |β| h / (2ε)`. All integrals are
//! exact:
//!
//! ```text
//! a(φ_j, φ_i):  ε/h [-1, 2, -1] + β/2 [-1, 0, 1]
//! extra for ψ:  αβ/2 [-1, 2, -1]
//! ∫ ψ_i = h,    ∫ ψ_i' ψ_j' = (1 + 3α²)/h [-1, 2, -1]
//! ```

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{PgProblem, Selector};
use crate::error::{arg, Result};
use crate::spaces::NormedSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FemVariant {
    Galerkin,
    PetrovShifted,
}

/// Upwind weight of the shifted test functions.
pub fn upwind_alpha(elements: usize, epsilon: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        return 0.0;
    }
    let h = 1.0 / elements as f64;
    let pe = beta.abs() * h / (2.0 * epsilon);
    let v = if pe < 1e-4 {
        // coth x - 1/x = x/3 - x³/45 + ...
        pe / 3.0 - pe.powi(3) / 45.0
    } else {
        1.0 / pe.tanh() - 1.0 / pe
    };
    beta.signum() * v
}

fn tridiagonal(n: usize, lower: f64, diag: f64, upper: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag
        } else if j + 1 == i {
            lower
        } else if i + 1 == j {
            upper
        } else {
            0.0
        }
    })
}

/// Coarse hats of a mesh with `elements / coarsen` elements, as columns of
/// fine nodal values.
pub fn prolongation(elements: usize, coarsen: usize) -> DMatrix<f64> {
    let n = elements - 1;
    let nc = elements / coarsen - 1;
    DMatrix::from_fn(n, nc, |i, j| {
        let node = (i + 1) as f64;
        let center = ((j + 1) * coarsen) as f64;
        (1.0 - (node - center).abs() / coarsen as f64).max(0.0)
    })
}

/// Assembles the model problem with `coarsen`-times coarser nested
/// subspaces `X_h`, `Y_h`.
pub fn assemble_fem_1d(
    elements: usize,
    epsilon: f64,
    beta: f64,
    variant: FemVariant,
    coarsen: usize,
) -> Result<PgProblem> {
    if elements < 2 {
        return arg(format!("need at least 2 elements, got {elements}"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return arg(format!("epsilon must be positive, got {epsilon}"));
    }
    if !beta.is_finite() {
        return arg("beta must be finite");
    }
    if coarsen < 2 || !elements.is_multiple_of(coarsen) {
        return arg(format!(
            "coarsening factor {coarsen} must be at least 2 and divide {elements}"
        ));
    }
    let n = elements - 1;
    let h = 1.0 / elements as f64;
    let alpha = match variant {
        FemVariant::Galerkin => 0.0,
        FemVariant::PetrovShifted => upwind_alpha(elements, epsilon, beta),
    };
    let d = epsilon / h;
    let a = tridiagonal(
        n,
        -d - beta / 2.0 - alpha * beta / 2.0,
        2.0 * d + alpha * beta,
        -d + beta / 2.0 - alpha * beta / 2.0,
    );
    let f = DVector::from_element(n, h);
    let gx = tridiagonal(n, -1.0 / h, 2.0 / h, -1.0 / h);
    let gy = &gx * (1.0 + 3.0 * alpha * alpha);
    let e = prolongation(elements, coarsen);
    let label = format!(
        "fem1d(N={elements}, eps={epsilon}, beta={beta}, {}, k={coarsen})",
        match variant {
            FemVariant::Galerkin => "galerkin",
            FemVariant::PetrovShifted => "petrov_shifted",
        }
    );
    PgProblem::new(
        a,
        NormedSpace::quadratic(gx)?,
        NormedSpace::quadratic(gy)?,
        f,
        Selector::Inclusion(e.clone()),
        Selector::Inclusion(e),
        label,
    )
}
