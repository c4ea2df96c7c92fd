//! Banach-Mazur distance from a normed plane to the Euclidean plane.
//!
//! Up to rotation and scale, an isomorphism onto `(ℝ², |·|₂)` is the same as
//! a Euclidean norm `|x|_A = sqrt(xᵀ A x)` with `det A = 1`, and
//!
//! ```text
//! d(N, A) = sup_u N(u)/|u|_A · sup_u |u|_A/N(u)
//!         = sqrt( max_{N(p)=1} pᵀAp / min_{N(p)=1} pᵀAp ).
//! ```
//!
//! The search works on a sampled unit sphere of `N`: a coarse grid over
//! `(phi, t)` and Nelder-Mead refinement minimize the sampled ratio, then the
//! extreme directions of `pᵀAp` are located exactly by golden-section search
//! and added to the sample set (an exchange step), and the minimization is
//! repeated. The final ellipse is evaluated with the certified planar
//! maximizer, so the returned value is an upper bound of the distance.

use std::f64::consts::PI;

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::opnorm::{maximize_ratio_2d, Grid2dConfig};
use crate::spaces::{boundary_point_2d, Norm};

/// Unit-determinant ellipse `A = R(phi) diag(t, 1/t) R(phi)ᵀ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipseParam {
    pub phi: f64,
    pub t: f64,
}

impl EllipseParam {
    pub fn identity() -> Self {
        Self { phi: 0.0, t: 1.0 }
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        let (s, c) = self.phi.sin_cos();
        let r = Matrix2::new(c, -s, s, c);
        r * Matrix2::new(self.t, 0.0, 0.0, 1.0 / self.t) * r.transpose()
    }

    /// Parameters of a symmetric positive-definite matrix after scaling it to
    /// unit determinant.
    pub fn from_matrix(a: &Matrix2<f64>) -> Self {
        let sym = (a + a.transpose()) * 0.5;
        let det = sym.determinant();
        let sym = sym / det.sqrt();
        let eig = SymmetricEigen::new(sym);
        let i = if eig.eigenvalues[0] >= eig.eigenvalues[1] { 0 } else { 1 };
        let v = eig.eigenvectors.column(i);
        let mut phi = v[1].atan2(v[0]);
        if phi < 0.0 {
            phi += PI;
        }
        if phi >= PI {
            phi -= PI;
        }
        Self {
            phi,
            t: eig.eigenvalues[i].max(1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DbmConfig {
    /// Directions sampled on the unit sphere of the plane.
    pub boundary_samples: usize,
    pub grid_phi: usize,
    pub grid_t: usize,
    /// Largest eccentricity parameter of the coarse grid, measured relative to
    /// the covariance-normalized body.
    pub t_max: f64,
    pub nm_max_evals: usize,
    pub exchange_rounds: usize,
    /// Planar maximizer used to certify the final ellipse.
    pub certify: Grid2dConfig,
}

impl Default for DbmConfig {
    fn default() -> Self {
        Self {
            boundary_samples: 4096,
            grid_phi: 64,
            grid_t: 64,
            t_max: 2.0,
            nm_max_evals: 600,
            exchange_rounds: 6,
            certify: Grid2dConfig::default(),
        }
    }
}

impl DbmConfig {
    /// Cheaper settings for bulk evaluations (subspace searches, per-vector
    /// checks). The result is still a certified upper bound.
    pub fn coarse() -> Self {
        Self {
            boundary_samples: 512,
            grid_phi: 16,
            grid_t: 16,
            t_max: 2.0,
            nm_max_evals: 300,
            exchange_rounds: 3,
            certify: Grid2dConfig::coarse(),
        }
    }

    /// Doubles every resolution knob.
    pub fn refined(&self) -> Self {
        let mut c = self.clone();
        c.boundary_samples *= 2;
        c.grid_phi *= 2;
        c.grid_t = 2 * c.grid_t - 1;
        c.certify.points *= 2;
        c
    }
}

/// Result of a distance computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneDistance {
    /// Certified upper bound of `d_BM(N, ℓ2²)`, at least 1.
    pub value: f64,
    /// `d(N, A)` from the lower estimates of the two suprema.
    pub lower_eval: f64,
    pub ellipse: EllipseParam,
}

/// Precomputed quadratic monomials `(p1², 2 p1 p2, p2²)` of sample points.
struct Samples {
    mono: Vec<[f64; 3]>,
}

impl Samples {
    fn push(&mut self, p: [f64; 2]) {
        self.mono.push([p[0] * p[0], 2.0 * p[0] * p[1], p[1] * p[1]]);
    }

    fn ratio(&self, a: &Matrix2<f64>, stride: usize) -> f64 {
        let (qa, qb, qc) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for m in self.mono.iter().step_by(stride) {
            let q = qa * m[0] + qb * m[1] + qc * m[2];
            max = max.max(q);
            min = min.min(q);
        }
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// `exp(S)` for `S = [[al, be], [be, -al]]`, a unit-determinant SPD matrix.
fn exp_traceless(al: f64, be: f64) -> Matrix2<f64> {
    let r = (al * al + be * be).sqrt();
    let (ch, sh) = (r.cosh(), if r > 1e-300 { r.sinh() / r } else { 1.0 });
    Matrix2::new(ch + sh * al, sh * be, sh * be, ch - sh * al)
}

/// Distance of a planar norm to the Euclidean plane.
pub fn plane_distance<N: Norm + ?Sized>(norm: &N, cfg: &DbmConfig) -> Result<PlaneDistance> {
    if norm.dim() != 2 {
        return arg(format!("Banach-Mazur distance needs a plane, got dimension {}", norm.dim()));
    }
    let k = cfg.boundary_samples.max(16);
    let thetas: Vec<f64> = (0..k).map(|i| PI * i as f64 / k as f64).collect();
    let points: Vec<[f64; 2]> = thetas.iter().map(|&t| boundary_point_2d(norm, t)).collect();

    // Normalize by the covariance of the sampled sphere.
    let mut cov = Matrix2::zeros();
    for p in &points {
        let v = Vector2::new(p[0], p[1]);
        cov += v * v.transpose();
    }
    cov /= k as f64;
    let eig = SymmetricEigen::new(cov);
    let mut w = eig.eigenvectors
        * Matrix2::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * eig.eigenvectors.transpose();
    w /= w.determinant().abs().sqrt();
    let to_abs = |rel: &Matrix2<f64>| w.transpose() * rel * w;

    let mut samples = Samples { mono: Vec::with_capacity(k + 64) };
    for p in &points {
        samples.push(*p);
    }

    // Coarse grid over (phi, t) on a subsample.
    let stride = (k / 512).max(1);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for j in 0..cfg.grid_t.max(1) {
        let t = if cfg.grid_t > 1 {
            1.0 + (cfg.t_max - 1.0) * j as f64 / (cfg.grid_t - 1) as f64
        } else {
            1.0
        };
        let phis = if j == 0 { 1 } else { cfg.grid_phi.max(1) };
        for i in 0..phis {
            let phi = PI * i as f64 / cfg.grid_phi.max(1) as f64;
            let r = t.ln();
            let (al, be) = (r * (2.0 * phi).cos(), r * (2.0 * phi).sin());
            let v = samples.ratio(&to_abs(&exp_traceless(al, be)), stride);
            if v < best.0 {
                best = (v, al, be);
            }
        }
    }

    let mut x = [best.1, best.2];
    let mut step = (cfg.t_max.ln() / cfg.grid_t.max(2) as f64).max(1e-3) * 2.0;
    for _ in 0..=cfg.exchange_rounds {
        let f = |z: &[f64; 2]| samples.ratio(&to_abs(&exp_traceless(z[0], z[1])), 1);
        x = nelder_mead(f, x, step, cfg.nm_max_evals);
        step *= 0.1;
        let a = to_abs(&exp_traceless(x[0], x[1]));
        let sampled = samples.ratio(&a, 1);
        let added = exchange_points(norm, &a, &thetas, &mut samples);
        let after = samples.ratio(&a, 1);
        if added == 0 || after <= sampled * (1.0 + 1e-13) {
            break;
        }
    }

    let a = to_abs(&exp_traceless(x[0], x[1]));
    let ellipse = EllipseParam::from_matrix(&a);
    Ok(certify_ellipse(norm, &ellipse, &cfg.certify))
}

/// Certified evaluation of `d(N, A)` for a fixed ellipse.
pub fn certify_ellipse<N: Norm + ?Sized>(norm: &N, ellipse: &EllipseParam, cfg: &Grid2dConfig) -> PlaneDistance {
    let a = ellipse.matrix();
    let qnorm = |u: &[f64; 2]| {
        let au = [a[(0, 0)] * u[0] + a[(0, 1)] * u[1], a[(1, 0)] * u[0] + a[(1, 1)] * u[1]];
        let n = (u[0] * au[0] + u[1] * au[1]).max(0.0).sqrt();
        (n, [au[0] / n, au[1] / n])
    };
    let n_over_a = maximize_ratio_2d(|u| norm.norm(u), qnorm, cfg);
    let a_over_n = maximize_ratio_2d(
        |u| qnorm(u).0,
        |u| {
            let g = norm.subgradient(u);
            (norm.norm(u), [g[0], g[1]])
        },
        cfg,
    );
    PlaneDistance {
        value: (n_over_a.upper * a_over_n.upper).max(1.0),
        lower_eval: n_over_a.lower * a_over_n.lower,
        ellipse: *ellipse,
    }
}

/// Adds the exact extreme directions of `pᵀAp` on the unit sphere of `norm`.
fn exchange_points<N: Norm + ?Sized>(norm: &N, a: &Matrix2<f64>, thetas: &[f64], samples: &mut Samples) -> usize {
    let q = |theta: f64| {
        let p = boundary_point_2d(norm, theta);
        a[(0, 0)] * p[0] * p[0] + 2.0 * a[(0, 1)] * p[0] * p[1] + a[(1, 1)] * p[1] * p[1]
    };
    let n = thetas.len();
    let vals: Vec<f64> = samples.mono[..n]
        .iter()
        .map(|m| a[(0, 0)] * m[0] + a[(0, 1)] * m[1] + a[(1, 1)] * m[2])
        .collect();
    let at = |k: usize| vals[k % n];
    let mut maxima: Vec<usize> = (0..n).filter(|&k| at(k) >= at(k + n - 1) && at(k) >= at(k + 1)).collect();
    let mut minima: Vec<usize> = (0..n).filter(|&k| at(k) <= at(k + n - 1) && at(k) <= at(k + 1)).collect();
    maxima.sort_by(|&x, &y| at(y).total_cmp(&at(x)));
    minima.sort_by(|&x, &y| at(x).total_cmp(&at(y)));
    let step = PI / n as f64;
    let mut added = 0;
    for (list, sign) in [(maxima, 1.0), (minima, -1.0)] {
        for &k in list.iter().take(4) {
            let theta = golden_max(|t| sign * q(t), thetas[k] - step, thetas[k] + step, 50);
            samples.push(boundary_point_2d(norm, theta));
            added += 1;
        }
    }
    added
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        x1
    } else {
        x2
    }
}

/// Nelder-Mead minimization in the plane with one restart from the optimum.
pub(crate) fn nelder_mead(f: impl Fn(&[f64; 2]) -> f64, x0: [f64; 2], step: f64, max_evals: usize) -> [f64; 2] {
    let mut best = x0;
    let mut best_val = f(&x0);
    let mut evals = 1;
    let mut scale = step;
    for _restart in 0..3 {
        let mut simplex = [
            (best, best_val),
            ([best[0] + scale, best[1]], 0.0),
            ([best[0], best[1] + scale], 0.0),
        ];
        for s in simplex.iter_mut().skip(1) {
            s.1 = f(&s.0);
            evals += 1;
        }
        while evals < max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (lo, hi) = (simplex[0].1, simplex[2].1);
            let size = (0..2)
                .map(|d| (simplex[1].0[d] - simplex[0].0[d]).abs().max((simplex[2].0[d] - simplex[0].0[d]).abs()))
                .fold(0.0, f64::max);
            if (hi - lo).abs() <= 1e-15 * lo.abs() && size < 1e-9 || size < 1e-13 {
                break;
            }
            let c = [(simplex[0].0[0] + simplex[1].0[0]) / 2.0, (simplex[0].0[1] + simplex[1].0[1]) / 2.0];
            let w = simplex[2].0;
            let pt = |t: f64| [c[0] + t * (w[0] - c[0]), c[1] + t * (w[1] - c[1])];
            let r = pt(-1.0);
            let fr = f(&r);
            evals += 1;
            if fr < simplex[0].1 {
                let e = pt(-2.0);
                let fe = f(&e);
                evals += 1;
                simplex[2] = if fe < fr { (e, fe) } else { (r, fr) };
            } else if fr < simplex[1].1 {
                simplex[2] = (r, fr);
            } else {
                let (cpt, fc) = if fr < simplex[2].1 {
                    let p = pt(-0.5);
                    (p, f(&p))
                } else {
                    let p = pt(0.5);
                    (p, f(&p))
                };
                evals += 1;
                if fc < simplex[2].1.min(fr) {
                    simplex[2] = (cpt, fc);
                } else {
                    let b = simplex[0].0;
                    for s in simplex.iter_mut().skip(1) {
                        s.0 = [b[0] + 0.5 * (s.0[0] - b[0]), b[1] + 0.5 * (s.0[1] - b[1])];
                        s.1 = f(&s.0);
                        evals += 1;
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improved = simplex[0].1 < best_val;
        if simplex[0].1 <= best_val {
            best = simplex[0].0;
            best_val = simplex[0].1;
        }
        if !improved || evals >= max_evals {
            break;
        }
        scale *= 0.25;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::NormedSpace;
    use nalgebra::DMatrix;

    #[test]
    fn ellipse_roundtrip() {
        let e = EllipseParam { phi: 0.7, t: 1.6 };
        let back = EllipseParam::from_matrix(&(e.matrix() * 3.0));
        assert!((back.phi - e.phi).abs() < 1e-12 && (back.t - e.t).abs() < 1e-12);
        assert!((e.matrix().determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn euclidean_plane_is_at_distance_one() {
        let d = plane_distance(&NormedSpace::lp(2, 2.0).unwrap(), &DbmConfig::default()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-6, "{}", d.value);
    }

    #[test]
    fn skewed_quadratic_plane_is_at_distance_one() {
        let g = DMatrix::from_row_slice(2, 2, &[25.0, 4.0, 4.0, 1.0]);
        let d = plane_distance(&NormedSpace::quadratic(g).unwrap(), &DbmConfig::default()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-6, "{}", d.value);
    }

    #[test]
    fn square_and_diamond() {
        for p in [1.0, f64::INFINITY] {
            let d = plane_distance(&NormedSpace::lp(2, p).unwrap(), &DbmConfig::default()).unwrap();
            assert!((d.value - 2f64.sqrt()).abs() < 1e-6, "p={p}: {}", d.value);
        }
    }

    #[test]
    fn rejects_non_planes() {
        assert!(plane_distance(&NormedSpace::lp(3, 2.0).unwrap(), &DbmConfig::default()).is_err());
    }
}
