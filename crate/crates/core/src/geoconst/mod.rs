//! Banach-Mazur distance of planes to the Euclidean plane, and estimates of
//! the Banach-Mazur constant
//!
//! ```text
//! C_BM(X) = sup { d_BM(V, ℓ2²)² : V ⊂ X, dim V = 2 }
//! ```
//!
//! and of the von Neumann-Jordan constant
//!
//! ```text
//! C_NJ(X) = sup { (|x+y|² + |x-y|²) / (2(|x|² + |y|²)) : (x, y) ≠ 0 }.
//! ```
//!
//! Both suprema are estimated from below by seeded searches; the distance of
//! a single plane is an upper bound that tightens under refinement.

mod dbm;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dbm::{certify_ellipse, plane_distance, DbmConfig, EllipseParam, PlaneDistance};

use crate::error::{arg, Result};
use crate::linalg;
use crate::rng;
use crate::spaces::{boundary_point_2d, Norm, NormKind, NormedSpace, TwoDimSubspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constant {
    /// `d_BM(V, ℓ2²)` of a plane.
    Dbm,
    Cbm,
    Cnj,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Optimal ellipse of the plane itself.
    Ellipse(EllipseParam),
    /// Plane `span{b1, b2}` of the ambient space and its optimal ellipse in
    /// the coordinates of that basis.
    Plane { b1: Vec<f64>, b2: Vec<f64>, ellipse: EllipseParam },
    Pair { x: Vec<f64>, y: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub constant: Constant,
    pub value: f64,
    pub witness: Witness,
    pub starts: usize,
    pub seed: u64,
}

impl ConstantEstimate {
    /// Recomputes the value from the witness alone.
    pub fn reevaluate(&self, space: &NormedSpace, cfg: &DbmConfig) -> Result<f64> {
        match (&self.witness, self.constant) {
            (Witness::Ellipse(e), Constant::Dbm) => Ok(certify_ellipse(space, e, &cfg.certify).value),
            (Witness::Plane { b1, b2, ellipse }, Constant::Cbm) => {
                let plane = TwoDimSubspace::new(
                    space.clone(),
                    DVector::from_column_slice(b1),
                    DVector::from_column_slice(b2),
                )?;
                Ok(certify_ellipse(&plane, ellipse, &cfg.certify).value.powi(2).clamp(1.0, 2.0))
            }
            (Witness::Pair { x, y }, Constant::Cnj) => nj_ratio(space, x, y),
            _ => arg("witness does not match the constant"),
        }
    }
}

/// `d_BM(V, ℓ2²)` with default settings.
pub fn dbm_to_euclidean<N: Norm + ?Sized>(plane: &N) -> Result<ConstantEstimate> {
    dbm_to_euclidean_with(plane, &DbmConfig::default())
}

pub fn dbm_to_euclidean_with<N: Norm + ?Sized>(plane: &N, cfg: &DbmConfig) -> Result<ConstantEstimate> {
    let d = plane_distance(plane, cfg)?;
    Ok(ConstantEstimate {
        constant: Constant::Dbm,
        value: d.value,
        witness: Witness::Ellipse(d.ellipse),
        starts: 1,
        seed: 0,
    })
}

/// `(|x+y|² + |x-y|²) / (2(|x|² + |y|²))`.
pub fn nj_ratio<N: Norm + ?Sized>(space: &N, x: &[f64], y: &[f64]) -> Result<f64> {
    let n = space.dim();
    if x.len() != n || y.len() != n {
        return arg(format!("vectors of length {} and {} in dimension {n}", x.len(), y.len()));
    }
    if !linalg::is_finite_slice(x) || !linalg::is_finite_slice(y) {
        return arg("vectors must be finite");
    }
    let (nx, ny) = (space.norm(x), space.norm(y));
    if nx == 0.0 && ny == 0.0 {
        return arg("x and y are both zero");
    }
    Ok(nj_parts(space, x, y).0)
}

/// Ratio and its gradient in `(x, y)`.
fn nj_parts<N: Norm + ?Sized>(space: &N, x: &[f64], y: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let s: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let (ns, nd, nx, ny) = (space.norm(&s), space.norm(&d), space.norm(x), space.norm(y));
    let den = 2.0 * (nx * nx + ny * ny);
    let r = (ns * ns + nd * nd) / den;
    let (gs, gd, gx, gy) = (
        space.subgradient(&s),
        space.subgradient(&d),
        space.subgradient(x),
        space.subgradient(y),
    );
    let n = x.len();
    let mut dx = vec![0.0; n];
    let mut dy = vec![0.0; n];
    for i in 0..n {
        let a = 2.0 * ns * gs[i];
        let b = 2.0 * nd * gd[i];
        dx[i] = (a + b - r * 4.0 * nx * gx[i]) / den;
        dy[i] = (a - b - r * 4.0 * ny * gy[i]) / den;
    }
    (r, dx, dy)
}

/// Search settings for [`cnj_estimate_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct CnjConfig {
    /// Angles per axis of the pair grid on planes.
    pub grid: usize,
    pub ascent_iters: usize,
}

impl Default for CnjConfig {
    fn default() -> Self {
        Self {
            grid: 256,
            ascent_iters: 200,
        }
    }
}

pub fn cnj_estimate(space: &NormedSpace, starts: usize, seed: u64) -> Result<ConstantEstimate> {
    cnj_estimate_with(space, starts, seed, &CnjConfig::default())
}

/// Lower estimate of `C_NJ` from structured and random starting pairs, each
/// improved by normalized ascent along norming functionals.
pub fn cnj_estimate_with(space: &NormedSpace, starts: usize, seed: u64, cfg: &CnjConfig) -> Result<ConstantEstimate> {
    if starts == 0 {
        return arg("starts must be at least 1");
    }
    let n = space.dim();
    if n == 0 {
        return arg("space has dimension 0");
    }
    let mut cands: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();

    if n == 2 && cfg.grid > 0 {
        let m = cfg.grid;
        let pts: Vec<[f64; 2]> = (0..m)
            .map(|k| boundary_point_2d(space, 2.0 * std::f64::consts::PI * k as f64 / m as f64))
            .collect();
        let mut scored: Vec<(f64, usize, usize)> = (0..m)
            .into_par_iter()
            .flat_map_iter(|i| {
                let pts = &pts;
                (0..m).map(move |j| {
                    let (x, y) = (pts[i], pts[j]);
                    let s = space.norm(&[x[0] + y[0], x[1] + y[1]]);
                    let d = space.norm(&[x[0] - y[0], x[1] - y[1]]);
                    ((s * s + d * d) / 4.0, i, j)
                })
            })
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        for &(_, i, j) in scored.iter().take(4) {
            cands.push((pts[i].to_vec(), pts[j].to_vec()));
        }
    }

    let unit = |i: usize| {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    };
    let pairs_limit = 8.min(n);
    for i in 0..pairs_limit {
        for j in (i + 1)..pairs_limit {
            let (ei, ej) = (unit(i), unit(j));
            let sum: Vec<f64> = ei.iter().zip(&ej).map(|(a, b)| a + b).collect();
            let diff: Vec<f64> = ei.iter().zip(&ej).map(|(a, b)| a - b).collect();
            cands.push((ei, ej));
            cands.push((sum, diff));
        }
    }
    if let NormKind::Polytope(poly) = space.kind() {
        let v = poly.vertices();
        let k = v.len().min(12);
        for i in 0..k {
            for j in (i + 1)..k {
                cands.push((v[i].clone(), v[j].clone()));
            }
        }
    }
    for k in 0..starts {
        let s = space.sample_unit_sphere(2, rng::derive_seed(seed, k as u64))?;
        cands.push((s[0].as_slice().to_vec(), s[1].as_slice().to_vec()));
    }

    let mut results: Vec<(f64, Vec<f64>, Vec<f64>)> = cands
        .par_iter()
        .map(|(x, y)| ascend_nj(space, x.clone(), y.clone(), cfg.ascent_iters))
        .collect();
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.0 > results[best].0 {
            best = i;
        }
    }
    let (_, x, y) = results.swap_remove(best);
    let value = nj_ratio(space, &x, &y)?;
    Ok(ConstantEstimate {
        constant: Constant::Cnj,
        value,
        witness: Witness::Pair { x, y },
        starts,
        seed,
    })
}

fn ascend_nj(space: &NormedSpace, mut x: Vec<f64>, mut y: Vec<f64>, iters: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let normalize = |x: &mut Vec<f64>, y: &mut Vec<f64>| {
        let (a, b) = (space.norm(x), space.norm(y));
        let s = (a * a + b * b).sqrt();
        if s > 0.0 {
            x.iter_mut().chain(y.iter_mut()).for_each(|v| *v /= s);
        }
    };
    normalize(&mut x, &mut y);
    if space.norm(&x) == 0.0 && space.norm(&y) == 0.0 {
        return (f64::NEG_INFINITY, x, y);
    }
    let (mut r, mut dx, mut dy) = nj_parts(space, &x, &y);
    let mut step = 0.5;
    for _ in 0..iters {
        let g2: f64 = dx.iter().chain(&dy).map(|v| v * v).sum();
        if g2 < 1e-28 {
            break;
        }
        let mut moved = false;
        while step > 1e-12 {
            let mut nx: Vec<f64> = x.iter().zip(&dx).map(|(a, g)| a + step * g).collect();
            let mut ny: Vec<f64> = y.iter().zip(&dy).map(|(a, g)| a + step * g).collect();
            normalize(&mut nx, &mut ny);
            let (nr, ndx, ndy) = nj_parts(space, &nx, &ny);
            if nr > r {
                let gain = nr - r;
                x = nx;
                y = ny;
                r = nr;
                dx = ndx;
                dy = ndy;
                step = (step * 2.0).min(4.0);
                moved = gain > 1e-15 * r;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (r, x, y)
}

/// Search settings for [`cbm_estimate_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct CbmConfig {
    /// Distance settings while comparing candidate planes.
    pub search: DbmConfig,
    /// Distance settings for the reported plane.
    pub finalize: DbmConfig,
    pub perturb_steps: usize,
    /// Also try every coordinate plane (up to dimension 8).
    pub coordinate_planes: bool,
}

impl Default for CbmConfig {
    fn default() -> Self {
        Self {
            search: DbmConfig::coarse(),
            finalize: DbmConfig::default(),
            perturb_steps: 40,
            coordinate_planes: true,
        }
    }
}

pub fn cbm_estimate(space: &NormedSpace, starts: usize, seed: u64) -> Result<ConstantEstimate> {
    cbm_estimate_with(space, starts, seed, &CbmConfig::default())
}

/// Lower estimate of `C_BM`: the largest squared distance over sampled
/// planes, improved by random perturbation of the best plane.
pub fn cbm_estimate_with(space: &NormedSpace, starts: usize, seed: u64, cfg: &CbmConfig) -> Result<ConstantEstimate> {
    let n = space.dim();
    if n < 2 {
        return arg(format!("C_BM needs dimension at least 2, got {n}"));
    }
    if starts == 0 {
        return arg("starts must be at least 1");
    }
    if n == 2 {
        let d = plane_distance(space, &cfg.finalize)?;
        return Ok(ConstantEstimate {
            constant: Constant::Cbm,
            value: (d.value * d.value).clamp(1.0, 2.0),
            witness: Witness::Plane {
                b1: vec![1.0, 0.0],
                b2: vec![0.0, 1.0],
                ellipse: d.ellipse,
            },
            starts,
            seed,
        });
    }

    let mut frames: Vec<DMatrix<f64>> = Vec::new();
    if cfg.coordinate_planes {
        let m = n.min(8);
        for i in 0..m {
            for j in (i + 1)..m {
                let mut f = DMatrix::zeros(n, 2);
                f[(i, 0)] = 1.0;
                f[(j, 1)] = 1.0;
                frames.push(f);
            }
        }
    }
    for k in 0..starts {
        let mut r = rng::substream(seed, k as u64);
        loop {
            if let Some(q) = linalg::orthonormalize(&rng::gaussian_matrix(&mut r, n, 2)) {
                frames.push(q);
                break;
            }
        }
    }

    let score = |f: &DMatrix<f64>| -> Result<f64> {
        let plane = TwoDimSubspace::new(space.clone(), f.column(0).into_owned(), f.column(1).into_owned())?;
        Ok(plane_distance(&plane, &cfg.search)?.value.powi(2))
    };
    let scores: Vec<f64> = frames.par_iter().map(&score).collect::<Result<_>>()?;
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    let mut frame = frames.swap_remove(best);
    let mut value = scores[best];

    let mut sigma = 0.3;
    for it in 0..cfg.perturb_steps {
        let mut r = rng::substream(seed, 1_000_000 + it as u64);
        let trial = &frame + rng::gaussian_matrix(&mut r, n, 2) * sigma;
        let Some(trial) = linalg::orthonormalize(&trial) else {
            continue;
        };
        let v = score(&trial)?;
        if v > value {
            value = v;
            frame = trial;
        } else {
            sigma = (sigma * 0.8).max(1e-3);
        }
    }

    let plane = TwoDimSubspace::new(space.clone(), frame.column(0).into_owned(), frame.column(1).into_owned())?;
    let d = plane_distance(&plane, &cfg.finalize)?;
    Ok(ConstantEstimate {
        constant: Constant::Cbm,
        value: (d.value * d.value).clamp(1.0, 2.0),
        witness: Witness::Plane {
            b1: frame.column(0).iter().copied().collect(),
            b2: frame.column(1).iter().copied().collect(),
            ellipse: d.ellipse,
        },
        starts,
        seed,
    })
}
