//! Centrally symmetric polytopes used as unit balls.
//!
//! A polytope is stored both as a point set (its vertices) and as a facet
//! list `{a_k}` with `a_k · z <= 1` on the body. The gauge of the body is
//! `max_k a_k · x`, and the facet normals are the vertices of the polar body,
//! so dualizing swaps the two lists.
//!
//! Planar polytopes keep their hull in counter-clockwise order and evaluate
//! the gauge by locating the angular sector of `x`, which is exact and costs a
//! binary search.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

const SYMMETRY_TOL: f64 = 1e-9;
const FACET_TOL: f64 = 1e-9;
/// Upper limit on the number of point subsets tried during facet enumeration.
const MAX_SUBSETS: u64 = 5_000_000;
pub const MAX_FACET_DIM: usize = 6;

#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Vec<f64>>,
    planar: Option<Planar>,
}

/// Counter-clockwise hull of a symmetric polygon with per-edge normals.
#[derive(Clone, Debug)]
struct Planar {
    /// Polar angle of each hull vertex, increasing in `[-pi, pi)`.
    angles: Vec<f64>,
    /// `normals[k]` is the facet of the edge from vertex `k` to vertex `k + 1`.
    normals: Vec<[f64; 2]>,
}

impl Polytope {
    /// Builds the polytope spanned by `points`. Interior points and duplicates
    /// are allowed; the set must be centrally symmetric and span the space.
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("polytope dimension must be positive".into()));
        }
        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dim {
                return Err(Error::Argument(format!(
                    "polytope vertex has length {}, expected {dim}",
                    p.len()
                )));
            }
            if !p.iter().all(|v| v.is_finite()) {
                return Err(Error::Argument("polytope vertex has non-finite entries".into()));
            }
            pts.push(p.clone());
        }
        let scale = pts
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return Err(Error::Geometry("polytope has no nonzero vertex".into()));
        }
        pts.retain(|p| p.iter().any(|v| v.abs() > 1e-14 * scale));
        check_symmetric(&pts, scale)?;
        let mat = DMatrix::from_fn(dim, pts.len(), |i, j| pts[j][i]);
        if crate::linalg::rank(&mat, 1e-10) < dim {
            return Err(Error::Geometry("polytope vertices do not span the space".into()));
        }
        match dim {
            1 => {
                let r = pts.iter().map(|p| p[0].abs()).fold(0.0, f64::max);
                Ok(Self {
                    dim,
                    vertices: vec![vec![r], vec![-r]],
                    facets: vec![vec![1.0 / r], vec![-1.0 / r]],
                    planar: None,
                })
            }
            2 => Self::planar(&pts),
            _ => Self::general(dim, pts),
        }
    }

    fn planar(pts: &[Vec<f64>]) -> Result<Self> {
        let ring = convex_hull_2d(pts);
        if ring.len() < 4 {
            return Err(Error::Geometry("degenerate polygon".into()));
        }
        // Rotate so that angles are increasing from the smallest one.
        let mut with_angle: Vec<([f64; 2], f64)> =
            ring.iter().map(|v| (*v, v[1].atan2(v[0]))).collect();
        with_angle.sort_by(|a, b| a.1.total_cmp(&b.1));
        let n = with_angle.len();
        let mut normals = Vec::with_capacity(n);
        for k in 0..n {
            let a = with_angle[k].0;
            let b = with_angle[(k + 1) % n].0;
            let det = a[0] * b[1] - a[1] * b[0];
            if det <= 0.0 {
                return Err(Error::Geometry("origin is not interior to the polygon".into()));
            }
            // Solve [a; b] · normal = (1, 1).
            normals.push([(b[1] - a[1]) / det, (a[0] - b[0]) / det]);
        }
        Ok(Self {
            dim: 2,
            vertices: with_angle.iter().map(|(v, _)| v.to_vec()).collect(),
            facets: normals.iter().map(|v| v.to_vec()).collect(),
            planar: Some(Planar {
                angles: with_angle.iter().map(|(_, a)| *a).collect(),
                normals,
            }),
        })
    }

    fn general(dim: usize, pts: Vec<Vec<f64>>) -> Result<Self> {
        if dim > MAX_FACET_DIM {
            return Err(Error::Geometry(format!(
                "facet enumeration supports dimension <= {MAX_FACET_DIM}, got {dim}"
            )));
        }
        let m = pts.len();
        if binomial(m as u64, dim as u64) > MAX_SUBSETS {
            return Err(Error::Geometry(format!(
                "too many vertices ({m}) for facet enumeration in dimension {dim}"
            )));
        }
        let mut facets: Vec<Vec<f64>> = Vec::new();
        let mut subset: Vec<usize> = (0..dim).collect();
        loop {
            let mat = DMatrix::from_fn(dim, dim, |i, j| pts[subset[i]][j]);
            if let Some(a) = mat.clone().lu().solve(&DVector::from_element(dim, 1.0)) {
                let ok = a.iter().all(|v| v.is_finite())
                    && (&mat * &a).iter().all(|v| (v - 1.0).abs() < 1e-9)
                    && pts.iter().all(|p| dot(&a, p) <= 1.0 + FACET_TOL);
                if ok {
                    let a: Vec<f64> = a.iter().copied().collect();
                    if !facets.iter().any(|f| close(f, &a)) {
                        facets.push(a);
                    }
                }
            }
            if !next_subset(&mut subset, m) {
                break;
            }
        }
        if facets.len() < 2 * dim {
            return Err(Error::Geometry("facet enumeration found too few facets".into()));
        }
        // Keep only extreme points: those touching facets of full rank.
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        for p in &pts {
            let active: Vec<&Vec<f64>> = facets
                .iter()
                .filter(|a| (dot_slice(a, p) - 1.0).abs() < 1e-8)
                .collect();
            if active.len() < dim {
                continue;
            }
            let act = DMatrix::from_fn(active.len(), dim, |i, j| active[i][j]);
            if crate::linalg::rank(&act, 1e-9) == dim && !vertices.iter().any(|v| close(v, p)) {
                vertices.push(p.clone());
            }
        }
        Ok(Self {
            dim,
            vertices,
            facets,
            planar: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extreme points of the body.
    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Facet normals `a_k`, normalized so that `a_k · z <= 1` on the body.
    pub fn facets(&self) -> &[Vec<f64>] {
        &self.facets
    }

    /// The polar body, whose gauge is the support function of `self`.
    pub fn polar(&self) -> Self {
        if self.dim == 2 {
            // Recompute the ring so sector data stays consistent.
            return Self::planar(&self.facets).expect("polar of a valid polygon is valid");
        }
        Self {
            dim: self.dim,
            vertices: self.facets.clone(),
            facets: self.vertices.clone(),
            planar: None,
        }
    }

    /// Index of the facet active at `x`.
    fn active_facet(&self, x: &[f64]) -> usize {
        if let Some(planar) = &self.planar {
            let theta = x[1].atan2(x[0]);
            let n = planar.angles.len();
            // Largest k with angles[k] <= theta, cyclically.
            let k = planar.angles.partition_point(|&a| a <= theta);
            if k == 0 {
                n - 1
            } else {
                k - 1
            }
        } else {
            let mut best = 0;
            let mut best_val = f64::NEG_INFINITY;
            for (k, a) in self.facets.iter().enumerate() {
                let v = dot_slice(a, x);
                if v > best_val {
                    best_val = v;
                    best = k;
                }
            }
            best
        }
    }

    pub fn gauge(&self, x: &[f64]) -> f64 {
        if let Some(planar) = &self.planar {
            let a = planar.normals[self.active_facet(x)];
            // Sector lookup is exact up to rounding; guard against the
            // sign of a zero vector.
            (a[0] * x[0] + a[1] * x[1]).max(0.0)
        } else {
            self.facets
                .iter()
                .map(|a| dot_slice(a, x))
                .fold(0.0, f64::max)
        }
    }

    pub fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        if x.iter().all(|&v| v == 0.0) {
            return vec![0.0; self.dim];
        }
        self.facets[self.active_facet(x)].clone()
    }
}

fn check_symmetric(pts: &[Vec<f64>], scale: f64) -> Result<()> {
    for p in pts {
        let found = pts.iter().any(|q| {
            p.iter()
                .zip(q)
                .all(|(a, b)| (a + b).abs() <= SYMMETRY_TOL * scale)
        });
        if !found {
            return Err(Error::Geometry(format!(
                "vertex set is not centrally symmetric: missing the negative of {p:?}"
            )));
        }
    }
    Ok(())
}

/// Andrew's monotone chain; returns the hull counter-clockwise without
/// collinear points.
fn convex_hull_2d(pts: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let mut p: Vec<[f64; 2]> = pts.iter().map(|v| [v[0], v[1]]).collect();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
    if p.len() < 3 {
        return p;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let scale = p.iter().fold(0.0_f64, |m, v| m.max(v[0].abs()).max(v[1].abs()));
    let eps = 1e-12 * scale * scale;
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * p.len());
    for &pt in &p {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= eps {
            hull.pop();
        }
        hull.push(pt);
    }
    let lower = hull.len() + 1;
    for &pt in p.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= eps {
            hull.pop();
        }
        hull.push(pt);
    }
    hull.pop();
    hull
}

fn next_subset(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn dot(a: &DVector<f64>, p: &[f64]) -> f64 {
    a.iter().zip(p).map(|(x, y)| x * y).sum()
}

fn dot_slice(a: &[f64], p: &[f64]) -> f64 {
    a.iter().zip(p).map(|(x, y)| x * y).sum()
}

fn close(a: &[f64], b: &[f64]) -> bool {
    let scale = a.iter().chain(b).fold(1.0_f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cross_polytope(dim: usize) -> Vec<Vec<f64>> {
        let mut pts = Vec::new();
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            pts.push(e.clone());
            e[i] = -1.0;
            pts.push(e);
        }
        pts
    }

    #[test]
    fn diamond_gauge_is_l1() {
        let p = Polytope::new(2, &cross_polytope(2)).unwrap();
        assert!((p.gauge(&[3.0, -4.0]) - 7.0).abs() < 1e-12);
        assert_eq!(p.facets().len(), 4);
    }

    #[test]
    fn interior_points_are_dropped() {
        let mut pts = cross_polytope(2);
        pts.push(vec![0.1, 0.2]);
        pts.push(vec![-0.1, -0.2]);
        let p = Polytope::new(2, &pts).unwrap();
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn octahedron_facets_and_polar() {
        let p = Polytope::new(3, &cross_polytope(3)).unwrap();
        assert_eq!(p.facets().len(), 8);
        assert!((p.gauge(&[1.0, -2.0, 0.5]) - 3.5).abs() < 1e-12);
        let q = p.polar();
        // Polar of the cross-polytope is the cube.
        assert!((q.gauge(&[1.0, -2.0, 0.5]) - 2.0).abs() < 1e-12);
        assert_eq!(q.vertices().len(), 8);
    }

    #[test]
    fn rejects_asymmetric_and_flat_sets() {
        assert!(Polytope::new(2, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]]).is_err());
        assert!(Polytope::new(2, &[vec![1.0, 1.0], vec![-1.0, -1.0]]).is_err());
    }

    #[test]
    fn planar_gauge_matches_facet_max() {
        let pts = vec![
            vec![2.0, 0.3],
            vec![-2.0, -0.3],
            vec![0.5, 1.5],
            vec![-0.5, -1.5],
            vec![-1.0, 1.0],
            vec![1.0, -1.0],
        ];
        let p = Polytope::new(2, &pts).unwrap();
        for k in 0..360 {
            let t = (k as f64).to_radians();
            let x = [3.0 * t.cos(), 3.0 * t.sin()];
            let brute = p.facets().iter().map(|a| dot_slice(a, &x)).fold(0.0, f64::max);
            assert!((p.gauge(&x) - brute).abs() < 1e-12, "angle {k}");
        }
    }
}
