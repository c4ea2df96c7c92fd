//! Certified maximization of a ratio of planar norms.
//!
//! For a convex, absolutely homogeneous numerator `num` and a norm `den`
//! with known norming functionals, [`maximize_ratio_2d`] brackets
//! `sup_u num(u) / den(u)` from both sides.
//!
//! Lower bound: the best of a uniform angular grid over `[0, π]`, improved by
//! golden-section search in the brackets of the best local maxima.
//!
//! Upper bound: on the cone between two grid directions `u_a`, `u_b`, every
//! direction is a multiple of a chord point `u(s) = (1-s) u_a + s u_b`.
//! Convexity gives `num(u(s)) <= (1-s) num(u_a) + s num(u_b)`, and the
//! norming functionals `g_a`, `g_b` of `den` at the endpoints give
//! `den(u(s)) >= max(<g_a, u(s)>, <g_b, u(s)>)`. The ratio of a linear
//! function to this piecewise-linear minorant peaks at `s = 0`, `s = 1` or
//! the kink, so each cell gets a closed-form bound whose excess over the true
//! maximum is quadratic in the cell width. Cells whose bound exceeds the
//! current lower bound by more than the target gap are bisected, largest
//! bound first, until the gap target or the cell budget is reached.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Knobs of the planar search.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2dConfig {
    /// Grid cells over `[0, π]`.
    pub points: usize,
    /// Local maxima refined by golden-section search.
    pub refine_brackets: usize,
    /// Golden-section iterations per bracket.
    pub golden_iters: usize,
    /// Relative gap between the bounds at which bisection stops.
    pub gap_target: f64,
    /// Maximum number of bisections.
    pub max_splits: usize,
}

impl Default for Grid2dConfig {
    fn default() -> Self {
        Self {
            points: 4096,
            refine_brackets: 8,
            golden_iters: 40,
            gap_target: 1e-9,
            max_splits: 20_000,
        }
    }
}

impl Grid2dConfig {
    /// Smaller grid and looser gap for bulk evaluations.
    pub fn coarse() -> Self {
        Self {
            points: 512,
            refine_brackets: 4,
            golden_iters: 30,
            gap_target: 1e-7,
            max_splits: 2_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ratio2d {
    pub lower: f64,
    pub upper: f64,
    /// Direction attaining `lower`.
    pub theta: f64,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    u: [f64; 2],
    num: f64,
    den: f64,
    g: [f64; 2],
}

impl Node {
    fn ratio(&self) -> f64 {
        self.num / self.den
    }
}

struct Cell {
    bound: f64,
    a: Node,
    b: Node,
    ta: f64,
    tb: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.bound.total_cmp(&other.bound) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound)
    }
}

fn dot(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Upper bound of the ratio over the cone spanned by the two nodes.
fn cell_bound(a: &Node, b: &Node) -> f64 {
    let (ra, rb) = (a.ratio(), b.ratio());
    // Minorants of den along the chord, as affine functions of s.
    let la = (a.den, dot(&a.g, &b.u));
    let lb = (dot(&b.g, &a.u), b.den);
    let mut best = ra.max(rb);
    // Crossing of the two supporting lines.
    let denom = (la.0 - la.1) - (lb.0 - lb.1);
    if denom != 0.0 {
        let s = (la.0 - lb.0) / denom;
        if s > 0.0 && s < 1.0 {
            let n = (1.0 - s) * a.num + s * b.num;
            let d = (1.0 - s) * la.0 + s * la.1;
            if d <= 0.0 {
                return f64::INFINITY;
            }
            best = best.max(n / d);
        }
    }
    // Guard the closed form against rounding.
    best * (1.0 + 8.0 * f64::EPSILON)
}

/// Brackets `sup num(u)/den(u)` over the plane; `den` returns its value and
/// a norming functional.
pub fn maximize_ratio_2d<F, G>(num: F, den: G, cfg: &Grid2dConfig) -> Ratio2d
where
    F: Fn(&[f64; 2]) -> f64,
    G: Fn(&[f64; 2]) -> (f64, [f64; 2]),
{
    let n = cfg.points.max(4);
    let eval = |theta: f64| -> Node {
        let u = [theta.cos(), theta.sin()];
        let (d, g) = den(&u);
        Node { u, num: num(&u), den: d, g }
    };
    let nodes: Vec<Node> = (0..=n).map(|k| eval(PI * k as f64 / n as f64)).collect();
    let thetas: Vec<f64> = (0..=n).map(|k| PI * k as f64 / n as f64).collect();

    let mut lower = f64::NEG_INFINITY;
    let mut theta_best = 0.0;
    for k in 0..n {
        let r = nodes[k].ratio();
        if r > lower {
            lower = r;
            theta_best = thetas[k];
        }
    }

    // Golden-section refinement of the best local maxima (cyclic in k).
    let ratio_at = |k: usize| nodes[k % n].ratio();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&k| {
            let r = ratio_at(k);
            r >= ratio_at(k + n - 1) && r >= ratio_at(k + 1)
        })
        .collect();
    peaks.sort_by(|&a, &b| ratio_at(b).total_cmp(&ratio_at(a)).then(a.cmp(&b)));
    peaks.truncate(cfg.refine_brackets);
    let step = PI / n as f64;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for &k in &peaks {
        let (mut lo, mut hi) = (thetas[k] - step, thetas[k] + step);
        let f = |t: f64| eval(t).ratio();
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..cfg.golden_iters {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = f(x1);
            }
        }
        for (t, v) in [(x1, f1), (x2, f2)] {
            if v > lower {
                lower = v;
                theta_best = t;
            }
        }
    }

    let mut heap: BinaryHeap<Cell> = (0..n)
        .map(|k| Cell {
            bound: cell_bound(&nodes[k], &nodes[k + 1]),
            a: nodes[k],
            b: nodes[k + 1],
            ta: thetas[k],
            tb: thetas[k + 1],
        })
        .collect();
    let mut splits = 0;
    while let Some(top) = heap.peek() {
        if top.bound <= lower * (1.0 + cfg.gap_target) || splits >= cfg.max_splits {
            break;
        }
        let cell = heap.pop().expect("peeked");
        let tm = 0.5 * (cell.ta + cell.tb);
        let mid = eval(tm);
        if mid.ratio() > lower {
            lower = mid.ratio();
            theta_best = tm;
        }
        heap.push(Cell {
            bound: cell_bound(&cell.a, &mid),
            a: cell.a,
            b: mid,
            ta: cell.ta,
            tb: tm,
        });
        heap.push(Cell {
            bound: cell_bound(&mid, &cell.b),
            a: mid,
            b: cell.b,
            ta: tm,
            tb: cell.tb,
        });
        splits += 1;
    }
    let upper = heap.peek().map_or(lower, |c| c.bound).max(lower);
    Ratio2d {
        lower,
        upper,
        theta: theta_best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(u: &[f64; 2], p: f64) -> f64 {
        if p.is_infinite() {
            u[0].abs().max(u[1].abs())
        } else {
            (u[0].abs().powf(p) + u[1].abs().powf(p)).powf(1.0 / p)
        }
    }

    fn euclid(u: &[f64; 2]) -> (f64, [f64; 2]) {
        let n = dot(u, u).sqrt();
        (n, [u[0] / n, u[1] / n])
    }

    #[test]
    fn l1_over_l2_is_sqrt2() {
        let r = maximize_ratio_2d(|u| lp(u, 1.0), euclid, &Grid2dConfig::default());
        assert!((r.lower - 2f64.sqrt()).abs() < 1e-12);
        assert!(r.upper >= r.lower && r.upper - r.lower < 1e-8);
    }

    #[test]
    fn flat_ratio_is_certified_tightly() {
        let r = maximize_ratio_2d(|u| euclid(u).0, euclid, &Grid2dConfig::default());
        assert!((r.lower - 1.0).abs() < 1e-15);
        assert!(r.upper - 1.0 < 1e-6, "upper {}", r.upper);
    }

    #[test]
    fn diagonal_map_on_l3() {
        // |diag(2,1) u|_3 / |u|_3 peaks at the first axis.
        let den = |u: &[f64; 2]| {
            let n = lp(u, 3.0);
            let g = [
                u[0].signum() * (u[0].abs() / n).powi(2),
                u[1].signum() * (u[1].abs() / n).powi(2),
            ];
            (n, g)
        };
        let r = maximize_ratio_2d(|u| lp(&[2.0 * u[0], u[1]], 3.0), den, &Grid2dConfig::default());
        assert!((r.lower - 2.0).abs() < 1e-12);
        assert!(r.upper - 2.0 < 1e-8);
    }
}
