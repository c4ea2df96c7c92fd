//! The acceptance battery: seven numerical criteria over a fixed catalog of
//! spaces and problems, all driven by one seed.
//!
//! Every random draw comes from a stream derived from the suite seed and an
//! item index, and parallel loops collect in index order, so a report
//! depends only on its [`SuiteConfig`].

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geoconst::{cbm_estimate, cnj_estimate, nj_ratio, plane_distance, DbmConfig};
use crate::opnorm::OpNormConfig;
use crate::pglab::{assemble_fem_1d, random_problem, verify_bounds, FemVariant, PgProblem, VerifyConfig};
use crate::projlab::{audit_projection, projection_norms, random_projection, AuditConfig};
use crate::rng;
use crate::spaces::{boundary_point_2d, NormedSpace, TwoDimSubspace};

pub const SCHEMA: &str = "1";

/// Violations kept per criterion; the count is always complete.
const MAX_LISTED: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Starts of the constant estimators.
    pub starts: usize,
    /// Random vectors per projection audit.
    pub samples: usize,
    pub tol: f64,
    pub pairs: usize,
    pub projections: usize,
    pub random_problems: usize,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            starts: 8,
            samples: 8,
            tol: 1e-6,
            pairs: 10_000,
            projections: 200,
            random_problems: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub checked: usize,
    pub violation_count: usize,
    pub violations: Vec<String>,
    pub summary: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub config: SuiteConfig,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

pub const CRITERIA: [(u8, &str); 7] = [
    (1, "Hilbert constants"),
    (2, "constants in [1, 2] and John bound"),
    (3, "per-pair chain"),
    (4, "derived plane distances"),
    (5, "projection bound"),
    (6, "Hilbert projection identity"),
    (7, "Petrov-Galerkin chain"),
];

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let criteria = CRITERIA
        .iter()
        .map(|&(id, _)| run_criterion(id, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport {
        schema: SCHEMA.into(),
        config: cfg.clone(),
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    })
}

pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> Result<CriterionReport> {
    let Some(&(_, title)) = CRITERIA.iter().find(|c| c.0 == id) else {
        return Err(Error::Argument(format!("no criterion {id}")));
    };
    let seed = rng::derive_seed(cfg.seed, id as u64);
    let mut tally = match id {
        1 => hilbert_constants(cfg, seed)?,
        2 => range_bounds(cfg, seed)?,
        3 => pair_chain(cfg, seed)?,
        4 => plane_values(cfg, seed)?,
        5 => projection_bound(cfg, seed)?,
        6 => hilbert_projections(cfg, seed)?,
        _ => pg_chain(cfg, seed)?,
    };
    let violation_count = tally.violations.len();
    tally.violations.truncate(MAX_LISTED);
    Ok(CriterionReport {
        id,
        title: title.into(),
        passed: violation_count == 0,
        checked: tally.checked,
        violation_count,
        violations: tally.violations,
        summary: tally.summary,
    })
}

#[derive(Default)]
struct Tally {
    checked: usize,
    violations: Vec<String>,
    summary: BTreeMap<String, f64>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(msg());
        }
    }

    fn max(&mut self, key: &str, v: f64) {
        let e = self.summary.entry(key.into()).or_insert(f64::NEG_INFINITY);
        *e = e.max(v);
    }

    fn min(&mut self, key: &str, v: f64) {
        let e = self.summary.entry(key.into()).or_insert(f64::INFINITY);
        *e = e.min(v);
    }

    fn set(&mut self, key: &str, v: f64) {
        self.summary.insert(key.into(), v);
    }
}

pub const CATALOG_P: [f64; 6] = [1.0, 1.5, 2.0, 3.0, 4.0, f64::INFINITY];

/// `ℓp` for every catalog `p` in dimensions 2 to 4, then 20 random
/// symmetric polygons.
pub fn catalog(seed: u64) -> Result<Vec<NormedSpace>> {
    let mut out = Vec::new();
    for n in 2..=4 {
        for p in CATALOG_P {
            out.push(NormedSpace::lp(n, p)?);
        }
    }
    for k in 0..20 {
        out.push(random_polygon(rng::derive_seed(seed, k))?);
    }
    Ok(out)
}

fn name(s: &NormedSpace) -> String {
    format!("{} in dimension {}", s.label(), s.dim())
}

/// Symmetric polygon with 3 to 8 vertex pairs at random angles and radii.
pub fn random_polygon(seed: u64) -> Result<NormedSpace> {
    let mut r = rng::stream(seed);
    let pairs = rng::index(&mut r, 3, 9);
    let mut angles: Vec<f64> = (0..pairs).map(|_| PI * rng::uniform(&mut r)).collect();
    angles.sort_by(f64::total_cmp);
    let mut vertices = Vec::with_capacity(2 * pairs);
    for a in angles {
        let rad = 0.5 + rng::uniform(&mut r);
        vertices.push(vec![rad * a.cos(), rad * a.sin()]);
        vertices.push(vec![-rad * a.cos(), -rad * a.sin()]);
    }
    NormedSpace::polytope(2, &vertices)
}

/// `G = BᵀB + I/10` with Gaussian `B`.
pub fn random_quadratic(n: usize, seed: u64) -> Result<NormedSpace> {
    let b = rng::gaussian_matrix(&mut rng::stream(seed), n, n);
    NormedSpace::quadratic(b.transpose() * &b + DMatrix::identity(n, n) * 0.1)
}

/// A `C_BM` value that may be used to certify: 1 for inner-product norms,
/// the squared plane distance (an upper bound) for planes, 2 otherwise.
pub fn trusted_cbm(space: &NormedSpace) -> Result<f64> {
    if space.is_hilbert() {
        Ok(1.0)
    } else if space.dim() == 2 {
        Ok(plane_distance(space, &DbmConfig::default())?.value.powi(2).min(2.0))
    } else {
        Ok(2.0)
    }
}

fn hilbert_constants(cfg: &SuiteConfig, seed: u64) -> Result<Tally> {
    let results = (0..10u64)
        .into_par_iter()
        .map(|i| {
            let n = 2 + i as usize % 4;
            let s = random_quadratic(n, rng::derive_seed(seed, i))?;
            let est_seed = rng::derive_seed(seed, 100 + i);
            let nj = cnj_estimate(&s, cfg.starts, est_seed)?.value;
            let bm = cbm_estimate(&s, cfg.starts, est_seed)?.value;
            Ok((n, nj, bm))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Tally::default();
    for (i, (n, nj, bm)) in results.into_iter().enumerate() {
        t.check((nj - 1.0).abs() <= 1e-6, || format!("instance {i} (dim {n}): C_NJ estimate {nj}"));
        t.check((bm - 1.0).abs() <= 1e-6, || format!("instance {i} (dim {n}): C_BM estimate {bm}"));
        t.max("max_abs_deviation", (nj - 1.0).abs().max((bm - 1.0).abs()));
    }
    Ok(t)
}

fn range_bounds(cfg: &SuiteConfig, seed: u64) -> Result<Tally> {
    let spaces = catalog(seed)?;
    let results = spaces
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let est_seed = rng::derive_seed(seed, 1000 + i as u64);
            let nj = cnj_estimate(s, cfg.starts, est_seed)?.value;
            let bm = cbm_estimate(s, cfg.starts, est_seed)?.value;
            let d = if s.dim() == 2 {
                Some(plane_distance(s, &DbmConfig::default())?.value)
            } else {
                None
            };
            Ok((nj, bm, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Tally::default();
    let in_range = |v: f64| (1.0 - 1e-9..=2.0 + 1e-6).contains(&v);
    for (s, (nj, bm, d)) in spaces.iter().zip(results) {
        let label = name(s);
        t.check(in_range(nj), || format!("{label}: C_NJ estimate {nj} outside [1, 2]"));
        t.check(in_range(bm), || format!("{label}: C_BM estimate {bm} outside [1, 2]"));
        t.max("max_cnj", nj);
        t.max("max_cbm", bm);
        if let Some(d) = d {
            t.check(in_range(d), || format!("{label}: plane distance {d} outside [1, 2]"));
            t.check(d <= SQRT_2 + 1e-6, || format!("{label}: plane distance {d} exceeds sqrt 2"));
            t.max("max_dbm", d);
        }
    }
    Ok(t)
}

fn pair_chain(cfg: &SuiteConfig, seed: u64) -> Result<Tally> {
    let spaces = catalog(seed)?;
    let plane_d = spaces
        .par_iter()
        .map(|s| {
            if s.dim() == 2 {
                plane_distance(s, &DbmConfig::default()).map(|d| Some(d.value))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let coarse = DbmConfig::coarse();
    let results = (0..cfg.pairs)
        .into_par_iter()
        .map(|k| {
            let idx = k % spaces.len();
            let s = &spaces[idx];
            let mut r = rng::substream(seed, k as u64);
            let x = rng::gaussian_vector(&mut r, s.dim());
            let y = rng::gaussian_vector(&mut r, s.dim());
            let nj = nj_ratio(s, x.as_slice(), y.as_slice())?;
            let d = match plane_d[idx] {
                Some(d) => d,
                // The distance is at least 1.
                None if nj <= 1.0 + 1e-6 => 1.0,
                None => match TwoDimSubspace::spanned_by(s.clone(), &x, &y) {
                    Ok(plane) => plane_distance(&plane, &coarse)?.value,
                    Err(Error::Geometry(_)) => return Ok(None),
                    Err(e) => return Err(e),
                },
            };
            Ok(Some((idx, nj, d)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Tally::default();
    let mut skipped = 0;
    for (k, res) in results.into_iter().enumerate() {
        let Some((idx, nj, d)) = res else {
            skipped += 1;
            continue;
        };
        let slack = d * d + 1e-6 - nj;
        t.check(slack >= 0.0, || {
            format!("pair {k} in {}: nj ratio {nj} exceeds squared distance {}", name(&spaces[idx]), d * d)
        });
        t.max("max_nj_ratio", nj);
        t.min("min_slack", slack);
    }
    t.set("skipped_dependent", skipped as f64);
    Ok(t)
}

/// Largest parallelogram ratio over a `m × m` grid of boundary pairs.
pub fn cnj_grid_oracle(space: &NormedSpace, m: usize) -> Result<f64> {
    let pts: Vec<[f64; 2]> = (0..m)
        .map(|k| boundary_point_2d(space, 2.0 * PI * k as f64 / m as f64))
        .collect();
    let mut best: f64 = 0.0;
    for x in &pts {
        for y in &pts {
            best = best.max(nj_ratio(space, x, y)?);
        }
    }
    Ok(best)
}

fn plane_values(cfg: &SuiteConfig, seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    for p in [1.0, f64::INFINITY] {
        let s = NormedSpace::lp(2, p)?;
        let d = plane_distance(&s, &DbmConfig::default())?.value;
        let label = s.label();
        t.check((d - SQRT_2).abs() <= 1e-3, || format!("{label}: plane distance {d}, expected sqrt 2"));
        t.set(&format!("dbm_{label}"), d);
    }
    let results = CATALOG_P
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let s = NormedSpace::lp(2, p)?;
            let est = cnj_estimate(&s, cfg.starts, rng::derive_seed(seed, i as u64))?.value;
            Ok((s.label(), est, cnj_grid_oracle(&s, 720)?))
        })
        .collect::<Result<Vec<_>>>()?;
    for (label, est, oracle) in results {
        t.check((est - oracle).abs() <= 1e-3, || format!("{label}: C_NJ estimate {est}, grid oracle {oracle}"));
        t.max("max_cnj_oracle_gap", (est - oracle).abs());
    }
    Ok(t)
}

fn audit_config(cfg: &SuiteConfig, seed: u64) -> AuditConfig {
    AuditConfig {
        samples: cfg.samples,
        tol: cfg.tol,
        opnorm: OpNormConfig {
            seed,
            ..OpNormConfig::default()
        },
        dbm: DbmConfig::coarse(),
    }
}

fn projection_bound(cfg: &SuiteConfig, seed: u64) -> Result<Tally> {
    let spaces = catalog(seed)?;
    let cbms = spaces.par_iter().map(trusted_cbm).collect::<Result<Vec<_>>>()?;
    let mut t = Tally::default();
    for (i, (s, &cbm)) in spaces.iter().zip(&cbms).enumerate() {
        let base = rng::derive_seed(seed, 1000 + i as u64);
        let audits = (0..cfg.projections as u64)
            .into_par_iter()
            .map(|k| {
                let ks = rng::derive_seed(base, k);
                let p = random_projection(s, ks)?;
                audit_projection(&p, ks, cbm, &audit_config(cfg, ks))
            })
            .collect::<Result<Vec<_>>>()?;
        let label = name(s);
        for (k, a) in audits.iter().enumerate() {
            t.check(a.passed(), || format!("{label}, projection {k}: {}", a.violations.join("; ")));
            t.min("min_operator_slack", a.operator_slack);
            if let Some(w) = a.per_vector_worst_slack {
                t.min("min_per_vector_slack", w);
            }
            t.max("max_observed_ratio", a.observed_ratio);
            *t.summary.entry("distance_evaluations".into()).or_insert(0.0) += a.distance_evaluations as f64;
        }
    }
    Ok(t)
}

fn hilbert_projections(cfg: &SuiteConfig, seed: u64) -> Result<Tally> {
    let results = (0..cfg.projections as u64)
        .into_par_iter()
        .map(|k| {
            let n = 2 + k as usize % 5;
            let s = random_quadratic(n, rng::derive_seed(seed, 2 * k))?;
            let p = random_projection(&s, rng::derive_seed(seed, 2 * k + 1))?;
            let (np, nq) = projection_norms(&p, &OpNormConfig::default())?;
            Ok((n, np.lower, nq.lower))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Tally::default();
    for (k, (n, np, nq)) in results.into_iter().enumerate() {
        let gap = (np - nq).abs();
        t.check(gap <= 1e-8, || format!("projection {k} (dim {n}): |P| = {np}, |I-P| = {nq}"));
        t.max("max_gap", gap);
        t.max("max_norm_p", np);
    }
    Ok(t)
}

fn pg_problems(cfg: &SuiteConfig, seed: u64) -> Result<Vec<(PgProblem, f64)>> {
    let mut out = Vec::new();
    for elements in [4, 8, 16, 32] {
        for eps in [1.0, 0.1] {
            for beta in [0.0, 1.0] {
                for variant in [FemVariant::Galerkin, FemVariant::PetrovShifted] {
                    out.push((assemble_fem_1d(elements, eps, beta, variant, 2)?, 1.0));
                }
            }
        }
    }
    let trial_p = [2.0, 1.0, 1.5, 3.0, 4.0, f64::INFINITY];
    let test_p = [f64::INFINITY, 1.0, 2.0];
    for k in 0..cfg.random_problems as u64 {
        let mut r = rng::substream(seed, k);
        let n = rng::index(&mut r, 2, 9);
        let coarse_dim = rng::index(&mut r, 1, n);
        let kk = k as usize;
        let x = if kk.is_multiple_of(7) {
            random_quadratic(n, rng::derive_seed(seed, 1000 + k))?
        } else {
            NormedSpace::lp(n, trial_p[kk % trial_p.len()])?
        };
        let y = NormedSpace::lp(n, test_p[kk % test_p.len()])?;
        let cbm = if x.is_hilbert() { 1.0 } else { 2.0 };
        out.push((random_problem(n, rng::derive_seed(seed, 2000 + k), x, y, coarse_dim)?, cbm));
    }
    Ok(out)
}

fn pg_chain(cfg: &SuiteConfig, seed: u64) -> Result<Tally> {
    let problems = pg_problems(cfg, seed)?;
    let reports = problems
        .par_iter()
        .enumerate()
        .map(|(i, (prob, cbm))| {
            let vcfg = VerifyConfig {
                opnorm: OpNormConfig {
                    seed: rng::derive_seed(seed, 5000 + i as u64),
                    ..OpNormConfig::default()
                },
                tol: cfg.tol,
            };
            verify_bounds(prob, *cbm, &vcfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Tally::default();
    for r in &reports {
        t.check(r.passed(), || format!("{}: {}", r.problem_id, r.violations.join("; ")));
        if let Some(e) = r.effectivity {
            t.max("max_effectivity", e);
        }
        t.max("max_ph_ratio", r.ph_ratio);
        t.min("min_slack_babuska", r.slack_babuska);
        t.min("min_slack_sharp", r.slack_sharp);
        if let Some(s) = r.slack_xz {
            t.min("min_slack_xz", s);
        }
    }
    t.set("problems", reports.len() as f64);
    Ok(t)
}
