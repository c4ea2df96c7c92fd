use std::f64::consts::SQRT_2;

use banachlab::geoconst::{nj_ratio, plane_distance, DbmConfig};
use banachlab::opnorm::OpNormConfig;
use banachlab::pglab::{random_problem, verify_bounds, VerifyConfig};
use banachlab::projlab::{audit_projection, make_projection, projection_norms, random_projection, AuditConfig};
use banachlab::suite::{random_polygon, random_quadratic};
use banachlab::{NormedSpace, TwoDimSubspace};
use nalgebra::DVector;
use proptest::prelude::*;

fn p_value() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(f64::INFINITY), 1.0f64..8.0]
}

fn small_audit() -> AuditConfig {
    AuditConfig {
        samples: 16,
        ..AuditConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nj_ratio_lies_in_unit_range(p in p_value(), x in prop::collection::vec(-5.0f64..5.0, 3), y in prop::collection::vec(-5.0f64..5.0, 3)) {
        prop_assume!(x.iter().chain(&y).any(|v| v.abs() > 1e-3));
        let s = NormedSpace::lp(3, p).unwrap();
        let r = nj_ratio(&s, &x, &y).unwrap();
        prop_assert!((1.0 / 2.0 - 1e-12..=2.0 + 1e-12).contains(&r));
        // Swapping the pair or flipping y leaves the ratio unchanged.
        prop_assert!((nj_ratio(&s, &y, &x).unwrap() - r).abs() < 1e-12);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        prop_assert!((nj_ratio(&s, &x, &neg).unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn pair_ratio_below_squared_plane_distance(p in p_value(), x in prop::collection::vec(-1.0f64..1.0, 3), y in prop::collection::vec(-1.0f64..1.0, 3)) {
        let s = NormedSpace::lp(3, p).unwrap();
        let (xv, yv) = (DVector::from_vec(x.clone()), DVector::from_vec(y.clone()));
        let plane = TwoDimSubspace::spanned_by(s.clone(), &xv, &yv);
        prop_assume!(plane.is_ok());
        let d = plane_distance(&plane.unwrap(), &DbmConfig::coarse()).unwrap().value;
        prop_assert!(nj_ratio(&s, &x, &y).unwrap() <= d * d + 1e-6);
    }

    #[test]
    fn john_bound_on_random_polygons(seed in any::<u64>()) {
        let s = random_polygon(seed).unwrap();
        let d = plane_distance(&s, &DbmConfig::coarse()).unwrap().value;
        prop_assert!((1.0..=SQRT_2 + 1e-6).contains(&d), "d = {}", d);
    }

    #[test]
    fn random_projections_are_idempotent(p in p_value(), n in 2usize..6, seed in any::<u64>()) {
        let s = NormedSpace::lp(n, p).unwrap();
        let proj = random_projection(&s, seed).unwrap();
        let m = proj.matrix();
        prop_assert!((m * m - m).norm() <= 1e-9 * (1.0 + m.norm()));
        prop_assert!(!proj.is_trivial());
        prop_assert!(proj.rank() >= 1 && proj.rank() < n);
        let rebuilt = make_projection(proj.range_basis(), proj.kernel_basis(), &s).unwrap();
        prop_assert!((rebuilt.matrix() - m).amax() <= 1e-8 * (1.0 + m.amax()));
    }

    #[test]
    fn complement_audits_both_pass(p in p_value(), seed in any::<u64>()) {
        let s = NormedSpace::lp(2, p).unwrap();
        let proj = random_projection(&s, seed).unwrap();
        let cbm = 2.0;
        let a = audit_projection(&proj, seed, cbm, &small_audit()).unwrap();
        let b = audit_projection(&proj.complement(), seed, cbm, &small_audit()).unwrap();
        prop_assert!(a.passed(), "{:?}", a.violations);
        prop_assert!(b.passed(), "{:?}", b.violations);
        prop_assert!(a.norm_p.lower >= 1.0 - 1e-9);
    }

    #[test]
    fn hilbert_projection_identity(n in 2usize..7, seed in any::<u64>()) {
        let s = random_quadratic(n, seed).unwrap();
        let proj = random_projection(&s, seed ^ 1).unwrap();
        let (np, nq) = projection_norms(&proj, &OpNormConfig::default()).unwrap();
        prop_assert!((np.lower - nq.lower).abs() <= 1e-8 * np.lower.max(1.0));
    }

    #[test]
    fn random_problems_satisfy_the_bound_chain(n in 2usize..6, seed in any::<u64>(), p in p_value()) {
        let x = NormedSpace::lp(n, p).unwrap();
        let y = NormedSpace::lp(n, 2.0).unwrap();
        let prob = random_problem(n, seed, x, y, 1 + seed as usize % (n - 1)).unwrap();
        let r = verify_bounds(&prob, 2.0, &VerifyConfig::default()).unwrap();
        prop_assert!(r.passed(), "{:?}", r.violations);
        prop_assert!(r.best <= r.err * (1.0 + 1e-9) + 1e-12);
    }
}
