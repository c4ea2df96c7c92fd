use banachlab::geoconst::{cnj_estimate, plane_distance, DbmConfig};
use banachlab::opnorm::{operator_norm_with, OpNormConfig};
use banachlab::projlab::{audit_projection, random_projection, AuditConfig};
use banachlab::{LinearMap, NormedSpace, TwoDimSubspace};
use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::{DMatrix, DVector};
use std::hint::black_box;

fn dbm(c: &mut Criterion) {
    let l3 = NormedSpace::lp(2, 3.0).unwrap();
    let plane = TwoDimSubspace::spanned_by(
        NormedSpace::lp(4, 1.5).unwrap(),
        &DVector::from_vec(vec![1.0, 0.3, -0.2, 0.5]),
        &DVector::from_vec(vec![0.1, 1.0, 0.5, -0.7]),
    )
    .unwrap();
    let mut g = c.benchmark_group("dbm");
    g.bench_function("lp3_plane_default", |b| b.iter(|| plane_distance(black_box(&l3), &DbmConfig::default())));
    g.bench_function("lp3_plane_coarse", |b| b.iter(|| plane_distance(black_box(&l3), &DbmConfig::coarse())));
    g.bench_function("subspace_of_lp1.5_coarse", |b| b.iter(|| plane_distance(black_box(&plane), &DbmConfig::coarse())));
    g.finish();
}

fn operator_norm(c: &mut Criterion) {
    let a = DMatrix::from_fn(4, 4, |i, j| ((i * 4 + j) as f64 * 0.37).sin());
    let a2 = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, -0.3, 2.0]);
    let cases = [
        ("vertex_l1_to_l3", LinearMap::new(a.clone(), NormedSpace::lp(4, 1.0).unwrap(), NormedSpace::lp(4, 3.0).unwrap())),
        ("grid2d_l3_to_l4", LinearMap::new(a2, NormedSpace::lp(2, 3.0).unwrap(), NormedSpace::lp(2, 4.0).unwrap())),
        ("multistart_l3_to_l1.5", LinearMap::new(a, NormedSpace::lp(4, 3.0).unwrap(), NormedSpace::lp(4, 1.5).unwrap())),
    ];
    let mut g = c.benchmark_group("operator_norm");
    for (name, map) in cases {
        let map = map.unwrap();
        g.bench_function(name, |b| b.iter(|| operator_norm_with(black_box(&map), &OpNormConfig::default())));
    }
    g.finish();
}

fn cnj(c: &mut Criterion) {
    let mut g = c.benchmark_group("cnj");
    g.sample_size(20);
    for (n, p) in [(2, 4.0), (4, 3.0)] {
        let s = NormedSpace::lp(n, p).unwrap();
        g.bench_function(format!("lp{p}_dim{n}"), |b| b.iter(|| cnj_estimate(black_box(&s), 8, 1)));
    }
    g.finish();
}

fn audit(c: &mut Criterion) {
    let s = NormedSpace::lp(3, 3.0).unwrap();
    let p = random_projection(&s, 7).unwrap();
    let cfg = AuditConfig {
        samples: 64,
        ..AuditConfig::default()
    };
    c.bench_function("audit_projection_lp3_dim3", |b| b.iter(|| audit_projection(black_box(&p), 7, 2.0, &cfg)));
}

criterion_group!(benches, dbm, operator_norm, cnj, audit);
criterion_main!(benches);
