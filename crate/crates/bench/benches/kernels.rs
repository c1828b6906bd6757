use std::hint::black_box;

use bcabe_core::cuts::{lp_lower_bound, npt_one_vs_rest_scan, CutConstraintSet};
use bcabe_core::locc::{prepare_bcabe, ProtocolMode};
use bcabe_core::states::{build_family, FamilyLabel};
use bcabe_core::tensor::hermitian_eigenvalues;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn families(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_family");
    for two_n in [4usize, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(two_n), &two_n, |b, &n| {
            b.iter(|| build_family(black_box(n), FamilyLabel::RhoPlus).unwrap())
        });
    }
    group.finish();
}

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eigenvalues");
    for two_n in [4usize, 6] {
        let m = build_family(two_n, FamilyLabel::SigmaMinus).unwrap().into_matrix();
        group.bench_with_input(BenchmarkId::from_parameter(two_n), &m, |b, m| {
            b.iter(|| hermitian_eigenvalues(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn cut_scan(c: &mut Criterion) {
    c.bench_function("npt_scan_6", |b| {
        b.iter(|| npt_one_vs_rest_scan(6, FamilyLabel::RhoPlus).unwrap())
    });
}

fn lower_bound(c: &mut Criterion) {
    let set = CutConstraintSet::one_vs_rest(10, 1.0).unwrap();
    c.bench_function("lp_lower_bound_10", |b| {
        b.iter(|| lp_lower_bound(black_box(&set)).unwrap())
    });
}

fn preparation(c: &mut Criterion) {
    let mut group = c.benchmark_group("prepare_exact");
    group.sample_size(10);
    for two_n in [4usize, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(two_n), &two_n, |b, &n| {
            b.iter(|| prepare_bcabe(n, FamilyLabel::RhoPlus, ProtocolMode::Exact).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, families, eigensolver, cut_scan, lower_bound, preparation);
criterion_main!(benches);
