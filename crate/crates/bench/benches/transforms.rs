use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use probmet_bench::{family, space, SIZES};
use probmet_core::levels::{oracle_ut_grid, standard_lambda_grid};
use probmet_core::probmet::{oracle_p5_grid, standard_gamma_grid};
use probmet_core::systems::uniform_basis_of;
use probmet_core::{
    check_level_axioms, check_pm_axioms, check_uniform_basis, delta_transform, phi_reconstruct, TNorm,
};

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("transforms");
    for (n, k) in SIZES {
        let s = space(n, k, TNorm::Product, 7);
        let f = family(n, k, TNorm::Product, 7);
        let id = format!("{n}x{k}");
        group.bench_with_input(BenchmarkId::new("delta", &id), &s, |b, s| {
            b.iter(|| delta_transform(black_box(s)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("phi", &id), &f, |b, f| {
            b.iter(|| phi_reconstruct(black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn checkers(c: &mut Criterion) {
    let mut group = c.benchmark_group("checkers");
    for (n, k) in SIZES {
        let s = space(n, k, TNorm::Lukasiewicz, 11);
        let f = family(n, k, TNorm::Lukasiewicz, 11);
        let id = format!("{n}x{k}");
        group.bench_with_input(BenchmarkId::new("pm_axioms", &id), &s, |b, s| {
            b.iter(|| check_pm_axioms(black_box(s)))
        });
        group.bench_with_input(BenchmarkId::new("level_axioms", &id), &f, |b, f| {
            b.iter(|| check_level_axioms(black_box(f)))
        });
        let basis = uniform_basis_of(&f);
        group.bench_with_input(BenchmarkId::new("uniform_basis", &id), &basis, |b, basis| {
            b.iter(|| check_uniform_basis(black_box(basis)).unwrap())
        });
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracles");
    group.sample_size(10);
    for (n, k) in SIZES.into_iter().take(2) {
        let s = space(n, k, TNorm::Product, 3);
        let f = family(n, k, TNorm::Product, 3);
        let id = format!("{n}x{k}");
        let gammas = standard_gamma_grid(&s, 1024);
        group.bench_with_input(BenchmarkId::new("p5_grid", &id), &s, |b, s| {
            b.iter(|| oracle_p5_grid(black_box(s), &gammas).unwrap())
        });
        let lambdas = standard_lambda_grid(&f, 1024);
        group.bench_with_input(BenchmarkId::new("ut_grid", &id), &f, |b, f| {
            b.iter(|| oracle_ut_grid(black_box(f), &lambdas).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, transforms, checkers, oracles);
criterion_main!(benches);
