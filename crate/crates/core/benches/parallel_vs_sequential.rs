use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hec_core::catalog::{build_case, verify_paper, VerifyConfig};
use hec_core::search::{einstein_search, parameter_sweep, SearchProblem, SweepFamily};
use hec_core::ExecutionMode;

const MODES: [(&str, ExecutionMode); 2] = [("sequential", ExecutionMode::Sequential), ("parallel", ExecutionMode::Parallel)];

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("theta-d11-sweep");
    group.sample_size(10);
    let family = SweepFamily::ThetaD11;
    let grid = family.default_grid();
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| parameter_sweep(family, &grid, mode).unwrap())
        });
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("einstein-search-su21-u2");
    group.sample_size(10);
    let space = build_case("SU21/U2", &[]).unwrap().space.to_f64();
    for (name, mode) in MODES {
        let mut problem = SearchProblem::new(space.clone()).unwrap();
        problem.starts = 32;
        problem.mode = mode;
        group.bench_function(name, |b| b.iter(|| einstein_search(&problem).unwrap()));
    }
    group.finish();
}

fn catalog(c: &mut Criterion) {
    let mut group = c.benchmark_group("catalog-verification");
    group.sample_size(10);
    for (name, mode) in MODES {
        let cfg = VerifyConfig { family_members: 3, samples: 50, search_starts: 4, mode, ..VerifyConfig::default() };
        group.bench_function(name, |b| b.iter(|| verify_paper(&cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sweep, search, catalog);
criterion_main!(benches);
