use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use stodars::bench::{run_plan, ExperimentPlan};
use stodars::diagnostics::check_jlt;
use stodars::problems::lookup;
use stodars::solver::{Budget, SolverConfig, SubspaceDim};
use stodars::Parallelism;

fn modes() -> [(&'static str, Parallelism); 2] {
    [("sequential", Parallelism::Sequential), ("rayon", Parallelism::Threads(0))]
}

fn plan() -> ExperimentPlan {
    let problems = ["ext_rosenbrock_n8_add_normal", "sphere_n8_mul_uniform", "ext_powell_n8_add_uniform"]
        .iter()
        .map(|name| lookup(name).unwrap())
        .collect();
    let config = SolverConfig {
        budget: Budget::PerDimension(100),
        ..SolverConfig::stodars(SubspaceDim::Fixed(2))
    };
    ExperimentPlan::new(problems, vec![("stodars_p2".into(), config)], (0..8).collect())
}

fn bench_plan(c: &mut Criterion) {
    let plan = plan();
    let mut group = c.benchmark_group("run_plan");
    group.sample_size(10);
    for (label, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &mode, |b, &mode| {
            b.iter(|| run_plan(&plan, mode).unwrap())
        });
    }
    group.finish();
}

fn bench_jlt(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_jlt");
    group.sample_size(10);
    for (label, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &mode, |b, &mode| {
            b.iter(|| check_jlt(100, &[5, 20], 0.5, 2000, 1, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_plan, bench_jlt);
criterion_main!(benches);
