use std::hint::black_box;
use std::time::Duration;

use coop_planner::bench::{build_suite, run_benchmark, BenchConfig, SuiteSpec};
use coop_planner::planner::{Algorithm, Budget, PlannerConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn small_suite() -> SuiteSpec {
    SuiteSpec {
        grid_sizes: vec![10, 30],
        agent_counts: vec![1, 2, 3],
        instances_per_cell: 4,
        ..SuiteSpec::desk_scale()
    }
}

fn config(parallelism: usize) -> BenchConfig {
    BenchConfig {
        suite: small_suite(),
        algorithms: Algorithm::ALL.to_vec(),
        // iteration budgets keep the work identical across modes
        planner: PlannerConfig {
            budget: Budget::Iterations(500),
            ..Default::default()
        },
        parallelism,
    }
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get()).max(2)
}

fn runner(c: &mut Criterion) {
    let suite = build_suite(&small_suite()).unwrap();
    let mut group = c.benchmark_group("run_benchmark");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    let parallel = threads();
    for (label, p) in [("serial", 1), ("parallel", parallel)] {
        let cfg = config(p);
        group.bench_with_input(BenchmarkId::new(label, p), &cfg, |b, cfg| {
            b.iter(|| black_box(run_benchmark(&suite, cfg, None).unwrap()))
        });
    }
    group.finish();
}

fn generation(c: &mut Criterion) {
    let spec = SuiteSpec {
        instances_per_cell: 10,
        ..SuiteSpec::desk_scale()
    };
    let mut group = c.benchmark_group("build_suite");
    group.sample_size(10);
    // build_suite fans out over the global pool when `parallel` is on
    group.bench_function(if cfg!(feature = "parallel") { "parallel" } else { "serial" }, |b| {
        b.iter(|| black_box(build_suite(&spec).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, runner, generation);
criterion_main!(benches);
