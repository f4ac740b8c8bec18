//! Hot paths under the rayon backend and the sequential fallback.
//!
//! `cargo bench -p xppn` measures the rayon build, once on a single-thread
//! pool and once on the full pool; `cargo bench -p xppn --no-default-features`
//! measures the sequential build. Group names carry the backend so criterion
//! keeps the baselines apart.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use xppn::benders::{benders_solve, BendersConfig, Eps};
use xppn::bounds::{compute_bounds, preprocess};
use xppn::exec;
use xppn::instance::{generate, Instance};
use xppn::touring::{solve_fixed_tour, SubproblemConfig, Tour};

fn backend() -> &'static str {
    if exec::is_parallel() {
        "rayon"
    } else {
        "sequential"
    }
}

/// Runs `f` once per configured pool: one worker and all workers under
/// rayon, the calling thread otherwise.
fn on_each_pool(c: &mut Criterion, name: &str, inst: &Instance, f: impl Fn(&Instance) + Sync) {
    let mut group = c.benchmark_group(format!("{name}/{}", backend()));
    group.measurement_time(Duration::from_secs(5)).sample_size(20);
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut pools = vec![1];
    if exec::is_parallel() && all > 1 {
        pools.push(all);
    }
    for threads in pools {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        group.bench_with_input(BenchmarkId::new("threads", threads), inst, |b, inst| {
            pool.install(|| b.iter(|| f(inst)))
        });
    }
    group.finish();
}

fn bounds(c: &mut Criterion) {
    let inst = generate(20, 3, 4, 1).expect("instance");
    on_each_pool(c, "bounds", &inst, |i| {
        compute_bounds(i);
    });
    on_each_pool(c, "preprocess", &inst, |i| {
        preprocess(i);
    });
}

fn subproblem(c: &mut Criterion) {
    let inst = generate(8, 2, 4, 3).expect("instance");
    let tour = Tour::identity(8);
    on_each_pool(c, "subproblem", &inst, |i| {
        solve_fixed_tour(i, &tour, &SubproblemConfig::default()).expect("subproblem");
    });
}

fn decomposition(c: &mut Criterion) {
    let inst = generate(7, 2, 1, 5).expect("instance");
    on_each_pool(c, "benders", &inst, |i| {
        benders_solve(i, Eps::default(), &BendersConfig::default()).expect("benders");
    });
}

criterion_group!(benches, bounds, subproblem, decomposition);
criterion_main!(benches);
