use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use segpath_bench::yargg_instance;
use segpath_core::multiarea::{best2cope_with, MultiAreaContext};
use segpath_core::{DiscretizationConfig, MultiAreaConfig, SolverConfig};

fn best2cope(c: &mut Criterion) {
    let mg = yargg_instance(4, 2, 10, 3);
    let disc = DiscretizationConfig::default();
    let cfg = MultiAreaConfig::new(disc, SolverConfig::new(10, disc.gamma_capacity()));
    let mut group = c.benchmark_group("best2cope");
    group.sample_size(10);
    group.bench_function("area_solves", |b| b.iter(|| MultiAreaContext::new(black_box(&mg), cfg).unwrap()));
    let ctx = MultiAreaContext::new(&mg, cfg).unwrap();
    let src = mg.graph.id_of("city000-acc1-1").unwrap();
    group.bench_function("combine", |b| b.iter(|| best2cope_with(black_box(&ctx), src).unwrap()));
    group.finish();
}

criterion_group!(benches, best2cope);
criterion_main!(benches);
