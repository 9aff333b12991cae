use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use facloc::search::{enumerate_moves, run_local_search, SearchConfig};
use facloc::assign;
use facloc_bench::{kmedian, kufl, lp, ufl};
use std::hint::black_box;

fn local_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("local_search");
    for n in [20, 40, 80] {
        let inst = kmedian(1, n, 5);
        g.bench_with_input(BenchmarkId::new("kmedian_t1", n), &inst, |b, inst| {
            b.iter(|| run_local_search(inst, &SearchConfig::default(), None).unwrap())
        });
    }
    let inst = kmedian(2, 20, 4);
    g.bench_function("kmedian_t2_n20", |b| b.iter(|| run_local_search(&inst, &SearchConfig::default().with_t(2), None).unwrap()));
    let inst = lp(3, 40, 5, 2.0);
    g.bench_function("lp_p2_n40", |b| b.iter(|| run_local_search(&inst, &SearchConfig::default(), None).unwrap()));
    let inst = ufl(4, 40);
    g.bench_function("ufl_n40", |b| b.iter(|| run_local_search(&inst, &SearchConfig::default(), None).unwrap()));
    let inst = kufl(5, 40, 6);
    g.bench_function("kufl_n40", |b| b.iter(|| run_local_search(&inst, &SearchConfig::default(), None).unwrap()));
    g.finish();
}

fn neighborhood(c: &mut Criterion) {
    let inst = kmedian(6, 60, 8);
    let sol = assign(&inst, &[0, 7, 14, 21, 28, 35, 42, 49]).unwrap();
    c.bench_function("enumerate_moves_t1_n60_k8", |b| b.iter(|| enumerate_moves(black_box(&inst), &sol, &SearchConfig::default())));
}

criterion_group!(benches, local_search, neighborhood);
criterion_main!(benches);
