use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kedlaya_bench::{mean, mean_input, MEANS};
use std::hint::black_box;

fn evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("eval");
    for id in MEANS {
        let m = mean(id);
        for n in [4, 64] {
            let (x, w) = mean_input(&m, n, 1);
            group.bench_with_input(BenchmarkId::new(*id, n), &n, |b, _| {
                b.iter(|| m.eval(black_box(&x), black_box(&w)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, evaluation);
criterion_main!(benches);
