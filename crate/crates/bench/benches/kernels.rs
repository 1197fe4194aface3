use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use lrc_bench::{random_code, random_matrix};
use lrc_core::analysis::{min_distance_exhaustive, DEFAULT_BUDGET};
use lrc_core::gf::Field;

fn field_mul(c: &mut Criterion) {
    let mut g = c.benchmark_group("field_mul");
    for order in [16u64, 27, 4096] {
        let f = Field::of_order(order).unwrap();
        let xs: Vec<u32> = (0..4096u64)
            .map(|i| (i * 7919 % f.order() as u64) as u32)
            .collect();
        g.bench_with_input(BenchmarkId::from_parameter(order), &xs, |b, xs| {
            b.iter(|| {
                xs.windows(2)
                    .fold(0, |acc, w| f.add(acc, f.mul(w[0], w[1])))
            })
        });
        let src: Vec<u16> = xs.iter().map(|&x| x as u16).collect();
        let mut dst = src.clone();
        g.bench_with_input(BenchmarkId::new("axpy", order), &src, |b, src| {
            b.iter(|| f.axpy(&mut dst, black_box(src), 3))
        });
    }
    g.finish();
}

fn rref(c: &mut Criterion) {
    let mut g = c.benchmark_group("rref");
    g.sample_size(10);
    for (order, rows, cols) in [(16u64, 64, 1024), (27, 200, 19683), (4096, 208, 4096)] {
        let f = Field::of_order(order).unwrap();
        let m = random_matrix(&f, rows, cols, 1);
        g.bench_function(format!("GF({order}) {rows}x{cols}"), |b| {
            b.iter(|| {
                let mut a = m.clone();
                a.rref(&f)
            })
        });
    }
    g.finish();
}

fn exhaustive_distance(c: &mut Criterion) {
    let mut g = c.benchmark_group("exhaustive_distance");
    g.sample_size(10);
    for (order, k, n) in [(16u64, 4, 64), (27, 4, 27), (8, 7, 64)] {
        let f = Field::of_order(order).unwrap();
        let code = random_code(&f, k, n, 2);
        g.bench_function(format!("GF({order}) [{n},{k}]"), |b| {
            b.iter(|| min_distance_exhaustive(&code, DEFAULT_BUDGET, None).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, field_mul, rref, exhaustive_distance);
criterion_main!(benches);
