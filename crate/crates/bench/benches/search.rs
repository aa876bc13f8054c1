use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use galefan_bench::{fixture, monochrome};
use galefan_core::galedual::{gale_transform, lift_augment};
use galefan_core::pipeline::equidistribute;
use galefan_core::tverberg::search_tuple;
use galefan_core::{PipelineOptions, SearchConstraint, SearchOptions};

fn gale(c: &mut Criterion) {
    let mut g = c.benchmark_group("gale_transform");
    for n in [8usize, 12, 16] {
        let x = fixture(n, 3, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| b.iter(|| gale_transform(x).unwrap()));
    }
    g.finish();
}

fn tverberg(c: &mut Criterion) {
    let mut g = c.benchmark_group("search_tuple");
    g.sample_size(10);
    for (r, d) in [(2usize, 2usize), (3, 2), (3, 3)] {
        let x = fixture((r - 1) * (d + 1) + 1, d, 7);
        let opts = SearchOptions { threads: 1, ..Default::default() };
        g.bench_with_input(BenchmarkId::new(format!("r{r}"), d), &x, |b, x| {
            b.iter(|| search_tuple(x, r, &SearchConstraint::None, &opts).unwrap())
        });
    }
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("equidistribute");
    g.sample_size(10);
    let x = monochrome(7, 5, 3);
    let opts = PipelineOptions { threads: 1, ..Default::default() };
    g.bench_function("r3_n7_dim5", |b| b.iter(|| equidistribute(&x, 3, &opts).unwrap()));
    g.bench_function("lift_augment_n7", |b| b.iter(|| lift_augment(&x).unwrap()));
    g.finish();
}

criterion_group!(benches, gale, tverberg, pipeline);
criterion_main!(benches);
