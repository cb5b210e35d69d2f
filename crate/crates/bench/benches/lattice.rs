use criterion::{criterion_group, criterion_main, Criterion};
use pure_measure_bench::measures;
use std::hint::black_box;

fn total_variation(c: &mut Criterion) {
    let fam = measures(Some(5));
    let mut g = c.benchmark_group("total_variation");
    g.bench_function("closed_form", |b| {
        b.iter(|| {
            for mu in &fam {
                for s in mu.algebra().sets() {
                    black_box(mu.total_variation(s).unwrap());
                }
            }
        })
    });
    g.bench_function("partition_oracle", |b| {
        b.iter(|| {
            for mu in &fam {
                for s in mu.algebra().sets() {
                    black_box(mu.tv_partition_oracle(s).unwrap());
                }
            }
        })
    });
    g.finish();
}

fn decompositions(c: &mut Criterion) {
    let fam = measures(None);
    c.bench_function("jordan_family", |b| {
        b.iter(|| {
            for mu in &fam {
                black_box(mu.jordan_decompose());
            }
        })
    });
    c.bench_function("band_decompose_family", |b| {
        b.iter(|| {
            for mu in &fam {
                for band in mu.algebra().sets() {
                    black_box(mu.band_decompose(band).unwrap());
                }
            }
        })
    });
}

criterion_group!(benches, total_variation, decompositions);
criterion_main!(benches);
