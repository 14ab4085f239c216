use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gcwsnet_core::learn::{sparse_binary_forward, Model, NetConfig};
use gcwsnet_core::validate::{random_pair, PairSpec};
use gcwsnet_core::{count_sketch, gcws_hash, one_hot, pgmm_kernel, CountSketchConfig, GcwsConfig};

fn bench_gcws(c: &mut Criterion) {
    let (u, _) = random_pair(&PairSpec::default(), 1, 0);
    let mut group = c.benchmark_group("gcws_hash");
    for k in [64usize, 512] {
        let cfg = GcwsConfig::new(2.0, k, 8, 0, 7).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &cfg, |b, cfg| {
            b.iter(|| gcws_hash(black_box(&u), cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_sketch(c: &mut Criterion) {
    let (u, _) = random_pair(&PairSpec::default(), 1, 0);
    let cfg = GcwsConfig::new(1.0, 512, 8, 0, 7).unwrap();
    let f = one_hot(&gcws_hash(&u, &cfg).unwrap(), &cfg).unwrap();
    let cs = CountSketchConfig::new(8192, 3).unwrap();
    c.bench_function("count_sketch k=512 B=8192", |b| b.iter(|| count_sketch(black_box(&f), &cs)));
}

fn bench_kernel(c: &mut Criterion) {
    let (u, v) = random_pair(&PairSpec::default(), 1, 0);
    c.bench_function("pgmm_kernel D=64", |b| {
        b.iter(|| pgmm_kernel(black_box(&u), black_box(&v), 2.0).unwrap())
    });
}

fn bench_forward(c: &mut Criterion) {
    let (k, block) = (512usize, 256usize);
    let net = NetConfig {
        layers: 2,
        hidden: 200,
        ..NetConfig::default()
    };
    let model = Model::new(&net, k * block, 10).unwrap();
    let positions: Vec<usize> = (0..k).map(|j| j * block + (j * 37) % block).collect();
    c.bench_function("sparse_binary_forward k=512 H=200", |b| {
        b.iter(|| sparse_binary_forward(black_box(&positions), &model.layers()[0]).unwrap())
    });
}

criterion_group!(benches, bench_gcws, bench_sketch, bench_kernel, bench_forward);
criterion_main!(benches);
