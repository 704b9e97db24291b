//! Criterion benchmarks for the hot paths: path generation, closed-form
//! continuation evaluation, training epochs, and the bound sweep.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rlnn_core::*;

fn bench_simulate(c: &mut Criterion) {
    let set = sets::basket_put_five_assets();
    c.bench_function("simulate_paths set2 20k x 10 x 5", |b| {
        b.iter(|| {
            black_box(simulate_paths(&set.model, &set.schedule, 20_000, 7).unwrap());
        })
    });
}

fn bench_continuation(c: &mut Criterion) {
    let set = sets::basket_put_five_assets();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let net = ShallowNet::random(64, 5, InputSpace::LogPrice, &mut rng);
    let kernel = ContinuationKernel::new(&net, &set.model, 0.1).unwrap();
    let paths = simulate_paths(&set.model, &set.schedule, 20_000, 9).unwrap();
    c.bench_function("continuation kernel 20k states p=64 d=5", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for p in 0..20_000 {
                acc += kernel.eval(paths.state(p, 3));
            }
            black_box(acc)
        })
    });
}

fn bench_fit_epochs(c: &mut Criterion) {
    let set = sets::bermudan_put_single_asset();
    let paths = simulate_paths(&set.model, &set.schedule, 20_000, 5).unwrap();
    let xs: Vec<f64> = (0..20_000).map(|p| paths.state(p, 10)[0].ln()).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| (1.0 - x.exp()).max(0.0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let net = ShallowNet::random(32, 1, InputSpace::LogPrice, &mut rng);
    let cfg = TrainConfig {
        max_epochs: 10,
        patience: 10,
        ..TrainConfig::default()
    };
    c.bench_function("fit 10 epochs p=32 n=20k", |b| {
        b.iter_batched(
            || net.clone(),
            |initial| black_box(fit(&initial, &xs, &ys, &cfg, 3).unwrap()),
            BatchSize::LargeInput,
        )
    });
}

fn bench_binomial(c: &mut Criterion) {
    let set = sets::bermudan_put_single_asset();
    c.bench_function("binomial bermudan 5000 steps", |b| {
        b.iter(|| {
            black_box(
                binomial_bermudan_1d(
                    40.0,
                    40.0,
                    0.06,
                    0.0,
                    0.2,
                    &set.schedule,
                    5000,
                    ExerciseStyle::Bermudan,
                    true,
                )
                .unwrap(),
            )
        })
    });
}

fn bench_bounds(c: &mut Criterion) {
    let set = sets::bermudan_put_single_asset();
    let cfg = TrainConfig {
        max_epochs: 30,
        ..TrainConfig::default()
    };
    let result =
        rlnn_backward(&set.model, &set.schedule, &set.payoff, 10_000, 8, &cfg, 1).unwrap();
    c.bench_function("bound_report 50k eval paths p=8", |b| {
        b.iter(|| {
            black_box(
                bound_report(&result, &set.model, &set.schedule, &set.payoff, 50_000, 3).unwrap(),
            )
        })
    });
}

criterion_group!(
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_simulate, bench_continuation, bench_fit_epochs, bench_binomial, bench_bounds
);
criterion_main!(benches);
