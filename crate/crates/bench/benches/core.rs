use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sofic_bench::{cycle_pair, intertwined, random_perm};
use sofic_core::census::{count_cycle_commuting, count_hamming_ball};
use sofic_core::deamplify::deamplify;
use sofic_core::expansion::{check_expander_exact, default_lambda, refute_expander_sampled};
use sofic_core::perm::{coxeter, freeness};
use sofic_core::{conjugacy, Limits, Perm, Rational};

fn metrics(c: &mut Criterion) {
    let mut g = c.benchmark_group("coxeter");
    for n in [1_000, 10_000, 100_000] {
        let p = random_perm(n, 0);
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| b.iter(|| coxeter(black_box(p))));
    }
    g.finish();
    let t = cycle_pair(500, 0);
    c.bench_function("freeness_r3_n500", |b| b.iter(|| freeness(black_box(&t), 3, 1 << 20)));
}

fn expansion(c: &mut Criterion) {
    let limits = Limits::default();
    let mut g = c.benchmark_group("expander_exact");
    g.sample_size(10);
    for n in [12, 16, 20] {
        let t = cycle_pair(n, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| {
            b.iter(|| check_expander_exact(t, &default_lambda(), &limits))
        });
    }
    g.finish();
    let t = cycle_pair(256, 1);
    c.bench_function("expander_sampled_n256", |b| b.iter(|| refute_expander_sampled(&t, &default_lambda(), 16, 0)));
}

fn census(c: &mut Criterion) {
    let limits = Limits::default();
    let mut g = c.benchmark_group("census");
    g.sample_size(10);
    g.bench_function("hamming_ball_n8", |b| {
        b.iter(|| count_hamming_ball(&Perm::identity(8), &Rational::new(3, 10), &limits))
    });
    g.bench_function("cycle_commuting_n8", |b| b.iter(|| count_cycle_commuting(8, &Rational::new(3, 10), &limits)));
    g.finish();
}

fn extraction(c: &mut Criterion) {
    let mut g = c.benchmark_group("deamplify");
    for (n, r) in [(16, 4), (64, 8)] {
        let (x, y, u) = intertwined(n, r, 2);
        g.bench_function(format!("n{n}_r{r}"), |b| {
            b.iter(|| deamplify(&x, &y, &u, &default_lambda(), None, false))
        });
    }
    g.finish();
    let (x, y, _) = intertwined(60, 1, 3);
    c.bench_function("anneal_20k_n60", |b| b.iter(|| conjugacy::anneal(&x, &y, 20_000, 0)));
}

criterion_group!(benches, metrics, expansion, census, extraction);
criterion_main!(benches);
