use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use tensorlab_bench::random_matrix;
use tensorlab_core::harness::{sharpness_instance, SharpnessConfig};
use tensorlab_core::schreier::{decompose, member, Limits};
use tensorlab_core::tensor::{eps_norm, pi_norm};
use tensorlab_core::weights::{convexity_sums, square_sums};
use tensorlab_core::{Family, FiniteSet, Ordinal};

fn schreier(c: &mut Criterion) {
    let limits = Limits::default();
    let s2 = Family::Base(Ordinal::nat(2));
    let set = FiniteSet::interval(8, 2047);
    c.bench_function("member S[2] (8..2047)", |b| b.iter(|| member(&s2, black_box(&set))));
    let sw = Family::Base(Ordinal::omega());
    c.bench_function("decompose S[w] from 2", |b| {
        b.iter(|| decompose(&sw, black_box(2u64).., 1, &limits).unwrap())
    });
}

fn weights(c: &mut Criterion) {
    let limits = Limits::default();
    let mut g = c.benchmark_group("convexity");
    for xi in [0u64, 1, 2] {
        let xi = Ordinal::nat(xi);
        g.bench_with_input(BenchmarkId::new("p sums", &xi), &xi, |b, xi| {
            b.iter(|| convexity_sums(xi, 2u64.., 2, &limits).unwrap())
        });
    }
    g.finish();
    c.bench_function("q square sums (1,1) from 3", |b| {
        b.iter(|| square_sums(&Ordinal::one(), &Ordinal::one(), 3u64.., 1, &limits).unwrap())
    });
}

fn norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("norms");
    for (m, n) in [(4, 4), (8, 8), (8, 16)] {
        let u = random_matrix(m, n, 1);
        g.bench_with_input(BenchmarkId::new("pi", format!("{m}x{n}")), &u, |b, u| {
            b.iter(|| pi_norm(u).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("eps", format!("{m}x{n}")), &u, |b, u| {
            b.iter(|| eps_norm(u))
        });
    }
    g.finish();
}

fn sharpness(c: &mut Criterion) {
    let cfg = SharpnessConfig::new(Ordinal::one(), Ordinal::zero(), 3);
    c.bench_function("sharpness (1,0) from 3", |b| {
        b.iter(|| sharpness_instance(&cfg).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = schreier, weights, norms, sharpness
}
criterion_main!(benches);
