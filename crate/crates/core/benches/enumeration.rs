use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use freecyl::automorphism::{empirical_cancellation, tight_cancellation};
use freecyl::image::{dual_map_with, image_formula, plan};
use freecyl::{Alphabet, Automorphism, Budget, Execution, Letter, Word};

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn phi0() -> Automorphism {
    let a = Alphabet::new(2).unwrap();
    Automorphism::new(a, vec![w("aba"), w("ba")], vec![w("aB"), w("bbA")]).unwrap()
}

fn modes() -> [(&'static str, Budget); 2] {
    [
        (
            "sequential",
            Budget::default().with_execution(Execution::Sequential),
        ),
        (
            "parallel",
            Budget::default().with_execution(Execution::Parallel),
        ),
    ]
}

fn bench_empirical(c: &mut Criterion) {
    let phi = phi0();
    let mut group = c.benchmark_group("empirical_cancellation");
    for (name, budget) in modes() {
        group.bench_with_input(BenchmarkId::new(name, 4), &budget, |b, &budget| {
            b.iter(|| empirical_cancellation(black_box(&phi), 4, budget).unwrap())
        });
    }
    group.finish();
}

fn bench_formula(c: &mut Criterion) {
    let a = Alphabet::new(2).unwrap();
    let phi = Automorphism::nielsen(a, 0, Letter::new(1, false), true).unwrap();
    let consts = plan(&phi, freecyl::Defects { fwd: 2, bwd: 2 });
    let mut group = c.benchmark_group("image_formula");
    group.sample_size(10);
    for (name, budget) in modes() {
        group.bench_with_input(BenchmarkId::new(name, consts.k), &budget, |b, &budget| {
            b.iter(|| image_formula(&phi, black_box(&w("a")), &consts, budget).unwrap())
        });
    }
    group.finish();
}

fn bench_dual_map(c: &mut Criterion) {
    let phi = phi0().compose(&phi0()).unwrap();
    let bounds = tight_cancellation(&phi).certified();
    let mut group = c.benchmark_group("dual_map");
    for (name, budget) in modes() {
        group.bench_with_input(BenchmarkId::new(name, "phi0^2"), &budget, |b, &budget| {
            b.iter(|| dual_map_with(&phi, black_box(&w("ba")), bounds, budget).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_empirical, bench_formula, bench_dual_map);
criterion_main!(benches);
