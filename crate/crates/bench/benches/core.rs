use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use qbcharge_bench::{conventional, oracle, shared_added};
use qbcharge_core::fock::{FockDensityMatrix, Lindbladian};
use qbcharge_core::moments::{self, MomentState};
use qbcharge_core::scenario::{self, FigureId};
use qbcharge_core::{optimize, steady, StepControl};

fn steady_state(c: &mut Criterion) {
    let p = shared_added();
    c.bench_function("steady/analytic", |b| b.iter(|| steady::energies_analytic(black_box(&p)).unwrap()));
    c.bench_function("steady/linear_solve", |b| b.iter(|| steady::steady_moments_linear(black_box(&p)).unwrap()));
}

fn trajectories(c: &mut Criterion) {
    let p = conventional();
    let control = StepControl::default();
    c.bench_function("moments/integrate_jt300", |b| {
        b.iter(|| moments::integrate(black_box(&p), MomentState::vacuum(), 1500.0, 601, &control).unwrap())
    });
}

fn optimization(c: &mut Criterion) {
    let p = shared_added();
    c.bench_function("optimize/detuning_shared", |b| {
        b.iter(|| optimize::optimal_detuning_shared(black_box(&p)).unwrap())
    });
    c.bench_function("optimize/detuning_numeric", |b| {
        b.iter(|| optimize::optimal_detuning_numeric(black_box(&p), (-0.5, 0.5)).unwrap())
    });
}

fn oracle_generator(c: &mut Criterion) {
    let mut group = c.benchmark_group("fock/apply");
    for n in [6, 8, 12] {
        let gen = Lindbladian::new(&oracle(), n).unwrap();
        let rho = FockDensityMatrix::vacuum(n);
        group.bench_function(n.to_string(), |b| {
            b.iter_batched(Vec::new, |mut out| gen.apply_unchecked(&rho, &mut out), BatchSize::SmallInput)
        });
    }
    group.finish();
}

fn figures(c: &mut Criterion) {
    let mut group = c.benchmark_group("figure");
    group.sample_size(10);
    group.bench_function("fig6", |b| b.iter(|| scenario::figure_data(FigureId::Fig6).unwrap()));
    group.finish();
}

criterion_group!(benches, steady_state, trajectories, optimization, oracle_generator, figures);
criterion_main!(benches);
