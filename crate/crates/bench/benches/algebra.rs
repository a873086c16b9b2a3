use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ea_core::catalog::enumerate_small;
use ea_core::classify::classify;
use ea_core::compat::{blocks, maximal_boolean_subortho, DEFAULT_BUDGET};
use ea_core::observables::sets::{dynkin_closure_small, for_each_pi_system};
use ea_core::states::state_polytope;
use ea_core::sweep::{sweep, SweepOptions};
use ea_core::{generate, validate, GeneratorSpec};

fn gen(text: &str) -> ea_core::EffectAlgebra {
    generate(&GeneratorSpec::parse(text).unwrap()).unwrap()
}

fn kernel(c: &mut Criterion) {
    let raw = gen("evenomp 8").to_raw();
    c.bench_function("validate evenomp 8", |b| b.iter(|| validate(black_box(&raw)).unwrap()));
    let e = gen("evenomp 8");
    c.bench_function("classify evenomp 8", |b| b.iter(|| classify(black_box(&e))));
}

fn search(c: &mut Criterion) {
    let fano = gen("fano");
    c.bench_function("blocks fano", |b| b.iter(|| blocks(black_box(&fano), DEFAULT_BUDGET).unwrap()));
    c.bench_function("boolean cover fano", |b| b.iter(|| maximal_boolean_subortho(black_box(&fano)).unwrap()));
    c.bench_function("enumerate up to 7", |b| b.iter(|| enumerate_small(7, |_| true).unwrap()));
    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("sweep up to 7", |b| {
        b.iter(|| sweep(&SweepOptions { max_size: 7, ..SweepOptions::default() }).unwrap())
    });
    group.bench_function("pi systems on 4 points", |b| {
        b.iter(|| {
            let mut n = 0u64;
            for_each_pi_system(4, |f| n += dynkin_closure_small(4, f).count_ones() as u64);
            n
        })
    });
    group.finish();
}

fn states(c: &mut Criterion) {
    let e = gen("evenomp 6");
    c.bench_function("state polytope evenomp 6", |b| b.iter(|| state_polytope(black_box(&e))));
}

criterion_group!(benches, kernel, search, states);
criterion_main!(benches);
