use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use gsl_core::cclab::fuzz_strebel;
use gsl_core::liehom::{ce_h1_h2_with, extract_graded_lie};
use gsl_core::milnor::{mu_table_with, LinkData};
use gsl_core::nilq::truncated_quotient;
use gsl_core::{Bounds, Exec, Presentation, Word};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn fuzz(c: &mut Criterion) {
    let mut g = c.benchmark_group("fuzz_strebel_300");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| fuzz_strebel(black_box(300), 11, exec))
        });
    }
    g.finish();
}

fn chevalley_eilenberg(c: &mut Criterion) {
    let nq = truncated_quotient(&Presentation::free_rank(2), 6, &Bounds::default()).unwrap();
    let lie = extract_graded_lie(&nq).unwrap();
    let mut g = c.benchmark_group("ce_free_class6");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| ce_h1_h2_with(black_box(&lie), exec)));
    }
    g.finish();
}

fn milnor(c: &mut Criterion) {
    let x = Word::generator;
    let link = LinkData::from_meridian_words(vec![
        Word::commutator(&x(1), &x(2)),
        Word::commutator(&x(2), &x(3)),
        Word::commutator(&x(3), &x(0)),
        Word::commutator(&x(0), &x(1)),
    ])
    .unwrap();
    let mut g = c.benchmark_group("milnor_4comp_len5");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| mu_table_with(black_box(&link), 5, 4, &Bounds::default(), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, fuzz, chevalley_eilenberg, milnor);
criterion_main!(benches);
