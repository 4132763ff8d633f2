use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qppinv::inversion::{invert_qpp, DEFAULT_ENUMERATION_LIMIT};
use qppinv::lte::{bundled_table, reproduce_table};
use qppinv::modmath::Modulus;
use qppinv::oracle::{verify_two_sided, Sampling};
use qppinv::{Execution, Qpp};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn full_verification(c: &mut Criterion) {
    let q = Qpp::new(Modulus::new(1 << 20).unwrap(), 26119, 44034).unwrap();
    let f = q.as_poly();
    let g = invert_qpp(&q).unwrap().particular;
    let mut group = c.benchmark_group("verify_2^20");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| assert!(verify_two_sided(black_box(&f), &g, Sampling::Full, exec).unwrap()))
        });
    }
    group.finish();
}

fn table_reproduction(c: &mut Criterion) {
    let entries = bundled_table();
    let mut group = c.benchmark_group("lte_table");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| reproduce_table(black_box(&entries), DEFAULT_ENUMERATION_LIMIT, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, full_verification, table_reproduction);
criterion_main!(benches);
