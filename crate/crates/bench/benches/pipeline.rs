use criterion::{black_box, criterion_group, criterion_main, Criterion};

use pqa_core::dynamics::{normalize, NeutralContext, DEFAULT_FUEL};
use pqa_core::encoding::default_stdlib;
use pqa_core::statics::{check_pqa, TypingContext};
use pqa_core::syntax::parse_program;

fn pipeline(c: &mut Criterion) {
    let sig = default_stdlib();
    let ctx = TypingContext::new();
    let pi = NeutralContext::new();
    for (name, p) in pqa_bench::programs() {
        let src = p.to_string();
        c.bench_function(&format!("parse/{name}"), |b| b.iter(|| parse_program(black_box(&src)).unwrap()));
        c.bench_function(&format!("check/{name}"), |b| b.iter(|| check_pqa(&sig, &ctx, black_box(&p))));
        c.bench_function(&format!("normalize/{name}"), |b| b.iter(|| normalize(&pi, black_box(&p), DEFAULT_FUEL)));
    }
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
