use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, Criterion};

use umlmine::batch::{evaluate_batch, evaluate_batch_sequential};
use umlmine::rdf::parse_ntriples;
use umlmine::resolver::ResolverConfig;
use umlmine::sparql::{parse_query, QueryIr};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

fn queries() -> Vec<QueryIr> {
    let mut out = Vec::new();
    for xmi in ["singleton.xmi", "visitor.xmi", "factory.xmi", "proxy.xmi", "builder.xmi", "inheritance.xmi"] {
        for (stereotypes, suppress) in [(false, false), (true, false), (false, true), (true, true)] {
            let cfg = ResolverConfig {
                suppress_visibility: suppress,
                parse_stereotypes: stereotypes,
                emit_distinct_filters: true,
            };
            let q = umlmine::generate_query(fixture(xmi).as_bytes(), &cfg).unwrap();
            out.push(parse_query(&q.query_text).unwrap());
        }
    }
    out
}

fn bench(c: &mut Criterion) {
    let store = parse_ntriples(&[("corpus.nt", fixture("corpus.nt"))]).unwrap();
    let qs = queries();
    let mut g = c.benchmark_group("corpus batch");
    g.bench_function("parallel", |b| b.iter(|| evaluate_batch(black_box(&store), black_box(&qs))));
    g.bench_function("sequential", |b| b.iter(|| evaluate_batch_sequential(black_box(&store), black_box(&qs))));
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
