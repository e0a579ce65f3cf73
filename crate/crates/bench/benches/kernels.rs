use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pdpoly::applications::{partial_pr_box, pr_box};
use pdpoly::classify::classify_all;
use pdpoly::exactgeom::{vertices_by_bases, vertices_from_hrep, Budget};
use pdpoly::polytopes::{ns_hrep, Enumerator};
use pdpoly_bench::{bipartite, tripartite};

fn vertex_enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("ns_vertices");
    for m in [2, 3] {
        let h = ns_hrep(&bipartite(m));
        g.bench_with_input(BenchmarkId::new("dd", m), &h, |b, h| {
            b.iter(|| vertices_from_hrep(black_box(h), &Budget::default()).unwrap())
        });
    }
    let h = ns_hrep(&bipartite(2));
    g.bench_function("bases/2", |b| {
        b.iter(|| vertices_by_bases(black_box(&h), &Budget::default()).unwrap())
    });
    g.finish();
}

fn facets(c: &mut Criterion) {
    let s = bipartite(2);
    let bell = Enumerator::default().bell(&s).unwrap();
    c.bench_function("facets/bell_chsh", |b| {
        b.iter(|| bell.facets(&Budget::default()).unwrap())
    });
}

fn membership(c: &mut Criterion) {
    let s = bipartite(2);
    let e = Enumerator::default();
    let bell = e.bell(&s).unwrap();
    let pr = pr_box(&s, None).unwrap();
    c.bench_function("membership/pr_vs_bell", |b| {
        b.iter(|| bell.membership(black_box(&pr), e.budget()).unwrap())
    });

    let t = tripartite();
    let pd = e.pd(&t, &t.party_collection(&[0]).unwrap()).unwrap();
    let boxb = partial_pr_box(&t, 1).unwrap();
    c.bench_function("membership/partial_pr_vs_pd", |b| {
        b.iter(|| pd.membership(black_box(&boxb), e.budget()).unwrap())
    });
}

fn classification(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify_all");
    for (name, s) in [("bipartite3", bipartite(3)), ("tripartite", tripartite())] {
        g.bench_with_input(BenchmarkId::from_parameter(name), &s, |b, s| {
            b.iter(|| classify_all(black_box(s)))
        });
    }
    g.finish();
}

fn products(c: &mut Criterion) {
    let t = tripartite();
    c.bench_function("pd_vertices/tripartite_A", |b| {
        b.iter(|| {
            let e = Enumerator::default();
            e.pd(&t, &t.party_collection(&[0]).unwrap()).unwrap()
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = vertex_enumeration, facets, membership, classification, products
}
criterion_main!(benches);
