//! Batch workloads through `par::map` against the sequential `par::map_seq`.
//! Without the `parallel` feature both arms run sequentially.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use zastava_core::quiver::{dimension_bound_check, partitions};
use zastava_core::{par, BasisMode, ChainsawLie};

fn jacobi_shapes() -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for a in 0..=2 {
        for b in 0..=2 {
            for c in 0..=2 {
                if a + b + c > 0 && a + b + c <= 4 {
                    out.push(vec![a, b, c]);
                }
            }
        }
    }
    out
}

fn jacobi(d: &Vec<i64>) -> bool {
    ChainsawLie::build(d.len(), d, BasisMode::Eprime).unwrap().jacobi_check().passed()
}

fn bound_jobs() -> Vec<(Vec<usize>, Vec<Vec<usize>>)> {
    let d = vec![4, 3, 4, 2];
    let mut jobs = vec![(d.clone(), Vec::new())];
    for &k in &d {
        let mut next = Vec::new();
        for (d, parts) in jobs {
            for p in partitions(k) {
                let mut parts = parts.clone();
                parts.push(p);
                next.push((d.clone(), parts));
            }
        }
        jobs = next;
    }
    jobs
}

fn bound(job: &(Vec<usize>, Vec<Vec<usize>>)) -> bool {
    dimension_bound_check(&job.0, &job.1).unwrap().holds
}

fn bench(c: &mut Criterion) {
    let shapes = jacobi_shapes();
    let mut g = c.benchmark_group("jacobi");
    g.sample_size(10);
    g.bench_function("rayon", |b| b.iter(|| par::map(black_box(&shapes), jacobi)));
    g.bench_function("sequential", |b| b.iter(|| par::map_seq(black_box(&shapes), jacobi)));
    g.finish();

    let jobs = bound_jobs();
    let mut g = c.benchmark_group("dimension_bound");
    g.bench_function("rayon", |b| b.iter(|| par::map(black_box(&jobs), bound)));
    g.bench_function("sequential", |b| b.iter(|| par::map_seq(black_box(&jobs), bound)));
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
