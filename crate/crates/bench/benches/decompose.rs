use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pantscut::field::harmonic::{solve_harmonic, DirichletConstraints, SolveOptions};
use pantscut::reeb::ReebGraph;
use pantscut::synth::plate;
use pantscut::{critical_points, decompose, Algorithm};

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    group.sample_size(10);
    for (g, res) in [(2, 24), (4, 48)] {
        let m = plate(g, 0, res).unwrap();
        let cons = DirichletConstraints::default_for(&m).unwrap();
        let label = format!("g{g}_v{}", m.num_vertices());
        group.bench_function(BenchmarkId::new("harmonic", &label), |b| {
            b.iter(|| solve_harmonic(&m, &cons, SolveOptions::default()).unwrap())
        });
        let f = solve_harmonic(&m, &cons, SolveOptions::default()).unwrap();
        group.bench_function(BenchmarkId::new("critical_points", &label), |b| {
            b.iter(|| critical_points(&m, &f).unwrap())
        });
        group.bench_function(BenchmarkId::new("reeb_graph", &label), |b| {
            b.iter(|| ReebGraph::build(&m, &f).unwrap())
        });
        for algo in [Algorithm::Handle, Algorithm::Reeb] {
            group.bench_function(BenchmarkId::new(algo.to_string(), &label), |b| {
                b.iter(|| decompose(&m, &f, algo).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
