use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use crosscap::ef::{emit_stab_ef, EF_ROW_CAP};
use crosscap::generate::{generate, Family, GenParams};
use crosscap::solve::{solve, SolveOptions};
use crosscap::transversal::two_sided_transversal;

// projective grids: the full pipeline at growing size; 30 x 30 is the
// scale the solver must clear interactively
fn grid_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid-solve");
    for size in [6usize, 12, 30] {
        let g = generate(&GenParams {
            family: Family::ProjQuad,
            seed: 1,
            rows: Some(size),
            cols: Some(size),
        })
        .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(size), &g, |b, g| {
            b.iter(|| solve(g, &SolveOptions::default()).unwrap());
        });
    }
    group.finish();
}

// transversal search on planted 2-sided odd cycles
fn planar_transversal(c: &mut Criterion) {
    let g = generate(&GenParams::new(Family::Planar, 4)).unwrap();
    c.bench_function("planar-transversal", |b| {
        b.iter(|| two_sided_transversal(&g, 10).unwrap());
    });
}

// extension emission for the projective K4 quadrangulation
fn ef_emit(c: &mut Criterion) {
    let g = generate(&GenParams::new(Family::ProjK4, 2)).unwrap();
    c.bench_function("emit-ef-proj-k4", |b| {
        b.iter(|| emit_stab_ef(&g, 10, EF_ROW_CAP).unwrap());
    });
}

criterion_group!(benches, grid_solve, planar_transversal, ef_emit);
criterion_main!(benches);
