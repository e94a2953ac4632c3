use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use shtc_core::{Boundary, CaseSpec, ExplicitParams, ExplicitRusanov, Grid1D, Rsimex, RsimexParams, SymTridiagonal};

fn rsimex_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("rsimex_step");
    for &m in &[1e-1, 1e-3] {
        let case = CaseSpec::riemann(m, m);
        let (rs1, rs2) = case.reference_states().unwrap();
        let scheme = Rsimex::new(case.model(), rs1, rs2, RsimexParams::default()).unwrap();
        for &n in &[256usize, 2048] {
            let field = case.build(&case.grid(n)).unwrap();
            let dt = scheme.time_step(&field).unwrap();
            group.bench_with_input(BenchmarkId::new(format!("M{m:e}"), n), &field, |b, f| {
                b.iter(|| scheme.advance(black_box(f), dt).unwrap())
            });
        }
    }
    group.finish();
}

fn explicit_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("explicit_step");
    let case = CaseSpec::riemann(1e-2, 1e-2);
    let scheme = ExplicitRusanov::new(case.model(), ExplicitParams::default());
    for &n in &[256usize, 2048] {
        let field = case.build(&case.grid(n)).unwrap();
        let dt = scheme.time_step(&field).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &field, |b, f| {
            b.iter(|| scheme.advance(black_box(f), dt).unwrap())
        });
    }
    group.finish();
}

fn tridiagonal_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("tridiagonal_solve");
    for (name, bc) in [("wall", Boundary::NoFlux), ("periodic", Boundary::Periodic)] {
        let n = 4096;
        let grid = Grid1D::unit(n, bc);
        let base = vec![1.0; n];
        let s: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (i as f64 / n as f64)).collect();
        let a = SymTridiagonal::shifted_weighted_laplacian(&base, &s, 1e-4, &grid);
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        group.bench_function(name, |b| b.iter(|| a.solve(black_box(&rhs)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, rsimex_step, explicit_step, tridiagonal_solve);
criterion_main!(benches);
