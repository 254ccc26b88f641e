use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use shiftsolve::{
    nested_solve, shifted_cmrh, shifted_gmres, InnerMethod, OuterMethod, SeedPolicy, ShiftedProblem, SolverConfig,
};
use shiftsolve_bench::{cdr3d_seed, shift_range};

fn shifted(c: &mut Criterion) {
    let a = cdr3d_seed(0.05);
    let n = a.dim();
    let cfg = SolverConfig::new(40, 1e-8, 6000);
    let mut g = c.benchmark_group("shifted");
    g.sample_size(10);
    for ts in [1usize, 6] {
        let p = ShiftedProblem::new(a.clone(), vec![1.0; n], shift_range(-0.01, -1.0, ts), SeedPolicy::Shift(0)).unwrap();
        g.bench_with_input(BenchmarkId::new("scmrh", ts), &p, |b, p| b.iter(|| shifted_cmrh(p, &cfg).unwrap()));
        g.bench_with_input(BenchmarkId::new("sgmres", ts), &p, |b, p| b.iter(|| shifted_gmres(p, &cfg).unwrap()));
    }
    g.finish();
}

fn nested(c: &mut Criterion) {
    let a = cdr3d_seed(0.1);
    let n = a.dim();
    let p = ShiftedProblem::new(a, vec![1.0; n], shift_range(-0.01, -1.0, 4), SeedPolicy::Shift(0)).unwrap();
    let cfg = SolverConfig::new(30, 1e-8, 6000);
    let mut g = c.benchmark_group("nested");
    g.sample_size(10);
    for (name, outer, inner) in [
        ("hessen-fcmrh", OuterMethod::Fcmrh, InnerMethod::Hessen),
        ("fom-fgmres", OuterMethod::Fgmres, InnerMethod::Fom),
    ] {
        g.bench_function(name, |b| b.iter(|| nested_solve(&p, outer, inner, 8, &cfg).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, shifted, nested);
criterion_main!(benches);
