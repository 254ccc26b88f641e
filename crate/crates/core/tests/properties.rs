use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use shiftsolve::dense::hessenberg_lsq;
use shiftsolve::krylov::{build_arnoldi, build_pivoted_hessenberg, KrylovBasis};
use shiftsolve::nested::nested_solve_observed;
use shiftsolve::shifted::{inner_shifted_fom, inner_shifted_hessenberg};
use shiftsolve::vector::{combine, dot, norm2, sub};
use shiftsolve::{
    cmrh, gmres, nested_solve, InnerMethod, LinearOperator, OuterMethod, SeedPolicy, ShiftedProblem, SolverConfig,
    SparseMatrix,
};

fn random_sparse(rng: &mut StdRng, n: usize, per_row: usize, diag: f64) -> SparseMatrix<f64> {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, diag + rng.gen_range(-1.0..1.0)));
        for _ in 0..per_row {
            t.push((i, rng.gen_range(0..n), rng.gen_range(-1.0..1.0)));
        }
    }
    SparseMatrix::from_triplets(n, t).unwrap()
}

fn random_vec(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hessenberg_relation_on_probes(seed in any::<u64>(), n in 5usize..60, m in 1usize..20) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, n, 3, 0.5);
        let r0 = random_vec(&mut rng, n);
        let b = build_pivoted_hessenberg(|x, y| a.apply(x, y), &r0, m, 1e-14 * a.frobenius_norm()).unwrap();
        let k = b.steps();
        let w = random_vec(&mut rng, k);
        let lhs = a.matvec(&combine(b.columns(), &w, n)).unwrap();
        let rhs = combine(b.columns(), &b.hessenberg().mul_vec(&w), n);
        prop_assert!(norm2(&sub(&lhs, &rhs)) <= 1e-11 * norm2(&lhs).max(1e-300) + 1e-14);

        let mut q = b.pivots().to_vec();
        q.sort_unstable();
        prop_assert_eq!(q, (0..n).collect::<Vec<_>>());

        if b.breakdown() {
            let lsq = hessenberg_lsq(b.hessenberg(), b.alpha()).unwrap();
            prop_assert!(norm2(&lsq.u) <= 1e-10 * b.alpha().abs());
        }
    }

    #[test]
    fn arnoldi_columns_orthonormal(seed in any::<u64>(), n in 5usize..60, m in 1usize..20) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, n, 3, 0.5);
        let r0 = random_vec(&mut rng, n);
        let b = build_arnoldi(|x, y| a.apply(x, y), &r0, m, 1e-14 * a.frobenius_norm()).unwrap();
        let v = b.columns();
        for i in 0..v.len() {
            for j in 0..v.len() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot(&v[i], &v[j]) - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn inner_collinearity_identity(seed in any::<u64>(), steps in 1usize..10) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = 30;
        let a = random_sparse(&mut rng, n, 4, 3.0);
        let v = random_vec(&mut rng, n);
        let sigmas = [-0.7, 0.2, 1.3, -2.5];
        for fom in [false, true] {
            let out = if fom {
                inner_shifted_fom(&a, &sigmas, &v, steps).unwrap()
            } else {
                inner_shifted_hessenberg(&a, &sigmas, &v, steps).unwrap()
            };
            let az0 = a.matvec(&out.z_seed).unwrap();
            for (i, &s) in sigmas.iter().enumerate() {
                prop_assume!(!out.failed[i]);
                let g = out.gamma[i];
                let lhs = a.apply_shifted(s, &out.z[i]).unwrap();
                let dev: Vec<f64> = (0..n).map(|k| lhs[k] - g * az0[k] + (g - 1.0) * v[k]).collect();
                prop_assert!(norm2(&dev) <= 1e-12 * a.frobenius_norm() * norm2(&v));
            }
        }
    }

    #[test]
    fn converged_solutions_meet_tolerance(seed in any::<u64>(), m in 2usize..15) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = 80;
        let a = random_sparse(&mut rng, n, 4, 4.0);
        let b = random_vec(&mut rng, n);
        let cfg = SolverConfig::new(m, 1e-9, 4000);
        for rep in [cmrh(&a, &b, &vec![0.0; n], &cfg).unwrap(), gmres(&a, &b, &vec![0.0; n], &cfg).unwrap()] {
            if rep.converged {
                let r = sub(&b, &a.matvec(&rep.solution).unwrap());
                prop_assert!(norm2(&r) / norm2(&b) <= 10.0 * cfg.tol);
            }
            for q in &rep.quasi_residuals {
                prop_assert!(q.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
            }
            let breaks = rep.quasi_residuals.iter().any(|q| q.len() < m);
            if !breaks {
                prop_assert_eq!(rep.mvps as usize, rep.cycles * m);
            }
        }
    }
}

#[test]
fn fgmres_seed_residuals_do_not_grow() {
    let mut rng = StdRng::seed_from_u64(21);
    let a = random_sparse(&mut rng, 60, 5, 2.0);
    let b = random_vec(&mut rng, 60);
    let p = ShiftedProblem::new(a, b, vec![0.0, -0.4], SeedPolicy::Zero).unwrap();
    let cfg = SolverConfig::new(25, 1e-13, 1000);
    for (outer, inner) in [(OuterMethod::Fgmres, InnerMethod::Fom), (OuterMethod::Fgmres, InnerMethod::Hessen)] {
        let rep = nested_solve(&p, outer, inner, 3, &cfg).unwrap();
        let h = &rep.shifts[0].residual_history;
        assert!(h.len() > 2);
        for w in h.windows(2) {
            assert!(w[1].relative_residual <= w[0].relative_residual * (1.0 + 1e-10));
        }
    }
}

#[test]
fn fcmrh_quasi_residuals_do_not_grow() {
    let mut rng = StdRng::seed_from_u64(22);
    let a = random_sparse(&mut rng, 60, 5, 2.0);
    let b = random_vec(&mut rng, 60);
    let p = ShiftedProblem::new(a, b, vec![0.0, 0.3], SeedPolicy::Zero).unwrap();
    let mut quasi = Vec::new();
    nested_solve_observed(
        &p,
        OuterMethod::Fcmrh,
        InnerMethod::Hessen,
        3,
        &SolverConfig::new(25, 1e-13, 1000),
        &mut |s| {
            let lsq = hessenberg_lsq(s.outer_basis.hessenberg(), s.outer_basis.scale()).unwrap();
            quasi.push(norm2(&lsq.u));
        },
    )
    .unwrap();
    assert!(quasi.len() > 2);
    for w in quasi.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-10));
    }
}

#[test]
fn more_inner_steps_do_not_cost_outer_steps() {
    let mut rng = StdRng::seed_from_u64(23);
    let a = random_sparse(&mut rng, 60, 4, 3.0);
    let b = random_vec(&mut rng, 60);
    let p = ShiftedProblem::new(a, b, vec![0.0, -0.5, 0.5], SeedPolicy::Zero).unwrap();
    let cfg = SolverConfig::new(60, 1e-8, 1000);
    for outer in [OuterMethod::Fcmrh, OuterMethod::Fgmres] {
        for inner in [InnerMethod::Hessen, InnerMethod::Fom] {
            let mut last = usize::MAX;
            for it in [1usize, 2, 4, 8, 16] {
                let rep = nested_solve(&p, outer, inner, it, &cfg).unwrap();
                assert!(rep.all_converged(), "{outer:?}/{inner:?} it_in={it}");
                assert!(rep.cycles <= last.saturating_add(1), "{outer:?}/{inner:?} it_in={it}");
                last = rep.cycles;
            }
        }
    }
}

#[test]
fn shifted_runs_share_one_product_stream() {
    let mut rng = StdRng::seed_from_u64(24);
    let a = random_sparse(&mut rng, 100, 4, 4.0);
    let b = random_vec(&mut rng, 100);
    let cfg = SolverConfig::new(8, 1e-10, 2000);
    let p = ShiftedProblem::new(a, b, vec![0.0, -0.3, -1.0, 0.2], SeedPolicy::Zero).unwrap();
    for rep in [shiftsolve::shifted_cmrh(&p, &cfg).unwrap(), shiftsolve::shifted_gmres(&p, &cfg).unwrap()] {
        assert!(rep.all_converged());
        for s in &rep.shifts {
            assert!(s.residual_history.len() <= rep.cycles + 1);
            assert!(s.final_true_residual <= 10.0 * cfg.tol);
        }
    }
}
