//! Nested inner-outer solvers: a flexible CMRH or GMRES outer loop on the
//! seed operator, preconditioned by fixed-step msHessen or msFOM.
//!
//! Each outer step runs one inner solve on basis vector `l_j`, producing
//! `z_j⁽⁰⁾` for the seed and `z_j⁽ⁱ⁾` with ratio `γ_j⁽ⁱ⁾` for every shift.
//! The outer basis is extended with `A z_j⁽⁰⁾`; shift `i` then solves a small
//! least-squares problem with `(Ȟ − I̲) Γ⁽ⁱ⁾ + I̲`.

use crate::dense::{hessenberg_lsq, HessenbergMatrix};
use crate::error::{check_dim, Error, Result};
use crate::krylov::{start_basis, BasisKind, KrylovBasis};
use crate::scalar::Scalar;
use crate::seed::{FlopCounters, HistoryPoint, SolverConfig};
use crate::shifted::{inner_shifted, MultiShiftReport, ShiftResult, ShiftStatus, ShiftedProblem};
use crate::sparse::{Counted, LinearOperator, Shifted};
use crate::vector::{combine, norm2, sub};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OuterMethod {
    /// Flexible CMRH on the pivoted Hessenberg basis.
    Fcmrh,
    /// Flexible GMRES on the Arnoldi basis.
    Fgmres,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerMethod {
    /// Multi-shift Hessenberg.
    Hessen,
    /// Multi-shift FOM.
    Fom,
}

impl OuterMethod {
    fn basis(self) -> BasisKind {
        match self {
            OuterMethod::Fcmrh => BasisKind::Hessenberg,
            OuterMethod::Fgmres => BasisKind::Arnoldi,
        }
    }
}

impl InnerMethod {
    fn basis(self) -> BasisKind {
        match self {
            InnerMethod::Hessen => BasisKind::Hessenberg,
            InnerMethod::Fom => BasisKind::Arnoldi,
        }
    }
}

/// Per-shift diagonal entries `γ_1⁽ⁱ⁾ … γ_j⁽ⁱ⁾`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CollinearityDiagonal<T> {
    entries: Vec<T>,
}

impl<T: Scalar> CollinearityDiagonal<T> {
    pub fn new() -> Self {
        CollinearityDiagonal { entries: Vec::new() }
    }

    pub fn from_entries(entries: Vec<T>) -> Self {
        CollinearityDiagonal { entries }
    }

    pub fn push(&mut self, g: T) {
        self.entries.push(g);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// Steps whose inner solve left a zero factor.
    pub fn zero_steps(&self) -> Vec<usize> {
        (0..self.entries.len()).filter(|&j| self.entries[j] == T::zero()).collect()
    }
}

/// Returns `(Ȟ − I̲) diag(γ) + I̲` where `I̲ = [I_m; 0]`.
///
/// Columns with `γ_j = 1` are copied unchanged, so an all-ones diagonal
/// reproduces `Ȟ` bit for bit.
pub fn assemble_flexible_hessenberg<T: Scalar>(
    h: &HessenbergMatrix<T>,
    gamma: &CollinearityDiagonal<T>,
) -> Result<HessenbergMatrix<T>> {
    check_dim(h.cols(), gamma.len())?;
    let mut out = h.clone();
    for (j, &g) in gamma.entries().iter().enumerate() {
        if g == T::one() {
            continue;
        }
        let col = out.column_mut(j);
        for (k, v) in col.iter_mut().enumerate() {
            *v = if k == j { (*v - T::one()) * g + T::one() } else { *v * g };
        }
    }
    Ok(out)
}

/// Flexible search spaces for the seed and every shift.
#[derive(Clone, Debug)]
pub struct NestedSearchSpaces<T> {
    pub seed: Vec<Vec<T>>,
    pub shifts: Vec<Vec<Vec<T>>>,
    pub gammas: Vec<CollinearityDiagonal<T>>,
}

impl<T: Scalar> NestedSearchSpaces<T> {
    pub fn new(shift_count: usize) -> Self {
        NestedSearchSpaces {
            seed: Vec::new(),
            shifts: vec![Vec::new(); shift_count],
            gammas: vec![CollinearityDiagonal::new(); shift_count],
        }
    }

    pub fn width(&self) -> usize {
        self.seed.len()
    }

    /// n-vectors held: `(t_s + 1)·j` search directions plus `j + 1` outer
    /// basis columns.
    pub fn stored_columns(&self) -> usize {
        let j = self.width();
        (self.shifts.len() + 1) * j + (j + 1)
    }
}

/// State handed to observers after every outer step.
pub struct NestedSnapshot<'a, T: Scalar> {
    pub step: usize,
    pub outer_basis: &'a dyn KrylovBasis<T>,
    pub spaces: &'a NestedSearchSpaces<T>,
    /// `σ_i − σ_seed`, the shifts the search spaces were built for.
    pub relative_shifts: &'a [T],
    pub solutions: &'a [Vec<T>],
    pub active: &'a [bool],
}

pub fn nested_solve<T: Scalar>(
    problem: &ShiftedProblem<T>,
    outer: OuterMethod,
    inner: InnerMethod,
    inner_steps: usize,
    cfg: &SolverConfig,
) -> Result<MultiShiftReport<T>> {
    nested_solve_observed(problem, outer, inner, inner_steps, cfg, &mut |_| {})
}

/// Extends the outer basis by one step with `u = Op z` in place of
/// `Op l_j`; returns the breakdown flag.
pub fn outer_basis_step<T: Scalar, O: LinearOperator<T> + ?Sized>(
    op: &O,
    basis: &mut dyn KrylovBasis<T>,
    z: &[T],
) -> bool {
    let mut u = vec![T::zero(); z.len()];
    op.apply(z, &mut u);
    basis.extend(u) == crate::krylov::StepOutcome::Breakdown
}

pub fn nested_solve_observed<T: Scalar>(
    problem: &ShiftedProblem<T>,
    outer: OuterMethod,
    inner: InnerMethod,
    inner_steps: usize,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&NestedSnapshot<'_, T>),
) -> Result<MultiShiftReport<T>> {
    cfg.validate()?;
    if inner_steps == 0 {
        return Err(Error::InvalidArgument("inner step count must be at least 1".into()));
    }
    let seed_op = problem.seed_operator();
    let outer_op = Counted::new(&seed_op);
    let inner_op = Counted::new(&seed_op);
    let b = problem.rhs();
    let n = b.len();
    let bnorm = norm2(b);
    let target = cfg.tol * bnorm;
    let rel = problem.relative_shifts();
    let ts = rel.len();
    let nnz = seed_op.nnz() as u64;

    let mut basis = start_basis(outer.basis(), b, cfg.breakdown_factor * seed_op.norm_estimate())?;
    let alpha = basis.scale();
    let mut spaces = NestedSearchSpaces::new(ts);
    let mut xs = vec![vec![T::zero(); n]; ts];
    let mut x_seed = vec![T::zero(); n];
    let mut active = vec![true; ts];
    let mut status = vec![ShiftStatus::NotConverged; ts];
    let mut converged_at = vec![None; ts];
    let mut final_res = vec![1.0; ts];
    let start = HistoryPoint {
        mvps: 0,
        relative_residual: 1.0,
    };
    let mut histories = vec![vec![start]; ts];
    let mut seed_history = vec![start];
    let mut residual_checks = 0u64;
    let mut flops = FlopCounters::default();
    let mut diagnostics = Vec::new();
    let mut peak = 1usize;
    let mut steps = 0usize;
    let mut inner_flops = 0u64;

    while steps < cfg.restart && active.iter().any(|&a| a) {
        let lj = basis.next_vector().to_vec();
        let inn = inner_shifted(inner.basis(), &inner_op, &rel, &lj, inner_steps)?;
        inner_flops += inn.flops;
        let breakdown = outer_basis_step(&outer_op, basis.as_mut(), &inn.z_seed);
        steps += 1;
        for i in 0..ts {
            if inn.failed[i] && active[i] {
                active[i] = false;
                status[i] = ShiftStatus::InnerFailure;
                diagnostics.push(format!(
                    "step {steps}: inner solve singular for shift {}",
                    problem.shifts()[i]
                ));
            } else if inn.gamma[i] == T::zero() && active[i] {
                diagnostics.push(format!("step {steps}: zero inner ratio for shift {}", problem.shifts()[i]));
            }
        }
        spaces.seed.push(inn.z_seed);
        for (i, (z, g)) in inn.z.into_iter().zip(inn.gamma).enumerate() {
            spaces.shifts[i].push(z);
            spaces.gammas[i].push(g);
        }
        peak = peak.max(spaces.stored_columns());

        let h = basis.hessenberg();
        let seed_sol = hessenberg_lsq(h, alpha);
        if let Ok(s) = &seed_sol {
            flops.seed_lsq += s.flops;
            x_seed = combine(&spaces.seed, &s.y, n);
        }
        seed_history.push(HistoryPoint {
            mvps: outer_op.mvps(),
            relative_residual: seed_sol.as_ref().map_or(f64::NAN, |s| {
                norm2(&combine(basis.columns(), &s.u, n)) / bnorm
            }),
        });
        for i in 0..ts {
            if !active[i] {
                continue;
            }
            let hf = assemble_flexible_hessenberg(h, &spaces.gammas[i])?;
            let sol = match hessenberg_lsq(&hf, alpha) {
                Ok(s) => s,
                Err(Error::Singular { .. }) => {
                    diagnostics.push(format!("step {steps}: flexible factor singular for shift {}", problem.shifts()[i]));
                    continue;
                }
                Err(e) => return Err(e),
            };
            flops.shift_lsq += sol.flops;
            xs[i] = combine(&spaces.shifts[i], &sol.y, n);
            flops.vector_updates += 2 * (n * steps) as u64;
            let sh = Shifted::new(problem.matrix(), problem.shifts()[i]);
            let check = Counted::new(&sh);
            let r = sub(b, &check.matvec(&xs[i])?);
            residual_checks += check.mvps();
            let relres = norm2(&r) / bnorm;
            final_res[i] = relres;
            histories[i].push(HistoryPoint {
                mvps: outer_op.mvps(),
                relative_residual: relres,
            });
            if norm2(&r) < target {
                active[i] = false;
                status[i] = ShiftStatus::Converged;
                converged_at[i] = Some(steps);
            }
        }
        observer(&NestedSnapshot {
            step: steps,
            outer_basis: basis.as_ref(),
            spaces: &spaces,
            relative_shifts: &rel,
            solutions: &xs,
            active: &active,
        });
        if breakdown {
            break;
        }
    }

    flops.basis_build = basis.flops() + inner_flops + 2 * nnz * (outer_op.mvps() + inner_op.mvps());
    let shifts = (0..ts)
        .map(|i| ShiftResult {
            shift: problem.shifts()[i],
            solution: std::mem::take(&mut xs[i]),
            status: status[i],
            converged_at: converged_at[i],
            residual_history: std::mem::take(&mut histories[i]),
            gammas: spaces.gammas[i].entries().to_vec(),
            final_true_residual: final_res[i],
        })
        .collect();
    Ok(MultiShiftReport {
        shifts,
        seed_solution: x_seed,
        seed_residual_history: seed_history,
        cycles: steps,
        mvps: outer_op.mvps(),
        inner_mvps: inner_op.mvps(),
        residual_check_mvps: residual_checks,
        flops,
        peak_stored_columns: peak,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shifted::SeedPolicy;
    use crate::sparse::SparseMatrix;

    fn hm(rows: &[&[f64]]) -> HessenbergMatrix<f64> {
        HessenbergMatrix::from_dense(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn flexible_factor_examples() {
        let h = hm(&[&[2.0], &[1.0]]);
        let ones = CollinearityDiagonal::from_entries(vec![1.0]);
        assert_eq!(assemble_flexible_hessenberg(&h, &ones).unwrap(), h);
        let g = CollinearityDiagonal::from_entries(vec![2.0 / 3.0]);
        let f = assemble_flexible_hessenberg(&h, &g).unwrap().to_dense();
        assert!((f[0][0] - 5.0 / 3.0).abs() < 1e-15);
        assert!((f[1][0] - 2.0 / 3.0).abs() < 1e-15);
        assert!(assemble_flexible_hessenberg(&h, &CollinearityDiagonal::new()).is_err());
    }

    #[test]
    fn two_column_factor() {
        let h = hm(&[&[2.0, 1.0], &[1.0, 3.0], &[0.0, 0.5]]);
        let g = CollinearityDiagonal::from_entries(vec![1.0, 0.5]);
        let f = assemble_flexible_hessenberg(&h, &g).unwrap().to_dense();
        assert_eq!(f, vec![vec![2.0, 0.5], vec![1.0, 2.0], vec![0.0, 0.25]]);
        assert_eq!(g.zero_steps(), Vec::<usize>::new());
    }

    #[test]
    fn diag_full_inner_space() {
        let p = ShiftedProblem::new(
            SparseMatrix::from_diagonal(&[2.0, 3.0]),
            vec![1.0, 1.0],
            vec![0.0, -1.0],
            SeedPolicy::Zero,
        )
        .unwrap();
        for outer in [OuterMethod::Fcmrh, OuterMethod::Fgmres] {
            for inner in [InnerMethod::Hessen, InnerMethod::Fom] {
                let rep = nested_solve(&p, outer, inner, 2, &SolverConfig::new(5, 1e-12, 100)).unwrap();
                assert!(rep.all_converged(), "{outer:?}/{inner:?}");
                assert_eq!(rep.cycles, 1);
                for s in &rep.shifts {
                    assert!(s.final_true_residual < 1e-12);
                }
                assert_eq!(rep.residual_check_mvps, 2);
                assert_eq!(rep.peak_stored_columns, 3 + 2);
            }
        }
    }

    #[test]
    fn single_zero_shift_has_unit_ratios() {
        let a = SparseMatrix::from_dense(&[
            vec![5.0, 1.0, 0.0, 0.0],
            vec![-1.0, 5.0, 1.0, 0.0],
            vec![0.0, -1.0, 5.0, 1.0],
            vec![0.5, 0.0, -1.0, 5.0],
        ])
        .unwrap();
        let p = ShiftedProblem::new(a, vec![1.0, 0.0, 2.0, -1.0], vec![0.0], SeedPolicy::Zero).unwrap();
        let mut checked = 0;
        let rep = nested_solve_observed(&p, OuterMethod::Fcmrh, InnerMethod::Hessen, 1, &SolverConfig::new(4, 1e-12, 100), &mut |s| {
            let h = s.outer_basis.hessenberg();
            assert_eq!(&assemble_flexible_hessenberg(h, &s.spaces.gammas[0]).unwrap(), h);
            checked += 1;
        })
        .unwrap();
        assert!(checked >= 1);
        assert!(rep.shifts[0].gammas.iter().all(|&g| g == 1.0));
    }

    #[test]
    fn outer_cap_reports_failure() {
        let n = 30;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + i as f64));
            if i + 1 < n {
                t.push((i, i + 1, 1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, t).unwrap();
        let p = ShiftedProblem::new(a, vec![1.0; n], vec![0.0, -0.5], SeedPolicy::Zero).unwrap();
        let rep = nested_solve(&p, OuterMethod::Fgmres, InnerMethod::Fom, 1, &SolverConfig::new(2, 1e-14, 100)).unwrap();
        assert_eq!(rep.cycles, 2);
        assert!(!rep.all_converged());
        assert_eq!(rep.inner_mvps, 2);
        assert_eq!(rep.mvps, 2);
    }
}
