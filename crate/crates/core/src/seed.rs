//! Restarted single-system solvers: CMRH(m) on the pivoted Hessenberg basis
//! and GMRES(m) on the Arnoldi basis.

use crate::dense::{GivensLsq, HessenbergMatrix};
use crate::error::{check_dim, Error, Result};
use crate::krylov::{start_basis, BasisKind, KrylovBasis, StepOutcome};
use crate::scalar::Scalar;
use crate::sparse::{Counted, LinearOperator};
use crate::vector::{axpy, combine, norm2, sub};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Restart length m (outer step cap for nested solvers).
    pub restart: usize,
    /// Relative residual threshold ‖r‖₂/‖b‖₂.
    pub tol: f64,
    /// Budget of basis matrix-vector products.
    pub max_mvps: u64,
    /// Breakdown threshold factor, multiplied by ‖A‖_F.
    pub breakdown_factor: f64,
    /// Recompute `b − A x` at every restart instead of `L u`.
    pub explicit_residual_check: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restart: 40,
            tol: 1e-8,
            max_mvps: 6000,
            breakdown_factor: crate::krylov::BREAKDOWN_FACTOR,
            explicit_residual_check: false,
        }
    }
}

impl SolverConfig {
    pub fn new(restart: usize, tol: f64, max_mvps: u64) -> Self {
        SolverConfig {
            restart,
            tol,
            max_mvps,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restart == 0 {
            return Err(Error::InvalidArgument("restart length must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_mvps < self.restart as u64 {
            return Err(Error::InvalidArgument(format!(
                "mvp budget {} is smaller than the restart length {}",
                self.max_mvps, self.restart
            )));
        }
        Ok(())
    }
}

/// Flop totals split like a per-cycle cost table: basis construction
/// (operator products included), seed least squares, vector updates and
/// additional-shift small solves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlopCounters {
    pub basis_build: u64,
    pub seed_lsq: u64,
    pub vector_updates: u64,
    pub shift_lsq: u64,
}

impl FlopCounters {
    pub fn total(&self) -> u64 {
        self.basis_build + self.seed_lsq + self.vector_updates + self.shift_lsq
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoryPoint {
    /// Basis matrix-vector products spent when the value was recorded.
    pub mvps: u64,
    pub relative_residual: f64,
}

#[derive(Clone, Debug)]
pub struct SolveReport<T> {
    pub solution: Vec<T>,
    pub converged: bool,
    pub cycles: usize,
    /// Products spent building bases.
    pub mvps: u64,
    /// Products spent on explicit `b − A x` evaluations.
    pub residual_check_mvps: u64,
    /// Relative residual at start and after every cycle.
    pub residual_history: Vec<HistoryPoint>,
    /// Per cycle, the small least-squares residual after each step.
    pub quasi_residuals: Vec<Vec<f64>>,
    pub flops: FlopCounters,
}

/// Restarted CMRH(m).
pub fn cmrh<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    b: &[T],
    x0: &[T],
    cfg: &SolverConfig,
) -> Result<SolveReport<T>> {
    restarted(BasisKind::Hessenberg, a, b, x0, cfg)
}

/// Restarted GMRES(m).
pub fn gmres<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    b: &[T],
    x0: &[T],
    cfg: &SolverConfig,
) -> Result<SolveReport<T>> {
    restarted(BasisKind::Arnoldi, a, b, x0, cfg)
}

/// One restart cycle's basis together with its running least-squares state.
pub(crate) struct Cycle<T: Scalar> {
    pub basis: Box<dyn KrylovBasis<T>>,
    pub lsq: GivensLsq<T>,
    pub quasi: Vec<f64>,
}

impl<T: Scalar> Cycle<T> {
    pub fn alpha(&self) -> T {
        self.basis.scale()
    }

    pub fn h(&self) -> &HessenbergMatrix<T> {
        self.basis.hessenberg()
    }

    /// `α e₁ − H y`.
    pub fn quasi_residual(&self, y: &[T]) -> Vec<T> {
        let mut u: Vec<T> = self.h().mul_vec(y).into_iter().map(|v| -v).collect();
        u[0] += self.alpha();
        u
    }

    /// `L_{m+1} u`; after breakdown only m columns exist and `u_{m+1} = 0`.
    pub fn lift(&self, coef: &[T]) -> Vec<T> {
        combine(self.basis.columns(), coef, self.basis.dim())
    }
}

/// Builds up to `m_cycle` steps from `r0`. `stop_early` sees the cycle after
/// every step and may end it.
pub(crate) fn run_cycle<T, O, F>(
    kind: BasisKind,
    op: &Counted<'_, T, O>,
    r0: &[T],
    m_cycle: usize,
    breakdown_scale: f64,
    mut stop_early: F,
) -> Result<Cycle<T>>
where
    T: Scalar,
    O: LinearOperator<T> + ?Sized,
    F: FnMut(&Cycle<T>) -> bool,
{
    let basis = start_basis(kind, r0, breakdown_scale)?;
    let alpha = basis.scale();
    let mut cyc = Cycle {
        basis,
        lsq: GivensLsq::new(alpha),
        quasi: Vec::with_capacity(m_cycle),
    };
    let mut u = vec![T::zero(); r0.len()];
    for _ in 0..m_cycle {
        op.apply(cyc.basis.next_vector(), &mut u);
        let outcome = cyc.basis.extend(u.clone());
        let j = cyc.basis.steps() - 1;
        let q = cyc.lsq.push_column(cyc.basis.hessenberg().column(j));
        cyc.quasi.push(q);
        if outcome == StepOutcome::Breakdown || stop_early(&cyc) {
            break;
        }
    }
    Ok(cyc)
}

/// True residual `b − A x`, counted as one product on `op`.
pub(crate) fn true_residual<T: Scalar, O: LinearOperator<T> + ?Sized>(op: &Counted<'_, T, O>, b: &[T], x: &[T]) -> Vec<T> {
    let mut ax = vec![T::zero(); b.len()];
    op.apply(x, &mut ax);
    sub(b, &ax)
}

/// Early-exit test shared by the seed loops: the cheap quasi-residual must
/// pass first, then `L u` is formed to confirm.
pub(crate) fn confirm_converged<T: Scalar>(cyc: &Cycle<T>, target: f64) -> bool {
    if cyc.lsq.residual_norm() > target {
        return false;
    }
    let mut lsq = cyc.lsq.clone();
    let Ok(y) = lsq.solve() else { return false };
    let u = cyc.quasi_residual(&y);
    norm2(&cyc.lift(&u)) <= target
}

fn restarted<T: Scalar, O: LinearOperator<T> + ?Sized>(
    kind: BasisKind,
    a: &O,
    b: &[T],
    x0: &[T],
    cfg: &SolverConfig,
) -> Result<SolveReport<T>> {
    cfg.validate()?;
    let n = a.dim();
    check_dim(n, b.len())?;
    check_dim(n, x0.len())?;
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Err(Error::InvalidArgument("right-hand side is zero".into()));
    }
    let basis_op = Counted::new(a);
    let check_op = Counted::new(a);
    let breakdown_scale = cfg.breakdown_factor * a.norm_estimate();
    let target = cfg.tol * bnorm;
    let nnz = a.nnz() as u64;

    let mut x = x0.to_vec();
    let mut r = if x.iter().all(|v| *v == T::zero()) {
        b.to_vec()
    } else {
        true_residual(&check_op, b, &x)
    };
    let mut rnorm = norm2(&r);
    let mut report = SolveReport {
        solution: Vec::new(),
        converged: false,
        cycles: 0,
        mvps: 0,
        residual_check_mvps: 0,
        residual_history: vec![HistoryPoint {
            mvps: 0,
            relative_residual: rnorm / bnorm,
        }],
        quasi_residuals: Vec::new(),
        flops: FlopCounters::default(),
    };

    loop {
        if rnorm < target {
            report.converged = true;
            break;
        }
        let spent = basis_op.mvps();
        let m_cycle = (cfg.restart as u64).min(cfg.max_mvps.saturating_sub(spent)) as usize;
        if m_cycle == 0 {
            break;
        }
        let cyc = run_cycle(kind, &basis_op, &r, m_cycle, breakdown_scale, |c| confirm_converged(c, target))?;
        let m = cyc.basis.steps();
        let mut lsq = cyc.lsq.clone();
        let y = lsq.solve()?;
        let u = cyc.quasi_residual(&y);
        for (col, &yi) in cyc.basis.columns().iter().zip(&y) {
            axpy(yi, col, &mut x);
        }
        report.flops.basis_build += cyc.basis.flops() + 2 * nnz * m as u64;
        report.flops.seed_lsq += lsq.flops() + 2 * (m * m) as u64;
        report.flops.vector_updates += 2 * (n * m) as u64;

        r = if cfg.explicit_residual_check || cyc.basis.breakdown() {
            true_residual(&check_op, b, &x)
        } else {
            report.flops.vector_updates += 2 * (n * (m + 1)) as u64;
            cyc.lift(&u)
        };
        rnorm = norm2(&r);
        report.cycles += 1;
        report.quasi_residuals.push(cyc.quasi);
        report.residual_history.push(HistoryPoint {
            mvps: basis_op.mvps(),
            relative_residual: rnorm / bnorm,
        });
    }

    report.mvps = basis_op.mvps();
    report.residual_check_mvps = check_op.mvps();
    report.solution = x;
    Ok(report)
}
