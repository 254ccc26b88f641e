//! Restarted shifted CMRH and GMRES with collinear residuals, and the
//! fixed-step multi-shift Hessenberg/FOM routines used as inner solvers.
//!
//! All shifted systems share the seed's basis. After each cycle the add
//! systems keep `r⁽ⁱ⁾ = γ⁽ⁱ⁾ r_seed`, so the next cycle can start from the
//! seed residual alone.

use crate::dense::{hessenberg_lsq, shift_hessenberg, solve_bordered, solve_square_hessenberg_shifted};
use crate::error::{check_dim, Error, Result};
use crate::krylov::{start_basis, BasisKind, StepOutcome, BREAKDOWN_FACTOR};
use crate::scalar::Scalar;
use crate::seed::{confirm_converged, run_cycle, true_residual, FlopCounters, HistoryPoint, SolverConfig};
use crate::sparse::{Counted, LinearOperator, Shifted, SparseMatrix};
use crate::vector::{axpy, combine, norm2};

/// Which system's basis is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedPolicy {
    /// Build on `A` itself (shift 0), which need not be in the list.
    Zero,
    /// Build on `A − σ_k I`; every other shift is taken relative to `σ_k`.
    Shift(usize),
}

#[derive(Clone, Debug)]
pub struct ShiftedProblem<T> {
    matrix: SparseMatrix<T>,
    rhs: Vec<T>,
    shifts: Vec<T>,
    seed: SeedPolicy,
}

impl<T: Scalar> ShiftedProblem<T> {
    pub fn new(matrix: SparseMatrix<T>, rhs: Vec<T>, shifts: Vec<T>, seed: SeedPolicy) -> Result<Self> {
        check_dim(matrix.dim(), rhs.len())?;
        if shifts.is_empty() {
            return Err(Error::InvalidArgument("shift list is empty".into()));
        }
        for (i, s) in shifts.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::InvalidArgument(format!("shift {i} is not finite")));
            }
            if shifts[..i].contains(s) {
                return Err(Error::InvalidArgument(format!("shift {s} appears twice")));
            }
        }
        if let SeedPolicy::Shift(k) = seed {
            if k >= shifts.len() {
                return Err(Error::InvalidArgument(format!(
                    "seed index {k} out of range for {} shifts",
                    shifts.len()
                )));
            }
        }
        if norm2(&rhs) == 0.0 {
            return Err(Error::InvalidArgument("right-hand side is zero".into()));
        }
        Ok(ShiftedProblem {
            matrix,
            rhs,
            shifts,
            seed,
        })
    }

    pub fn matrix(&self) -> &SparseMatrix<T> {
        &self.matrix
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    pub fn shifts(&self) -> &[T] {
        &self.shifts
    }

    pub fn seed(&self) -> SeedPolicy {
        self.seed
    }

    pub fn seed_shift(&self) -> T {
        match self.seed {
            SeedPolicy::Zero => T::zero(),
            SeedPolicy::Shift(k) => self.shifts[k],
        }
    }

    /// `σ_i − σ_seed`; exactly zero for the seed's own entry.
    pub fn relative_shifts(&self) -> Vec<T> {
        let s = self.seed_shift();
        self.shifts
            .iter()
            .enumerate()
            .map(|(i, &v)| if self.seed == SeedPolicy::Shift(i) { T::zero() } else { v - s })
            .collect()
    }

    /// `A − σ_seed I`, applied lazily.
    pub fn seed_operator(&self) -> Shifted<'_, T> {
        Shifted::new(&self.matrix, self.seed_shift())
    }

    /// `b − (A − σ_i I) x`, without touching any solver counter.
    pub fn residual(&self, i: usize, x: &[T]) -> Vec<T> {
        let sh = Shifted::new(&self.matrix, self.shifts[i]);
        let mut y = vec![T::zero(); x.len()];
        sh.apply(x, &mut y);
        crate::vector::sub(&self.rhs, &y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftStatus {
    Converged,
    NotConverged,
    /// The bordered system stayed singular for three consecutive cycles.
    ResidualPolynomialVanished,
    /// An inner solve was singular for this shift.
    InnerFailure,
}

#[derive(Clone, Debug)]
pub struct ShiftResult<T> {
    pub shift: T,
    pub solution: Vec<T>,
    pub status: ShiftStatus,
    /// Cycle (outer step for nested solvers) at which the shift converged.
    pub converged_at: Option<usize>,
    /// Monitored relative residual per cycle while active.
    pub residual_history: Vec<HistoryPoint>,
    /// Collinearity factor after each cycle while active.
    pub gammas: Vec<T>,
    /// `‖b − (A − σ_i I) x‖₂ / ‖b‖₂` for the returned solution.
    pub final_true_residual: f64,
}

impl<T> ShiftResult<T> {
    pub fn converged(&self) -> bool {
        self.status == ShiftStatus::Converged
    }
}

#[derive(Clone, Debug)]
pub struct MultiShiftReport<T> {
    pub shifts: Vec<ShiftResult<T>>,
    pub seed_solution: Vec<T>,
    pub seed_residual_history: Vec<HistoryPoint>,
    /// Restart cycles, or outer steps for nested solvers.
    pub cycles: usize,
    /// Products spent building the (outer) basis.
    pub mvps: u64,
    /// Products spent inside inner solvers.
    pub inner_mvps: u64,
    /// Products spent on explicit residual evaluations.
    pub residual_check_mvps: u64,
    pub flops: FlopCounters,
    /// Peak number of stored n-vectors (basis plus search spaces).
    pub peak_stored_columns: usize,
    pub diagnostics: Vec<String>,
}

impl<T> MultiShiftReport<T> {
    pub fn all_converged(&self) -> bool {
        self.shifts.iter().all(|s| s.converged())
    }

    pub fn total_mvps(&self) -> u64 {
        self.mvps + self.inner_mvps + self.residual_check_mvps
    }
}

/// State handed to observers after every restart cycle.
#[derive(Debug)]
pub struct CycleSnapshot<'a, T> {
    pub cycle: usize,
    pub mvps: u64,
    pub seed_solution: &'a [T],
    /// `L_{m+1} u`, the seed residual the collinearity factors refer to.
    pub seed_residual: &'a [T],
    pub solutions: &'a [Vec<T>],
    /// Collinearity factors at the start of the cycle.
    pub gamma_start: &'a [T],
    /// Collinearity factors at the end of the cycle.
    pub gamma: &'a [T],
    /// Shifts that were updated during the cycle.
    pub updated: &'a [bool],
}

pub fn shifted_cmrh<T: Scalar>(problem: &ShiftedProblem<T>, cfg: &SolverConfig) -> Result<MultiShiftReport<T>> {
    restarted_shifted(BasisKind::Hessenberg, problem, cfg, &mut |_| {})
}

pub fn shifted_gmres<T: Scalar>(problem: &ShiftedProblem<T>, cfg: &SolverConfig) -> Result<MultiShiftReport<T>> {
    restarted_shifted(BasisKind::Arnoldi, problem, cfg, &mut |_| {})
}

/// [`shifted_cmrh`] with a callback after every cycle.
pub fn shifted_cmrh_observed<T: Scalar>(
    problem: &ShiftedProblem<T>,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&CycleSnapshot<'_, T>),
) -> Result<MultiShiftReport<T>> {
    restarted_shifted(BasisKind::Hessenberg, problem, cfg, observer)
}

/// [`shifted_gmres`] with a callback after every cycle.
pub fn shifted_gmres_observed<T: Scalar>(
    problem: &ShiftedProblem<T>,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&CycleSnapshot<'_, T>),
) -> Result<MultiShiftReport<T>> {
    restarted_shifted(BasisKind::Arnoldi, problem, cfg, observer)
}

const SINGULAR_CYCLES_BEFORE_ABORT: usize = 3;

fn restarted_shifted<T: Scalar>(
    kind: BasisKind,
    problem: &ShiftedProblem<T>,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&CycleSnapshot<'_, T>),
) -> Result<MultiShiftReport<T>> {
    cfg.validate()?;
    let seed_op = problem.seed_operator();
    let basis_op = Counted::new(&seed_op);
    let check_op = Counted::new(&seed_op);
    let b = problem.rhs();
    let n = b.len();
    let bnorm = norm2(b);
    let target = cfg.tol * bnorm;
    let breakdown_scale = cfg.breakdown_factor * seed_op.norm_estimate();
    let nnz = seed_op.nnz() as u64;
    let rel = problem.relative_shifts();
    let ts = rel.len();

    let mut x_seed = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut rnorm = bnorm;
    let mut xs = vec![vec![T::zero(); n]; ts];
    let mut gamma = vec![T::one(); ts];
    let mut status = vec![ShiftStatus::NotConverged; ts];
    let mut active = vec![true; ts];
    let mut singular_streak = vec![0usize; ts];
    let mut converged_at = vec![None; ts];
    let mut histories: Vec<Vec<HistoryPoint>> = vec![
        vec![HistoryPoint {
            mvps: 0,
            relative_residual: 1.0,
        }];
        ts
    ];
    let mut gamma_hist: Vec<Vec<T>> = vec![Vec::new(); ts];
    let mut seed_history = vec![HistoryPoint {
        mvps: 0,
        relative_residual: 1.0,
    }];
    let mut flops = FlopCounters::default();
    let mut diagnostics = Vec::new();
    let mut cycles = 0usize;
    let mut peak_cols = 0usize;

    while active.iter().any(|&a| a) {
        let m_cycle = (cfg.restart as u64).min(cfg.max_mvps.saturating_sub(basis_op.mvps())) as usize;
        if m_cycle == 0 {
            break;
        }
        if rnorm == 0.0 {
            // exact seed solution: every collinear residual vanished too
            for i in 0..ts {
                if active[i] {
                    active[i] = false;
                    status[i] = ShiftStatus::Converged;
                    converged_at[i] = Some(cycles);
                }
            }
            break;
        }
        let seed_only = (0..ts).all(|i| !active[i] || rel[i] == T::zero());
        let cyc = run_cycle(kind, &basis_op, &r, m_cycle, breakdown_scale, |c| {
            seed_only && confirm_converged(c, target)
        })?;
        let m = cyc.basis.steps();
        let alpha = cyc.alpha();
        let h = cyc.h();
        let mut lsq = cyc.lsq.clone();
        let y = lsq.solve()?;
        let u = cyc.quasi_residual(&y);
        let cols = cyc.basis.columns();
        peak_cols = peak_cols.max(cols.len() + ts + 2);

        for (col, &yi) in cols.iter().zip(&y) {
            axpy(yi, col, &mut x_seed);
        }
        flops.basis_build += cyc.basis.flops() + 2 * nnz * m as u64;
        flops.seed_lsq += lsq.flops() + 2 * (m * m) as u64;
        flops.vector_updates += 2 * (n * m) as u64 + 2 * (n * (m + 1)) as u64;

        let gamma_start = gamma.clone();
        let mut updated = vec![false; ts];
        for i in 0..ts {
            if !active[i] {
                continue;
            }
            let g0 = gamma[i];
            let step = if rel[i] == T::zero() {
                Ok((y.iter().map(|&v| v * g0).collect::<Vec<T>>(), g0))
            } else if cyc.basis.breakdown() {
                // u = 0: the bordered matrix is singular, but the space holds
                // the exact shifted solution
                let hs = shift_hessenberg(h, rel[i]);
                hessenberg_lsq(&hs, g0 * alpha).map(|s| {
                    flops.shift_lsq += s.flops;
                    (s.y, T::zero())
                })
            } else {
                let hs = shift_hessenberg(h, rel[i]);
                solve_bordered(&hs, &u, g0 * alpha).map(|s| {
                    flops.shift_lsq += s.flops;
                    (s.y, s.gamma)
                })
            };
            match step {
                Ok((yi, g)) => {
                    for (col, &c) in cols.iter().zip(&yi) {
                        axpy(c, col, &mut xs[i]);
                    }
                    flops.vector_updates += 2 * (n * m) as u64;
                    gamma[i] = g;
                    singular_streak[i] = 0;
                    updated[i] = true;
                }
                Err(Error::ResidualPolynomialVanishes) | Err(Error::Singular { .. }) => {
                    singular_streak[i] += 1;
                    diagnostics.push(format!(
                        "cycle {}: residual polynomial vanishes at shift {}",
                        cycles + 1,
                        problem.shifts()[i]
                    ));
                    if singular_streak[i] >= SINGULAR_CYCLES_BEFORE_ABORT {
                        active[i] = false;
                        status[i] = ShiftStatus::ResidualPolynomialVanished;
                    }
                }
                Err(e) => return Err(e),
            }
        }

        let r_cycle = cyc.lift(&u);
        let rnorm_cycle = norm2(&r_cycle);
        cycles += 1;
        let mvps = basis_op.mvps();
        for i in 0..ts {
            if !updated[i] {
                continue;
            }
            let est = gamma[i].modulus() * rnorm_cycle;
            gamma_hist[i].push(gamma[i]);
            histories[i].push(HistoryPoint {
                mvps,
                relative_residual: est / bnorm,
            });
            if est < target {
                active[i] = false;
                status[i] = ShiftStatus::Converged;
                converged_at[i] = Some(cycles);
            }
        }
        observer(&CycleSnapshot {
            cycle: cycles,
            mvps,
            seed_solution: &x_seed,
            seed_residual: &r_cycle,
            solutions: &xs,
            gamma_start: &gamma_start,
            gamma: &gamma,
            updated: &updated,
        });

        if cyc.basis.breakdown() {
            r = true_residual(&check_op, b, &x_seed);
        } else {
            r = r_cycle;
        }
        rnorm = norm2(&r);
        seed_history.push(HistoryPoint {
            mvps,
            relative_residual: rnorm / bnorm,
        });
    }

    let mut results = Vec::with_capacity(ts);
    for (i, x) in xs.into_iter().enumerate() {
        let res = problem.residual(i, &x);
        results.push(ShiftResult {
            shift: problem.shifts()[i],
            solution: x,
            status: status[i],
            converged_at: converged_at[i],
            residual_history: std::mem::take(&mut histories[i]),
            gammas: std::mem::take(&mut gamma_hist[i]),
            final_true_residual: norm2(&res) / bnorm,
        });
    }

    Ok(MultiShiftReport {
        shifts: results,
        seed_solution: x_seed,
        seed_residual_history: seed_history,
        cycles,
        mvps: basis_op.mvps(),
        inner_mvps: 0,
        residual_check_mvps: check_op.mvps() + ts as u64,
        flops,
        peak_stored_columns: peak_cols,
        diagnostics,
    })
}

/// Output of a fixed-step multi-shift inner solve.
#[derive(Clone, Debug)]
pub struct InnerSolve<T> {
    /// Approximate solution of `A z = v`.
    pub z_seed: Vec<T>,
    /// Approximate solutions of `(A − σ_i I) z = v`.
    pub z: Vec<Vec<T>>,
    /// `β_i / β_0`, the inner residual ratio.
    pub gamma: Vec<T>,
    /// Residual coefficients along the last basis vector.
    pub beta_seed: T,
    pub betas: Vec<T>,
    /// Steps actually taken (fewer than requested after breakdown).
    pub steps: usize,
    pub mvps: u64,
    pub flops: u64,
    /// Shifts whose square solve was singular; their `z` is zero.
    pub failed: Vec<bool>,
    /// The basis column the residuals point along, when one exists.
    pub residual_direction: Option<Vec<T>>,
}

/// Fixed-step multi-shift Hessenberg (msHessen): one pivoted Hessenberg
/// basis on `a`, one square shifted solve per shift.
pub fn inner_shifted_hessenberg<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    sigmas: &[T],
    v: &[T],
    steps: usize,
) -> Result<InnerSolve<T>> {
    inner_shifted(BasisKind::Hessenberg, a, sigmas, v, steps)
}

/// Fixed-step multi-shift FOM (msFOM) on the Arnoldi basis.
pub fn inner_shifted_fom<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    sigmas: &[T],
    v: &[T],
    steps: usize,
) -> Result<InnerSolve<T>> {
    inner_shifted(BasisKind::Arnoldi, a, sigmas, v, steps)
}

pub(crate) fn inner_shifted<T: Scalar, O: LinearOperator<T> + ?Sized>(
    kind: BasisKind,
    a: &O,
    sigmas: &[T],
    v: &[T],
    steps: usize,
) -> Result<InnerSolve<T>> {
    check_dim(a.dim(), v.len())?;
    if steps == 0 {
        return Err(Error::InvalidArgument("inner step count must be at least 1".into()));
    }
    let op = Counted::new(a);
    let mut basis = start_basis(kind, v, BREAKDOWN_FACTOR * a.norm_estimate())?;
    let mut u = vec![T::zero(); v.len()];
    for _ in 0..steps {
        op.apply(basis.next_vector(), &mut u);
        if basis.extend(u.clone()) == StepOutcome::Breakdown {
            break;
        }
    }
    let k = basis.steps();
    let n = v.len();
    let h = basis.hessenberg();
    let alpha = basis.scale();
    let cols = basis.columns();
    let mut flops = basis.flops() + 2 * (a.nnz() * k) as u64;

    let seed = solve_square_hessenberg_shifted(h, T::zero(), alpha)?;
    flops += seed.flops + 2 * (n * k) as u64;
    let z_seed = combine(cols, &seed.y, n);
    let beta0 = seed.beta_last;

    let mut z = Vec::with_capacity(sigmas.len());
    let mut gamma = Vec::with_capacity(sigmas.len());
    let mut betas = Vec::with_capacity(sigmas.len());
    let mut failed = vec![false; sigmas.len()];
    for (i, &s) in sigmas.iter().enumerate() {
        if s == T::zero() {
            z.push(z_seed.clone());
            gamma.push(T::one());
            betas.push(beta0);
            continue;
        }
        match solve_square_hessenberg_shifted(h, s, alpha) {
            Ok(sol) => {
                flops += sol.flops + 2 * (n * k) as u64;
                z.push(combine(cols, &sol.y, n));
                let g = if beta0 != T::zero() {
                    sol.beta_last / beta0
                } else if basis.breakdown() {
                    // every inner residual is zero
                    T::one()
                } else {
                    T::zero()
                };
                gamma.push(g);
                betas.push(sol.beta_last);
            }
            Err(Error::Singular { .. }) => {
                failed[i] = true;
                z.push(vec![T::zero(); n]);
                gamma.push(T::zero());
                betas.push(T::zero());
            }
            Err(e) => return Err(e),
        }
    }
    Ok(InnerSolve {
        z_seed,
        z,
        gamma,
        beta_seed: beta0,
        betas,
        steps: k,
        mvps: op.mvps(),
        flops,
        failed,
        residual_direction: cols.get(k).cloned(),
    })
}
