//! Time stepping for the modal Galerkin system in Volterra form
//!
//! ```text
//! a(t) = a(0) + I^α[F](t),
//! F_i(t) = -λ_i M(σ(t)) a_i(t) + f_i(t) + ∫_0^t [β μ_i a_i(τ) + (G(t,τ) a(τ))_i] dτ,
//! σ(t) = Σ_j λ_j a_j(t)²,
//! ```
//!
//! advanced by the fractional Adams predictor-corrector. The memory integral is
//! a composite trapezoid over the grid nodes.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional_calculus::{AdamsTable, FirstCell, UniformTimeGrid};
use crate::problem_model::{memory_coupling_matrix, MemoryKernel, ProblemData};
use crate::special_functions::rgamma;

/// How the corrector treats the new value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectorKind {
    /// The diagonal part `-λ_i M + ½hβμ_i` is solved for exactly and the Kirchhoff
    /// scalar `M` by a bracketed root find on `M = M(σ(M))`; sweeps iterate only on
    /// the `b₀` coupling.
    #[default]
    LinearlyImplicit,
    /// Plain substitution `a ← H + c·F(a)`; stable only while `λ_max M h^α/Γ(α+2) < 1`.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: UniformTimeGrid,
    pub corrector_iterations: usize,
    pub fixed_point_tol: f64,
    pub mode_count: usize,
    pub corrector: CorrectorKind,
    pub first_cell: FirstCell,
}

impl SolverConfig {
    pub fn new(grid: UniformTimeGrid, mode_count: usize) -> Self {
        Self {
            grid,
            corrector_iterations: 2,
            fixed_point_tol: 1e-12,
            mode_count,
            corrector: CorrectorKind::default(),
            first_cell: FirstCell::Trapezoid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        const OP: &str = "SolverConfig::validate";
        if self.corrector_iterations == 0 {
            return Err(Error::domain(OP, "corrector_iterations must be at least 1"));
        }
        if !(self.fixed_point_tol > 0.0 && self.fixed_point_tol.is_finite()) {
            return Err(Error::domain(OP, "fixed_point_tol must be positive"));
        }
        if self.mode_count == 0 {
            return Err(Error::domain(OP, "mode_count must be at least 1"));
        }
        Ok(())
    }
}

/// Modal coefficients on the time grid, with the Kirchhoff state at each node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionHistory {
    grid: UniformTimeGrid,
    /// One row per mode, one entry per completed node.
    coefficients: Vec<Vec<f64>>,
    /// `σ_n = Σ λ_j a_j(t_n)²`.
    sigma: Vec<f64>,
    /// `M_n = M(σ_n)`.
    kirchhoff: Vec<f64>,
}

fn x0_squared(a: &[f64], lambda: &[f64]) -> f64 {
    a.iter().zip(lambda).map(|(x, l)| l * x * x).sum()
}

impl SolutionHistory {
    /// Rebuild a history from stored coefficient rows, recomputing the Kirchhoff state.
    pub fn from_coefficients(
        grid: UniformTimeGrid,
        coefficients: Vec<Vec<f64>>,
        problem: &ProblemData,
    ) -> Result<Self> {
        const OP: &str = "SolutionHistory::from_coefficients";
        if coefficients.len() != problem.mode_count() {
            return Err(Error::contract(
                OP,
                format!("{} rows for {} modes", coefficients.len(), problem.mode_count()),
            ));
        }
        let len = coefficients.first().map_or(0, Vec::len);
        if len == 0 || len > grid.len() || coefficients.iter().any(|r| r.len() != len) {
            return Err(Error::contract(OP, "rows must be nonempty, equal length, within the grid"));
        }
        let lambda = problem.assembly.eigenvalues();
        let mut sigma = Vec::with_capacity(len);
        let mut kirchhoff = Vec::with_capacity(len);
        for n in 0..len {
            let col: Vec<f64> = coefficients.iter().map(|r| r[n]).collect();
            let s = x0_squared(&col, lambda);
            sigma.push(s);
            kirchhoff.push(problem.law.eval(s));
        }
        Ok(Self {
            grid,
            coefficients,
            sigma,
            kirchhoff,
        })
    }

    pub fn grid(&self) -> &UniformTimeGrid {
        &self.grid
    }

    pub fn n_modes(&self) -> usize {
        self.coefficients.len()
    }

    /// Number of nodes with stored values (`n_steps + 1` for a completed run).
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.len() == self.grid.len()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.grid.node(n)).collect()
    }

    pub fn mode(&self, i: usize) -> &[f64] {
        &self.coefficients[i]
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    pub fn column(&self, n: usize) -> Vec<f64> {
        self.coefficients.iter().map(|r| r[n]).collect()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn kirchhoff(&self) -> &[f64] {
        &self.kirchhoff
    }

    fn push(&mut self, a: &[f64], sigma: f64, m: f64) {
        for (row, v) in self.coefficients.iter_mut().zip(a) {
            row.push(*v);
        }
        self.sigma.push(sigma);
        self.kirchhoff.push(m);
    }
}

/// Memory operator pieces that do not change during a run.
struct MemoryParts {
    beta_mu: Vec<f64>,
    /// `H_ij = (h φ_j, φ_i)` for separable `b₀ = g(t,τ) h(x)`.
    separable_h: Option<DMatrix<f64>>,
}

impl MemoryParts {
    fn new(problem: &ProblemData) -> Result<Self> {
        let mu = problem.memory_eigenvalues()?;
        let beta_mu = mu.iter().map(|m| problem.memory.beta * m).collect();
        let separable_h = match &problem.memory.b0 {
            MemoryKernel::Separable { h, .. } => {
                Some(problem.assembly.weighted_inner_products(|x| h(x))?)
            }
            _ => None,
        };
        Ok(Self {
            beta_mu,
            separable_h,
        })
    }

    /// `G(t, τ)`, or `None` when `b₀ ≡ 0`.
    fn coupling(&self, problem: &ProblemData, t: f64, tau: f64) -> Result<Option<DMatrix<f64>>> {
        match (&problem.memory.b0, &self.separable_h) {
            (MemoryKernel::Zero, _) => Ok(None),
            (MemoryKernel::Separable { g, .. }, Some(h)) => Ok(Some(h * g(t, tau))),
            _ => memory_coupling_matrix(&problem.memory, &problem.assembly, t, tau).map(Some),
        }
    }

    /// `h Σ_{j<n'} ω_j [βμ a_j + G(t, t_j) a_j]` over the first `upto` stored nodes
    /// with trapezoid weights `ω_0 = ½`, `ω_j = 1`; the node at `t` itself is left to the caller.
    fn history_integral(
        &self,
        problem: &ProblemData,
        history: &SolutionHistory,
        t: f64,
        upto: usize,
    ) -> Result<Vec<f64>> {
        let m = history.n_modes();
        let h = history.grid.h();
        let weight = |j: usize| if j == 0 { 0.5 } else { 1.0 };
        let mut out: Vec<f64> = (0..m)
            .map(|i| {
                let row = &history.coefficients[i][..upto];
                let s: f64 = row.iter().enumerate().map(|(j, a)| weight(j) * a).sum();
                h * self.beta_mu[i] * s
            })
            .collect();
        match (&problem.memory.b0, &self.separable_h) {
            (MemoryKernel::Zero, _) => {}
            (MemoryKernel::Separable { g, .. }, Some(hm)) => {
                let gw: Vec<f64> = (0..upto).map(|j| h * weight(j) * g(t, history.grid.node(j))).collect();
                let s: Vec<f64> = history
                    .coefficients
                    .par_iter()
                    .map(|row| row[..upto].iter().zip(&gw).map(|(a, w)| a * w).sum())
                    .collect();
                let add = hm * DVector::from_vec(s);
                for (o, v) in out.iter_mut().zip(add.iter()) {
                    *o += v;
                }
            }
            _ => {
                for j in 0..upto {
                    let gmat = memory_coupling_matrix(&problem.memory, &problem.assembly, t, history.grid.node(j))?;
                    let add = gmat * DVector::from_vec(history.column(j)) * (h * weight(j));
                    for (o, v) in out.iter_mut().zip(add.iter()) {
                        *o += v;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn kirchhoff_value(problem: &ProblemData, sigma: f64, step: usize, time: f64) -> Result<f64> {
    let m = problem.law.eval(sigma);
    if !(m >= problem.law.m0()) {
        return Err(Error::contract(
            "rhs",
            format!(
                "Kirchhoff law returned {m} < m0 = {} at σ = {sigma:e} (step {step}, t = {time})",
                problem.law.m0()
            ),
        ));
    }
    Ok(m)
}

/// `F(t_n)` from the stored history through node `n`.
pub fn rhs(n: usize, history: &SolutionHistory, problem: &ProblemData) -> Result<Vec<f64>> {
    if n >= history.len() {
        return Err(Error::contract("rhs", format!("history holds {} nodes, asked for {n}", history.len())));
    }
    let grid = history.grid;
    let f = problem.source.sample(&grid, &problem.assembly)?;
    let parts = MemoryParts::new(problem)?;
    rhs_with(n, history, problem, &parts, &f[n])
}

fn rhs_with(
    n: usize,
    history: &SolutionHistory,
    problem: &ProblemData,
    parts: &MemoryParts,
    f_n: &[f64],
) -> Result<Vec<f64>> {
    let t = history.grid.node(n);
    let lambda = problem.assembly.eigenvalues();
    let a = history.column(n);
    let m = kirchhoff_value(problem, x0_squared(&a, lambda), n, t)?;
    let mut out: Vec<f64> = (0..a.len()).map(|i| -lambda[i] * m * a[i] + f_n[i]).collect();
    if n > 0 && !problem.memory.is_off() {
        let hist = parts.history_integral(problem, history, t, n)?;
        let newest = current_node_memory(problem, parts, t, &a, history.grid.h())?;
        for i in 0..out.len() {
            out[i] += hist[i] + newest[i];
        }
    }
    Ok(out)
}

/// `½h [βμ a + G(t, t) a]`, the trapezoid term of the node at `t` itself.
fn current_node_memory(problem: &ProblemData, parts: &MemoryParts, t: f64, a: &[f64], h: f64) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = a.iter().zip(&parts.beta_mu).map(|(x, bm)| 0.5 * h * bm * x).collect();
    if let Some(g) = parts.coupling(problem, t, t)? {
        let add = g * DVector::from_row_slice(a) * (0.5 * h);
        for (o, v) in out.iter_mut().zip(add.iter()) {
            *o += v;
        }
    }
    Ok(out)
}

/// Bracketed root of `phi` on `[lo, hi]` with `phi(lo) < 0 ≤ phi(hi)`, by regula falsi
/// with the Illinois halving.
fn illinois(phi: impl Fn(f64) -> f64, mut lo: f64, mut f_lo: f64, mut hi: f64) -> f64 {
    let mut f_hi = phi(hi);
    let mut side = 0i8;
    for _ in 0..200 {
        if f_hi == 0.0 || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            return hi;
        }
        let x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let x = if x > lo && x < hi { x } else { 0.5 * (lo + hi) };
        let fx = phi(x);
        if fx >= 0.0 {
            hi = x;
            f_hi = fx;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        } else {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        }
    }
    0.5 * (lo + hi)
}

/// Run state shared by [`step`] calls.
pub struct Stepper<'a> {
    problem: &'a ProblemData,
    config: SolverConfig,
    table: AdamsTable,
    parts: MemoryParts,
    source: Vec<Vec<f64>>,
    /// `F_i(t_j)` for stored nodes, one row per mode.
    forcing: Vec<Vec<f64>>,
    inv_gamma: f64,
}

fn dump(a: &[f64], extra: &str) -> String {
    let shown: Vec<String> = a.iter().take(8).map(|v| format!("{v:e}")).collect();
    let more = if a.len() > 8 { format!(" … ({} modes)", a.len()) } else { String::new() };
    format!("  iterate = [{}]{more}\n  {extra}", shown.join(", "))
}

impl<'a> Stepper<'a> {
    pub fn new(problem: &'a ProblemData, config: SolverConfig) -> Result<(Self, SolutionHistory)> {
        config.validate()?;
        if config.mode_count != problem.mode_count() {
            return Err(Error::contract(
                "Stepper::new",
                format!(
                    "config asks for {} modes, problem carries {}",
                    config.mode_count,
                    problem.mode_count()
                ),
            ));
        }
        let grid = config.grid;
        let parts = MemoryParts::new(problem)?;
        let source = problem.source.sample(&grid, &problem.assembly)?;
        let lambda = problem.assembly.eigenvalues();
        let a0 = problem.u0.as_slice().to_vec();
        let sigma0 = x0_squared(&a0, lambda);
        let m0 = kirchhoff_value(problem, sigma0, 0, 0.0)?;
        let mut history = SolutionHistory {
            grid,
            coefficients: vec![Vec::with_capacity(grid.len()); a0.len()],
            sigma: Vec::with_capacity(grid.len()),
            kirchhoff: Vec::with_capacity(grid.len()),
        };
        history.push(&a0, sigma0, m0);
        let f0 = rhs_with(0, &history, problem, &parts, &source[0])?;
        let forcing = f0
            .iter()
            .map(|v| {
                let mut r = Vec::with_capacity(grid.len());
                r.push(*v);
                r
            })
            .collect();
        let alpha = problem.alpha();
        Ok((
            Self {
                problem,
                config,
                table: AdamsTable::new(alpha, grid.h(), grid.n_steps()).with_first_cell(config.first_cell),
                parts,
                source,
                forcing,
                inv_gamma: rgamma(alpha),
            },
            history,
        ))
    }

    /// Root of `M - law(σ(M))` for `M ≥ m0`, where `σ(M)` is the x0-norm squared of
    /// the corrector solved with Kirchhoff value `M`.
    fn kirchhoff_root(&self, sigma_of: impl Fn(f64) -> f64) -> std::result::Result<f64, String> {
        let law = &self.problem.law;
        let phi = |mk: f64| mk - law.eval(sigma_of(mk));
        let lo = law.m0();
        let at_lo = phi(lo);
        if !at_lo.is_finite() {
            return Err(format!("Kirchhoff law is not finite at M = {lo:e}"));
        }
        if at_lo >= 0.0 {
            return Ok(lo);
        }
        let mut hi = law.eval(sigma_of(lo)).max(lo);
        let mut expansions = 0;
        while !(phi(hi) >= 0.0) {
            expansions += 1;
            if expansions > 60 || !hi.is_finite() {
                return Err(format!("no root of the Kirchhoff equation bracketed above M = {lo:e}"));
            }
            hi = 2.0 * hi + 1.0;
        }
        Ok(illinois(phi, lo, at_lo, hi))
    }

    fn failure(&self, n: usize, reason: String, dump: String) -> Error {
        Error::Solver {
            step: n + 1,
            time: self.config.grid.node(n + 1),
            reason,
            dump,
        }
    }

    /// Advance from node `n` to `n + 1` and append the result to `history`.
    pub fn step(&mut self, history: &mut SolutionHistory, n: usize) -> Result<()> {
        if n + 1 != history.len() || n >= self.config.grid.n_steps() {
            return Err(Error::contract(
                "step",
                format!("history holds {} nodes, cannot step from {n}", history.len()),
            ));
        }
        let problem = self.problem;
        let lambda = problem.assembly.eigenvalues();
        let grid = self.config.grid;
        let h = grid.h();
        let t_next = grid.node(n + 1);
        let m = lambda.len();

        let a0 = problem.u0.as_slice();
        let (table, inv_gamma) = (&self.table, self.inv_gamma);
        let sums: Vec<(f64, f64)> = self
            .forcing
            .par_iter()
            .map(|f| (table.predict(n, f), table.correct_history(n, f)))
            .collect();
        let predicted: Vec<f64> = (0..m).map(|i| a0[i] + inv_gamma * sums[i].0).collect();
        let base: Vec<f64> = (0..m).map(|i| a0[i] + inv_gamma * sums[i].1).collect();
        let c = inv_gamma * self.table.corrector_new(n);

        let memory_on = !problem.memory.is_off();
        let hist_mem = if memory_on {
            self.parts.history_integral(problem, history, t_next, n + 1)?
        } else {
            vec![0.0; m]
        };
        let g_now = if memory_on { self.parts.coupling(problem, t_next, t_next)? } else { None };
        let f_next = &self.source[n + 1];

        let mut x = predicted;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(self.failure(n, "non-finite predictor".into(), dump(&x, "")));
        }
        let mut prev_update = f64::INFINITY;
        let mut growth_streak = 0;
        for sweep in 0..self.config.corrector_iterations {
            let coupled: Vec<f64> = match &g_now {
                Some(g) => (g * DVector::from_row_slice(&x) * (0.5 * h)).iter().copied().collect(),
                None => vec![0.0; m],
            };
            let (next, sigma, mk): (Vec<f64>, f64, f64) = match self.config.corrector {
                CorrectorKind::LinearlyImplicit => {
                    let numer: Vec<f64> = (0..m)
                        .map(|i| base[i] + c * (f_next[i] + hist_mem[i] + coupled[i]))
                        .collect();
                    let shift: Vec<f64> = (0..m).map(|i| 1.0 - 0.5 * c * h * self.parts.beta_mu[i]).collect();
                    let solve = |mk: f64| -> Vec<f64> {
                        (0..m).map(|i| numer[i] / (shift[i] + c * lambda[i] * mk)).collect()
                    };
                    let mk = self
                        .kirchhoff_root(|mk| x0_squared(&solve(mk), lambda))
                        .map_err(|reason| self.failure(n, reason, dump(&x, "")))?;
                    let next = solve(mk);
                    let sigma = x0_squared(&next, lambda);
                    (next, sigma, mk)
                }
                CorrectorKind::Explicit => {
                    let sigma = x0_squared(&x, lambda);
                    let mk = kirchhoff_value(problem, sigma, n + 1, t_next)?;
                    let next = (0..m)
                        .map(|i| {
                            let fi = -lambda[i] * mk * x[i]
                                + f_next[i]
                                + hist_mem[i]
                                + coupled[i]
                                + 0.5 * h * self.parts.beta_mu[i] * x[i];
                            base[i] + c * fi
                        })
                        .collect();
                    (next, sigma, mk)
                }
            };
            if next.iter().any(|v| !v.is_finite()) {
                return Err(self.failure(
                    n,
                    format!("non-finite corrector iterate in sweep {}", sweep + 1),
                    dump(&x, &format!("sigma = {sigma:e}, M = {mk:e}")),
                ));
            }
            let update = next.iter().zip(&x).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            let scale = next.iter().map(|v| v * v).sum::<f64>().sqrt();
            x = next;
            if sweep > 0 && update >= 2.0 * prev_update {
                growth_streak += 1;
                if growth_streak >= 2 {
                    return Err(self.failure(
                        n,
                        format!("corrector diverging: update norm {update:e} after doubling twice"),
                        dump(&x, &format!("sigma = {sigma:e}, M = {mk:e}")),
                    ));
                }
            } else {
                growth_streak = 0;
            }
            prev_update = update;
            if update <= self.config.fixed_point_tol * (1.0 + scale) {
                break;
            }
        }

        let sigma = x0_squared(&x, lambda);
        let mk = kirchhoff_value(problem, sigma, n + 1, t_next)?;
        history.push(&x, sigma, mk);
        let mut fnew: Vec<f64> = (0..m).map(|i| -lambda[i] * mk * x[i] + f_next[i] + hist_mem[i]).collect();
        if memory_on {
            let newest = current_node_memory(problem, &self.parts, t_next, &x, h)?;
            for (o, v) in fnew.iter_mut().zip(newest) {
                *o += v;
            }
        }
        if fnew.iter().any(|v| !v.is_finite()) {
            return Err(self.failure(n, "non-finite right-hand side".into(), dump(&x, "")));
        }
        for (row, v) in self.forcing.iter_mut().zip(fnew) {
            row.push(v);
        }
        Ok(())
    }
}

/// History produced before a failure, with the failure itself.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub history: SolutionHistory,
    pub failure: Option<Error>,
}

/// Run to completion, keeping the partial history on failure.
pub fn run_with_partial(problem: &ProblemData, config: SolverConfig) -> Result<RunOutcome> {
    let (mut stepper, mut history) = Stepper::new(problem, config)?;
    for n in 0..config.grid.n_steps() {
        if let Err(e) = stepper.step(&mut history, n) {
            return Ok(RunOutcome {
                history,
                failure: Some(e),
            });
        }
    }
    Ok(RunOutcome {
        history,
        failure: None,
    })
}

/// Full solve; deterministic for identical inputs.
pub fn run(problem: &ProblemData, config: SolverConfig) -> Result<SolutionHistory> {
    let out = run_with_partial(problem, config)?;
    match out.failure {
        None => Ok(out.history),
        Some(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem_model::{KirchhoffLaw, MemorySpec, Source};
    use crate::spatial_operator::{build_spectral, Domain1D, ModalVector};
    use crate::special_functions::FractionalOrders;
    use std::sync::Arc;

    fn linear_problem(alpha: f64, m: usize, u0: Vec<f64>, memory: MemorySpec) -> ProblemData {
        let op = Arc::new(build_spectral(Domain1D::new(0.0, 1.0).unwrap(), 0.5, m).unwrap());
        ProblemData::new(
            FractionalOrders::new(alpha, 0.5).unwrap(),
            op,
            KirchhoffLaw::constant(1.0).unwrap(),
            memory,
            Source::Zero,
            ModalVector::new(u0).unwrap(),
        )
        .unwrap()
    }

    fn config(t: f64, n: usize, m: usize) -> SolverConfig {
        SolverConfig::new(UniformTimeGrid::new(t, n).unwrap(), m)
    }

    #[test]
    fn zero_data_stays_zero() {
        let p = linear_problem(0.5, 3, vec![0.0; 3], MemorySpec::none());
        let h = run(&p, config(1.0, 50, 3)).unwrap();
        assert!(h.coefficients().iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn single_step_run_has_two_columns() {
        let p = linear_problem(0.5, 2, vec![1.0, 0.0], MemorySpec::none());
        let h = run(&p, config(0.1, 1, 2)).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.column(0), vec![1.0, 0.0]);
    }

    #[test]
    fn rhs_linear_diffusion_only() {
        let p = linear_problem(0.5, 1, vec![1.0], MemorySpec::none());
        let (_, h) = Stepper::new(&p, config(1.0, 4, 1)).unwrap();
        let f = rhs(0, &h, &p).unwrap();
        assert!((f[0] + std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn rhs_memory_of_constant_history() {
        let mem = MemorySpec {
            beta: 1.0,
            ..MemorySpec::none()
        };
        let p = linear_problem(0.5, 1, vec![1.0], mem);
        let grid = UniformTimeGrid::new(1.0, 8).unwrap();
        let h = SolutionHistory::from_coefficients(grid, vec![vec![1.0; 6]], &p).unwrap();
        let f = rhs(5, &h, &p).unwrap();
        let lambda = std::f64::consts::PI;
        let t = grid.node(5);
        assert!((f[0] - (-lambda + lambda * t)).abs() < 1e-14);
    }

    #[test]
    fn config_is_validated() {
        let p = linear_problem(0.5, 2, vec![1.0, 0.0], MemorySpec::none());
        let mut c = config(1.0, 4, 2);
        c.corrector_iterations = 0;
        assert!(run(&p, c).is_err());
        assert!(run(&p, config(1.0, 4, 3)).is_err());
    }

    #[test]
    fn kirchhoff_record_is_consistent() {
        let op = Arc::new(build_spectral(Domain1D::new(0.0, 1.0).unwrap(), 0.5, 4).unwrap());
        let law = KirchhoffLaw::saturating(1.0, 0.5).unwrap();
        let p = ProblemData::new(
            FractionalOrders::new(0.6, 0.5).unwrap(),
            op.clone(),
            law.clone(),
            MemorySpec::none(),
            Source::Zero,
            ModalVector::new(vec![1.0, -0.5, 0.25, 0.1]).unwrap(),
        )
        .unwrap();
        let h = run(&p, config(1.0, 64, 4)).unwrap();
        for n in 0..h.len() {
            assert_eq!(h.kirchhoff()[n], law.eval(h.sigma()[n]));
            assert_eq!(h.sigma()[n], x0_squared(&h.column(n), op.eigenvalues()));
        }
    }

    #[test]
    fn stored_history_round_trips() {
        let p = linear_problem(0.4, 3, vec![0.3, 0.2, 0.1], MemorySpec::none());
        let h = run(&p, config(1.0, 16, 3)).unwrap();
        let back = SolutionHistory::from_coefficients(*h.grid(), h.coefficients().to_vec(), &p).unwrap();
        assert_eq!(back, h);
    }
}
