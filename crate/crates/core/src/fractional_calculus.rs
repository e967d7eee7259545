//! Discrete fractional calculus on uniform time grids: the product-trapezoid
//! Riemann–Liouville integral, the L1 Caputo derivative, the `k ∗ l = 1`
//! identity check, and fractional Adams–Bashforth–Moulton weights.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::checked_beta_reg;

use crate::error::{Error, Result};
use crate::special_functions::{gamma, kernel_k, kernel_l};

/// Uniform nodes `t_n = n·h`, `n = 0..=n_steps`, on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformTimeGrid {
    t_final: f64,
    n_steps: usize,
}

impl UniformTimeGrid {
    pub fn new(t_final: f64, n_steps: usize) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::domain(
                "UniformTimeGrid::new",
                format!("final time must be positive and finite, got {t_final}"),
            ));
        }
        if n_steps == 0 {
            return Err(Error::domain("UniformTimeGrid::new", "n_steps must be at least 1"));
        }
        Ok(Self { t_final, n_steps })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of nodes, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    /// The node `t_n`; the last node is exactly `T`.
    pub fn node(&self, n: usize) -> f64 {
        if n == self.n_steps {
            self.t_final
        } else {
            n as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.node(n)).collect()
    }
}

/// Samples of one or more scalar signals on a [`UniformTimeGrid`], one row per signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    grid: UniformTimeGrid,
    rows: Vec<Vec<f64>>,
}

impl SampledPath {
    pub fn new(grid: UniformTimeGrid, values: Vec<f64>) -> Result<Self> {
        Self::from_rows(grid, vec![values])
    }

    pub fn from_rows(grid: UniformTimeGrid, rows: Vec<Vec<f64>>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != grid.len() {
                return Err(Error::contract(
                    "SampledPath::from_rows",
                    format!("row {i} has {} samples, grid has {} nodes", r.len(), grid.len()),
                ));
            }
        }
        Ok(Self { grid, rows })
    }

    pub fn from_fn(grid: UniformTimeGrid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid,
            rows: vec![grid.nodes().into_iter().map(f).collect()],
        }
    }

    pub fn grid(&self) -> &UniformTimeGrid {
        &self.grid
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<f64>> {
        self.rows
    }
}

/// `(k+1)^p - k^p` without cancellation for large `k`.
pub(crate) fn pow_first_diff(p: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let kf = k as f64;
    kf.powf(p) * (p * (1.0 / kf).ln_1p()).exp_m1()
}

/// `Σ_{m ≥ m0} C(p, m) x^m` for `|x| ≤ 1/8`.
fn binomial_tail(p: f64, x: f64, m0: usize) -> f64 {
    let mut c = 1.0;
    let mut xm = 1.0;
    for m in 0..m0 {
        c *= (p - m as f64) / (m as f64 + 1.0);
        xm *= x;
    }
    let mut sum = 0.0;
    let mut m = m0;
    loop {
        let term = c * xm;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || m > 60 {
            return sum;
        }
        c *= (p - m as f64) / (m as f64 + 1.0);
        xm *= x;
        m += 1;
    }
}

const SERIES_FROM: usize = 8;

/// `(k+1)^p - 2k^p + (k-1)^p` for `k ≥ 1`.
pub(crate) fn pow_second_diff(p: f64, k: usize) -> f64 {
    let kf = k as f64;
    if k < SERIES_FROM {
        return (kf + 1.0).powf(p) - 2.0 * kf.powf(p) + (kf - 1.0).powf(p);
    }
    let x = 1.0 / kf;
    kf.powf(p) * (binomial_tail(p, x, 2) + binomial_tail(p, -x, 2))
}

/// Start weight `(n-1)^{α+1} - (n-α-1) n^α` of the product trapezoid rule at node `n ≥ 1`.
fn trapezoid_start(alpha: f64, n: usize) -> f64 {
    let p = alpha + 1.0;
    let nf = n as f64;
    if n < SERIES_FROM {
        return (nf - 1.0).powf(p) - (nf - p) * nf.powf(alpha);
    }
    nf.powf(p) * binomial_tail(p, -1.0 / nf, 2)
}

/// Product-trapezoid coefficients for `∫_0^{t_n} (t_n-τ)^{α-1} g(τ) dτ`, indexed by lag.
///
/// With `c = h^α / (α(α+1))` the integral is approximated by
/// `c·(start[n]·g_0 + Σ_{j=1}^{n-1} lag[n-j]·g_j + g_n)`.
#[derive(Debug, Clone)]
pub struct ProductTrapezoid {
    alpha: f64,
    lag: Vec<f64>,
    start: Vec<f64>,
}

impl ProductTrapezoid {
    pub fn new(alpha: f64, n_max: usize) -> Self {
        let p = alpha + 1.0;
        let mut lag = vec![1.0; n_max + 1];
        let mut start = vec![0.0; n_max + 1];
        for k in 1..=n_max {
            lag[k] = pow_second_diff(p, k);
            start[k] = trapezoid_start(alpha, k);
        }
        Self { alpha, lag, start }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Unscaled weight of sample `j` in the rule for node `n`.
    pub fn weight(&self, n: usize, j: usize) -> f64 {
        debug_assert!(j <= n && n >= 1);
        if j == 0 {
            self.start[n]
        } else if j == n {
            1.0
        } else {
            self.lag[n - j]
        }
    }

    /// Unscaled sum over `j = 0..=n` of weight·g_j.
    pub fn apply(&self, n: usize, g: &[f64]) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let mut acc = self.start[n] * g[0] + g[n];
        for j in 1..n {
            acc += self.lag[n - j] * g[j];
        }
        acc
    }
}

fn check_alpha_closed(op: &'static str, alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("alpha = {alpha} must lie in (0, 1]")))
    }
}

fn check_alpha_open(op: &'static str, alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("alpha = {alpha} must lie in the open interval (0, 1)")))
    }
}

/// Riemann–Liouville integral `I^α g(t_n)` of every row, by product trapezoid.
///
/// Exact for piecewise-linear `g`; node 0 maps to 0. At `α = 1` this is the
/// cumulative trapezoid rule.
pub fn rl_integral(path: &SampledPath, alpha: f64) -> Result<SampledPath> {
    check_alpha_closed("rl_integral", alpha)?;
    if let Some((i, _)) = path
        .rows
        .iter()
        .enumerate()
        .find(|(_, r)| r.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::domain("rl_integral", format!("row {i} contains non-finite samples")));
    }
    let grid = path.grid;
    let n_max = grid.n_steps();
    let rule = ProductTrapezoid::new(alpha, n_max);
    let scale = grid.h().powf(alpha) / gamma(alpha + 2.0);
    let rows = path
        .rows
        .par_iter()
        .map(|g| (0..=n_max).map(|n| scale * rule.apply(n, g)).collect())
        .collect();
    Ok(SampledPath { grid, rows })
}

/// L1 approximation of the Caputo derivative. Node 0 carries no value.
#[derive(Debug, Clone, PartialEq)]
pub struct CaputoSamples {
    grid: UniformTimeGrid,
    /// Values at nodes `1..=n_steps`, one vector per row.
    rows: Vec<Vec<f64>>,
}

impl CaputoSamples {
    pub fn grid(&self) -> &UniformTimeGrid {
        &self.grid
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Value at node `n`, or `None` at node 0 where the scheme is undefined.
    pub fn at(&self, row: usize, n: usize) -> Option<f64> {
        if n == 0 {
            None
        } else {
            self.rows[row].get(n - 1).copied()
        }
    }

    /// Values at nodes `1..=n_steps`.
    pub fn defined(&self, row: usize) -> &[f64] {
        &self.rows[row]
    }
}

/// L1 scheme for the regularized Caputo derivative of every row.
pub fn caputo_apply(path: &SampledPath, alpha: f64) -> Result<CaputoSamples> {
    if alpha == 1.0 {
        return Err(Error::domain(
            "caputo_apply",
            "alpha = 1 is the classical derivative; use a finite difference",
        ));
    }
    check_alpha_open("caputo_apply", alpha)?;
    let grid = path.grid;
    let n_max = grid.n_steps();
    let p = 1.0 - alpha;
    let w: Vec<f64> = (0..n_max).map(|k| pow_first_diff(p, k)).collect();
    let scale = grid.h().powf(-alpha) / gamma(2.0 - alpha);
    let rows = path
        .rows
        .par_iter()
        .map(|u| {
            let du: Vec<f64> = u.windows(2).map(|x| x[1] - x[0]).collect();
            (1..=n_max)
                .map(|n| scale * (0..n).map(|k| w[k] * du[n - 1 - k]).sum::<f64>())
                .collect()
        })
        .collect();
    Ok(CaputoSamples { grid, rows })
}

/// `max_n |(k ∗ l)(t_n) - 1|`, summing the convolution cell by cell.
///
/// After `τ = t u` each cell contributes a difference of regularized incomplete
/// Beta functions `I_u(α, 1-α)`, so the double endpoint singularity never
/// reaches a quadrature rule.
pub fn convolution_identity_residual(alpha: f64, grid: &UniformTimeGrid) -> Result<f64> {
    check_alpha_open("convolution_identity_residual", alpha)?;
    let mut worst: f64 = 0.0;
    for n in 1..=grid.n_steps() {
        let mut total = 0.0;
        let mut prev = 0.0;
        for j in 1..=n {
            let u = j as f64 / n as f64;
            let cur = checked_beta_reg(alpha, 1.0 - alpha, u).map_err(|e| Error::Quadrature {
                op: "convolution_identity_residual",
                reason: e.to_string(),
            })?;
            total += cur - prev;
            prev = cur;
        }
        worst = worst.max((total - 1.0).abs());
    }
    Ok(worst)
}

/// The same residual from an endpoint trapezoid rule on the grid nodes, with the
/// two singular endpoint samples replaced by 0. Included to show how badly
/// singularity-blind quadrature fails on this integrand.
pub fn convolution_identity_residual_naive(alpha: f64, grid: &UniformTimeGrid) -> Result<f64> {
    check_alpha_open("convolution_identity_residual_naive", alpha)?;
    let h = grid.h();
    let mut worst: f64 = 0.0;
    for n in 1..=grid.n_steps() {
        let t = grid.node(n);
        let mut total = 0.0;
        for j in 1..n {
            let tau = grid.node(j);
            total += h * kernel_k(t - tau, alpha)? * kernel_l(tau, alpha)?;
        }
        worst = worst.max((total - 1.0).abs());
    }
    Ok(worst)
}

/// Predictor and corrector weights of the fractional Adams method for step `n → n+1`.
///
/// The common factor `1/Γ(α)` is left out.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamsWeights {
    /// `b_j`, `j = 0..=n`.
    pub predictor: Vec<f64>,
    /// `a_j`, `j = 0..=n+1`.
    pub corrector: Vec<f64>,
}

pub fn adams_weights(alpha: f64, n: usize, h: f64) -> Result<AdamsWeights> {
    check_alpha_closed("adams_weights", alpha)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain("adams_weights", format!("step h = {h} must be positive")));
    }
    Ok(AdamsTable::new(alpha, h, n + 1).weights(n))
}

/// Treatment of the first cell `[t_0, t_1]` in the corrector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstCell {
    /// Linear interpolation, the plain product trapezoid.
    #[default]
    Trapezoid,
    /// The right-endpoint value `g_1` over the whole cell. The node-0 weight moves
    /// to node 1, which damps stiff modes on the first step instead of reflecting them.
    RightRectangle,
}

/// Lag-indexed Adams weights for every step of a run, built once.
#[derive(Debug, Clone)]
pub struct AdamsTable {
    alpha: f64,
    predictor_scale: f64,
    corrector_scale: f64,
    /// `(k+1)^α - k^α`.
    predictor_lag: Vec<f64>,
    trapezoid: ProductTrapezoid,
    first_cell: FirstCell,
}

impl AdamsTable {
    /// Weights for steps up to `n_max - 1 → n_max`.
    pub fn new(alpha: f64, h: f64, n_max: usize) -> Self {
        let ha = h.powf(alpha);
        Self {
            alpha,
            predictor_scale: ha / alpha,
            corrector_scale: ha / (alpha * (alpha + 1.0)),
            predictor_lag: (0..n_max).map(|k| pow_first_diff(alpha, k)).collect(),
            trapezoid: ProductTrapezoid::new(alpha, n_max),
            first_cell: FirstCell::Trapezoid,
        }
    }

    pub fn with_first_cell(mut self, first_cell: FirstCell) -> Self {
        self.first_cell = first_cell;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn first_cell(&self) -> FirstCell {
        self.first_cell
    }

    /// `Σ_{j=0}^{n} b_j g_j`.
    pub fn predict(&self, n: usize, g: &[f64]) -> f64 {
        let mut acc = 0.0;
        for j in 0..=n {
            acc += self.predictor_lag[n - j] * g[j];
        }
        self.predictor_scale * acc
    }

    /// Unscaled corrector weight of node `j` for the step to node `n`.
    fn corrector_weight(&self, n: usize, j: usize) -> f64 {
        match (self.first_cell, j) {
            (FirstCell::RightRectangle, 0) => 0.0,
            (FirstCell::RightRectangle, 1) => self.trapezoid.weight(n, 0) + self.trapezoid.weight(n, 1),
            _ => self.trapezoid.weight(n, j),
        }
    }

    /// `Σ_{j=0}^{n} a_j g_j`, the history part of the corrector for step `n → n+1`.
    pub fn correct_history(&self, n: usize, g: &[f64]) -> f64 {
        let mut acc = match self.first_cell {
            FirstCell::Trapezoid => self.trapezoid.start[n + 1] * g[0],
            FirstCell::RightRectangle if n > 0 => self.trapezoid.start[n + 1] * g[1],
            FirstCell::RightRectangle => 0.0,
        };
        for j in 1..=n {
            acc += self.trapezoid.lag[n + 1 - j] * g[j];
        }
        self.corrector_scale * acc
    }

    /// Corrector weight `a_{n+1}` of the new value in step `n → n+1`.
    pub fn corrector_new(&self, n: usize) -> f64 {
        self.corrector_scale * self.corrector_weight(n + 1, n + 1)
    }

    pub fn weights(&self, n: usize) -> AdamsWeights {
        let predictor = (0..=n).map(|j| self.predictor_scale * self.predictor_lag[n - j]).collect();
        let corrector = (0..=n + 1)
            .map(|j| self.corrector_scale * self.corrector_weight(n + 1, j))
            .collect();
        AdamsWeights {
            predictor,
            corrector,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(t: f64, n: usize) -> UniformTimeGrid {
        UniformTimeGrid::new(t, n).unwrap()
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(UniformTimeGrid::new(0.0, 4).is_err());
        assert!(UniformTimeGrid::new(1.0, 0).is_err());
        assert!(UniformTimeGrid::new(f64::NAN, 4).is_err());
        let g = grid(3.0, 7);
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(7), 3.0);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn path_length_is_checked() {
        let g = grid(1.0, 4);
        assert!(matches!(SampledPath::new(g, vec![0.0; 4]), Err(Error::Contract { .. })));
    }

    #[test]
    fn difference_helpers_match_direct_formulas() {
        for p in [0.3, 1.0, 1.5, 1.9] {
            for k in 1..40 {
                let kf = k as f64;
                let direct = (kf + 1.0).powf(p) - 2.0 * kf.powf(p) + (kf - 1.0).powf(p);
                let v = pow_second_diff(p, k);
                assert!((v - direct).abs() <= 1e-12 * kf.powf(p), "p={p} k={k}");
                let d1 = (kf + 1.0).powf(p) - kf.powf(p);
                assert!((pow_first_diff(p, k) - d1).abs() <= 1e-13 * d1.abs().max(1.0));
            }
            for n in 1..40 {
                let nf = n as f64;
                let direct = (nf - 1.0).powf(p) - (nf - p) * nf.powf(p - 1.0);
                assert!((trapezoid_start(p - 1.0, n) - direct).abs() <= 1e-12 * nf.powf(p));
            }
        }
    }

    #[test]
    fn rl_of_constant_is_exact() {
        let g = grid(1.0, 64);
        let one = SampledPath::from_fn(g, |_| 1.0);
        let out = rl_integral(&one, 0.5).unwrap();
        for (n, v) in out.row(0).iter().enumerate() {
            let t: f64 = g.node(n);
            assert!((v - t.sqrt() / gamma(1.5)).abs() < 1e-13);
        }
        assert!((out.row(0)[64] - 1.128_379_167_095_512_6).abs() < 1e-13);
    }

    #[test]
    fn rl_at_alpha_one_is_trapezoid() {
        let g = grid(2.0, 10);
        let path = SampledPath::from_fn(g, |t| t.sin());
        let out = rl_integral(&path, 1.0).unwrap();
        let h = g.h();
        let mut acc = 0.0;
        for n in 1..=10 {
            acc += 0.5 * h * (g.node(n - 1).sin() + g.node(n).sin());
            assert!((out.row(0)[n] - acc).abs() < 1e-14);
        }
    }

    #[test]
    fn rl_rejects_bad_input() {
        let g = grid(1.0, 4);
        let p = SampledPath::from_fn(g, |_| 1.0);
        assert!(rl_integral(&p, 0.0).is_err());
        assert!(rl_integral(&p, 1.2).is_err());
        let bad = SampledPath::new(g, vec![0.0, f64::NAN, 0.0, 0.0, 0.0]).unwrap();
        assert!(rl_integral(&bad, 0.5).is_err());
    }

    #[test]
    fn caputo_of_constant_vanishes_and_node_zero_is_flagged() {
        let g = grid(1.0, 32);
        let c = caputo_apply(&SampledPath::from_fn(g, |_| 3.5), 0.4).unwrap();
        assert_eq!(c.at(0, 0), None);
        assert!(c.defined(0).iter().all(|&v| v == 0.0));
        assert!(caputo_apply(&SampledPath::from_fn(g, |t| t), 1.0).is_err());
    }

    #[test]
    fn caputo_of_linear_function() {
        // L1 is exact for piecewise-linear u.
        let g = grid(1.0, 100);
        let c = caputo_apply(&SampledPath::from_fn(g, |t| t), 0.5).unwrap();
        assert!((c.at(0, 100).unwrap() - 1.0 / gamma(1.5)).abs() < 1e-12);
    }

    #[test]
    fn caputo_near_classical_limit() {
        let g = grid(1.0, 2000);
        let c = caputo_apply(&SampledPath::from_fn(g, |t| t.sin()), 0.99).unwrap();
        for n in [500, 1000, 1500] {
            let t = g.node(n);
            let h = g.h();
            let fd = ((t + h).sin() - (t - h).sin()) / (2.0 * h);
            let v = c.at(0, n).unwrap();
            assert!((v - fd).abs() / fd.abs() < 0.05, "t={t}: {v} vs {fd}");
        }
    }

    #[test]
    fn identity_residual_is_round_off() {
        let g = grid(1.0, 200);
        for a in [0.25, 0.5, 0.75] {
            let r = convolution_identity_residual(a, &g).unwrap();
            assert!(r <= 1e-12, "alpha={a}: {r:e}");
            let naive = convolution_identity_residual_naive(a, &g).unwrap();
            assert!(naive > 1e-3, "alpha={a}: naive {naive:e}");
        }
    }

    #[test]
    fn adams_weights_basic_facts() {
        let w = adams_weights(1.0, 0, 0.1).unwrap();
        assert_eq!(w.predictor, vec![0.1]);
        for alpha in [0.2, 0.5, 0.9] {
            let h: f64 = 0.01;
            for n in [0usize, 1, 5, 40] {
                let w = adams_weights(alpha, n, h).unwrap();
                let sum: f64 = w.predictor.iter().sum();
                let expect = h.powf(alpha) * ((n + 1) as f64).powf(alpha) / alpha;
                assert!((sum - expect).abs() <= 1e-13 * expect);
                assert!(w.predictor.iter().chain(&w.corrector).all(|&x| x >= 0.0));
                // Corrector is exact on constants.
                let csum: f64 = w.corrector.iter().sum();
                assert!((csum - expect).abs() <= 1e-12 * expect, "{csum} vs {expect}");
            }
        }
    }

    #[test]
    fn right_rectangle_first_cell() {
        let (alpha, h) = (0.4, 0.02);
        let plain = AdamsTable::new(alpha, h, 50);
        let right = AdamsTable::new(alpha, h, 50).with_first_cell(FirstCell::RightRectangle);
        // First step is the implicit product rectangle h^α/α.
        assert!((right.corrector_new(0) - h.powf(alpha) / alpha).abs() < 1e-15);
        for n in [0usize, 1, 7, 49] {
            let (p, r) = (plain.weights(n).corrector, right.weights(n).corrector);
            assert_eq!(r[0], 0.0);
            assert!((p.iter().sum::<f64>() - r.iter().sum::<f64>()).abs() < 1e-13);
            assert!((r[1] - p[0] - p[1]).abs() < 1e-15);
            let g: Vec<f64> = (0..=n + 1).map(|j| (j as f64 * 0.3).sin()).collect();
            let direct: f64 = r[..=n].iter().zip(&g).map(|(w, v)| w * v).sum();
            assert!((right.correct_history(n, &g) - direct).abs() < 1e-14);
            assert_eq!(right.corrector_new(n), r[n + 1]);
        }
    }

    proptest! {
        #[test]
        fn rl_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, alpha in 0.05f64..1.0) {
            let g = grid(1.5, 40);
            let f = SampledPath::from_fn(g, |t| (3.0 * t).cos());
            let h = SampledPath::from_fn(g, |t| t * t - 1.0);
            let comb = SampledPath::new(g, f.row(0).iter().zip(h.row(0)).map(|(x, y)| a * x + b * y).collect()).unwrap();
            let lhs = rl_integral(&comb, alpha).unwrap();
            let rf = rl_integral(&f, alpha).unwrap();
            let rh = rl_integral(&h, alpha).unwrap();
            for n in 0..=40 {
                let rhs = a * rf.row(0)[n] + b * rh.row(0)[n];
                prop_assert!((lhs.row(0)[n] - rhs).abs() <= 1e-13 * (1.0 + rhs.abs()));
            }
        }
    }
}
