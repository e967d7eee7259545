//! Numerical checks of the well-posedness and regularity estimates.
//!
//! The estimates hide their constants, so most checks return a ratio LHS/RHS and
//! pass when it is finite. Boundedness under refinement and agreement with a
//! high-resolution run are judged by whoever compares several histories.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional_calculus::{caputo_apply, rl_integral, SampledPath, UniformTimeGrid};
use crate::galerkin_solver::{run, SolutionHistory, SolverConfig};
use crate::problem_model::{KirchhoffKind, ProblemData};
use crate::spatial_operator::{modal_norms, spectral_regularity_norm, ModalVector, Norms};
use crate::special_functions::{gamma, mittag_leffler};

/// Tolerance on the relative envelope and decay violations.
pub const GRONWALL_TOL: f64 = 1e-6;
/// Nodes used by [`fit_holder`].
pub const HOLDER_NODES: usize = 12;
/// Below this every difference is treated as zero by [`fit_holder`].
pub const HOLDER_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    H2,
    #[serde(rename = "apriori_1")]
    Apriori1,
    #[serde(rename = "apriori_2")]
    Apriori2,
    #[serde(rename = "apriori_3")]
    Apriori3,
    Gronwall,
    Holder,
    Growth,
    LinearOracle,
    Stability,
    Regularity,
}

impl CheckId {
    pub const ALL: [CheckId; 10] = [
        CheckId::H2,
        CheckId::Apriori1,
        CheckId::Apriori2,
        CheckId::Apriori3,
        CheckId::Gronwall,
        CheckId::Holder,
        CheckId::Growth,
        CheckId::LinearOracle,
        CheckId::Stability,
        CheckId::Regularity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::H2 => "h2",
            CheckId::Apriori1 => "apriori_1",
            CheckId::Apriori2 => "apriori_2",
            CheckId::Apriori3 => "apriori_3",
            CheckId::Gronwall => "gronwall",
            CheckId::Holder => "holder",
            CheckId::Growth => "growth",
            CheckId::LinearOracle => "linear_oracle",
            CheckId::Stability => "stability",
            CheckId::Regularity => "regularity",
        }
    }

    /// The estimate being checked, in words.
    pub fn anchor(self) -> &'static str {
        match self {
            CheckId::H2 => "Kirchhoff feasibility: m0 - 4 L_M K^2 > 0 with K = |u0|_X0 + |f|_L2alpha",
            CheckId::Apriori1 => {
                "energy bound: sup|u|^2 + |u|^2_{L2alpha(X0)} <~ |u0|^2 + |f|^2_L2alpha"
            }
            CheckId::Apriori2 => {
                "X0 bound: sup|u|_X0^2 + |(-Δ)^s u|^2_L2alpha <~ |u0|_X0^2 + |f|^2_L2alpha, and |(-Δ)^s u|^2_{L2(0,T;L2)} likewise"
            }
            CheckId::Apriori3 => "Caputo bound: |∂^α u|^2_{L2(0,T;L2)} <~ |u0|_X0^2 + |f|^2_L2alpha",
            CheckId::Gronwall => {
                "modal Gronwall envelope |a_i(t)| <= |a_i(0)| E_α(λ_i C t^α), and decay |a_i(t)| <= |a_i(0)|"
            }
            CheckId::Holder => "Hölder continuity in time: |u(t) - u(t*)| <~ |t - t*|^α",
            CheckId::Growth => "growth: |u(t)| <~ 1 + t^α",
            CheckId::LinearOracle => "constant-M modal solution a_i(0) E_α(-λ_i M t^α)",
            CheckId::Stability => "continuous dependence on the initial datum",
            CheckId::Regularity => {
                "spatial regularity: |u|_{L2(0,T;H^(s+ν))} <~ |u0|_X0 + |f|_L2alpha (modal proxy)"
            }
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = CheckId::ALL.iter().map(|c| c.as_str()).collect();
                Error::domain("CheckId::from_str", format!("unknown check `{s}` (known: {})", known.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// One report entry. A verdict is never stored without the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: CheckId,
    pub anchor: String,
    pub values: BTreeMap<String, f64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(id: CheckId, values: impl IntoIterator<Item = (&'static str, f64)>, pass: bool) -> Self {
        Self {
            id,
            anchor: id.anchor().to_string(),
            values: values.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            verdict: Verdict::from_pass(pass),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Norm time series of a history plus the check records computed from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    pub x0: Vec<f64>,
    pub laplacian_s: Vec<f64>,
    pub sup_l2: f64,
    pub sup_x0: f64,
    pub sup_laplacian_s: f64,
    /// `sup_n ∫_0^{t_n} (t_n-τ)^{α-1} ‖u‖²_{X₀} dτ`.
    pub weighted_x0_sq: f64,
    /// The same weighted sup for `‖(-Δ)^s u‖²`.
    pub weighted_laplacian_sq: f64,
    pub records: Vec<CheckRecord>,
}

impl NormReport {
    pub fn new(history: &SolutionHistory, problem: &ProblemData) -> Result<Self> {
        let series = norm_series(history, problem);
        let grid = *history.grid();
        let alpha = problem.alpha();
        let x0_sq: Vec<f64> = series.iter().map(|n| n.x0 * n.x0).collect();
        let lap_sq: Vec<f64> = series.iter().map(|n| n.laplacian_s * n.laplacian_s).collect();
        let sup = |v: &dyn Fn(&Norms) -> f64| series.iter().map(v).fold(0.0, f64::max);
        Ok(Self {
            times: history.times(),
            l2: series.iter().map(|n| n.l2).collect(),
            x0: series.iter().map(|n| n.x0).collect(),
            laplacian_s: series.iter().map(|n| n.laplacian_s).collect(),
            sup_l2: sup(&|n| n.l2),
            sup_x0: sup(&|n| n.x0),
            sup_laplacian_s: sup(&|n| n.laplacian_s),
            weighted_x0_sq: weighted_sup(&grid, &x0_sq, alpha)?,
            weighted_laplacian_sq: weighted_sup(&grid, &lap_sq, alpha)?,
            records: Vec::new(),
        })
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.verdict.passed())
    }

    pub fn record(&self, id: CheckId) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

fn norm_series(history: &SolutionHistory, problem: &ProblemData) -> Vec<Norms> {
    let lambda = problem.assembly.eigenvalues();
    (0..history.len()).map(|n| modal_norms(&history.column(n), lambda)).collect()
}

fn require_complete(op: &'static str, history: &SolutionHistory, problem: &ProblemData) -> Result<()> {
    if !history.is_complete() {
        return Err(Error::contract(op, format!("history stops after {} of {} nodes", history.len(), history.grid().len())));
    }
    if history.n_modes() != problem.mode_count() {
        return Err(Error::contract(op, "history and problem disagree on the mode count"));
    }
    Ok(())
}

/// `sup_n ∫_0^{t_n} (t_n-τ)^{α-1} g(τ) dτ` for nonnegative samples `g` on the
/// leading nodes of `grid`.
fn weighted_sup(grid: &UniformTimeGrid, g: &[f64], alpha: f64) -> Result<f64> {
    if g.len() < 2 {
        return Ok(0.0);
    }
    let steps = g.len() - 1;
    let sub = if steps == grid.n_steps() { *grid } else { UniformTimeGrid::new(grid.h() * steps as f64, steps)? };
    let integral = rl_integral(&SampledPath::new(sub, g.to_vec())?, alpha)?;
    Ok(gamma(alpha) * integral.row(0).iter().copied().fold(0.0, f64::max))
}

/// `‖f‖²_{L²_α}` from the sampled source.
pub fn source_l2alpha_sq(problem: &ProblemData, grid: &UniformTimeGrid) -> Result<f64> {
    let f = problem.source.sample(grid, &problem.assembly)?;
    let sq: Vec<f64> = f.iter().map(|v| v.iter().map(|c| c * c).sum()).collect();
    weighted_sup(grid, &sq, problem.alpha())
}

fn trapezoid(h: f64, v: &[f64]) -> f64 {
    match v.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * v[0] + v[1..n - 1].iter().sum::<f64>() + 0.5 * v[n - 1]),
    }
}

/// `lhs / rhs` with `rhs` floored at machine epsilon; zero data passes only with zero LHS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRatio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl BoundRatio {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let floored = rhs.max(f64::EPSILON);
        let ratio = lhs / floored;
        let pass = if rhs <= f64::EPSILON { lhs <= f64::EPSILON } else { ratio.is_finite() };
        Self {
            lhs,
            rhs,
            ratio,
            pass,
        }
    }
}

pub fn check_apriori_1(history: &SolutionHistory, problem: &ProblemData) -> Result<BoundRatio> {
    require_complete("check_apriori_1", history, problem)?;
    let report = NormReport::new(history, problem)?;
    let u0 = modal_norms(problem.u0.as_slice(), problem.assembly.eigenvalues());
    let f_sq = source_l2alpha_sq(problem, history.grid())?;
    Ok(BoundRatio::new(report.sup_l2.powi(2) + report.weighted_x0_sq, u0.l2.powi(2) + f_sq))
}

/// The weighted bound and the plain `L²(0,T;L²)` bound on `(-Δ)^s u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Apriori2 {
    pub weighted: BoundRatio,
    pub plain: BoundRatio,
}

pub fn check_apriori_2(history: &SolutionHistory, problem: &ProblemData) -> Result<Apriori2> {
    require_complete("check_apriori_2", history, problem)?;
    let report = NormReport::new(history, problem)?;
    let u0 = modal_norms(problem.u0.as_slice(), problem.assembly.eigenvalues());
    let rhs = u0.x0.powi(2) + source_l2alpha_sq(problem, history.grid())?;
    let lap_sq: Vec<f64> = report.laplacian_s.iter().map(|v| v * v).collect();
    Ok(Apriori2 {
        weighted: BoundRatio::new(report.sup_x0.powi(2) + report.weighted_laplacian_sq, rhs),
        plain: BoundRatio::new(trapezoid(history.grid().h(), &lap_sq), rhs),
    })
}

/// `∫_0^T ‖∂^α u‖² dt` from the L1 Caputo samples; the undefined node-0 value is
/// replaced by the node-1 value on the first cell.
pub fn caputo_energy(history: &SolutionHistory, alpha: f64) -> Result<f64> {
    let grid = *history.grid();
    let path = SampledPath::from_rows(grid, history.coefficients().to_vec())?;
    let d = caputo_apply(&path, alpha)?;
    let sq: Vec<f64> = (1..grid.len())
        .map(|n| (0..d.n_rows()).map(|i| d.at(i, n).unwrap_or(0.0).powi(2)).sum())
        .collect();
    let h = grid.h();
    Ok(h * sq[0] + trapezoid(h, &sq))
}

pub fn check_apriori_3(history: &SolutionHistory, problem: &ProblemData) -> Result<BoundRatio> {
    require_complete("check_apriori_3", history, problem)?;
    let u0 = modal_norms(problem.u0.as_slice(), problem.assembly.eigenvalues());
    let rhs = u0.x0.powi(2) + source_l2alpha_sq(problem, history.grid())?;
    Ok(BoundRatio::new(caputo_energy(history, problem.alpha())?, rhs))
}

fn require_unforced(op: &'static str, problem: &ProblemData) -> Result<()> {
    if !problem.source.is_zero() {
        return Err(Error::contract(op, "requires f ≡ 0"));
    }
    if !problem.memory.is_off() {
        return Err(Error::contract(op, "requires the memory term to be off"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GronwallReport {
    /// `C = sup_n M_n`.
    pub c: f64,
    /// `max (|a_i(t_n)| / (|a_i(0)| E_α(λ_i C t_n^α)) - 1)`, at least 0.
    pub envelope_violation: f64,
    /// `max (|a_i(t_n)| / |a_i(0)| - 1)`, at least 0.
    pub decay_violation: f64,
    pub pass: bool,
}

fn relative_excess(value: f64, bound: f64) -> f64 {
    let value = value.abs();
    if value == 0.0 {
        0.0
    } else if bound == 0.0 {
        f64::INFINITY
    } else {
        (value / bound - 1.0).max(0.0)
    }
}

pub fn gronwall_envelope(history: &SolutionHistory, problem: &ProblemData) -> Result<GronwallReport> {
    require_unforced("gronwall_envelope", problem)?;
    let alpha = problem.alpha();
    let lambda = problem.assembly.eigenvalues();
    let c = history.kirchhoff().iter().copied().fold(0.0, f64::max);
    let times = history.times();
    let (mut envelope, mut decay) = (0.0f64, 0.0f64);
    for (i, row) in history.coefficients().iter().enumerate() {
        let a0 = row[0].abs();
        for (t, a) in times.iter().zip(row) {
            let e = mittag_leffler(alpha, lambda[i] * c * t.powf(alpha))?;
            envelope = envelope.max(relative_excess(*a, a0 * e));
            decay = decay.max(relative_excess(*a, a0));
        }
    }
    Ok(GronwallReport {
        c,
        envelope_violation: envelope,
        decay_violation: decay,
        pass: envelope <= GRONWALL_TOL && decay <= GRONWALL_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub t_star: f64,
    pub exponent: f64,
    pub points: usize,
}

/// Least-squares slope of `log ‖u(t_n) - u(t*)‖` against `log |t_n - t*|` over the
/// [`HOLDER_NODES`] nodes nearest to `t*`, which must be a grid node.
pub fn fit_holder(history: &SolutionHistory, problem: &ProblemData, t_star: f64) -> Result<HolderFit> {
    const OP: &str = "fit_holder";
    let grid = history.grid();
    let k = (t_star / grid.h()).round() as usize;
    if !(t_star >= 0.0) || k >= history.len() || (grid.node(k) - t_star).abs() > 1e-9 * grid.h().max(t_star) {
        return Err(Error::domain(OP, format!("t* = {t_star} is not a stored grid node")));
    }
    let (left, right) = (k, history.len() - 1 - k);
    let one_sided = left == 0 || right == 0;
    if (one_sided && left + right < HOLDER_NODES) || (!one_sided && (left < 8 || right < 8)) {
        return Err(Error::domain(OP, format!("too few nodes around t* ({left} left, {right} right)")));
    }
    let mut nodes: Vec<usize> = (0..history.len()).filter(|&n| n != k).collect();
    nodes.sort_by_key(|&n| (n as i64 - k as i64).unsigned_abs());
    nodes.truncate(HOLDER_NODES);

    let lambda = problem.assembly.eigenvalues();
    let base = history.column(k);
    let mut pts = Vec::with_capacity(nodes.len());
    for &n in &nodes {
        let diff: Vec<f64> = history.column(n).iter().zip(&base).map(|(a, b)| a - b).collect();
        let d = modal_norms(&diff, lambda).l2;
        if d > HOLDER_FLOOR {
            pts.push(((grid.node(n) - t_star).abs().ln(), d.ln()));
        }
    }
    if pts.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "all differences from u(t* = {t_star}) are below {HOLDER_FLOOR:e}"
        )));
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(HolderFit {
        t_star,
        exponent: sxy / sxx,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// `sup_n ‖u(t_n)‖ / (1 + t_n^α)`.
    pub constant: f64,
    pub u0_norm: f64,
    pub pass: bool,
}

pub fn check_growth(history: &SolutionHistory, problem: &ProblemData) -> Result<GrowthReport> {
    let alpha = problem.alpha();
    let series = norm_series(history, problem);
    let constant = history
        .times()
        .iter()
        .zip(&series)
        .map(|(t, n)| n.l2 / (1.0 + t.powf(alpha)))
        .fold(0.0, f64::max);
    Ok(GrowthReport {
        constant,
        u0_norm: series.first().map_or(0.0, |n| n.l2),
        pass: constant.is_finite(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleError {
    /// Over every node.
    pub max_abs: f64,
    /// Over nodes with `t ≥ T/4`, away from the initial layer.
    pub max_abs_late: f64,
}

/// Error against `a_i(0) E_α(-λ_i M t^α)` for constant-`M`, unforced, memoryless problems.
pub fn linear_oracle_error(history: &SolutionHistory, problem: &ProblemData) -> Result<OracleError> {
    const OP: &str = "linear_oracle_error";
    require_unforced(OP, problem)?;
    if problem.law.kind() != KirchhoffKind::Constant {
        return Err(Error::contract(OP, "requires a constant Kirchhoff law"));
    }
    let alpha = problem.alpha();
    let m = problem.law.m0();
    let lambda = problem.assembly.eigenvalues();
    let t_late = 0.25 * history.grid().t_final();
    let times = history.times();
    let (mut all, mut late) = (0.0f64, 0.0f64);
    for (i, row) in history.coefficients().iter().enumerate() {
        let a0 = problem.u0.as_slice()[i];
        for (t, a) in times.iter().zip(row) {
            let exact = a0 * mittag_leffler(alpha, -lambda[i] * m * t.powf(alpha))?;
            let e = (a - exact).abs();
            all = all.max(e);
            if *t >= t_late {
                late = late.max(e);
            }
        }
    }
    Ok(OracleError {
        max_abs: all,
        max_abs_late: late,
    })
}

/// `sup_n ‖u(t_n; u₀ + δe₁) - u(t_n; u₀)‖ / δ`.
pub fn stability_probe(problem: &ProblemData, config: SolverConfig, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::domain("stability_probe", format!("delta = {delta} must be positive and finite")));
    }
    let base = run(problem, config)?;
    let mut shifted = problem.clone();
    let mut u0 = problem.u0.as_slice().to_vec();
    u0[0] += delta;
    shifted.u0 = ModalVector::new(u0)?;
    let other = run(&shifted, config)?;
    let lambda = problem.assembly.eigenvalues();
    let sup = (0..base.len())
        .map(|n| {
            let diff: Vec<f64> = other.column(n).iter().zip(base.column(n)).map(|(a, b)| a - b).collect();
            modal_norms(&diff, lambda).l2
        })
        .fold(0.0, f64::max);
    Ok(sup / delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub nu: f64,
    /// `sup_n` of the weighted modal norm.
    pub sup: f64,
    /// Its `L²(0,T)` aggregate.
    pub l2_time: f64,
    /// `‖u₀‖_{X₀} + ‖f‖_{L²_α}`.
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Time aggregate of `(Σ λ_i^{(s+ν)/s} a_i²)^{1/2}`; spectral operators only.
pub fn regularity_series(history: &SolutionHistory, problem: &ProblemData, nu: f64) -> Result<RegularityReport> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::domain("regularity_series", format!("nu = {nu} must be nonnegative")));
    }
    let series: Vec<f64> = (0..history.len())
        .map(|n| spectral_regularity_norm(&ModalVector::new(history.column(n))?, &problem.assembly, nu))
        .collect::<Result<_>>()?;
    let sq: Vec<f64> = series.iter().map(|v| v * v).collect();
    let l2_time = trapezoid(history.grid().h(), &sq).sqrt();
    let u0 = modal_norms(problem.u0.as_slice(), problem.assembly.eigenvalues());
    let rhs = u0.x0 + source_l2alpha_sq(problem, history.grid())?.sqrt();
    let b = BoundRatio::new(l2_time, rhs);
    Ok(RegularityReport {
        nu,
        sup: series.iter().copied().fold(0.0, f64::max),
        l2_time,
        rhs,
        ratio: b.ratio,
        pass: b.pass,
    })
}

/// The largest admissible `ν = min(s, ½ - ε)`.
pub fn default_nu(s: f64, eps: f64) -> f64 {
    s.min(0.5 - eps)
}
