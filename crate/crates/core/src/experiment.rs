//! Running configured experiments and writing their artifacts.
//!
//! A run directory holds `norms.<ext>`, `coefficients.<ext>`, `report.json` and
//! `manifest.json`; a `FAILED` marker is added when the solver aborts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{parse_config, ExperimentConfig, OracleWindow, TableFormat};
use crate::error::{Error, Result};
use crate::galerkin_solver::{run, run_with_partial, SolutionHistory, SolverConfig};
use crate::problem_model::{check_h2, estimate_b0_constant, memory_to_laplacian_constant, ProblemData};
use crate::spatial_operator::modal_norms;
use crate::special_functions::mittag_leffler;
use crate::verification::{
    check_apriori_1, check_apriori_2, check_apriori_3, check_growth, fit_holder, gronwall_envelope,
    linear_oracle_error, regularity_series, source_l2alpha_sq, stability_probe, CheckId, CheckRecord,
    NormReport,
};

pub const TOOL: &str = "kfrac";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const REPORT_FILE: &str = "report.json";
pub const VERIFY_REPORT_FILE: &str = "verify_report.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const FAILED_FILE: &str = "FAILED";

/// Errors at or below this (times `max(1, ‖u₀‖)`) count as round-off in a study.
pub const ROUNDOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Completed,
    Failed,
}

/// The structured report written next to the tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub nodes_completed: usize,
    pub nodes_total: usize,
    /// Data norms and the memory constants of the configured problem.
    pub constants: BTreeMap<String, f64>,
    /// Sup norms and weighted history integrals of the computed solution.
    pub summary: BTreeMap<String, f64>,
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.verdict.passed())
    }

    pub fn record(&self, id: CheckId) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Exit status 0 only for a completed run whose checks all pass.
    pub fn success(&self) -> bool {
        self.status == RunStatus::Completed && self.all_passed()
    }
}

/// Echo of the resolved configuration with hashes of every numeric artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    /// See [`config_hash`].
    pub config_sha256: String,
    /// File name to SHA-256 of its bytes.
    pub artifacts: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub report: Report,
    pub manifest: Manifest,
}

impl RunOutput {
    pub fn success(&self) -> bool {
        self.report.success()
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the resolved config with the output directory blanked, so that the
/// same experiment written elsewhere hashes the same.
pub fn config_hash(config: &ExperimentConfig) -> Result<String> {
    let mut c = config.clone();
    c.output.dir = PathBuf::new();
    Ok(sha256_hex(&serde_json::to_vec(&c).map_err(|e| Error::Io(e.to_string()))?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Load a TOML config, or the config echoed by a `manifest.json`.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?;
        let mut config = manifest.config;
        config.resolve()?;
        Ok(config)
    } else {
        parse_config(&text)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn table_writer(path: &Path, format: TableFormat) -> Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .delimiter(format.delimiter())
        .from_path(path)
        .map_err(csv_error)
}

pub fn norms_file(format: TableFormat) -> String {
    format!("norms.{}", format.extension())
}

pub fn coefficients_file(format: TableFormat) -> String {
    format!("coefficients.{}", format.extension())
}

/// `t`, `‖u‖`, `‖u‖_{X₀}`, `‖(-Δ)^s u‖`, `σ` and `M(σ)` per node.
pub fn write_norms_table(path: &Path, format: TableFormat, history: &SolutionHistory, problem: &ProblemData) -> Result<()> {
    let mut w = table_writer(path, format)?;
    w.write_record([
        "t (time)",
        "l2 (L2 norm)",
        "x0 (X0 norm)",
        "laplacian_s (L2 norm of (-Δ)^s u)",
        "sigma (X0 norm squared)",
        "kirchhoff (M(sigma))",
    ])
    .map_err(csv_error)?;
    let lambda = problem.assembly.eigenvalues();
    for (n, t) in history.times().into_iter().enumerate() {
        let norms = modal_norms(&history.column(n), lambda);
        w.write_record([t, norms.l2, norms.x0, norms.laplacian_s, history.sigma()[n], history.kirchhoff()[n]].map(num))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// `t` followed by every modal coefficient, one row per node.
pub fn write_coefficients_table(path: &Path, format: TableFormat, history: &SolutionHistory) -> Result<()> {
    let mut w = table_writer(path, format)?;
    let mut header = vec!["t (time)".to_string()];
    header.extend((1..=history.n_modes()).map(|k| format!("a_{k} (modal coefficient)")));
    w.write_record(&header).map_err(csv_error)?;
    for (n, t) in history.times().into_iter().enumerate() {
        let mut row = vec![num(t)];
        row.extend(history.column(n).into_iter().map(num));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Times and per-mode rows from a coefficient table.
pub fn read_coefficients_table(path: &Path, format: TableFormat) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let modes = r.headers().map_err(csv_error)?.len().saturating_sub(1);
    let mut times = Vec::new();
    let mut rows = vec![Vec::new(); modes];
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let values: Vec<f64> = record
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Io(format!("{} row {}: {e}", path.display(), line + 2)))?;
        if values.len() != modes + 1 {
            return Err(Error::Io(format!("{} row {}: expected {} columns", path.display(), line + 2, modes + 1)));
        }
        times.push(values[0]);
        for (row, v) in rows.iter_mut().zip(&values[1..]) {
            row.push(*v);
        }
    }
    Ok((times, rows))
}

fn data_constants(problem: &ProblemData, config: &ExperimentConfig) -> Result<BTreeMap<String, f64>> {
    let grid = config.grid()?;
    let t_final = grid.t_final();
    let u0 = modal_norms(problem.u0.as_slice(), problem.assembly.eigenvalues());
    Ok(BTreeMap::from([
        ("u0_l2_norm".to_string(), u0.l2),
        ("u0_x0_norm".to_string(), u0.x0),
        ("f_l2alpha_norm".to_string(), source_l2alpha_sq(problem, &grid)?.sqrt()),
        ("b0_constant".to_string(), estimate_b0_constant(&problem.memory, &problem.assembly, t_final)?),
        (
            "memory_to_laplacian_constant".to_string(),
            memory_to_laplacian_constant(&problem.memory, &problem.assembly, t_final)?,
        ),
    ]))
}

fn summary(history: &SolutionHistory, problem: &ProblemData) -> Result<BTreeMap<String, f64>> {
    let r = NormReport::new(history, problem)?;
    Ok(BTreeMap::from([
        ("sup_l2".to_string(), r.sup_l2),
        ("sup_x0".to_string(), r.sup_x0),
        ("sup_laplacian_s".to_string(), r.sup_laplacian_s),
        ("weighted_x0_sq".to_string(), r.weighted_x0_sq),
        ("weighted_laplacian_sq".to_string(), r.weighted_laplacian_sq),
    ]))
}

fn failed_record(id: CheckId, values: impl IntoIterator<Item = (&'static str, f64)>, reason: impl Into<String>) -> CheckRecord {
    CheckRecord::new(id, values, false).with_note(reason)
}

/// Evaluate one check. Checks that need a complete history fail on a partial one.
pub fn evaluate_check(
    id: CheckId,
    history: &SolutionHistory,
    problem: &ProblemData,
    config: &ExperimentConfig,
    solver: SolverConfig,
) -> Result<CheckRecord> {
    let completed = [("nodes_completed", history.len() as f64), ("nodes_total", history.grid().len() as f64)];
    if id != CheckId::H2 && !history.is_complete() {
        return Ok(failed_record(id, completed, "the run aborted before the final time"));
    }
    let checks = &config.checks;
    let record = match id {
        CheckId::H2 => {
            let u0 = modal_norms(problem.u0.as_slice(), problem.assembly.eigenvalues()).x0;
            let f = source_l2alpha_sq(problem, &config.grid()?)?.sqrt();
            let h2 = check_h2(&problem.law, u0, f)?;
            let r = CheckRecord::new(
                id,
                [
                    ("k", h2.k),
                    ("margin", h2.margin),
                    ("m0", problem.law.m0()),
                    ("lipschitz", problem.law.lipschitz()),
                ],
                h2.pass,
            );
            if h2.pass {
                r
            } else {
                r.with_note(format!("margin = {:e} ≤ 0: the data are too large for this law", h2.margin))
            }
        }
        CheckId::Apriori1 => {
            let b = check_apriori_1(history, problem)?;
            CheckRecord::new(id, [("lhs", b.lhs), ("rhs", b.rhs), ("ratio", b.ratio)], b.pass)
        }
        CheckId::Apriori2 => {
            let b = check_apriori_2(history, problem)?;
            CheckRecord::new(
                id,
                [
                    ("lhs", b.weighted.lhs),
                    ("rhs", b.weighted.rhs),
                    ("ratio", b.weighted.ratio),
                    ("plain_lhs", b.plain.lhs),
                    ("plain_ratio", b.plain.ratio),
                ],
                b.weighted.pass && b.plain.pass,
            )
        }
        CheckId::Apriori3 => {
            let b = check_apriori_3(history, problem)?;
            CheckRecord::new(id, [("lhs", b.lhs), ("rhs", b.rhs), ("ratio", b.ratio)], b.pass)
        }
        CheckId::Gronwall => {
            let g = gronwall_envelope(history, problem)?;
            CheckRecord::new(
                id,
                [
                    ("c", g.c),
                    ("envelope_violation", g.envelope_violation),
                    ("decay_violation", g.decay_violation),
                ],
                g.pass,
            )
        }
        CheckId::Holder => {
            let t_star = checks.holder_t_star;
            let alpha = problem.alpha();
            let base = [("t_star", t_star), ("alpha", alpha), ("tolerance", checks.holder_tol)];
            match fit_holder(history, problem, t_star) {
                Ok(fit) => {
                    let pass = if t_star == 0.0 {
                        (fit.exponent - alpha).abs() <= checks.holder_tol
                    } else {
                        fit.exponent >= alpha - checks.holder_tol
                    };
                    let [a, b, c] = base;
                    CheckRecord::new(id, [a, b, c, ("exponent", fit.exponent), ("points", fit.points as f64)], pass)
                        .with_note("the exponent tolerance is an engineering choice; no constant is known for the estimate")
                }
                Err(e @ (Error::DegenerateFit(_) | Error::Domain { .. })) => failed_record(id, base, e.to_string()),
                Err(e) => return Err(e),
            }
        }
        CheckId::Growth => {
            let g = check_growth(history, problem)?;
            let values = [("constant", g.constant), ("u0_norm", g.u0_norm)];
            if config.is_unforced_memoryless() {
                CheckRecord::new(id, values, g.pass && g.constant <= g.u0_norm * (1.0 + 1e-6))
                    .with_note("unforced and memoryless: the constant must not exceed ‖u₀‖")
            } else {
                CheckRecord::new(id, values, g.pass)
            }
        }
        CheckId::LinearOracle => {
            let e = linear_oracle_error(history, problem)?;
            let measured = match checks.oracle_window {
                OracleWindow::All => e.max_abs,
                OracleWindow::Late => e.max_abs_late,
            };
            CheckRecord::new(
                id,
                [("max_abs", e.max_abs), ("max_abs_late", e.max_abs_late), ("tolerance", checks.oracle_tol)],
                measured <= checks.oracle_tol,
            )
        }
        CheckId::Stability => {
            let delta = checks.stability_delta;
            let factor = stability_probe(problem, solver, delta)?;
            CheckRecord::new(id, [("delta", delta), ("amplification", factor)], factor.is_finite())
        }
        CheckId::Regularity => {
            let nu = checks.regularity_nu.unwrap_or(0.0);
            let r = regularity_series(history, problem, nu)?;
            CheckRecord::new(
                id,
                [("nu", r.nu), ("sup", r.sup), ("l2_time", r.l2_time), ("rhs", r.rhs), ("ratio", r.ratio)],
                r.pass,
            )
        }
    };
    Ok(record)
}

fn build_report(
    history: &SolutionHistory,
    problem: &ProblemData,
    config: &ExperimentConfig,
    solver: SolverConfig,
    failure: Option<String>,
) -> Result<Report> {
    let records = config
        .check_ids()
        .into_iter()
        .map(|id| evaluate_check(id, history, problem, config, solver))
        .collect::<Result<_>>()?;
    Ok(Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        status: if failure.is_some() { RunStatus::Failed } else { RunStatus::Completed },
        failure,
        nodes_completed: history.len(),
        nodes_total: history.grid().len(),
        constants: data_constants(problem, config)?,
        summary: summary(history, problem)?,
        records,
    })
}

/// Solve, check and write every artifact into `config.output.dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    let problem = config.build_problem()?;
    let solver = config.solver_config()?;
    let outcome = run_with_partial(&problem, solver)?;
    let dir = config.output.dir.clone();
    fs::create_dir_all(&dir)?;
    let format = config.output.format;

    let tables = [norms_file(format), coefficients_file(format)];
    write_norms_table(&dir.join(&tables[0]), format, &outcome.history, &problem)?;
    write_coefficients_table(&dir.join(&tables[1]), format, &outcome.history)?;

    let failure = outcome.failure.map(|e| e.to_string());
    let report = build_report(&outcome.history, &problem, config, solver, failure.clone())?;
    write_json(&dir.join(REPORT_FILE), &report)?;

    let marker = dir.join(FAILED_FILE);
    match &failure {
        Some(reason) => fs::write(&marker, format!("{reason}\n"))?,
        None if marker.exists() => fs::remove_file(&marker)?,
        None => {}
    }

    let mut artifacts = BTreeMap::new();
    for name in tables.iter().map(String::as_str).chain([REPORT_FILE]) {
        artifacts.insert(name.to_string(), sha256_hex(&fs::read(dir.join(name))?));
    }
    let manifest = Manifest {
        tool: TOOL.into(),
        version: VERSION.into(),
        config: config.clone(),
        config_sha256: config_hash(config)?,
        artifacts,
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(RunOutput { dir, report, manifest })
}

/// Rerun the checks on the coefficient table stored in `config.output.dir`.
pub fn verify_stored(config: &ExperimentConfig) -> Result<Report> {
    let problem = config.build_problem()?;
    let solver = config.solver_config()?;
    let grid = solver.grid;
    let dir = &config.output.dir;
    let (times, rows) = read_coefficients_table(&dir.join(coefficients_file(config.output.format)), config.output.format)?;
    for (n, t) in times.iter().enumerate() {
        if n >= grid.len() || (t - grid.node(n)).abs() > 1e-12 * grid.t_final() {
            return Err(Error::contract(
                "verify_stored",
                format!("stored time {t} at row {n} does not match the configured grid"),
            ));
        }
    }
    let history = SolutionHistory::from_coefficients(grid, rows, &problem)?;
    let failure = (!history.is_complete())
        .then(|| format!("stored history stops after {} of {} nodes", history.len(), grid.len()));
    let report = build_report(&history, &problem, config, solver, failure)?;
    write_json(&dir.join(VERIFY_REPORT_FILE), &report)?;
    Ok(report)
}

/// Hash every artifact listed in a manifest and compare against the stored hashes.
pub fn compare_artifacts(manifest: &Manifest, dir: &Path) -> Result<Vec<String>> {
    let mut mismatched = Vec::new();
    for (name, hash) in &manifest.artifacts {
        let bytes = fs::read(dir.join(name))?;
        if &sha256_hex(&bytes) != hash {
            mismatched.push(name.clone());
        }
    }
    Ok(mismatched)
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    /// Errors against `a_i(0) E_α(-λ_i m0 t^α)`.
    Oracle,
    /// Differences between successive refinements.
    SelfConvergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n_steps: usize,
    /// Sup over nodes of the `L²` error (or refinement difference).
    pub error: f64,
    /// The same over `t ≥ T/4`.
    pub error_late: f64,
    pub order: Option<f64>,
    pub order_late: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyTable {
    pub kind: StudyKind,
    pub rows: Vec<StudyRow>,
    /// Every error is at round-off, so no order can be observed.
    pub degenerate: bool,
}

fn oracle_errors(history: &SolutionHistory, problem: &ProblemData) -> Result<(f64, f64)> {
    let alpha = problem.alpha();
    let m = problem.law.m0();
    let lambda = problem.assembly.eigenvalues();
    let t_late = 0.25 * history.grid().t_final();
    let (mut all, mut late) = (0.0f64, 0.0f64);
    for (n, t) in history.times().into_iter().enumerate() {
        let col = history.column(n);
        let mut sq = 0.0;
        for (i, a) in col.iter().enumerate() {
            let exact = problem.u0.as_slice()[i] * mittag_leffler(alpha, -lambda[i] * m * t.powf(alpha))?;
            sq += (a - exact).powi(2);
        }
        let e = sq.sqrt();
        all = all.max(e);
        if t >= t_late {
            late = late.max(e);
        }
    }
    Ok((all, late))
}

fn refinement_difference(coarse: &SolutionHistory, fine: &SolutionHistory) -> (f64, f64) {
    let ratio = fine.grid().n_steps() / coarse.grid().n_steps();
    let t_late = 0.25 * coarse.grid().t_final();
    let (mut all, mut late) = (0.0f64, 0.0f64);
    for (n, t) in coarse.times().into_iter().enumerate() {
        let e = coarse
            .column(n)
            .iter()
            .zip(fine.column(n * ratio))
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        all = all.max(e);
        if t >= t_late {
            late = late.max(e);
        }
    }
    (all, late)
}

fn observed_order(e0: f64, e1: f64, refinement: f64, floor: f64) -> Option<f64> {
    (e0 > floor && e1 > floor).then(|| (e0 / e1).ln() / refinement.ln())
}

/// Run the config at `n_steps × factor` for each factor. Constant-law, unforced,
/// memoryless problems are compared with the exact solution; anything else with
/// the next finer run.
pub fn convergence_study(config: &ExperimentConfig, factors: &[usize]) -> Result<StudyTable> {
    const OP: &str = "convergence_study";
    if factors.len() < 2 || factors.windows(2).any(|w| w[0] == 0 || w[1] % w[0] != 0 || w[1] == w[0]) {
        return Err(Error::domain(OP, "factors must be increasing, each dividing the next"));
    }
    let problem = config.build_problem()?;
    let base = config.solver_config()?;
    let histories: Vec<SolutionHistory> = factors
        .par_iter()
        .map(|&f| {
            let mut solver = base;
            solver.grid = crate::fractional_calculus::UniformTimeGrid::new(base.grid.t_final(), base.grid.n_steps() * f)?;
            run(&problem, solver)
        })
        .collect::<Result<_>>()?;
    let u0 = modal_norms(problem.u0.as_slice(), problem.assembly.eigenvalues()).l2;
    let floor = ROUNDOFF * u0.max(1.0);

    let (kind, errors): (StudyKind, Vec<(usize, f64, f64)>) = if config.is_linear_oracle_case() {
        let e = histories
            .iter()
            .map(|h| oracle_errors(h, &problem).map(|(a, l)| (h.grid().n_steps(), a, l)))
            .collect::<Result<_>>()?;
        (StudyKind::Oracle, e)
    } else {
        let e = histories
            .windows(2)
            .map(|w| {
                let (a, l) = refinement_difference(&w[0], &w[1]);
                (w[0].grid().n_steps(), a, l)
            })
            .collect();
        (StudyKind::SelfConvergence, e)
    };
    let degenerate = errors.iter().all(|&(_, a, _)| a <= floor);
    let mut rows: Vec<StudyRow> = errors
        .iter()
        .map(|&(n_steps, error, error_late)| StudyRow {
            n_steps,
            error,
            error_late,
            order: None,
            order_late: None,
        })
        .collect();
    for k in 1..rows.len() {
        let refinement = rows[k].n_steps as f64 / rows[k - 1].n_steps as f64;
        rows[k].order = observed_order(rows[k - 1].error, rows[k].error, refinement, floor);
        rows[k].order_late = observed_order(rows[k - 1].error_late, rows[k].error_late, refinement, floor);
    }
    Ok(StudyTable { kind, rows, degenerate })
}

pub fn study_file(format: TableFormat) -> String {
    format!("study.{}", format.extension())
}

pub fn write_study_table(path: &Path, format: TableFormat, table: &StudyTable) -> Result<()> {
    let mut w = table_writer(path, format)?;
    let what = match table.kind {
        StudyKind::Oracle => "error vs exact solution",
        StudyKind::SelfConvergence => "difference to next refinement",
    };
    w.write_record([
        "n_steps (count)".to_string(),
        format!("error (L2 {what})"),
        format!("error_late (L2 {what}, t >= T/4)"),
        "order (dimensionless)".to_string(),
        "order_late (dimensionless)".to_string(),
        "degenerate (0/1)".to_string(),
    ])
    .map_err(csv_error)?;
    let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), num);
    for r in &table.rows {
        w.write_record([
            r.n_steps.to_string(),
            num(r.error),
            num(r.error_late),
            opt(r.order),
            opt(r.order_late),
            u8::from(table.degenerate).to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Linear-case comparison with the exact modal solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub max_abs: f64,
    pub max_abs_late: f64,
    pub tolerance: f64,
    pub window: OracleWindow,
    pub pass: bool,
}

pub fn oracle_file(format: TableFormat) -> String {
    format!("oracle.{}", format.extension())
}

/// Solve a constant-law, unforced, memoryless config and write the per-node
/// coefficient error against the Mittag-Leffler solution.
pub fn oracle_comparison(config: &ExperimentConfig) -> Result<OracleSummary> {
    if !config.is_linear_oracle_case() {
        return Err(Error::contract(
            "oracle_comparison",
            "needs a constant Kirchhoff law, source kind `zero` and the memory term off",
        ));
    }
    let problem = config.build_problem()?;
    let history = run(&problem, config.solver_config()?)?;
    let e = linear_oracle_error(&history, &problem)?;

    let dir = &config.output.dir;
    fs::create_dir_all(dir)?;
    let format = config.output.format;
    let mut w = table_writer(&dir.join(oracle_file(format)), format)?;
    w.write_record(["t (time)", "max_abs_error (modal coefficient)"]).map_err(csv_error)?;
    let (alpha, m, lambda) = (problem.alpha(), problem.law.m0(), problem.assembly.eigenvalues());
    for (n, t) in history.times().into_iter().enumerate() {
        let mut worst = 0.0f64;
        for (i, a) in history.column(n).iter().enumerate() {
            let exact = problem.u0.as_slice()[i] * mittag_leffler(alpha, -lambda[i] * m * t.powf(alpha))?;
            worst = worst.max((a - exact).abs());
        }
        w.write_record([num(t), num(worst)]).map_err(csv_error)?;
    }
    w.flush()?;

    let window = config.checks.oracle_window;
    let measured = match window {
        OracleWindow::All => e.max_abs,
        OracleWindow::Late => e.max_abs_late,
    };
    Ok(OracleSummary {
        max_abs: e.max_abs,
        max_abs_late: e.max_abs_late,
        tolerance: config.checks.oracle_tol,
        window,
        pass: measured <= config.checks.oracle_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dir: &Path, extra: &str) -> ExperimentConfig {
        let text = format!(
            "[problem]\nalpha = 0.5\ns = 0.5\nmodes = 4\n{extra}\n[solver]\nn_steps = 64\n[output]\ndir = \"{}\"\n",
            dir.display()
        );
        parse_config(&text).unwrap()
    }

    #[test]
    fn coefficient_table_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let c = config(dir.path(), "");
        let out = run_experiment(&c).unwrap();
        assert!(out.success());
        let (times, rows) = read_coefficients_table(&dir.path().join("coefficients.csv"), TableFormat::Csv).unwrap();
        let problem = c.build_problem().unwrap();
        let again = run(&problem, c.solver_config().unwrap()).unwrap();
        assert_eq!(times, again.times());
        assert_eq!(rows, again.coefficients());
    }

    #[test]
    fn tables_have_one_header_line() {
        let dir = tempfile::tempdir().unwrap();
        run_experiment(&config(dir.path(), "")).unwrap();
        let text = fs::read_to_string(dir.path().join("norms.csv")).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("t (time),l2 (L2 norm)"));
        assert_eq!(lines.count(), 65);
    }

    #[test]
    fn tsv_output_uses_tabs() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = config(dir.path(), "");
        c.output.format = TableFormat::Tsv;
        run_experiment(&c).unwrap();
        let text = fs::read_to_string(dir.path().join("coefficients.tsv")).unwrap();
        assert!(text.lines().nth(1).unwrap().contains('\t'));
    }

    #[test]
    fn study_factors_must_nest() {
        let dir = tempfile::tempdir().unwrap();
        let c = config(dir.path(), "");
        assert!(convergence_study(&c, &[2, 3]).is_err());
        assert!(convergence_study(&c, &[2]).is_err());
    }
}
