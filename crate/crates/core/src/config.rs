//! Experiment configuration: one TOML document per experiment.
//!
//! Every table carries a catch-all for unrecognized keys so that validation can
//! report all problems at once instead of stopping at the first.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional_calculus::{FirstCell, UniformTimeGrid};
use crate::galerkin_solver::{CorrectorKind, SolverConfig};
use crate::problem_model::{KirchhoffLaw, MemoryKernel, MemorySpec, ProblemData, Source};
use crate::spatial_operator::{assemble_fem_integral, build_spectral, project, Domain1D, ModalVector};
use crate::special_functions::FractionalOrders;
use crate::verification::{default_nu, CheckId};

type Extra = BTreeMap<String, toml::Value>;

fn unknown_keys(errors: &mut Vec<String>, table: &str, extra: &Extra) {
    for key in extra.keys() {
        errors.push(format!("{table}: unknown key `{key}`"));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub checks: ChecksSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(flatten, default, skip_serializing)]
    extra: Extra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorChoice {
    /// Sine basis with eigenvalues `(kπ/L)^{2s}`.
    #[default]
    Spectral,
    /// P1 finite elements for the integral fractional Laplacian.
    Fem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    #[serde(default = "default_domain")]
    pub domain: [f64; 2],
    pub alpha: f64,
    pub s: f64,
    #[serde(default)]
    pub operator: OperatorChoice,
    #[serde(default = "default_modes")]
    pub modes: usize,
    /// Mesh size for the FEM operator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<usize>,
    #[serde(default)]
    pub kirchhoff: LawConfig,
    #[serde(default)]
    pub memory: MemoryConfig,
    #[serde(default)]
    pub source: SourceConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(flatten, default, skip_serializing)]
    extra: Extra,
}

fn default_domain() -> [f64; 2] {
    [0.0, 1.0]
}

fn default_modes() -> usize {
    8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    #[default]
    Constant,
    Affine,
    Saturating,
}

/// `M(σ)`: `m0`, `m0 + cσ` or `m0 + cσ/(1+σ)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LawConfig {
    #[serde(default)]
    pub kind: LawKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(flatten, default, skip_serializing)]
    extra: Extra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    #[default]
    Zero,
    /// `b₀ = amplitude`.
    Constant,
    /// `b₀ = amplitude · e^{-rate (t-τ)}`.
    ExpDecay,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct KernelConfig {
    #[serde(default)]
    pub kind: KernelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(flatten, default, skip_serializing)]
    extra: Extra,
}

/// `β(-Δ)^{s_memory} + b₀` inside the memory integral.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MemoryConfig {
    #[serde(default)]
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_memory: Option<f64>,
    #[serde(default)]
    pub b0: KernelConfig,
    #[serde(flatten, default, skip_serializing)]
    extra: Extra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    #[default]
    Zero,
    /// `f = amplitude`.
    Constant,
    /// `f = amplitude · sin(πt/T) · sin(π(x-a)/L)`.
    SinBump,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SourceConfig {
    #[serde(default)]
    pub kind: SourceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(flatten, default, skip_serializing)]
    extra: Extra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Zero,
    /// `amplitude · φ_index` (1-based).
    #[default]
    Mode,
    /// `amplitude · (x-a)(b-x)`.
    Parabola,
    /// Modal coefficients given directly.
    Coefficients,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InitialConfig {
    #[serde(default)]
    pub kind: InitialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(flatten, default, skip_serializing)]
    extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_n_steps")]
    pub n_steps: usize,
    #[serde(default = "default_iterations")]
    pub corrector_iterations: usize,
    #[serde(default = "default_tol")]
    pub fixed_point_tol: f64,
    #[serde(default)]
    pub corrector: CorrectorKind,
    #[serde(default)]
    pub first_cell: FirstCell,
    #[serde(flatten, default, skip_serializing)]
    extra: Extra,
}

fn default_t_final() -> f64 {
    1.0
}

fn default_n_steps() -> usize {
    512
}

fn default_iterations() -> usize {
    2
}

fn default_tol() -> f64 {
    1e-12
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            t_final: default_t_final(),
            n_steps: default_n_steps(),
            corrector_iterations: default_iterations(),
            fixed_point_tol: default_tol(),
            corrector: CorrectorKind::default(),
            first_cell: FirstCell::default(),
            extra: Extra::new(),
        }
    }
}

/// Where the linear-oracle tolerance is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleWindow {
    /// Every node.
    #[default]
    All,
    /// Nodes with `t ≥ T/4`.
    Late,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChecksSection {
    #[serde(default = "default_checks")]
    pub run: Vec<String>,
    #[serde(default)]
    pub holder_t_star: f64,
    #[serde(default = "default_holder_tol")]
    pub holder_tol: f64,
    #[serde(default = "default_delta")]
    pub stability_delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity_nu: Option<f64>,
    #[serde(default = "default_oracle_tol")]
    pub oracle_tol: f64,
    #[serde(default)]
    pub oracle_window: OracleWindow,
    #[serde(flatten, default, skip_serializing)]
    extra: Extra,
}

fn default_checks() -> Vec<String> {
    ["h2", "apriori_1", "apriori_2", "apriori_3", "growth"].map(String::from).to_vec()
}

fn default_holder_tol() -> f64 {
    0.15
}

fn default_delta() -> f64 {
    1e-6
}

fn default_oracle_tol() -> f64 {
    1e-3
}

impl Default for ChecksSection {
    fn default() -> Self {
        Self {
            run: default_checks(),
            holder_t_star: 0.0,
            holder_tol: default_holder_tol(),
            stability_delta: default_delta(),
            regularity_nu: None,
            oracle_tol: default_oracle_tol(),
            oracle_window: OracleWindow::default(),
            extra: Extra::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    #[default]
    Csv,
    Tsv,
}

impl TableFormat {
    pub fn delimiter(self) -> u8 {
        match self {
            TableFormat::Csv => b',',
            TableFormat::Tsv => b'\t',
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Tsv => "tsv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: TableFormat,
    #[serde(flatten, default, skip_serializing)]
    extra: Extra,
}

fn default_dir() -> PathBuf {
    PathBuf::from("kfrac-out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: TableFormat::default(),
            extra: Extra::new(),
        }
    }
}

/// Parse and validate a TOML experiment description, filling every default.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
    config.resolve()?;
    Ok(config)
}

fn finite(errors: &mut Vec<String>, name: &str, v: f64) -> bool {
    if v.is_finite() {
        true
    } else {
        errors.push(format!("{name} = {v} must be finite"));
        false
    }
}

fn positive(errors: &mut Vec<String>, name: &str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        errors.push(format!("{name} = {v} must be positive and finite"));
    }
}

fn forbid(errors: &mut Vec<String>, table: &str, key: &str, present: bool, kind: &str) {
    if present {
        errors.push(format!("{table}: `{key}` does not apply to kind `{kind}`"));
    }
}

impl ExperimentConfig {
    /// Validate and fill defaults. All problems are reported together.
    pub fn resolve(&mut self) -> Result<()> {
        let mut errors = Vec::new();
        unknown_keys(&mut errors, "top level", &self.extra);
        self.problem.resolve(&mut errors);
        self.solver.resolve(&mut errors);
        self.checks.resolve(&self.problem, &self.solver, &mut errors);
        unknown_keys(&mut errors, "[output]", &self.output.extra);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }

    /// Requested checks, in the order given.
    pub fn check_ids(&self) -> Vec<CheckId> {
        self.checks.run.iter().filter_map(|c| c.parse().ok()).collect()
    }

    /// Replace the check list (e.g. from a command-line filter) and revalidate.
    pub fn with_checks(mut self, checks: &[String]) -> Result<Self> {
        self.checks.run = checks.to_vec();
        self.resolve()?;
        Ok(self)
    }

    pub fn orders(&self) -> Result<FractionalOrders> {
        FractionalOrders::new(self.problem.alpha, self.problem.s)
    }

    pub fn grid(&self) -> Result<UniformTimeGrid> {
        UniformTimeGrid::new(self.solver.t_final, self.solver.n_steps)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let mut config = SolverConfig::new(self.grid()?, self.problem.modes);
        config.corrector_iterations = self.solver.corrector_iterations;
        config.fixed_point_tol = self.solver.fixed_point_tol;
        config.corrector = self.solver.corrector;
        config.first_cell = self.solver.first_cell;
        Ok(config)
    }

    /// Assemble the operator and data described by the `[problem]` table.
    pub fn build_problem(&self) -> Result<ProblemData> {
        let p = &self.problem;
        let domain = Domain1D::new(p.domain[0], p.domain[1])?;
        let assembly = match p.operator {
            OperatorChoice::Spectral => build_spectral(domain, p.s, p.modes)?,
            OperatorChoice::Fem => {
                let n = p.elements.unwrap_or(DEFAULT_ELEMENTS);
                assemble_fem_integral(domain, p.s, n)?.truncated(p.modes)?
            }
        };
        let assembly = Arc::new(assembly);
        let law = p.kirchhoff.build()?;
        let memory = p.memory.build();
        let source = p.source.build(domain, self.solver.t_final, &assembly)?;
        let u0 = p.initial.build(domain, &assembly)?;
        ProblemData::new(self.orders()?, assembly, law, memory, source, u0)
    }

    /// True when the run has the closed-form modal solution `a_i(0) E_α(-λ_i m0 t^α)`.
    pub fn is_linear_oracle_case(&self) -> bool {
        self.problem.kirchhoff.kind == LawKind::Constant && self.is_unforced_memoryless()
    }

    pub fn is_unforced_memoryless(&self) -> bool {
        self.problem.source.kind == SourceKind::Zero
            && self.problem.memory.beta == 0.0
            && self.problem.memory.b0.kind == KernelKind::Zero
    }
}

const DEFAULT_ELEMENTS: usize = 64;

impl ProblemConfig {
    fn resolve(&mut self, errors: &mut Vec<String>) {
        unknown_keys(errors, "[problem]", &self.extra);
        let [a, b] = self.domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            errors.push(format!("problem.domain = [{a}, {b}] must be a finite interval with a < b"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            errors.push(format!(
                "problem.alpha = {} is outside (0, 1): the time order must satisfy 0 < α < 1",
                self.alpha
            ));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            errors.push(format!(
                "problem.s = {} is outside (0, 1): the space order must satisfy 0 < s < 1",
                self.s
            ));
        }
        if self.modes == 0 {
            errors.push("problem.modes must be at least 1".into());
        }
        match self.operator {
            OperatorChoice::Spectral => {
                if self.elements.is_some() {
                    errors.push("problem.elements applies only to operator = \"fem\"".into());
                }
            }
            OperatorChoice::Fem => {
                let n = *self.elements.get_or_insert(DEFAULT_ELEMENTS);
                if n < 2 {
                    errors.push(format!("problem.elements = {n} must be at least 2"));
                } else if self.modes > n - 1 {
                    errors.push(format!(
                        "problem.modes = {} exceeds the {} interior nodes of a {n}-element mesh",
                        self.modes,
                        n - 1
                    ));
                }
            }
        }
        self.kirchhoff.resolve(errors);
        self.memory.resolve(self.s, errors);
        self.source.resolve(errors);
        self.initial.resolve(self.modes, errors);
    }
}

impl LawConfig {
    fn resolve(&mut self, errors: &mut Vec<String>) {
        const T: &str = "[problem.kirchhoff]";
        unknown_keys(errors, T, &self.extra);
        let m0 = *self.m0.get_or_insert(1.0);
        if !(m0 > 0.0 && m0.is_finite()) {
            errors.push(format!(
                "problem.kirchhoff.m0 = {m0} violates the Kirchhoff hypothesis M(σ) ≥ m0 > 0"
            ));
        }
        match self.kind {
            LawKind::Constant => forbid(errors, T, "c", self.c.is_some(), "constant"),
            LawKind::Affine | LawKind::Saturating => match self.c {
                None => errors.push(format!("{T}: kind `{:?}` requires `c`", self.kind).to_lowercase()),
                Some(c) if !(c >= 0.0 && c.is_finite()) => errors.push(format!(
                    "problem.kirchhoff.c = {c} violates the Kirchhoff hypothesis (nondecreasing, Lipschitz M needs c ≥ 0)"
                )),
                Some(_) => {}
            },
        }
    }

    fn build(&self) -> Result<KirchhoffLaw> {
        let m0 = self.m0.unwrap_or(1.0);
        let c = self.c.unwrap_or(0.0);
        match self.kind {
            LawKind::Constant => KirchhoffLaw::constant(m0),
            LawKind::Affine => KirchhoffLaw::affine(m0, c),
            LawKind::Saturating => KirchhoffLaw::saturating(m0, c),
        }
    }
}

impl MemoryConfig {
    fn resolve(&mut self, s: f64, errors: &mut Vec<String>) {
        unknown_keys(errors, "[problem.memory]", &self.extra);
        finite(errors, "problem.memory.beta", self.beta);
        if let Some(sm) = self.s_memory {
            if !(sm > 0.0 && sm <= s) {
                errors.push(format!(
                    "problem.memory.s_memory = {sm} breaks the mixed-order rule 0 < s_memory ≤ s = {s}"
                ));
            }
        } else if s > 0.0 && s < 1.0 {
            self.s_memory = Some(s);
        }
        self.b0.resolve(errors);
    }

    fn build(&self) -> MemorySpec {
        MemorySpec {
            beta: self.beta,
            s_memory: self.s_memory,
            b0: self.b0.build(),
        }
    }
}

impl KernelConfig {
    fn resolve(&mut self, errors: &mut Vec<String>) {
        const T: &str = "[problem.memory.b0]";
        unknown_keys(errors, T, &self.extra);
        match self.kind {
            KernelKind::Zero => {
                forbid(errors, T, "amplitude", self.amplitude.is_some(), "zero");
                forbid(errors, T, "rate", self.rate.is_some(), "zero");
            }
            KernelKind::Constant => {
                forbid(errors, T, "rate", self.rate.is_some(), "constant");
                let a = *self.amplitude.get_or_insert(1.0);
                finite(errors, "problem.memory.b0.amplitude (memory hypothesis: b₀ bounded)", a);
            }
            KernelKind::ExpDecay => {
                let a = *self.amplitude.get_or_insert(1.0);
                let r = *self.rate.get_or_insert(1.0);
                finite(errors, "problem.memory.b0.amplitude (memory hypothesis: b₀ bounded)", a);
                finite(errors, "problem.memory.b0.rate (memory hypothesis: b₀ bounded)", r);
            }
        }
    }

    fn build(&self) -> MemoryKernel {
        let a = self.amplitude.unwrap_or(1.0);
        let one: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(|_| 1.0);
        match self.kind {
            KernelKind::Zero => MemoryKernel::Zero,
            KernelKind::Constant => MemoryKernel::Separable {
                g: Arc::new(move |_, _| a),
                h: one,
            },
            KernelKind::ExpDecay => {
                let r = self.rate.unwrap_or(1.0);
                MemoryKernel::Separable {
                    g: Arc::new(move |t, tau| a * (-r * (t - tau)).exp()),
                    h: one,
                }
            }
        }
    }
}

impl SourceConfig {
    fn resolve(&mut self, errors: &mut Vec<String>) {
        const T: &str = "[problem.source]";
        unknown_keys(errors, T, &self.extra);
        match self.kind {
            SourceKind::Zero => forbid(errors, T, "amplitude", self.amplitude.is_some(), "zero"),
            SourceKind::Constant | SourceKind::SinBump => {
                let a = *self.amplitude.get_or_insert(1.0);
                finite(errors, "problem.source.amplitude", a);
            }
        }
    }

    fn build(&self, domain: Domain1D, t_final: f64, assembly: &crate::spatial_operator::OperatorAssembly) -> Result<Source> {
        let a = self.amplitude.unwrap_or(1.0);
        Ok(match self.kind {
            SourceKind::Zero => Source::Zero,
            SourceKind::Constant => Source::Separable {
                g: Arc::new(move |_| a),
                h: project(|_| 1.0, assembly)?,
            },
            SourceKind::SinBump => {
                let (x0, len) = (domain.a(), domain.length());
                let h = project(|x| (std::f64::consts::PI * (x - x0) / len).sin(), assembly)?;
                Source::Separable {
                    g: Arc::new(move |t| a * (std::f64::consts::PI * t / t_final).sin()),
                    h,
                }
            }
        })
    }
}

impl InitialConfig {
    fn resolve(&mut self, modes: usize, errors: &mut Vec<String>) {
        const T: &str = "[problem.initial]";
        unknown_keys(errors, T, &self.extra);
        let kind = format!("{:?}", self.kind).to_lowercase();
        let (index, amplitude, values) = (self.index.is_some(), self.amplitude.is_some(), self.values.is_some());
        match self.kind {
            InitialKind::Zero => {
                forbid(errors, T, "index", index, &kind);
                forbid(errors, T, "amplitude", amplitude, &kind);
                forbid(errors, T, "values", values, &kind);
            }
            InitialKind::Mode => {
                forbid(errors, T, "values", values, &kind);
                let k = *self.index.get_or_insert(1);
                if k == 0 || k > modes {
                    errors.push(format!("problem.initial.index = {k} must lie in 1..={modes}"));
                }
                let a = *self.amplitude.get_or_insert(1.0);
                finite(errors, "problem.initial.amplitude (initial-datum hypothesis: u₀ ∈ X₀)", a);
            }
            InitialKind::Parabola => {
                forbid(errors, T, "index", index, &kind);
                forbid(errors, T, "values", values, &kind);
                let a = *self.amplitude.get_or_insert(1.0);
                finite(errors, "problem.initial.amplitude (initial-datum hypothesis: u₀ ∈ X₀)", a);
            }
            InitialKind::Coefficients => {
                forbid(errors, T, "index", index, &kind);
                forbid(errors, T, "amplitude", amplitude, &kind);
                match &self.values {
                    None => errors.push(format!("{T}: kind `coefficients` requires `values`")),
                    Some(v) => {
                        if v.len() != modes {
                            errors.push(format!("problem.initial.values has {} entries for {modes} modes", v.len()));
                        }
                        if v.iter().any(|c| !c.is_finite()) {
                            errors.push(
                                "problem.initial.values must be finite (initial-datum hypothesis: u₀ ∈ X₀)".into(),
                            );
                        }
                    }
                }
            }
        }
    }

    fn build(&self, domain: Domain1D, assembly: &crate::spatial_operator::OperatorAssembly) -> Result<ModalVector> {
        let m = assembly.mode_count();
        let a = self.amplitude.unwrap_or(1.0);
        match self.kind {
            InitialKind::Zero => Ok(ModalVector::zeros(m)),
            InitialKind::Mode => {
                let mut v = vec![0.0; m];
                v[self.index.unwrap_or(1) - 1] = a;
                ModalVector::new(v)
            }
            InitialKind::Parabola => {
                let (lo, hi) = (domain.a(), domain.b());
                project(|x| a * (x - lo) * (hi - x), assembly)
            }
            InitialKind::Coefficients => ModalVector::new(self.values.clone().unwrap_or_default()),
        }
    }
}

impl SolverSection {
    fn resolve(&mut self, errors: &mut Vec<String>) {
        unknown_keys(errors, "[solver]", &self.extra);
        positive(errors, "solver.t_final", self.t_final);
        if self.n_steps == 0 {
            errors.push("solver.n_steps must be at least 1".into());
        }
        if self.corrector_iterations == 0 {
            errors.push("solver.corrector_iterations must be at least 1".into());
        }
        positive(errors, "solver.fixed_point_tol", self.fixed_point_tol);
    }
}

impl ChecksSection {
    fn resolve(&mut self, problem: &ProblemConfig, solver: &SolverSection, errors: &mut Vec<String>) {
        unknown_keys(errors, "[checks]", &self.extra);
        let mut seen = Vec::new();
        for name in &self.run {
            match name.parse::<CheckId>() {
                Ok(id) if seen.contains(&id) => errors.push(format!("checks.run lists `{name}` twice")),
                Ok(id) => seen.push(id),
                Err(e) => errors.push(format!("checks.run: {e}")),
            }
        }
        let unforced = problem.source.kind == SourceKind::Zero
            && problem.memory.beta == 0.0
            && problem.memory.b0.kind == KernelKind::Zero;
        for id in &seen {
            match id {
                CheckId::Gronwall if !unforced => {
                    errors.push("check `gronwall` needs source kind `zero` and the memory term off".into())
                }
                CheckId::LinearOracle if !(unforced && problem.kirchhoff.kind == LawKind::Constant) => errors.push(
                    "check `linear_oracle` needs a constant Kirchhoff law, source kind `zero` and the memory term off"
                        .into(),
                ),
                CheckId::Regularity if problem.operator != OperatorChoice::Spectral => {
                    errors.push("check `regularity` needs operator = \"spectral\"".into())
                }
                _ => {}
            }
        }
        if !(self.holder_t_star >= 0.0 && self.holder_t_star <= solver.t_final) {
            errors.push(format!(
                "checks.holder_t_star = {} must lie in [0, t_final = {}]",
                self.holder_t_star, solver.t_final
            ));
        }
        positive(errors, "checks.holder_tol", self.holder_tol);
        positive(errors, "checks.stability_delta", self.stability_delta);
        positive(errors, "checks.oracle_tol", self.oracle_tol);
        match self.regularity_nu {
            Some(nu) if !(nu >= 0.0 && nu < 0.5 && nu <= problem.s) => errors.push(format!(
                "checks.regularity_nu = {nu} must satisfy 0 ≤ ν ≤ s and ν < 1/2"
            )),
            Some(_) => {}
            None if problem.s > 0.0 && problem.s < 1.0 => self.regularity_nu = Some(default_nu(problem.s, 0.01)),
            None => {}
        }
    }
}
