//! Problem data: Kirchhoff law, memory kernel, source, initial datum, and the
//! data-side feasibility checks.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional_calculus::{rl_integral, SampledPath, UniformTimeGrid};
use crate::spatial_operator::{project, ModalVector, OperatorAssembly};
use crate::special_functions::{gamma, FractionalOrders};

pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type Fn3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KirchhoffKind {
    Constant,
    Affine,
    Saturating,
    Custom,
}

/// Kirchhoff coefficient `M(σ)`, `σ = ‖u‖²_{X₀}`, with lower bound `m0` and
/// Lipschitz constant `L_M`.
#[derive(Clone)]
pub struct KirchhoffLaw {
    kind: KirchhoffKind,
    m0: f64,
    slope: f64,
    lipschitz: f64,
    custom: Option<Fn1>,
}

impl fmt::Debug for KirchhoffLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KirchhoffLaw")
            .field("kind", &self.kind)
            .field("m0", &self.m0)
            .field("slope", &self.slope)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

fn check_positive(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{name} = {v} must be positive and finite")))
    }
}

fn check_nonnegative(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{name} = {v} must be nonnegative and finite")))
    }
}

impl KirchhoffLaw {
    /// `M ≡ m0`.
    pub fn constant(m0: f64) -> Result<Self> {
        check_positive("KirchhoffLaw::constant", "m0", m0)?;
        Ok(Self {
            kind: KirchhoffKind::Constant,
            m0,
            slope: 0.0,
            lipschitz: 0.0,
            custom: None,
        })
    }

    /// `M(σ) = m0 + cσ`.
    pub fn affine(m0: f64, c: f64) -> Result<Self> {
        check_positive("KirchhoffLaw::affine", "m0", m0)?;
        check_nonnegative("KirchhoffLaw::affine", "c", c)?;
        Ok(Self {
            kind: KirchhoffKind::Affine,
            m0,
            slope: c,
            lipschitz: c,
            custom: None,
        })
    }

    /// `M(σ) = m0 + cσ/(1+σ)`.
    pub fn saturating(m0: f64, c: f64) -> Result<Self> {
        check_positive("KirchhoffLaw::saturating", "m0", m0)?;
        check_nonnegative("KirchhoffLaw::saturating", "c", c)?;
        Ok(Self {
            kind: KirchhoffKind::Saturating,
            m0,
            slope: c,
            lipschitz: c,
            custom: None,
        })
    }

    /// A user law with declared bounds; the declarations are spot-checked.
    pub fn custom(f: Fn1, m0: f64, lipschitz: f64) -> Result<Self> {
        check_positive("KirchhoffLaw::custom", "m0", m0)?;
        check_nonnegative("KirchhoffLaw::custom", "lipschitz", lipschitz)?;
        let law = Self {
            kind: KirchhoffKind::Custom,
            m0,
            slope: 0.0,
            lipschitz,
            custom: Some(f),
        };
        law.spot_check(0x6b69_7263)?;
        Ok(law)
    }

    pub fn kind(&self) -> KirchhoffKind {
        self.kind
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn eval(&self, sigma: f64) -> f64 {
        match self.kind {
            KirchhoffKind::Constant => self.m0,
            KirchhoffKind::Affine => self.m0 + self.slope * sigma,
            KirchhoffKind::Saturating => self.m0 + self.slope * sigma / (1.0 + sigma),
            KirchhoffKind::Custom => (self.custom.as_ref().expect("custom law without evaluator"))(sigma),
        }
    }

    /// Check `M ≥ m0` on a log grid and the Lipschitz bound on random pairs.
    pub fn spot_check(&self, seed: u64) -> Result<()> {
        const OP: &str = "KirchhoffLaw::spot_check";
        let grid = std::iter::once(0.0).chain((-60..=60).map(|k| 10f64.powf(k as f64 / 10.0)));
        for sigma in grid {
            let v = self.eval(sigma);
            if !(v >= self.m0) {
                return Err(Error::contract(
                    OP,
                    format!("M({sigma:e}) = {v} is below the declared lower bound m0 = {}", self.m0),
                ));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let s1 = 10f64.powf(rng.random_range(-4.0..3.0));
            let s2 = s1 + 10f64.powf(rng.random_range(-6.0..1.0));
            let (m1, m2) = (self.eval(s1), self.eval(s2));
            let d = (m2 - m1).abs();
            let rounding = 8.0 * f64::EPSILON * (m1.abs() + m2.abs());
            if d > self.lipschitz * (s2 - s1) * (1.0 + 1e-9) + rounding {
                return Err(Error::contract(
                    OP,
                    format!(
                        "|M({s2:e}) - M({s1:e})| = {d:e} exceeds L_M |Δσ| with L_M = {}",
                        self.lipschitz
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Outcome of the `m0 - 4 L_M K² > 0` feasibility test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H2Check {
    pub k: f64,
    pub margin: f64,
    pub pass: bool,
}

/// `K = ‖u₀‖_{X₀} + ‖f‖_{L²_α}`, `margin = m0 - 4 L_M K²`.
pub fn check_h2(law: &KirchhoffLaw, u0_x0_norm: f64, f_l2alpha_norm: f64) -> Result<H2Check> {
    check_nonnegative("check_h2", "u0_x0_norm", u0_x0_norm)?;
    check_nonnegative("check_h2", "f_l2alpha_norm", f_l2alpha_norm)?;
    let k = u0_x0_norm + f_l2alpha_norm;
    let margin = law.m0() - 4.0 * law.lipschitz() * k * k;
    Ok(H2Check {
        k,
        margin,
        pass: margin > 0.0,
    })
}

/// `sup_n (∫_0^{t_n} (t_n-τ)^{α-1} ‖f(τ)‖² dτ)^{1/2}` from samples of `‖f‖`.
pub fn l2alpha_norm(path: &SampledPath, alpha: f64) -> Result<f64> {
    if path.n_rows() != 1 {
        return Err(Error::contract("l2alpha_norm", "expected a single row of norm samples"));
    }
    if path.row(0).iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::domain("l2alpha_norm", "norm samples must be nonnegative"));
    }
    let sq = SampledPath::new(*path.grid(), path.row(0).iter().map(|v| v * v).collect())?;
    let weighted = rl_integral(&sq, alpha)?;
    Ok((gamma(alpha) * weighted.row(0).iter().copied().fold(0.0, f64::max)).sqrt())
}

/// The bounded part `b₀(x, t, τ)` of the memory kernel.
#[derive(Clone, Default)]
pub enum MemoryKernel {
    #[default]
    Zero,
    /// `g(t, τ)·h(x)`.
    Separable { g: Fn2, h: Fn1 },
    General(Fn3),
}

impl fmt::Debug for MemoryKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MemoryKernel::Zero => "Zero",
            MemoryKernel::Separable { .. } => "Separable",
            MemoryKernel::General(_) => "General",
        })
    }
}

/// Memory `β(-Δ)^{s_mem} + b₀`, with `s_mem = s` unless given.
#[derive(Debug, Clone, Default)]
pub struct MemorySpec {
    pub beta: f64,
    pub s_memory: Option<f64>,
    pub b0: MemoryKernel,
}

impl MemorySpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_off(&self) -> bool {
        self.beta == 0.0 && matches!(self.b0, MemoryKernel::Zero)
    }

    /// Sampled `sup |b₀|` over `Ω × {τ ≤ t ≤ T}`.
    pub fn b0_bound(&self, assembly: &OperatorAssembly, t_final: f64) -> f64 {
        let d = assembly.domain();
        let pts = 17;
        let mut sup: f64 = 0.0;
        for it in 0..pts {
            let t = t_final * it as f64 / (pts - 1) as f64;
            for itau in 0..=it {
                let tau = t_final * itau as f64 / (pts - 1) as f64;
                for ix in 0..pts {
                    let x = d.a() + d.length() * ix as f64 / (pts - 1) as f64;
                    let v = match &self.b0 {
                        MemoryKernel::Zero => 0.0,
                        MemoryKernel::Separable { g, h } => g(t, tau) * h(x),
                        MemoryKernel::General(b) => b(x, t, tau),
                    };
                    sup = sup.max(v.abs());
                }
            }
        }
        sup
    }
}

/// `G_ij = (b₀(·, t, τ) φ_j, φ_i)`.
pub fn memory_coupling_matrix(
    memory: &MemorySpec,
    assembly: &OperatorAssembly,
    t: f64,
    tau: f64,
) -> Result<DMatrix<f64>> {
    let m = assembly.mode_count();
    match &memory.b0 {
        MemoryKernel::Zero => Ok(DMatrix::zeros(m, m)),
        MemoryKernel::Separable { g, h } => {
            let gv = g(t, tau);
            if !gv.is_finite() {
                return Err(Error::Quadrature {
                    op: "memory_coupling_matrix",
                    reason: format!("g({t}, {tau}) is not finite"),
                });
            }
            Ok(assembly.weighted_inner_products(|x| h(x))? * gv)
        }
        MemoryKernel::General(b) => assembly.weighted_inner_products(|x| b(x, t, tau)),
    }
}

fn spectral_norm(g: &DMatrix<f64>) -> f64 {
    let sym = 0.5 * (g + g.transpose());
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

fn sample_pairs(t_final: f64) -> Vec<(f64, f64)> {
    let pts = 9;
    let mut out = Vec::new();
    for it in 0..pts {
        let t = t_final * it as f64 / (pts - 1) as f64;
        for itau in 0..=it {
            out.push((t, t_final * itau as f64 / (pts - 1) as f64));
        }
    }
    out
}

/// `B₀ ≈ |β| + sup_{t,τ} ‖G(t,τ)‖₂ / λ₁` over a sample grid of `τ ≤ t ≤ T`.
pub fn estimate_b0_constant(memory: &MemorySpec, assembly: &OperatorAssembly, t_final: f64) -> Result<f64> {
    let lambda1 = assembly.eigenvalues()[0];
    let mut sup: f64 = 0.0;
    if !matches!(memory.b0, MemoryKernel::Zero) {
        for (t, tau) in sample_pairs(t_final) {
            sup = sup.max(spectral_norm(&memory_coupling_matrix(memory, assembly, t, tau)?));
        }
    }
    Ok(memory.beta.abs() + sup / lambda1)
}

/// Smallest `C` with `‖b(t,τ) v‖ ≤ C ‖(-Δ)^s v‖` for all modal `v`, sampled over `τ ≤ t ≤ T`.
pub fn memory_to_laplacian_constant(
    memory: &MemorySpec,
    assembly: &OperatorAssembly,
    t_final: f64,
) -> Result<f64> {
    let lambda = assembly.eigenvalues();
    let mu = assembly.memory_eigenvalues(memory.s_memory.unwrap_or(assembly.s()))?;
    let m = lambda.len();
    let mut sup: f64 = 0.0;
    for (t, tau) in sample_pairs(t_final) {
        let mut b = memory_coupling_matrix(memory, assembly, t, tau)?;
        for i in 0..m {
            b[(i, i)] += memory.beta * mu[i];
        }
        for j in 0..m {
            b.column_mut(j).scale_mut(1.0 / lambda[j]);
        }
        sup = sup.max(b.svd(false, false).singular_values.max());
    }
    Ok(sup)
}

/// Source term `f(x, t)`.
#[derive(Clone, Default)]
pub enum Source {
    #[default]
    Zero,
    /// `g(t)·h(x)` with `h` already in modal coordinates.
    Separable { g: Fn1, h: ModalVector },
    /// Modal vectors at every grid node.
    ModalSamples(Vec<Vec<f64>>),
    /// A general `f(x, t)`, projected at each node.
    Pointwise(Fn2),
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Zero => "Zero",
            Source::Separable { .. } => "Separable",
            Source::ModalSamples(_) => "ModalSamples",
            Source::Pointwise(_) => "Pointwise",
        })
    }
}

impl Source {
    pub fn is_zero(&self) -> bool {
        match self {
            Source::Zero => true,
            Source::Separable { h, .. } => h.as_slice().iter().all(|&c| c == 0.0),
            Source::ModalSamples(s) => s.iter().flatten().all(|&c| c == 0.0),
            Source::Pointwise(_) => false,
        }
    }

    /// Modal vectors `f(t_n)` for every node of `grid`.
    pub fn sample(&self, grid: &UniformTimeGrid, assembly: &OperatorAssembly) -> Result<Vec<Vec<f64>>> {
        let m = assembly.mode_count();
        let out = match self {
            Source::Zero => vec![vec![0.0; m]; grid.len()],
            Source::Separable { g, h } => {
                if h.len() != m {
                    return Err(Error::contract(
                        "Source::sample",
                        format!("spatial profile has {} modes, assembly retains {m}", h.len()),
                    ));
                }
                grid.nodes()
                    .into_iter()
                    .map(|t| {
                        let gt = g(t);
                        h.as_slice().iter().map(|c| gt * c).collect()
                    })
                    .collect()
            }
            Source::ModalSamples(s) => {
                if s.len() != grid.len() || s.iter().any(|v| v.len() != m) {
                    return Err(Error::contract(
                        "Source::sample",
                        format!("modal samples must be {} vectors of length {m}", grid.len()),
                    ));
                }
                s.clone()
            }
            Source::Pointwise(f) => grid
                .nodes()
                .into_iter()
                .map(|t| project(|x| f(x, t), assembly).map(ModalVector::into_vec))
                .collect::<Result<_>>()?,
        };
        if out.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::domain("Source::sample", "source produced non-finite values"));
        }
        Ok(out)
    }
}

/// All data of one problem instance.
#[derive(Debug, Clone)]
pub struct ProblemData {
    pub orders: FractionalOrders,
    pub assembly: Arc<OperatorAssembly>,
    pub law: KirchhoffLaw,
    pub memory: MemorySpec,
    pub source: Source,
    pub u0: ModalVector,
}

impl ProblemData {
    pub fn new(
        orders: FractionalOrders,
        assembly: Arc<OperatorAssembly>,
        law: KirchhoffLaw,
        memory: MemorySpec,
        source: Source,
        u0: ModalVector,
    ) -> Result<Self> {
        const OP: &str = "ProblemData::new";
        if (assembly.s() - orders.s()).abs() > 0.0 {
            return Err(Error::contract(
                OP,
                format!("assembly built for s = {}, orders give s = {}", assembly.s(), orders.s()),
            ));
        }
        if u0.len() != assembly.mode_count() {
            return Err(Error::contract(
                OP,
                format!("u0 has {} modes, assembly retains {}", u0.len(), assembly.mode_count()),
            ));
        }
        if let Some(sm) = memory.s_memory {
            if !(sm > 0.0 && sm <= orders.s()) {
                return Err(Error::domain(
                    OP,
                    format!("memory order {sm} must lie in (0, s] with s = {}", orders.s()),
                ));
            }
        }
        if !memory.beta.is_finite() {
            return Err(Error::domain(OP, "beta must be finite"));
        }
        Ok(Self {
            orders,
            assembly,
            law,
            memory,
            source,
            u0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.orders.alpha()
    }

    pub fn mode_count(&self) -> usize {
        self.assembly.mode_count()
    }

    /// Memory-channel eigenvalues `μ_i`.
    pub fn memory_eigenvalues(&self) -> Result<Vec<f64>> {
        self.assembly
            .memory_eigenvalues(self.memory.s_memory.unwrap_or(self.orders.s()))
    }

    /// Copy with every datum scaled by `c`: `u₀ → c u₀`, `f → c f`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.u0 = ModalVector::new(self.u0.as_slice().iter().map(|v| c * v).collect())
            .expect("scaling finite data");
        out.source = match &self.source {
            Source::Zero => Source::Zero,
            Source::Separable { g, h } => Source::Separable {
                g: g.clone(),
                h: ModalVector::new(h.as_slice().iter().map(|v| c * v).collect()).expect("finite"),
            },
            Source::ModalSamples(s) => {
                Source::ModalSamples(s.iter().map(|v| v.iter().map(|x| c * x).collect()).collect())
            }
            Source::Pointwise(f) => {
                let f = f.clone();
                Source::Pointwise(Arc::new(move |x, t| c * f(x, t)))
            }
        };
        out
    }
}
