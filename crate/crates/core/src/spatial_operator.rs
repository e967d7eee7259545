//! The fractional Laplacian on an interval, in two discretizations.
//!
//! * [`OperatorMode::SpectralSine`]: Dirichlet sine eigenfunctions with
//!   eigenvalues `(kπ/L)^{2s}`. This is the spectral fractional Laplacian, an
//!   oracle-friendly surrogate with explicit eigenpairs.
//! * [`OperatorMode::FemP1Integral`]: the integral fractional Laplacian with
//!   zero exterior data, discretized by piecewise-linear hats. Its eigenpairs
//!   come from the generalized problem `A φ = λ M φ`.
//!
//! Both expose an L²-orthonormal, X₀-orthogonal modal basis, so everything
//! downstream works with modal coefficients only.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::special_functions::{gamma, rgamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain1D {
    a: f64,
    b: f64,
}

impl Domain1D {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::domain(
                "Domain1D::new",
                format!("need finite endpoints with a < b, got ({a}, {b})"),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorMode {
    SpectralSine,
    FemP1Integral,
}

impl OperatorMode {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorMode::SpectralSine => "spectral_sine",
            OperatorMode::FemP1Integral => "fem_p1_integral",
        }
    }
}

/// Coefficients in the modal basis of an [`OperatorAssembly`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalVector(Vec<f64>);

impl ModalVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::domain("ModalVector::new", format!("coefficient {i} is not finite")));
        }
        Ok(Self(coeffs))
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    /// The `k`-th unit vector (0-based).
    pub fn unit(m: usize, k: usize) -> Self {
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// `C_{d,s} = 2^{2s} s Γ(s + d/2) / (π^{d/2} Γ(1-s))`.
pub fn normalizing_constant(s: f64, d: u32) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(
            "normalizing_constant",
            format!("s = {s} must lie in the open interval (0, 1)"),
        ));
    }
    if d == 0 {
        return Err(Error::domain("normalizing_constant", "dimension must be at least 1"));
    }
    let half_d = 0.5 * d as f64;
    Ok(4f64.powf(s) * s * gamma(s + half_d) * rgamma(1.0 - s) / std::f64::consts::PI.powf(half_d))
}

/// `L²`, `X₀` and `‖(-Δ)^s ·‖` norms of a modal vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l2: f64,
    pub x0: f64,
    pub laplacian_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Basis {
    Sine,
    /// Nodal coefficients of the retained eigenfunctions, one column per mode.
    Fem { n_elems: usize, vectors: DMatrix<f64> },
}

/// A discretized fractional Laplacian together with its modal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorAssembly {
    mode: OperatorMode,
    domain: Domain1D,
    s: f64,
    normalizing_constant: f64,
    eigenvalues: Vec<f64>,
    gram: DMatrix<f64>,
    mass: DMatrix<f64>,
    basis: Basis,
}

fn check_s(op: &'static str, s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("s = {s} must lie in the open interval (0, 1)")))
    }
}

/// Spectral surrogate with `m` sine modes.
pub fn build_spectral(domain: Domain1D, s: f64, m: usize) -> Result<OperatorAssembly> {
    check_s("build_spectral", s)?;
    if m == 0 {
        return Err(Error::domain("build_spectral", "mode count must be at least 1"));
    }
    let l = domain.length();
    let eigenvalues: Vec<f64> = (1..=m)
        .map(|k| (k as f64 * std::f64::consts::PI / l).powf(2.0 * s))
        .collect();
    Ok(OperatorAssembly {
        mode: OperatorMode::SpectralSine,
        domain,
        s,
        normalizing_constant: normalizing_constant(s, 1)?,
        gram: DMatrix::from_diagonal(&DVector::from_vec(eigenvalues.clone())),
        mass: DMatrix::identity(m, m),
        eigenvalues,
        basis: Basis::Sine,
    })
}

const PAIR_RULE: usize = 10;
const TOUCH_RULE: usize = 20;

/// Unscaled element-pair integrals `∫_K ∫_L (u(x)-u(y))(v(x)-v(y)) |x-y|^{-1-2s}`
/// on a uniform mesh, which depend only on the gap `l - k`.
struct PairTable {
    /// `same`: K = L, coefficient of `u' v'`.
    same: f64,
    /// Local 3×3 matrix for touching elements over nodes (k, k+1, k+2).
    touching: [[f64; 3]; 3],
    /// Local 4×4 matrices over nodes (k, k+1, l, l+1) for gaps `l - k ≥ 2`.
    separated: Vec<[[f64; 4]; 4]>,
}

impl PairTable {
    fn new(s: f64, h: f64, n_elems: usize) -> Self {
        let p = 3.0 - 2.0 * s;
        let same = 2.0 * h.powf(p) / ((2.0 - 2.0 * s) * p);

        // Touching pair: ξ = c - x, η = y - c on [0, h]², u(x) - u(y) = -(aξ + bη)
        // with a, b the slopes of u on the two elements. Splitting at ξ = η and
        // scaling the smaller variable removes the corner singularity.
        let gl = GaussLegendre::new(TOUCH_RULE);
        let slopes = [(-1.0 / h, 0.0), (1.0 / h, -1.0 / h), (0.0, 1.0 / h)];
        let radial = h.powf(p) / p;
        let mut touching = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let (a, b) = slopes[i];
                let (c, d) = slopes[j];
                let tri = gl.integrate(0.0, 1.0, |w| {
                    let k = (1.0 + w).powf(-1.0 - 2.0 * s);
                    ((a + b * w) * (c + d * w) + (a * w + b) * (c * w + d)) * k
                });
                // Both orderings (K, L) and (L, K).
                touching[i][j] = 2.0 * radial * tri;
            }
        }

        let gl = GaussLegendre::new(PAIR_RULE);
        let pts: Vec<(f64, f64)> = gl
            .nodes
            .iter()
            .zip(&gl.weights)
            .map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        let separated = (0..n_elems)
            .into_par_iter()
            .map(|gap| {
                let mut m = [[0.0; 4]; 4];
                if gap < 2 {
                    return m;
                }
                for &(xi, wx) in &pts {
                    for &(yi, wy) in &pts {
                        let dist = h * (gap as f64 + yi - xi);
                        let k = 2.0 * wx * wy * h * h * dist.powf(-1.0 - 2.0 * s);
                        // Hats at nodes k, k+1 (nonzero on K) and l, l+1 (nonzero on L).
                        let diff = [1.0 - xi, xi, -(1.0 - yi), -yi];
                        for r in 0..4 {
                            for c in 0..4 {
                                m[r][c] += k * diff[r] * diff[c];
                            }
                        }
                    }
                }
                m
            })
            .collect();
        Self {
            same,
            touching,
            separated,
        }
    }
}

/// `∫_e ψ_i ψ_j κ` for the two hats of element `e`, with
/// `κ(x) = ((x-a)^{-2s} + (b-x)^{-2s}) / (2s)` the exterior-interaction weight.
fn tail_element(s: f64, h: f64, n_elems: usize, e: usize, gl: &GaussLegendre) -> [[f64; 2]; 2] {
    let lo = e as f64 * h;
    let len = n_elems as f64 * h;
    let mut m = [[0.0; 2]; 2];
    let two_s = 2.0 * s;
    // At the boundary element the singular power is integrated exactly against
    // the one interior hat, which vanishes quadratically there.
    let exact_edge = h.powf(1.0 - two_s) / (3.0 - two_s) / two_s;
    let left_exact = e == 0;
    let right_exact = e == n_elems - 1;
    for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
        let xi = 0.5 * (x + 1.0);
        let pos = lo + h * xi;
        let mut k = 0.0;
        if !left_exact {
            k += pos.powf(-two_s);
        }
        if !right_exact {
            k += (len - pos).powf(-two_s);
        }
        k *= 0.5 * w * h / two_s;
        let phi = [1.0 - xi, xi];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] += k * phi[r] * phi[c];
            }
        }
    }
    if left_exact {
        m[1][1] += exact_edge;
    }
    if right_exact {
        m[0][0] += exact_edge;
    }
    m
}

/// P1 finite-element assembly of the integral fractional Laplacian on a uniform mesh.
///
/// `A_ij = C_{1,s}/2 ∫∫_Q (ψ_i(x)-ψ_i(y))(ψ_j(x)-ψ_j(y)) |x-y|^{-1-2s}`, split as
/// the Ω×Ω part (element pairs) plus twice the exterior interaction `∫ ψ_i ψ_j κ`.
pub fn assemble_fem_integral(domain: Domain1D, s: f64, n_elems: usize) -> Result<OperatorAssembly> {
    check_s("assemble_fem_integral", s)?;
    if n_elems < 2 {
        return Err(Error::domain("assemble_fem_integral", "need at least 2 elements"));
    }
    let h = domain.length() / n_elems as f64;
    let c = normalizing_constant(s, 1)?;
    let dofs = n_elems - 1;
    let table = PairTable::new(s, h, n_elems);

    // Dof index of global node `i`, if interior.
    let dof = |i: usize| (i >= 1 && i <= dofs).then(|| i - 1);
    let mut a = DMatrix::<f64>::zeros(dofs, dofs);
    let mut add = |i: usize, j: usize, v: f64| {
        if let (Some(p), Some(q)) = (dof(i), dof(j)) {
            a[(p, q)] += v;
        }
    };

    let slope = [-1.0 / h, 1.0 / h];
    for k in 0..n_elems {
        for r in 0..2 {
            for q in 0..2 {
                add(k + r, k + q, table.same * slope[r] * slope[q]);
            }
        }
    }
    for k in 0..n_elems - 1 {
        for r in 0..3 {
            for q in 0..3 {
                add(k + r, k + q, table.touching[r][q]);
            }
        }
    }
    for k in 0..n_elems {
        for l in k + 2..n_elems {
            let m = &table.separated[l - k];
            let nodes = [k, k + 1, l, l + 1];
            for r in 0..4 {
                for q in 0..4 {
                    add(nodes[r], nodes[q], m[r][q]);
                }
            }
        }
    }
    let gl = GaussLegendre::new(PAIR_RULE);
    let tails: Vec<[[f64; 2]; 2]> = (0..n_elems)
        .into_par_iter()
        .map(|e| tail_element(s, h, n_elems, e, &gl))
        .collect();
    for (e, m) in tails.iter().enumerate() {
        for r in 0..2 {
            for q in 0..2 {
                add(e + r, e + q, 2.0 * m[r][q]);
            }
        }
    }
    a *= 0.5 * c;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Quadrature {
            op: "assemble_fem_integral",
            reason: format!("non-finite Gram entry (s = {s}, n_elems = {n_elems})"),
        });
    }
    // Mirror the upper triangle so symmetry is exact.
    for p in 0..dofs {
        for q in 0..p {
            a[(p, q)] = a[(q, p)];
        }
    }

    let mut mass = DMatrix::<f64>::zeros(dofs, dofs);
    for p in 0..dofs {
        mass[(p, p)] = 2.0 * h / 3.0;
        if p + 1 < dofs {
            mass[(p, p + 1)] = h / 6.0;
            mass[(p + 1, p)] = h / 6.0;
        }
    }

    let (eigenvalues, vectors) = generalized_eigen(&a, &mass)?;
    Ok(OperatorAssembly {
        mode: OperatorMode::FemP1Integral,
        domain,
        s,
        normalizing_constant: c,
        eigenvalues,
        gram: a,
        mass,
        basis: Basis::Fem { n_elems, vectors },
    })
}

/// Solve `A v = λ M v` for symmetric `A` and SPD `M`; eigenvalues ascending,
/// eigenvectors `M`-orthonormal.
pub fn generalized_eigen(a: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::LinearAlgebra("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv_a = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::LinearAlgebra("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&linv_a.transpose())
        .ok_or_else(|| Error::LinearAlgebra("singular Cholesky factor".into()))?;
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if values[0] <= 0.0 {
        return Err(Error::LinearAlgebra(format!(
            "Gram matrix is not positive definite (smallest eigenvalue {:e})",
            values[0]
        )));
    }
    let w = DMatrix::from_fn(a.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    let lt = l.transpose();
    let mut v = lt
        .solve_upper_triangular(&w)
        .ok_or_else(|| Error::LinearAlgebra("singular Cholesky factor".into()))?;
    // Fix the sign so each eigenfunction has a positive sum of nodal values
    // (or positive first nonzero value), making the basis reproducible.
    for k in 0..v.ncols() {
        let sum: f64 = v.column(k).sum();
        let lead = v.column(k).iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
        let sign = if sum.abs() > 1e-9 { sum.signum() } else { lead.signum() };
        if sign < 0.0 {
            v.column_mut(k).neg_mut();
        }
    }
    Ok((values, v))
}

impl OperatorAssembly {
    pub fn mode(&self) -> OperatorMode {
        self.mode
    }

    pub fn domain(&self) -> Domain1D {
        self.domain
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn normalizing_constant(&self) -> f64 {
        self.normalizing_constant
    }

    /// Number of retained modes.
    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Gram matrix of the X₀ inner product: diagonal in spectral mode, nodal in FEM mode.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    /// Nodal coefficients of the retained eigenfunctions (FEM mode only).
    pub fn eigenvectors(&self) -> Option<&DMatrix<f64>> {
        match &self.basis {
            Basis::Sine => None,
            Basis::Fem { vectors, .. } => Some(vectors),
        }
    }

    pub fn n_elems(&self) -> Option<usize> {
        match &self.basis {
            Basis::Sine => None,
            Basis::Fem { n_elems, .. } => Some(*n_elems),
        }
    }

    /// Keep only the `m` lowest modes.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.mode_count() {
            return Err(Error::domain(
                "OperatorAssembly::truncated",
                format!("cannot retain {m} of {} modes", self.mode_count()),
            ));
        }
        let mut out = self.clone();
        out.eigenvalues.truncate(m);
        match &mut out.basis {
            Basis::Sine => {
                out.gram = self.gram.view((0, 0), (m, m)).into_owned();
                out.mass = DMatrix::identity(m, m);
            }
            Basis::Fem { vectors, .. } => {
                *vectors = vectors.columns(0, m).into_owned();
            }
        }
        Ok(out)
    }

    /// Value of the `k`-th (0-based) basis function at `x`; zero outside Ω.
    pub fn basis_value(&self, k: usize, x: f64) -> f64 {
        let (a, b) = (self.domain.a, self.domain.b);
        if x <= a || x >= b {
            return 0.0;
        }
        let l = b - a;
        match &self.basis {
            Basis::Sine => {
                (2.0 / l).sqrt() * ((k + 1) as f64 * std::f64::consts::PI * (x - a) / l).sin()
            }
            Basis::Fem { n_elems, vectors } => {
                let h = l / *n_elems as f64;
                let t = (x - a) / h;
                let e = (t.floor() as usize).min(n_elems - 1);
                let xi = t - e as f64;
                let nodal = |i: usize| {
                    if i == 0 || i == *n_elems {
                        0.0
                    } else {
                        vectors[(i - 1, k)]
                    }
                };
                (1.0 - xi) * nodal(e) + xi * nodal(e + 1)
            }
        }
    }

    /// Quadrature cells `(lo, hi)` on which every basis function is smooth.
    fn cells(&self) -> Vec<(f64, f64)> {
        let (a, b) = (self.domain.a, self.domain.b);
        let n = match &self.basis {
            Basis::Sine => 2 * self.mode_count().max(8),
            Basis::Fem { n_elems, .. } => *n_elems,
        };
        let h = (b - a) / n as f64;
        (0..n)
            .map(|i| (a + i as f64 * h, if i + 1 == n { b } else { a + (i + 1) as f64 * h }))
            .collect()
    }

    /// `H_ij = ∫_Ω w φ_i φ_j` for a pointwise weight `w`.
    pub fn weighted_inner_products(&self, w: impl Fn(f64) -> f64 + Sync) -> Result<DMatrix<f64>> {
        let m = self.mode_count();
        let gl = GaussLegendre::new(TOUCH_RULE);
        let mut h = DMatrix::<f64>::zeros(m, m);
        for (lo, hi) in self.cells() {
            let half = 0.5 * (hi - lo);
            for (&x, &wq) in gl.nodes.iter().zip(&gl.weights) {
                let pos = lo + half * (x + 1.0);
                let weight = w(pos) * wq * half;
                let phi: Vec<f64> = (0..m).map(|k| self.basis_value(k, pos)).collect();
                for i in 0..m {
                    for j in 0..m {
                        h[(i, j)] += weight * phi[i] * phi[j];
                    }
                }
            }
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::Quadrature {
                op: "weighted_inner_products",
                reason: "weight produced non-finite values".into(),
            });
        }
        Ok(h)
    }

    /// Memory-channel eigenvalues `λ_i^{s_mem/s}`; only the spectral operator
    /// has explicit eigenvalues for a different order.
    pub fn memory_eigenvalues(&self, s_memory: f64) -> Result<Vec<f64>> {
        if s_memory == self.s {
            return Ok(self.eigenvalues.clone());
        }
        check_s("memory_eigenvalues", s_memory)?;
        match self.mode {
            OperatorMode::SpectralSine => Ok(self
                .eigenvalues
                .iter()
                .map(|l| l.powf(s_memory / self.s))
                .collect()),
            OperatorMode::FemP1Integral => Err(Error::UnsupportedMode {
                op: "memory_eigenvalues (mixed order)",
                mode: self.mode.name(),
            }),
        }
    }

    /// Plain-number snapshot for regression goldens.
    pub fn snapshot(&self) -> AssemblySnapshot {
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
        };
        AssemblySnapshot {
            mode: self.mode,
            domain: self.domain,
            s: self.s,
            normalizing_constant: self.normalizing_constant,
            n_elems: self.n_elems(),
            eigenvalues: self.eigenvalues.clone(),
            gram: rows(&self.gram),
            mass: rows(&self.mass),
            eigenvectors: self.eigenvectors().map(rows),
        }
    }
}

/// Row-major serializable form of an [`OperatorAssembly`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblySnapshot {
    pub mode: OperatorMode,
    pub domain: Domain1D,
    pub s: f64,
    pub normalizing_constant: f64,
    pub n_elems: Option<usize>,
    pub eigenvalues: Vec<f64>,
    pub gram: Vec<Vec<f64>>,
    pub mass: Vec<Vec<f64>>,
    pub eigenvectors: Option<Vec<Vec<f64>>>,
}

fn from_rows(op: &'static str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != c) {
        return Err(Error::contract(op, "ragged matrix rows"));
    }
    Ok(DMatrix::from_fn(n, c, |i, j| rows[i][j]))
}

impl TryFrom<AssemblySnapshot> for OperatorAssembly {
    type Error = Error;

    fn try_from(snap: AssemblySnapshot) -> Result<Self> {
        const OP: &str = "OperatorAssembly::try_from";
        let basis = match (snap.mode, snap.n_elems, &snap.eigenvectors) {
            (OperatorMode::SpectralSine, _, _) => Basis::Sine,
            (OperatorMode::FemP1Integral, Some(n_elems), Some(v)) => Basis::Fem {
                n_elems,
                vectors: from_rows(OP, v)?,
            },
            _ => return Err(Error::contract(OP, "FEM snapshot lacks mesh or eigenvectors")),
        };
        Ok(Self {
            mode: snap.mode,
            domain: snap.domain,
            s: snap.s,
            normalizing_constant: snap.normalizing_constant,
            eigenvalues: snap.eigenvalues,
            gram: from_rows(OP, &snap.gram)?,
            mass: from_rows(OP, &snap.mass)?,
            basis,
        })
    }
}

/// Modal coefficients `(u₀, φ_i)` of a pointwise function.
///
/// In FEM mode this is `Vᵀ b` with `b` the hat-function load vector, which equals
/// the modal part of the mass-matrix projection `M⁻¹ b` because `Vᵀ M V = I`.
pub fn project(u0: impl Fn(f64) -> f64 + Sync, assembly: &OperatorAssembly) -> Result<ModalVector> {
    let m = assembly.mode_count();
    let gl = GaussLegendre::new(TOUCH_RULE);
    let coeffs = match &assembly.basis {
        Basis::Sine => {
            let mut c = vec![0.0; m];
            for (lo, hi) in assembly.cells() {
                let half = 0.5 * (hi - lo);
                for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
                    let pos = lo + half * (x + 1.0);
                    let f = u0(pos) * w * half;
                    for (k, ck) in c.iter_mut().enumerate() {
                        *ck += f * assembly.basis_value(k, pos);
                    }
                }
            }
            c
        }
        Basis::Fem { n_elems, vectors } => {
            let dofs = n_elems - 1;
            let mut load = DVector::<f64>::zeros(dofs);
            for (e, (lo, hi)) in assembly.cells().into_iter().enumerate() {
                let half = 0.5 * (hi - lo);
                for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
                    let xi = 0.5 * (x + 1.0);
                    let f = u0(lo + half * (x + 1.0)) * w * half;
                    if e >= 1 {
                        load[e - 1] += f * (1.0 - xi);
                    }
                    if e < dofs {
                        load[e] += f * xi;
                    }
                }
            }
            (vectors.transpose() * load).iter().copied().collect()
        }
    };
    ModalVector::new(coeffs).map_err(|_| Error::Quadrature {
        op: "project",
        reason: "initial datum produced non-finite coefficients".into(),
    })
}

fn conform(op: &'static str, v: &ModalVector, assembly: &OperatorAssembly) -> Result<()> {
    if v.len() == assembly.mode_count() {
        Ok(())
    } else {
        Err(Error::contract(
            op,
            format!("vector has {} modes, assembly retains {}", v.len(), assembly.mode_count()),
        ))
    }
}

pub fn norms(v: &ModalVector, assembly: &OperatorAssembly) -> Result<Norms> {
    conform("norms", v, assembly)?;
    Ok(modal_norms(v.as_slice(), assembly.eigenvalues()))
}

/// Norms straight from coefficients and eigenvalues (lengths must agree).
pub fn modal_norms(a: &[f64], lambda: &[f64]) -> Norms {
    let (mut l2, mut x0, mut lap) = (0.0, 0.0, 0.0);
    for (&ai, &li) in a.iter().zip(lambda) {
        let a2 = ai * ai;
        l2 += a2;
        x0 += li * a2;
        lap += li * li * a2;
    }
    Norms {
        l2: l2.sqrt(),
        x0: x0.sqrt(),
        laplacian_s: lap.sqrt(),
    }
}

/// Modal proxy `(Σ λ_i^{(s+ν)/s} a_i²)^{1/2}` for the `H^{s+ν}` norm; spectral mode only.
pub fn spectral_regularity_norm(v: &ModalVector, assembly: &OperatorAssembly, nu: f64) -> Result<f64> {
    if assembly.mode != OperatorMode::SpectralSine {
        return Err(Error::UnsupportedMode {
            op: "spectral_regularity_norm",
            mode: assembly.mode.name(),
        });
    }
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::domain("spectral_regularity_norm", format!("nu = {nu} must be ≥ 0")));
    }
    conform("spectral_regularity_norm", v, assembly)?;
    let e = (assembly.s + nu) / assembly.s;
    Ok(v.as_slice()
        .iter()
        .zip(&assembly.eigenvalues)
        .map(|(a, l)| l.powf(e) * a * a)
        .sum::<f64>()
        .sqrt())
}
