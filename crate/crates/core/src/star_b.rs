//! The block operator `B(Q₁, …, Q_m)` of a star with `m` commuting leaf
//! pairs and `r` single rays, its positivity criterion, kernel description
//! and the constrained minimisation behind them.
//!
//! Block order: hub `0`, then pair `k` at blocks `1 + 2k` and `2 + 2k`, then
//! ray `j` at block `1 + 2m + j`. `tau[k]` (k < m) belongs to pair `k`,
//! `tau[m + j]` to ray `j`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::g_construction::BlockOperator;
use crate::numerics::{
    identity, inverse_hpd, kernel_basis, min_eigenvalue, numerical_rank, op_norm, psd_check, real,
    ComplexMatrix, ComplexVector, Tolerance,
};
use crate::subspace_system::check_tau;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarParams {
    pub m: usize,
    pub r: usize,
    pub tau: Vec<f64>,
}

/// Relation required between two subspaces of a star system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairRelation {
    Angle(f64),
    Commute,
    Orthogonal,
}

impl StarParams {
    pub fn new(m: usize, r: usize, tau: Vec<f64>) -> Result<Self> {
        if 2 * m + r == 0 {
            return Err(Error::Parameter("a star needs at least one leaf (2m + r ≥ 1)".into()));
        }
        if tau.len() != m + r {
            return Err(Error::Parameter(format!(
                "expected m + r = {} angle cosines, got {}",
                m + r,
                tau.len()
            )));
        }
        for &t in &tau {
            check_tau(t)?;
        }
        Ok(StarParams { m, r, tau })
    }

    /// `N = 2m + r`.
    pub fn n_leaves(&self) -> usize {
        2 * self.m + self.r
    }

    pub fn n_blocks(&self) -> usize {
        self.n_leaves() + 1
    }

    /// `ξ(τ) = 1 − Σ τ_k²`.
    pub fn xi(&self) -> f64 {
        1.0 - self.tau.iter().map(|t| t * t).sum::<f64>()
    }

    pub fn pair_blocks(&self, k: usize) -> (usize, usize) {
        (1 + 2 * k, 2 + 2 * k)
    }

    pub fn ray_block(&self, j: usize) -> usize {
        1 + 2 * self.m + j
    }

    /// Angle cosine on the edge from the hub to leaf block `block ≥ 1`.
    pub fn leaf_tau(&self, block: usize) -> f64 {
        assert!(block >= 1 && block < self.n_blocks(), "leaf block out of range");
        if block <= 2 * self.m {
            self.tau[(block - 1) / 2]
        } else {
            self.tau[block - 1 - self.m]
        }
    }

    pub fn relation(&self, i: usize, j: usize) -> PairRelation {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        if lo == 0 {
            PairRelation::Angle(self.leaf_tau(hi))
        } else if hi <= 2 * self.m && lo % 2 == 1 && hi == lo + 1 {
            PairRelation::Commute
        } else {
            PairRelation::Orthogonal
        }
    }

    /// Same star with the pairs reordered: pair `k` of the result is pair
    /// `order[k]` of `self`.
    pub fn permute_pairs(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.m];
        if order.len() != self.m || order.iter().any(|&k| k >= self.m || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::Parameter("pair order must be a permutation of 0..m".into()));
        }
        let mut tau: Vec<f64> = order.iter().map(|&k| self.tau[k]).collect();
        tau.extend_from_slice(&self.tau[self.m..]);
        StarParams::new(self.m, self.r, tau)
    }
}

/// Orthoprojectors `Q₁, …, Q_m` on `C^{dim0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorFamily {
    dim0: usize,
    projectors: Vec<ComplexMatrix>,
}

impl ProjectorFamily {
    pub fn new(dim0: usize, projectors: Vec<ComplexMatrix>, tol: Tolerance) -> Result<Self> {
        if dim0 == 0 {
            return Err(Error::Parameter("dim H₀ must be positive".into()));
        }
        for (index, q) in projectors.iter().enumerate() {
            if q.nrows() != dim0 || q.ncols() != dim0 {
                return Err(Error::Shape(format!(
                    "projector {index} is {}×{}, expected {dim0}×{dim0}",
                    q.nrows(),
                    q.ncols()
                )));
            }
            let residual = op_norm(&(q - q.adjoint())).max(op_norm(&(q * q - q)));
            if residual > tol.threshold(1.0) {
                return Err(Error::NotProjector { index, residual });
            }
        }
        Ok(ProjectorFamily { dim0, projectors })
    }

    /// Family given by the complements `R_k = I − Q_k`.
    pub fn from_complements(dim0: usize, complements: Vec<ComplexMatrix>, tol: Tolerance) -> Result<Self> {
        let id = identity(dim0);
        let qs = complements
            .into_iter()
            .map(|r| if r.shape() == id.shape() { &id - r } else { r })
            .collect();
        ProjectorFamily::new(dim0, qs, tol)
    }

    /// One-dimensional family: `R_k = I` where `flags[k]`, else `R_k = 0`.
    pub fn scalar(complement_flags: &[bool]) -> Self {
        ProjectorFamily {
            dim0: 1,
            projectors: complement_flags
                .iter()
                .map(|&r| ComplexMatrix::from_element(1, 1, real(if r { 0.0 } else { 1.0 })))
                .collect(),
        }
    }

    pub fn dim0(&self) -> usize {
        self.dim0
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn complements(&self) -> Vec<ComplexMatrix> {
        let id = identity(self.dim0);
        self.projectors.iter().map(|q| &id - q).collect()
    }

    /// Simultaneous conjugation `U Q_k U*`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        ProjectorFamily {
            dim0: self.dim0,
            projectors: self.projectors.iter().map(|q| u * q * u.adjoint()).collect(),
        }
    }
}

fn check_family(params: &StarParams, fam: &ProjectorFamily) -> Result<()> {
    if fam.len() != params.m {
        return Err(Error::Parameter(format!(
            "star has m = {} commuting pairs but {} projectors were given",
            params.m,
            fam.len()
        )));
    }
    Ok(())
}

/// Assembles `B(Q₁, …, Q_m)`. Positivity is not checked here.
pub fn assemble(params: &StarParams, fam: &ProjectorFamily, tol: Tolerance) -> Result<BlockOperator> {
    check_family(params, fam)?;
    let d = fam.dim0;
    let n = params.n_blocks();
    let mut m = identity(n * d);
    let id = identity(d);
    let mut put = |i: usize, j: usize, blk: &ComplexMatrix| {
        m.view_mut((i * d, j * d), (d, d)).copy_from(blk);
        m.view_mut((j * d, i * d), (d, d)).copy_from(&blk.adjoint());
    };
    for leaf in 1..n {
        put(0, leaf, &(&id * real(params.leaf_tau(leaf))));
    }
    for (k, q) in fam.projectors.iter().enumerate() {
        let (a, b) = params.pair_blocks(k);
        put(a, b, q);
    }
    BlockOperator::new(vec![d; n], m, tol)
}

/// `ξ(τ)I − Σ_{k<m} τ_k² R_k`.
pub fn criterion_matrix(params: &StarParams, fam: &ProjectorFamily) -> Result<ComplexMatrix> {
    check_family(params, fam)?;
    let mut out = identity(fam.dim0) * real(params.xi());
    for (k, r) in fam.complements().iter().enumerate() {
        out -= r * real(params.tau[k] * params.tau[k]);
    }
    Ok(out)
}

/// `B(Q₁, …, Q_m) ≥ 0` ⟺ `Σ τ_k² R_k ≤ ξ(τ) I`.
pub fn nonneg_criterion(params: &StarParams, fam: &ProjectorFamily, tol: Tolerance) -> Result<bool> {
    psd_check(&criterion_matrix(params, fam)?, tol)
}

/// `dim Ker B = Σ dim Im Q_k + dim Ker(ξI − Σ τ_k² R_k)`, stated only when
/// the positivity criterion holds; refuses otherwise.
pub fn kernel_dim_formula(params: &StarParams, fam: &ProjectorFamily, tol: Tolerance) -> Result<usize> {
    let crit = criterion_matrix(params, fam)?;
    if !psd_check(&crit, tol)? {
        return Err(Error::CriterionViolated {
            eigenvalue: min_eigenvalue(&crit, tol)?,
        });
    }
    let image_dims: usize = fam
        .projectors
        .iter()
        .map(|q| numerical_rank(q, tol))
        .sum::<Result<usize>>()?;
    Ok(image_dims + kernel_basis(&crit, tol)?.ncols())
}

/// Builds the kernel vector of `B` determined by `y ∈ Ker(ξI − Σ τ_k² R_k)`
/// and `δ_k ∈ Im Q_k`:
/// `z_k = ½τ_k(I + R_k)y`, `v_j = τ_{m+j} y`, `x_k = z_k + δ_k`,
/// `y_k = z_k − δ_k`, hub component `−(2Σ τ_k z_k + Σ τ_{m+j} v_j)`.
pub fn kernel_vector(
    params: &StarParams,
    fam: &ProjectorFamily,
    y: &ComplexVector,
    deltas: &[ComplexVector],
    tol: Tolerance,
) -> Result<ComplexVector> {
    check_family(params, fam)?;
    let d = fam.dim0;
    if y.len() != d || deltas.len() != params.m || deltas.iter().any(|v| v.len() != d) {
        return Err(Error::Shape(format!(
            "need y ∈ C^{d} and {} vectors δ_k ∈ C^{d}",
            params.m
        )));
    }
    let crit = criterion_matrix(params, fam)?;
    let crit_res = (&crit * y).norm();
    if crit_res > tol.threshold(op_norm(&crit)) * y.norm().max(1.0) {
        return Err(Error::Precondition(format!(
            "y is not in Ker(ξI − Σ τ_k² R_k): residual {crit_res:.3e}"
        )));
    }
    let rs = fam.complements();
    for (k, delta) in deltas.iter().enumerate() {
        let res = (&rs[k] * delta).norm();
        if res > tol.threshold(1.0) * delta.norm().max(1.0) {
            return Err(Error::Precondition(format!(
                "δ_{k} is not in Im Q_{k}: ‖R_{k} δ_{k}‖ = {res:.3e}"
            )));
        }
    }

    let n = params.n_blocks();
    let mut x = ComplexVector::zeros(n * d);
    let mut hub = ComplexVector::zeros(d);
    let id = identity(d);
    for k in 0..params.m {
        let tk = params.tau[k];
        let zk = (&id + &rs[k]) * y * real(0.5 * tk);
        hub -= &zk * real(2.0 * tk);
        let (a, b) = params.pair_blocks(k);
        x.rows_mut(a * d, d).copy_from(&(&zk + &deltas[k]));
        x.rows_mut(b * d, d).copy_from(&(&zk - &deltas[k]));
    }
    for j in 0..params.r {
        let t = params.tau[params.m + j];
        let vj = y * real(t);
        hub -= &vj * real(t);
        x.rows_mut(params.ray_block(j) * d, d).copy_from(&vj);
    }
    x.rows_mut(0, d).copy_from(&hub);

    let b = assemble(params, fam, tol)?;
    let res = (b.matrix() * &x).norm();
    if res > tol.threshold(op_norm(b.matrix())) * x.norm().max(1.0) {
        return Err(Error::Precondition(format!(
            "assembled vector is not in Ker B: residual {res:.3e}"
        )));
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedMinimum {
    pub minimizers: Vec<ComplexVector>,
    pub value: f64,
}

/// `F(u) = Σ ⟨A_k u_k, u_k⟩`.
pub fn objective(a_list: &[ComplexMatrix], u: &[ComplexVector]) -> f64 {
    a_list
        .iter()
        .zip(u)
        .map(|(a, v)| v.dotc(&(a * v)).re)
        .sum()
}

/// Minimises `Σ ⟨A_k u_k, u_k⟩` subject to `Σ μ_k u_k = y` for Hermitian
/// positive-definite `A_k`:
/// `u_k = μ_k A_k⁻¹ (Σ μ_j² A_j⁻¹)⁻¹ y`, minimum `⟨(Σ μ_j² A_j⁻¹)⁻¹ y, y⟩`.
pub fn constrained_min(
    a_list: &[ComplexMatrix],
    mu_list: &[f64],
    y: &ComplexVector,
    tol: Tolerance,
) -> Result<ConstrainedMinimum> {
    if a_list.is_empty() || a_list.len() != mu_list.len() {
        return Err(Error::Parameter(
            "need the same positive number of operators and weights".into(),
        ));
    }
    let n = y.len();
    if a_list.iter().any(|a| a.nrows() != n || a.ncols() != n) {
        return Err(Error::Shape(format!("every A_k must be {n}×{n}")));
    }
    if let Some(mu) = mu_list.iter().find(|&&mu| !(mu > 0.0 && mu.is_finite())) {
        return Err(Error::Parameter(format!("weights must be positive, got {mu}")));
    }
    let inverses = a_list
        .iter()
        .enumerate()
        .map(|(index, a)| inverse_hpd(a, tol).ok_or(Error::Singular { index }))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = ComplexMatrix::zeros(n, n);
    for (inv, &mu) in inverses.iter().zip(mu_list) {
        sum += inv * real(mu * mu);
    }
    let sum_inv = inverse_hpd(&sum, tol).ok_or(Error::Singular { index: a_list.len() })?;
    let x = &sum_inv * y;
    let minimizers = inverses
        .iter()
        .zip(mu_list)
        .map(|(inv, &mu)| inv * &x * real(mu))
        .collect();
    Ok(ConstrainedMinimum {
        minimizers,
        value: y.dotc(&x).re,
    })
}
