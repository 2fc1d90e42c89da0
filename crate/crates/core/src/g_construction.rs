//! Subspace systems built from block operators.
//!
//! Given block spaces `C^{d₁}, …, C^{dₙ}` and a Hermitian positive
//! semidefinite `B` with identity diagonal blocks, the quotient of
//! `⊕ C^{d_k}` by `Ker B` under the inner product `⟨Bx, y⟩` is realised
//! concretely by the map `ρ = Λ₊^{1/2} V₊*`, where `B = VΛV*` and `Λ₊` keeps
//! the eigenvalues above the tolerance threshold. Subspace `k` is the range
//! of `ρ` restricted to the `k`-th coordinate block, and `ρΓ_k` is an
//! isometry because `B_{k,k} = I`.

use crate::error::{Error, Result};
use crate::numerics::{
    checked_eigen, identity, op_norm, real, select_columns, singular_values, ComplexMatrix,
    Tolerance,
};
use crate::subspace_system::{check_tau, relation_threshold, GramOperator, SubspaceSystem};

/// Default number of factors in the path products compared by
/// [`equivalent_inputs`].
pub const DEFAULT_PATH_LEN: usize = 4;

/// Hermitian block matrix with identity diagonal blocks.
///
/// Positivity is not part of construction-time validation because star
/// operators are assembled before their positivity is known; [`construct`]
/// rejects non-PSD input.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    block_dims: Vec<usize>,
    offsets: Vec<usize>,
    matrix: ComplexMatrix,
}

fn offsets_of(block_dims: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(block_dims.len() + 1);
    let mut acc = 0;
    offsets.push(0);
    for d in block_dims {
        acc += d;
        offsets.push(acc);
    }
    offsets
}

impl BlockOperator {
    pub fn new(block_dims: Vec<usize>, matrix: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::Parameter("block operator needs at least one block".into()));
        }
        let offsets = offsets_of(&block_dims);
        let total = offsets[block_dims.len()];
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::Shape(format!(
                "block dims sum to {total} but matrix is {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let residual = op_norm(&(&matrix - matrix.adjoint()));
        let threshold = tol.threshold(op_norm(&matrix));
        if residual > threshold {
            return Err(Error::NotHermitian {
                residual,
                threshold,
            });
        }
        let op = BlockOperator {
            block_dims,
            offsets,
            matrix,
        };
        for k in 0..op.n_blocks() {
            let deviation = op_norm(&(op.block(k, k) - identity(op.block_dims[k])));
            if deviation > tol.threshold(1.0) {
                return Err(Error::DiagonalBlock { block: k, deviation });
            }
        }
        Ok(op)
    }

    /// Identity operator: the blocks of an orthogonal direct sum.
    pub fn identity(block_dims: Vec<usize>) -> Self {
        let offsets = offsets_of(&block_dims);
        let total = offsets[block_dims.len()];
        BlockOperator {
            block_dims,
            offsets,
            matrix: identity(total),
        }
    }

    pub fn from_gram(gram: &GramOperator, tol: Tolerance) -> Result<Self> {
        BlockOperator::new(gram.block_dims.clone(), gram.matrix.clone(), tol)
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn n_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn offset(&self, k: usize) -> usize {
        self.offsets[k]
    }

    /// Block `B_{i,j}: C^{d_j} → C^{d_i}`.
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        self.matrix
            .view(
                (self.offsets[i], self.offsets[j]),
                (self.block_dims[i], self.block_dims[j]),
            )
            .into_owned()
    }

    pub fn min_eigenvalue(&self, tol: Tolerance) -> Result<f64> {
        crate::numerics::min_eigenvalue(&self.matrix, tol)
    }

    pub fn is_psd(&self, tol: Tolerance) -> Result<bool> {
        crate::numerics::psd_check(&self.matrix, tol)
    }

    /// `Ũ* B Ũ` for `Ũ = diag(U₁, …, Uₙ)`.
    pub fn conjugated(&self, unitaries: &[ComplexMatrix]) -> Result<Self> {
        if unitaries.len() != self.n_blocks()
            || unitaries
                .iter()
                .zip(&self.block_dims)
                .any(|(u, &d)| u.nrows() != d || u.ncols() != d)
        {
            return Err(Error::Shape("one square unitary per block is required".into()));
        }
        let u = crate::numerics::direct_sum(unitaries);
        Ok(BlockOperator {
            block_dims: self.block_dims.clone(),
            offsets: self.offsets.clone(),
            matrix: u.adjoint() * &self.matrix * u,
        })
    }

    /// Replaces blocks `(i, j)` and `(j, i)` by `value` and `value*`.
    pub fn with_block(&self, i: usize, j: usize, value: &ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if i == j {
            return Err(Error::Parameter("diagonal blocks are fixed to the identity".into()));
        }
        if value.nrows() != self.block_dims[i] || value.ncols() != self.block_dims[j] {
            return Err(Error::Shape(format!("block ({i}, {j}) has the wrong shape")));
        }
        let mut m = self.matrix.clone();
        m.view_mut((self.offsets[i], self.offsets[j]), value.shape())
            .copy_from(value);
        m.view_mut((self.offsets[j], self.offsets[i]), (value.ncols(), value.nrows()))
            .copy_from(&value.adjoint());
        BlockOperator::new(self.block_dims.clone(), m, tol)
    }

    fn check_pair(&self, alpha: usize, beta: usize) -> Result<()> {
        let n = self.n_blocks();
        if alpha >= n || beta >= n {
            return Err(Error::Parameter(format!(
                "block index out of range: ({alpha}, {beta}) with n = {n}"
            )));
        }
        if alpha == beta {
            return Err(Error::Parameter("block conditions need distinct indices".into()));
        }
        Ok(())
    }
}

/// Builds the subspace system `G(C^{d₁}, …, C^{dₙ}; B)`.
///
/// The ambient dimension equals `Σ d_k − dim Ker B`; eigenvalues within the
/// threshold of zero count as kernel.
pub fn construct(b: &BlockOperator, tol: Tolerance) -> Result<SubspaceSystem> {
    let eig = checked_eigen(&b.matrix, tol)?;
    let threshold = tol.threshold(eig.norm());
    if let Some(&min) = eig.values.first() {
        if min < -threshold {
            return Err(Error::NotPsd { eigenvalue: min });
        }
    }
    let kept: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i] > threshold)
        .collect();
    let v_plus = select_columns(&eig.vectors, &kept);
    let mut rho = v_plus.adjoint();
    for (row, &i) in kept.iter().enumerate() {
        let mut r = rho.row_mut(row);
        r *= real(eig.values[i].sqrt());
    }
    let rank = kept.len();
    let bases = (0..b.n_blocks())
        .map(|k| rho.columns(b.offset(k), b.block_dims[k]).into_owned())
        .collect();
    Ok(SubspaceSystem::from_bases_unchecked(rank, bases))
}

/// `‖G(construct(B)) − B‖₂`.
pub fn gram_roundtrip(b: &BlockOperator, tol: Tolerance) -> Result<f64> {
    let system = construct(b, tol)?;
    Ok(op_norm(&(system.gram().matrix - &b.matrix)))
}

/// `H_α ⟂ H_β` in the constructed system ⟺ `B_{α,β} = 0`.
pub fn block_condition_orthogonal(
    b: &BlockOperator,
    alpha: usize,
    beta: usize,
    tol: Tolerance,
) -> Result<bool> {
    b.check_pair(alpha, beta)?;
    Ok(op_norm(&b.block(alpha, beta)) <= relation_threshold(tol))
}

/// Residual of the angle condition: `B_{α,β}B_{β,α} = τ²I` and
/// `B_{β,α}B_{α,β} = τ²I`, i.e. `B_{α,β}/τ` unitary. Non-square blocks give
/// `+∞`.
pub fn block_angle_residual(b: &BlockOperator, alpha: usize, beta: usize, tau: f64) -> Result<f64> {
    b.check_pair(alpha, beta)?;
    check_tau(tau)?;
    let (da, db) = (b.block_dims[alpha], b.block_dims[beta]);
    if da != db {
        return Ok(f64::INFINITY);
    }
    let ab = b.block(alpha, beta);
    let ba = b.block(beta, alpha);
    let t2 = identity(da) * real(tau * tau);
    Ok(op_norm(&(&ab * &ba - &t2)).max(op_norm(&(&ba * &ab - &t2))))
}

pub fn block_condition_angle(
    b: &BlockOperator,
    alpha: usize,
    beta: usize,
    tau: f64,
    tol: Tolerance,
) -> Result<bool> {
    Ok(block_angle_residual(b, alpha, beta, tau)? <= relation_threshold(tol))
}

/// `max_i ‖B_{α,β}B_{β,i} − B_{α,β}B_{β,α}B_{α,i}‖`.
pub fn block_commute_residual(b: &BlockOperator, alpha: usize, beta: usize) -> Result<f64> {
    b.check_pair(alpha, beta)?;
    let ab = b.block(alpha, beta);
    let abba = &ab * b.block(beta, alpha);
    Ok((0..b.n_blocks())
        .map(|i| op_norm(&(&ab * b.block(beta, i) - &abba * b.block(alpha, i))))
        .fold(0.0, f64::max))
}

pub fn block_condition_commute(
    b: &BlockOperator,
    alpha: usize,
    beta: usize,
    tol: Tolerance,
) -> Result<bool> {
    Ok(block_commute_residual(b, alpha, beta)? <= relation_threshold(tol))
}

/// Searches for a path `l` with at most `max_len` factors whose path
/// operators `B_l` and `B'_l` have different singular values. Such a path
/// proves the constructed systems are not unitarily equivalent.
pub fn distinguishing_path(
    b: &BlockOperator,
    b_prime: &BlockOperator,
    max_len: usize,
    tol: Tolerance,
) -> Result<Option<Vec<usize>>> {
    if b.block_dims != b_prime.block_dims {
        return Err(Error::Shape(format!(
            "block dims differ: {:?} vs {:?}",
            b.block_dims, b_prime.block_dims
        )));
    }
    let n = b.n_blocks();
    let blocks: Vec<Vec<(ComplexMatrix, ComplexMatrix)>> = (0..n)
        .map(|i| (0..n).map(|j| (b.block(i, j), b_prime.block(i, j))).collect())
        .collect();
    let zero = relation_threshold(tol);

    struct Search<'a> {
        blocks: &'a [Vec<(ComplexMatrix, ComplexMatrix)>],
        max_len: usize,
        tol: Tolerance,
        zero: f64,
    }

    impl Search<'_> {
        fn walk(
            &self,
            path: &mut Vec<usize>,
            prod: &ComplexMatrix,
            prod_prime: &ComplexMatrix,
        ) -> Option<Vec<usize>> {
            let last = *path.last().expect("path is never empty");
            for next in 0..self.blocks.len() {
                if next == last {
                    continue;
                }
                let (blk, blk_prime) = &self.blocks[last][next];
                let p = prod * blk;
                let pp = prod_prime * blk_prime;
                let sv = singular_values(&p);
                let svp = singular_values(&pp);
                let scale = sv.first().copied().unwrap_or(0.0).max(1.0);
                let t = self.tol.threshold(scale);
                path.push(next);
                if sv.iter().zip(&svp).any(|(x, y)| (x - y).abs() > t) {
                    return Some(path.clone());
                }
                let both_zero = sv.first().copied().unwrap_or(0.0) <= self.zero
                    && svp.first().copied().unwrap_or(0.0) <= self.zero;
                if path.len() <= self.max_len && !both_zero {
                    if let Some(found) = self.walk(path, &p, &pp) {
                        return Some(found);
                    }
                }
                path.pop();
            }
            None
        }
    }

    let search = Search {
        blocks: &blocks,
        max_len,
        tol,
        zero,
    };
    for start in 0..n {
        let id = identity(b.block_dims[start]);
        let mut path = vec![start];
        if max_len == 0 {
            continue;
        }
        if let Some(found) = search.walk(&mut path, &id, &id) {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Necessary test for unitary equivalence of `G(B)` and `G(B')`: compares
/// the singular values of every path operator with at most `max_len`
/// factors. `false` is a proof of inequivalence; `true` only means no
/// invariant separated the inputs.
pub fn equivalent_inputs(
    b: &BlockOperator,
    b_prime: &BlockOperator,
    max_len: usize,
    tol: Tolerance,
) -> Result<bool> {
    Ok(distinguishing_path(b, b_prime, max_len, tol)?.is_none())
}
