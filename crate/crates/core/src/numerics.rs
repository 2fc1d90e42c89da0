//! Dense complex-matrix primitives and the tolerance policy shared by every
//! other module.
//!
//! Rank, kernel and positivity decisions all go through one Hermitian
//! eigendecomposition and one threshold, `eps_rel·‖A‖₂ + eps_abs`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Relative-plus-floor threshold used for every numerical decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps_rel: f64,
    pub eps_abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps_rel: 1e-9,
            eps_abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(eps_rel: f64, eps_abs: f64) -> Result<Self> {
        if !(eps_rel >= 0.0 && eps_abs >= 0.0) || !eps_rel.is_finite() || !eps_abs.is_finite() {
            return Err(Error::Parameter(format!(
                "tolerances must be finite and nonnegative, got eps_rel={eps_rel}, eps_abs={eps_abs}"
            )));
        }
        Ok(Tolerance { eps_rel, eps_abs })
    }

    /// Threshold for a quantity whose natural scale is `norm`.
    pub fn threshold(&self, norm: f64) -> f64 {
        self.eps_rel * norm + self.eps_abs
    }
}

pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn real(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Builds a complex matrix from real row-major data.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
    assert_eq!(data.len(), rows * cols, "data length must be rows × cols");
    ComplexMatrix::from_fn(rows, cols, |i, j| real(data[i * cols + j]))
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Spectral norm (largest singular value); 0 for empty matrices.
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

pub fn hermitian_residual(a: &ComplexMatrix) -> f64 {
    op_norm(&(a - a.adjoint()))
}

pub fn is_hermitian(a: &ComplexMatrix, tol: Tolerance) -> bool {
    a.is_square() && hermitian_residual(a) <= tol.threshold(op_norm(a))
}

fn ensure_hermitian(a: &ComplexMatrix, tol: Tolerance) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}×{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let residual = hermitian_residual(a);
    let threshold = tol.threshold(op_norm(a));
    if residual > threshold {
        return Err(Error::NotHermitian {
            residual,
            threshold,
        });
    }
    Ok(())
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
pub(crate) struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// Eigendecomposition of the Hermitian part of `a`. Callers validate symmetry.
pub(crate) fn hermitian_eigen(a: &ComplexMatrix) -> HermitianEigen {
    let n = a.nrows();
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        };
    }
    let sym = (a + a.adjoint()) * real(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

pub(crate) fn checked_eigen(a: &ComplexMatrix, tol: Tolerance) -> Result<HermitianEigen> {
    ensure_hermitian(a, tol)?;
    Ok(hermitian_eigen(a))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eigenvalues(a: &ComplexMatrix, tol: Tolerance) -> Result<Vec<f64>> {
    Ok(checked_eigen(a, tol)?.values)
}

/// Smallest eigenvalue of a Hermitian matrix (`+∞` for the empty matrix).
pub fn min_eigenvalue(a: &ComplexMatrix, tol: Tolerance) -> Result<f64> {
    Ok(eigenvalues(a, tol)?
        .first()
        .copied()
        .unwrap_or(f64::INFINITY))
}

/// True iff every eigenvalue is ≥ −(eps_rel·‖A‖ + eps_abs).
pub fn psd_check(a: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    let eig = checked_eigen(a, tol)?;
    let floor = -tol.threshold(eig.norm());
    Ok(eig.values.iter().all(|&v| v >= floor))
}

/// Number of eigenvalues with |λ| above the threshold.
pub fn numerical_rank(a: &ComplexMatrix, tol: Tolerance) -> Result<usize> {
    let eig = checked_eigen(a, tol)?;
    let t = tol.threshold(eig.norm());
    Ok(eig.values.iter().filter(|v| v.abs() > t).count())
}

/// Orthonormal basis (as columns) of the kernel of a Hermitian matrix.
pub fn kernel_basis(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let eig = checked_eigen(a, tol)?;
    let t = tol.threshold(eig.norm());
    let cols: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i].abs() <= t)
        .collect();
    Ok(select_columns(&eig.vectors, &cols))
}

pub(crate) fn select_columns(m: &ComplexMatrix, cols: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

/// Orthonormal basis of the column space of `c`, from the left singular
/// vectors whose singular value exceeds the threshold.
pub fn orthonormal_range(c: &ComplexMatrix, tol: Tolerance) -> ComplexMatrix {
    let rows = c.nrows();
    if c.ncols() == 0 || rows == 0 {
        return ComplexMatrix::zeros(rows, 0);
    }
    let svd = c.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let t = tol.threshold(smax);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > t)
        .collect();
    select_columns(&u, &keep)
}

/// Orthogonal projector onto the column space of `c` (rank-deficient input
/// allowed).
pub fn projector_onto_columns(c: &ComplexMatrix, tol: Tolerance) -> ComplexMatrix {
    let q = orthonormal_range(c, tol);
    &q * q.adjoint()
}

/// Deviation of `q` from having orthonormal columns, ‖Q*Q − I‖₂.
pub fn orthonormality_defect(q: &ComplexMatrix) -> f64 {
    op_norm(&(q.adjoint() * q - identity(q.ncols())))
}

/// Inverse of a Hermitian positive-definite matrix, or `None` when the
/// Cholesky factorisation fails or the matrix is numerically singular.
pub fn inverse_hpd(a: &ComplexMatrix, tol: Tolerance) -> Option<ComplexMatrix> {
    if !is_hermitian(a, tol) {
        return None;
    }
    let min = hermitian_eigen(a).values.first().copied()?;
    if min <= tol.threshold(op_norm(a)) {
        return None;
    }
    let sym = (a + a.adjoint()) * real(0.5);
    Cholesky::new(sym).map(|c| c.inverse())
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}
