//! Random test inputs: Gaussian matrices, Haar-ish unitaries, Hermitian
//! matrices of prescribed norm, projectors and subspace systems.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{c64, op_norm, orthonormal_range, real, ComplexMatrix, Tolerance};
use crate::subspace_system::SubspaceSystem;

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Unitary from the QR factor of a complex Gaussian matrix, with the phases
/// of R's diagonal folded back in so the result is Haar distributed.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let qr = gaussian(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { real(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian matrix with spectral norm exactly `norm`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, norm: f64) -> ComplexMatrix {
    let g = gaussian(rng, n, n);
    let h = (&g + g.adjoint()) * real(0.5);
    let s = op_norm(&h);
    if s == 0.0 {
        return h;
    }
    h * real(norm / s)
}

/// Orthoprojector of the given rank onto a random subspace of `C^n`.
pub fn projector<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let q = isometry(rng, n, rank);
    &q * q.adjoint()
}

/// Random `n × k` matrix with orthonormal columns (`k ≤ n`).
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> ComplexMatrix {
    assert!(k <= n, "isometry needs k ≤ n");
    if k == 0 {
        return ComplexMatrix::zeros(n, 0);
    }
    let u = unitary(rng, n);
    u.columns(0, k).into_owned()
}

/// Random system of `dims.len()` subspaces of `C^ambient` with the given
/// dimensions.
pub fn subspace_system<R: Rng + ?Sized>(
    rng: &mut R,
    ambient: usize,
    dims: &[usize],
) -> SubspaceSystem {
    let bases = dims
        .iter()
        .map(|&d| {
            let q = orthonormal_range(&gaussian(rng, ambient, d), Tolerance::default());
            assert_eq!(q.ncols(), d, "Gaussian columns are almost surely independent");
            q
        })
        .collect();
    SubspaceSystem::new(ambient, bases, Tolerance::default())
        .expect("orthonormal bases of the right shape")
}
