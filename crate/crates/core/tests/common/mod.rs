#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use starsys::g_construction::BlockOperator;
use starsys::numerics::{identity, real, ComplexMatrix, Tolerance};
use starsys::sampling;
use starsys::star_b::{ProjectorFamily, StarParams};
use starsys::subspace_system::SubspaceSystem;

pub fn tol() -> Tolerance {
    Tolerance::default()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gram operator of a random system: `n` blocks of dims `1..=max_dim`, in an
/// ambient space that is often smaller than the sum of the dims, so `B`
/// usually has a kernel.
pub fn random_block_operator<R: Rng>(rng: &mut R, max_blocks: usize, max_dim: usize) -> BlockOperator {
    let n = rng.random_range(1..=max_blocks);
    let dims: Vec<usize> = (0..n).map(|_| rng.random_range(1..=max_dim)).collect();
    let lo = *dims.iter().max().unwrap();
    let hi: usize = dims.iter().sum();
    let ambient = rng.random_range(lo..=hi);
    let s = sampling::subspace_system(rng, ambient, &dims);
    BlockOperator::from_gram(&s.gram(), tol()).unwrap()
}

/// Subspaces spanned by chosen columns of one random unitary, so every pair
/// commutes; disjoint column sets give orthogonal pairs.
pub fn commuting_system<R: Rng>(rng: &mut R, ambient: usize, n: usize) -> SubspaceSystem {
    let u = sampling::unitary(rng, ambient);
    let bases = (0..n)
        .map(|_| {
            let cols: Vec<usize> = (0..ambient).filter(|_| rng.random_bool(0.4)).collect();
            ComplexMatrix::from_fn(ambient, cols.len(), |i, j| u[(i, cols[j])])
        })
        .collect();
    SubspaceSystem::new(ambient, bases, tol()).unwrap()
}

/// `H₀ = span(u₁..u_k)` and `H₁ = span(τuᵢ + √(1−τ²)u_{k+i})`, which sit at
/// angle `arccos τ`; the remaining subspaces are random.
pub fn angle_pair_system<R: Rng>(rng: &mut R, k: usize, tau: f64, extra: &[usize]) -> SubspaceSystem {
    let ambient = 2 * k + rng.random_range(0..=2);
    let u = sampling::unitary(rng, ambient);
    let h0 = u.columns(0, k).into_owned();
    let s = (1.0 - tau * tau).sqrt();
    let h1 = u.columns(0, k) * real(tau) + u.columns(k, k) * real(s);
    let mut spans = vec![h0 * sampling::unitary(rng, k), h1 * sampling::unitary(rng, k)];
    for &d in extra {
        spans.push(sampling::gaussian(rng, ambient, d.min(ambient)));
    }
    SubspaceSystem::from_spanning_sets(ambient, &spans, tol()).unwrap()
}

/// Random orthoprojectors of random ranks on `C^dim0`.
pub fn random_family<R: Rng>(rng: &mut R, dim0: usize, m: usize) -> ProjectorFamily {
    let qs = (0..m)
        .map(|_| {
            let rank = rng.random_range(0..=dim0);
            sampling::projector(rng, dim0, rank)
        })
        .collect();
    ProjectorFamily::new(dim0, qs, tol()).unwrap()
}

/// Projectors diagonal in one common random basis (a reducible family when
/// `dim0 ≥ 2`).
pub fn commuting_family<R: Rng>(rng: &mut R, dim0: usize, m: usize) -> ProjectorFamily {
    let u = sampling::unitary(rng, dim0);
    let qs = (0..m)
        .map(|_| {
            let d = ComplexMatrix::from_fn(dim0, dim0, |i, j| {
                real(if i == j && rng.random_bool(0.5) { 1.0 } else { 0.0 })
            });
            &u * d * u.adjoint()
        })
        .collect();
    ProjectorFamily::new(dim0, qs, tol()).unwrap()
}

/// Angle cosines with `1 − Σ τ_k²` spread over `[xi_lo, xi_hi]`.
pub fn random_taus<R: Rng>(rng: &mut R, count: usize, xi_lo: f64, xi_hi: f64) -> Vec<f64> {
    loop {
        let xi = rng.random_range(xi_lo..xi_hi);
        let w: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        let tau: Vec<f64> = w.iter().map(|x| ((1.0 - xi) * x / total).sqrt()).collect();
        if tau.iter().all(|&t| t > 1e-3 && t < 0.999) {
            return tau;
        }
    }
}

pub fn random_star<R: Rng>(
    rng: &mut R,
    max_m: usize,
    max_r: usize,
    max_dim0: usize,
    xi_lo: f64,
    xi_hi: f64,
) -> (StarParams, ProjectorFamily) {
    loop {
        let m = rng.random_range(0..=max_m);
        let r = rng.random_range(0..=max_r);
        if 2 * m + r == 0 {
            continue;
        }
        let dim0 = rng.random_range(1..=max_dim0);
        let params = StarParams::new(m, r, random_taus(rng, m + r, xi_lo, xi_hi)).unwrap();
        return (params, random_family(rng, dim0, m));
    }
}

pub fn block_unitary<R: Rng>(rng: &mut R, dims: &[usize]) -> Vec<ComplexMatrix> {
    dims.iter().map(|&d| sampling::unitary(rng, d)).collect()
}

pub fn conjugate(u: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    u * a * u.adjoint()
}

pub fn eye(n: usize) -> ComplexMatrix {
    identity(n)
}
