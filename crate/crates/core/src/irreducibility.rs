//! Irreducibility of operator families and subspace systems through the
//! dimension of their commutant, path operators of block operators, and the
//! embedding of pairs of self-adjoint operators into triples of subspaces.

use rand::Rng;

use crate::error::{Error, Result};
use crate::g_construction::BlockOperator;
use crate::numerics::{
    c64, hermitian_eigen, identity, is_hermitian, kron, op_norm, real, singular_values, ComplexMatrix,
    Tolerance,
};
use crate::sampling;
use crate::star_b::ProjectorFamily;
use crate::subspace_system::SubspaceSystem;

/// Dimension of `{X : XAᵢ = AᵢX, XAᵢ* = Aᵢ*X for all i}`.
///
/// With `Kᵢ = Aᵢᵀ ⊗ I − I ⊗ Aᵢ` acting on `vec(X)`, the commutant is the
/// kernel of the positive operator `T = Σ Kᵢ*Kᵢ` (adjoint generators added
/// for non-Hermitian `Aᵢ`). Eigenvalues of `T` up to `eps_rel·‖T‖ + eps_abs`
/// count as zero.
pub fn commutant_dim(n: usize, generators: &[ComplexMatrix], tol: Tolerance) -> Result<usize> {
    for (k, g) in generators.iter().enumerate() {
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::Shape(format!(
                "generator {k} is {}×{}, expected {n}×{n}",
                g.nrows(),
                g.ncols()
            )));
        }
    }
    if n == 0 {
        return Ok(0);
    }
    let id = identity(n);
    let mut t = ComplexMatrix::zeros(n * n, n * n);
    let mut add = |g: &ComplexMatrix| {
        let gt = g.transpose();
        let gbar = g.conjugate();
        let gs = g.adjoint();
        t += kron(&(&gbar * &gt), &id);
        t -= kron(&gbar, g);
        t -= kron(&gt, &gs);
        t += kron(&id, &(&gs * g));
    };
    for g in generators {
        add(g);
        if !is_hermitian(g, tol) {
            add(&g.adjoint());
        }
    }
    let eig = hermitian_eigen(&t);
    let threshold = tol.threshold(eig.norm());
    Ok(eig.values.iter().filter(|&&v| v <= threshold).count())
}

/// A system is irreducible iff the commutant of its projectors is `C·I`.
pub fn system_irreducible(s: &SubspaceSystem, tol: Tolerance) -> Result<bool> {
    Ok(commutant_dim(s.ambient_dim(), &s.projectors(), tol)? == 1)
}

/// `{Q₁, …, Q_m}` irreducible on `H₀`.
pub fn family_irreducible_q(fam: &ProjectorFamily, tol: Tolerance) -> Result<bool> {
    Ok(commutant_dim(fam.dim0(), fam.projectors(), tol)? == 1)
}

/// `B_l = B_{i(1),i(2)} ⋯ B_{i(k−1),i(k)}` for the path `l = (i(1), …, i(k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOperator {
    pub path: Vec<usize>,
    pub operator: ComplexMatrix,
}

pub fn path_operator(b: &BlockOperator, path: &[usize]) -> Result<PathOperator> {
    let n = b.n_blocks();
    let first = *path
        .first()
        .ok_or_else(|| Error::Parameter("a path needs at least one vertex".into()))?;
    if let Some(&bad) = path.iter().find(|&&i| i >= n) {
        return Err(Error::Parameter(format!("path vertex {bad} out of range (n = {n})")));
    }
    let mut op = identity(b.block_dims()[first]);
    for w in path.windows(2) {
        op *= b.block(w[0], w[1]);
    }
    Ok(PathOperator {
        path: path.to_vec(),
        operator: op,
    })
}

fn invertible(m: &ComplexMatrix, tol: Tolerance) -> bool {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return false;
    }
    let sv = singular_values(m);
    let t = tol.threshold(sv[0]);
    sv[sv.len() - 1] > t
}

struct LoopSearch<'a> {
    b: &'a BlockOperator,
    alpha: usize,
    max_len: usize,
    tol: Tolerance,
    zero: f64,
    reached: Vec<bool>,
    loops: Vec<ComplexMatrix>,
}

impl LoopSearch<'_> {
    fn walk(&mut self, last: usize, factors: usize, prod: &ComplexMatrix) {
        for next in 0..self.b.n_blocks() {
            if next == last {
                continue;
            }
            let p = prod * self.b.block(last, next);
            if op_norm(&p) <= self.zero {
                continue;
            }
            if !self.reached[next] && invertible(&p, self.tol) {
                self.reached[next] = true;
            }
            if next == self.alpha {
                self.loops.push(p.clone());
            }
            if factors + 1 < self.max_len {
                self.walk(next, factors + 1, &p);
            }
        }
    }
}

/// Decides irreducibility of `{B_l : l a loop at α with at most max_len
/// factors}` after certifying that every vertex is reached from `α` by a
/// path of at most `max_len` factors with invertible operator. When that
/// hypothesis cannot be certified the answer is an error, not `false`.
pub fn loop_family_irreducible(
    b: &BlockOperator,
    alpha: usize,
    max_len: usize,
    tol: Tolerance,
) -> Result<bool> {
    let n = b.n_blocks();
    if alpha >= n {
        return Err(Error::Parameter(format!("vertex {alpha} out of range (n = {n})")));
    }
    let d = b.block_dims()[alpha];
    let mut search = LoopSearch {
        b,
        alpha,
        max_len,
        tol,
        zero: tol.threshold(1.0),
        reached: vec![false; n],
        loops: Vec::new(),
    };
    search.reached[alpha] = true;
    if max_len > 0 {
        search.walk(alpha, 0, &identity(d));
    }
    if let Some(to) = search.reached.iter().position(|&r| !r) {
        return Err(Error::HypothesisNotCertified {
            from: alpha,
            to,
            max_len,
        });
    }
    Ok(commutant_dim(d, &search.loops, tol)? == 1)
}

/// Three subspaces of `K = L ⊕ L ⊕ L` built from self-adjoint `A`, `B` with
/// `‖A‖, ‖B‖ ≤ α`:
/// `K₁ = {(x, 0, 0)}`, `K₂ = {(αx, x, 0)}`, `K₃ = {((A + iB)x, αx, x)}`.
pub fn wild_embed(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    alpha: f64,
    tol: Tolerance,
) -> Result<SubspaceSystem> {
    let l = a.nrows();
    if l == 0 || a.shape() != (l, l) || b.shape() != (l, l) {
        return Err(Error::Shape("A and B must be square of the same positive size".into()));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    for (name, m) in [("A", a), ("B", b)] {
        if !is_hermitian(m, tol) {
            return Err(Error::Parameter(format!("{name} is not self-adjoint")));
        }
        let norm = op_norm(m);
        if norm > alpha + tol.threshold(alpha) {
            return Err(Error::Parameter(format!(
                "‖{name}‖ = {norm} exceeds alpha = {alpha}"
            )));
        }
    }
    let id = identity(l);
    let mut k1 = ComplexMatrix::zeros(3 * l, l);
    k1.view_mut((0, 0), (l, l)).copy_from(&id);
    let mut k2 = ComplexMatrix::zeros(3 * l, l);
    k2.view_mut((0, 0), (l, l)).copy_from(&(&id * real(alpha)));
    k2.view_mut((l, 0), (l, l)).copy_from(&id);
    let mut k3 = ComplexMatrix::zeros(3 * l, l);
    k3.view_mut((0, 0), (l, l)).copy_from(&(a + b * c64(0.0, 1.0)));
    k3.view_mut((l, 0), (l, l)).copy_from(&(&id * real(alpha)));
    k3.view_mut((2 * l, 0), (l, l)).copy_from(&id);
    SubspaceSystem::from_spanning_sets(3 * l, &[k1, k2, k3], tol)
}

/// `λ_max(Σ Pᵢ) − 1` over the projectors of the system.
pub fn projector_sum_excess(s: &SubspaceSystem) -> f64 {
    let n = s.ambient_dim();
    let mut sum = ComplexMatrix::zeros(n, n);
    for p in s.projectors() {
        sum += p;
    }
    hermitian_eigen(&sum).values.last().copied().unwrap_or(0.0) - 1.0
}

/// Largest `alpha` (to within `1e-6`) such that `R₁ + R₂ + R₃ ≤ (1 + ε)I`
/// for every probe pair `(αA, αB)`: the four sign combinations of `A, B =
/// ±I` plus `probes` random pairs of unit-norm self-adjoint matrices of size
/// `dim`. The excess is only sampled, so callers should keep a margin below
/// the returned value.
pub fn bisect_wild_alpha<R: Rng + ?Sized>(
    eps: f64,
    dim: usize,
    probes: usize,
    rng: &mut R,
    tol: Tolerance,
) -> Result<f64> {
    if !(eps > 0.0) || dim == 0 {
        return Err(Error::Parameter("need eps > 0 and dim ≥ 1".into()));
    }
    let id = identity(dim);
    let mut pairs = Vec::new();
    for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        pairs.push((&id * real(sa), &id * real(sb)));
    }
    for _ in 0..probes {
        pairs.push((sampling::hermitian(rng, dim, 1.0), sampling::hermitian(rng, dim, 1.0)));
    }
    let fits = |alpha: f64| -> Result<bool> {
        for (a, b) in &pairs {
            let s = wild_embed(&(a * real(alpha)), &(b * real(alpha)), alpha, tol)?;
            if projector_sum_excess(&s) > eps {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while fits(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Ok(lo);
        }
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if fits(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
