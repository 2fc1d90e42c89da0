mod common;

use common::{random_family, random_star, rng, tol};
use proptest::prelude::*;
use rand::Rng;

use starsys::irreducibility::commutant_dim;
use starsys::numerics::{kernel_basis, op_norm, orthonormal_range, ComplexMatrix, ComplexVector};
use starsys::sampling;
use starsys::star_b::{
    assemble, criterion_matrix, kernel_dim_formula, kernel_vector, nonneg_criterion, PairRelation,
    StarParams,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn assembled_blocks_follow_relations(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (p, fam) = random_star(&mut rng, 4, 3, 3, -0.3, 0.6);
        let b = assemble(&p, &fam, tol()).unwrap();
        let d = fam.dim0();
        for i in 0..p.n_blocks() {
            for j in 0..p.n_blocks() {
                if i == j {
                    continue;
                }
                let blk = b.block(i, j);
                match p.relation(i, j) {
                    PairRelation::Angle(t) => {
                        prop_assert_eq!(blk, starsys::numerics::identity(d) * starsys::numerics::real(t));
                    }
                    PairRelation::Commute => {
                        let k = (i.min(j) - 1) / 2;
                        prop_assert_eq!(&blk, &fam.projectors()[k]);
                    }
                    PairRelation::Orthogonal => prop_assert_eq!(op_norm(&blk), 0.0),
                }
            }
        }
    }

    #[test]
    fn kernel_vectors_lie_in_kernel(seed in any::<u64>()) {
        let mut rng = rng(seed);
        // one ray tuned so that ξ = λ_max(Σ τ_k² R_k), giving Ker M ≠ 0
        let m = rng.random_range(1..=3);
        let dim0 = rng.random_range(1..=3);
        let fam = random_family(&mut rng, dim0, m);
        let pair_tau: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..0.3)).collect();
        let probe = StarParams::new(m, 0, pair_tau.clone()).unwrap();
        let lmax = -starsys::numerics::eigenvalues(&criterion_matrix(&probe, &fam).unwrap(), tol())
            .unwrap()[0] + probe.xi();
        let ray_sq = probe.xi() - lmax;
        prop_assume!(ray_sq > 1e-3 && ray_sq < 0.99);
        let mut tau = pair_tau;
        tau.push(ray_sq.sqrt());
        let p = StarParams::new(m, 1, tau).unwrap();
        prop_assert!(nonneg_criterion(&p, &fam, tol()).unwrap());

        let ker_m = kernel_basis(&criterion_matrix(&p, &fam).unwrap(), tol()).unwrap();
        prop_assert!(ker_m.ncols() >= 1);
        let coeffs = sampling::gaussian(&mut rng, ker_m.ncols(), 1);
        let y: ComplexVector = (&ker_m * coeffs).column(0).into_owned();
        let deltas: Vec<ComplexVector> = fam
            .projectors()
            .iter()
            .map(|q| (q * sampling::gaussian(&mut rng, dim0, 1)).column(0).into_owned())
            .collect();
        let x = kernel_vector(&p, &fam, &y, &deltas, tol()).unwrap();
        let b = assemble(&p, &fam, tol()).unwrap();
        prop_assert!((b.matrix() * &x).norm() <= 1e-10 * x.norm().max(1.0));
        let formula = kernel_dim_formula(&p, &fam, tol()).unwrap();
        prop_assert_eq!(formula, kernel_basis(b.matrix(), tol()).unwrap().ncols());
    }

    #[test]
    fn commutant_dim_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..=5, count in 0usize..=3) {
        let mut rng = rng(seed);
        let gens: Vec<ComplexMatrix> = (0..count)
            .map(|_| {
                if rng.random_bool(0.5) {
                    let rank = rng.random_range(0..=n);
                    sampling::projector(&mut rng, n, rank)
                } else {
                    sampling::gaussian(&mut rng, n, n)
                }
            })
            .collect();
        let u = sampling::unitary(&mut rng, n);
        let conj: Vec<ComplexMatrix> = gens.iter().map(|g| &u * g * u.adjoint()).collect();
        prop_assert_eq!(commutant_dim(n, &gens, tol()).unwrap(), commutant_dim(n, &conj, tol()).unwrap());
    }
}

#[test]
fn commutant_of_direct_sum_of_distinct_irreducibles() {
    // diag(P, P') with two inequivalent irreducible pairs on C² has commutant
    // C ⊕ C
    let mut rng = rng(5);
    let p1 = sampling::projector(&mut rng, 2, 1);
    let q1 = sampling::projector(&mut rng, 2, 1);
    let p2 = sampling::projector(&mut rng, 2, 1);
    let q2 = sampling::projector(&mut rng, 2, 1);
    let sum = |a: &ComplexMatrix, b: &ComplexMatrix| starsys::numerics::direct_sum(&[a.clone(), b.clone()]);
    assert_eq!(commutant_dim(4, &[sum(&p1, &p2), sum(&q1, &q2)], tol()).unwrap(), 2);
    assert_eq!(commutant_dim(4, &[sum(&p1, &p1), sum(&q1, &q1)], tol()).unwrap(), 4);
    let stacked = orthonormal_range(&sum(&p1, &p2), tol());
    assert_eq!(stacked.ncols(), 2);
}
