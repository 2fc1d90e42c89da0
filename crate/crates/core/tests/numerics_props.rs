mod common;

use common::{rng, tol};
use proptest::prelude::*;
use rand::Rng;

use starsys::numerics::{
    eigenvalues, kernel_basis, numerical_rank, op_norm, projector_onto_columns, psd_check, real,
    ComplexMatrix,
};
use starsys::sampling;

/// `V diag(λ) V*` with the given spectrum.
fn with_spectrum<R: Rng>(rng: &mut R, spectrum: &[f64]) -> ComplexMatrix {
    let n = spectrum.len();
    let v = sampling::unitary(rng, n);
    let d = ComplexMatrix::from_fn(n, n, |i, j| real(if i == j { spectrum[i] } else { 0.0 }));
    &v * d * v.adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_plus_kernel_is_n(seed in any::<u64>(), n in 1usize..9, zeros in 0usize..9) {
        let mut rng = rng(seed);
        let spectrum: Vec<f64> = (0..n)
            .map(|i| if i < zeros.min(n) { 0.0 } else { rng.random_range(0.1..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 } })
            .collect();
        let a = with_spectrum(&mut rng, &spectrum);
        let rank = numerical_rank(&a, tol()).unwrap();
        let ker = kernel_basis(&a, tol()).unwrap().ncols();
        prop_assert_eq!(rank + ker, n);
        prop_assert_eq!(ker, zeros.min(n));
    }

    #[test]
    fn projector_onto_columns_is_orthoprojector(seed in any::<u64>(), rows in 1usize..=16, cols in 1usize..=8, deficient in any::<bool>()) {
        let mut rng = rng(seed);
        let mut c = sampling::gaussian(&mut rng, rows, cols);
        if deficient && cols > 1 {
            let first = c.column(0).into_owned();
            c.set_column(cols - 1, &(first * real(2.0)));
        }
        let p = projector_onto_columns(&c, tol());
        let bound = 10.0 * tol().threshold(1.0);
        prop_assert!(op_norm(&(&p * &p - &p)) <= bound);
        prop_assert!(op_norm(&(&p - p.adjoint())) <= bound);
        // P fixes the columns it projects onto
        prop_assert!(op_norm(&(&p * &c - &c)) <= 1e-10 * op_norm(&c).max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn psd_check_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = rng(seed);
        let spectrum: Vec<f64> = (0..n)
            .map(|_| match rng.random_range(0..4) {
                0 => 0.0,
                1 => -rng.random_range(1e-3..1.0),
                _ => rng.random_range(1e-3..2.0),
            })
            .collect();
        let a = with_spectrum(&mut rng, &spectrum);
        let u = sampling::unitary(&mut rng, n);
        let b = &u * &a * u.adjoint();
        let expected = spectrum.iter().all(|&l| l >= 0.0);
        prop_assert_eq!(psd_check(&a, tol()).unwrap(), expected);
        prop_assert_eq!(psd_check(&b, tol()).unwrap(), expected);
    }
}

#[test]
fn eigenvalues_are_sorted_and_real() {
    let mut rng = rng(11);
    let a = with_spectrum(&mut rng, &[3.0, -1.0, 0.5]);
    let ev = eigenvalues(&a, tol()).unwrap();
    assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    for (got, want) in ev.iter().zip([-1.0, 0.5, 3.0]) {
        assert!((got - want).abs() < 1e-12);
    }
}
