mod common;

use common::*;
use proptest::prelude::*;
use qalgebra::operator_core::*;
use qalgebra::random;
use qalgebra::states::*;
use qalgebra::CMatrix;

/// `Δ(A)² = ‖(A − ⟨A⟩) b^{1/2}‖_F²`, evaluated through an eigen-decomposition of `b`.
fn variance_oracle(omega: &DensityState, a: &AlgebraElement) -> f64 {
    let b = omega.matrix();
    let n = b.nrows();
    let eig = b.clone().symmetric_eigen();
    let sqrt_b = &eig.eigenvectors
        * CMatrix::from_diagonal(&eig.eigenvalues.map(|l| c(l.max(0.0).sqrt(), 0.0)))
        * eig.eigenvectors.adjoint();
    let mean: f64 = (b * a.matrix()).trace().re;
    let shifted = a.matrix() - CMatrix::identity(n, n) * c(mean, 0.0);
    (shifted * sqrt_b).norm_squared()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn positivity_and_normalization(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let w = random::mixed_density(&mut r, n);
        let a = random::element(&mut r, n);
        prop_assert!(positivity_value(&w, &a).unwrap() >= -1e-12);
        let one = expectation(&w, &AlgebraElement::identity(n)).unwrap();
        prop_assert!((one - c(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn cauchy_schwarz(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let w = random::mixed_density(&mut r, n);
        let a = random::element(&mut r, n);
        let lhs = expectation(&w, &a).unwrap().norm_sqr();
        prop_assert!(lhs <= positivity_value(&w, &a).unwrap() + 1e-10);
    }

    #[test]
    fn variance_matches_oracle(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let w = random::mixed_density(&mut r, n);
        let a = random::hermitian(&mut r, n);
        let v = variance(&w, &a).unwrap();
        prop_assert!((v - variance_oracle(&w, &a)).abs() <= 1e-10 * (1.0 + v));
    }

    #[test]
    fn mixtures_of_distinct_pure_states_are_mixed(seed in any::<u64>(), n in 2usize..=8) {
        let mut r = rng(seed);
        let w1 = random::pure_state(&mut r, n);
        let w2 = random::pure_state(&mut r, n);
        prop_assert!(is_pure(&w1, PURITY_TOL) && is_pure(&w2, PURITY_TOL));
        let m = mix(&[w1, w2], &[0.5, 0.5]).unwrap();
        prop_assert!(!is_pure(&m, PURITY_TOL));
    }

    #[test]
    fn uncertainty_relation(seed in any::<u64>(), n in 2usize..=8, pure in any::<bool>()) {
        let mut r = rng(seed);
        let w = if pure { random::pure_state(&mut r, n) } else { random::mixed_density(&mut r, n) };
        let a1 = random::hermitian(&mut r, n);
        let a2 = random::hermitian(&mut r, n);
        let rep = uncertainty_check(&w, &a1, &a2).unwrap();
        prop_assert!(rep.holds, "lhs {} rhs {}", rep.lhs, rep.rhs);
    }

    #[test]
    fn spanning_family_separates(seed in any::<u64>(), n in 1usize..=6, eps in 1e-6f64..1.0) {
        let mut r = rng(seed);
        let a1 = random::hermitian(&mut r, n);
        let d = random::hermitian(&mut r, n);
        let a2 = &a1 + &d.scale(c(eps, 0.0));
        prop_assert!(separating_state(&a1, &a2, 1e-12).unwrap().is_some());
        prop_assert!(separating_state(&a1, &a1, 1e-12).unwrap().is_none());
    }
}

#[test]
fn ten_thousand_uncertainty_draws() {
    let mut r = rng(2024);
    let mut violations = 0;
    for i in 0..10_000 {
        let n = 2 + i % 7;
        let w = if i % 2 == 0 {
            random::pure_state(&mut r, n)
        } else {
            random::mixed_density(&mut r, n)
        };
        let a1 = random::hermitian(&mut r, n);
        let a2 = random::hermitian(&mut r, n);
        if !uncertainty_check(&w, &a1, &a2).unwrap().holds {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn eigenvector_state_has_definite_value() {
    let mut r = rng(11);
    for n in 2..=6 {
        let a = random::hermitian(&mut r, n);
        let eig = a.matrix().clone().symmetric_eigen();
        let v = eig.eigenvectors.column(0).into_owned();
        let w = DensityState::from_vector(&v).unwrap();
        assert!(has_definite_value(&w, &a, 1e-10).unwrap());
        let u = uncertainty_check(&w, &a, &random::hermitian(&mut r, n)).unwrap();
        assert!(u.lhs.abs() < 1e-5 && u.rhs < 1e-5);
    }
}

#[test]
fn unitary_conjugation_preserves_purity() {
    let mut r = rng(3);
    for n in 2..=6 {
        let w = random::pure_state(&mut r, n);
        let u = random::unitary(&mut r, n);
        let b = u.matrix() * w.matrix() * u.matrix().adjoint();
        let w2 = DensityState::new(b).unwrap();
        assert!(is_pure(&w2, PURITY_TOL));
        let m = random::density(&mut r, n, 2);
        assert!(!is_pure(&m, PURITY_TOL));
        assert_eq!(m.rank(1e-10).unwrap(), 2);
    }
}
