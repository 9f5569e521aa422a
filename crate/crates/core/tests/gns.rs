mod common;

use common::*;
use proptest::prelude::*;
use qalgebra::gns::*;
use qalgebra::operator_core::*;
use qalgebra::random;
use qalgebra::states::*;
use qalgebra::weyl::clock_shift;
use qalgebra::{CMatrix, DensityState};
use rand::Rng;

fn gns_of(w: &DensityState) -> (AbstractState, GnsResult) {
    let st = AbstractState::from_density(AlgebraBasis::full(w.dim()), w).unwrap();
    let g = gns_construct(&st, DEFAULT_GRAM_TOL).unwrap();
    (st, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reconstruction_and_dimension(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let rank = r.random_range(1..=n);
        let w = random::density(&mut r, n, rank);
        let (st, g) = gns_of(&w);
        prop_assert!(g.reconstruction_error(&st) <= 1e-9);
        prop_assert_eq!(g.hilbert_dim, n * rank);
        prop_assert!(g.homomorphism_error(st.structure()) <= 1e-8);
        prop_assert_eq!(g.cyclic_rank(1e-10).unwrap(), g.hilbert_dim);
        prop_assert!((g.cyclic_vector.norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn purity_iff_irreducible(seed in any::<u64>(), n in 2usize..=4, pure in any::<bool>()) {
        let mut r = rng(seed);
        let w = if pure { random::pure_state(&mut r, n) } else { random::mixed_density(&mut r, n) };
        let (_, g) = gns_of(&w);
        prop_assert_eq!(is_pure(&w, PURITY_TOL), is_irreducible(&g.rep, 1e-8).unwrap());
    }

    #[test]
    fn representation_contracts_norms(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let w = random::mixed_density(&mut r, n);
        let (st, g) = gns_of(&w);
        let a = random::element(&mut r, n);
        let (coeffs, _) = st.basis().expand(&a).unwrap();
        let rho = AlgebraElement::new(g.represent(&coeffs)).unwrap();
        prop_assert!(operator_norm(&rho).unwrap() <= operator_norm(&a).unwrap() + 1e-9);
    }

    #[test]
    fn uniqueness_up_to_unitary(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let rank = r.random_range(1..=n);
        let w = random::density(&mut r, n, rank);
        let full = AlgebraBasis::full(n);
        let mut order: Vec<usize> = (0..n * n).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, r.random_range(0..=i));
        }
        let g1 = gns_construct(&AbstractState::from_density(full.clone(), &w).unwrap(), DEFAULT_GRAM_TOL).unwrap();
        let permuted = full.permuted(&order).unwrap();
        let g2 = gns_construct(&AbstractState::from_density(permuted, &w).unwrap(), DEFAULT_GRAM_TOL).unwrap();
        // line the second representation up with the original basis order
        let mut rep2 = vec![CMatrix::zeros(0, 0); n * n];
        for (i, &o) in order.iter().enumerate() {
            rep2[o] = g2.rep[i].clone();
        }
        let u = find_cyclic_intertwiner(&g1.rep, &g1.cyclic_vector, &rep2, &g2.cyclic_vector, 1e-8)
            .unwrap()
            .expect("GNS representations of one state are unitarily equivalent");
        prop_assert!((&u * &g1.cyclic_vector - &g2.cyclic_vector).norm() <= 1e-8);
        prop_assert!(max_abs(&(u.adjoint() * &u - CMatrix::identity(u.nrows(), u.nrows()))) <= 1e-10);
        prop_assert!(intertwining_residual(&u, &g1.rep, &rep2) <= 1e-8);
    }
}

#[test]
fn hundred_state_corpus() {
    let mut r = rng(99);
    let mut worst: f64 = 0.0;
    let mut mismatches = 0;
    for i in 0..100 {
        let n = 2 + i % 3;
        let rank = if i % 2 == 0 { 1 } else { r.random_range(1..=n) };
        let w = random::density(&mut r, n, rank);
        let (st, g) = gns_of(&w);
        worst = worst.max(g.reconstruction_error(&st));
        assert_eq!(g.hilbert_dim, n * w.rank(1e-10).unwrap());
        if is_pure(&w, PURITY_TOL) != is_irreducible(&g.rep, 1e-8).unwrap() {
            mismatches += 1;
        }
    }
    assert!(worst <= 1e-9, "worst reconstruction error {worst:e}");
    assert_eq!(mismatches, 0);
}

#[test]
fn every_rank_on_full_matrix_algebras() {
    let mut r = rng(4);
    for n in 1..=4 {
        for rank in 1..=n {
            let w = random::density(&mut r, n, rank);
            assert_eq!(gns_of(&w).1.hilbert_dim, n * rank);
        }
    }
}

#[test]
fn state_on_generated_subalgebra() {
    // the algebra of σz restricted states: GNS dimension equals the support size
    let b = generate_algebra(&[AlgebraElement::pauli_z()], 1e-10).unwrap();
    let st = AbstractState::from_density(b, &DensityState::maximally_mixed(2)).unwrap();
    let g = gns_construct(&st, DEFAULT_GRAM_TOL).unwrap();
    assert_eq!(g.hilbert_dim, 2);
    assert!(g.reconstruction_error(&st) < 1e-12);
    // a commutative algebra: every irreducible piece is one-dimensional, so this one is reducible
    assert!(!is_irreducible(&g.rep, 1e-9).unwrap());
}

#[test]
fn clock_shift_pairs_are_irreducible() {
    for n in [2, 3, 5, 8, 16, 32, 64] {
        let w = clock_shift(n).unwrap();
        let rep = vec![w.clock().matrix().clone(), w.shift().matrix().clone()];
        assert_eq!(commutant(&rep, 1e-9).unwrap().len(), 1, "n = {n}");
    }
}

#[test]
fn conjugated_weyl_pairs_are_equivalent() {
    let mut r = rng(17);
    for n in [2, 3, 4, 6, 8] {
        let w = clock_shift(n).unwrap();
        let u1 = random::unitary(&mut r, n);
        let u2 = random::unitary(&mut r, n);
        let conj = |u: &AlgebraElement, m: &AlgebraElement| (u.matrix() * m.matrix()) * u.matrix().adjoint();
        let rep1 = vec![conj(&u1, w.clock()), conj(&u1, w.shift())];
        let rep2 = vec![conj(&u2, w.clock()), conj(&u2, w.shift())];
        let t = find_intertwiner(&rep1, &rep2, 1e-9).unwrap().expect("equivalent");
        assert!(intertwining_residual(&t, &rep1, &rep2) <= 1e-8);
        // a pair with the inverse phase is not equivalent
        let rep3 = vec![rep1[0].adjoint(), rep1[1].clone()];
        if n > 2 {
            assert!(find_intertwiner(&rep1, &rep3, 1e-9).unwrap().is_none());
        }
    }
}
