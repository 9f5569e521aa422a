//! Seeded random matrices, vectors and states for property checks and CLI sampling.
//!
//! Entries are independent standard complex Gaussians (real and imaginary
//! parts each `N(0, 1)`).

use nalgebra::linalg::QR;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, CVector};
use crate::operator_core::AlgebraElement;
use crate::states::DensityState;

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Square Gaussian matrix as an algebra element.
pub fn element<R: Rng + ?Sized>(rng: &mut R, n: usize) -> AlgebraElement {
    AlgebraElement::new(gaussian_matrix(rng, n, n)).expect("gaussian entries are finite")
}

/// Gaussian matrix symmetrized to `(G + G*)/2`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> AlgebraElement {
    let g = gaussian_matrix(rng, n, n);
    AlgebraElement::new((&g + g.adjoint()).scale(0.5)).expect("finite")
}

/// Haar unitary via QR of a Gaussian matrix with the diagonal phases of R removed.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> AlgebraElement {
    let g = gaussian_matrix(rng, n, n);
    let qr = QR::new(g);
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    AlgebraElement::new(q).expect("finite")
}

/// Uniformly random unit vector.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v.unscale(norm)
}

/// Density matrix `W W* / tr(W W*)` with `W` an `n × rank` Gaussian; rank is exact almost surely.
pub fn density<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> DensityState {
    let w = gaussian_matrix(rng, n, rank.clamp(1, n));
    let b = &w * w.adjoint();
    let tr: Complex64 = b.diagonal().iter().sum();
    DensityState::new(b.unscale(tr.re)).expect("Wishart matrix is a valid state")
}

/// Density matrix of uniformly random rank in `1..=n`.
pub fn mixed_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityState {
    let rank = rng.random_range(1..=n);
    density(rng, n, rank)
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityState {
    DensityState::from_vector(&unit_vector(rng, n)).expect("unit vector")
}
