//! Finite-dimensional C*-algebras of matrices and the structures built on them:
//! states, spectral measures, the GNS construction, Weyl systems, classical
//! Hamiltonian mechanics and quantum dynamics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod dynamics;
pub mod error;
pub mod gns;
pub mod io;
pub mod linalg;
pub mod operator_core;
pub mod random;
pub mod spectral;
pub mod states;
pub mod weyl;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64;
pub use operator_core::{AlgebraBasis, AlgebraElement};
pub use states::DensityState;
