//! States as density matrices: `ω(A) = tr(bA)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ONE};
use crate::operator_core::{adjoint, commutator, AlgebraElement};

/// Tolerance for the Hermitian, positivity and trace invariants.
pub const STATE_TOL: f64 = 1e-12;
/// Tolerance for accepting an argument as self-adjoint.
pub const OBSERVABLE_TOL: f64 = 1e-10;
/// `tr(b²) > 1 - PURITY_TOL` marks a pure state.
pub const PURITY_TOL: f64 = 1e-10;

/// Positive, unit-trace density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    b: CMatrix,
}

impl DensityState {
    /// Checks Hermiticity, positivity and unit trace, each within [`STATE_TOL`]
    /// (scaled by the dimension for the eigenvalue and trace checks).
    pub fn new(b: CMatrix) -> Result<Self> {
        let n = b.nrows();
        if n == 0 || b.ncols() != n {
            return Err(Error::shape(
                "non-empty square matrix",
                format!("{}x{}", b.nrows(), b.ncols()),
            ));
        }
        if !linalg::is_finite(&b) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let skew = linalg::spectral_norm(&(&b - b.adjoint()))?;
        if skew > STATE_TOL {
            return Err(Error::InvalidState(format!("not self-adjoint (deviation {skew:.3e})")));
        }
        let b = linalg::hermitian_part(&b);
        let (vals, _) = linalg::hermitian_eigen(&b)?;
        let slack = STATE_TOL * n as f64;
        if vals[0] < -slack {
            return Err(Error::InvalidState(format!("negative eigenvalue {:.3e}", vals[0])));
        }
        let tr = linalg::trace(&b);
        if (tr - ONE).norm() > slack {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        Ok(Self { b })
    }

    /// Vector state `ψψ*`; a non-unit vector is normalized with a warning.
    pub fn from_vector(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("zero or non-finite state vector".into()));
        }
        if (norm - 1.0).abs() > 1e-10 {
            log::warn!("state vector has norm {norm}; normalizing");
        }
        let v = psi.unscale(norm);
        let b = &v * v.adjoint();
        Ok(Self {
            b: linalg::hermitian_part(&b),
        })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            b: CMatrix::identity(n, n).unscale(n as f64),
        }
    }

    /// Pure state on the `k`-th standard basis vector.
    pub fn basis_state(n: usize, k: usize) -> Self {
        let mut b = CMatrix::zeros(n, n);
        b[(k, k)] = ONE;
        Self { b }
    }

    pub fn dim(&self) -> usize {
        self.b.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.b
    }

    /// `tr(b²)`.
    pub fn purity(&self) -> f64 {
        linalg::trace_of_product(&self.b, &self.b).re
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> Result<usize> {
        let (vals, _) = linalg::hermitian_eigen(&self.b)?;
        Ok(vals.iter().filter(|&&v| v > tol).count())
    }
}

fn check_dims(omega: &DensityState, a: &AlgebraElement) -> Result<()> {
    if omega.dim() != a.dim() {
        return Err(Error::shape(format!("dim {}", omega.dim()), format!("dim {}", a.dim())));
    }
    Ok(())
}

fn require_observable(a: &AlgebraElement) -> Result<()> {
    let dev = linalg::norm_or_frobenius(&(a.matrix() - a.matrix().adjoint()));
    if dev > OBSERVABLE_TOL * a.frobenius_norm().max(1.0) {
        return Err(Error::InvalidObservable(format!(
            "argument is not self-adjoint (deviation {dev:.3e})"
        )));
    }
    Ok(())
}

/// `tr(bA)`.
pub fn expectation(omega: &DensityState, a: &AlgebraElement) -> Result<Complex64> {
    check_dims(omega, a)?;
    Ok(linalg::trace_of_product(&omega.b, a.matrix()))
}

/// Pure iff `tr(b²) > 1 - tol` and `‖b² − b‖ < tol`.
pub fn is_pure(omega: &DensityState, tol: f64) -> bool {
    let b2 = &omega.b * &omega.b;
    omega.purity() > 1.0 - tol && linalg::norm_or_frobenius(&(&b2 - &omega.b)) < tol
}

/// Convex combination `Σ p_i b_i`.
pub fn mix(states: &[DensityState], weights: &[f64]) -> Result<DensityState> {
    if states.is_empty() || states.len() != weights.len() {
        return Err(Error::InvalidInput(format!(
            "{} states but {} weights",
            states.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(Error::InvalidInput("weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
    }
    let n = states[0].dim();
    let mut b = CMatrix::zeros(n, n);
    for (s, &w) in states.iter().zip(weights) {
        if s.dim() != n {
            return Err(Error::shape(format!("dim {n}"), format!("dim {}", s.dim())));
        }
        b += s.matrix().scale(w);
    }
    Ok(DensityState { b })
}

/// `ω(A²) − ω(A)²` for self-adjoint `A`, clipped at zero against round-off.
pub fn variance(omega: &DensityState, a: &AlgebraElement) -> Result<f64> {
    check_dims(omega, a)?;
    require_observable(a)?;
    let mean = expectation(omega, a)?.re;
    let second = linalg::trace_of_product(&(&omega.b * a.matrix()), a.matrix()).re;
    let v = second - mean * mean;
    if v < 0.0 {
        let scale = second.abs().max(1.0);
        if v < -1e-12 * scale {
            return Err(Error::Numerical(format!("negative variance {v:.3e}")));
        }
        return Ok(0.0);
    }
    Ok(v)
}

/// Both sides of `Δ(A1)Δ(A2) ≥ |ω([A1, A2])|/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl UncertaintyReport {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// Slack allowed on the uncertainty inequality.
pub const UNCERTAINTY_SLACK: f64 = 1e-10;

pub fn uncertainty_check(omega: &DensityState, a1: &AlgebraElement, a2: &AlgebraElement) -> Result<UncertaintyReport> {
    let lhs = variance(omega, a1)?.sqrt() * variance(omega, a2)?.sqrt();
    let rhs = expectation(omega, &commutator(a1, a2)?)?.norm() / 2.0;
    Ok(UncertaintyReport {
        lhs,
        rhs,
        holds: lhs >= rhs - UNCERTAINTY_SLACK,
    })
}

pub fn has_definite_value(omega: &DensityState, a: &AlgebraElement, tol: f64) -> Result<bool> {
    Ok(variance(omega, a)? < tol)
}

/// `ω(A*A)`, real part; nonnegative for every state.
pub fn positivity_value(omega: &DensityState, a: &AlgebraElement) -> Result<f64> {
    Ok(expectation(omega, &(&adjoint(a) * a))?.re)
}

/// `n²` pure states whose density matrices span the Hermitian matrices:
/// `e_j`, `(e_j + e_k)/√2` and `(e_j + i e_k)/√2` for `j < k`.
pub fn spanning_states(n: usize) -> Vec<DensityState> {
    let mut out = Vec::with_capacity(n * n);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        out.push(DensityState::basis_state(n, j));
    }
    for j in 0..n {
        for k in (j + 1)..n {
            for phase in [ONE, linalg::I] {
                let mut v = CVector::zeros(n);
                v[j] = ONE * s;
                v[k] = phase * s;
                out.push(DensityState::from_vector(&v).expect("unit vector"));
            }
        }
    }
    out
}

/// Index of the first spanning state on which the two observables have
/// expectations differing by more than `tol`, if any.
pub fn separating_state(a1: &AlgebraElement, a2: &AlgebraElement, tol: f64) -> Result<Option<usize>> {
    if a1.dim() != a2.dim() {
        return Err(Error::shape(format!("dim {}", a1.dim()), format!("dim {}", a2.dim())));
    }
    for (i, s) in spanning_states(a1.dim()).iter().enumerate() {
        if (expectation(s, a1)? - expectation(s, a2)?).norm() > tol {
            return Ok(Some(i));
        }
    }
    Ok(None)
}
