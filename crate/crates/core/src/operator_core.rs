//! Finite-dimensional matrix *-algebras.
//!
//! An abstract C*-algebra element is realized as a square complex matrix.
//! Self-adjoint elements are the observables; the operator norm is the
//! largest singular value, for which `‖A*A‖ = ‖A‖²` holds exactly.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ONE, ZERO};

/// Default relative threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// A square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    entries: CMatrix,
}

impl AlgebraElement {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::shape(
                "non-empty square matrix",
                format!("{}x{}", entries.nrows(), entries.ncols()),
            ));
        }
        if !linalg::is_finite(&entries) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self { entries })
    }

    /// Row-major construction from complex entries.
    pub fn from_rows(n: usize, rows: &[Complex64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::shape(n * n, rows.len()));
        }
        Self::new(CMatrix::from_row_slice(n, n, rows))
    }

    /// Row-major construction from real entries.
    pub fn from_real_rows(n: usize, rows: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = rows.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_rows(n, &c)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: CMatrix::zeros(n, n),
        }
    }

    pub fn diagonal(values: &[Complex64]) -> Result<Self> {
        Self::new(CMatrix::from_diagonal(&CVector::from_column_slice(values)))
    }

    pub fn real_diagonal(values: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&c)
    }

    pub fn pauli_x() -> Self {
        Self {
            entries: CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        }
    }

    pub fn pauli_y() -> Self {
        let i = linalg::I;
        Self {
            entries: CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        }
    }

    pub fn pauli_z() -> Self {
        Self {
            entries: CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            entries: &self.entries * z,
        }
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.entries)
    }

    /// Frobenius norm; used for rank decisions, never as the C* norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// `true` when every entry has a negligible imaginary part.
    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.re)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = CMatrix::identity(self.dim(), self.dim());
        for _ in 0..k {
            acc = &acc * &self.entries;
        }
        Self { entries: acc }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::shape(
                format!("dim {}", self.dim()),
                format!("dim {}", other.dim()),
            ));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            entries: &self.entries - &other.entries,
        })
    }
}

impl<'a> Mul<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    /// Panics on dimension mismatch; use [`AlgebraElement::try_mul`] otherwise.
    fn mul(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        self.try_mul(rhs).expect("dimension mismatch in product")
    }
}

impl<'a> Add<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        self.try_add(rhs).expect("dimension mismatch in sum")
    }
}

impl<'a> Sub<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        self.try_sub(rhs).expect("dimension mismatch in difference")
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement {
            entries: -&self.entries,
        }
    }
}

/// Conjugate transpose. `adjoint(adjoint(a)) == a` exactly.
pub fn adjoint(a: &AlgebraElement) -> AlgebraElement {
    AlgebraElement {
        entries: a.entries.adjoint(),
    }
}

/// Operator norm: the largest singular value.
pub fn operator_norm(a: &AlgebraElement) -> Result<f64> {
    linalg::spectral_norm(&a.entries)
}

/// `AB - BA`.
pub fn commutator(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.check_same_dim(b)?;
    Ok(AlgebraElement {
        entries: &a.entries * &b.entries - &b.entries * &a.entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub selfadjoint: bool,
    pub normal: bool,
    pub unitary: bool,
    pub positive: bool,
}

/// Structural predicates, each decided in operator norm against `tol`.
pub fn classify(a: &AlgebraElement, tol: f64) -> Classification {
    let m = &a.entries;
    let adj = m.adjoint();
    let n = a.dim();
    let id = CMatrix::identity(n, n);
    let selfadjoint = linalg::norm_or_frobenius(&(m - &adj)) < tol;
    let ama = &adj * m;
    let aam = m * &adj;
    let normal = linalg::norm_or_frobenius(&(&ama - &aam)) < tol;
    let unitary = linalg::norm_or_frobenius(&(&ama - &id)) < tol && linalg::norm_or_frobenius(&(&aam - &id)) < tol;
    let positive = selfadjoint
        && linalg::hermitian_eigen(m)
            .map(|(vals, _)| vals.first().is_none_or(|&v| v >= -tol))
            .unwrap_or(false);
    Classification {
        selfadjoint,
        normal,
        unitary,
        positive,
    }
}

/// A linearly independent list of algebra elements spanning a subspace of `M_n`.
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    dim: usize,
    elements: Vec<AlgebraElement>,
    contains_identity: bool,
    /// Inverse of the Frobenius Gram matrix, cached for coefficient expansion.
    gram_inverse: CMatrix,
}

impl AlgebraBasis {
    /// Validates linear independence through the Frobenius Gram matrix.
    pub fn new(elements: Vec<AlgebraElement>, tol: f64) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidInput("empty basis".into()))?;
        let dim = first.dim();
        if let Some(bad) = elements.iter().find(|e| e.dim() != dim) {
            return Err(Error::shape(format!("dim {dim}"), format!("dim {}", bad.dim())));
        }
        let m = elements.len();
        let gram = CMatrix::from_fn(m, m, |j, k| {
            linalg::frobenius_inner(elements[j].matrix(), elements[k].matrix())
        });
        let (vals, _) = linalg::hermitian_eigen(&gram)?;
        let largest = vals.last().cloned().unwrap_or(0.0);
        if vals[0] <= tol * largest {
            return Err(Error::InvalidInput(format!(
                "basis elements are linearly dependent (Gram eigenvalue ratio {:.3e})",
                vals[0] / largest
            )));
        }
        let gram_inverse = gram
            .try_inverse()
            .ok_or_else(|| Error::Numerical("Gram matrix not invertible".into()))?;
        let mut basis = Self {
            dim,
            elements,
            contains_identity: false,
            gram_inverse,
        };
        let (_, residual) = basis.expand(&AlgebraElement::identity(dim))?;
        basis.contains_identity = residual <= 1e-8 * (dim as f64).sqrt();
        Ok(basis)
    }

    /// Matrix units `E_jk`, row-major order.
    pub fn full(n: usize) -> Self {
        let elements = (0..n * n)
            .map(|idx| {
                let mut m = CMatrix::zeros(n, n);
                m[(idx / n, idx % n)] = ONE;
                AlgebraElement { entries: m }
            })
            .collect();
        Self::new(elements, DEFAULT_RANK_TOL).expect("matrix units are independent")
    }

    /// Diagonal matrix units `E_jj`.
    pub fn diagonal(n: usize) -> Self {
        let elements = (0..n)
            .map(|j| {
                let mut m = CMatrix::zeros(n, n);
                m[(j, j)] = ONE;
                AlgebraElement { entries: m }
            })
            .collect();
        Self::new(elements, DEFAULT_RANK_TOL).expect("diagonal units are independent")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[AlgebraElement] {
        &self.elements
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    /// Least-squares coefficients of `a` in this basis and the Frobenius residual.
    pub fn expand(&self, a: &AlgebraElement) -> Result<(Vec<Complex64>, f64)> {
        if a.dim() != self.dim {
            return Err(Error::shape(format!("dim {}", self.dim), format!("dim {}", a.dim())));
        }
        let rhs = CVector::from_iterator(
            self.elements.len(),
            self.elements
                .iter()
                .map(|e| linalg::frobenius_inner(e.matrix(), a.matrix())),
        );
        let coeffs = &self.gram_inverse * rhs;
        let recon = self.combine(coeffs.as_slice());
        let residual = (a.matrix() - recon.matrix()).norm();
        Ok((coeffs.iter().cloned().collect(), residual))
    }

    /// `Σ c_j A_j`.
    pub fn combine(&self, coeffs: &[Complex64]) -> AlgebraElement {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (c, e) in coeffs.iter().zip(&self.elements) {
            m += e.matrix() * *c;
        }
        AlgebraElement { entries: m }
    }

    /// Same basis with elements reordered: `new[i] = old[order[i]]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        for &i in order {
            if i >= self.len() || seen[i] {
                return Err(Error::InvalidInput("order is not a permutation".into()));
            }
            seen[i] = true;
        }
        if order.len() != self.len() {
            return Err(Error::InvalidInput("order is not a permutation".into()));
        }
        Self::new(
            order.iter().map(|&i| self.elements[i].clone()).collect(),
            DEFAULT_RANK_TOL,
        )
    }
}

/// Basis of the unital *-algebra generated by `generators`.
///
/// Candidates (identity, generators, adjoints, then products of basis
/// elements) are unit-normalized and orthogonalized twice against the
/// current orthonormal basis; a candidate is kept when its residual exceeds
/// `tol`. The loop stops when a full pass adds nothing or the dimension
/// reaches `n²`.
pub fn generate_algebra(generators: &[AlgebraElement], tol: f64) -> Result<AlgebraBasis> {
    let first = generators
        .first()
        .ok_or_else(|| Error::InvalidInput("no generators".into()))?;
    if tol <= 0.0 {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    let n = first.dim();
    if let Some(bad) = generators.iter().find(|g| g.dim() != n) {
        return Err(Error::shape(format!("dim {n}"), format!("dim {}", bad.dim())));
    }
    let full = n * n;
    let mut basis: Vec<CMatrix> = Vec::new();

    let try_add = |basis: &mut Vec<CMatrix>, cand: &CMatrix| -> bool {
        let norm = cand.norm();
        if norm == 0.0 || basis.len() >= full {
            return false;
        }
        let mut r = cand.unscale(norm);
        for _ in 0..2 {
            for q in basis.iter() {
                let c = linalg::frobenius_inner(q, &r);
                r -= q * c;
            }
        }
        let res = r.norm();
        if res > tol {
            basis.push(r.unscale(res));
            true
        } else {
            false
        }
    };

    try_add(&mut basis, &CMatrix::identity(n, n));
    for g in generators {
        try_add(&mut basis, g.matrix());
        try_add(&mut basis, &g.matrix().adjoint());
    }

    // Products of each newly admitted element with everything admitted so far.
    let mut frontier = 0;
    while frontier < basis.len() && basis.len() < full {
        let x = basis[frontier].clone();
        try_add(&mut basis, &x.adjoint());
        let upto = basis.len();
        for j in 0..upto {
            let y = basis[j].clone();
            try_add(&mut basis, &(&x * &y));
            try_add(&mut basis, &(&y * &x));
            if basis.len() >= full {
                break;
            }
        }
        frontier += 1;
    }

    let elements = basis.into_iter().map(|m| AlgebraElement { entries: m }).collect();
    AlgebraBasis::new(elements, DEFAULT_RANK_TOL)
}

/// `true` iff every pairwise commutator of basis elements has operator norm below `tol`.
pub fn is_commutative(basis: &AlgebraBasis, tol: f64) -> bool {
    let els = basis.elements();
    for j in 0..els.len() {
        for k in (j + 1)..els.len() {
            let c = els[j].matrix() * els[k].matrix() - els[k].matrix() * els[j].matrix();
            if linalg::norm_or_frobenius(&c) >= tol {
                return false;
            }
        }
    }
    true
}
