//! The GNS construction on a finite-dimensional *-algebra, commutants, and
//! intertwiner search between representations.
//!
//! Given a basis `A_1, …, A_m` of a unital *-algebra and a state `ω` (its
//! values on the basis), the Gram matrix `G_jk = ω(A_j* A_k)` defines a
//! semi-inner product on the algebra. Quotienting by its null space gives
//! the Hilbert space; left multiplication descends to the representation,
//! and the class of the identity is the cyclic vector.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ZERO};
use crate::operator_core::{adjoint, AlgebraBasis, AlgebraElement};
use crate::states::DensityState;

/// Relative tolerance for multiplicative closure of a basis.
pub const CLOSURE_TOL: f64 = 1e-10;
/// Default relative threshold for the Gram null space.
pub const DEFAULT_GRAM_TOL: f64 = 1e-10;
/// Absolute floor under the Gram null-space threshold.
pub const GRAM_FLOOR: f64 = 1e-14;

/// Products of basis elements re-expanded in the basis.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    /// `left[j]` is the matrix of `X ↦ A_j X` in basis coordinates.
    pub left: Vec<CMatrix>,
    /// Row `j` holds the coordinates of `A_j*`.
    pub adjoint: CMatrix,
    /// Coordinates of the identity.
    pub identity: CVector,
    /// Largest relative residual seen while expanding products.
    pub closure_residual: f64,
}

impl StructureConstants {
    pub fn new(basis: &AlgebraBasis) -> Result<Self> {
        let m = basis.len();
        let els = basis.elements();
        let mut closure_residual: f64 = 0.0;
        let mut expand = |a: &AlgebraElement| -> Result<Vec<Complex64>> {
            let (c, res) = basis.expand(a)?;
            closure_residual = closure_residual.max(res / a.frobenius_norm().max(1.0));
            Ok(c)
        };
        let mut left = vec![CMatrix::zeros(m, m); m];
        for (j, aj) in els.iter().enumerate() {
            for (k, ak) in els.iter().enumerate() {
                let c = expand(&(aj * ak))?;
                for (i, ci) in c.into_iter().enumerate() {
                    left[j][(i, k)] = ci;
                }
            }
        }
        let mut adj = CMatrix::zeros(m, m);
        for (j, aj) in els.iter().enumerate() {
            for (i, ci) in expand(&adjoint(aj))?.into_iter().enumerate() {
                adj[(j, i)] = ci;
            }
        }
        let (id, id_res) = basis.expand(&AlgebraElement::identity(basis.dim()))?;
        if id_res > 1e-8 * (basis.dim() as f64).sqrt() {
            return Err(Error::Precondition("identity is not in the span of the basis".into()));
        }
        if closure_residual > CLOSURE_TOL {
            return Err(Error::Precondition(format!(
                "basis is not closed under products and adjoints (relative residual {closure_residual:.3e}); \
                 run generate_algebra first"
            )));
        }
        Ok(Self {
            left,
            adjoint: adj,
            identity: CVector::from_vec(id),
            closure_residual,
        })
    }
}

/// A state given by its values on an algebra basis.
#[derive(Debug, Clone)]
pub struct AbstractState {
    basis: AlgebraBasis,
    values: Vec<Complex64>,
    structure: StructureConstants,
}

impl AbstractState {
    /// Checks `ω(1) = 1` and that the Gram matrix is Hermitian and positive semidefinite.
    pub fn new(basis: AlgebraBasis, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != basis.len() {
            return Err(Error::shape(basis.len(), values.len()));
        }
        let structure = StructureConstants::new(&basis)?;
        let state = Self {
            basis,
            values,
            structure,
        };
        let unit = state.value_of_coeffs(state.structure.identity.as_slice());
        if (unit - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidState(format!("ω(1) = {unit}, expected 1")));
        }
        let g = state.gram();
        let scale = g.norm().max(1.0);
        if (&g - g.adjoint()).norm() > 1e-10 * scale {
            return Err(Error::InvalidState("Gram matrix is not Hermitian".into()));
        }
        let (vals, _) = linalg::hermitian_eigen(&g)?;
        if vals[0] < -1e-10 * scale {
            return Err(Error::InvalidState(format!(
                "Gram matrix has negative eigenvalue {:.3e}",
                vals[0]
            )));
        }
        Ok(state)
    }

    /// Restriction of a density-matrix state to the span of `basis`.
    pub fn from_density(basis: AlgebraBasis, omega: &DensityState) -> Result<Self> {
        if omega.dim() != basis.dim() {
            return Err(Error::shape(
                format!("dim {}", basis.dim()),
                format!("dim {}", omega.dim()),
            ));
        }
        let values = basis
            .elements()
            .iter()
            .map(|a| linalg::trace_of_product(omega.matrix(), a.matrix()))
            .collect();
        Self::new(basis, values)
    }

    pub fn basis(&self) -> &AlgebraBasis {
        &self.basis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn structure(&self) -> &StructureConstants {
        &self.structure
    }

    fn value_of_coeffs(&self, c: &[Complex64]) -> Complex64 {
        c.iter().zip(&self.values).map(|(a, b)| a * b).sum()
    }

    /// `ω(A)` for any `A` in the span of the basis.
    pub fn value(&self, a: &AlgebraElement) -> Result<Complex64> {
        let (c, _) = self.basis.expand(a)?;
        Ok(self.value_of_coeffs(&c))
    }

    /// `G_jk = ω(A_j* A_k)`.
    pub fn gram(&self) -> CMatrix {
        let m = self.basis.len();
        let s = &self.structure;
        // A_j* A_k = Σ_i adj[j,i] A_i A_k = Σ_i adj[j,i] Σ_l left[i][l,k] A_l
        let omega = CVector::from_column_slice(&self.values);
        let mut g = CMatrix::zeros(m, m);
        for i in 0..m {
            // row vector: ω applied to column k of left[i]
            let row = omega.transpose() * &s.left[i];
            for j in 0..m {
                let a = s.adjoint[(j, i)];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    g[(j, k)] += a * row[(0, k)];
                }
            }
        }
        g
    }
}

/// Hilbert space, representation and cyclic vector produced by the GNS construction.
#[derive(Debug, Clone)]
pub struct GnsResult {
    pub hilbert_dim: usize,
    /// `rep[j] = ρ_ω(A_j)`.
    pub rep: Vec<CMatrix>,
    pub cyclic_vector: CVector,
    /// Maps basis coordinates to Hilbert-space coordinates (`hilbert_dim × m`).
    pub quotient_map: CMatrix,
    /// Absolute eigenvalue threshold used for the Gram null space.
    pub gram_rank_tol: f64,
}

impl GnsResult {
    /// `ρ(Σ c_j A_j)`.
    pub fn represent(&self, coeffs: &[Complex64]) -> CMatrix {
        let d = self.hilbert_dim;
        let mut m = CMatrix::zeros(d, d);
        for (c, r) in coeffs.iter().zip(&self.rep) {
            m += r * *c;
        }
        m
    }

    /// `max_j |ω(A_j) − ⟨ψ|ρ(A_j)ψ⟩|`.
    pub fn reconstruction_error(&self, omega: &AbstractState) -> f64 {
        let psi = &self.cyclic_vector;
        self.rep
            .iter()
            .zip(omega.values())
            .map(|(r, v)| ((psi.adjoint() * r * psi)[(0, 0)] - v).norm())
            .fold(0.0, f64::max)
    }

    /// Largest violation of `ρ(A_j A_k) = ρ(A_j)ρ(A_k)` and `ρ(A_j*) = ρ(A_j)*`.
    pub fn homomorphism_error(&self, structure: &StructureConstants) -> f64 {
        let m = self.rep.len();
        let mut worst: f64 = 0.0;
        for j in 0..m {
            for k in 0..m {
                let coeffs: Vec<Complex64> = structure.left[j].column(k).iter().cloned().collect();
                let lhs = self.represent(&coeffs);
                let rhs = &self.rep[j] * &self.rep[k];
                worst = worst.max((lhs - rhs).norm());
            }
            let adj: Vec<Complex64> = structure.adjoint.row(j).iter().cloned().collect();
            worst = worst.max((self.represent(&adj) - self.rep[j].adjoint()).norm());
        }
        worst
    }

    /// Dimension of `span{ρ(A_j)ψ}`.
    pub fn cyclic_rank(&self, tol: f64) -> Result<usize> {
        let cols: Vec<CVector> = self.rep.iter().map(|r| r * &self.cyclic_vector).collect();
        let k = CMatrix::from_columns(&cols);
        let (vals, _) = linalg::hermitian_eigen(&(&k * k.adjoint()))?;
        let top = vals.last().cloned().unwrap_or(0.0);
        Ok(vals.iter().filter(|&&v| v > tol * top).count())
    }
}

pub fn gns_construct(omega: &AbstractState, rank_tol: f64) -> Result<GnsResult> {
    if !(rank_tol > 0.0) {
        return Err(Error::InvalidInput("rank_tol must be positive".into()));
    }
    let g = omega.gram();
    let (vals, vecs) = linalg::hermitian_eigen(&g)?;
    let scale = vals.last().cloned().unwrap_or(0.0).max(0.0);
    let threshold = (rank_tol * scale).max(GRAM_FLOOR);
    if vals[0] < -threshold {
        return Err(Error::InvalidState(format!(
            "Gram matrix is indefinite (eigenvalue {:.3e} below -{threshold:.3e})",
            vals[0]
        )));
    }
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > threshold).collect();
    let r = keep.len();
    if r == 0 {
        return Err(Error::InvalidState("Gram matrix vanishes".into()));
    }
    let m = omega.basis().len();
    // Q = Λ^{1/2} W*, Q⁺ = W Λ^{-1/2}
    let mut q = CMatrix::from_fn(r, m, |a, j| vecs[(j, keep[a])].conj() * vals[keep[a]].sqrt());
    let mut q_pinv = CMatrix::from_fn(m, r, |j, a| vecs[(j, keep[a])] / vals[keep[a]].sqrt());

    let psi = &q * &omega.structure().identity;
    let norm = psi.norm();
    if let Some(first) = psi.iter().find(|z| z.norm() > 1e-12 * norm) {
        let phase = first / first.norm();
        q *= phase.conj();
        q_pinv *= phase;
    }
    let cyclic_vector = &q * &omega.structure().identity;

    let rep = omega.structure().left.iter().map(|l| &q * l * &q_pinv).collect();
    Ok(GnsResult {
        hilbert_dim: r,
        rep,
        cyclic_vector,
        quotient_map: q,
        gram_rank_tol: threshold,
    })
}

fn frob_scale(rep: &[CMatrix]) -> f64 {
    rep.iter().map(|r| r.norm()).fold(1.0, f64::max)
}

/// Whether every `ρ_j*` lies in the linear span of the `ρ_j`.
fn is_star_closed(rep: &[CMatrix], tol: f64) -> Result<bool> {
    let cols: Vec<CVector> = rep.iter().map(linalg::vec_of).collect();
    let a = CMatrix::from_columns(&cols);
    let svd = nalgebra::SVD::try_new(a, true, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let u = svd.u.expect("requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-10 * smax)
        .collect();
    let range = CMatrix::from_fn(u.nrows(), keep.len(), |r, c| u[(r, keep[c])]);
    let scale = frob_scale(rep);
    Ok(rep.iter().all(|r| {
        let v = linalg::vec_of(&r.adjoint());
        (&v - &range * (range.adjoint() * &v)).norm() <= tol * scale
    }))
}

/// Orthonormal (Frobenius) basis of a reduced search space for the commutant.
///
/// Any matrix commuting with a normal `N` is block diagonal in the
/// eigenspaces of `N`. Candidates are the normal representatives and, for
/// *-closed sets, a fixed generic Hermitian combination
/// `Σ c_j ρ_j + conj(c_j) ρ_j*`; the one with the smallest block space is
/// used. Eigenvalue clusters are taken generously, which only enlarges the
/// search space.
fn commutant_search_space(rep: &[CMatrix], tol: f64) -> Result<CMatrix> {
    let d = rep[0].nrows();
    let mut generic = CMatrix::zeros(d, d);
    for (j, r) in rep.iter().enumerate() {
        let c = Complex64::from_polar(1.0 + 0.5 * (1.3 * j as f64).sin(), 2.399_963 * j as f64 + 0.7);
        generic += r * c + r.adjoint() * c.conj();
    }
    let generic = is_star_closed(rep, tol)?.then_some(&generic);
    let mut best: Option<Vec<CMatrix>> = None;
    for r in generic.into_iter().chain(rep) {
        let el = AlgebraElement::new(r.clone())?;
        let scale = r.norm().max(1.0);
        if (r * r.adjoint() - r.adjoint() * r).norm() > tol * scale * scale {
            continue;
        }
        let spaces = match crate::spectral::eigenspaces(&el, 1e-6) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let size: usize = spaces.iter().map(|s| s.multiplicity().pow(2)).sum();
        if best
            .as_ref()
            .is_none_or(|b| size < b.iter().map(|v| v.ncols().pow(2)).sum())
        {
            best = Some(spaces.into_iter().map(|s| s.vectors).collect());
        }
    }
    let Some(blocks) = best else {
        return Ok(CMatrix::identity(d * d, d * d));
    };
    let mut cols: Vec<CVector> = Vec::new();
    for v in &blocks {
        for a in 0..v.ncols() {
            for b in 0..v.ncols() {
                let m = v.column(a) * v.column(b).adjoint();
                cols.push(linalg::vec_of(&m));
            }
        }
    }
    Ok(CMatrix::from_columns(&cols))
}

/// Orthonormal basis of `{M : M ρ_j = ρ_j M for all j}`.
///
/// Solves the stacked Sylvester system `ρ_j M − M ρ_j = 0` restricted to a
/// search space that already contains the commutant. A direction is kept when
/// its singular value is at most `tol·max(1, max_j ‖ρ_j‖_F)`.
pub fn commutant(rep: &[CMatrix], tol: f64) -> Result<Vec<CMatrix>> {
    let first = rep
        .first()
        .ok_or_else(|| Error::InvalidInput("empty representation".into()))?;
    let d = first.nrows();
    if rep.iter().any(|r| r.nrows() != d || r.ncols() != d) {
        return Err(Error::shape(format!("{d}x{d} matrices"), "mixed sizes"));
    }
    let space = commutant_search_space(rep, tol)?;
    let p = space.ncols();
    let basis_mats: Vec<CMatrix> = (0..p)
        .map(|c| linalg::unvec(&space.column(c).into_owned(), d, d))
        .collect();
    let dd = d * d;
    let mut k = CMatrix::zeros(rep.len() * dd, p);
    for (j, r) in rep.iter().enumerate() {
        for (c, m) in basis_mats.iter().enumerate() {
            k.view_mut((j * dd, c), (dd, 1))
                .copy_from(&linalg::vec_of(&(r * m - m * r)));
        }
    }
    let null = linalg::null_space(&k, tol * frob_scale(rep))?;
    let out = (0..null.ncols())
        .map(|c| linalg::unvec(&(&space * null.column(c)), d, d))
        .collect();
    Ok(out)
}

/// Irreducible iff the commutant is one-dimensional (scalars only).
pub fn is_irreducible(rep: &[CMatrix], tol: f64) -> Result<bool> {
    Ok(commutant(rep, tol)?.len() == 1)
}

/// Basis of `{W : W ρ1_j = ρ2_j W}` (columns of vec(W)), or `None` when sizes disagree.
fn intertwiner_space(rep1: &[CMatrix], rep2: &[CMatrix], tol: f64) -> Result<Option<Vec<CMatrix>>> {
    if rep1.is_empty() || rep1.len() != rep2.len() {
        return Ok(None);
    }
    let d = rep1[0].nrows();
    if rep1.iter().chain(rep2).any(|r| r.nrows() != d || r.ncols() != d) {
        return Ok(None);
    }
    let dd = d * d;
    let mut k = CMatrix::zeros(rep1.len() * dd, dd);
    let id = CMatrix::identity(d, d);
    for (j, (r1, r2)) in rep1.iter().zip(rep2).enumerate() {
        // vec(W r1) = (r1ᵀ ⊗ I) vec W ; vec(r2 W) = (I ⊗ r2) vec W
        k.view_mut((j * dd, 0), (dd, dd))
            .copy_from(&(r1.transpose().kronecker(&id) - id.kronecker(r2)));
    }
    let scale = frob_scale(rep1).max(frob_scale(rep2));
    let null = linalg::null_space(&k, tol * scale)?;
    Ok(Some(
        (0..null.ncols())
            .map(|c| linalg::unvec(&null.column(c).into_owned(), d, d))
            .collect(),
    ))
}

fn max_intertwining_residual(u: &CMatrix, rep1: &[CMatrix], rep2: &[CMatrix]) -> f64 {
    rep1.iter()
        .zip(rep2)
        .map(|(r1, r2)| linalg::norm_or_frobenius(&(u * r1 - r2 * u)))
        .fold(0.0, f64::max)
}

/// A unitary `U` with `U ρ1(A_j) = ρ2(A_j) U` for all `j`, if one exists.
///
/// A generic combination of the intertwiner space is taken (fixed
/// coefficients, so the result is deterministic) and replaced by its unitary
/// polar factor, which is re-verified against `tol`.
pub fn find_intertwiner(rep1: &[CMatrix], rep2: &[CMatrix], tol: f64) -> Result<Option<CMatrix>> {
    let Some(space) = intertwiner_space(rep1, rep2, tol)? else {
        return Ok(None);
    };
    if space.is_empty() {
        return Ok(None);
    }
    let d = rep1[0].nrows();
    let mut w = CMatrix::zeros(d, d);
    for (i, t) in space.iter().enumerate() {
        let c = Complex64::from_polar(1.0 + 0.5 * (1.7 * i as f64).sin(), 2.399_963 * i as f64);
        w += t * c;
    }
    verified_polar(&w, rep1, rep2, tol)
}

/// The intertwiner fixed by also requiring `U ψ1 = ψ2` for cyclic vectors `ψ1`, `ψ2`.
///
/// Since an intertwiner is determined by its value on a cyclic vector, this
/// pins down the canonical unitary between two GNS representations of one state.
pub fn find_cyclic_intertwiner(
    rep1: &[CMatrix],
    psi1: &CVector,
    rep2: &[CMatrix],
    psi2: &CVector,
    tol: f64,
) -> Result<Option<CMatrix>> {
    let Some(space) = intertwiner_space(rep1, rep2, tol)? else {
        return Ok(None);
    };
    if space.is_empty() || psi1.len() != rep1[0].nrows() || psi2.len() != psi1.len() {
        return Ok(None);
    }
    let images: Vec<CVector> = space.iter().map(|t| t * psi1).collect();
    let a = CMatrix::from_columns(&images);
    let svd = nalgebra::linalg::SVD::try_new(a, true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let coeffs = svd.solve(psi2, 1e-12).map_err(|e| Error::Numerical(e.to_string()))?;
    let d = rep1[0].nrows();
    let mut w = CMatrix::zeros(d, d);
    for (t, c) in space.iter().zip(coeffs.iter()) {
        w += t * *c;
    }
    if (&w * psi1 - psi2).norm() > tol.sqrt() {
        return Ok(None);
    }
    verified_polar(&w, rep1, rep2, tol)
}

fn verified_polar(w: &CMatrix, rep1: &[CMatrix], rep2: &[CMatrix], tol: f64) -> Result<Option<CMatrix>> {
    let Some(u) = linalg::unitary_polar(w, 1e-8)? else {
        return Ok(None);
    };
    let scale = frob_scale(rep1).max(frob_scale(rep2));
    if max_intertwining_residual(&u, rep1, rep2) > tol * scale {
        return Ok(None);
    }
    Ok(Some(u))
}

/// `max_j ‖U ρ1_j − ρ2_j U‖`.
pub fn intertwining_residual(u: &CMatrix, rep1: &[CMatrix], rep2: &[CMatrix]) -> f64 {
    max_intertwining_residual(u, rep1, rep2)
}
