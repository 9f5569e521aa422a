//! Spectra of normal elements, functional calculus, and the spectral
//! probability measure `μ_{ω,A}` whose mean is `ω(A)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::operator_core::{classify, operator_norm, AlgebraElement};
use crate::states::DensityState;

/// Default relative clustering tolerance for degenerate eigenvalues.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
const CLUSTER_FLOOR: f64 = 1e-12;

/// One eigenvalue cluster: its mean eigenvalue and the orthonormal eigenvectors spanning it.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub lambda: Complex64,
    pub vectors: CMatrix,
}

impl Eigenspace {
    pub fn projection(&self) -> CMatrix {
        &self.vectors * self.vectors.adjoint()
    }

    pub fn multiplicity(&self) -> usize {
        self.vectors.ncols()
    }
}

fn absolute_tol(norm: f64, tol: f64) -> f64 {
    (tol * norm).max(CLUSTER_FLOOR)
}

/// Clustered eigenspaces of a normal element.
///
/// Eigenvalues closer than `tol·‖A‖` (single linkage) share one eigenspace,
/// represented by their multiplicity-weighted mean.
pub fn eigenspaces(a: &AlgebraElement, tol: f64) -> Result<Vec<Eigenspace>> {
    if tol <= 0.0 {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    let norm = operator_norm(a)?;
    let abs_tol = absolute_tol(norm, tol);
    if !classify(a, abs_tol.max(norm * norm * tol)).normal {
        return Err(Error::InvalidInput(
            "spectral calculus requires a normal element".into(),
        ));
    }
    let (vals, vecs) = linalg::normal_eigen(a.matrix(), abs_tol)?;
    let n = vals.len();

    // Union-find style single-linkage clustering in the complex plane.
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (vals[i] - vals[j]).norm() <= abs_tol {
                let (ri, rj) = (root(&mut label, i), root(&mut label, j));
                if ri != rj {
                    label[rj] = ri;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = root(&mut label, i);
        match groups.iter_mut().find(|(g, _)| *g == r) {
            Some((_, members)) => members.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    let mut spaces: Vec<Eigenspace> = groups
        .into_iter()
        .map(|(_, members)| {
            let lambda = members.iter().map(|&i| vals[i]).sum::<Complex64>() / members.len() as f64;
            let vectors = CMatrix::from_fn(n, members.len(), |r, c| vecs[(r, members[c])]);
            Eigenspace { lambda, vectors }
        })
        .collect();
    spaces.sort_by(|x, y| {
        x.lambda
            .re
            .total_cmp(&y.lambda.re)
            .then(x.lambda.im.total_cmp(&y.lambda.im))
    });
    Ok(spaces)
}

/// Distinct eigenvalues of a normal element after degeneracy clustering.
///
/// For self-adjoint input the imaginary parts are set to zero.
pub fn spectrum(a: &AlgebraElement, tol: f64) -> Result<Vec<Complex64>> {
    let selfadjoint = classify(a, 1e-10 * a.frobenius_norm().max(1.0)).selfadjoint;
    Ok(eigenspaces(a, tol)?
        .into_iter()
        .map(|s| {
            if selfadjoint {
                Complex64::new(s.lambda.re, 0.0)
            } else {
                s.lambda
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "crate::io::complex_pair")]
    pub lambda: Complex64,
    pub weight: f64,
}

/// Finitely supported probability measure on the spectrum of a normal element.
///
/// On the wire only the atom list is written, as `[{"lambda": [re, im], "weight": w}, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    pub atoms: Vec<Atom>,
    pub source_dim: usize,
}

impl SpectralMeasure {
    /// `∫ λ^k dμ`.
    pub fn moment(&self, k: u32) -> Complex64 {
        self.atoms.iter().map(|a| a.lambda.powu(k) * a.weight).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).fold(0.0, f64::max)
    }

    /// Atoms with weight above `tol`.
    pub fn support(&self, tol: f64) -> Vec<Complex64> {
        self.atoms.iter().filter(|a| a.weight > tol).map(|a| a.lambda).collect()
    }
}

/// `μ_{ω,A}`: weight `tr(b P_k)` on each clustered eigenvalue `λ_k`.
///
/// Weights are clipped to `[0, 1]`; they are renormalized only when their sum
/// is within `1e-8` of one, otherwise an error is returned.
pub fn spectral_measure(omega: &DensityState, a: &AlgebraElement, tol: f64) -> Result<SpectralMeasure> {
    if omega.dim() != a.dim() {
        return Err(Error::shape(format!("dim {}", omega.dim()), format!("dim {}", a.dim())));
    }
    let selfadjoint = classify(a, 1e-10 * a.frobenius_norm().max(1.0)).selfadjoint;
    let b = omega.matrix();
    let mut atoms: Vec<Atom> = eigenspaces(a, tol)?
        .into_iter()
        .map(|s| {
            let weight: f64 = (0..s.multiplicity())
                .map(|c| {
                    let v = s.vectors.column(c);
                    (v.adjoint() * b * v)[(0, 0)].re
                })
                .sum();
            let lambda = if selfadjoint {
                Complex64::new(s.lambda.re, 0.0)
            } else {
                s.lambda
            };
            Atom {
                lambda,
                weight: weight.clamp(0.0, 1.0),
            }
        })
        .collect();
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    if (total - 1.0).abs() >= 1e-8 {
        return Err(Error::Numerical(format!("spectral weights sum to {total}")));
    }
    for atom in &mut atoms {
        atom.weight /= total;
    }
    Ok(SpectralMeasure {
        atoms,
        source_dim: a.dim(),
    })
}

/// `f(A)` for normal `A`, by applying `f` to the eigenvalues in the eigenbasis.
pub fn apply_function<F>(f: F, a: &AlgebraElement) -> Result<AlgebraElement>
where
    F: Fn(Complex64) -> Complex64,
{
    let n = a.dim();
    let mut out = CMatrix::zeros(n, n);
    for space in eigenspaces(a, DEFAULT_CLUSTER_TOL)? {
        let fl = f(space.lambda);
        if !(fl.re.is_finite() && fl.im.is_finite()) {
            return Err(Error::Domain(format!("f is not finite at eigenvalue {}", space.lambda)));
        }
        out += space.projection() * fl;
    }
    AlgebraElement::new(out)
}

/// Dirac-measure test: the measure has an atom of weight above `1 - tol`.
pub fn is_dirac(measure: &SpectralMeasure, tol: f64) -> bool {
    measure.max_weight() > 1.0 - tol
}

/// Eigenvector expansion helper for vector states.
pub fn vector_weights(psi: &CVector, a: &AlgebraElement, tol: f64) -> Result<SpectralMeasure> {
    spectral_measure(&DensityState::from_vector(psi)?, a, tol)
}
