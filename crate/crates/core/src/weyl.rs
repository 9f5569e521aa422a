//! Finite Weyl systems and the periodic-grid Schrödinger representation.
//!
//! Conventions (ħ = 1):
//! - `X̂` multiplies by `x_j`;
//! - `P̂ = -i d/dx`, realized as the Fourier multiplier by the signed
//!   frequency `k_m = 2π m / L`, `m ∈ [-N/2, N/2)`;
//! - `Û(α) = e^{iαX̂}` and `V̂(β) = e^{iβP̂}`, so `(V̂(β)ψ)(x) = ψ(x + β)`.
//!
//! With these choices `[P̂, X̂] = -i` in the continuum and
//! `Û(α)V̂(β) = V̂(β)Û(α)e^{-iαβ}`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, I, ONE, ZERO};
use crate::operator_core::{commutator, operator_norm, AlgebraElement};

/// Uniform periodic grid `x_j = -L/2 + j·dx`, `dx = L/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    length: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!("grid size {n} is not a power of two >= 2")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidInput(format!("grid length {length} must be positive")));
        }
        Ok(Self { n, length })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.length / 2.0 + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed angular frequencies in FFT order.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n as isize;
        (0..n)
            .map(|m| {
                let signed = if m < n / 2 { m } else { m - n };
                2.0 * PI * signed as f64 / self.length
            })
            .collect()
    }
}

/// Forward/inverse FFT pair for one grid; plans are immutable and shareable.
#[derive(Clone)]
pub struct Fourier {
    grid: Grid1D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl std::fmt::Debug for Fourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fourier").field("grid", &self.grid).finish()
    }
}

impl Fourier {
    pub fn new(grid: Grid1D) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.len()),
            inverse: planner.plan_fft_inverse(grid.len()),
            k: grid.frequencies(),
        }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.k
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Normalized inverse transform in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    /// `g(P̂)ψ` for a real multiplier `g(k)`.
    pub fn apply_multiplier(&self, samples: &[Complex64], g: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let mut buf = samples.to_vec();
        self.forward(&mut buf);
        buf.iter_mut().zip(&self.k).for_each(|(z, &k)| *z *= g(k));
        self.inverse(&mut buf);
        buf
    }

    pub fn apply_momentum(&self, samples: &[Complex64]) -> Vec<Complex64> {
        self.apply_multiplier(samples, |k| Complex64::new(k, 0.0))
    }
}

/// Samples of ψ on a grid; `‖ψ‖² = Σ|ψ_j|² dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid1D,
    samples: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::shape(grid.len(), samples.len()));
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("wave function has non-finite samples".into()));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect())
    }

    /// Normalized Gaussian packet `exp(-(x-x0)²/(4σ²) + i p0 x)`: `⟨X̂⟩ = x0`, `⟨P̂⟩ = p0`, `ΔX = σ`.
    pub fn gaussian(grid: Grid1D, x0: f64, p0: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidInput("sigma must be positive".into()));
        }
        let psi = Self::from_fn(grid, |x| {
            Complex64::from_polar((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), p0 * x)
        })?;
        psi.normalized()
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn norm(&self) -> f64 {
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput("cannot normalize zero wave function".into()));
        }
        Ok(Self {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z / n).collect(),
        })
    }

    /// `⟨self|other⟩ = Σ conj(ψ_j) φ_j dx`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dx()
    }

    /// Coordinate vector with unit Euclidean norm convention (`ψ_j √dx`).
    pub fn to_unit_vector(&self) -> CVector {
        let s = self.grid.dx().sqrt();
        CVector::from_iterator(self.samples.len(), self.samples.iter().map(|z| z * s))
    }

    pub fn from_unit_vector(grid: Grid1D, v: &CVector) -> Result<Self> {
        let s = 1.0 / grid.dx().sqrt();
        Self::new(grid, v.iter().map(|z| z * s).collect())
    }

    pub fn mean_position(&self) -> f64 {
        let dx = self.grid.dx();
        self.samples
            .iter()
            .enumerate()
            .map(|(j, z)| self.grid.x(j) * z.norm_sqr())
            .sum::<f64>()
            * dx
    }

    pub fn mean_momentum(&self, fourier: &Fourier) -> f64 {
        let p = fourier.apply_momentum(&self.samples);
        self.samples.iter().zip(&p).map(|(a, b)| (a.conj() * b).re).sum::<f64>() * self.grid.dx()
    }
}

/// Clock `U = diag(1, ζ, …, ζ^{n-1})` and cyclic shift `V e_k = e_{k+1}`, `ζ = e^{2πi/n}`.
#[derive(Debug, Clone)]
pub struct WeylPair {
    n: usize,
    u: AlgebraElement,
    v: AlgebraElement,
}

impl WeylPair {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn clock(&self) -> &AlgebraElement {
        &self.u
    }

    pub fn shift(&self) -> &AlgebraElement {
        &self.v
    }

    pub fn zeta(&self) -> Complex64 {
        root_of_unity(1, self.n)
    }

    /// `max |UV − ζ VU|` over entries.
    ///
    /// Both products share the sparsity pattern of `V` (one nonzero per row
    /// and column), so this is also the operator norm of the difference.
    pub fn relation_residual(&self) -> f64 {
        let n = self.n;
        let zeta = self.zeta();
        let u = self.u.matrix();
        let v = self.v.matrix();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let vjk = v[(j, k)];
                if vjk == ZERO {
                    continue;
                }
                let uv = u[(j, j)] * vjk;
                let vu = vjk * u[(k, k)];
                worst = worst.max((uv - zeta * vu).norm());
            }
        }
        worst
    }

    /// Dense check of the same relation, for cross-validation at small `n`.
    pub fn relation_residual_dense(&self) -> Result<f64> {
        let uv = self.u.matrix() * self.v.matrix();
        let vu = self.v.matrix() * self.u.matrix();
        linalg::spectral_norm(&(uv - vu * self.zeta()))
    }

    /// Max deviations of `U^n` and `V^n` from the identity, by repeated products.
    pub fn order_residuals(&self) -> (f64, f64) {
        let n = self.n;
        let id = CMatrix::identity(n, n);
        let power_dev = |m: &CMatrix| {
            let mut acc = id.clone();
            for _ in 0..n {
                acc = &acc * m;
            }
            (acc - &id).iter().map(|z| z.norm()).fold(0.0, f64::max)
        };
        (power_dev(self.u.matrix()), power_dev(self.v.matrix()))
    }
}

/// `e^{2πij/n}`; quarter turns are exact so that n = 2 and n = 4 carry no round-off.
fn root_of_unity(j: usize, n: usize) -> Complex64 {
    let j = j % n;
    if (4 * j).is_multiple_of(n) {
        [ONE, I, -ONE, -I][4 * j / n]
    } else {
        Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)
    }
}

pub fn clock_shift(n: usize) -> Result<WeylPair> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "clock/shift dimension {n} must be at least 2"
        )));
    }
    let diag: Vec<Complex64> = (0..n).map(|j| root_of_unity(j, n)).collect();
    let u = AlgebraElement::diagonal(&diag)?;
    let mut v = CMatrix::zeros(n, n);
    for k in 0..n {
        v[((k + 1) % n, k)] = ONE;
    }
    Ok(WeylPair {
        n,
        u,
        v: AlgebraElement::new(v)?,
    })
}

/// Site count of a lattice shift `β`, or an error if `β` is off the lattice.
pub fn lattice_shift(grid: &Grid1D, beta: f64) -> Result<isize> {
    let sites = beta / grid.dx();
    let rounded = sites.round();
    if (sites - rounded).abs() > 1e-9 * sites.abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "shift {beta} is not a multiple of dx = {}",
            grid.dx()
        )));
    }
    Ok(rounded as isize)
}

/// `Û(α)` (diagonal `e^{iαx_j}`) and `V̂(β)` (`(V̂ψ)_j = ψ_{j+β/dx}`, periodic).
pub fn grid_weyl_ops(grid: &Grid1D, alpha: f64, beta: f64) -> Result<(AlgebraElement, AlgebraElement)> {
    let shift = lattice_shift(grid, beta)?;
    let n = grid.len();
    let u: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, alpha * grid.x(j))).collect();
    let mut v = CMatrix::zeros(n, n);
    let s = shift.rem_euclid(n as isize) as usize;
    for j in 0..n {
        v[(j, (j + s) % n)] = ONE;
    }
    Ok((AlgebraElement::diagonal(&u)?, AlgebraElement::new(v)?))
}

/// `‖Û(α)V̂(β) − V̂(β)Û(α)e^{−iαβ}‖`.
pub fn grid_weyl_residual(grid: &Grid1D, alpha: f64, beta: f64) -> Result<f64> {
    let (u, v) = grid_weyl_ops(grid, alpha, beta)?;
    let lhs = u.matrix() * v.matrix();
    let rhs = v.matrix() * u.matrix() * Complex64::from_polar(1.0, -alpha * beta);
    linalg::spectral_norm(&(lhs - rhs))
}

pub fn build_position(grid: &Grid1D) -> AlgebraElement {
    AlgebraElement::real_diagonal(&grid.points()).expect("grid points are finite")
}

/// Circulant matrix `F⁻¹ diag(g(k)) F`.
pub fn fourier_multiplier_matrix(grid: &Grid1D, g: impl Fn(f64) -> Complex64) -> AlgebraElement {
    let fourier = Fourier::new(*grid);
    let mut col: Vec<Complex64> = fourier.frequencies().iter().map(|&k| g(k)).collect();
    // column[d] = (1/N) Σ_m g(k_m) e^{2πi m d/N}
    fourier.inverse(&mut col);
    let n = grid.len();
    let m = CMatrix::from_fn(n, n, |j, l| col[(j + n - l) % n]);
    AlgebraElement::new(m).expect("finite multiplier")
}

pub fn build_momentum(grid: &Grid1D) -> AlgebraElement {
    fourier_multiplier_matrix(grid, |k| Complex64::new(k, 0.0))
}

/// One `n` of the norm-growth demonstration built on `[P̂, X̂ⁿ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBound {
    pub n: u32,
    /// The continuum lower bound `n/2` on `‖X‖‖P‖`.
    pub lower_bound: f64,
    /// `‖[P̂, X̂ⁿ]‖ / (2‖X̂‖^{n−1})`, itself at most `‖X̂‖‖P̂‖`.
    pub commutator_ratio: f64,
}

/// Evidence that `[P, X] = -i` has no finite-dimensional realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    #[serde(with = "crate::io::complex_pair")]
    pub trace_of_commutator: Complex64,
    /// Value `[P̂, X̂]` approaches on smooth states: `-i` for `P̂ = -i d/dx`.
    #[serde(with = "crate::io::complex_pair")]
    pub canonical_value: Complex64,
    /// `max |([P̂,X̂] − c)ψ| / max|ψ|` over Gaussians localized in the middle half.
    pub interior_deviation: f64,
    /// Same for a Gaussian straddling the periodic seam at `±L/2`.
    pub boundary_deviation: f64,
    /// `‖[P̂,X̂] − c·I‖`; at least 1 since `tr(c·I) = cN` while `tr[P̂,X̂] = 0`.
    pub full_deviation: f64,
    pub norm_x: f64,
    pub norm_p: f64,
    pub norm_product: f64,
    pub bounds: Vec<NormBound>,
}

/// Width balancing spatial decay over `L/4` and spectral decay up to `π/dx`.
fn probe_width(grid: &Grid1D) -> f64 {
    (grid.length() * grid.length() / (4.0 * PI * grid.len() as f64)).sqrt()
}

fn probe(grid: &Grid1D, center: f64) -> CVector {
    let sigma = probe_width(grid);
    let l = grid.length();
    CVector::from_iterator(
        grid.len(),
        grid.points().into_iter().map(|x| {
            // periodic distance so a probe at the seam wraps around
            let d = (x - center + l / 2.0).rem_euclid(l) - l / 2.0;
            Complex64::new((-d * d / (2.0 * sigma * sigma)).exp(), 0.0)
        }),
    )
}

fn relative_deviation(defect: &CMatrix, psi: &CVector) -> f64 {
    let out = defect * psi;
    let peak = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    out.iter().map(|z| z.norm()).fold(0.0, f64::max) / peak
}

pub fn heisenberg_obstruction_report(grid: &Grid1D) -> Result<ObstructionReport> {
    let x = build_position(grid);
    let p = build_momentum(grid);
    let c = commutator(&p, &x)?;
    let canonical = -I;
    let n = grid.len();
    let defect = c.matrix() - CMatrix::identity(n, n) * canonical;
    let l = grid.length();

    let interior_deviation = [-l / 8.0, 0.0, l / 8.0]
        .iter()
        .map(|&c0| relative_deviation(&defect, &probe(grid, c0)))
        .fold(0.0, f64::max);
    let boundary_deviation = relative_deviation(&defect, &probe(grid, -l / 2.0));
    let full_deviation = linalg::spectral_norm(&defect)?;

    let norm_x = operator_norm(&x)?;
    let norm_p = operator_norm(&p)?;
    let mut bounds = Vec::with_capacity(10);
    let mut xn = CMatrix::identity(n, n);
    for k in 1..=10u32 {
        xn = &xn * x.matrix();
        let comm = p.matrix() * &xn - &xn * p.matrix();
        let ratio = linalg::spectral_norm(&comm)? / (2.0 * norm_x.powi(k as i32 - 1));
        bounds.push(NormBound {
            n: k,
            lower_bound: k as f64 / 2.0,
            commutator_ratio: ratio,
        });
    }

    Ok(ObstructionReport {
        trace_of_commutator: c.trace(),
        canonical_value: canonical,
        interior_deviation,
        boundary_deviation,
        full_deviation,
        norm_x,
        norm_p,
        norm_product: norm_x * norm_p,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_core::classify;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(Grid1D::new(100, 1.0).is_err());
        assert!(Grid1D::new(64, 0.0).is_err());
        let g = Grid1D::new(8, 4.0).unwrap();
        assert_eq!(g.dx() * g.len() as f64, g.length());
        assert_eq!(g.x(0), -2.0);
    }

    #[test]
    fn clock_shift_qubit_is_pauli_pair() {
        let w = clock_shift(2).unwrap();
        assert_eq!(w.clock(), &AlgebraElement::pauli_z());
        assert_eq!(w.shift(), &AlgebraElement::pauli_x());
        let zx = w.clock().matrix() * w.shift().matrix();
        let xz = w.shift().matrix() * w.clock().matrix();
        assert_eq!(zx, -xz);
        assert_eq!(w.relation_residual(), 0.0);
    }

    #[test]
    fn clock_shift_qutrit_relation() {
        let w = clock_shift(3).unwrap();
        assert!(w.relation_residual() < 1e-15);
        assert!(w.relation_residual_dense().unwrap() < 1e-15);
        let (du, dv) = w.order_residuals();
        assert!(du < 1e-12 && dv == 0.0);
    }

    #[test]
    fn clock_shift_is_unitary() {
        for n in [2, 5, 16] {
            let w = clock_shift(n).unwrap();
            let id = CMatrix::identity(n, n);
            assert!(close(&(w.clock().matrix() * w.clock().matrix().adjoint()), &id, 1e-15));
            assert!(close(&(w.shift().matrix() * w.shift().matrix().adjoint()), &id, 0.0));
            assert!(classify(w.clock(), 1e-12).unitary);
            assert!((operator_norm(w.clock()).unwrap() - 1.0).abs() < 1e-12);
            assert!((operator_norm(w.shift()).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(clock_shift(1).is_err());
    }

    #[test]
    fn grid_weyl_identity_at_zero() {
        let g = Grid1D::new(8, 2.0).unwrap();
        let (u, v) = grid_weyl_ops(&g, 0.0, 0.0).unwrap();
        assert_eq!(u, AlgebraElement::identity(8));
        assert_eq!(v, AlgebraElement::identity(8));
    }

    #[test]
    fn grid_weyl_relation_phase() {
        let g = Grid1D::new(8, 3.0).unwrap();
        let alpha = 2.0 * PI / g.length();
        let beta = g.dx();
        let (u, v) = grid_weyl_ops(&g, alpha, beta).unwrap();
        let uv = u.matrix() * v.matrix();
        let vu = v.matrix() * u.matrix();
        let phase = Complex64::from_polar(1.0, -2.0 * PI / 8.0);
        assert!(close(&uv, &(vu * phase), 1e-12));
        assert!(grid_weyl_residual(&g, 3.0 * alpha, -5.0 * beta).unwrap() < 1e-10);
    }

    #[test]
    fn grid_shift_composition_and_lattice_check() {
        let g = Grid1D::new(16, 4.0).unwrap();
        let dx = g.dx();
        let (_, v1) = grid_weyl_ops(&g, 0.0, 3.0 * dx).unwrap();
        let (_, v2) = grid_weyl_ops(&g, 0.0, -7.0 * dx).unwrap();
        let (_, v12) = grid_weyl_ops(&g, 0.0, -4.0 * dx).unwrap();
        assert_eq!(&v1 * &v2, v12);
        assert!(matches!(grid_weyl_ops(&g, 0.0, 0.3 * dx), Err(Error::InvalidInput(_))));
        // (V̂(β)ψ)(x) = ψ(x + β)
        let psi = CVector::from_iterator(16, g.points().into_iter().map(|x| Complex64::new(x, 0.0)));
        let shifted = v1.matrix() * &psi;
        assert!((shifted[0].re - g.x(3)).abs() < 1e-15);
    }

    #[test]
    fn position_on_delta() {
        let g = Grid1D::new(8, 4.0).unwrap();
        let x = build_position(&g);
        let mut delta = CVector::zeros(8);
        delta[5] = ONE;
        let out = x.matrix() * &delta;
        assert_eq!(out, &delta * Complex64::new(g.x(5), 0.0));
    }

    #[test]
    fn momentum_on_plane_waves() {
        let g = Grid1D::new(32, 2.0 * PI).unwrap();
        let p = build_momentum(&g);
        for m in [-5i32, 0, 3, 15] {
            let k = 2.0 * PI * m as f64 / g.length();
            let wave = CVector::from_iterator(32, g.points().into_iter().map(|x| Complex64::from_polar(1.0, k * x)));
            let out = p.matrix() * &wave;
            assert!((out - &wave * Complex64::new(k, 0.0)).norm() < 1e-9);
        }
        assert!(classify(&p, 1e-10).selfadjoint);
    }

    #[test]
    fn momentum_expectation_is_real() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = Grid1D::new(64, 10.0).unwrap();
        let p = build_momentum(&g);
        for _ in 0..5 {
            let v = crate::random::unit_vector(&mut rng, 64);
            let e = (v.adjoint() * p.matrix() * &v)[(0, 0)];
            assert!(e.im.abs() < 1e-12);
        }
    }

    #[test]
    fn fft_momentum_matches_matrix() {
        let g = Grid1D::new(32, 16.0).unwrap();
        let f = Fourier::new(g);
        let psi = WaveFunction::gaussian(g, 0.5, 1.5, 0.7).unwrap();
        let via_fft = f.apply_momentum(psi.samples());
        let via_matrix = build_momentum(&g).matrix() * CVector::from_column_slice(psi.samples());
        for (a, b) in via_fft.iter().zip(via_matrix.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((psi.mean_momentum(&f) - 1.5).abs() < 1e-6);
        assert!((psi.mean_position() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn obstruction_small_grid() {
        let g = Grid1D::new(64, 20.0).unwrap();
        let r = heisenberg_obstruction_report(&g).unwrap();
        assert!(r.trace_of_commutator.norm() < 1e-10);
        assert!(r.full_deviation >= 1.0);
        assert!(r.boundary_deviation > 1.0);
        assert_eq!(r.bounds.len(), 10);
        assert!(r
            .bounds
            .iter()
            .all(|b| b.commutator_ratio <= r.norm_product * (1.0 + 1e-9)));
    }
}
