//! Quantum time evolution on the periodic grid and on a radial grid.
//!
//! `Ĥ = P̂²/2 + V(X̂)` with the grid operators of [`crate::weyl`]. States
//! evolve as `ψ(t) = e^{-itĤ}ψ0`; observables as `A(t) = e^{itĤ}A0e^{-itĤ}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::operator_core::AlgebraElement;
use crate::weyl::{fourier_multiplier_matrix, Fourier, Grid1D, WaveFunction};

/// Norm drift tolerated by the split-operator stepper before it gives up.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// Catalog of one-dimensional potentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialSpec", into = "PotentialSpec")]
pub enum Potential {
    Free,
    /// `ω² x² / 2`
    Harmonic {
        omega: f64,
    },
    /// `λ x⁴`
    Quartic {
        lambda: f64,
    },
    /// `0` for `|x| < width/2`, `height` outside.
    FiniteWell {
        width: f64,
        height: f64,
    },
    /// `-Z/|x|`; singular at the origin, meant for the radial grid.
    CoulombRadial {
        charge: f64,
    },
}

/// Wire form `{name, params}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub name: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

fn param(spec: &PotentialSpec, key: &str, default: Option<f64>) -> std::result::Result<f64, String> {
    match spec.params.get(key) {
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("potential '{}': parameter '{key}' must be a finite number", spec.name)),
        None => default.ok_or_else(|| format!("potential '{}': missing parameter '{key}'", spec.name)),
    }
}

impl TryFrom<PotentialSpec> for Potential {
    type Error = String;

    fn try_from(spec: PotentialSpec) -> std::result::Result<Self, String> {
        let allowed: &[&str] = match spec.name.as_str() {
            "free" => &[],
            "harmonic" => &["omega"],
            "quartic" => &["lambda"],
            "finite_well" => &["width", "height"],
            "coulomb_radial" => &["charge"],
            other => {
                return Err(format!(
                    "unknown potential '{other}' (expected free, harmonic, quartic, finite_well, coulomb_radial)"
                ))
            }
        };
        if let Some(k) = spec.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(format!("potential '{}': unknown parameter '{k}'", spec.name));
        }
        let p = match spec.name.as_str() {
            "free" => Potential::Free,
            "harmonic" => Potential::Harmonic {
                omega: param(&spec, "omega", Some(1.0))?,
            },
            "quartic" => Potential::Quartic {
                lambda: param(&spec, "lambda", Some(1.0))?,
            },
            "finite_well" => Potential::FiniteWell {
                width: param(&spec, "width", None)?,
                height: param(&spec, "height", None)?,
            },
            _ => Potential::CoulombRadial {
                charge: param(&spec, "charge", Some(1.0))?,
            },
        };
        if let Potential::FiniteWell { width, .. } = p {
            if !(width > 0.0) {
                return Err("potential 'finite_well': width must be positive".into());
            }
        }
        Ok(p)
    }
}

impl From<Potential> for PotentialSpec {
    fn from(p: Potential) -> Self {
        let (name, params): (&str, Vec<(&str, f64)>) = match p {
            Potential::Free => ("free", vec![]),
            Potential::Harmonic { omega } => ("harmonic", vec![("omega", omega)]),
            Potential::Quartic { lambda } => ("quartic", vec![("lambda", lambda)]),
            Potential::FiniteWell { width, height } => ("finite_well", vec![("width", width), ("height", height)]),
            Potential::CoulombRadial { charge } => ("coulomb_radial", vec![("charge", charge)]),
        };
        PotentialSpec {
            name: name.into(),
            params: params
                .into_iter()
                .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                .collect(),
        }
    }
}

impl Potential {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } => 0.5 * omega * omega * x * x,
            Potential::Quartic { lambda } => lambda * x.powi(4),
            Potential::FiniteWell { width, height } => {
                if x.abs() < 0.5 * width {
                    0.0
                } else {
                    height
                }
            }
            Potential::CoulombRadial { charge } => -charge / x.abs(),
        }
    }

    /// `V'(x)` for the smooth members of the catalog.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match *self {
            Potential::Free => Some(0.0),
            Potential::Harmonic { omega } => Some(omega * omega * x),
            Potential::Quartic { lambda } => Some(4.0 * lambda * x.powi(3)),
            Potential::FiniteWell { .. } | Potential::CoulombRadial { .. } => None,
        }
    }

    pub fn samples(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        let v: Vec<f64> = grid.points().into_iter().map(|x| self.value(x)).collect();
        if let Some(j) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("potential is not finite at x = {}", grid.x(j))));
        }
        Ok(v)
    }
}

/// `P̂²/2 + diag(V(x_j))`.
pub fn build_hamiltonian(grid: &Grid1D, v: impl Fn(f64) -> f64) -> Result<AlgebraElement> {
    let vals: Vec<f64> = grid.points().into_iter().map(v).collect();
    if let Some(j) = vals.iter().position(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("potential is not finite at x = {}", grid.x(j))));
    }
    let kinetic = fourier_multiplier_matrix(grid, |k| Complex64::new(0.5 * k * k, 0.0));
    let mut h = kinetic.into_matrix();
    for (j, vj) in vals.iter().enumerate() {
        h[(j, j)] += vj;
    }
    AlgebraElement::new(linalg::hermitian_part(&h))
}

pub fn build_hamiltonian_for(grid: &Grid1D, potential: &Potential) -> Result<AlgebraElement> {
    build_hamiltonian(grid, |x| potential.value(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SplitOperator,
    ExactDiagonalization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    pub method: Method,
    pub potential: Potential,
    /// Record a sample every this many steps (0: only the endpoints).
    #[serde(default)]
    pub sample_every: usize,
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_final: f64, method: Method, potential: Potential) -> Self {
        Self {
            dt,
            t_final,
            method,
            potential,
            sample_every: 0,
        }
    }

    pub fn with_sampling(mut self, every: usize) -> Self {
        self.sample_every = every;
        self
    }

    /// Number of steps and the step actually used; `steps · step = t_final`.
    pub fn schedule(&self) -> Result<(usize, f64)> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidInput(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "t_final = {} must be non-negative",
                self.t_final
            )));
        }
        if self.t_final == 0.0 {
            return Ok((0, self.dt));
        }
        let steps = ((self.t_final / self.dt).round() as usize).max(1);
        Ok((steps, self.t_final / steps as f64))
    }
}

/// Observables recorded along a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub energy: f64,
    pub norm: f64,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub final_state: WaveFunction,
    pub samples: Vec<Sample>,
    pub steps: usize,
    pub step: f64,
}

impl Evolution {
    pub fn max_norm_drift(&self) -> f64 {
        let n0 = self.samples[0].norm;
        self.samples.iter().map(|s| (s.norm - n0).abs()).fold(0.0, f64::max)
    }

    pub fn max_relative_energy_drift(&self) -> f64 {
        let e0 = self.samples[0].energy;
        let scale = e0.abs().max(f64::MIN_POSITIVE);
        self.samples
            .iter()
            .map(|s| (s.energy - e0).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// Grid observables shared by both evolution methods.
struct GridObservables {
    fourier: Fourier,
    v: Vec<f64>,
}

impl GridObservables {
    fn new(grid: Grid1D, potential: &Potential) -> Result<Self> {
        Ok(Self {
            fourier: Fourier::new(grid),
            v: potential.samples(&grid)?,
        })
    }

    fn sample(&self, t: f64, psi: &[Complex64]) -> Sample {
        let grid = self.fourier.grid();
        let dx = grid.dx();
        let mut spectrum = psi.to_vec();
        self.fourier.forward(&mut spectrum);
        // Parseval: Σ_j |ψ_j|² = (1/N) Σ_m |ψ̂_m|²
        let scale = dx / grid.len() as f64;
        let k = self.fourier.frequencies();
        let mut mean_p = 0.0;
        let mut kinetic = 0.0;
        for (z, &km) in spectrum.iter().zip(k) {
            let w = z.norm_sqr() * scale;
            mean_p += km * w;
            kinetic += 0.5 * km * km * w;
        }
        let mut norm2 = 0.0;
        let mut mean_x = 0.0;
        let mut potential = 0.0;
        for (j, z) in psi.iter().enumerate() {
            let w = z.norm_sqr() * dx;
            norm2 += w;
            mean_x += grid.x(j) * w;
            potential += self.v[j] * w;
        }
        Sample {
            t,
            mean_x,
            mean_p,
            energy: kinetic + potential,
            norm: norm2.sqrt(),
        }
    }
}

/// `e^{-iVτ/2} F⁻¹ e^{-ik²τ/2} F e^{-iVτ/2}`.
struct StrangStepper {
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
}

impl StrangStepper {
    fn new(obs: &GridObservables, tau: f64) -> Self {
        Self {
            half_potential: obs
                .v
                .iter()
                .map(|&v| Complex64::from_polar(1.0, -0.5 * v * tau))
                .collect(),
            kinetic: obs
                .fourier
                .frequencies()
                .iter()
                .map(|&k| Complex64::from_polar(1.0, -0.5 * k * k * tau))
                .collect(),
        }
    }

    fn step(&self, fourier: &Fourier, psi: &mut [Complex64]) {
        psi.iter_mut().zip(&self.half_potential).for_each(|(z, p)| *z *= p);
        fourier.forward(psi);
        psi.iter_mut().zip(&self.kinetic).for_each(|(z, p)| *z *= p);
        fourier.inverse(psi);
        psi.iter_mut().zip(&self.half_potential).for_each(|(z, p)| *z *= p);
    }
}

/// Eigen-decomposition `H = W diag(E) W*` reused for any time.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    pub energies: Vec<f64>,
    pub vectors: CMatrix,
}

impl SpectralPropagator {
    pub fn new(h: &AlgebraElement) -> Result<Self> {
        let scale = h.frobenius_norm().max(1.0);
        if (h.matrix() - h.matrix().adjoint()).norm() > 1e-10 * scale {
            return Err(Error::InvalidObservable("Hamiltonian is not self-adjoint".into()));
        }
        let (energies, vectors) = if h.is_real(1e-14 * scale) {
            let (e, w) = linalg::real_symmetric_eigen(&h.real_part())?;
            (e, w.map(|x| Complex64::new(x, 0.0)))
        } else {
            linalg::hermitian_eigen(h.matrix())?
        };
        Ok(Self { energies, vectors })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    fn phases(&self, t: f64) -> Vec<Complex64> {
        self.energies
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * t))
            .collect()
    }

    /// `e^{-itH} v`.
    pub fn apply(&self, t: f64, v: &CVector) -> CVector {
        let mut c = self.vectors.adjoint() * v;
        c.iter_mut().zip(self.phases(t)).for_each(|(z, p)| *z *= p);
        &self.vectors * c
    }

    /// The dense unitary `e^{-itH}`.
    pub fn unitary(&self, t: f64) -> CMatrix {
        let phases = self.phases(t);
        let mut scaled = self.vectors.clone();
        for (mut col, p) in scaled.column_iter_mut().zip(&phases) {
            col *= *p;
        }
        scaled * self.vectors.adjoint()
    }

    /// `e^{itH} A e^{-itH}`.
    pub fn heisenberg(&self, t: f64, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.dim() != self.dim() {
            return Err(Error::shape(self.dim(), a.dim()));
        }
        if t == 0.0 {
            return Ok(a.clone());
        }
        let u = self.unitary(t);
        AlgebraElement::new(u.adjoint() * a.matrix() * u)
    }
}

fn check_normalized(psi: &WaveFunction) -> Result<()> {
    let n = psi.norm();
    if (n - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidState(format!(
            "initial wave function has norm {n}, expected 1"
        )));
    }
    Ok(())
}

fn wants_sample(cfg: &EvolutionConfig, step: usize, steps: usize) -> bool {
    step == steps || (cfg.sample_every > 0 && step.is_multiple_of(cfg.sample_every))
}

pub fn evolve_schrodinger(psi0: &WaveFunction, cfg: &EvolutionConfig) -> Result<Evolution> {
    check_normalized(psi0)?;
    let (steps, tau) = cfg.schedule()?;
    let grid = psi0.grid();
    let obs = GridObservables::new(grid, &cfg.potential)?;
    let mut samples = vec![obs.sample(0.0, psi0.samples())];
    if steps == 0 {
        return Ok(Evolution {
            final_state: psi0.clone(),
            samples,
            steps,
            step: tau,
        });
    }
    let final_state = match cfg.method {
        Method::SplitOperator => {
            let stepper = StrangStepper::new(&obs, tau);
            let mut psi = psi0.samples().to_vec();
            let n0 = samples[0].norm;
            for step in 1..=steps {
                stepper.step(&obs.fourier, &mut psi);
                let norm = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx()).sqrt();
                if !norm.is_finite() || (norm - n0).abs() > NORM_DRIFT_LIMIT {
                    return Err(Error::Instability {
                        step,
                        detail: format!("norm drifted to {norm}"),
                    });
                }
                if wants_sample(cfg, step, steps) {
                    samples.push(obs.sample(step as f64 * tau, &psi));
                }
            }
            WaveFunction::new(grid, psi)?
        }
        Method::ExactDiagonalization => {
            let h = build_hamiltonian_for(&grid, &cfg.potential)?;
            let prop = SpectralPropagator::new(&h)?;
            let v0 = psi0.to_unit_vector();
            let c0 = prop.vectors.adjoint() * &v0;
            let at = |t: f64| -> CVector {
                let mut c = c0.clone();
                c.iter_mut().zip(prop.phases(t)).for_each(|(z, p)| *z *= p);
                &prop.vectors * c
            };
            for step in 1..steps {
                if wants_sample(cfg, step, steps) {
                    let t = step as f64 * tau;
                    let psi = WaveFunction::from_unit_vector(grid, &at(t))?;
                    samples.push(obs.sample(t, psi.samples()));
                }
            }
            let psi = WaveFunction::from_unit_vector(grid, &at(cfg.t_final))?;
            samples.push(obs.sample(cfg.t_final, psi.samples()));
            psi
        }
    };
    Ok(Evolution {
        final_state,
        samples,
        steps,
        step: tau,
    })
}

/// `A(t) = e^{itH} A0 e^{-itH}`.
pub fn evolve_heisenberg(a0: &AlgebraElement, h: &AlgebraElement, t: f64) -> Result<AlgebraElement> {
    if a0.dim() != h.dim() {
        return Err(Error::shape(h.dim(), a0.dim()));
    }
    if t == 0.0 {
        return Ok(a0.clone());
    }
    SpectralPropagator::new(h)?.heisenberg(t, a0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PictureGap {
    #[serde(with = "crate::io::complex_pair")]
    pub schrodinger_value: Complex64,
    #[serde(with = "crate::io::complex_pair")]
    pub heisenberg_value: Complex64,
    pub gap: f64,
}

/// Compares `⟨ψ(t)|A0 ψ(t)⟩` with `⟨ψ0|A(t) ψ0⟩`, both from one eigen-decomposition of `H`.
pub fn picture_equivalence_check(
    psi0: &CVector,
    a0: &AlgebraElement,
    h: &AlgebraElement,
    t: f64,
) -> Result<PictureGap> {
    if psi0.len() != h.dim() || a0.dim() != h.dim() {
        return Err(Error::shape(
            h.dim(),
            format!("state {}, observable {}", psi0.len(), a0.dim()),
        ));
    }
    let prop = SpectralPropagator::new(h)?;
    let psi_t = if t == 0.0 { psi0.clone() } else { prop.apply(t, psi0) };
    let s = (psi_t.adjoint() * a0.matrix() * &psi_t)[(0, 0)];
    let at = prop.heisenberg(t, a0)?;
    let hv = (psi0.adjoint() * at.matrix() * psi0)[(0, 0)];
    Ok(PictureGap {
        schrodinger_value: s,
        heisenberg_value: hv,
        gap: (s - hv).norm(),
    })
}

/// Lowest `k` eigenvalues, ascending.
pub fn eigen_spectrum(h: &AlgebraElement, k: usize) -> Result<Vec<f64>> {
    if k > h.dim() {
        return Err(Error::InvalidInput(format!(
            "requested {k} eigenvalues of a {}-dimensional matrix",
            h.dim()
        )));
    }
    let scale = h.frobenius_norm().max(1.0);
    let mut vals: Vec<f64> = if h.is_real(1e-14 * scale) {
        let m: DMatrix<f64> = h.real_part();
        ((&m + m.transpose()) * 0.5)
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .collect()
    } else {
        linalg::hermitian_part(h.matrix())
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .collect()
    };
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigensolver produced non-finite values".into()));
    }
    vals.sort_by(f64::total_cmp);
    vals.truncate(k);
    Ok(vals)
}

/// Interior points `r_i = i·dr`, `i = 1..M`, with `u(0) = u(r_max) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    r_max: f64,
    #[serde(rename = "M")]
    m: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, m: usize) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidInput(format!("r_max = {r_max} must be positive")));
        }
        if m < 16 {
            return Err(Error::InvalidInput(format!(
                "radial grid needs at least 16 points, got {m}"
            )));
        }
        Ok(Self { r_max, m })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        self.r_max / (self.m + 1) as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.dr()
    }
}

/// Symmetric tridiagonal matrix: `diag` and the constant off-diagonal `off`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: f64,
}

impl Tridiagonal {
    /// `-(1/2)u'' - Z u/r` with the three-point Laplacian.
    pub fn radial_coulomb(grid: &RadialGrid, charge: f64) -> Self {
        let h2 = grid.dr() * grid.dr();
        Self {
            diag: (0..grid.len()).map(|i| 1.0 / h2 - charge / grid.r(i)).collect(),
            off: -0.5 / h2,
        }
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let e2 = self.off * self.off;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + x.abs()).max(1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    /// The `j`-th eigenvalue (0-based, ascending) by bisection.
    pub fn eigenvalue(&self, j: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an (accurate) eigenvalue by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let mut x = vec![1.0; n];
        for _ in 0..3 {
            x = self.solve_shifted(lambda, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// Solves `(T - λ) y = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, lambda: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let tiny = f64::EPSILON * self.gershgorin().1.abs().max(1.0);
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - lambda).collect();
        let mut dl = vec![self.off; n.saturating_sub(1)];
        let mut du = vec![self.off; n.saturating_sub(1)];
        let mut du2 = vec![0.0; n.saturating_sub(1)];
        let mut y = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                d[i + 1] -= f * du[i];
                y[i + 1] -= f * y[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                let t = d[i + 1];
                d[i + 1] = du[i] - f * t;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du2[i];
                }
                du[i] = t;
                let t = y[i];
                y[i] = y[i + 1];
                y[i + 1] = t - f * y[i];
            }
            dl[i] = 0.0;
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= du[i] * y[i + 1];
            }
            if i + 2 < n {
                s -= du2[i] * y[i + 2];
            }
            y[i] = s / d[i];
        }
        y
    }
}

/// Lowest `k` eigenvalues of the `ℓ = 0` hydrogen radial operator.
pub fn radial_hydrogen_spectrum(grid: &RadialGrid, k: usize) -> Result<Vec<f64>> {
    if k > grid.len() {
        return Err(Error::InvalidInput(format!(
            "requested {k} eigenvalues on {} points",
            grid.len()
        )));
    }
    let t = Tridiagonal::radial_coulomb(grid, 1.0);
    Ok((0..k).map(|j| t.eigenvalue(j)).collect())
}

/// Sign changes of `u`, ignoring entries below `rel_tol·max|u|`.
pub fn count_nodes(u: &[f64], rel_tol: f64) -> usize {
    let peak = u.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &v in u {
        if v.abs() <= rel_tol * peak {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            nodes += 1;
        }
        last = v;
    }
    nodes
}

/// Time derivatives of `⟨X̂⟩` and `⟨P̂⟩` against the Ehrenfest right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EhrenfestReport {
    /// `max |d⟨X̂⟩/dt − ⟨P̂⟩|`.
    pub dx_dt_gap: f64,
    /// `max |d⟨P̂⟩/dt − s⟨V'(X̂)⟩|` for the better-matching sign `s`.
    pub dp_dt_gap: f64,
    /// The sign `s` that matched (`-1` for `d⟨P̂⟩/dt = −⟨V'⟩`).
    pub dp_dt_sign: i8,
    /// The gap obtained with the other sign.
    pub dp_dt_gap_other_sign: f64,
}

pub fn ehrenfest_check(psi0: &WaveFunction, cfg: &EvolutionConfig) -> Result<EhrenfestReport> {
    let grid = psi0.grid();
    let dv: Vec<f64> = grid
        .points()
        .into_iter()
        .map(|x| cfg.potential.derivative(x))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Precondition("Ehrenfest check needs a smooth potential".into()))?;
    check_normalized(psi0)?;
    let (steps, tau) = cfg.schedule()?;
    if steps < 2 {
        return Err(Error::InvalidInput("Ehrenfest check needs at least two steps".into()));
    }
    let obs = GridObservables::new(grid, &cfg.potential)?;
    let stepper = StrangStepper::new(&obs, tau);
    let mut psi = psi0.samples().to_vec();
    let mut xs = Vec::with_capacity(steps + 1);
    let mut ps = Vec::with_capacity(steps + 1);
    let mut forces = Vec::with_capacity(steps + 1);
    let dx = grid.dx();
    let mut record = |psi: &[Complex64]| {
        let s = obs.sample(0.0, psi);
        xs.push(s.mean_x);
        ps.push(s.mean_p);
        forces.push(psi.iter().zip(&dv).map(|(z, d)| z.norm_sqr() * d).sum::<f64>() * dx);
    };
    record(&psi);
    for _ in 0..steps {
        stepper.step(&obs.fourier, &mut psi);
        record(&psi);
    }
    let mut dx_gap: f64 = 0.0;
    let mut minus: f64 = 0.0;
    let mut plus: f64 = 0.0;
    for i in 1..steps {
        let dxdt = (xs[i + 1] - xs[i - 1]) / (2.0 * tau);
        let dpdt = (ps[i + 1] - ps[i - 1]) / (2.0 * tau);
        dx_gap = dx_gap.max((dxdt - ps[i]).abs());
        minus = minus.max((dpdt + forces[i]).abs());
        plus = plus.max((dpdt - forces[i]).abs());
    }
    let (dp_dt_gap, dp_dt_sign, other) = if minus <= plus {
        (minus, -1, plus)
    } else {
        (plus, 1, minus)
    };
    Ok(EhrenfestReport {
        dx_dt_gap: dx_gap,
        dp_dt_gap,
        dp_dt_sign,
        dp_dt_gap_other_sign: other,
    })
}
