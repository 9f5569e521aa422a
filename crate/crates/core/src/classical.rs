//! Classical mechanics on flat phase space `R^{2n}` in canonical coordinates.
//!
//! Observables are real functions of `(q, p)`; the Poisson bracket is
//! `{A, B} = Σ_i ∂A/∂q_i ∂B/∂p_i − ∂A/∂p_i ∂B/∂q_i`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::shape(format!("{} momenta", q.len()), p.len()));
        }
        if q.iter().chain(&p).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("phase point has non-finite coordinates".into()));
        }
        Ok(Self { q, p })
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.q.len()
    }

    pub fn sup_norm(&self) -> f64 {
        self.q.iter().chain(&self.p).fold(0.0, |m, x| m.max(x.abs()))
    }
}

type Evaluator = Arc<dyn Fn(&PhasePoint) -> f64 + Send + Sync>;
type Gradient = Arc<dyn Fn(&PhasePoint) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// A real phase-space function with an optional analytic gradient `(∂/∂q, ∂/∂p)`.
#[derive(Clone)]
pub struct ClassicalObservable {
    evaluator: Evaluator,
    gradient: Option<Gradient>,
    label: String,
}

impl fmt::Debug for ClassicalObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalObservable")
            .field("label", &self.label)
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl ClassicalObservable {
    pub fn new(label: impl Into<String>, f: impl Fn(&PhasePoint) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            evaluator: Arc::new(f),
            gradient: None,
            label: label.into(),
        }
    }

    pub fn with_gradient(mut self, grad: impl Fn(&PhasePoint) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(grad));
        self
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c).with_gradient(|z| (vec![0.0; z.q.len()], vec![0.0; z.p.len()]))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, z: &PhasePoint) -> f64 {
        (self.evaluator)(z)
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// Pointwise product; the gradient follows the Leibniz rule when both factors have one.
    pub fn product(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let label = format!("({})({})", self.label, other.label);
        let prod = Self::new(label, move |z| a.eval(z) * b.eval(z));
        match (&self.gradient, &other.gradient) {
            (Some(ga), Some(gb)) => {
                let (ga, gb) = (ga.clone(), gb.clone());
                let (a, b) = (self.clone(), other.clone());
                prod.with_gradient(move |z| {
                    let (va, vb) = (a.eval(z), b.eval(z));
                    let (aq, ap) = ga(z);
                    let (bq, bp) = gb(z);
                    let comb = |x: &[f64], y: &[f64]| -> Vec<f64> {
                        x.iter().zip(y).map(|(dx, dy)| dx * vb + va * dy).collect()
                    };
                    (comb(&aq, &bq), comb(&ap, &bp))
                })
            }
            _ => prod,
        }
    }

    /// Partial derivatives at `z`, analytic when available, otherwise central differences with step `h`.
    pub fn gradient(&self, z: &PhasePoint, h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if let Some(g) = &self.gradient {
            let (gq, gp) = g(z);
            if gq.iter().chain(&gp).any(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("gradient of {} is not finite", self.label)));
            }
            return Ok((gq, gp));
        }
        let n = z.degrees_of_freedom();
        let mut gq = vec![0.0; n];
        let mut gp = vec![0.0; n];
        let mut probe = z.clone();
        for i in 0..n {
            gq[i] = self.central_difference(&mut probe, i, true, h)?;
            gp[i] = self.central_difference(&mut probe, i, false, h)?;
        }
        Ok((gq, gp))
    }

    fn central_difference(&self, probe: &mut PhasePoint, i: usize, in_q: bool, h: f64) -> Result<f64> {
        fn slot(p: &mut PhasePoint, i: usize, in_q: bool) -> &mut f64 {
            if in_q {
                &mut p.q[i]
            } else {
                &mut p.p[i]
            }
        }
        let orig = *slot(probe, i, in_q);
        *slot(probe, i, in_q) = orig + h;
        let fp = self.eval(probe);
        *slot(probe, i, in_q) = orig - h;
        let fm = self.eval(probe);
        *slot(probe, i, in_q) = orig;
        if !(fp.is_finite() && fm.is_finite()) {
            return Err(Error::Domain(format!(
                "{} is not finite near the evaluation point",
                self.label
            )));
        }
        Ok((fp - fm) / (2.0 * h))
    }
}

/// `Q(f)(q, p) = f(q)`.
pub fn config_observable(
    label: impl Into<String>,
    f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
) -> ClassicalObservable {
    ClassicalObservable::new(label, move |z| f(&z.q))
}

/// `P(v)(q, p) = Σ_a p_a v^a(q)`.
pub fn momentum_observable(
    label: impl Into<String>,
    v: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
) -> ClassicalObservable {
    ClassicalObservable::new(label, move |z| z.p.iter().zip(v(&z.q)).map(|(p, va)| p * va).sum())
}

/// Coordinate observable `q_i` with exact gradient.
pub fn coordinate(i: usize) -> ClassicalObservable {
    config_observable(format!("q{i}"), move |q| q[i]).with_gradient(move |z| {
        let mut gq = vec![0.0; z.q.len()];
        gq[i] = 1.0;
        (gq, vec![0.0; z.p.len()])
    })
}

/// Canonical momentum `p_i = P(∂_i)` with exact gradient.
pub fn canonical_momentum(i: usize) -> ClassicalObservable {
    momentum_observable(format!("p{i}"), move |q| {
        let mut v = vec![0.0; q.len()];
        v[i] = 1.0;
        v
    })
    .with_gradient(move |z| {
        let mut gp = vec![0.0; z.p.len()];
        gp[i] = 1.0;
        (vec![0.0; z.q.len()], gp)
    })
}

/// Default finite-difference step `1e-5·max(1, |z|_∞)`.
pub fn default_step(z: &PhasePoint) -> f64 {
    1e-5 * z.sup_norm().max(1.0)
}

pub fn poisson_bracket(a: &ClassicalObservable, b: &ClassicalObservable, z: &PhasePoint, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput("finite-difference step must be positive".into()));
    }
    let (aq, ap) = a.gradient(z, h)?;
    let (bq, bp) = b.gradient(z, h)?;
    Ok((0..z.degrees_of_freedom()).map(|i| aq[i] * bp[i] - ap[i] * bq[i]).sum())
}

/// Finitely supported probability measure on phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    atoms: Vec<(PhasePoint, f64)>,
}

impl ClassicalState {
    pub fn new(atoms: Vec<(PhasePoint, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidState("no atoms".into()));
        }
        if atoms.iter().any(|(_, w)| !(*w >= 0.0)) {
            return Err(Error::InvalidState("negative weight".into()));
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        Ok(Self { atoms })
    }

    /// Pure state concentrated at one phase point.
    pub fn point(z: PhasePoint) -> Self {
        Self { atoms: vec![(z, 1.0)] }
    }

    pub fn atoms(&self) -> &[(PhasePoint, f64)] {
        &self.atoms
    }

    pub fn is_pure(&self) -> bool {
        self.atoms.iter().filter(|(_, w)| *w > 0.0).count() == 1
    }
}

/// `Σ w_i A(z_i)`.
pub fn classical_expectation(omega: &ClassicalState, a: &ClassicalObservable) -> f64 {
    omega.atoms.iter().map(|(z, w)| w * a.eval(z)).sum()
}

/// `|ω(A_i A_j) − ω(A_i)ω(A_j)| < tol` for every pair.
pub fn is_dispersion_free(omega: &ClassicalState, observables: &[ClassicalObservable], tol: f64) -> bool {
    let means: Vec<f64> = observables.iter().map(|a| classical_expectation(omega, a)).collect();
    for i in 0..observables.len() {
        for j in i..observables.len() {
            let joint: f64 = omega
                .atoms
                .iter()
                .map(|(z, w)| w * observables[i].eval(z) * observables[j].eval(z))
                .sum();
            if (joint - means[i] * means[j]).abs() >= tol {
                return false;
            }
        }
    }
    true
}

type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// `H(q, p) = T(p) + V(q)` with gradients of both parts.
#[derive(Clone)]
pub struct SeparableHamiltonian {
    kinetic: ScalarField,
    kinetic_grad: VectorField,
    potential: ScalarField,
    potential_grad: VectorField,
}

impl fmt::Debug for SeparableHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SeparableHamiltonian")
    }
}

impl SeparableHamiltonian {
    pub fn new(
        kinetic: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        kinetic_grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        potential: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        potential_grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            kinetic: Arc::new(kinetic),
            kinetic_grad: Arc::new(kinetic_grad),
            potential: Arc::new(potential),
            potential_grad: Arc::new(potential_grad),
        }
    }

    /// `|p|²/2 + V(q)`.
    pub fn unit_mass(
        potential: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        potential_grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self::new(
            |p| p.iter().map(|x| x * x).sum::<f64>() / 2.0,
            |p| p.to_vec(),
            potential,
            potential_grad,
        )
    }

    pub fn free() -> Self {
        Self::unit_mass(|_| 0.0, |q| vec![0.0; q.len()])
    }

    /// `(|p|² + ω²|q|²)/2`.
    pub fn harmonic(omega: f64) -> Self {
        let w2 = omega * omega;
        Self::unit_mass(
            move |q| w2 * q.iter().map(|x| x * x).sum::<f64>() / 2.0,
            move |q| q.iter().map(|x| w2 * x).collect(),
        )
    }

    pub fn energy(&self, z: &PhasePoint) -> f64 {
        (self.kinetic)(&z.p) + (self.potential)(&z.q)
    }

    pub fn as_observable(&self) -> ClassicalObservable {
        let h = self.clone();
        let g = self.clone();
        ClassicalObservable::new("H", move |z| h.energy(z))
            .with_gradient(move |z| ((g.potential_grad)(&z.q), (g.kinetic_grad)(&z.p)))
    }

    fn force(&self, q: &[f64], step: usize) -> Result<Vec<f64>> {
        let f = (self.potential_grad)(q);
        if f.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite force at step {step}")));
        }
        Ok(f)
    }

    fn velocity(&self, p: &[f64], step: usize) -> Result<Vec<f64>> {
        let v = (self.kinetic_grad)(p);
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite velocity at step {step}")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    pub energies: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        self.points.last().expect("trajectory has at least the initial point")
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energies[0];
        self.energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }
}

fn leapfrog(h: &SeparableHamiltonian, z0: &PhasePoint, dt: f64, steps: usize) -> Result<Trajectory> {
    let mut q = z0.q.clone();
    let mut p = z0.p.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut energies = Vec::with_capacity(steps + 1);
    times.push(0.0);
    points.push(z0.clone());
    energies.push(h.energy(z0));
    let mut force = h.force(&q, 0)?;
    for step in 1..=steps {
        // kick, drift, kick
        for (pi, fi) in p.iter_mut().zip(&force) {
            *pi -= 0.5 * dt * fi;
        }
        let v = h.velocity(&p, step)?;
        for (qi, vi) in q.iter_mut().zip(&v) {
            *qi += dt * vi;
        }
        force = h.force(&q, step)?;
        for (pi, fi) in p.iter_mut().zip(&force) {
            *pi -= 0.5 * dt * fi;
        }
        let z = PhasePoint {
            q: q.clone(),
            p: p.clone(),
        };
        times.push(step as f64 * dt);
        energies.push(h.energy(&z));
        points.push(z);
    }
    Ok(Trajectory {
        times,
        points,
        energies,
    })
}

/// Störmer–Verlet trajectory with `steps + 1` points, starting at `z0`.
pub fn hamilton_flow(h: &SeparableHamiltonian, z0: &PhasePoint, dt: f64, steps: usize) -> Result<Trajectory> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput("dt must be positive".into()));
    }
    leapfrog(h, z0, dt, steps)
}

/// The same integrator run with `-dt`; it inverts [`hamilton_flow`] step by step.
pub fn hamilton_flow_backward(h: &SeparableHamiltonian, z0: &PhasePoint, dt: f64, steps: usize) -> Result<Trajectory> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput("dt must be positive".into()));
    }
    leapfrog(h, z0, -dt, steps)
}

/// `L_v f = v·∇f` at `q`, by central differences.
pub fn lie_derivative_scalar(v: &dyn Fn(&[f64]) -> Vec<f64>, f: &dyn Fn(&[f64]) -> f64, q: &[f64], h: f64) -> f64 {
    let dir = v(q);
    let mut plus = q.to_vec();
    let mut minus = q.to_vec();
    for i in 0..q.len() {
        plus[i] += h * dir[i];
        minus[i] -= h * dir[i];
    }
    (f(&plus) - f(&minus)) / (2.0 * h)
}

/// `L_{v1} v2 = (v1·∇)v2 − (v2·∇)v1` at `q`, by central differences.
pub fn lie_bracket_fields(
    v1: &dyn Fn(&[f64]) -> Vec<f64>,
    v2: &dyn Fn(&[f64]) -> Vec<f64>,
    q: &[f64],
    h: f64,
) -> Vec<f64> {
    let directional = |v: &dyn Fn(&[f64]) -> Vec<f64>, w: &dyn Fn(&[f64]) -> Vec<f64>| -> Vec<f64> {
        let dir = v(q);
        let plus: Vec<f64> = q.iter().zip(&dir).map(|(x, d)| x + h * d).collect();
        let minus: Vec<f64> = q.iter().zip(&dir).map(|(x, d)| x - h * d).collect();
        w(&plus)
            .iter()
            .zip(w(&minus))
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect()
    };
    let a = directional(v1, v2);
    let b = directional(v2, v1);
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
