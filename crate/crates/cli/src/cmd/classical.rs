use std::path::Path;

use qalgebra::classical::{
    canonical_momentum, config_observable, coordinate, default_step, hamilton_flow, momentum_observable,
    poisson_bracket, ClassicalObservable, PhasePoint, SeparableHamiltonian, Trajectory,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use crate::config::{load, require};
use crate::error::{context, CliResult};
use crate::output::{Checks, Outputs};
use crate::{seeds, Ctx, Report};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default = "default_points")]
    points: usize,
    /// Phase points are drawn from `[-box, box]⁶`.
    #[serde(default = "default_box", rename = "box")]
    half_width: f64,
    trajectory: Option<Orbit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Orbit {
    omega: f64,
    q0: Vec<f64>,
    p0: Vec<f64>,
    dt: f64,
    steps: usize,
    #[serde(default = "default_every")]
    sample_every: usize,
}

fn default_points() -> usize {
    100
}

fn default_box() -> f64 {
    2.0
}

fn default_every() -> usize {
    1
}

const BRACKET_TOL: f64 = 1e-6;
const CANONICAL_TOL: f64 = 1e-8;
const ENERGY_TOL: f64 = 1e-4;

fn f(q: &[f64]) -> f64 {
    q[0] * q[0] * q[1] + q[2].sin()
}

fn g(q: &[f64]) -> f64 {
    q[1] * q[2].exp()
}

fn v1(q: &[f64]) -> Vec<f64> {
    vec![q[1], -q[0], 0.0]
}

fn v2(q: &[f64]) -> Vec<f64> {
    vec![0.0, q[2] * q[2], q[0]]
}

/// `L_{v2} f = v2·∇f`.
fn lie_v2_f(q: &[f64]) -> f64 {
    q[2] * q[2] * q[0] * q[0] + q[0] * q[2].cos()
}

/// `[v1, v2] = (v1·∇)v2 − (v2·∇)v1`.
fn bracket_v1_v2(q: &[f64]) -> [f64; 3] {
    [-q[2] * q[2], 0.0, q[1]]
}

/// Finite-difference coordinate and momentum observables (no analytic gradient).
fn fd_coordinate(i: usize) -> ClassicalObservable {
    config_observable(format!("q{i}"), move |q| q[i])
}

fn fd_momentum(i: usize) -> ClassicalObservable {
    momentum_observable(format!("p{i}"), move |q| {
        let mut v = vec![0.0; q.len()];
        v[i] = 1.0;
        v
    })
}

/// Rows `(point, relation, i, j, lhs, rhs)`.
fn table_at(z: &PhasePoint, point: usize) -> CliResult<Vec<Vec<f64>>> {
    let h = default_step(z);
    let b = |a: &ClassicalObservable, c: &ClassicalObservable| poisson_bracket(a, c, z, h).map_err(context("bracket"));
    let qf = config_observable("f", f);
    let qg = config_observable("g", g);
    let pv1 = momentum_observable("P(v1)", v1);
    let pv2 = momentum_observable("P(v2)", v2);
    let p = point as f64;
    let mut rows = vec![
        vec![p, 0.0, 0.0, 0.0, b(&qf, &qg)?, 0.0],
        vec![p, 1.0, 0.0, 0.0, b(&qf, &pv2)?, lie_v2_f(&z.q)],
        vec![
            p,
            2.0,
            0.0,
            0.0,
            b(&pv1, &pv2)?,
            -z.p.iter().zip(bracket_v1_v2(&z.q)).map(|(a, c)| a * c).sum::<f64>(),
        ],
    ];
    for i in 0..3 {
        for j in 0..3 {
            let expect = if i == j { 1.0 } else { 0.0 };
            rows.push(vec![
                p,
                3.0,
                i as f64,
                j as f64,
                b(&fd_coordinate(i), &fd_momentum(j))?,
                expect,
            ]);
            rows.push(vec![
                p,
                4.0,
                i as f64,
                j as f64,
                b(&coordinate(i), &canonical_momentum(j))?,
                expect,
            ]);
        }
    }
    Ok(rows)
}

fn thin(traj: &Trajectory, every: usize) -> Trajectory {
    let last = traj.times.len() - 1;
    let keep: Vec<usize> = (0..=last).filter(|i| i % every == 0 || *i == last).collect();
    Trajectory {
        times: keep.iter().map(|&i| traj.times[i]).collect(),
        points: keep.iter().map(|&i| traj.points[i].clone()).collect(),
        energies: keep.iter().map(|&i| traj.energies[i]).collect(),
    }
}

pub fn run(path: &Path, ctx: &Ctx) -> CliResult<Report> {
    let loaded = load::<Config>(path)?;
    let cfg = loaded.value;
    require(cfg.points >= 1, "points", "must be at least 1")?;
    require(
        cfg.half_width > 0.0 && cfg.half_width.is_finite(),
        "box",
        "must be positive",
    )?;

    let seed = ctx.seed;
    let w = cfg.half_width;
    let tables: Vec<Vec<Vec<f64>>> = ctx.pool.install(|| {
        (0..cfg.points)
            .into_par_iter()
            .map(|i| {
                let mut rng = seeds::stream(seed, "classical", i as u64);
                let q: Vec<f64> = (0..3).map(|_| rng.random_range(-w..w)).collect();
                let p: Vec<f64> = (0..3).map(|_| rng.random_range(-w..w)).collect();
                let z = PhasePoint::new(q, p).map_err(context("phase point"))?;
                table_at(&z, i)
            })
            .collect::<CliResult<_>>()
    })?;
    let rows: Vec<Vec<f64>> = tables
        .into_iter()
        .flatten()
        .map(|mut r| {
            let err = (r[4] - r[5]).abs();
            r.push(err);
            r
        })
        .collect();

    let mut out = Outputs::new();
    let bt = out.tolerance("bracket", BRACKET_TOL);
    let ct = out.tolerance("canonical", CANONICAL_TOL);
    let mut checks = Checks::default();
    let names = [
        "{Q(f), Q(g)} = 0",
        "{Q(f), P(v)} = Q(L_v f)",
        "{P(v1), P(v2)} = -P([v1, v2])",
        "{q_i, p_j} = δ_ij (finite differences)",
        "{q_i, p_j} = δ_ij (exact gradients)",
    ];
    let mut worst = [0.0f64; 5];
    for r in &rows {
        let k = r[1] as usize;
        worst[k] = worst[k].max(r[6]);
    }
    for (k, name) in names.iter().enumerate() {
        checks.at_most(*name, worst[k], if k >= 3 { ct } else { bt });
    }
    out.csv(
        "brackets.csv",
        &["point", "relation", "i", "j", "lhs", "rhs", "error"],
        rows,
    );

    let mut summary = json!({
        "points": cfg.points,
        "relations": names,
        "max_error": worst,
    });

    if let Some(o) = cfg.trajectory {
        require(
            o.q0.len() == o.p0.len() && !o.q0.is_empty(),
            "trajectory.q0",
            "q0 and p0 must have equal nonzero length",
        )?;
        require(o.sample_every >= 1, "trajectory.sample_every", "must be at least 1")?;
        let z0 = PhasePoint::new(o.q0.clone(), o.p0.clone()).map_err(context("trajectory"))?;
        let traj = hamilton_flow(&SeparableHamiltonian::harmonic(o.omega), &z0, o.dt, o.steps)
            .map_err(context("trajectory"))?;
        let et = out.tolerance("energy_drift", ENERGY_TOL);
        let drift = traj.max_energy_drift();
        checks.below("leapfrog energy drift", drift, et);
        summary["trajectory"] = json!({ "steps": o.steps, "dt": o.dt, "max_energy_drift": drift });
        let thinned = thin(&traj, o.sample_every);
        let dof = z0.q.len();
        let mut header = vec!["t".to_string()];
        header.extend((1..=dof).map(|i| format!("q{i}")));
        header.extend((1..=dof).map(|i| format!("p{i}")));
        header.push("H".into());
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = thinned
            .times
            .iter()
            .zip(&thinned.points)
            .zip(&thinned.energies)
            .map(|((t, z), e)| {
                let mut row = vec![*t];
                row.extend(&z.q);
                row.extend(&z.p);
                row.push(*e);
                row
            })
            .collect();
        out.csv("trajectory.csv", &header, rows);
    }
    out.json("classical_summary.json", summary);
    Ok(Report {
        outputs: out,
        checks,
        config_hash: loaded.hash,
    })
}
