use std::path::Path;

use qalgebra::dynamics::{ehrenfest_check, evolve_schrodinger, EvolutionConfig, Method, Potential};
use qalgebra::weyl::{Grid1D, WaveFunction};
use serde::Deserialize;
use serde_json::json;

use crate::config::{load, require};
use crate::error::{context, CliResult};
use crate::output::{Checks, Outputs};
use crate::{Ctx, Report};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    grid: Grid1D,
    potential: Potential,
    dt: f64,
    t_final: f64,
    #[serde(default = "default_method")]
    method: Method,
    initial: Gaussian,
    #[serde(default)]
    sample_every: usize,
    #[serde(default = "default_outputs")]
    outputs: Vec<OutputKind>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Gaussian {
    x0: f64,
    p0: f64,
    sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum OutputKind {
    Trajectory,
    FinalState,
    Ehrenfest,
}

fn default_method() -> Method {
    Method::SplitOperator
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Trajectory, OutputKind::FinalState]
}

/// Norm drift allowed per 10³ split-operator steps.
const NORM_TOL_PER_1000: f64 = 1e-10;
const ENERGY_TOL: f64 = 1e-6;
const EHRENFEST_TOL: f64 = 1e-3;

pub fn run(path: &Path, _ctx: &Ctx) -> CliResult<Report> {
    let loaded = load::<Config>(path)?;
    let cfg = loaded.value;
    let grid = Grid1D::new(cfg.grid.len(), cfg.grid.length()).map_err(context("grid"))?;
    require(cfg.initial.sigma > 0.0, "initial.sigma", "must be positive")?;
    let psi0 =
        WaveFunction::gaussian(grid, cfg.initial.x0, cfg.initial.p0, cfg.initial.sigma).map_err(context("initial"))?;
    let ecfg = EvolutionConfig::new(cfg.dt, cfg.t_final, cfg.method, cfg.potential).with_sampling(cfg.sample_every);
    ecfg.schedule().map_err(context("dt/t_final"))?;

    let run = evolve_schrodinger(&psi0, &ecfg).map_err(context("evolution"))?;

    let mut out = Outputs::new();
    let mut checks = Checks::default();
    let norm_tol = NORM_TOL_PER_1000 * (run.steps as f64 / 1000.0).max(1.0);
    out.tolerance("norm_drift", norm_tol);
    let energy_tol = out.tolerance("relative_energy_drift", ENERGY_TOL);
    checks.at_most("norm drift", run.max_norm_drift(), norm_tol);
    checks.at_most("relative energy drift", run.max_relative_energy_drift(), energy_tol);

    let mut summary = json!({
        "steps": run.steps,
        "step": run.step,
        "method": cfg.method,
        "potential": cfg.potential,
        "max_norm_drift": run.max_norm_drift(),
        "max_relative_energy_drift": run.max_relative_energy_drift(),
        "final": run.samples.last(),
    });

    if cfg.outputs.contains(&OutputKind::Ehrenfest) {
        let split = EvolutionConfig {
            method: Method::SplitOperator,
            ..ecfg.clone()
        };
        let rep = ehrenfest_check(&psi0, &split).map_err(context("ehrenfest"))?;
        let tol = out.tolerance("ehrenfest", EHRENFEST_TOL);
        checks.below("Ehrenfest d⟨X⟩/dt = ⟨P⟩", rep.dx_dt_gap, tol);
        checks.below("Ehrenfest d⟨P⟩/dt = ±⟨V'(X)⟩", rep.dp_dt_gap, tol);
        summary["ehrenfest"] = json!(rep);
    }
    if cfg.outputs.contains(&OutputKind::Trajectory) {
        out.csv(
            "trajectory.csv",
            &["t", "X", "P", "H", "norm"],
            run.samples
                .iter()
                .map(|s| vec![s.t, s.mean_x, s.mean_p, s.energy, s.norm])
                .collect(),
        );
    }
    if cfg.outputs.contains(&OutputKind::FinalState) {
        out.wavefunction("final_state.csv", run.final_state);
    }
    out.json("evolve_summary.json", summary);
    Ok(Report {
        outputs: out,
        checks,
        config_hash: loaded.hash,
    })
}
