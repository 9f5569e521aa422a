use std::f64::consts::PI;
use std::path::Path;

use qalgebra::dynamics::{build_hamiltonian_for, count_nodes, eigen_spectrum, Potential, RadialGrid, Tridiagonal};
use qalgebra::weyl::Grid1D;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{load, require};
use crate::error::{context, CliError, CliResult};
use crate::output::{Checks, Outputs};
use crate::{Ctx, Report};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    grid: Option<Grid1D>,
    radial: Option<RadialGrid>,
    potential: Potential,
    k: usize,
    tolerance: Option<f64>,
}

const HARMONIC_TOL: f64 = 1e-4;
const FREE_TOL: f64 = 1e-10;
const HYDROGEN_REL_TOL: f64 = 1e-2;

pub fn run(path: &Path, _ctx: &Ctx) -> CliResult<Report> {
    let loaded = load::<Config>(path)?;
    let cfg = loaded.value;
    require(cfg.k >= 1, "k", "must be at least 1")?;
    let mut out = Outputs::new();
    let mut checks = Checks::default();
    let mut result = json!({ "potential": cfg.potential, "k": cfg.k });

    let eigenvalues = match (cfg.grid, cfg.radial) {
        (Some(grid), None) => {
            let grid = Grid1D::new(grid.len(), grid.length()).map_err(context("grid"))?;
            if let Potential::CoulombRadial { .. } = cfg.potential {
                return Err(CliError::Config(
                    "field 'potential': coulomb_radial needs a 'radial' grid".into(),
                ));
            }
            let h = build_hamiltonian_for(&grid, &cfg.potential).map_err(context("potential"))?;
            let e = eigen_spectrum(&h, cfg.k).map_err(context("k"))?;
            result["grid"] = json!(grid);
            e
        }
        (None, Some(radial)) => {
            let radial = RadialGrid::new(radial.r_max(), radial.len()).map_err(context("radial"))?;
            let Potential::CoulombRadial { charge } = cfg.potential else {
                return Err(CliError::Config(
                    "field 'radial': only the coulomb_radial potential is radial".into(),
                ));
            };
            require(cfg.k <= radial.len(), "k", "exceeds the radial point count")?;
            let t = Tridiagonal::radial_coulomb(&radial, charge);
            let e: Vec<f64> = (0..cfg.k).map(|j| t.eigenvalue(j)).collect();
            let nodes: Vec<usize> = e.iter().map(|&l| count_nodes(&t.eigenvector(l), 1e-8)).collect();
            for (j, &n) in nodes.iter().enumerate() {
                checks.holds(format!("radial state {j} has {j} nodes"), n == j);
            }
            result["radial"] = json!(radial);
            result["nodes"] = json!(nodes);
            e
        }
        _ => {
            return Err(CliError::Config(
                "exactly one of 'grid' and 'radial' must be given".into(),
            ))
        }
    };
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Numerical("non-finite eigenvalue".into()));
    }
    checks.holds("eigenvalues ascending", eigenvalues.windows(2).all(|w| w[0] <= w[1]));

    let mut reference = Value::Null;
    match cfg.potential {
        Potential::Harmonic { omega } => {
            let tol = out.tolerance("absolute", cfg.tolerance.unwrap_or(HARMONIC_TOL));
            let r: Vec<f64> = (0..eigenvalues.len()).map(|n| omega.abs() * (n as f64 + 0.5)).collect();
            for (n, (e, x)) in eigenvalues.iter().zip(&r).enumerate() {
                checks.at_most(format!("E{n} = ω(n + 1/2)"), (e - x).abs(), tol);
            }
            reference = json!(r);
        }
        Potential::Free => {
            let tol = out.tolerance("absolute", cfg.tolerance.unwrap_or(FREE_TOL));
            checks.at_most("free particle ground energy 0", eigenvalues[0].abs(), tol);
        }
        Potential::CoulombRadial { charge } => {
            let tol = out.tolerance("relative", cfg.tolerance.unwrap_or(HYDROGEN_REL_TOL));
            let r: Vec<f64> = (1..=eigenvalues.len())
                .map(|n| -charge * charge / (2.0 * (n * n) as f64))
                .collect();
            for (i, (e, x)) in eigenvalues.iter().zip(&r).enumerate() {
                checks.at_most(format!("E{} = -Z²/(2n²)", i + 1), ((e - x) / x).abs(), tol);
            }
            reference = json!(r);
        }
        Potential::FiniteWell { width, .. } => {
            let r: Vec<f64> = (1..=eigenvalues.len())
                .map(|n| PI * PI * (n * n) as f64 / (2.0 * width * width))
                .collect();
            for (i, (e, x)) in eigenvalues.iter().zip(&r).enumerate() {
                checks.holds(format!("E{} below the infinite-well level", i + 1), e < x);
            }
            result["infinite_well_levels"] = json!(r);
        }
        Potential::Quartic { .. } => {}
    }
    result["eigenvalues"] = json!(eigenvalues);
    result["reference"] = reference;
    out.json("spectrum.json", result);
    Ok(Report {
        outputs: out,
        checks,
        config_hash: loaded.hash,
    })
}
