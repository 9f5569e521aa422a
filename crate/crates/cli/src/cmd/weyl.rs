use std::f64::consts::PI;
use std::path::Path;

use qalgebra::gns::{find_intertwiner, intertwining_residual};
use qalgebra::random;
use qalgebra::weyl::{clock_shift, grid_weyl_residual, heisenberg_obstruction_report, Grid1D};
use qalgebra::CMatrix;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{load, require};
use crate::error::{context, CliError, CliResult};
use crate::output::{Checks, Outputs};
use crate::{seeds, Ctx, Report};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default)]
    clock_shift: Vec<usize>,
    grid: Option<Grid1D>,
    /// `(m, s)` pairs: `α = 2πm/L`, `β = s·dx`.
    #[serde(default)]
    lattice: Vec<(i64, i64)>,
    obstruction: Option<Grid1D>,
    intertwiner: Option<IntertwinerSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntertwinerSpec {
    dims: Vec<usize>,
}

const RELATION_TOL: f64 = 1e-12;
const GRID_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const INTERIOR_TOL: f64 = 1e-6;
const INTERTWINER_TOL: f64 = 1e-8;
/// `Uⁿ`, `Vⁿ` are formed by repeated dense products, so only up to this size.
const ORDER_CHECK_MAX: usize = 128;

fn conjugate(w: &CMatrix, m: &CMatrix) -> CMatrix {
    w * m * w.adjoint()
}

pub fn run(path: &Path, ctx: &Ctx) -> CliResult<Report> {
    let loaded = load::<Config>(path)?;
    let cfg = loaded.value;
    require(
        !cfg.clock_shift.is_empty() || cfg.grid.is_some() || cfg.obstruction.is_some() || cfg.intertwiner.is_some(),
        "clock_shift",
        "config selects no checks",
    )?;
    require(cfg.lattice.is_empty() || cfg.grid.is_some(), "lattice", "needs 'grid'")?;

    let mut out = Outputs::new();
    let rel_tol = out.tolerance("clock_shift_relation", RELATION_TOL);
    let mut checks = Checks::default();
    let mut report = json!({});

    let mut pairs = Vec::new();
    for &n in &cfg.clock_shift {
        let pair = clock_shift(n).map_err(context("clock_shift"))?;
        let rel = pair.relation_residual();
        checks.at_most(format!("clock/shift relation UV = ζVU, n = {n}"), rel, rel_tol);
        let mut row = json!({ "n": n, "relation_residual": rel, "zeta": [pair.zeta().re, pair.zeta().im] });
        if n <= ORDER_CHECK_MAX {
            let (du, dv) = pair.order_residuals();
            checks.at_most(format!("Uⁿ = I, n = {n}"), du, rel_tol);
            checks.at_most(format!("Vⁿ = I, n = {n}"), dv, rel_tol);
            row["order_residuals"] = json!([du, dv]);
        }
        if n == 2 {
            let (u, v) = (pair.clock().matrix(), pair.shift().matrix());
            let anti = (u * v + v * u).iter().map(|z| z.norm()).fold(0.0, f64::max);
            checks.at_most("Pauli anticommutation σzσx + σxσz = 0 (exact)", anti, 0.0);
            row["anticommutator_max"] = json!(anti);
        }
        pairs.push(row);
    }
    report["clock_shift"] = Value::Array(pairs);

    if let Some(grid) = cfg.grid {
        Grid1D::new(grid.len(), grid.length()).map_err(context("grid"))?;
        let tol = out.tolerance("grid_weyl_relation", GRID_TOL);
        let lattice = if cfg.lattice.is_empty() {
            vec![(1, 1)]
        } else {
            cfg.lattice.clone()
        };
        let mut rows = Vec::new();
        for (m, s) in lattice {
            let alpha = 2.0 * PI * m as f64 / grid.length();
            let beta = s as f64 * grid.dx();
            let r = grid_weyl_residual(&grid, alpha, beta).map_err(context("lattice"))?;
            checks.at_most(format!("grid Weyl relation, α = 2π·{m}/L, β = {s}·dx"), r, tol);
            rows.push(json!({ "m": m, "s": s, "alpha": alpha, "beta": beta, "residual": r }));
        }
        report["grid"] = json!({ "grid": grid, "lattice": rows });
    }

    if let Some(grid) = cfg.obstruction {
        Grid1D::new(grid.len(), grid.length()).map_err(context("obstruction"))?;
        let rep = heisenberg_obstruction_report(&grid).map_err(context("obstruction"))?;
        let tt = out.tolerance("obstruction_trace", TRACE_TOL);
        let it = out.tolerance("obstruction_interior", INTERIOR_TOL);
        checks.at_most("trace of [P̂, X̂] vanishes", rep.trace_of_commutator.norm(), tt);
        checks.below(
            "interior deviation of [P̂, X̂] from its canonical value",
            rep.interior_deviation,
            it,
        );
        checks.at_least(
            "full-matrix deviation of [P̂, X̂] from its canonical value",
            rep.full_deviation,
            1.0,
        );
        out.csv(
            "obstruction_bounds.csv",
            &["n", "lower_bound", "commutator_ratio", "norm_product"],
            rep.bounds
                .iter()
                .map(|b| vec![b.n as f64, b.lower_bound, b.commutator_ratio, rep.norm_product])
                .collect(),
        );
        report["obstruction"] = json!({ "grid": grid, "report": rep });
    }

    if let Some(spec) = cfg.intertwiner {
        let tol = out.tolerance("intertwiner", INTERTWINER_TOL);
        let mut rows = Vec::new();
        for &n in &spec.dims {
            let pair = clock_shift(n).map_err(context("intertwiner.dims"))?;
            let gens = [pair.clock().matrix().clone(), pair.shift().matrix().clone()];
            let mut rng = seeds::stream(ctx.seed, "weyl-intertwiner", n as u64);
            let w1 = random::unitary(&mut rng, n).into_matrix();
            let w2 = random::unitary(&mut rng, n).into_matrix();
            let rep1: Vec<CMatrix> = gens.iter().map(|g| conjugate(&w1, g)).collect();
            let rep2: Vec<CMatrix> = gens.iter().map(|g| conjugate(&w2, g)).collect();
            let u = find_intertwiner(&rep1, &rep2, 1e-9).map_err(context("intertwiner"))?;
            let residual = u.as_ref().map(|u| intertwining_residual(u, &rep1, &rep2));
            match residual {
                Some(r) => checks.at_most(format!("intertwiner between conjugated Weyl pairs, n = {n}"), r, tol),
                None => checks.holds(format!("intertwiner between conjugated Weyl pairs, n = {n}"), false),
            }
            rows.push(json!({ "n": n, "found": u.is_some(), "residual": residual }));
        }
        report["intertwiner"] = Value::Array(rows);
    }

    if report.as_object().is_some_and(|o| o.is_empty()) {
        return Err(CliError::Config("nothing to do".into()));
    }
    out.json("weyl.json", report);
    Ok(Report {
        outputs: out,
        checks,
        config_hash: loaded.hash,
    })
}
