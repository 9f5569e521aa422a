use std::path::Path;

use qalgebra::operator_core::AlgebraElement;
use qalgebra::random;
use qalgebra::states::{uncertainty_check, UNCERTAINTY_SLACK};
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
    dim: usize,
    /// Draw each sample's dimension uniformly from `dim..=max_dim`.
    max_dim: Option<usize>,
    samples: usize,
    /// Every this many samples use a commuting (diagonal) pair; 0 disables.
    #[serde(default = "default_commuting_every")]
    commuting_every: usize,
}

fn default_commuting_every() -> usize {
    10
}

struct Row {
    dim: usize,
    commuting: bool,
    lhs: f64,
    rhs: f64,
    holds: bool,
}

fn real_diagonal(rng: &mut impl Rng, n: usize) -> AlgebraElement {
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    AlgebraElement::real_diagonal(&d).expect("finite diagonal")
}

fn sample(cfg: &Config, seed: u64, i: usize) -> CliResult<Row> {
    let mut rng = seeds::stream(seed, "uncertainty", i as u64);
    let n = match cfg.max_dim {
        Some(m) => rng.random_range(cfg.dim..=m),
        None => cfg.dim,
    };
    let omega = if i.is_multiple_of(3) {
        random::pure_state(&mut rng, n)
    } else {
        random::mixed_density(&mut rng, n)
    };
    let commuting = cfg.commuting_every > 0 && i.is_multiple_of(cfg.commuting_every);
    let (a1, a2) = if commuting {
        (real_diagonal(&mut rng, n), real_diagonal(&mut rng, n))
    } else {
        (random::hermitian(&mut rng, n), random::hermitian(&mut rng, n))
    };
    let r = uncertainty_check(&omega, &a1, &a2).map_err(context("uncertainty sample"))?;
    Ok(Row {
        dim: n,
        commuting,
        lhs: r.lhs,
        rhs: r.rhs,
        holds: r.holds,
    })
}

pub fn run(path: &Path, ctx: &Ctx) -> CliResult<Report> {
    let loaded = load::<Config>(path)?;
    let cfg = loaded.value;
    require(cfg.dim >= 1, "dim", "must be at least 1")?;
    require(cfg.samples >= 1, "samples", "must be at least 1")?;
    if let Some(m) = cfg.max_dim {
        require(m >= cfg.dim, "max_dim", "must be at least dim")?;
    }

    let seed = ctx.seed;
    let rows: Vec<Row> = ctx.pool.install(|| {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| sample(&cfg, seed, i))
            .collect::<CliResult<_>>()
    })?;

    let violations = rows.iter().filter(|r| !r.holds).count();
    let min_margin = rows.iter().map(|r| r.lhs - r.rhs).fold(f64::INFINITY, f64::min);
    let zero_rhs = rows.iter().filter(|r| r.rhs == 0.0).count();

    let mut out = Outputs::new();
    let slack = out.tolerance("uncertainty_slack", UNCERTAINTY_SLACK);
    out.csv(
        "uncertainty.csv",
        &["sample", "dim", "commuting", "lhs", "rhs", "margin"],
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                vec![
                    i as f64,
                    r.dim as f64,
                    r.commuting as u8 as f64,
                    r.lhs,
                    r.rhs,
                    r.lhs - r.rhs,
                ]
            })
            .collect(),
    );
    out.json(
        "uncertainty_summary.json",
        json!({
            "samples": rows.len(),
            "violations": violations,
            "min_margin": min_margin,
            "commuting_rows": rows.iter().filter(|r| r.commuting).count(),
            "zero_rhs_rows": zero_rhs,
        }),
    );

    let mut checks = Checks::default();
    checks.at_most("uncertainty violations", violations as f64, 0.0);
    checks.at_least("min margin", min_margin, -slack);
    Ok(Report {
        outputs: out,
        checks,
        config_hash: loaded.hash,
    })
}
