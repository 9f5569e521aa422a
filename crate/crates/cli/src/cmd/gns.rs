use std::path::Path;

use qalgebra::gns::{gns_construct, is_irreducible, AbstractState, DEFAULT_GRAM_TOL};
use qalgebra::operator_core::{generate_algebra, is_commutative, AlgebraBasis, AlgebraElement};
use qalgebra::states::{expectation, is_pure, DensityState, PURITY_TOL};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{load, matrix_field, require, vector_field};
use crate::error::{context, CliError, CliResult};
use crate::output::{Checks, Outputs};
use crate::{Ctx, Report};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    algebra: AlgebraSpec,
    state: StateSpec,
    rank_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum AlgebraSpec {
    Generators(Vec<Value>),
    Full(usize),
    Diagonal(usize),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum StateSpec {
    Density(Value),
    Vector(Value),
    MaximallyMixed(usize),
    BasisState { dim: usize, index: usize },
}

const GENERATE_TOL: f64 = 1e-10;
const RECONSTRUCTION_TOL: f64 = 1e-9;
const HOMOMORPHISM_TOL: f64 = 1e-8;
const COMMUTANT_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-10;

fn basis_of(spec: &AlgebraSpec) -> CliResult<AlgebraBasis> {
    match spec {
        AlgebraSpec::Generators(gens) => {
            require(!gens.is_empty(), "algebra.generators", "needs at least one matrix")?;
            let els = gens
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let field = format!("algebra.generators[{i}]");
                    AlgebraElement::new(matrix_field(g, &field)?).map_err(context(&field))
                })
                .collect::<CliResult<Vec<_>>>()?;
            generate_algebra(&els, GENERATE_TOL).map_err(context("algebra.generators"))
        }
        AlgebraSpec::Full(n) => {
            require(*n >= 1, "algebra.full", "dimension must be at least 1")?;
            Ok(AlgebraBasis::full(*n))
        }
        AlgebraSpec::Diagonal(n) => {
            require(*n >= 1, "algebra.diagonal", "dimension must be at least 1")?;
            Ok(AlgebraBasis::diagonal(*n))
        }
    }
}

fn state_of(spec: &StateSpec) -> CliResult<DensityState> {
    match spec {
        StateSpec::Density(v) => DensityState::new(matrix_field(v, "state.density")?).map_err(context("state.density")),
        StateSpec::Vector(v) => {
            DensityState::from_vector(&vector_field(v, "state.vector")?).map_err(context("state.vector"))
        }
        StateSpec::MaximallyMixed(n) => {
            require(*n >= 1, "state.maximally_mixed", "dimension must be at least 1")?;
            Ok(DensityState::maximally_mixed(*n))
        }
        StateSpec::BasisState { dim, index } => {
            require(index < dim, "state.basis_state.index", "must be below dim")?;
            Ok(DensityState::basis_state(*dim, *index))
        }
    }
}

/// Purity of the restricted state when it can be decided without the GNS
/// representation: full matrix algebras (rank-one density) and commutative
/// algebras (multiplicative functional).
fn independent_purity(basis: &AlgebraBasis, omega: &DensityState) -> Option<bool> {
    let n = basis.dim();
    if basis.len() == n * n {
        return Some(is_pure(omega, PURITY_TOL));
    }
    if is_commutative(basis, 1e-10) {
        let w = |m: &AlgebraElement| expectation(omega, m).expect("dimensions checked");
        let els = basis.elements();
        let multiplicative = els.iter().all(|a| {
            els.iter()
                .all(|b| (w(&a.try_mul(b).expect("same dimension")) - w(a) * w(b)).norm() <= 1e-9)
        });
        return Some(multiplicative);
    }
    None
}

pub fn run(path: &Path, _ctx: &Ctx) -> CliResult<Report> {
    let loaded = load::<Config>(path)?;
    let cfg = loaded.value;
    let basis = basis_of(&cfg.algebra)?;
    let omega = state_of(&cfg.state)?;
    if omega.dim() != basis.dim() {
        return Err(CliError::Config(format!(
            "field 'state': dimension {} does not match the algebra's {}",
            omega.dim(),
            basis.dim()
        )));
    }
    let rank_tol = cfg.rank_tol.unwrap_or(DEFAULT_GRAM_TOL);
    require(rank_tol > 0.0, "rank_tol", "must be positive")?;

    let full = basis.len() == basis.dim() * basis.dim();
    let pure = independent_purity(&basis, &omega);
    let state = AbstractState::from_density(basis, &omega).map_err(context("state"))?;
    let g = gns_construct(&state, rank_tol).map_err(context("GNS construction"))?;
    let reconstruction = g.reconstruction_error(&state);
    let homomorphism = g.homomorphism_error(state.structure());
    let irreducible = is_irreducible(&g.rep, COMMUTANT_TOL).map_err(context("commutant"))?;
    let cyclic_rank = g.cyclic_rank(RANK_TOL).map_err(context("cyclic rank"))?;

    let mut out = Outputs::new();
    out.tolerance("gram_rank_tol", rank_tol);
    let rec_tol = out.tolerance("reconstruction", RECONSTRUCTION_TOL);
    let hom_tol = out.tolerance("homomorphism", HOMOMORPHISM_TOL);
    out.tolerance("commutant", COMMUTANT_TOL);
    out.tolerance("rank", RANK_TOL);

    let mut checks = Checks::default();
    checks.at_most("GNS reconstruction ω(A) = ⟨ψ|ρ(A)ψ⟩", reconstruction, rec_tol);
    checks.at_most("representation is a *-homomorphism", homomorphism, hom_tol);
    checks.holds("cyclic vector spans the GNS space", cyclic_rank == g.hilbert_dim);
    if let Some(p) = pure {
        checks.holds("pure iff irreducible", p == irreducible);
    }
    let mut expected_dim = Value::Null;
    if full {
        let rank = omega.rank(RANK_TOL).map_err(context("state rank"))?;
        let d = omega.dim() * rank;
        expected_dim = json!(d);
        checks.holds("GNS dimension equals n·rank(b)", g.hilbert_dim == d);
    }

    let mut result = qalgebra::io::gns_result_to_value(&g);
    result["algebra_dim"] = json!(state.basis().len());
    result["verdicts"] = json!({
        "reconstruction_max_error": reconstruction,
        "homomorphism_max_error": homomorphism,
        "irreducible": irreducible,
        "pure": pure,
        "cyclic_rank": cyclic_rank,
        "expected_hilbert_dim": expected_dim,
    });
    out.json("gns.json", result);
    Ok(Report {
        outputs: out,
        checks,
        config_hash: loaded.hash,
    })
}
