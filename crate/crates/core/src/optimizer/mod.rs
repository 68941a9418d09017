//! Circuit-parameter optimization of the auxiliary objective and the
//! multi-round solver.

mod composite;
mod lbfgs;
mod solver;
mod spsa;

use serde::{Deserialize, Serialize};

pub use composite::{circuit_width, composite_eval, composite_grad, Composite};
pub use lbfgs::{minimize_quasi_newton, QuasiNewtonOptions};
pub use solver::{
    build_encoding, initial_solution, solve, EncodingChoice, InitPolicy, OptimizerKind,
    RoundResult, SolveOutcome, SolverConfig,
};
pub use spsa::{minimize_spsa, SpsaOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub theta: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// How outcome probabilities are estimated: exactly from the statevector,
/// or from `N` sampled shots. Serialized as `"exact"` or the shot count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ShotsRepr", into = "ShotsRepr")]
pub enum Shots {
    Exact,
    Finite(u64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ShotsRepr {
    Count(u64),
    Word(String),
}

impl TryFrom<ShotsRepr> for Shots {
    type Error = String;

    fn try_from(r: ShotsRepr) -> std::result::Result<Self, String> {
        match r {
            ShotsRepr::Count(0) => Err("shot count must be at least 1".into()),
            ShotsRepr::Count(n) => Ok(Shots::Finite(n)),
            ShotsRepr::Word(w) if w == "exact" => Ok(Shots::Exact),
            ShotsRepr::Word(w) => w
                .parse::<u64>()
                .map_err(|_| format!("expected \"exact\" or a shot count, got {w:?}"))
                .and_then(|n| Shots::try_from(ShotsRepr::Count(n))),
        }
    }
}

impl From<Shots> for ShotsRepr {
    fn from(s: Shots) -> Self {
        match s {
            Shots::Exact => ShotsRepr::Word("exact".into()),
            Shots::Finite(n) => ShotsRepr::Count(n),
        }
    }
}

impl std::str::FromStr for Shots {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Shots::try_from(ShotsRepr::Word(s.to_string()))
    }
}

impl std::fmt::Display for Shots {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Shots::Exact => f.write_str("exact"),
            Shots::Finite(n) => write!(f, "{n}"),
        }
    }
}
