//! Tier inference by reduction to 2-SAT.

pub mod encode;
pub mod sat;

use serde::Serialize;

use crate::operators::Registry;
use crate::syntax::{program_size, Program};
use crate::tiers::{self, Derivation, Tier, TypeError, TypedTriple, VarEnv};

pub use encode::{encode, encode_constrained, Encoding, Mode};
pub use sat::{solve_2sat, Clause, ClauseSet, Lit};

/// Size of the clause sets built for one inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EncodingStats {
    pub program_size: usize,
    pub t_max: Tier,
    /// Clauses summed over both while-rule modes.
    pub clauses: usize,
    pub bool_vars: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Inference {
    pub gamma: VarEnv,
    pub triple: TypedTriple,
    pub derivation: Derivation,
}

#[derive(Debug, Clone, Serialize)]
pub struct InferenceOutcome {
    pub typable: bool,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub result: Option<Inference>,
    pub stats: EncodingStats,
}

fn default_t_max(p: &Program, t_max: Option<Tier>) -> Tier {
    t_max.unwrap_or(program_size(p) as Tier)
}

/// Decides typability with tiers bounded by `t_max` (default: the program
/// size) and returns the minimal environment and triple, without
/// building a derivation.
pub fn solve_tiers(
    p: &Program,
    registry: &Registry,
    t_max: Option<Tier>,
) -> Result<Option<(VarEnv, TypedTriple)>, TypeError> {
    Ok(solve_with_stats(p, registry, default_t_max(p, t_max))?.0)
}

fn solve_with_stats(
    p: &Program,
    registry: &Registry,
    t_max: Tier,
) -> Result<(Option<(VarEnv, TypedTriple)>, EncodingStats), TypeError> {
    let mut stats = EncodingStats {
        program_size: program_size(p),
        t_max,
        clauses: 0,
        bool_vars: 0,
    };
    let mut best: Option<(VarEnv, TypedTriple)> = None;
    for mode in [Mode::Zero, Mode::Positive] {
        let enc = encode(p, registry, t_max, mode)?;
        stats.clauses += enc.clauses.len();
        stats.bool_vars += enc.clauses.num_vars as u64;
        if let Some(model) = enc.solve() {
            let triple = enc.root_triple(&model);
            if best.as_ref().is_none_or(|(_, b)| triple < *b) {
                best = Some((enc.gamma(&model), triple));
            }
        }
    }
    Ok((best, stats))
}

/// Infers `Γ`, a program-level triple and a derivation, or reports that
/// no typing exists with tiers up to `t_max`.
pub fn infer(p: &Program, registry: &Registry, t_max: Option<Tier>) -> Result<InferenceOutcome, TypeError> {
    let (found, stats) = solve_with_stats(p, registry, default_t_max(p, t_max))?;
    let result = match found {
        None => None,
        Some((gamma, triple)) => {
            let derivation = tiers::check(p, &gamma, triple, registry)?
                .expect("an inferred environment re-checks");
            Some(Inference {
                gamma,
                triple,
                derivation,
            })
        }
    };
    Ok(InferenceOutcome {
        typable: result.is_some(),
        result,
        stats,
    })
}

/// Both modes' clause sets in DIMACS-like text.
pub fn emit_cnf(p: &Program, registry: &Registry, t_max: Option<Tier>) -> Result<String, TypeError> {
    let t = default_t_max(p, t_max);
    let mut s = String::new();
    for (mode, title) in [(Mode::Zero, "outer tier 0 (W0 at top level)"), (Mode::Positive, "outer tier >= 1 (W only)")] {
        let enc = encode(p, registry, t, mode)?;
        s.push_str(&sat::dimacs_section(&format!("mode: {title}; t_max = {t}"), &enc.clauses));
    }
    Ok(s)
}
