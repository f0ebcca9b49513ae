//! An imperative language with a single oracle symbol, a tier-based type
//! system that certifies polynomial step counts, tier inference by 2-SAT,
//! and dynamic analyzers that measure what the type system promises.

pub mod analysis;
pub mod corpus;
pub mod inference;
pub mod operators;
pub mod parser;
pub mod semantics;
pub mod syntax;
pub mod tiers;
pub mod word;

pub use operators::{Classification, NeutralKind, OperatorSpec, Registry};
pub use parser::{parse, ParseError};
pub use semantics::{run_program, truncate_pad, ExecutionTrace, Oracle, RuntimeError, Store};
pub use syntax::{program_size, Cmd, Expr, Program, Var};
pub use tiers::{check, check_any, Derivation, Rule, Tier, TypedTriple, VarEnv};
pub use word::Word;
pub use inference::{infer, solve_tiers};
