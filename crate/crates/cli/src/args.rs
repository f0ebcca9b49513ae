//! Command-line surface and the small text formats it accepts.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tier_core::syntax::Var;
use tier_core::{Tier, TypedTriple, VarEnv, Word};

#[derive(Debug, Parser)]
#[command(name = "tier", version, about = "Tier-based complexity checker for oracle programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Seed for randomized analyses; the TIER_SEED environment variable
    /// takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and pretty-print a program (or dump its AST as JSON).
    Parse(ParseArgs),
    /// Check a program against a given environment.
    Check(CheckArgs),
    /// Infer an environment and a triple.
    Infer(InferArgs),
    /// Execute a program.
    Run(RunArgs),
    /// Measure step counts, lookahead revisions and non-interference.
    Analyze(AnalyzeArgs),
    /// Check the shipped corpus against its manifest.
    CorpusCheck(CorpusArgs),
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Tiers of the program variables, e.g. `x=1,y=0`.
    #[arg(long, value_parser = parse_gamma)]
    pub gamma: VarEnv,
    /// Judgment triple `t,t_in,t_out`; without it the least derivable
    /// triple is searched for.
    #[arg(long, value_parser = parse_triple)]
    pub triple: Option<TypedTriple>,
    /// Print the derivation tree.
    #[arg(long)]
    pub emit_derivation: bool,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    pub file: PathBuf,
    /// Largest tier available (default: the program size).
    #[arg(long)]
    pub max_tier: Option<Tier>,
    /// Print the derivation tree.
    #[arg(long)]
    pub emit_derivation: bool,
    /// Print the clause sets handed to the solver.
    #[arg(long)]
    pub emit_cnf: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub file: PathBuf,
    /// Input bindings: `x=3` binds `1³`, `x=w:0110` binds a word.
    #[arg(value_parser = parse_binding)]
    pub inputs: Vec<(Var, Word)>,
    /// Oracle description (JSON); default answers ε everywhere.
    #[arg(long)]
    pub oracle: Option<PathBuf>,
    /// Step budget.
    #[arg(long)]
    pub fuel: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    /// Fixed input bindings, as for `run`.
    #[arg(value_parser = parse_binding)]
    pub inputs: Vec<(Var, Word)>,
    /// Scales `a:b`: the scale variable is bound to `1ⁿ` for n in a..=b.
    #[arg(long, value_parser = parse_range)]
    pub sweep: Option<(usize, usize)>,
    /// Use scales 2^k for k in a..=b instead.
    #[arg(long)]
    pub geometric: bool,
    /// Variable bound to `1ⁿ` (default: the first variable of the first
    /// loop guard).
    #[arg(long)]
    pub scale: Option<String>,
    /// Emit `m<TAB>steps` rows instead of the report.
    #[arg(long)]
    pub plot_data: bool,
    /// Run randomized non-interference trials at every tier.
    #[arg(long)]
    pub ni: bool,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Environment for the non-interference trials (default: inferred).
    #[arg(long, value_parser = parse_gamma)]
    pub gamma: Option<VarEnv>,
    /// Oracle description (JSON) for sweeps.
    #[arg(long)]
    pub oracle: Option<PathBuf>,
    /// Step budget per run.
    #[arg(long)]
    pub fuel: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Corpus directory with a `manifest.toml` (default: the built-in
    /// corpus).
    #[arg(long)]
    pub dir: Option<PathBuf>,
}

fn parse_binding(s: &str) -> Result<(Var, Word), String> {
    let (x, v) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}`: expected var=INT or var=w:WORD"))?;
    let x = x.trim();
    if x.is_empty() || !x.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(format!("`{x}` is not a variable name"));
    }
    let word = match v.strip_prefix("w:") {
        Some(w) => w.parse::<Word>().map_err(|e| e.to_string())?,
        None => Word::unary(
            v.parse::<usize>()
                .map_err(|_| format!("`{v}`: expected a natural number or w:WORD"))?,
        ),
    };
    Ok((Var::new(x), word))
}

fn parse_gamma(s: &str) -> Result<VarEnv, String> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            let (x, t) = part
                .split_once('=')
                .ok_or_else(|| format!("`{part}`: expected var=TIER"))?;
            let t = t
                .trim()
                .parse::<Tier>()
                .map_err(|_| format!("`{t}` is not a tier"))?;
            Ok((Var::new(x.trim()), t))
        })
        .collect()
}

fn parse_triple(s: &str) -> Result<TypedTriple, String> {
    let parts: Vec<&str> = s.trim_matches(|c| c == '(' || c == ')').split(',').collect();
    let tiers: Result<Vec<Tier>, _> = parts.iter().map(|p| p.trim().parse::<Tier>()).collect();
    match tiers.as_deref() {
        Ok(&[t, i, o]) => Ok(TypedTriple::new(t, i, o)),
        _ => Err(format!("`{s}`: expected t,t_in,t_out")),
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("`{s}`: expected a:b"))?;
    let a: usize = a.parse().map_err(|_| format!("`{a}` is not a number"))?;
    let b: usize = b.parse().map_err(|_| format!("`{b}` is not a number"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}
