//! Subcommand implementations. Each returns the process exit status.

use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

use tier_core::analysis::{count_lookahead_revisions, noninterference_test, sweep, NiConfig, NiError};
use tier_core::corpus::{Corpus, CorpusError, Verdict};
use tier_core::inference::emit_cnf;
use tier_core::syntax::{Cmd, Expr, Var};
use tier_core::tiers::TypeError;
use tier_core::{program_size, run_program, Oracle, ParseError, Program, Registry, RuntimeError, Store, VarEnv};

use crate::args::{AnalyzeArgs, CheckArgs, Cli, CorpusArgs, Format, InferArgs, ParseArgs, RunArgs};

pub const OK: i32 = 0;
pub const UNTYPABLE: i32 = 1;
pub const BAD_INPUT: i32 = 2;
pub const STUCK: i32 = 3;
pub const OUT_OF_FUEL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: bad oracle description: {source}")]
    Oracle { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn status(&self) -> i32 {
        match self {
            CliError::Type(_) => UNTYPABLE,
            CliError::Runtime(RuntimeError::StuckGuard { .. }) => STUCK,
            CliError::Runtime(RuntimeError::FuelExhausted { .. }) => OUT_OF_FUEL,
            _ => BAD_INPUT,
        }
    }
}

pub struct Context {
    pub registry: Registry,
    pub format: Format,
    pub seed: u64,
}

impl Context {
    pub fn new(cli: &Cli) -> Self {
        let seed = std::env::var("TIER_SEED")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(cli.seed);
        Context {
            registry: Registry::builtin(),
            format: cli.format,
            seed,
        }
    }

    fn json(&self) -> bool {
        self.format == Format::Json
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn load_program(ctx: &Context, path: &Path) -> Result<Program, CliError> {
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    tier_core::parse(&src, &ctx.registry).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn load_oracle(path: Option<&Path>) -> Result<Oracle, CliError> {
    let Some(path) = path else {
        return Ok(Oracle::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Oracle::from_json(&text).map_err(|source| CliError::Oracle {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse(ctx: &Context, a: &ParseArgs) -> Result<i32, CliError> {
    let p = load_program(ctx, &a.file)?;
    if ctx.json() {
        print_json(&json!({ "program": p, "size": program_size(&p) }));
    } else {
        println!("{p}");
    }
    Ok(OK)
}

pub fn check(ctx: &Context, a: &CheckArgs) -> Result<i32, CliError> {
    let p = load_program(ctx, &a.file)?;
    let found = match a.triple {
        Some(t) => tier_core::check(&p, &a.gamma, t, &ctx.registry)?.map(|d| (t, d)),
        None => tier_core::check_any(&p, &a.gamma, &ctx.registry)?,
    };
    if ctx.json() {
        let mut v = json!({
            "typable": found.is_some(),
            "gamma": a.gamma,
            "triple": found.as_ref().map(|(t, _)| *t).or(a.triple),
        });
        if let (true, Some((_, d))) = (a.emit_derivation, &found) {
            v["derivation"] = d.to_json();
        }
        print_json(&v);
    } else {
        match &found {
            Some((t, d)) => {
                println!("typable: Γ = {} ⊢ body : {t}", a.gamma);
                if a.emit_derivation {
                    print!("{}", d.render());
                }
            }
            None => match a.triple {
                Some(t) => println!("untypable: no derivation of Γ = {} ⊢ body : {t}", a.gamma),
                None => println!("untypable: no triple types the program under Γ = {}", a.gamma),
            },
        }
    }
    Ok(if found.is_some() { OK } else { UNTYPABLE })
}

pub fn infer(ctx: &Context, a: &InferArgs) -> Result<i32, CliError> {
    let p = load_program(ctx, &a.file)?;
    let out = tier_core::infer(&p, &ctx.registry, a.max_tier)?;
    let cnf = if a.emit_cnf {
        Some(emit_cnf(&p, &ctx.registry, a.max_tier)?)
    } else {
        None
    };
    if ctx.json() {
        let mut v = json!({
            "typable": out.typable,
            "gamma": out.result.as_ref().map(|r| &r.gamma),
            "triple": out.result.as_ref().map(|r| r.triple),
            "stats": out.stats,
        });
        if let (true, Some(r)) = (a.emit_derivation, &out.result) {
            v["derivation"] = r.derivation.to_json();
        }
        if let Some(cnf) = &cnf {
            v["cnf"] = json!(cnf);
        }
        print_json(&v);
    } else {
        match &out.result {
            Some(r) => {
                println!("typable");
                println!("Γ = {}", r.gamma);
                println!("triple = {}", r.triple);
                if a.emit_derivation {
                    print!("{}", r.derivation.render());
                }
            }
            None => println!("untypable (tiers up to {})", out.stats.t_max),
        }
        if let Some(cnf) = &cnf {
            print!("{cnf}");
        }
    }
    Ok(if out.typable { OK } else { UNTYPABLE })
}

pub fn run(ctx: &Context, a: &RunArgs) -> Result<i32, CliError> {
    let p = load_program(ctx, &a.file)?;
    let phi = load_oracle(a.oracle.as_deref())?;
    let inputs = Store::from_bindings(a.inputs.iter().cloned());
    let r = run_program(&p, &inputs, &ctx.registry, &phi, a.fuel)?;
    let lr = count_lookahead_revisions(&r.trace.query_lengths());
    if ctx.json() {
        print_json(&json!({
            "result": r.result,
            "steps": r.trace.steps,
            "m": r.trace.m,
            "lr": lr,
            "queries": r.trace.oracle_log,
        }));
    } else {
        println!("{}", r.result.display_epsilon());
        println!("steps: {}  m: {}  lr: {}", r.trace.steps, r.trace.m, lr);
    }
    Ok(OK)
}

/// First variable read by the first loop guard, in program order.
fn default_scale_var(c: &Cmd) -> Option<Var> {
    match c {
        Cmd::Skip | Cmd::Assign { .. } => None,
        Cmd::Seq { first, rest } => default_scale_var(first).or_else(|| default_scale_var(rest)),
        Cmd::If {
            then_branch,
            else_branch,
            ..
        } => default_scale_var(then_branch).or_else(|| default_scale_var(else_branch)),
        Cmd::While { guard, .. } => first_var(guard),
    }
}

fn first_var(e: &Expr) -> Option<Var> {
    match e {
        Expr::Var { name } => Some(name.clone()),
        Expr::Lit { .. } => None,
        Expr::Op { args, .. } => args.iter().find_map(first_var),
        Expr::Oracle { data, bound } => first_var(data).or_else(|| first_var(bound)),
    }
}

pub fn analyze(ctx: &Context, a: &AnalyzeArgs) -> Result<i32, CliError> {
    if a.sweep.is_none() && !a.ni {
        return Err(CliError::Usage("nothing to do: pass --sweep a:b and/or --ni".into()));
    }
    let p = load_program(ctx, &a.file)?;
    let inferred = tier_core::infer(&p, &ctx.registry, None)?;
    if !inferred.typable {
        eprintln!("warning: the program is untypable; the step-count and lookahead guarantees do not apply");
    }
    let mut report = serde_json::Map::new();
    let mut status = OK;

    if let Some((lo, hi)) = a.sweep {
        let phi = load_oracle(a.oracle.as_deref())?;
        let scale = match &a.scale {
            Some(x) => Var::new(x),
            None => default_scale_var(&p.body)
                .ok_or_else(|| CliError::Usage("no loop guard to take a scale variable from; pass --scale".into()))?,
        };
        let scales: Vec<usize> = if a.geometric {
            (lo..=hi).map(|k| 1usize << k.min(40)).collect()
        } else {
            (lo..=hi).collect()
        };
        let fixed = Store::from_bindings(a.inputs.iter().cloned());
        let inputs = |n: usize| {
            let mut s = fixed.clone();
            s.set(scale.clone(), tier_core::Word::unary(n));
            s
        };
        let rep = sweep(&p, &ctx.registry, inputs, &phi, &scales, a.fuel);
        if a.plot_data {
            print!("{}", rep.to_tsv());
        } else if ctx.json() {
            report.insert("sweep".into(), rep.to_json());
        } else {
            print!("{}", rep.to_table());
        }
    }

    if a.ni {
        let gamma: VarEnv = match (&a.gamma, &inferred.result) {
            (Some(g), _) => g.clone(),
            (None, Some(r)) => r.gamma.clone(),
            (None, None) => {
                eprintln!("non-interference: no safe environment exists");
                return Ok(UNTYPABLE);
            }
        };
        let mut results = Vec::new();
        for t in 0..=gamma.max_tier() {
            let seed = ctx.seed.wrapping_add(u64::from(t));
            match noninterference_test(&p, &ctx.registry, &gamma, t, a.trials, seed, NiConfig::default()) {
                Ok(r) => {
                    if r.counterexample.is_some() {
                        status = UNTYPABLE;
                    }
                    results.push(r);
                }
                Err(NiError::NotSafe) => {
                    eprintln!("non-interference: the program is not safe under Γ = {gamma}");
                    return Ok(UNTYPABLE);
                }
                Err(NiError::Type(e)) => return Err(e.into()),
            }
        }
        if ctx.json() {
            report.insert(
                "noninterference".into(),
                json!({ "gamma": gamma, "seed": ctx.seed, "results": results }),
            );
        } else {
            println!("non-interference under Γ = {gamma} (seed {})", ctx.seed);
            for r in &results {
                let verdict = if r.passed() { "PASS" } else { "FAIL" };
                print!(
                    "  tier {}: {verdict} ({} trials, {} inconclusive)",
                    r.tier, r.trials, r.inconclusive
                );
                match &r.counterexample {
                    Some(c) => println!("; stores differ on `{}` after trial {}", c.differing, c.trial),
                    None => println!(),
                }
            }
        }
    }

    if ctx.json() && !a.plot_data {
        report.insert("typable".into(), json!(inferred.typable));
        print_json(&serde_json::Value::Object(report));
    }
    Ok(status)
}

pub fn corpus_check(ctx: &Context, a: &CorpusArgs) -> Result<i32, CliError> {
    let corpus = match &a.dir {
        Some(d) => Corpus::load(d, &ctx.registry)?,
        None => Corpus::embedded(&ctx.registry)?,
    };
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut all_ok = true;
    for e in corpus.iter() {
        let out = tier_core::infer(&e.program, &ctx.registry, e.meta.t_max)?;
        let got = if out.typable { Verdict::Typable } else { Verdict::Untypable };
        let documented = match (e.gamma(), e.triple()) {
            (Some(g), Some(t)) => Some(tier_core::check(&e.program, &g, t, &ctx.registry)?.is_some()),
            _ => None,
        };
        let ok = got == e.meta.expect && documented != Some(false);
        all_ok &= ok;
        let verdict = |v: Verdict| if v == Verdict::Typable { "typable" } else { "untypable" };
        let typing = out
            .result
            .as_ref()
            .map(|r| format!("  Γ = {}  triple = {}", r.gamma, r.triple))
            .unwrap_or_default();
        let note = if documented == Some(false) { "  (documented typing rejected)" } else { "" };
        lines.push(format!(
            "{} {:<16} {:<10} (expected {}){typing}{note}",
            if ok { "ok  " } else { "FAIL" },
            e.name(),
            verdict(got),
            verdict(e.meta.expect),
        ));
        rows.push(json!({
            "name": e.name(),
            "expected": e.meta.expect,
            "inferred": got,
            "gamma": out.result.as_ref().map(|r| &r.gamma),
            "triple": out.result.as_ref().map(|r| r.triple),
            "documented_typing_checks": documented,
            "ok": ok,
        }));
    }
    if ctx.json() {
        print_json(&json!({ "ok": all_ok, "programs": rows }));
    } else {
        for l in &lines {
            println!("{l}");
        }
        println!("{}", if all_ok { "corpus: all verdicts match" } else { "corpus: mismatches found" });
    }
    Ok(if all_ok { OK } else { UNTYPABLE })
}
