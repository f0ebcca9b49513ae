//! Big-step interpreter with oracle calls and execution traces.
//!
//! Every rule application counts as one step, leaves included. A loop
//! iteration therefore costs one step for the while rule, one for the
//! implicit sequence `c ; while(e){c}`, plus whatever the guard and body
//! cost.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::Registry;
use crate::syntax::{Cmd, Expr, Program, Var};
use crate::word::Word;

/// `v ↾ |w|`: the first `min(|w|, |v|)` symbols of `v`, padded with `10ᵏ`
/// so that the result has length exactly `|w| + 1`.
pub fn truncate_pad(v: &Word, w: &Word) -> Word {
    let keep = v.len().min(w.len());
    let pad = w.len() - keep;
    let mut tail = Word::empty();
    for _ in 0..pad {
        tail = tail.prepend(b'0');
    }
    tail = tail.prepend(b'1');
    let head: Vec<u8> = v.symbols().take(keep).collect();
    head.iter().rev().fold(tail, |acc, &s| acc.prepend(s))
}

/// A total store; unbound variables read as `ε`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Store {
    bindings: BTreeMap<Var, Word>,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn from_bindings<I: IntoIterator<Item = (Var, Word)>>(it: I) -> Self {
        Store {
            bindings: it.into_iter().collect(),
        }
    }

    pub fn get(&self, x: &Var) -> Word {
        self.bindings.get(x).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, x: Var, w: Word) {
        self.bindings.insert(x, w);
    }

    /// `|μ|`, summed over explicitly set variables.
    pub fn size(&self) -> usize {
        self.bindings.values().map(Word::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Word)> {
        self.bindings.iter()
    }
}

/// How an oracle answers queries that are not in its table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DefaultRule {
    Constant {
        #[serde(default)]
        value: Word,
    },
    /// `1^|query|`
    EchoLength,
}

impl Default for DefaultRule {
    fn default() -> Self {
        DefaultRule::Constant { value: Word::empty() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleEntry {
    pub query: Word,
    pub answer: Word,
}

/// On-disk oracle description.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OracleSpec {
    #[serde(default)]
    pub entries: Vec<OracleEntry>,
    #[serde(default)]
    pub default: DefaultRule,
    /// Serve every query through the padded variant (see [`pad_oracle`]).
    #[serde(default)]
    pub padded: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Oracle {
    table: HashMap<Word, Word>,
    default: DefaultRule,
    padded: bool,
}

impl Oracle {
    pub fn new(default: DefaultRule) -> Self {
        Oracle {
            table: HashMap::new(),
            default,
            padded: false,
        }
    }

    pub fn constant(w: Word) -> Self {
        Oracle::new(DefaultRule::Constant { value: w })
    }

    pub fn echo_length() -> Self {
        Oracle::new(DefaultRule::EchoLength)
    }

    pub fn with_entry(mut self, query: Word, answer: Word) -> Self {
        self.table.insert(query, answer);
        self
    }

    pub fn insert(&mut self, query: Word, answer: Word) {
        self.table.insert(query, answer);
    }

    pub fn is_padded(&self) -> bool {
        self.padded
    }

    pub fn from_spec(spec: OracleSpec) -> Self {
        Oracle {
            table: spec
                .entries
                .into_iter()
                .map(|e| (e.query, e.answer))
                .collect(),
            default: spec.default,
            padded: spec.padded,
        }
    }

    pub fn to_spec(&self) -> OracleSpec {
        let mut entries: Vec<OracleEntry> = self
            .table
            .iter()
            .map(|(q, a)| OracleEntry {
                query: q.clone(),
                answer: a.clone(),
            })
            .collect();
        entries.sort_by(|a, b| a.query.cmp(&b.query));
        OracleSpec {
            entries,
            default: self.default.clone(),
            padded: self.padded,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str::<OracleSpec>(text).map(Oracle::from_spec)
    }

    /// The underlying function, ignoring padding.
    pub fn raw_answer(&self, q: &Word) -> Word {
        if let Some(a) = self.table.get(q) {
            return a.clone();
        }
        match &self.default {
            DefaultRule::Constant { value } => value.clone(),
            DefaultRule::EchoLength => Word::unary(q.len()),
        }
    }

    pub fn answer(&self, q: &Word) -> Word {
        if !self.padded {
            return self.raw_answer(q);
        }
        let syms = q.to_vec();
        match syms.iter().rposition(|&s| s == b'1') {
            Some(i) if syms[i + 1..].iter().all(|&s| s == b'0') => {
                self.raw_answer(&Word::from_symbols(&syms[..i]))
            }
            // no `10ⁿ` suffix to strip: fall back to the raw query
            _ => self.raw_answer(q),
        }
    }
}

/// `φ̃`, which answers `w10ⁿ` with `φ(w)`.
pub fn pad_oracle(phi: &Oracle) -> Oracle {
    Oracle {
        padded: true,
        ..phi.clone()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExecutionTrace {
    pub steps: u64,
    /// `(query, answer)` pairs in execution order.
    pub oracle_log: Vec<(Word, Word)>,
    pub m: usize,
}

impl ExecutionTrace {
    pub fn query_lengths(&self) -> Vec<usize> {
        self.oracle_log.iter().map(|(q, _)| q.len()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("guard evaluated to {value:?}, which is neither 0 nor 1", value = .value.display_epsilon())]
    StuckGuard { value: Word },
    #[error("fuel exhausted after {steps} steps")]
    FuelExhausted { steps: u64 },
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
}

/// Evaluation context for one run.
pub struct Machine<'a> {
    registry: &'a Registry,
    oracle: &'a Oracle,
    fuel: Option<u64>,
    pub trace: ExecutionTrace,
}

impl<'a> Machine<'a> {
    pub fn new(registry: &'a Registry, oracle: &'a Oracle, fuel: Option<u64>) -> Self {
        Machine {
            registry,
            oracle,
            fuel,
            trace: ExecutionTrace::default(),
        }
    }

    fn tick(&mut self) -> Result<(), RuntimeError> {
        self.trace.steps += 1;
        match self.fuel {
            Some(f) if self.trace.steps > f => Err(RuntimeError::FuelExhausted { steps: f }),
            _ => Ok(()),
        }
    }

    pub fn eval_expr(&mut self, e: &Expr, mu: &Store) -> Result<Word, RuntimeError> {
        self.tick()?;
        match e {
            Expr::Var { name } => Ok(mu.get(name)),
            Expr::Lit { word } => Ok(word.clone()),
            Expr::Op { op, args } => {
                let spec = self
                    .registry
                    .get(op)
                    .ok_or_else(|| RuntimeError::UnknownOperator(op.clone()))?;
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval_expr(a, mu)?);
                }
                Ok(spec.apply(&vals))
            }
            Expr::Oracle { data, bound } => {
                let v = self.eval_expr(data, mu)?;
                let w = self.eval_expr(bound, mu)?;
                let q = truncate_pad(&v, &w);
                debug_assert!(!q.is_empty(), "oracle queried on the empty word");
                let u = self.oracle.answer(&q);
                self.trace.m = self.trace.m.max(u.len());
                self.trace.oracle_log.push((q, u.clone()));
                Ok(u)
            }
        }
    }

    fn guard(&mut self, e: &Expr, mu: &Store) -> Result<bool, RuntimeError> {
        let w = self.eval_expr(e, mu)?;
        if w.is_one() {
            Ok(true)
        } else if w.is_zero() {
            Ok(false)
        } else {
            Err(RuntimeError::StuckGuard { value: w })
        }
    }

    pub fn eval_cmd(&mut self, c: &Cmd, mu: &mut Store) -> Result<(), RuntimeError> {
        match c {
            Cmd::Skip => self.tick(),
            Cmd::Assign { var, expr } => {
                self.tick()?;
                let w = self.eval_expr(expr, mu)?;
                mu.set(var.clone(), w);
                Ok(())
            }
            Cmd::Seq { first, rest } => {
                self.tick()?;
                self.eval_cmd(first, mu)?;
                self.eval_cmd(rest, mu)
            }
            Cmd::If {
                guard,
                then_branch,
                else_branch,
            } => {
                self.tick()?;
                if self.guard(guard, mu)? {
                    self.eval_cmd(then_branch, mu)
                } else {
                    self.eval_cmd(else_branch, mu)
                }
            }
            Cmd::While { guard, body } => loop {
                self.tick()?;
                if !self.guard(guard, mu)? {
                    return Ok(());
                }
                // the unfolded `body ; while(e){body}` sequence
                self.tick()?;
                self.eval_cmd(body, mu)?;
            },
        }
    }
}

pub fn eval_expr(
    e: &Expr,
    mu: &Store,
    registry: &Registry,
    phi: &Oracle,
    trace: &mut ExecutionTrace,
) -> Result<Word, RuntimeError> {
    let mut m = Machine::new(registry, phi, None);
    m.trace = std::mem::take(trace);
    let r = m.eval_expr(e, mu);
    *trace = m.trace;
    r
}

pub fn eval_cmd(
    c: &Cmd,
    mu: &mut Store,
    registry: &Registry,
    phi: &Oracle,
    trace: &mut ExecutionTrace,
    fuel: Option<u64>,
) -> Result<(), RuntimeError> {
    let mut m = Machine::new(registry, phi, fuel);
    m.trace = std::mem::take(trace);
    let r = m.eval_cmd(c, mu);
    *trace = m.trace;
    r
}

/// Final state of a completed run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub result: Word,
    pub store: Store,
    pub trace: ExecutionTrace,
}

pub fn run_program(
    p: &Program,
    inputs: &Store,
    registry: &Registry,
    phi: &Oracle,
    fuel: Option<u64>,
) -> Result<RunResult, RuntimeError> {
    let mut m = Machine::new(registry, phi, fuel);
    m.trace.m = inputs.size();
    let mut mu = inputs.clone();
    m.tick()?;
    m.eval_cmd(&p.body, &mut mu)?;
    Ok(RunResult {
        result: mu.get(&p.ret),
        store: mu,
        trace: m.trace,
    })
}
