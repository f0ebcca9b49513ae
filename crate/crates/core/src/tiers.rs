//! Tiers, operator types and typing derivations.
//!
//! Judgments have the shape `Γ, Δ ⊢ s : (t, t_in, t_out)`. The checker
//! fixes `Γ` and the program-level triple and hands the remaining choices
//! (operator return tiers, subtyping, which while rule applies) to the
//! 2-SAT encoder; a model is then turned back into a derivation tree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::inference::encode::{self, Encoding, Mode, Shape};
use crate::operators::{OperatorSpec, Registry};
use crate::syntax::{one_line_cmd, program_size, Cmd, Expr, Program, Var};

pub type Tier = u32;

/// `(t, t_in, t_out)`
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypedTriple {
    pub tier: Tier,
    pub inner: Tier,
    pub outer: Tier,
}

impl TypedTriple {
    pub const fn new(tier: Tier, inner: Tier, outer: Tier) -> Self {
        TypedTriple { tier, inner, outer }
    }

    pub fn max_component(&self) -> Tier {
        self.tier.max(self.inner).max(self.outer)
    }
}

impl Serialize for TypedTriple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.tier, self.inner, self.outer].serialize(s)
    }
}

impl fmt::Display for TypedTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.tier, self.inner, self.outer)
    }
}

/// `Γ`
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct VarEnv(BTreeMap<Var, Tier>);

impl VarEnv {
    pub fn new() -> Self {
        VarEnv::default()
    }

    pub fn get(&self, x: &Var) -> Option<Tier> {
        self.0.get(x).copied()
    }

    pub fn insert(&mut self, x: Var, t: Tier) {
        self.0.insert(x, t);
    }

    pub fn with(mut self, x: &str, t: Tier) -> Self {
        self.insert(Var::new(x), t);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, Tier)> {
        self.0.iter().map(|(v, &t)| (v, t))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_tier(&self) -> Tier {
        self.0.values().copied().max().unwrap_or(0)
    }
}

impl FromIterator<(Var, Tier)> for VarEnv {
    fn from_iter<I: IntoIterator<Item = (Var, Tier)>>(it: I) -> Self {
        VarEnv(it.into_iter().collect())
    }
}

impl fmt::Display for VarEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(v, t)| format!("{v}: {t}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `t₁ → … → tₙ → t`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OpType {
    pub args: Vec<Tier>,
    pub ret: Tier,
}

impl fmt::Display for OpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.args {
            write!(f, "{a}→")?;
        }
        write!(f, "{}", self.ret)
    }
}

impl OpType {
    /// Whether the type belongs to the safe environment `Δ(op)(t_in)`.
    /// Arity-0 operators (and literals) may take any tier up to `t_in`.
    pub fn is_admissible(&self, positive: bool, t_in: Tier) -> bool {
        if self.args.is_empty() {
            return self.ret <= t_in;
        }
        let lo = *self.args.iter().min().expect("nonempty");
        let hi = *self.args.iter().max().expect("nonempty");
        self.ret <= lo && hi <= t_in && (!positive || self.ret < t_in)
    }
}

/// `Δ(op)(t_in)`, with every tier capped by `max_tier`.
pub fn admissible_op_types(op: &OperatorSpec, t_in: Tier, max_tier: Tier) -> BTreeSet<OpType> {
    let cap = t_in.min(max_tier);
    let positive = op.is_positive();
    let mut out = BTreeSet::new();
    let mut args = vec![0; op.arity];
    loop {
        let lo = args.iter().copied().min().unwrap_or(cap);
        for ret in 0..=lo {
            let ty = OpType {
                args: args.clone(),
                ret,
            };
            if ty.is_admissible(positive, t_in) {
                out.insert(ty);
            }
        }
        // odometer over argument tiers in 0..=cap
        let mut i = 0;
        loop {
            if i == args.len() {
                return out;
            }
            if args[i] < cap {
                args[i] += 1;
                break;
            }
            args[i] = 0;
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    V,
    OP,
    OR,
    SUB,
    SK,
    A,
    S,
    C,
    W,
    W0,
}

impl Rule {
    pub fn is_expression_rule(self) -> bool {
        matches!(self, Rule::V | Rule::OP | Rule::OR)
    }

    pub fn is_while_rule(self) -> bool {
        matches!(self, Rule::W | Rule::W0)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::V => "V",
            Rule::OP => "OP",
            Rule::OR => "OR",
            Rule::SUB => "SUB",
            Rule::SK => "SK",
            Rule::A => "A",
            Rule::S => "S",
            Rule::C => "C",
            Rule::W => "W",
            Rule::W0 => "W0",
        };
        f.write_str(s)
    }
}

/// One node of a typing derivation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub rule: Rule,
    /// The judged expression or command, on one line.
    pub subject: String,
    pub triple: TypedTriple,
    /// The variable read by a (V) node or written by an (A) node.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var: Option<Var>,
    /// Operator name of an (OP) node; `None` for literals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op_type: Option<OpType>,
    /// `V(e)` for expression nodes, `A(c)` for command nodes.
    #[serde(skip_serializing_if = "BTreeSet::is_empty")]
    pub vars: BTreeSet<Var>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Derivation>,
}

impl Derivation {
    fn leaf(rule: Rule, subject: String, triple: TypedTriple) -> Self {
        Derivation {
            rule,
            subject,
            triple,
            var: None,
            op: None,
            op_type: None,
            vars: BTreeSet::new(),
            children: Vec::new(),
        }
    }

    pub fn is_command(&self) -> bool {
        !self.rule.is_expression_rule()
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Derivation::size).sum::<usize>()
    }

    /// Pre-order traversal.
    pub fn nodes(&self) -> Vec<&Derivation> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            out.push(d);
            stack.extend(d.children.iter().rev());
        }
        out
    }

    pub fn count_rule(&self, rule: Rule) -> usize {
        self.nodes().iter().filter(|d| d.rule == rule).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("derivation serializes")
    }

    /// Indented text rendering, conclusion first.
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(&mut s, 0);
        s
    }

    fn render_into(&self, s: &mut String, depth: usize) {
        use std::fmt::Write;
        let ty = self
            .op_type
            .as_ref()
            .map(|t| format!("  [{t}]"))
            .unwrap_or_default();
        let _ = writeln!(
            s,
            "{:indent$}({}) {} : {}{}",
            "",
            self.rule,
            self.subject,
            self.triple,
            ty,
            indent = depth * 2
        );
        for c in &self.children {
            c.render_into(s, depth + 1);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("variable `{0}` has no tier in the environment")]
    UnboundVariableInGamma(Var),
}

/// Searches for a derivation of `Γ ⊢ body(p) : triple`.
pub fn check(
    p: &Program,
    gamma: &VarEnv,
    triple: TypedTriple,
    registry: &Registry,
) -> Result<Option<Derivation>, TypeError> {
    for x in p.variables() {
        if gamma.get(&x).is_none() {
            return Err(TypeError::UnboundVariableInGamma(x));
        }
    }
    let t_max = (program_size(p) as Tier)
        .max(gamma.max_tier())
        .max(triple.max_component());
    let mode = if triple.outer == 0 {
        Mode::Zero
    } else {
        Mode::Positive
    };
    let enc = encode::encode_constrained(p, registry, t_max, mode, Some(gamma), Some(triple))?;
    let Some(model) = enc.solve() else {
        return Ok(None);
    };
    Ok(Some(build_derivation(p, &enc, &model, gamma, triple.tier)))
}

/// Decides whether some triple types `p` under `Γ` and returns the
/// lexicographically least one with its derivation.
///
/// Within one while-rule mode the model picked by the solver minimizes
/// every tier at once, so the least triple is the better of the two
/// modes' minimal models.
pub fn check_any(
    p: &Program,
    gamma: &VarEnv,
    registry: &Registry,
) -> Result<Option<(TypedTriple, Derivation)>, TypeError> {
    for x in p.variables() {
        if gamma.get(&x).is_none() {
            return Err(TypeError::UnboundVariableInGamma(x));
        }
    }
    let t_max = (program_size(p) as Tier).max(gamma.max_tier());
    let mut best: Option<TypedTriple> = None;
    for mode in [Mode::Zero, Mode::Positive] {
        let enc = encode::encode_constrained(p, registry, t_max, mode, Some(gamma), None)?;
        if let Some(model) = enc.solve() {
            let t = enc.root_triple(&model);
            if best.is_none_or(|b| t < b) {
                best = Some(t);
            }
        }
    }
    match best {
        None => Ok(None),
        Some(t) => Ok(check(p, gamma, t, registry)?.map(|d| (t, d))),
    }
}

pub(crate) fn build_derivation(
    p: &Program,
    enc: &Encoding,
    model: &[bool],
    gamma: &VarEnv,
    required: Tier,
) -> Derivation {
    let oracle = p.oracle.as_deref().unwrap_or("phi");
    let b = Builder {
        enc,
        model,
        gamma,
        oracle,
    };
    let d = b.cmd(&p.body, &enc.body);
    lift(d, required)
}

struct Builder<'a> {
    enc: &'a Encoding,
    model: &'a [bool],
    gamma: &'a VarEnv,
    oracle: &'a str,
}

impl Builder<'_> {
    fn triple(&self, s: &Shape) -> TypedTriple {
        self.enc.decode_triple(s, self.model)
    }

    fn expr(&self, e: &Expr, s: &Shape) -> Derivation {
        let triple = self.triple(s);
        let subject = e.display(self.oracle).to_string();
        let mut d = match e {
            Expr::Var { name } => {
                let mut d = Derivation::leaf(Rule::V, subject, triple);
                debug_assert_eq!(self.gamma.get(name), Some(triple.tier));
                d.var = Some(name.clone());
                d
            }
            Expr::Lit { .. } => {
                let mut d = Derivation::leaf(Rule::OP, subject, triple);
                d.op_type = Some(OpType {
                    args: vec![],
                    ret: triple.tier,
                });
                d
            }
            Expr::Op { op, args } => {
                let children: Vec<Derivation> = args
                    .iter()
                    .zip(&s.children)
                    .map(|(a, cs)| self.expr(a, cs))
                    .collect();
                let mut d = Derivation::leaf(Rule::OP, subject, triple);
                d.op = Some(op.clone());
                d.op_type = Some(OpType {
                    args: children.iter().map(|c| c.triple.tier).collect(),
                    ret: triple.tier,
                });
                d.children = children;
                d
            }
            Expr::Oracle { data, bound } => {
                let mut d = Derivation::leaf(Rule::OR, subject, triple);
                d.children = vec![
                    self.expr(data, &s.children[0]),
                    self.expr(bound, &s.children[1]),
                ];
                d
            }
        };
        d.vars = e.variables();
        d
    }

    fn cmd(&self, c: &Cmd, s: &Shape) -> Derivation {
        let triple = self.triple(s);
        let subject = one_line_cmd(c, self.oracle);
        let mut d = match c {
            Cmd::Skip => Derivation::leaf(Rule::SK, subject, triple),
            Cmd::Assign { var, expr } => {
                let mut d = Derivation::leaf(Rule::A, subject, triple);
                let mut target = Derivation::leaf(Rule::V, var.to_string(), self.triple(&s.children[0]));
                target.var = Some(var.clone());
                target.vars.insert(var.clone());
                d.var = Some(var.clone());
                d.children = vec![target, self.expr(expr, &s.children[1])];
                d
            }
            Cmd::Seq { first, rest } => {
                let mut d = Derivation::leaf(Rule::S, subject, triple);
                d.children = vec![
                    lift(self.cmd(first, &s.children[0]), triple.tier),
                    lift(self.cmd(rest, &s.children[1]), triple.tier),
                ];
                d
            }
            Cmd::If {
                guard,
                then_branch,
                else_branch,
            } => {
                let mut d = Derivation::leaf(Rule::C, subject, triple);
                d.children = vec![
                    self.expr(guard, &s.children[0]),
                    lift(self.cmd(then_branch, &s.children[1]), triple.tier),
                    lift(self.cmd(else_branch, &s.children[2]), triple.tier),
                ];
                d
            }
            Cmd::While { guard, body } => {
                let rule = if triple.outer == 0 { Rule::W0 } else { Rule::W };
                let mut d = Derivation::leaf(rule, subject, triple);
                d.children = vec![
                    self.expr(guard, &s.children[0]),
                    lift(self.cmd(body, &s.children[1]), triple.tier),
                ];
                d
            }
        };
        d.vars = c.assigned_vars();
        d
    }
}

/// Wraps `d` in (SUB) steps until its tier reaches `tier`.
fn lift(mut d: Derivation, tier: Tier) -> Derivation {
    debug_assert!(d.triple.tier <= tier);
    while d.triple.tier < tier {
        let triple = TypedTriple::new(d.triple.tier + 1, d.triple.inner, d.triple.outer);
        let mut up = Derivation::leaf(Rule::SUB, d.subject.clone(), triple);
        up.vars = d.vars.clone();
        up.children = vec![d];
        d = up;
    }
    d
}

/// A rule whose side conditions fail at some node.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("({rule}) at `{subject}` : {triple}: {message}")]
pub struct RuleViolation {
    pub rule: Rule,
    pub subject: String,
    pub triple: TypedTriple,
    pub message: String,
}

/// Re-checks every node's local side conditions, independently of the
/// encoder that produced the tree.
pub fn verify_rules(d: &Derivation, gamma: &VarEnv, registry: &Registry) -> Result<(), RuleViolation> {
    for node in d.nodes() {
        if let Err(message) = verify_node(node, gamma, registry) {
            return Err(RuleViolation {
                rule: node.rule,
                subject: node.subject.clone(),
                triple: node.triple,
                message,
            });
        }
    }
    Ok(())
}

fn verify_node(d: &Derivation, gamma: &VarEnv, registry: &Registry) -> Result<(), String> {
    let TypedTriple {
        tier: t,
        inner,
        outer,
    } = d.triple;
    let kids = &d.children;
    let expect = |cond: bool, msg: &str| if cond { Ok(()) } else { Err(msg.to_string()) };
    let arity = |n: usize| expect(kids.len() == n, &format!("expected {n} premise(s), found {}", kids.len()));
    let is_expr = |k: &Derivation| k.rule.is_expression_rule();
    let same_ctx = |k: &Derivation| k.triple.inner == inner && k.triple.outer == outer;

    match d.rule {
        Rule::V => {
            arity(0)?;
            let x = d.var.as_ref().ok_or("variable missing")?;
            expect(gamma.get(x) == Some(t), "tier differs from Γ")
        }
        Rule::OP => {
            let ty = d.op_type.as_ref().ok_or("operator type missing")?;
            arity(ty.args.len())?;
            expect(ty.ret == t, "return tier differs from the judgment")?;
            for (k, &a) in kids.iter().zip(&ty.args) {
                expect(is_expr(k), "operand is not an expression")?;
                expect(k.triple.tier == a, "operand tier differs from the operator type")?;
                expect(same_ctx(k), "operand context differs")?;
            }
            let positive = match &d.op {
                Some(name) => {
                    let spec = registry.get(name).ok_or("unknown operator")?;
                    expect(spec.arity == ty.args.len(), "arity mismatch")?;
                    spec.is_positive()
                }
                None => false,
            };
            expect(ty.is_admissible(positive, inner), "operator type is not in Δ(op)(t_in)")
        }
        Rule::OR => {
            arity(2)?;
            expect(kids.iter().all(is_expr) && kids.iter().all(same_ctx), "premise context differs")?;
            expect(kids[0].triple.tier == t, "data tier differs from the call tier")?;
            expect(kids[1].triple.tier == outer, "bound tier differs from t_out")?;
            expect(t < inner, "call tier is not below t_in")?;
            expect(t <= outer, "call tier exceeds t_out")
        }
        Rule::SUB => {
            arity(1)?;
            let k = &kids[0];
            expect(!is_expr(k), "subtyping applied to an expression")?;
            expect(k.triple.tier + 1 == t && same_ctx(k), "premise is not one tier lower")
        }
        Rule::SK => {
            arity(0)?;
            expect(t == 0, "skip is not tier 0")
        }
        Rule::A => {
            arity(2)?;
            expect(kids[0].rule == Rule::V && kids[0].var == d.var, "target premise missing")?;
            expect(is_expr(&kids[1]), "right-hand side is not an expression")?;
            expect(kids.iter().all(same_ctx), "premise context differs")?;
            expect(kids[0].triple.tier == t, "command tier differs from the target's tier")?;
            expect(t <= kids[1].triple.tier, "data flows upward")
        }
        Rule::S => {
            arity(2)?;
            expect(kids.iter().all(|k| !is_expr(k) && k.triple == d.triple), "premise triple differs")
        }
        Rule::C => {
            arity(3)?;
            expect(is_expr(&kids[0]) && kids[0].triple == d.triple, "guard triple differs")?;
            expect(
                kids[1..].iter().all(|k| !is_expr(k) && k.triple == d.triple),
                "branch triple differs",
            )
        }
        Rule::W => {
            arity(2)?;
            expect(is_expr(&kids[0]) && kids[0].triple == d.triple, "guard triple differs")?;
            expect(
                !is_expr(&kids[1]) && kids[1].triple == TypedTriple::new(t, t, outer),
                "body is not typed (t, t, t_out)",
            )?;
            expect(1 <= t && t <= outer, "needs 1 ⪯ t ⪯ t_out")
        }
        Rule::W0 => {
            arity(2)?;
            expect(
                is_expr(&kids[0]) && kids[0].triple == TypedTriple::new(t, inner, t),
                "guard is not typed (t, t_in, t)",
            )?;
            expect(
                !is_expr(&kids[1]) && kids[1].triple == TypedTriple::new(t, t, t),
                "body is not typed (t, t, t)",
            )?;
            expect(1 <= t && outer == 0, "needs 1 ⪯ t and t_out = 0")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AuditCheck {
    /// Expression tiers never exceed the tiers of the variables they read.
    SimpleSecurity,
    /// Command tiers never decrease from premise to conclusion.
    Monotonicity,
    /// A command of tier `t` only assigns variables of tier at most `t`.
    Confinement,
    /// Commands under a while loop have inner tier at most the loop's.
    InnerTierBound,
    /// Commands under a while loop have outer tier at least the loop's.
    OuterTierBound,
}

impl fmt::Display for AuditCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AuditCheck::SimpleSecurity => "simple security",
            AuditCheck::Monotonicity => "tier monotonicity",
            AuditCheck::Confinement => "confinement",
            AuditCheck::InnerTierBound => "inner-tier bound",
            AuditCheck::OuterTierBound => "outer-tier bound",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
#[error("{check} violated at `{subject}` : {triple}: {detail}")]
pub struct AuditViolation {
    pub check: AuditCheck,
    pub subject: String,
    pub triple: TypedTriple,
    pub detail: String,
}

/// Runs the structural audits over every node of `d`; returns the first
/// violation in pre-order.
pub fn audit_derivation(d: &Derivation, gamma: &VarEnv) -> Result<(), AuditViolation> {
    let tier_of = |x: &Var| gamma.get(x).unwrap_or(0);
    for node in d.nodes() {
        let fail = |check, detail: String| AuditViolation {
            check,
            subject: node.subject.clone(),
            triple: node.triple,
            detail,
        };
        let t = node.triple.tier;
        if node.rule.is_expression_rule() {
            if let Some(x) = node.vars.iter().find(|x| tier_of(x) < t) {
                return Err(fail(
                    AuditCheck::SimpleSecurity,
                    format!("reads `{x}` of tier {}", tier_of(x)),
                ));
            }
            continue;
        }
        if let Some(x) = node.vars.iter().find(|x| tier_of(x) > t) {
            return Err(fail(
                AuditCheck::Confinement,
                format!("assigns `{x}` of tier {}", tier_of(x)),
            ));
        }
        for k in node.children.iter().filter(|k| k.is_command()) {
            if k.triple.tier > t {
                return Err(fail(
                    AuditCheck::Monotonicity,
                    format!("premise `{}` has tier {}", k.subject, k.triple.tier),
                ));
            }
        }
        if node.rule.is_while_rule() {
            for k in node.children.iter().filter(|k| k.is_command()) {
                for sub in k.nodes().into_iter().filter(|s| s.is_command()) {
                    if sub.triple.inner > t {
                        return Err(fail(
                            AuditCheck::InnerTierBound,
                            format!("`{}` has inner tier {}", sub.subject, sub.triple.inner),
                        ));
                    }
                    if sub.triple.outer < t {
                        return Err(fail(
                            AuditCheck::OuterTierBound,
                            format!("`{}` has outer tier {}", sub.subject, sub.triple.outer),
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn types(name: &str, t_in: Tier) -> BTreeSet<String> {
        let reg = Registry::builtin();
        admissible_op_types(reg.get(name).unwrap(), t_in, 10)
            .into_iter()
            .map(|t| t.to_string())
            .collect()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn successor_types() {
        assert_eq!(types("suc1", 1), set(&["1→0", "0→0"]));
        assert_eq!(types("suc0", 2), set(&["2→1", "2→0", "1→1", "1→0", "0→0"]));
    }

    #[test]
    fn predecessor_types() {
        assert_eq!(
            types("pred", 2),
            set(&["2→2", "2→1", "2→0", "1→1", "1→0", "0→0"])
        );
    }

    #[test]
    fn equality_types() {
        let eq = types("eq", 1);
        assert!(eq.contains("1→1→1"));
        assert!(!eq.contains("0→1→1"));
        let expected = set(&["1→1→1", "0→0→0", "0→1→0", "1→0→0", "1→1→0"]);
        assert_eq!(eq, expected);
    }

    #[test]
    fn max_tier_caps_enumeration() {
        let reg = Registry::builtin();
        let all = admissible_op_types(reg.get("pred").unwrap(), 5, 1);
        assert!(all.iter().all(|t| t.args[0] <= 1));
    }

    fn addition() -> Program {
        parse(
            "while (gt0(x)) { x := pred(x); y := suc1(y) } return y",
            &Registry::builtin(),
        )
        .unwrap()
    }

    #[test]
    fn addition_derivation_shape() {
        let reg = Registry::builtin();
        let gamma = VarEnv::new().with("x", 1).with("y", 0);
        let d = check(&addition(), &gamma, TypedTriple::new(1, 1, 0), &reg)
            .unwrap()
            .expect("typable");
        assert_eq!(d.rule, Rule::W0);
        assert_eq!(d.triple, TypedTriple::new(1, 1, 0));
        let body = &d.children[1];
        assert_eq!(body.rule, Rule::S);
        assert_eq!(body.triple, TypedTriple::new(1, 1, 1));
        assert_eq!(body.children[0].rule, Rule::A);
        assert_eq!(body.children[1].rule, Rule::SUB);
        assert_eq!(body.children[1].children[0].rule, Rule::A);
        assert_eq!(body.children[1].children[0].triple, TypedTriple::new(0, 1, 1));
        verify_rules(&d, &gamma, &reg).unwrap();
        audit_derivation(&d, &gamma).unwrap();
    }

    #[test]
    fn addition_wrong_environment() {
        let reg = Registry::builtin();
        let gamma = VarEnv::new().with("x", 1).with("y", 1);
        assert!(check(&addition(), &gamma, TypedTriple::new(1, 1, 0), &reg)
            .unwrap()
            .is_none());
    }

    #[test]
    fn missing_variable_is_an_error() {
        let reg = Registry::builtin();
        let gamma = VarEnv::new().with("x", 1);
        let e = check(&addition(), &gamma, TypedTriple::new(1, 1, 0), &reg).unwrap_err();
        assert_eq!(e, TypeError::UnboundVariableInGamma(Var::new("y")));
    }

    #[test]
    fn check_any_reports_least_triple() {
        let reg = Registry::builtin();
        let p = parse("y := x return y", &reg).unwrap();
        let gamma = VarEnv::new().with("x", 0).with("y", 0);
        let (t, _) = check_any(&p, &gamma, &reg).unwrap().unwrap();
        assert_eq!(t, TypedTriple::new(0, 0, 0));
        let gamma = VarEnv::new().with("x", 2).with("y", 1);
        let (t, _) = check_any(&p, &gamma, &reg).unwrap().unwrap();
        assert_eq!(t, TypedTriple::new(1, 0, 0));
    }

    #[test]
    fn confinement_breach_is_flagged() {
        let reg = Registry::builtin();
        let p = parse("x := y return x", &reg).unwrap();
        let gamma = VarEnv::new().with("x", 1).with("y", 1);
        let mut d = check(&p, &gamma, TypedTriple::new(1, 1, 0), &reg).unwrap().unwrap();
        audit_derivation(&d, &gamma).unwrap();
        let forged = VarEnv::new().with("x", 2).with("y", 1);
        let v = audit_derivation(&d, &forged).unwrap_err();
        assert_eq!(v.check, AuditCheck::Confinement);
        d.triple.tier = 0;
        assert!(verify_rules(&d, &gamma, &reg).is_err());
    }
}
