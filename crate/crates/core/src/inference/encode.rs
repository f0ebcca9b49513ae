//! Typing constraints as 2-CNF.
//!
//! Every tracked entity `a` owns bits `a_0 … a_T` meaning "tier of `a` is
//! at most `i`", tied together by `a_i ⇒ a_{i+1}` and the unit `a_T`.
//! Tier comparisons become short clause schemas:
//!
//! | constraint | clauses                                   |
//! |------------|-------------------------------------------|
//! | `a ⪯ b`    | `b_i ⇒ a_i` for every `i`                 |
//! | `a ≺ b`    | `b_{i+1} ⇒ a_i` for `i < T`, unit `¬b_0`  |
//! | `a = b`    | `a ⪯ b` and `b ⪯ a`                       |
//! | `a ⪯ k`    | unit `a_k`                                |
//! | `a ⪰ k`    | unit `¬a_{k-1}`                           |
//!
//! Entities are variables, operator and oracle applications and command
//! nodes. Variable leaves reuse their variable's bits; an oracle call
//! reuses the bits of its data argument, whose tier it must equal. The
//! inner and outer channels are never fresh: every judgment inherits them
//! from the root or from the guard of the nearest enclosing loop, so they
//! are handed down as references to existing entities.
//!
//! Which while rule applies is fixed per [`Mode`]. The outer tier of every
//! top-level command equals the root's, and no command under a loop can
//! have outer tier 0, so (W0) is usable exactly when the root's outer tier
//! is 0, and then only on top-level loops. Each mode is a pure 2-SAT
//! instance.

use std::collections::BTreeMap;

use crate::operators::Registry;
use crate::syntax::{Cmd, Expr, Program, Var};
use crate::tiers::{Tier, TypeError, TypedTriple, VarEnv};

use super::sat::{solve_2sat, ClauseSet, Lit};

/// Index of an entity's bit block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Chan(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Root outer tier 0; top-level loops use (W0).
    Zero,
    /// Root outer tier at least 1; every loop uses (W).
    Positive,
}

/// Mirrors the AST: the `(t, t_in, t_out)` channels of one judgment and
/// the shapes of its premises in syntactic order. An assignment's first
/// child is its target variable.
#[derive(Debug, Clone)]
pub struct Shape {
    pub chans: [Chan; 3],
    pub children: Vec<Shape>,
}

#[derive(Debug, Clone)]
pub struct Encoding {
    pub clauses: ClauseSet,
    pub t_max: Tier,
    pub mode: Mode,
    pub entities: u32,
    pub vars: BTreeMap<Var, Chan>,
    pub root_in: Chan,
    pub root_out: Chan,
    pub body: Shape,
}

impl Encoding {
    fn width(&self) -> u32 {
        self.t_max + 1
    }

    pub fn solve(&self) -> Option<Vec<bool>> {
        solve_2sat(&self.clauses)
    }

    /// The least `i` whose bit "tier ⪯ i" holds.
    pub fn decode(&self, c: Chan, model: &[bool]) -> Tier {
        let base = (c.0 * self.width()) as usize;
        (0..=self.t_max)
            .find(|&i| model[base + i as usize])
            .expect("the top bit of every entity is a unit")
    }

    pub fn decode_triple(&self, s: &Shape, model: &[bool]) -> TypedTriple {
        TypedTriple::new(
            self.decode(s.chans[0], model),
            self.decode(s.chans[1], model),
            self.decode(s.chans[2], model),
        )
    }

    /// `(tier of the body before subtyping, t_in, t_out)` at the root.
    pub fn root_triple(&self, model: &[bool]) -> TypedTriple {
        self.decode_triple(&self.body, model)
    }

    pub fn gamma(&self, model: &[bool]) -> VarEnv {
        self.vars
            .iter()
            .map(|(x, &c)| (x.clone(), self.decode(c, model)))
            .collect()
    }

    /// Every entity's bits rise exactly once.
    pub fn is_monotone(&self, model: &[bool]) -> bool {
        (0..self.entities).all(|e| {
            let base = (e * self.width()) as usize;
            let bits = &model[base..base + self.width() as usize];
            bits.windows(2).all(|w| !w[0] || w[1]) && bits[self.t_max as usize]
        })
    }
}

struct Encoder<'a> {
    registry: &'a Registry,
    t: Tier,
    mode: Mode,
    entities: u32,
    clauses: ClauseSet,
    vars: BTreeMap<Var, Chan>,
}

impl Encoder<'_> {
    fn bit(&self, c: Chan, i: Tier) -> Lit {
        debug_assert!(i <= self.t);
        Lit::pos(c.0 * (self.t + 1) + i)
    }

    fn fresh(&mut self) -> Chan {
        let c = Chan(self.entities);
        self.entities += 1;
        self.clauses.num_vars += self.t + 1;
        for i in 0..self.t {
            self.clauses.implies(self.bit(c, i), self.bit(c, i + 1));
        }
        self.clauses.unit(self.bit(c, self.t));
        c
    }

    fn var(&mut self, x: &Var) -> Chan {
        if let Some(&c) = self.vars.get(x) {
            return c;
        }
        let c = self.fresh();
        self.vars.insert(x.clone(), c);
        c
    }

    /// `a ⪯ b`
    fn le(&mut self, a: Chan, b: Chan) {
        if a == b {
            return;
        }
        for i in 0..=self.t {
            self.clauses.implies(self.bit(b, i), self.bit(a, i));
        }
    }

    /// `a ≺ b`
    fn lt(&mut self, a: Chan, b: Chan) {
        for i in 0..self.t {
            self.clauses.implies(self.bit(b, i + 1), self.bit(a, i));
        }
        self.clauses.unit(self.bit(b, 0).negate());
    }

    fn eq(&mut self, a: Chan, b: Chan) {
        self.le(a, b);
        self.le(b, a);
    }

    /// `a ⪯ k`
    fn le_const(&mut self, a: Chan, k: Tier) {
        if k < self.t {
            self.clauses.unit(self.bit(a, k));
        }
    }

    /// `a ⪰ k`
    fn ge_const(&mut self, a: Chan, k: Tier) {
        if k > 0 {
            // beyond the bit range the constraint is simply unsatisfiable
            let i = (k - 1).min(self.t);
            self.clauses.unit(self.bit(a, i).negate());
        }
    }

    fn eq_const(&mut self, a: Chan, k: Tier) {
        self.le_const(a, k);
        self.ge_const(a, k);
    }

    fn expr(&mut self, e: &Expr, t_in: Chan, t_out: Chan) -> Result<Shape, TypeError> {
        let shape = |tier, children| Shape {
            chans: [tier, t_in, t_out],
            children,
        };
        match e {
            Expr::Var { name } => {
                let c = self.var(name);
                Ok(shape(c, vec![]))
            }
            Expr::Lit { .. } => {
                let c = self.fresh();
                self.le(c, t_in);
                Ok(shape(c, vec![]))
            }
            Expr::Op { op, args } => {
                let positive = self
                    .registry
                    .get(op)
                    .ok_or_else(|| TypeError::UnknownOperator(op.clone()))?
                    .is_positive();
                let mut kids = Vec::with_capacity(args.len());
                for a in args {
                    kids.push(self.expr(a, t_in, t_out)?);
                }
                let c = self.fresh();
                self.le(c, t_in);
                for k in &kids {
                    self.le(c, k.chans[0]);
                    self.le(k.chans[0], t_in);
                }
                if positive {
                    self.lt(c, t_in);
                }
                Ok(shape(c, kids))
            }
            Expr::Oracle { data, bound } => {
                let d = self.expr(data, t_in, t_out)?;
                let b = self.expr(bound, t_in, t_out)?;
                let c = d.chans[0];
                self.lt(c, t_in);
                self.le(c, t_out);
                self.eq(b.chans[0], t_out);
                Ok(shape(c, vec![d, b]))
            }
        }
    }

    fn cmd(&mut self, c: &Cmd, t_in: Chan, t_out: Chan, under_loop: bool) -> Result<Shape, TypeError> {
        let shape = |tier, children| Shape {
            chans: [tier, t_in, t_out],
            children,
        };
        match c {
            Cmd::Skip => {
                let t = self.fresh();
                self.eq_const(t, 0);
                Ok(shape(t, vec![]))
            }
            Cmd::Assign { var, expr } => {
                let x = self.var(var);
                let e = self.expr(expr, t_in, t_out)?;
                self.le(x, e.chans[0]);
                let target = Shape {
                    chans: [x, t_in, t_out],
                    children: vec![],
                };
                Ok(shape(x, vec![target, e]))
            }
            Cmd::Seq { first, rest } => {
                let a = self.cmd(first, t_in, t_out, under_loop)?;
                let b = self.cmd(rest, t_in, t_out, under_loop)?;
                let t = self.fresh();
                self.le(a.chans[0], t);
                self.le(b.chans[0], t);
                Ok(shape(t, vec![a, b]))
            }
            Cmd::If {
                guard,
                then_branch,
                else_branch,
            } => {
                let g = self.expr(guard, t_in, t_out)?;
                let t = g.chans[0];
                let a = self.cmd(then_branch, t_in, t_out, under_loop)?;
                let b = self.cmd(else_branch, t_in, t_out, under_loop)?;
                self.le(a.chans[0], t);
                self.le(b.chans[0], t);
                Ok(shape(t, vec![g, a, b]))
            }
            Cmd::While { guard, body } => {
                if !under_loop && self.mode == Mode::Zero {
                    // (W0): guard (t, t_in, t), body (t, t, t)
                    let t = self.fresh();
                    let g = self.expr(guard, t_in, t)?;
                    self.eq(g.chans[0], t);
                    self.ge_const(t, 1);
                    let b = self.cmd(body, t, t, true)?;
                    self.le(b.chans[0], t);
                    Ok(shape(t, vec![g, b]))
                } else {
                    // (W): guard (t, t_in, t_out), body (t, t, t_out), 1 ⪯ t ⪯ t_out
                    let g = self.expr(guard, t_in, t_out)?;
                    let t = g.chans[0];
                    self.ge_const(t, 1);
                    self.le(t, t_out);
                    let b = self.cmd(body, t, t_out, true)?;
                    self.le(b.chans[0], t);
                    Ok(shape(t, vec![g, b]))
                }
            }
        }
    }
}

/// Encodes typability of `p` with tiers bounded by `t_max`.
pub fn encode(p: &Program, registry: &Registry, t_max: Tier, mode: Mode) -> Result<Encoding, TypeError> {
    encode_constrained(p, registry, t_max, mode, None, None)
}

/// As [`encode`], optionally pinning `Γ` and the program-level triple. A
/// pinned triple bounds the body's tier from above (subtyping may raise
/// it) and fixes the inner and outer tiers.
pub fn encode_constrained(
    p: &Program,
    registry: &Registry,
    t_max: Tier,
    mode: Mode,
    gamma: Option<&VarEnv>,
    triple: Option<TypedTriple>,
) -> Result<Encoding, TypeError> {
    let mut enc = Encoder {
        registry,
        t: t_max,
        mode,
        entities: 0,
        clauses: ClauseSet::new(0),
        vars: BTreeMap::new(),
    };
    for x in p.variables() {
        enc.var(&x);
    }
    let root_in = enc.fresh();
    let root_out = enc.fresh();
    match mode {
        Mode::Zero => enc.eq_const(root_out, 0),
        Mode::Positive => enc.ge_const(root_out, 1),
    }
    let body = enc.cmd(&p.body, root_in, root_out, false)?;
    if let Some(gamma) = gamma {
        for (x, &c) in enc.vars.clone().iter() {
            let t = gamma
                .get(x)
                .ok_or_else(|| TypeError::UnboundVariableInGamma(x.clone()))?;
            enc.eq_const(c, t);
        }
    }
    if let Some(tr) = triple {
        enc.le_const(body.chans[0], tr.tier);
        enc.eq_const(root_in, tr.inner);
        enc.eq_const(root_out, tr.outer);
    }
    Ok(Encoding {
        clauses: enc.clauses,
        t_max,
        mode,
        entities: enc.entities,
        vars: enc.vars,
        root_in,
        root_out,
        body,
    })
}
