//! Exhaustive typability oracle.
//!
//! Works directly from the typing rules: for a fixed environment and a
//! fixed `(t_in, t_out)` context it computes, bottom-up, the set of tiers
//! each expression can have and the (subtyping-closed) set of tiers each
//! command can have. Sets are bitmasks over `0..=max_tier`. Nothing here
//! touches the encoder, the solver or the operator-type enumeration.

use std::collections::BTreeMap;

use tier_core::syntax::{Cmd, Expr, Program, Var};
use tier_core::Registry;

type Mask = u32;

pub struct BruteForce<'a> {
    pub registry: &'a Registry,
    pub max_tier: u32,
}

fn bit(t: u32) -> Mask {
    1 << t
}

impl<'a> BruteForce<'a> {
    pub fn new(registry: &'a Registry, max_tier: u32) -> Self {
        assert!(max_tier < 31);
        BruteForce { registry, max_tier }
    }

    fn all(&self) -> Mask {
        (1 << (self.max_tier + 1)) - 1
    }

    /// Every tier from the smallest member of `m` up to the maximum.
    fn up(&self, m: Mask) -> Mask {
        if m == 0 {
            0
        } else {
            self.all() & !((1 << m.trailing_zeros()) - 1)
        }
    }

    fn at_most(&self, t: u32) -> Mask {
        (1 << (t + 1)) - 1
    }

    pub fn expr(&self, e: &Expr, g: &BTreeMap<Var, u32>, t_in: u32, t_out: u32) -> Mask {
        match e {
            Expr::Var { name } => bit(g[name]),
            Expr::Lit { .. } => self.at_most(t_in),
            Expr::Op { op, args } => {
                let spec = self.registry.get(op).expect("registered operator");
                let arg_masks: Vec<Mask> = args.iter().map(|a| self.expr(a, g, t_in, t_out)).collect();
                let mut out = 0;
                for t in 0..=t_in.min(self.max_tier) {
                    if spec.is_positive() && !args.is_empty() && t >= t_in {
                        continue;
                    }
                    // each operand needs a tier in [t, t_in]
                    let window = self.at_most(t_in) & !((1 << t) - 1);
                    if arg_masks.iter().all(|m| m & window != 0) {
                        out |= bit(t);
                    }
                }
                out
            }
            Expr::Oracle { data, bound } => {
                if self.expr(bound, g, t_in, t_out) & bit(t_out) == 0 {
                    return 0;
                }
                let d = self.expr(data, g, t_in, t_out);
                let mut out = 0;
                for t in 0..=self.max_tier {
                    if d & bit(t) != 0 && t < t_in && t <= t_out {
                        out |= bit(t);
                    }
                }
                out
            }
        }
    }

    /// Tiers at which `c` can be typed in context `(t_in, t_out)`, closed
    /// under subtyping.
    pub fn cmd(&self, c: &Cmd, g: &BTreeMap<Var, u32>, t_in: u32, t_out: u32) -> Mask {
        match c {
            Cmd::Skip => self.all(),
            Cmd::Assign { var, expr } => {
                let tx = g[var];
                let e = self.expr(expr, g, t_in, t_out);
                if e >> tx != 0 {
                    self.up(bit(tx))
                } else {
                    0
                }
            }
            Cmd::Seq { first, rest } => self.cmd(first, g, t_in, t_out) & self.cmd(rest, g, t_in, t_out),
            Cmd::If {
                guard,
                then_branch,
                else_branch,
            } => {
                let base = self.expr(guard, g, t_in, t_out)
                    & self.cmd(then_branch, g, t_in, t_out)
                    & self.cmd(else_branch, g, t_in, t_out);
                self.up(base)
            }
            Cmd::While { guard, body } => {
                let mut base = 0;
                for t in 1..=self.max_tier {
                    let w = t <= t_out
                        && self.expr(guard, g, t_in, t_out) & bit(t) != 0
                        && self.cmd(body, g, t, t_out) & bit(t) != 0;
                    let w0 = t_out == 0
                        && self.expr(guard, g, t_in, t) & bit(t) != 0
                        && self.cmd(body, g, t, t) & bit(t) != 0;
                    if w || w0 {
                        base |= bit(t);
                    }
                }
                self.up(base)
            }
        }
    }

    /// Whether `Γ ⊢ body : (t, t_in, t_out)` is derivable.
    pub fn derivable(&self, p: &Program, g: &BTreeMap<Var, u32>, t: u32, t_in: u32, t_out: u32) -> bool {
        self.cmd(&p.body, g, t_in, t_out) & bit(t) != 0
    }

    /// All environments over the program's variables with tiers up to the
    /// maximum, in lexicographic order.
    pub fn environments(&self, p: &Program) -> impl Iterator<Item = BTreeMap<Var, u32>> {
        let vars: Vec<Var> = p.variables().into_iter().collect();
        let base = self.max_tier as u64 + 1;
        let total = base.pow(vars.len() as u32);
        (0..total).map(move |mut code| {
            let mut g = BTreeMap::new();
            for v in &vars {
                g.insert(v.clone(), (code % base) as u32);
                code /= base;
            }
            g
        })
    }

    pub fn typable(&self, p: &Program) -> bool {
        self.environments(p).any(|g| {
            (0..=self.max_tier).any(|i| (0..=self.max_tier).any(|o| self.cmd(&p.body, &g, i, o) != 0))
        })
    }
}
