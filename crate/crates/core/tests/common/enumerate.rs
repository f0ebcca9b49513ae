//! Exhaustive program generation, up to renaming of variables.
//!
//! Shapes are generated with anonymous variable slots; each shape is then
//! instantiated once per restricted-growth labelling of its slots (slot
//! `i` gets a label at most one above every earlier label), which visits
//! every program exactly once up to a bijective renaming. Sequences are
//! only built right-associated.

use tier_core::syntax::{Cmd, Expr, Program, Var};
use tier_core::Word;

const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

#[derive(Debug, Clone)]
pub struct Family {
    /// Upper bound on `program_size`.
    pub max_size: usize,
    pub max_vars: usize,
    pub nullary: Vec<&'static str>,
    pub unary: Vec<&'static str>,
    pub binary: Vec<&'static str>,
    pub literals: Vec<Word>,
    pub oracle: bool,
}

impl Family {
    pub fn new(max_size: usize, max_vars: usize, unary: &[&'static str]) -> Self {
        Family {
            max_size,
            max_vars,
            nullary: vec![],
            unary: unary.to_vec(),
            binary: vec![],
            literals: vec![],
            oracle: false,
        }
    }
}

fn slot() -> Expr {
    Expr::var("_")
}

/// Command shapes indexed by size.
fn build_shapes(f: &Family) -> Vec<Vec<Cmd>> {
    // a program of size s has a body of size s - 1
    let max_body = f.max_size.saturating_sub(1);
    let mut exprs: Vec<Vec<Expr>> = vec![vec![]; max_body + 1];
    for k in 1..=max_body {
        let mut out = Vec::new();
        if k == 1 {
            out.push(slot());
            out.extend(f.nullary.iter().map(|op| Expr::op(op, vec![])));
            out.extend(f.literals.iter().map(|w| Expr::lit(w.clone())));
        } else {
            for op in &f.unary {
                for e in &exprs[k - 1] {
                    out.push(Expr::op(op, vec![e.clone()]));
                }
            }
            for a in 1..k - 1 {
                let b = k - 1 - a;
                for x in &exprs[a] {
                    for y in &exprs[b] {
                        for op in &f.binary {
                            out.push(Expr::op(op, vec![x.clone(), y.clone()]));
                        }
                        if f.oracle {
                            out.push(Expr::oracle(x.clone(), y.clone()));
                        }
                    }
                }
            }
        }
        exprs[k] = out;
    }

    let mut cmds: Vec<Vec<Cmd>> = vec![vec![]; max_body + 1];
    for k in 1..=max_body {
        let mut out = Vec::new();
        if k == 1 {
            out.push(Cmd::Skip);
        }
        if k >= 3 {
            for e in &exprs[k - 2] {
                out.push(Cmd::Assign {
                    var: Var::new("_"),
                    expr: e.clone(),
                });
            }
        }
        for a in 1..k.saturating_sub(1) {
            let b = k - 1 - a;
            for x in cmds[a].iter().filter(|c| !matches!(c, Cmd::Seq { .. })) {
                for y in &cmds[b] {
                    out.push(Cmd::Seq {
                        first: Box::new(x.clone()),
                        rest: Box::new(y.clone()),
                    });
                }
            }
        }
        // if: 1 + guard + then + else
        for (g, guards) in exprs.iter().enumerate().take(k).skip(1) {
            for a in 1..k {
                if 1 + g + a >= k {
                    break;
                }
                let b = k - 1 - g - a;
                for ge in guards {
                    for x in &cmds[a] {
                        for y in &cmds[b] {
                            out.push(Cmd::if_else(ge.clone(), x.clone(), y.clone()));
                        }
                    }
                }
            }
        }
        // while: 1 + guard + body
        for (g, guards) in exprs.iter().enumerate().take(k.saturating_sub(1)).skip(1) {
            let b = k - 1 - g;
            for ge in guards {
                for x in &cmds[b] {
                    out.push(Cmd::while_loop(ge.clone(), x.clone()));
                }
            }
        }
        cmds[k] = out;
    }
    cmds
}

fn count_expr_slots(e: &Expr) -> usize {
    match e {
        Expr::Var { .. } => 1,
        Expr::Lit { .. } => 0,
        Expr::Op { args, .. } => args.iter().map(count_expr_slots).sum(),
        Expr::Oracle { data, bound } => count_expr_slots(data) + count_expr_slots(bound),
    }
}

fn count_slots(c: &Cmd) -> usize {
    match c {
        Cmd::Skip => 0,
        Cmd::Assign { expr, .. } => 1 + count_expr_slots(expr),
        Cmd::Seq { first, rest } => count_slots(first) + count_slots(rest),
        Cmd::If {
            guard,
            then_branch,
            else_branch,
        } => count_expr_slots(guard) + count_slots(then_branch) + count_slots(else_branch),
        Cmd::While { guard, body } => count_expr_slots(guard) + count_slots(body),
    }
}

fn label_expr(e: &Expr, names: &mut std::slice::Iter<'_, Var>) -> Expr {
    match e {
        Expr::Var { .. } => Expr::Var {
            name: names.next().expect("enough labels").clone(),
        },
        Expr::Lit { .. } => e.clone(),
        Expr::Op { op, args } => Expr::Op {
            op: op.clone(),
            args: args.iter().map(|a| label_expr(a, names)).collect(),
        },
        Expr::Oracle { data, bound } => {
            let d = label_expr(data, names);
            let b = label_expr(bound, names);
            Expr::oracle(d, b)
        }
    }
}

fn label_cmd(c: &Cmd, names: &mut std::slice::Iter<'_, Var>) -> Cmd {
    match c {
        Cmd::Skip => Cmd::Skip,
        Cmd::Assign { expr, .. } => {
            let var = names.next().expect("enough labels").clone();
            Cmd::Assign {
                var,
                expr: label_expr(expr, names),
            }
        }
        Cmd::Seq { first, rest } => {
            let a = label_cmd(first, names);
            let b = label_cmd(rest, names);
            Cmd::Seq {
                first: Box::new(a),
                rest: Box::new(b),
            }
        }
        Cmd::If {
            guard,
            then_branch,
            else_branch,
        } => {
            let g = label_expr(guard, names);
            let a = label_cmd(then_branch, names);
            let b = label_cmd(else_branch, names);
            Cmd::if_else(g, a, b)
        }
        Cmd::While { guard, body } => {
            let g = label_expr(guard, names);
            let b = label_cmd(body, names);
            Cmd::while_loop(g, b)
        }
    }
}

/// Calls `visit` on every restricted-growth string of length `len` whose
/// labels are below `max_labels`.
fn growth_strings(len: usize, max_labels: usize, visit: &mut impl FnMut(&[usize])) {
    fn go(buf: &mut Vec<usize>, len: usize, used: usize, max_labels: usize, visit: &mut impl FnMut(&[usize])) {
        if buf.len() == len {
            visit(buf);
            return;
        }
        for l in 0..(used + 1).min(max_labels) {
            buf.push(l);
            go(buf, len, used.max(l + 1), max_labels, visit);
            buf.pop();
        }
    }
    go(&mut Vec::with_capacity(len), len, 0, max_labels, visit);
}

/// Visits every program of the family once; returns how many there were.
pub fn for_each_program(f: &Family, mut visit: impl FnMut(&Program)) -> usize {
    let shapes = build_shapes(f);
    let vars: Vec<Var> = NAMES.iter().take(f.max_vars).map(|n| Var::new(n)).collect();
    let mut count = 0;
    for size in shapes.iter() {
        for shape in size {
            // the returned variable is the last slot
            let slots = count_slots(shape) + 1;
            growth_strings(slots, f.max_vars, &mut |labels| {
                let names: Vec<Var> = labels.iter().map(|&l| vars[l].clone()).collect();
                let mut it = names.iter();
                let body = label_cmd(shape, &mut it);
                let ret = it.next().expect("return slot").clone();
                let oracle = has_oracle(&body).then(|| "phi".to_string());
                let p = Program { body, ret, oracle };
                count += 1;
                visit(&p);
            });
        }
    }
    count
}

fn has_oracle(c: &Cmd) -> bool {
    match c {
        Cmd::Skip => false,
        Cmd::Assign { expr, .. } => expr.has_oracle_call(),
        Cmd::Seq { first, rest } => has_oracle(first) || has_oracle(rest),
        Cmd::If {
            guard,
            then_branch,
            else_branch,
        } => guard.has_oracle_call() || has_oracle(then_branch) || has_oracle(else_branch),
        Cmd::While { guard, body } => guard.has_oracle_call() || has_oracle(body),
    }
}
