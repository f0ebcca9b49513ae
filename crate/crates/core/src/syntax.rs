//! Abstract syntax of the oracle language, its pretty-printer and the
//! syntactic metrics (`program_size`, `V(·)`, `A(·)`).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::word::Word;

pub const KEYWORDS: [&str; 5] = ["skip", "if", "else", "while", "return"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// A program variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expr {
    Var { name: Var },
    /// A literal word; typed and evaluated like an arity-0 neutral operator.
    Lit { word: Word },
    Op { op: String, args: Vec<Expr> },
    /// `φ(data ↾ bound)`
    Oracle { data: Box<Expr>, bound: Box<Expr> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cmd {
    Skip,
    Assign { var: Var, expr: Expr },
    /// Right-associated: `first` is never itself a sequence when built
    /// through [`Cmd::seq`] or the parser.
    Seq { first: Box<Cmd>, rest: Box<Cmd> },
    If { guard: Expr, then_branch: Box<Cmd>, else_branch: Box<Cmd> },
    While { guard: Expr, body: Box<Cmd> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Program {
    pub body: Cmd,
    pub ret: Var,
    /// The oracle symbol, if the program performs any oracle call.
    pub oracle: Option<String>,
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var { name: Var::new(name) }
    }

    pub fn lit(word: Word) -> Expr {
        Expr::Lit { word }
    }

    pub fn op(op: &str, args: Vec<Expr>) -> Expr {
        Expr::Op {
            op: op.to_string(),
            args,
        }
    }

    pub fn oracle(data: Expr, bound: Expr) -> Expr {
        Expr::Oracle {
            data: Box::new(data),
            bound: Box::new(bound),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Var { .. } | Expr::Lit { .. } => 1,
            Expr::Op { args, .. } => 1 + args.iter().map(Expr::size).sum::<usize>(),
            Expr::Oracle { data, bound } => 1 + data.size() + bound.size(),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Var { name } => {
                out.insert(name.clone());
            }
            Expr::Lit { .. } => {}
            Expr::Op { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
            Expr::Oracle { data, bound } => {
                data.collect_vars(out);
                bound.collect_vars(out);
            }
        }
    }

    /// `V(e)`
    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn has_oracle_call(&self) -> bool {
        match self {
            Expr::Var { .. } | Expr::Lit { .. } => false,
            Expr::Op { args, .. } => args.iter().any(Expr::has_oracle_call),
            Expr::Oracle { .. } => true,
        }
    }
}

impl Cmd {
    pub fn assign(var: &str, expr: Expr) -> Cmd {
        Cmd::Assign {
            var: Var::new(var),
            expr,
        }
    }

    /// `a ; b`, re-associated to the right.
    pub fn seq(a: Cmd, b: Cmd) -> Cmd {
        match a {
            Cmd::Seq { first, rest } => Cmd::Seq {
                first,
                rest: Box::new(Cmd::seq(*rest, b)),
            },
            a => Cmd::Seq {
                first: Box::new(a),
                rest: Box::new(b),
            },
        }
    }

    /// Folds a non-empty list of commands into a right-associated sequence.
    pub fn seq_all(cmds: Vec<Cmd>) -> Cmd {
        let mut it = cmds.into_iter().rev();
        let last = it.next().expect("seq_all needs at least one command");
        it.fold(last, |acc, c| Cmd::seq(c, acc))
    }

    pub fn if_else(guard: Expr, then_branch: Cmd, else_branch: Cmd) -> Cmd {
        Cmd::If {
            guard,
            then_branch: Box::new(then_branch),
            else_branch: Box::new(else_branch),
        }
    }

    pub fn while_loop(guard: Expr, body: Cmd) -> Cmd {
        Cmd::While {
            guard,
            body: Box::new(body),
        }
    }

    /// Node count; an assignment counts its target variable as a node.
    pub fn size(&self) -> usize {
        match self {
            Cmd::Skip => 1,
            Cmd::Assign { expr, .. } => 2 + expr.size(),
            Cmd::Seq { first, rest } => 1 + first.size() + rest.size(),
            Cmd::If {
                guard,
                then_branch,
                else_branch,
            } => 1 + guard.size() + then_branch.size() + else_branch.size(),
            Cmd::While { guard, body } => 1 + guard.size() + body.size(),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Cmd::Skip => {}
            Cmd::Assign { var, expr } => {
                out.insert(var.clone());
                expr.collect_vars(out);
            }
            Cmd::Seq { first, rest } => {
                first.collect_vars(out);
                rest.collect_vars(out);
            }
            Cmd::If {
                guard,
                then_branch,
                else_branch,
            } => {
                guard.collect_vars(out);
                then_branch.collect_vars(out);
                else_branch.collect_vars(out);
            }
            Cmd::While { guard, body } => {
                guard.collect_vars(out);
                body.collect_vars(out);
            }
        }
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// `A(c)`: variables on the left of an assignment.
    pub fn assigned_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_assigned(&mut out);
        out
    }

    fn collect_assigned(&self, out: &mut BTreeSet<Var>) {
        match self {
            Cmd::Skip => {}
            Cmd::Assign { var, .. } => {
                out.insert(var.clone());
            }
            Cmd::Seq { first, rest } => {
                first.collect_assigned(out);
                rest.collect_assigned(out);
            }
            Cmd::If {
                then_branch,
                else_branch,
                ..
            } => {
                then_branch.collect_assigned(out);
                else_branch.collect_assigned(out);
            }
            Cmd::While { body, .. } => body.collect_assigned(out),
        }
    }

    pub fn has_while(&self) -> bool {
        match self {
            Cmd::Skip | Cmd::Assign { .. } => false,
            Cmd::Seq { first, rest } => first.has_while() || rest.has_while(),
            Cmd::If {
                then_branch,
                else_branch,
                ..
            } => then_branch.has_while() || else_branch.has_while(),
            Cmd::While { .. } => true,
        }
    }
}

impl Program {
    pub fn new(body: Cmd, ret: &str) -> Self {
        Program {
            body,
            ret: Var::new(ret),
            oracle: None,
        }
    }

    pub fn with_oracle(mut self, name: &str) -> Self {
        self.oracle = Some(name.to_string());
        self
    }

    /// `V(p)`: body variables plus the returned one.
    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = self.body.variables();
        out.insert(self.ret.clone());
        out
    }
}

/// Node count of the AST: variables, literals, operator applications,
/// oracle calls and commands count one each, plus one for `return x`.
pub fn program_size(p: &Program) -> usize {
    p.body.size() + 1
}

pub fn variables_of(p: &Program) -> BTreeSet<Var> {
    p.variables()
}

pub fn assigned_vars(c: &Cmd) -> BTreeSet<Var> {
    c.assigned_vars()
}

// ---------------------------------------------------------------------------
// Pretty printing

/// Expression printer that knows the oracle symbol to print.
pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    oracle: &'a str,
}

impl Expr {
    pub fn display<'a>(&'a self, oracle: &'a str) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, oracle }
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, oracle: &str) -> fmt::Result {
    match e {
        Expr::Var { name } => write!(f, "{name}"),
        Expr::Lit { word } => write!(f, "\"{word}\""),
        Expr::Op { op, args } => {
            write!(f, "{op}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_expr(f, a, oracle)?;
            }
            f.write_str(")")
        }
        Expr::Oracle { data, bound } => {
            write!(f, "{oracle}(")?;
            write_expr(f, data, oracle)?;
            f.write_str(" | ")?;
            write_expr(f, bound, oracle)?;
            f.write_str(")")
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, self.oracle)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, "phi")
    }
}

fn indent(f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
    for _ in 0..depth {
        f.write_str("  ")?;
    }
    Ok(())
}

fn write_cmd(f: &mut fmt::Formatter<'_>, c: &Cmd, oracle: &str, depth: usize) -> fmt::Result {
    match c {
        Cmd::Skip => {
            indent(f, depth)?;
            f.write_str("skip")
        }
        Cmd::Assign { var, expr } => {
            indent(f, depth)?;
            write!(f, "{var} := ")?;
            write_expr(f, expr, oracle)
        }
        Cmd::Seq { first, rest } => {
            write_cmd(f, first, oracle, depth)?;
            f.write_str(";\n")?;
            write_cmd(f, rest, oracle, depth)
        }
        Cmd::If {
            guard,
            then_branch,
            else_branch,
        } => {
            indent(f, depth)?;
            f.write_str("if (")?;
            write_expr(f, guard, oracle)?;
            f.write_str(") {\n")?;
            write_cmd(f, then_branch, oracle, depth + 1)?;
            f.write_str("\n")?;
            indent(f, depth)?;
            f.write_str("} else {\n")?;
            write_cmd(f, else_branch, oracle, depth + 1)?;
            f.write_str("\n")?;
            indent(f, depth)?;
            f.write_str("}")
        }
        Cmd::While { guard, body } => {
            indent(f, depth)?;
            f.write_str("while (")?;
            write_expr(f, guard, oracle)?;
            f.write_str(") {\n")?;
            write_cmd(f, body, oracle, depth + 1)?;
            f.write_str("\n")?;
            indent(f, depth)?;
            f.write_str("}")
        }
    }
}

impl fmt::Display for Cmd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_cmd(f, self, "phi", 0)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let oracle = self.oracle.as_deref().unwrap_or("phi");
        write_cmd(f, &self.body, oracle, 0)?;
        write!(f, "\nreturn {}", self.ret)
    }
}

/// Single-line rendering, used to label derivation nodes.
pub fn one_line_cmd(c: &Cmd, oracle: &str) -> String {
    match c {
        Cmd::Skip => "skip".into(),
        Cmd::Assign { var, expr } => format!("{var} := {}", expr.display(oracle)),
        Cmd::Seq { first, rest } => {
            format!("{}; {}", one_line_cmd(first, oracle), one_line_cmd(rest, oracle))
        }
        Cmd::If {
            guard,
            then_branch,
            else_branch,
        } => format!(
            "if ({}) {{ {} }} else {{ {} }}",
            guard.display(oracle),
            one_line_cmd(then_branch, oracle),
            one_line_cmd(else_branch, oracle)
        ),
        Cmd::While { guard, body } => format!(
            "while ({}) {{ {} }}",
            guard.display(oracle),
            one_line_cmd(body, oracle)
        ),
    }
}
