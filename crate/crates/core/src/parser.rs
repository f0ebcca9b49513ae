//! Concrete syntax.
//!
//! ```text
//! program := cmd "return" IDENT
//! cmd     := "skip" | IDENT ":=" expr | cmd ";" cmd
//!          | "if" "(" expr ")" "{" cmd "}" "else" "{" cmd "}"
//!          | "while" "(" expr ")" "{" cmd "}"
//! expr    := IDENT | OPNAME "(" [expr ("," expr)*] ")"
//!          | ORACLE "(" expr "|" expr ")" | INT | STRING
//! ```
//!
//! `INT` literals denote unary words (`3` is `111`, `0` is `ε`); `STRING`
//! literals are raw words. `//` starts a line comment.

use thiserror::Error;

use crate::operators::Registry;
use crate::syntax::{is_keyword, Cmd, Expr, Program, Var};
use crate::word::{Alphabet, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("operator `{op}` expects {expected} argument(s), found {found}")]
    Arity {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("second oracle symbol `{second}` (the program already uses `{first}`)")]
    MultipleOracles { first: String, second: String },
    #[error("{0}")]
    Alphabet(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    Str(String),
    Assign,
    Semi,
    Comma,
    Bar,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Assign => "`:=`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Bar => "`|`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| ParseError {
        line,
        col,
        kind: ParseErrorKind::Syntax(msg),
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = match c {
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '|' => Tok::Bar,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ':' => {
                if chars.get(i + 1) == Some(&'=') {
                    advance(2, &mut i, &mut col);
                    out.push(Token {
                        tok: Tok::Assign,
                        line: tl,
                        col: tc,
                    });
                    continue;
                }
                return Err(err(tl, tc, "expected `:=`".into()));
            }
            '"' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '"' {
                    return Err(err(tl, tc, "unterminated string literal".into()));
                }
                let s: String = chars[start..j].iter().collect();
                let n = j + 1 - i;
                advance(n, &mut i, &mut col);
                out.push(Token {
                    tok: Tok::Str(s),
                    line: tl,
                    col: tc,
                });
                continue;
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let n: usize = s
                    .parse()
                    .map_err(|_| err(tl, tc, format!("integer literal {s} is too large")))?;
                let len = j - i;
                advance(len, &mut i, &mut col);
                out.push(Token {
                    tok: Tok::Int(n),
                    line: tl,
                    col: tc,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let len = j - i;
                advance(len, &mut i, &mut col);
                out.push(Token {
                    tok: Tok::Ident(s),
                    line: tl,
                    col: tc,
                });
                continue;
            }
            other => return Err(err(tl, tc, format!("unexpected character {other:?}"))),
        };
        advance(1, &mut i, &mut col);
        out.push(Token { tok, line: tl, col: tc });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    registry: &'a Registry,
    alphabet: &'a Alphabet,
    oracle: Option<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: t.line,
            col: t.col,
            kind,
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let t = self.peek();
        self.error_at(
            t,
            ParseErrorKind::Syntax(format!("expected {what}, found {}", t.tok.describe())),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let body = self.cmd()?;
        self.keyword("return")?;
        let ret = self.ident("a variable after `return`")?;
        if self.peek().tok != Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        Ok(Program {
            body,
            ret: Var::new(&ret),
            oracle: self.oracle.take(),
        })
    }

    fn cmd(&mut self) -> Result<Cmd, ParseError> {
        let mut cmds = vec![self.atomic_cmd()?];
        while self.peek().tok == Tok::Semi {
            self.bump();
            cmds.push(self.atomic_cmd()?);
        }
        Ok(Cmd::seq_all(cmds))
    }

    fn block(&mut self) -> Result<Cmd, ParseError> {
        self.expect(Tok::LBrace)?;
        let c = self.cmd()?;
        self.expect(Tok::RBrace)?;
        Ok(c)
    }

    fn atomic_cmd(&mut self) -> Result<Cmd, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Ident(s) if s == "skip" => {
                self.bump();
                Ok(Cmd::Skip)
            }
            Tok::Ident(s) if s == "if" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let guard = self.expr()?;
                self.expect(Tok::RParen)?;
                let then_branch = self.block()?;
                self.keyword("else")?;
                let else_branch = self.block()?;
                Ok(Cmd::if_else(guard, then_branch, else_branch))
            }
            Tok::Ident(s) if s == "while" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let guard = self.expr()?;
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                Ok(Cmd::while_loop(guard, body))
            }
            Tok::Ident(s) if !is_keyword(s) => {
                let name = s.clone();
                self.bump();
                self.expect(Tok::Assign)?;
                let e = self.expr()?;
                Ok(Cmd::assign(&name, e))
            }
            _ => Err(self.unexpected("a command")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::lit(Word::unary(*n)))
            }
            Tok::Str(s) => {
                self.bump();
                let w = self
                    .alphabet
                    .word(s)
                    .map_err(|e| self.error_at(&t, ParseErrorKind::Alphabet(e.to_string())))?;
                Ok(Expr::lit(w))
            }
            Tok::Ident(name) if !is_keyword(name) => {
                let name = name.clone();
                if *self.peek2() != Tok::LParen {
                    self.bump();
                    return Ok(Expr::var(&name));
                }
                self.bump();
                self.bump();
                let mut args = Vec::new();
                if self.peek().tok != Tok::RParen {
                    args.push(self.expr()?);
                    if self.peek().tok == Tok::Bar {
                        self.bump();
                        let bound = self.expr()?;
                        self.expect(Tok::RParen)?;
                        self.note_oracle(&t, &name)?;
                        let data = args.pop().expect("one argument parsed");
                        return Ok(Expr::oracle(data, bound));
                    }
                    while self.peek().tok == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                }
                self.expect(Tok::RParen)?;
                let spec = self
                    .registry
                    .get(&name)
                    .ok_or_else(|| self.error_at(&t, ParseErrorKind::UnknownOperator(name.clone())))?;
                if spec.arity != args.len() {
                    return Err(self.error_at(
                        &t,
                        ParseErrorKind::Arity {
                            op: name,
                            expected: spec.arity,
                            found: args.len(),
                        },
                    ));
                }
                Ok(Expr::op(&name, args))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn note_oracle(&mut self, at: &Token, name: &str) -> Result<(), ParseError> {
        match &self.oracle {
            Some(first) if first != name => Err(self.error_at(
                at,
                ParseErrorKind::MultipleOracles {
                    first: first.clone(),
                    second: name.to_string(),
                },
            )),
            Some(_) => Ok(()),
            None => {
                if self.registry.get(name).is_some() {
                    return Err(self.error_at(
                        at,
                        ParseErrorKind::Syntax(format!(
                            "`{name}` is an operator and cannot be used as the oracle"
                        )),
                    ));
                }
                self.oracle = Some(name.to_string());
                Ok(())
            }
        }
    }
}

/// Parses a program over the binary alphabet.
pub fn parse(source: &str, registry: &Registry) -> Result<Program, ParseError> {
    parse_with_alphabet(source, registry, &Alphabet::binary())
}

pub fn parse_with_alphabet(
    source: &str,
    registry: &Registry,
    alphabet: &Alphabet,
) -> Result<Program, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        registry,
        alphabet,
        oracle: None,
    };
    p.program()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> Registry {
        Registry::builtin()
    }

    #[test]
    fn single_assignment() {
        let p = parse("y := x return y", &reg()).unwrap();
        assert_eq!(p, Program::new(Cmd::assign("y", Expr::var("x")), "y"));
    }

    #[test]
    fn addition_program() {
        let src = "while (gt0(x)) { x := pred(x); y := suc1(y) } return y";
        let p = parse(src, &reg()).unwrap();
        let expected = Cmd::while_loop(
            Expr::op("gt0", vec![Expr::var("x")]),
            Cmd::seq(
                Cmd::assign("x", Expr::op("pred", vec![Expr::var("x")])),
                Cmd::assign("y", Expr::op("suc1", vec![Expr::var("y")])),
            ),
        );
        assert_eq!(p.body, expected);
        assert_eq!(p.oracle, None);
    }

    #[test]
    fn arity_mismatch() {
        let e = parse("while (eq(x)) { skip } return x", &reg()).unwrap_err();
        assert_eq!(
            e.kind,
            ParseErrorKind::Arity {
                op: "eq".into(),
                expected: 2,
                found: 1
            }
        );
        assert_eq!((e.line, e.col), (1, 8));
    }

    #[test]
    fn unknown_operator() {
        let e = parse("x := frob(x) return x", &reg()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownOperator("frob".into()));
    }

    #[test]
    fn oracle_calls() {
        let p = parse("x := phi(y | x); z := phi(x | y) return z", &reg()).unwrap();
        assert_eq!(p.oracle.as_deref(), Some("phi"));
        let e = parse("x := phi(y | x); z := psi(x | y) return z", &reg()).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::MultipleOracles { .. }));
        assert_eq!((e.line, e.col), (1, 23));
    }

    #[test]
    fn literals() {
        let p = parse("x := 3; y := \"101\"; z := 0 return x", &reg()).unwrap();
        let expected = Cmd::seq_all(vec![
            Cmd::assign("x", Expr::lit(Word::unary(3))),
            Cmd::assign("y", Expr::lit("101".parse().unwrap())),
            Cmd::assign("z", Expr::lit(Word::empty())),
        ]);
        assert_eq!(p.body, expected);
        let e = parse("x := \"12\" return x", &reg()).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Alphabet(_)));
    }

    #[test]
    fn sequencing_is_right_associative() {
        let p = parse("a := a; b := b; c := c return a", &reg()).unwrap();
        match p.body {
            Cmd::Seq { first, rest } => {
                assert!(matches!(*first, Cmd::Assign { .. }));
                assert!(matches!(*rest, Cmd::Seq { .. }));
            }
            _ => panic!("expected a sequence"),
        }
    }

    #[test]
    fn syntax_error_position() {
        let e = parse("x := pred(x);\n  while (x { skip } return x", &reg()).unwrap_err();
        assert_eq!((e.line, e.col), (2, 12));
        let e = parse("skip", &reg()).unwrap_err();
        assert!(e.to_string().contains("`return`"));
    }

    #[test]
    fn comments_are_ignored() {
        let p = parse("// header\nskip // trailing\nreturn x", &reg()).unwrap();
        assert_eq!(p.body, Cmd::Skip);
    }
}
