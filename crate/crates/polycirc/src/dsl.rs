//! Textual surface syntax for circuit programs.
//!
//! A program is a sequence of definitions:
//!
//! ```text
//! program := def+
//! def     := "let" NAME "=" expr
//! expr    := term (";" term)*          sequential composition, left to right
//! term    := factor ("*" factor)*      parallel composition, top to bottom
//! factor  := NAME | GEN | "(" expr ")"
//! GEN     := "add" | "zero" | "mul" | "one" | "copy" | "discard"
//!          | "id" | "swap" | "eq" | "neg" | "const(" UINT ")"
//! ```
//!
//! Both operators associate to the left, and `*` binds tighter than `;`, so
//! `copy ; add * id ; mul` reads as `(copy ; (add * id)) ; mul`. A `NAME`
//! refers to an earlier definition in the same program and splices in that
//! circuit (sharing its structure, not copying it). Shape errors surface at
//! parse time, as do `const` codes outside the active semiring's carrier.
//!
//! [`render`] is a right inverse of parsing: rendering any circuit and parsing
//! the result reconstructs a structurally equal circuit, with parentheses
//! inserted exactly where the tree departs from the default left nesting.

use std::collections::HashMap;

use crate::circuit::{Circuit, Generator, Node};
use crate::error::{Error, Result};
use crate::semiring::Semiring;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(u64),
    Semi,
    Star,
    Equals,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(n) => format!("number `{n}`"),
        Tok::Semi => "`;`".into(),
        Tok::Star => "`*`".into(),
        Tok::Equals => "`=`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
    }
}

fn syntax(line: usize, col: usize, msg: String) -> Error {
    Error::SyntaxError { line, col, msg }
}

/// Tokenize the input, tracking 1-based line/column positions. Returns the
/// tokens plus the position just past the last character (used to report
/// errors at end of input).
fn lex(text: &str) -> Result<(Vec<Token>, (usize, usize))> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut it = text.chars().peekable();
    while let Some(&ch) = it.peek() {
        if ch == '\n' {
            it.next();
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            it.next();
            col += 1;
            continue;
        }
        let (tl, tc) = (line, col);
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut s = String::new();
            while let Some(&c) = it.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    it.next();
                    col += 1;
                } else {
                    break;
                }
            }
            toks.push(Token { tok: Tok::Ident(s), line: tl, col: tc });
            continue;
        }
        if ch.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = it.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    it.next();
                    col += 1;
                } else {
                    break;
                }
            }
            let v: u64 = s.parse().map_err(|_| {
                syntax(tl, tc, format!("integer literal `{s}` does not fit in 64 bits"))
            })?;
            toks.push(Token { tok: Tok::Number(v), line: tl, col: tc });
            continue;
        }
        let tok = match ch {
            ';' => Tok::Semi,
            '*' => Tok::Star,
            '=' => Tok::Equals,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(syntax(line, col, format!("unexpected character `{ch}`"))),
        };
        it.next();
        col += 1;
        toks.push(Token { tok, line: tl, col: tc });
    }
    Ok((toks, (line, col)))
}

/// `let`, `const`, and the generator names cannot be used as definition names.
pub(crate) fn is_reserved(name: &str) -> bool {
    name == "let" || name == "const" || Generator::from_name(name).is_some()
}

/// Definition names are ASCII identifiers that avoid the reserved words; the
/// JSON format shares this rule so that programs move between the two formats.
pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    head_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_reserved(name)
}

struct Parser<'a> {
    desc: &'a Semiring,
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    defs: Vec<(String, Circuit)>,
    index: HashMap<String, usize>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    /// Position of the next token, or of end-of-input when exhausted.
    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => self.end,
        }
    }

    fn take(&mut self, expected: &str) -> Result<Token> {
        match self.toks.get(self.pos) {
            Some(t) => {
                let t = t.clone();
                self.pos += 1;
                Ok(t)
            }
            None => {
                let (line, col) = self.end;
                Err(syntax(line, col, format!("expected {expected}, found end of input")))
            }
        }
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<()> {
        let t = self.take(expected)?;
        if t.tok == want {
            Ok(())
        } else {
            Err(syntax(
                t.line,
                t.col,
                format!("expected {expected}, found {}", describe(&t.tok)),
            ))
        }
    }

    fn parse_def(&mut self) -> Result<()> {
        let t = self.take("`let`")?;
        match &t.tok {
            Tok::Ident(s) if s == "let" => {}
            other => {
                return Err(syntax(
                    t.line,
                    t.col,
                    format!("expected `let`, found {}", describe(other)),
                ))
            }
        }
        let t = self.take("a name after `let`")?;
        let name = match t.tok {
            Tok::Ident(s) => s,
            other => {
                return Err(syntax(
                    t.line,
                    t.col,
                    format!("expected a name after `let`, found {}", describe(&other)),
                ))
            }
        };
        if is_reserved(&name) {
            return Err(syntax(t.line, t.col, format!("`{name}` is a reserved word")));
        }
        if self.index.contains_key(&name) {
            return Err(syntax(t.line, t.col, format!("`{name}` is defined twice")));
        }
        self.expect(Tok::Equals, "`=` after the name")?;
        let c = self.parse_expr()?;
        self.index.insert(name.clone(), self.defs.len());
        self.defs.push((name, c));
        Ok(())
    }

    fn parse_expr(&mut self) -> Result<Circuit> {
        let mut c = self.parse_term()?;
        while self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            let rhs = self.parse_term()?;
            c = Circuit::compose(&c, &rhs)?;
        }
        Ok(c)
    }

    fn parse_term(&mut self) -> Result<Circuit> {
        let mut c = self.parse_factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.parse_factor()?;
            c = Circuit::tensor(&c, &rhs);
        }
        Ok(c)
    }

    fn parse_factor(&mut self) -> Result<Circuit> {
        let t = self.take("an expression")?;
        match t.tok {
            Tok::LParen => {
                let c = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(c)
            }
            Tok::Ident(name) => {
                if name == "const" {
                    self.expect(Tok::LParen, "`(` after `const`")?;
                    let arg = self.take("a number inside `const(...)`")?;
                    let code = match arg.tok {
                        Tok::Number(v) => v,
                        other => {
                            return Err(syntax(
                                arg.line,
                                arg.col,
                                format!(
                                    "expected a number inside `const(...)`, found {}",
                                    describe(&other)
                                ),
                            ))
                        }
                    };
                    self.expect(Tok::RParen, "`)` after the constant")?;
                    self.desc.check_value(code)?;
                    return Ok(Circuit::gen(Generator::Const(code)));
                }
                if name == "let" {
                    return Err(syntax(
                        t.line,
                        t.col,
                        "expected an expression, found `let`".into(),
                    ));
                }
                if let Some(g) = Generator::from_name(&name) {
                    return Ok(Circuit::gen(g));
                }
                match self.index.get(&name) {
                    Some(&i) => Ok(self.defs[i].1.clone()),
                    None => Err(Error::UnknownName(name)),
                }
            }
            other => Err(syntax(
                t.line,
                t.col,
                format!("expected an expression, found {}", describe(&other)),
            )),
        }
    }
}

/// Parse a whole program into its list of definitions, in order.
///
/// The semiring is consulted only to range-check `const` codes; the circuits
/// themselves are semiring-generic syntax.
pub fn parse(desc: &Semiring, text: &str) -> Result<Vec<(String, Circuit)>> {
    let (toks, end) = lex(text)?;
    let mut p = Parser { desc, toks, pos: 0, end, defs: Vec::new(), index: HashMap::new() };
    if p.peek().is_none() {
        return Err(syntax(1, 1, "expected `let`, found end of input".into()));
    }
    while p.peek().is_some() {
        p.parse_def()?;
    }
    Ok(p.defs)
}

/// Parse a single expression (no `let`); the whole input must be consumed.
pub fn parse_expr(desc: &Semiring, text: &str) -> Result<Circuit> {
    let (toks, end) = lex(text)?;
    let mut p = Parser { desc, toks, pos: 0, end, defs: Vec::new(), index: HashMap::new() };
    let c = p.parse_expr()?;
    if let Some(tok) = p.peek() {
        let msg = format!("expected end of input, found {}", describe(tok));
        let (line, col) = p.here();
        return Err(syntax(line, col, msg));
    }
    Ok(c)
}

// Rendering works against minimum-precedence requirements: a sequential
// composition has precedence 0, a parallel composition 1, a generator 2.
// Because both operators are parsed left-associatively, the right child of a
// node must render at strictly higher precedence than the node itself, while
// the left child may render at the node's own level.
const PREC_SEQ: u8 = 0;
const PREC_PAR: u8 = 1;

enum Item {
    Circ(Circuit, u8),
    Text(&'static str),
}

fn render_into(c: &Circuit, out: &mut String) {
    let mut stack = vec![Item::Circ(c.clone(), PREC_SEQ)];
    while let Some(item) = stack.pop() {
        match item {
            Item::Text(s) => out.push_str(s),
            Item::Circ(c, need) => match c.node() {
                Node::Gen(Generator::Const(v)) => {
                    out.push_str("const(");
                    out.push_str(&v.to_string());
                    out.push(')');
                }
                Node::Gen(g) => out.push_str(g.name()),
                Node::Seq(f, g) => {
                    if need > PREC_SEQ {
                        out.push('(');
                        stack.push(Item::Text(")"));
                    }
                    stack.push(Item::Circ(g.clone(), PREC_SEQ + 1));
                    stack.push(Item::Text(" ; "));
                    stack.push(Item::Circ(f.clone(), PREC_SEQ));
                }
                Node::Par(f, g) => {
                    if need > PREC_PAR {
                        out.push('(');
                        stack.push(Item::Text(")"));
                    }
                    stack.push(Item::Circ(g.clone(), PREC_PAR + 1));
                    stack.push(Item::Text(" * "));
                    stack.push(Item::Circ(f.clone(), PREC_PAR));
                }
            },
        }
    }
}

/// Render one circuit as an expression that parses back to a structurally
/// equal circuit.
pub fn render(c: &Circuit) -> String {
    let mut out = String::new();
    render_into(c, &mut out);
    out
}

/// Render a list of definitions as a program, one `let` per line.
pub fn render_program(defs: &[(String, Circuit)]) -> String {
    let mut out = String::new();
    for (name, c) in defs {
        out.push_str("let ");
        out.push_str(name);
        out.push_str(" = ");
        render_into(c, &mut out);
        out.push('\n');
    }
    out
}
