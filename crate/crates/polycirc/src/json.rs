//! JSON interchange format for circuits.
//!
//! A circuit node is one of
//!
//! ```text
//! {"node":"gen","tag":<name>}                   fixed generators
//! {"node":"gen","tag":"const","value":<uint>}   constants
//! {"node":"seq","f":<node>,"g":<node>}          sequential composition
//! {"node":"par","f":<node>,"g":<node>}          parallel composition
//! ```
//!
//! and a program file wraps named circuits together with the semiring they
//! were written for:
//!
//! ```text
//! {"semiring":<id>,"circuits":{<name>:<node>, ...}}
//! ```
//!
//! Generator tags reuse the textual syntax's names (`add`, `copy`, `swap`,
//! ...), and circuit names follow the same identifier rule, so programs move
//! freely between the two formats.
//!
//! Derivative circuits nest thousands of levels deep, which rules out
//! recursive serializers (and the recursion caps general-purpose JSON
//! libraries impose); both directions here run on explicit work stacks. To
//! keep the reader single-pass at that depth, field order is fixed as written
//! above: `node` first, then `tag`/`value` or `f`/`g`. Strings carry no
//! escapes — names are identifiers and semiring ids are drawn from
//! `[a-z0-9:]` — and the writer emits keys in the fixed order, so
//! decode∘encode is the identity on structure.

use crate::circuit::{Circuit, Generator, Node};
use crate::dsl::{is_reserved, is_valid_name};
use crate::error::{Error, Result};
use crate::semiring::Semiring;

fn syntax(line: usize, col: usize, msg: String) -> Error {
    Error::SyntaxError { line, col, msg }
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

enum Emit {
    Circ(Circuit, usize),
    Lit(&'static str),
    Owned(String),
}

/// Append one node to `out`. `depth` is the indentation level of the node
/// itself; `pretty = false` produces the canonical compact form.
fn encode_into(c: &Circuit, out: &mut String, depth: usize, pretty: bool) {
    let mut stack = vec![Emit::Circ(c.clone(), depth)];
    while let Some(item) = stack.pop() {
        match item {
            Emit::Lit(s) => out.push_str(s),
            Emit::Owned(s) => out.push_str(&s),
            Emit::Circ(c, d) => match c.node() {
                Node::Gen(g) => {
                    let sp = if pretty { " " } else { "" };
                    out.push_str(&format!("{{\"node\":{sp}\"gen\",{sp}\"tag\":{sp}\"{}\"", g.name()));
                    if let Generator::Const(v) = g {
                        out.push_str(&format!(",{sp}\"value\":{sp}{v}"));
                    }
                    out.push('}');
                }
                Node::Seq(f, g) | Node::Par(f, g) => {
                    let kind = match c.node() {
                        Node::Seq(..) => "seq",
                        _ => "par",
                    };
                    if pretty {
                        let pad = "  ".repeat(d + 1);
                        out.push_str(&format!(
                            "{{\n{pad}\"node\": \"{kind}\",\n{pad}\"f\": "
                        ));
                        stack.push(Emit::Owned(format!("\n{}}}", "  ".repeat(d))));
                        stack.push(Emit::Circ(g.clone(), d + 1));
                        stack.push(Emit::Owned(format!(",\n{pad}\"g\": ")));
                        stack.push(Emit::Circ(f.clone(), d + 1));
                    } else {
                        out.push_str(&format!("{{\"node\":\"{kind}\",\"f\":"));
                        stack.push(Emit::Lit("}"));
                        stack.push(Emit::Circ(g.clone(), d));
                        stack.push(Emit::Lit(",\"g\":"));
                        stack.push(Emit::Circ(f.clone(), d));
                    }
                }
            },
        }
    }
}

/// Encode a single circuit node in compact form.
pub fn encode_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    encode_into(c, &mut out, 0, false);
    out
}

/// Encode a single circuit node with two-space indentation.
pub fn encode_circuit_pretty(c: &Circuit) -> String {
    let mut out = String::new();
    encode_into(c, &mut out, 0, true);
    out
}

fn encode_program_with(
    desc: &Semiring,
    defs: &[(String, Circuit)],
    pretty: bool,
) -> Result<String> {
    if defs.is_empty() {
        return Err(Error::Invalid("a program needs at least one circuit".into()));
    }
    for (name, _) in defs {
        if !is_valid_name(name) {
            return Err(Error::Invalid(format!("`{name}` is not a valid circuit name")));
        }
    }
    let mut out = String::new();
    if pretty {
        out.push_str(&format!(
            "{{\n  \"semiring\": \"{}\",\n  \"circuits\": {{\n",
            desc.id()
        ));
        for (i, (name, c)) in defs.iter().enumerate() {
            out.push_str(&format!("    \"{name}\": "));
            encode_into(c, &mut out, 2, true);
            out.push_str(if i + 1 < defs.len() { ",\n" } else { "\n" });
        }
        out.push_str("  }\n}\n");
    } else {
        out.push_str(&format!("{{\"semiring\":\"{}\",\"circuits\":{{", desc.id()));
        for (i, (name, c)) in defs.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("\"{name}\":"));
            encode_into(c, &mut out, 0, false);
        }
        out.push_str("}}");
    }
    Ok(out)
}

/// Encode named circuits as a compact program file with a semiring header.
pub fn encode_program(desc: &Semiring, defs: &[(String, Circuit)]) -> Result<String> {
    encode_program_with(desc, defs, false)
}

/// Encode named circuits as an indented program file with a semiring header.
pub fn encode_program_pretty(desc: &Semiring, defs: &[(String, Circuit)]) -> Result<String> {
    encode_program_with(desc, defs, true)
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LBrace,
    RBrace,
    Colon,
    Comma,
    Str(String),
    Num(u64),
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Num(n) => format!("number `{n}`"),
    }
}

struct Lexer<'a> {
    it: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { it: text.chars().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.it.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.it.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    /// Next token with its starting position, or `None` at end of input.
    fn next_token(&mut self) -> Result<Option<(Tok, usize, usize)>> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        let Some(c) = self.bump() else { return Ok(None) };
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ':' => Tok::Colon,
            ',' => Tok::Comma,
            '"' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => {
                            return Err(syntax(
                                line,
                                col,
                                "strings in this format do not support escapes".into(),
                            ))
                        }
                        Some(ch) if ch != '\n' => s.push(ch),
                        _ => return Err(syntax(line, col, "unterminated string".into())),
                    }
                }
                Tok::Str(s)
            }
            d if d.is_ascii_digit() => {
                let mut s = String::from(d);
                while matches!(self.it.peek(), Some(ch) if ch.is_ascii_digit()) {
                    s.push(self.bump().unwrap());
                }
                if s.len() > 1 && s.starts_with('0') {
                    return Err(syntax(line, col, format!("number `{s}` has a leading zero")));
                }
                let v: u64 = s.parse().map_err(|_| {
                    syntax(line, col, format!("number `{s}` does not fit in 64 bits"))
                })?;
                Tok::Num(v)
            }
            other => return Err(syntax(line, col, format!("unexpected character `{other}`"))),
        };
        Ok(Some((tok, line, col)))
    }
}

struct Reader<'a> {
    lexer: Lexer<'a>,
    desc: &'a Semiring,
}

impl<'a> Reader<'a> {
    fn take(&mut self, expected: &str) -> Result<(Tok, usize, usize)> {
        match self.lexer.next_token()? {
            Some(t) => Ok(t),
            None => Err(syntax(
                self.lexer.line,
                self.lexer.col,
                format!("expected {expected}, found end of input"),
            )),
        }
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<()> {
        let (tok, line, col) = self.take(expected)?;
        if tok == want {
            Ok(())
        } else {
            Err(syntax(line, col, format!("expected {expected}, found {}", describe(&tok))))
        }
    }

    /// `"key":` with a fixed key name.
    fn expect_key(&mut self, key: &'static str) -> Result<()> {
        self.expect(Tok::Str(key.into()), &format!("\"{key}\""))?;
        self.expect(Tok::Colon, "`:`")
    }

    fn take_string(&mut self, expected: &str) -> Result<(String, usize, usize)> {
        let (tok, line, col) = self.take(expected)?;
        match tok {
            Tok::Str(s) => Ok((s, line, col)),
            other => {
                Err(syntax(line, col, format!("expected {expected}, found {}", describe(&other))))
            }
        }
    }

    /// One circuit node, however deep. A frame on `stack` is an open seq/par
    /// object whose `f` child is filled in and whose `g` child is being read.
    fn node(&mut self) -> Result<Circuit> {
        enum Frame {
            Par(Option<Circuit>),
            Seq(Option<Circuit>),
        }
        let mut stack: Vec<Frame> = Vec::new();
        let mut done: Option<Circuit> = None;
        loop {
            if let Some(c) = done.take() {
                match stack.last_mut() {
                    None => return Ok(c),
                    Some(Frame::Par(slot @ None)) | Some(Frame::Seq(slot @ None)) => {
                        *slot = Some(c);
                        self.expect(Tok::Comma, "`,`")?;
                        self.expect_key("g")?;
                    }
                    Some(_) => {
                        let frame = stack.pop().expect("frame checked above");
                        self.expect(Tok::RBrace, "`}`")?;
                        done = Some(match frame {
                            Frame::Par(f) => {
                                Circuit::tensor(&f.expect("slot filled above"), &c)
                            }
                            Frame::Seq(f) => {
                                Circuit::compose(&f.expect("slot filled above"), &c)?
                            }
                        });
                    }
                }
                continue;
            }
            self.expect(Tok::LBrace, "`{`")?;
            self.expect_key("node")?;
            let (kind, line, col) = self.take_string("a node kind")?;
            match kind.as_str() {
                "gen" => {
                    self.expect(Tok::Comma, "`,`")?;
                    self.expect_key("tag")?;
                    let (tag, tline, tcol) = self.take_string("a generator tag")?;
                    let g = if tag == "const" {
                        self.expect(Tok::Comma, "`,`")?;
                        self.expect_key("value")?;
                        let (tok, vline, vcol) = self.take("a number")?;
                        let Tok::Num(v) = tok else {
                            return Err(syntax(
                                vline,
                                vcol,
                                format!("expected a number, found {}", describe(&tok)),
                            ));
                        };
                        self.desc.check_value(v)?;
                        Generator::Const(v)
                    } else {
                        Generator::from_name(&tag).ok_or_else(|| {
                            syntax(tline, tcol, format!("unknown generator tag \"{tag}\""))
                        })?
                    };
                    self.expect(Tok::RBrace, "`}`")?;
                    done = Some(Circuit::gen(g));
                }
                "seq" | "par" => {
                    self.expect(Tok::Comma, "`,`")?;
                    self.expect_key("f")?;
                    stack.push(if kind == "seq" {
                        Frame::Seq(None)
                    } else {
                        Frame::Par(None)
                    });
                }
                other => {
                    return Err(syntax(line, col, format!("unknown node kind \"{other}\"")))
                }
            }
        }
    }

    fn at_end(&mut self) -> Result<()> {
        match self.lexer.next_token()? {
            None => Ok(()),
            Some((tok, line, col)) => {
                Err(syntax(line, col, format!("expected end of input, found {}", describe(&tok))))
            }
        }
    }
}

/// Decode a single circuit node.
pub fn decode_circuit(desc: &Semiring, text: &str) -> Result<Circuit> {
    let mut r = Reader { lexer: Lexer::new(text), desc };
    let c = r.node()?;
    r.at_end()?;
    Ok(c)
}

/// Decode a program file, checking its semiring header against `desc`.
pub fn decode_program(desc: &Semiring, text: &str) -> Result<Vec<(String, Circuit)>> {
    let mut r = Reader { lexer: Lexer::new(text), desc };
    r.expect(Tok::LBrace, "`{`")?;
    r.expect_key("semiring")?;
    let (id, ..) = r.take_string("a semiring id")?;
    if id != desc.id() {
        return Err(Error::SemiringMismatch { file: id, active: desc.id().to_string() });
    }
    r.expect(Tok::Comma, "`,`")?;
    r.expect_key("circuits")?;
    r.expect(Tok::LBrace, "`{`")?;
    let mut defs: Vec<(String, Circuit)> = Vec::new();
    loop {
        let (name, line, col) = r.take_string("a circuit name")?;
        if is_reserved(&name) {
            return Err(syntax(line, col, format!("`{name}` is a reserved word")));
        }
        if !is_valid_name(&name) {
            return Err(syntax(line, col, format!("`{name}` is not a valid circuit name")));
        }
        if defs.iter().any(|(n, _)| n == &name) {
            return Err(syntax(line, col, format!("`{name}` is defined twice")));
        }
        r.expect(Tok::Colon, "`:`")?;
        let c = r.node()?;
        defs.push((name, c));
        let (tok, line, col) = r.take("`,` or `}`")?;
        match tok {
            Tok::Comma => continue,
            Tok::RBrace => break,
            other => {
                return Err(syntax(
                    line,
                    col,
                    format!("expected `,` or `}}`, found {}", describe(&other)),
                ))
            }
        }
    }
    r.expect(Tok::RBrace, "`}`")?;
    r.at_end()?;
    Ok(defs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Generator as G;

    fn s(id: &str) -> Semiring {
        id.parse().unwrap()
    }

    fn gen(g: G) -> Circuit {
        Circuit::gen(g)
    }

    #[test]
    fn encodes_the_documented_forms() {
        let seq = Circuit::compose(&gen(G::Copy), &gen(G::Add)).unwrap();
        assert_eq!(
            encode_circuit(&seq),
            r#"{"node":"seq","f":{"node":"gen","tag":"copy"},"g":{"node":"gen","tag":"add"}}"#
        );
        assert_eq!(
            encode_circuit(&gen(G::Const(3))),
            r#"{"node":"gen","tag":"const","value":3}"#
        );
        let par = Circuit::tensor(&gen(G::Identity), &gen(G::Twist));
        assert_eq!(
            encode_circuit(&par),
            r#"{"node":"par","f":{"node":"gen","tag":"id"},"g":{"node":"gen","tag":"swap"}}"#
        );
    }

    #[test]
    fn decode_inverts_encode() {
        let d = s("zmod:5");
        let samples = vec![
            gen(G::Zero),
            Circuit::empty(),
            Circuit::copy_n(3),
            Circuit::add_n(2),
            Circuit::swap_block(2, 1),
            Circuit::const_tuple(&[0, 4, 2]),
            Circuit::compose(
                &Circuit::copy_n(2),
                &Circuit::tensor(&gen(G::Mul), &gen(G::Compare)),
            )
            .unwrap(),
        ];
        for c in samples {
            let text = encode_circuit(&c);
            assert_eq!(decode_circuit(&d, &text).unwrap(), c, "round trip failed for {text}");
            let pretty = encode_circuit_pretty(&c);
            assert_eq!(decode_circuit(&d, &pretty).unwrap(), c);
        }
    }

    #[test]
    fn programs_round_trip_with_header() {
        let d = s("zmod:2");
        let f = Circuit::compose(&gen(G::Copy), &gen(G::Add)).unwrap();
        let defs = vec![("f".to_string(), f.clone()), ("g".to_string(), gen(G::One))];
        let text = encode_program(&d, &defs).unwrap();
        assert_eq!(
            text,
            r#"{"semiring":"zmod:2","circuits":{"f":{"node":"seq","f":{"node":"gen","tag":"copy"},"g":{"node":"gen","tag":"add"}},"g":{"node":"gen","tag":"one"}}}"#
        );
        assert_eq!(decode_program(&d, &text).unwrap(), defs);
        let pretty = encode_program_pretty(&d, &defs).unwrap();
        assert_eq!(decode_program(&d, &pretty).unwrap(), defs);
    }

    #[test]
    fn header_semiring_must_match() {
        let defs = vec![("f".to_string(), gen(G::One))];
        let text = encode_program(&s("zmod:3"), &defs).unwrap();
        let err = decode_program(&s("zmod:2"), &text).unwrap_err();
        assert_eq!(
            err,
            Error::SemiringMismatch { file: "zmod:3".into(), active: "zmod:2".into() }
        );
    }

    #[test]
    fn constants_are_range_checked() {
        let err = decode_circuit(&s("zmod:3"), r#"{"node":"gen","tag":"const","value":5}"#)
            .unwrap_err();
        assert_eq!(err, Error::ConstOutOfRange { code: 5, size: 3 });
    }

    #[test]
    fn composition_shapes_are_checked() {
        let text = r#"{"node":"seq","f":{"node":"gen","tag":"add"},"g":{"node":"gen","tag":"mul"}}"#;
        assert!(matches!(
            decode_circuit(&s("zmod:2"), text),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn malformed_documents_are_rejected_with_positions() {
        let d = s("zmod:2");
        let with_escape = format!(r#"{{"node":"gen","tag":"{}u0061dd"}}"#, '\\');
        let cases: Vec<(&str, &str)> = vec![
            (&with_escape, "do not support escapes"),
            (r#"{"tag":"add","node":"gen"}"#, "expected \"node\""),
            (r#"{"node":"gen","tag":"frobnicate"}"#, "unknown generator tag"),
            (r#"{"node":"widget"}"#, "unknown node kind"),
            (r#"{"node":"gen","tag":"add"} extra"#, "unexpected character"),
            (r#"{"node":"gen","tag":"add"} {}"#, "expected end of input"),
            (r#"{"node":"gen","tag":"add","value":1}"#, "expected `}`"),
            (r#"{"node":"gen","tag":"const","value":01}"#, "leading zero"),
            (r#"{"node":"gen","tag":"add""#, "found end of input"),
            (r#"{"node":"gen","tag":"ad"#, "unterminated string"),
        ];
        for (text, want) in cases {
            let err = decode_circuit(&d, text).unwrap_err();
            let msg = err.to_string();
            assert!(msg.contains(want), "for {text}: got `{msg}`, wanted `{want}`");
            assert!(matches!(err, Error::SyntaxError { .. }));
        }
    }

    #[test]
    fn program_names_follow_the_identifier_rule() {
        let d = s("zmod:2");
        let node = r#"{"node":"gen","tag":"one"}"#;
        for (name, want) in [
            ("f-g", "not a valid circuit name"),
            ("add", "reserved word"),
            ("", "not a valid circuit name"),
        ] {
            let text = format!(r#"{{"semiring":"zmod:2","circuits":{{"{name}":{node}}}}}"#);
            let msg = decode_program(&d, &text).unwrap_err().to_string();
            assert!(msg.contains(want), "for `{name}`: got `{msg}`");
        }
        let text = format!(
            r#"{{"semiring":"zmod:2","circuits":{{"f":{node},"f":{node}}}}}"#
        );
        let msg = decode_program(&d, &text).unwrap_err().to_string();
        assert!(msg.contains("defined twice"));
        let err = encode_program(&d, &[("f g".into(), gen(G::One))]).unwrap_err();
        assert!(err.to_string().contains("not a valid circuit name"));
        let err = encode_program(&d, &[]).unwrap_err();
        assert!(err.to_string().contains("at least one circuit"));
    }

    #[test]
    fn deep_chains_survive_both_directions() {
        let d = s("zmod:2");
        let mut c = gen(G::Identity);
        for _ in 0..50_000 {
            c = Circuit::compose(&c, &gen(G::Identity)).unwrap();
        }
        let text = encode_circuit(&c);
        let back = decode_circuit(&d, &text).unwrap();
        assert_eq!(back, c);

        // Indentation grows with depth, so the pretty form is quadratic in
        // nesting depth; exercise it on a shallower chain.
        let mut c = gen(G::Identity);
        for _ in 0..2_000 {
            c = Circuit::compose(&c, &gen(G::Identity)).unwrap();
        }
        let pretty = encode_circuit_pretty(&c);
        assert_eq!(decode_circuit(&d, &pretty).unwrap(), c);
    }
}
