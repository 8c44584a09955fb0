//! Recursive-descent parser for the surface syntax.
//!
//! A file holds a single program. It is read as a circuit when it starts with
//! `lam`, a gate, or `force {`; otherwise as a functional term. A leading
//! `match` is tried as a term first, then as a circuit.

use thiserror::Error;

use super::lexer::{lex, Span, Tok, Token};
use super::{Color, Mode, Name, Pattern, PatternFamily, Program, Signature, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

/// Source positions mirroring the shape of a parsed [`Program`]. Children are
/// ordered as the program's subterms: lambda body; pair and application
/// operands; the operand of `susp`, `circ`, `down` and `force`; match
/// scrutinee then pattern body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanTree {
    pub span: Span,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    fn leaf(span: Span) -> Self {
        SpanTree { span, children: vec![] }
    }

    /// Position of the node reached by following child indices.
    pub fn locate(&self, path: &[u8]) -> Span {
        let mut node = self;
        for &i in path {
            match node.children.get(i as usize) {
                Some(child) => node = child,
                None => break,
            }
        }
        node.span
    }
}

type Parsed = (Program, SpanTree);

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    bare_unit: bool,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        let toks = lex(src).map_err(|(span, message)| ParseError { span, message })?;
        Ok(Parser { toks, pos: 0, bare_unit: false })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: String) -> Result<T, ParseError> {
        Err(ParseError { span: self.span(), message })
    }

    fn expect(&mut self, t: Tok) -> Result<Span, ParseError> {
        if *self.peek() == t {
            Ok(self.bump().span)
        } else {
            self.err(format!("expected {t}, found {}", self.peek()))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Name::new(&s))
            }
            t => self.err(format!("expected an identifier, found {t}")),
        }
    }

    // ---- types ----

    fn mode(&mut self) -> Result<Mode, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "u" => Ok({
                self.bump();
                Mode::U
            }),
            Tok::Ident(s) if s == "l" => Ok({
                self.bump();
                Mode::L
            }),
            Tok::Ident(s) if s == "q" => Ok({
                self.bump();
                Mode::Q
            }),
            t => self.err(format!("expected a mode (u, l or q), found {t}")),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let start = self.span();
        let t = self.ty_arrow()?;
        t.validate().map_err(|e| ParseError { span: start, message: e.to_string() })?;
        Ok(t)
    }

    fn suffix_mode(&mut self, inferred: Mode) -> Result<Mode, ParseError> {
        if self.eat(&Tok::At) {
            let span = self.span();
            let m = self.mode()?;
            if m != inferred {
                return Err(ParseError {
                    span,
                    message: format!("mode annotation @{m} disagrees with operand mode {inferred}"),
                });
            }
            Ok(m)
        } else {
            Ok(inferred)
        }
    }

    fn ty_arrow(&mut self) -> Result<Type, ParseError> {
        let a = self.ty_tensor()?;
        if self.eat(&Tok::Lolli) {
            let b = self.ty_arrow()?;
            let m = self.suffix_mode(a.mode())?;
            return Ok(Type::arrow(a, b, m));
        }
        Ok(a)
    }

    fn ty_tensor(&mut self) -> Result<Type, ParseError> {
        let a = self.ty_unary()?;
        if self.eat(&Tok::Star) {
            let b = self.ty_tensor()?;
            let m = self.suffix_mode(a.mode())?;
            return Ok(Type::tensor(a, b, m));
        }
        Ok(a)
    }

    fn ty_unary(&mut self) -> Result<Type, ParseError> {
        match self.peek() {
            Tok::KwUp => {
                self.bump();
                Ok(Type::up(self.ty_unary()?))
            }
            Tok::KwDown => {
                self.bump();
                Ok(Type::down(self.ty_unary()?))
            }
            Tok::KwQubit => {
                self.bump();
                Ok(Type::Qubit)
            }
            Tok::KwUnit => {
                self.bump();
                if self.eat(&Tok::At) {
                    Ok(Type::Unit(self.mode()?))
                } else if self.bare_unit {
                    Ok(Type::Unit(Mode::Q))
                } else {
                    self.err("expected `@` and a mode after `unit`".into())
                }
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty_arrow()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => self.err(format!("expected a type, found {t}")),
        }
    }

    // ---- shared pieces ----

    fn binder(&mut self) -> Result<(Name, Option<Type>), ParseError> {
        if self.eat(&Tok::LParen) {
            let x = self.ident()?;
            self.expect(Tok::Colon)?;
            let t = self.ty()?;
            self.expect(Tok::RParen)?;
            Ok((x, Some(t)))
        } else {
            Ok((self.ident()?, None))
        }
    }

    /// Parses `() => body`, `(x, y) => body`, or (functional only) `down x => body`.
    fn pattern(
        &mut self,
        allow_down: bool,
        body: fn(&mut Parser) -> Result<Parsed, ParseError>,
    ) -> Result<(Pattern, SpanTree), ParseError> {
        if allow_down && self.eat(&Tok::Down) {
            let x = self.ident()?;
            self.expect(Tok::Arrow)?;
            let (b, s) = body(self)?;
            return Ok((Pattern::Down(x, Box::new(b)), s));
        }
        self.expect(Tok::LParen)?;
        if self.eat(&Tok::RParen) {
            self.expect(Tok::Arrow)?;
            let (b, s) = body(self)?;
            return Ok((Pattern::Unit(Box::new(b)), s));
        }
        let x_span = self.span();
        let x = self.ident()?;
        self.expect(Tok::Comma)?;
        let y = self.ident()?;
        self.expect(Tok::RParen)?;
        if x == y {
            return Err(ParseError { span: x_span, message: format!("pattern binds `{x}` twice") });
        }
        self.expect(Tok::Arrow)?;
        let (b, s) = body(self)?;
        Ok((Pattern::Pair(x, y, Box::new(b)), s))
    }

    // ---- functional terms ----

    fn term(&mut self) -> Result<Parsed, ParseError> {
        let start = self.span();
        match self.peek() {
            Tok::Fn => {
                self.bump();
                let (binder, annot) = self.binder()?;
                self.expect(Tok::Arrow)?;
                let (body, s) = self.term()?;
                let p = Program::Lam { binder, annot, body: Box::new(body), color: Color::Functional };
                Ok((p, SpanTree { span: start, children: vec![s] }))
            }
            Tok::Match => {
                self.bump();
                let (scrut, ss, family) = if self.eat(&Tok::Circval) {
                    let (c, s) = self.circ()?;
                    (c, s, PatternFamily::QF)
                } else {
                    let (m, s) = self.term()?;
                    (m, s, PatternFamily::FF)
                };
                self.expect(Tok::With)?;
                self.expect(Tok::LBrace)?;
                let (pat, bs) = self.pattern(family == PatternFamily::FF, Parser::term)?;
                self.expect(Tok::RBrace)?;
                let p = Program::matching(scrut, pat, family);
                Ok((p, SpanTree { span: start, children: vec![ss, bs] }))
            }
            _ => self.term_app(),
        }
    }

    fn starts_term_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen | Tok::Circ | Tok::Susp | Tok::Down | Tok::Force)
    }

    fn term_app(&mut self) -> Result<Parsed, ParseError> {
        let start = self.span();
        let (mut f, mut fs) = self.term_prefix()?;
        while self.starts_term_atom() {
            let (a, s) = self.term_prefix()?;
            f = Program::app(f, a, Color::Functional);
            fs = SpanTree { span: start, children: vec![fs, s] };
        }
        Ok((f, fs))
    }

    fn term_prefix(&mut self) -> Result<Parsed, ParseError> {
        let start = self.span();
        let wrap = |p: &mut Parser, k: fn(Program) -> Program| -> Result<Parsed, ParseError> {
            p.bump();
            let (m, s) = p.term_prefix()?;
            Ok((k(m), SpanTree { span: start, children: vec![s] }))
        };
        match self.peek() {
            Tok::Susp => wrap(self, Program::susp),
            Tok::Down => wrap(self, Program::down),
            Tok::Force => {
                if *self.peek_at(1) == Tok::LBrace {
                    return self.err("`force { ... }` is a circuit; use `force M` in terms".into());
                }
                wrap(self, |m| Program::force(m, Color::Functional))
            }
            _ => self.term_atom(),
        }
    }

    fn term_atom(&mut self) -> Result<Parsed, ParseError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((Program::Var(Name::new(&s), Color::Functional), SpanTree::leaf(start)))
            }
            Tok::Circ => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let (c, s) = self.circ()?;
                self.expect(Tok::RBrace)?;
                Ok((Program::circ(c), SpanTree { span: start, children: vec![s] }))
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    return Ok((Program::Unit(Color::Functional), SpanTree::leaf(start)));
                }
                let (a, sa) = self.term()?;
                if self.eat(&Tok::Comma) {
                    let (b, sb) = self.term()?;
                    self.expect(Tok::RParen)?;
                    return Ok((
                        Program::pair(a, b, Color::Functional),
                        SpanTree { span: start, children: vec![sa, sb] },
                    ));
                }
                self.expect(Tok::RParen)?;
                Ok((a, sa))
            }
            Tok::Hash(g) => self.err(format!("gate `#{g}` can only appear inside a circuit")),
            Tok::Lam => self.err("`lam` builds a circuit; wrap it in `circ { ... }`".into()),
            t => self.err(format!("expected a term, found {t}")),
        }
    }

    // ---- circuits ----

    fn circ(&mut self) -> Result<Parsed, ParseError> {
        let start = self.span();
        match self.peek() {
            Tok::Lam => {
                self.bump();
                let (binder, annot) = self.binder()?;
                self.expect(Tok::Arrow)?;
                let (body, s) = self.circ()?;
                let p = Program::Lam { binder, annot, body: Box::new(body), color: Color::Circuit };
                Ok((p, SpanTree { span: start, children: vec![s] }))
            }
            Tok::Match => {
                self.bump();
                let (scrut, ss) = self.circ()?;
                self.expect(Tok::With)?;
                self.expect(Tok::LBrace)?;
                let (pat, bs) = self.pattern(false, Parser::circ)?;
                self.expect(Tok::RBrace)?;
                let p = Program::matching(scrut, pat, PatternFamily::QQ);
                Ok((p, SpanTree { span: start, children: vec![ss, bs] }))
            }
            Tok::Fn => self.err("`fn` builds a term; circuits use `lam`".into()),
            _ => self.circ_app(),
        }
    }

    fn starts_circ_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Hash(_) | Tok::LParen | Tok::Force)
    }

    fn circ_app(&mut self) -> Result<Parsed, ParseError> {
        let start = self.span();
        let (mut f, mut fs) = self.circ_atom()?;
        while self.starts_circ_atom() {
            let (a, s) = self.circ_atom()?;
            f = Program::app(f, a, Color::Circuit);
            fs = SpanTree { span: start, children: vec![fs, s] };
        }
        Ok((f, fs))
    }

    fn circ_atom(&mut self) -> Result<Parsed, ParseError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((Program::Var(Name::new(&s), Color::Circuit), SpanTree::leaf(start)))
            }
            Tok::Hash(g) => {
                self.bump();
                Ok((Program::Gate(Name::new(&g)), SpanTree::leaf(start)))
            }
            Tok::Force => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let (m, s) = self.term()?;
                self.expect(Tok::RBrace)?;
                Ok((Program::force(m, Color::Circuit), SpanTree { span: start, children: vec![s] }))
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    return Ok((Program::Unit(Color::Circuit), SpanTree::leaf(start)));
                }
                let (a, sa) = self.circ()?;
                if self.eat(&Tok::Comma) {
                    let (b, sb) = self.circ()?;
                    self.expect(Tok::RParen)?;
                    return Ok((Program::pair(a, b, Color::Circuit), SpanTree { span: start, children: vec![sa, sb] }));
                }
                self.expect(Tok::RParen)?;
                Ok((a, sa))
            }
            Tok::Susp | Tok::Down | Tok::Circ => {
                self.err(format!("{} builds a functional term and cannot appear in a circuit", self.peek()))
            }
            t => self.err(format!("expected a circuit, found {t}")),
        }
    }

    fn program(&mut self) -> Result<Parsed, ParseError> {
        let circuit = match self.peek() {
            Tok::Lam | Tok::Hash(_) => true,
            Tok::Force => *self.peek_at(1) == Tok::LBrace,
            _ => false,
        };
        if circuit {
            return self.whole(Self::circ);
        }
        if *self.peek() != Tok::Match {
            return self.whole(Self::term);
        }
        // a top-level match may be either; keep whichever error got further
        match self.whole(Self::term) {
            Ok(r) => Ok(r),
            Err(as_term) => {
                self.pos = 0;
                self.whole(Self::circ).map_err(|as_circ| {
                    if (as_circ.span.line, as_circ.span.col) > (as_term.span.line, as_term.span.col) {
                        as_circ
                    } else {
                        as_term
                    }
                })
            }
        }
    }

    fn whole(&mut self, f: fn(&mut Self) -> Result<Parsed, ParseError>) -> Result<Parsed, ParseError> {
        let r = f(self)?;
        if *self.peek() != Tok::Eof {
            return self.err(format!("unexpected {} after the program", self.peek()));
        }
        Ok(r)
    }
}

pub fn parse_program(src: &str) -> Result<(Program, SpanTree), ParseError> {
    let mut p = Parser::new(src)?;
    let (prog, spans) = p.program()?;
    prog.validate_colors().map_err(|e| ParseError { span: spans.span, message: e.to_string() })?;
    Ok((prog, spans))
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {} after the type", p.peek()));
    }
    Ok(t)
}

/// Reads `gate NAME : S -o U` declarations, one per line. A bare `unit`
/// means `unit@q` here.
pub fn parse_signature(src: &str) -> Result<Signature, ParseError> {
    let mut p = Parser::new(src)?;
    p.bare_unit = true;
    let mut sig = Signature::new();
    while *p.peek() != Tok::Eof {
        p.expect(Tok::Gate)?;
        let span = p.span();
        let name = p.ident()?;
        p.expect(Tok::Colon)?;
        let ty = p.ty()?;
        sig.declare(name, &ty).map_err(|e| ParseError { span, message: e.to_string() })?;
    }
    Ok(sig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(s: &str) -> Program {
        parse_program(s).unwrap().0
    }

    #[test]
    fn unit_and_gate_image() {
        assert_eq!(prog("()"), Program::Unit(Color::Functional));
        let expected = Program::circ(Program::lam(
            "x",
            None,
            Program::app(Program::gate("H"), Program::cvar("x"), Color::Circuit),
            Color::Circuit,
        ));
        assert_eq!(prog("circ { lam x => #H x }"), expected);
    }

    #[test]
    fn application_is_left_associative() {
        let p = prog("f a b");
        let expected = Program::app(
            Program::app(Program::fvar("f"), Program::fvar("a"), Color::Functional),
            Program::fvar("b"),
            Color::Functional,
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn type_precedence_and_modes() {
        let t = parse_type("qubit * qubit -o qubit").unwrap();
        assert_eq!(t, Type::arrow(Type::tensor(Type::Qubit, Type::Qubit, Mode::Q), Type::Qubit, Mode::Q));
        let t = parse_type("(Up qubit -o Up qubit @l) -o Up (qubit -o qubit @q) @l").unwrap();
        assert_eq!(t.mode(), Mode::L);
        assert!(parse_type("qubit * qubit @l").is_err());
        assert!(parse_type("unit").is_err());
    }

    #[test]
    fn gate_outside_circuit_is_rejected() {
        let e = parse_program("susp #H").unwrap_err();
        assert!(e.message.contains("inside a circuit"));
        assert_eq!(e.span, Span { line: 1, col: 6 });
    }

    #[test]
    fn signatures() {
        let sig = parse_signature("gate H : qubit -o qubit\ngate CNOT : qubit * qubit -o qubit * qubit").unwrap();
        assert_eq!(sig.len(), 2);
        assert!(parse_signature("gate BAD : (qubit -o qubit) -o qubit").is_err());
        assert!(parse_signature("gate H : qubit -o qubit\ngate H : qubit -o qubit").is_err());
    }

    #[test]
    fn span_tree_locates_subterms() {
        let (_, spans) = parse_program("fn (x : unit@l) =>\n  (x, x)").unwrap();
        assert_eq!(spans.locate(&[0, 1]), Span { line: 2, col: 7 });
    }
}
