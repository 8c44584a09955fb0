//! Proto-Quipper surface types and their encoding into the adjoint calculus,
//! together with the combinators that rebuild boxing and circuit application.
//!
//! Combinators are returned as closed, fully annotated ASTs so they can be
//! checked by synthesis.

use std::fmt;

use thiserror::Error;

use crate::syntax::{parse_signature, Color, Mode, Name, ParseError, Pattern, PatternFamily, Program, Signature, Type};

/// Wire-bundle types.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimplePQ {
    I,
    Q,
    Tensor(Box<SimplePQ>, Box<SimplePQ>),
}

impl SimplePQ {
    pub fn tensor(a: SimplePQ, b: SimplePQ) -> SimplePQ {
        SimplePQ::Tensor(Box::new(a), Box::new(b))
    }

    /// The circuit-layer type of the bundle.
    pub fn circuit_type(&self) -> Type {
        match self {
            SimplePQ::I => Type::unit(Mode::Q),
            SimplePQ::Q => Type::Qubit,
            SimplePQ::Tensor(a, b) => Type::tensor(a.circuit_type(), b.circuit_type(), Mode::Q),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SimplePQ::I | SimplePQ::Q => 0,
            SimplePQ::Tensor(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Every simple type of tensor depth at most `depth`.
    pub fn enumerate(depth: usize) -> Vec<SimplePQ> {
        let mut all = vec![SimplePQ::I, SimplePQ::Q];
        for _ in 0..depth {
            let prev = all.clone();
            all = vec![SimplePQ::I, SimplePQ::Q];
            for a in &prev {
                for b in &prev {
                    all.push(SimplePQ::tensor(a.clone(), b.clone()));
                }
            }
        }
        all
    }
}

impl fmt::Display for SimplePQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimplePQ::I => f.write_str("I"),
            SimplePQ::Q => f.write_str("Q"),
            SimplePQ::Tensor(a, b) => write!(f, "({a} * {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PQType {
    I,
    Q,
    Tensor(Box<PQType>, Box<PQType>),
    Lolli(Box<PQType>, Box<PQType>),
    Circ(SimplePQ, SimplePQ),
    Bang(Box<PQType>),
}

impl From<&SimplePQ> for PQType {
    fn from(s: &SimplePQ) -> Self {
        match s {
            SimplePQ::I => PQType::I,
            SimplePQ::Q => PQType::Q,
            SimplePQ::Tensor(a, b) => PQType::Tensor(Box::new((&**a).into()), Box::new((&**b).into())),
        }
    }
}

/// Encodes a Proto-Quipper type as a mode-l type.
pub fn enc_type(a: &PQType) -> Type {
    match a {
        PQType::I => Type::up(Type::unit(Mode::Q)),
        PQType::Q => Type::up(Type::Qubit),
        PQType::Tensor(a, b) => Type::tensor(enc_type(a), enc_type(b), Mode::L),
        PQType::Lolli(a, b) => Type::arrow(enc_type(a), enc_type(b), Mode::L),
        PQType::Circ(s, u) => Type::up(Type::arrow(s.circuit_type(), u.circuit_type(), Mode::Q)),
        PQType::Bang(a) => Type::down(Type::up(enc_type(a))),
    }
}

pub fn enc_simple(s: &SimplePQ) -> Type {
    enc_type(&s.into())
}

fn flam(x: &str, annot: Type, body: Program) -> Program {
    Program::lam(x, Some(annot), body, Color::Functional)
}

fn fapp(f: Program, a: Program) -> Program {
    Program::app(f, a, Color::Functional)
}

fn pair_pattern(a: &str, b: &str, body: Program) -> Pattern {
    Pattern::Pair(Name::new(a), Name::new(b), Box::new(body))
}

/// `lax_{S,U} : (Up S * Up U @l) -o Up (S * U @q) @l`
pub fn mk_lax(s: &SimplePQ, u: &SimplePQ) -> Program {
    let (st, ut) = (s.circuit_type(), u.circuit_type());
    let body = Program::circ(Program::pair(
        Program::force(Program::fvar("a"), Color::Circuit),
        Program::force(Program::fvar("b"), Color::Circuit),
        Color::Circuit,
    ));
    flam(
        "x",
        Type::tensor(Type::up(st), Type::up(ut), Mode::L),
        Program::matching(Program::fvar("x"), pair_pattern("a", "b", body), PatternFamily::FF),
    )
}

/// `oplax_{S,U} : Up (S * U @q) -o (Up S * Up U @l) @l`
pub fn mk_oplax(s: &SimplePQ, u: &SimplePQ) -> Program {
    let st = Type::tensor(s.circuit_type(), u.circuit_type(), Mode::Q);
    let body = Program::pair(Program::circ(Program::cvar("a")), Program::circ(Program::cvar("b")), Color::Functional);
    flam(
        "x",
        Type::up(st),
        Program::matching(
            Program::force(Program::fvar("x"), Color::Circuit),
            pair_pattern("a", "b", body),
            PatternFamily::QF,
        ),
    )
}

/// `lax_S : enc(S) -o Up S @l`, right-nested over the tensor tree.
pub fn mk_lax_simple(s: &SimplePQ) -> Program {
    match s {
        SimplePQ::I | SimplePQ::Q => flam("x", enc_simple(s), Program::fvar("x")),
        SimplePQ::Tensor(l, r) => {
            let body = fapp(
                mk_lax(l, r),
                Program::pair(
                    fapp(mk_lax_simple(l), Program::fvar("a")),
                    fapp(mk_lax_simple(r), Program::fvar("b")),
                    Color::Functional,
                ),
            );
            flam(
                "x",
                enc_simple(s),
                Program::matching(Program::fvar("x"), pair_pattern("a", "b", body), PatternFamily::FF),
            )
        }
    }
}

/// `oplax_S : Up S -o enc(S) @l`
pub fn mk_oplax_simple(s: &SimplePQ) -> Program {
    match s {
        SimplePQ::I | SimplePQ::Q => flam("x", Type::up(s.circuit_type()), Program::fvar("x")),
        SimplePQ::Tensor(l, r) => {
            let body = Program::pair(
                fapp(mk_oplax_simple(l), Program::fvar("a")),
                fapp(mk_oplax_simple(r), Program::fvar("b")),
                Color::Functional,
            );
            flam(
                "x",
                Type::up(s.circuit_type()),
                Program::matching(
                    fapp(mk_oplax(l, r), Program::fvar("x")),
                    pair_pattern("a", "b", body),
                    PatternFamily::FF,
                ),
            )
        }
    }
}

fn linear_fn(s: &SimplePQ, u: &SimplePQ) -> Type {
    Type::arrow(enc_simple(s), enc_simple(u), Mode::L)
}

/// Boxes a linear function `enc(S) -o enc(U)` as a suspended circuit.
pub fn mk_box_linear(s: &SimplePQ, u: &SimplePQ) -> Program {
    let argument = fapp(mk_oplax_simple(s), Program::circ(Program::cvar("s")));
    let image = fapp(mk_lax_simple(u), fapp(Program::fvar("f"), argument));
    let circuit = Program::lam("s", Some(s.circuit_type()), Program::force(image, Color::Circuit), Color::Circuit);
    flam("f", linear_fn(s, u), Program::circ(circuit))
}

/// `box_{S,U} : Down Up (enc S -o enc U @l) -o Up (S -o U @q) @l`
pub fn mk_box(s: &SimplePQ, u: &SimplePQ) -> Program {
    let body = fapp(mk_box_linear(s, u), Program::force(Program::fvar("f"), Color::Functional));
    flam(
        "x",
        Type::down(Type::up(linear_fn(s, u))),
        Program::matching(Program::fvar("x"), Pattern::Down(Name::new("f"), Box::new(body)), PatternFamily::FF),
    )
}

/// `apply_{S,U} : Up (S -o U @q) -o (enc S -o enc U @l) @l`
pub fn mk_apply(s: &SimplePQ, u: &SimplePQ) -> Program {
    let circuit = Program::app(
        Program::force(Program::fvar("f"), Color::Circuit),
        Program::force(fapp(mk_lax_simple(s), Program::fvar("s")), Color::Circuit),
        Color::Circuit,
    );
    let body = fapp(mk_oplax_simple(u), Program::circ(circuit));
    flam("f", Type::up(Type::arrow(s.circuit_type(), u.circuit_type(), Mode::Q)), flam("s", enc_simple(s), body))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Combinator {
    Lax,
    Oplax,
    BoxLinear,
    Box,
    Apply,
}

impl Combinator {
    pub const ALL: [Combinator; 5] =
        [Combinator::Lax, Combinator::Oplax, Combinator::BoxLinear, Combinator::Box, Combinator::Apply];

    pub fn build(self, s: &SimplePQ, u: &SimplePQ) -> Program {
        match self {
            Combinator::Lax => mk_lax(s, u),
            Combinator::Oplax => mk_oplax(s, u),
            Combinator::BoxLinear => mk_box_linear(s, u),
            Combinator::Box => mk_box(s, u),
            Combinator::Apply => mk_apply(s, u),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Combinator::Lax => "lax",
            Combinator::Oplax => "oplax",
            Combinator::BoxLinear => "BOX",
            Combinator::Box => "box",
            Combinator::Apply => "apply",
        }
    }
}

/// Composition of two boxed circuits: `Up (S -o S) -o Up (S -o S) -o Up (S -o S)`,
/// applying the second argument first.
pub fn compose_boxes() -> Program {
    let circ_ty = Type::up(Type::arrow(Type::Qubit, Type::Qubit, Mode::Q));
    let inner = Program::app(Program::force(Program::fvar("f"), Color::Circuit), Program::cvar("x"), Color::Circuit);
    let body = Program::app(Program::force(Program::fvar("g"), Color::Circuit), inner, Color::Circuit);
    let circuit = Program::lam("x", Some(Type::Qubit), body, Color::Circuit);
    flam("g", circ_ty.clone(), flam("f", circ_ty, Program::circ(circuit)))
}

/// The three-gate circuit `CNOT; H; CNOT` written against the combinators:
/// a linear function over `enc(Q * (Q * Q))`, boxed with `box`.
pub fn circuit_e() -> Program {
    let q = SimplePQ::Q;
    let qq = SimplePQ::tensor(SimplePQ::Q, SimplePQ::Q);
    let s = SimplePQ::tensor(SimplePQ::Q, qq.clone());
    let cnot = |arg: Program| fapp(fapp(mk_apply(&qq, &qq), Program::circ(Program::gate("CNOT"))), arg);
    let hadamard = |arg: Program| fapp(fapp(mk_apply(&q, &q), Program::circ(Program::gate("H"))), arg);
    let fpair = |a: Program, b: Program| Program::pair(a, b, Color::Functional);

    let tail =
        flam("y3", enc_simple(&q), fpair(Program::fvar("y1"), cnot(fpair(Program::fvar("y2"), Program::fvar("y3")))));
    let after_first = Program::matching(
        cnot(fpair(Program::fvar("x1"), Program::fvar("x2"))),
        pair_pattern("y1", "y2", fapp(tail, hadamard(Program::fvar("x3")))),
        PatternFamily::FF,
    );
    let body = Program::matching(
        Program::fvar("x"),
        pair_pattern(
            "x1",
            "x23",
            Program::matching(Program::fvar("x23"), pair_pattern("x2", "x3", after_first), PatternFamily::FF),
        ),
        PatternFamily::FF,
    );
    let function = flam("x", enc_simple(&s), body);
    fapp(mk_box(&s, &s), Program::down(Program::susp(function)))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StdlibError {
    #[error("signature file: {0}")]
    Parse(#[from] ParseError),
    #[error("signature file lacks required gate `{0}`")]
    Missing(&'static str),
}

pub const STDLIB_SOURCE: &str = include_str!("stdlib.sig");

/// Reads a gate signature. At least `H`, `Z` and `CNOT` must be declared.
pub fn load_stdlib(src: &str) -> Result<Signature, StdlibError> {
    let sig = parse_signature(src)?;
    for g in ["H", "Z", "CNOT"] {
        if sig.lookup(g).is_none() {
            return Err(StdlibError::Missing(g));
        }
    }
    Ok(sig)
}

pub fn default_stdlib() -> Signature {
    load_stdlib(STDLIB_SOURCE).expect("bundled signature is valid")
}
