//! Abstract syntax for types, functional terms, circuits and patterns, plus the
//! surface parser and printer.

mod lexer;
mod parser;
mod printer;
mod subst;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use lexer::Span;
pub use parser::{parse_program, parse_signature, parse_type, ParseError, SpanTree};
pub use printer::{print_program, print_type};
pub use subst::{alpha_eq, free_vars, fresh_name, max_fresh_index, rename_free, subst, subst_many};

/// Variable or gate name. Cheap to clone and shareable across threads.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Index of a machine-generated `%k` name.
    pub fn fresh_index(&self) -> Option<u64> {
        self.0.strip_prefix('%').and_then(|d| d.parse().ok())
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Structural mode of a type or binding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    U,
    L,
    Q,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::U, Mode::L, Mode::Q];

    /// The preorder generated by U > L, L > Q and Q > L.
    pub fn geq(self, k: Mode) -> bool {
        self == Mode::U || k != Mode::U
    }

    pub fn is_linear(self) -> bool {
        self != Mode::U
    }

    /// Modes whose terms live in the functional layer.
    pub fn is_functional(self) -> bool {
        self != Mode::Q
    }

    pub fn letter(self) -> char {
        match self {
            Mode::U => 'u',
            Mode::L => 'l',
            Mode::Q => 'q',
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

pub fn mode_geq(m: Mode, k: Mode) -> bool {
    m.geq(k)
}

/// Mode-annotated types. Shift modes are implied by the operand: `Up` goes
/// Q to L or L to U, `Down` goes U to L.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Unit(Mode),
    Qubit,
    Tensor(Arc<Type>, Arc<Type>, Mode),
    Arrow(Arc<Type>, Arc<Type>, Mode),
    Up(Arc<Type>),
    Down(Arc<Type>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeFormError {
    #[error("components of `{ty}` must be at mode {mode}")]
    ComponentMode { ty: String, mode: Mode },
    #[error("circuit-mode type `{0}` must be between simple types")]
    NotSimple(String),
    #[error("cannot shift `{0}` up: operand must be at mode l or q")]
    BadUp(String),
    #[error("cannot shift `{0}` down: operand must be at mode u")]
    BadDown(String),
}

impl Type {
    pub fn unit(m: Mode) -> Type {
        Type::Unit(m)
    }

    pub fn tensor(a: Type, b: Type, m: Mode) -> Type {
        Type::Tensor(Arc::new(a), Arc::new(b), m)
    }

    pub fn arrow(a: Type, b: Type, m: Mode) -> Type {
        Type::Arrow(Arc::new(a), Arc::new(b), m)
    }

    pub fn up(a: Type) -> Type {
        Type::Up(Arc::new(a))
    }

    pub fn down(a: Type) -> Type {
        Type::Down(Arc::new(a))
    }

    pub fn mode(&self) -> Mode {
        match self {
            Type::Unit(m) | Type::Tensor(_, _, m) | Type::Arrow(_, _, m) => *m,
            Type::Qubit => Mode::Q,
            Type::Up(a) => {
                if a.mode() == Mode::Q {
                    Mode::L
                } else {
                    Mode::U
                }
            }
            Type::Down(_) => Mode::L,
        }
    }

    /// Source and target modes of a shift.
    pub fn shift_modes(&self) -> Option<(Mode, Mode)> {
        match self {
            Type::Up(a) => Some((a.mode(), self.mode())),
            Type::Down(_) => Some((Mode::U, Mode::L)),
            _ => None,
        }
    }

    /// Wire-bundle types: `unit@q`, `qubit`, and tensors of those at q.
    pub fn is_simple(&self) -> bool {
        match self {
            Type::Unit(Mode::Q) | Type::Qubit => true,
            Type::Tensor(a, b, Mode::Q) => a.is_simple() && b.is_simple(),
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<(), TypeFormError> {
        match self {
            Type::Unit(_) | Type::Qubit => {}
            Type::Tensor(a, b, _) | Type::Arrow(a, b, _) => {
                a.validate()?;
                b.validate()?;
            }
            Type::Up(a) | Type::Down(a) => a.validate()?,
        }
        self.validate_node()
    }

    /// Checks only the outermost constructor, assuming its operands are valid.
    pub fn validate_node(&self) -> Result<(), TypeFormError> {
        match self {
            Type::Unit(_) | Type::Qubit => Ok(()),
            Type::Tensor(a, b, m) | Type::Arrow(a, b, m) => {
                if a.mode() != *m || b.mode() != *m {
                    return Err(TypeFormError::ComponentMode { ty: print_type(self), mode: *m });
                }
                if *m == Mode::Q && !(a.is_simple() && b.is_simple()) {
                    return Err(TypeFormError::NotSimple(print_type(self)));
                }
                Ok(())
            }
            Type::Up(a) if a.mode() == Mode::U => Err(TypeFormError::BadUp(print_type(a))),
            Type::Down(a) if a.mode() != Mode::U => Err(TypeFormError::BadDown(print_type(a))),
            Type::Up(_) | Type::Down(_) => Ok(()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Type::Unit(_) | Type::Qubit => 1,
            Type::Tensor(a, b, _) | Type::Arrow(a, b, _) => 1 + a.size() + b.size(),
            Type::Up(a) | Type::Down(a) => 1 + a.size(),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self))
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self))
    }
}

/// A type known to be simple.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleType(Type);

impl SimpleType {
    pub fn new(t: Type) -> Option<Self> {
        t.is_simple().then_some(SimpleType(t))
    }

    pub fn unit() -> Self {
        SimpleType(Type::Unit(Mode::Q))
    }

    pub fn qubit() -> Self {
        SimpleType(Type::Qubit)
    }

    pub fn tensor(a: SimpleType, b: SimpleType) -> Self {
        SimpleType(Type::tensor(a.0, b.0, Mode::Q))
    }

    pub fn as_type(&self) -> &Type {
        &self.0
    }

    pub fn into_type(self) -> Type {
        self.0
    }
}

/// Layer a term belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Functional,
    Circuit,
}

/// Which eliminator family a pattern belongs to: scrutinee layer then body layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternFamily {
    FF,
    QF,
    QQ,
}

impl PatternFamily {
    pub fn from_colors(scrutinee: Color, body: Color) -> Option<Self> {
        match (scrutinee, body) {
            (Color::Functional, Color::Functional) => Some(PatternFamily::FF),
            (Color::Circuit, Color::Functional) => Some(PatternFamily::QF),
            (Color::Circuit, Color::Circuit) => Some(PatternFamily::QQ),
            (Color::Functional, Color::Circuit) => None,
        }
    }

    pub fn scrutinee_color(self) -> Color {
        match self {
            PatternFamily::FF => Color::Functional,
            _ => Color::Circuit,
        }
    }

    pub fn body_color(self) -> Color {
        match self {
            PatternFamily::QQ => Color::Circuit,
            _ => Color::Functional,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Unit(Box<Program>),
    Pair(Name, Name, Box<Program>),
    Down(Name, Box<Program>),
}

impl Pattern {
    pub fn body(&self) -> &Program {
        match self {
            Pattern::Unit(b) | Pattern::Pair(_, _, b) | Pattern::Down(_, b) => b,
        }
    }

    pub fn binders(&self) -> Vec<&Name> {
        match self {
            Pattern::Unit(_) => vec![],
            Pattern::Pair(x, y, _) => vec![x, y],
            Pattern::Down(x, _) => vec![x],
        }
    }

    pub fn with_body(&self, body: Program) -> Pattern {
        match self {
            Pattern::Unit(_) => Pattern::Unit(Box::new(body)),
            Pattern::Pair(x, y, _) => Pattern::Pair(x.clone(), y.clone(), Box::new(body)),
            Pattern::Down(x, _) => Pattern::Down(x.clone(), Box::new(body)),
        }
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Unit(b) => write!(f, "() => {:?}", b),
            Pattern::Pair(x, y, b) => write!(f, "({}, {}) => {:?}", x, y, b),
            Pattern::Down(x, b) => write!(f, "down {} => {:?}", x, b),
        }
    }
}

/// Functional terms and circuits in one tree, tagged by color where the
/// constructor exists in both layers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Program {
    Var(Name, Color),
    Lam { binder: Name, annot: Option<Type>, body: Box<Program>, color: Color },
    Unit(Color),
    Pair(Box<Program>, Box<Program>, Color),
    SuspTerm(Box<Program>),
    SuspCirc(Box<Program>),
    DownIntro(Box<Program>),
    App(Box<Program>, Box<Program>, Color),
    Force(Box<Program>, Color),
    Match { scrutinee: Box<Program>, pattern: Pattern, scrutinee_color: Color, body_color: Color },
    Gate(Name),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("color discipline violated: {0}")]
pub struct ColorError(pub String);

impl Program {
    pub fn fvar(x: &str) -> Program {
        Program::Var(Name::new(x), Color::Functional)
    }

    pub fn cvar(x: &str) -> Program {
        Program::Var(Name::new(x), Color::Circuit)
    }

    pub fn gate(g: &str) -> Program {
        Program::Gate(Name::new(g))
    }

    pub fn lam(x: &str, annot: Option<Type>, body: Program, color: Color) -> Program {
        Program::Lam { binder: Name::new(x), annot, body: Box::new(body), color }
    }

    pub fn pair(a: Program, b: Program, color: Color) -> Program {
        Program::Pair(Box::new(a), Box::new(b), color)
    }

    pub fn app(f: Program, a: Program, color: Color) -> Program {
        Program::App(Box::new(f), Box::new(a), color)
    }

    pub fn force(m: Program, color: Color) -> Program {
        Program::Force(Box::new(m), color)
    }

    pub fn susp(m: Program) -> Program {
        Program::SuspTerm(Box::new(m))
    }

    pub fn circ(c: Program) -> Program {
        Program::SuspCirc(Box::new(c))
    }

    pub fn down(m: Program) -> Program {
        Program::DownIntro(Box::new(m))
    }

    pub fn matching(scrutinee: Program, pattern: Pattern, family: PatternFamily) -> Program {
        Program::Match {
            scrutinee: Box::new(scrutinee),
            pattern,
            scrutinee_color: family.scrutinee_color(),
            body_color: family.body_color(),
        }
    }

    pub fn color(&self) -> Color {
        match self {
            Program::Var(_, c)
            | Program::Lam { color: c, .. }
            | Program::Unit(c)
            | Program::Pair(_, _, c)
            | Program::App(_, _, c)
            | Program::Force(_, c) => *c,
            Program::SuspTerm(_) | Program::SuspCirc(_) | Program::DownIntro(_) => Color::Functional,
            Program::Match { body_color, .. } => *body_color,
            Program::Gate(_) => Color::Circuit,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Program::Var(..) | Program::Unit(_) | Program::Gate(_) => 1,
            Program::Lam { body, .. } => 1 + body.size(),
            Program::Pair(a, b, _) | Program::App(a, b, _) => 1 + a.size() + b.size(),
            Program::SuspTerm(m) | Program::SuspCirc(m) | Program::DownIntro(m) | Program::Force(m, _) => 1 + m.size(),
            Program::Match { scrutinee, pattern, .. } => 1 + scrutinee.size() + pattern.body().size(),
        }
    }

    /// Checks the layering rules: gates only in circuits, suspensions wrap the
    /// right layer, match colors form a legal family, and so on.
    pub fn validate_colors(&self) -> Result<(), ColorError> {
        let expect = |p: &Program, c: Color, what: &str| -> Result<(), ColorError> {
            if p.color() != c {
                return Err(ColorError(format!("{what} must be {c:?}, found {:?}", p.color())));
            }
            p.validate_colors()
        };
        match self {
            Program::Var(..) | Program::Unit(_) | Program::Gate(_) => Ok(()),
            Program::Lam { body, color, .. } => expect(body, *color, "lambda body"),
            Program::Pair(a, b, c) => {
                expect(a, *c, "pair component")?;
                expect(b, *c, "pair component")
            }
            Program::SuspTerm(m) => expect(m, Color::Functional, "susp operand"),
            Program::SuspCirc(c) => expect(c, Color::Circuit, "circ operand"),
            Program::DownIntro(m) => expect(m, Color::Functional, "down operand"),
            Program::App(f, a, c) => {
                expect(f, *c, "applied function")?;
                expect(a, *c, "argument")
            }
            Program::Force(m, _) => expect(m, Color::Functional, "force operand"),
            Program::Match { scrutinee, pattern, scrutinee_color, body_color } => {
                if PatternFamily::from_colors(*scrutinee_color, *body_color).is_none() {
                    return Err(ColorError("a functional scrutinee cannot have a circuit body".into()));
                }
                if matches!(pattern, Pattern::Down(..)) && *scrutinee_color == Color::Circuit {
                    return Err(ColorError("down patterns only match functional terms".into()));
                }
                if let Pattern::Pair(x, y, _) = pattern {
                    if x == y {
                        return Err(ColorError(format!("pattern binds `{x}` twice")));
                    }
                }
                expect(scrutinee, *scrutinee_color, "scrutinee")?;
                expect(pattern.body(), *body_color, "match body")
            }
        }
    }

    pub fn family(&self) -> Option<PatternFamily> {
        match self {
            Program::Match { scrutinee_color, body_color, .. } => {
                PatternFamily::from_colors(*scrutinee_color, *body_color)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GateType {
    pub input: SimpleType,
    pub output: SimpleType,
}

impl GateType {
    pub fn arrow(&self) -> Type {
        Type::arrow(self.input.as_type().clone(), self.output.as_type().clone(), Mode::Q)
    }
}

/// Gate constants available to circuits.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    gates: BTreeMap<Name, GateType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("gate `{0}` declared twice")]
    Duplicate(Name),
    #[error("gate `{name}` must map a simple type to a simple type, found `{ty}`")]
    NotSimple { name: Name, ty: String },
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: Name, ty: &Type) -> Result<(), SignatureError> {
        let gate = match ty {
            Type::Arrow(a, b, Mode::Q) => SimpleType::new((**a).clone())
                .zip(SimpleType::new((**b).clone()))
                .map(|(input, output)| GateType { input, output }),
            _ => None,
        };
        let gate = gate.ok_or_else(|| SignatureError::NotSimple { name: name.clone(), ty: print_type(ty) })?;
        if self.gates.contains_key(&name) {
            return Err(SignatureError::Duplicate(name));
        }
        self.gates.insert(name, gate);
        Ok(())
    }

    pub fn get(&self, name: &Name) -> Option<&GateType> {
        self.gates.get(name)
    }

    pub fn lookup(&self, name: &str) -> Option<&GateType> {
        self.gates.get(&Name::new(name))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &GateType)> {
        self.gates.iter()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preorder_generators() {
        assert!(mode_geq(Mode::U, Mode::Q));
        assert!(!mode_geq(Mode::L, Mode::U));
        assert!(mode_geq(Mode::Q, Mode::L));
        assert!(mode_geq(Mode::L, Mode::Q));
        assert!(!mode_geq(Mode::Q, Mode::U));
        for m in Mode::ALL {
            assert!(mode_geq(m, m));
        }
    }

    #[test]
    fn preorder_is_transitive() {
        for a in Mode::ALL {
            for b in Mode::ALL {
                for c in Mode::ALL {
                    if mode_geq(a, b) && mode_geq(b, c) {
                        assert!(mode_geq(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn shift_modes_follow_operand() {
        let up_q = Type::up(Type::Qubit);
        assert_eq!(up_q.shift_modes(), Some((Mode::Q, Mode::L)));
        let up_l = Type::up(up_q.clone());
        assert_eq!(up_l.shift_modes(), Some((Mode::L, Mode::U)));
        assert_eq!(Type::down(up_l).mode(), Mode::L);
        assert!(Type::up(Type::Unit(Mode::U)).validate().is_err());
        assert!(Type::down(up_q).validate().is_err());
    }

    #[test]
    fn circuit_arrows_need_simple_types() {
        let bad = Type::arrow(Type::arrow(Type::Qubit, Type::Qubit, Mode::Q), Type::Qubit, Mode::Q);
        assert!(matches!(bad.validate(), Err(TypeFormError::NotSimple(_))));
        let mixed = Type::tensor(Type::Qubit, Type::Unit(Mode::L), Mode::Q);
        assert!(mixed.validate().is_err());
    }

    #[test]
    fn colors_reject_gate_in_susp() {
        let p = Program::susp(Program::gate("H"));
        assert!(p.validate_colors().is_err());
        let ok = Program::circ(Program::gate("H"));
        assert!(ok.validate_colors().is_ok());
    }
}
