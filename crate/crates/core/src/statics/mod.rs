//! Type checking for the linear system and its structural approximation.
//!
//! Both systems share one bidirectional checker. Linear splitting is done by
//! consumption threading: every subterm sees the whole context and marks the
//! bindings it uses. The linear system additionally rejects reuse and
//! non-use of linear bindings, checks that terms at mode u consume no linear
//! binding from outside, and requires pattern scrutinees to dominate the
//! mode of the match result.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Color, Mode, Name, Pattern, PatternFamily, Program, Signature, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    /// Mode-checked linear system.
    Pqa,
    /// Structural approximation: no splitting, no mode side conditions.
    Pqx,
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::Pqa => "pqa",
            System::Pqx => "pqx",
        })
    }
}

/// Ordered typing assumptions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingContext {
    entries: Vec<(Name, Type)>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<(Name, Type)>) -> Result<Self, TypeError> {
        let mut ctx = TypingContext::new();
        for (x, t) in entries {
            ctx.push(x, t)?;
        }
        Ok(ctx)
    }

    pub fn push(&mut self, x: Name, t: Type) -> Result<(), TypeError> {
        if self.entries.iter().any(|(y, _)| *y == x) {
            return Err(TypeError::at_root(TypeErrorKind::DuplicateBinding(x)));
        }
        self.entries.push((x, t));
        Ok(())
    }

    pub fn with(mut self, x: &str, t: Type) -> Self {
        self.push(Name::new(x), t).expect("distinct names");
        self
    }

    pub fn entries(&self) -> &[(Name, Type)] {
        &self.entries
    }

    pub fn get(&self, x: &Name) -> Option<&Type> {
        self.entries.iter().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn unrestricted(&self) -> impl Iterator<Item = &(Name, Type)> {
        self.entries.iter().filter(|(_, t)| !t.mode().is_linear())
    }

    pub fn linear(&self) -> impl Iterator<Item = &(Name, Type)> {
        self.entries.iter().filter(|(_, t)| t.mode().is_linear())
    }

    /// Every binding's mode is at least `k`.
    pub fn geq_mode(&self, k: Mode) -> bool {
        self.entries.iter().all(|(_, t)| t.mode().geq(k))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("unbound variable `{0}`")]
    Unbound(Name),
    #[error("linear variable `{0}` is never used")]
    UnusedLinear(Name),
    #[error("linear variable `{0}` used twice")]
    UsedTwice(Name),
    #[error("term at mode u depends on linear variables {0}")]
    Independence(String),
    #[error("pattern on a mode-{scrutinee} value cannot produce a result at mode {result}")]
    PatternMode { scrutinee: Mode, result: Mode },
    #[error("unknown gate `{0}`")]
    UnknownGate(Name),
    #[error("circuit variable `{name}` must have a simple type, found `{ty}`")]
    NonSimpleCircuitVar { name: Name, ty: Type },
    #[error("type mismatch: expected {expected}, found {found}")]
    Mismatch { expected: String, found: String },
    #[error("{0}")]
    ColorMode(String),
    #[error("cannot infer the type of {0}; add a binder annotation")]
    CannotInfer(String),
    #[error("pattern does not fit its scrutinee: {0}")]
    PatternFamily(String),
    #[error("ill-formed type: {0}")]
    IllFormed(String),
    #[error("variable `{0}` bound twice in the context")]
    DuplicateBinding(Name),
}

impl TypeErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            TypeErrorKind::Unbound(_) => "E0101",
            TypeErrorKind::UnusedLinear(_) => "E0102",
            TypeErrorKind::UsedTwice(_) => "E0103",
            TypeErrorKind::Independence(_) => "E0104",
            TypeErrorKind::PatternMode { .. } => "E0105",
            TypeErrorKind::UnknownGate(_) => "E0106",
            TypeErrorKind::NonSimpleCircuitVar { .. } => "E0107",
            TypeErrorKind::Mismatch { .. } => "E0108",
            TypeErrorKind::ColorMode(_) => "E0109",
            TypeErrorKind::CannotInfer(_) => "E0110",
            TypeErrorKind::PatternFamily(_) => "E0111",
            TypeErrorKind::IllFormed(_) => "E0112",
            TypeErrorKind::DuplicateBinding(_) => "E0113",
        }
    }

    /// Errors that only the linear system raises.
    pub fn is_mode_error(&self) -> bool {
        matches!(
            self,
            TypeErrorKind::UnusedLinear(_)
                | TypeErrorKind::UsedTwice(_)
                | TypeErrorKind::Independence(_)
                | TypeErrorKind::PatternMode { .. }
        )
    }
}

/// A typing error and the child-index path to the offending subterm
/// (see [`crate::syntax::SpanTree`] for the numbering).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub path: Vec<u8>,
}

impl TypeError {
    pub fn at_root(kind: TypeErrorKind) -> Self {
        TypeError { kind, path: vec![] }
    }

    pub fn code(&self) -> &'static str {
        self.kind.code()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub verdict: Result<Type, TypeError>,
    /// Linear context names used by the program.
    pub consumed: BTreeSet<Name>,
}

impl CheckReport {
    pub fn ty(&self) -> Option<&Type> {
        self.verdict.as_ref().ok()
    }

    pub fn is_ok(&self) -> bool {
        self.verdict.is_ok()
    }
}

struct Entry {
    name: Name,
    ty: Type,
    used: u32,
}

#[derive(Clone, Copy)]
struct Snapshot {
    ctx: usize,
    log: usize,
}

struct Checker<'a> {
    sig: &'a Signature,
    sys: System,
    ctx: Vec<Entry>,
    /// Indices of linear entries in the order they were consumed.
    log: Vec<usize>,
    path: Vec<u8>,
}

type R<T> = Result<T, TypeError>;

fn color_admits(c: Color, m: Mode) -> bool {
    match c {
        Color::Functional => m != Mode::Q,
        Color::Circuit => m == Mode::Q,
    }
}

fn describe(p: &Program) -> &'static str {
    match p {
        Program::Var(..) => "a variable",
        Program::Lam { .. } => "a function",
        Program::Unit(_) => "a unit value",
        Program::Pair(..) => "a pair",
        Program::SuspTerm(_) => "a term suspension",
        Program::SuspCirc(_) => "a circuit suspension",
        Program::DownIntro(_) => "a down value",
        Program::App(..) => "an application",
        Program::Force(..) => "a force",
        Program::Match { .. } => "a match",
        Program::Gate(_) => "a gate",
    }
}

impl<'a> Checker<'a> {
    fn err<T>(&self, kind: TypeErrorKind) -> R<T> {
        Err(TypeError { kind, path: self.path.clone() })
    }

    fn mismatch<T>(&self, expected: impl fmt::Display, found: impl fmt::Display) -> R<T> {
        self.err(TypeErrorKind::Mismatch { expected: expected.to_string(), found: found.to_string() })
    }

    fn linear_checks(&self) -> bool {
        self.sys == System::Pqa
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot { ctx: self.ctx.len(), log: self.log.len() }
    }

    fn restore(&mut self, s: Snapshot) {
        // Undo linear uses; a failed attempt may also leave binders on the
        // stack. Log entries at or above the snapshot height name binders
        // that were since popped, and their slots may have been reused.
        self.ctx.truncate(s.ctx);
        for &i in &self.log[s.log..] {
            if i < s.ctx {
                self.ctx[i].used -= 1;
            }
        }
        self.log.truncate(s.log);
    }

    fn child<T>(&mut self, i: u8, f: impl FnOnce(&mut Self) -> R<T>) -> R<T> {
        self.path.push(i);
        let r = f(self);
        self.path.pop();
        r
    }

    fn bind(&mut self, x: &Name, ty: Type, color: Color) -> R<()> {
        if color == Color::Circuit && !ty.is_simple() {
            return self.err(TypeErrorKind::NonSimpleCircuitVar { name: x.clone(), ty });
        }
        if !color_admits(color, ty.mode()) {
            return self.err(TypeErrorKind::ColorMode(format!(
                "{} variable `{x}` cannot have type `{ty}`",
                if color == Color::Circuit { "circuit" } else { "functional" }
            )));
        }
        self.ctx.push(Entry { name: x.clone(), ty, used: 0 });
        Ok(())
    }

    fn unbind(&mut self) -> R<()> {
        let e = self.ctx.pop().expect("balanced binders");
        if self.linear_checks() && e.ty.mode().is_linear() && e.used == 0 {
            return self.err(TypeErrorKind::UnusedLinear(e.name));
        }
        Ok(())
    }

    /// Runs a node and enforces the mode/color agreement and, in the linear
    /// system, independence of mode-u results from outer linear bindings.
    fn node(&mut self, p: &Program, f: impl FnOnce(&mut Self) -> R<Type>) -> R<Type> {
        let ctx_len = self.ctx.len();
        let log_mark = self.log.len();
        let ty = f(self)?;
        if !color_admits(p.color(), ty.mode()) {
            return self.err(TypeErrorKind::ColorMode(format!(
                "{} cannot have type `{ty}`",
                if p.color() == Color::Circuit { "a circuit" } else { "a functional term" }
            )));
        }
        if self.linear_checks() && ty.mode() == Mode::U {
            let outer: BTreeSet<String> = self.log[log_mark..]
                .iter()
                .filter(|&&i| i < ctx_len)
                .map(|&i| format!("`{}`", self.ctx[i].name))
                .collect();
            if !outer.is_empty() {
                return self.err(TypeErrorKind::Independence(outer.into_iter().collect::<Vec<_>>().join(", ")));
            }
        }
        Ok(ty)
    }

    fn var(&mut self, x: &Name, color: Color) -> R<Type> {
        let Some(i) = self.ctx.iter().rposition(|e| e.name == *x) else {
            return self.err(TypeErrorKind::Unbound(x.clone()));
        };
        let ty = self.ctx[i].ty.clone();
        if color == Color::Circuit && !ty.is_simple() {
            return self.err(TypeErrorKind::NonSimpleCircuitVar { name: x.clone(), ty });
        }
        if ty.mode().is_linear() {
            if self.linear_checks() && self.ctx[i].used > 0 {
                return self.err(TypeErrorKind::UsedTwice(x.clone()));
            }
            self.log.push(i);
        }
        self.ctx[i].used += 1;
        Ok(ty)
    }

    fn check(&mut self, p: &Program, expected: &Type) -> R<()> {
        if !color_admits(p.color(), expected.mode()) {
            return self.err(TypeErrorKind::ColorMode(format!(
                "{} cannot have type `{expected}`",
                if p.color() == Color::Circuit { "a circuit" } else { "a functional term" }
            )));
        }
        self.node(p, |c| c.check_inner(p, expected).map(|_| expected.clone()))?;
        Ok(())
    }

    fn check_inner(&mut self, p: &Program, expected: &Type) -> R<()> {
        match (p, expected) {
            (Program::Lam { binder, annot, body, color }, Type::Arrow(a, b, _)) => {
                if let Some(t) = annot {
                    if t != &**a {
                        return self.mismatch(format!("binder of type `{a}`"), format!("`{t}`"));
                    }
                }
                self.bind(binder, (**a).clone(), *color)?;
                self.child(0, |c| c.check(body, b))?;
                self.unbind()
            }
            (Program::Unit(_), Type::Unit(_)) => Ok(()),
            (Program::Pair(l, r, _), Type::Tensor(a, b, _)) => {
                self.child(0, |c| c.check(l, a))?;
                self.child(1, |c| c.check(r, b))
            }
            (Program::SuspTerm(m), Type::Up(a)) if a.mode() == Mode::L => self.child(0, |c| c.check(m, a)),
            (Program::SuspCirc(m), Type::Up(a)) if a.mode() == Mode::Q => self.child(0, |c| c.check(m, a)),
            (Program::DownIntro(m), Type::Down(a)) => self.child(0, |c| c.check(m, a)),
            (Program::Match { scrutinee, pattern, scrutinee_color, body_color }, _) => {
                self.match_node(scrutinee, pattern, *scrutinee_color, *body_color, Some(expected), None)?;
                Ok(())
            }
            (
                Program::Lam { .. }
                | Program::Unit(_)
                | Program::Pair(..)
                | Program::SuspTerm(_)
                | Program::SuspCirc(_)
                | Program::DownIntro(_),
                _,
            ) => self.mismatch(format!("`{expected}`"), describe(p)),
            _ => {
                let found = self.synth_inner(p, Some(expected.mode()))?;
                if &found != expected {
                    return self.mismatch(format!("`{expected}`"), format!("`{found}`"));
                }
                Ok(())
            }
        }
    }

    fn synth(&mut self, p: &Program, hint: Option<Mode>) -> R<Type> {
        self.node(p, |c| c.synth_inner(p, hint))
    }

    fn synth_inner(&mut self, p: &Program, hint: Option<Mode>) -> R<Type> {
        match p {
            Program::Var(x, color) => self.var(x, *color),
            Program::Gate(g) => match self.sig.get(g) {
                Some(gt) => Ok(gt.arrow()),
                None => self.err(TypeErrorKind::UnknownGate(g.clone())),
            },
            Program::Lam { annot: None, .. } => self.err(TypeErrorKind::CannotInfer("an unannotated function".into())),
            Program::Lam { binder, annot: Some(a), body, color } => {
                if let Err(e) = a.validate() {
                    return self.err(TypeErrorKind::IllFormed(e.to_string()));
                }
                let m = a.mode();
                if !color_admits(*color, m) {
                    return self.err(TypeErrorKind::ColorMode(format!("binder `{binder}` cannot have type `{a}`")));
                }
                self.bind(binder, a.clone(), *color)?;
                let b = self.child(0, |c| c.synth(body, Some(m)))?;
                self.unbind()?;
                let t = Type::arrow(a.clone(), b, m);
                if let Err(e) = t.validate_node() {
                    return self.err(TypeErrorKind::IllFormed(e.to_string()));
                }
                Ok(t)
            }
            Program::Unit(Color::Circuit) => Ok(Type::Unit(Mode::Q)),
            Program::Unit(Color::Functional) => Ok(Type::Unit(hint.filter(|m| *m != Mode::Q).unwrap_or(Mode::L))),
            Program::Pair(l, r, Color::Circuit) => {
                let a = self.child(0, |c| c.synth(l, None))?;
                let b = self.child(1, |c| c.synth(r, None))?;
                let t = Type::tensor(a, b, Mode::Q);
                if let Err(e) = t.validate_node() {
                    return self.err(TypeErrorKind::IllFormed(e.to_string()));
                }
                Ok(t)
            }
            Program::Pair(l, r, Color::Functional) => self.synth_functional_pair(l, r, hint),
            Program::SuspTerm(m) => {
                let a = self.child(0, |c| c.synth(m, Some(Mode::L)))?;
                if a.mode() != Mode::L {
                    return self.err(TypeErrorKind::ColorMode(format!("`susp` needs a term at mode l, found `{a}`")));
                }
                Ok(Type::up(a))
            }
            Program::SuspCirc(m) => {
                let a = self.child(0, |c| c.synth(m, None))?;
                if a.mode() != Mode::Q {
                    return self.err(TypeErrorKind::ColorMode(format!("`circ` needs a circuit, found `{a}`")));
                }
                Ok(Type::up(a))
            }
            Program::DownIntro(m) => {
                let a = self.child(0, |c| c.synth(m, Some(Mode::U)))?;
                if a.mode() != Mode::U {
                    return self.err(TypeErrorKind::ColorMode(format!("`down` needs a term at mode u, found `{a}`")));
                }
                Ok(Type::down(a))
            }
            Program::App(f, a, color) => {
                let ft = self.child(0, |c| c.synth(f, None))?;
                match ft {
                    Type::Arrow(dom, cod, m) if color_admits(*color, m) => {
                        self.child(1, |c| c.check(a, &dom))?;
                        Ok((*cod).clone())
                    }
                    other => self.mismatch("a function", format!("`{other}`")),
                }
            }
            Program::Force(m, color) => {
                let t = self.child(0, |c| c.synth(m, None))?;
                let want = if *color == Color::Circuit { Mode::Q } else { Mode::L };
                match t {
                    Type::Up(a) if a.mode() == want => Ok((*a).clone()),
                    other => {
                        let shape = if want == Mode::Q { "Up of a circuit type" } else { "Up of a mode-l type" };
                        self.mismatch(shape, format!("`{other}`"))
                    }
                }
            }
            Program::Match { scrutinee, pattern, scrutinee_color, body_color } => {
                self.match_node(scrutinee, pattern, *scrutinee_color, *body_color, None, hint)
            }
        }
    }

    /// Functional pairs whose components are mode-flexible (units and
    /// pairs of units) take the mode of the other component.
    fn synth_functional_pair(&mut self, l: &Program, r: &Program, hint: Option<Mode>) -> R<Type> {
        let snap = self.snapshot();
        let first: R<(Type, Type)> = (|| {
            let a = self.child(0, |c| c.synth(l, hint))?;
            let b = self.child(1, |c| c.synth(r, Some(a.mode())))?;
            Ok((a, b))
        })();
        let first_err = match first {
            Ok((a, b)) if a.mode() == b.mode() => {
                let m = a.mode();
                return Ok(Type::tensor(a, b, m));
            }
            Ok((a, b)) => self
                .mismatch::<()>(format!("pair components at one mode ({})", a.mode()), format!("`{b}`"))
                .unwrap_err(),
            Err(e) => e,
        };
        self.restore(snap);
        let second: R<(Type, Type)> = (|| {
            let b = self.child(1, |c| c.synth(r, hint))?;
            let a = self.child(0, |c| c.synth(l, Some(b.mode())))?;
            Ok((a, b))
        })();
        match second {
            Ok((a, b)) if a.mode() == b.mode() => {
                let m = a.mode();
                Ok(Type::tensor(a, b, m))
            }
            _ => Err(first_err),
        }
    }

    fn match_node(
        &mut self,
        scrutinee: &Program,
        pattern: &Pattern,
        sc: Color,
        bc: Color,
        expected: Option<&Type>,
        hint: Option<Mode>,
    ) -> R<Type> {
        let Some(family) = PatternFamily::from_colors(sc, bc) else {
            return self.err(TypeErrorKind::PatternFamily("a functional scrutinee cannot have a circuit body".into()));
        };
        let fits = |r: &R<Type>| match (r, hint) {
            (Ok(t), Some(m)) => t.mode() == m,
            (r, _) => r.is_ok(),
        };
        let snap = self.snapshot();
        let t1 = self.child(0, |c| c.synth(scrutinee, None))?;
        let first = self.child(1, |c| c.pattern(pattern, family, &t1, expected, hint));
        if fits(&first) || sc == Color::Circuit {
            return first;
        }
        // A mode-flexible scrutinee may also be read at mode u, which can
        // rescue a failed match or one whose result misses the hint.
        self.restore(snap);
        if let Ok(t2) = self.child(0, |c| c.synth(scrutinee, Some(Mode::U))) {
            if t2 != t1 {
                let second = self.child(1, |c| c.pattern(pattern, family, &t2, expected, hint));
                if second.is_ok() && (first.is_err() || fits(&second)) {
                    return second;
                }
            }
        }
        self.restore(snap);
        first?;
        let t1 = self.child(0, |c| c.synth(scrutinee, None))?;
        self.child(1, |c| c.pattern(pattern, family, &t1, expected, hint))
    }

    fn pattern_body(&mut self, body: &Program, expected: Option<&Type>, hint: Option<Mode>) -> R<Type> {
        match expected {
            Some(e) => {
                self.check(body, e)?;
                Ok(e.clone())
            }
            None => self.synth(body, hint),
        }
    }

    fn pattern(
        &mut self,
        pat: &Pattern,
        family: PatternFamily,
        scrut: &Type,
        expected: Option<&Type>,
        hint: Option<Mode>,
    ) -> R<Type> {
        let scrut_mode = scrut.mode();
        let sc = family.scrutinee_color();
        if !color_admits(sc, scrut_mode) {
            return self
                .err(TypeErrorKind::PatternFamily(format!("scrutinee of type `{scrut}` in a {family:?} match")));
        }
        let (result, bound_mode) = match (pat, scrut) {
            (Pattern::Unit(body), Type::Unit(_)) => (self.pattern_body(body, expected, hint)?, scrut_mode),
            (Pattern::Pair(x, y, body), Type::Tensor(a, b, _)) => {
                self.bind(x, (**a).clone(), sc)?;
                self.bind(y, (**b).clone(), sc)?;
                let t = self.pattern_body(body, expected, hint)?;
                self.unbind()?;
                self.unbind()?;
                (t, scrut_mode)
            }
            (Pattern::Down(x, body), Type::Down(a)) => {
                if family != PatternFamily::FF {
                    return self.err(TypeErrorKind::PatternFamily("down patterns only match functional terms".into()));
                }
                self.bind(x, (**a).clone(), Color::Functional)?;
                let t = self.pattern_body(body, expected, hint)?;
                self.unbind()?;
                (t, Mode::L)
            }
            (Pattern::Unit(_), _) => return self.mismatch("a unit type", format!("`{scrut}`")),
            (Pattern::Pair(..), _) => return self.mismatch("a tensor type", format!("`{scrut}`")),
            (Pattern::Down(..), _) => return self.mismatch("a Down type", format!("`{scrut}`")),
        };
        if self.linear_checks() && !bound_mode.geq(result.mode()) {
            return self.err(TypeErrorKind::PatternMode { scrutinee: bound_mode, result: result.mode() });
        }
        Ok(result)
    }
}

fn run(system: System, sig: &Signature, ctx: &TypingContext, f: impl FnOnce(&mut Checker) -> R<Type>) -> CheckReport {
    let mut c = Checker { sig, sys: system, ctx: Vec::new(), log: Vec::new(), path: Vec::new() };
    let mut verdict = Ok(());
    for (x, t) in ctx.entries() {
        if let Err(e) = t.validate() {
            verdict = Err(TypeError::at_root(TypeErrorKind::IllFormed(e.to_string())));
            break;
        }
        if t.mode() == Mode::Q && !t.is_simple() {
            verdict = Err(TypeError::at_root(TypeErrorKind::NonSimpleCircuitVar { name: x.clone(), ty: t.clone() }));
            break;
        }
        c.ctx.push(Entry { name: x.clone(), ty: t.clone(), used: 0 });
    }
    let verdict = verdict.and_then(|_| f(&mut c)).and_then(|t| {
        if system == System::Pqa {
            if let Some(e) = c.ctx.iter().find(|e| e.ty.mode().is_linear() && e.used == 0) {
                return Err(TypeError::at_root(TypeErrorKind::UnusedLinear(e.name.clone())));
            }
        }
        Ok(t)
    });
    let consumed = c.ctx.iter().filter(|e| e.ty.mode().is_linear() && e.used > 0).map(|e| e.name.clone()).collect();
    CheckReport { verdict, consumed }
}

/// Checks `p` in `ctx`, against `expected` when given, otherwise synthesizing.
pub fn check(
    system: System,
    sig: &Signature,
    ctx: &TypingContext,
    p: &Program,
    expected: Option<&Type>,
) -> CheckReport {
    if let Some(t) = expected {
        if let Err(e) = t.validate() {
            return CheckReport {
                verdict: Err(TypeError::at_root(TypeErrorKind::IllFormed(e.to_string()))),
                consumed: BTreeSet::new(),
            };
        }
    }
    run(system, sig, ctx, |c| match expected {
        Some(t) => c.check(p, t).map(|_| t.clone()),
        None => c.synth(p, None),
    })
}

pub fn check_pqa(sig: &Signature, ctx: &TypingContext, p: &Program) -> CheckReport {
    check(System::Pqa, sig, ctx, p, None)
}

pub fn check_pqa_against(sig: &Signature, ctx: &TypingContext, p: &Program, ty: &Type) -> CheckReport {
    check(System::Pqa, sig, ctx, p, Some(ty))
}

pub fn check_pqx(sig: &Signature, ctx: &TypingContext, p: &Program) -> CheckReport {
    check(System::Pqx, sig, ctx, p, None)
}

pub fn check_pqx_against(sig: &Signature, ctx: &TypingContext, p: &Program, ty: &Type) -> CheckReport {
    check(System::Pqx, sig, ctx, p, Some(ty))
}

/// Types a pattern against a scrutinee of type `scrutinee`, returning the
/// type of the match result.
pub fn check_pattern(
    system: System,
    sig: &Signature,
    ctx: &TypingContext,
    pat: &Pattern,
    family: PatternFamily,
    scrutinee: &Type,
    expected: Option<&Type>,
) -> CheckReport {
    run(system, sig, ctx, |c| {
        let hint = expected.map(|t| t.mode());
        c.pattern(pat, family, scrutinee, expected, hint)
    })
}

pub fn check_pattern_pqa(
    sig: &Signature,
    ctx: &TypingContext,
    pat: &Pattern,
    family: PatternFamily,
    scrutinee: &Type,
) -> CheckReport {
    check_pattern(System::Pqa, sig, ctx, pat, family, scrutinee, None)
}

#[cfg(test)]
mod tests;
