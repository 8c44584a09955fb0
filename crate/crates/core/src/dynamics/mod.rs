//! Normal-form classification, canonical elimination, single-step reduction
//! and fuel-bounded normalization.
//!
//! Reduction is call-by-value on functional terms and reduces under circuit
//! binders. Programs must be functionally closed; their free circuit
//! variables are tracked in a [`NeutralContext`].

mod audit;
mod step;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{subst_many, Color, Name, Pattern, Program, SimpleType, Type};

pub use audit::{applicable_rules, audit_step, AuditViolation};
pub use step::{step, StepOutcome};

/// In-scope free circuit variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NeutralContext {
    names: Vec<Name>,
}

impl NeutralContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I: IntoIterator<Item = Name>>(names: I) -> Self {
        let mut pi = NeutralContext::new();
        for n in names {
            pi.insert(n);
        }
        pi
    }

    pub fn of(names: &[&str]) -> Self {
        Self::from_names(names.iter().map(|s| Name::new(s)))
    }

    pub fn insert(&mut self, x: Name) {
        if !self.names.contains(&x) {
            self.names.push(x);
        }
    }

    pub fn contains(&self, x: &Name) -> bool {
        self.names.contains(x)
    }

    pub fn names(&self) -> &[Name] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Neutral context whose variables carry simple types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypedNeutralContext {
    entries: Vec<(Name, SimpleType)>,
}

impl TypedNeutralContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, x: &str, s: SimpleType) -> Self {
        self.push(Name::new(x), s);
        self
    }

    pub fn push(&mut self, x: Name, s: SimpleType) {
        assert!(self.entries.iter().all(|(y, _)| *y != x), "duplicate neutral variable `{x}`");
        self.entries.push((x, s));
    }

    pub fn entries(&self) -> &[(Name, SimpleType)] {
        &self.entries
    }

    /// Erasure to the untyped neutral context.
    pub fn cneu(&self) -> NeutralContext {
        NeutralContext::from_names(self.entries.iter().map(|(x, _)| x.clone()))
    }

    /// Erasure to a typing context of circuit variables.
    pub fn ctp(&self) -> crate::statics::TypingContext {
        let mut ctx = crate::statics::TypingContext::new();
        for (x, s) in &self.entries {
            ctx.push(x.clone(), s.as_type().clone()).expect("distinct names");
        }
        ctx
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormClass {
    Canonical,
    Neutral,
    NormalMatch,
    Reducible,
}

impl FormClass {
    pub fn is_normal(self) -> bool {
        self != FormClass::Reducible
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynError {
    #[error("free functional variable `{0}`: programs must be functionally closed")]
    FreeFunctionalVar(Name),
    #[error("circuit variable `{0}` is not in the neutral context")]
    UnboundCircuitVar(Name),
    #[error("cannot eliminate `{value}` with a {pattern} pattern")]
    ShapeMismatch { value: String, pattern: &'static str },
    #[error("substitution image `{0}` is not neutral")]
    NonNeutralImage(String),
}

/// Reduction rules. Congruence rules name the position that steps; the rest
/// contract a redex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    FAppFun,
    FAppArg,
    FAppBeta,
    FAppCc,
    FForce,
    FForceInner,
    FForceCc,
    FPairLeft,
    FPairRight,
    FDown,
    FMatchScrut,
    FMatchCanonical,
    FMatchCircScrut,
    FMatchCircBody,
    FMatchCc,
    FMatchCircCc,
    CAppFun,
    CAppArg,
    CAppBeta,
    CAppCcFun,
    CAppCcArg,
    CLam,
    CForce,
    CForceInner,
    CForceCc,
    CPairLeft,
    CPairRight,
    CMatchScrut,
    CMatchCanonical,
    CMatchBody,
    CMatchCc,
}

impl Rule {
    pub const ALL: [Rule; 31] = [
        Rule::FAppFun,
        Rule::FAppArg,
        Rule::FAppBeta,
        Rule::FAppCc,
        Rule::FForce,
        Rule::FForceInner,
        Rule::FForceCc,
        Rule::FPairLeft,
        Rule::FPairRight,
        Rule::FDown,
        Rule::FMatchScrut,
        Rule::FMatchCanonical,
        Rule::FMatchCircScrut,
        Rule::FMatchCircBody,
        Rule::FMatchCc,
        Rule::FMatchCircCc,
        Rule::CAppFun,
        Rule::CAppArg,
        Rule::CAppBeta,
        Rule::CAppCcFun,
        Rule::CAppCcArg,
        Rule::CLam,
        Rule::CForce,
        Rule::CForceInner,
        Rule::CForceCc,
        Rule::CPairLeft,
        Rule::CPairRight,
        Rule::CMatchScrut,
        Rule::CMatchCanonical,
        Rule::CMatchBody,
        Rule::CMatchCc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::FAppFun => "fstep/app/1",
            Rule::FAppArg => "fstep/app/2",
            Rule::FAppBeta => "fstep/app/beta",
            Rule::FAppCc => "fstep/app/cc",
            Rule::FForce => "fstep/force",
            Rule::FForceInner => "fstep/force/1",
            Rule::FForceCc => "fstep/force/cc",
            Rule::FPairLeft => "fstep/pair/1",
            Rule::FPairRight => "fstep/pair/2",
            Rule::FDown => "fstep/down",
            Rule::FMatchScrut => "fstep/m/f",
            Rule::FMatchCanonical => "fstep/m/k",
            Rule::FMatchCircScrut => "fstep/m/q",
            Rule::FMatchCircBody => "fstep/m/q/r",
            Rule::FMatchCc => "fstep/m/f/cc",
            Rule::FMatchCircCc => "fstep/m/q/cc",
            Rule::CAppFun => "cstep/app/1",
            Rule::CAppArg => "cstep/app/2",
            Rule::CAppBeta => "cstep/app/beta",
            Rule::CAppCcFun => "cstep/app/cc/1",
            Rule::CAppCcArg => "cstep/app/cc/2",
            Rule::CLam => "cstep/lam",
            Rule::CForce => "cstep/force",
            Rule::CForceInner => "cstep/force/1",
            Rule::CForceCc => "cstep/force/cc",
            Rule::CPairLeft => "cstep/pair/1",
            Rule::CPairRight => "cstep/pair/2",
            Rule::CMatchScrut => "cstep/m",
            Rule::CMatchCanonical => "cstep/m/k",
            Rule::CMatchBody => "cstep/m/r",
            Rule::CMatchCc => "cstep/m/cc",
        }
    }

    /// Rules whose premise is a step of a subterm.
    pub fn is_congruence(self) -> bool {
        matches!(
            self,
            Rule::FAppFun
                | Rule::FAppArg
                | Rule::FForceInner
                | Rule::FPairLeft
                | Rule::FPairRight
                | Rule::FDown
                | Rule::FMatchScrut
                | Rule::FMatchCircScrut
                | Rule::FMatchCircBody
                | Rule::CAppFun
                | Rule::CAppArg
                | Rule::CLam
                | Rule::CForceInner
                | Rule::CPairLeft
                | Rule::CPairRight
                | Rule::CMatchScrut
                | Rule::CMatchBody
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fails on free functional variables and circuit variables outside `pi`.
pub fn check_scope(pi: &NeutralContext, p: &Program) -> Result<(), DynError> {
    fn go(pi: &NeutralContext, bound: &mut Vec<Name>, p: &Program) -> Result<(), DynError> {
        match p {
            Program::Var(x, c) => {
                if bound.contains(x) {
                    return Ok(());
                }
                match c {
                    Color::Functional => Err(DynError::FreeFunctionalVar(x.clone())),
                    Color::Circuit if pi.contains(x) => Ok(()),
                    Color::Circuit => Err(DynError::UnboundCircuitVar(x.clone())),
                }
            }
            Program::Unit(_) | Program::Gate(_) => Ok(()),
            Program::Lam { binder, body, .. } => {
                bound.push(binder.clone());
                let r = go(pi, bound, body);
                bound.pop();
                r
            }
            Program::Pair(a, b, _) | Program::App(a, b, _) => {
                go(pi, bound, a)?;
                go(pi, bound, b)
            }
            Program::SuspTerm(m) | Program::SuspCirc(m) | Program::DownIntro(m) | Program::Force(m, _) => {
                go(pi, bound, m)
            }
            Program::Match { scrutinee, pattern, .. } => {
                go(pi, bound, scrutinee)?;
                let names = pattern.binders();
                let k = names.len();
                bound.extend(names.into_iter().cloned());
                let r = go(pi, bound, pattern.body());
                bound.truncate(bound.len() - k);
                r
            }
        }
    }
    go(pi, &mut Vec::new(), p)
}

/// Judgments over a growing list of in-scope circuit variables.
struct Judge {
    pi: Vec<Name>,
}

impl Judge {
    fn under<T>(&mut self, names: &[&Name], f: impl FnOnce(&mut Self) -> T) -> T {
        let k = names.len();
        self.pi.extend(names.iter().map(|n| (*n).clone()));
        let r = f(self);
        self.pi.truncate(self.pi.len() - k);
        r
    }

    fn normal(&mut self, p: &Program) -> bool {
        self.canonical(p) || self.neutral(p) || self.normal_match(p)
    }

    fn canonical(&mut self, p: &Program) -> bool {
        match p {
            Program::Unit(_) => true,
            Program::Pair(a, b, _) => self.normal(a) && self.normal(b),
            Program::Lam { color: Color::Functional, .. } => true,
            Program::Lam { binder, body, color: Color::Circuit, .. } => self.under(&[binder], |j| j.normal(body)),
            Program::SuspTerm(_) | Program::SuspCirc(_) => true,
            Program::DownIntro(v) => self.normal(v),
            _ => false,
        }
    }

    fn neutral(&mut self, p: &Program) -> bool {
        match p {
            Program::Var(x, Color::Circuit) => self.pi.contains(x),
            Program::Gate(_) => true,
            Program::App(f, k, Color::Circuit) => {
                matches!(**f, Program::Gate(_)) && (self.canonical(k) || self.neutral(k))
            }
            _ => false,
        }
    }

    fn normal_match(&mut self, p: &Program) -> bool {
        match p {
            Program::Match { scrutinee, pattern, scrutinee_color: Color::Circuit, .. } => {
                if matches!(pattern, Pattern::Down(..)) || !self.neutral(scrutinee) {
                    return false;
                }
                let names = pattern.binders();
                self.under(&names, |j| j.normal(pattern.body()))
            }
            _ => false,
        }
    }

    fn classify(&mut self, p: &Program) -> FormClass {
        if self.canonical(p) {
            FormClass::Canonical
        } else if self.neutral(p) {
            FormClass::Neutral
        } else if self.normal_match(p) {
            FormClass::NormalMatch
        } else {
            FormClass::Reducible
        }
    }
}

/// Classifies `p` by the canonical, neutral and normal-match judgments.
pub fn classify(pi: &NeutralContext, p: &Program) -> Result<FormClass, DynError> {
    check_scope(pi, p)?;
    Ok(Judge { pi: pi.names().to_vec() }.classify(p))
}

pub(crate) fn classify_unchecked(pi: &[Name], p: &Program) -> FormClass {
    Judge { pi: pi.to_vec() }.classify(p)
}

fn pattern_kind(pat: &Pattern) -> &'static str {
    match pat {
        Pattern::Unit(_) => "unit",
        Pattern::Pair(..) => "pair",
        Pattern::Down(..) => "down",
    }
}

/// Eliminates a canonical form with a pattern of the matching shape.
pub fn eliminate_canonical(k: &Program, pat: &Pattern) -> Result<Program, DynError> {
    match (k, pat) {
        (Program::Unit(_), Pattern::Unit(body)) => Ok((**body).clone()),
        (Program::Pair(v1, v2, _), Pattern::Pair(x, y, body)) => {
            Ok(subst_many(body, &[(x.clone(), (**v1).clone()), (y.clone(), (**v2).clone())]))
        }
        (Program::DownIntro(v), Pattern::Down(x, body)) => Ok(subst_many(body, &[(x.clone(), (**v).clone())])),
        _ => Err(DynError::ShapeMismatch { value: k.to_string(), pattern: pattern_kind(pat) }),
    }
}

/// One entry of a reduction trace: the program after the step, the rule that
/// contracted a redex, and the outermost rule of the derivation.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub program: Program,
    pub rule: Rule,
    pub root: Rule,
}

#[derive(Clone, Debug)]
pub enum Terminal {
    Normal(Program),
    FuelExhausted(Program),
    Stuck { program: Program, reason: String },
}

impl Terminal {
    pub fn program(&self) -> &Program {
        match self {
            Terminal::Normal(p) | Terminal::FuelExhausted(p) | Terminal::Stuck { program: p, .. } => p,
        }
    }

    pub fn is_normal(&self) -> bool {
        matches!(self, Terminal::Normal(_))
    }
}

#[derive(Clone, Debug)]
pub struct StepTrace {
    pub steps: Vec<TraceStep>,
    pub terminal: Terminal,
}

pub const DEFAULT_FUEL: u64 = 100_000;

/// Programs larger than this are treated as having run out of fuel, so
/// ill-typed inputs that grow without bound cannot exhaust memory.
pub const MAX_PROGRAM_SIZE: usize = 2_000_000;

/// Runs at most `fuel` steps, reporting each one to `on_step`.
pub fn normalize_with(
    pi: &NeutralContext,
    p: &Program,
    fuel: u64,
    mut on_step: impl FnMut(&Program, &TraceStep),
) -> (u64, Terminal) {
    let mut current = p.clone();
    let mut used = 0;
    loop {
        match step(pi, &current) {
            StepOutcome::Normal => return (used, Terminal::Normal(current)),
            StepOutcome::Stuck(reason) => return (used, Terminal::Stuck { program: current, reason }),
            StepOutcome::Step { program, rule, root } => {
                if used == fuel || program.size() > MAX_PROGRAM_SIZE {
                    return (used, Terminal::FuelExhausted(current));
                }
                used += 1;
                let entry = TraceStep { program, rule, root };
                on_step(&current, &entry);
                current = entry.program;
            }
        }
    }
}

pub fn normalize(pi: &NeutralContext, p: &Program, fuel: u64) -> StepTrace {
    let mut steps = Vec::new();
    let (_, terminal) = normalize_with(pi, p, fuel, |_, s| steps.push(s.clone()));
    StepTrace { steps, terminal }
}

/// Substitutes neutral terms for circuit variables. Images must be neutral
/// under `target`.
pub fn apply_neutral_subst(
    target: &NeutralContext,
    sigma: &[(Name, Program)],
    p: &Program,
) -> Result<Program, DynError> {
    for (_, image) in sigma {
        check_scope(target, image)?;
        if classify_unchecked(target.names(), image) != FormClass::Neutral {
            return Err(DynError::NonNeutralImage(image.to_string()));
        }
    }
    Ok(subst_many(p, sigma))
}

/// Every name bound by a pattern or lambda, anywhere in `p`.
pub fn bound_names(p: &Program) -> BTreeSet<Name> {
    fn go(p: &Program, out: &mut BTreeSet<Name>) {
        match p {
            Program::Var(..) | Program::Unit(_) | Program::Gate(_) => {}
            Program::Lam { binder, body, .. } => {
                out.insert(binder.clone());
                go(body, out);
            }
            Program::Pair(a, b, _) | Program::App(a, b, _) => {
                go(a, out);
                go(b, out);
            }
            Program::SuspTerm(m) | Program::SuspCirc(m) | Program::DownIntro(m) | Program::Force(m, _) => go(m, out),
            Program::Match { scrutinee, pattern, .. } => {
                go(scrutinee, out);
                out.extend(pattern.binders().into_iter().cloned());
                go(pattern.body(), out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(p, &mut out);
    out
}

/// The type a circuit program inhabits when it is a wire bundle.
pub fn is_circuit_type(t: &Type) -> bool {
    t.is_simple() || matches!(t, Type::Arrow(_, _, crate::syntax::Mode::Q))
}

#[cfg(test)]
mod tests;
