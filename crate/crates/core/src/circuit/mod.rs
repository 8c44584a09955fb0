//! Type-directed grammar of normal forms, and the box-and-wire reading of
//! normal circuits.

mod diagram;
mod render;

use std::fmt;

use thiserror::Error;

use crate::dynamics::{classify_unchecked, FormClass, TypedNeutralContext};
use crate::syntax::{free_vars, Color, Mode, Name, Pattern, Program, Signature, Type};

pub use diagram::{extract_diagram, Diagram, DiagramError, DiagramShape, GateBox, WireId, WireTree};
pub use render::{render_ascii, render_dot};

/// Right-hand sides of the normal-form grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Production {
    Unit,
    Pair,
    Lambda,
    Suspension,
    Down,
    Neutral,
    Gate,
    NeutralMatch,
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Production::Unit => "()",
            Production::Pair => "(V, V)",
            Production::Lambda => "lambda",
            Production::Suspension => "suspension",
            Production::Down => "down V",
            Production::Neutral => "R",
            Production::Gate => "g",
            Production::NeutralMatch => "match R with p => V",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrammarFailure {
    /// Child-index path to the offending subterm.
    pub path: Vec<u8>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormReport {
    pub conforms: bool,
    /// The clause that generated the whole program, when it conforms.
    pub clause: Option<(Type, Production)>,
    pub failure: Option<GrammarFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("`{0}` is not a normal form")]
    NotNormal(String),
    #[error("no grammar clause covers type `{0}`")]
    Uncovered(String),
}

struct Grammar<'a> {
    sig: &'a Signature,
    psi: Vec<(Name, Type)>,
    path: Vec<u8>,
}

type G<T> = Result<T, GrammarFailure>;

impl Grammar<'_> {
    fn fail<T>(&self, reason: impl Into<String>) -> G<T> {
        Err(GrammarFailure { path: self.path.clone(), reason: reason.into() })
    }

    fn child<T>(&mut self, i: u8, f: impl FnOnce(&mut Self) -> G<T>) -> G<T> {
        self.path.push(i);
        let r = f(self);
        self.path.pop();
        r
    }

    fn names(&self) -> Vec<Name> {
        self.psi.iter().map(|(x, _)| x.clone()).collect()
    }

    /// Type of a neutral term, if it is one.
    fn neutral_type(&self, r: &Program) -> Option<Type> {
        if classify_unchecked(&self.names(), r) != FormClass::Neutral {
            return None;
        }
        match r {
            Program::Var(x, _) => self.psi.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t.clone()),
            Program::Gate(g) => self.sig.get(g).map(|gt| gt.arrow()),
            Program::App(g, _, _) => match &**g {
                Program::Gate(g) => self.sig.get(g).map(|gt| gt.output.as_type().clone()),
                _ => None,
            },
            _ => None,
        }
    }

    fn closed_over_psi(&self, p: &Program) -> G<()> {
        let fv = free_vars(p);
        if let Some((x, _)) = self.psi.iter().find(|(x, _)| fv.contains(x)) {
            return self.fail(format!("a value at mode u cannot use the circuit variable `{x}`"));
        }
        Ok(())
    }

    fn neutral_match(&mut self, ty: &Type, p: &Program, body_color: Color) -> G<Production> {
        let Program::Match { scrutinee, pattern, scrutinee_color: Color::Circuit, body_color: bc } = p else {
            return self.fail(format!("expected a neutral match at `{ty}`"));
        };
        if *bc != body_color {
            return self.fail("match body has the wrong color");
        }
        let Some(rt) = self.child(0, |g| Ok(g.neutral_type(scrutinee)))? else {
            return self.child(0, |g| g.fail(format!("scrutinee `{scrutinee}` is not neutral")));
        };
        let k = self.psi.len();
        match (pattern, &rt) {
            (Pattern::Unit(_), Type::Unit(_)) => {}
            (Pattern::Pair(x, y, _), Type::Tensor(a, b, _)) => {
                self.psi.push((x.clone(), (**a).clone()));
                self.psi.push((y.clone(), (**b).clone()));
            }
            _ => return self.fail(format!("pattern does not fit the scrutinee type `{rt}`")),
        }
        let r = self.child(1, |g| g.value(ty, pattern.body()));
        self.psi.truncate(k);
        r.map(|_| Production::NeutralMatch)
    }

    fn neutral_at(&mut self, ty: &Type, p: &Program) -> G<Production> {
        match self.neutral_type(p) {
            Some(t) if &t == ty => {
                Ok(if matches!(p, Program::Gate(_)) { Production::Gate } else { Production::Neutral })
            }
            Some(t) => self.fail(format!("neutral term of type `{t}` where `{ty}` is expected")),
            None => self.fail(format!("`{p}` is not neutral")),
        }
    }

    fn value(&mut self, ty: &Type, p: &Program) -> G<Production> {
        match (ty, ty.mode()) {
            (_, Mode::U) => {
                self.closed_over_psi(p)?;
                match (ty, p) {
                    (Type::Unit(_), Program::Unit(Color::Functional)) => Ok(Production::Unit),
                    (Type::Tensor(a, b, _), Program::Pair(l, r, Color::Functional)) => {
                        self.child(0, |g| g.value(a, l))?;
                        self.child(1, |g| g.value(b, r))?;
                        Ok(Production::Pair)
                    }
                    (Type::Arrow(..), Program::Lam { color: Color::Functional, .. }) => Ok(Production::Lambda),
                    (Type::Up(_), Program::SuspTerm(_)) => Ok(Production::Suspension),
                    _ => self.fail(format!("no clause for `{p}` at `{ty}`")),
                }
            }
            (Type::Down(a), _) => {
                self.closed_over_psi(p)?;
                match p {
                    Program::DownIntro(v) => {
                        self.child(0, |g| g.value(a, v))?;
                        Ok(Production::Down)
                    }
                    _ => self.fail(format!("expected `down V` at `{ty}`")),
                }
            }
            (_, Mode::L) => match (ty, p) {
                (Type::Unit(_), Program::Unit(Color::Functional)) => Ok(Production::Unit),
                (Type::Tensor(a, b, _), Program::Pair(l, r, Color::Functional)) => {
                    self.child(0, |g| g.value(a, l))?;
                    self.child(1, |g| g.value(b, r))?;
                    Ok(Production::Pair)
                }
                (Type::Arrow(..), Program::Lam { color: Color::Functional, .. }) => Ok(Production::Lambda),
                (Type::Up(_), Program::SuspCirc(_)) => Ok(Production::Suspension),
                (_, Program::Match { .. }) => self.neutral_match(ty, p, Color::Functional),
                _ => self.fail(format!("no clause for `{p}` at `{ty}`")),
            },
            (_, Mode::Q) => match (ty, p) {
                (Type::Unit(_), Program::Unit(Color::Circuit)) => Ok(Production::Unit),
                (Type::Tensor(a, b, _), Program::Pair(l, r, Color::Circuit)) => {
                    self.child(0, |g| g.value(a, l))?;
                    self.child(1, |g| g.value(b, r))?;
                    Ok(Production::Pair)
                }
                (Type::Arrow(a, b, _), Program::Lam { binder, body, color: Color::Circuit, .. }) => {
                    self.psi.push((binder.clone(), (**a).clone()));
                    let r = self.child(0, |g| g.value(b, body));
                    self.psi.pop();
                    r.map(|_| Production::Lambda)
                }
                (_, Program::Match { .. }) => self.neutral_match(ty, p, Color::Circuit),
                (Type::Arrow(..) | Type::Unit(_) | Type::Qubit | Type::Tensor(..), _) => self.neutral_at(ty, p),
                _ => self.fail(format!("no clause for `{p}` at `{ty}`")),
            },
        }
    }
}

/// Checks that the normal form `v` is generated by the grammar clause for
/// `ty` in the typed neutral context `psi`.
pub fn check_normal_grammar(
    sig: &Signature,
    ty: &Type,
    psi: &TypedNeutralContext,
    v: &Program,
) -> Result<NormalFormReport, GrammarError> {
    ty.validate().map_err(|_| GrammarError::Uncovered(ty.to_string()))?;
    let pi = psi.cneu();
    if crate::dynamics::check_scope(&pi, v).is_err() || !classify_unchecked(pi.names(), v).is_normal() {
        return Err(GrammarError::NotNormal(v.to_string()));
    }
    let mut g = Grammar {
        sig,
        psi: psi.entries().iter().map(|(x, s)| (x.clone(), s.as_type().clone())).collect(),
        path: Vec::new(),
    };
    let top_level_u = ty.mode() == Mode::U || matches!(ty, Type::Down(_));
    let result = if top_level_u && !psi.is_empty() {
        g.fail("the neutral context must be empty at mode u")
    } else {
        g.value(ty, v)
    };
    Ok(match result {
        Ok(production) => NormalFormReport { conforms: true, clause: Some((ty.clone(), production)), failure: None },
        Err(f) => NormalFormReport { conforms: false, clause: None, failure: Some(f) },
    })
}
