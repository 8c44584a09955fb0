//! Declarative reference checker for the linear system.
//!
//! Instead of threading leftover contexts, every binary node tries all
//! divisions of the available linear bindings between its two premises,
//! and synthesis returns every type a term can have. Exponential, so only
//! for small contexts.

use thiserror::Error;

use crate::statics::TypingContext;
use crate::syntax::{free_vars, Color, Mode, Name, Pattern, PatternFamily, Program, Signature, Type};

/// Largest linear context the oracle accepts.
pub const MAX_LINEAR: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} linear bindings exceed the oracle limit of {MAX_LINEAR}")]
    TooManyLinear(usize),
    #[error("more than 64 bindings in scope")]
    TooDeep,
}

struct Entry {
    name: Name,
    ty: Type,
    linear: bool,
}

struct Oracle<'a> {
    sig: &'a Signature,
    scope: Vec<Entry>,
    overflow: bool,
}

fn color_admits(c: Color, m: Mode) -> bool {
    match c {
        Color::Functional => m != Mode::Q,
        Color::Circuit => m == Mode::Q,
    }
}

fn push_unique(out: &mut Vec<Type>, t: Type) {
    if !out.contains(&t) {
        out.push(t);
    }
}

/// Submasks of `avail`, all `2^n` of them.
fn submasks(avail: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(avail);
    std::iter::from_fn(move || {
        let s = next?;
        next = if s == 0 { None } else { Some((s - 1) & avail) };
        Some(s)
    })
}

impl Oracle<'_> {
    fn lookup(&self, x: &Name) -> Option<usize> {
        self.scope.iter().rposition(|e| e.name == *x)
    }

    /// Linear bindings of `avail` that `p` can reach by name.
    fn reachable(&self, avail: u64, p: &Program) -> u64 {
        free_vars(p)
            .iter()
            .filter_map(|x| self.lookup(x))
            .filter(|&i| self.scope[i].linear)
            .fold(0, |m, i| m | (1 << i))
            & avail
    }

    fn with<T: Default>(&mut self, x: &Name, ty: &Type, color: Color, f: impl FnOnce(&mut Self, u64) -> T) -> T {
        if color == Color::Circuit && !ty.is_simple() || !color_admits(color, ty.mode()) {
            return T::default();
        }
        if self.scope.len() >= 64 {
            self.overflow = true;
            return T::default();
        }
        let linear = ty.mode().is_linear();
        let bit = if linear { 1 << self.scope.len() } else { 0 };
        self.scope.push(Entry { name: x.clone(), ty: ty.clone(), linear });
        let r = f(self, bit);
        self.scope.pop();
        r
    }

    /// Every division of `avail` between `l` and `r`.
    fn divisions(&self, avail: u64, l: &Program, r: &Program) -> Vec<(u64, u64)> {
        let (rl, rr) = (self.reachable(avail, l), self.reachable(avail, r));
        submasks(avail).filter(|s| s & !rl == 0 && (avail ^ s) & !rr == 0).map(|s| (s, avail ^ s)).collect()
    }

    fn node_ok(p: &Program, avail: u64, t: &Type) -> bool {
        color_admits(p.color(), t.mode()) && (t.mode() != Mode::U || avail == 0)
    }

    fn chk(&mut self, avail: u64, p: &Program, ty: &Type) -> bool {
        if !Self::node_ok(p, avail, ty) {
            return false;
        }
        match (p, ty) {
            (Program::Lam { binder, annot, body, color }, Type::Arrow(a, b, _)) => {
                if annot.as_ref().is_some_and(|t| t != &**a) {
                    return false;
                }
                self.with(binder, a, *color, |o, bit| o.chk(avail | bit, body, b))
            }
            (Program::Unit(_), Type::Unit(_)) => avail == 0,
            (Program::Pair(l, r, _), Type::Tensor(a, b, _)) => {
                self.divisions(avail, l, r).into_iter().any(|(s1, s2)| self.chk(s1, l, a) && self.chk(s2, r, b))
            }
            (Program::SuspTerm(m), Type::Up(a)) if a.mode() == Mode::L => self.chk(avail, m, a),
            (Program::SuspCirc(m), Type::Up(a)) if a.mode() == Mode::Q => self.chk(avail, m, a),
            (Program::DownIntro(m), Type::Down(a)) => self.chk(avail, m, a),
            (
                Program::Lam { .. }
                | Program::Unit(_)
                | Program::Pair(..)
                | Program::SuspTerm(_)
                | Program::SuspCirc(_)
                | Program::DownIntro(_),
                _,
            ) => false,
            (Program::Match { scrutinee, pattern, scrutinee_color, body_color }, _) => {
                !self.matching(avail, scrutinee, pattern, *scrutinee_color, *body_color, Some(ty)).is_empty()
            }
            _ => self.syn(avail, p).contains(ty),
        }
    }

    fn syn(&mut self, avail: u64, p: &Program) -> Vec<Type> {
        let mut out = self.syn_inner(avail, p);
        out.retain(|t| Self::node_ok(p, avail, t));
        out
    }

    fn syn_inner(&mut self, avail: u64, p: &Program) -> Vec<Type> {
        let mut out = Vec::new();
        match p {
            Program::Var(x, color) => {
                let Some(i) = self.lookup(x) else { return out };
                let e = &self.scope[i];
                let want = if e.linear { 1 << i } else { 0 };
                if avail == want && (*color == Color::Functional || e.ty.is_simple()) {
                    out.push(e.ty.clone());
                }
            }
            Program::Gate(g) => {
                if let (0, Some(gt)) = (avail, self.sig.get(g)) {
                    out.push(gt.arrow());
                }
            }
            Program::Lam { annot: None, .. } => {}
            Program::Lam { binder, annot: Some(a), body, color } => {
                if a.validate().is_err() {
                    return out;
                }
                let bodies = self.with(binder, a, *color, |o, bit| o.syn(avail | bit, body));
                for b in bodies {
                    let t = Type::arrow(a.clone(), b, a.mode());
                    if t.validate_node().is_ok() {
                        push_unique(&mut out, t);
                    }
                }
            }
            Program::Unit(Color::Circuit) => {
                if avail == 0 {
                    out.push(Type::Unit(Mode::Q));
                }
            }
            Program::Unit(Color::Functional) => {
                if avail == 0 {
                    out.push(Type::Unit(Mode::U));
                    out.push(Type::Unit(Mode::L));
                }
            }
            Program::Pair(l, r, color) => {
                for (s1, s2) in self.divisions(avail, l, r) {
                    let ls = self.syn(s1, l);
                    if ls.is_empty() {
                        continue;
                    }
                    let rs = self.syn(s2, r);
                    for a in &ls {
                        for b in &rs {
                            let m = if *color == Color::Circuit { Mode::Q } else { a.mode() };
                            let t = Type::tensor(a.clone(), b.clone(), m);
                            if t.validate_node().is_ok() {
                                push_unique(&mut out, t);
                            }
                        }
                    }
                }
            }
            Program::SuspTerm(m) => {
                for a in self.syn(avail, m) {
                    if a.mode() == Mode::L {
                        push_unique(&mut out, Type::up(a));
                    }
                }
            }
            Program::SuspCirc(m) => {
                for a in self.syn(avail, m) {
                    if a.mode() == Mode::Q {
                        push_unique(&mut out, Type::up(a));
                    }
                }
            }
            Program::DownIntro(m) => {
                for a in self.syn(avail, m) {
                    if a.mode() == Mode::U {
                        push_unique(&mut out, Type::down(a));
                    }
                }
            }
            Program::App(f, a, color) => {
                for (s1, s2) in self.divisions(avail, f, a) {
                    for ft in self.syn(s1, f) {
                        if let Type::Arrow(dom, cod, m) = &ft {
                            if color_admits(*color, *m) && self.chk(s2, a, dom) {
                                push_unique(&mut out, (**cod).clone());
                            }
                        }
                    }
                }
            }
            Program::Force(m, color) => {
                let want = if *color == Color::Circuit { Mode::Q } else { Mode::L };
                for t in self.syn(avail, m) {
                    if let Type::Up(a) = t {
                        if a.mode() == want {
                            push_unique(&mut out, (*a).clone());
                        }
                    }
                }
            }
            Program::Match { scrutinee, pattern, scrutinee_color, body_color } => {
                out = self.matching(avail, scrutinee, pattern, *scrutinee_color, *body_color, None);
            }
        }
        out
    }

    fn body(&mut self, avail: u64, body: &Program, expected: Option<&Type>) -> Vec<Type> {
        match expected {
            Some(e) if self.chk(avail, body, e) => vec![e.clone()],
            Some(_) => vec![],
            None => self.syn(avail, body),
        }
    }

    fn matching(
        &mut self,
        avail: u64,
        scrutinee: &Program,
        pattern: &Pattern,
        sc: Color,
        bc: Color,
        expected: Option<&Type>,
    ) -> Vec<Type> {
        let mut out = Vec::new();
        let Some(family) = PatternFamily::from_colors(sc, bc) else { return out };
        let body = pattern.body();
        // the body may also reach bindings the pattern shadows, so divide
        // by the whole match body rather than by its free variables alone
        for (s1, s2) in self.divisions(avail, scrutinee, &body_with_binders(pattern)) {
            for t in self.syn(s1, scrutinee) {
                if !color_admits(sc, t.mode()) {
                    continue;
                }
                let (results, bound) = match (pattern, &t) {
                    (Pattern::Unit(_), Type::Unit(_)) => (self.body(s2, body, expected), t.mode()),
                    (Pattern::Pair(x, y, _), Type::Tensor(a, b, _)) => {
                        let r =
                            self.with(x, a, sc, |o, bx| o.with(y, b, sc, |o, by| o.body(s2 | bx | by, body, expected)));
                        (r, t.mode())
                    }
                    (Pattern::Down(x, _), Type::Down(a)) if family == PatternFamily::FF => {
                        (self.with(x, a, Color::Functional, |o, bx| o.body(s2 | bx, body, expected)), Mode::L)
                    }
                    _ => continue,
                };
                for r in results {
                    if bound.geq(r.mode()) {
                        push_unique(&mut out, r);
                    }
                }
            }
        }
        out
    }
}

/// The pattern body with its binders reattached, for free-variable purposes.
fn body_with_binders(pattern: &Pattern) -> Program {
    let body = pattern.body().clone();
    pattern.binders().into_iter().rev().fold(body, |b, x| Program::lam(x.as_str(), None, b, Color::Functional))
}

/// Reference typing judgment: does `p` check against `goal` in `ctx`,
/// consuming every linear binding exactly once?
pub fn brute_force_split_check(
    sig: &Signature,
    ctx: &TypingContext,
    p: &Program,
    goal: &Type,
) -> Result<bool, OracleError> {
    let linear = ctx.linear().count();
    if linear > MAX_LINEAR {
        return Err(OracleError::TooManyLinear(linear));
    }
    if ctx.len() > 64 {
        return Err(OracleError::TooDeep);
    }
    if goal.validate().is_err() {
        return Ok(false);
    }
    let mut o = Oracle { sig, scope: Vec::new(), overflow: false };
    let mut avail = 0;
    for (x, t) in ctx.entries() {
        if t.validate().is_err() || t.mode() == Mode::Q && !t.is_simple() {
            return Ok(false);
        }
        let linear = t.mode().is_linear();
        if linear {
            avail |= 1 << o.scope.len();
        }
        o.scope.push(Entry { name: x.clone(), ty: t.clone(), linear });
    }
    let r = o.chk(avail, p, goal);
    if o.overflow {
        return Err(OracleError::TooDeep);
    }
    Ok(r)
}

/// Linear context entries plus every binder in `p`: an upper bound on the
/// linear bindings the oracle may split.
pub fn linear_binding_count(ctx: &TypingContext, p: &Program) -> usize {
    fn binders(p: &Program) -> usize {
        match p {
            Program::Var(..) | Program::Unit(_) | Program::Gate(_) => 0,
            Program::Lam { body, .. } => 1 + binders(body),
            Program::Pair(a, b, _) | Program::App(a, b, _) => binders(a) + binders(b),
            Program::SuspTerm(m) | Program::SuspCirc(m) | Program::DownIntro(m) | Program::Force(m, _) => binders(m),
            Program::Match { scrutinee, pattern, .. } => {
                binders(scrutinee) + pattern.binders().len() + binders(pattern.body())
            }
        }
    }
    ctx.linear().count() + binders(p)
}
