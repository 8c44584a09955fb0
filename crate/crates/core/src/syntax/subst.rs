//! Free variables, alpha-equivalence and capture-avoiding substitution.
//!
//! Binders keep their source names. When a binder would capture a free
//! variable of a substituted term it is renamed to a `%k` name with `k`
//! larger than every `%` index in sight, so the result is a pure function of
//! the inputs.

use std::collections::BTreeSet;

use super::{Name, Pattern, Program};

pub fn free_vars(p: &Program) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    collect_free(p, &mut bound, &mut out);
    out
}

fn collect_free(p: &Program, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match p {
        Program::Var(x, _) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Program::Unit(_) | Program::Gate(_) => {}
        Program::Lam { binder, body, .. } => {
            bound.push(binder.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        Program::Pair(a, b, _) | Program::App(a, b, _) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Program::SuspTerm(m) | Program::SuspCirc(m) | Program::DownIntro(m) | Program::Force(m, _) => {
            collect_free(m, bound, out)
        }
        Program::Match { scrutinee, pattern, .. } => {
            collect_free(scrutinee, bound, out);
            let names = pattern.binders();
            let n = names.len();
            bound.extend(names.into_iter().cloned());
            collect_free(pattern.body(), bound, out);
            bound.truncate(bound.len() - n);
        }
    }
}

pub fn fresh_name(k: u64) -> Name {
    Name::new(&format!("%{k}"))
}

/// Largest `k` among `%k` names occurring anywhere in `p`, bound or free.
pub fn max_fresh_index(p: &Program) -> u64 {
    fn bump(n: &Name, acc: &mut u64) {
        if let Some(k) = n.fresh_index() {
            *acc = (*acc).max(k);
        }
    }
    fn go(p: &Program, acc: &mut u64) {
        match p {
            Program::Var(x, _) => bump(x, acc),
            Program::Unit(_) | Program::Gate(_) => {}
            Program::Lam { binder, body, .. } => {
                bump(binder, acc);
                go(body, acc);
            }
            Program::Pair(a, b, _) | Program::App(a, b, _) => {
                go(a, acc);
                go(b, acc);
            }
            Program::SuspTerm(m) | Program::SuspCirc(m) | Program::DownIntro(m) | Program::Force(m, _) => go(m, acc),
            Program::Match { scrutinee, pattern, .. } => {
                go(scrutinee, acc);
                for b in pattern.binders() {
                    bump(b, acc);
                }
                go(pattern.body(), acc);
            }
        }
    }
    let mut acc = 0;
    go(p, &mut acc);
    acc
}

#[derive(Clone)]
enum Repl<'a> {
    Term(&'a Program),
    Rename(Name),
    Shadow,
}

struct Substituter<'a> {
    env: Vec<(Name, Repl<'a>)>,
    image_fv: BTreeSet<Name>,
    next: u64,
}

impl<'a> Substituter<'a> {
    fn lookup(&self, x: &Name) -> Option<&Repl<'a>> {
        self.env.iter().rev().find(|(n, _)| n == x).map(|(_, r)| r)
    }

    /// Enters a binder; returns the (possibly renamed) binder name.
    fn enter(&mut self, b: &Name) -> Name {
        if self.image_fv.contains(b) {
            self.next += 1;
            let fresh = super::fresh_name(self.next);
            self.env.push((b.clone(), Repl::Rename(fresh.clone())));
            fresh
        } else {
            self.env.push((b.clone(), Repl::Shadow));
            b.clone()
        }
    }

    fn go(&mut self, p: &Program) -> Program {
        match p {
            Program::Var(x, c) => match self.lookup(x) {
                Some(Repl::Term(v)) => (*v).clone(),
                Some(Repl::Rename(n)) => Program::Var(n.clone(), *c),
                Some(Repl::Shadow) | None => p.clone(),
            },
            Program::Unit(_) | Program::Gate(_) => p.clone(),
            Program::Lam { binder, annot, body, color } => {
                let b = self.enter(binder);
                let body = self.go(body);
                self.env.pop();
                Program::Lam { binder: b, annot: annot.clone(), body: Box::new(body), color: *color }
            }
            Program::Pair(a, b, c) => Program::pair(self.go(a), self.go(b), *c),
            Program::App(a, b, c) => Program::app(self.go(a), self.go(b), *c),
            Program::SuspTerm(m) => Program::susp(self.go(m)),
            Program::SuspCirc(m) => Program::circ(self.go(m)),
            Program::DownIntro(m) => Program::down(self.go(m)),
            Program::Force(m, c) => Program::force(self.go(m), *c),
            Program::Match { scrutinee, pattern, scrutinee_color, body_color } => {
                let scrutinee = Box::new(self.go(scrutinee));
                let pattern = match pattern {
                    Pattern::Unit(body) => Pattern::Unit(Box::new(self.go(body))),
                    Pattern::Pair(x, y, body) => {
                        let x2 = self.enter(x);
                        let y2 = self.enter(y);
                        let body = self.go(body);
                        self.env.truncate(self.env.len() - 2);
                        Pattern::Pair(x2, y2, Box::new(body))
                    }
                    Pattern::Down(x, body) => {
                        let x2 = self.enter(x);
                        let body = self.go(body);
                        self.env.pop();
                        Pattern::Down(x2, Box::new(body))
                    }
                };
                Program::Match { scrutinee, pattern, scrutinee_color: *scrutinee_color, body_color: *body_color }
            }
        }
    }
}

/// Simultaneous capture-avoiding substitution.
pub fn subst_many(body: &Program, map: &[(Name, Program)]) -> Program {
    if map.is_empty() {
        return body.clone();
    }
    let mut image_fv = BTreeSet::new();
    let mut next = max_fresh_index(body);
    for (_, v) in map {
        image_fv.extend(free_vars(v));
        next = next.max(max_fresh_index(v));
    }
    let env = map.iter().map(|(x, v)| (x.clone(), Repl::Term(v))).collect();
    Substituter { env, image_fv, next }.go(body)
}

pub fn subst(body: &Program, x: &Name, v: &Program) -> Program {
    subst_many(body, &[(x.clone(), v.clone())])
}

/// Renames free occurrences of `old` to `new`, keeping each occurrence's color.
pub fn rename_free(body: &Program, old: &Name, new: &Name) -> Program {
    let mut image_fv = BTreeSet::new();
    image_fv.insert(new.clone());
    let next = max_fresh_index(body).max(new.fresh_index().unwrap_or(0));
    let env = vec![(old.clone(), Repl::Rename(new.clone()))];
    Substituter { env, image_fv, next }.go(body)
}

/// Equality up to the names of bound variables. Binder annotations are
/// ignored: they guide the checker and carry no dynamic content.
pub fn alpha_eq(p: &Program, q: &Program) -> bool {
    let mut lp = Vec::new();
    let mut lq = Vec::new();
    alpha(p, q, &mut lp, &mut lq)
}

fn same_var(x: &Name, y: &Name, lp: &[Name], lq: &[Name]) -> bool {
    let ix = lp.iter().rposition(|n| n == x);
    let iy = lq.iter().rposition(|n| n == y);
    match (ix, iy) {
        (Some(i), Some(j)) => i == j,
        (None, None) => x == y,
        _ => false,
    }
}

fn alpha(p: &Program, q: &Program, lp: &mut Vec<Name>, lq: &mut Vec<Name>) -> bool {
    match (p, q) {
        (Program::Var(x, c1), Program::Var(y, c2)) => c1 == c2 && same_var(x, y, lp, lq),
        (Program::Unit(a), Program::Unit(b)) => a == b,
        (Program::Gate(a), Program::Gate(b)) => a == b,
        (Program::Lam { binder: x, body: b1, color: c1, .. }, Program::Lam { binder: y, body: b2, color: c2, .. }) => {
            if c1 != c2 {
                return false;
            }
            lp.push(x.clone());
            lq.push(y.clone());
            let r = alpha(b1, b2, lp, lq);
            lp.pop();
            lq.pop();
            r
        }
        (Program::Pair(a1, b1, c1), Program::Pair(a2, b2, c2))
        | (Program::App(a1, b1, c1), Program::App(a2, b2, c2)) => {
            c1 == c2 && alpha(a1, a2, lp, lq) && alpha(b1, b2, lp, lq)
        }
        (Program::SuspTerm(a), Program::SuspTerm(b))
        | (Program::SuspCirc(a), Program::SuspCirc(b))
        | (Program::DownIntro(a), Program::DownIntro(b)) => alpha(a, b, lp, lq),
        (Program::Force(a, c1), Program::Force(b, c2)) => c1 == c2 && alpha(a, b, lp, lq),
        (
            Program::Match { scrutinee: s1, pattern: p1, scrutinee_color: sc1, body_color: bc1 },
            Program::Match { scrutinee: s2, pattern: p2, scrutinee_color: sc2, body_color: bc2 },
        ) => {
            if sc1 != sc2 || bc1 != bc2 || !alpha(s1, s2, lp, lq) {
                return false;
            }
            let (n1, n2) = (p1.binders(), p2.binders());
            let same_shape = matches!(
                (p1, p2),
                (Pattern::Unit(_), Pattern::Unit(_))
                    | (Pattern::Pair(..), Pattern::Pair(..))
                    | (Pattern::Down(..), Pattern::Down(..))
            );
            if !same_shape {
                return false;
            }
            let k = n1.len();
            lp.extend(n1.into_iter().cloned());
            lq.extend(n2.into_iter().cloned());
            let r = alpha(p1.body(), p2.body(), lp, lq);
            lp.truncate(lp.len() - k);
            lq.truncate(lq.len() - k);
            r
        }
        _ => false,
    }
}
