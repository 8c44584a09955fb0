//! Syntax laws checked against a de Bruijn reference representation.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pqa_core::syntax::{alpha_eq, free_vars, parse_program, parse_type, subst, Color, Name, Pattern, Program};

const NAMES: [&str; 5] = ["x", "y", "z", "a", "b"];
const F_TYPES: [&str; 4] = ["Up qubit", "unit@l", "Up qubit * Up qubit @l", "Down Up (unit@l -o unit@l @l)"];
const C_TYPES: [&str; 3] = ["qubit", "unit@q", "qubit * qubit @q"];

/// Random color-correct programs, not necessarily typeable.
struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn name(&mut self) -> Name {
        Name::new(NAMES[self.rng.gen_range(0..NAMES.len())])
    }

    fn two_names(&mut self) -> (Name, Name) {
        let i = self.rng.gen_range(0..NAMES.len());
        let j = (i + self.rng.gen_range(1..NAMES.len())) % NAMES.len();
        (Name::new(NAMES[i]), Name::new(NAMES[j]))
    }

    fn annot(&mut self, c: Color) -> Option<pqa_core::syntax::Type> {
        if self.rng.gen_bool(0.5) {
            return None;
        }
        let pool: &[&str] = if c == Color::Functional { &F_TYPES } else { &C_TYPES };
        Some(parse_type(pool[self.rng.gen_range(0..pool.len())]).unwrap())
    }

    fn pattern(&mut self, body: Program, down_ok: bool) -> Pattern {
        match self.rng.gen_range(0..if down_ok { 3 } else { 2 }) {
            0 => Pattern::Unit(Box::new(body)),
            1 => {
                let (x, y) = self.two_names();
                Pattern::Pair(x, y, Box::new(body))
            }
            _ => Pattern::Down(self.name(), Box::new(body)),
        }
    }

    fn term(&mut self, depth: u32) -> Program {
        let leaf = depth == 0 || self.rng.gen_bool(0.2);
        if leaf {
            return match self.rng.gen_range(0..3) {
                0 => Program::Unit(Color::Functional),
                _ => Program::Var(self.name(), Color::Functional),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 => {
                let binder = self.name();
                let annot = self.annot(Color::Functional);
                Program::Lam { binder, annot, body: Box::new(self.term(d)), color: Color::Functional }
            }
            1 => Program::pair(self.term(d), self.term(d), Color::Functional),
            2 => Program::app(self.term(d), self.term(d), Color::Functional),
            3 => Program::susp(self.term(d)),
            4 => Program::circ(self.circ(d)),
            5 => Program::down(self.term(d)),
            6 => Program::force(self.term(d), Color::Functional),
            7 => {
                let (scrutinee, body) = (self.term(d), self.term(d));
                let pattern = self.pattern(body, true);
                Program::Match {
                    scrutinee: Box::new(scrutinee),
                    pattern,
                    scrutinee_color: Color::Functional,
                    body_color: Color::Functional,
                }
            }
            _ => {
                let (scrutinee, body) = (self.circ(d), self.term(d));
                let pattern = self.pattern(body, false);
                Program::Match {
                    scrutinee: Box::new(scrutinee),
                    pattern,
                    scrutinee_color: Color::Circuit,
                    body_color: Color::Functional,
                }
            }
        }
    }

    fn circ(&mut self, depth: u32) -> Program {
        let leaf = depth == 0 || self.rng.gen_bool(0.2);
        if leaf {
            return match self.rng.gen_range(0..4) {
                0 => Program::Unit(Color::Circuit),
                1 => Program::gate(["H", "Z", "CNOT"][self.rng.gen_range(0..3)]),
                _ => Program::Var(self.name(), Color::Circuit),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..5) {
            0 => {
                let binder = self.name();
                let annot = self.annot(Color::Circuit);
                Program::Lam { binder, annot, body: Box::new(self.circ(d)), color: Color::Circuit }
            }
            1 => Program::pair(self.circ(d), self.circ(d), Color::Circuit),
            2 => Program::app(self.circ(d), self.circ(d), Color::Circuit),
            3 => Program::force(self.term(d), Color::Circuit),
            _ => {
                let (scrutinee, body) = (self.circ(d), self.circ(d));
                let pattern = self.pattern(body, false);
                Program::Match {
                    scrutinee: Box::new(scrutinee),
                    pattern,
                    scrutinee_color: Color::Circuit,
                    body_color: Color::Circuit,
                }
            }
        }
    }
}

fn program(seed: u64, depth: u32) -> Program {
    Gen { rng: ChaCha8Rng::seed_from_u64(seed) }.term(depth)
}

/// Nameless form: bound variables become indices, annotations are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Db {
    Bound(usize, Color),
    Free(String, Color),
    Unit(Color),
    Gate(String),
    Lam(Box<Db>, Color),
    Pair(Box<Db>, Box<Db>, Color),
    App(Box<Db>, Box<Db>, Color),
    Susp(Box<Db>),
    Circ(Box<Db>),
    Down(Box<Db>),
    Force(Box<Db>, Color),
    Match(Box<Db>, u8, Box<Db>, Color, Color),
}

fn db(p: &Program, scope: &mut Vec<Name>) -> Db {
    let b = |d: Db| Box::new(d);
    match p {
        Program::Var(x, c) => match scope.iter().rev().position(|n| n == x) {
            Some(i) => Db::Bound(i, *c),
            None => Db::Free(x.as_str().to_string(), *c),
        },
        Program::Unit(c) => Db::Unit(*c),
        Program::Gate(g) => Db::Gate(g.as_str().to_string()),
        Program::Lam { binder, body, color, .. } => {
            scope.push(binder.clone());
            let body = db(body, scope);
            scope.pop();
            Db::Lam(b(body), *color)
        }
        Program::Pair(x, y, c) => Db::Pair(b(db(x, scope)), b(db(y, scope)), *c),
        Program::App(x, y, c) => Db::App(b(db(x, scope)), b(db(y, scope)), *c),
        Program::SuspTerm(m) => Db::Susp(b(db(m, scope))),
        Program::SuspCirc(m) => Db::Circ(b(db(m, scope))),
        Program::DownIntro(m) => Db::Down(b(db(m, scope))),
        Program::Force(m, c) => Db::Force(b(db(m, scope)), *c),
        Program::Match { scrutinee, pattern, scrutinee_color, body_color } => {
            let s = db(scrutinee, scope);
            let tag = match pattern {
                Pattern::Unit(_) => 0,
                Pattern::Pair(..) => 1,
                Pattern::Down(..) => 2,
            };
            let k = pattern.binders().len();
            scope.extend(pattern.binders().into_iter().cloned());
            let body = db(pattern.body(), scope);
            scope.truncate(scope.len() - k);
            Db::Match(b(s), tag, b(body), *scrutinee_color, *body_color)
        }
    }
}

fn nameless(p: &Program) -> Db {
    db(p, &mut Vec::new())
}

/// Substitution on nameless terms: free names never clash with indices, so
/// no renaming is needed.
fn db_subst(t: &Db, x: &str, v: &Db) -> Db {
    let go = |t: &Db| Box::new(db_subst(t, x, v));
    match t {
        Db::Free(y, _) if y == x => v.clone(),
        Db::Bound(..) | Db::Free(..) | Db::Unit(_) | Db::Gate(_) => t.clone(),
        Db::Lam(m, c) => Db::Lam(go(m), *c),
        Db::Pair(a, b, c) => Db::Pair(go(a), go(b), *c),
        Db::App(a, b, c) => Db::App(go(a), go(b), *c),
        Db::Susp(m) => Db::Susp(go(m)),
        Db::Circ(m) => Db::Circ(go(m)),
        Db::Down(m) => Db::Down(go(m)),
        Db::Force(m, c) => Db::Force(go(m), *c),
        Db::Match(s, k, m, sc, bc) => Db::Match(go(s), *k, go(m), *sc, *bc),
    }
}

fn db_free(t: &Db, out: &mut BTreeSet<String>) {
    match t {
        Db::Free(y, _) => {
            out.insert(y.clone());
        }
        Db::Bound(..) | Db::Unit(_) | Db::Gate(_) => {}
        Db::Lam(m, _) | Db::Susp(m) | Db::Circ(m) | Db::Down(m) | Db::Force(m, _) => db_free(m, out),
        Db::Pair(a, b, _) | Db::App(a, b, _) | Db::Match(a, _, b, _, _) => {
            db_free(a, out);
            db_free(b, out);
        }
    }
}

/// Renames every binder by appending `suffix`; bound occurrences follow.
fn rename_bound(p: &Program, suffix: &str, scope: &mut Vec<Name>) -> Program {
    let fresh = |n: &Name| Name::new(&format!("{}{suffix}", n.as_str()));
    let go = |m: &Program, scope: &mut Vec<Name>| Box::new(rename_bound(m, suffix, scope));
    match p {
        Program::Var(x, c) if scope.contains(x) => Program::Var(fresh(x), *c),
        Program::Var(..) | Program::Unit(_) | Program::Gate(_) => p.clone(),
        Program::Lam { binder, annot, body, color } => {
            scope.push(binder.clone());
            let body = go(body, scope);
            scope.pop();
            Program::Lam { binder: fresh(binder), annot: annot.clone(), body, color: *color }
        }
        Program::Pair(a, b, c) => Program::Pair(go(a, scope), go(b, scope), *c),
        Program::App(a, b, c) => Program::App(go(a, scope), go(b, scope), *c),
        Program::SuspTerm(m) => Program::SuspTerm(go(m, scope)),
        Program::SuspCirc(m) => Program::SuspCirc(go(m, scope)),
        Program::DownIntro(m) => Program::DownIntro(go(m, scope)),
        Program::Force(m, c) => Program::Force(go(m, scope), *c),
        Program::Match { scrutinee, pattern, scrutinee_color, body_color } => {
            let scrutinee = go(scrutinee, scope);
            let k = pattern.binders().len();
            scope.extend(pattern.binders().into_iter().cloned());
            let body = *go(pattern.body(), scope);
            scope.truncate(scope.len() - k);
            let pattern = match pattern {
                Pattern::Unit(_) => Pattern::Unit(Box::new(body)),
                Pattern::Pair(x, y, _) => Pattern::Pair(fresh(x), fresh(y), Box::new(body)),
                Pattern::Down(x, _) => Pattern::Down(fresh(x), Box::new(body)),
            };
            Program::Match { scrutinee, pattern, scrutinee_color: *scrutinee_color, body_color: *body_color }
        }
    }
}

fn renamed(p: &Program, suffix: &str) -> Program {
    rename_bound(p, suffix, &mut Vec::new())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn generated_programs_respect_colors(seed in any::<u64>()) {
        prop_assert!(program(seed, 6).validate_colors().is_ok());
    }

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let p = program(seed, 6);
        let (q, _) = parse_program(&p.to_string()).map_err(|e| TestCaseError::fail(format!("{e}: {p}")))?;
        prop_assert_eq!(q, p);
    }

    #[test]
    fn alpha_eq_is_an_equivalence(seed in any::<u64>()) {
        let p = program(seed, 6);
        let (q, r) = (renamed(&p, "1"), renamed(&p, "2"));
        prop_assert!(alpha_eq(&p, &p));
        prop_assert!(alpha_eq(&p, &q) && alpha_eq(&q, &p));
        prop_assert!(alpha_eq(&q, &r) && alpha_eq(&p, &r));
    }

    #[test]
    fn alpha_eq_matches_nameless_equality(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (p, q) = (program(s1, 3), program(s2, 3));
        prop_assert_eq!(alpha_eq(&p, &q), nameless(&p) == nameless(&q));
        let r = renamed(&q, "'");
        prop_assert_eq!(nameless(&q), nameless(&r));
    }

    #[test]
    fn free_vars_match_nameless(seed in any::<u64>()) {
        let p = program(seed, 6);
        let mut want = BTreeSet::new();
        db_free(&nameless(&p), &mut want);
        let got: BTreeSet<String> = free_vars(&p).into_iter().map(|n| n.as_str().to_string()).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn subst_matches_nameless_subst(s1 in any::<u64>(), s2 in any::<u64>(), i in 0..NAMES.len()) {
        let (p, v) = (program(s1, 5), program(s2, 3));
        let x = Name::new(NAMES[i]);
        let got = subst(&p, &x, &v);
        prop_assert_eq!(nameless(&got), db_subst(&nameless(&p), NAMES[i], &nameless(&v)), "{} [{} / {}]", p, v, x);
    }

    #[test]
    fn subst_by_itself_is_identity(seed in any::<u64>(), i in 0..NAMES.len()) {
        let p = program(seed, 6);
        let x = Name::new(NAMES[i]);
        let q = subst(&p, &x, &Program::Var(x.clone(), Color::Functional));
        // circuit occurrences change color, so compare functional-only programs exactly
        if !p.to_string().contains("circ") && !p.to_string().contains("circval") {
            prop_assert!(alpha_eq(&p, &q));
        }
        prop_assert_eq!(free_vars(&q), free_vars(&p));
    }

    #[test]
    fn free_vars_of_subst(s1 in any::<u64>(), s2 in any::<u64>(), i in 0..NAMES.len()) {
        let (p, v) = (program(s1, 5), program(s2, 3));
        let x = Name::new(NAMES[i]);
        let mut want = free_vars(&p);
        if want.remove(&x) {
            want.extend(free_vars(&v));
        }
        prop_assert_eq!(free_vars(&subst(&p, &x, &v)), want);
    }

    #[test]
    fn subst_of_absent_name_changes_nothing(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (p, v) = (program(s1, 5), program(s2, 3));
        let x = Name::new("absent");
        // binders that clash with free names of `v` may still be renamed
        let q = subst(&p, &x, &v);
        prop_assert!(alpha_eq(&q, &p));
        if free_vars(&v).is_empty() {
            prop_assert_eq!(q, p);
        }
    }
}
