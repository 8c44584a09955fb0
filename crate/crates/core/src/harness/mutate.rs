//! One-constructor mutations of well-typed programs.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::shrink::{replace_at, subterm_at};
use crate::syntax::{Color, Name, Pattern, Program, Signature, Type};

#[derive(Clone, Debug)]
pub struct Mutation {
    pub path: Vec<u8>,
    pub kind: &'static str,
    pub program: Program,
}

fn flip(c: Color) -> Color {
    match c {
        Color::Functional => Color::Circuit,
        Color::Circuit => Color::Functional,
    }
}

fn paths(p: &Program, here: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    out.push(here.clone());
    let mut child = |i: u8, c: &Program, out: &mut Vec<Vec<u8>>| {
        here.push(i);
        paths(c, here, out);
        here.pop();
    };
    match p {
        Program::Var(..) | Program::Unit(_) | Program::Gate(_) => {}
        Program::Lam { body, .. } => child(0, body, out),
        Program::Pair(a, b, _) | Program::App(a, b, _) => {
            child(0, a, out);
            child(1, b, out);
        }
        Program::SuspTerm(m) | Program::SuspCirc(m) | Program::DownIntro(m) | Program::Force(m, _) => child(0, m, out),
        Program::Match { scrutinee, pattern, .. } => {
            child(0, scrutinee, out);
            child(1, pattern.body(), out);
        }
    }
}

/// Every variant reachable from `p` by changing its outermost constructor.
pub fn variants(sig: &Signature, p: &Program) -> Vec<(&'static str, Program)> {
    let b = |p: &Program| Box::new(p.clone());
    let other_gate =
        |g: &Name| sig.iter().map(|(n, _)| n).find(|n| *n != g).cloned().unwrap_or_else(|| Name::new("NOPE"));
    match p {
        Program::Var(x, c) => vec![
            ("flip-color", Program::Var(x.clone(), flip(*c))),
            ("var-to-unit", Program::Unit(*c)),
            ("rename-var", Program::Var(Name::new(&format!("{}'", x.as_str())), *c)),
        ],
        Program::Gate(g) => {
            vec![("swap-gate", Program::Gate(other_gate(g))), ("gate-to-var", Program::cvar(g.as_str()))]
        }
        Program::Unit(c) => {
            vec![("flip-color", Program::Unit(flip(*c))), ("unit-to-var", Program::Var(Name::new("u"), *c))]
        }
        Program::Lam { binder, annot, body, color } => {
            let mut out = vec![
                (
                    "flip-color",
                    Program::Lam { binder: binder.clone(), annot: annot.clone(), body: b(body), color: flip(*color) },
                ),
                ("lam-to-susp", Program::SuspTerm(b(body))),
            ];
            out.push(match annot {
                Some(_) => (
                    "drop-annotation",
                    Program::Lam { binder: binder.clone(), annot: None, body: b(body), color: *color },
                ),
                None => (
                    "wrong-annotation",
                    Program::Lam {
                        binder: binder.clone(),
                        annot: Some(Type::Unit(crate::syntax::Mode::L)),
                        body: b(body),
                        color: *color,
                    },
                ),
            });
            out
        }
        Program::Pair(l, r, c) => {
            vec![("flip-color", Program::Pair(b(l), b(r), flip(*c))), ("pair-to-app", Program::App(b(l), b(r), *c))]
        }
        Program::App(f, a, c) => {
            vec![("flip-color", Program::App(b(f), b(a), flip(*c))), ("app-to-pair", Program::Pair(b(f), b(a), *c))]
        }
        Program::SuspTerm(m) => vec![
            ("susp-to-circ", Program::SuspCirc(b(m))),
            ("susp-to-down", Program::DownIntro(b(m))),
            ("susp-to-force", Program::Force(b(m), Color::Functional)),
        ],
        Program::SuspCirc(m) => vec![
            ("circ-to-susp", Program::SuspTerm(b(m))),
            ("circ-to-down", Program::DownIntro(b(m))),
            ("circ-to-force", Program::Force(b(m), Color::Circuit)),
        ],
        Program::DownIntro(m) => {
            vec![("down-to-susp", Program::SuspTerm(b(m))), ("down-to-circ", Program::SuspCirc(b(m)))]
        }
        Program::Force(m, c) => {
            vec![("flip-color", Program::Force(b(m), flip(*c))), ("force-to-susp", Program::SuspTerm(b(m)))]
        }
        Program::Match { scrutinee, pattern, scrutinee_color, body_color } => {
            let with = |pattern: Pattern, sc: Color, bc: Color| Program::Match {
                scrutinee: b(scrutinee),
                pattern,
                scrutinee_color: sc,
                body_color: bc,
            };
            let (sc, bc) = (*scrutinee_color, *body_color);
            let body = || Box::new(pattern.body().clone());
            let mut out = vec![
                ("flip-scrutinee-color", with(pattern.clone(), flip(sc), bc)),
                ("flip-body-color", with(pattern.clone(), sc, flip(bc))),
            ];
            match pattern {
                Pattern::Unit(_) => out.push((
                    "unit-to-pair-pattern",
                    with(Pattern::Pair(Name::new("a"), Name::new("b"), body()), sc, bc),
                )),
                Pattern::Pair(x, _, _) => {
                    out.push(("pair-to-unit-pattern", with(Pattern::Unit(body()), sc, bc)));
                    out.push(("pair-to-down-pattern", with(Pattern::Down(x.clone(), body()), sc, bc)));
                }
                Pattern::Down(x, _) => {
                    out.push(("down-to-pair-pattern", with(Pattern::Pair(x.clone(), Name::new("b"), body()), sc, bc)))
                }
            }
            out
        }
    }
}

/// Applies one uniformly chosen mutation at a uniformly chosen node.
pub fn mutate(rng: &mut ChaCha8Rng, sig: &Signature, p: &Program) -> Mutation {
    let mut all = Vec::new();
    paths(p, &mut Vec::new(), &mut all);
    let path = all.swap_remove(rng.gen_range(0..all.len()));
    let target = subterm_at(p, &path).expect("path from the program itself");
    let mut vs = variants(sig, target);
    let (kind, replacement) = vs.swap_remove(rng.gen_range(0..vs.len()));
    let program = replace_at(p, &path, replacement).expect("path from the program itself");
    Mutation { path, kind, program }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::default_stdlib;
    use crate::syntax::parse_program;
    use rand::SeedableRng;

    #[test]
    fn every_node_has_variants_that_differ() {
        let sig = default_stdlib();
        let (p, _) = parse_program(
            "fn (f : Up (qubit -o qubit @q)) => circ { lam x => match (#H x, ()) with { (a, b) => (force { f }) a } }",
        )
        .unwrap();
        let mut all = Vec::new();
        paths(&p, &mut Vec::new(), &mut all);
        for path in all {
            let t = subterm_at(&p, &path).unwrap();
            let vs = variants(&sig, t);
            assert!(!vs.is_empty());
            assert!(vs.iter().all(|(_, v)| v != t), "{t}");
        }
    }

    #[test]
    fn mutation_changes_one_node() {
        let sig = default_stdlib();
        let (p, _) = parse_program("susp ((), ())").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = mutate(&mut rng, &sig, &p);
            assert_ne!(m.program, p);
            assert_eq!(replace_at(&m.program, &m.path, subterm_at(&p, &m.path).unwrap().clone()).unwrap(), p);
        }
    }
}
