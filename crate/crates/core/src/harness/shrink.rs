//! Path addressing and greedy shrinking of generated counterexamples.
//!
//! A counterexample shrinks by replacing one generator hole with a smallest
//! derivation of the same judgment, outermost holes first, keeping the
//! replacement whenever the property still fails.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gen::{Generator, Hole, Prover};
use crate::syntax::{Name, Program, Signature};

pub fn subterm_at<'p>(p: &'p Program, path: &[u8]) -> Option<&'p Program> {
    let Some((&i, rest)) = path.split_first() else { return Some(p) };
    let child = match (p, i) {
        (Program::Lam { body, .. }, 0) => body,
        (Program::Pair(a, _, _) | Program::App(a, _, _), 0) => a,
        (Program::Pair(_, b, _) | Program::App(_, b, _), 1) => b,
        (Program::SuspTerm(m) | Program::SuspCirc(m) | Program::DownIntro(m) | Program::Force(m, _), 0) => m,
        (Program::Match { scrutinee, .. }, 0) => scrutinee,
        (Program::Match { pattern, .. }, 1) => pattern.body(),
        _ => return None,
    };
    subterm_at(child, rest)
}

pub fn replace_at(p: &Program, path: &[u8], new: Program) -> Option<Program> {
    let Some((&i, rest)) = path.split_first() else { return Some(new) };
    let go = |c: &Program| replace_at(c, rest, new).map(Box::new);
    Some(match (p, i) {
        (Program::Lam { binder, annot, body, color }, 0) => {
            Program::Lam { binder: binder.clone(), annot: annot.clone(), body: go(body)?, color: *color }
        }
        (Program::Pair(a, b, c), 0) => Program::Pair(go(a)?, b.clone(), *c),
        (Program::Pair(a, b, c), 1) => Program::Pair(a.clone(), go(b)?, *c),
        (Program::App(a, b, c), 0) => Program::App(go(a)?, b.clone(), *c),
        (Program::App(a, b, c), 1) => Program::App(a.clone(), go(b)?, *c),
        (Program::SuspTerm(m), 0) => Program::SuspTerm(go(m)?),
        (Program::SuspCirc(m), 0) => Program::SuspCirc(go(m)?),
        (Program::DownIntro(m), 0) => Program::DownIntro(go(m)?),
        (Program::Force(m, c), 0) => Program::Force(go(m)?, *c),
        (Program::Match { scrutinee, pattern, scrutinee_color, body_color }, 0) => Program::Match {
            scrutinee: go(scrutinee)?,
            pattern: pattern.clone(),
            scrutinee_color: *scrutinee_color,
            body_color: *body_color,
        },
        (Program::Match { scrutinee, pattern, scrutinee_color, body_color }, 1) => Program::Match {
            scrutinee: scrutinee.clone(),
            pattern: pattern.with_body(*go(pattern.body())?),
            scrutinee_color: *scrutinee_color,
            body_color: *body_color,
        },
        _ => return None,
    })
}

/// Smallest program for a hole's judgment, at the least depth that admits one.
fn minimal_for(sig: &Signature, prover: &mut Prover, hole: &Hole, taken: &[Name]) -> Option<Program> {
    let rng = ChaCha8Rng::seed_from_u64(0);
    let mut g = Generator::new(sig, prover, rng, taken.to_vec()).minimal();
    let depth = (1..=hole.depth).find(|&d| g.provable_goal(&hole.goal, &hole.linear, &hole.unrestricted, d))?;
    g.generate(&hole.goal, &hole.linear, &hole.unrestricted, depth, hole.synth).ok()
}

/// Greedy shrink. `fails` must hold of `program`; returns the smallest
/// failing program found and the number of accepted replacements.
pub fn shrink(
    sig: &Signature,
    prover: &mut Prover,
    program: &Program,
    holes: &[Hole],
    taken: &[Name],
    mut fails: impl FnMut(&Program) -> bool,
) -> (Program, u64) {
    let mut current = program.clone();
    let mut accepted = 0;
    let mut order: Vec<&Hole> = holes.iter().collect();
    order.sort_by_key(|h| h.path.len());
    let mut replaced: Vec<&[u8]> = Vec::new();
    for hole in order {
        // holes inside a replaced subtree no longer exist
        if replaced.iter().any(|r| hole.path.starts_with(r)) {
            continue;
        }
        let Some(old) = subterm_at(&current, &hole.path) else { continue };
        let mut names = taken.to_vec();
        names.extend(crate::dynamics::bound_names(&current));
        let Some(small) = minimal_for(sig, prover, hole, &names) else { continue };
        if small.size() >= old.size() {
            continue;
        }
        let Some(candidate) = replace_at(&current, &hole.path, small) else { continue };
        if fails(&candidate) {
            current = candidate;
            accepted += 1;
            replaced.push(&hole.path);
        }
    }
    (current, accepted)
}
