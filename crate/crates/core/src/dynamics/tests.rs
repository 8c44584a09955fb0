use std::collections::BTreeSet;

use super::*;
use crate::syntax::{alpha_eq, parse_program};

fn prog(s: &str) -> Program {
    parse_program(s).unwrap().0
}

/// Parses `s` as a circuit by wrapping it in a suspension.
fn circ(s: &str) -> Program {
    match prog(&format!("circ {{ {s} }}")) {
        Program::SuspCirc(c) => *c,
        _ => unreachable!(),
    }
}

fn run(pi: &NeutralContext, p: Program) -> StepTrace {
    let trace = normalize(pi, &p, 1000);
    let mut before = p;
    for st in &trace.steps {
        audit_step(pi, &before).unwrap();
        before = st.program.clone();
    }
    audit_step(pi, &before).unwrap();
    trace
}

fn rules(t: &StepTrace) -> Vec<&'static str> {
    t.steps.iter().map(|s| s.rule.name()).collect()
}

#[test]
fn classification() {
    let pi = NeutralContext::of(&["x", "y"]);
    let c = |p: Program| classify(&pi, &p).unwrap();
    assert_eq!(c(prog("()")), FormClass::Canonical);
    assert_eq!(c(prog("fn x => x")), FormClass::Canonical);
    assert_eq!(c(prog("circ { (lam z => z) x }")), FormClass::Canonical);
    assert_eq!(c(prog("(fn x => x) ()")), FormClass::Reducible);
    assert_eq!(c(circ("#H x")), FormClass::Neutral);
    assert_eq!(c(circ("x")), FormClass::Neutral);
    assert_eq!(c(circ("#H (lam z => z)")), FormClass::Neutral);
    assert_eq!(c(circ("lam z => #H z")), FormClass::Canonical);
    assert_eq!(c(circ("lam z => (lam w => w) z")), FormClass::Reducible);
    assert_eq!(c(circ("(lam z => z) x")), FormClass::Reducible);
    assert_eq!(c(circ("match #CNOT (x, y) with { (a, b) => (b, a) }")), FormClass::NormalMatch);
    assert_eq!(c(circ("match (x, y) with { (a, b) => (b, a) }")), FormClass::Reducible);
}

#[test]
fn scope_errors() {
    let pi = NeutralContext::new();
    assert_eq!(classify(&pi, &Program::fvar("f")), Err(DynError::FreeFunctionalVar(Name::new("f"))));
    assert_eq!(classify(&pi, &Program::cvar("q")), Err(DynError::UnboundCircuitVar(Name::new("q"))));
    assert!(matches!(step(&pi, &Program::fvar("f")), StepOutcome::Stuck(_)));
}

#[test]
fn beta_and_force() {
    let t = run(&NeutralContext::new(), prog("force (susp ((fn x => x) ()))"));
    assert!(t.terminal.is_normal());
    assert_eq!(rules(&t), ["fstep/force", "fstep/app/beta"]);
    assert_eq!(t.terminal.program(), &prog("()"));
}

#[test]
fn duplication_normalizes() {
    let t = run(&NeutralContext::new(), prog("(fn x => (x, x)) (circ { () })"));
    assert!(t.terminal.is_normal());
    assert_eq!(t.terminal.program(), &prog("(circ { () }, circ { () })"));
}

#[test]
fn canonical_elimination() {
    let pair = prog("((), circ { () })");
    let pat = Pattern::Pair(Name::new("a"), Name::new("b"), Box::new(prog("(b, a)")));
    assert_eq!(eliminate_canonical(&pair, &pat).unwrap(), prog("(circ { () }, ())"));
    let unit_pat = Pattern::Unit(Box::new(prog("()")));
    assert!(matches!(eliminate_canonical(&pair, &unit_pat), Err(DynError::ShapeMismatch { .. })));
}

#[test]
fn reduces_under_circuit_binders() {
    let t = run(&NeutralContext::new(), circ("lam x => (lam y => #H y) x"));
    assert!(t.terminal.is_normal());
    assert_eq!(rules(&t), ["cstep/app/beta"]);
    assert_eq!(t.steps[0].root, Rule::CLam);
    assert_eq!(t.terminal.program(), &circ("lam x => #H x"));
}

#[test]
fn force_circuit_and_match_body() {
    let pi = NeutralContext::of(&["x", "y"]);
    let t = run(&pi, circ("match #CNOT (x, y) with { (a, b) => (force { circ { #H } } a, b) }"));
    assert!(t.terminal.is_normal(), "{:?}", t.terminal);
    assert_eq!(rules(&t), ["cstep/force"]);
    assert_eq!(t.steps[0].root, Rule::CMatchBody);
    assert!(alpha_eq(t.terminal.program(), &circ("match #CNOT (x, y) with { (a, b) => (#H a, b) }")));
}

#[test]
fn commuting_conversions() {
    let pi = NeutralContext::of(&["x"]);
    let t = run(&pi, circ("#H (match #H x with { () => x })"));
    assert_eq!(rules(&t), ["cstep/app/cc/2"]);
    assert_eq!(t.terminal.program(), &circ("match #H x with { () => #H x }"));

    let t = run(&pi, circ("force { match circval #H x with { () => circ { #H } } } x"));
    assert!(t.terminal.is_normal(), "{:?}", t.terminal);
    assert_eq!(rules(&t), ["cstep/force/cc", "cstep/force", "cstep/app/cc/1"]);
    assert_eq!(t.terminal.program(), &circ("match #H x with { () => #H x }"));

    let t = run(&pi, prog("match (match circval #H x with { () => ((), ()) }) with { (a, b) => b }"));
    assert_eq!(rules(&t), ["fstep/m/f/cc", "fstep/m/k"]);
    assert_eq!(t.terminal.program(), &prog("match circval #H x with { () => () }"));
}

#[test]
fn commuting_renames_capturing_binders() {
    let pi = NeutralContext::of(&["x", "b"]);
    let src = circ("(match #CNOT (x, x) with { (a, b) => lam z => (a, z) }) b");
    let t = run(&pi, src);
    assert!(t.terminal.is_normal(), "{:?}", t.terminal);
    let out = t.terminal.program();
    assert!(alpha_eq(out, &circ("match #CNOT (x, x) with { (a, c) => (a, b) }")), "{out}");
    assert!(out.to_string().contains('%'));
}

#[test]
fn binder_clashing_with_neutral_context_is_renamed() {
    let pi = NeutralContext::of(&["x"]);
    let t = run(&pi, circ("lam x => (lam y => y) x"));
    assert_eq!(t.terminal.program(), &circ("lam %1 => %1"));
}

#[test]
fn stuck_terms() {
    let pi = NeutralContext::new();
    let t = normalize(&pi, &prog("force ()"), 10);
    assert!(matches!(t.terminal, Terminal::Stuck { .. }));
    let t = normalize(&pi, &prog("match () with { (a, b) => a }"), 10);
    assert!(matches!(t.terminal, Terminal::Stuck { .. }));
    assert_eq!(applicable_rules(&pi, &prog("force ()")).unwrap(), vec![]);
}

#[test]
fn fuel_runs_out() {
    let omega = prog("(fn x => (force x) x) (susp (fn x => (force x) x))");
    let t = normalize(&NeutralContext::new(), &omega, 50);
    assert!(matches!(t.terminal, Terminal::FuelExhausted(_)), "{:?}", t.terminal);
    assert_eq!(t.steps.len(), 50);
}

#[test]
fn neutral_substitution() {
    let pi = NeutralContext::of(&["y"]);
    let sigma = vec![(Name::new("x"), circ("#H y"))];
    let body = circ("lam y => (x, y)");
    let out = apply_neutral_subst(&pi, &sigma, &body).unwrap();
    assert!(alpha_eq(&out, &circ("lam z => (#H y, z)")));
    let bad = vec![(Name::new("x"), circ("lam z => z"))];
    assert!(matches!(apply_neutral_subst(&pi, &bad, &body), Err(DynError::NonNeutralImage(_))));
}

#[test]
fn rule_names_are_distinct() {
    let names: BTreeSet<_> = Rule::ALL.iter().map(|r| r.name()).collect();
    assert_eq!(names.len(), Rule::ALL.len());
}
