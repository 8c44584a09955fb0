use super::*;
use crate::syntax::{parse_program, parse_signature, parse_type};

fn sig() -> Signature {
    parse_signature("gate H : qubit -o qubit\ngate CNOT : qubit * qubit -o qubit * qubit").unwrap()
}

fn prog(s: &str) -> Program {
    parse_program(s).unwrap().0
}

fn ty(s: &str) -> Type {
    parse_type(s).unwrap()
}

fn kind(r: &CheckReport) -> &TypeErrorKind {
    &r.verdict.as_ref().unwrap_err().kind
}

#[test]
fn unit_synthesizes_at_l() {
    let r = check_pqa(&sig(), &TypingContext::new(), &prog("()"));
    assert_eq!(r.verdict, Ok(ty("unit@l")));
    let r = check_pqa_against(&sig(), &TypingContext::new(), &prog("()"), &ty("unit@u"));
    assert!(r.is_ok());
}

#[test]
fn duplication_is_linear_error_only() {
    let dup = prog("fn (x : Up qubit) => (x, x)");
    let r = check_pqa(&sig(), &TypingContext::new(), &dup);
    assert!(matches!(kind(&r), TypeErrorKind::UsedTwice(x) if x.as_str() == "x"));
    let r = check_pqx(&sig(), &TypingContext::new(), &dup);
    assert_eq!(r.verdict, Ok(ty("Up qubit -o (Up qubit * Up qubit @l) @l")));
}

#[test]
fn unused_linear_binder() {
    let p = prog("fn (x : Up qubit) => ()");
    let r = check_pqa(&sig(), &TypingContext::new(), &p);
    assert!(matches!(kind(&r), TypeErrorKind::UnusedLinear(_)));
    assert!(check_pqx(&sig(), &TypingContext::new(), &p).is_ok());
    let unrestricted = prog("fn (x : unit@u) => ()");
    assert!(check_pqa(&sig(), &TypingContext::new(), &unrestricted).is_ok());
}

#[test]
fn contexts_must_be_consumed() {
    let ctx = TypingContext::new().with("x", Type::Qubit).with("y", Type::Qubit);
    let r = check_pqa(&sig(), &ctx, &Program::cvar("x"));
    assert!(matches!(kind(&r), TypeErrorKind::UnusedLinear(y) if y.as_str() == "y"));
    let circ = Program::pair(Program::cvar("x"), Program::cvar("y"), Color::Circuit);
    let r = check_pqa(&sig(), &ctx, &circ);
    assert_eq!(r.verdict, Ok(ty("qubit * qubit @q")));
    assert_eq!(r.consumed.len(), 2);
}

#[test]
fn pattern_on_circuit_pair() {
    let pat = Pattern::Pair(
        Name::new("x"),
        Name::new("y"),
        Box::new(Program::pair(
            Program::circ(Program::cvar("x")),
            Program::circ(Program::cvar("y")),
            Color::Functional,
        )),
    );
    let r = check_pattern_pqa(&sig(), &TypingContext::new(), &pat, PatternFamily::QF, &ty("qubit * qubit @q"));
    assert_eq!(r.verdict, Ok(ty("Up qubit * Up qubit @l")));
}

#[test]
fn down_pattern() {
    let pat = Pattern::Down(Name::new("x"), Box::new(Program::fvar("x")));
    let r = check_pattern(
        System::Pqa,
        &sig(),
        &TypingContext::new(),
        &pat,
        PatternFamily::FF,
        &ty("Down unit@u"),
        Some(&ty("unit@u")),
    );
    // a down pattern produces a mode-l context, so a mode-u result is rejected
    assert!(matches!(kind(&r), TypeErrorKind::PatternMode { .. }));
    let r = check_pattern_pqa(&sig(), &TypingContext::new(), &pat, PatternFamily::FF, &ty("Down Up (Up qubit)"));
    assert!(r.verdict.is_err());
    let body = Pattern::Down(Name::new("x"), Box::new(Program::force(Program::fvar("x"), Color::Functional)));
    let r = check_pattern_pqa(&sig(), &TypingContext::new(), &body, PatternFamily::FF, &ty("Down Up (Up qubit)"));
    assert_eq!(r.verdict, Ok(ty("Up qubit")));
}

#[test]
fn independence_in_unit_pattern() {
    let ctx = TypingContext::new().with("y", ty("Up qubit"));
    let pat = Pattern::Unit(Box::new(Program::susp(Program::fvar("y"))));
    let r = check_pattern_pqa(&sig(), &ctx, &pat, PatternFamily::FF, &ty("unit@u"));
    assert!(matches!(kind(&r), TypeErrorKind::Independence(_)));
}

#[test]
fn suspension_independence() {
    let p = prog("fn (y : Up qubit) => down (susp y)");
    let r = check_pqa(&sig(), &TypingContext::new(), &p);
    assert!(matches!(kind(&r), TypeErrorKind::Independence(_)), "{:?}", r);
    assert!(check_pqx(&sig(), &TypingContext::new(), &p).is_ok());
}

#[test]
fn gates() {
    let r = check_pqx(&sig(), &TypingContext::new(), &prog("#H"));
    assert_eq!(r.verdict, Ok(ty("qubit -o qubit @q")));
    let r = check_pqa(&sig(), &TypingContext::new(), &prog("#NOPE"));
    assert!(matches!(kind(&r), TypeErrorKind::UnknownGate(_)));
    let p = prog("lam (x : qubit * qubit @q) => #CNOT x");
    assert_eq!(
        check_pqa(&sig(), &TypingContext::new(), &p).verdict,
        Ok(ty("(qubit * qubit @q) -o (qubit * qubit @q) @q"))
    );
}

#[test]
fn circuit_variables_are_simple() {
    let p = Program::lam("x", Some(ty("qubit -o qubit")), Program::cvar("x"), Color::Circuit);
    let r = check_pqx(&sig(), &TypingContext::new(), &p);
    assert!(matches!(kind(&r), TypeErrorKind::NonSimpleCircuitVar { .. } | TypeErrorKind::ColorMode(_)));
}

#[test]
fn composed_boxes() {
    let m = prog(
        "fn (g : Up (qubit -o qubit @q)) => fn (f : Up (qubit -o qubit @q)) => \
         circ { lam (x : qubit) => force { g } (force { f } x) }",
    );
    let r = check_pqa(&sig(), &TypingContext::new(), &m);
    assert_eq!(r.verdict, Ok(ty("Up (qubit -o qubit @q) -o (Up (qubit -o qubit @q) -o Up (qubit -o qubit @q) @l) @l")));
}

#[test]
fn flexible_scrutinee_reads_at_u() {
    // `()` scrutinee must be read at mode u for a mode-u body.
    let p = prog("match () with { () => down () }");
    let r = check_pqa_against(&sig(), &TypingContext::new(), &p, &ty("Down unit@u"));
    assert!(r.is_ok(), "{:?}", r);
    let p = prog("match ((), ()) with { (a, b) => (a, b) }");
    assert!(check_pqa_against(&sig(), &TypingContext::new(), &p, &ty("unit@l * unit@l @l")).is_ok());
    assert!(check_pqa_against(&sig(), &TypingContext::new(), &p, &ty("unit@u * unit@u @u")).is_ok());
}

#[test]
fn error_paths_point_at_subterms() {
    let (p, spans) = parse_program("fn (x : Up qubit) =>\n  (x, x)").unwrap();
    let r = check_pqa(&sig(), &TypingContext::new(), &p);
    let err = r.verdict.unwrap_err();
    let span = spans.locate(&err.path);
    assert_eq!((span.line, span.col), (2, 7));
}

#[test]
fn checking_is_deterministic() {
    let p = prog("fn (x : Up qubit) => (x, x)");
    let a = check_pqa(&sig(), &TypingContext::new(), &p);
    let b = check_pqa(&sig(), &TypingContext::new(), &p);
    assert_eq!(a, b);
}
