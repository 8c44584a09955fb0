//! Printed outputs pinned to files under `tests/golden`. Run with
//! `UPDATE_GOLDEN=1` to rewrite them after an intended change.

use std::path::PathBuf;

use pqa_core::circuit::{extract_diagram, render_ascii, render_dot};
use pqa_core::dynamics::{normalize, NeutralContext, TypedNeutralContext};
use pqa_core::encoding::{circuit_e, compose_boxes, default_stdlib, mk_apply, mk_box, mk_lax, mk_oplax, SimplePQ};
use pqa_core::statics::{check_pqa, TypingContext};
use pqa_core::syntax::{parse_program, Color, Program, Type};

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, want, "golden {name} differs");
}

fn forced_circuit_e() -> (Program, Type) {
    let pi = NeutralContext::new();
    let boxed = normalize(&pi, &circuit_e(), 100_000).terminal.program().clone();
    let v = normalize(&pi, &Program::force(boxed, Color::Circuit), 100_000).terminal.program().clone();
    let Ok(Type::Up(t)) = check_pqa(&default_stdlib(), &TypingContext::new(), &circuit_e()).verdict else { panic!() };
    (v, (*t).clone())
}

#[test]
fn composite_normal_form() {
    let app = |f, a| Program::app(f, a, Color::Functional);
    let m = app(app(compose_boxes(), Program::circ(Program::gate("Z"))), Program::circ(Program::gate("H")));
    let t = normalize(&NeutralContext::new(), &Program::force(m, Color::Circuit), 1000);
    golden("composite.txt", &format!("{}\n", t.terminal.program()));
}

#[test]
fn two_swap_trace() {
    let (p, _) =
        parse_program("match (match #CNOT (x1, x2) with { (u, v) => (v, u) }) with { (y, z) => (z, y) }").unwrap();
    let t = normalize(&NeutralContext::of(&["x1", "x2"]), &p, 100);
    let mut out = String::new();
    for s in &t.steps {
        out += &format!("{}: {}\n", s.rule, s.program);
    }
    golden("two_swap.txt", &out);
}

#[test]
fn circuit_e_outputs() {
    let (v, ty) = forced_circuit_e();
    let d = extract_diagram(&default_stdlib(), &TypedNeutralContext::new(), &v, &ty).unwrap();
    golden("circuit_e.txt", &format!("{v}\n"));
    golden("circuit_e.ascii", &render_ascii(&d));
    golden("circuit_e.dot", &render_dot(&d));
}

#[test]
fn combinator_types() {
    let sig = default_stdlib();
    let ctx = TypingContext::new();
    let q = SimplePQ::Q;
    let qi = SimplePQ::tensor(SimplePQ::Q, SimplePQ::I);
    let mut out = String::new();
    for (s, u) in [(&q, &q), (&qi, &q)] {
        for (name, p) in
            [("lax", mk_lax(s, u)), ("oplax", mk_oplax(s, u)), ("box", mk_box(s, u)), ("apply", mk_apply(s, u))]
        {
            out += &format!("{name}[{s}, {u}] : {}\n", check_pqa(&sig, &ctx, &p).verdict.unwrap());
        }
    }
    golden("combinator_types.txt", &out);
}
