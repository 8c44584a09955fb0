use super::*;
use crate::syntax::parse_program;

fn qubit_ctx(names: &[&str]) -> TypingContext {
    names.iter().fold(TypingContext::new(), |c, x| c.with(x, Type::Qubit))
}

#[test]
fn depth_one_unit_is_unit() {
    let cfg = GenConfig { max_depth: 1, ..GenConfig::default() };
    let p = gen_well_typed(&cfg, &Type::Unit(Mode::L), &TypingContext::new()).unwrap();
    assert_eq!(p.to_string(), "()");
}

#[test]
fn depth_one_qubit_is_the_variable() {
    let cfg = GenConfig { max_depth: 1, ..GenConfig::default() };
    let p = gen_well_typed(&cfg, &Type::Qubit, &qubit_ctx(&["x"])).unwrap();
    assert_eq!(p.to_string(), "x");
}

#[test]
fn qubit_from_nothing_is_unsatisfiable() {
    let err = gen_well_typed(&GenConfig::default(), &Type::Qubit, &TypingContext::new()).unwrap_err();
    assert!(matches!(err, GenError::Unsatisfiable(_)));
}

#[test]
fn bad_configs_are_rejected() {
    let cfg = GenConfig { max_depth: 0, ..GenConfig::default() };
    assert!(matches!(cfg.validate(), Err(GenError::Config(_))));
    let cfg = GenConfig { mode_bias: [1.0, -1.0, 0.0], ..GenConfig::default() };
    assert!(matches!(run_suite(&cfg, 1), Err(GenError::Config(_))));
}

#[test]
fn oracle_on_duplicated_and_split_variables() {
    let sig = default_stdlib();
    let ctx = qubit_ctx(&["x", "y"]);
    let pair = Type::tensor(Type::Qubit, Type::Qubit, Mode::Q);
    let circ = |s: &str| match parse_program(&format!("circ {{ {s} }}")).unwrap().0 {
        Program::SuspCirc(c) => *c,
        _ => unreachable!(),
    };
    let xx = circ("(x, x)");
    let one = qubit_ctx(&["x"]);
    assert!(!brute_force_split_check(&sig, &one, &xx, &pair).unwrap());
    assert!(!check_pqa_against(&sig, &one, &xx, &pair).is_ok());
    let xy = circ("(x, y)");
    assert!(brute_force_split_check(&sig, &ctx, &xy, &pair).unwrap());
    assert!(check_pqa_against(&sig, &ctx, &xy, &pair).is_ok());
    // y unused
    assert!(!brute_force_split_check(
        &sig,
        &ctx,
        &circ("(x, ())"),
        &Type::tensor(Type::Qubit, Type::Unit(Mode::Q), Mode::Q)
    )
    .unwrap());
}

#[test]
fn oracle_refuses_large_contexts() {
    let names: Vec<String> = (0..13).map(|i| format!("q{i}")).collect();
    let ctx = qubit_ctx(&names.iter().map(String::as_str).collect::<Vec<_>>());
    let err = brute_force_split_check(&default_stdlib(), &ctx, &Program::Unit(Color::Circuit), &Type::Unit(Mode::Q));
    assert_eq!(err, Err(OracleError::TooManyLinear(13)));
}

#[test]
fn generated_programs_check() {
    let cfg = GenConfig::default();
    let mut prover = Prover::new();
    for i in 0..200 {
        let inst = sample(&cfg, &mut prover, Key::new(0, i), cfg.max_depth, false).unwrap();
        let r = check_pqa_against(&cfg.gate_pool, &inst.psi.ctp(), &inst.program, &inst.goal);
        assert!(r.is_ok(), "{} : {} in [{}]: {:?}", inst.program, inst.goal, psi_text(&inst.psi), r.verdict);
    }
}

#[test]
fn one_term_attempts_every_property() {
    let report = run_suite(&GenConfig::default(), 1).unwrap();
    for p in Property::TYPED.iter().chain([&Property::NeutralSubstitution]) {
        let r = report.property(*p).unwrap_or_else(|| panic!("{} missing", p.key()));
        assert!(r.attempted >= 1, "{}", p.key());
    }
}

#[test]
fn reports_are_deterministic_and_clean() {
    let cfg = GenConfig { seed: 7, ..GenConfig::default() };
    let a = run_suite(&cfg, 40).unwrap();
    let b = run_suite(&cfg, 40).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.failures(), 0, "{}", serde_json::to_string_pretty(&a).unwrap());
}

#[test]
fn merge_is_order_independent() {
    let cfg = GenConfig::default();
    let parts: Vec<SuiteReport> = (0..6)
        .map(|i| {
            let mut prover = Prover::new();
            typed_instance(&cfg, &mut prover, i)
        })
        .collect();
    let fwd = parts.iter().cloned().fold(SuiteReport::empty(&cfg), SuiteReport::merge);
    let rev = parts.iter().rev().cloned().fold(SuiteReport::empty(&cfg), SuiteReport::merge);
    assert_eq!(fwd, rev);
}

#[test]
fn shrinking_keeps_the_failure_and_the_type() {
    // a property that fails whenever the program mentions a gate
    let cfg = GenConfig::default();
    let mut prover = Prover::new();
    let has_gate = |p: &Program| p.to_string().contains('#');
    let inst = (0..200)
        .map(|i| sample(&cfg, &mut prover, Key::new(9, i), cfg.max_depth, true).unwrap())
        .find(|i| has_gate(&i.program) && i.program.size() > 12)
        .expect("some sample uses a gate");
    let taken: Vec<Name> = inst.psi.entries().iter().map(|(x, _)| x.clone()).collect();
    let (small, steps) = shrink(&cfg.gate_pool, &mut prover, &inst.program, &inst.holes, &taken, has_gate);
    assert!(has_gate(&small));
    assert!(small.size() <= inst.program.size());
    assert!(check_pqa_against(&cfg.gate_pool, &inst.psi.ctp(), &small, &inst.goal).is_ok());
    if small != inst.program {
        assert!(steps > 0);
    }
}

#[test]
fn mutants_and_oracle_small_runs() {
    let cfg = GenConfig::default();
    let m = run_mutation_robustness(&cfg, 60).unwrap();
    assert_eq!(m.failures(), 0, "{:#?}", m.property(Property::MutationRobustness));
    let o = run_oracle_agreement(&cfg, 60).unwrap();
    assert_eq!(o.failures(), 0, "{:#?}", o.property(Property::OracleAgreement));
}
