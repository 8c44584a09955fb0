//! Random well-typed programs and the metatheory property suites.
//!
//! Every generated instance is addressed by `(seed, stream, index)`, so any
//! counterexample can be regenerated on its own. Streams: typed suite 0,
//! neutral substitution 1, oracle agreement 2, mutation robustness 3.

mod gen;
mod mutate;
mod oracle;
mod shrink;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use gen::{random_simple, random_type, Binding, GenError, Generator, Hole, Prover};
pub use mutate::{mutate, variants, Mutation};
pub use oracle::{brute_force_split_check, linear_binding_count, OracleError, MAX_LINEAR};
pub use shrink::{replace_at, shrink, subterm_at};

use crate::circuit::check_normal_grammar;
use crate::dynamics::{
    apply_neutral_subst, audit_step, classify, classify_unchecked, normalize, normalize_with, step, FormClass,
    NeutralContext, StepOutcome, Terminal, TypedNeutralContext, DEFAULT_FUEL,
};
use crate::encoding::default_stdlib;
use crate::statics::{check_pqa, check_pqa_against, check_pqx_against, TypingContext};
use crate::syntax::{alpha_eq, Color, Mode, Name, Program, Signature, SimpleType, Type};

/// Fuel for ill-typed mutants, which need not terminate.
pub const MUTANT_FUEL: u64 = 10_000;
/// Counterexamples kept per property.
pub const MAX_COUNTEREXAMPLES: usize = 5;
const GOAL_ATTEMPTS: u32 = 20;
const PROVER_MEMO_LIMIT: usize = 1 << 21;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub seed: u64,
    pub max_depth: u32,
    /// Relative weights of goal modes U, L and Q.
    pub mode_bias: [f64; 3],
    pub gate_pool: Signature,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 0, max_depth: 8, mode_bias: [1.0, 2.0, 2.0], gate_pool: default_stdlib() }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.max_depth == 0 {
            return Err(GenError::Config("max_depth must be at least 1".into()));
        }
        if self.mode_bias.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(GenError::Config("mode weights must be finite and nonnegative".into()));
        }
        if self.mode_bias.iter().sum::<f64>() <= 0.0 {
            return Err(GenError::Config("at least one mode weight must be positive".into()));
        }
        Ok(())
    }
}

/// Where an instance comes from. Regenerating from the same key and
/// configuration yields the same instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Key {
    pub stream: u64,
    pub index: u64,
    pub salt: u64,
}

impl Key {
    pub fn new(stream: u64, index: u64) -> Self {
        Key { stream, index, salt: 0 }
    }

    pub fn rng(&self, seed: u64) -> ChaCha8Rng {
        let mut bytes = [0u8; 32];
        for (i, w) in [seed, self.stream, self.index, self.salt].into_iter().enumerate() {
            bytes[i * 8..i * 8 + 8].copy_from_slice(&w.to_le_bytes());
        }
        ChaCha8Rng::from_seed(bytes)
    }
}

/// A generated closed-under-Ψ program with its goal.
#[derive(Clone, Debug)]
pub struct Instance {
    pub key: Key,
    pub psi: TypedNeutralContext,
    pub goal: Type,
    pub program: Program,
    pub holes: Vec<Hole>,
    pub goal_attempts: u32,
}

fn bindings<'a>(entries: impl Iterator<Item = &'a (Name, Type)>) -> Vec<Binding> {
    entries.map(|(x, t)| Binding::new(x.clone(), t.clone())).collect()
}

fn qubits(t: &Type) -> usize {
    match t {
        Type::Qubit => 1,
        Type::Tensor(a, b, _) => qubits(a) + qubits(b),
        _ => 0,
    }
}

/// A random bracketing of `n` qubits.
fn bracket(rng: &mut ChaCha8Rng, n: usize) -> Type {
    match n {
        0 => Type::Unit(Mode::Q),
        1 => Type::Qubit,
        _ => {
            let k = rng.gen_range(1..n);
            Type::tensor(bracket(rng, k), bracket(rng, n - k), Mode::Q)
        }
    }
}

fn pick_mode(rng: &mut ChaCha8Rng, bias: &[f64; 3]) -> Mode {
    let mut u = rng.gen_range(0.0..bias.iter().sum::<f64>());
    for (m, w) in [Mode::U, Mode::L, Mode::Q].into_iter().zip(bias) {
        if u < *w {
            return m;
        }
        u -= w;
    }
    Mode::Q
}

fn sample_psi(rng: &mut ChaCha8Rng, mode: Mode, nonempty: bool) -> TypedNeutralContext {
    let mut psi = TypedNeutralContext::new();
    if mode == Mode::U {
        return psi;
    }
    let n = if nonempty { rng.gen_range(1..=3) } else { rng.gen_range(0..=3) };
    for i in 0..n {
        let s = match rng.gen_range(0..20) {
            0..=13 => SimpleType::qubit(),
            14..=16 => SimpleType::tensor(SimpleType::qubit(), SimpleType::qubit()),
            _ => SimpleType::unit(),
        };
        psi.push(Name::new(&format!("x{i}")), s);
    }
    psi
}

/// Goals that can absorb every circuit variable in Ψ.
fn sample_goal(rng: &mut ChaCha8Rng, mode: Mode, psi: &TypedNeutralContext) -> Type {
    if psi.is_empty() {
        return random_type(rng, mode, 2);
    }
    let n: usize = psi.entries().iter().map(|(_, s)| qubits(s.as_type())).sum();
    match mode {
        Mode::Q => match rng.gen_range(0..4) {
            0 => {
                let k = rng.gen_range(1..=2);
                Type::arrow(bracket(rng, k), bracket(rng, n + k), Mode::Q)
            }
            _ => bracket(rng, n),
        },
        _ => match rng.gen_range(0..5) {
            2 if n >= 2 => {
                let k = rng.gen_range(1..n);
                Type::tensor(Type::up(bracket(rng, k)), Type::up(bracket(rng, n - k)), Mode::L)
            }
            3 => {
                let k = rng.gen_range(1..=2);
                Type::arrow(Type::up(bracket(rng, k)), Type::up(bracket(rng, n + k)), Mode::L)
            }
            4 => random_type(rng, Mode::L, 2),
            _ => Type::up(bracket(rng, n)),
        },
    }
}

/// Samples Ψ, a goal, and a program, retrying goals the prover rejects.
pub fn sample(
    cfg: &GenConfig,
    prover: &mut Prover,
    key: Key,
    depth: u32,
    nonempty_psi: bool,
) -> Result<Instance, GenError> {
    let sig = &cfg.gate_pool;
    let mut rng = key.rng(cfg.seed);
    let mut chosen = None;
    let mut last_psi = TypedNeutralContext::new();
    let mut attempts = 0;
    while attempts < GOAL_ATTEMPTS {
        attempts += 1;
        let mut mode = pick_mode(&mut rng, &cfg.mode_bias);
        if nonempty_psi && mode == Mode::U {
            mode = Mode::Q;
        }
        let psi = sample_psi(&mut rng, mode, nonempty_psi);
        let goal = sample_goal(&mut rng, mode, &psi);
        let linear: Vec<Type> = psi.entries().iter().map(|(_, s)| s.as_type().clone()).collect();
        if prover.can(sig, &goal, &linear, &[], depth) {
            chosen = Some((psi, goal));
            break;
        }
        last_psi = psi;
    }
    let (psi, goal) = match chosen {
        Some(c) => c,
        None => {
            let n = last_psi.entries().iter().map(|(_, s)| qubits(s.as_type())).sum();
            let goal = if last_psi.is_empty() { Type::Unit(Mode::L) } else { bracket(&mut rng, n) };
            (last_psi, goal)
        }
    };
    let ctx = psi.ctp();
    let linear = bindings(ctx.linear());
    let taken: Vec<Name> = ctx.entries().iter().map(|(x, _)| x.clone()).collect();
    let mut g = Generator::new(sig, prover, rng, taken);
    if !g.provable_goal(&goal, &linear, &[], depth) {
        return Err(GenError::Unsatisfiable(goal.to_string()));
    }
    let program = g.generate(&goal, &linear, &[], depth, false)?;
    Ok(Instance { key, psi, goal, program, holes: g.into_holes(), goal_attempts: attempts })
}

/// A program of type `goal` in `ctx`, accepted by the checker.
pub fn gen_well_typed(cfg: &GenConfig, goal: &Type, ctx: &TypingContext) -> Result<Program, GenError> {
    cfg.validate()?;
    goal.validate().map_err(|e| GenError::Config(format!("goal `{goal}`: {e}")))?;
    let linear = bindings(ctx.linear());
    let unrestricted = bindings(ctx.unrestricted());
    let taken: Vec<Name> = ctx.entries().iter().map(|(x, _)| x.clone()).collect();
    let mut prover = Prover::new();
    let mut last = None;
    for salt in 0..8 {
        let rng = Key { stream: u64::MAX, index: 0, salt }.rng(cfg.seed);
        let mut g = Generator::new(&cfg.gate_pool, &mut prover, rng, taken.clone());
        if !g.provable_goal(goal, &linear, &unrestricted, cfg.max_depth) {
            return Err(GenError::Unsatisfiable(goal.to_string()));
        }
        let p = g.generate(goal, &linear, &unrestricted, cfg.max_depth, false)?;
        match check_pqa_against(&cfg.gate_pool, ctx, &p, goal).verdict {
            Ok(_) => return Ok(p),
            Err(e) => last = Some(format!("`{p}`: {e}")),
        }
    }
    Err(GenError::Rejected(last.unwrap_or_default()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    GeneratorSoundness,
    Independence,
    CheckingDeterminism,
    PqaInPqx,
    SubjectReductionPqa,
    SubjectReductionPqx,
    Determinism,
    Finality,
    Progress,
    Normalization,
    ForceHalts,
    NormalFormGrammar,
    NeutralSubstitution,
    OracleAgreement,
    MutationRobustness,
}

impl Property {
    pub const TYPED: [Property; 12] = [
        Property::GeneratorSoundness,
        Property::Independence,
        Property::CheckingDeterminism,
        Property::PqaInPqx,
        Property::SubjectReductionPqa,
        Property::SubjectReductionPqx,
        Property::Determinism,
        Property::Finality,
        Property::Progress,
        Property::Normalization,
        Property::ForceHalts,
        Property::NormalFormGrammar,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Property::GeneratorSoundness => "generator_soundness",
            Property::Independence => "independence",
            Property::CheckingDeterminism => "checking_determinism",
            Property::PqaInPqx => "pqa_implies_pqx",
            Property::SubjectReductionPqa => "subject_reduction_pqa",
            Property::SubjectReductionPqx => "subject_reduction_pqx",
            Property::Determinism => "determinism",
            Property::Finality => "finality",
            Property::Progress => "progress",
            Property::Normalization => "normalization",
            Property::ForceHalts => "force_halts",
            Property::NormalFormGrammar => "normal_form_grammar",
            Property::NeutralSubstitution => "neutral_substitution",
            Property::OracleAgreement => "oracle_agreement",
            Property::MutationRobustness => "mutation_robustness",
        }
    }

    /// The proposition this property executes.
    pub fn proposition(self) -> &'static str {
        match self {
            Property::GeneratorSoundness => "Generator soundness",
            Property::Independence => "Independence principle",
            Property::CheckingDeterminism => "Determinism of checking",
            Property::PqaInPqx => "Embedding of pqa into pqx",
            Property::SubjectReductionPqa => "Subject reduction",
            Property::SubjectReductionPqx => "Subject reduction for pqx",
            Property::Determinism => "Determinism",
            Property::Finality => "Judgmentally normal terms do not reduce",
            Property::Progress => "Progress",
            Property::Normalization => "Normalization",
            Property::ForceHalts => "If force M halts then M halts",
            Property::NormalFormGrammar => "Well-typed normal forms",
            Property::NeutralSubstitution => "Neutral substitution preserves classification and steps",
            Property::OracleAgreement => "Algorithmic splitting is complete and sound",
            Property::MutationRobustness => "Stepper totality on ill-typed programs",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Property::GeneratorSoundness => "every generated program checks at its goal",
            Property::Independence => "a successful check at mode m has only linear bindings of mode at least m",
            Property::CheckingDeterminism => "repeated checks of the same program agree",
            Property::PqaInPqx => "every pqa typing is also a pqx typing with the same type",
            Property::SubjectReductionPqa => "every program along the trace keeps its pqa type",
            Property::SubjectReductionPqx => "every program along the trace keeps its pqx type",
            Property::Determinism => "exactly one rule applies to each reducible program and step picks it",
            Property::Finality => {
                "a program classified normal does not step, and a program that does not step is classified normal"
            }
            Property::Progress => "typed programs never get stuck",
            Property::Normalization => "typed programs reach a normal form within the default fuel",
            Property::ForceHalts => "when force M normalizes, M normalizes",
            Property::NormalFormGrammar => "every typed normal form is generated by the grammar for its type",
            Property::NeutralSubstitution => {
                "substituting neutral terms for circuit variables commutes with classification and with each step"
            }
            Property::OracleAgreement => "the leftover checker and the split-enumerating checker give the same verdict",
            Property::MutationRobustness => {
                "on mutated programs the stepper ends normal, out of fuel, or stuck with a reason"
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub seed: u64,
    pub key: Key,
    /// Child-index path to the offending subterm, when known.
    pub path: Vec<u8>,
    pub goal: String,
    pub psi: String,
    pub program: String,
    pub detail: String,
    pub shrunk: Option<String>,
    pub shrink_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub proposition: String,
    pub statement: String,
    pub attempted: u64,
    pub passed: u64,
    pub failed: u64,
    /// Individual checks, e.g. one per trace step.
    pub checks: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl PropertyReport {
    fn new(p: Property) -> Self {
        PropertyReport {
            proposition: p.proposition().into(),
            statement: p.statement().into(),
            attempted: 0,
            passed: 0,
            failed: 0,
            checks: 0,
            counterexamples: Vec::new(),
        }
    }

    fn merge(&mut self, other: PropertyReport) {
        self.attempted += other.attempted;
        self.passed += other.passed;
        self.failed += other.failed;
        self.checks += other.checks;
        self.counterexamples.extend(other.counterexamples);
        self.counterexamples.sort_by_key(|c| c.key);
        self.counterexamples.truncate(MAX_COUNTEREXAMPLES);
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorStats {
    pub samples: u64,
    pub failures: u64,
    pub goal_attempts: u64,
    pub total_size: u64,
    pub max_size: u64,
    pub total_steps: u64,
    pub max_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub max_depth: u32,
    pub instances: u64,
    pub generator: GeneratorStats,
    pub properties: BTreeMap<String, PropertyReport>,
    /// Named counters: rule coverage, mutant outcomes, oracle verdicts.
    pub tallies: BTreeMap<String, u64>,
}

impl SuiteReport {
    fn empty(cfg: &GenConfig) -> Self {
        SuiteReport {
            seed: cfg.seed,
            max_depth: cfg.max_depth,
            instances: 0,
            generator: GeneratorStats::default(),
            properties: BTreeMap::new(),
            tallies: BTreeMap::new(),
        }
    }

    /// Commutative and associative, so shards can be combined in any order.
    pub fn merge(mut self, other: SuiteReport) -> SuiteReport {
        self.instances += other.instances;
        let (g, o) = (&mut self.generator, other.generator);
        g.samples += o.samples;
        g.failures += o.failures;
        g.goal_attempts += o.goal_attempts;
        g.total_size += o.total_size;
        g.max_size = g.max_size.max(o.max_size);
        g.total_steps += o.total_steps;
        g.max_steps = g.max_steps.max(o.max_steps);
        for (k, v) in other.properties {
            match self.properties.get_mut(&k) {
                Some(mine) => mine.merge(v),
                None => {
                    self.properties.insert(k, v);
                }
            }
        }
        for (k, v) in other.tallies {
            *self.tallies.entry(k).or_default() += v;
        }
        self
    }

    pub fn property(&self, p: Property) -> Option<&PropertyReport> {
        self.properties.get(p.key())
    }

    pub fn failures(&self) -> u64 {
        self.properties.values().map(|r| r.failed).sum::<u64>() + self.generator.failures
    }

    fn tally(&mut self, name: impl Into<String>, n: u64) {
        *self.tallies.entry(name.into()).or_default() += n;
    }

    fn property_mut(&mut self, p: Property) -> &mut PropertyReport {
        self.properties.entry(p.key().into()).or_insert_with(|| PropertyReport::new(p))
    }
}

/// One property's result on one instance.
#[derive(Clone, Debug, Default)]
struct Outcome {
    attempted: bool,
    checks: u64,
    failure: Option<(Vec<u8>, String)>,
}

#[derive(Default)]
struct Results {
    outcomes: BTreeMap<Property, Outcome>,
    steps: u64,
    rules: BTreeMap<&'static str, u64>,
}

impl Results {
    fn check(&mut self, p: Property, failure: Option<(Vec<u8>, String)>) {
        let o = self.outcomes.entry(p).or_default();
        o.attempted = true;
        o.checks += 1;
        if o.failure.is_none() {
            o.failure = failure;
        }
    }

    fn failed(&self, p: Property) -> bool {
        self.outcomes.get(&p).is_some_and(|o| o.failure.is_some())
    }
}

fn psi_text(psi: &TypedNeutralContext) -> String {
    psi.entries().iter().map(|(x, s)| format!("{x} : {}", s.as_type())).collect::<Vec<_>>().join(", ")
}

/// The program packaged so that forcing it is well typed.
fn forceable(goal: &Type, p: &Program) -> (Program, Color) {
    match goal {
        Type::Up(a) if a.mode() == Mode::Q => (p.clone(), Color::Circuit),
        Type::Up(_) => (p.clone(), Color::Functional),
        _ => match goal.mode() {
            Mode::Q => (Program::circ(p.clone()), Color::Circuit),
            Mode::L => (Program::susp(p.clone()), Color::Functional),
            Mode::U => (Program::susp(Program::down(p.clone())), Color::Functional),
        },
    }
}

/// Runs every typed property on one program.
fn typed_checks(sig: &Signature, psi: &TypedNeutralContext, goal: &Type, p: &Program) -> Results {
    let mut r = Results::default();
    let ctx = psi.ctp();
    let pi = psi.cneu();
    let first = check_pqa_against(sig, &ctx, p, goal);
    r.check(Property::GeneratorSoundness, first.verdict.as_ref().err().map(|e| (e.path.clone(), e.to_string())));
    if !first.is_ok() {
        return r;
    }
    r.check(
        Property::Independence,
        (!ctx.geq_mode(goal.mode())).then(|| (vec![], format!("context not at least {}", goal.mode().letter()))),
    );
    let again = check_pqa_against(sig, &ctx, p, goal);
    r.check(Property::CheckingDeterminism, (again != first).then(|| (vec![], format!("{again:?} vs {first:?}"))));
    let x = check_pqx_against(sig, &ctx, p, goal);
    r.check(Property::PqaInPqx, x.verdict.err().map(|e| (e.path.clone(), e.to_string())));

    let mut results = r;
    let (steps, terminal) = normalize_with(&pi, p, DEFAULT_FUEL, |prev, s| {
        results.steps += 1;
        *results.rules.entry(s.rule.name()).or_default() += 1;
        let det = audit_step(&pi, prev).err().map(|v| (vec![], v.to_string()));
        results.check(Property::Determinism, det);
        let fin = classify_unchecked(pi.names(), prev)
            .is_normal()
            .then(|| (vec![], format!("`{prev}` is classified normal but steps by {}", s.rule.name())));
        results.check(Property::Finality, fin);
        let sr = check_pqa_against(sig, &ctx, &s.program, goal).verdict.err();
        results.check(
            Property::SubjectReductionPqa,
            sr.map(|e| (e.path.clone(), format!("after {}: `{}`: {e}", s.rule.name(), s.program))),
        );
        let sr = check_pqx_against(sig, &ctx, &s.program, goal).verdict.err();
        results.check(
            Property::SubjectReductionPqx,
            sr.map(|e| (e.path.clone(), format!("after {}: `{}`: {e}", s.rule.name(), s.program))),
        );
    });
    let mut r = results;
    r.steps = steps;
    match &terminal {
        Terminal::Normal(v) => {
            r.check(Property::Determinism, audit_step(&pi, v).err().map(|e| (vec![], e.to_string())));
            let fin = (!classify_unchecked(pi.names(), v).is_normal())
                .then(|| (vec![], format!("`{v}` does not step but is not classified normal")));
            r.check(Property::Finality, fin);
            r.check(Property::Progress, None);
            r.check(Property::Normalization, None);
            let g = match check_normal_grammar(sig, goal, psi, v) {
                Ok(rep) if rep.conforms => None,
                Ok(rep) => rep.failure.map(|f| (f.path, format!("`{v}`: {}", f.reason))),
                Err(e) => Some((vec![], e.to_string())),
            };
            r.check(Property::NormalFormGrammar, g);
        }
        Terminal::Stuck { program, reason } => {
            r.check(Property::Progress, Some((vec![], format!("stuck at `{program}`: {reason}"))));
            r.check(Property::Normalization, Some((vec![], format!("stuck after {steps} steps"))));
        }
        Terminal::FuelExhausted(_) => {
            r.check(Property::Progress, None);
            r.check(Property::Normalization, Some((vec![], format!("out of fuel after {steps} steps"))));
        }
    }
    let (m, color) = forceable(goal, p);
    let forced = Program::force(m.clone(), color);
    let (_, ft) = normalize_with(&pi, &forced, DEFAULT_FUEL, |_, _| {});
    let halts = match (&ft, &m == p) {
        (Terminal::Normal(_), true) => terminal.is_normal(),
        (Terminal::Normal(_), false) => normalize(&pi, &m, DEFAULT_FUEL).terminal.is_normal(),
        _ => true,
    };
    r.check(Property::ForceHalts, (!halts).then(|| (vec![], format!("`{forced}` normalizes but `{m}` does not"))));
    r
}

fn counterexample(cfg: &GenConfig, inst: &Instance, path: Vec<u8>, detail: String) -> Counterexample {
    Counterexample {
        seed: cfg.seed,
        key: inst.key,
        path,
        goal: inst.goal.to_string(),
        psi: psi_text(&inst.psi),
        program: inst.program.to_string(),
        detail,
        shrunk: None,
        shrink_steps: 0,
    }
}

fn record_generator_failure(report: &mut SuiteReport, cfg: &GenConfig, key: Key, e: &GenError) {
    report.generator.failures += 1;
    let p = report.property_mut(Property::GeneratorSoundness);
    p.attempted += 1;
    p.failed += 1;
    p.checks += 1;
    p.counterexamples.push(Counterexample {
        seed: cfg.seed,
        key,
        path: vec![],
        goal: String::new(),
        psi: String::new(),
        program: String::new(),
        detail: e.to_string(),
        shrunk: None,
        shrink_steps: 0,
    });
}

fn note_instance(report: &mut SuiteReport, inst: &Instance) {
    let g = &mut report.generator;
    g.samples += 1;
    g.goal_attempts += inst.goal_attempts as u64;
    let size = inst.program.size() as u64;
    g.total_size += size;
    g.max_size = g.max_size.max(size);
}

fn typed_instance(cfg: &GenConfig, prover: &mut Prover, index: u64) -> SuiteReport {
    let mut report = SuiteReport::empty(cfg);
    report.instances = 1;
    if prover.memo_len() > PROVER_MEMO_LIMIT {
        *prover = Prover::new();
    }
    let key = Key::new(0, index);
    let inst = match sample(cfg, prover, key, cfg.max_depth, false) {
        Ok(i) => i,
        Err(e) => {
            record_generator_failure(&mut report, cfg, key, &e);
            return report;
        }
    };
    note_instance(&mut report, &inst);
    let sig = &cfg.gate_pool;
    let results = typed_checks(sig, &inst.psi, &inst.goal, &inst.program);
    report.generator.total_steps += results.steps;
    report.generator.max_steps = results.steps;
    for (rule, n) in &results.rules {
        report.tally(format!("rule:{rule}"), *n);
    }
    for (prop, o) in results.outcomes {
        let mut cx = None;
        if let Some((path, detail)) = o.failure.clone() {
            let mut c = counterexample(cfg, &inst, path, detail);
            let taken: Vec<Name> = inst.psi.entries().iter().map(|(x, _)| x.clone()).collect();
            let (small, steps) = shrink(sig, prover, &inst.program, &inst.holes, &taken, |q| {
                typed_checks(sig, &inst.psi, &inst.goal, q).failed(prop)
            });
            if steps > 0 {
                c.shrunk = Some(small.to_string());
                c.shrink_steps = steps;
            }
            cx = Some(c);
        }
        let p = report.property_mut(prop);
        p.attempted += o.attempted as u64;
        p.checks += o.checks;
        match cx {
            Some(c) => {
                p.failed += 1;
                p.counterexamples.push(c);
            }
            None => p.passed += 1,
        }
    }
    report
}

/// Random neutral substitution for Ψ: each variable becomes a fresh
/// variable or a gate applied to fresh variables.
fn neutral_sigma(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    psi: &TypedNeutralContext,
) -> (Vec<(Name, Program)>, NeutralContext) {
    let mut target = NeutralContext::new();
    let mut next = 0;
    let mut fresh = |target: &mut NeutralContext| {
        let n = Name::new(&format!("n{next}"));
        next += 1;
        target.insert(n.clone());
        Program::Var(n, Color::Circuit)
    };
    fn spine(t: &Type, leaf: &mut dyn FnMut() -> Program) -> Program {
        match t {
            Type::Tensor(a, b, _) => Program::pair(spine(a, leaf), spine(b, leaf), Color::Circuit),
            _ => leaf(),
        }
    }
    let mut sigma = Vec::new();
    for (x, s) in psi.entries() {
        let gates: Vec<_> = sig.iter().filter(|(_, g)| g.output == *s).collect();
        let image = if !gates.is_empty() && rng.gen_bool(0.5) {
            let (g, gt) = gates[rng.gen_range(0..gates.len())];
            let arg = spine(gt.input.as_type(), &mut || fresh(&mut target));
            Program::app(Program::Gate(g.clone()), arg, Color::Circuit)
        } else {
            fresh(&mut target)
        };
        sigma.push((x.clone(), image));
    }
    (sigma, target)
}

fn neutral_instance(cfg: &GenConfig, prover: &mut Prover, index: u64) -> SuiteReport {
    let mut report = SuiteReport::empty(cfg);
    report.instances = 1;
    let key = Key::new(1, index);
    let inst = match sample(cfg, prover, key, cfg.max_depth, true) {
        Ok(i) => i,
        Err(e) => {
            record_generator_failure(&mut report, cfg, key, &e);
            return report;
        }
    };
    note_instance(&mut report, &inst);
    let sig = &cfg.gate_pool;
    let mut rng = Key { salt: 1, ..key }.rng(cfg.seed);
    let (sigma, target) = neutral_sigma(&mut rng, sig, &inst.psi);
    let pi = inst.psi.cneu();
    let trace = normalize(&pi, &inst.program, DEFAULT_FUEL);
    let mut programs = vec![inst.program.clone()];
    programs.extend(trace.steps.iter().map(|s| s.program.clone()));

    let mut checks = 0;
    let mut failure = None;
    let mut substituted = Vec::new();
    for q in &programs {
        match apply_neutral_subst(&target, &sigma, q) {
            Ok(s) => substituted.push(s),
            Err(e) => {
                failure = Some(format!("substitution failed on `{q}`: {e}"));
                break;
            }
        }
    }
    if failure.is_none() {
        for (k, (q, sq)) in programs.iter().zip(&substituted).enumerate() {
            checks += 1;
            let before = classify(&pi, q);
            let after = classify(&target, sq);
            let same = match (&before, &after) {
                (Ok(a), Ok(b)) => a == b || !a.is_normal() && !b.is_normal(),
                _ => false,
            };
            if !same {
                failure = Some(format!("`{q}` is {before:?} but `{sq}` is {after:?}"));
                break;
            }
            let Some(next) = substituted.get(k + 1) else { break };
            checks += 1;
            match step(&target, sq) {
                StepOutcome::Step { program, .. } if alpha_eq(&program, next) => {}
                other => {
                    failure = Some(format!(
                        "`{sq}` steps to {:?}, expected `{next}`",
                        other.program().map(|p| p.to_string())
                    ));
                    break;
                }
            }
        }
    }
    let p = report.property_mut(Property::NeutralSubstitution);
    p.attempted += 1;
    p.checks += checks;
    match failure {
        None => p.passed += 1,
        Some(detail) => {
            let sigma_text = sigma.iter().map(|(x, m)| format!("{x} := {m}")).collect::<Vec<_>>().join(", ");
            p.failed += 1;
            p.counterexamples.push(counterexample(cfg, &inst, vec![], format!("[{sigma_text}] {detail}")));
        }
    }
    report
}

fn shard<F>(cfg: &GenConfig, count: u64, f: F) -> SuiteReport
where
    F: Fn(&GenConfig, &mut Prover, u64) -> SuiteReport + Sync + Send,
{
    (0..count)
        .into_par_iter()
        .map_init(Prover::new, |prover, i| f(cfg, prover, i))
        .reduce(|| SuiteReport::empty(cfg), SuiteReport::merge)
}

/// Typed properties on `count` generated programs, plus neutral
/// substitution on a tenth as many (at least one) instances with nonempty Ψ.
pub fn run_suite(cfg: &GenConfig, count: u64) -> Result<SuiteReport, GenError> {
    cfg.validate()?;
    let typed = shard(cfg, count, typed_instance);
    let neutral = run_neutral_substitution(cfg, (count / 10).max(1))?;
    Ok(typed.merge(neutral))
}

pub fn run_neutral_substitution(cfg: &GenConfig, count: u64) -> Result<SuiteReport, GenError> {
    cfg.validate()?;
    let mut r = shard(cfg, count, neutral_instance);
    r.instances = 0;
    Ok(r)
}

fn oracle_instance(cfg: &GenConfig, prover: &mut Prover, index: u64) -> SuiteReport {
    let mut report = SuiteReport::empty(cfg);
    report.instances = 1;
    let sig = &cfg.gate_pool;
    let depth = cfg.max_depth.min(5);
    let mut found = None;
    for salt in 0..16 {
        let key = Key { stream: 2, index, salt };
        match sample(cfg, prover, key, depth, false) {
            Ok(inst) if linear_binding_count(&inst.psi.ctp(), &inst.program) <= MAX_LINEAR => {
                found = Some(inst);
                break;
            }
            Ok(_) => {}
            Err(e) => {
                record_generator_failure(&mut report, cfg, key, &e);
                return report;
            }
        }
    }
    let Some(mut inst) = found else {
        report.tally("oracle:skipped", 1);
        return report;
    };
    note_instance(&mut report, &inst);
    if index % 2 == 1 {
        let mut rng = Key { salt: 100, ..inst.key }.rng(cfg.seed);
        inst.program = mutate(&mut rng, sig, &inst.program).program;
        report.tally("oracle:mutants", 1);
    }
    let ctx = inst.psi.ctp();
    let main = check_pqa_against(sig, &ctx, &inst.program, &inst.goal);
    let oracle = brute_force_split_check(sig, &ctx, &inst.program, &inst.goal);
    let p = report.property_mut(Property::OracleAgreement);
    p.attempted += 1;
    p.checks += 1;
    let failure = match &oracle {
        Ok(v) if *v == main.is_ok() => None,
        Ok(v) => Some(format!("leftover checker: {:?}, split oracle: {v}", main.verdict)),
        Err(e) => Some(e.to_string()),
    };
    match failure {
        None => p.passed += 1,
        Some(d) => {
            p.failed += 1;
            p.counterexamples.push(counterexample(cfg, &inst, vec![], d));
        }
    }
    report.tally(if main.is_ok() { "oracle:accepted" } else { "oracle:rejected" }, 1);
    report
}

/// Leftover checker against the split-enumerating oracle: even indices are
/// generated programs (depth at most 5), odd indices are their mutants.
pub fn run_oracle_agreement(cfg: &GenConfig, count: u64) -> Result<SuiteReport, GenError> {
    cfg.validate()?;
    Ok(shard(cfg, count, oracle_instance))
}

/// What the stepper did with a mutant.
fn mutant_outcome(psi: &TypedNeutralContext, p: &Program) -> Result<&'static str, String> {
    let pi = psi.cneu();
    let (_, terminal) = normalize_with(&pi, p, MUTANT_FUEL, |_, _| {});
    match terminal {
        Terminal::Normal(v) => {
            if classify(&pi, &v).is_ok_and(FormClass::is_normal) {
                Ok("normal")
            } else {
                Err(format!("`{v}` does not step but is not classified normal"))
            }
        }
        Terminal::FuelExhausted(_) => Ok("fuel_exhausted"),
        Terminal::Stuck { program, reason } => {
            if reason.trim().is_empty() {
                Err(format!("stuck at `{program}` without a diagnostic"))
            } else if classify(&pi, &program).is_ok_and(FormClass::is_normal) {
                Err(format!("stuck at `{program}`, which is classified normal"))
            } else {
                Ok("stuck")
            }
        }
    }
}

fn mutation_instance(cfg: &GenConfig, prover: &mut Prover, index: u64) -> SuiteReport {
    let mut report = SuiteReport::empty(cfg);
    report.instances = 1;
    let sig = &cfg.gate_pool;
    let key = Key::new(3, index);
    let mut inst = match sample(cfg, prover, key, cfg.max_depth, false) {
        Ok(i) => i,
        Err(e) => {
            record_generator_failure(&mut report, cfg, key, &e);
            return report;
        }
    };
    note_instance(&mut report, &inst);
    let mut rng = Key { salt: 100, ..key }.rng(cfg.seed);
    let m = mutate(&mut rng, sig, &inst.program);
    inst.program = m.program;
    report.tally(format!("mutation:{}", m.kind), 1);
    let ctx = inst.psi.ctp();
    let run = catch_unwind(AssertUnwindSafe(|| {
        let typed = check_pqa(sig, &ctx, &inst.program).is_ok();
        (typed, mutant_outcome(&inst.psi, &inst.program))
    }));
    let failure = match run {
        Ok((typed, outcome)) => {
            report.tally(if typed { "mutant:accepted_by_pqa" } else { "mutant:rejected_by_pqa" }, 1);
            match outcome {
                Ok(kind) => {
                    report.tally(format!("outcome:{kind}"), 1);
                    None
                }
                Err(d) => Some(d),
            }
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Some(format!("panic: {msg}"))
        }
    };
    let p = report.property_mut(Property::MutationRobustness);
    p.attempted += 1;
    p.checks += 1;
    match failure {
        None => p.passed += 1,
        Some(d) => {
            p.failed += 1;
            p.counterexamples.push(counterexample(cfg, &inst, m.path, d));
        }
    }
    report
}

/// One-constructor mutants of generated programs, run through the checker
/// and the stepper.
pub fn run_mutation_robustness(cfg: &GenConfig, count: u64) -> Result<SuiteReport, GenError> {
    cfg.validate()?;
    Ok(shard(cfg, count, mutation_instance))
}

#[cfg(test)]
mod tests;
