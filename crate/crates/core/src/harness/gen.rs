//! Derivation-directed generation of well-typed programs.
//!
//! Every generation step picks a typing rule whose conclusion fits the goal,
//! splits the linear bindings between its premises and recurses. A memoized
//! prover over the same rules (minus the redex-forming cuts) decides which
//! premises are satisfiable within the remaining depth, so a generation that
//! starts from a provable goal never dead-ends.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Color, GateType, Mode, Name, Pattern, PatternFamily, Program, Signature, Type};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub name: Name,
    pub ty: Type,
}

impl Binding {
    pub fn new(name: Name, ty: Type) -> Self {
        Binding { name, ty }
    }
}

/// The judgment a generated subterm was produced for. The shrinker
/// regenerates holes with smaller derivations.
#[derive(Clone, Debug)]
pub struct Hole {
    pub path: Vec<u8>,
    pub goal: Type,
    pub linear: Vec<Binding>,
    pub unrestricted: Vec<Binding>,
    pub synth: bool,
    pub depth: u32,
}

#[derive(Clone, Debug)]
struct Premise {
    goal: Type,
    linear: Vec<Binding>,
    unrestricted: Vec<Binding>,
    synth: bool,
}

#[derive(Clone, Debug)]
enum PatTpl {
    Unit,
    Pair(Name, Name),
    Down(Name),
}

/// Program skeleton whose holes are filled by generated premises.
#[derive(Clone, Debug)]
enum Tpl {
    Hole(usize),
    Lit(Program),
    Lam { binder: Name, annot: Option<Type>, color: Color, body: Box<Tpl> },
    Pair(Box<Tpl>, Box<Tpl>, Color),
    App(Box<Tpl>, Box<Tpl>, Color),
    Force(Box<Tpl>, Color),
    Susp(Box<Tpl>),
    Circ(Box<Tpl>),
    Down(Box<Tpl>),
    Match { scrutinee: Box<Tpl>, pattern: PatTpl, family: PatternFamily, body: Box<Tpl> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Axiom,
    Intro,
    Left,
    Shared,
    Cut,
}

impl Kind {
    fn weight(self) -> f64 {
        match self {
            Kind::Axiom => 4.0,
            Kind::Intro => 3.0,
            Kind::Left => 3.0,
            Kind::Shared => 1.0,
            Kind::Cut => 2.5,
        }
    }
}

#[derive(Clone, Debug)]
struct Plan {
    kind: Kind,
    premises: Vec<Premise>,
    tpl: Tpl,
}

fn color_of(t: &Type) -> Color {
    if t.mode() == Mode::Q {
        Color::Circuit
    } else {
        Color::Functional
    }
}

fn var(b: &Binding) -> Tpl {
    Tpl::Lit(Program::Var(b.name.clone(), color_of(&b.ty)))
}

fn hole(i: usize) -> Box<Tpl> {
    Box::new(Tpl::Hole(i))
}

fn types(bs: &[Binding]) -> Vec<Type> {
    bs.iter().map(|b| b.ty.clone()).collect()
}

fn without(bs: &[Binding], i: usize) -> Vec<Binding> {
    let mut v = bs.to_vec();
    v.remove(i);
    v
}

fn joined(a: &[Binding], b: impl IntoIterator<Item = Binding>) -> Vec<Binding> {
    let mut v = a.to_vec();
    v.extend(b);
    v
}

fn patternable(t: &Type) -> bool {
    matches!(t, Type::Unit(_) | Type::Tensor(..) | Type::Down(_))
}

/// All ways to divide `bs` in two, skipping divisions whose left halves
/// carry the same multiset of types.
fn splits(bs: &[Binding]) -> Vec<(Vec<Binding>, Vec<Binding>)> {
    let n = bs.len();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let mut left_types: Vec<&Type> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &bs[i].ty).collect();
        left_types.sort();
        if !seen.insert(left_types.into_iter().cloned().collect::<Vec<_>>()) {
            continue;
        }
        let (mut l, mut r) = (Vec::new(), Vec::new());
        for (i, b) in bs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                l.push(b.clone());
            } else {
                r.push(b.clone());
            }
        }
        out.push((l, r));
    }
    out
}

/// Indices of the first binding of each distinct type.
fn distinct(bs: &[Binding]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for (i, b) in bs.iter().enumerate() {
        if !out.iter().any(|&j| bs[j].ty == b.ty) {
            out.push(i);
        }
    }
    out
}

type Key = (Type, Vec<Type>, Vec<Type>, u32);

/// Rule enumeration shared by the prover and the generator.
struct Rules<'a> {
    gates: &'a [(Name, GateType)],
    fresh: u64,
    taken: &'a [Name],
}

impl Rules<'_> {
    fn name(&mut self) -> Name {
        loop {
            let n = Name::new(&format!("v{}", self.fresh));
            self.fresh += 1;
            if !self.taken.contains(&n) {
                return n;
            }
        }
    }

    /// Binders for a pattern over `t`, and where they go.
    fn pattern(&mut self, t: &Type) -> (PatTpl, Vec<Binding>, Vec<Binding>) {
        match t {
            Type::Unit(_) => (PatTpl::Unit, vec![], vec![]),
            Type::Tensor(a, b, m) => {
                let (x, y) = (self.name(), self.name());
                let bs = vec![Binding::new(x.clone(), (**a).clone()), Binding::new(y.clone(), (**b).clone())];
                if *m == Mode::U {
                    (PatTpl::Pair(x, y), vec![], bs)
                } else {
                    (PatTpl::Pair(x, y), bs, vec![])
                }
            }
            Type::Down(a) => {
                let x = self.name();
                (PatTpl::Down(x.clone()), vec![], vec![Binding::new(x, (**a).clone())])
            }
            _ => unreachable!("not a pattern type"),
        }
    }

    fn matching(scrutinee: Tpl, pattern: PatTpl, family: PatternFamily, body: Tpl) -> Tpl {
        Tpl::Match { scrutinee: Box::new(scrutinee), pattern, family, body: Box::new(body) }
    }

    /// Rules that the prover also explores.
    fn structural(&mut self, goal: &Type, delta: &[Binding], gamma: &[Binding], synth: bool) -> Vec<Plan> {
        let mut out = Vec::new();
        if goal.mode() == Mode::U && !delta.is_empty() {
            return out;
        }
        let c = color_of(goal);
        let plan = |kind, premises, tpl| Plan { kind, premises, tpl };
        let prem = |goal: &Type, linear: Vec<Binding>, unrestricted: Vec<Binding>, synth| Premise {
            goal: goal.clone(),
            linear,
            unrestricted,
            synth,
        };

        // axioms
        if delta.len() == 1 && delta[0].ty == *goal {
            out.push(plan(Kind::Axiom, vec![], var(&delta[0])));
        }
        if delta.is_empty() {
            for i in distinct(gamma) {
                if gamma[i].ty == *goal {
                    out.push(plan(Kind::Axiom, vec![], var(&gamma[i])));
                }
            }
            for (g, gt) in self.gates {
                if gt.arrow() == *goal {
                    out.push(plan(Kind::Axiom, vec![], Tpl::Lit(Program::Gate(g.clone()))));
                }
            }
        }

        // introductions
        match goal {
            Type::Unit(_) if delta.is_empty() => out.push(plan(Kind::Intro, vec![], Tpl::Lit(Program::Unit(c)))),
            Type::Tensor(a, b, _) => {
                for (l, r) in splits(delta) {
                    out.push(plan(
                        Kind::Intro,
                        vec![prem(a, l, gamma.to_vec(), synth), prem(b, r, gamma.to_vec(), synth)],
                        Tpl::Pair(hole(0), hole(1), c),
                    ));
                }
            }
            Type::Arrow(a, b, m) => {
                let x = self.name();
                let bx = Binding::new(x.clone(), (**a).clone());
                let (d2, g2) = if *m == Mode::U {
                    (delta.to_vec(), joined(gamma, [bx]))
                } else {
                    (joined(delta, [bx]), gamma.to_vec())
                };
                let annot = synth.then(|| (**a).clone());
                out.push(plan(
                    Kind::Intro,
                    vec![prem(b, d2, g2, synth)],
                    Tpl::Lam { binder: x, annot, color: c, body: hole(0) },
                ));
            }
            Type::Up(a) if a.mode() == Mode::L => {
                if delta.is_empty() {
                    out.push(plan(Kind::Intro, vec![prem(a, vec![], gamma.to_vec(), synth)], Tpl::Susp(hole(0))));
                }
            }
            Type::Up(a) => {
                out.push(plan(Kind::Intro, vec![prem(a, delta.to_vec(), gamma.to_vec(), synth)], Tpl::Circ(hole(0))));
            }
            Type::Down(a) if delta.is_empty() => {
                out.push(plan(Kind::Intro, vec![prem(a, vec![], gamma.to_vec(), synth)], Tpl::Down(hole(0))));
            }
            _ => {}
        }

        // eliminations of linear bindings
        let wrap = c == Color::Circuit;
        let cont = if wrap { Type::up(goal.clone()) } else { goal.clone() };
        let wrapped = |t: Tpl| if wrap { Tpl::Force(Box::new(t), Color::Circuit) } else { t };
        for i in distinct(delta) {
            let r = &delta[i];
            let rest = without(delta, i);
            match &r.ty {
                t if patternable(t) => {
                    let (pat, lin, unr) = self.pattern(t);
                    if color_of(t) == Color::Circuit {
                        let family = if wrap { PatternFamily::QQ } else { PatternFamily::QF };
                        out.push(plan(
                            Kind::Left,
                            vec![prem(goal, joined(&rest, lin), joined(gamma, unr), synth)],
                            Self::matching(var(r), pat, family, Tpl::Hole(0)),
                        ));
                    } else {
                        out.push(plan(
                            Kind::Left,
                            vec![prem(&cont, joined(&rest, lin), joined(gamma, unr), synth || wrap)],
                            wrapped(Self::matching(var(r), pat, PatternFamily::FF, Tpl::Hole(0))),
                        ));
                    }
                }
                Type::Arrow(a, b, Mode::L) => {
                    for (l, rr) in splits(&rest) {
                        let app = Tpl::App(Box::new(var(r)), hole(0), Color::Functional);
                        if **b == cont && rr.is_empty() {
                            out.push(plan(
                                Kind::Left,
                                vec![prem(a, l.clone(), gamma.to_vec(), false)],
                                wrapped(app.clone()),
                            ));
                        }
                        if patternable(b) {
                            let (pat, lin, unr) = self.pattern(b);
                            out.push(plan(
                                Kind::Left,
                                vec![
                                    prem(a, l, gamma.to_vec(), false),
                                    prem(&cont, joined(&rr, lin), joined(gamma, unr), synth || wrap),
                                ],
                                wrapped(Self::matching(app, pat, PatternFamily::FF, Tpl::Hole(1))),
                            ));
                        }
                    }
                }
                Type::Up(a) if a.mode() == Mode::Q => {
                    let forced = Tpl::Force(Box::new(var(r)), Color::Circuit);
                    self.force_left(&mut out, goal, a, forced, &rest, gamma, synth);
                }
                _ => {}
            }
        }

        // eliminations of unrestricted bindings
        for i in distinct(gamma) {
            let g = &gamma[i];
            match &g.ty {
                Type::Arrow(a, b, Mode::U) if **b == *goal && delta.is_empty() => {
                    out.push(plan(
                        Kind::Shared,
                        vec![prem(a, vec![], gamma.to_vec(), false)],
                        Tpl::App(Box::new(var(g)), hole(0), Color::Functional),
                    ));
                }
                Type::Tensor(a, b, Mode::U)
                    if !gamma.iter().any(|h| h.ty == **a) || !gamma.iter().any(|h| h.ty == **b) =>
                {
                    let (pat, _, unr) = self.pattern(&g.ty);
                    out.push(plan(
                        Kind::Shared,
                        vec![prem(&cont, delta.to_vec(), joined(gamma, unr), synth || wrap)],
                        wrapped(Self::matching(var(g), pat, PatternFamily::FF, Tpl::Hole(0))),
                    ));
                }
                Type::Up(a) if a.mode() == Mode::L => {
                    let forced = Tpl::Force(Box::new(var(g)), Color::Functional);
                    if **a == *goal && delta.is_empty() {
                        out.push(plan(Kind::Shared, vec![], forced.clone()));
                    }
                    if patternable(a) && c == Color::Functional && goal.mode() == Mode::L {
                        let (pat, lin, unr) = self.pattern(a);
                        out.push(plan(
                            Kind::Shared,
                            vec![prem(goal, joined(delta, lin), joined(gamma, unr), synth)],
                            Self::matching(forced, pat, PatternFamily::FF, Tpl::Hole(0)),
                        ));
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// Uses a circuit of type `a` (a forced suspension or gate output) to
    /// build `goal` with the remaining bindings.
    #[allow(clippy::too_many_arguments)]
    fn force_left(
        &mut self,
        out: &mut Vec<Plan>,
        goal: &Type,
        a: &Type,
        circuit: Tpl,
        rest: &[Binding],
        gamma: &[Binding],
        synth: bool,
    ) {
        let wrap = goal.mode() == Mode::Q;
        let prem = |goal: &Type, linear: Vec<Binding>, synth| Premise {
            goal: goal.clone(),
            linear,
            unrestricted: gamma.to_vec(),
            synth,
        };
        let family = if wrap { PatternFamily::QQ } else { PatternFamily::QF };
        match a {
            Type::Arrow(s, t, _) => {
                for (l, rr) in splits(rest) {
                    let app = Tpl::App(Box::new(circuit.clone()), hole(0), Color::Circuit);
                    let arg = prem(s, l, false);
                    if wrap && **t == *goal && rr.is_empty() {
                        out.push(Plan { kind: Kind::Left, premises: vec![arg.clone()], tpl: app.clone() });
                    }
                    if patternable(t) {
                        let (pat, lin, _) = self.pattern(t);
                        out.push(Plan {
                            kind: Kind::Left,
                            premises: vec![arg.clone(), prem(goal, joined(&rr, lin), synth)],
                            tpl: Self::matching(app.clone(), pat, family, Tpl::Hole(1)),
                        });
                    }
                    if wrap && goal.is_simple() {
                        let y = self.name();
                        out.push(Plan {
                            kind: Kind::Left,
                            premises: vec![
                                arg,
                                prem(goal, joined(&rr, [Binding::new(y.clone(), (**t).clone())]), true),
                            ],
                            tpl: Tpl::App(
                                Box::new(Tpl::Lam {
                                    binder: y,
                                    annot: Some((**t).clone()),
                                    color: Color::Circuit,
                                    body: hole(1),
                                }),
                                Box::new(app),
                                Color::Circuit,
                            ),
                        });
                    }
                }
            }
            a => {
                if wrap && a == goal && rest.is_empty() {
                    out.push(Plan { kind: Kind::Left, premises: vec![], tpl: circuit.clone() });
                }
                if patternable(a) {
                    let (pat, lin, _) = self.pattern(a);
                    out.push(Plan {
                        kind: Kind::Left,
                        premises: vec![prem(goal, joined(rest, lin), synth)],
                        tpl: Self::matching(circuit.clone(), pat, family, Tpl::Hole(0)),
                    });
                }
                if wrap && goal.is_simple() {
                    let y = self.name();
                    out.push(Plan {
                        kind: Kind::Left,
                        premises: vec![prem(goal, joined(rest, [Binding::new(y.clone(), a.clone())]), true)],
                        tpl: Tpl::App(
                            Box::new(Tpl::Lam {
                                binder: y,
                                annot: Some(a.clone()),
                                color: Color::Circuit,
                                body: hole(0),
                            }),
                            Box::new(circuit),
                            Color::Circuit,
                        ),
                    });
                }
            }
        }
    }
}

/// Memoized provability of generation goals within a depth budget.
#[derive(Default)]
pub struct Prover {
    memo: HashMap<Key, bool>,
}

impl Prover {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn can(&mut self, sig: &Signature, goal: &Type, linear: &[Type], unrestricted: &[Type], depth: u32) -> bool {
        let gates: Vec<(Name, GateType)> = sig.iter().map(|(n, g)| (n.clone(), g.clone())).collect();
        self.can_with(&gates, goal, linear, unrestricted, depth)
    }

    fn can_with(
        &mut self,
        gates: &[(Name, GateType)],
        goal: &Type,
        linear: &[Type],
        unrestricted: &[Type],
        depth: u32,
    ) -> bool {
        if depth == 0 {
            return false;
        }
        let mut lin = linear.to_vec();
        lin.sort();
        let mut unr = unrestricted.to_vec();
        unr.sort();
        unr.dedup();
        let key = (goal.clone(), lin, unr, depth);
        if let Some(&b) = self.memo.get(&key) {
            return b;
        }
        let dummy = |ts: &[Type]| ts.iter().map(|t| Binding::new(Name::new("_"), t.clone())).collect::<Vec<_>>();
        let (delta, gamma) = (dummy(&key.1), dummy(&key.2));
        let plans = Rules { gates, fresh: 0, taken: &[] }.structural(goal, &delta, &gamma, false);
        let r = plans.iter().any(|p| {
            p.premises
                .iter()
                .all(|q| self.can_with(gates, &q.goal, &types(&q.linear), &types(&q.unrestricted), depth - 1))
        });
        self.memo.insert(key, r);
        r
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

/// Generation state for one program.
pub struct Generator<'a> {
    pub(crate) rng: ChaCha8Rng,
    prover: &'a mut Prover,
    gates: Vec<(Name, GateType)>,
    fresh: u64,
    taken: Vec<Name>,
    path: Vec<u8>,
    holes: Vec<Hole>,
    minimal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("no derivation of `{0}` fits in the depth budget")]
    Unsatisfiable(String),
    #[error("generator and prover disagree at `{0}`")]
    Inconsistent(String),
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error("generated program is rejected by the checker: {0}")]
    Rejected(String),
}

impl<'a> Generator<'a> {
    pub fn new(sig: &Signature, prover: &'a mut Prover, rng: ChaCha8Rng, taken: Vec<Name>) -> Self {
        Generator {
            rng,
            prover,
            gates: sig.iter().map(|(n, g)| (n.clone(), g.clone())).collect(),
            fresh: 0,
            taken,
            path: Vec::new(),
            holes: Vec::new(),
            minimal: false,
        }
    }

    /// Deterministic smallest derivations, for shrinking.
    pub fn minimal(mut self) -> Self {
        self.minimal = true;
        self
    }

    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    pub fn into_holes(self) -> Vec<Hole> {
        self.holes
    }

    fn provable(&mut self, p: &Premise, depth: u32) -> bool {
        self.prover.can_with(&self.gates, &p.goal, &types(&p.linear), &types(&p.unrestricted), depth)
    }

    pub fn provable_goal(&mut self, goal: &Type, linear: &[Binding], unrestricted: &[Binding], depth: u32) -> bool {
        self.prover.can_with(&self.gates, goal, &types(linear), &types(unrestricted), depth)
    }

    fn random_type(&mut self, mode: Mode, size: u32) -> Type {
        random_type(&mut self.rng, mode, size)
    }

    /// Redex-forming rules. Their premises are checked by the prover, but the
    /// prover never uses them itself.
    fn cuts(&mut self, rules: &mut Rules, goal: &Type, delta: &[Binding], gamma: &[Binding], synth: bool) -> Vec<Plan> {
        let mut out = Vec::new();
        let m = goal.mode();
        let c = color_of(goal);
        let prem = |goal: &Type, linear: Vec<Binding>, unrestricted: Vec<Binding>, synth| Premise {
            goal: goal.clone(),
            linear,
            unrestricted,
            synth,
        };
        let some_splits = |rng: &mut ChaCha8Rng, bs: &[Binding]| {
            let mut all = splits(bs);
            let mut out = Vec::new();
            for _ in 0..3.min(all.len()) {
                let k = rng.gen_range(0..all.len());
                out.push(all.swap_remove(k));
            }
            out
        };

        // application of a computed function
        if m != Mode::Q || goal.is_simple() {
            for _ in 0..2 {
                let a = if m == Mode::Q { random_simple(&mut self.rng, 1) } else { self.random_type(m, 1) };
                let f = Type::arrow(a.clone(), goal.clone(), m);
                for (l, r) in some_splits(&mut self.rng, delta) {
                    out.push(Plan {
                        kind: Kind::Cut,
                        premises: vec![prem(&f, l, gamma.to_vec(), true), prem(&a, r, gamma.to_vec(), false)],
                        tpl: Tpl::App(hole(0), hole(1), c),
                    });
                }
            }
        }

        // match on a computed value
        for _ in 0..2 {
            let smode = match (m, self.rng.gen_range(0..3)) {
                (Mode::Q, _) => Mode::Q,
                (Mode::U, _) => Mode::U,
                (_, 0) => Mode::Q,
                (_, 1) => Mode::L,
                _ => Mode::U,
            };
            let t = match (smode, self.rng.gen_range(0..4)) {
                (Mode::Q, 0) => Type::Unit(Mode::Q),
                (Mode::Q, _) => Type::tensor(random_simple(&mut self.rng, 1), random_simple(&mut self.rng, 1), Mode::Q),
                (_, 0) => Type::Unit(smode),
                (Mode::L, 1) => Type::down(self.random_type(Mode::U, 1)),
                _ => Type::tensor(self.random_type(smode, 1), self.random_type(smode, 1), smode),
            };
            let family = match (smode, c) {
                (Mode::Q, Color::Circuit) => PatternFamily::QQ,
                (Mode::Q, Color::Functional) => PatternFamily::QF,
                _ => PatternFamily::FF,
            };
            if family == PatternFamily::FF && c == Color::Circuit {
                continue;
            }
            for (l, r) in some_splits(&mut self.rng, delta) {
                let (pat, lin, unr) = rules.pattern(&t);
                out.push(Plan {
                    kind: Kind::Cut,
                    premises: vec![
                        prem(&t, l, gamma.to_vec(), true),
                        prem(goal, joined(&r, lin), joined(gamma, unr), synth),
                    ],
                    tpl: Rules::matching(Tpl::Hole(0), pat, family, Tpl::Hole(1)),
                });
            }
        }

        // force of a computed suspension
        match m {
            Mode::Q => out.push(Plan {
                kind: Kind::Cut,
                premises: vec![prem(&Type::up(goal.clone()), delta.to_vec(), gamma.to_vec(), true)],
                tpl: Tpl::Force(hole(0), Color::Circuit),
            }),
            Mode::L if delta.is_empty() => out.push(Plan {
                kind: Kind::Cut,
                premises: vec![prem(&Type::up(goal.clone()), vec![], gamma.to_vec(), true)],
                tpl: Tpl::Force(hole(0), Color::Functional),
            }),
            _ => {}
        }

        // gate applications
        if m != Mode::U && !rules.gates.is_empty() {
            for _ in 0..2 {
                let (g, gt) = rules.gates[self.rng.gen_range(0..rules.gates.len())].clone();
                let circuit = Tpl::Lit(Program::Gate(g));
                rules.force_left(&mut out, goal, &gt.arrow(), circuit, delta, gamma, synth);
            }
            for p in out.iter_mut() {
                p.kind = Kind::Cut;
            }
        }
        out
    }

    fn order(&mut self, plans: Vec<Plan>) -> Vec<Plan> {
        if self.minimal {
            return plans;
        }
        let mut keyed: Vec<(f64, Plan)> = plans
            .into_iter()
            .map(|p| {
                let u: f64 = self.rng.gen_range(f64::EPSILON..1.0);
                (-u.ln() / p.kind.weight(), p)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        keyed.into_iter().map(|(_, p)| p).collect()
    }

    /// Generates a program of type `goal` using every binding in `linear`
    /// exactly once. The goal must be provable within `depth`.
    pub fn generate(
        &mut self,
        goal: &Type,
        linear: &[Binding],
        unrestricted: &[Binding],
        depth: u32,
        synth: bool,
    ) -> Result<Program, GenError> {
        self.holes.push(Hole {
            path: self.path.clone(),
            goal: goal.clone(),
            linear: linear.to_vec(),
            unrestricted: unrestricted.to_vec(),
            synth,
            depth,
        });
        let mut delta = linear.to_vec();
        if !self.minimal {
            // which same-typed binding goes where is decided by position
            for i in (1..delta.len()).rev() {
                delta.swap(i, self.rng.gen_range(0..=i));
            }
        }
        let gates = std::mem::take(&mut self.gates);
        let taken = std::mem::take(&mut self.taken);
        let mut rules = Rules { gates: &gates, fresh: self.fresh, taken: &taken };
        let mut plans = rules.structural(goal, &delta, unrestricted, synth);
        if !self.minimal && depth > 1 {
            let cuts = self.cuts(&mut rules, goal, &delta, unrestricted, synth);
            plans.extend(cuts);
        }
        self.fresh = rules.fresh;
        self.gates = gates;
        self.taken = taken;
        let plans = self.order(plans);
        for plan in plans {
            if plan.premises.iter().all(|p| self.provable(p, depth - 1)) {
                return self.fill(&plan.tpl, &plan.premises, depth - 1);
            }
        }
        Err(GenError::Inconsistent(goal.to_string()))
    }

    fn at<T>(&mut self, i: u8, f: impl FnOnce(&mut Self) -> Result<T, GenError>) -> Result<T, GenError> {
        self.path.push(i);
        let r = f(self);
        self.path.pop();
        r
    }

    fn fill(&mut self, t: &Tpl, premises: &[Premise], depth: u32) -> Result<Program, GenError> {
        Ok(match t {
            Tpl::Hole(i) => {
                let p = &premises[*i];
                self.generate(&p.goal, &p.linear, &p.unrestricted, depth, p.synth)?
            }
            Tpl::Lit(p) => p.clone(),
            Tpl::Lam { binder, annot, color, body } => {
                // every binder is annotated: reduction moves checked lambdas
                // into synthesis positions
                let annot = annot.clone().or_else(|| {
                    premises
                        .iter()
                        .find_map(|p| p.linear.iter().chain(&p.unrestricted).find(|b| b.name == *binder))
                        .map(|b| b.ty.clone())
                });
                let body = self.at(0, |g| g.fill(body, premises, depth))?;
                Program::Lam { binder: binder.clone(), annot, body: Box::new(body), color: *color }
            }
            Tpl::Pair(a, b, c) => {
                let a = self.at(0, |g| g.fill(a, premises, depth))?;
                let b = self.at(1, |g| g.fill(b, premises, depth))?;
                Program::pair(a, b, *c)
            }
            Tpl::App(f, a, c) => {
                let f = self.at(0, |g| g.fill(f, premises, depth))?;
                let a = self.at(1, |g| g.fill(a, premises, depth))?;
                Program::app(f, a, *c)
            }
            Tpl::Force(m, c) => Program::force(self.at(0, |g| g.fill(m, premises, depth))?, *c),
            Tpl::Susp(m) => Program::susp(self.at(0, |g| g.fill(m, premises, depth))?),
            Tpl::Circ(m) => Program::circ(self.at(0, |g| g.fill(m, premises, depth))?),
            Tpl::Down(m) => Program::down(self.at(0, |g| g.fill(m, premises, depth))?),
            Tpl::Match { scrutinee, pattern, family, body } => {
                let s = self.at(0, |g| g.fill(scrutinee, premises, depth))?;
                let b = self.at(1, |g| g.fill(body, premises, depth))?;
                let pattern = match pattern {
                    PatTpl::Unit => Pattern::Unit(Box::new(b)),
                    PatTpl::Pair(x, y) => Pattern::Pair(x.clone(), y.clone(), Box::new(b)),
                    PatTpl::Down(x) => Pattern::Down(x.clone(), Box::new(b)),
                };
                Program::matching(s, pattern, *family)
            }
        })
    }
}

/// A simple type with at most `size` tensors.
pub fn random_simple(rng: &mut ChaCha8Rng, size: u32) -> Type {
    match rng.gen_range(0..if size == 0 { 5 } else { 7 }) {
        0 => Type::Unit(Mode::Q),
        1..=4 => Type::Qubit,
        _ => Type::tensor(random_simple(rng, size - 1), random_simple(rng, size - 1), Mode::Q),
    }
}

/// A well-formed type at `mode` of roughly `size` connectives.
pub fn random_type(rng: &mut ChaCha8Rng, mode: Mode, size: u32) -> Type {
    let leaf = size == 0;
    match mode {
        Mode::Q => {
            if !leaf && rng.gen_bool(0.3) {
                Type::arrow(random_simple(rng, 1), random_simple(rng, 1), Mode::Q)
            } else {
                random_simple(rng, size.min(2))
            }
        }
        Mode::L => match rng.gen_range(0..if leaf { 3 } else { 7 }) {
            0 => Type::Unit(Mode::L),
            1 | 2 => Type::up(random_type(rng, Mode::Q, 1)),
            3 => Type::tensor(random_type(rng, Mode::L, size - 1), random_type(rng, Mode::L, size - 1), Mode::L),
            4 => Type::arrow(random_type(rng, Mode::L, size - 1), random_type(rng, Mode::L, size - 1), Mode::L),
            5 => Type::down(random_type(rng, Mode::U, size - 1)),
            _ => Type::up(random_type(rng, Mode::Q, size)),
        },
        Mode::U => match rng.gen_range(0..if leaf { 2 } else { 5 }) {
            0 => Type::Unit(Mode::U),
            1 => Type::up(if leaf { Type::Unit(Mode::L) } else { random_type(rng, Mode::L, size - 1) }),
            2 => Type::tensor(random_type(rng, Mode::U, size - 1), random_type(rng, Mode::U, size - 1), Mode::U),
            3 => Type::arrow(random_type(rng, Mode::U, size - 1), random_type(rng, Mode::U, size - 1), Mode::U),
            _ => Type::up(random_type(rng, Mode::L, size - 1)),
        },
    }
}
