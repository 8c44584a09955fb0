use std::collections::BTreeSet;

use super::{check_scope, eliminate_canonical, NeutralContext, Rule};
use crate::syntax::{free_vars, fresh_name, max_fresh_index, rename_free, Color, Name, Pattern, Program};

#[derive(Clone, Debug)]
pub enum StepOutcome {
    Normal,
    /// `rule` contracted the redex; `root` is the outermost rule of the
    /// derivation (a congruence rule unless the whole program was the redex).
    Step {
        program: Program,
        rule: Rule,
        root: Rule,
    },
    Stuck(String),
}

impl StepOutcome {
    pub fn program(&self) -> Option<&Program> {
        match self {
            StepOutcome::Step { program, .. } => Some(program),
            _ => None,
        }
    }
}

/// One deterministic reduction step.
pub fn step(pi: &NeutralContext, p: &Program) -> StepOutcome {
    if let Err(e) = check_scope(pi, p) {
        return StepOutcome::Stuck(e.to_string());
    }
    let next = pi.names().iter().filter_map(Name::fresh_index).fold(max_fresh_index(p), u64::max);
    let mut s = Stepper { pi: pi.names().to_vec(), next };
    match s.go(p) {
        Out::Normal => StepOutcome::Normal,
        Out::Step(program, rule, root) => StepOutcome::Step { program, rule, root },
        Out::Stuck(r) => StepOutcome::Stuck(r),
    }
}

enum Out {
    Normal,
    Step(Program, Rule, Rule),
    Stuck(String),
}

/// Propagates a subterm step through a congruence rule, or falls through
/// when the subterm is normal.
macro_rules! congruence {
    ($self:ident, $sub:expr, $rule:expr, |$x:ident| $wrap:expr) => {
        match $sub {
            Out::Step($x, leaf, _) => return Out::Step($wrap, leaf, $rule),
            Out::Stuck(r) => return Out::Stuck(r),
            Out::Normal => {}
        }
    };
}

struct Stepper {
    pi: Vec<Name>,
    next: u64,
}

fn is_canonical_shape(p: &Program) -> bool {
    matches!(
        p,
        Program::Unit(_)
            | Program::Pair(..)
            | Program::Lam { .. }
            | Program::SuspTerm(_)
            | Program::SuspCirc(_)
            | Program::DownIntro(_)
    )
}

fn is_neutral_shape(p: &Program) -> bool {
    matches!(p, Program::Var(_, Color::Circuit) | Program::Gate(_) | Program::App(_, _, Color::Circuit))
}

impl Stepper {
    fn fresh(&mut self) -> Name {
        self.next += 1;
        fresh_name(self.next)
    }

    /// Binder name to use when reducing under `b`: fresh if `b` is already in
    /// scope as a neutral variable.
    fn scope_binder(&mut self, b: &Name, body: &Program) -> (Name, Program) {
        if self.pi.contains(b) {
            let n = self.fresh();
            let body = rename_free(body, b, &n);
            (n, body)
        } else {
            (b.clone(), body.clone())
        }
    }

    fn under(&mut self, names: &[Name], body: &Program) -> Out {
        let k = names.len();
        self.pi.extend(names.iter().cloned());
        let r = self.go(body);
        self.pi.truncate(self.pi.len() - k);
        r
    }

    /// Reduces the body of a match whose scrutinee is neutral.
    fn match_body(&mut self, scrutinee: &Program, pattern: &Pattern, color: (Color, Color), rule: Rule) -> Out {
        let (pattern, names) = match pattern {
            Pattern::Unit(_) => (pattern.clone(), vec![]),
            Pattern::Pair(x, y, body) => {
                let (x2, body) = self.scope_binder(x, body);
                let (y2, body) = if y == x { (y.clone(), body) } else { self.scope_binder(y, &body) };
                (Pattern::Pair(x2.clone(), y2.clone(), Box::new(body)), vec![x2, y2])
            }
            Pattern::Down(..) => return Out::Stuck("down pattern on a neutral scrutinee".into()),
        };
        let sub = self.under(&names, pattern.body());
        congruence!(self, sub, rule, |b| Program::Match {
            scrutinee: Box::new(scrutinee.clone()),
            pattern: pattern.with_body(b),
            scrutinee_color: color.0,
            body_color: color.1,
        });
        Out::Normal
    }

    /// Commutes a normal match `m` outward past the context `wrap`, renaming
    /// its binders away from `avoid`.
    fn commute(&mut self, m: &Program, avoid: &BTreeSet<Name>, wrap: impl FnOnce(Program) -> Program) -> Program {
        let Program::Match { scrutinee, pattern, scrutinee_color, .. } = m else {
            unreachable!("commute expects a match");
        };
        let mut rename = |b: &Name, body: Program| -> (Name, Program) {
            if avoid.contains(b) {
                let n = self.fresh();
                let body = rename_free(&body, b, &n);
                (n, body)
            } else {
                (b.clone(), body)
            }
        };
        let pattern = match pattern {
            Pattern::Unit(body) => Pattern::Unit(Box::new(wrap((**body).clone()))),
            Pattern::Pair(x, y, body) => {
                let (x2, body) = rename(x, (**body).clone());
                let (y2, body) = rename(y, body);
                Pattern::Pair(x2, y2, Box::new(wrap(body)))
            }
            Pattern::Down(x, body) => {
                let (x2, body) = rename(x, (**body).clone());
                Pattern::Down(x2, Box::new(wrap(body)))
            }
        };
        let body_color = pattern.body().color();
        Program::Match { scrutinee: scrutinee.clone(), pattern, scrutinee_color: *scrutinee_color, body_color }
    }

    fn go(&mut self, p: &Program) -> Out {
        match p {
            Program::Var(x, Color::Functional) => Out::Stuck(format!("free functional variable `{x}`")),
            Program::Var(x, Color::Circuit) => {
                if self.pi.contains(x) {
                    Out::Normal
                } else {
                    Out::Stuck(format!("circuit variable `{x}` is not in scope"))
                }
            }
            Program::Gate(_) | Program::Unit(_) => Out::Normal,
            Program::SuspTerm(_) | Program::SuspCirc(_) => Out::Normal,
            Program::Lam { color: Color::Functional, .. } => Out::Normal,
            Program::Lam { binder, annot, body, color: Color::Circuit } => {
                let (b, body) = self.scope_binder(binder, body);
                let sub = self.under(std::slice::from_ref(&b), &body);
                congruence!(self, sub, Rule::CLam, |x| Program::Lam {
                    binder: b.clone(),
                    annot: annot.clone(),
                    body: Box::new(x),
                    color: Color::Circuit,
                });
                Out::Normal
            }
            Program::Pair(a, b, c) => {
                let (r1, r2) = match c {
                    Color::Functional => (Rule::FPairLeft, Rule::FPairRight),
                    Color::Circuit => (Rule::CPairLeft, Rule::CPairRight),
                };
                let sub = self.go(a);
                congruence!(self, sub, r1, |x| Program::pair(x, (**b).clone(), *c));
                let sub = self.go(b);
                congruence!(self, sub, r2, |x| Program::pair((**a).clone(), x, *c));
                Out::Normal
            }
            Program::DownIntro(m) => {
                let sub = self.go(m);
                congruence!(self, sub, Rule::FDown, |x| Program::down(x));
                Out::Normal
            }
            Program::App(f, a, Color::Functional) => {
                let sub = self.go(f);
                congruence!(self, sub, Rule::FAppFun, |x| Program::app(x, (**a).clone(), Color::Functional));
                let sub = self.go(a);
                congruence!(self, sub, Rule::FAppArg, |x| Program::app((**f).clone(), x, Color::Functional));
                match &**f {
                    Program::Lam { binder, body, color: Color::Functional, .. } => {
                        let out = crate::syntax::subst(body, binder, a);
                        Out::Step(out, Rule::FAppBeta, Rule::FAppBeta)
                    }
                    Program::Match { .. } => {
                        let avoid = free_vars(a);
                        let out = self.commute(f, &avoid, |v| Program::app(v, (**a).clone(), Color::Functional));
                        Out::Step(out, Rule::FAppCc, Rule::FAppCc)
                    }
                    other => Out::Stuck(format!("cannot apply `{other}`")),
                }
            }
            Program::App(f, a, Color::Circuit) => {
                let sub = self.go(f);
                congruence!(self, sub, Rule::CAppFun, |x| Program::app(x, (**a).clone(), Color::Circuit));
                let sub = self.go(a);
                congruence!(self, sub, Rule::CAppArg, |x| Program::app((**f).clone(), x, Color::Circuit));
                match &**f {
                    Program::Lam { binder, body, color: Color::Circuit, .. } => {
                        let out = crate::syntax::subst(body, binder, a);
                        Out::Step(out, Rule::CAppBeta, Rule::CAppBeta)
                    }
                    Program::Match { .. } => {
                        let avoid = free_vars(a);
                        let out = self.commute(f, &avoid, |v| Program::app(v, (**a).clone(), Color::Circuit));
                        Out::Step(out, Rule::CAppCcFun, Rule::CAppCcFun)
                    }
                    Program::Gate(_) if matches!(**a, Program::Match { .. }) => {
                        let out = self.commute(a, &BTreeSet::new(), |v| Program::app((**f).clone(), v, Color::Circuit));
                        Out::Step(out, Rule::CAppCcArg, Rule::CAppCcArg)
                    }
                    Program::Gate(_) => Out::Normal,
                    other => Out::Stuck(format!("cannot apply `{other}`")),
                }
            }
            Program::Force(m, c) => {
                let (inner, base, cc) = match c {
                    Color::Functional => (Rule::FForceInner, Rule::FForce, Rule::FForceCc),
                    Color::Circuit => (Rule::CForceInner, Rule::CForce, Rule::CForceCc),
                };
                let sub = self.go(m);
                congruence!(self, sub, inner, |x| Program::force(x, *c));
                match (&**m, c) {
                    (Program::SuspTerm(body), Color::Functional) | (Program::SuspCirc(body), Color::Circuit) => {
                        Out::Step((**body).clone(), base, base)
                    }
                    (Program::Match { .. }, _) => {
                        let out = self.commute(m, &BTreeSet::new(), |v| Program::force(v, *c));
                        Out::Step(out, cc, cc)
                    }
                    (other, _) => Out::Stuck(format!("cannot force `{other}`")),
                }
            }
            Program::Match { scrutinee, pattern, scrutinee_color, body_color } => {
                let (scrut_rule, k_rule, body_rule, cc_rule) = match (scrutinee_color, body_color) {
                    (Color::Functional, Color::Functional) => {
                        (Rule::FMatchScrut, Rule::FMatchCanonical, None, Rule::FMatchCc)
                    }
                    (Color::Circuit, Color::Functional) => {
                        (Rule::FMatchCircScrut, Rule::FMatchCanonical, Some(Rule::FMatchCircBody), Rule::FMatchCircCc)
                    }
                    (Color::Circuit, Color::Circuit) => {
                        (Rule::CMatchScrut, Rule::CMatchCanonical, Some(Rule::CMatchBody), Rule::CMatchCc)
                    }
                    (Color::Functional, Color::Circuit) => {
                        return Out::Stuck("functional scrutinee with a circuit body".into())
                    }
                };
                let sub = self.go(scrutinee);
                congruence!(self, sub, scrut_rule, |x| Program::Match {
                    scrutinee: Box::new(x),
                    pattern: pattern.clone(),
                    scrutinee_color: *scrutinee_color,
                    body_color: *body_color,
                });
                if is_canonical_shape(scrutinee) {
                    return match eliminate_canonical(scrutinee, pattern) {
                        Ok(out) => Out::Step(out, k_rule, k_rule),
                        Err(e) => Out::Stuck(e.to_string()),
                    };
                }
                if let Program::Match { .. } = **scrutinee {
                    let mut outer = Program::Match {
                        scrutinee: Box::new(Program::Unit(Color::Functional)),
                        pattern: pattern.clone(),
                        scrutinee_color: *scrutinee_color,
                        body_color: *body_color,
                    };
                    let avoid = free_vars(&outer);
                    let out = self.commute(scrutinee, &avoid, |v| {
                        if let Program::Match { scrutinee, .. } = &mut outer {
                            **scrutinee = v;
                        }
                        outer
                    });
                    return Out::Step(out, cc_rule, cc_rule);
                }
                match body_rule {
                    Some(rule) if is_neutral_shape(scrutinee) => {
                        self.match_body(scrutinee, pattern, (*scrutinee_color, *body_color), rule)
                    }
                    _ => Out::Stuck(format!("cannot match on `{scrutinee}`")),
                }
            }
        }
    }
}
