//! Independent evaluation of every rule's premises, used to confirm that at
//! most one rule applies to any program and that [`step`] picks it.

use thiserror::Error;

use super::{check_scope, classify_unchecked, step, DynError, FormClass, NeutralContext, Rule, StepOutcome};
use crate::syntax::{Color, Name, Pattern, Program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at `{program}`: applicable rules {applicable:?}, step chose {chosen}")]
pub struct AuditViolation {
    pub program: String,
    pub applicable: Vec<Rule>,
    pub chosen: String,
}

struct Premises<'a> {
    pi: &'a NeutralContext,
}

impl Premises<'_> {
    fn extended(&self, names: &[&Name]) -> NeutralContext {
        let mut pi = self.pi.clone();
        for n in names {
            pi.insert((*n).clone());
        }
        pi
    }

    fn steps_in(pi: &NeutralContext, m: &Program) -> bool {
        matches!(step(pi, m), StepOutcome::Step { .. })
    }

    fn steps(&self, m: &Program) -> bool {
        Self::steps_in(self.pi, m)
    }

    fn class(&self, m: &Program) -> FormClass {
        classify_unchecked(self.pi.names(), m)
    }

    fn normal(&self, m: &Program) -> bool {
        self.class(m).is_normal()
    }

    fn body_steps(&self, pattern: &Pattern) -> bool {
        if matches!(pattern, Pattern::Down(..)) {
            return false;
        }
        Self::steps_in(&self.extended(&pattern.binders()), pattern.body())
    }
}

/// Every rule whose conclusion matches `p` and whose premises hold.
pub fn applicable_rules(pi: &NeutralContext, p: &Program) -> Result<Vec<Rule>, DynError> {
    check_scope(pi, p)?;
    let q = Premises { pi };
    let mut out = Vec::new();
    let mut add = |cond: bool, r: Rule| {
        if cond {
            out.push(r);
        }
    };
    match p {
        Program::App(f, a, Color::Functional) => {
            add(q.steps(f), Rule::FAppFun);
            add(q.normal(f) && q.steps(a), Rule::FAppArg);
            add(matches!(**f, Program::Lam { color: Color::Functional, .. }) && q.normal(a), Rule::FAppBeta);
            add(q.class(f) == FormClass::NormalMatch && q.normal(a), Rule::FAppCc);
        }
        Program::App(f, a, Color::Circuit) => {
            add(q.steps(f), Rule::CAppFun);
            add(q.normal(f) && q.steps(a), Rule::CAppArg);
            add(
                matches!(**f, Program::Lam { color: Color::Circuit, .. })
                    && q.class(f) == FormClass::Canonical
                    && q.normal(a),
                Rule::CAppBeta,
            );
            add(q.class(f) == FormClass::NormalMatch && q.normal(a), Rule::CAppCcFun);
            add(matches!(**f, Program::Gate(_)) && q.class(a) == FormClass::NormalMatch, Rule::CAppCcArg);
        }
        Program::Force(m, Color::Functional) => {
            add(matches!(**m, Program::SuspTerm(_)), Rule::FForce);
            add(q.steps(m), Rule::FForceInner);
            add(q.class(m) == FormClass::NormalMatch, Rule::FForceCc);
        }
        Program::Force(m, Color::Circuit) => {
            add(matches!(**m, Program::SuspCirc(_)), Rule::CForce);
            add(q.steps(m), Rule::CForceInner);
            add(q.class(m) == FormClass::NormalMatch, Rule::CForceCc);
        }
        Program::Pair(a, b, c) => {
            let (r1, r2) = match c {
                Color::Functional => (Rule::FPairLeft, Rule::FPairRight),
                Color::Circuit => (Rule::CPairLeft, Rule::CPairRight),
            };
            add(q.steps(a), r1);
            add(q.normal(a) && q.steps(b), r2);
        }
        Program::DownIntro(m) => add(q.steps(m), Rule::FDown),
        Program::Lam { binder, body, color: Color::Circuit, .. } => {
            add(Premises::steps_in(&q.extended(&[binder]), body), Rule::CLam);
        }
        Program::Match { scrutinee, pattern, scrutinee_color, body_color } => {
            let class = q.class(scrutinee);
            match (scrutinee_color, body_color) {
                (Color::Functional, Color::Functional) => {
                    add(q.steps(scrutinee), Rule::FMatchScrut);
                    add(class == FormClass::Canonical, Rule::FMatchCanonical);
                    add(class == FormClass::NormalMatch, Rule::FMatchCc);
                }
                (Color::Circuit, Color::Functional) => {
                    add(class == FormClass::Canonical, Rule::FMatchCanonical);
                    add(q.steps(scrutinee), Rule::FMatchCircScrut);
                    add(class == FormClass::Neutral && q.body_steps(pattern), Rule::FMatchCircBody);
                    add(class == FormClass::NormalMatch, Rule::FMatchCircCc);
                }
                (Color::Circuit, Color::Circuit) => {
                    add(q.steps(scrutinee), Rule::CMatchScrut);
                    add(class == FormClass::Canonical, Rule::CMatchCanonical);
                    add(class == FormClass::Neutral && q.body_steps(pattern), Rule::CMatchBody);
                    add(class == FormClass::NormalMatch, Rule::CMatchCc);
                }
                (Color::Functional, Color::Circuit) => {}
            }
        }
        Program::Var(..)
        | Program::Unit(_)
        | Program::Gate(_)
        | Program::SuspTerm(_)
        | Program::SuspCirc(_)
        | Program::Lam { color: Color::Functional, .. } => {}
    }
    Ok(out)
}

/// Checks that exactly the rule `step` used applies at every level of its
/// derivation, and that no rule applies when `step` reports a normal form.
pub fn audit_step(pi: &NeutralContext, p: &Program) -> Result<(), AuditViolation> {
    let violation =
        |applicable: Vec<Rule>, chosen: String| AuditViolation { program: p.to_string(), applicable, chosen };
    let applicable = match applicable_rules(pi, p) {
        Ok(rules) => rules,
        Err(_) => return Ok(()),
    };
    let outcome = step(pi, p);
    let root = match &outcome {
        StepOutcome::Normal | StepOutcome::Stuck(_) => {
            let label = if matches!(outcome, StepOutcome::Normal) { "normal" } else { "stuck" };
            if !applicable.is_empty() {
                return Err(violation(applicable, label.into()));
            }
            let normal = classify_unchecked(pi.names(), p).is_normal();
            if normal != matches!(outcome, StepOutcome::Normal) {
                return Err(violation(applicable, format!("{label} but classified normal = {normal}")));
            }
            return Ok(());
        }
        StepOutcome::Step { root, .. } => *root,
    };
    if applicable != [root] {
        return Err(violation(applicable, root.name().into()));
    }
    if !root.is_congruence() {
        return Ok(());
    }
    // descend along the premise
    let extend = |names: &[&Name]| {
        let mut pi = pi.clone();
        for n in names {
            pi.insert((*n).clone());
        }
        pi
    };
    match (root, p) {
        (
            Rule::FAppFun | Rule::CAppFun | Rule::FPairLeft | Rule::CPairLeft,
            Program::App(a, _, _) | Program::Pair(a, _, _),
        ) => audit_step(pi, a),
        (
            Rule::FAppArg | Rule::CAppArg | Rule::FPairRight | Rule::CPairRight,
            Program::App(_, b, _) | Program::Pair(_, b, _),
        ) => audit_step(pi, b),
        (Rule::FForceInner | Rule::CForceInner, Program::Force(m, _)) | (Rule::FDown, Program::DownIntro(m)) => {
            audit_step(pi, m)
        }
        (Rule::CLam, Program::Lam { binder, body, .. }) => audit_step(&extend(&[binder]), body),
        (Rule::FMatchScrut | Rule::FMatchCircScrut | Rule::CMatchScrut, Program::Match { scrutinee, .. }) => {
            audit_step(pi, scrutinee)
        }
        (Rule::FMatchCircBody | Rule::CMatchBody, Program::Match { pattern, .. }) => {
            audit_step(&extend(&pattern.binders()), pattern.body())
        }
        _ => Err(violation(applicable, format!("{root} does not fit the program shape"))),
    }
}
