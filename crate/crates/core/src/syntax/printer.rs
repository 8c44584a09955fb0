use super::{Color, Pattern, Program, Type};

pub fn print_type(t: &Type) -> String {
    let mut s = String::new();
    ty(t, &mut s);
    s
}

fn ty_operand(t: &Type, out: &mut String) {
    if matches!(t, Type::Tensor(..) | Type::Arrow(..)) {
        out.push('(');
        ty(t, out);
        out.push(')');
    } else {
        ty(t, out);
    }
}

fn ty(t: &Type, out: &mut String) {
    match t {
        Type::Unit(m) => {
            out.push_str("unit@");
            out.push(m.letter());
        }
        Type::Qubit => out.push_str("qubit"),
        Type::Tensor(a, b, m) | Type::Arrow(a, b, m) => {
            ty_operand(a, out);
            out.push_str(if matches!(t, Type::Tensor(..)) { " * " } else { " -o " });
            ty_operand(b, out);
            out.push_str(" @");
            out.push(m.letter());
        }
        Type::Up(a) => {
            out.push_str("Up ");
            ty_operand(a, out);
        }
        Type::Down(a) => {
            out.push_str("Down ");
            ty_operand(a, out);
        }
    }
}

pub fn print_program(p: &Program) -> String {
    let mut s = String::new();
    if p.color() == Color::Circuit {
        circ(p, Level::Top, &mut s);
    } else {
        term(p, Level::Top, &mut s);
    }
    s
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Top,
    Head,
    Atom,
}

fn term_level(p: &Program) -> Level {
    match p {
        Program::Lam { .. } | Program::Match { .. } => Level::Top,
        Program::App(..) => Level::Head,
        Program::SuspTerm(_) | Program::DownIntro(_) | Program::Force(..) => Level::Top,
        _ => Level::Atom,
    }
}

fn circ_level(p: &Program) -> Level {
    match p {
        Program::Lam { .. } | Program::Match { .. } => Level::Top,
        Program::App(..) => Level::Head,
        _ => Level::Atom,
    }
}

fn binder(p: &Program, out: &mut String) {
    if let Program::Lam { binder, annot, .. } = p {
        match annot {
            Some(t) => {
                out.push('(');
                out.push_str(binder.as_str());
                out.push_str(" : ");
                ty(t, out);
                out.push(')');
            }
            None => out.push_str(binder.as_str()),
        }
    }
}

fn pattern(pat: &Pattern, body_printer: fn(&Program, Level, &mut String), out: &mut String) {
    match pat {
        Pattern::Unit(_) => out.push_str("()"),
        Pattern::Pair(x, y, _) => {
            out.push('(');
            out.push_str(x.as_str());
            out.push_str(", ");
            out.push_str(y.as_str());
            out.push(')');
        }
        Pattern::Down(x, _) => {
            out.push_str("down ");
            out.push_str(x.as_str());
        }
    }
    out.push_str(" => ");
    body_printer(pat.body(), Level::Top, out);
}

fn term(p: &Program, at: Level, out: &mut String) {
    if p.color() == Color::Circuit {
        // Only reachable for ill-colored programs; keep the output readable.
        circ(p, at, out);
        return;
    }
    if term_level(p) < at {
        out.push('(');
        term(p, Level::Top, out);
        out.push(')');
        return;
    }
    match p {
        Program::Var(x, _) => out.push_str(x.as_str()),
        Program::Unit(_) => out.push_str("()"),
        Program::Pair(a, b, _) => {
            out.push('(');
            term(a, Level::Top, out);
            out.push_str(", ");
            term(b, Level::Top, out);
            out.push(')');
        }
        Program::Lam { body, .. } => {
            out.push_str("fn ");
            binder(p, out);
            out.push_str(" => ");
            term(body, Level::Top, out);
        }
        Program::SuspTerm(m) => {
            out.push_str("susp ");
            term(m, Level::Atom, out);
        }
        Program::SuspCirc(c) => {
            out.push_str("circ { ");
            circ(c, Level::Top, out);
            out.push_str(" }");
        }
        Program::DownIntro(m) => {
            out.push_str("down ");
            term(m, Level::Atom, out);
        }
        Program::Force(m, _) => {
            out.push_str("force ");
            term(m, Level::Atom, out);
        }
        Program::App(f, a, _) => {
            term(f, Level::Head, out);
            out.push(' ');
            term(a, Level::Atom, out);
        }
        Program::Match { scrutinee, pattern: pat, scrutinee_color, .. } => {
            out.push_str("match ");
            if *scrutinee_color == Color::Circuit {
                out.push_str("circval ");
                circ(scrutinee, Level::Head, out);
            } else {
                term(scrutinee, Level::Head, out);
            }
            out.push_str(" with { ");
            pattern(pat, term, out);
            out.push_str(" }");
        }
        Program::Gate(_) => unreachable!("gates are circuits"),
    }
}

fn circ(p: &Program, at: Level, out: &mut String) {
    if p.color() == Color::Functional {
        term(p, at, out);
        return;
    }
    if circ_level(p) < at {
        out.push('(');
        circ(p, Level::Top, out);
        out.push(')');
        return;
    }
    match p {
        Program::Var(x, _) => out.push_str(x.as_str()),
        Program::Gate(g) => {
            out.push('#');
            out.push_str(g.as_str());
        }
        Program::Unit(_) => out.push_str("()"),
        Program::Pair(a, b, _) => {
            out.push('(');
            circ(a, Level::Top, out);
            out.push_str(", ");
            circ(b, Level::Top, out);
            out.push(')');
        }
        Program::Lam { body, .. } => {
            out.push_str("lam ");
            binder(p, out);
            out.push_str(" => ");
            circ(body, Level::Top, out);
        }
        Program::App(f, a, _) => {
            circ(f, Level::Head, out);
            out.push(' ');
            circ(a, Level::Atom, out);
        }
        Program::Force(m, _) => {
            out.push_str("force { ");
            term(m, Level::Top, out);
            out.push_str(" }");
        }
        Program::Match { scrutinee, pattern: pat, .. } => {
            out.push_str("match ");
            circ(scrutinee, Level::Head, out);
            out.push_str(" with { ");
            pattern(pat, circ, out);
            out.push_str(" }");
        }
        Program::SuspTerm(_) | Program::SuspCirc(_) | Program::DownIntro(_) => unreachable!("functional forms"),
    }
}
