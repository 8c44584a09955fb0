use std::fmt;

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Hash(String),
    Fn,
    Lam,
    Susp,
    Circ,
    Down,
    Force,
    Match,
    With,
    Circval,
    Gate,
    KwUnit,
    KwQubit,
    KwUp,
    KwDown,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Arrow,
    Colon,
    Star,
    Lolli,
    At,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Hash(s) => return write!(f, "gate `#{s}`"),
            Tok::Fn => "`fn`",
            Tok::Lam => "`lam`",
            Tok::Susp => "`susp`",
            Tok::Circ => "`circ`",
            Tok::Down => "`down`",
            Tok::Force => "`force`",
            Tok::Match => "`match`",
            Tok::With => "`with`",
            Tok::Circval => "`circval`",
            Tok::Gate => "`gate`",
            Tok::KwUnit => "`unit`",
            Tok::KwQubit => "`qubit`",
            Tok::KwUp => "`Up`",
            Tok::KwDown => "`Down`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Arrow => "`=>`",
            Tok::Colon => "`:`",
            Tok::Star => "`*`",
            Tok::Lolli => "`-o`",
            Tok::At => "`@`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "fn" => Tok::Fn,
        "lam" => Tok::Lam,
        "susp" => Tok::Susp,
        "circ" => Tok::Circ,
        "down" => Tok::Down,
        "force" => Tok::Force,
        "match" => Tok::Match,
        "with" => Tok::With,
        "circval" => Tok::Circval,
        "gate" => Tok::Gate,
        "unit" => Tok::KwUnit,
        "qubit" => Tok::KwQubit,
        "Up" => Tok::KwUp,
        "Down" => Tok::KwDown,
        _ => return None,
    })
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, (Span, String)> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        let next = chars.get(i + 1).copied();
        if c == '-' && next == Some('-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let simple = match (c, next) {
            ('-', Some('o')) => Some((Tok::Lolli, 2)),
            ('=', Some('>')) => Some((Tok::Arrow, 2)),
            ('(', _) => Some((Tok::LParen, 1)),
            (')', _) => Some((Tok::RParen, 1)),
            ('{', _) => Some((Tok::LBrace, 1)),
            ('}', _) => Some((Tok::RBrace, 1)),
            (',', _) => Some((Tok::Comma, 1)),
            (':', _) => Some((Tok::Colon, 1)),
            ('*', _) => Some((Tok::Star, 1)),
            ('@', _) => Some((Tok::At, 1)),
            _ => None,
        };
        if let Some((tok, n)) = simple {
            // `-o` must not swallow the start of an identifier such as `-ops`.
            if !(tok == Tok::Lolli && chars.get(i + 2).is_some_and(|&c| is_ident_char(c))) {
                out.push(Token { tok, span });
                advance(n, &mut i, &mut col);
                continue;
            }
        }
        let word = |start: usize| {
            let mut j = start;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            (chars[start..j].iter().collect::<String>(), j)
        };
        if c == '#' {
            if !next.is_some_and(is_ident_start) {
                return Err((span, "expected a gate name after `#`".into()));
            }
            let (w, j) = word(i + 1);
            out.push(Token { tok: Tok::Hash(w), span });
            col += j - i;
            i = j;
            continue;
        }
        if c == '%' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j == i + 1 {
                return Err((span, "expected digits after `%`".into()));
            }
            out.push(Token { tok: Tok::Ident(chars[i..j].iter().collect()), span });
            col += j - i;
            i = j;
            continue;
        }
        if is_ident_start(c) {
            let (w, j) = word(i);
            let tok = keyword(&w).unwrap_or(Tok::Ident(w));
            out.push(Token { tok, span });
            col += j - i;
            i = j;
            continue;
        }
        return Err((span, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, col } });
    Ok(out)
}
