use crate::error::{Error, Result, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Atom or keyword; parameterized atoms arrive normalized (`throw(1,1)`).
    Ident(String),
    /// Probability literal text: `7`, `0.7` or `7/10`.
    Number(String),
    Colon,
    Semi,
    Comma,
    Bar,
    Amp,
    Tilde,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Dot,
    Larrow,
    Rarrow,
    Eq,
    Underscore,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Number(s) => format!("number `{}`", s),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Larrow => "`<-`".into(),
            Tok::Rarrow => "`->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Underscore => "`_`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, SourceSpan)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let span = SourceSpan::new(line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let peek = chars.get(i + 1).copied();
        let single = match c {
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            '|' => Some(Tok::Bar),
            '&' => Some(Tok::Amp),
            '~' => Some(Tok::Tilde),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '.' => Some(Tok::Dot),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            bump!();
            out.push((tok, span));
            continue;
        }
        if c == '<' && peek == Some('-') {
            bump!();
            bump!();
            out.push((Tok::Larrow, span));
            continue;
        }
        if c == '-' && peek == Some('>') {
            bump!();
            bump!();
            out.push((Tok::Rarrow, span));
            continue;
        }
        if c == '_' && !peek.is_some_and(is_ident_char) {
            bump!();
            out.push((Tok::Underscore, span));
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                bump!();
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                s.push('.');
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    bump!();
                }
            } else if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                s.push('/');
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    bump!();
                }
            }
            out.push((Tok::Number(s), span));
            continue;
        }
        if c.is_ascii_lowercase() {
            let mut s = String::new();
            while i < chars.len() && is_ident_char(chars[i]) {
                s.push(chars[i]);
                bump!();
            }
            if i < chars.len() && chars[i] == '(' {
                // parameterized atom: arguments are identifiers or integers
                let mut args = Vec::new();
                bump!();
                loop {
                    while i < chars.len() && chars[i].is_whitespace() {
                        bump!();
                    }
                    let arg_span = SourceSpan::new(line, col);
                    let mut arg = String::new();
                    while i < chars.len() && (is_ident_char(chars[i])) {
                        arg.push(chars[i]);
                        bump!();
                    }
                    if arg.is_empty() {
                        return Err(Error::syntax(arg_span, "expected an atom argument"));
                    }
                    args.push(arg);
                    while i < chars.len() && chars[i].is_whitespace() {
                        bump!();
                    }
                    match chars.get(i) {
                        Some(',') => bump!(),
                        Some(')') => {
                            bump!();
                            break;
                        }
                        _ => {
                            return Err(Error::syntax(
                                SourceSpan::new(line, col),
                                "expected `,` or `)` in atom arguments",
                            ))
                        }
                    }
                }
                s = format!("{}({})", s, args.join(","));
            }
            out.push((Tok::Ident(s), span));
            continue;
        }
        return Err(Error::syntax(span, format!("unexpected character `{}`", c)));
    }
    out.push((Tok::Eof, SourceSpan::new(line, col)));
    Ok(out)
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Cursor over a token stream.
pub(crate) struct Cursor {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self> {
        Ok(Cursor {
            toks: tokenize(text)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub fn span(&self) -> SourceSpan {
        self.toks[self.pos].1.clone()
    }

    pub fn next(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<SourceSpan> {
        if self.peek() == tok {
            Ok(self.next().1)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub fn unexpected(&self, wanted: &str) -> Error {
        Error::syntax(
            self.span(),
            format!("expected {}, found {}", wanted, self.peek().describe()),
        )
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }
}
