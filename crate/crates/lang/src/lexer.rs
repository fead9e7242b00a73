use std::fmt;

use crate::diagnostic::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Lowercase-initial identifier, including keywords.
    Ident(String),
    /// Uppercase-initial identifier.
    Var(String),
    Int(i64),
    Directive,
    ColonColon,
    Colon,
    Semi,
    Dot,
    DotDot,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Bar,
    Amp,
    Minus,
    Tilde,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Iff,
    Arrow,
    Supersort,
    Plus,
    Star,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) | Tok::Var(s) => return write!(f, "`{s}`"),
            Tok::Int(v) => return write!(f, "`{v}`"),
            Tok::Directive => ":-",
            Tok::ColonColon => "::",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Comma => ",",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Bar => "|",
            Tok::Amp => "&",
            Tok::Minus => "-",
            Tok::Tilde => "~",
            Tok::Eq => "=",
            Tok::Neq => "\\=",
            Tok::Lt => "<",
            Tok::Le => "=<",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Iff => "<->",
            Tok::Arrow => "->",
            Tok::Supersort => ">>",
            Tok::Plus => "+",
            Tok::Star => "*",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// Character offset of the token's first character.
    pub offset: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        let next = chars.get(i + 1).copied();
        let next2 = chars.get(i + 2).copied();
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let tok = if c.is_ascii_uppercase() {
                Tok::Var(word)
            } else {
                Tok::Ident(word)
            };
            out.push(Token { tok, span, offset: start });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let value = text
                .parse()
                .map_err(|_| Diagnostic::at(span, format!("integer {text} is out of range")))?;
            col += (i - start) as u32;
            out.push(Token {
                tok: Tok::Int(value),
                span,
                offset: start,
            });
            continue;
        }
        let (tok, len) = match (c, next, next2) {
            (':', Some('-'), _) => (Tok::Directive, 2),
            (':', Some(':'), _) => (Tok::ColonColon, 2),
            (':', _, _) => (Tok::Colon, 1),
            (';', _, _) => (Tok::Semi, 1),
            ('.', Some('.'), _) => (Tok::DotDot, 2),
            ('.', _, _) => (Tok::Dot, 1),
            (',', _, _) => (Tok::Comma, 1),
            ('(', _, _) => (Tok::LParen, 1),
            (')', _, _) => (Tok::RParen, 1),
            ('{', _, _) => (Tok::LBrace, 1),
            ('}', _, _) => (Tok::RBrace, 1),
            ('|', _, _) => (Tok::Bar, 1),
            ('&', _, _) => (Tok::Amp, 1),
            ('-', Some('>'), _) => (Tok::Arrow, 2),
            ('-', _, _) => (Tok::Minus, 1),
            ('~', _, _) => (Tok::Tilde, 1),
            ('\\', Some('='), _) => (Tok::Neq, 2),
            ('=', Some('<'), _) => (Tok::Le, 2),
            ('=', _, _) => (Tok::Eq, 1),
            ('<', Some('-'), Some('>')) => (Tok::Iff, 3),
            ('<', Some('='), _) => (Tok::Le, 2),
            ('<', _, _) => (Tok::Lt, 1),
            ('>', Some('>'), _) => (Tok::Supersort, 2),
            ('>', Some('='), _) => (Tok::Ge, 2),
            ('>', _, _) => (Tok::Gt, 1),
            ('+', _, _) => (Tok::Plus, 1),
            ('*', _, _) => (Tok::Star, 1),
            _ => return Err(Diagnostic::at(span, format!("unexpected character `{c}`"))),
        };
        out.push(Token { tok, span, offset: i });
        i += len;
        col += len as u32;
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, col },
        offset: chars.len(),
    });
    Ok(out)
}
