use std::fmt;

use crate::span::SourceSpan;
use crate::syntax::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Str(String),
    /// Unsigned decimal literal, kept as written.
    Number(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Colon,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(_) => f.write_str("string"),
            Tok::Number(n) => write!(f, "number `{n}`"),
            Tok::Eof => f.write_str("end of input"),
            other => write!(f, "`{}`", other.symbol()),
        }
    }
}

impl Tok {
    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            _ => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> (u32, u32) {
        (self.line, self.col)
    }
}

/// Splits `text` into tokens. The final token is always `Eof`.
///
/// Bad escapes and stray characters are recorded and skipped; an unterminated
/// string ends lexing and is reported as the last error.
pub fn lex(text: &str, file: &str) -> (Vec<Token>, Vec<ParseError>) {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();

    while let Some(c) = cur.peek() {
        let start = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            Tok::Ident(word)
        } else if c.is_ascii_digit() {
            let mut num = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_digit() {
                    num.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            if cur.peek() == Some('.') {
                num.push('.');
                cur.bump();
                let frac_start = num.len();
                while let Some(c) = cur.peek() {
                    if c.is_ascii_digit() {
                        num.push(c);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                if num.len() == frac_start {
                    errors.push(ParseError::new(
                        SourceSpan::new(file, start, cur.pos()),
                        "digits after the decimal point",
                        format!("`{num}`"),
                    ));
                    num.push('0');
                }
            }
            Tok::Number(num)
        } else if c == '"' {
            cur.bump();
            let mut s = String::new();
            let mut closed = false;
            while let Some(c) = cur.bump() {
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => {
                        let esc_start = (cur.line, cur.col - 1);
                        match cur.bump() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some(other) => errors.push(ParseError::new(
                                SourceSpan::new(file, esc_start, cur.pos()),
                                "`\\\"` or `\\\\`",
                                format!("escape `\\{other}`"),
                            )),
                            None => break,
                        }
                    }
                    other => s.push(other),
                }
            }
            if !closed {
                errors.push(ParseError::new(
                    SourceSpan::new(file, start, cur.pos()),
                    "closing `\"`",
                    "end of input",
                ));
                tokens.push(Token {
                    tok: Tok::Eof,
                    span: SourceSpan::new(file, cur.pos(), cur.pos()),
                });
                return (tokens, errors);
            }
            Tok::Str(s)
        } else {
            cur.bump();
            let two = |cur: &mut Cursor, next: char, yes: Tok, no: Tok| {
                if cur.peek() == Some(next) {
                    cur.bump();
                    yes
                } else {
                    no
                }
            };
            match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '=' => Tok::Eq,
                '<' => two(&mut cur, '=', Tok::Le, Tok::Lt),
                '>' => two(&mut cur, '=', Tok::Ge, Tok::Gt),
                '!' if cur.peek() == Some('=') => {
                    cur.bump();
                    Tok::Ne
                }
                other => {
                    errors.push(ParseError::new(
                        SourceSpan::new(file, start, cur.pos()),
                        "a token",
                        format!("character `{}`", other.escape_debug()),
                    ));
                    continue;
                }
            }
        };
        tokens.push(Token {
            tok,
            span: SourceSpan::new(file, start, cur.pos()),
        });
    }
    let end = cur.pos();
    tokens.push(Token {
        tok: Tok::Eof,
        span: SourceSpan::new(file, end, end),
    });
    (tokens, errors)
}

/// Whether the last error from [`lex`] stopped lexing early.
pub fn is_fatal(errors: &[ParseError]) -> bool {
    errors.last().is_some_and(|e| e.expected == "closing `\"`")
}
