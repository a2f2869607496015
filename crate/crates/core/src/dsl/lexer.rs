use num_bigint::BigInt;

use super::error::{ParseError, ParseErrorKind, Pos};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigInt),
    Decimal(f64),
    Prime,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Otimes,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(i) => format!("number `{i}`"),
            Tok::Decimal(v) => format!("number `{v:?}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Prime => "'",
            Tok::Eq => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::Otimes => "⊗",
            Tok::Comma => ",",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            _ => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Splits source text into tokens. Newlines inside brackets of any kind are
/// dropped so that long expressions may span lines.
pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut depth: usize = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let mut push = |tok: Tok| out.push(Token { tok, pos });
        match c {
            '\n' => {
                if depth == 0 {
                    push(Tok::Newline);
                }
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_whitespace() => {}
            '\'' => push(Tok::Prime),
            '=' => push(Tok::Eq),
            '+' => push(Tok::Plus),
            '-' | '−' => push(Tok::Minus),
            '*' => push(Tok::Star),
            '/' => push(Tok::Slash),
            '^' => push(Tok::Caret),
            '⊗' => push(Tok::Otimes),
            ',' => push(Tok::Comma),
            '(' | '{' | '[' => {
                depth += 1;
                push(match c {
                    '(' => Tok::LParen,
                    '{' => Tok::LBrace,
                    _ => Tok::LBracket,
                });
            }
            ')' | '}' | ']' => {
                depth = depth.saturating_sub(1);
                push(match c {
                    ')' => Tok::RParen,
                    '}' => Tok::RBrace,
                    _ => Tok::RBracket,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                push(Tok::Ident(s));
                continue;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                let mut decimal = false;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    decimal = true;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // exponent only when digits follow, so `2e` stays `2 e`
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        decimal = true;
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = if decimal {
                    match s.parse::<f64>() {
                        Ok(v) if v.is_finite() && s != "." => Tok::Decimal(v),
                        _ => {
                            return Err(ParseError::new(
                                ParseErrorKind::Lexical,
                                pos,
                                format!("malformed number `{s}`"),
                            ))
                        }
                    }
                } else {
                    Tok::Int(s.parse().expect("digits parse as an integer"))
                };
                push(tok);
                continue;
            }
            other => {
                return Err(ParseError::new(
                    ParseErrorKind::Lexical,
                    pos,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}
