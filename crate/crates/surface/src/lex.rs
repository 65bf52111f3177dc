//! Tokenizer for the Twelf-style surface syntax.
//!
//! Identifiers are maximal runs of non-reserved characters, so `->`, `<-`
//! and mode arguments like `+D1` come out as ordinary identifiers; the
//! parser gives them meaning. `%` introduces directives (`%mode`, `%total`),
//! line comments (`% ...`), and nestable block comments (`%{ ... }%`).

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Dot,
    Comma,
    Underscore,
    /// `?name`: a named hole.
    Meta(String),
    /// `%name`: a declaration directive.
    Directive(String),
    Ident(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::Colon => write!(f, ":"),
            Tok::Dot => write!(f, "."),
            Tok::Comma => write!(f, ","),
            Tok::Underscore => write!(f, "_"),
            Tok::Meta(s) => write!(f, "?{s}"),
            Tok::Directive(s) => write!(f, "%{s}"),
            Tok::Ident(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{span}: {msg}")]
pub struct LexError {
    pub span: Span,
    pub msg: String,
}

fn reserved(c: char) -> bool {
    matches!(
        c,
        '(' | ')' | '[' | ']' | '{' | '}' | ':' | '.' | ',' | '%' | '?' | '/' | '#' | '"'
    )
}

fn ident_char(c: char) -> bool {
    !c.is_whitespace() && !reserved(c)
}

struct Cursor<'a> {
    rest: std::str::Chars<'a>,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.rest.clone().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.rest.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span {
            line: self.line,
            col: self.col,
        }
    }

    fn take_ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if ident_char(c) {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }
}

/// Tokenize the whole input. Comments are dropped.
pub fn lex(text: &str) -> Result<Vec<(Tok, Span)>, LexError> {
    let mut cur = Cursor {
        rest: text.chars(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let span = cur.span();
        match c {
            _ if c.is_whitespace() => {
                cur.bump();
            }
            '(' | ')' | '[' | ']' | '{' | '}' | ':' | '.' | ',' => {
                cur.bump();
                out.push((
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        ':' => Tok::Colon,
                        '.' => Tok::Dot,
                        _ => Tok::Comma,
                    },
                    span,
                ));
            }
            '%' => {
                cur.bump();
                match cur.peek() {
                    Some('{') => {
                        cur.bump();
                        let mut depth = 1u32;
                        loop {
                            match cur.bump() {
                                None => {
                                    return Err(LexError {
                                        span,
                                        msg: "unterminated block comment".into(),
                                    })
                                }
                                Some('%') if cur.peek() == Some('{') => {
                                    cur.bump();
                                    depth += 1;
                                }
                                Some('}') if cur.peek() == Some('%') => {
                                    cur.bump();
                                    depth -= 1;
                                    if depth == 0 {
                                        break;
                                    }
                                }
                                Some(_) => {}
                            }
                        }
                    }
                    Some(d) if ident_char(d) => {
                        let word = cur.take_ident();
                        out.push((Tok::Directive(word), span));
                    }
                    _ => {
                        // Line comment.
                        while let Some(d) = cur.peek() {
                            if d == '\n' {
                                break;
                            }
                            cur.bump();
                        }
                    }
                }
            }
            '?' => {
                cur.bump();
                let word = cur.take_ident();
                if word.is_empty() {
                    return Err(LexError {
                        span,
                        msg: "`?` must be followed by a hole name".into(),
                    });
                }
                out.push((Tok::Meta(word), span));
            }
            '#' => {
                return Err(LexError {
                    span,
                    msg: "`#` is reserved for generated names".into(),
                })
            }
            '/' | '"' => {
                return Err(LexError {
                    span,
                    msg: format!("reserved character `{c}`"),
                })
            }
            _ => {
                let word = cur.take_ident();
                debug_assert!(!word.is_empty());
                if word == "_" {
                    out.push((Tok::Underscore, span));
                } else {
                    out.push((Tok::Ident(word), span));
                }
            }
        }
    }
    Ok(out)
}
