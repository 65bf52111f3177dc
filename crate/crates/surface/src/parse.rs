//! Recursive-descent parser.
//!
//! Precedence, loosest to tightest: binders (`[x] M`, `{x:A} B`) extend
//! maximally to the right, then ascription `:`, then arrows, then
//! application. `->` is right associative, `<-` left associative, and the
//! two may not be mixed in one chain without parentheses.

use thiserror::Error;

use crate::ast::*;
use crate::lex::{lex, LexError, Span, Tok};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{span}: {msg}")]
pub struct ParseError {
    pub span: Span,
    pub msg: String,
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> ParseError {
        ParseError {
            span: e.span,
            msg: e.msg,
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> Span {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, s)| *s)
            .unwrap_or(Span { line: 1, col: 1 })
    }

    fn bump(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            span: self.span(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<Span, ParseError> {
        match self.bump() {
            Some((t, s)) if &t == want => Ok(s),
            Some((t, s)) => Err(ParseError {
                span: s,
                msg: format!("expected {what}, found `{t}`"),
            }),
            None => self.err(format!("expected {what}, found end of input")),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match self.bump() {
            Some((Tok::Ident(s), sp)) if s != "->" && s != "<-" => Ok((s, sp)),
            Some((t, sp)) => Err(ParseError {
                span: sp,
                msg: format!("expected {what}, found `{t}`"),
            }),
            None => self.err(format!("expected {what}, found end of input")),
        }
    }

    /// Can the next token begin an atom?
    fn at_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => s != "->" && s != "<-",
            Some(Tok::Meta(_) | Tok::Underscore | Tok::LParen | Tok::LBracket | Tok::LBrace) => {
                true
            }
            _ => false,
        }
    }

    fn at_binder(&self) -> bool {
        matches!(self.peek(), Some(Tok::LBracket | Tok::LBrace))
    }

    /// `[x] M`, `[x : A] M`, `{x : A} B`, `{x} B`; the body runs to the end
    /// of the enclosing term.
    fn parse_binder(&mut self) -> Result<STerm, ParseError> {
        let (open, span) = self.bump().expect("caller checked at_binder");
        let lam = open == Tok::LBracket;
        let close = if lam { Tok::RBracket } else { Tok::RBrace };
        let (binder, _) = self.expect_ident("a binder name")?;
        let ann = if self.peek() == Some(&Tok::Colon) {
            self.bump();
            Some(Box::new(self.parse_term()?))
        } else {
            None
        };
        self.expect(&close, if lam { "`]`" } else { "`}`" })?;
        let body = Box::new(self.parse_term()?);
        Ok(if lam {
            STerm::Lam {
                binder,
                ann,
                body,
                span,
            }
        } else {
            STerm::Pi {
                binder,
                ann,
                body,
                span,
            }
        })
    }

    fn parse_atom(&mut self) -> Result<STerm, ParseError> {
        if self.at_binder() {
            return self.parse_binder();
        }
        match self.bump() {
            Some((Tok::Ident(s), sp)) => Ok(if s == "type" {
                STerm::TypeKw(sp)
            } else {
                STerm::Ident(s, sp)
            }),
            Some((Tok::Meta(s), sp)) => Ok(STerm::Meta(s, sp)),
            Some((Tok::Underscore, sp)) => Ok(STerm::Hole(sp)),
            Some((Tok::LParen, _)) => {
                let t = self.parse_term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some((t, sp)) => Err(ParseError {
                span: sp,
                msg: format!("expected a term, found `{t}`"),
            }),
            None => self.err("expected a term, found end of input"),
        }
    }

    fn parse_app(&mut self) -> Result<STerm, ParseError> {
        let mut t = self.parse_atom()?;
        while self.at_atom() {
            // A trailing binder swallows the rest of the term, so it is
            // necessarily the last argument.
            let done = self.at_binder();
            let arg = self.parse_atom()?;
            t = STerm::App(Box::new(t), Box::new(arg));
            if done {
                break;
            }
        }
        Ok(t)
    }

    fn parse_arrows(&mut self) -> Result<STerm, ParseError> {
        let first = self.parse_app()?;
        let mut dir: Option<&'static str> = None;
        let mut operands = vec![first];
        loop {
            let next = match self.peek() {
                Some(Tok::Ident(s)) if s == "->" => "->",
                Some(Tok::Ident(s)) if s == "<-" => "<-",
                _ => break,
            };
            let (_, sp) = self.bump().unwrap();
            match dir {
                None => dir = Some(next),
                Some(d) if d == next => {}
                Some(d) => {
                    return Err(ParseError {
                        span: sp,
                        msg: format!(
                            "cannot mix `{next}` with `{d}` in one chain; parenthesize"
                        ),
                    })
                }
            }
            operands.push(self.parse_app()?);
        }
        Ok(match dir {
            None => operands.pop().unwrap(),
            Some("->") => {
                let mut t = operands.pop().unwrap();
                while let Some(l) = operands.pop() {
                    t = STerm::Arrow(Box::new(l), Box::new(t));
                }
                t
            }
            Some(_) => {
                let mut it = operands.into_iter();
                let mut t = it.next().unwrap();
                for r in it {
                    t = STerm::Backarrow(Box::new(t), Box::new(r));
                }
                t
            }
        })
    }

    fn parse_term(&mut self) -> Result<STerm, ParseError> {
        if self.at_binder() {
            return self.parse_binder();
        }
        let t = self.parse_arrows()?;
        if self.peek() == Some(&Tok::Colon) {
            let (_, sp) = self.bump().unwrap();
            let a = self.parse_term()?;
            return Ok(STerm::Ascribe(Box::new(t), Box::new(a), sp));
        }
        Ok(t)
    }

    fn parse_mode(&mut self, span: Span) -> Result<ModeDecl, ParseError> {
        let (family, _) = self.expect_ident("a family name")?;
        let mut args = Vec::new();
        loop {
            match self.bump() {
                Some((Tok::Dot, _)) => break,
                Some((Tok::Ident(s), sp)) => {
                    let (pol, rest) = match s.as_bytes().first() {
                        Some(b'+') => (Polarity::Input, &s[1..]),
                        Some(b'-') => (Polarity::Output, &s[1..]),
                        _ => {
                            return Err(ParseError {
                                span: sp,
                                msg: format!("mode argument `{s}` must start with `+` or `-`"),
                            })
                        }
                    };
                    if rest.is_empty() {
                        return Err(ParseError {
                            span: sp,
                            msg: "mode argument needs a name after the polarity".into(),
                        });
                    }
                    args.push((pol, rest.to_string()));
                }
                Some((t, sp)) => {
                    return Err(ParseError {
                        span: sp,
                        msg: format!("expected a mode argument or `.`, found `{t}`"),
                    })
                }
                None => return self.err("unterminated %mode declaration"),
            }
        }
        if args.is_empty() {
            return Err(ParseError {
                span,
                msg: "%mode needs at least one argument".into(),
            });
        }
        Ok(ModeDecl { family, args, span })
    }

    fn parse_order_vars(&mut self, close: &Tok) -> Result<Vec<String>, ParseError> {
        let mut vars = Vec::new();
        loop {
            match self.peek() {
                Some(t) if t == close => {
                    self.bump();
                    break;
                }
                Some(Tok::Ident(_)) => vars.push(self.expect_ident("an order variable")?.0),
                _ => return self.err("expected an order variable"),
            }
        }
        if vars.is_empty() {
            return self.err("empty termination order");
        }
        Ok(vars)
    }

    fn parse_total(&mut self, span: Span) -> Result<TotalDecl, ParseError> {
        let order = match self.peek() {
            Some(Tok::LBrace) => {
                self.bump();
                OrderSpec::Lex(self.parse_order_vars(&Tok::RBrace)?)
            }
            Some(Tok::LBracket) => {
                self.bump();
                OrderSpec::Simul(self.parse_order_vars(&Tok::RBracket)?)
            }
            _ => OrderSpec::Single(self.expect_ident("a termination order variable")?.0),
        };
        self.expect(&Tok::LParen, "`(`")?;
        let (family, _) = self.expect_ident("a family name")?;
        let mut args = Vec::new();
        loop {
            match self.bump() {
                Some((Tok::RParen, _)) => break,
                Some((Tok::Underscore, _)) => args.push(None),
                Some((Tok::Ident(s), _)) => args.push(Some(s)),
                Some((t, sp)) => {
                    return Err(ParseError {
                        span: sp,
                        msg: format!("expected a pattern variable or `_`, found `{t}`"),
                    })
                }
                None => return self.err("unterminated %total pattern"),
            }
        }
        self.expect(&Tok::Dot, "`.`")?;
        Ok(TotalDecl {
            order,
            family,
            args,
            span,
        })
    }

    fn parse_decl(&mut self) -> Result<SDecl, ParseError> {
        match self.bump() {
            Some((Tok::Directive(d), span)) => match d.as_str() {
                "mode" => Ok(SDecl::Mode(self.parse_mode(span)?)),
                "total" => Ok(SDecl::Total(self.parse_total(span)?)),
                other => Err(ParseError {
                    span,
                    msg: format!("unsupported directive `%{other}`"),
                }),
            },
            Some((Tok::Ident(name), span)) if name != "->" && name != "<-" => {
                self.expect(&Tok::Colon, "`:`")?;
                let classifier = self.parse_term()?;
                self.expect(&Tok::Dot, "`.`")?;
                Ok(SDecl::Const {
                    name,
                    classifier,
                    span,
                })
            }
            Some((t, span)) => Err(ParseError {
                span,
                msg: format!("expected a declaration, found `{t}`"),
            }),
            None => self.err("expected a declaration"),
        }
    }
}

/// Parse a whole file of declarations.
pub fn parse_file(text: &str) -> Result<SourceFile, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut decls = Vec::new();
    while p.peek().is_some() {
        decls.push(p.parse_decl()?);
    }
    Ok(SourceFile { decls })
}

/// Parse a single term (used for goals); the input may end with `.`.
pub fn parse_term(text: &str) -> Result<STerm, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let t = p.parse_term()?;
    if p.peek() == Some(&Tok::Dot) {
        p.bump();
    }
    match p.bump() {
        None => Ok(t),
        Some((tok, span)) => Err(ParseError {
            span,
            msg: format!("trailing input after term: `{tok}`"),
        }),
    }
}
