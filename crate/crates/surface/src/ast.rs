//! Surface abstract syntax, straight off the parser.

use crate::lex::Span;

#[derive(Clone, Debug, PartialEq)]
pub enum STerm {
    /// Constant, bound variable, or (uppercase) implicit variable.
    Ident(String, Span),
    /// `?name`: a named hole to be solved by reconstruction.
    Meta(String, Span),
    /// `_`: an anonymous hole.
    Hole(Span),
    /// The keyword `type`.
    TypeKw(Span),
    App(Box<STerm>, Box<STerm>),
    Lam {
        binder: String,
        ann: Option<Box<STerm>>,
        body: Box<STerm>,
        span: Span,
    },
    Pi {
        binder: String,
        ann: Option<Box<STerm>>,
        body: Box<STerm>,
        span: Span,
    },
    /// `A -> B`, right associative.
    Arrow(Box<STerm>, Box<STerm>),
    /// `A <- B`, left associative: `B` is a premise of `A`.
    Backarrow(Box<STerm>, Box<STerm>),
    /// `(M : A)`.
    Ascribe(Box<STerm>, Box<STerm>, Span),
}

impl STerm {
    pub fn span(&self) -> Span {
        match self {
            STerm::Ident(_, s)
            | STerm::Meta(_, s)
            | STerm::Hole(s)
            | STerm::TypeKw(s)
            | STerm::Lam { span: s, .. }
            | STerm::Pi { span: s, .. }
            | STerm::Ascribe(_, _, s) => *s,
            STerm::App(f, _) => f.span(),
            STerm::Arrow(l, _) | STerm::Backarrow(l, _) => l.span(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Input,
    Output,
}

/// `%mode fam +X ... -Y.` — polarities for the family's explicit arguments,
/// positional; the names are only mnemonic.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeDecl {
    pub family: String,
    pub args: Vec<(Polarity, String)>,
    pub span: Span,
}

/// Termination order over the variables bound in the `%total` pattern.
#[derive(Clone, Debug, PartialEq)]
pub enum OrderSpec {
    /// `%total X (fam ... X ...)`.
    Single(String),
    /// `%total {X Y} ...`: lexicographic.
    Lex(Vec<String>),
    /// `%total [X Y] ...`: simultaneous.
    Simul(Vec<String>),
}

/// `%total ORDER (fam A1 ... An).` — argument pattern over the family's
/// explicit arguments; `_` leaves a position unnamed.
#[derive(Clone, Debug, PartialEq)]
pub struct TotalDecl {
    pub order: OrderSpec,
    pub family: String,
    pub args: Vec<Option<String>>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SDecl {
    Const {
        name: String,
        classifier: STerm,
        span: Span,
    },
    Mode(ModeDecl),
    Total(TotalDecl),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SourceFile {
    pub decls: Vec<SDecl>,
}
