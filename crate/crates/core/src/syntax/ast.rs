//! Abstract surface syntax.
//!
//! Equality on [`Term`] and [`Pattern`] ignores spans, so two parses of
//! differently formatted but equivalent source compare equal.

use crate::span::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Mul,
    Div,
    Add,
    Sub,
    Concat,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub const ALL: [BinOp; 13] = [
        BinOp::Mul,
        BinOp::Div,
        BinOp::Add,
        BinOp::Sub,
        BinOp::Concat,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::And,
        BinOp::Or,
    ];

    /// The operator's source text, which is also the name of its primitive.
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Concat => "++",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinOp> {
        BinOp::ALL.into_iter().find(|op| op.symbol() == s)
    }

    /// Binding strength; higher binds tighter. All levels are left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Mul | BinOp::Div => 6,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Concat => 4,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 2,
            BinOp::And | BinOp::Or => 1,
        }
    }
}

/// Precedence of backtick infix application, between `++` and comparisons.
pub const INFIX_FUN_PRECEDENCE: u8 = 3;

#[derive(Debug, Clone)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Term {
    pub fn new(kind: TermKind, span: Span) -> Self {
        Term { kind, span }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TermKind {
    Var(String),
    Int(i64),
    Float(f64),
    Str(String),
    Paragraph(Vec<ParagraphElement>),
    Call(Box<Term>, Vec<Term>),
    Constr(String, Vec<Term>),
    Dict(Vec<(String, Term)>),
    Project(Box<Term>, String),
    DynProject(Box<Term>, Box<Term>),
    /// First-class operator `(+)`.
    Op(BinOp),
    Binary(BinOp, Box<Term>, Box<Term>),
    /// `` a `f` b ``
    InfixFun(String, Box<Term>, Box<Term>),
    If(Box<Term>, Box<Term>, Box<Term>),
    Match(Box<Term>, Vec<MatchClause>),
    List(Vec<Term>),
    /// Qualifiers are non-empty.
    ListComp(Box<Term>, Vec<Qualifier>),
    Lambda(Vec<Pattern>, Box<Term>),
    Doc(Box<Term>, Box<Term>),
    /// A block: local definitions followed by a result term.
    Let(Vec<SurfaceDefinition>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParagraphElement {
    Token(String),
    Unquote(Term),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Qualifier {
    Guard(Term),
    Decl(Pattern, Term),
    Gen(Pattern, Term),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchClause {
    pub pattern: Pattern,
    pub body: Term,
}

#[derive(Debug, Clone)]
pub struct Pattern {
    pub kind: PatternKind,
    pub span: Span,
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Pattern {
    pub fn new(kind: PatternKind, span: Span) -> Self {
        Pattern { kind, span }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternKind {
    /// Includes the wildcard `_`.
    Var(String),
    Dict(Vec<(String, Pattern)>),
    Constr(String, Vec<Pattern>),
    /// `[p1, p2]` or `[p1, *rest]`.
    List(Vec<Pattern>, Option<Box<Pattern>>),
    /// Numeric literal; parsed so it can be reported, never compiled.
    Int(i64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceDefinition {
    Var { pattern: Pattern, body: Term },
    Clause { name: String, params: Vec<Pattern>, body: Term, span: Span },
}

impl SurfaceDefinition {
    pub fn span(&self) -> Span {
        match self {
            SurfaceDefinition::Var { pattern, .. } => pattern.span,
            SurfaceDefinition::Clause { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Import {
    pub path: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SurfaceModule {
    pub imports: Vec<Import>,
    pub defs: Vec<SurfaceDefinition>,
    /// Present iff this module is a program.
    pub body: Option<Term>,
}

pub fn is_constructor_name(name: &str) -> bool {
    name.starts_with(|c: char| c.is_uppercase()) || name == "[]"
}
