use std::fmt;

use crate::span::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Def,
    If,
    Elif,
    Else,
    Match,
    Case,
    For,
    In,
    Lambda,
    And,
    Or,
    Import,
    /// `@doc`
    Doc,
    // Reserved so that statement forms are rejected with a clear message.
    Return,
    Break,
    Continue,
    While,
    Class,
    Global,
    Pass,
}

impl Keyword {
    pub fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "def" => Keyword::Def,
            "if" => Keyword::If,
            "elif" => Keyword::Elif,
            "else" => Keyword::Else,
            "match" => Keyword::Match,
            "case" => Keyword::Case,
            "for" => Keyword::For,
            "in" => Keyword::In,
            "lambda" => Keyword::Lambda,
            "and" => Keyword::And,
            "or" => Keyword::Or,
            "import" => Keyword::Import,
            "return" => Keyword::Return,
            "break" => Keyword::Break,
            "continue" => Keyword::Continue,
            "while" => Keyword::While,
            "class" => Keyword::Class,
            "global" => Keyword::Global,
            "pass" => Keyword::Pass,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Def => "def",
            Keyword::If => "if",
            Keyword::Elif => "elif",
            Keyword::Else => "else",
            Keyword::Match => "match",
            Keyword::Case => "case",
            Keyword::For => "for",
            Keyword::In => "in",
            Keyword::Lambda => "lambda",
            Keyword::And => "and",
            Keyword::Or => "or",
            Keyword::Import => "import",
            Keyword::Doc => "@doc",
            Keyword::Return => "return",
            Keyword::Break => "break",
            Keyword::Continue => "continue",
            Keyword::While => "while",
            Keyword::Class => "class",
            Keyword::Global => "global",
            Keyword::Pass => "pass",
        }
    }

    /// Words reserved for statement forms the language deliberately lacks.
    pub fn is_statement_word(self) -> bool {
        matches!(
            self,
            Keyword::Return
                | Keyword::Break
                | Keyword::Continue
                | Keyword::While
                | Keyword::Class
                | Keyword::Global
                | Keyword::Pass
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    /// `+ - * / ++ == != < <= > >= =`
    Op(&'static str),
    /// `( ) [ ] { } , : . `` ` ``
    Punct(char),
    ParagraphOpen,
    ParagraphText(String),
    UnquoteOpen,
    UnquoteClose,
    ParagraphClose,
    Indent,
    Dedent,
    Newline,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Int(n) => write!(f, "integer {n}"),
            TokenKind::Float(x) => write!(f, "float {x}"),
            TokenKind::Str(s) => write!(f, "string {s:?}"),
            TokenKind::Op(o) => write!(f, "`{o}`"),
            TokenKind::Punct(c) => write!(f, "`{c}`"),
            TokenKind::ParagraphOpen => write!(f, "paragraph start"),
            TokenKind::ParagraphText(t) => write!(f, "paragraph text {t:?}"),
            TokenKind::UnquoteOpen => write!(f, "`{{`"),
            TokenKind::UnquoteClose => write!(f, "`}}`"),
            TokenKind::ParagraphClose => write!(f, "paragraph end"),
            TokenKind::Indent => write!(f, "indent"),
            TokenKind::Dedent => write!(f, "dedent"),
            TokenKind::Newline => write!(f, "newline"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text the token was read from; empty for layout tokens.
    pub lexeme: String,
    pub span: Span,
}
