//! Tokenizer with Python-style layout.
//!
//! Indentation is only significant outside brackets and paragraph literals.
//! Logical lines end in `Newline`; a line indented deeper than the enclosing
//! block opens a new block with `Indent`, and a shallower line closes blocks
//! with `Dedent` until it matches an open level exactly.

use crate::span::{SourceId, Span};
use crate::syntax::token::{Keyword, Token, TokenKind};
use crate::syntax::SyntaxError;

#[derive(Debug, Clone, Copy)]
enum Mode {
    /// Code, with the count of currently open brackets.
    Code { depth: usize },
    Paragraph,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    tokenize_in(source, SourceId::default())
}

pub fn tokenize_in(source: &str, id: SourceId) -> Result<Vec<Token>, SyntaxError> {
    Lexer::new(source, id).run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    source: SourceId,
    modes: Vec<Mode>,
    indents: Vec<u32>,
    tokens: Vec<Token>,
    line_has_tokens: bool,
}

impl Lexer {
    fn new(src: &str, source: SourceId) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            source,
            modes: vec![Mode::Code { depth: 0 }],
            indents: vec![0],
            tokens: Vec::new(),
            line_has_tokens: false,
        }
    }

    fn span(&self) -> Span {
        Span::new(self.source, self.line, self.col)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn push(&mut self, kind: TokenKind, lexeme: impl Into<String>, span: Span) {
        if !matches!(kind, TokenKind::Newline | TokenKind::Indent | TokenKind::Dedent) {
            self.line_has_tokens = true;
        }
        self.tokens.push(Token { kind, lexeme: lexeme.into(), span });
    }

    fn layout_active(&self) -> bool {
        self.modes.len() == 1 && matches!(self.modes[0], Mode::Code { depth: 0 })
    }

    fn run(mut self) -> Result<Vec<Token>, SyntaxError> {
        self.handle_line_start()?;
        while let Some(c) = self.peek() {
            match *self.modes.last().expect("mode stack is never empty") {
                Mode::Paragraph => self.paragraph_step()?,
                Mode::Code { .. } => {
                    if c == '\n' {
                        let sp = self.span();
                        self.bump();
                        if self.layout_active() {
                            if self.line_has_tokens {
                                self.push(TokenKind::Newline, "", sp);
                                self.line_has_tokens = false;
                            }
                            self.handle_line_start()?;
                        }
                    } else {
                        self.code_step(c)?;
                    }
                }
            }
        }
        match self.modes.last() {
            Some(Mode::Paragraph) => {
                return Err(SyntaxError::new(self.span(), "unterminated paragraph literal"));
            }
            _ if self.modes.len() > 1 => {
                return Err(SyntaxError::new(self.span(), "unterminated paragraph literal"));
            }
            _ => {}
        }
        if self.line_has_tokens {
            let sp = self.span();
            self.push(TokenKind::Newline, "", sp);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            let sp = self.span();
            self.push(TokenKind::Dedent, "", sp);
        }
        Ok(self.tokens)
    }

    /// Measures indentation of the next non-blank line and emits layout tokens.
    fn handle_line_start(&mut self) -> Result<(), SyntaxError> {
        loop {
            let mut width = 0u32;
            while let Some(c) = self.peek() {
                match c {
                    ' ' => {
                        width += 1;
                        self.bump();
                    }
                    '\t' => return Err(SyntaxError::new(self.span(), "tab characters are not allowed in indentation")),
                    '\r' => {
                        self.bump();
                    }
                    _ => break,
                }
            }
            match self.peek() {
                None => return Ok(()),
                Some('\n') => {
                    self.bump();
                    continue;
                }
                Some('#') => {
                    self.skip_comment();
                    continue;
                }
                Some(_) => {
                    let top = *self.indents.last().unwrap();
                    let sp = self.span();
                    if width > top {
                        self.indents.push(width);
                        self.push(TokenKind::Indent, "", sp);
                    } else if width < top {
                        while width < *self.indents.last().unwrap() {
                            self.indents.pop();
                            self.push(TokenKind::Dedent, "", sp);
                        }
                        if width != *self.indents.last().unwrap() {
                            return Err(SyntaxError::new(
                                sp,
                                "inconsistent dedent: indentation matches no enclosing block",
                            ));
                        }
                    }
                    return Ok(());
                }
            }
        }
    }

    fn skip_comment(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            self.bump();
        }
    }

    fn depth_mut(&mut self) -> &mut usize {
        match self.modes.last_mut() {
            Some(Mode::Code { depth }) => depth,
            _ => unreachable!("depth_mut outside code mode"),
        }
    }

    fn code_step(&mut self, c: char) -> Result<(), SyntaxError> {
        let start = self.span();
        match c {
            ' ' | '\t' | '\r' => {
                self.bump();
            }
            '#' => self.skip_comment(),
            '"' => {
                self.bump();
                let s = self.string_body(start)?;
                let lexeme = format!("{s:?}");
                self.push(TokenKind::Str(s), lexeme, start);
            }
            'p' if self.peek_at(1) == Some('"') => {
                self.bump();
                self.bump();
                self.push(TokenKind::ParagraphOpen, "p\"", start);
                self.modes.push(Mode::Paragraph);
            }
            '@' => {
                self.bump();
                let word = self.ident_body();
                if word != "doc" {
                    return Err(SyntaxError::new(start, format!("unknown decorator `@{word}`")));
                }
                self.push(TokenKind::Keyword(Keyword::Doc), "@doc", start);
            }
            c if c.is_ascii_digit() => self.number(start)?,
            c if c.is_alphabetic() || c == '_' => {
                let word = self.ident_body();
                match Keyword::from_ident(&word) {
                    Some(k) => self.push(TokenKind::Keyword(k), word, start),
                    None => self.push(TokenKind::Ident(word.clone()), word, start),
                }
            }
            '(' | '[' | '{' => {
                self.bump();
                *self.depth_mut() += 1;
                self.push(TokenKind::Punct(c), c.to_string(), start);
            }
            ')' | ']' | '}' => {
                self.bump();
                let unquote = self.modes.len() > 1;
                let depth = self.depth_mut();
                if *depth == 0 {
                    if c == '}' && unquote {
                        self.modes.pop();
                        self.push(TokenKind::UnquoteClose, "}", start);
                        return Ok(());
                    }
                    return Err(SyntaxError::new(start, format!("unmatched `{c}`")));
                }
                *depth -= 1;
                self.push(TokenKind::Punct(c), c.to_string(), start);
            }
            ',' | ':' | '.' | '`' => {
                self.bump();
                self.push(TokenKind::Punct(c), c.to_string(), start);
            }
            _ => {
                let two: String = [Some(c), self.peek_at(1)].iter().flatten().collect();
                let op = match two.as_str() {
                    "++" => Some("++"),
                    "==" => Some("=="),
                    "!=" => Some("!="),
                    "<=" => Some("<="),
                    ">=" => Some(">="),
                    _ => None,
                };
                if let Some(op) = op {
                    self.bump();
                    self.bump();
                    self.push(TokenKind::Op(op), op, start);
                    return Ok(());
                }
                let op = match c {
                    '+' => "+",
                    '-' => "-",
                    '*' => "*",
                    '/' => "/",
                    '<' => "<",
                    '>' => ">",
                    '=' => "=",
                    _ => return Err(SyntaxError::new(start, format!("unexpected character `{c}`"))),
                };
                self.bump();
                self.push(TokenKind::Op(op), op, start);
            }
        }
        Ok(())
    }

    fn ident_body(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '\'' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn number(&mut self, start: Span) -> Result<(), SyntaxError> {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.bump();
        }
        let is_float = self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit());
        if is_float {
            s.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
                s.push(c);
                self.bump();
            }
            let x: f64 = s.parse().map_err(|_| SyntaxError::new(start, "malformed float literal"))?;
            self.push(TokenKind::Float(x), s, start);
        } else {
            let n: i64 = s.parse().map_err(|_| SyntaxError::new(start, "integer literal out of range"))?;
            self.push(TokenKind::Int(n), s, start);
        }
        Ok(())
    }

    fn escape(&mut self, start: Span) -> Result<char, SyntaxError> {
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some(c @ ('"' | '\\' | '{' | '}')) => Ok(c),
            Some(c) => Err(SyntaxError::new(start, format!("unknown escape `\\{c}`"))),
            None => Err(SyntaxError::new(start, "unterminated escape")),
        }
    }

    fn string_body(&mut self, start: Span) -> Result<String, SyntaxError> {
        let mut s = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => return Err(SyntaxError::new(start, "unterminated string literal")),
                Some('"') => {
                    self.bump();
                    return Ok(s);
                }
                Some('\\') => {
                    self.bump();
                    s.push(self.escape(start)?);
                }
                Some(c) => {
                    s.push(c);
                    self.bump();
                }
            }
        }
    }

    fn paragraph_step(&mut self) -> Result<(), SyntaxError> {
        let start = self.span();
        let mut text = String::new();
        let mut raw = String::new();
        loop {
            match self.peek() {
                None => return Err(SyntaxError::new(start, "unterminated paragraph literal")),
                Some('"') => {
                    self.flush_text(&mut text, &mut raw, start);
                    let sp = self.span();
                    self.bump();
                    self.modes.pop();
                    self.push(TokenKind::ParagraphClose, "\"", sp);
                    return Ok(());
                }
                Some('{') => {
                    self.flush_text(&mut text, &mut raw, start);
                    let sp = self.span();
                    self.bump();
                    self.push(TokenKind::UnquoteOpen, "{", sp);
                    self.modes.push(Mode::Code { depth: 0 });
                    return Ok(());
                }
                Some('\\') => {
                    self.bump();
                    let c = self.escape(start)?;
                    raw.push('\\');
                    raw.push(c);
                    text.push(c);
                }
                Some(c) => {
                    self.bump();
                    raw.push(c);
                    text.push(c);
                }
            }
        }
    }

    fn flush_text(&mut self, text: &mut String, raw: &mut String, start: Span) {
        if !text.is_empty() {
            let t = std::mem::take(text);
            let r = std::mem::take(raw);
            self.push(TokenKind::ParagraphText(t), r, start);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn simple_definition() {
        assert_eq!(
            kinds("def x = 5"),
            vec![
                TokenKind::Keyword(Keyword::Def),
                TokenKind::Ident("x".into()),
                TokenKind::Op("="),
                TokenKind::Int(5),
                TokenKind::Newline,
            ]
        );
    }

    #[test]
    fn paragraph_with_unquote() {
        assert_eq!(
            kinds("p\"hi {x}\""),
            vec![
                TokenKind::ParagraphOpen,
                TokenKind::ParagraphText("hi ".into()),
                TokenKind::UnquoteOpen,
                TokenKind::Ident("x".into()),
                TokenKind::UnquoteClose,
                TokenKind::ParagraphClose,
                TokenKind::Newline,
            ]
        );
    }

    #[test]
    fn dict_inside_unquote_keeps_braces() {
        let ks = kinds("p\"{ {a: 1}.a }\"");
        assert_eq!(ks.iter().filter(|k| **k == TokenKind::UnquoteClose).count(), 1);
        assert!(ks.contains(&TokenKind::Punct('{')));
        assert!(ks.contains(&TokenKind::Punct('}')));
    }

    #[test]
    fn bad_dedent_is_rejected() {
        let err = tokenize("def f(x):\n    def y = 1\n  y\n").unwrap_err();
        assert!(err.message.contains("inconsistent dedent"), "{err}");
        assert_eq!(err.span.line, 3);
    }

    #[test]
    fn unterminated_literals() {
        assert!(tokenize("p\"abc").unwrap_err().message.contains("paragraph"));
        assert!(tokenize("\"abc").unwrap_err().message.contains("string"));
        assert!(tokenize("p\"abc {x").is_err());
    }

    #[test]
    fn blocks_and_comments() {
        let src = "def f(x):  # comment\n    x\n\n# trailing\ndef g = 1\n";
        let ks = kinds(src);
        let indents = ks.iter().filter(|k| **k == TokenKind::Indent).count();
        let dedents = ks.iter().filter(|k| **k == TokenKind::Dedent).count();
        assert_eq!((indents, dedents), (1, 1));
        assert!(!ks.iter().any(|k| matches!(k, TokenKind::Ident(s) if s == "comment")));
    }

    #[test]
    fn brackets_suppress_layout() {
        let ks = kinds("def xs = [\n  1,\n    2]\n");
        assert!(!ks.contains(&TokenKind::Indent));
        assert_eq!(ks.iter().filter(|k| **k == TokenKind::Newline).count(), 1);
    }

    #[test]
    fn floats_need_a_decimal_point() {
        assert_eq!(kinds("1.5")[0], TokenKind::Float(1.5));
        assert_eq!(kinds("15")[0], TokenKind::Int(15));
    }

    #[test]
    fn spans_are_inside_source() {
        let src = "def f(x):\n    p\"a{x}b\"\n";
        let lines: Vec<&str> = src.lines().collect();
        for t in tokenize(src).unwrap() {
            if t.lexeme.is_empty() {
                continue;
            }
            let line = lines[t.span.line as usize - 1];
            assert!((t.span.col as usize) <= line.chars().count(), "{t:?}");
        }
    }
}
