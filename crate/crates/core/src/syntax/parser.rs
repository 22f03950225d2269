use crate::span::{SourceId, Span};
use crate::syntax::ast::*;
use crate::syntax::lexer::tokenize_in;
use crate::syntax::token::{Keyword, Token, TokenKind};
use crate::syntax::SyntaxError;

type PResult<T> = Result<T, SyntaxError>;

/// Tokenizes and parses a whole source file.
pub fn parse_source(source: &str, id: SourceId) -> PResult<SurfaceModule> {
    let tokens = tokenize_in(source, id)?;
    parse_module(&tokens)
}

pub fn parse_module(tokens: &[Token]) -> PResult<SurfaceModule> {
    Parser::new(tokens).module()
}

/// Parses a single term, e.g. from a REPL line or a test.
pub fn parse_term(source: &str) -> PResult<Term> {
    let tokens = tokenize_in(source, SourceId::default())?;
    let mut p = Parser::new(&tokens);
    let t = p.term()?;
    p.terminator()?;
    if !p.at_end() {
        return Err(p.unexpected("end of input"));
    }
    Ok(t)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        Parser { tokens, pos: 0 }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, n: usize) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        match self.tokens.get(self.pos).or_else(|| self.tokens.last()) {
            Some(t) => t.span,
            None => Span::default(),
        }
    }

    fn advance(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.tokens.get(self.pos) {
            Some(t) => SyntaxError::new(t.span, format!("expected {wanted}, found {}", t.kind)),
            None => SyntaxError::new(self.span(), format!("expected {wanted}, found end of input")),
        }
    }

    fn is_punct(&self, c: char) -> bool {
        self.peek() == Some(&TokenKind::Punct(c))
    }

    fn is_kw(&self, k: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Keyword(k))
    }

    fn is_op(&self, o: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Op(x)) if *x == o)
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.is_punct(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: Keyword) -> bool {
        if self.is_kw(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> PResult<()> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    fn expect_kw(&mut self, k: Keyword) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", k.as_str())))
        }
    }

    fn expect_op(&mut self, o: &str) -> PResult<()> {
        if self.is_op(o) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{o}`")))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        let sp = self.span();
        match self.peek() {
            Some(TokenKind::Ident(s)) => {
                self.pos += 1;
                Ok((s.clone(), sp))
            }
            Some(TokenKind::Keyword(k)) => Err(SyntaxError::new(
                sp,
                format!("reserved word `{}` cannot be used as an identifier", k.as_str()),
            )),
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn var_name(&mut self) -> PResult<(String, Span)> {
        let (name, sp) = self.ident()?;
        if is_constructor_name(&name) {
            return Err(SyntaxError::new(sp, format!("variable names must begin lowercase, found `{name}`")));
        }
        Ok((name, sp))
    }

    fn previous_was_dedent(&self) -> bool {
        self.pos > 0 && self.tokens[self.pos - 1].kind == TokenKind::Dedent
    }

    /// Ends a statement: a newline, or nothing if the statement closed a block.
    fn terminator(&mut self) -> PResult<()> {
        if self.peek() == Some(&TokenKind::Newline) {
            self.pos += 1;
            Ok(())
        } else if self.previous_was_dedent() || self.at_end() {
            Ok(())
        } else {
            Err(self.statement_error().unwrap_or_else(|| self.unexpected("end of line")))
        }
    }

    fn statement_error(&self) -> Option<SyntaxError> {
        if self.is_op("=") {
            return Some(SyntaxError::new(
                self.span(),
                "assignment is not supported; introduce names with `def`",
            ));
        }
        None
    }

    fn reject_statement_word(&self) -> PResult<()> {
        if let Some(TokenKind::Keyword(k)) = self.peek() {
            if k.is_statement_word() {
                return Err(SyntaxError::new(
                    self.span(),
                    format!("`{}` statements are not supported: the language is expression-based", k.as_str()),
                ));
            }
        }
        Ok(())
    }

    // ---- modules and definitions ----

    fn module(&mut self) -> PResult<SurfaceModule> {
        let mut m = SurfaceModule::default();
        while self.is_kw(Keyword::Import) {
            let sp = self.span();
            self.pos += 1;
            let path = match self.advance().map(|t| &t.kind) {
                Some(TokenKind::Str(s)) => s.clone(),
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("import path string"));
                }
            };
            m.imports.push(Import { path, span: sp });
            self.terminator()?;
        }
        while !self.at_end() {
            if self.is_kw(Keyword::Import) {
                return Err(SyntaxError::new(self.span(), "imports must precede all definitions"));
            }
            if self.is_kw(Keyword::Def) {
                m.defs.push(self.definition()?);
                continue;
            }
            if matches!(self.peek(), Some(TokenKind::Indent)) {
                return Err(SyntaxError::new(self.span(), "unexpected indentation"));
            }
            let body = self.term()?;
            self.terminator()?;
            if !self.at_end() {
                let sp = self.span();
                return Err(SyntaxError::new(
                    sp,
                    "a program has exactly one final term, and it must come last",
                ));
            }
            m.body = Some(body);
        }
        Ok(m)
    }

    fn definition(&mut self) -> PResult<SurfaceDefinition> {
        let sp = self.span();
        self.expect_kw(Keyword::Def)?;
        let is_clause = matches!(self.peek(), Some(TokenKind::Ident(name)) if !is_constructor_name(name))
            && self.peek_at(1) == Some(&TokenKind::Punct('('));
        if is_clause {
            let (name, _) = self.var_name()?;
            self.expect_punct('(')?;
            let params = self.comma_list(')', Self::pattern)?;
            if params.is_empty() {
                return Err(SyntaxError::new(sp, format!("function `{name}` needs at least one parameter")));
            }
            self.expect_punct(':')?;
            let body = self.suite()?;
            self.terminator()?;
            Ok(SurfaceDefinition::Clause { name, params, body, span: sp })
        } else {
            let pattern = self.pattern()?;
            self.expect_op("=")?;
            let body = self.suite()?;
            self.terminator()?;
            Ok(SurfaceDefinition::Var { pattern, body })
        }
    }

    /// Either an inline term or an indented block of definitions ending in a term.
    fn suite(&mut self) -> PResult<Term> {
        if self.peek() != Some(&TokenKind::Newline) {
            return self.term();
        }
        self.pos += 1;
        if self.peek() != Some(&TokenKind::Indent) {
            return Err(self.unexpected("indented block"));
        }
        self.pos += 1;
        let t = self.block()?;
        if self.peek() != Some(&TokenKind::Dedent) {
            return Err(self.unexpected("end of block"));
        }
        self.pos += 1;
        Ok(t)
    }

    fn block(&mut self) -> PResult<Term> {
        let sp = self.span();
        let mut defs = Vec::new();
        while self.is_kw(Keyword::Def) {
            defs.push(self.definition()?);
        }
        let body = self.term()?;
        self.terminator()?;
        if !matches!(self.peek(), Some(TokenKind::Dedent) | None) {
            return Err(self
                .statement_error()
                .unwrap_or_else(|| SyntaxError::new(self.span(), "a block ends with exactly one result term")));
        }
        if defs.is_empty() {
            Ok(body)
        } else {
            Ok(Term::new(TermKind::Let(defs, Box::new(body)), sp))
        }
    }

    fn comma_list<T>(&mut self, close: char, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        loop {
            if self.eat_punct(close) {
                return Ok(out);
            }
            out.push(item(self)?);
            if !self.eat_punct(',') {
                self.expect_punct(close)?;
                return Ok(out);
            }
        }
    }

    // ---- patterns ----

    fn pattern(&mut self) -> PResult<Pattern> {
        let sp = self.span();
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                if is_constructor_name(&name) {
                    let args = if self.eat_punct('(') { self.comma_list(')', Self::pattern)? } else { Vec::new() };
                    Ok(Pattern::new(PatternKind::Constr(name, args), sp))
                } else {
                    Ok(Pattern::new(PatternKind::Var(name), sp))
                }
            }
            Some(TokenKind::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(Pattern::new(PatternKind::Int(n), sp))
            }
            Some(TokenKind::Op("-")) if matches!(self.peek_at(1), Some(TokenKind::Int(_))) => {
                self.pos += 1;
                let Some(TokenKind::Int(n)) = self.advance().map(|t| &t.kind) else { unreachable!() };
                Ok(Pattern::new(PatternKind::Int(-n), sp))
            }
            Some(TokenKind::Punct('(')) => {
                self.pos += 1;
                let p = self.pattern()?;
                self.expect_punct(')')?;
                Ok(p)
            }
            Some(TokenKind::Punct('[')) => {
                self.pos += 1;
                let mut elems = Vec::new();
                let mut rest = None;
                loop {
                    if self.eat_punct(']') {
                        break;
                    }
                    if self.is_op("*") {
                        self.pos += 1;
                        rest = Some(Box::new(self.pattern()?));
                        self.eat_punct(',');
                        self.expect_punct(']')?;
                        break;
                    }
                    elems.push(self.pattern()?);
                    if !self.eat_punct(',') {
                        self.expect_punct(']')?;
                        break;
                    }
                }
                if rest.is_some() && elems.is_empty() {
                    return Err(SyntaxError::new(sp, "a rest pattern needs at least one element before it"));
                }
                Ok(Pattern::new(PatternKind::List(elems, rest), sp))
            }
            Some(TokenKind::Punct('{')) => {
                self.pos += 1;
                let fields = self.comma_list('}', |p| {
                    let key = p.dict_key()?;
                    p.expect_punct(':')?;
                    Ok((key, p.pattern()?))
                })?;
                check_unique_keys(fields.iter().map(|(k, _)| k.as_str()), sp)?;
                Ok(Pattern::new(PatternKind::Dict(fields), sp))
            }
            Some(TokenKind::Keyword(k)) => Err(SyntaxError::new(
                sp,
                format!("reserved word `{}` cannot be used as an identifier", k.as_str()),
            )),
            _ => Err(self.unexpected("pattern")),
        }
    }

    fn dict_key(&mut self) -> PResult<String> {
        match self.peek() {
            Some(TokenKind::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Ok(self.var_name()?.0),
        }
    }

    // ---- terms ----

    fn term(&mut self) -> PResult<Term> {
        self.reject_statement_word()?;
        let sp = self.span();
        match self.peek() {
            Some(TokenKind::Keyword(Keyword::If)) => {
                self.pos += 1;
                self.if_rest(sp)
            }
            Some(TokenKind::Keyword(Keyword::Match)) => self.match_term(),
            Some(TokenKind::Keyword(Keyword::Lambda)) => {
                self.pos += 1;
                let mut params = vec![self.pattern()?];
                while self.eat_punct(',') {
                    params.push(self.pattern()?);
                }
                self.expect_punct(':')?;
                let body = self.term()?;
                Ok(Term::new(TermKind::Lambda(params, Box::new(body)), sp))
            }
            Some(TokenKind::Keyword(Keyword::Doc)) => {
                self.pos += 1;
                self.expect_punct('(')?;
                let doc = self.term()?;
                self.expect_punct(')')?;
                // Decorator style: the target may start on the following line.
                if self.peek() == Some(&TokenKind::Newline)
                    && !matches!(self.peek_at(1), Some(TokenKind::Indent | TokenKind::Dedent) | None)
                {
                    self.pos += 1;
                }
                let target = self.term()?;
                Ok(Term::new(TermKind::Doc(Box::new(doc), Box::new(target)), sp))
            }
            _ => self.binary(0),
        }
    }

    /// After `if`: condition, branches, optional `elif` chain.
    fn if_rest(&mut self, sp: Span) -> PResult<Term> {
        let cond = self.term()?;
        self.expect_punct(':')?;
        let then = self.suite()?;
        if self.peek() == Some(&TokenKind::Newline)
            && matches!(self.peek_at(1), Some(TokenKind::Keyword(Keyword::Else | Keyword::Elif)))
        {
            self.pos += 1;
        }
        let else_ = if self.is_kw(Keyword::Elif) {
            let esp = self.span();
            self.pos += 1;
            self.if_rest(esp)?
        } else {
            self.expect_kw(Keyword::Else)?;
            self.expect_punct(':')?;
            self.suite()?
        };
        Ok(Term::new(TermKind::If(Box::new(cond), Box::new(then), Box::new(else_)), sp))
    }

    fn match_term(&mut self) -> PResult<Term> {
        let sp = self.span();
        self.expect_kw(Keyword::Match)?;
        let scrutinee = self.term()?;
        self.expect_punct(':')?;
        if self.peek() != Some(&TokenKind::Newline) || self.peek_at(1) != Some(&TokenKind::Indent) {
            return Err(self.unexpected("indented `case` clauses"));
        }
        self.pos += 2;
        let mut clauses = Vec::new();
        while self.is_kw(Keyword::Case) {
            self.pos += 1;
            let pattern = self.pattern()?;
            self.expect_punct(':')?;
            let body = self.suite()?;
            self.terminator()?;
            clauses.push(MatchClause { pattern, body });
        }
        if clauses.is_empty() {
            return Err(self.unexpected("`case`"));
        }
        if self.peek() != Some(&TokenKind::Dedent) {
            return Err(self.unexpected("`case` or end of match"));
        }
        self.pos += 1;
        Ok(Term::new(TermKind::Match(Box::new(scrutinee), clauses), sp))
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Term> {
        let mut lhs = self.postfix()?;
        loop {
            let sp = self.span();
            let (prec, infix_fun, op) = match self.peek() {
                Some(TokenKind::Op(o)) if *o != "=" => {
                    let op = BinOp::from_symbol(o).expect("lexer only produces known operators");
                    (op.precedence(), None, Some(op))
                }
                Some(TokenKind::Keyword(Keyword::And)) => (BinOp::And.precedence(), None, Some(BinOp::And)),
                Some(TokenKind::Keyword(Keyword::Or)) => (BinOp::Or.precedence(), None, Some(BinOp::Or)),
                Some(TokenKind::Punct('`')) => (INFIX_FUN_PRECEDENCE, Some(()), None),
                _ => break,
            };
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            if infix_fun.is_some() {
                let (name, _) = self.var_name()?;
                self.expect_punct('`')?;
                let rhs = self.binary(prec + 1)?;
                lhs = Term::new(TermKind::InfixFun(name, Box::new(lhs), Box::new(rhs)), sp);
            } else {
                let rhs = self.binary(prec + 1)?;
                lhs = Term::new(TermKind::Binary(op.unwrap(), Box::new(lhs), Box::new(rhs)), sp);
            }
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<Term> {
        let mut t = self.primary()?;
        loop {
            let sp = self.span();
            if self.eat_punct('(') {
                let args = self.comma_list(')', Self::term)?;
                if args.is_empty() {
                    return Err(SyntaxError::new(sp, "calls need at least one argument"));
                }
                t = Term::new(TermKind::Call(Box::new(t), args), sp);
            } else if self.eat_punct('.') {
                let (field, _) = self.ident()?;
                t = Term::new(TermKind::Project(Box::new(t), field), sp);
            } else if self.eat_punct('[') {
                let key = self.term()?;
                self.expect_punct(']')?;
                t = Term::new(TermKind::DynProject(Box::new(t), Box::new(key)), sp);
            } else {
                return Ok(t);
            }
        }
    }

    fn primary(&mut self) -> PResult<Term> {
        self.reject_statement_word()?;
        let sp = self.span();
        let Some(kind) = self.peek() else {
            return Err(self.unexpected("term"));
        };
        match kind {
            TokenKind::Int(n) => {
                let n = *n;
                self.pos += 1;
                Ok(Term::new(TermKind::Int(n), sp))
            }
            TokenKind::Float(x) => {
                let x = *x;
                self.pos += 1;
                Ok(Term::new(TermKind::Float(x), sp))
            }
            TokenKind::Op("-") => {
                self.pos += 1;
                match self.advance().map(|t| &t.kind) {
                    Some(TokenKind::Int(n)) => Ok(Term::new(TermKind::Int(-n), sp)),
                    Some(TokenKind::Float(x)) => Ok(Term::new(TermKind::Float(-x), sp)),
                    _ => Err(SyntaxError::new(sp, "prefix `-` is only allowed before a numeric literal")),
                }
            }
            TokenKind::Str(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(Term::new(TermKind::Str(s), sp))
            }
            TokenKind::ParagraphOpen => {
                self.pos += 1;
                let mut elems = Vec::new();
                loop {
                    match self.peek() {
                        Some(TokenKind::ParagraphText(t)) => {
                            elems.push(ParagraphElement::Token(t.clone()));
                            self.pos += 1;
                        }
                        Some(TokenKind::UnquoteOpen) => {
                            self.pos += 1;
                            elems.push(ParagraphElement::Unquote(self.term()?));
                            if self.peek() != Some(&TokenKind::UnquoteClose) {
                                return Err(self.unexpected("`}` closing the unquote"));
                            }
                            self.pos += 1;
                        }
                        Some(TokenKind::ParagraphClose) => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.unexpected("paragraph element")),
                    }
                }
                Ok(Term::new(TermKind::Paragraph(elems), sp))
            }
            TokenKind::Ident(name) => {
                let name = name.clone();
                self.pos += 1;
                if is_constructor_name(&name) {
                    let args = if self.eat_punct('(') { self.comma_list(')', Self::term)? } else { Vec::new() };
                    Ok(Term::new(TermKind::Constr(name, args), sp))
                } else {
                    Ok(Term::new(TermKind::Var(name), sp))
                }
            }
            TokenKind::Punct('(') => {
                self.pos += 1;
                let op = match self.peek() {
                    Some(TokenKind::Op(o)) if *o != "=" => BinOp::from_symbol(o),
                    Some(TokenKind::Keyword(Keyword::And)) => Some(BinOp::And),
                    Some(TokenKind::Keyword(Keyword::Or)) => Some(BinOp::Or),
                    _ => None,
                };
                if let Some(op) = op {
                    if self.peek_at(1) == Some(&TokenKind::Punct(')')) {
                        self.pos += 2;
                        return Ok(Term::new(TermKind::Op(op), sp));
                    }
                }
                let t = self.term()?;
                self.expect_punct(')')?;
                Ok(t)
            }
            TokenKind::Punct('[') => {
                self.pos += 1;
                if self.eat_punct(']') {
                    return Ok(Term::new(TermKind::List(Vec::new()), sp));
                }
                let first = self.term()?;
                if self.is_kw(Keyword::For) {
                    let quals = self.qualifiers()?;
                    self.expect_punct(']')?;
                    return Ok(Term::new(TermKind::ListComp(Box::new(first), quals), sp));
                }
                let mut elems = vec![first];
                if self.eat_punct(',') {
                    elems.extend(self.comma_list(']', Self::term)?);
                } else {
                    self.expect_punct(']')?;
                }
                Ok(Term::new(TermKind::List(elems), sp))
            }
            TokenKind::Punct('{') => {
                self.pos += 1;
                let fields = self.comma_list('}', |p| {
                    let key = p.dict_key()?;
                    p.expect_punct(':')?;
                    Ok((key, p.term()?))
                })?;
                check_unique_keys(fields.iter().map(|(k, _)| k.as_str()), sp)?;
                Ok(Term::new(TermKind::Dict(fields), sp))
            }
            TokenKind::Keyword(Keyword::If | Keyword::Lambda | Keyword::Match | Keyword::Doc) => self.term(),
            TokenKind::Keyword(k) => Err(SyntaxError::new(
                sp,
                format!("reserved word `{}` cannot be used as an identifier", k.as_str()),
            )),
            _ => Err(self.unexpected("term")),
        }
    }

    fn qualifiers(&mut self) -> PResult<Vec<Qualifier>> {
        let mut quals = Vec::new();
        loop {
            if self.eat_kw(Keyword::For) {
                let p = self.pattern()?;
                self.expect_kw(Keyword::In)?;
                let src = self.binary(0)?;
                quals.push(Qualifier::Gen(p, src));
            } else if self.eat_kw(Keyword::If) {
                quals.push(Qualifier::Guard(self.binary(0)?));
            } else if self.eat_kw(Keyword::Def) {
                let p = self.pattern()?;
                self.expect_op("=")?;
                quals.push(Qualifier::Decl(p, self.binary(0)?));
            } else {
                return Ok(quals);
            }
            self.eat_punct(',');
        }
    }
}

fn check_unique_keys<'a>(keys: impl Iterator<Item = &'a str>, sp: Span) -> PResult<()> {
    let mut seen = std::collections::HashSet::new();
    for k in keys {
        if !seen.insert(k) {
            return Err(SyntaxError::new(sp, format!("duplicate dictionary key `{k}`")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn module(src: &str) -> SurfaceModule {
        parse_source(src, SourceId::default()).unwrap_or_else(|e| panic!("{e}\n{src}"))
    }

    fn err(src: &str) -> SyntaxError {
        parse_source(src, SourceId::default()).unwrap_err()
    }

    fn var(x: &str) -> Term {
        Term::new(TermKind::Var(x.into()), Span::default())
    }

    fn pvar(x: &str) -> Pattern {
        Pattern::new(PatternKind::Var(x.into()), Span::default())
    }

    #[test]
    fn smallest_program() {
        let m = module("def x = 5\nx + x\n");
        assert_eq!(m.defs.len(), 1);
        assert_eq!(
            m.body.unwrap().kind,
            TermKind::Binary(BinOp::Add, Box::new(var("x")), Box::new(var("x")))
        );
    }

    #[test]
    fn comprehension_with_two_generators() {
        let t = parse_term("[a*b for (a) in xs for (b) in ys]").unwrap();
        let TermKind::ListComp(_, quals) = t.kind else { panic!("{t:?}") };
        assert_eq!(quals, vec![Qualifier::Gen(pvar("a"), var("xs")), Qualifier::Gen(pvar("b"), var("ys"))]);
    }

    #[test]
    fn doc_wraps_call() {
        let t = parse_term("@doc(p\"note\") (f(y))").unwrap();
        let TermKind::Doc(doc, target) = t.kind else { panic!() };
        assert_eq!(doc.kind, TermKind::Paragraph(vec![ParagraphElement::Token("note".into())]));
        assert_eq!(target.kind, TermKind::Call(Box::new(var("f")), vec![var("y")]));
    }

    #[test]
    fn precedence_table() {
        let t = parse_term("a + b * c == d and e").unwrap();
        let TermKind::Binary(BinOp::And, lhs, _) = t.kind else { panic!() };
        let TermKind::Binary(BinOp::Eq, lhs, _) = lhs.kind else { panic!() };
        let TermKind::Binary(BinOp::Add, _, rhs) = lhs.kind else { panic!() };
        assert!(matches!(rhs.kind, TermKind::Binary(BinOp::Mul, _, _)));
        // left-associative
        let t = parse_term("a - b - c").unwrap();
        let TermKind::Binary(BinOp::Sub, lhs, _) = t.kind else { panic!() };
        assert!(matches!(lhs.kind, TermKind::Binary(BinOp::Sub, _, _)));
    }

    #[test]
    fn lookup_binds_tighter_than_application() {
        let t = parse_term("f(x).y + g(z)[k]").unwrap();
        let TermKind::Binary(BinOp::Add, l, r) = t.kind else { panic!() };
        assert!(matches!(l.kind, TermKind::Project(..)));
        assert!(matches!(r.kind, TermKind::DynProject(..)));
    }

    #[test]
    fn block_bodies_and_clauses() {
        let src = "\
def len([]): 0
def len([h, *t]): 1 + len(t)
def f(x):
    def y = x + 1
    if y > 2:
        y
    else:
        0
f(len([1, 2]))
";
        let m = module(src);
        assert_eq!(m.defs.len(), 3);
        let SurfaceDefinition::Clause { body, .. } = &m.defs[2] else { panic!() };
        let TermKind::Let(defs, rest) = &body.kind else { panic!("{body:?}") };
        assert_eq!(defs.len(), 1);
        assert!(matches!(rest.kind, TermKind::If(..)));
    }

    #[test]
    fn match_with_cases() {
        let src = "match xs:\n    case []: 0\n    case [x, *rest]:\n        x\n";
        let m = module(src);
        let TermKind::Match(_, clauses) = m.body.unwrap().kind else { panic!() };
        assert_eq!(clauses.len(), 2);
    }

    #[test]
    fn inline_if_elif() {
        let t = parse_term("if a: 1 elif b: 2 else: 3").unwrap();
        let TermKind::If(_, _, e) = t.kind else { panic!() };
        assert!(matches!(e.kind, TermKind::If(..)));
    }

    #[test]
    fn statements_are_rejected() {
        assert!(err("x = 5\n").message.contains("assignment"));
        assert!(err("def f(x): return x\n").message.contains("expression-based"));
        assert!(err("def f(x): x\nbreak\n").message.contains("expression-based"));
    }

    #[test]
    fn reserved_words_are_not_identifiers() {
        assert!(err("def if = 3\n").message.contains("reserved"));
        assert!(err("def f(lambda): 1\n").message.contains("reserved"));
    }

    #[test]
    fn only_one_final_term() {
        assert!(err("1\n2\n").message.contains("exactly one final term"));
    }

    #[test]
    fn imports_must_come_first() {
        let m = module("import \"lib\"\ndef x = 1\n");
        assert_eq!(m.imports[0].path, "lib");
        assert!(err("def x = 1\nimport \"lib\"\n").message.contains("precede"));
    }

    #[test]
    fn syntax_errors_carry_spans() {
        let e = err("def x = (1 +\n");
        assert!(e.span.line >= 1);
        let e = err("def x = 1\ndef y = )\n");
        assert_eq!(e.span.line, 2);
    }

    #[test]
    fn paragraph_elements() {
        let t = parse_term("p\"n={x}!\"").unwrap();
        assert_eq!(
            t.kind,
            TermKind::Paragraph(vec![
                ParagraphElement::Token("n=".into()),
                ParagraphElement::Unquote(var("x")),
                ParagraphElement::Token("!".into()),
            ])
        );
    }
}
