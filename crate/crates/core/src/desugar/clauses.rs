//! Clause compilation: merges pattern-matching clauses column by column into
//! one eliminator trie, and totalises generator patterns with `[]` defaults.

use std::sync::Arc;

use super::core::{Cont, CorePattern, Elim, Expr};
use super::signature::{Signature, NIL};
use super::DesugarError;
use crate::span::Span;

/// A normalised pattern: list sugar is gone, constructors are checked.
#[derive(Debug, Clone, PartialEq)]
pub enum CPat {
    Var(String),
    Constr(String, Vec<CPat>),
    /// Sorted by field name.
    Dict(Vec<(String, CPat)>),
    /// Numeric literal; kept only so the error can be precise.
    Int(i64),
}

impl CPat {
    pub fn wildcard() -> CPat {
        CPat::Var("_".into())
    }

    pub fn is_irrefutable(&self) -> bool {
        match self {
            CPat::Var(_) => true,
            CPat::Dict(fs) => fs.iter().all(|(_, p)| p.is_irrefutable()),
            CPat::Constr(..) | CPat::Int(_) => false,
        }
    }

    pub fn to_core(&self) -> Option<CorePattern> {
        Some(match self {
            CPat::Var(x) => CorePattern::Var(x.clone()),
            CPat::Constr(c, ps) => CorePattern::Constr(c.clone(), ps.iter().map(CPat::to_core).collect::<Option<_>>()?),
            CPat::Dict(fs) => CorePattern::Dict(
                fs.iter().map(|(k, p)| Some((k.clone(), p.to_core()?))).collect::<Option<_>>()?,
            ),
            CPat::Int(_) => return None,
        })
    }
}

/// `(active stack, remaining arguments, body)`.
#[derive(Debug, Clone)]
pub struct Clause {
    pub stack: Vec<CPat>,
    pub rest: Vec<CPat>,
    pub body: Expr,
    pub span: Span,
}

pub struct Compiler<'a> {
    pub sig: &'a Signature,
    pub fresh: &'a mut u32,
}

impl Compiler<'_> {
    fn fresh_name(&mut self) -> String {
        *self.fresh += 1;
        format!("%{}", self.fresh)
    }

    /// Compiles clauses whose stacks are non-empty into an eliminator.
    pub fn elim(&mut self, clauses: Vec<Clause>) -> Result<Elim, DesugarError> {
        match self.cont(clauses)? {
            Cont::Elim(s) => Ok(s),
            Cont::Expr(_) => unreachable!("eliminator requested for exhausted clauses"),
        }
    }

    pub fn cont(&mut self, mut clauses: Vec<Clause>) -> Result<Cont, DesugarError> {
        let first = &clauses[0];
        let span = first.span;
        if first.stack.is_empty() {
            if first.rest.is_empty() {
                if clauses.len() > 1 {
                    return Err(DesugarError::new(
                        clauses[1].span,
                        format!("clause overlaps an earlier clause at {span} and can never match"),
                    ));
                }
                return Ok(Cont::Expr(clauses.pop().unwrap().body));
            }
            for k in &mut clauses {
                let p = k.rest.remove(0);
                k.stack.push(p);
            }
            let sigma = self.elim(clauses)?;
            return Ok(Cont::Expr(Expr::Lambda(Arc::new(sigma), span)));
        }

        let heads: Vec<&CPat> = clauses.iter().map(|k| &k.stack[0]).collect();
        let vars = heads.iter().filter(|p| matches!(p, CPat::Var(_))).count();
        if vars > 0 && vars < heads.len() {
            let at = clauses.iter().find(|k| !matches!(k.stack[0], CPat::Var(_))).unwrap().span;
            return Err(DesugarError::new(
                at,
                "ambiguous clauses: a variable pattern and a non-variable pattern occupy the same position",
            ));
        }
        match heads[0] {
            CPat::Var(_) => self.var_column(clauses),
            CPat::Int(_) => Err(DesugarError::new(span, "numeric literal patterns are not supported")),
            CPat::Dict(_) => self.dict_column(clauses),
            CPat::Constr(..) => self.constr_column(clauses),
        }
    }

    fn var_column(&mut self, clauses: Vec<Clause>) -> Result<Cont, DesugarError> {
        let names: Vec<String> = clauses
            .iter()
            .map(|k| match &k.stack[0] {
                CPat::Var(x) => x.clone(),
                _ => unreachable!(),
            })
            .collect();
        let shared = if names.iter().all(|x| *x == names[0]) { names[0].clone() } else { self.fresh_name() };
        let mut next = Vec::with_capacity(clauses.len());
        for (mut k, x) in clauses.into_iter().zip(names) {
            k.stack.remove(0);
            if x != shared && x != "_" {
                k.body = Expr::Let(
                    CorePattern::Var(x),
                    Box::new(Expr::Var(shared.clone(), k.span)),
                    Box::new(k.body),
                    k.span,
                );
            }
            next.push(k);
        }
        Ok(Cont::Elim(Elim::Var(shared, Box::new(self.cont(next)?))))
    }

    fn dict_column(&mut self, clauses: Vec<Clause>) -> Result<Cont, DesugarError> {
        let keys = |p: &CPat| match p {
            CPat::Dict(fs) => fs.iter().map(|(k, _)| k.clone()).collect::<Vec<_>>(),
            _ => unreachable!(),
        };
        let fields = keys(&clauses[0].stack[0]);
        let mut next = Vec::with_capacity(clauses.len());
        for mut k in clauses {
            let head = k.stack.remove(0);
            if !matches!(head, CPat::Dict(_)) {
                return Err(DesugarError::new(k.span, "dictionary and constructor patterns at the same position"));
            }
            if keys(&head) != fields {
                return Err(DesugarError::new(
                    k.span,
                    "dictionary patterns at the same position must name the same fields",
                ));
            }
            let CPat::Dict(fs) = head else { unreachable!() };
            let mut stack: Vec<CPat> = fs.into_iter().map(|(_, p)| p).collect();
            stack.append(&mut k.stack);
            k.stack = stack;
            next.push(k);
        }
        Ok(Cont::Elim(Elim::Dict(fields, Box::new(self.cont(next)?))))
    }

    fn constr_column(&mut self, clauses: Vec<Clause>) -> Result<Cont, DesugarError> {
        let mut datatype: Option<&str> = None;
        let mut groups: Vec<(String, Vec<Clause>)> = Vec::new();
        for mut k in clauses {
            let CPat::Constr(c, args) = k.stack.remove(0) else {
                return Err(DesugarError::new(k.span, "dictionary and constructor patterns at the same position"));
            };
            let d = self.sig.datatype(&c).expect("constructor checked during normalisation");
            match datatype {
                None => datatype = Some(d),
                Some(d0) if d0 != d => {
                    return Err(DesugarError::new(
                        k.span,
                        format!("constructor {c} belongs to {d}, but this position matches {d0}"),
                    ))
                }
                _ => {}
            }
            let mut stack = args;
            stack.append(&mut k.stack);
            k.stack = stack;
            match groups.iter_mut().find(|(c2, _)| *c2 == c) {
                Some((_, g)) => g.push(k),
                None => groups.push((c, vec![k])),
            }
        }
        let mut branches = Vec::with_capacity(groups.len());
        for (c, g) in groups {
            branches.push((c, self.cont(g)?));
        }
        Ok(Cont::Elim(Elim::Constr(branches)))
    }

    /// Totalises one generator clause: every constructor the pattern does not
    /// mention maps to a fresh `[]`, so non-matching elements are skipped.
    pub fn complete(&self, k: Clause) -> Vec<Clause> {
        let default = Expr::Constr(NIL.into(), Vec::new(), k.span);
        self.complete_stack(k.stack, k.body, &default)
            .into_iter()
            .map(|(stack, body)| Clause { stack, rest: Vec::new(), body, span: k.span })
            .collect()
    }

    fn complete_stack(&self, mut stack: Vec<CPat>, body: Expr, default: &Expr) -> Vec<(Vec<CPat>, Expr)> {
        if stack.is_empty() {
            return vec![(stack, body)];
        }
        let head = stack.remove(0);
        let tail_len = stack.len();
        match head {
            CPat::Var(_) | CPat::Int(_) => self
                .complete_stack(stack, body, default)
                .into_iter()
                .map(|(mut s, b)| {
                    s.insert(0, head.clone());
                    (s, b)
                })
                .collect(),
            CPat::Dict(fs) => {
                let n = fs.len();
                let keys: Vec<String> = fs.iter().map(|(k, _)| k.clone()).collect();
                let mut inner: Vec<CPat> = fs.into_iter().map(|(_, p)| p).collect();
                inner.append(&mut stack);
                self.complete_stack(inner, body, default)
                    .into_iter()
                    .map(|(mut s, b)| {
                        let rest = s.split_off(n);
                        let mut out = vec![CPat::Dict(keys.iter().cloned().zip(s).collect())];
                        out.extend(rest);
                        (out, b)
                    })
                    .collect()
            }
            CPat::Constr(c, args) => {
                let n = args.len();
                let mut inner = args;
                inner.append(&mut stack);
                let mut out: Vec<(Vec<CPat>, Expr)> = self
                    .complete_stack(inner, body, default)
                    .into_iter()
                    .map(|(mut s, b)| {
                        let rest = s.split_off(n);
                        let mut full = vec![CPat::Constr(c.clone(), s)];
                        full.extend(rest);
                        (full, b)
                    })
                    .collect();
                for other in self.sig.siblings(&c) {
                    if *other == c {
                        continue;
                    }
                    let arity = self.sig.arity(other).unwrap_or(0);
                    let mut s = vec![CPat::Constr(other.clone(), vec![CPat::wildcard(); arity])];
                    s.extend(std::iter::repeat_n(CPat::wildcard(), tail_len));
                    out.push((s, default.clone()));
                }
                out
            }
        }
    }
}
