//! Translation from surface syntax to the core language.

pub mod clauses;
pub mod core;
pub mod signature;

use std::sync::Arc;

use self::clauses::{CPat, Clause, Compiler};
use self::core::{CoreDef, CoreModule, CorePattern, Elim, Expr, RecDefs};
use self::signature::{Signature, CONS, FALSE, NIL, PARAGRAPH, TRUE};
use crate::span::Span;
use crate::syntax::ast::{
    is_constructor_name, MatchClause, ParagraphElement, Pattern, PatternKind, Qualifier, SurfaceDefinition,
    SurfaceModule, Term, TermKind,
};

pub use self::core::{dump_expr, dump_module, Cont};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("desugaring error at {span}: {message}")]
pub struct DesugarError {
    pub span: Span,
    pub message: String,
}

impl DesugarError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        DesugarError { span, message: message.into() }
    }
}

type DResult<T> = Result<T, DesugarError>;

/// Prelude function that comprehension generators compile to.
pub const CONCAT_MAP: &str = "concatMap";

pub struct Desugarer<'a> {
    sig: &'a Signature,
    fresh: u32,
}

pub fn desugar_module(m: &SurfaceModule, sig: &Signature) -> DResult<CoreModule> {
    Desugarer::new(sig).module(m)
}

pub fn desugar_term(t: &Term, sig: &Signature) -> DResult<Expr> {
    Desugarer::new(sig).term(t)
}

impl<'a> Desugarer<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        Desugarer { sig, fresh: 0 }
    }

    fn compiler(&mut self) -> Compiler<'_> {
        Compiler { sig: self.sig, fresh: &mut self.fresh }
    }

    pub fn module(&mut self, m: &SurfaceModule) -> DResult<CoreModule> {
        let mut defs = Vec::new();
        for group in self.definitions(&m.defs)? {
            defs.push(match group {
                Group::Def(p, e, span) => CoreDef::Def(p, e, span),
                Group::Rec(r) => CoreDef::Rec(r),
            });
        }
        let body = m.body.as_ref().map(|t| self.term(t)).transpose()?;
        Ok(CoreModule { defs, body })
    }

    /// Variable definitions stay separate; each maximal run of adjacent
    /// function clauses becomes one mutually recursive group.
    fn definitions(&mut self, defs: &[SurfaceDefinition]) -> DResult<Vec<Group>> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < defs.len() {
            match &defs[i] {
                SurfaceDefinition::Var { pattern, body } => {
                    let p = self.pattern(pattern)?;
                    let core = p.to_core().ok_or_else(|| {
                        DesugarError::new(pattern.span, "numeric literal patterns are not supported")
                    })?;
                    out.push(Group::Def(core, self.term(body)?, pattern.span));
                    i += 1;
                }
                SurfaceDefinition::Clause { .. } => {
                    let start = i;
                    while i < defs.len() && matches!(defs[i], SurfaceDefinition::Clause { .. }) {
                        i += 1;
                    }
                    for group in split_recursive(self.clause_run(&defs[start..i])?) {
                        out.push(Group::Rec(Arc::new(group)));
                    }
                }
            }
        }
        Ok(out)
    }

    fn clause_run(&mut self, run: &[SurfaceDefinition]) -> DResult<RecDefs> {
        let mut names: Vec<(&str, Vec<&SurfaceDefinition>)> = Vec::new();
        for d in run {
            let SurfaceDefinition::Clause { name, .. } = d else { unreachable!() };
            match names.last_mut() {
                Some((n, ds)) if *n == name.as_str() => ds.push(d),
                _ => {
                    if names.iter().any(|(n, _)| *n == name.as_str()) {
                        return Err(DesugarError::new(
                            d.span(),
                            format!("clauses of {name} must be adjacent"),
                        ));
                    }
                    names.push((name.as_str(), vec![d]));
                }
            }
        }
        let mut rec = Vec::with_capacity(names.len());
        for (name, ds) in names {
            let mut clauses = Vec::with_capacity(ds.len());
            let mut arity = None;
            for d in ds {
                let SurfaceDefinition::Clause { params, body, span, .. } = d else { unreachable!() };
                match arity {
                    None => arity = Some(params.len()),
                    Some(n) if n != params.len() => {
                        return Err(DesugarError::new(
                            *span,
                            format!("clause of {name} has {} parameters, earlier clauses have {n}", params.len()),
                        ))
                    }
                    _ => {}
                }
                clauses.push(self.clause(params, body, *span)?);
            }
            rec.push((name.to_string(), Arc::new(self.compiler().elim(clauses)?)));
        }
        Ok(rec)
    }

    /// A clause with its first parameter active and the others pending.
    fn clause(&mut self, params: &[Pattern], body: &Term, span: Span) -> DResult<Clause> {
        let mut ps = params.iter().map(|p| self.pattern(p)).collect::<DResult<Vec<_>>>()?;
        if ps.is_empty() {
            return Err(DesugarError::new(span, "a function needs at least one parameter"));
        }
        let rest = ps.split_off(1);
        Ok(Clause { stack: ps, rest, body: self.term(body)?, span })
    }

    pub fn pattern(&self, p: &Pattern) -> DResult<CPat> {
        Ok(match &p.kind {
            PatternKind::Var(x) => CPat::Var(x.clone()),
            PatternKind::Int(n) => CPat::Int(*n),
            PatternKind::Constr(c, args) => {
                self.check_constr(c, args.len(), p.span)?;
                CPat::Constr(c.clone(), args.iter().map(|a| self.pattern(a)).collect::<DResult<_>>()?)
            }
            PatternKind::Dict(fields) => {
                let mut fs = fields
                    .iter()
                    .map(|(k, v)| Ok((k.clone(), self.pattern(v)?)))
                    .collect::<DResult<Vec<_>>>()?;
                fs.sort_by(|a, b| a.0.cmp(&b.0));
                CPat::Dict(fs)
            }
            PatternKind::List(items, rest) => {
                let mut tail = match rest {
                    Some(r) => self.pattern(r)?,
                    None => CPat::Constr(NIL.into(), Vec::new()),
                };
                for item in items.iter().rev() {
                    tail = CPat::Constr(CONS.into(), vec![self.pattern(item)?, tail]);
                }
                tail
            }
        })
    }

    fn check_constr(&self, c: &str, n: usize, span: Span) -> DResult<()> {
        match self.sig.arity(c) {
            None => Err(DesugarError::new(span, format!("unknown constructor {c}"))),
            Some(a) if a != n => Err(DesugarError::new(
                span,
                format!("constructor {c} expects {a} argument{}, got {n}", if a == 1 { "" } else { "s" }),
            )),
            Some(_) => Ok(()),
        }
    }

    fn elim_with(&mut self, clauses: Vec<Clause>) -> DResult<Arc<Elim>> {
        Ok(Arc::new(self.compiler().elim(clauses)?))
    }

    pub fn term(&mut self, t: &Term) -> DResult<Expr> {
        let span = t.span;
        Ok(match &t.kind {
            TermKind::Var(x) => Expr::Var(x.clone(), span),
            TermKind::Int(n) => Expr::Int(*n, span),
            TermKind::Float(x) => Expr::Float(*x, span),
            TermKind::Str(s) => Expr::Str(s.clone(), span),
            TermKind::Paragraph(elems) => self.paragraph(elems, span)?,
            TermKind::Call(f, args) => {
                let mut e = self.term(f)?;
                for a in args {
                    e = Expr::App(Box::new(e), Box::new(self.term(a)?), span);
                }
                e
            }
            TermKind::Constr(c, args) => {
                debug_assert!(is_constructor_name(c));
                self.check_constr(c, args.len(), span)?;
                Expr::Constr(c.clone(), args.iter().map(|a| self.term(a)).collect::<DResult<_>>()?, span)
            }
            TermKind::Dict(fields) => Expr::Dict(
                fields.iter().map(|(k, v)| Ok((k.clone(), self.term(v)?))).collect::<DResult<_>>()?,
                span,
            ),
            TermKind::Project(e, x) => Expr::Project(Box::new(self.term(e)?), x.clone(), span),
            TermKind::DynProject(e, k) => Expr::DProject(Box::new(self.term(e)?), Box::new(self.term(k)?), span),
            TermKind::Op(op) => Expr::Op(op.symbol().into()),
            TermKind::Binary(op, l, r) => binary(Expr::Op(op.symbol().into()), self.term(l)?, self.term(r)?, span),
            TermKind::InfixFun(f, l, r) => binary(Expr::Var(f.clone(), span), self.term(l)?, self.term(r)?, span),
            TermKind::If(c, a, b) => {
                let sigma = Elim::Constr(vec![
                    (TRUE.into(), Cont::Expr(self.term(a)?)),
                    (FALSE.into(), Cont::Expr(self.term(b)?)),
                ]);
                Expr::App(Box::new(Expr::Lambda(Arc::new(sigma), span)), Box::new(self.term(c)?), span)
            }
            TermKind::Match(s, clauses) => {
                let scrutinee = self.term(s)?;
                let ks = clauses
                    .iter()
                    .map(|MatchClause { pattern, body }| {
                        Ok(Clause {
                            stack: vec![self.pattern(pattern)?],
                            rest: Vec::new(),
                            body: self.term(body)?,
                            span: pattern.span,
                        })
                    })
                    .collect::<DResult<Vec<_>>>()?;
                Expr::App(Box::new(Expr::Lambda(self.elim_with(ks)?, span)), Box::new(scrutinee), span)
            }
            TermKind::List(items) => {
                let mut e = Expr::Constr(NIL.into(), Vec::new(), span);
                for item in items.iter().rev() {
                    e = Expr::Constr(CONS.into(), vec![self.term(item)?, e], item.span);
                }
                e
            }
            TermKind::ListComp(s, quals) => self.comprehension(s, quals, span)?,
            TermKind::Lambda(params, body) => {
                let k = self.clause(params, body, span)?;
                Expr::Lambda(self.elim_with(vec![k])?, span)
            }
            TermKind::Doc(d, target) => Expr::Doc(Box::new(self.term(d)?), Box::new(self.term(target)?)),
            TermKind::Let(defs, body) => {
                let groups = self.definitions(defs)?;
                let mut e = self.term(body)?;
                for g in groups.into_iter().rev() {
                    e = match g {
                        Group::Def(p, bound, sp) => Expr::Let(p, Box::new(bound), Box::new(e), sp),
                        Group::Rec(r) => Expr::LetRec(r, Box::new(e)),
                    };
                }
                e
            }
        })
    }

    pub fn paragraph(&mut self, elems: &[ParagraphElement], span: Span) -> DResult<Expr> {
        let mut list = Expr::Constr(NIL.into(), Vec::new(), span);
        for el in elems.iter().rev() {
            let head = match el {
                ParagraphElement::Token(text) => Expr::Str(text.clone(), span),
                ParagraphElement::Unquote(t) => self.term(t)?,
            };
            list = Expr::Constr(CONS.into(), vec![head, list], span);
        }
        Ok(Expr::Constr(PARAGRAPH.into(), vec![list], span))
    }

    fn comprehension(&mut self, s: &Term, quals: &[Qualifier], span: Span) -> DResult<Expr> {
        let Some((q, rest)) = quals.split_first() else {
            return Ok(Expr::Constr(
                CONS.into(),
                vec![self.term(s)?, Expr::Constr(NIL.into(), Vec::new(), span)],
                span,
            ));
        };
        match q {
            Qualifier::Guard(g) => {
                let inner = self.comprehension(s, rest, span)?;
                let sigma = Elim::Constr(vec![
                    (TRUE.into(), Cont::Expr(inner)),
                    (FALSE.into(), Cont::Expr(Expr::Constr(NIL.into(), Vec::new(), g.span))),
                ]);
                Ok(Expr::App(Box::new(Expr::Lambda(Arc::new(sigma), g.span)), Box::new(self.term(g)?), g.span))
            }
            Qualifier::Decl(p, e) => {
                let bound = self.term(e)?;
                let cp = self.pattern(p)?;
                if !cp.is_irrefutable() {
                    return Err(DesugarError::new(p.span, "a declaration in a comprehension needs an irrefutable pattern"));
                }
                let inner = self.comprehension(s, rest, span)?;
                let k = Clause { stack: vec![cp], rest: Vec::new(), body: inner, span: p.span };
                Ok(Expr::App(Box::new(Expr::Lambda(self.elim_with(vec![k])?, p.span)), Box::new(bound), p.span))
            }
            Qualifier::Gen(p, e) => {
                let source = self.term(e)?;
                let cp = self.pattern(p)?;
                let inner = self.comprehension(s, rest, span)?;
                let k = Clause { stack: vec![cp], rest: Vec::new(), body: inner, span: p.span };
                let ks = self.compiler().complete(k);
                let f = Expr::Lambda(self.elim_with(ks)?, p.span);
                Ok(binary(Expr::Var(CONCAT_MAP.into(), p.span), f, source, p.span))
            }
        }
    }
}

enum Group {
    Def(CorePattern, Expr, Span),
    Rec(Arc<RecDefs>),
}

/// Splits a run of function definitions into strongly connected components
/// of the call graph, dependencies first, so that each closure only carries
/// the definitions it can actually reach.
fn split_recursive(run: RecDefs) -> Vec<RecDefs> {
    use petgraph::graph::{DiGraph, NodeIndex};
    use std::collections::BTreeSet;

    let n = run.len();
    let mut g: DiGraph<usize, ()> = DiGraph::with_capacity(n, n);
    let nodes: Vec<NodeIndex> = (0..n).map(|i| g.add_node(i)).collect();
    for (i, (_, sigma)) in run.iter().enumerate() {
        let mut used = BTreeSet::new();
        sigma.mentions(&mut used);
        for (j, (name, _)) in run.iter().enumerate() {
            if used.contains(name) {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let sccs: Vec<Vec<usize>> = petgraph::algo::tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|ix| g[ix]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    let mut component = vec![0; n];
    for (ci, c) in sccs.iter().enumerate() {
        for &i in c {
            component[i] = ci;
        }
    }
    // Emit components in source order, holding each back until everything it
    // calls has been emitted.
    let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); sccs.len()];
    for e in g.edge_indices() {
        let (a, b) = g.edge_endpoints(e).unwrap();
        let (ca, cb) = (component[g[a]], component[g[b]]);
        if ca != cb {
            deps[ca].insert(cb);
        }
    }
    let mut order: Vec<usize> = (0..sccs.len()).collect();
    order.sort_by_key(|&c| sccs[c][0]);
    let mut done = vec![false; sccs.len()];
    let mut out_order = Vec::with_capacity(sccs.len());
    while out_order.len() < sccs.len() {
        let next = *order
            .iter()
            .find(|&&c| !done[c] && deps[c].iter().all(|&d| done[d]))
            .expect("component graph is acyclic");
        done[next] = true;
        out_order.push(next);
    }
    let mut slots: Vec<Option<(String, Arc<Elim>)>> = run.into_iter().map(Some).collect();
    out_order
        .into_iter()
        .map(|c| sccs[c].iter().map(|&i| slots[i].take().unwrap()).collect())
        .collect()
}

fn binary(f: Expr, a: Expr, b: Expr, span: Span) -> Expr {
    Expr::App(Box::new(Expr::App(Box::new(f), Box::new(a), span)), Box::new(b), span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_source, parse_term};
    use crate::SourceId;

    fn core(src: &str) -> String {
        let t = parse_term(src).unwrap();
        dump_expr(&desugar_term(&t, &Signature::builtin()).unwrap())
    }

    fn module(src: &str) -> Result<String, DesugarError> {
        let m = parse_source(src, SourceId::default()).unwrap();
        desugar_module(&m, &Signature::builtin()).map(|m| dump_module(&m))
    }

    #[test]
    fn lists_become_cons_chains() {
        assert_eq!(core("[a, b]"), "(Cons a (Cons b []))");
    }

    #[test]
    fn if_applies_a_boolean_eliminator() {
        assert_eq!(core("if c: x else: y"), "(app (lambda (elim-constr (True x) (False y))) c)");
    }

    #[test]
    fn generator_uses_concat_map() {
        assert_eq!(core("[x for x in xs]"), "(app (app concatMap (lambda (elim-var x (Cons x [])))) xs)");
    }

    #[test]
    fn doc_and_paragraph() {
        assert_eq!(core("@doc(p\"d\") t"), "(doc (Paragraph (Cons (Str \"d\") [])) t)");
        assert_eq!(core("p\"\""), "(Paragraph [])");
        assert_eq!(core("p\"n={x}\""), "(Paragraph (Cons (Str \"n=\") (Cons x [])))");
    }

    #[test]
    fn clause_errors() {
        let amb = module("def f(0): 1\ndef f(x): x\nf(1)\n").unwrap_err();
        assert!(amb.message.contains("ambiguous"), "{amb}");
        let ar = module("def f(x): 1\ndef f(x, y): x\nf(1)\n").unwrap_err();
        assert!(ar.message.contains("parameters"), "{ar}");
        let dt = module("def f(True): 1\ndef f([]): 2\nf(True)\n").unwrap_err();
        assert!(dt.message.contains("belongs to"), "{dt}");
        let adj = module("def f(x): 1\ndef g(x): 2\ndef f(y): 3\n1\n").unwrap_err();
        assert!(adj.message.contains("adjacent"), "{adj}");
        assert!(module("Foo(1)\n").unwrap_err().message.contains("unknown constructor"));
        assert!(module("Cons(1)\n").unwrap_err().message.contains("expects 2"));
        assert!(module("[x for [x] in xs def [y] = x]\n").unwrap_err().message.contains("irrefutable"));
    }

    #[test]
    fn clause_runs_split_by_call_graph() {
        let out = module("def f(x): g(x)\ndef even(n): odd(n)\ndef odd(n): even(n)\ndef g(x): x\n1\n").unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("(defrec ((even"), "{out}");
        assert!(lines[0].contains("(odd"), "{out}");
        assert!(lines[1].starts_with("(defrec ((g"), "{out}");
        assert!(lines[2].starts_with("(defrec ((f"), "{out}");
    }

    #[test]
    fn differently_named_variables_share_a_fresh_binder() {
        let out = module("def f([]): 0\ndef f([h, *t]): h\n1\n").unwrap();
        assert_eq!(out, "(defrec ((f (elim-constr ([] 0) (Cons (elim-var h (elim-var t h)))))))\n(main 1)\n");
        let out = module("def g(a, True): a\ndef g(b, False): b\n1\n").unwrap();
        assert!(out.contains("(elim-var %1"), "{out}");
        assert!(out.contains("(let a %1 a)"), "{out}");
    }
}
