//! The core language: what the evaluator runs.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::span::Span;
use crate::syntax::pretty::{float_literal, string_literal};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(String, Span),
    Int(i64, Span),
    Float(f64, Span),
    Str(String, Span),
    App(Box<Expr>, Box<Expr>, Span),
    Constr(String, Vec<Expr>, Span),
    Dict(Vec<(String, Expr)>, Span),
    Project(Box<Expr>, String, Span),
    DProject(Box<Expr>, Box<Expr>, Span),
    /// Primitive operation used first-class, named by its symbol.
    Op(String),
    Lambda(Arc<Elim>, Span),
    Let(CorePattern, Box<Expr>, Box<Expr>, Span),
    LetRec(Arc<RecDefs>, Box<Expr>),
    Doc(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cont {
    Expr(Expr),
    Elim(Elim),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Elim {
    Var(String, Box<Cont>),
    /// Field names are sorted; the sub-values are matched in that order.
    Dict(Vec<String>, Box<Cont>),
    Constr(Vec<(String, Cont)>),
}

/// Mutually recursive function definitions, in source order.
pub type RecDefs = Vec<(String, Arc<Elim>)>;

/// Irrefutable-or-not pattern on the left of a `def`.
#[derive(Debug, Clone, PartialEq)]
pub enum CorePattern {
    Var(String),
    Constr(String, Vec<CorePattern>),
    Dict(Vec<(String, CorePattern)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoreDef {
    Def(CorePattern, Expr, Span),
    Rec(Arc<RecDefs>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoreModule {
    pub defs: Vec<CoreDef>,
    pub body: Option<Expr>,
}

impl Expr {
    /// Number of expression nodes, counting eliminator branches.
    pub fn size(&self) -> usize {
        1 + match self {
            Expr::Var(..) | Expr::Int(..) | Expr::Float(..) | Expr::Str(..) | Expr::Op(_) => 0,
            Expr::App(a, b, _) | Expr::DProject(a, b, _) | Expr::Doc(a, b) | Expr::Let(_, a, b, _) => a.size() + b.size(),
            Expr::Constr(_, es, _) => es.iter().map(Expr::size).sum(),
            Expr::Dict(fs, _) => fs.iter().map(|(_, e)| e.size()).sum(),
            Expr::Project(e, ..) => e.size(),
            Expr::Lambda(s, _) => s.size(),
            Expr::LetRec(defs, body) => defs.iter().map(|(_, s)| s.size()).sum::<usize>() + body.size(),
        }
    }
}

impl Expr {
    /// Every variable name mentioned, ignoring shadowing.
    pub fn mentions(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(x, _) => {
                out.insert(x.clone());
            }
            Expr::Int(..) | Expr::Float(..) | Expr::Str(..) | Expr::Op(_) => {}
            Expr::App(a, b, _) | Expr::DProject(a, b, _) | Expr::Doc(a, b) | Expr::Let(_, a, b, _) => {
                a.mentions(out);
                b.mentions(out);
            }
            Expr::Constr(_, es, _) => es.iter().for_each(|e| e.mentions(out)),
            Expr::Dict(fs, _) => fs.iter().for_each(|(_, e)| e.mentions(out)),
            Expr::Project(e, ..) => e.mentions(out),
            Expr::Lambda(s, _) => s.mentions(out),
            Expr::LetRec(defs, body) => {
                defs.iter().for_each(|(_, s)| s.mentions(out));
                body.mentions(out);
            }
        }
    }
}

impl Elim {
    pub fn mentions(&self, out: &mut BTreeSet<String>) {
        match self {
            Elim::Var(_, k) | Elim::Dict(_, k) => k.mentions(out),
            Elim::Constr(bs) => bs.iter().for_each(|(_, k)| k.mentions(out)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Elim::Var(_, k) | Elim::Dict(_, k) => k.size(),
            Elim::Constr(bs) => bs.iter().map(|(_, k)| k.size()).sum(),
        }
    }
}

impl Cont {
    pub fn mentions(&self, out: &mut BTreeSet<String>) {
        match self {
            Cont::Expr(e) => e.mentions(out),
            Cont::Elim(s) => s.mentions(out),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Cont::Expr(e) => e.size(),
            Cont::Elim(s) => s.size(),
        }
    }
}

// S-expression dump, used by golden tests and `--dump-core`.

pub fn dump_module(m: &CoreModule) -> String {
    let mut out = String::new();
    for d in &m.defs {
        match d {
            CoreDef::Def(p, e, _) => writeln!(out, "(def {} {})", dump_pattern(p), dump_expr(e)),
            CoreDef::Rec(defs) => writeln!(out, "(defrec {})", dump_recdefs(defs)),
        }
        .unwrap();
    }
    if let Some(e) = &m.body {
        writeln!(out, "(main {})", dump_expr(e)).unwrap();
    }
    out
}

pub fn dump_expr(e: &Expr) -> String {
    match e {
        Expr::Var(x, _) => x.clone(),
        Expr::Int(n, _) => n.to_string(),
        Expr::Float(x, _) => float_literal(*x),
        Expr::Str(s, _) => format!("(Str {})", string_literal(s)),
        Expr::App(f, a, _) => format!("(app {} {})", dump_expr(f), dump_expr(a)),
        Expr::Constr(c, args, _) if args.is_empty() => c.clone(),
        Expr::Constr(c, args, _) => {
            format!("({c} {})", args.iter().map(dump_expr).collect::<Vec<_>>().join(" "))
        }
        Expr::Dict(fs, _) => {
            let fs: Vec<String> = fs.iter().map(|(k, v)| format!("({} {})", key(k), dump_expr(v))).collect();
            if fs.is_empty() {
                "(dict)".into()
            } else {
                format!("(dict {})", fs.join(" "))
            }
        }
        Expr::Project(e, x, _) => format!("(lookup {} {})", dump_expr(e), key(x)),
        Expr::DProject(e, k, _) => format!("(dlookup {} {})", dump_expr(e), dump_expr(k)),
        Expr::Op(op) => format!("(op {op})"),
        Expr::Lambda(s, _) => format!("(lambda {})", dump_elim(s)),
        Expr::Let(p, e, body, _) => format!("(let {} {} {})", dump_pattern(p), dump_expr(e), dump_expr(body)),
        Expr::LetRec(defs, body) => format!("(letrec {} {})", dump_recdefs(defs), dump_expr(body)),
        Expr::Doc(d, t) => format!("(doc {} {})", dump_expr(d), dump_expr(t)),
    }
}

fn dump_recdefs(defs: &RecDefs) -> String {
    let ds: Vec<String> = defs.iter().map(|(f, s)| format!("({f} {})", dump_elim(s))).collect();
    format!("({})", ds.join(" "))
}

pub fn dump_elim(s: &Elim) -> String {
    match s {
        Elim::Var(x, k) => format!("(elim-var {x} {})", dump_cont(k)),
        Elim::Dict(xs, k) => {
            let xs: Vec<String> = xs.iter().map(|x| key(x)).collect();
            format!("(elim-dict ({}) {})", xs.join(" "), dump_cont(k))
        }
        Elim::Constr(bs) => {
            let bs: Vec<String> = bs.iter().map(|(c, k)| format!("({c} {})", dump_cont(k))).collect();
            format!("(elim-constr {})", bs.join(" "))
        }
    }
}

fn dump_cont(k: &Cont) -> String {
    match k {
        Cont::Expr(e) => dump_expr(e),
        Cont::Elim(s) => dump_elim(s),
    }
}

pub fn dump_pattern(p: &CorePattern) -> String {
    match p {
        CorePattern::Var(x) => x.clone(),
        CorePattern::Constr(c, ps) if ps.is_empty() => c.clone(),
        CorePattern::Constr(c, ps) => {
            format!("({c} {})", ps.iter().map(dump_pattern).collect::<Vec<_>>().join(" "))
        }
        CorePattern::Dict(fs) => {
            let fs: Vec<String> = fs.iter().map(|(k, p)| format!("({} {})", key(k), dump_pattern(p))).collect();
            format!("(dict {})", fs.join(" "))
        }
    }
}

fn key(k: &str) -> String {
    if !k.is_empty() && k.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
        k.to_string()
    } else {
        string_literal(k)
    }
}
