//! Renders surface syntax back to source text that reparses to an equal AST.

use crate::syntax::ast::*;
use crate::syntax::token::Keyword;

const STEP: usize = 4;

pub fn module(m: &SurfaceModule) -> String {
    let mut lines = Vec::new();
    for imp in &m.imports {
        lines.push(format!("import {}", string_literal(&imp.path)));
    }
    for d in &m.defs {
        lines.push(definition(d, 0));
    }
    if let Some(body) = &m.body {
        lines.push(stmt(body, 0));
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

/// A term in statement position, possibly spanning several lines.
pub fn term(t: &Term) -> String {
    stmt(t, 0)
}

fn pad(n: usize) -> String {
    " ".repeat(n)
}

fn needs_block(t: &Term) -> bool {
    match &t.kind {
        TermKind::If(..) | TermKind::Match(..) | TermKind::Let(..) => true,
        TermKind::Doc(_, target) => needs_block(target),
        TermKind::Lambda(_, body) => needs_block(body),
        _ => false,
    }
}

fn suite(t: &Term, ind: usize) -> String {
    if needs_block(t) {
        format!("\n{}{}", pad(ind + STEP), stmt(t, ind + STEP))
    } else {
        format!(" {}", inline(t))
    }
}

fn definition(d: &SurfaceDefinition, ind: usize) -> String {
    match d {
        SurfaceDefinition::Var { pattern: p, body } => format!("def {} ={}", pattern(p), suite(body, ind)),
        SurfaceDefinition::Clause { name, params, body, .. } => {
            let ps: Vec<String> = params.iter().map(pattern).collect();
            format!("def {name}({}):{}", ps.join(", "), suite(body, ind))
        }
    }
}

fn stmt(t: &Term, ind: usize) -> String {
    match &t.kind {
        TermKind::If(c, a, b) => format!(
            "if {}:\n{}{}\n{}else:\n{}{}",
            operand(c),
            pad(ind + STEP),
            stmt(a, ind + STEP),
            pad(ind),
            pad(ind + STEP),
            stmt(b, ind + STEP)
        ),
        TermKind::Match(s, clauses) => {
            let mut out = format!("match {}:", operand(s));
            for c in clauses {
                out.push('\n');
                out.push_str(&pad(ind + STEP));
                out.push_str(&format!("case {}:{}", pattern(&c.pattern), suite(&c.body, ind + STEP)));
            }
            out
        }
        TermKind::Let(defs, body) => {
            let mut out = String::new();
            for (i, d) in defs.iter().enumerate() {
                if i > 0 {
                    out.push_str(&pad(ind));
                }
                out.push_str(&definition(d, ind));
                out.push('\n');
            }
            out.push_str(&pad(ind));
            out.push_str(&stmt(body, ind));
            out
        }
        TermKind::Doc(d, target) => format!("@doc({}) {}", inline(d), stmt(target, ind)),
        TermKind::Lambda(ps, body) => {
            let ps: Vec<String> = ps.iter().map(pattern).collect();
            format!("lambda {}: {}", ps.join(", "), stmt(body, ind))
        }
        _ => inline(t),
    }
}

/// Wraps terms that are not self-delimiting.
fn operand(t: &Term) -> String {
    match &t.kind {
        TermKind::Binary(..)
        | TermKind::InfixFun(..)
        | TermKind::If(..)
        | TermKind::Lambda(..)
        | TermKind::Doc(..)
        | TermKind::Let(..)
        | TermKind::Match(..) => format!("({})", inline(t)),
        _ => inline(t),
    }
}

/// Wraps only the open-ended forms, for positions parsed at operator level.
fn low(t: &Term) -> String {
    match &t.kind {
        TermKind::If(..) | TermKind::Lambda(..) | TermKind::Doc(..) => format!("({})", inline(t)),
        _ => inline(t),
    }
}

fn inline(t: &Term) -> String {
    match &t.kind {
        TermKind::Var(x) => x.clone(),
        TermKind::Int(n) => n.to_string(),
        TermKind::Float(x) => float_literal(*x),
        TermKind::Str(s) => string_literal(s),
        TermKind::Paragraph(elems) => {
            let mut out = String::from("p\"");
            for e in elems {
                match e {
                    ParagraphElement::Token(text) => {
                        for c in text.chars() {
                            match c {
                                '"' | '\\' | '{' | '}' => {
                                    out.push('\\');
                                    out.push(c);
                                }
                                '\n' => out.push_str("\\n"),
                                '\t' => out.push_str("\\t"),
                                c => out.push(c),
                            }
                        }
                    }
                    ParagraphElement::Unquote(t) => {
                        out.push('{');
                        out.push_str(&inline(t));
                        out.push('}');
                    }
                }
            }
            out.push('"');
            out
        }
        TermKind::Call(f, args) => format!("{}({})", operand(f), comma(args)),
        TermKind::Constr(c, args) if args.is_empty() => c.clone(),
        TermKind::Constr(c, args) => format!("{c}({})", comma(args)),
        TermKind::Dict(fields) => {
            let fs: Vec<String> = fields.iter().map(|(k, v)| format!("{}: {}", dict_key(k), inline(v))).collect();
            format!("{{{}}}", fs.join(", "))
        }
        TermKind::Project(e, x) => format!("{}.{x}", operand(e)),
        TermKind::DynProject(e, k) => format!("{}[{}]", operand(e), inline(k)),
        TermKind::Op(op) => format!("({})", op.symbol()),
        TermKind::Binary(op, l, r) => format!("{} {} {}", operand(l), op.symbol(), operand(r)),
        TermKind::InfixFun(f, l, r) => format!("{} `{f}` {}", operand(l), operand(r)),
        TermKind::If(c, a, b) => format!("if {}: {} else: {}", operand(c), operand(a), inline(b)),
        TermKind::Match(..) | TermKind::Let(..) => stmt(t, 0),
        TermKind::List(elems) => format!("[{}]", comma(elems)),
        TermKind::ListComp(s, quals) => {
            let mut out = format!("[{}", low(s));
            for q in quals {
                match q {
                    Qualifier::Gen(p, src) => out.push_str(&format!(" for {} in {}", pattern(p), low(src))),
                    Qualifier::Guard(g) => out.push_str(&format!(" if {}", low(g))),
                    Qualifier::Decl(p, e) => out.push_str(&format!(" def {} = {}", pattern(p), low(e))),
                }
            }
            out.push(']');
            out
        }
        TermKind::Lambda(ps, body) => {
            let ps: Vec<String> = ps.iter().map(pattern).collect();
            format!("lambda {}: {}", ps.join(", "), inline(body))
        }
        TermKind::Doc(d, target) => format!("@doc({}) {}", inline(d), inline(target)),
    }
}

fn comma(ts: &[Term]) -> String {
    ts.iter().map(inline).collect::<Vec<_>>().join(", ")
}

pub fn pattern(p: &Pattern) -> String {
    match &p.kind {
        PatternKind::Var(x) => x.clone(),
        PatternKind::Int(n) => n.to_string(),
        PatternKind::Constr(c, ps) if ps.is_empty() => c.clone(),
        PatternKind::Constr(c, ps) => {
            format!("{c}({})", ps.iter().map(pattern).collect::<Vec<_>>().join(", "))
        }
        PatternKind::List(ps, rest) => {
            let mut items: Vec<String> = ps.iter().map(pattern).collect();
            if let Some(r) = rest {
                items.push(format!("*{}", pattern(r)));
            }
            format!("[{}]", items.join(", "))
        }
        PatternKind::Dict(fields) => {
            let fs: Vec<String> = fields.iter().map(|(k, v)| format!("{}: {}", dict_key(k), pattern(v))).collect();
            format!("{{{}}}", fs.join(", "))
        }
    }
}

fn dict_key(k: &str) -> String {
    let plain = k.starts_with(|c: char| c.is_lowercase() || c == '_')
        && k.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
        && Keyword::from_ident(k).is_none();
    if plain {
        k.to_string()
    } else {
        string_literal(k)
    }
}

pub fn float_literal(x: f64) -> String {
    let s = format!("{x}");
    if s.contains('.') || !x.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

pub fn string_literal(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::SourceId;
    use crate::syntax::parser::parse_source;

    fn round_trip(src: &str) {
        let m1 = parse_source(src, SourceId::default()).unwrap();
        let printed = module(&m1);
        let m2 = parse_source(&printed, SourceId::default()).unwrap_or_else(|e| panic!("{e}\n{printed}"));
        assert_eq!(m1, m2, "printed:\n{printed}");
    }

    #[test]
    fn round_trips() {
        round_trip("def x = 5\nx + x\n");
        round_trip("def f(x):\n    if x > 1:\n        x\n    else:\n        0\nf(2)\n");
        round_trip("def f([h, *t]): h\ndef f([]): 0\n[f(x) for x in xs if x > 0 def y = x]\n");
        round_trip("@doc(p\"a {x} \\{b\\}\") {a: 1, \"B c\": [1, 2.5, -3]}.a\n");
        round_trip("match x:\n    case Cons(a, b): a `plus` b\n    case {k: v}:\n        def z = v\n        z\n");
        round_trip("(lambda x, y: if x: y else: (+))(True)\n");
        round_trip("def m = foldl((+), 0, xs)[\"k\"]\n1 - -1\n");
    }

    #[test]
    fn floats_keep_their_point() {
        assert_eq!(float_literal(3.0), "3.0");
        assert_eq!(float_literal(0.1), "0.1");
        assert_eq!(float_literal(-2.5), "-2.5");
    }
}
