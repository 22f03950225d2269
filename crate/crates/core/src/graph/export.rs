//! Serializable snapshot of the graph for viewers and tests.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::roles::{Role, Roles};
use super::{DepGraph, Origin, VertexId};
use crate::desugar::signature::{CONS, NIL};
use crate::eval::value::{Value, ValueKind};
use crate::span::{SourceId, Span};
use crate::syntax::pretty::{float_literal, string_literal};

/// Longest value summary, in characters, before it is cut short.
pub const SUMMARY_LIMIT: usize = 48;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphExport {
    pub vertices: Vec<VertexExport>,
    pub edges: Vec<[VertexId; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VertexExport {
    pub id: VertexId,
    pub role: Role,
    pub origin: Origin,
    pub value_summary: Option<String>,
    pub has_doc: bool,
    pub span: Option<SpanExport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanExport {
    pub file: String,
    pub line: u32,
    pub col: u32,
}

impl SpanExport {
    pub fn new(span: Span, files: &BTreeMap<SourceId, String>) -> Self {
        let file = files.get(&span.source).cloned().unwrap_or_default();
        SpanExport { file, line: span.line, col: span.col }
    }
}

pub fn export_graph(graph: &DepGraph, roles: &Roles, files: &BTreeMap<SourceId, String>) -> GraphExport {
    let vertices = graph
        .vertices()
        .map(|(id, v)| VertexExport {
            id,
            role: roles.role(graph, id),
            origin: v.origin,
            value_summary: v.value.as_ref().map(|x| summarize(x, SUMMARY_LIMIT)),
            has_doc: v.doc.is_some(),
            span: v.span.map(|s| SpanExport::new(s, files)),
        })
        .collect();
    let mut edges: Vec<[VertexId; 2]> = graph.edges().map(|(s, t)| [s, t]).collect();
    edges.sort_unstable();
    GraphExport { vertices, edges }
}

/// A short rendering of a value, cut at about `limit` characters. Costs
/// O(limit) however large the value is.
pub fn summarize(v: &Value, limit: usize) -> String {
    let mut out = String::new();
    if write_value(&mut out, v, limit).is_err() {
        let mut cut = limit.min(out.len());
        while !out.is_char_boundary(cut) {
            cut -= 1;
        }
        out.truncate(cut);
        out.push_str("...");
    }
    out
}

struct Full;

fn put(out: &mut String, s: &str, limit: usize) -> Result<(), Full> {
    out.push_str(s);
    if out.len() > limit {
        Err(Full)
    } else {
        Ok(())
    }
}

fn write_value(out: &mut String, v: &Value, limit: usize) -> Result<(), Full> {
    match v.kind() {
        ValueKind::Int(n) => put(out, &n.to_string(), limit),
        ValueKind::Float(x) => put(out, &float_literal(*x), limit),
        ValueKind::Str(s) => {
            // Avoid escaping a huge string only to throw most of it away.
            let head: String = s.chars().take(limit + 1).collect();
            put(out, &string_literal(&head), limit)?;
            if head.len() < s.len() {
                return Err(Full);
            }
            Ok(())
        }
        ValueKind::Closure(_) | ValueKind::Prim(..) => put(out, "<function>", limit),
        ValueKind::Dict(fs) => {
            put(out, "{", limit)?;
            for (i, (k, x)) in fs.iter().enumerate() {
                if i > 0 {
                    put(out, ", ", limit)?;
                }
                let _ = write!(out, "{k}: ");
                write_value(out, x, limit)?;
            }
            put(out, "}", limit)
        }
        ValueKind::Constr(c, _) if c == CONS || c == NIL => {
            put(out, "[", limit)?;
            let mut cur = v;
            let mut first = true;
            while let Some((CONS, [h, t])) = cur.as_constr() {
                if !first {
                    put(out, ", ", limit)?;
                }
                first = false;
                write_value(out, h, limit)?;
                cur = t;
            }
            if !matches!(cur.as_constr(), Some((NIL, []))) {
                put(out, " | ", limit)?;
                write_value(out, cur, limit)?;
            }
            put(out, "]", limit)
        }
        ValueKind::Constr(c, args) => {
            put(out, c, limit)?;
            if !args.is_empty() {
                put(out, "(", limit)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        put(out, ", ", limit)?;
                    }
                    write_value(out, a, limit)?;
                }
                put(out, ")", limit)?;
            }
            Ok(())
        }
        ValueKind::Doc(..) => unreachable!("kind() strips documentation"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Value {
        Value::new(0, ValueKind::Int(n))
    }

    fn list(items: Vec<Value>) -> Value {
        items
            .into_iter()
            .rev()
            .fold(Value::new(0, ValueKind::Constr(NIL.into(), vec![])), |t, h| {
                Value::new(0, ValueKind::Constr(CONS.into(), vec![h, t]))
            })
    }

    #[test]
    fn summaries_match_display_when_short() {
        let v = list(vec![int(1), int(2), int(3)]);
        assert_eq!(summarize(&v, 48), v.to_string());
        let d = Value::new(0, ValueKind::Dict(vec![("a".into(), int(1)), ("b".into(), list(vec![]))]));
        assert_eq!(summarize(&d, 48), "{a: 1, b: []}");
    }

    #[test]
    fn long_values_are_cut() {
        let v = list((0..10_000).map(int).collect());
        let s = summarize(&v, 20);
        assert!(s.ends_with("...") && s.len() <= 23, "{s}");
        assert!(s.starts_with("[0, 1, 2"));
    }
}
