//! Turning values into view descriptions a viewer can draw, and mapping the
//! clickable parts of those views back to graph vertices.
//!
//! Each distinct vertex shown in a document gets one element id. If the same
//! value appears twice (say `[[x, x]]`), both positions carry the same id, so
//! an element always stands for exactly one vertex and vice versa.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::desugar::signature::{BAR_CHART, MATRIX, MULTI_VIEW, PARAGRAPH, STACKED_BAR_CHART};
use crate::eval::prim::format_number;
use crate::eval::value::{Value, ValueKind};
use crate::graph::roles::Mode;
use crate::graph::{Slice, VertexId};

pub type ElementId = u32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum ViewSpec {
    #[serde(rename_all = "camelCase")]
    Matrix { vertex_id: VertexId, rows: usize, cols: usize, cells: Vec<Vec<Cell>> },
    #[serde(rename_all = "camelCase")]
    Table { vertex_id: VertexId, columns: Vec<String>, rows: Vec<TableRow> },
    #[serde(rename_all = "camelCase")]
    BarChart { vertex_id: VertexId, caption: Option<String>, bars: Vec<Bar> },
    #[serde(rename_all = "camelCase")]
    StackedBarChart { vertex_id: VertexId, caption: Option<String>, stacks: Vec<Stack> },
    #[serde(rename_all = "camelCase")]
    Paragraph { vertex_id: VertexId, runs: Vec<Run> },
    #[serde(rename_all = "camelCase")]
    MultiView { vertex_id: VertexId, children: Vec<NamedView> },
    #[serde(rename_all = "camelCase")]
    Scalar { element_id: ElementId, vertex_id: VertexId, text: String },
}

/// A matrix cell, or any other labelled element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Cell {
    pub element_id: ElementId,
    pub vertex_id: VertexId,
    pub text: String,
}

/// One table row: the element is the row's dictionary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TableRow {
    pub element_id: ElementId,
    pub vertex_id: VertexId,
    pub cells: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Bar {
    pub element_id: ElementId,
    pub vertex_id: VertexId,
    pub x: String,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Stack {
    pub element_id: ElementId,
    pub vertex_id: VertexId,
    pub x: String,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Segment {
    pub element_id: ElementId,
    pub vertex_id: VertexId,
    pub y: String,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum Run {
    /// A string in the paragraph, whether written in place or spliced in.
    #[serde(rename_all = "camelCase")]
    Text { element_id: ElementId, vertex_id: VertexId, text: String },
    /// A spliced number or other small value, shown inline.
    #[serde(rename_all = "camelCase")]
    Value { element_id: ElementId, vertex_id: VertexId, text: String },
    /// A spliced value with a view of its own, such as a matrix.
    View { view: Box<ViewSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedView {
    pub name: String,
    pub view: ViewSpec,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ViewError {
    #[error("matrix is not rectangular: {0}")]
    Ragged(String),
    #[error("table rows do not share the same fields: {0}")]
    Heterogeneous(String),
    #[error("malformed {kind}: {detail}")]
    Malformed { kind: &'static str, detail: String },
    #[error("unknown element {0}")]
    UnknownElement(ElementId),
}

/// Hands out element ids, one per distinct vertex, across every view built
/// with the same builder.
#[derive(Debug, Clone, Default)]
pub struct ViewBuilder {
    ids: BTreeMap<VertexId, ElementId>,
    vertices: Vec<VertexId>,
}

impl ViewBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn element(&mut self, v: VertexId) -> ElementId {
        *self.ids.entry(v).or_insert_with(|| {
            self.vertices.push(v);
            (self.vertices.len() - 1) as ElementId
        })
    }

    /// The vertex behind an element.
    pub fn vertex_of(&self, e: ElementId) -> Option<VertexId> {
        self.vertices.get(e as usize).copied()
    }

    pub fn element_of(&self, v: VertexId) -> Option<ElementId> {
        self.ids.get(&v).copied()
    }

    /// Every element handed out so far, with its vertex.
    pub fn elements(&self) -> impl Iterator<Item = (ElementId, VertexId)> + '_ {
        self.vertices.iter().enumerate().map(|(e, &v)| (e as ElementId, v))
    }

    pub fn build(&mut self, v: &Value) -> Result<ViewSpec, ViewError> {
        let v = v.strip();
        if let Some((c, args)) = v.as_constr() {
            match (c, args) {
                (MATRIX, [r, c, cells]) => return self.matrix(v, r, c, cells),
                (PARAGRAPH, [items]) => return self.paragraph(v, items),
                (BAR_CHART, [spec]) => return self.bar_chart(v, spec),
                (STACKED_BAR_CHART, [spec]) => return self.stacked_bar_chart(v, spec),
                (MULTI_VIEW, [children]) => return self.multi_view(v, children),
                _ => {}
            }
        }
        if let Some(items) = v.as_list() {
            if !items.is_empty() && items.iter().all(|x| x.as_dict().is_some()) {
                return self.table(v, &items);
            }
        }
        Ok(self.scalar(v))
    }

    fn scalar(&mut self, v: &Value) -> ViewSpec {
        ViewSpec::Scalar { element_id: self.element(v.addr), vertex_id: v.addr, text: text_of(v) }
    }

    fn matrix(&mut self, v: &Value, r: &Value, c: &Value, cells: &Value) -> Result<ViewSpec, ViewError> {
        let dim = |x: &Value| match x.kind() {
            ValueKind::Int(n) if *n >= 0 => Ok(*n as usize),
            _ => Err(ViewError::Malformed { kind: "matrix", detail: format!("dimension {x} is not a size") }),
        };
        let (rows, cols) = (dim(r)?, dim(c)?);
        let Some(row_values) = cells.as_list() else {
            return Err(ViewError::Malformed { kind: "matrix", detail: "cells are not a list".into() });
        };
        if row_values.len() != rows {
            return Err(ViewError::Ragged(format!("expected {rows} rows, found {}", row_values.len())));
        }
        let mut out = Vec::with_capacity(rows);
        for (i, row) in row_values.iter().enumerate() {
            let Some(items) = row.as_list() else {
                return Err(ViewError::Malformed { kind: "matrix", detail: format!("row {i} is not a list") });
            };
            if items.len() != cols {
                return Err(ViewError::Ragged(format!("row {i} has {} cells, expected {cols}", items.len())));
            }
            out.push(items.iter().map(|x| self.cell(x)).collect());
        }
        Ok(ViewSpec::Matrix { vertex_id: v.addr, rows, cols, cells: out })
    }

    fn cell(&mut self, x: &Value) -> Cell {
        let x = x.strip();
        Cell { element_id: self.element(x.addr), vertex_id: x.addr, text: text_of(x) }
    }

    fn table(&mut self, v: &Value, items: &[&Value]) -> Result<ViewSpec, ViewError> {
        let columns: Vec<String> = items[0].as_dict().unwrap().iter().map(|(k, _)| k.clone()).collect();
        let mut sorted = columns.clone();
        sorted.sort();
        let mut rows = Vec::with_capacity(items.len());
        for (i, row) in items.iter().enumerate() {
            let mut keys: Vec<&String> = row.as_dict().unwrap().iter().map(|(k, _)| k).collect();
            keys.sort();
            if keys.len() != sorted.len() || keys.iter().zip(&sorted).any(|(a, b)| *a != b) {
                return Err(ViewError::Heterogeneous(format!("row {i} has fields {keys:?}, expected {sorted:?}")));
            }
            let cells = columns.iter().map(|k| text_of(row.field(k).unwrap())).collect();
            let row = row.strip();
            rows.push(TableRow { element_id: self.element(row.addr), vertex_id: row.addr, cells });
        }
        Ok(ViewSpec::Table { vertex_id: v.addr, columns, rows })
    }

    fn paragraph(&mut self, v: &Value, items: &Value) -> Result<ViewSpec, ViewError> {
        let Some(items) = items.as_list() else {
            return Err(ViewError::Malformed { kind: "paragraph", detail: "contents are not a list".into() });
        };
        let mut runs = Vec::with_capacity(items.len());
        for x in items {
            let x = x.strip();
            let run = match x.kind() {
                ValueKind::Str(s) => {
                    Run::Text { element_id: self.element(x.addr), vertex_id: x.addr, text: s.clone() }
                }
                _ => match self.build(x)? {
                    ViewSpec::Scalar { element_id, vertex_id, text } => Run::Value { element_id, vertex_id, text },
                    view => Run::View { view: Box::new(view) },
                },
            };
            runs.push(run);
        }
        Ok(ViewSpec::Paragraph { vertex_id: v.addr, runs })
    }

    fn bar_chart(&mut self, v: &Value, spec: &Value) -> Result<ViewSpec, ViewError> {
        let (caption, data) = chart_parts("bar chart", spec)?;
        let mut bars = Vec::with_capacity(data.len());
        for d in data {
            let x = label("bar chart", d, "x")?;
            let y = number("bar chart", d, "y")?;
            let d = d.strip();
            bars.push(Bar { element_id: self.element(d.addr), vertex_id: d.addr, x, y });
        }
        Ok(ViewSpec::BarChart { vertex_id: v.addr, caption, bars })
    }

    fn stacked_bar_chart(&mut self, v: &Value, spec: &Value) -> Result<ViewSpec, ViewError> {
        const KIND: &str = "stacked bar chart";
        let (caption, data) = chart_parts(KIND, spec)?;
        let mut stacks = Vec::with_capacity(data.len());
        for d in data {
            let x = label(KIND, d, "x")?;
            let segs = d
                .field("bars")
                .and_then(Value::as_list)
                .ok_or_else(|| ViewError::Malformed { kind: KIND, detail: format!("{d} has no list of bars") })?;
            let d = d.strip();
            let element_id = self.element(d.addr);
            let mut segments = Vec::with_capacity(segs.len());
            for s in segs {
                let y = label(KIND, s, "y")?;
                let z = number(KIND, s, "z")?;
                let s = s.strip();
                segments.push(Segment { element_id: self.element(s.addr), vertex_id: s.addr, y, z });
            }
            stacks.push(Stack { element_id, vertex_id: d.addr, x, segments });
        }
        Ok(ViewSpec::StackedBarChart { vertex_id: v.addr, caption, stacks })
    }

    fn multi_view(&mut self, v: &Value, children: &Value) -> Result<ViewSpec, ViewError> {
        let Some(fields) = children.as_dict() else {
            return Err(ViewError::Malformed { kind: "multi-view", detail: "children are not a dictionary".into() });
        };
        let mut out = Vec::with_capacity(fields.len());
        for (name, child) in fields {
            out.push(NamedView { name: name.clone(), view: self.build(child)? });
        }
        Ok(ViewSpec::MultiView { vertex_id: v.addr, children: out })
    }
}

fn chart_parts<'a>(kind: &'static str, spec: &'a Value) -> Result<(Option<String>, Vec<&'a Value>), ViewError> {
    let malformed = |detail: String| ViewError::Malformed { kind, detail };
    if spec.as_dict().is_none() {
        return Err(malformed(format!("{spec} is not a dictionary")));
    }
    let caption = spec.field("caption").map(text_of);
    let data = spec
        .field("data")
        .and_then(Value::as_list)
        .ok_or_else(|| malformed("missing list field data".into()))?;
    if let Some(bad) = data.iter().find(|d| d.as_dict().is_none()) {
        return Err(malformed(format!("data item {bad} is not a dictionary")));
    }
    Ok((caption, data))
}

fn label(kind: &'static str, d: &Value, field: &str) -> Result<String, ViewError> {
    d.field(field).map(text_of).ok_or_else(|| ViewError::Malformed { kind, detail: format!("{d} has no field {field}") })
}

fn number(kind: &'static str, d: &Value, field: &str) -> Result<f64, ViewError> {
    d.field(field)
        .and_then(Value::as_number)
        .ok_or_else(|| ViewError::Malformed { kind, detail: format!("{d} has no numeric field {field}") })
}

/// How a value reads inline: strings without quotes, numbers in their
/// shortest form, anything else as printed.
pub fn text_of(v: &Value) -> String {
    match v.kind() {
        ValueKind::Str(s) => s.clone(),
        _ => format_number(v).unwrap_or_else(|| v.to_string()),
    }
}

/// Builds one view on its own, with element ids starting from 0.
pub fn build_view(v: &Value) -> Result<ViewSpec, ViewError> {
    ViewBuilder::new().build(v)
}

/// The vertex an element of `view` stands for.
pub fn element_to_vertices(view: &ViewSpec, e: ElementId) -> Result<VertexId, ViewError> {
    let mut found = None;
    visit_elements(view, &mut |id, v| {
        if id == e {
            found = Some(v);
        }
    });
    found.ok_or(ViewError::UnknownElement(e))
}

/// Calls `f(element, vertex)` for every element position in the view.
pub fn visit_elements(view: &ViewSpec, f: &mut dyn FnMut(ElementId, VertexId)) {
    match view {
        ViewSpec::Matrix { cells, .. } => cells.iter().flatten().for_each(|c| f(c.element_id, c.vertex_id)),
        ViewSpec::Table { rows, .. } => rows.iter().for_each(|r| f(r.element_id, r.vertex_id)),
        ViewSpec::BarChart { bars, .. } => bars.iter().for_each(|b| f(b.element_id, b.vertex_id)),
        ViewSpec::StackedBarChart { stacks, .. } => {
            for s in stacks {
                f(s.element_id, s.vertex_id);
                s.segments.iter().for_each(|g| f(g.element_id, g.vertex_id));
            }
        }
        ViewSpec::Paragraph { runs, .. } => {
            for r in runs {
                match r {
                    Run::Text { element_id, vertex_id, .. } | Run::Value { element_id, vertex_id, .. } => {
                        f(*element_id, *vertex_id)
                    }
                    Run::View { view } => visit_elements(view, f),
                }
            }
        }
        ViewSpec::MultiView { children, .. } => children.iter().for_each(|c| visit_elements(&c.view, f)),
        ViewSpec::Scalar { element_id, vertex_id, .. } => f(*element_id, *vertex_id),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum HighlightState {
    #[default]
    None,
    Transient,
    Persistent,
}

impl From<Mode> for HighlightState {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Persistent => HighlightState::Persistent,
            Mode::Transient => HighlightState::Transient,
        }
    }
}

/// Highlight state for every element of a view.
pub type Highlights = BTreeMap<ElementId, HighlightState>;

/// Marks the elements whose vertex is in the slice with the selection's mode.
pub fn apply_slice(view: &ViewSpec, slice: &Slice, mode: Mode) -> Highlights {
    let mut out = Highlights::new();
    visit_elements(view, &mut |e, v| {
        let state = if slice.contains(v) { mode.into() } else { HighlightState::None };
        out.insert(e, state);
    });
    out
}

/// Lays transient highlights over persistent ones. A persistent highlight
/// is never downgraded.
pub fn combine(persistent: &Highlights, transient: &Highlights) -> Highlights {
    let mut out = persistent.clone();
    for (&e, &s) in transient {
        let slot = out.entry(e).or_default();
        *slot = (*slot).max(s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DepGraph, Direction, Origin};

    fn int(a: VertexId, n: i64) -> Value {
        Value::new(a, ValueKind::Int(n))
    }

    fn list(a: VertexId, items: Vec<Value>) -> Value {
        let nil = Value::new(a, ValueKind::Constr("[]".into(), vec![]));
        items.into_iter().rev().fold(nil, |t, h| Value::new(a, ValueKind::Constr("Cons".into(), vec![h, t])))
    }

    #[test]
    fn two_by_two_matrix() {
        let cells = list(10, vec![list(11, vec![int(1, 1), int(2, 2)]), list(12, vec![int(3, 3), int(4, 4)])]);
        let m = Value::new(9, ValueKind::Constr("Matrix".into(), vec![int(7, 2), int(8, 2), cells]));
        let view = build_view(&m).unwrap();
        let mut seen = Vec::new();
        visit_elements(&view, &mut |e, v| seen.push((e, v)));
        assert_eq!(seen, [(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(element_to_vertices(&view, 3), Ok(4));
        assert_eq!(element_to_vertices(&view, 4), Err(ViewError::UnknownElement(4)));
    }

    #[test]
    fn ragged_matrices_are_rejected() {
        let cells = list(10, vec![list(11, vec![int(1, 1)]), list(12, vec![int(3, 3), int(4, 4)])]);
        let m = Value::new(9, ValueKind::Constr("Matrix".into(), vec![int(7, 2), int(8, 2), cells]));
        assert!(matches!(build_view(&m), Err(ViewError::Ragged(_))));
    }

    #[test]
    fn persistent_survives_transient() {
        let mut g = DepGraph::new();
        let a = g.add_vertex(&[], Origin::Literal, None);
        let b = g.add_vertex(&[], Origin::Literal, None);
        let view = build_view(&list(5, vec![int(a, 1), int(b, 2)])).unwrap();
        // A plain list is a scalar view: one element for the whole list.
        assert!(matches!(view, ViewSpec::Scalar { .. }));

        let m = Value::new(9, ValueKind::Constr("Matrix".into(), vec![int(7, 1), int(8, 2), list(10, vec![list(11, vec![int(a, 1), int(b, 2)])])]));
        let view = build_view(&m).unwrap();
        let p = apply_slice(&view, &g.slice(&[a], Direction::Upstream).unwrap(), Mode::Persistent);
        let t = apply_slice(&view, &g.slice(&[a, b], Direction::Upstream).unwrap(), Mode::Transient);
        let both = combine(&p, &t);
        assert_eq!(both[&0], HighlightState::Persistent);
        assert_eq!(both[&1], HighlightState::Transient);
        let none = apply_slice(&view, &Slice::default(), Mode::Persistent);
        assert!(none.values().all(|s| *s == HighlightState::None));
    }
}
