//! A finished run packaged for a reader. The bundle holds the views and the
//! exported graph; `select` answers queries against it without side effects.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eval::value::Value;
use crate::graph::export::{export_graph, GraphExport};
use crate::graph::roles::{resolve_selection, Roles, Selection};
use crate::graph::{GraphError, VertexId};
use crate::loader::{Program, PRELUDE, PRELUDE_NAME};
use crate::view::{visit_elements, ElementId, HighlightState, NamedView, ViewBuilder, ViewError, ViewSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocumentError {
    #[error("input {0} is not defined at the top level of the program")]
    UnboundInput(String),
    #[error("cannot display {what}: {error}")]
    View { what: String, error: ViewError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Bundle {
    pub entry: String,
    /// Text of every module, the prelude included, by name.
    pub sources: BTreeMap<String, String>,
    pub output: ViewSpec,
    pub inputs: Vec<NamedView>,
    pub graph: GraphExport,
    /// Every documented value, by ascending vertex id.
    pub intermediates: Vec<IntermediateView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IntermediateView {
    pub vertex_id: VertexId,
    pub paragraph: ViewSpec,
    pub view: ViewSpec,
}

/// Answer to a selection. `highlights` lists only the elements that light up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectResponse {
    pub reached: Vec<VertexId>,
    pub inputs: Vec<VertexId>,
    pub outputs: Vec<VertexId>,
    pub constants: Vec<VertexId>,
    /// In discovery order.
    pub intermediates: Vec<IntermediateView>,
    pub highlights: BTreeMap<ElementId, HighlightState>,
}

pub struct Document {
    pub program: Program,
    pub roles: Roles,
    pub bundle: Bundle,
    elements: Vec<(ElementId, VertexId)>,
    by_vertex: BTreeMap<VertexId, usize>,
}

impl Document {
    /// `inputs` name top-level definitions whose values count as inputs.
    pub fn new(program: Program, inputs: &[String]) -> Result<Self, DocumentError> {
        let mut input_values: Vec<(String, Value)> = Vec::with_capacity(inputs.len());
        for name in inputs {
            let v = program.lookup(name).ok_or_else(|| DocumentError::UnboundInput(name.clone()))?;
            input_values.push((name.clone(), v.clone()));
        }
        let roles = Roles::new(input_values.iter().map(|(_, v)| v), &program.value);

        let mut views = ViewBuilder::new();
        let view_err = |what: String| move |error| DocumentError::View { what, error };
        let output = views.build(&program.value).map_err(view_err("the output".into()))?;
        let mut input_views = Vec::with_capacity(input_values.len());
        for (name, v) in &input_values {
            let view = views.build(v).map_err(view_err(format!("input {name}")))?;
            input_views.push(NamedView { name: name.clone(), view });
        }
        let mut intermediates = Vec::new();
        let mut by_vertex = BTreeMap::new();
        for (id, vx) in program.graph.vertices() {
            let (Some(para), Some(value)) = (&vx.doc, &vx.value) else { continue };
            let what = format!("the value documented at vertex {id}");
            let paragraph = views.build(para).map_err(view_err(what.clone()))?;
            let view = views.build(value).map_err(view_err(what))?;
            by_vertex.insert(id, intermediates.len());
            intermediates.push(IntermediateView { vertex_id: id, paragraph, view });
        }

        let files = program.modules.source_names();
        let mut sources: BTreeMap<String, String> =
            program.modules.nodes.values().map(|n| (n.name.clone(), n.text.clone())).collect();
        sources.insert(PRELUDE_NAME.to_string(), PRELUDE.to_string());
        let bundle = Bundle {
            entry: program.modules.entry.clone(),
            sources,
            output,
            inputs: input_views,
            graph: export_graph(&program.graph, &roles, &files),
            intermediates,
        };
        let elements = views.elements().collect();
        Ok(Document { program, roles, bundle, elements, by_vertex })
    }

    /// The same request always gets the same answer; nothing is remembered
    /// between calls.
    pub fn select(&self, sel: &Selection) -> Result<SelectResponse, GraphError> {
        let r = resolve_selection(&self.program.graph, &self.roles, sel)?;
        let intermediates = r
            .intermediates
            .iter()
            .map(|i| self.bundle.intermediates[self.by_vertex[&i.vertex]].clone())
            .collect();
        let state = HighlightState::from(sel.mode);
        let highlights = self.elements.iter().filter(|(_, v)| r.slice.contains(*v)).map(|(e, _)| (*e, state)).collect();
        Ok(SelectResponse {
            reached: r.slice.order().to_vec(),
            inputs: r.inputs,
            outputs: r.outputs,
            constants: r.constants,
            intermediates,
            highlights,
        })
    }

    /// Elements of the output view, row by row for a matrix.
    pub fn output_elements(&self) -> Vec<(ElementId, VertexId)> {
        let mut out = Vec::new();
        visit_elements(&self.bundle.output, &mut |e, v| out.push((e, v)));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.bundle).expect("bundles serialize")
    }
}
