//! What each vertex means to a reader. Most are plumbing; the interesting
//! ones belong to an input or the output, carry documentation, or come from
//! a literal.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{DepGraph, Direction, GraphError, Intermediate, Origin, Slice, VertexId};
use crate::eval::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Role {
    Input,
    Output,
    Intermediate,
    Constant,
    Internal,
}

/// Roles are decided in declaration order: a vertex inside an input value
/// is an input even if the output shares it.
#[derive(Debug, Clone, Default)]
pub struct Roles {
    inputs: BTreeSet<VertexId>,
    outputs: BTreeSet<VertexId>,
}

impl Roles {
    pub fn new<'a>(inputs: impl IntoIterator<Item = &'a Value>, output: &Value) -> Self {
        let mut ins = Vec::new();
        for v in inputs {
            v.subtree(&mut ins);
        }
        let mut outs = Vec::new();
        output.subtree(&mut outs);
        Roles { inputs: ins.into_iter().collect(), outputs: outs.into_iter().collect() }
    }

    pub fn role(&self, graph: &DepGraph, v: VertexId) -> Role {
        if self.inputs.contains(&v) {
            return Role::Input;
        }
        if self.outputs.contains(&v) {
            return Role::Output;
        }
        match graph.vertex(v) {
            Some(x) if x.doc.is_some() => Role::Intermediate,
            Some(x) if x.origin == Origin::Literal => Role::Constant,
            _ => Role::Internal,
        }
    }

    pub fn inputs(&self) -> &BTreeSet<VertexId> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<VertexId> {
        &self.outputs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Mode {
    #[default]
    Persistent,
    Transient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub roots: Vec<VertexId>,
    pub direction: Direction,
    #[serde(default)]
    pub mode: Mode,
}

/// A slice with its vertices sorted by role. Each list keeps discovery order.
#[derive(Debug, Clone, Default)]
pub struct SliceResult {
    pub slice: Slice,
    pub inputs: Vec<VertexId>,
    pub outputs: Vec<VertexId>,
    pub constants: Vec<VertexId>,
    pub intermediates: Vec<Intermediate>,
}

impl SliceResult {
    pub fn reached(&self) -> &[VertexId] {
        self.slice.order()
    }
}

pub fn resolve_selection(graph: &DepGraph, roles: &Roles, sel: &Selection) -> Result<SliceResult, GraphError> {
    let slice = graph.slice(&sel.roots, sel.direction)?;
    let mut out = SliceResult { intermediates: graph.collect_intermediates(&slice), ..Default::default() };
    for &v in slice.order() {
        match roles.role(graph, v) {
            Role::Input => out.inputs.push(v),
            Role::Output => out.outputs.push(v),
            Role::Constant => out.constants.push(v),
            Role::Intermediate | Role::Internal => {}
        }
    }
    out.slice = slice;
    Ok(out)
}
