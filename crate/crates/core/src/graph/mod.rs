//! The dynamic dependence graph and the reachability queries over it.
//!
//! An edge `a -> b` means the value rooted at `b` depends on the one at `a`.
//! Vertices are only ever added with edges pointing into them, so every edge
//! goes from a smaller id to a larger one and the graph is acyclic by
//! construction.

pub mod export;
pub mod roles;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::eval::value::Value;
use crate::span::Span;

pub type VertexId = u32;

/// What kind of evaluation step created a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Origin {
    /// Numeric or string literal in the source.
    Literal,
    Constructor,
    Dict,
    Closure,
    /// Result of a primitive operation, or a partially applied one.
    Primitive,
    /// Primitive bound in the base environment.
    Builtin,
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub origin: Origin,
    pub span: Option<Span>,
    /// The value rooted here. Filled in once the value is complete.
    pub value: Option<Value>,
    /// Paragraph attached by `@doc`, which makes this vertex an intermediate.
    pub doc: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {0} is not fresh")]
    NotFresh(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
}

#[derive(Debug, Clone, Default)]
pub struct DepGraph {
    vertices: Vec<Vertex>,
    succ: Vec<Vec<VertexId>>,
    pred: Vec<Vec<VertexId>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Dependencies of the roots.
    Upstream,
    /// Dependents of the roots.
    Downstream,
    /// Union of the two; never mixes directions along one path.
    Both,
}

/// Vertices reached by a slice, in breadth-first discovery order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Slice {
    order: Vec<VertexId>,
    members: BTreeSet<VertexId>,
}

impl Slice {
    pub fn contains(&self, v: VertexId) -> bool {
        self.members.contains(&v)
    }
    pub fn order(&self) -> &[VertexId] {
        &self.order
    }
    pub fn set(&self) -> &BTreeSet<VertexId> {
        &self.members
    }
    pub fn len(&self) -> usize {
        self.order.len()
    }
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Intermediate {
    pub vertex: VertexId,
    pub paragraph: Value,
}

impl DepGraph {
    pub fn new() -> Self {
        DepGraph::default()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        (v as usize) < self.vertices.len()
    }

    /// The next unused id. Ids are dense, so this is the vertex count.
    pub fn fresh_address(&self) -> VertexId {
        self.vertices.len() as VertexId
    }

    /// Inserts `alpha` with one edge from every vertex in `sources`.
    pub fn add_star(
        &mut self,
        sources: &[VertexId],
        alpha: VertexId,
        origin: Origin,
        span: Option<Span>,
    ) -> Result<(), GraphError> {
        if alpha != self.fresh_address() {
            return Err(GraphError::NotFresh(alpha));
        }
        if let Some(&bad) = sources.iter().find(|&&s| !self.contains(s)) {
            return Err(GraphError::UnknownVertex(bad));
        }
        let mut srcs = sources.to_vec();
        srcs.sort_unstable();
        srcs.dedup();
        for &s in &srcs {
            self.succ[s as usize].push(alpha);
        }
        self.vertices.push(Vertex { origin, span, value: None, doc: None });
        self.succ.push(Vec::new());
        self.pred.push(srcs);
        Ok(())
    }

    /// Allocates a fresh vertex and stars it from `sources`.
    pub fn add_vertex(&mut self, sources: &[VertexId], origin: Origin, span: Option<Span>) -> VertexId {
        let alpha = self.fresh_address();
        self.add_star(sources, alpha, origin, span).expect("sources come from this graph");
        alpha
    }

    pub fn set_value(&mut self, v: VertexId, value: Value) {
        self.vertices[v as usize].value = Some(value);
    }

    pub fn attach_doc(&mut self, v: VertexId, paragraph: Value) {
        self.vertices[v as usize].doc = Some(paragraph);
    }

    pub fn vertex(&self, v: VertexId) -> Option<&Vertex> {
        self.vertices.get(v as usize)
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &Vertex)> {
        self.vertices.iter().enumerate().map(|(i, v)| (i as VertexId, v))
    }

    /// Dependencies of `v`, ascending.
    pub fn predecessors(&self, v: VertexId) -> &[VertexId] {
        &self.pred[v as usize]
    }

    /// Dependents of `v`, ascending.
    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.succ[v as usize]
    }

    /// All edges as `(source, target)`, ordered by target then source.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.pred.iter().enumerate().flat_map(|(t, ps)| ps.iter().map(move |&s| (s, t as VertexId)))
    }

    pub fn edge_count(&self) -> usize {
        self.pred.iter().map(Vec::len).sum()
    }

    pub fn check_vertices(&self, roots: &[VertexId]) -> Result<(), GraphError> {
        match roots.iter().find(|&&r| !self.contains(r)) {
            Some(&bad) => Err(GraphError::UnknownVertex(bad)),
            None => Ok(()),
        }
    }

    /// True when no edge leads from a vertex to itself or an earlier one,
    /// which rules out cycles.
    pub fn is_acyclic(&self) -> bool {
        self.edges().all(|(s, t)| s < t)
    }

    /// True when the forward and backward adjacency lists are transposes.
    pub fn adjacency_consistent(&self) -> bool {
        let mut fwd: Vec<(VertexId, VertexId)> =
            self.succ.iter().enumerate().flat_map(|(s, ts)| ts.iter().map(move |&t| (s as VertexId, t))).collect();
        let mut bwd: Vec<(VertexId, VertexId)> = self.edges().collect();
        fwd.sort_unstable();
        bwd.sort_unstable();
        fwd == bwd
    }

    pub fn backward_slice(&self, roots: &[VertexId]) -> Result<Slice, GraphError> {
        self.slice(roots, Direction::Upstream)
    }

    pub fn forward_slice(&self, roots: &[VertexId]) -> Result<Slice, GraphError> {
        self.slice(roots, Direction::Downstream)
    }

    pub fn slice(&self, roots: &[VertexId], dir: Direction) -> Result<Slice, GraphError> {
        self.check_vertices(roots)?;
        let by_distance = match dir {
            Direction::Upstream => self.bfs(roots, &self.pred),
            Direction::Downstream => self.bfs(roots, &self.succ),
            Direction::Both => {
                let mut all = self.bfs(roots, &self.pred);
                all.extend(self.bfs(roots, &self.succ));
                all.sort_unstable();
                all
            }
        };
        let mut slice = Slice::default();
        for (_, v) in by_distance {
            if slice.members.insert(v) {
                slice.order.push(v);
            }
        }
        Ok(slice)
    }

    /// Level-by-level search; returns `(distance, vertex)` sorted, so ties
    /// within a level come out in ascending id order.
    fn bfs(&self, roots: &[VertexId], adj: &[Vec<VertexId>]) -> Vec<(u32, VertexId)> {
        let mut seen = vec![false; self.vertices.len()];
        let mut frontier: Vec<VertexId> = roots.to_vec();
        frontier.sort_unstable();
        frontier.dedup();
        for &r in &frontier {
            seen[r as usize] = true;
        }
        let mut out = Vec::new();
        let mut dist = 0;
        while !frontier.is_empty() {
            out.extend(frontier.iter().map(|&v| (dist, v)));
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in &adj[v as usize] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        next.push(w);
                    }
                }
            }
            next.sort_unstable();
            frontier = next;
            dist += 1;
        }
        out
    }

    /// Vertices of the slice that carry a `@doc` paragraph, in discovery order.
    pub fn collect_intermediates(&self, slice: &Slice) -> Vec<Intermediate> {
        slice
            .order()
            .iter()
            .filter_map(|&v| {
                self.vertices[v as usize].doc.clone().map(|paragraph| Intermediate { vertex: v, paragraph })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> DepGraph {
        let mut g = DepGraph::new();
        let a = g.add_vertex(&[], Origin::Literal, None);
        let b = g.add_vertex(&[a], Origin::Primitive, None);
        g.add_vertex(&[b], Origin::Primitive, None);
        g
    }

    #[test]
    fn fresh_addresses_are_dense() {
        let mut g = DepGraph::new();
        assert_eq!(g.fresh_address(), 0);
        for _ in 0..5 {
            g.add_vertex(&[], Origin::Literal, None);
        }
        assert_eq!(g.fresh_address(), 5);
    }

    #[test]
    fn star_edges() {
        let mut g = DepGraph::new();
        for _ in 0..7 {
            g.add_vertex(&[], Origin::Literal, None);
        }
        g.add_star(&[1, 2], 7, Origin::Constructor, None).unwrap();
        assert_eq!(g.predecessors(7), &[1, 2]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 7), (2, 7)]);
        assert_eq!(g.add_star(&[], 7, Origin::Literal, None), Err(GraphError::NotFresh(7)));
        assert_eq!(g.add_star(&[], 3, Origin::Literal, None), Err(GraphError::NotFresh(3)));
    }

    #[test]
    fn chain_slices() {
        let g = chain();
        assert!(g.backward_slice(&[]).unwrap().is_empty());
        assert_eq!(g.backward_slice(&[2]).unwrap().order(), &[2, 1, 0]);
        assert_eq!(g.forward_slice(&[0]).unwrap().order(), &[0, 1, 2]);
        assert_eq!(g.slice(&[1], Direction::Both).unwrap().order(), &[1, 0, 2]);
        assert_eq!(g.backward_slice(&[9]), Err(GraphError::UnknownVertex(9)));
        assert!(g.is_acyclic() && g.adjacency_consistent());
    }
}
