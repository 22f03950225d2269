//! Random DAGs and the obvious fixpoint reachability to check slices against.

use std::collections::BTreeSet;

use fluence_core::graph::{DepGraph, Origin, VertexId};
use rand::Rng;

/// Edges `(from, to)` with `from < to`, over vertices `0..n`.
pub struct Dag {
    pub n: usize,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl Dag {
    /// Each vertex draws a handful of earlier vertices as dependencies.
    pub fn random(rng: &mut impl Rng, max_vertices: usize) -> Dag {
        let n = rng.gen_range(1..=max_vertices);
        let mut edges = Vec::new();
        for to in 1..n {
            let k = rng.gen_range(0..=3.min(to));
            let mut from: BTreeSet<usize> = BTreeSet::new();
            while from.len() < k {
                // Mostly recent vertices, so paths get long.
                let reach = if rng.gen_bool(0.8) { 8 } else { to };
                let back = rng.gen_range(1..=to.min(reach));
                from.insert(to - back);
            }
            edges.extend(from.into_iter().map(|f| (f as VertexId, to as VertexId)));
        }
        Dag { n, edges }
    }

    /// The same DAG as an engine graph, built one star at a time.
    pub fn to_graph(&self) -> DepGraph {
        let mut g = DepGraph::new();
        let mut preds: Vec<Vec<VertexId>> = vec![Vec::new(); self.n];
        for &(f, t) in &self.edges {
            preds[t as usize].push(f);
        }
        for p in preds {
            g.add_vertex(&p, Origin::Literal, None);
        }
        g
    }

    pub fn random_roots(&self, rng: &mut impl Rng, max: usize) -> Vec<VertexId> {
        let k = rng.gen_range(0..=max);
        (0..k).map(|_| rng.gen_range(0..self.n) as VertexId).collect()
    }

    /// Everything with a path into `roots`, found by relaxing every edge
    /// until nothing changes.
    pub fn naive_backward(&self, roots: &[VertexId]) -> BTreeSet<VertexId> {
        self.closure(roots, |(f, t)| (t, f))
    }

    /// Everything reachable from `roots`.
    pub fn naive_forward(&self, roots: &[VertexId]) -> BTreeSet<VertexId> {
        self.closure(roots, |e| e)
    }

    fn closure(&self, roots: &[VertexId], orient: impl Fn((VertexId, VertexId)) -> (VertexId, VertexId)) -> BTreeSet<VertexId> {
        let mut reached: BTreeSet<VertexId> = roots.iter().copied().collect();
        loop {
            let before = reached.len();
            for &e in &self.edges {
                let (a, b) = orient(e);
                if reached.contains(&a) {
                    reached.insert(b);
                }
            }
            if reached.len() == before {
                return reached;
            }
        }
    }
}
