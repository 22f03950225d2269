//! Independent oracles for testing the engine. The main one is a plain
//! reference interpreter that tracks taint instead of building a graph;
//! random programs and random DAGs feed it and the slicer.

pub mod checks;
pub mod dag;
pub mod gen;
pub mod reference;

use std::collections::BTreeMap;

use fluence_core::eval::value::Erased;
use fluence_core::loader::{load_from, with_large_stack, MemorySources, ModuleGraph};

pub use reference::{run_modules, RVal, TaintSpec};

/// Erased result of running `modules` with no taint.
pub fn reference_value(modules: &ModuleGraph) -> Result<Erased, String> {
    run_modules(modules, &TaintSpec::new()).map(|v| v.erase())
}

/// Erased result of a single-file program.
pub fn reference_text(text: &str) -> Result<Erased, String> {
    let text = text.to_string();
    with_large_stack(move || {
        let files = MemorySources::new([("main.fld", text)]);
        let modules = load_from(&files, "main.fld").map_err(|e| e.to_string())?;
        reference_value(&modules)
    })
}

/// For each source, which parts of the result it reaches. A source taints
/// the listed subtree positions of the named top-level values; the answer
/// holds one bit per result part, in subtree order.
pub fn reach(modules: &ModuleGraph, sources: &[TaintSpec]) -> Result<Vec<Vec<bool>>, String> {
    sources
        .iter()
        .map(|spec| {
            let v = run_modules(modules, spec)?;
            let mut bits = Vec::new();
            v.subtree_taints(&mut bits);
            Ok(bits)
        })
        .collect()
}

/// One source per position in `positions`, each tainting that single group.
pub fn single_sources(name: &str, groups: &[Vec<usize>]) -> Vec<TaintSpec> {
    groups.iter().map(|g| BTreeMap::from([(name.to_string(), g.clone())])).collect()
}
