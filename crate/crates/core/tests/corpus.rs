//! Every program under `programs/` runs to the reference value and builds a
//! well-formed graph that exports to the same bytes every time.

use fluence_core::loader::{run_file, with_large_stack};
use fluence_oracle::checks::{corpus, erasure, export_twice, graph_invariants};

#[test]
fn corpus_is_big_enough() {
    assert!(corpus().len() >= 22, "{:?}", corpus());
}

#[test]
fn corpus_agrees_with_reference() {
    for entry in corpus() {
        erasure(&entry).unwrap_or_else(|e| panic!("{}: {e}", entry.display()));
    }
}

#[test]
fn corpus_graphs_are_well_formed() {
    for entry in corpus() {
        let e = entry.clone();
        let program = with_large_stack(move || run_file(&e)).unwrap();
        graph_invariants(&program.graph).unwrap_or_else(|e| panic!("{}: {e}", entry.display()));
    }
}

#[test]
fn corpus_exports_are_deterministic() {
    for entry in corpus() {
        export_twice(&entry).unwrap_or_else(|e| panic!("{}: {e}", entry.display()));
    }
}
