//! Whole-program checks shared by the core tests and the acceptance run.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};

use fluence_core::desugar::signature::Signature;
use fluence_core::desugar::{desugar_module, dump_module};
use fluence_core::document::Document;
use fluence_core::graph::DepGraph;
use fluence_core::loader::{load_program, run_file, with_large_stack};
use fluence_core::syntax::parse_source;
use fluence_core::SourceId;

use crate::reference_value;

/// The `programs/` directory at the workspace root.
pub fn programs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../programs")
}

/// Every corpus entry point plus the two fixtures. Modules under
/// `corpus/lib` are reached through imports only.
pub fn corpus() -> Vec<PathBuf> {
    let dir = programs_dir();
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir.join("corpus"))
        .expect("corpus directory")
        .map(|e| e.expect("corpus entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "fld"))
        .collect();
    out.sort();
    out.push(dir.join("conv/conv.fld"));
    out.push(dir.join("report/report.fld"));
    out
}

/// Input names from the `fluence.json` beside `entry`, if any.
pub fn configured_inputs(entry: &Path) -> Vec<String> {
    let Ok(text) = std::fs::read_to_string(entry.with_file_name("fluence.json")) else { return Vec::new() };
    let json: serde_json::Value = serde_json::from_str(&text).expect("fluence.json parses");
    json["inputs"]
        .as_array()
        .map(|a| a.iter().map(|s| s.as_str().expect("input names are strings").to_string()).collect())
        .unwrap_or_default()
}

/// The engine and the reference interpreter compute the same value.
pub fn erasure(entry: &Path) -> Result<(), String> {
    let entry = entry.to_path_buf();
    with_large_stack(move || {
        let ours = run_file(&entry).map_err(|e| format!("engine: {e}"))?;
        let modules = load_program(&entry).map_err(|e| e.to_string())?;
        let theirs = reference_value(&modules).map_err(|e| format!("reference: {e}"))?;
        if ours.value.erase() != theirs {
            return Err(format!("engine gave {}, reference gave {theirs}", ours.value));
        }
        Ok(())
    })
}

/// Structural checks on a finished graph. Peeling off sources must reach
/// every vertex, the two adjacency lists must be transposes, and each
/// vertex's incoming edges must all come from older vertices.
pub fn graph_invariants(g: &DepGraph) -> Result<(), String> {
    let n = g.len();
    let mut indegree: Vec<usize> = (0..n).map(|v| g.predecessors(v as u32).len()).collect();
    let mut queue: VecDeque<u32> = (0..n as u32).filter(|&v| indegree[v as usize] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        for &s in g.successors(v) {
            indegree[s as usize] -= 1;
            if indegree[s as usize] == 0 {
                queue.push_back(s);
            }
        }
    }
    if seen != n {
        return Err(format!("cycle: only {seen} of {n} vertices can be ordered"));
    }

    let mut forward = 0;
    for v in 0..n as u32 {
        for &s in g.successors(v) {
            forward += 1;
            if !g.predecessors(s).contains(&v) {
                return Err(format!("edge {v} -> {s} missing from the predecessors of {s}"));
            }
        }
        let preds = g.predecessors(v);
        if !preds.windows(2).all(|w| w[0] < w[1]) || preds.last().is_some_and(|&p| p >= v) {
            return Err(format!("vertex {v} has predecessors {preds:?}"));
        }
        for &p in preds {
            if !g.successors(p).contains(&v) {
                return Err(format!("edge {p} -> {v} missing from the successors of {p}"));
            }
        }
    }
    if forward != g.edge_count() {
        return Err(format!("{forward} forward edges against {} backward", g.edge_count()));
    }
    Ok(())
}

/// Runs `entry` from scratch twice and compares the exported bundles byte
/// for byte.
pub fn export_twice(entry: &Path) -> Result<(), String> {
    let entry = entry.to_path_buf();
    with_large_stack(move || {
        let inputs = configured_inputs(&entry);
        let export = || -> Result<String, String> {
            let program = run_file(&entry).map_err(|e| e.to_string())?;
            Ok(Document::new(program, &inputs).map_err(|e| e.to_string())?.to_json())
        };
        if export()? != export()? {
            return Err("two exports differ".into());
        }
        Ok(())
    })
}

pub struct GoldenCase {
    pub name: String,
    pub source: String,
    pub expected_path: PathBuf,
    /// `None` until blessed.
    pub expected: Option<String>,
}

/// `crates/core/tests/golden/*.fld`, each with its `.core` dump.
pub fn golden_cases() -> Vec<GoldenCase> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("golden directory")
        .map(|e| e.expect("golden entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "fld"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let expected_path = p.with_extension("core");
            GoldenCase {
                name: p.file_stem().unwrap().to_string_lossy().into_owned(),
                source: std::fs::read_to_string(&p).expect("golden source"),
                expected: std::fs::read_to_string(&expected_path).ok(),
                expected_path,
            }
        })
        .collect()
}

/// The core dump of one module, desugared against the builtin datatypes.
pub fn golden_dump(source: &str) -> Result<String, String> {
    let surface = parse_source(source, SourceId(1)).map_err(|e| e.to_string())?;
    let core = desugar_module(&surface, &Signature::builtin()).map_err(|e| e.to_string())?;
    Ok(dump_module(&core))
}
