//! Loading the modules that make up a program, then running them in order.
//!
//! Modules are named by their path relative to the entry file's directory,
//! with `/` separators and a `.fld` extension. Besides its own definitions a
//! module sees the primitives and the prelude, plus whatever its direct
//! imports define. Imports are not re-exported.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use crate::desugar::signature::Signature;
use crate::desugar::{desugar_module, DesugarError};
use crate::eval::env::Env;
use crate::eval::value::Value;
use crate::eval::{EvalError, Evaluator};
use crate::graph::DepGraph;
use crate::span::{SourceId, Span};
use crate::syntax::ast::SurfaceModule;
use crate::syntax::{parse_source, SyntaxError};

pub const PRELUDE: &str = include_str!("prelude.fld");
pub const PRELUDE_NAME: &str = "prelude.fld";
pub const EXTENSION: &str = "fld";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Missing { path: String, message: String },
    #[error("{path}:{}", .error.to_string().trim_start_matches("syntax error at "))]
    Syntax { path: String, error: SyntaxError },
    #[error("{path}: import cycle: {}", .cycle.join(" -> "))]
    Cycle { path: String, cycle: Vec<String> },
    #[error("{path}:{}", .error.to_string().trim_start_matches("desugaring error at "))]
    Desugar { path: String, error: DesugarError },
    #[error("{path}: {message}")]
    Structure { path: String, message: String },
    #[error("{}", describe_eval(.path, .error))]
    Eval { path: String, error: EvalError },
}

fn describe_eval(path: &str, e: &EvalError) -> String {
    match e.span {
        Some(sp) => format!("{path}:{sp}: {}", e.message),
        None => format!("{path}: {}", e.message),
    }
}

impl LoadError {
    pub fn path(&self) -> &str {
        match self {
            LoadError::Missing { path, .. }
            | LoadError::Syntax { path, .. }
            | LoadError::Cycle { path, .. }
            | LoadError::Desugar { path, .. }
            | LoadError::Structure { path, .. }
            | LoadError::Eval { path, .. } => path,
        }
    }
}

/// Where module text comes from.
pub trait Sources {
    fn read(&self, name: &str) -> Result<String, String>;
}

/// Files under a root directory.
pub struct FileSources {
    pub root: PathBuf,
}

impl Sources for FileSources {
    fn read(&self, name: &str) -> Result<String, String> {
        std::fs::read_to_string(self.root.join(name)).map_err(|e| e.to_string())
    }
}

/// In-memory modules keyed by name; handy for tests.
#[derive(Default, Clone)]
pub struct MemorySources(pub BTreeMap<String, String>);

impl MemorySources {
    pub fn new<I, K, V>(files: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        MemorySources(files.into_iter().map(|(k, v)| (normalize(&k.into()), v.into())).collect())
    }
}

impl Sources for MemorySources {
    fn read(&self, name: &str) -> Result<String, String> {
        self.0.get(name).cloned().ok_or_else(|| "no such module".to_string())
    }
}

/// Resolves `.` and `..` components and adds the extension if missing.
pub fn normalize(name: &str) -> String {
    let mut parts: Vec<&str> = Vec::new();
    for part in name.split(['/', '\\']) {
        match part {
            "" | "." => {}
            ".." if parts.last().is_some_and(|p| *p != "..") => {
                parts.pop();
            }
            p => parts.push(p),
        }
    }
    let mut out = parts.join("/");
    if Path::new(&out).extension().is_none() {
        out.push('.');
        out.push_str(EXTENSION);
    }
    out
}

pub struct ModuleNode {
    pub name: String,
    pub source: SourceId,
    pub text: String,
    pub surface: SurfaceModule,
    /// Direct imports, normalized, in the order written.
    pub imports: Vec<String>,
}

pub struct ModuleGraph {
    pub entry: String,
    pub nodes: BTreeMap<String, ModuleNode>,
    /// Dependencies before dependents; the entry comes last.
    pub order: Vec<String>,
}

impl ModuleGraph {
    /// Source file name for each source id, the prelude included.
    pub fn source_names(&self) -> BTreeMap<SourceId, String> {
        let mut out: BTreeMap<SourceId, String> =
            self.nodes.values().map(|n| (n.source, n.name.clone())).collect();
        out.insert(SourceId(0), PRELUDE_NAME.to_string());
        out
    }

    pub fn name_of(&self, id: SourceId) -> String {
        self.source_names().remove(&id).unwrap_or_else(|| format!("<source {}>", id.0))
    }

    /// `file:line:col` for a span.
    pub fn locate(&self, span: Span) -> String {
        format!("{}:{}", self.name_of(span.source), span)
    }
}

/// Reads a program from disk. The entry's directory is the search root.
pub fn load_program(entry: &Path) -> Result<ModuleGraph, LoadError> {
    let root = entry.parent().map(Path::to_path_buf).unwrap_or_default();
    let name = entry
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .ok_or_else(|| LoadError::Missing { path: entry.display().to_string(), message: "not a file".into() })?;
    load_from(&FileSources { root }, &name)
}

/// Loads `entry` and everything it imports, each module parsed once.
pub fn load_from(sources: &dyn Sources, entry: &str) -> Result<ModuleGraph, LoadError> {
    let entry = normalize(entry);
    let mut nodes: BTreeMap<String, ModuleNode> = BTreeMap::new();
    let mut pending = vec![(entry.clone(), entry.clone())];
    // Source 0 is the prelude.
    let mut next_id = 1;
    while let Some((name, importer)) = pending.pop() {
        if nodes.contains_key(&name) {
            continue;
        }
        let text = sources
            .read(&name)
            .map_err(|message| LoadError::Missing { path: if name == importer { name.clone() } else { format!("{name} (imported from {importer})") }, message })?;
        let source = SourceId(next_id);
        next_id += 1;
        let surface = parse_source(&text, source).map_err(|error| LoadError::Syntax { path: name.clone(), error })?;
        let imports: Vec<String> = surface.imports.iter().map(|i| normalize(&i.path)).collect();
        for imp in imports.iter().rev() {
            pending.push((imp.clone(), name.clone()));
        }
        nodes.insert(name.clone(), ModuleNode { name, source, text, surface, imports });
    }
    let order = toposort(&nodes, &entry)?;
    Ok(ModuleGraph { entry, nodes, order })
}

/// Kahn's algorithm, taking the lexicographically smallest ready module
/// at each step.
fn toposort(nodes: &BTreeMap<String, ModuleNode>, entry: &str) -> Result<Vec<String>, LoadError> {
    let mut waiting: BTreeMap<&str, usize> = BTreeMap::new();
    let mut dependents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (name, node) in nodes {
        let deps: BTreeSet<&str> = node.imports.iter().map(String::as_str).collect();
        waiting.insert(name, deps.len());
        for d in deps {
            dependents.entry(d).or_default().push(name);
        }
    }
    let mut ready: BTreeSet<&str> = waiting.iter().filter(|(_, n)| **n == 0).map(|(m, _)| *m).collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(m) = ready.pop_first() {
        order.push(m.to_string());
        for d in dependents.get(m).into_iter().flatten() {
            let n = waiting.get_mut(d).expect("known module");
            *n -= 1;
            if *n == 0 {
                ready.insert(d);
            }
        }
    }
    if order.len() < nodes.len() {
        let done: BTreeSet<&str> = order.iter().map(String::as_str).collect();
        let stuck: BTreeSet<&str> = nodes.keys().map(String::as_str).filter(|m| !done.contains(m)).collect();
        return Err(LoadError::Cycle { path: entry.to_string(), cycle: find_cycle(nodes, &stuck) });
    }
    Ok(order)
}

/// Some cycle among modules that could not be ordered, closed at the end.
fn find_cycle(nodes: &BTreeMap<String, ModuleNode>, stuck: &BTreeSet<&str>) -> Vec<String> {
    // Every stuck module imports another stuck one, so walking those edges
    // must revisit something.
    let mut path: Vec<&str> = vec![stuck.first().copied().expect("non-empty")];
    loop {
        let cur = *path.last().unwrap();
        let next = nodes[cur].imports.iter().map(String::as_str).find(|i| stuck.contains(i)).expect("stuck");
        if let Some(pos) = path.iter().position(|p| *p == next) {
            let mut cycle: Vec<String> = path[pos..].iter().map(|s| s.to_string()).collect();
            cycle.push(next.to_string());
            return cycle;
        }
        path.push(next);
    }
}

/// An evaluated program.
pub struct Program {
    pub modules: ModuleGraph,
    pub graph: DepGraph,
    pub value: Value,
    /// The entry module's environment after its definitions.
    pub env: Env,
    /// Bindings the entry module itself defines, in order.
    pub top_level: Vec<(String, Value)>,
}

impl Program {
    /// The value of a top-level name as the final term sees it.
    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.env.lookup(name)
    }
}

/// Evaluates each module once, in order, threading one graph through all
/// of them, then evaluates the entry's final term.
pub fn evaluate_program(modules: ModuleGraph) -> Result<Program, LoadError> {
    let sig = Signature::builtin();
    let mut ev = Evaluator::new();
    let base = ev.base_env();

    let prelude_src = parse_source(PRELUDE, SourceId(0))
        .map_err(|error| LoadError::Syntax { path: PRELUDE_NAME.into(), error })?;
    let prelude_core = desugar_module(&prelude_src, &sig)
        .map_err(|error| LoadError::Desugar { path: PRELUDE_NAME.into(), error })?;
    let (_, prelude, _) =
        ev.eval_module(&base, &prelude_core).map_err(|error| LoadError::Eval { path: PRELUDE_NAME.into(), error })?;
    let start = base.extend(prelude);

    let mut exports: BTreeMap<&str, Vec<(String, Value)>> = BTreeMap::new();
    let mut result = None;
    for name in &modules.order {
        let node = &modules.nodes[name];
        let is_entry = *name == modules.entry;
        if node.surface.body.is_some() && !is_entry {
            return Err(LoadError::Structure {
                path: name.clone(),
                message: "an imported module cannot end with a program term".into(),
            });
        }
        if node.surface.body.is_none() && is_entry {
            return Err(LoadError::Structure { path: name.clone(), message: "the program has no final term".into() });
        }
        let core = desugar_module(&node.surface, &sig)
            .map_err(|error| LoadError::Desugar { path: name.clone(), error })?;
        let mut env = start.clone();
        for imp in &node.imports {
            env = env.extend(exports[imp.as_str()].iter().cloned());
        }
        let (env, own, value) =
            ev.eval_module(&env, &core).map_err(|error| LoadError::Eval { path: name.clone(), error })?;
        if is_entry {
            result = Some((env, own, value.expect("checked above")));
        } else {
            exports.insert(name, own);
        }
    }
    let (env, top_level, value) = result.expect("entry is ordered last");
    Ok(Program { modules, graph: ev.graph, value, env, top_level })
}

/// Loads and evaluates the program at `entry`.
pub fn run_file(entry: &Path) -> Result<Program, LoadError> {
    let entry = entry.to_path_buf();
    with_large_stack(move || evaluate_program(load_program(&entry)?))
}

/// Loads and evaluates a program from in-memory sources.
pub fn run_sources(sources: MemorySources, entry: &str) -> Result<Program, LoadError> {
    let entry = entry.to_string();
    with_large_stack(move || evaluate_program(load_from(&sources, &entry)?))
}

/// Evaluates a single self-contained program text.
pub fn run_text(text: &str) -> Result<Program, LoadError> {
    run_sources(MemorySources::new([("main.fld", text)]), "main.fld")
}

/// Stack size for the evaluation thread. The parser and evaluator recurse
/// on the shape of the program and its data.
pub const STACK_SIZE: usize = 1 << 30;

/// Runs `f` on a thread with a large stack.
pub fn with_large_stack<F, R>(f: F) -> R
where
    F: FnOnce() -> R + Send + 'static,
    R: Send + 'static,
{
    std::thread::Builder::new()
        .name("fluence-eval".into())
        .stack_size(STACK_SIZE)
        .spawn(f)
        .expect("spawn evaluation thread")
        .join()
        .unwrap_or_else(|p| std::panic::resume_unwind(p))
}

impl fmt::Debug for ModuleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModuleGraph").field("entry", &self.entry).field("order", &self.order).finish()
    }
}
