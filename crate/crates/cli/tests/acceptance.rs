//! Acceptance run: one PASS or FAIL line per headline requirement, then a
//! nonzero exit if anything failed. Each check compares the engine against
//! something computed independently here or in `fluence-oracle`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use fluence::server::router;
use fluence_core::document::Document;
use fluence_core::eval::value::Value;
use fluence_core::graph::roles::{Mode, Role, Selection};
use fluence_core::graph::{Direction, VertexId};
use fluence_core::loader::{run_file, run_sources, run_text, with_large_stack, LoadError, MemorySources, PRELUDE};
use fluence_core::view::ViewSpec;
use fluence_oracle::checks::{corpus, erasure, export_twice, golden_cases, golden_dump, graph_invariants, programs_dir};
use fluence_oracle::dag::Dag;
use fluence_oracle::{gen, reach, reference_text, TaintSpec};
use http_body_util::BodyExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};
use tower::ServiceExt;

type Check = Result<String, String>;

fn main() -> ExitCode {
    let conv = with_large_stack(Conv::load);
    let mut lines: Vec<(&str, Check)> = vec![
        ("convolution fixture", conv.fixture()),
        ("annihilator", conv.annihilator()),
        ("constant provenance", conv.constant_provenance()),
        ("erasure equivalence", erasure_equivalence()),
        ("graph invariants", graph_invariants_on_corpus()),
        ("desugaring golden suite", golden_suite()),
        ("slicing oracle", slicing_oracle()),
        ("module system", module_system()),
    ];
    lines.push(("protocol conformance", conv.protocol()));

    let mut failed = 0;
    for (name, result) in &lines {
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} acceptance checks passed", lines.len() - failed, lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Rows of numbers inside `Matrix(r, c, rows)`.
fn matrix_numbers(v: &Value) -> Vec<Vec<f64>> {
    matrix_cells(v).iter().map(|row| row.iter().map(|c| c.as_number().expect("numeric cell")).collect()).collect()
}

fn matrix_cells(v: &Value) -> Vec<Vec<Value>> {
    let (c, args) = v.strip().as_constr().expect("a matrix");
    assert_eq!(c, "Matrix");
    args[2].as_list().expect("rows").into_iter().map(|r| r.as_list().expect("a row").into_iter().cloned().collect()).collect()
}

struct Conv {
    doc: Document,
    /// Wall time from evaluation through the last of the 25 selections.
    elapsed: Duration,
    /// Output cell vertices, row by row.
    outputs: Vec<Vec<VertexId>>,
    /// One upstream selection per output cell.
    selections: Vec<Vec<fluence_core::document::SelectResponse>>,
}

impl Conv {
    fn load() -> Conv {
        let entry = programs_dir().join("conv/conv.fld");
        let start = Instant::now();
        let program = run_file(&entry).expect("the fixture runs");
        let inputs: Vec<String> = vec!["image".into(), "filter".into()];
        let doc = Document::new(program, &inputs).expect("the fixture has a document");
        let ViewSpec::Matrix { cells, .. } = &doc.bundle.output else { panic!("output is not a matrix") };
        let outputs: Vec<Vec<VertexId>> = cells.iter().map(|r| r.iter().map(|c| c.vertex_id).collect()).collect();
        let selections = outputs
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| {
                        let sel = Selection { roots: vec![v], direction: Direction::Upstream, mode: Mode::Persistent };
                        doc.select(&sel).expect("output vertices exist")
                    })
                    .collect()
            })
            .collect();
        Conv { elapsed: start.elapsed(), doc, outputs, selections }
    }

    fn input(&self, name: &str) -> &Value {
        self.doc.program.lookup(name).expect("fixture input")
    }

    /// Image cell values, with their vertices.
    fn image_cells(&self) -> Vec<Vec<Value>> {
        matrix_cells(self.input("image"))
    }

    fn fixture(&self) -> Check {
        let image = matrix_numbers(self.input("image"));
        let filter = matrix_numbers(self.input("filter"));
        let (rows, cols) = (image.len() as i64, image[0].len() as i64);
        let pixel = |i: i64, j: i64| if i < 0 || j < 0 || i >= rows || j >= cols { 0.0 } else { image[i as usize][j as usize] };
        let taint = self.taint_oracle()?;

        let mut agreed = 0;
        for (i, row) in self.selections.iter().enumerate() {
            for (j, r) in row.iter().enumerate() {
                let at = format!("cell ({i}, {j})");
                ensure(r.intermediates.len() == 1, || format!("{at}: {} intermediates", r.intermediates.len()))?;
                let ViewSpec::Matrix { rows: 3, cols: 3, cells, .. } = &r.intermediates[0].view else {
                    return Err(format!("{at}: intermediate is not a 3x3 matrix"));
                };
                for (a, crow) in cells.iter().enumerate() {
                    for (b, cell) in crow.iter().enumerate() {
                        let want = pixel(i as i64 + a as i64 - 1, j as i64 + b as i64 - 1) * filter[a][b];
                        let got: f64 = cell.text.parse().map_err(|_| format!("{at}: cell text {}", cell.text))?;
                        ensure(got == want, || format!("{at}: neighbourhood ({a}, {b}) is {got}, window gives {want}"))?;
                    }
                }
                let engine: BTreeSet<VertexId> = r.inputs.iter().copied().collect();
                let oracle = &taint[&self.outputs[i][j]];
                ensure(&engine == oracle, || format!("{at}: slice inputs {engine:?}, taint oracle {oracle:?}"))?;
                agreed += 1;
            }
        }
        ensure(self.elapsed < Duration::from_secs(5), || format!("took {:?}", self.elapsed))?;
        Ok(format!(
            "{agreed}/25 cells have one 3x3 intermediate equal to the padded window and taint-exact inputs; {:.2}s",
            self.elapsed.as_secs_f64()
        ))
    }

    /// For each output cell vertex, the input vertices whose taint reaches it.
    fn taint_oracle(&self) -> Result<BTreeMap<VertexId, BTreeSet<VertexId>>, String> {
        // Positions sharing a vertex are one source: the graph cannot tell them apart.
        let mut sources: Vec<(VertexId, TaintSpec)> = Vec::new();
        for name in ["image", "filter"] {
            let mut parts = Vec::new();
            self.input(name).subtree(&mut parts);
            let mut by_vertex: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
            for (pos, v) in parts.into_iter().enumerate() {
                by_vertex.entry(v).or_default().push(pos);
            }
            for (v, positions) in by_vertex {
                sources.push((v, BTreeMap::from([(name.to_string(), positions)])));
            }
        }
        let mut out_parts = Vec::new();
        self.doc.program.value.subtree(&mut out_parts);

        let modules = &self.doc.program.modules;
        let threads = std::thread::available_parallelism().map_or(4, |n| n.get()).min(16);
        let chunk = sources.len().div_ceil(threads);
        let bits: Vec<Vec<bool>> = std::thread::scope(|s| {
            let handles: Vec<_> = sources
                .chunks(chunk)
                .map(|c| {
                    let specs: Vec<TaintSpec> = c.iter().map(|(_, t)| t.clone()).collect();
                    std::thread::Builder::new()
                        .stack_size(1 << 30)
                        .spawn_scoped(s, move || reach(modules, &specs))
                        .expect("oracle thread")
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("oracle thread").expect("oracle runs")).collect()
        });

        let mut result = BTreeMap::new();
        for &cell in self.outputs.iter().flatten() {
            let positions: Vec<usize> = (0..out_parts.len()).filter(|&p| out_parts[p] == cell).collect();
            let reached = sources
                .iter()
                .zip(&bits)
                .filter(|(_, b)| positions.iter().any(|&p| b[p]))
                .map(|((v, _), _)| *v)
                .collect();
            result.insert(cell, reached);
        }
        Ok(result)
    }

    fn annihilator(&self) -> Check {
        let graph = &self.doc.program.graph;
        let image_vertices: BTreeSet<VertexId> = self.image_cells().iter().flatten().map(|c| c.addr).collect();
        let mut zeros = 0;
        let mut exact = 0;
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for r in self.selections.iter().flatten() {
            let vertex = r.intermediates[0].vertex_id;
            let value = graph.vertex(vertex).and_then(|v| v.value.clone()).ok_or("intermediate has no value")?;
            for cell in matrix_cells(&value).iter().flatten() {
                if cell.as_number() != Some(0.0) {
                    continue;
                }
                zeros += 1;
                let slice = graph.backward_slice(&[cell.addr]).map_err(|e| e.to_string())?;
                let n = slice.set().intersection(&image_vertices).count();
                *counts.entry(n).or_default() += 1;
                if n == 1 {
                    exact += 1;
                }
            }
        }
        let micro = addition_micro_fixture()?;
        let detail = format!(
            "{exact} of {zeros} zero neighbourhood cells have exactly one image cell in their slice \
             (image cells per slice -> zero cells: {counts:?}); {micro}"
        );
        ensure(exact == zeros, || {
            format!("{detail}. The zero-padded cells are the literal 0 in lookup and depend on no image cell")
        })?;
        Ok(detail)
    }

    fn constant_provenance(&self) -> Check {
        let (line, col) = lookup_zero_position()?;
        // Every evaluation of the literal makes a fresh vertex with its span.
        let literal: BTreeMap<VertexId, Role> = self
            .doc
            .bundle
            .graph
            .vertices
            .iter()
            .filter(|v| v.span.as_ref().is_some_and(|s| s.file == "prelude.fld" && s.line == line && s.col == col))
            .map(|v| (v.id, v.role))
            .collect();
        ensure(!literal.is_empty(), || format!("no vertex for the literal at prelude.fld:{line}:{col}"))?;
        let mut boundary = 0;
        for (i, row) in self.selections.iter().enumerate() {
            for (j, r) in row.iter().enumerate() {
                if i != 0 && j != 0 && i != self.selections.len() - 1 && j != row.len() - 1 {
                    continue;
                }
                let hits: Vec<VertexId> = r.constants.iter().copied().filter(|v| literal.contains_key(v)).collect();
                ensure(!hits.is_empty(), || format!("cell ({i}, {j}) reaches no evaluation of the literal"))?;
                for v in hits {
                    ensure(literal[&v] == Role::Constant, || format!("vertex {v} has role {:?}", literal[&v]))?;
                }
                boundary += 1;
            }
        }
        Ok(format!(
            "all {boundary} boundary cells reach the literal at prelude.fld:{line}:{col} with role constant"
        ))
    }

    fn protocol(self) -> Check {
        let bundle: Json = serde_json::from_str(&self.doc.to_json()).map_err(|e| e.to_string())?;
        let root = self.outputs[2][2];
        let app = router(self.doc);
        let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
        rt.block_on(async move {
            let post = |body: Json| {
                let app = app.clone();
                async move {
                    let req = Request::post("/select")
                        .header("content-type", "application/json")
                        .body(Body::from(body.to_string()))
                        .unwrap();
                    let resp = app.oneshot(req).await.unwrap();
                    let status = resp.status();
                    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
                    (status, String::from_utf8(bytes.to_vec()).unwrap())
                }
            };
            let request = json!({"roots": [root], "direction": "upstream", "mode": "persistent"});
            let (status, first) = post(request.clone()).await;
            ensure(status == StatusCode::OK, || format!("status {status}: {first}"))?;
            let r: Json = serde_json::from_str(&first).map_err(|e| e.to_string())?;

            let inter = r["intermediates"].as_array().ok_or("no intermediates")?;
            ensure(inter.len() == 1, || format!("{} intermediates", inter.len()))?;
            let view = &inter[0]["view"];
            ensure(view["kind"] == "matrix" && view["rows"] == 3 && view["cols"] == 3, || format!("intermediate view {view}"))?;
            ensure(inter[0]["paragraph"]["kind"] == "paragraph", || "intermediate has no paragraph".into())?;
            let para: String = inter[0]["paragraph"]["runs"]
                .as_array()
                .ok_or("paragraph has no runs")?
                .iter()
                .filter_map(|r| r["text"].as_str())
                .collect();
            ensure(para.contains("(2, 2)"), || format!("paragraph does not name the cell: {para}"))?;

            // Highlights recomputed from the exported bundle alone.
            let reached = upstream(&bundle, root as u64);
            let got_reached: BTreeSet<u64> = r["reached"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
            ensure(got_reached == reached, || "reached set differs from a walk over the exported edges".into())?;
            let mut elements = BTreeMap::new();
            collect_elements(&bundle, &mut elements);
            let want: BTreeSet<String> =
                elements.iter().filter(|(_, v)| reached.contains(v)).map(|(e, _)| e.to_string()).collect();
            let highlights = r["highlights"].as_object().ok_or("no highlights")?;
            let got: BTreeSet<String> = highlights.keys().cloned().collect();
            ensure(got == want, || format!("{} highlights, expected {}", got.len(), want.len()))?;
            ensure(highlights.values().all(|s| s == "persistent"), || "non-persistent highlight".into())?;

            for _ in 0..3 {
                let (_, again) = post(request.clone()).await;
                ensure(again == first, || "a repeated request got a different response".into())?;
            }
            let (status, empty) = post(json!({"roots": [], "direction": "upstream"})).await;
            let empty: Json = serde_json::from_str(&empty).map_err(|e| e.to_string())?;
            ensure(status == StatusCode::OK && empty["reached"] == json!([]) && empty["highlights"] == json!({}), || {
                "empty selection is not empty".into()
            })?;
            let (status, _) = post(json!({"roots": [u32::MAX], "direction": "upstream"})).await;
            ensure(status == StatusCode::BAD_REQUEST, || format!("unknown vertex gave {status}"))?;
            Ok(format!(
                "cell (2, 2) gives one 3x3 intermediate and {} highlights matching the exported graph; repeats are identical",
                want.len()
            ))
        })
    }
}

/// Line and column of the `0` that `lookup` returns out of bounds, read off
/// the prelude text.
fn lookup_zero_position() -> Result<(u32, u32), String> {
    let lines: Vec<&str> = PRELUDE.lines().collect();
    let start = lines.iter().position(|l| l.starts_with("def lookup(")).ok_or("prelude has no lookup")?;
    let (k, l) = lines.iter().enumerate().skip(start).find(|(_, l)| l.trim() == "0").ok_or("lookup has no literal 0")?;
    Ok((k as u32 + 1, l.find('0').unwrap() as u32 + 1))
}

/// `a + b == 0` must depend on both summands.
fn addition_micro_fixture() -> Result<String, String> {
    let p = with_large_stack(|| run_text("def a = 4\ndef b = -4\na + b\n")).map_err(|e| e.to_string())?;
    ensure(p.value.as_number() == Some(0.0), || format!("sum is {}", p.value))?;
    let slice = p.graph.backward_slice(&[p.value.addr]).map_err(|e| e.to_string())?;
    let (a, b) = (p.lookup("a").unwrap().addr, p.lookup("b").unwrap().addr);
    ensure(slice.contains(a) && slice.contains(b), || "the zero sum lost a summand".into())?;
    Ok("the zero sum 4 + -4 depends on both summands".into())
}

/// Vertices upstream of `root`, by walking the exported edge list.
fn upstream(bundle: &Json, root: u64) -> BTreeSet<u64> {
    let mut preds: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for e in bundle["graph"]["edges"].as_array().unwrap() {
        preds.entry(e[1].as_u64().unwrap()).or_default().push(e[0].as_u64().unwrap());
    }
    let mut seen = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &p in preds.get(&v).into_iter().flatten() {
            if seen.insert(p) {
                queue.push_back(p);
            }
        }
    }
    seen
}

/// Every `{elementId, vertexId}` pair anywhere in the views.
fn collect_elements(j: &Json, out: &mut BTreeMap<u64, u64>) {
    match j {
        Json::Object(m) => {
            if let (Some(e), Some(v)) = (m.get("elementId").and_then(Json::as_u64), m.get("vertexId").and_then(Json::as_u64)) {
                out.insert(e, v);
            }
            for (k, x) in m {
                if k != "graph" && k != "sources" {
                    collect_elements(x, out);
                }
            }
        }
        Json::Array(xs) => xs.iter().for_each(|x| collect_elements(x, out)),
        _ => {}
    }
}

fn erasure_equivalence() -> Check {
    let programs = corpus();
    for entry in &programs {
        erasure(entry).map_err(|e| format!("{}: {e}", entry.display()))?;
    }
    let (mut values, mut failures) = (0, 0);
    for seed in 0..500 {
        let text = gen::program(seed);
        let theirs = reference_text(&text);
        let t = text.clone();
        let ours = with_large_stack(move || run_text(&t).map(|p| p.value.erase()));
        match (ours, theirs) {
            (Ok(a), Ok(b)) if a == b => values += 1,
            (Err(LoadError::Eval { .. }), Err(_)) => failures += 1,
            (a, b) => return Err(format!("seed {seed}: engine {a:?}, reference {b:?}")),
        }
    }
    Ok(format!(
        "{} corpus programs and 500 generated programs agree ({values} values, {failures} runtime errors in both)",
        programs.len()
    ))
}

fn graph_invariants_on_corpus() -> Check {
    let programs = corpus();
    let mut vertices = 0;
    for entry in &programs {
        let e = entry.clone();
        let p = with_large_stack(move || run_file(&e)).map_err(|e| e.to_string())?;
        graph_invariants(&p.graph).map_err(|e| format!("{}: {e}", entry.display()))?;
        vertices += p.graph.len();
        export_twice(entry).map_err(|e| format!("{}: {e}", entry.display()))?;
    }
    Ok(format!(
        "{} programs, {vertices} vertices: acyclic, adjacency transposed, stars from older vertices, exports byte-identical",
        programs.len()
    ))
}

fn golden_suite() -> Check {
    let cases = golden_cases();
    ensure(cases.len() >= 15, || format!("only {} cases", cases.len()))?;
    for case in &cases {
        let got = golden_dump(&case.source)?;
        ensure(case.expected.as_deref() == Some(got.as_str()), || format!("{} differs from its dump", case.name))?;
    }
    Ok(format!("{} cases match their checked-in core dumps", cases.len()))
}

fn slicing_oracle() -> Check {
    let mut checked = 0;
    let mut largest = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let dag = Dag::random(&mut rng, 1000);
        largest = largest.max(dag.n);
        let g = dag.to_graph();
        for _ in 0..5 {
            let roots = dag.random_roots(&mut rng, 6);
            let back = g.backward_slice(&roots).map_err(|e| e.to_string())?;
            let fwd = g.forward_slice(&roots).map_err(|e| e.to_string())?;
            ensure(back.set() == &dag.naive_backward(&roots), || format!("seed {seed}: backward slice differs"))?;
            ensure(fwd.set() == &dag.naive_forward(&roots), || format!("seed {seed}: forward slice differs"))?;
            let again = g.backward_slice(back.order()).map_err(|e| e.to_string())?;
            ensure(again.set() == back.set(), || format!("seed {seed}: slicing is not idempotent"))?;
            let mut more = roots.clone();
            more.extend(dag.random_roots(&mut rng, 3));
            let bigger = g.backward_slice(&more).map_err(|e| e.to_string())?;
            ensure(back.set().is_subset(bigger.set()), || format!("seed {seed}: slicing is not monotone"))?;
            checked += 1;
        }
    }
    Ok(format!("200 DAGs (up to {largest} vertices), {checked} root sets: naive closure, idempotent, monotone"))
}

fn module_system() -> Check {
    with_large_stack(|| {
        let files = MemorySources::new([
            ("a.fld", "import \"b\"\nfromB + 1\n"),
            ("b.fld", "import \"c\"\ndef fromB = fromC * 2\n"),
            ("c.fld", "def fromC = 21\n"),
        ]);
        let p = run_sources(files.clone(), "a.fld").map_err(|e| e.to_string())?;
        ensure(p.value.as_number() == Some(43.0), || format!("a gives {}", p.value))?;
        let mut hidden = files;
        hidden.0.insert("a.fld".into(), "import \"b\"\nfromC\n".into());
        match run_sources(hidden, "a.fld") {
            Err(LoadError::Eval { error, .. }) if error.message.contains("fromC") => {}
            Err(e) => return Err(format!("unexpected error {e}")),
            Ok(p) => return Err(format!("a saw c's definition: {}", p.value)),
        }
        let cyclic = MemorySources::new([("a.fld", "import \"b\"\n1\n"), ("b.fld", "import \"a\"\ndef y = 2\n")]);
        match run_sources(cyclic, "a.fld") {
            Err(LoadError::Cycle { cycle, .. }) => {
                ensure(cycle == ["a.fld", "b.fld", "a.fld"], || format!("cycle reported as {cycle:?}"))?
            }
            Err(e) => return Err(format!("cycle gave {e}")),
            Ok(_) => return Err("cyclic imports ran".into()),
        }
        Ok("c's names are invisible from a through b; a <-> b is reported as a cycle".into())
    })
}
