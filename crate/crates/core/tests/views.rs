//! JSON for each kind of view, checked in under `tests/views`. Set
//! `FLUENCE_BLESS=1` to rewrite.

use std::path::Path;

use fluence_core::loader::run_text;
use fluence_core::view::build_view;

#[test]
fn view_json_matches_golden_files() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/views");
    let bless = std::env::var_os("FLUENCE_BLESS").is_some();
    let mut cases: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "fld"))
        .collect();
    cases.sort();
    assert!(cases.len() >= 7);
    for case in cases {
        let program = run_text(&std::fs::read_to_string(&case).unwrap()).unwrap();
        let view = build_view(&program.value).unwrap();
        let got = serde_json::to_string_pretty(&view).unwrap() + "\n";
        let expected = case.with_extension("json");
        if bless {
            std::fs::write(&expected, &got).unwrap();
        } else {
            assert_eq!(got, std::fs::read_to_string(&expected).unwrap_or_default(), "{}", case.display());
        }
    }
}
