//! Core dumps of small programs, checked in beside them. Set
//! `FLUENCE_BLESS=1` to rewrite the expected files after an intended change.

use fluence_oracle::checks::{golden_cases, golden_dump};

#[test]
fn desugaring_matches_golden_files() {
    let bless = std::env::var_os("FLUENCE_BLESS").is_some();
    let cases = golden_cases();
    assert!(cases.len() >= 15);
    let mut failures = Vec::new();
    for case in cases {
        let got = golden_dump(&case.source).unwrap_or_else(|e| panic!("{}: {e}", case.name));
        if bless {
            std::fs::write(&case.expected_path, &got).unwrap();
        } else if case.expected.as_deref() != Some(got.as_str()) {
            failures.push(format!("{}:\n{got}", case.name));
        }
    }
    assert!(failures.is_empty(), "core dumps differ:\n{}", failures.join("\n"));
}
