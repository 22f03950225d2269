//! The graph-building evaluator and the plain reference interpreter agree
//! on the value of every program.

use fluence_core::loader::{run_text, LoadError};
use fluence_oracle::{gen, reference_text};

fn agree(text: &str) -> Result<bool, String> {
    let ours = run_text(text);
    let theirs = reference_text(text);
    match (ours, theirs) {
        (Ok(p), Ok(v)) => {
            if p.value.erase() != v {
                return Err(format!("values differ:\n{text}\nengine: {}\nreference: {v}", p.value));
            }
            Ok(true)
        }
        (Err(LoadError::Eval { .. }), Err(_)) => Ok(false),
        (Err(e), Ok(v)) => Err(format!("engine failed ({e}) where the reference gave {v}:\n{text}")),
        (Ok(p), Err(e)) => Err(format!("reference failed ({e}) where the engine gave {}:\n{text}", p.value)),
        (Err(e), Err(r)) => Err(format!("unexpected static error {e} (reference: {r}):\n{text}")),
    }
}

#[test]
fn generated_programs() {
    let mut ok = 0;
    for seed in 0..500 {
        if agree(&gen::program(seed)).unwrap_or_else(|m| panic!("seed {seed}: {m}")) {
            ok += 1;
        }
    }
    // Most programs should run to a value, or the comparison says little.
    eprintln!("{ok} of 500 generated programs produced a value");
    assert!(ok >= 490, "only {ok} of 500 generated programs produced a value");
}
