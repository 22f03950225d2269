//! Randomised checks. Slices are compared with naive closure on random DAGs;
//! printed programs must reparse; prelude functions must match plain Rust.

use std::collections::BTreeSet;

use fluence_core::desugar::signature::Signature;
use fluence_core::desugar::{desugar_module, dump_module};
use fluence_core::graph::VertexId;
use fluence_core::loader::run_text;
use fluence_core::syntax::{parse_source, pretty};
use fluence_core::SourceId;
use fluence_oracle::dag::Dag;
use fluence_oracle::gen;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn slices_match_naive_closure_on_random_dags() {
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dag = Dag::random(&mut rng, 1000);
        let g = dag.to_graph();
        for _ in 0..5 {
            let roots = dag.random_roots(&mut rng, 6);
            let back = g.backward_slice(&roots).unwrap();
            let fwd = g.forward_slice(&roots).unwrap();
            assert_eq!(back.set(), &dag.naive_backward(&roots), "seed {seed} roots {roots:?}");
            assert_eq!(fwd.set(), &dag.naive_forward(&roots), "seed {seed} roots {roots:?}");

            // Idempotent: slicing a slice adds nothing.
            let again: Vec<VertexId> = back.order().to_vec();
            assert_eq!(g.backward_slice(&again).unwrap().set(), back.set());

            // Monotone: more roots never shrink the slice.
            let mut more = roots.clone();
            more.extend(dag.random_roots(&mut rng, 3));
            let bigger = g.backward_slice(&more).unwrap();
            assert!(back.set().is_subset(bigger.set()), "seed {seed}");
        }
    }
}

#[test]
fn backward_and_forward_are_dual() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let dag = Dag::random(&mut rng, 120);
        let g = dag.to_graph();
        let n = dag.n as VertexId;
        let back: Vec<BTreeSet<VertexId>> = (0..n).map(|v| g.backward_slice(&[v]).unwrap().set().clone()).collect();
        for u in 0..n {
            let fwd = g.forward_slice(&[u]).unwrap();
            for v in 0..n {
                assert_eq!(back[v as usize].contains(&u), fwd.contains(v));
            }
        }
    }
}

fn core_dump(text: &str) -> String {
    let m = parse_source(text, SourceId(1)).unwrap_or_else(|e| panic!("{e}\n{text}"));
    dump_module(&desugar_module(&m, &Signature::builtin()).unwrap())
}

fn render_list(xs: &[i64]) -> String {
    format!("{xs:?}")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn printing_then_parsing_preserves_meaning(seed in 0u64..100_000) {
        let text = gen::program(seed);
        let printed = pretty::module(&parse_source(&text, SourceId(1)).unwrap());
        prop_assert_eq!(core_dump(&printed), core_dump(&text), "printed:\n{}", printed);
        // Printing is a fixpoint after one round.
        let twice = pretty::module(&parse_source(&printed, SourceId(1)).unwrap());
        prop_assert_eq!(twice, printed);
    }

    #[test]
    fn prelude_list_functions(xs in prop::collection::vec(-20i64..20, 0..12), n in 0i64..6) {
        let lit = render_list(&xs);
        let text = format!(
            "def xs = {lit}\n[reverse(xs), take({n}, xs), drop({n}, xs), nub(xs), filter(lambda x: x > 0, xs), \
             map(lambda x: x * 3, xs), [sum(xs), len(xs)], xs ++ [{n}], range(0, {n}), [x for x in xs if x `mod` 2 == 0]]\n"
        );
        let got = run_text(&text).unwrap().value.to_string();

        let mut distinct = Vec::new();
        for &x in &xs {
            if !distinct.contains(&x) {
                distinct.push(x);
            }
        }
        let k = n as usize;
        let parts = [
            xs.iter().rev().copied().collect::<Vec<_>>(),
            xs.iter().take(k).copied().collect(),
            xs.iter().skip(k).copied().collect(),
            distinct,
            xs.iter().filter(|&&x| x > 0).copied().collect(),
            xs.iter().map(|x| x * 3).collect(),
            vec![xs.iter().sum(), xs.len() as i64],
            xs.iter().copied().chain([n]).collect(),
            (0..n).collect(),
            xs.iter().filter(|&&x| x.rem_euclid(2) == 0).copied().collect(),
        ];
        let want = format!("[{}]", parts.iter().map(|p| render_list(p)).collect::<Vec<_>>().join(", "));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn prelude_sorting_helpers(xs in prop::collection::vec(-50i64..50, 1..10)) {
        let text = format!("def xs = {}\n[maximum(xs), minimum(xs), foldr(lambda x, acc: acc - x, 0, xs)]\n", render_list(&xs));
        let got = run_text(&text).unwrap().value.to_string();
        let fr = xs.iter().rev().fold(0, |acc, x| acc - x);
        let want = format!("[{}, {}, {}]", xs.iter().max().unwrap(), xs.iter().min().unwrap(), fr);
        prop_assert_eq!(got, want);
    }
}
