mod common;

use std::collections::BTreeSet;

use common::*;
use synthmt::booleanize::compute_reaction;
use synthmt::frontend::CompiledSpec;
use synthmt::oracle::{oracle_reaction_map, oracle_realizability, regions, Window};
use synthmt::synth::{synthesize, DEFAULT_STATE_CAP};
use synthmt::Error;

fn region_texts(name: &str, bound: u64) -> Vec<String> {
    let spec = load(name);
    let map =
        oracle_reaction_map(&spec.signature, &spec.literals, Window::new(bound).unwrap()).unwrap();
    regions(&map).iter().map(ToString::to_string).collect()
}

#[test]
fn int_running_example_regions() {
    assert_eq!(
        region_texts("running_int.spec", 8),
        [
            "x in [-8, 1]: {1, 3, 5}",
            "x=2: {2, 4}",
            "x in [3, 8]: {2, 4, 6}"
        ]
    );
}

#[test]
fn modified_example_regions() {
    assert_eq!(
        region_texts("running_mod_int.spec", 8),
        [
            "x in [-8, 0]: {1, 3, 5}",
            "x in [2, 8]: {2, 4, 6}",
            "x=1: {3, 5}"
        ]
    );
}

#[test]
fn real_running_example_regions() {
    assert_eq!(
        region_texts("running_real.spec", 8),
        [
            "x in [-8, 1]: {1, 3, 5}",
            "x in [2, 8]: {2, 4, 6}",
            "x=3/2: {3, 5, 7}"
        ]
    );
}

#[test]
fn bounded_verdicts() {
    for (name, realizable) in BUNDLED {
        let spec = load(name);
        let verdict = oracle_realizability(&spec, Window::new(5).unwrap()).unwrap();
        assert_eq!(verdict, *realizable, "{name}");
    }
}

#[test]
fn boundary_on_the_window_edge_is_rejected() {
    let spec =
        CompiledSpec::parse("theory Int\nenv x\nsys y\nspec G((x < 5) -> (y > x))\n").unwrap();
    let err = oracle_reaction_map(&spec.signature, &spec.literals, Window::new(5).unwrap());
    assert!(matches!(err, Err(Error::WindowTooSmall(_))));
    assert!(oracle_reaction_map(&spec.signature, &spec.literals, Window::new(7).unwrap()).is_ok());
    assert!(Window::new(0).is_err());
}

#[test]
fn agreement_with_the_solver_pipeline() {
    let window = Window::new(5).unwrap();
    for (name, _) in BUNDLED {
        let (b, mut s) = abstraction(name);
        let spec = load(name);
        let map = oracle_reaction_map(&b.signature, &b.literals, window).unwrap();
        for (point, reaction) in &map {
            let smt = compute_reaction(&b.signature, &b.literals, point, &mut s).unwrap();
            assert_eq!(&smt, reaction, "{name} at {point}");
        }
        let oracle: BTreeSet<_> = map.values().cloned().collect();
        let found: BTreeSet<_> = b.partitions.iter().map(|p| p.reaction.clone()).collect();
        assert_eq!(oracle, found, "{name}");
        let synth = synthesize(&b, DEFAULT_STATE_CAP).is_ok();
        assert_eq!(
            synth,
            oracle_realizability(&spec, window).unwrap(),
            "{name}"
        );
    }
}
