mod common;

use std::collections::BTreeSet;

use common::*;
use synthmt::booleanize::{
    check_cover, check_disjoint, compute_reaction, discover_partitions, export_ltl_text,
    sample_partition_points, BooleanizeReport,
};
use synthmt::frontend::parse_boolean_ltl;
use synthmt::smt::Answer;
use synthmt::theory::{ReactionSet, Value};

fn set(cubes: &[u32]) -> ReactionSet {
    cubes.iter().copied().collect()
}

fn reactions(b: &synthmt::booleanize::BooleanSpec) -> Vec<ReactionSet> {
    b.partitions.iter().map(|p| p.reaction.clone()).collect()
}

#[test]
fn reactions_at_the_three_inputs() {
    let spec = load("running_int.spec");
    let mut s = session(spec.signature.sort);
    let at = |n: i64, s: &mut synthmt::smt::Session| {
        compute_reaction(&spec.signature, &spec.literals, &xi(n), s).unwrap()
    };
    // bit 0 = x<2, bit 1 = y>1, bit 2 = y<x
    assert_eq!(at(2, &mut s), set(&[2, 4]));
    assert_eq!(at(0, &mut s), set(&[1, 3, 5]));
    assert_eq!(at(3, &mut s), set(&[2, 4, 6]));
    assert_eq!(s.depth(), 0);
}

#[test]
fn ground_literals_skip_queries() {
    let spec = load("running_int.spec");
    let mut s = session(spec.signature.sort);
    let before = s.query_count();
    compute_reaction(&spec.signature, &spec.literals, &xi(7), &mut s).unwrap();
    // the env literal x<2 is ground, so only the 4 cubes with !s0 are queried
    assert_eq!(s.query_count() - before, 4);
}

#[test]
fn reaction_rejects_partial_or_missorted_input() {
    let spec = load("running_int.spec");
    let mut s = session(spec.signature.sort);
    let empty = synthmt::theory::Valuation::new();
    assert!(compute_reaction(&spec.signature, &spec.literals, &empty, &mut s).is_err());
    let half = x(Value::ratio(1, 2));
    assert!(compute_reaction(&spec.signature, &spec.literals, &half, &mut s).is_err());
}

fn region_of(
    b: &synthmt::booleanize::BooleanSpec,
    s: &mut synthmt::smt::Session,
    k: usize,
) -> Vec<Value> {
    sample_partition_points(&b.signature, &b.literals, &b.partitions[k], 100, s)
        .unwrap()
        .into_iter()
        .map(|v| v.get("x").unwrap().clone())
        .collect()
}

#[test]
fn int_partitions_of_the_running_example() {
    let (b, mut s) = abstraction("running_int.spec");
    assert_eq!(b.num_partitions(), 3);
    assert_eq!(b.num_literals(), 3);
    assert_eq!(
        reactions(&b),
        [set(&[1, 3, 5]), set(&[2, 4]), set(&[2, 4, 6])]
    );

    let two = Value::int(2);
    let below = region_of(&b, &mut s, 0);
    assert_eq!(below.len(), 100);
    assert!(below.iter().all(|v| *v < two));
    assert_eq!(region_of(&b, &mut s, 1), std::slice::from_ref(&two));
    let above = region_of(&b, &mut s, 2);
    assert_eq!(above.len(), 100);
    assert!(above.iter().all(|v| *v > two));
}

#[test]
fn real_partitions_of_the_running_example() {
    let (b, mut s) = abstraction("running_real.spec");
    // between 1 and 2 the system can pick 1 < y < x but no longer x <= y <= 1
    assert_eq!(
        reactions(&b),
        [set(&[1, 3, 5]), set(&[2, 4, 6]), set(&[3, 5, 7])]
    );
    let (one, two) = (Value::int(1), Value::int(2));
    assert!(region_of(&b, &mut s, 0).iter().all(|v| *v <= one));
    assert!(region_of(&b, &mut s, 1).iter().all(|v| *v >= two));
    let mid = region_of(&b, &mut s, 2);
    assert_eq!(mid.len(), 100);
    assert!(mid.iter().all(|v| *v > one && *v < two));
}

#[test]
fn modified_example_has_the_exact_three_way_split() {
    let (b, mut s) = abstraction("running_mod_int.spec");
    assert_eq!(
        reactions(&b),
        [set(&[1, 3, 5]), set(&[2, 4, 6]), set(&[3, 5])]
    );
    assert!(region_of(&b, &mut s, 0).iter().all(|v| *v <= Value::int(0)));
    assert!(region_of(&b, &mut s, 1).iter().all(|v| *v >= Value::int(2)));
    assert_eq!(region_of(&b, &mut s, 2), [Value::int(1)]);
}

#[test]
fn cover_disjointness_and_sampled_reactions() {
    for (name, _) in BUNDLED {
        let (b, mut s) = abstraction(name);
        let (sig, lits) = (&b.signature, &b.literals);
        assert_eq!(
            check_cover(sig, lits, &b.partitions, &mut s).unwrap(),
            Answer::Unsat
        );
        for i in 0..b.num_partitions() {
            for j in i + 1..b.num_partitions() {
                let ans = check_disjoint(sig, lits, &b.partitions[i], &b.partitions[j], &mut s);
                assert_eq!(ans.unwrap(), Answer::Unsat, "{name}: {i} vs {j}");
            }
        }
        for p in &b.partitions {
            assert!(!p.reaction.is_empty());
            assert_eq!(
                compute_reaction(sig, lits, &p.witness, &mut s).unwrap(),
                p.reaction
            );
            for v in sample_partition_points(sig, lits, p, 100, &mut s).unwrap() {
                assert_eq!(
                    compute_reaction(sig, lits, &v, &mut s).unwrap(),
                    p.reaction,
                    "{name}: sample {v} of partition {}",
                    p.id
                );
            }
        }
        assert_eq!(s.depth(), 0);
    }
}

#[test]
fn discovery_is_deterministic() {
    let spec = load("running_real.spec");
    let first = discover_partitions(
        &spec.signature,
        &spec.literals,
        &mut session(spec.signature.sort),
    )
    .unwrap();
    let second = discover_partitions(
        &spec.signature,
        &spec.literals,
        &mut session(spec.signature.sort),
    )
    .unwrap();
    assert_eq!(first, second);
}

#[test]
fn single_partition_when_literals_ignore_the_environment_split() {
    let (b, _) = abstraction("always_greater.spec");
    assert_eq!(b.num_partitions(), 1);
    assert_eq!(b.extra(0), &set(&[0, 1]));
    let text = export_ltl_text(&b);
    assert!(text.contains("G(e0 -> "), "{text}");
}

#[test]
fn exported_text_lists_the_reaction_rows() {
    let (b, _) = abstraction("running_int.spec");
    let text = export_ltl_text(&b);
    for row in [
        "(e0 -> ((s0 & s1 & !s2) | (s0 & !s1 & s2) | (s0 & !s1 & !s2)))",
        "(e1 -> ((!s0 & s1 & !s2) | (!s0 & !s1 & s2)))",
        "(e2 -> ((!s0 & s1 & s2) | (!s0 & s1 & !s2) | (!s0 & !s1 & s2)))",
    ] {
        assert!(text.contains(row), "missing {row} in {text}");
    }
    assert!(
        text.starts_with("G((s0 -> X s1) & (!s0 -> s2)) & G("),
        "{text}"
    );

    let parsed = parse_boolean_ltl(&text).unwrap();
    let atoms: BTreeSet<&str> = parsed.atoms().into_iter().map(String::as_str).collect();
    assert_eq!(atoms, BTreeSet::from(["e0", "e1", "e2", "s0", "s1", "s2"]));
}

#[test]
fn report_json_uses_hex_reactions() {
    let (b, _) = abstraction("running_int.spec");
    let report = BooleanizeReport::new(&b);
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["partitions"][0]["reaction"], "0x2a");
    assert_eq!(json["partitions"][1]["witness"]["x"], 2);
    assert_eq!(json["literals"][2], "-1*x + 1*y < 0");
    let back: BooleanizeReport = serde_json::from_value(json).unwrap();
    assert_eq!(back, report);
}
