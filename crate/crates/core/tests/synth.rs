mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synthmt::synth::{
    build_game, build_game_with_cap, extract_controller, force, solve_safety, synthesize,
    ControllerArtifact, DEFAULT_STATE_CAP, INIT,
};
use synthmt::Error;

#[test]
fn running_example_game_has_25_states() {
    for name in ["running_int.spec", "running_mod_int.spec"] {
        let (b, _) = abstraction(name);
        let g = build_game(&b).unwrap();
        assert_eq!(g.num_states(), 25, "{name}");
        assert_eq!(g.decode(g.state(2, 5)), Some((2, 5)));
        assert_eq!(g.decode(INIT), None);
    }
}

#[test]
fn verdicts_of_bundled_specs() {
    for (name, realizable) in BUNDLED {
        let (b, _) = abstraction(name);
        let g = build_game(&b).unwrap();
        let w = solve_safety(&g);
        assert_eq!(w.init_winning(), *realizable, "{name}");
        assert_eq!(extract_controller(&g, &w).is_ok(), *realizable, "{name}");
    }
}

#[test]
fn unrealizable_specs_report_a_trap() {
    let (b, _) = abstraction("running_int.spec");
    // partition 0 is x<2, partition 1 is x=2
    match synthesize(&b, DEFAULT_STATE_CAP) {
        Err(Error::NotRealizable { trap }) => assert_eq!(trap, [0, 1]),
        other => panic!("unexpected {other:?}"),
    }
    let (b, _) = abstraction("strict_gap_int.spec");
    match synthesize(&b, DEFAULT_STATE_CAP) {
        Err(Error::NotRealizable { trap }) => assert_eq!(trap, [0]),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn modified_example_menus_and_choices() {
    let (b, _) = abstraction("running_mod_int.spec");
    // partitions: 0 = x<=0, 1 = x>=2, 2 = x=1
    let g = build_game(&b).unwrap();
    let w = solve_safety(&g);
    let ctrl = extract_controller(&g, &w).unwrap();
    assert_eq!(g.moves(INIT, 1).collect::<Vec<_>>(), [2, 4, 6]);

    // a previous cube with s0 obliges s1 now
    let committed = g.state(0, 1);
    assert!(w.contains(committed));
    assert_eq!(g.moves(committed, 1).collect::<Vec<_>>(), [2, 6]);
    assert!(!w.contains(g.state(1, 2)));
    assert_eq!(ctrl.step(committed, 1).map(|(c, _)| c), Some(6));
}

#[test]
fn state_cap_is_enforced() {
    let (b, _) = abstraction("running_int.spec");
    assert!(build_game_with_cap(&b, 24).is_ok());
    match build_game_with_cap(&b, 23) {
        Err(Error::StateSpaceTooLarge { states, cap }) => assert_eq!((states, cap), (24, 23)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn stateless_edges_ignore_the_successor() {
    let (b, _) = abstraction("always_greater.spec");
    assert!(b.matrix.is_stateless());
    let g = build_game(&b).unwrap();
    let n = g.num_cubes() as u32;
    for cur in 0..n {
        let first = g.safe(cur, 0);
        assert!((0..n).all(|next| g.safe(cur, next) == first));
    }
}

#[test]
fn winning_region_is_a_fixpoint_and_closed() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, realizable) in BUNDLED {
        let (b, _) = abstraction(name);
        let g = build_game(&b).unwrap();
        let w = solve_safety(&g);
        let member: Vec<bool> = (0..g.num_states()).map(|s| w.contains(s)).collect();
        assert_eq!(force(&g, &member), member, "{name}");
        if !realizable {
            continue;
        }
        let ctrl = extract_controller(&g, &w).unwrap();
        let mut s = ctrl.initial();
        let mut prev: Option<u32> = None;
        for _ in 0..10_000 {
            let k = rng.gen_range(0..g.num_partitions());
            let (c, next) = ctrl.step(s, k).unwrap();
            assert!(g.extra(k).contains(&c));
            if let Some(p) = prev {
                assert!(g.safe(p, c), "{name}: unsafe edge {p} -> {c}");
            }
            assert!(w.contains(next));
            prev = Some(c);
            s = next;
        }
    }
}

#[test]
fn artifact_round_trip() {
    let (b, _) = abstraction("running_mod_int.spec");
    let ctrl = synthesize(&b, DEFAULT_STATE_CAP).unwrap();
    let art = ControllerArtifact::new(&b, Some(&ctrl));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    art.save(&path).unwrap();
    let back = ControllerArtifact::load(&path).unwrap();
    assert_eq!(back, art);
    assert_eq!(back.boolean_spec().unwrap(), b);
    assert_eq!(back.controller().unwrap(), ctrl);

    let json: serde_json::Value = serde_json::from_str(&art.to_json()).unwrap();
    assert_eq!(json["version"], 1);
    assert_eq!(json["realizable"], true);
    assert_eq!(json["initial"], 0);
    assert_eq!(json["literals"][2], "-1*x + 1*y <= 0");
    assert_eq!(json["matrix"][0], "(s0 -> X s1)");
    let t = &json["transitions"][0];
    for key in ["state", "input", "cube", "next"] {
        assert!(t.get(key).is_some(), "{key}");
    }
}

#[test]
fn corrupted_artifacts_are_rejected() {
    let (b, _) = abstraction("running_mod_int.spec");
    let ctrl = synthesize(&b, DEFAULT_STATE_CAP).unwrap();
    let art = ControllerArtifact::new(&b, Some(&ctrl));

    let mut bad = art.clone();
    bad.transitions[0].cube = 0;
    assert!(matches!(bad.controller(), Err(Error::Artifact(_))));

    let mut bad = art.clone();
    bad.transitions.pop();
    assert!(matches!(bad.controller(), Err(Error::Artifact(_))));

    let mut bad = art.clone();
    bad.literals[0] = "x <".into();
    assert!(matches!(bad.boolean_spec(), Err(Error::Artifact(_))));

    let mut bad = art.clone();
    bad.version = 9;
    assert!(ControllerArtifact::from_json(&bad.to_json()).is_err());

    let unreal = ControllerArtifact::new(&abstraction("running_int.spec").0, None);
    assert!(!unreal.realizable);
    assert!(unreal.transitions.is_empty());
    assert!(matches!(unreal.controller(), Err(Error::Artifact(_))));
}
