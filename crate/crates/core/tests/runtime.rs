mod common;

use common::*;
use synthmt::booleanize::BooleanSpec;
use synthmt::runtime::{
    classify_input, grounded_cube, monitor_step, provide_output, random_inputs, run_trace, Engine,
    Inputs, Policy, Verdict,
};
use synthmt::smt::{Answer, Session, Term};
use synthmt::synth::{synthesize, ControllerArtifact, DEFAULT_STATE_CAP};
use synthmt::theory::{CmpOp, Cube, Literal, Valuation, Value};
use synthmt::Error;

fn engine(name: &str, policy: &str) -> Engine {
    let (b, _) = abstraction(name);
    let ctrl = synthesize(&b, DEFAULT_STATE_CAP).unwrap();
    let art = ControllerArtifact::new(&b, Some(&ctrl));
    Engine::from_artifact(&art, policy.parse().unwrap(), session(b.signature.sort)).unwrap()
}

fn provide(b: &BooleanSpec, s: &mut Session, cube: u32, x: i64, policy: &str) -> Value {
    let p: Policy = policy.parse().unwrap();
    let out = provide_output(b, cube, &xi(x), &p, None, s).unwrap();
    out.output.get("y").unwrap().clone()
}

fn unsat_with(b: &BooleanSpec, s: &mut Session, cube: u32, x: i64, extra: Literal) -> bool {
    let mut lits = grounded_cube(b, cube, &xi(x)).unwrap();
    lits.push(extra);
    s.solve_exists(&b.signature.sys_vars, &Term::conj(lits))
        .unwrap()
        == Answer::Unsat
}

fn y_cmp(op: CmpOp, n: i64) -> Literal {
    Literal::var_cmp("y", op, Value::int(n).as_rational())
}

#[test]
fn classification_of_table_inputs() {
    let (b, mut s) = abstraction("running_mod_int.spec");
    let k = classify_input(&b, &xi(4), &mut s).unwrap();
    assert_eq!(
        b.partitions[k].reaction.iter().collect::<Vec<_>>(),
        [2, 4, 6]
    );
    let k = classify_input(&b, &xi(1), &mut s).unwrap();
    assert_eq!(b.partitions[k].reaction.iter().collect::<Vec<_>>(), [3, 5]);
}

#[test]
fn missing_partition_is_reported() {
    let (mut b, mut s) = abstraction("running_mod_int.spec");
    let k = classify_input(&b, &xi(1), &mut s).unwrap();
    b.partitions.remove(k);
    match classify_input(&b, &xi(1), &mut s) {
        Err(Error::AbstractionIncomplete { input, .. }) => assert_eq!(input, "x=1"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn extrema_of_the_first_step_cube() {
    let (b, mut s) = abstraction("running_mod_int.spec");
    // cube 6 = !s0 & s1 & s2 = x >= 2, y > 1, y <= x
    assert_eq!(provide(&b, &mut s, 6, 4, "min:y"), Value::int(2));
    assert_eq!(provide(&b, &mut s, 6, 4, "max:y"), Value::int(4));
    assert!(unsat_with(&b, &mut s, 6, 4, y_cmp(CmpOp::Lt, 2)));
    assert!(unsat_with(&b, &mut s, 6, 4, y_cmp(CmpOp::Gt, 4)));
    let any = provide(&b, &mut s, 6, 4, "");
    assert!(any >= Value::int(2) && any <= Value::int(4));
}

#[test]
fn unique_and_greatest_models_at_x_two() {
    let (b, mut s) = abstraction("running_mod_int.spec");
    assert_eq!(provide(&b, &mut s, 6, 2, ""), Value::int(2));
    assert!(unsat_with(&b, &mut s, 6, 2, y_cmp(CmpOp::Ne, 2)));
    // cube 4 = !s0 & !s1 & s2 = y <= 1
    assert_eq!(provide(&b, &mut s, 4, 2, "max:y"), Value::int(1));
}

#[test]
fn unbounded_minimum_is_capped() {
    let (b, mut s) = abstraction("running_mod_int.spec");
    let p: Policy = "min:y".parse().unwrap();
    let out = provide_output(&b, 4, &xi(4), &p, None, &mut s).unwrap();
    assert!(out.capped);
    let y = out.output.get("y").unwrap();
    assert!(*y <= Value::int(1));
    let p: Policy = "max:y".parse().unwrap();
    let out = provide_output(&b, 4, &xi(4), &p, None, &mut s).unwrap();
    assert!(!out.capped);
    assert_eq!(out.output.get("y"), Some(&Value::int(1)));
}

#[test]
fn targets_and_fallbacks() {
    let (b, mut s) = abstraction("running_mod_int.spec");
    assert_eq!(provide(&b, &mut s, 6, 4, "target:y=3"), Value::int(3));
    let fallback = provide(&b, &mut s, 6, 4, "target:y=9");
    assert!(fallback >= Value::int(2) && fallback <= Value::int(4));

    let p: Policy = "target:y=prev".parse().unwrap();
    let prev = Valuation::parse_assignments("y=4").unwrap();
    let out = provide_output(&b, 6, &xi(4), &p, Some(&prev), &mut s).unwrap();
    assert_eq!(out.output, prev);
    let out = provide_output(&b, 6, &xi(4), &p, None, &mut s).unwrap();
    assert!(out.output.get("y").is_some());
}

#[test]
fn contradictory_cube_is_provider_unsat() {
    let (b, mut s) = abstraction("running_mod_int.spec");
    // s0 claims x < 2, false at x = 4
    let p = Policy::new();
    assert!(matches!(
        provide_output(&b, 1, &xi(4), &p, None, &mut s),
        Err(Error::ProviderUnsat { cube: 1, .. })
    ));
}

fn assignment(b: &BooleanSpec, text: &str) -> u32 {
    let v = Valuation::parse_assignments(text).unwrap();
    Cube::of_valuation(&b.literals, &v).unwrap().index()
}

#[test]
fn monitor_verdicts() {
    let (b, _) = abstraction("running_mod_int.spec");
    let prev = assignment(&b, "x=0 y=2");
    let cur = assignment(&b, "x=0 y=1");
    assert_eq!(
        monitor_step(&b.matrix, Some(prev), cur),
        Verdict::Violation("(s0 -> X s1)".into())
    );
    assert_eq!(monitor_step(&b.matrix, None, cur), Verdict::Ok);
    let same = assignment(&b, "x=3 y=2");
    assert_eq!(monitor_step(&b.matrix, Some(same), same), Verdict::Ok);
    // the current-only conjunct is checked on the earlier step of the pair
    let bad = assignment(&b, "x=3 y=5");
    assert_eq!(
        monitor_step(&b.matrix, Some(bad), same),
        Verdict::Violation("(!s0 -> s2)".into())
    );
}

#[test]
fn five_step_trace() {
    let mut e = engine("running_mod_int.spec", "min:y");
    let inputs: Vec<Valuation> = [4, 4, 1, 0, 2].into_iter().map(xi).collect();
    let trace = run_trace(&mut e, Inputs::Scripted(inputs)).unwrap();
    assert_eq!(trace.len(), 5);
    let b = e.spec().clone();
    for t in &trace {
        assert_eq!(t.verdict, Verdict::Ok, "step {}", t.step);
        let full = t.input.merged(&t.output);
        for l in synthmt::theory::cube_formula(Cube::new(t.cube, 3).unwrap(), &b.literals).unwrap()
        {
            assert!(
                l.eval(&full).unwrap(),
                "step {}: {} fails",
                t.step,
                l.pretty()
            );
        }
    }
    let cubes: Vec<u32> = trace.iter().map(|t| t.cube).collect();
    assert_eq!(cubes, [4, 4, 3, 3, 6]);
    assert!(trace[0].capped);
    assert_eq!(trace[2].output.get("y"), Some(&Value::int(2)));
    assert_eq!(trace[3].output.get("y"), Some(&Value::int(2)));
    assert_eq!(trace[4].output.get("y"), Some(&Value::int(2)));
    let s = e.session();
    for t in trace.iter().filter(|t| !t.capped) {
        let y = t.output.get("y").unwrap().to_i64().unwrap();
        let x = t.input.get("x").unwrap().to_i64().unwrap();
        assert!(
            unsat_with(&b, s, t.cube, x, y_cmp(CmpOp::Lt, y)),
            "step {}",
            t.step
        );
    }
    assert!(unsat_with(&b, s, 6, 2, y_cmp(CmpOp::Ne, 2)));
    assert_eq!(e.state().step, 5);
}

#[test]
fn random_trace_has_no_violations_and_is_reproducible() {
    let mut e = engine("running_mod_int.spec", "");
    let trace = run_trace(
        &mut e,
        Inputs::Random {
            n: 1000,
            seed: 7,
            window: 100,
        },
    )
    .unwrap();
    assert_eq!(trace.len(), 1000);
    assert!(trace.iter().all(|t| t.verdict.is_ok()));
    let xs = random_inputs(&["x".into()], synthmt::theory::Sort::Int, 1000, 7, 100);
    assert_eq!(
        xs,
        random_inputs(&["x".into()], synthmt::theory::Sort::Int, 1000, 7, 100)
    );
    assert!(xs.iter().all(|v| {
        let x = v.get("x").unwrap();
        *x >= Value::int(-100) && *x <= Value::int(100)
    }));
    let inputs: Vec<Valuation> = trace.iter().map(|t| t.input.clone()).collect();
    assert_eq!(inputs, xs);
}

#[test]
fn real_and_multi_output_engines() {
    let mut e = engine("running_real.spec", "target:y=3/2");
    let trace = run_trace(
        &mut e,
        Inputs::Random {
            n: 100,
            seed: 3,
            window: 5,
        },
    )
    .unwrap();
    assert!(trace.iter().all(|t| t.verdict.is_ok()));
    assert!(trace
        .iter()
        .all(|t| t.input.get("x").unwrap().denom() <= &2.into()));

    let mut e = engine("two_outputs.spec", "min:y,max:z");
    let trace = run_trace(
        &mut e,
        Inputs::Random {
            n: 50,
            seed: 5,
            window: 10,
        },
    )
    .unwrap();
    assert!(trace.iter().all(|t| t.verdict.is_ok()));
}

#[test]
fn bad_inputs_and_empty_traces() {
    let mut e = engine("running_mod_int.spec", "");
    assert!(run_trace(&mut e, Inputs::Scripted(vec![]))
        .unwrap()
        .is_empty());
    let half = x(Value::ratio(1, 2));
    assert!(matches!(e.step(&half), Err(Error::Contract(_))));
    assert_eq!(e.state().step, 0);

    let (b, _) = abstraction("running_real.spec");
    let ctrl = synthesize(&b, DEFAULT_STATE_CAP).unwrap();
    let art = ControllerArtifact::new(&b, Some(&ctrl));
    let err = Engine::from_artifact(&art, "min:y".parse().unwrap(), session(b.signature.sort));
    assert!(matches!(err, Err(Error::Policy(_))));
}

#[test]
fn trace_lines_are_json() {
    let mut e = engine("running_mod_int.spec", "min:y");
    let t = e.step(&xi(2)).unwrap();
    let line = t.to_json_line();
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(v["step"], 1);
    assert_eq!(v["in"]["x"], 2);
    assert_eq!(v["verdict"], "ok");
    assert!(v.get("out").is_some() && v.get("cube").is_some() && v.get("partition").is_some());
    let back: synthmt::runtime::TraceStep = serde_json::from_str(&line).unwrap();
    assert_eq!(back.output, t.output);
    let violation = serde_json::to_string(&Verdict::Violation("(s0 -> X s1)".into())).unwrap();
    assert_eq!(violation, r#"{"violation":"(s0 -> X s1)"}"#);
}
