#![allow(dead_code)]

use std::path::PathBuf;

use synthmt::booleanize::{booleanize, BooleanSpec};
use synthmt::frontend::CompiledSpec;
use synthmt::smt::{Session, SolverConfig};
use synthmt::theory::{Sort, Valuation, Value};

pub fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(name)
}

pub fn load(name: &str) -> CompiledSpec {
    let text = std::fs::read_to_string(spec_path(name)).unwrap();
    CompiledSpec::parse(&text).unwrap()
}

pub fn session(sort: Sort) -> Session {
    Session::start(SolverConfig::from_env(sort).unwrap()).unwrap()
}

pub fn abstraction(name: &str) -> (BooleanSpec, Session) {
    let spec = load(name);
    let mut s = session(spec.signature.sort);
    let b = booleanize(&spec, &mut s).unwrap();
    (b, s)
}

pub fn x(v: Value) -> Valuation {
    let mut out = Valuation::new();
    out.insert("x", v);
    out
}

pub fn xi(n: i64) -> Valuation {
    x(Value::int(n))
}

/// Specs bundled with the repository, with their expected verdicts.
pub const BUNDLED: &[(&str, bool)] = &[
    ("running_int.spec", false),
    ("running_real.spec", true),
    ("running_mod_int.spec", true),
    ("always_greater.spec", true),
    ("strict_gap_int.spec", false),
    ("strict_gap_real.spec", true),
    ("two_outputs.spec", true),
];
