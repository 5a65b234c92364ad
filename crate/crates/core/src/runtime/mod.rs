//! Executing a synthesized controller on concrete inputs.

mod policy;
mod provider;

pub use policy::{Policy, Rule, Target};
pub use provider::{grounded_cube, provide_output, Provided, OPTIMIZATION_CAP};

use std::collections::HashMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::booleanize::{compute_reaction, BooleanSpec};
use crate::error::{Error, Result};
use crate::frontend::SafetyMatrix;
use crate::smt::Session;
use crate::synth::{ControllerArtifact, MealyController, StateId};
use crate::theory::{Cube, Sort, Valuation, Value};

/// Index of the partition whose reaction set equals the reaction at `env`.
pub fn classify_input(b: &BooleanSpec, env: &Valuation, session: &mut Session) -> Result<usize> {
    let reaction = compute_reaction(&b.signature, &b.literals, env, session)?;
    b.partitions
        .iter()
        .position(|p| p.reaction == reaction)
        .ok_or_else(|| Error::AbstractionIncomplete {
            input: env.to_string(),
            reaction: reaction.to_string(),
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    /// Text of the first violated conjunct.
    Violation(String),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        *self == Verdict::Ok
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Verdict::Ok => s.serialize_str("ok"),
            Verdict::Violation(c) => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("violation", c)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(String),
            Violation { violation: String },
        }
        match Raw::deserialize(d)? {
            Raw::Tag(t) if t == "ok" => Ok(Verdict::Ok),
            Raw::Tag(t) => Err(serde::de::Error::custom(format!("unknown verdict `{t}`"))),
            Raw::Violation { violation } => Ok(Verdict::Violation(violation)),
        }
    }
}

/// Checks the matrix on consecutive literal assignments. The first step has
/// no predecessor and is always accepted; its current-only conjuncts are
/// checked when the second step arrives.
pub fn monitor_step(matrix: &SafetyMatrix, prev: Option<u32>, cur: u32) -> Verdict {
    match prev.and_then(|p| matrix.first_violation(p, cur)) {
        Some(c) => Verdict::Violation(c.to_string()),
        None => Verdict::Ok,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: u64,
    #[serde(rename = "in")]
    pub input: Valuation,
    pub partition: usize,
    pub cube: u32,
    #[serde(rename = "out")]
    pub output: Valuation,
    pub verdict: Verdict,
    /// A min/max search stopped at the cap. Reported through the log only.
    #[serde(skip)]
    pub capped: bool,
}

impl TraceStep {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace steps serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeState {
    pub mealy: StateId,
    pub prev_output: Option<Valuation>,
    pub prev_assignment: Option<u32>,
    pub step: u64,
}

/// One controller, one solver session.
pub struct Engine {
    spec: BooleanSpec,
    controller: MealyController,
    policy: Policy,
    session: Session,
    state: RuntimeState,
    cache: HashMap<Valuation, usize>,
}

impl Engine {
    pub fn new(
        spec: BooleanSpec,
        controller: MealyController,
        policy: Policy,
        session: Session,
    ) -> Result<Self> {
        policy.validate(&spec.signature)?;
        if session.sort() != spec.signature.sort {
            return Err(Error::contract(format!(
                "session sort {} does not match controller sort {}",
                session.sort(),
                spec.signature.sort
            )));
        }
        if controller.num_partitions() != spec.num_partitions() {
            return Err(Error::Artifact(
                "controller and partition table disagree".into(),
            ));
        }
        let state = RuntimeState {
            mealy: controller.initial(),
            prev_output: None,
            prev_assignment: None,
            step: 0,
        };
        Ok(Engine {
            spec,
            controller,
            policy,
            session,
            state,
            cache: HashMap::new(),
        })
    }

    pub fn from_artifact(a: &ControllerArtifact, policy: Policy, session: Session) -> Result<Self> {
        Self::new(a.boolean_spec()?, a.controller()?, policy, session)
    }

    pub fn spec(&self) -> &BooleanSpec {
        &self.spec
    }

    pub fn state(&self) -> &RuntimeState {
        &self.state
    }

    pub fn session(&mut self) -> &mut Session {
        &mut self.session
    }

    /// Partition of `env`, memoized per input.
    pub fn classify(&mut self, env: &Valuation) -> Result<usize> {
        if let Some(&k) = self.cache.get(env) {
            return Ok(k);
        }
        let k = classify_input(&self.spec, env, &mut self.session)?;
        self.cache.insert(env.clone(), k);
        Ok(k)
    }

    /// Classify, choose a cube, produce outputs, monitor.
    pub fn step(&mut self, env: &Valuation) -> Result<TraceStep> {
        self.spec.signature.check_env(env)?;
        let k = self.classify(env)?;
        let (cube, next) = self.controller.step(self.state.mealy, k).ok_or_else(|| {
            Error::Artifact(format!(
                "no transition from state {} on partition {k}",
                self.state.mealy
            ))
        })?;
        let provided = provide_output(
            &self.spec,
            cube,
            env,
            &self.policy,
            self.state.prev_output.as_ref(),
            &mut self.session,
        )?;
        let full = env.merged(&provided.output);
        let assignment = Cube::of_valuation(&self.spec.literals, &full)?.index();
        if assignment != cube {
            return Err(Error::contract(format!(
                "output {} realizes cube {assignment}, not the chosen cube {cube}",
                provided.output
            )));
        }
        let verdict = monitor_step(&self.spec.matrix, self.state.prev_assignment, assignment);
        self.state.step += 1;
        self.state.mealy = next;
        self.state.prev_assignment = Some(assignment);
        self.state.prev_output = Some(provided.output.clone());
        Ok(TraceStep {
            step: self.state.step,
            input: env.clone(),
            partition: k,
            cube,
            output: provided.output,
            verdict,
            capped: provided.capped,
        })
    }
}

/// Source of inputs for [`run_trace`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inputs {
    Scripted(Vec<Valuation>),
    /// `n` inputs drawn uniformly: integers in `[-window, window]` under Int,
    /// halves `k/2` with `k` in `[-2*window, 2*window]` under Real.
    Random {
        n: usize,
        seed: u64,
        window: u64,
    },
}

/// Random input valuations over the environment variables.
pub fn random_inputs(
    env_vars: &[String],
    sort: Sort,
    n: usize,
    seed: u64,
    window: u64,
) -> Vec<Valuation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = window as i64;
    (0..n)
        .map(|_| {
            let mut v = Valuation::new();
            for var in env_vars {
                let value = match sort {
                    Sort::Int => Value::int(rng.gen_range(-w..=w)),
                    Sort::Real => {
                        Value::new(BigInt::from(rng.gen_range(-2 * w..=2 * w)), BigInt::from(2))
                            .expect("nonzero denominator")
                    }
                };
                v.insert(var.clone(), value);
            }
            v
        })
        .collect()
}

/// Folds [`Engine::step`] over the inputs, passing each step to `sink`.
/// Stops at the first error.
pub fn run_trace_with(
    engine: &mut Engine,
    inputs: Inputs,
    mut sink: impl FnMut(&TraceStep) -> Result<()>,
) -> Result<Vec<TraceStep>> {
    let inputs = match inputs {
        Inputs::Scripted(v) => v,
        Inputs::Random { n, seed, window } => {
            let sig = &engine.spec.signature;
            random_inputs(&sig.env_vars, sig.sort, n, seed, window)
        }
    };
    let mut out = Vec::with_capacity(inputs.len());
    for env in &inputs {
        let step = engine.step(env)?;
        sink(&step)?;
        out.push(step);
    }
    Ok(out)
}

pub fn run_trace(engine: &mut Engine, inputs: Inputs) -> Result<Vec<TraceStep>> {
    run_trace_with(engine, inputs, |_| Ok(()))
}
