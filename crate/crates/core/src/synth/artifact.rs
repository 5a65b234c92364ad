use std::path::Path;

use serde::{Deserialize, Serialize};

use super::controller::MealyController;
use super::game::StateId;
use crate::booleanize::{BooleanSpec, Partition};
use crate::error::{Error, Result};
use crate::frontend::{parse_boolean_ltl, parse_literal, SafetyMatrix};
use crate::theory::{Literal, Signature, Sort};

pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub state: StateId,
    pub input: usize,
    pub cube: u32,
    pub next: StateId,
}

/// Serialized controller: abstraction plus Mealy transitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControllerArtifact {
    pub version: u32,
    pub sort: Sort,
    pub env_vars: Vec<String>,
    pub sys_vars: Vec<String>,
    pub literals: Vec<String>,
    pub matrix: Vec<String>,
    pub partitions: Vec<Partition>,
    pub transitions: Vec<Transition>,
    pub initial: StateId,
    pub realizable: bool,
}

impl ControllerArtifact {
    /// `controller` is `None` for an unrealizable specification.
    pub fn new(b: &BooleanSpec, controller: Option<&MealyController>) -> Self {
        let transitions = controller
            .map(|c| {
                c.transitions()
                    .map(|(state, input, cube, next)| Transition {
                        state,
                        input,
                        cube,
                        next,
                    })
                    .collect()
            })
            .unwrap_or_default();
        ControllerArtifact {
            version: ARTIFACT_VERSION,
            sort: b.signature.sort,
            env_vars: b.signature.env_vars.clone(),
            sys_vars: b.signature.sys_vars.clone(),
            literals: b.literals.iter().map(ToString::to_string).collect(),
            matrix: b.matrix.conjuncts.iter().map(ToString::to_string).collect(),
            partitions: b.partitions.clone(),
            transitions,
            initial: controller.map_or(0, MealyController::initial),
            realizable: controller.is_some(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("artifact serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let a: ControllerArtifact = serde_json::from_str(text)?;
        if a.version != ARTIFACT_VERSION {
            return Err(Error::Artifact(format!(
                "unsupported artifact version {} (expected {ARTIFACT_VERSION})",
                a.version
            )));
        }
        Ok(a)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Rebuilds the abstraction, re-canonicalizing every literal text.
    pub fn boolean_spec(&self) -> Result<BooleanSpec> {
        let signature = Signature::new(self.sort, self.env_vars.clone(), self.sys_vars.clone())?;
        let literals: Vec<Literal> = self
            .literals
            .iter()
            .map(|t| {
                let l = parse_literal(t, &signature)
                    .map_err(|e| Error::Artifact(format!("literal `{t}`: {e}")))?;
                if l.to_string() != *t {
                    return Err(Error::Artifact(format!(
                        "literal `{t}` is not in canonical form"
                    )));
                }
                Ok(l)
            })
            .collect::<Result<_>>()?;
        let conjuncts = self
            .matrix
            .iter()
            .map(|t| {
                parse_boolean_ltl(t).map_err(|e| Error::Artifact(format!("matrix `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let matrix = SafetyMatrix::from_boolean(&conjuncts, literals.len())?;
        for (k, p) in self.partitions.iter().enumerate() {
            if p.id != k {
                return Err(Error::Artifact(format!(
                    "partition at position {k} has id {}",
                    p.id
                )));
            }
            signature
                .check_env(&p.witness)
                .map_err(|e| Error::Artifact(format!("partition {k} witness: {e}")))?;
            if p.reaction.is_empty()
                || p.reaction
                    .iter()
                    .any(|c| u64::from(c) >> literals.len() != 0)
            {
                return Err(Error::Artifact(format!(
                    "partition {k} has an invalid reaction set"
                )));
            }
        }
        if self.partitions.is_empty() {
            return Err(Error::Artifact("artifact lists no partitions".into()));
        }
        Ok(BooleanSpec {
            signature,
            literals,
            matrix,
            partitions: self.partitions.clone(),
        })
    }

    /// The Mealy controller; fails for unrealizable artifacts.
    pub fn controller(&self) -> Result<MealyController> {
        if !self.realizable {
            return Err(Error::Artifact(
                "the artifact records an unrealizable specification".into(),
            ));
        }
        let width = self.literals.len();
        for t in &self.transitions {
            let p = self.partitions.get(t.input).ok_or_else(|| {
                Error::Artifact(format!("transition input {} out of range", t.input))
            })?;
            if !p.reaction.contains(t.cube) {
                return Err(Error::Artifact(format!(
                    "transition ({}, {}) picks cube {} outside the partition's reaction",
                    t.state, t.input, t.cube
                )));
            }
            if t.next != 1 + t.input * (1 << width) + t.cube as usize {
                return Err(Error::Artifact(format!(
                    "transition ({}, {}) names an inconsistent successor {}",
                    t.state, t.input, t.next
                )));
            }
        }
        MealyController::from_transitions(
            self.partitions.len(),
            self.initial,
            self.transitions
                .iter()
                .map(|t| (t.state, t.input, t.cube, t.next)),
        )
    }
}
