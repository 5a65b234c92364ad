//! Linear-arithmetic literals, cubes and valuations.
//!
//! All arithmetic is exact over big rationals; nothing here touches floats.

mod cube;
mod literal;
mod value;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cube::{cube_formula, Cube, ReactionSet, MAX_LITERALS};
pub use literal::{CmpOp, Grounded, LinearExpr, Literal, RelOp};
pub(crate) use value::parse_decimal;
pub use value::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sort {
    Int,
    Real,
}

impl Sort {
    pub fn smt_name(self) -> &'static str {
        match self {
            Sort::Int => "Int",
            Sort::Real => "Real",
        }
    }

    /// SMT-LIB logic used for sessions over this sort.
    pub fn logic(self) -> &'static str {
        match self {
            Sort::Int => "LIA",
            Sort::Real => "LRA",
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.smt_name())
    }
}

impl FromStr for Sort {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Int" => Ok(Sort::Int),
            "Real" => Ok(Sort::Real),
            other => Err(Error::contract(format!("unknown sort `{other}`"))),
        }
    }
}

/// An assignment of exact values to variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation(BTreeMap<String, Value>);

pub type EnvValuation = Valuation;
pub type SysValuation = Valuation;

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Value> {
        self.0.get(var)
    }

    pub fn insert(&mut self, var: impl Into<String>, value: Value) -> Option<Value> {
        self.0.insert(var.into(), value)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Union of two valuations; `other` wins on shared names.
    pub fn merged(&self, other: &Valuation) -> Valuation {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.0.insert(k.clone(), v.clone());
        }
        out
    }

    /// Parses `x=4 z=-3/2` (whitespace-separated assignments).
    pub fn parse_assignments(line: &str) -> Result<Valuation> {
        let mut out = Valuation::new();
        for part in line.split_whitespace() {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| Error::contract(format!("expected `name=value`, got `{part}`")))?;
            if out.insert(name.trim(), value.parse()?).is_some() {
                return Err(Error::contract(format!("variable `{name}` assigned twice")));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromIterator<(String, Value)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (String, Value)>>(iter: T) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

/// Declared sort and variable ownership of a specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub sort: Sort,
    pub env_vars: Vec<String>,
    pub sys_vars: Vec<String>,
}

impl Signature {
    pub fn new(sort: Sort, env_vars: Vec<String>, sys_vars: Vec<String>) -> Result<Self> {
        if env_vars.is_empty() || sys_vars.is_empty() {
            return Err(Error::contract(
                "both environment and system variables must be declared",
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in env_vars.iter().chain(&sys_vars) {
            if !seen.insert(v) {
                return Err(Error::contract(format!("variable `{v}` declared twice")));
            }
        }
        Ok(Signature {
            sort,
            env_vars,
            sys_vars,
        })
    }

    pub fn is_env(&self, var: &str) -> bool {
        self.env_vars.iter().any(|v| v == var)
    }

    pub fn is_sys(&self, var: &str) -> bool {
        self.sys_vars.iter().any(|v| v == var)
    }

    pub fn is_declared(&self, var: &str) -> bool {
        self.is_env(var) || self.is_sys(var)
    }

    fn check_exact(&self, v: &Valuation, vars: &[String], side: &str) -> Result<()> {
        for var in vars {
            let value = v
                .get(var)
                .ok_or_else(|| Error::contract(format!("{side} valuation lacks `{var}`")))?;
            if !value.fits(self.sort) {
                return Err(Error::contract(format!(
                    "value {value} of `{var}` is not of sort {}",
                    self.sort
                )));
            }
        }
        if let Some((extra, _)) = v.iter().find(|(k, _)| !vars.contains(k)) {
            return Err(Error::contract(format!(
                "`{extra}` is not a declared {side} variable"
            )));
        }
        Ok(())
    }

    /// Checks that `v` is total over exactly the env variables and sort-correct.
    pub fn check_env(&self, v: &Valuation) -> Result<()> {
        self.check_exact(v, &self.env_vars, "environment")
    }

    pub fn check_sys(&self, v: &Valuation) -> Result<()> {
        self.check_exact(v, &self.sys_vars, "system")
    }
}
