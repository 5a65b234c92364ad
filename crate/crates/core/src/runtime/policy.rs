use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::theory::{Signature, Sort, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Value(Value),
    /// The variable's output at the previous step.
    Prev,
}

/// How a system variable's value is chosen among the models of a cube.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Rule {
    #[default]
    Any,
    Min,
    Max,
    Target(Target),
}

/// Per-variable selection rules; unlisted variables use [`Rule::Any`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Policy(BTreeMap<String, Rule>);

impl Policy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, rule: Rule) -> Self {
        self.0.insert(var.into(), rule);
        self
    }

    pub fn rule(&self, var: &str) -> &Rule {
        static ANY: Rule = Rule::Any;
        self.0.get(var).unwrap_or(&ANY)
    }

    /// Rules must name system variables; min/max need the Int sort and
    /// target values must fit the sort.
    pub fn validate(&self, sig: &Signature) -> Result<()> {
        for (var, rule) in &self.0 {
            if !sig.is_sys(var) {
                return Err(Error::Policy(format!("`{var}` is not a system variable")));
            }
            match rule {
                Rule::Min | Rule::Max if sig.sort != Sort::Int => {
                    return Err(Error::Policy(format!(
                        "min/max on `{var}` requires the Int sort; extrema need not exist over the reals"
                    )))
                }
                Rule::Target(Target::Value(v)) if !v.fits(sig.sort) => {
                    return Err(Error::Policy(format!(
                        "target {v} for `{var}` is not of sort {}",
                        sig.sort
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Parses `min:y,max:z,target:w=prev,target:v=3/2`.
impl FromStr for Policy {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut policy = Policy::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (kind, rest) = item
                .split_once(':')
                .ok_or_else(|| Error::Policy(format!("expected `rule:var` in `{item}`")))?;
            let (var, rule) = match kind.trim() {
                "any" => (rest, Rule::Any),
                "min" => (rest, Rule::Min),
                "max" => (rest, Rule::Max),
                "target" => {
                    let (var, value) = rest.split_once('=').ok_or_else(|| {
                        Error::Policy(format!("expected `target:var=value` in `{item}`"))
                    })?;
                    let target = match value.trim() {
                        "prev" => Target::Prev,
                        v => Target::Value(
                            v.parse()
                                .map_err(|_| Error::Policy(format!("bad target value `{v}`")))?,
                        ),
                    };
                    (var, Rule::Target(target))
                }
                other => return Err(Error::Policy(format!("unknown rule `{other}`"))),
            };
            let var = var.trim();
            if var.is_empty() {
                return Err(Error::Policy(format!("missing variable in `{item}`")));
            }
            if policy.0.insert(var.to_string(), rule).is_some() {
                return Err(Error::Policy(format!("`{var}` has more than one rule")));
            }
        }
        Ok(policy)
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, r)| match r {
                Rule::Any => format!("any:{v}"),
                Rule::Min => format!("min:{v}"),
                Rule::Max => format!("max:{v}"),
                Rule::Target(Target::Prev) => format!("target:{v}=prev"),
                Rule::Target(Target::Value(x)) => format!("target:{v}={x}"),
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}
