use log::warn;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use super::policy::{Policy, Rule, Target};
use crate::booleanize::BooleanSpec;
use crate::error::{Error, Result};
use crate::smt::{Answer, Session, Term};
use crate::theory::{cube_formula, CmpOp, Cube, Grounded, Literal, Valuation, Value};

/// Searches for min/max stop this far from the first model found.
pub const OPTIMIZATION_CAP: u64 = 1 << 20;

/// Output of the provider stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provided {
    pub output: Valuation,
    /// Some min/max search hit [`OPTIMIZATION_CAP`]; the value is the best found.
    pub capped: bool,
}

/// The cube's formula with the input substituted. Fails if a ground literal
/// contradicts the cube.
pub fn grounded_cube(b: &BooleanSpec, cube: u32, env: &Valuation) -> Result<Vec<Literal>> {
    let cube = Cube::new(cube, b.num_literals())?;
    let mut residual = Vec::new();
    for l in cube_formula(cube, &b.literals)? {
        match l.ground(&b.signature, env)? {
            Grounded::Truth(true) => {}
            Grounded::Truth(false) => {
                return Err(Error::ProviderUnsat {
                    cube: cube.index(),
                    detail: format!("{} is false at {env}", l.pretty()),
                })
            }
            Grounded::Residual(r) => residual.push(r),
        }
    }
    Ok(residual)
}

struct Search<'a> {
    session: &'a mut Session,
    sys: &'a [String],
    base: Vec<Literal>,
    cube: u32,
}

impl Search<'_> {
    fn model(&mut self, extra: &[Literal]) -> Result<Option<Valuation>> {
        let f = Term::conj(self.base.iter().chain(extra).cloned());
        match self.session.solve_exists(self.sys, &f)? {
            Answer::Sat(m) => Ok(Some(m)),
            Answer::Unsat => Ok(None),
            Answer::Unknown => Err(Error::SolverUnknown),
        }
    }

    fn unsat(&self, detail: String) -> Error {
        Error::ProviderUnsat {
            cube: self.cube,
            detail,
        }
    }

    fn int_of(m: &Valuation, var: &str) -> BigInt {
        m.get(var)
            .expect("model covers the system variables")
            .numer()
            .clone()
    }

    /// Least (`sign = 1`) or greatest (`sign = -1`) integer value of `var`,
    /// searching no further than the cap from `first`.
    fn extremum(&mut self, var: &str, sign: i64, first: &BigInt) -> Result<(BigInt, bool)> {
        let sign = BigInt::from(sign);
        // score = sign * var is minimized; `bound(t)` is `score <= t`
        let bound = |t: &BigInt| {
            let op = if sign > BigInt::from(0) {
                CmpOp::Le
            } else {
                CmpOp::Ge
            };
            Literal::var_cmp(var, op, &BigRational::from_integer(&sign * t))
        };
        let start = &sign * first;
        let floor = &start - BigInt::from(OPTIMIZATION_CAP);
        let within = bound(&(&floor - 1)).negate();

        let mut hi = start.clone();
        let mut lo;
        let mut step = BigInt::from(1);
        loop {
            let probe = &hi - &step;
            if probe < floor {
                lo = &floor - 1;
                break;
            }
            match self.model(&[within.clone(), bound(&probe)])? {
                Some(m) => {
                    hi = &sign * Self::int_of(&m, var);
                    step *= 2;
                }
                None => {
                    lo = probe;
                    break;
                }
            }
        }
        while &hi - &lo > BigInt::from(1) {
            let mid = (&lo + &hi).div_floor(&BigInt::from(2));
            match self.model(&[within.clone(), bound(&mid)])? {
                Some(m) => hi = &sign * Self::int_of(&m, var),
                None => lo = mid,
            }
        }
        let capped = hi == floor && self.model(&[bound(&(&floor - 1))])?.is_some();
        Ok((&sign * hi, capped))
    }
}

/// Concrete outputs realizing `cube` at input `env`.
///
/// Variables with a min, max or target rule are decided one at a time in
/// declaration order, each fixed before the next; the remaining variables
/// take the values of one final model.
pub fn provide_output(
    b: &BooleanSpec,
    cube: u32,
    env: &Valuation,
    policy: &Policy,
    prev: Option<&Valuation>,
    session: &mut Session,
) -> Result<Provided> {
    b.signature.check_env(env)?;
    let base = grounded_cube(b, cube, env)?;
    let sys = b.signature.sys_vars.clone();
    let mut search = Search {
        session,
        sys: &sys,
        base,
        cube,
    };
    let mut capped = false;
    for var in &sys {
        let rule = policy.rule(var).clone();
        if rule == Rule::Any {
            continue;
        }
        let first = search
            .model(&[])?
            .ok_or_else(|| search.unsat("no model for the grounded cube".into()))?;
        let value = match rule {
            Rule::Any => unreachable!(),
            Rule::Min | Rule::Max => {
                let sign = if rule == Rule::Min { 1 } else { -1 };
                let (v, hit) = search.extremum(var, sign, &Search::int_of(&first, var))?;
                if hit {
                    warn!("optimization of `{var}` for cube {cube} stopped at the cap, best value {v}");
                }
                capped |= hit;
                Value::from_integer(v)
            }
            Rule::Target(target) => {
                let wanted = match target {
                    Target::Value(v) => Some(v),
                    Target::Prev => prev.and_then(|p| p.get(var)).cloned(),
                };
                let hit = match &wanted {
                    Some(w) => {
                        let eq = Literal::var_cmp(var, CmpOp::Eq, w.as_rational());
                        search.model(&[eq])?.is_some()
                    }
                    None => false,
                };
                match wanted {
                    Some(w) if hit => w,
                    _ => first
                        .get(var)
                        .expect("model covers the system variables")
                        .clone(),
                }
            }
        };
        search
            .base
            .push(Literal::var_cmp(var, CmpOp::Eq, value.as_rational()));
    }
    let output = search
        .model(&[])?
        .ok_or_else(|| search.unsat("no model for the grounded cube".into()))?;
    Ok(Provided { output, capped })
}
