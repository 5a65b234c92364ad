//! Brute-force references over bounded windows, independent of the solver.
//!
//! Reaction sets are computed by evaluating the literals on every grid point,
//! so they under-approximate the true reactions whenever a cube needs system
//! values outside the grid. The window is checked to keep region boundaries
//! strictly inside it.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::frontend::CompiledSpec;
use crate::theory::{Cube, Literal, ReactionSet, Signature, Sort, Valuation, Value};

const MAX_ENV_POINTS: usize = 100_000;
const MAX_SYS_POINTS: usize = 1_000_000;

/// Integers in `[-B, B]` under Int, halves `k/2` with `k` in `[-2B, 2B]` under Real.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    bound: u64,
}

impl Window {
    pub fn new(bound: u64) -> Result<Self> {
        if bound == 0 {
            return Err(Error::contract("window bound must be at least 1"));
        }
        Ok(Window { bound })
    }

    pub fn bound(self) -> u64 {
        self.bound
    }

    /// Grid values of one environment variable, ascending.
    pub fn env_values(self, sort: Sort) -> Vec<Value> {
        grid(self.bound as i64, env_denominator(sort))
    }
}

fn env_denominator(sort: Sort) -> i64 {
    match sort {
        Sort::Int => 1,
        Sort::Real => 2,
    }
}

fn grid(bound: i64, denom: i64) -> Vec<Value> {
    (-bound * denom..=bound * denom)
        .map(|k| Value::new(BigInt::from(k), BigInt::from(denom)).expect("positive denominator"))
        .collect()
}

/// System grid: wider than the environment window and, under Real, twice as fine.
fn sys_values(lits: &[Literal], sort: Sort, window: Window) -> Vec<Value> {
    let max_const = lits
        .iter()
        .map(|l| l.constant().abs().to_i64().unwrap_or(i64::MAX / 8))
        .max()
        .unwrap_or(0);
    let max_coeff = lits
        .iter()
        .flat_map(|l| l.coeffs().values())
        .map(|c| c.abs().to_i64().unwrap_or(i64::MAX / 8))
        .max()
        .unwrap_or(1);
    let bound = 2 * window.bound as i64 * max_coeff + max_const + 2;
    let denom = match sort {
        Sort::Int => 1,
        Sort::Real => 4,
    };
    grid(bound, denom)
}

fn product(vars: &[String], values: &[Value], cap: usize) -> Result<Vec<Valuation>> {
    let size = (values.len() as f64).powi(vars.len() as i32);
    if size > cap as f64 {
        return Err(Error::contract(format!(
            "oracle grid of {size} points exceeds the limit of {cap}"
        )));
    }
    let mut out = vec![Valuation::new()];
    for var in vars {
        let mut next = Vec::with_capacity(out.len() * values.len());
        for partial in &out {
            for v in values {
                let mut p = partial.clone();
                p.insert(var.clone(), v.clone());
                next.push(p);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Cubes hit by some system grid point at each environment point.
pub type ReactionMap = BTreeMap<Valuation, ReactionSet>;

pub fn oracle_reaction_map(
    sig: &Signature,
    lits: &[Literal],
    window: Window,
) -> Result<ReactionMap> {
    let env_points = product(&sig.env_vars, &window.env_values(sig.sort), MAX_ENV_POINTS)?;
    let sys_points = product(
        &sig.sys_vars,
        &sys_values(lits, sig.sort, window),
        MAX_SYS_POINTS,
    )?;
    let mut map = ReactionMap::new();
    for env in env_points {
        let mut reaction = ReactionSet::new();
        for sys in &sys_points {
            reaction.insert(Cube::of_valuation(lits, &env.merged(sys))?.index());
        }
        map.insert(env, reaction);
    }
    check_window(sig, &map, window)?;
    Ok(map)
}

/// Every point on the window's edge must react like its inward neighbour.
fn check_window(sig: &Signature, map: &ReactionMap, window: Window) -> Result<()> {
    let edge = BigRational::from_integer(BigInt::from(window.bound));
    let step = BigRational::new(BigInt::from(1), BigInt::from(env_denominator(sig.sort)));
    for (point, reaction) in map {
        for var in &sig.env_vars {
            let v = point
                .get(var)
                .expect("grid point covers env vars")
                .as_rational();
            let inward = if *v == edge {
                v - &step
            } else if *v == -edge.clone() {
                v + &step
            } else {
                continue;
            };
            let mut neighbour = point.clone();
            neighbour.insert(var.clone(), Value::from_rational(inward));
            if map.get(&neighbour) != Some(reaction) {
                return Err(Error::WindowTooSmall(format!(
                    "reaction changes between {point} and {neighbour}"
                )));
            }
        }
    }
    Ok(())
}

/// Environment points grouped by reaction set, ordered by reaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub reaction: ReactionSet,
    pub points: Vec<Valuation>,
}

pub fn regions(map: &ReactionMap) -> Vec<Region> {
    let mut grouped: BTreeMap<&ReactionSet, Vec<Valuation>> = BTreeMap::new();
    for (p, r) in map {
        grouped.entry(r).or_default().push(p.clone());
    }
    grouped
        .into_iter()
        .map(|(r, points)| Region {
            reaction: r.clone(),
            points,
        })
        .collect()
}

/// Compact rendering for one environment variable: runs of consecutive grid
/// points as intervals.
impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let single = self.points.first().is_some_and(|p| p.len() == 1);
        if !single {
            return write!(f, "{} points: {}", self.points.len(), self.reaction);
        }
        let var = self.points[0].iter().next().expect("one var").0.clone();
        let vals: Vec<&BigRational> = self
            .points
            .iter()
            .map(|p| p.get(&var).expect("same var").as_rational())
            .collect();
        let gap = vals
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|d| !d.is_zero())
            .min()
            .unwrap_or_else(|| BigRational::from_integer(BigInt::from(1)));
        let mut runs: Vec<(BigRational, BigRational)> = Vec::new();
        for v in vals {
            match runs.last_mut() {
                Some((_, hi)) if &(&*hi + &gap) == v => *hi = v.clone(),
                _ => runs.push((v.clone(), v.clone())),
            }
        }
        let parts: Vec<String> = runs
            .iter()
            .map(|(lo, hi)| {
                let (lo, hi) = (
                    Value::from_rational(lo.clone()),
                    Value::from_rational(hi.clone()),
                );
                if lo == hi {
                    format!("{var}={lo}")
                } else {
                    format!("{var} in [{lo}, {hi}]")
                }
            })
            .collect();
        write!(f, "{}: {}", parts.join(", "), self.reaction)
    }
}

/// Solves the bounded game whose moves are grid values and whose states are
/// the previous literal truth vectors.
pub fn oracle_realizability(spec: &CompiledSpec, window: Window) -> Result<bool> {
    let map = oracle_reaction_map(&spec.signature, &spec.literals, window)?;
    let n = 1usize << spec.literals.len();
    let menus: Vec<Vec<u32>> = {
        let mut distinct: Vec<Vec<u32>> = map.values().map(|r| r.iter().collect()).collect();
        distinct.sort();
        distinct.dedup();
        distinct
    };
    // alive[c]: the system can keep playing forever after answering c
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for c in 0..n {
            if !alive[c] {
                continue;
            }
            let ok = menus.iter().all(|menu| {
                menu.iter()
                    .any(|&d| alive[d as usize] && spec.matrix.holds(c as u32, d))
            });
            if !ok {
                alive[c] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(menus
        .iter()
        .all(|menu| menu.iter().any(|&d| alive[d as usize])))
}
