//! Environment partitions, reaction sets and the Boolean specification.

mod export;

pub use export::{export_ltl_text, BooleanizeReport};

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::{CompiledSpec, SafetyMatrix};
use crate::smt::{Answer, Session, Term};
use crate::theory::{
    cube_formula, CmpOp, Cube, Grounded, Literal, ReactionSet, Signature, Valuation,
};

/// An environment decision: inputs sharing one reaction set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub id: usize,
    pub reaction: ReactionSet,
    /// A concrete input inside the region.
    pub witness: Valuation,
}

/// The Boolean abstraction: the matrix plus the reaction set of every partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanSpec {
    pub signature: Signature,
    pub literals: Vec<Literal>,
    pub matrix: SafetyMatrix,
    pub partitions: Vec<Partition>,
}

impl BooleanSpec {
    /// Number of partitions `K`.
    pub fn num_partitions(&self) -> usize {
        self.partitions.len()
    }

    /// Number of literals `L`.
    pub fn num_literals(&self) -> usize {
        self.literals.len()
    }

    pub fn extra(&self, k: usize) -> &ReactionSet {
        &self.partitions[k].reaction
    }
}

/// Conjunction of the (possibly negated) literals of a cube.
pub fn cube_term(cube: Cube, lits: &[Literal]) -> Result<Term> {
    Ok(Term::conj(cube_formula(cube, lits)?))
}

/// Cubes achievable by the system at input `env`: those whose grounded
/// formula has a model over the system variables.
///
/// A cube that disagrees with a ground environment-only literal is skipped
/// without a query.
pub fn compute_reaction(
    sig: &Signature,
    lits: &[Literal],
    env: &Valuation,
    session: &mut Session,
) -> Result<ReactionSet> {
    sig.check_env(env)?;
    let grounded: Vec<Grounded> = lits
        .iter()
        .map(|l| l.ground(sig, env))
        .collect::<Result<_>>()?;
    let mut reaction = ReactionSet::new();
    'cubes: for cube in Cube::all(lits.len()) {
        let mut residual = Vec::new();
        for (i, g) in grounded.iter().enumerate() {
            match g {
                Grounded::Truth(t) if *t != cube.polarity(i) => continue 'cubes,
                Grounded::Truth(_) => {}
                Grounded::Residual(r) => residual.push(r.with_polarity(cube.polarity(i))),
            }
        }
        if residual.is_empty() {
            reaction.insert(cube.index());
            continue;
        }
        match session.solve_exists(&sig.sys_vars, &Term::conj(residual))? {
            Answer::Sat(_) => {
                reaction.insert(cube.index());
            }
            Answer::Unsat => {}
            Answer::Unknown => return Err(Error::SolverUnknown),
        }
    }
    Ok(reaction)
}

/// The characteristic condition of a reaction set, free in the environment
/// variables: every cube in `reaction` is achievable and no other cube is.
pub fn characteristic(sig: &Signature, lits: &[Literal], reaction: &ReactionSet) -> Result<Term> {
    let mut parts = Vec::new();
    for cube in Cube::all(lits.len()) {
        let body = cube_term(cube, lits)?;
        if reaction.contains(cube.index()) {
            parts.push(Term::exists(&sig.sys_vars, body));
        } else {
            parts.push(Term::forall(&sig.sys_vars, Term::not(body)));
        }
    }
    Ok(Term::and(parts))
}

fn aborted(err: Error) -> Error {
    match err {
        Error::SolverUnknown => {
            Error::AbstractionAborted("solver answered unknown on a partition query".into())
        }
        other => other,
    }
}

/// `exists env. none of the partitions applies`; Unsat means the partitions cover the domain.
pub fn check_cover(
    sig: &Signature,
    lits: &[Literal],
    partitions: &[Partition],
    session: &mut Session,
) -> Result<Answer> {
    let mut parts = Vec::new();
    for p in partitions {
        parts.push(Term::not(characteristic(sig, lits, &p.reaction)?));
    }
    session.check_quantified(&sig.env_vars, &Term::and(parts))
}

/// `exists env. both partitions apply`; Unsat means they are disjoint.
pub fn check_disjoint(
    sig: &Signature,
    lits: &[Literal],
    a: &Partition,
    b: &Partition,
    session: &mut Session,
) -> Result<Answer> {
    let f = Term::and([
        characteristic(sig, lits, &a.reaction)?,
        characteristic(sig, lits, &b.reaction)?,
    ]);
    session.check_quantified(&sig.env_vars, &f)
}

/// Finds every partition of the environment domain.
///
/// Each round asks for an input outside all known partitions and records the
/// reaction of the returned witness. The result is sorted by reaction set and
/// numbered from zero. Cover and pairwise disjointness are verified before
/// returning.
pub fn discover_partitions(
    sig: &Signature,
    lits: &[Literal],
    session: &mut Session,
) -> Result<Vec<Partition>> {
    if lits.is_empty() {
        return Err(Error::contract(
            "cannot booleanize a specification without literals",
        ));
    }
    let mut found: Vec<Partition> = Vec::new();
    loop {
        let answer = check_cover(sig, lits, &found, session).map_err(aborted)?;
        let witness = match answer {
            Answer::Unsat => break,
            Answer::Unknown => return Err(aborted(Error::SolverUnknown)),
            Answer::Sat(w) => w,
        };
        let reaction = compute_reaction(sig, lits, &witness, session).map_err(aborted)?;
        if reaction.is_empty() {
            return Err(Error::AbstractionAborted(format!(
                "input {witness} admits no cube"
            )));
        }
        if found.iter().any(|p| p.reaction == reaction) {
            return Err(Error::AbstractionAborted(format!(
                "input {witness} lies outside every partition but repeats reaction {reaction}"
            )));
        }
        debug!("partition witness {witness} with reaction {reaction}");
        found.push(Partition {
            id: found.len(),
            reaction,
            witness,
        });
    }
    for i in 0..found.len() {
        for j in i + 1..found.len() {
            match check_disjoint(sig, lits, &found[i], &found[j], session).map_err(aborted)? {
                Answer::Unsat => {}
                Answer::Unknown => return Err(aborted(Error::SolverUnknown)),
                Answer::Sat(w) => {
                    return Err(Error::AbstractionAborted(format!(
                        "partitions {} and {} overlap at {w}",
                        found[i].reaction, found[j].reaction
                    )))
                }
            }
        }
    }
    found.sort_by(|a, b| a.reaction.cmp(&b.reaction));
    for (k, p) in found.iter_mut().enumerate() {
        p.id = k;
    }
    info!(
        "discovered {} partitions over {} literals",
        found.len(),
        lits.len()
    );
    Ok(found)
}

/// Up to `n` distinct inputs inside the region of `p`, drawn from solver
/// models with blocking constraints. Fewer are returned when the region is
/// smaller than `n`.
pub fn sample_partition_points(
    sig: &Signature,
    lits: &[Literal],
    p: &Partition,
    n: usize,
    session: &mut Session,
) -> Result<Vec<Valuation>> {
    let psi = characteristic(sig, lits, &p.reaction)?;
    let mut blocked: Vec<Term> = Vec::new();
    let mut out = Vec::new();
    while out.len() < n {
        let mut parts = vec![psi.clone()];
        parts.extend(blocked.iter().cloned());
        match session.check_quantified(&sig.env_vars, &Term::and(parts))? {
            Answer::Sat(v) => {
                let differs = v.iter().map(|(var, val)| {
                    Term::Lit(Literal::var_cmp(var, CmpOp::Ne, val.as_rational()))
                });
                blocked.push(Term::or(differs));
                out.push(v);
            }
            Answer::Unsat => break,
            Answer::Unknown => return Err(Error::SolverUnknown),
        }
    }
    Ok(out)
}

/// Packages the matrix and the partitions.
pub fn emit_boolean_spec(spec: &CompiledSpec, partitions: Vec<Partition>) -> Result<BooleanSpec> {
    if partitions.is_empty() {
        return Err(Error::contract(
            "a Boolean specification needs at least one partition",
        ));
    }
    if spec.literals.is_empty() {
        return Err(Error::contract(
            "a Boolean specification needs at least one literal",
        ));
    }
    for (k, p) in partitions.iter().enumerate() {
        if p.id != k {
            return Err(Error::contract(format!(
                "partition at position {k} has id {}",
                p.id
            )));
        }
    }
    Ok(BooleanSpec {
        signature: spec.signature.clone(),
        literals: spec.literals.clone(),
        matrix: spec.matrix.clone(),
        partitions,
    })
}

/// Discovery followed by packaging.
pub fn booleanize(spec: &CompiledSpec, session: &mut Session) -> Result<BooleanSpec> {
    if session.sort() != spec.signature.sort {
        return Err(Error::contract(format!(
            "session sort {} does not match specification sort {}",
            session.sort(),
            spec.signature.sort
        )));
    }
    let partitions = discover_partitions(&spec.signature, &spec.literals, session)?;
    emit_boolean_spec(spec, partitions)
}
