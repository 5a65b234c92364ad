use std::fmt;

use super::ast::{Formula, SpecAst};
use crate::error::{Error, Result};
use crate::theory::Literal;

/// Boolean formula over current-step atoms `s_i` and next-step atoms `X s_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    Const(bool),
    Atom(usize),
    Next(usize),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Implies(Box<BoolExpr>, Box<BoolExpr>),
    Iff(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    /// Evaluates with atom `i` read from bit `i` of `cur` and `X s_i` from bit `i` of `next`.
    pub fn eval(&self, cur: u32, next: u32) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Atom(i) => cur >> i & 1 == 1,
            BoolExpr::Next(i) => next >> i & 1 == 1,
            BoolExpr::Not(e) => !e.eval(cur, next),
            BoolExpr::And(es) => es.iter().all(|e| e.eval(cur, next)),
            BoolExpr::Or(es) => es.iter().any(|e| e.eval(cur, next)),
            BoolExpr::Implies(a, b) => !a.eval(cur, next) || b.eval(cur, next),
            BoolExpr::Iff(a, b) => a.eval(cur, next) == b.eval(cur, next),
        }
    }

    pub fn has_next(&self) -> bool {
        self.any_atom(&mut |_, next| next)
    }

    fn any_atom(&self, f: &mut dyn FnMut(usize, bool) -> bool) -> bool {
        match self {
            BoolExpr::Const(_) => false,
            BoolExpr::Atom(i) => f(*i, false),
            BoolExpr::Next(i) => f(*i, true),
            BoolExpr::Not(e) => e.any_atom(f),
            BoolExpr::And(es) | BoolExpr::Or(es) => es.iter().any(|e| e.any_atom(f)),
            BoolExpr::Implies(a, b) | BoolExpr::Iff(a, b) => a.any_atom(f) || b.any_atom(f),
        }
    }

    pub(crate) fn max_index(&self) -> Option<usize> {
        let mut max = None;
        self.any_atom(&mut |i, _| {
            max = Some(max.map_or(i, |m: usize| m.max(i)));
            false
        });
        max
    }

    fn is_leaf(&self) -> bool {
        matches!(
            self,
            BoolExpr::Const(_) | BoolExpr::Atom(_) | BoolExpr::Next(_)
        )
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |es: &[BoolExpr], op: &str| {
            let parts: Vec<String> = es.iter().map(ToString::to_string).collect();
            format!("({})", parts.join(op))
        };
        match self {
            BoolExpr::Const(true) => f.write_str("true"),
            BoolExpr::Const(false) => f.write_str("false"),
            BoolExpr::Atom(i) => write!(f, "s{i}"),
            BoolExpr::Next(i) => write!(f, "X s{i}"),
            BoolExpr::Not(e) if e.is_leaf() && !matches!(**e, BoolExpr::Next(_)) => {
                write!(f, "!{e}")
            }
            BoolExpr::Not(e) if e.is_leaf() => write!(f, "!({e})"),
            BoolExpr::Not(e) => write!(f, "!{e}"),
            BoolExpr::And(es) => f.write_str(&join(es, " & ")),
            BoolExpr::Or(es) => f.write_str(&join(es, " | ")),
            BoolExpr::Implies(a, b) => write!(f, "({a} -> {b})"),
            BoolExpr::Iff(a, b) => write!(f, "({a} <-> {b})"),
        }
    }
}

/// The body `psi` of `G(psi)` with atoms replaced by literal indices, kept as
/// its list of top-level conjuncts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyMatrix {
    pub conjuncts: Vec<BoolExpr>,
    pub num_literals: usize,
}

impl SafetyMatrix {
    /// `psi(cur, next)`.
    pub fn holds(&self, cur: u32, next: u32) -> bool {
        self.conjuncts.iter().all(|c| c.eval(cur, next))
    }

    /// First conjunct violated by the pair, if any.
    pub fn first_violation(&self, cur: u32, next: u32) -> Option<&BoolExpr> {
        self.conjuncts.iter().find(|c| !c.eval(cur, next))
    }

    /// True when no conjunct mentions a next-step atom.
    pub fn is_stateless(&self) -> bool {
        !self.conjuncts.iter().any(BoolExpr::has_next)
    }

    /// Rebuilds a matrix from Boolean conjuncts over `s0..s{L-1}` and `X s_i`.
    pub fn from_boolean(conjuncts: &[Formula<String>], num_literals: usize) -> Result<Self> {
        let lookup = |name: &String| -> Result<(usize, bool)> {
            let idx = name
                .strip_prefix('s')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&i| i < num_literals)
                .ok_or_else(|| {
                    Error::contract(format!("`{name}` is not an atom among s0..s{num_literals}"))
                })?;
            Ok((idx, true))
        };
        let mut out = Vec::new();
        for c in conjuncts {
            lower(c, &lookup, &mut out)?;
        }
        let m = SafetyMatrix {
            conjuncts: out,
            num_literals,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if let Some(max) = self.conjuncts.iter().filter_map(BoolExpr::max_index).max() {
            if max >= self.num_literals {
                return Err(Error::contract(format!(
                    "atom s{max} out of range for {} literals",
                    self.num_literals
                )));
            }
        }
        let has_current = self
            .conjuncts
            .iter()
            .any(|c| c.any_atom(&mut |_, next| !next));
        if !has_current {
            return Err(Error::UnsupportedFragment(
                "the safety matrix must mention at least one current-step atom".into(),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for SafetyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.conjuncts.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" & "))
    }
}

/// Deduplicated canonical literals in first-occurrence order. A literal whose
/// complement is already listed maps onto that entry with negative polarity.
pub fn extract_literals(ast: &SpecAst) -> Vec<Literal> {
    let mut lits: Vec<Literal> = Vec::new();
    for l in ast.formula.atoms() {
        if lookup_literal(&lits, l).is_none() {
            lits.push(l.clone());
        }
    }
    lits
}

/// Index and polarity of `l` within `lits`.
pub fn lookup_literal(lits: &[Literal], l: &Literal) -> Option<(usize, bool)> {
    if let Some(i) = lits.iter().position(|m| m == l) {
        return Some((i, true));
    }
    let neg = l.negate();
    lits.iter().position(|m| *m == neg).map(|i| (i, false))
}

/// Checks the safety fragment (a conjunction of `G` blocks whose bodies use
/// Boolean connectives, atoms and `X(atom)`) and replaces atoms by literal indices.
pub fn normalize_safety(ast: &SpecAst) -> Result<SafetyMatrix> {
    let lits = extract_literals(ast);
    let lookup = |l: &Literal| {
        lookup_literal(&lits, l)
            .ok_or_else(|| Error::contract(format!("literal {l} missing from the literal list")))
    };

    let mut blocks = Vec::new();
    split_and(&ast.formula, &mut blocks);
    let mut conjuncts = Vec::new();
    for block in blocks {
        match block {
            Formula::Globally(body) => lower(body, &lookup, &mut conjuncts)?,
            other => {
                return Err(Error::UnsupportedFragment(format!(
                    "top level must be a conjunction of G(...) blocks, found {}",
                    describe(other)
                )))
            }
        }
    }
    let m = SafetyMatrix {
        conjuncts,
        num_literals: lits.len(),
    };
    m.validate()?;
    Ok(m)
}

fn describe<A>(f: &Formula<A>) -> &'static str {
    match f {
        Formula::True | Formula::False => "a constant",
        Formula::Atom(_) => "an atom",
        Formula::Not(_) => "a negation",
        Formula::And(..) => "a conjunction",
        Formula::Or(..) => "a disjunction",
        Formula::Implies(..) => "an implication",
        Formula::Iff(..) => "an equivalence",
        Formula::Next(_) => "X",
        Formula::Globally(_) => "G",
    }
}

fn split_and<'a, A>(f: &'a Formula<A>, out: &mut Vec<&'a Formula<A>>) {
    match f {
        Formula::And(a, b) => {
            split_and(a, out);
            split_and(b, out);
        }
        other => out.push(other),
    }
}

/// Lowers the body of a `G` block, appending its top-level conjuncts.
fn lower<A>(
    body: &Formula<A>,
    lookup: &dyn Fn(&A) -> Result<(usize, bool)>,
    out: &mut Vec<BoolExpr>,
) -> Result<()> {
    let mut parts = Vec::new();
    split_and(body, &mut parts);
    for p in parts {
        out.push(to_bool(p, lookup)?);
    }
    Ok(())
}

fn to_bool<A>(f: &Formula<A>, lookup: &dyn Fn(&A) -> Result<(usize, bool)>) -> Result<BoolExpr> {
    let polar = |idx: usize, positive: bool, next: bool| {
        let atom = if next {
            BoolExpr::Next(idx)
        } else {
            BoolExpr::Atom(idx)
        };
        if positive {
            atom
        } else {
            BoolExpr::Not(Box::new(atom))
        }
    };
    let rec = |g: &Formula<A>| to_bool(g, lookup).map(Box::new);
    Ok(match f {
        Formula::True => BoolExpr::Const(true),
        Formula::False => BoolExpr::Const(false),
        Formula::Atom(a) => {
            let (i, pos) = lookup(a)?;
            polar(i, pos, false)
        }
        Formula::Not(g) => BoolExpr::Not(rec(g)?),
        Formula::And(..) => {
            let mut parts = Vec::new();
            split_and(f, &mut parts);
            BoolExpr::And(
                parts
                    .into_iter()
                    .map(|p| to_bool(p, lookup))
                    .collect::<Result<_>>()?,
            )
        }
        Formula::Or(a, b) => BoolExpr::Or(vec![*rec(a)?, *rec(b)?]),
        Formula::Implies(a, b) => BoolExpr::Implies(rec(a)?, rec(b)?),
        Formula::Iff(a, b) => BoolExpr::Iff(rec(a)?, rec(b)?),
        Formula::Next(g) => match &**g {
            Formula::Atom(a) => {
                let (i, pos) = lookup(a)?;
                polar(i, pos, true)
            }
            Formula::Next(_) => {
                return Err(Error::UnsupportedFragment(
                    "nested X: next-step depth is limited to one".into(),
                ))
            }
            Formula::Globally(_) => {
                return Err(Error::UnsupportedFragment(
                    "nested temporal operator G under X".into(),
                ))
            }
            other => {
                return Err(Error::UnsupportedFragment(format!(
                    "X may only wrap an atom, found {}",
                    describe(other)
                )))
            }
        },
        Formula::Globally(_) => {
            return Err(Error::UnsupportedFragment(
                "nested temporal operator G inside G".into(),
            ))
        }
    })
}
