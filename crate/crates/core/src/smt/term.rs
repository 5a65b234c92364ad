use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::theory::{Literal, RelOp, Sort, Valuation};

/// First-order formula over literals of a single sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Bool(bool),
    Lit(Literal),
    Not(Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
    Exists(Vec<String>, Box<Term>),
    Forall(Vec<String>, Box<Term>),
}

impl Term {
    pub fn and(parts: impl IntoIterator<Item = Term>) -> Term {
        let parts: Vec<Term> = parts.into_iter().collect();
        match parts.len() {
            0 => Term::Bool(true),
            1 => parts.into_iter().next().expect("one part"),
            _ => Term::And(parts),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Term>) -> Term {
        let parts: Vec<Term> = parts.into_iter().collect();
        match parts.len() {
            0 => Term::Bool(false),
            1 => parts.into_iter().next().expect("one part"),
            _ => Term::Or(parts),
        }
    }

    pub fn not(t: Term) -> Term {
        Term::Not(Box::new(t))
    }

    pub fn conj(lits: impl IntoIterator<Item = Literal>) -> Term {
        Term::and(lits.into_iter().map(Term::Lit))
    }

    /// `exists vars. body`; no quantifier is emitted when `vars` is empty.
    pub fn exists(vars: &[String], body: Term) -> Term {
        if vars.is_empty() {
            body
        } else {
            Term::Exists(vars.to_vec(), Box::new(body))
        }
    }

    pub fn forall(vars: &[String], body: Term) -> Term {
        if vars.is_empty() {
            body
        } else {
            Term::Forall(vars.to_vec(), Box::new(body))
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Term::Bool(_) | Term::Lit(_) => true,
            Term::Not(t) => t.is_quantifier_free(),
            Term::And(ts) | Term::Or(ts) => ts.iter().all(Term::is_quantifier_free),
            Term::Exists(..) | Term::Forall(..) => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Bool(_) => {}
            Term::Lit(l) => {
                for v in l.vars() {
                    if !bound.iter().any(|b| b == v) {
                        out.insert(v.to_string());
                    }
                }
            }
            Term::Not(t) => t.collect_free(bound, out),
            Term::And(ts) | Term::Or(ts) => ts.iter().for_each(|t| t.collect_free(bound, out)),
            Term::Exists(vs, t) | Term::Forall(vs, t) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                t.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Exact evaluation of a quantifier-free term.
    pub fn eval(&self, v: &Valuation) -> Result<bool> {
        match self {
            Term::Bool(b) => Ok(*b),
            Term::Lit(l) => l.eval(v),
            Term::Not(t) => Ok(!t.eval(v)?),
            Term::And(ts) => {
                for t in ts {
                    if !t.eval(v)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Term::Or(ts) => {
                for t in ts {
                    if t.eval(v)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Term::Exists(..) | Term::Forall(..) => Err(Error::contract(
                "cannot evaluate a quantified term directly",
            )),
        }
    }

    /// SMT-LIB rendering; all variables have sort `sort`.
    pub fn to_smtlib(&self, sort: Sort) -> String {
        let mut out = String::new();
        self.write_smtlib(sort, &mut out);
        out
    }

    fn write_smtlib(&self, sort: Sort, out: &mut String) {
        let nary = |op: &str, ts: &[Term], out: &mut String| {
            out.push('(');
            out.push_str(op);
            for t in ts {
                out.push(' ');
                t.write_smtlib(sort, out);
            }
            out.push(')');
        };
        match self {
            Term::Bool(true) => out.push_str("true"),
            Term::Bool(false) => out.push_str("false"),
            Term::Lit(l) => out.push_str(&literal_smtlib(l, sort)),
            Term::Not(t) => {
                out.push_str("(not ");
                t.write_smtlib(sort, out);
                out.push(')');
            }
            Term::And(ts) => nary("and", ts, out),
            Term::Or(ts) => nary("or", ts, out),
            Term::Exists(vs, t) | Term::Forall(vs, t) => {
                let q = if matches!(self, Term::Exists(..)) {
                    "exists"
                } else {
                    "forall"
                };
                let binders: Vec<String> = vs
                    .iter()
                    .map(|v| format!("({} {})", symbol(v), sort.smt_name()))
                    .collect();
                out.push_str(&format!("({q} ({}) ", binders.join(" ")));
                t.write_smtlib(sort, out);
                out.push(')');
            }
        }
    }
}

/// Quoted SMT-LIB symbol.
pub fn symbol(name: &str) -> String {
    format!("|{name}|")
}

/// Numeral of the given sort; negatives use the unary minus form.
pub fn numeral(n: &BigInt, sort: Sort) -> String {
    let body = match sort {
        Sort::Int => n.abs().to_string(),
        Sort::Real => format!("{}.0", n.abs()),
    };
    if n.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn literal_smtlib(l: &Literal, sort: Sort) -> String {
    let terms: Vec<String> = l
        .coeffs()
        .iter()
        .map(|(v, c)| {
            if c.is_one() {
                symbol(v)
            } else {
                format!("(* {} {})", numeral(c, sort), symbol(v))
            }
        })
        .collect();
    let lhs = if terms.len() == 1 {
        terms.into_iter().next().expect("one term")
    } else {
        format!("(+ {})", terms.join(" "))
    };
    let rhs = numeral(l.constant(), sort);
    match l.op() {
        RelOp::Lt => format!("(< {lhs} {rhs})"),
        RelOp::Le => format!("(<= {lhs} {rhs})"),
        RelOp::Eq => format!("(= {lhs} {rhs})"),
        RelOp::Ne => format!("(not (= {lhs} {rhs}))"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_literal;
    use crate::theory::Signature;

    fn sig(sort: Sort) -> Signature {
        Signature::new(sort, vec!["x".into()], vec!["y".into()]).unwrap()
    }

    #[test]
    fn renders_literals() {
        let s = sig(Sort::Int);
        let l = parse_literal("y <= x", &s).unwrap();
        assert_eq!(
            Term::Lit(l.clone()).to_smtlib(Sort::Int),
            "(<= (+ (* (- 1) |x|) |y|) 0)"
        );
        let g = parse_literal("y > 1", &s).unwrap();
        assert_eq!(
            Term::Lit(g).to_smtlib(Sort::Real),
            "(< (* (- 1.0) |y|) (- 1.0))"
        );
        let ne = parse_literal("y != 0", &s).unwrap();
        assert_eq!(Term::Lit(ne).to_smtlib(Sort::Int), "(not (= |y| 0))");
    }

    #[test]
    fn quantifiers_and_free_vars() {
        let s = sig(Sort::Int);
        let l = parse_literal("y <= x", &s).unwrap();
        let t = Term::forall(&["y".into()], Term::Lit(l));
        assert_eq!(
            t.to_smtlib(Sort::Int),
            "(forall ((|y| Int)) (<= (+ (* (- 1) |x|) |y|) 0))"
        );
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), ["x"]);
        assert!(!t.is_quantifier_free());
        assert!(t.eval(&Valuation::new()).is_err());
    }
}
