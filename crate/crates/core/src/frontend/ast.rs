use std::fmt;

use crate::theory::{Literal, Signature};

/// LTL formula over atoms of type `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula<A> {
    True,
    False,
    Atom(A),
    Not(Box<Formula<A>>),
    And(Box<Formula<A>>, Box<Formula<A>>),
    Or(Box<Formula<A>>, Box<Formula<A>>),
    Implies(Box<Formula<A>>, Box<Formula<A>>),
    Iff(Box<Formula<A>>, Box<Formula<A>>),
    Next(Box<Formula<A>>),
    Globally(Box<Formula<A>>),
}

impl<A> Formula<A> {
    pub fn not(f: Formula<A>) -> Self {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }
    pub fn next(f: Formula<A>) -> Self {
        Formula::Next(Box::new(f))
    }
    pub fn globally(f: Formula<A>) -> Self {
        Formula::Globally(Box::new(f))
    }

    /// Atoms in left-to-right textual order, duplicates included.
    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a A>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.push(a),
            Formula::Not(f) | Formula::Next(f) | Formula::Globally(f) => f.collect_atoms(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Fully parenthesized rendering; `atom` renders one atom.
    pub fn render_with(&self, atom: &dyn Fn(&A) -> String) -> String {
        let bin = |a: &Formula<A>, op: &str, b: &Formula<A>| {
            format!("({} {op} {})", a.render_with(atom), b.render_with(atom))
        };
        match self {
            Formula::True => "true".into(),
            Formula::False => "false".into(),
            Formula::Atom(a) => atom(a),
            Formula::Not(f) => format!("!({})", f.render_with(atom)),
            Formula::Next(f) => format!("X({})", f.render_with(atom)),
            Formula::Globally(f) => format!("G({})", f.render_with(atom)),
            Formula::And(a, b) => bin(a, "&", b),
            Formula::Or(a, b) => bin(a, "|", b),
            Formula::Implies(a, b) => bin(a, "->", b),
            Formula::Iff(a, b) => bin(a, "<->", b),
        }
    }
}

impl fmt::Display for Formula<String> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&|a: &String| a.clone()))
    }
}

impl fmt::Display for Formula<Literal> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&|l: &Literal| format!("({l})")))
    }
}

/// A parsed specification file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecAst {
    pub signature: Signature,
    pub formula: Formula<Literal>,
}

impl SpecAst {
    /// Renders the specification back to the input file format.
    pub fn render(&self) -> String {
        let sig = &self.signature;
        let mut out = format!("theory {}\n", sig.sort);
        for v in &sig.env_vars {
            out.push_str(&format!("env {v}\n"));
        }
        for v in &sig.sys_vars {
            out.push_str(&format!("sys {v}\n"));
        }
        out.push_str(&format!("spec {}\n", self.formula));
        out
    }
}
