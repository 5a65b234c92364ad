use num_rational::BigRational;
use num_traits::Zero;

use super::ast::{Formula, SpecAst};
use super::lexer::{tokenize, Tok, Token};
use crate::error::{Error, Result};
use crate::theory::{parse_decimal, CmpOp, Grounded, LinearExpr, Literal, Signature, Sort};

const KEYWORDS: [&str; 4] = ["theory", "env", "sys", "spec"];
const UNSUPPORTED_TEMPORAL: [&str; 4] = ["U", "F", "R", "W"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Atoms are linear comparisons over declared variables.
    Theory,
    /// Atoms are bare propositions.
    Boolean,
}

#[derive(Debug, Clone)]
enum RawAtom {
    Prop(String),
    Cmp {
        lhs: LinearExpr,
        op: CmpOp,
        rhs: LinearExpr,
        line: usize,
        col: usize,
    },
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    mode: Mode,
    sig: Option<&'a Signature>,
    eof: (usize, usize),
}

fn err_at(t: &Token, message: impl Into<String>) -> Error {
    Error::Parse {
        line: t.line,
        col: t.col,
        message: message.into(),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&'a Tok> {
        self.peek().map(|t| &t.tok)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        match self.peek() {
            Some(t) => err_at(t, message),
            None => Error::Parse {
                line: self.eof.0,
                col: self.eof.1,
                message: message.into(),
            },
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        match self.peek() {
            Some(t) if t.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(Token {
                tok: Tok::Ident(name),
                ..
            }) if UNSUPPORTED_TEMPORAL.contains(&name.as_str()) => Err(self.trailing_error()),
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn trailing_error(&self) -> Error {
        match self.peek() {
            Some(t @ Token { tok: Tok::Ident(name), .. })
                if UNSUPPORTED_TEMPORAL.contains(&name.as_str()) =>
            {
                err_at(
                    t,
                    format!("unsupported fragment: temporal operator `{name}` is outside the safety fragment (only G and X are supported)"),
                )
            }
            _ => self.error_here("unexpected trailing input"),
        }
    }

    // formula := iff
    fn formula(&mut self) -> Result<Formula<RawAtom>> {
        let lhs = self.implication()?;
        if self.peek_tok() == Some(&Tok::Iff) {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula<RawAtom>> {
        let lhs = self.disjunction()?;
        if self.peek_tok() == Some(&Tok::Implies) {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula<RawAtom>> {
        let mut lhs = self.conjunction()?;
        while self.peek_tok() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula<RawAtom>> {
        let mut lhs = self.unary()?;
        while self.peek_tok() == Some(&Tok::And) {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula<RawAtom>> {
        let Some(t) = self.peek() else {
            return Err(self.error_here("unexpected end of formula"));
        };
        match &t.tok {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(name) if name == "G" => {
                self.bump();
                Ok(Formula::globally(self.unary()?))
            }
            Tok::Ident(name) if name == "X" => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Tok::Ident(name) if UNSUPPORTED_TEMPORAL.contains(&name.as_str()) => Err(err_at(
                t,
                format!("unsupported fragment: temporal operator `{name}` is outside the safety fragment (only G and X are supported)"),
            )),
            Tok::Ident(name) if name == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(name) if name == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) if KEYWORDS.contains(&name.as_str()) => {
                Err(err_at(t, format!("unexpected keyword `{name}` in formula")))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula<RawAtom>> {
        match self.mode {
            Mode::Boolean => {
                let t = self
                    .bump()
                    .ok_or_else(|| self.error_here("unexpected end of formula"))?;
                match &t.tok {
                    Tok::Ident(name) => Ok(Formula::Atom(RawAtom::Prop(name.clone()))),
                    Tok::LParen => {
                        let f = self.formula()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(f)
                    }
                    other => Err(err_at(t, format!("unexpected token {other:?}"))),
                }
            }
            Mode::Theory => {
                // `(` opens either an arithmetic group or a parenthesized formula;
                // try the comparison first and fall back.
                let save = self.pos;
                match self.comparison() {
                    Ok(atom) => Ok(Formula::Atom(atom)),
                    Err(atom_err) => {
                        self.pos = save;
                        if self.peek_tok() == Some(&Tok::LParen) {
                            self.bump();
                            let f = self.formula()?;
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(f)
                        } else {
                            Err(atom_err)
                        }
                    }
                }
            }
        }
    }

    fn comparison(&mut self) -> Result<RawAtom> {
        let start = self.peek().map(|t| (t.line, t.col)).unwrap_or(self.eof);
        let lhs = self.arith()?;
        let op = match self.peek_tok() {
            Some(Tok::Lt) => CmpOp::Lt,
            Some(Tok::Le) => CmpOp::Le,
            Some(Tok::Gt) => CmpOp::Gt,
            Some(Tok::Ge) => CmpOp::Ge,
            Some(Tok::Eq) => CmpOp::Eq,
            Some(Tok::Ne) => CmpOp::Ne,
            _ => return Err(self.error_here("expected comparison operator")),
        };
        self.bump();
        let rhs = self.arith()?;
        Ok(RawAtom::Cmp {
            lhs,
            op,
            rhs,
            line: start.0,
            col: start.1,
        })
    }

    fn arith(&mut self) -> Result<LinearExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek_tok() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.add(&rhs);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.add(&rhs.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LinearExpr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek_tok() {
                Some(Tok::Star) => {
                    let t = self.bump().expect("peeked");
                    let rhs = self.factor()?;
                    acc = if acc.is_constant() {
                        rhs.scale(&acc.constant)
                    } else if rhs.is_constant() {
                        acc.scale(&rhs.constant)
                    } else {
                        return Err(err_at(t, "nonlinear term: product of two variables"));
                    };
                }
                Some(Tok::Slash) => {
                    let t = self.bump().expect("peeked");
                    let rhs = self.factor()?;
                    if !rhs.is_constant() || rhs.constant.is_zero() {
                        return Err(err_at(t, "division is only allowed by a nonzero constant"));
                    }
                    acc = acc.scale(&(BigRational::from_integer(1.into()) / &rhs.constant));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<LinearExpr> {
        let t = self
            .bump()
            .ok_or_else(|| self.error_here("unexpected end of expression"))?;
        match &t.tok {
            Tok::Minus => Ok(self.factor()?.neg()),
            Tok::Number(text) => {
                let value = parse_decimal(text)
                    .ok_or_else(|| err_at(t, format!("malformed number `{text}`")))?;
                if let Some(sig) = self.sig {
                    if sig.sort == Sort::Int && text.contains('.') {
                        return Err(Error::MixedSorts {
                            line: t.line,
                            col: t.col,
                            message: format!("decimal constant `{text}` in an Int specification"),
                        });
                    }
                }
                Ok(LinearExpr::constant(value))
            }
            Tok::Ident(name) => {
                if KEYWORDS.contains(&name.as_str())
                    || ["G", "X", "true", "false"].contains(&name.as_str())
                    || UNSUPPORTED_TEMPORAL.contains(&name.as_str())
                {
                    return Err(err_at(t, format!("`{name}` is not a variable")));
                }
                if let Some(sig) = self.sig {
                    if !sig.is_declared(name) {
                        return Err(Error::UndeclaredVariable {
                            line: t.line,
                            col: t.col,
                            name: name.clone(),
                        });
                    }
                }
                Ok(LinearExpr::var(name.clone()))
            }
            Tok::LParen => {
                let e = self.arith()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            other => Err(err_at(
                t,
                format!("unexpected token {other:?} in expression"),
            )),
        }
    }
}

fn eof_position(text: &str) -> (usize, usize) {
    let line = text.lines().count().max(1);
    let col = text
        .lines()
        .last()
        .map(|l| l.chars().count() + 1)
        .unwrap_or(1);
    (line, col)
}

fn lower_theory(f: Formula<RawAtom>) -> Result<Formula<Literal>> {
    let rec = |g: Box<Formula<RawAtom>>| lower_theory(*g).map(Box::new);
    Ok(match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(RawAtom::Prop(p)) => {
            return Err(Error::contract(format!(
                "bare proposition `{p}` in theory formula"
            )))
        }
        Formula::Atom(RawAtom::Cmp {
            lhs,
            op,
            rhs,
            line,
            col,
        }) => match Literal::compare(&lhs, op, &rhs) {
            Grounded::Residual(l) => Formula::Atom(l),
            Grounded::Truth(_) => {
                return Err(Error::Parse {
                    line,
                    col,
                    message: "comparison mentions no variable".into(),
                })
            }
        },
        Formula::Not(g) => Formula::Not(rec(g)?),
        Formula::Next(g) => Formula::Next(rec(g)?),
        Formula::Globally(g) => Formula::Globally(rec(g)?),
        Formula::And(a, b) => Formula::And(rec(a)?, rec(b)?),
        Formula::Or(a, b) => Formula::Or(rec(a)?, rec(b)?),
        Formula::Implies(a, b) => Formula::Implies(rec(a)?, rec(b)?),
        Formula::Iff(a, b) => Formula::Iff(rec(a)?, rec(b)?),
    })
}

fn lower_boolean(f: Formula<RawAtom>) -> Formula<String> {
    let rec = |g: Box<Formula<RawAtom>>| Box::new(lower_boolean(*g));
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(RawAtom::Prop(p)) => Formula::Atom(p),
        Formula::Atom(RawAtom::Cmp { .. }) => unreachable!("boolean mode yields propositions"),
        Formula::Not(g) => Formula::Not(rec(g)),
        Formula::Next(g) => Formula::Next(rec(g)),
        Formula::Globally(g) => Formula::Globally(rec(g)),
        Formula::And(a, b) => Formula::And(rec(a), rec(b)),
        Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
        Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
        Formula::Iff(a, b) => Formula::Iff(rec(a), rec(b)),
    }
}

fn is_keyword(t: &Token) -> Option<&str> {
    match &t.tok {
        Tok::Ident(name) if KEYWORDS.contains(&name.as_str()) => Some(name.as_str()),
        _ => None,
    }
}

/// Parses a specification file.
///
/// ```text
/// theory Int
/// env x
/// sys y
/// spec G(((x < 2) -> X(y > 1)) & ((x >= 2) -> (y < x)))
/// ```
pub fn parse_spec(text: &str) -> Result<SpecAst> {
    let toks = tokenize(text)?;
    let eof = eof_position(text);

    // Split into statements at keywords.
    let mut statements: Vec<(&Token, &[Token])> = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        if is_keyword(&toks[i]).is_none() {
            return Err(err_at(
                &toks[i],
                "expected `theory`, `env`, `sys` or `spec`",
            ));
        }
        let mut j = i + 1;
        while j < toks.len() && is_keyword(&toks[j]).is_none() {
            j += 1;
        }
        statements.push((&toks[i], &toks[i + 1..j]));
        i = j;
    }

    let mut sort: Option<Sort> = None;
    let mut env_vars = Vec::new();
    let mut sys_vars = Vec::new();
    let mut specs = Vec::new();
    for (kw, body) in &statements {
        match is_keyword(kw).expect("statement keyword") {
            "theory" => {
                let name = match body {
                    [Token {
                        tok: Tok::Ident(n), ..
                    }] => n,
                    _ => return Err(err_at(kw, "expected `theory Int` or `theory Real`")),
                };
                let parsed = match name.as_str() {
                    "Int" => Sort::Int,
                    "Real" => Sort::Real,
                    other => return Err(err_at(&body[0], format!("unknown theory `{other}`"))),
                };
                if sort.is_some_and(|s| s != parsed) {
                    return Err(Error::MixedSorts {
                        line: kw.line,
                        col: kw.col,
                        message: "conflicting theory declarations".into(),
                    });
                }
                sort = Some(parsed);
            }
            "env" | "sys" => {
                let target = if is_keyword(kw) == Some("env") {
                    &mut env_vars
                } else {
                    &mut sys_vars
                };
                let mut expect_name = true;
                for t in body.iter() {
                    match (&t.tok, expect_name) {
                        (Tok::Ident(n), true) => {
                            if ["G", "X", "true", "false"].contains(&n.as_str())
                                || UNSUPPORTED_TEMPORAL.contains(&n.as_str())
                            {
                                return Err(err_at(t, format!("`{n}` is reserved")));
                            }
                            target.push(n.clone());
                            expect_name = false;
                        }
                        (Tok::Comma, false) => expect_name = true,
                        (Tok::Ident(n), false) => {
                            target.push(n.clone());
                        }
                        _ => return Err(err_at(t, "expected variable name")),
                    }
                }
                if body.is_empty() || expect_name {
                    return Err(err_at(kw, "expected variable name"));
                }
            }
            "spec" => specs.push((*kw, *body)),
            _ => unreachable!(),
        }
    }

    let sort = sort.ok_or(Error::Parse {
        line: 1,
        col: 1,
        message: "missing `theory` declaration".into(),
    })?;
    let signature = Signature::new(sort, env_vars, sys_vars).map_err(|e| Error::Parse {
        line: 1,
        col: 1,
        message: e.to_string(),
    })?;
    if specs.is_empty() {
        return Err(Error::Parse {
            line: eof.0,
            col: eof.1,
            message: "missing `spec` statement".into(),
        });
    }

    let mut formula: Option<Formula<Literal>> = None;
    for (kw, body) in specs {
        if body.is_empty() {
            return Err(err_at(kw, "empty spec"));
        }
        let mut p = Parser {
            toks: body,
            pos: 0,
            mode: Mode::Theory,
            sig: Some(&signature),
            eof,
        };
        let raw = p.formula()?;
        if !p.at_end() {
            return Err(p.trailing_error());
        }
        let f = lower_theory(raw)?;
        formula = Some(match formula {
            None => f,
            Some(prev) => Formula::and(prev, f),
        });
    }

    Ok(SpecAst {
        signature,
        formula: formula.expect("at least one spec"),
    })
}

/// Parses a purely Boolean LTL formula (atoms are identifiers).
pub fn parse_boolean_ltl(text: &str) -> Result<Formula<String>> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        mode: Mode::Boolean,
        sig: None,
        eof: eof_position(text),
    };
    let f = p.formula()?;
    if !p.at_end() {
        return Err(p.trailing_error());
    }
    Ok(lower_boolean(f))
}

/// Parses a single comparison such as `-1*x + 1*y <= 0` against a signature.
pub fn parse_literal(text: &str, sig: &Signature) -> Result<Literal> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        mode: Mode::Theory,
        sig: Some(sig),
        eof: eof_position(text),
    };
    let atom = p.comparison()?;
    if !p.at_end() {
        return Err(p.error_here("unexpected trailing input"));
    }
    match lower_theory(Formula::Atom(atom))? {
        Formula::Atom(l) => Ok(l),
        _ => unreachable!(),
    }
}
