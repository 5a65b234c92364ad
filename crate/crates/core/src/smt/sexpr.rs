//! Minimal reader for solver responses.

use std::fmt;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::theory::{parse_decimal, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    Str(String),
    List(Vec<SExpr>),
}

impl SExpr {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// Reads an exact value from `n`, `d.d`, `(- v)` or `(/ p q)`.
    pub fn to_value(&self) -> Result<Value> {
        self.to_rational().map(Value::from_rational)
    }

    fn to_rational(&self) -> Result<BigRational> {
        let bad = || Error::SolverProtocol(format!("unexpected value `{self}`"));
        match self {
            SExpr::Atom(a) => parse_decimal(a).ok_or_else(bad),
            SExpr::List(items) => match items.as_slice() {
                [SExpr::Atom(op), x] if op == "-" => Ok(-x.to_rational()?),
                [SExpr::Atom(op), p, q] if op == "/" => {
                    let q = q.to_rational()?;
                    if num_traits::Zero::is_zero(&q) {
                        return Err(bad());
                    }
                    Ok(p.to_rational()? / q)
                }
                _ => Err(bad()),
            },
            SExpr::Str(_) => Err(bad()),
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a) => f.write_str(a),
            SExpr::Str(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            SExpr::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Outcome of trying to read one expression from a buffer.
#[derive(Debug, PartialEq, Eq)]
pub enum Parsed {
    /// An expression and the number of bytes consumed.
    Done(SExpr, usize),
    /// More input is needed.
    Incomplete,
    /// Only whitespace so far.
    Empty,
}

/// Parses the first s-expression in `input`.
pub fn parse_one(input: &str) -> Result<Parsed> {
    let bytes = input.as_bytes();
    let mut i = 0;
    let mut stack: Vec<Vec<SExpr>> = Vec::new();
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            return Ok(if stack.is_empty() {
                Parsed::Empty
            } else {
                Parsed::Incomplete
            });
        }
        let item = match bytes[i] {
            b'(' => {
                stack.push(Vec::new());
                i += 1;
                continue;
            }
            b')' => {
                let list = stack.pop().ok_or_else(|| {
                    Error::SolverProtocol("unbalanced `)` in solver output".into())
                })?;
                i += 1;
                SExpr::List(list)
            }
            b'"' => {
                let mut j = i + 1;
                let mut text = String::new();
                loop {
                    if j >= bytes.len() {
                        return Ok(Parsed::Incomplete);
                    }
                    if bytes[j] == b'"' {
                        if bytes.get(j + 1) == Some(&b'"') {
                            text.push('"');
                            j += 2;
                            continue;
                        }
                        break;
                    }
                    let ch = input[j..].chars().next().expect("in bounds");
                    text.push(ch);
                    j += ch.len_utf8();
                }
                i = j + 1;
                SExpr::Str(text)
            }
            b'|' => {
                let Some(end) = input[i + 1..].find('|') else {
                    return Ok(Parsed::Incomplete);
                };
                let sym = input[i + 1..i + 1 + end].to_string();
                i += end + 2;
                SExpr::Atom(sym)
            }
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && !matches!(bytes[i], b'(' | b')' | b'"' | b'|')
                {
                    i += 1;
                }
                if stack.is_empty() && i == bytes.len() {
                    // A bare atom may continue in the next chunk; responses end with a newline.
                    if !input.ends_with(char::is_whitespace) {
                        return Ok(Parsed::Incomplete);
                    }
                }
                SExpr::Atom(input[start..i].to_string())
            }
        };
        match stack.last_mut() {
            Some(top) => top.push(item),
            None => return Ok(Parsed::Done(item, i)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(s: &str) -> SExpr {
        match parse_one(s).unwrap() {
            Parsed::Done(e, _) => e,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn value_forms() {
        assert_eq!(one("4\n").to_value().unwrap(), Value::int(4));
        assert_eq!(one("(- 4)").to_value().unwrap(), Value::int(-4));
        assert_eq!(one("(/ 3 2)").to_value().unwrap(), Value::ratio(3, 2));
        assert_eq!(one("(- (/ 3 2))").to_value().unwrap(), Value::ratio(-3, 2));
        assert_eq!(one("(/ 3.0 2.0)").to_value().unwrap(), Value::ratio(3, 2));
        assert_eq!(one("1.5\n").to_value().unwrap(), Value::ratio(3, 2));
        assert!(one("(root-obj x 1)").to_value().is_err());
    }

    #[test]
    fn incremental_input() {
        assert_eq!(parse_one("((y 2)\n").unwrap(), Parsed::Incomplete);
        assert_eq!(parse_one("   \n").unwrap(), Parsed::Empty);
        assert_eq!(parse_one("sat").unwrap(), Parsed::Incomplete);
        match parse_one("((|y z| (- 3)) (w 1))\nrest").unwrap() {
            Parsed::Done(SExpr::List(items), n) => {
                assert_eq!(items.len(), 2);
                assert_eq!(n, 21);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            one("(error \"line 1: \"\"x\"\" unknown\")"),
            SExpr::List(vec![
                SExpr::Atom("error".into()),
                SExpr::Str("line 1: \"x\" unknown".into())
            ])
        );
        assert!(parse_one(")").is_err());
    }
}
