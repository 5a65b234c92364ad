use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Signature, Valuation};
use crate::error::{Error, Result};

/// Comparison operators accepted from the surface syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, lhs: &BigRational, rhs: &BigRational) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

/// Relational operators that survive canonicalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelOp {
    Lt,
    Le,
    Eq,
    Ne,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Eq => "=",
            RelOp::Ne => "!=",
        }
    }

    fn as_cmp(self) -> CmpOp {
        match self {
            RelOp::Lt => CmpOp::Lt,
            RelOp::Le => CmpOp::Le,
            RelOp::Eq => CmpOp::Eq,
            RelOp::Ne => CmpOp::Ne,
        }
    }
}

/// A linear expression `sum(coeff * var) + constant` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearExpr {
    pub coeffs: BTreeMap<String, BigRational>,
    pub constant: BigRational,
}

impl LinearExpr {
    pub fn constant(c: BigRational) -> Self {
        LinearExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), BigRational::one());
        LinearExpr {
            coeffs,
            constant: BigRational::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.values().all(Zero::is_zero)
    }

    pub fn add(mut self, other: &LinearExpr) -> Self {
        for (v, c) in &other.coeffs {
            *self
                .coeffs
                .entry(v.clone())
                .or_insert_with(BigRational::zero) += c;
        }
        self.constant += &other.constant;
        self.coeffs.retain(|_, c| !c.is_zero());
        self
    }

    pub fn scale(mut self, k: &BigRational) -> Self {
        for c in self.coeffs.values_mut() {
            *c *= k;
        }
        self.constant *= k;
        self.coeffs.retain(|_, c| !c.is_zero());
        self
    }

    pub fn neg(self) -> Self {
        self.scale(&-BigRational::one())
    }
}

/// Result of comparing two linear expressions, or of grounding a literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Grounded {
    Truth(bool),
    Residual(Literal),
}

/// A canonical linear-arithmetic atom `sum(coeff * var) op constant`.
///
/// Canonical form: integer coefficients and constant with joint gcd 1,
/// `op` one of `<`, `<=`, `=`, `!=` (so `>`/`>=` atoms are stored with both
/// sides negated), and for `=`/`!=` the first coefficient in variable-name
/// order is positive. Equivalent atoms up to these rewrites compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    coeffs: BTreeMap<String, BigInt>,
    constant: BigInt,
    op: RelOp,
}

impl Literal {
    /// Builds the canonical atom for `lhs op rhs`.
    pub fn compare(lhs: &LinearExpr, op: CmpOp, rhs: &LinearExpr) -> Grounded {
        let diff = lhs.clone().add(&rhs.clone().neg());
        // sum(coeffs) + k op 0  ==>  sum(coeffs) op -k
        Self::canonical(diff.coeffs, op, -diff.constant)
    }

    /// Shorthand for `var op value`.
    pub fn var_cmp(var: &str, op: CmpOp, value: &BigRational) -> Literal {
        match Self::canonical(
            [(var.to_string(), BigRational::one())]
                .into_iter()
                .collect(),
            op,
            value.clone(),
        ) {
            Grounded::Residual(l) => l,
            Grounded::Truth(_) => unreachable!("variable coefficient is one"),
        }
    }

    fn canonical(
        coeffs: BTreeMap<String, BigRational>,
        op: CmpOp,
        constant: BigRational,
    ) -> Grounded {
        let mut coeffs: BTreeMap<String, BigRational> =
            coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if coeffs.is_empty() {
            return Grounded::Truth(op.holds(&BigRational::zero(), &constant));
        }
        let mut constant = constant;
        let op = match op {
            CmpOp::Gt | CmpOp::Ge => {
                for c in coeffs.values_mut() {
                    *c = -c.clone();
                }
                constant = -constant;
                if op == CmpOp::Gt {
                    RelOp::Lt
                } else {
                    RelOp::Le
                }
            }
            CmpOp::Lt => RelOp::Lt,
            CmpOp::Le => RelOp::Le,
            CmpOp::Eq => RelOp::Eq,
            CmpOp::Ne => RelOp::Ne,
        };

        let lcm = coeffs
            .values()
            .chain(std::iter::once(&constant))
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scale = |r: &BigRational| (r * BigRational::from_integer(lcm.clone())).to_integer();
        let mut int_coeffs: BTreeMap<String, BigInt> =
            coeffs.iter().map(|(v, c)| (v.clone(), scale(c))).collect();
        let mut int_const = scale(&constant);

        let gcd = int_coeffs
            .values()
            .chain(std::iter::once(&int_const))
            .fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !gcd.is_one() {
            for c in int_coeffs.values_mut() {
                *c /= &gcd;
            }
            int_const /= &gcd;
        }

        if matches!(op, RelOp::Eq | RelOp::Ne) {
            let first_negative = int_coeffs.values().next().is_some_and(|c| c.is_negative());
            if first_negative {
                for c in int_coeffs.values_mut() {
                    *c = -c.clone();
                }
                int_const = -int_const;
            }
        }

        Grounded::Residual(Literal {
            coeffs: int_coeffs,
            constant: int_const,
            op,
        })
    }

    pub fn op(&self) -> RelOp {
        self.op
    }

    pub fn constant(&self) -> &BigInt {
        &self.constant
    }

    pub fn coeffs(&self) -> &BTreeMap<String, BigInt> {
        &self.coeffs
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(String::as_str)
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.coeffs.contains_key(var)
    }

    /// The canonical complement: `<` and `>=` swap, `<=` and `>` swap,
    /// `=` and `!=` swap.
    pub fn negate(&self) -> Literal {
        match self.op {
            RelOp::Eq | RelOp::Ne => Literal {
                coeffs: self.coeffs.clone(),
                constant: self.constant.clone(),
                op: if self.op == RelOp::Eq {
                    RelOp::Ne
                } else {
                    RelOp::Eq
                },
            },
            RelOp::Lt | RelOp::Le => Literal {
                coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), -c)).collect(),
                constant: -&self.constant,
                op: if self.op == RelOp::Lt {
                    RelOp::Le
                } else {
                    RelOp::Lt
                },
            },
        }
    }

    /// Same literal with polarity applied: `self` when `positive`, else its negation.
    pub fn with_polarity(&self, positive: bool) -> Literal {
        if positive {
            self.clone()
        } else {
            self.negate()
        }
    }

    /// Substitutes the environment variables of `sig` by their values in `env`.
    pub fn ground(&self, sig: &Signature, env: &Valuation) -> Result<Grounded> {
        let mut residual = BTreeMap::new();
        let mut rhs = BigRational::from_integer(self.constant.clone());
        for (var, coeff) in &self.coeffs {
            let coeff = BigRational::from_integer(coeff.clone());
            if sig.is_env(var) {
                let value = env.get(var).ok_or_else(|| {
                    Error::contract(format!("env valuation lacks variable `{var}`"))
                })?;
                rhs -= coeff * value.as_rational();
            } else {
                residual.insert(var.clone(), coeff);
            }
        }
        Ok(Self::canonical(residual, self.op.as_cmp(), rhs))
    }

    /// Exact truth value under a valuation covering every variable of the literal.
    pub fn eval(&self, full: &Valuation) -> Result<bool> {
        let mut lhs = BigRational::zero();
        for (var, coeff) in &self.coeffs {
            let value = full
                .get(var)
                .ok_or_else(|| Error::contract(format!("valuation lacks variable `{var}`")))?;
            lhs += BigRational::from_integer(coeff.clone()) * value.as_rational();
        }
        Ok(self
            .op
            .as_cmp()
            .holds(&lhs, &BigRational::from_integer(self.constant.clone())))
    }

    /// Human-oriented rendering that undoes the sign flip of `>`/`>=` atoms,
    /// e.g. `y > 1` instead of `-1*y < -1`.
    pub fn pretty(&self) -> String {
        let all_negative = self.coeffs.values().all(|c| c.is_negative());
        let (coeffs, constant, op): (Vec<(&String, BigInt)>, BigInt, &str) =
            if all_negative && matches!(self.op, RelOp::Lt | RelOp::Le) {
                let op = if self.op == RelOp::Lt { ">" } else { ">=" };
                (
                    self.coeffs.iter().map(|(v, c)| (v, -c)).collect(),
                    -&self.constant,
                    op,
                )
            } else {
                (
                    self.coeffs.iter().map(|(v, c)| (v, c.clone())).collect(),
                    self.constant.clone(),
                    self.op.symbol(),
                )
            };
        let mut out = String::new();
        for (i, (var, c)) in coeffs.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if !mag.is_one() {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(var);
        }
        format!("{out} {op} {constant}")
    }
}

/// Canonical text, e.g. `-1*x + 1*y <= 0`. Terms follow variable-name order.
impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(v, c)| format!("{c}*{v}"))
            .collect();
        write!(
            f,
            "{} {} {}",
            terms.join(" + "),
            self.op.symbol(),
            self.constant
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{Sort, Value};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn lit(lhs: LinearExpr, op: CmpOp, rhs: LinearExpr) -> Literal {
        match Literal::compare(&lhs, op, &rhs) {
            Grounded::Residual(l) => l,
            Grounded::Truth(_) => panic!("constant atom"),
        }
    }

    fn x() -> LinearExpr {
        LinearExpr::var("x")
    }
    fn y() -> LinearExpr {
        LinearExpr::var("y")
    }
    fn k(n: i64) -> LinearExpr {
        LinearExpr::constant(q(n))
    }

    fn sig() -> Signature {
        Signature::new(Sort::Int, vec!["x".into()], vec!["y".into()]).unwrap()
    }

    fn val(pairs: &[(&str, i64)]) -> Valuation {
        pairs
            .iter()
            .map(|(n, v)| (n.to_string(), Value::int(*v)))
            .collect()
    }

    #[test]
    fn canonical_text() {
        assert_eq!(lit(y(), CmpOp::Le, x()).to_string(), "-1*x + 1*y <= 0");
        assert_eq!(lit(y(), CmpOp::Gt, k(1)).to_string(), "-1*y < -1");
        assert_eq!(lit(x(), CmpOp::Lt, k(2)).to_string(), "1*x < 2");
        assert_eq!(lit(y(), CmpOp::Gt, k(1)).pretty(), "y > 1");
    }

    #[test]
    fn syntactic_variants_unify() {
        let a = lit(y(), CmpOp::Lt, x());
        let b = lit(x(), CmpOp::Gt, y());
        let c = lit(y().scale(&q(3)), CmpOp::Lt, x().scale(&q(3)));
        assert_eq!(a, b);
        assert_eq!(a, c);
        let e1 = lit(x(), CmpOp::Eq, y().add(&k(2)));
        let e2 = lit(y().add(&k(2)), CmpOp::Eq, x());
        assert_eq!(e1, e2);
    }

    #[test]
    fn rational_constants_are_cleared() {
        let half = LinearExpr::constant(BigRational::new(3.into(), 2.into()));
        assert_eq!(lit(y(), CmpOp::Lt, half).to_string(), "2*y < 3");
    }

    #[test]
    fn negation_table() {
        let y_gt_1 = lit(y(), CmpOp::Gt, k(1));
        assert_eq!(y_gt_1.negate(), lit(y(), CmpOp::Le, k(1)));
        let x_lt_2 = lit(x(), CmpOp::Lt, k(2));
        assert_eq!(x_lt_2.negate().negate(), x_lt_2);
        assert_eq!(x_lt_2.negate(), lit(x(), CmpOp::Ge, k(2)));
        let y_eq_0 = lit(y(), CmpOp::Eq, k(0));
        assert_eq!(y_eq_0.negate(), lit(y(), CmpOp::Ne, k(0)));
    }

    #[test]
    fn grounding() {
        let s = sig();
        let y_le_x = lit(y(), CmpOp::Le, x());
        assert_eq!(
            y_le_x.ground(&s, &val(&[("x", 4)])).unwrap(),
            Grounded::Residual(lit(y(), CmpOp::Le, k(4)))
        );
        let x_lt_2 = lit(x(), CmpOp::Lt, k(2));
        assert_eq!(
            x_lt_2.ground(&s, &val(&[("x", 4)])).unwrap(),
            Grounded::Truth(false)
        );
        let y_gt_1 = lit(y(), CmpOp::Gt, k(1));
        assert_eq!(
            y_gt_1.ground(&s, &val(&[("x", 0)])).unwrap(),
            Grounded::Residual(y_gt_1.clone())
        );
        assert!(matches!(
            y_le_x.ground(&s, &val(&[])),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn evaluation() {
        assert!(lit(x(), CmpOp::Lt, k(2)).eval(&val(&[("x", 0)])).unwrap());
        let y_gt_1 = lit(y(), CmpOp::Gt, k(1));
        let y_lt_2 = lit(y(), CmpOp::Lt, k(2));
        for v in [1, 2] {
            let a = val(&[("y", v)]);
            assert!(!(y_gt_1.eval(&a).unwrap() && y_lt_2.eval(&a).unwrap()));
        }
        assert!(lit(y(), CmpOp::Le, x())
            .eval(&val(&[("x", 4), ("y", 2)]))
            .unwrap());
        assert!(lit(y(), CmpOp::Le, x()).eval(&val(&[("x", 4)])).is_err());
    }
}
