//! Exact coefficient arithmetic.
//!
//! The coefficient field of an algebra is fixed at construction: either the
//! rationals, or univariate rational functions in a single symbolic parameter
//! (a central charge or a level). [`BaseScalar`] covers both; values are kept
//! in a unique canonical form so equality is plain structural comparison.
//! [`LinearForm`] is a strictly homogeneous linear combination of deformation
//! unknowns with `BaseScalar` coefficients.

pub mod linform;
pub mod poly;

pub use linform::{LinearForm, UnknownId};
pub use poly::{factorial, gen_binomial, rat, rat_int, render_rat, Poly, Rat};

use num_traits::{One, Zero};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parameter mismatch: {0} vs {1}")]
    ParameterMismatch(String, String),
    #[error("pole at value: denominator vanishes at {0}")]
    PoleAtValue(String),
    #[error("value is not a plain rational")]
    NotRational,
}

/// Rational function num/den in one named parameter.
///
/// Canonical form: den nonzero and monic, gcd(num, den) = 1. A constant
/// function never survives as a `RationalFunction`: [`BaseScalar::fun`]
/// collapses it to a plain rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    pub param: Arc<str>,
    pub num: Poly,
    pub den: Poly,
}

impl RationalFunction {
    fn reduced(param: Arc<str>, num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RationalFunction {
                param,
                num: Poly::zero(),
                den: Poly::one(),
            });
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lead = den.leading();
        let inv = Rat::one() / lead;
        Ok(RationalFunction {
            param,
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }
}

/// An element of the coefficient field: exact rational, or rational function
/// in the algebra's single symbolic parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BaseScalar {
    Rat(Rat),
    Fun(RationalFunction),
}

impl BaseScalar {
    pub fn zero() -> Self {
        BaseScalar::Rat(Rat::zero())
    }

    pub fn one() -> Self {
        BaseScalar::Rat(Rat::one())
    }

    pub fn from_int(n: i64) -> Self {
        BaseScalar::Rat(rat_int(n))
    }

    pub fn from_rat(r: Rat) -> Self {
        BaseScalar::Rat(r)
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        BaseScalar::Rat(rat(n, d))
    }

    /// The parameter itself, as a scalar.
    pub fn param(name: &str) -> Self {
        BaseScalar::Fun(RationalFunction {
            param: Arc::from(name),
            num: Poly::x(),
            den: Poly::one(),
        })
    }

    /// Builds num/den, collapsing constants to plain rationals.
    pub fn fun(param: Arc<str>, num: Poly, den: Poly) -> Result<Self, ScalarError> {
        let f = RationalFunction::reduced(param, num, den)?;
        if let (Some(n), Some(d)) = (f.num.as_constant(), f.den.as_constant()) {
            return Ok(BaseScalar::Rat(n / d));
        }
        Ok(BaseScalar::Fun(f))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BaseScalar::Rat(r) => r.is_zero(),
            BaseScalar::Fun(_) => false,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, BaseScalar::Rat(r) if r.is_one())
    }

    pub fn param_name(&self) -> Option<&str> {
        match self {
            BaseScalar::Rat(_) => None,
            BaseScalar::Fun(f) => Some(&f.param),
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            BaseScalar::Rat(r) => Some(r),
            BaseScalar::Fun(_) => None,
        }
    }

    fn as_fun(&self, param: &Arc<str>) -> RationalFunction {
        match self {
            BaseScalar::Rat(r) => RationalFunction {
                param: param.clone(),
                num: Poly::constant(r.clone()),
                den: Poly::one(),
            },
            BaseScalar::Fun(f) => f.clone(),
        }
    }

    fn common_param(&self, other: &Self) -> Result<Option<Arc<str>>, ScalarError> {
        match (self, other) {
            (BaseScalar::Rat(_), BaseScalar::Rat(_)) => Ok(None),
            (BaseScalar::Fun(f), BaseScalar::Rat(_)) => Ok(Some(f.param.clone())),
            (BaseScalar::Rat(_), BaseScalar::Fun(g)) => Ok(Some(g.param.clone())),
            (BaseScalar::Fun(f), BaseScalar::Fun(g)) => {
                if f.param == g.param {
                    Ok(Some(f.param.clone()))
                } else {
                    Err(ScalarError::ParameterMismatch(
                        f.param.to_string(),
                        g.param.to_string(),
                    ))
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("parameter mismatch in add")
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ScalarError> {
        match self.common_param(other)? {
            None => {
                let (BaseScalar::Rat(a), BaseScalar::Rat(b)) = (self, other) else {
                    unreachable!()
                };
                Ok(BaseScalar::Rat(a + b))
            }
            Some(p) => {
                let a = self.as_fun(&p);
                let b = other.as_fun(&p);
                let num = &(&a.num * &b.den) + &(&b.num * &a.den);
                let den = &a.den * &b.den;
                BaseScalar::fun(p, num, den)
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        match self {
            BaseScalar::Rat(r) => BaseScalar::Rat(-r),
            BaseScalar::Fun(f) => BaseScalar::Fun(RationalFunction {
                param: f.param.clone(),
                num: -&f.num,
                den: f.den.clone(),
            }),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("parameter mismatch in mul")
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        if self.is_zero() || other.is_zero() {
            return Ok(BaseScalar::zero());
        }
        match self.common_param(other)? {
            None => {
                let (BaseScalar::Rat(a), BaseScalar::Rat(b)) = (self, other) else {
                    unreachable!()
                };
                Ok(BaseScalar::Rat(a * b))
            }
            Some(p) => {
                let a = self.as_fun(&p);
                let b = other.as_fun(&p);
                BaseScalar::fun(p, &a.num * &b.num, &a.den * &b.den)
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        self.try_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        match self {
            BaseScalar::Rat(r) => {
                if r.is_zero() {
                    Err(ScalarError::DivisionByZero)
                } else {
                    Ok(BaseScalar::Rat(Rat::one() / r))
                }
            }
            BaseScalar::Fun(f) => {
                BaseScalar::fun(f.param.clone(), f.den.clone(), f.num.clone())
            }
        }
    }

    pub fn scale_rat(&self, k: &Rat) -> Self {
        self.mul(&BaseScalar::Rat(k.clone()))
    }

    /// Exact evaluation at a numeric parameter value.
    pub fn specialize(&self, value: &Rat) -> Result<Rat, ScalarError> {
        match self {
            BaseScalar::Rat(r) => Ok(r.clone()),
            BaseScalar::Fun(f) => {
                let den = f.den.eval(value);
                if den.is_zero() {
                    return Err(ScalarError::PoleAtValue(render_rat(value)));
                }
                Ok(f.num.eval(value) / den)
            }
        }
    }

    /// Renders with enough parentheses to embed as a `scalar*monomial` factor.
    pub fn render_factor(&self) -> String {
        match self {
            BaseScalar::Rat(r) => render_rat(r),
            BaseScalar::Fun(f) => {
                // display with a primitive integer denominator
                let k = f.den.primitivizer();
                let num = f.num.scale(&k);
                let den = f.den.scale(&k);
                if den.as_constant().is_some_and(|c| c.is_one()) {
                    format!("({})", num.render(&f.param))
                } else {
                    format!("({})/({})", num.render(&f.param), den.render(&f.param))
                }
            }
        }
    }
}

impl fmt::Display for BaseScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_factor())
    }
}

/// Field operation dispatch with full error reporting.
pub fn field_arith(a: &BaseScalar, b: &BaseScalar, op: FieldOp) -> Result<BaseScalar, ScalarError> {
    match op {
        FieldOp::Add => a.try_add(b),
        FieldOp::Sub => a.try_add(&b.neg()),
        FieldOp::Mul => a.try_mul(b),
        FieldOp::Div => a.div(b),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> BaseScalar {
        BaseScalar::param("c")
    }

    #[test]
    fn rational_arithmetic() {
        let a = BaseScalar::ratio(1, 2);
        let b = BaseScalar::ratio(1, 3);
        assert_eq!(a.add(&b), BaseScalar::ratio(5, 6));
    }

    #[test]
    fn cancellation_to_canonical_form() {
        // (c/(22+5c)) * (22+5c) = c
        let d = BaseScalar::from_int(22).add(&BaseScalar::from_int(5).mul(&c()));
        let f = c().div(&d).unwrap();
        assert_eq!(f.mul(&d), c());
    }

    #[test]
    fn division_by_specialized_pole() {
        // denominator 22+5c vanishes at c = -22/5
        let d = BaseScalar::from_int(22).add(&BaseScalar::from_int(5).mul(&c()));
        let spec = d.specialize(&rat(-22, 5)).unwrap();
        assert!(spec.is_zero());
        let one = BaseScalar::one();
        assert_eq!(
            one.div(&BaseScalar::Rat(spec)),
            Err(ScalarError::DivisionByZero)
        );
    }

    #[test]
    fn specialize_values() {
        // 32/(22+5c) at c = 2 -> 1
        let d = BaseScalar::from_int(22).add(&BaseScalar::from_int(5).mul(&c()));
        let f = BaseScalar::from_int(32).div(&d).unwrap();
        assert_eq!(f.specialize(&rat_int(2)).unwrap(), rat_int(1));
        // c/2 at c = 0 -> 0
        let h = c().div(&BaseScalar::from_int(2)).unwrap();
        assert_eq!(h.specialize(&rat_int(0)).unwrap(), rat_int(0));
        // 1/(22+5c) at c = -22/5 -> pole
        let g = BaseScalar::one().div(&d).unwrap();
        assert!(matches!(
            g.specialize(&rat(-22, 5)),
            Err(ScalarError::PoleAtValue(_))
        ));
    }

    #[test]
    fn parameter_mismatch_detected() {
        let l = BaseScalar::param("l");
        assert!(matches!(
            field_arith(&c(), &l, FieldOp::Add),
            Err(ScalarError::ParameterMismatch(_, _))
        ));
    }

    #[test]
    fn constant_function_collapses_to_rational() {
        // (22+5c)/(22+5c) must be the rational 1, not a degree-0 function
        let d = BaseScalar::from_int(22).add(&BaseScalar::from_int(5).mul(&c()));
        assert_eq!(d.div(&d).unwrap(), BaseScalar::one());
    }

    /// Convolution identity behind the regular-part formula:
    /// sum_{b=0..a} (-1)^b / ((n+a-b)! b!) = (-1)^a/(n+a)! * C(a+n-1, a).
    #[test]
    fn binomial_convolution_identity() {
        for n in 1..=6i64 {
            for a in 0..=6u32 {
                let mut lhs = Rat::zero();
                for b in 0..=a {
                    let sign = if b % 2 == 0 { Rat::one() } else { -Rat::one() };
                    lhs += sign / (factorial(n as u32 + a - b) * factorial(b));
                }
                let sign = if a % 2 == 0 { Rat::one() } else { -Rat::one() };
                let rhs = sign / factorial(n as u32 + a) * gen_binomial(a as i64 + n - 1, a);
                assert_eq!(lhs, rhs, "n={n} a={a}");
            }
        }
    }

    /// Vandermonde-type identity used to symmetrize the commutator rows:
    /// (-1)^{b+1} sum_{0<=a<=b} C(m,a) C(-m-n+b-1, b-a) = -C(n, b).
    #[test]
    fn vandermonde_identity() {
        for m in -6..=6i64 {
            for n in -6..=6i64 {
                for b in 0..=8u32 {
                    let mut s = Rat::zero();
                    for a in 0..=b {
                        s += gen_binomial(m, a) * gen_binomial(-m - n + b as i64 - 1, b - a);
                    }
                    let sign = if (b + 1) % 2 == 0 { Rat::one() } else { -Rat::one() };
                    assert_eq!(sign * s, -gen_binomial(n, b), "m={m} n={n} b={b}");
                }
            }
        }
    }
}
