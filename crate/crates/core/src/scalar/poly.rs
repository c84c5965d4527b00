//! Dense univariate polynomials over the rationals.
//!
//! Coefficients are stored in ascending power order with no trailing zeros,
//! so two equal polynomials have identical representations. Division and gcd
//! use the monic Euclidean algorithm; everything is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Falling-factorial binomial coefficient m(m-1)...(m-alpha+1)/alpha!,
/// defined for any integer m and alpha >= 0.
pub fn gen_binomial(m: i64, alpha: u32) -> Rat {
    let mut num = Rat::one();
    for t in 0..alpha as i64 {
        num *= rat_int(m - t);
    }
    num / factorial(alpha)
}

pub fn factorial(k: u32) -> Rat {
    let mut f = Rat::one();
    for t in 2..=k as i64 {
        f *= rat_int(t);
    }
    f
}

/// Univariate polynomial with rational coefficients, ascending powers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    /// The variable itself.
    pub fn x() -> Self {
        Poly::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            Some(Rat::zero())
        } else if self.is_constant() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, k: &Rat) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Quotient and remainder; panics if `div` is zero.
    pub fn div_rem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "polynomial division by zero");
        let mut rem = self.clone();
        if rem.degree() < div.degree() && rem.coeffs.len() < div.coeffs.len() {
            return (Poly::zero(), rem);
        }
        let mut quot = vec![Rat::zero(); rem.coeffs.len().saturating_sub(div.coeffs.len()) + 1];
        let dlead = div.leading();
        while !rem.is_zero() && rem.coeffs.len() >= div.coeffs.len() {
            let shift = rem.coeffs.len() - div.coeffs.len();
            let q = rem.leading() / &dlead;
            quot[shift] = q.clone();
            let mut new = rem.coeffs;
            for (k, c) in div.coeffs.iter().enumerate() {
                new[shift + k] -= c * &q;
            }
            rem = Poly::from_coeffs(new);
        }
        (Poly::from_coeffs(quot), rem)
    }

    /// Monic gcd via the Euclidean algorithm; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.into_monic()
    }

    pub fn into_monic(self) -> Poly {
        if self.is_zero() {
            return self;
        }
        let lead = self.leading();
        if lead.is_one() {
            return self;
        }
        self.scale(&(Rat::one() / lead))
    }

    /// Smallest positive rational multiplier that clears all coefficient
    /// denominators and makes the leading coefficient positive.
    pub fn primitivizer(&self) -> Rat {
        if self.is_zero() {
            return Rat::one();
        }
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in &self.coeffs {
            den_lcm = num_integer::lcm(den_lcm, c.denom().clone());
            num_gcd = num_integer::gcd(num_gcd, c.numer().clone());
        }
        if num_gcd.is_zero() {
            num_gcd = BigInt::one();
        }
        let mut k = Rat::new(den_lcm, num_gcd);
        if self.leading().is_negative() {
            k = -k;
        }
        k
    }

    /// Renders the polynomial in ascending powers of `name`.
    pub fn render(&self, name: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push('-');
            } else {
                out.push('+');
            }
            let unit = mag.is_one();
            if k == 0 {
                out.push_str(&render_rat(&mag));
            } else {
                if !unit {
                    out.push_str(&render_rat(&mag));
                    out.push('*');
                }
                out.push_str(name);
                if k > 1 {
                    out.push_str(&format!("^{}", k));
                }
            }
        }
        out
    }
}

pub fn render_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        Poly::from_coeffs(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            out.push(self.coeff(k) - rhs.coeff(k));
        }
        Poly::from_coeffs(out)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}
