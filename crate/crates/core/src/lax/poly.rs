use crate::scalar::{format_rational, rat, Rational};
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A polynomial in the spectral parameter `λ` with exact rational
/// coefficients, lowest degree first and without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// `λ − a`.
    pub fn linear_root(a: &Rational) -> Self {
        Poly::new(vec![-a.clone(), Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, n: usize) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Synthetic division by `λ − a`: quotient and remainder.
    pub fn div_linear(&self, a: &Rational) -> (Poly, Rational) {
        let Some(deg) = self.degree() else {
            return (Poly::zero(), Rational::zero());
        };
        let mut q = vec![Rational::zero(); deg];
        let mut carry = Rational::zero();
        for k in (0..=deg).rev() {
            let cur = &self.coeffs[k] + &carry * a;
            if k == 0 {
                return (Poly::new(q), cur);
            }
            q[k - 1] = cur.clone();
            carry = cur;
        }
        unreachable!()
    }
}

impl From<i64> for Poly {
    fn from(n: i64) -> Self {
        Poly::constant(rat(n))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = Rational::zero();
        Poly::new((0..n).map(|k| self.coeffs.get(k).unwrap_or(&zero) + o.coeffs.get(k).unwrap_or(&zero)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format_rational(c),
                1 => format!("({})λ", format_rational(c)),
                _ => format!("({})λ^{k}", format_rational(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
