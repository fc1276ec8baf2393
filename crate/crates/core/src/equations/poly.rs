use crate::scalar::{Rational, Scalar};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Variable slots of a quad-equation, in the order `(v, v1, v2, v12, α1, α2)`.
pub const NVARS: usize = 6;
pub const PARAM1: usize = 4;
pub const PARAM2: usize = 5;

/// The four corners of a face. The discriminant doubles as the variable slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    V = 0,
    V1 = 1,
    V2 = 2,
    V12 = 3,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::V, Corner::V1, Corner::V2, Corner::V12];

    pub fn slot(self) -> usize {
        self as usize
    }

    /// Corner at position `k` of a face tuple `(v, v1, v12, v2)`.
    pub fn at_face_position(k: usize) -> Corner {
        [Corner::V, Corner::V1, Corner::V12, Corner::V2][k]
    }
}

type Exponents = [u8; NVARS];

/// Polynomial with rational coefficients in the six slots of a quad-equation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QuadPolynomial {
    terms: BTreeMap<Exponents, Rational>,
}

impl QuadPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term([0; NVARS], c);
        p
    }

    pub fn var(slot: usize) -> Self {
        assert!(slot < NVARS);
        let mut e = [0; NVARS];
        e[slot] = 1;
        let mut p = Self::zero();
        p.add_term(e, <Rational as One>::one());
        p
    }

    /// The field variables and parameters as polynomials, for building equations.
    pub fn vars() -> [QuadPolynomial; NVARS] {
        std::array::from_fn(Self::var)
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        let entry = self.terms.entry(e).or_insert_with(<Rational as Zero>::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn degree_in(&self, slot: usize) -> u8 {
        self.terms.keys().map(|e| e[slot]).max().unwrap_or(0)
    }

    pub fn eval<T: Scalar>(&self, x: &[T; NVARS]) -> T {
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut t = T::from_rational(c);
            for (slot, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t * x[slot].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Largest magnitude among the individual terms at `x`; the natural scale
    /// for judging a floating-point residual.
    pub fn term_scale<T: Scalar>(&self, x: &[T; NVARS]) -> f64 {
        let mut m: f64 = 0.0;
        for (e, c) in &self.terms {
            let mut t = T::from_rational(c);
            for (slot, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t * x[slot].clone();
                }
            }
            m = m.max(t.magnitude());
        }
        m
    }

    /// Writes the polynomial as `A·x + B` in one slot. Requires degree ≤ 1 there.
    pub fn split_linear(&self, slot: usize) -> Option<(QuadPolynomial, QuadPolynomial)> {
        let (mut a, mut b) = (Self::zero(), Self::zero());
        for (e, c) in &self.terms {
            match e[slot] {
                0 => b.add_term(*e, c.clone()),
                1 => {
                    let mut e2 = *e;
                    e2[slot] = 0;
                    a.add_term(e2, c.clone());
                }
                _ => return None,
            }
        }
        Some((a, b))
    }

    /// `Q(x[perm[0]], ..., x[perm[5]])`, i.e. slot `i` is fed by variable `perm[i]`.
    pub fn permuted(&self, perm: [usize; NVARS]) -> Self {
        let mut p = Self::zero();
        for (e, c) in &self.terms {
            let mut e2 = [0; NVARS];
            for (slot, &k) in e.iter().enumerate() {
                e2[perm[slot]] += k;
            }
            p.add_term(e2, c.clone());
        }
        p
    }

    /// Sets both parameter slots to the first parameter.
    pub fn with_equal_params(&self) -> Self {
        let mut p = Self::zero();
        for (e, c) in &self.terms {
            let mut e2 = *e;
            e2[PARAM1] += e2[PARAM2];
            e2[PARAM2] = 0;
            p.add_term(e2, c.clone());
        }
        p
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut p = Self::zero();
        for (e, c) in &self.terms {
            p.add_term(*e, c * k);
        }
        p
    }

    /// Solves `Q = 0` for one corner given the other slots (`x[corner]` is ignored).
    /// Returns `None` when the coefficient of the unknown vanishes.
    pub fn solve_slot<T: Scalar>(&self, slot: usize, x: &[T; NVARS]) -> Option<T> {
        let (a, b) = self.split_linear(slot)?;
        let av = a.eval(x);
        let bv = b.eval(x);
        if av.is_negligible(&T::one()) {
            return None;
        }
        Some(-bv / av)
    }
}

impl Add for &QuadPolynomial {
    type Output = QuadPolynomial;
    fn add(self, rhs: &QuadPolynomial) -> QuadPolynomial {
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(*e, c.clone());
        }
        p
    }
}

impl Sub for &QuadPolynomial {
    type Output = QuadPolynomial;
    fn sub(self, rhs: &QuadPolynomial) -> QuadPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &QuadPolynomial {
    type Output = QuadPolynomial;
    fn neg(self) -> QuadPolynomial {
        self.scale(&-<Rational as One>::one())
    }
}

impl Mul for &QuadPolynomial {
    type Output = QuadPolynomial;
    fn mul(self, rhs: &QuadPolynomial) -> QuadPolynomial {
        let mut p = QuadPolynomial::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = std::array::from_fn(|i| e1[i] + e2[i]);
                p.add_term(e, c1 * c2);
            }
        }
        p
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QuadPolynomial {
            type Output = QuadPolynomial;
            fn $m(self, rhs: QuadPolynomial) -> QuadPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for QuadPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; NVARS] = ["v", "v1", "v2", "v12", "a1", "a2"];
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", crate::scalar::format_rational(c))?;
            for (slot, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*{}", NAMES[slot])?,
                    _ => write!(f, "*{}^{}", NAMES[slot], k)?,
                }
            }
        }
        Ok(())
    }
}
