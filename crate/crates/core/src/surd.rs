//! Exact arithmetic in real quadratic fields.
//!
//! A [`QuadSurd`] is `a + b·√D` with rational `a`, `b` and a squarefree
//! radicand `D ≥ 1`. Rational values are normalised to `b = 0, D = 1`.
//! Two irrational values can only be combined when they share the same `D`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::scalar::ExactInt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd<I: ExactInt> {
    a: Ratio<I>,
    b: Ratio<I>,
    d: I,
}

impl<I: ExactInt> QuadSurd<I> {
    /// Builds `a + b√d`. `d` must be a positive squarefree integer.
    pub fn new(a: Ratio<I>, b: Ratio<I>, d: I) -> Self {
        assert!(d.is_positive(), "radicand must be positive");
        let mut s = QuadSurd { a, b, d };
        s.normalise();
        s
    }

    pub fn rational(a: Ratio<I>) -> Self {
        QuadSurd {
            a,
            b: Ratio::zero(),
            d: I::one(),
        }
    }

    pub fn integer(a: I) -> Self {
        Self::rational(Ratio::from_integer(a))
    }

    /// `√n` for a non-negative integer `n`, with the square part pulled out.
    pub fn sqrt_of(n: I) -> Self {
        assert!(!n.is_negative(), "square root of a negative integer");
        if n.is_zero() {
            return Self::zero();
        }
        let (s, d) = split_square(n);
        QuadSurd::new(Ratio::zero(), Ratio::from_integer(s), d)
    }

    pub fn rational_part(&self) -> &Ratio<I> {
        &self.a
    }

    pub fn surd_part(&self) -> &Ratio<I> {
        &self.b
    }

    pub fn radicand(&self) -> &I {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_integer(&self) -> Option<I> {
        if self.b.is_zero() && self.a.is_integer() {
            Some(self.a.to_integer())
        } else {
            None
        }
    }

    pub fn conjugate(&self) -> Self {
        QuadSurd {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d.clone(),
        }
    }

    /// Field norm `a² − b²D`.
    pub fn norm(&self) -> Ratio<I> {
        self.a.clone() * self.a.clone()
            - self.b.clone() * self.b.clone() * Ratio::from_integer(self.d.clone())
    }

    pub fn signum(&self) -> Ordering {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == Ordering::Equal || sa == sb {
            return if sa == Ordering::Equal { sb } else { sa };
        }
        if sa == Ordering::Equal {
            return sb;
        }
        // opposite signs: compare a² with b²D (never equal, D is not a square)
        let a2 = self.a.clone() * self.a.clone();
        let b2d = self.b.clone() * self.b.clone() * Ratio::from_integer(self.d.clone());
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = ratio_to_f64(&self.a);
        let b = ratio_to_f64(&self.b);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        a + b * d.sqrt()
    }

    /// Re-expresses the value over a wider integer type.
    pub fn widen<J: ExactInt + From<I>>(&self) -> QuadSurd<J> {
        let conv = |r: &Ratio<I>| Ratio::new(J::from(r.numer().clone()), J::from(r.denom().clone()));
        QuadSurd::new(conv(&self.a), conv(&self.b), J::from(self.d.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    fn normalise(&mut self) {
        if self.d.is_one() {
            self.a = self.a.clone() + self.b.clone();
            self.b = Ratio::zero();
        }
        if self.b.is_zero() {
            self.d = I::one();
        }
    }

    fn common_radicand(x: &Self, y: &Self) -> I {
        match (x.b.is_zero(), y.b.is_zero()) {
            (true, _) => y.d.clone(),
            (_, true) => x.d.clone(),
            _ => {
                assert!(
                    x.d == y.d,
                    "cannot combine surds over different quadratic fields"
                );
                x.d.clone()
            }
        }
    }
}

fn sign_of<I: ExactInt>(r: &Ratio<I>) -> Ordering {
    if r.is_zero() {
        Ordering::Equal
    } else if r.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

fn ratio_to_f64<I: ExactInt>(r: &Ratio<I>) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Writes `n = s²·d` with `d` squarefree; returns `(s, d)`.
pub fn split_square<I: ExactInt>(n: I) -> (I, I) {
    let root = n.sqrt();
    if root.clone() * root.clone() == n {
        return (root, I::one());
    }
    let mut s = I::one();
    let mut d = I::one();
    let mut rest = n;
    let mut p = I::one() + I::one();
    while p.clone() * p.clone() <= rest {
        let mut e = 0u32;
        while (rest.clone() % p.clone()).is_zero() {
            rest = rest / p.clone();
            e += 1;
        }
        for _ in 0..e / 2 {
            s = s * p.clone();
        }
        if e % 2 == 1 {
            d = d * p.clone();
        }
        p = p + I::one();
    }
    d = d * rest;
    (s, d)
}

impl<I: ExactInt> Zero for QuadSurd<I> {
    fn zero() -> Self {
        Self::integer(I::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl<I: ExactInt> One for QuadSurd<I> {
    fn one() -> Self {
        Self::integer(I::one())
    }
}

impl<I: ExactInt> Add for QuadSurd<I> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let d = Self::common_radicand(&self, &rhs);
        QuadSurd::new(self.a + rhs.a, self.b + rhs.b, d)
    }
}

impl<I: ExactInt> Sub for QuadSurd<I> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<I: ExactInt> Neg for QuadSurd<I> {
    type Output = Self;
    fn neg(self) -> Self {
        QuadSurd {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl<I: ExactInt> Mul for QuadSurd<I> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let d = Self::common_radicand(&self, &rhs);
        let dr = Ratio::from_integer(d.clone());
        let a = self.a.clone() * rhs.a.clone() + self.b.clone() * rhs.b.clone() * dr;
        let b = self.a * rhs.b + self.b * rhs.a;
        QuadSurd::new(a, b, d)
    }
}

impl<I: ExactInt> Div for QuadSurd<I> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero surd");
        let norm = rhs.norm();
        let num = self * rhs.conjugate();
        QuadSurd::new(num.a / norm.clone(), num.b / norm, num.d)
    }
}

impl<I: ExactInt> PartialOrd for QuadSurd<I> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<I: ExactInt> Ord for QuadSurd<I> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }
}

impl<I: ExactInt> fmt::Display for QuadSurd<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let surd = if self.b.is_one() {
            format!("√{}", self.d)
        } else if (-self.b.clone()).is_one() {
            format!("-√{}", self.d)
        } else {
            format!("{}√{}", self.b, self.d)
        };
        if self.a.is_zero() {
            write!(f, "{surd}")
        } else if self.b.is_negative() {
            write!(f, "{} - {}", self.a, surd.trim_start_matches('-'))
        } else {
            write!(f, "{} + {}", self.a, surd)
        }
    }
}

impl<I: ExactInt> Serialize for QuadSurd<I> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("QuadSurd", 3)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.serialize_field("D", &self.d.to_i64())?;
        st.end()
    }
}
