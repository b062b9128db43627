//! Small finite fields with table arithmetic.
//!
//! Elements of `GF(p^k)` are encoded as integers `Σ c_i p^i` with the
//! coefficients of a polynomial reduced modulo a fixed Conway polynomial.

use thiserror::Error;

use crate::numtheory::prime_power;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("no field tables for q = {0}")]
    Unsupported(u64),
}

/// Conway polynomials, low coefficient first, monic term omitted.
const CONWAY: &[(u64, u32, &[u32])] = &[
    (2, 2, &[1, 1]),
    (2, 3, &[1, 1, 0]),
    (2, 4, &[1, 1, 0, 0]),
    (3, 2, &[2, 2]),
    (3, 3, &[1, 2, 0]),
    (5, 2, &[2, 4]),
    (7, 2, &[3, 6]),
];

#[derive(Debug, Clone)]
pub struct FiniteField {
    q: usize,
    p: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
}

impl FiniteField {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if q > 256 {
            return Err(FieldError::Unsupported(q));
        }
        let modulus: Vec<u32> = if k == 1 {
            vec![]
        } else {
            CONWAY
                .iter()
                .find(|(pp, kk, _)| *pp == p && *kk == k)
                .map(|(_, _, c)| c.to_vec())
                .ok_or(FieldError::Unsupported(q))?
        };
        let (q, p, k) = (q as usize, p as usize, k as usize);
        let to_poly = |mut x: usize| {
            let mut c = vec![0u32; k];
            for slot in c.iter_mut() {
                *slot = (x % p) as u32;
                x /= p;
            }
            c
        };
        let from_poly = |c: &[u32]| c.iter().rev().fold(0usize, |acc, &d| acc * p + d as usize);
        let pu = p as u32;
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            let pa = to_poly(a);
            for b in 0..q {
                let pb = to_poly(b);
                let sum: Vec<u32> = pa.iter().zip(&pb).map(|(x, y)| (x + y) % pu).collect();
                add[a * q + b] = from_poly(&sum) as u16;
                // schoolbook product, then reduce x^j for j ≥ k
                let mut prod = vec![0u32; 2 * k];
                for (i, x) in pa.iter().enumerate() {
                    for (j, y) in pb.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % pu;
                    }
                }
                for j in (k..2 * k).rev() {
                    let c = prod[j];
                    if c == 0 {
                        continue;
                    }
                    prod[j] = 0;
                    // x^k = −Σ modulus_i x^i
                    for (i, m) in modulus.iter().enumerate() {
                        let sub = c * m % pu;
                        prod[j - k + i] = (prod[j - k + i] + pu - sub) % pu;
                    }
                }
                mul[a * q + b] = from_poly(&prod[..k]) as u16;
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).expect("additive inverse") as u16)
            .collect();
        Ok(FiniteField { q, p, add, mul, neg })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b] as usize
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg[b] as usize)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b] as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    pub fn inv(&self, a: usize) -> Option<usize> {
        (1..self.q).find(|&b| self.mul(a, b) == 1)
    }
}
