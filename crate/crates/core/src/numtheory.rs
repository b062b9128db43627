//! Elementary number theory: primality, factorisation, p-parts and the
//! exact identity checks used by the case analyses.

use num_bigint::BigUint;
use num_integer::{Integer, Roots};
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::canonical::display_string;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumTheoryError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes `≤ n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Prime factorisation by trial division, sorted by prime.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5;
    while p * p <= n {
        if is_prime(n) {
            break;
        }
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Factorisation of a product, merging the factorisations of the parts.
pub fn factorize_product(parts: &[u64]) -> Vec<(u64, u32)> {
    let mut merged: Vec<(u64, u32)> = Vec::new();
    for &x in parts {
        for (p, e) in factorize(x) {
            match merged.iter_mut().find(|(q, _)| *q == p) {
                Some(slot) => slot.1 += e,
                None => merged.push((p, e)),
            }
        }
    }
    merged.sort_unstable();
    merged
}

pub fn divisors_from_factors(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in factors {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// All positive divisors of `n ≥ 1`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    divisors_from_factors(&factorize(n))
}

/// `Some((p, k))` when `n = p^k` with `p` prime and `k ≥ 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    match factorize(n).as_slice() {
        [(p, k)] => Some((*p, *k)),
        _ => None,
    }
}

pub fn is_prime_power(n: u64) -> bool {
    prime_power(n).is_some()
}

/// `l = (l)_p · (l)_{p'}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PPartDecomposition {
    #[serde(serialize_with = "display_string")]
    pub l: BigUint,
    pub p: u64,
    #[serde(serialize_with = "display_string")]
    pub p_part: BigUint,
    #[serde(serialize_with = "display_string")]
    pub p_prime_part: BigUint,
    pub exponent: u32,
}

/// Splits `l ≥ 1` into its `p`-part and `p′`-part.
pub fn p_part(l: &BigUint, p: u64) -> Result<PPartDecomposition, NumTheoryError> {
    if !is_prime(p) {
        return Err(NumTheoryError::NotPrime(p));
    }
    if l.is_zero() {
        return Err(NumTheoryError::InvalidArgument("l must be positive".into()));
    }
    let pb = BigUint::from(p);
    let mut rest = l.clone();
    let mut exponent = 0;
    loop {
        let (q, r) = rest.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        rest = q;
        exponent += 1;
    }
    Ok(PPartDecomposition {
        l: l.clone(),
        p,
        p_part: pb.pow(exponent),
        p_prime_part: rest,
        exponent,
    })
}

pub fn p_part_u64(l: u64, p: u64) -> Result<u64, NumTheoryError> {
    let d = p_part(&BigUint::from(l), p)?;
    Ok(d.p_part.to_u64().expect("p-part of a u64 fits"))
}

/// Outcome of comparing `(q^m − e^m)_p` with `(m)_p·(q − e)_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftingCheck {
    pub q: u64,
    pub e: i8,
    pub m: u32,
    pub p: u64,
    #[serde(serialize_with = "display_string")]
    pub lhs: BigUint,
    #[serde(serialize_with = "display_string")]
    pub rhs: BigUint,
    pub equal: bool,
    pub applicable: bool,
}

impl LiftingCheck {
    /// A counterexample is an applicable instance where the sides differ.
    pub fn is_counterexample(&self) -> bool {
        self.applicable && !self.equal
    }
}

/// Evaluates the lifting-the-exponent identity for `e = ±1`.
///
/// It applies for odd `p` dividing `q − e`, and for `p = 2` when
/// `4 | q − e` or `m` is odd.
pub fn lifting_identity_check(q: u64, e: i8, m: u32, p: u64) -> Result<LiftingCheck, NumTheoryError> {
    if q < 2 || m < 1 || (e != 1 && e != -1) {
        return Err(NumTheoryError::InvalidArgument(format!(
            "need q ≥ 2, m ≥ 1, e = ±1; got q={q}, e={e}, m={m}"
        )));
    }
    if !is_prime(p) {
        return Err(NumTheoryError::NotPrime(p));
    }
    let qm = BigUint::from(q).pow(m);
    // q^m − e^m, which is positive for q ≥ 2
    let value = if e == 1 || m.is_multiple_of(2) { qm - 1u32 } else { qm + 1u32 };
    let q_minus_e = if e == 1 { q - 1 } else { q + 1 };
    let lhs = p_part(&value, p)?.p_part;
    let pm = p_part(&BigUint::from(m), p)?.p_part;
    // q − e = 0 only for q = 1, excluded above
    let pqe = p_part(&BigUint::from(q_minus_e), p)?.p_part;
    let rhs = pm * pqe;
    let applicable = if p == 2 {
        q_minus_e % 4 == 0 || m % 2 == 1
    } else {
        q_minus_e % p == 0
    };
    Ok(LiftingCheck {
        q,
        e,
        m,
        p,
        equal: lhs == rhs,
        lhs,
        rhs,
        applicable,
    })
}

/// Exhaustive sweep over `2 ≤ q ≤ q_max`, `1 ≤ m ≤ m_max`, primes `p ≤ p_max`
/// and both signs; returns the number of applicable instances and the
/// counterexamples.
pub fn lifting_identity_sweep(q_max: u64, m_max: u32, p_max: u64) -> (usize, Vec<LiftingCheck>) {
    let primes = primes_up_to(p_max);
    let results: Vec<(usize, Vec<LiftingCheck>)> = (2..=q_max)
        .into_par_iter()
        .map(|q| {
            let mut applicable = 0;
            let mut bad = Vec::new();
            for m in 1..=m_max {
                for &p in &primes {
                    for e in [1i8, -1] {
                        let c = lifting_identity_check(q, e, m, p).expect("valid sweep input");
                        if c.applicable {
                            applicable += 1;
                        }
                        if c.is_counterexample() {
                            bad.push(c);
                        }
                    }
                }
            }
            (applicable, bad)
        })
        .collect();
    let total = results.iter().map(|r| r.0).sum();
    let bad = results.into_iter().flat_map(|r| r.1).collect();
    (total, bad)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GcdCheck {
    pub q: u64,
    pub k: u32,
    pub m: u32,
    #[serde(serialize_with = "display_string")]
    pub gcd: BigUint,
    #[serde(serialize_with = "display_string")]
    pub expected: BigUint,
    pub holds: bool,
}

/// Checks `gcd(q^k − 1, q^m − 1) = q^{gcd(k, m)} − 1`.
pub fn gcd_qpow(q: u64, k: u32, m: u32) -> Result<GcdCheck, NumTheoryError> {
    if q < 2 || k < 1 || m < 1 {
        return Err(NumTheoryError::InvalidArgument(format!(
            "need q ≥ 2 and k, m ≥ 1; got q={q}, k={k}, m={m}"
        )));
    }
    let qb = BigUint::from(q);
    let a = qb.clone().pow(k) - 1u32;
    let b = qb.clone().pow(m) - 1u32;
    let gcd = a.gcd(&b);
    let expected = qb.pow(k.gcd(&m)) - 1u32;
    Ok(GcdCheck {
        q,
        k,
        m,
        holds: gcd == expected,
        gcd,
        expected,
    })
}

/// Sweep over `2 ≤ q ≤ q_max` and `1 ≤ k, m ≤ e_max`; returns the number of
/// instances and the failures.
pub fn gcd_qpow_sweep(q_max: u64, e_max: u32) -> (usize, Vec<GcdCheck>) {
    let bad: Vec<Vec<GcdCheck>> = (2..=q_max)
        .into_par_iter()
        .map(|q| {
            let mut bad = Vec::new();
            for k in 1..=e_max {
                for m in 1..=e_max {
                    let c = gcd_qpow(q, k, m).expect("valid sweep input");
                    if !c.holds {
                        bad.push(c);
                    }
                }
            }
            bad
        })
        .collect();
    let count = (q_max as usize - 1) * (e_max as usize).pow(2);
    (count, bad.into_iter().flatten().collect())
}

/// The three shapes of solutions of `p^m = q^n + 1` in primes `p`, `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerGapCase {
    /// `3² = 2³ + 1`.
    NineEqualsEightPlusOne,
    /// `q = 2`, `m = 1`, `n` a power of two and `p = 2^n + 1` a Fermat prime.
    FermatPrime,
    /// `p = 2`, `n = 1`, `m` prime and `q = 2^m − 1` a Mersenne prime.
    MersennePrime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerGapSolution {
    pub p: u64,
    pub m: u32,
    pub q: u64,
    pub n: u32,
    /// Every case whose description matches; exactly one when classified.
    pub cases: Vec<PowerGapCase>,
}

impl PowerGapSolution {
    pub fn classified(&self) -> bool {
        self.cases.len() == 1
    }
}

/// Returns the cases whose shape matches `p^m = q^n + 1`.
pub fn classify_power_gap(p: u64, m: u32, q: u64, n: u32) -> Vec<PowerGapCase> {
    let mut cases = Vec::new();
    if (p, m, q, n) == (3, 2, 2, 3) {
        cases.push(PowerGapCase::NineEqualsEightPlusOne);
    }
    if q == 2 && m == 1 && n.is_power_of_two() && n < 64 && p == (1u64 << n) + 1 && is_prime(p) {
        cases.push(PowerGapCase::FermatPrime);
    }
    if p == 2 && n == 1 && is_prime(m as u64) && m < 64 && q == (1u64 << m) - 1 && is_prime(q) {
        cases.push(PowerGapCase::MersennePrime);
    }
    cases
}

/// All solutions of `p^m = q^n + 1` with `p`, `q` prime, `m, n ≥ 1` and
/// `p^m ≤ bound`, each classified.
pub fn zsigmondy_corollary_solve(bound: u64) -> Result<Vec<PowerGapSolution>, NumTheoryError> {
    if bound < 4 {
        return Err(NumTheoryError::InvalidArgument("bound must be at least 4".into()));
    }
    let primes = primes_up_to(bound);
    let mut out: Vec<PowerGapSolution> = primes
        .par_iter()
        .flat_map_iter(|&p| {
            let mut found = Vec::new();
            let mut pm = p;
            let mut m = 1u32;
            loop {
                if let Some((q, n)) = prime_power(pm - 1) {
                    found.push(PowerGapSolution {
                        p,
                        m,
                        q,
                        n,
                        cases: classify_power_gap(p, m, q, n),
                    });
                }
                match pm.checked_mul(p) {
                    Some(next) if next <= bound => {
                        pm = next;
                        m += 1;
                    }
                    _ => break,
                }
            }
            found
        })
        .collect();
    out.sort_by_key(|s| (s.p, s.m));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NagellSolution {
    pub x: u64,
    pub i: u32,
    #[serde(serialize_with = "display_string")]
    pub y: BigUint,
}

/// All `(x, i, y)` with `(x^i − 1)/(x − 1) = y²`, `2 ≤ x ≤ x_max`,
/// `3 ≤ i ≤ i_max`, by exact integer square roots.
pub fn nagell_ljunggren_search(x_max: u64, i_max: u32) -> Result<Vec<NagellSolution>, NumTheoryError> {
    if x_max < 2 || i_max < 3 {
        return Err(NumTheoryError::InvalidArgument(
            "need x_max ≥ 2 and i_max ≥ 3".into(),
        ));
    }
    let mut out: Vec<NagellSolution> = (2..=x_max)
        .into_par_iter()
        .flat_map_iter(|x| {
            let xb = BigUint::from(x);
            // repunit 1 + x + … + x^{i−1}, built incrementally
            let mut value = BigUint::one() + &xb;
            let mut power = xb.clone();
            let mut found = Vec::new();
            for i in 3..=i_max {
                power *= &xb;
                value += &power;
                let y = value.sqrt();
                if &y * &y == value {
                    found.push(NagellSolution { x, i, y });
                }
            }
            found
        })
        .collect();
    out.sort_by_key(|s| (s.x, s.i));
    Ok(out)
}

/// Integer square root test for `u64`.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let r = n.sqrt();
    (r * r == n).then_some(r)
}
