//! Parameter calculus for `(n, r, μ)`-covers and the extremal families.

use std::cmp::Ordering;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numtheory::{divisors, divisors_from_factors, factorize, factorize_product};
use crate::surd::QuadSurd;

/// Exact surd type used for eigenvalues and multiplicities.
pub type Surd = QuadSurd<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),
    #[error("λ = n − (r−1)μ − 2 = {lambda} is negative for (n, r, μ) = ({n}, {r}, {mu})")]
    NegativeLambda { n: u64, r: u64, mu: u64, lambda: i128 },
    #[error("eigenvalues are not real (discriminant {0})")]
    NonReal(i128),
    #[error("{0}")]
    OutsideDomain(String),
}

/// The quadruple `(n, r, μ, λ)` with the derived spectrum.
///
/// The cover has eigenvalues `n−1 > θ > −1 > τ` with multiplicities
/// `1, m_θ, n−1, m_τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverParams {
    pub n: u64,
    pub r: u64,
    pub mu: u64,
    pub lambda: u64,
    pub theta: Surd,
    pub tau: Surd,
    pub m_theta: Surd,
    pub m_tau: Surd,
    pub v: u64,
}

impl CoverParams {
    /// Valency of the cover: one neighbour in each other fibre.
    pub fn degree(&self) -> u64 {
        self.n - 1
    }

    pub fn m_theta_int(&self) -> Option<u64> {
        positive_integer(&self.m_theta)
    }

    pub fn m_tau_int(&self) -> Option<u64> {
        positive_integer(&self.m_tau)
    }

    /// Both multiplicities are positive integers (a feasibility condition).
    pub fn multiplicities_integral(&self) -> bool {
        self.m_theta_int().is_some() && self.m_tau_int().is_some()
    }

    /// Dimensions `n − m_θ/(r−1)` and `n − m_τ/(r−1)` of the two line systems
    /// obtained from an abelian cover, when integral.
    pub fn frame_dimensions(&self) -> Option<(u64, u64)> {
        let r1 = self.r - 1;
        let mt = self.m_theta_int()?;
        let mtau = self.m_tau_int()?;
        if mt % r1 != 0 || mtau % r1 != 0 {
            return None;
        }
        Some((self.n - mt / r1, self.n - mtau / r1))
    }
}

fn positive_integer(s: &Surd) -> Option<u64> {
    s.to_integer()
        .filter(|m| m.is_positive())
        .and_then(|m| u64::try_from(m).ok())
}

impl Serialize for CoverParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(9))?;
        map.serialize_entry("n", &self.n)?;
        map.serialize_entry("r", &self.r)?;
        map.serialize_entry("mu", &self.mu)?;
        map.serialize_entry("lambda", &self.lambda)?;
        map.serialize_entry("theta", &self.theta)?;
        map.serialize_entry("tau", &self.tau)?;
        match self.m_theta_int() {
            Some(m) => map.serialize_entry("m_theta", &m)?,
            None => map.serialize_entry("m_theta", &self.m_theta)?,
        }
        match self.m_tau_int() {
            Some(m) => map.serialize_entry("m_tau", &m)?,
            None => map.serialize_entry("m_tau", &self.m_tau)?,
        }
        map.serialize_entry("v", &self.v)?;
        map.end()
    }
}

/// Derives `λ`, `θ`, `τ`, `m_θ`, `m_τ` from `(n, r, μ)`.
///
/// Multiplicities use the denominator `θ − τ`; with `θ + τ` the hexagon
/// would get negative multiplicities.
pub fn derive_params(n: u64, r: u64, mu: u64) -> Result<CoverParams, ParamsError> {
    if n < 3 || r < 2 || mu < 1 {
        return Err(ParamsError::InvalidArguments(format!(
            "need n ≥ 3, r ≥ 2, μ ≥ 1; got ({n}, {r}, {mu})"
        )));
    }
    let (ni, ri, mui) = (n as i128, r as i128, mu as i128);
    let lambda = ni - (ri - 1) * mui - 2;
    if lambda < 0 {
        return Err(ParamsError::NegativeLambda { n, r, mu, lambda });
    }
    // roots of x² − (λ−μ)x − (n−1)
    let s = lambda - mui;
    let disc = s * s + 4 * (ni - 1);
    if disc <= 0 {
        return Err(ParamsError::NonReal(disc));
    }
    let root = Surd::sqrt_of(disc);
    let half = Surd::rational(Ratio::new(1, 2));
    let theta = (Surd::integer(s) + root.clone()) * half.clone();
    let tau = (Surd::integer(s) - root) * half;
    let scale = Surd::integer((ri - 1) * ni);
    let gap = theta.clone() - tau.clone();
    let m_theta = -tau.clone() * scale.clone() / gap.clone();
    let m_tau = theta.clone() * scale / gap;
    Ok(CoverParams {
        n,
        r,
        mu,
        lambda: lambda as u64,
        theta,
        tau,
        m_theta,
        m_tau,
        v: n * r,
    })
}

/// Parameters of the odd-`r` extremal family, `n = (t²−1)²`, `τ = −t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyBParams {
    pub t: u64,
    pub r: u64,
    /// The sporadic `r = μ = 3 = √n` entry, which is not of the general form.
    pub special: bool,
    pub params: CoverParams,
}

impl FamilyBParams {
    pub fn degree_formula(&self) -> u64 {
        let t2 = self.t * self.t;
        t2 * (t2 - 2)
    }
}

/// `(n, r, μ) = ((t²−1)², r, (t−1)²(t²+t−1)/r)`, or the special `(9, 3, 3)`
/// entry for `(t, r) = (2, 3)`.
pub fn family_b(t: u64, r: u64) -> Result<FamilyBParams, ParamsError> {
    if (t, r) == (2, 3) {
        return Ok(FamilyBParams {
            t,
            r,
            special: true,
            params: derive_params(9, 3, 3)?,
        });
    }
    if t < 2 || r < 2 {
        return Err(ParamsError::InvalidArguments(format!(
            "need t ≥ 2 and r ≥ 2; got (t, r) = ({t}, {r})"
        )));
    }
    if !(t - 1).is_multiple_of(r) {
        return Err(ParamsError::OutsideDomain(format!(
            "r = {r} does not divide t − 1 = {}",
            t - 1
        )));
    }
    if r.gcd(&6) != 1 {
        return Err(ParamsError::OutsideDomain(format!(
            "r = {r} is not coprime to 6"
        )));
    }
    let n = (t * t - 1) * (t * t - 1);
    let mu = (t - 1) * (t - 1) * (t * t + t - 1) / r;
    Ok(FamilyBParams {
        t,
        r,
        special: false,
        params: derive_params(n, r, mu)?,
    })
}

/// Every admissible `(t, r)` with `2 ≤ t ≤ t_max`, `r | t−1`, `gcd(6, r) = 1`,
/// plus the special `(9, 3, 3)` entry; sorted by `(t, r)`.
pub fn feasible_b(t_max: u64) -> Result<Vec<FamilyBParams>, ParamsError> {
    if t_max < 2 {
        return Err(ParamsError::InvalidArguments("t_max must be at least 2".into()));
    }
    let mut out = vec![family_b(2, 3)?];
    for t in 2..=t_max {
        for r in divisors(t - 1) {
            if r >= 2 && r.gcd(&6) == 1 {
                out.push(family_b(t, r)?);
            }
        }
    }
    out.sort_by_key(|e| (e.t, e.r));
    Ok(out)
}

/// Which form of `μ` is used for the even-`r` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuForm {
    /// `μ = (t−1)³(t+2)/(2r)`.
    TMinusOneCubed,
    /// `μ = (t+1)³(t−2)/(2r)`; only for double covers.
    TPlusOneCubed,
}

/// `n = (t²−2)(t²−1)/2` with `μ` per `form`.
///
/// For `r ≥ 4`, `t` must be an integer `≥ 3` and only
/// [`MuForm::TMinusOneCubed`] applies. For `r = 2`, `t` is a positive
/// integer or `√5`.
pub fn family_a(t: &Surd, r: u64, form: MuForm) -> Result<CoverParams, ParamsError> {
    if r < 2 || r % 2 == 1 {
        return Err(ParamsError::OutsideDomain(format!("r = {r} must be even and ≥ 2")));
    }
    let t_int = t.to_integer();
    if r >= 4 {
        if form != MuForm::TMinusOneCubed {
            return Err(ParamsError::OutsideDomain(
                "the (t+1)³(t−2) form only exists for r = 2".into(),
            ));
        }
        match t_int {
            Some(ti) if ti >= 3 => {}
            _ => {
                return Err(ParamsError::OutsideDomain(format!(
                    "for r ≥ 4 the parameter t must be an integer ≥ 3, got {t}"
                )))
            }
        }
    } else {
        let is_sqrt5 = *t == Surd::sqrt_of(5);
        match t_int {
            Some(ti) if ti >= 2 => {}
            _ if is_sqrt5 => {}
            _ => {
                return Err(ParamsError::OutsideDomain(format!(
                    "for r = 2 the parameter t must be a positive integer ≥ 2 or √5, got {t}"
                )))
            }
        }
    }
    let one = Surd::integer(1);
    let two = Surd::integer(2);
    let t2 = t.clone() * t.clone();
    let n = (t2.clone() - two.clone()) * (t2 - one.clone()) / two.clone();
    let mu = match form {
        MuForm::TMinusOneCubed => (t.clone() - one).pow(3) * (t.clone() + two),
        MuForm::TPlusOneCubed => (t.clone() + one).pow(3) * (t.clone() - two),
    } / Surd::integer(2 * r as i128);
    let n = n
        .to_integer()
        .filter(|x| *x >= 3)
        .ok_or_else(|| ParamsError::OutsideDomain(format!("n = {n} is not an integer ≥ 3")))?;
    let mu = mu
        .to_integer()
        .filter(|x| *x >= 1)
        .ok_or_else(|| ParamsError::OutsideDomain(format!("μ = {mu} is not a positive integer")))?;
    derive_params(n as u64, r, mu as u64)
}

/// How an entry of [`feasible_a`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyASource {
    /// The isolated `(28, 4, 8)` parameter set.
    Sporadic,
    /// `r = 2`, with the given `μ` form.
    DoubleCover(MuForm),
    /// `r ≥ 4`, passing all six arithmetic conditions.
    GeneralR,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyAEntry {
    /// `t = −τ`, possibly `√5`.
    pub t: Surd,
    pub r: u64,
    pub params: CoverParams,
    pub source: FamilyASource,
    /// Names of the conditions checked and satisfied for this entry.
    pub conditions: Vec<&'static str>,
}

pub const COND_T_INTEGER: &str = "t-is-minus-tau-and-integral";
pub const COND_T_NOT_DIV4: &str = "t-at-least-3-not-divisible-by-4";
pub const COND_MU_GE2: &str = "mu-at-least-2";
pub const COND_R_DIVIDES: &str = "r-divides-t-minus-1-when-2r-le-t2-plus-1";
pub const COND_MU_EVEN: &str = "mu-even-when-t-odd";
pub const COND_ODD_PRIMES: &str = "odd-primes-of-r-divide-t-minus-1";

/// Checks the six arithmetic conditions for an `r ≥ 4` candidate; returns
/// the failing condition name, if any.
pub fn general_r_violation(t: u64, r: u64, mu: u64) -> Option<&'static str> {
    if t < 3 || t.is_multiple_of(4) {
        return Some(COND_T_NOT_DIV4);
    }
    if mu < 2 {
        return Some(COND_MU_GE2);
    }
    if 2 * r <= t * t + 1 && !(t - 1).is_multiple_of(r) {
        return Some(COND_R_DIVIDES);
    }
    if t % 2 == 1 && mu % 2 == 1 {
        return Some(COND_MU_EVEN);
    }
    if factorize(r)
        .iter()
        .any(|&(p, _)| p != 2 && !(t - 1).is_multiple_of(p))
    {
        return Some(COND_ODD_PRIMES);
    }
    None
}

/// Enumerates the even-`r` extremal parameter sets up to `t_max`.
pub fn feasible_a(t_max: u64) -> Result<Vec<FamilyAEntry>, ParamsError> {
    if t_max < 2 {
        return Err(ParamsError::InvalidArguments("t_max must be at least 2".into()));
    }
    let mut out = Vec::new();
    let sporadic = derive_params(28, 4, 8)?;
    out.push(FamilyAEntry {
        t: -sporadic.tau.clone(),
        r: 4,
        params: sporadic,
        source: FamilyASource::Sporadic,
        conditions: vec![],
    });

    let mut double: Vec<FamilyAEntry> = Vec::new();
    let mut candidates: Vec<Surd> = (2..=t_max).map(|t| Surd::integer(t as i128)).collect();
    candidates.push(Surd::sqrt_of(5));
    for t in candidates {
        for form in [MuForm::TMinusOneCubed, MuForm::TPlusOneCubed] {
            let Ok(params) = family_a(&t, 2, form) else {
                continue;
            };
            if double
                .iter()
                .any(|e| e.t == t && e.params.mu == params.mu)
            {
                continue;
            }
            let mut conditions = vec![];
            if -params.tau.clone() == t {
                conditions.push(COND_T_INTEGER);
            }
            double.push(FamilyAEntry {
                t: t.clone(),
                r: 2,
                params,
                source: FamilyASource::DoubleCover(form),
                conditions,
            });
        }
    }
    double.sort_by(|a, b| a.t.cmp(&b.t).then(a.params.mu.cmp(&b.params.mu)));
    out.extend(double);

    for t in 3..=t_max {
        let x = (t - 1).pow(3) * (t + 2);
        // 2r | x with r even, so r runs over the even divisors of x/2
        let mut factors = factorize_product(&[t - 1, t - 1, t - 1, t + 2]);
        factors[0].1 -= 1;
        for r in divisors_from_factors(&factors) {
            if r < 4 || r % 2 == 1 {
                continue;
            }
            let mu = x / (2 * r);
            if general_r_violation(t, r, mu).is_some() {
                continue;
            }
            let t_s = Surd::integer(t as i128);
            let Ok(params) = family_a(&t_s, r, MuForm::TMinusOneCubed) else {
                continue;
            };
            let mut conditions = vec![];
            if -params.tau.clone() == t_s {
                conditions.push(COND_T_INTEGER);
            }
            conditions.extend([
                COND_T_NOT_DIV4,
                COND_MU_GE2,
                COND_R_DIVIDES,
                COND_MU_EVEN,
                COND_ODD_PRIMES,
            ]);
            out.push(FamilyAEntry {
                t: t_s,
                r,
                params,
                source: FamilyASource::GeneralR,
                conditions,
            });
        }
    }
    Ok(out)
}

/// Spectral clique and coclique bounds for the odd-`r` family, unfloored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoffmanBounds {
    pub clique: Ratio<i128>,
    pub coclique: Ratio<i128>,
}

impl Serialize for HoffmanBounds {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("clique", &self.clique.to_string())?;
        map.serialize_entry("coclique", &self.coclique.to_string())?;
        map.end()
    }
}

/// `|Q| ≤ 1 + (t²−2)t` and `|C| ≤ r(t²−1)²/(1 + (t²−2)t)`.
pub fn hoffman_bounds(p: &FamilyBParams) -> HoffmanBounds {
    let t = p.t as i128;
    let r = p.r as i128;
    let clique = 1 + (t * t - 2) * t;
    let coclique = Ratio::new(r * (t * t - 1) * (t * t - 1), clique);
    HoffmanBounds {
        clique: Ratio::from_integer(clique),
        coclique,
    }
}

/// Cover eigenvalue check used by the graph layer: `n−1 > θ > −1 > τ`.
pub fn eigenvalues_ordered(p: &CoverParams) -> bool {
    let k = Surd::integer(p.n as i128 - 1);
    let m1 = Surd::integer(-1);
    k.cmp(&p.theta) == Ordering::Greater
        && p.theta.cmp(&m1) == Ordering::Greater
        && m1.cmp(&p.tau) == Ordering::Greater
        && !p.m_theta.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(x: i128) -> Surd {
        Surd::integer(x)
    }

    #[test]
    fn derive_thas_somma_parameters() {
        let p = derive_params(9, 3, 3).unwrap();
        assert_eq!(p.lambda, 1);
        assert_eq!(p.theta, int(2));
        assert_eq!(p.tau, int(-4));
        assert_eq!(p.m_theta_int(), Some(12));
        assert_eq!(p.m_tau_int(), Some(6));
        assert_eq!(p.v, 27);
        assert_eq!(p.frame_dimensions(), Some((3, 6)));
    }

    #[test]
    fn derive_hexagon_parameters() {
        let p = derive_params(3, 2, 1).unwrap();
        assert_eq!((p.lambda, p.theta.clone(), p.tau.clone()), (0, int(1), int(-2)));
        assert_eq!((p.m_theta_int(), p.m_tau_int()), (Some(2), Some(1)));
    }

    #[test]
    fn derive_icosahedron_parameters_exactly() {
        let p = derive_params(6, 2, 2).unwrap();
        assert_eq!(p.lambda, 2);
        assert_eq!(p.theta, Surd::sqrt_of(5));
        assert_eq!(p.tau, -Surd::sqrt_of(5));
        assert_eq!((p.m_theta_int(), p.m_tau_int()), (Some(3), Some(3)));
    }

    #[test]
    fn derive_rejects_negative_lambda() {
        assert!(matches!(
            derive_params(5, 3, 3),
            Err(ParamsError::NegativeLambda { lambda: -3, .. })
        ));
        assert!(derive_params(2, 2, 1).is_err());
        assert!(derive_params(5, 1, 1).is_err());
    }

    #[test]
    fn non_integral_multiplicities_are_flagged() {
        // (7, 2, 2): θ, τ = (−1 ± √25)/2 → 2, −3; m_θ = 3·7/5 is fractional
        let p = derive_params(7, 2, 2).unwrap();
        assert!(!p.multiplicities_integral());
    }

    #[test]
    fn family_b_substitution() {
        let e = family_b(6, 5).unwrap();
        assert_eq!((e.params.n, e.params.r, e.params.mu), (1225, 5, 205));
        assert_eq!(e.params.tau, int(-6));
        assert_eq!(e.params.theta, int(6 * 34));
        assert_eq!(e.degree_formula(), e.params.degree());
        let e = family_b(12, 11).unwrap();
        assert_eq!((e.params.n, e.params.r, e.params.mu), (20449, 11, 1705));
        let e = family_b(2, 3).unwrap();
        assert!(e.special);
        assert_eq!((e.params.n, e.params.r, e.params.mu), (9, 3, 3));
        assert!(family_b(7, 4).is_err());
        assert!(family_b(7, 3).is_err());
    }

    #[test]
    fn family_a_examples() {
        let p = family_a(&int(3), 2, MuForm::TMinusOneCubed).unwrap();
        assert_eq!((p.n, p.r, p.mu), (28, 2, 10));
        let p = family_a(&int(2), 2, MuForm::TMinusOneCubed).unwrap();
        assert_eq!((p.n, p.r, p.mu), (3, 2, 1));
        let p = family_a(&int(5), 2, MuForm::TMinusOneCubed).unwrap();
        assert_eq!((p.n, p.r, p.mu), (276, 2, 112));
        let p = family_a(&Surd::sqrt_of(5), 2, MuForm::TPlusOneCubed).unwrap();
        assert_eq!((p.n, p.r, p.mu), (6, 2, 2));
        // t = 2 with the other form gives μ = 0
        assert!(family_a(&int(2), 2, MuForm::TPlusOneCubed).is_err());
        assert!(family_a(&int(3), 4, MuForm::TPlusOneCubed).is_err());
        assert!(family_a(&Surd::sqrt_of(5), 4, MuForm::TMinusOneCubed).is_err());
        assert!(family_a(&int(3), 3, MuForm::TMinusOneCubed).is_err());
    }

    #[test]
    fn feasible_b_small_tables() {
        let list = |t_max| {
            feasible_b(t_max)
                .unwrap()
                .iter()
                .map(|e| (e.t, e.r, e.special))
                .collect::<Vec<_>>()
        };
        assert_eq!(list(2), vec![(2, 3, true)]);
        assert_eq!(list(5), vec![(2, 3, true)]);
        assert_eq!(
            list(12),
            vec![(2, 3, true), (6, 5, false), (8, 7, false), (11, 5, false), (12, 11, false)]
        );
    }

    #[test]
    fn feasible_a_contents() {
        let entries = feasible_a(5).unwrap();
        let triples: Vec<_> = entries
            .iter()
            .map(|e| (e.params.n, e.params.r, e.params.mu))
            .collect();
        for want in [(3, 2, 1), (6, 2, 2), (28, 2, 10), (276, 2, 112), (28, 4, 8)] {
            assert!(triples.contains(&want), "missing {want:?}");
        }
        assert_eq!(entries[0].source, FamilyASource::Sporadic);
        let general_t3: Vec<_> = feasible_a(3)
            .unwrap()
            .into_iter()
            .filter(|e| e.source == FamilyASource::GeneralR)
            .collect();
        assert!(general_t3.is_empty());
    }

    #[test]
    fn hoffman_examples() {
        let b = hoffman_bounds(&family_b(2, 3).unwrap());
        assert_eq!(b.clique, Ratio::from_integer(5));
        assert_eq!(b.coclique, Ratio::new(27, 5));
        let e = family_b(6, 5).unwrap();
        let b = hoffman_bounds(&e);
        assert_eq!(b.clique, Ratio::from_integer(205));
        assert_eq!(b.coclique, Ratio::new(1225, 41));
        assert_eq!(
            b.clique,
            Ratio::new((e.r * e.params.mu) as i128, (e.t - 1) as i128)
        );
    }

    #[test]
    fn serialises_flat_object() {
        let p = derive_params(6, 2, 2).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["lambda"], 2);
        assert_eq!(v["tau"]["b"], "-1");
        assert_eq!(v["tau"]["D"], 5);
        assert_eq!(v["m_theta"], 3);
    }
}
