//! Equiangular line systems from abelian covers.
//!
//! A character `χ` of the covering group `K` turns the cover into an `n × n`
//! Hermitian matrix `S` with root-of-unity entries and eigenvalues `θ, τ`.
//! Projecting onto either eigenspace and normalising the diagonal gives the
//! Gram matrix of `n` equiangular lines spanning a tight frame.

use std::collections::HashMap;

use num_complex::Complex;
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{covering_group, AnalysisError};
use crate::graph::{verify_cover, CoverGraph};
use crate::linalg::{hermitian_eigen, projection, CMatrix};
use crate::params::derive_params;
use crate::perm::Permutation;
use crate::scalar::RealScalar;

/// Default certificate tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("input is not a cover: {0}")]
    NotACover(String),
    #[error("covering group of order {order} is not abelian and regular on fibres of size {r}")]
    NotAbelianCover { order: u64, r: usize },
    #[error("character {0} is trivial")]
    TrivialCharacter(usize),
    #[error("character index {index} out of range; the group has {count} characters")]
    NoSuchCharacter { index: usize, count: usize },
    #[error("eigenvalue certification failed: {0}")]
    Uncertified(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// A linear character of an abelian permutation group, stored exactly:
/// element `g` maps to `exp(2πi · values[g] / exponent)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Character {
    pub exponent: u64,
    /// Exponents assigned to the chosen generators.
    pub on_generators: Vec<u64>,
    /// Exponent for each group element, in the order of the element list.
    pub values: Vec<u64>,
}

impl Character {
    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn kernel_size(&self) -> usize {
        self.values.iter().filter(|&&v| v == 0).count()
    }

    pub fn is_faithful(&self) -> bool {
        self.kernel_size() == 1
    }

    pub fn value<T: RealScalar>(&self, element: usize) -> Complex<T> {
        let angle = T::TAU() * T::lit(self.values[element] as f64) / T::lit(self.exponent as f64);
        Complex::from_polar(T::one(), angle)
    }
}

/// All characters of the abelian group with the given elements, sorted by
/// their generator exponents; index 0 is the trivial character.
///
/// Generators are chosen greedily from `elements`; the exponent `e` is the
/// lcm of their orders, and every tuple of generator values consistent with
/// the Cayley graph is kept.
pub fn characters(elements: &[Permutation]) -> Vec<Character> {
    if elements.is_empty() {
        return Vec::new();
    }
    let degree = elements[0].degree();
    let index: HashMap<&Permutation, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let identity = index[&Permutation::identity(degree)];

    // greedy generators: each one enlarges the generated subgroup
    let mut gens: Vec<usize> = Vec::new();
    let mut span = vec![false; elements.len()];
    span[identity] = true;
    for i in 0..elements.len() {
        if span[i] {
            continue;
        }
        gens.push(i);
        let mut members: Vec<usize> = (0..elements.len()).filter(|&j| span[j]).collect();
        let mut k = 0;
        while k < members.len() {
            let x = &elements[members[k]];
            for &g in &gens {
                let y = index[&x.then(&elements[g])];
                if !span[y] {
                    span[y] = true;
                    members.push(y);
                }
            }
            k += 1;
        }
    }
    let orders: Vec<u64> = gens.iter().map(|&g| elements[g].order()).collect();
    let exponent = orders.iter().fold(1u64, |acc, &o| acc.lcm(&o));

    let mut out = Vec::new();
    let mut tuple = vec![0u64; gens.len()];
    loop {
        if let Some(values) = propagate_character(elements, &index, identity, &gens, &tuple, exponent) {
            out.push(Character {
                exponent,
                on_generators: tuple.iter().zip(&orders).map(|(&c, &o)| c * (exponent / o)).collect(),
                values,
            });
        }
        // odometer over c_i ∈ 0..ord(g_i)
        let mut i = 0;
        loop {
            if i == tuple.len() {
                out.sort_by(|a, b| a.on_generators.cmp(&b.on_generators));
                return out;
            }
            tuple[i] += 1;
            if tuple[i] < orders[i] {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

fn propagate_character(
    elements: &[Permutation],
    index: &HashMap<&Permutation, usize>,
    identity: usize,
    gens: &[usize],
    tuple: &[u64],
    exponent: u64,
) -> Option<Vec<u64>> {
    let step: Vec<u64> = gens
        .iter()
        .zip(tuple)
        .map(|(&g, &c)| c * (exponent / elements[g].order()))
        .collect();
    let mut values = vec![u64::MAX; elements.len()];
    values[identity] = 0;
    let mut queue = vec![identity];
    let mut k = 0;
    while k < queue.len() {
        let x = queue[k];
        k += 1;
        for (&g, &s) in gens.iter().zip(&step) {
            let y = index[&elements[x].then(&elements[g])];
            let v = (values[x] + s) % exponent;
            if values[y] == u64::MAX {
                values[y] = v;
                queue.push(y);
            } else if values[y] != v {
                return None;
            }
        }
    }
    Some(values)
}

/// Eigenvalue certificate of a character matrix.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumCertificate {
    pub theta: f64,
    pub tau: f64,
    pub expected_theta_multiplicity: Option<usize>,
    pub expected_tau_multiplicity: Option<usize>,
    pub theta_multiplicity: usize,
    pub tau_multiplicity: usize,
    /// Eigenvalues farther than the cluster tolerance from both θ and τ.
    pub unassigned: usize,
    /// Largest distance from an eigenvalue to the nearer of θ, τ.
    pub max_deviation: f64,
    pub hermitian_defect: f64,
    pub cluster_tolerance: f64,
    pub jacobi_sweeps: usize,
    pub certified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterMatrix<T: RealScalar + Serialize> {
    pub matrix: CMatrix<T>,
    /// Least vertex of each fibre, the reference point for the matrix entries.
    pub base_vertices: Vec<usize>,
    pub character: Character,
    pub character_index: usize,
    pub n: usize,
    pub r: usize,
    pub certificate: SpectrumCertificate,
    #[serde(skip)]
    eigenvalues: Vec<T>,
    #[serde(skip)]
    eigenvectors: CMatrix<T>,
}

/// Tolerance used to assign computed eigenvalues to θ or τ.
pub fn cluster_tolerance<T: RealScalar>() -> f64 {
    1e-8f64.max(T::epsilon().to_f64().unwrap_or(0.0) * 1e4)
}

/// Covering group elements and characters of an abelian cover.
pub fn cover_characters(g: &CoverGraph) -> Result<(Vec<Permutation>, Vec<Character>), FrameError> {
    let k = covering_group(g, None)?;
    if !k.abelian_cover {
        return Err(FrameError::NotAbelianCover { order: k.order, r: g.r() });
    }
    let chars = characters(&k.elements);
    Ok((k.elements, chars))
}

/// The character matrix of `g` for character number `index` of
/// [`cover_characters`], with its spectrum certified against `θ, τ`.
pub fn character_matrix<T: RealScalar + Serialize>(g: &CoverGraph, index: usize) -> Result<CharacterMatrix<T>, FrameError> {
    let report = verify_cover(g);
    let mu = match (report.is_cover, report.mu) {
        (true, Some(mu)) => mu,
        _ => return Err(FrameError::NotACover(format!("failed axioms {:?}", report.failed_axioms()))),
    };
    let params = derive_params(g.n() as u64, g.r() as u64, mu as u64).map_err(|e| FrameError::NotACover(e.to_string()))?;
    let (elements, chars) = cover_characters(g)?;
    let chi = chars.get(index).cloned().ok_or(FrameError::NoSuchCharacter {
        index,
        count: chars.len(),
    })?;
    if chi.is_trivial() {
        return Err(FrameError::TrivialCharacter(index));
    }
    let n = g.n();
    let base: Vec<usize> = g.fibres().iter().map(|f| f[0]).collect();
    // element of K sending a given vertex to the base vertex of its fibre
    let mut to_base = vec![usize::MAX; g.vertex_count()];
    for (i, e) in elements.iter().enumerate() {
        for &b in &base {
            let pre = e.inverse().apply(b);
            to_base[pre] = i;
        }
    }
    let mut m = CMatrix::<T>::zeros(n);
    for f in 0..n {
        for h in 0..n {
            if f == h {
                continue;
            }
            let partner = g.matched(base[f], h).ok_or_else(|| FrameError::NotACover(format!("fibres {f} and {h} not matched")))?;
            m[(f, h)] = chi.value(to_base[partner]);
        }
    }
    let theta = params.theta.to_f64();
    let tau = params.tau.to_f64();
    let eig = hermitian_eigen(&m);
    let tol = cluster_tolerance::<T>();
    let (mut mt, mut mtau, mut unassigned, mut dev) = (0, 0, 0, 0.0f64);
    for &x in &eig.values {
        let x = x.to_f64().unwrap_or(f64::NAN);
        let (dt, du) = ((x - theta).abs(), (x - tau).abs());
        dev = dev.max(dt.min(du));
        if dt <= tol {
            mt += 1;
        } else if du <= tol {
            mtau += 1;
        } else {
            unassigned += 1;
        }
    }
    let nf = n as f64;
    let integral = |x: f64| (x - x.round()).abs() < 1e-9 && x > 0.0;
    let exp_theta = -tau * nf / (theta - tau);
    let exp_tau = theta * nf / (theta - tau);
    let expected_theta = integral(exp_theta).then(|| exp_theta.round() as usize);
    let expected_tau = integral(exp_tau).then(|| exp_tau.round() as usize);
    let certified = unassigned == 0 && expected_theta == Some(mt) && expected_tau == Some(mtau);
    let certificate = SpectrumCertificate {
        theta,
        tau,
        expected_theta_multiplicity: expected_theta,
        expected_tau_multiplicity: expected_tau,
        theta_multiplicity: mt,
        tau_multiplicity: mtau,
        unassigned,
        max_deviation: dev,
        hermitian_defect: m.hermitian_defect().to_f64().unwrap_or(f64::NAN),
        cluster_tolerance: tol,
        jacobi_sweeps: eig.sweeps,
        certified,
    };
    Ok(CharacterMatrix {
        matrix: m,
        base_vertices: base,
        character: chi,
        character_index: index,
        n,
        r: g.r(),
        certificate,
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
    })
}

impl<T: RealScalar + Serialize> CharacterMatrix<T> {
    /// Computed eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }
}

/// Which eigenspace of the character matrix carries the lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// The θ-eigenspace; dimension is the θ multiplicity.
    Theta,
    /// The τ-eigenspace; dimension is the τ multiplicity.
    Tau,
}

/// Cover data used for the smallest-eigenvalue endpoint check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauContext {
    pub tau: f64,
    pub n: usize,
    pub r: usize,
}

/// Position of `τ` relative to the endpoints of the interval that a cover
/// attaining the absolute bound must satisfy. The endpoints are reported as
/// computed; for very small `n` the even-`r` expressions are out of order.
#[derive(Debug, Clone, Serialize)]
pub struct TauEndpoints {
    pub tau: f64,
    pub even_r: bool,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
    pub at_lower: bool,
    pub at_upper: bool,
}

pub fn tau_endpoints(ctx: TauContext, tol: f64) -> TauEndpoints {
    let n = ctx.n as f64;
    let even_r = ctx.r.is_multiple_of(2);
    let (lower, upper) = if even_r {
        let s = (8.0 * n + 1.0).sqrt();
        (-0.5 * ((n - 1.0) * (s - 3.0)).sqrt(), -(0.5 * (s + 3.0)).sqrt())
    } else {
        let s = n.sqrt();
        (-(s - 1.0) * (s + 1.0).sqrt(), -(s + 1.0).sqrt())
    };
    let tau = ctx.tau;
    TauEndpoints {
        tau,
        even_r,
        lower,
        upper,
        within: lower - tol <= tau && tau <= upper + tol,
        at_lower: (tau - lower).abs() <= tol,
        at_upper: (tau - upper).abs() <= tol,
    }
}

/// Checks on a Gram matrix; every deviation is reported alongside its flag.
#[derive(Debug, Clone, Serialize)]
pub struct EtfCertificate {
    pub tolerance: f64,
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub equiangular_deviation: f64,
    pub equiangular: bool,
    pub diagonal_deviation: f64,
    /// `‖G² − (n/d)G‖_max`.
    pub tightness_residual: f64,
    pub tight: bool,
    /// `d(1−α²)/(1−dα²)`, infinite when `dα² = 1`.
    pub relative_bound: f64,
    pub relative_bound_equality: bool,
    /// `|α² − (n−d)/(d(n−1))|`.
    pub angle_identity_deviation: f64,
    /// Largest imaginary part of an entry.
    pub imaginary_part: f64,
    pub is_real: bool,
    /// `n = d²`.
    pub sic: bool,
    /// `n = d(d+1)/2`.
    pub real_absolute_bound: bool,
    /// The absolute bound of the field the Gram matrix lives in.
    pub absolute_bound_attained: bool,
    pub tau_endpoints: Option<TauEndpoints>,
    /// Equiangular, tight and meeting the relative bound.
    pub passed: bool,
}

/// Equiangularity, tightness, relative and absolute bound checks for the
/// Gram matrix of `n` unit vectors spanning dimension `d`.
pub fn verify_etf<T: RealScalar>(gram: &CMatrix<T>, d: usize, tol: f64, tau: Option<TauContext>) -> EtfCertificate {
    let n = gram.dim();
    let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let mut moduli = Vec::with_capacity(n * n.saturating_sub(1));
    let mut diag_dev = 0.0f64;
    let mut imag = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let z = gram[(i, j)];
            imag = imag.max(f(z.im).abs());
            if i == j {
                diag_dev = diag_dev.max((f(z.re) - 1.0).abs().max(f(z.im).abs()));
            } else {
                moduli.push(f(z.norm()));
            }
        }
    }
    let alpha = if moduli.is_empty() { 0.0 } else { moduli.iter().sum::<f64>() / moduli.len() as f64 };
    let eq_dev = moduli.iter().fold(0.0f64, |acc, &m| acc.max((m - alpha).abs()));
    let residual = if d == 0 {
        f64::INFINITY
    } else {
        f(gram.matmul(gram).sub(&gram.scale(T::lit(n as f64 / d as f64))).max_abs())
    };
    let (nf, df, a2) = (n as f64, d as f64, alpha * alpha);
    let denom = 1.0 - df * a2;
    let relative_bound = if denom.abs() <= tol { f64::INFINITY } else { df * (1.0 - a2) / denom };
    let relative_bound_equality = relative_bound.is_finite() && (relative_bound - nf).abs() <= tol * nf.max(1.0);
    let angle_identity_deviation = if n > 1 && d > 0 { (a2 - (nf - df) / (df * (nf - 1.0))).abs() } else { f64::INFINITY };
    let is_real = imag <= tol;
    let sic = n == d * d;
    let real_absolute_bound = n == d * (d + 1) / 2;
    let equiangular = eq_dev <= tol;
    let tight = residual <= tol;
    EtfCertificate {
        tolerance: tol,
        n,
        d,
        alpha,
        equiangular_deviation: eq_dev,
        equiangular,
        diagonal_deviation: diag_dev,
        tightness_residual: residual,
        tight,
        relative_bound,
        relative_bound_equality,
        angle_identity_deviation,
        imaginary_part: imag,
        is_real,
        sic,
        real_absolute_bound,
        absolute_bound_attained: if is_real { real_absolute_bound } else { sic },
        tau_endpoints: tau.map(|t| tau_endpoints(t, tol)),
        passed: equiangular && tight && relative_bound_equality && diag_dev <= tol,
    }
}

/// `n` equiangular lines in dimension `d`, given by their Gram matrix.
#[derive(Debug, Clone, Serialize)]
pub struct LineSystem<T: RealScalar + Serialize> {
    pub d: usize,
    pub n: usize,
    pub alpha: f64,
    pub side: Side,
    pub gram: CMatrix<T>,
    pub certificates: EtfCertificate,
    #[serde(skip)]
    tau_context: Option<TauContext>,
}

/// Lines from the chosen eigenspace of a certified character matrix, with
/// certificates evaluated at `tol`.
pub fn extract_lines<T: RealScalar + Serialize>(s: &CharacterMatrix<T>, side: Side, tol: f64) -> Result<LineSystem<T>, FrameError> {
    if !s.certificate.certified {
        return Err(FrameError::Uncertified(format!(
            "multiplicities θ: {}, τ: {}, unassigned: {}, max deviation {:e}",
            s.certificate.theta_multiplicity, s.certificate.tau_multiplicity, s.certificate.unassigned, s.certificate.max_deviation
        )));
    }
    let target = match side {
        Side::Theta => s.certificate.theta,
        Side::Tau => s.certificate.tau,
    };
    let tol_cluster = s.certificate.cluster_tolerance;
    let columns: Vec<usize> = (0..s.n)
        .filter(|&i| (s.eigenvalues[i].to_f64().unwrap_or(f64::NAN) - target).abs() <= tol_cluster)
        .collect();
    let d = columns.len();
    let p = projection(&s.eigenvectors, &columns);
    let gram = CMatrix::from_fn(s.n, |i, j| {
        let norm = (p[(i, i)].re * p[(j, j)].re).sqrt();
        p[(i, j)] / Complex::from(norm)
    });
    let ctx = TauContext {
        tau: s.certificate.tau,
        n: s.n,
        r: s.r,
    };
    let certificates = verify_etf(&gram, d, tol, Some(ctx));
    Ok(LineSystem {
        d,
        n: s.n,
        alpha: certificates.alpha,
        side,
        gram,
        certificates,
        tau_context: Some(ctx),
    })
}

impl<T: RealScalar + Serialize> LineSystem<T> {
    /// Re-runs the certificates at another tolerance.
    pub fn verify(&self, tol: f64) -> EtfCertificate {
        verify_etf(&self.gram, self.d, tol, self.tau_context)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{hexagon, thas_somma};

    #[test]
    fn cyclic_characters() {
        let ts = thas_somma(3, 1).unwrap();
        let (elements, chars) = cover_characters(&ts).unwrap();
        assert_eq!(elements.len(), 3);
        assert_eq!(chars.len(), 3);
        assert!(chars[0].is_trivial());
        assert!(chars[1].is_faithful() && chars[2].is_faithful());
    }

    #[test]
    fn klein_four_characters() {
        let ts = thas_somma(4, 1).unwrap();
        let (_, chars) = cover_characters(&ts).unwrap();
        assert_eq!(chars.len(), 4);
        assert!(chars[1..].iter().all(|c| c.kernel_size() == 2));
    }

    #[test]
    fn hexagon_matrix() {
        let s = character_matrix::<f64>(&hexagon(), 1).unwrap();
        assert!(s.certificate.certified);
        assert_eq!((s.certificate.theta_multiplicity, s.certificate.tau_multiplicity), (2, 1));
        for i in 0..3 {
            for j in 0..3 {
                let z = s.matrix[(i, j)];
                assert!(z.im.abs() < 1e-15);
                assert!(if i == j { z.re == 0.0 } else { (z.re.abs() - 1.0).abs() < 1e-15 });
            }
        }
        let lines = extract_lines(&s, Side::Theta, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(lines.d, 2);
        assert!((lines.alpha - 0.5).abs() < 1e-12);
        assert!(lines.certificates.passed && lines.certificates.real_absolute_bound && !lines.certificates.sic);
        let ends = lines.certificates.tau_endpoints.unwrap();
        assert!(ends.at_upper);
    }

    #[test]
    fn trivial_character_rejected() {
        assert_eq!(character_matrix::<f64>(&hexagon(), 0).unwrap_err(), FrameError::TrivialCharacter(0));
    }
}
