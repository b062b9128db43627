//! Dense complex matrices and the cyclic Jacobi eigensolver for Hermitian
//! matrices.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::scalar::RealScalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T: RealScalar> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: RealScalar> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z.scale(s)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `self − s·I`.
    pub fn shift(&self, s: T) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)].re = m[(i, i)].re - s;
        }
        m
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn off_diagonal_norm(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s = s + self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> T {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }
}

impl<T: RealScalar> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: RealScalar> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Serialises as rows of `{re, im}` objects.
impl<T: RealScalar + Serialize> Serialize for CMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<T> {
            re: T,
            im: T,
        }
        let mut seq = serializer.serialize_seq(Some(self.n))?;
        for i in 0..self.n {
            let row: Vec<Entry<T>> = (0..self.n)
                .map(|j| Entry {
                    re: self[(i, j)].re,
                    im: self[(i, j)].im,
                })
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone)]
pub struct HermitianEigen<T: RealScalar> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix<T>,
    pub sweeps: usize,
    pub off_diagonal: T,
}

/// Off-diagonal Frobenius threshold used by [`hermitian_eigen`], relative to
/// `max(1, ‖A‖_F)`; never below a few ulps of the scalar type.
pub fn jacobi_tolerance<T: RealScalar>() -> T {
    T::lit(1e-13).max(T::epsilon() * T::lit(64.0))
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Each rotation first multiplies column `q` by `e^{−iφ}` so that the pivot
/// becomes the real number `|a_pq|`, then applies a real Jacobi rotation.
pub fn hermitian_eigen<T: RealScalar>(a: &CMatrix<T>) -> HermitianEigen<T> {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = CMatrix::identity(n);
    let threshold = jacobi_tolerance::<T>() * T::one().max(a.frobenius());
    let two = T::lit(2.0);
    let mut sweeps = 0;
    while sweeps < 100 && m.off_diagonal_norm() > threshold {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let b = m[(p, q)];
                let babs = b.norm();
                if babs <= T::min_positive_value() {
                    continue;
                }
                let phase = b / Complex::from(babs);
                let alpha = m[(p, p)].re;
                let beta = m[(q, q)].re;
                let zeta = (beta - alpha) / (two * babs);
                let t = if zeta >= T::zero() {
                    T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
                } else {
                    -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // U = diag(1, e^{−iφ}) · [[c, s], [−s, c]]
                let u_pp = Complex::from(c);
                let u_pq = Complex::from(s);
                let u_qp = phase.conj().scale(-s);
                let u_qq = phase.conj().scale(c);
                for k in 0..n {
                    let (x, y) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = x * u_pp + y * u_qp;
                    m[(k, q)] = x * u_pq + y * u_qq;
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * u_pp + y * u_qp;
                    v[(k, q)] = x * u_pq + y * u_qq;
                }
                for k in 0..n {
                    let (x, y) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = u_pp.conj() * x + u_qp.conj() * y;
                    m[(q, k)] = u_pq.conj() * x + u_qq.conj() * y;
                }
                m[(p, q)] = Complex::zero();
                m[(q, p)] = Complex::zero();
            }
        }
    }
    let off = m.off_diagonal_norm();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    HermitianEigen {
        values,
        vectors,
        sweeps,
        off_diagonal: off,
    }
}

/// Orthogonal projection onto the span of the given columns of `vectors`.
pub fn projection<T: RealScalar>(vectors: &CMatrix<T>, columns: &[usize]) -> CMatrix<T> {
    let n = vectors.dim();
    CMatrix::from_fn(n, |i, j| {
        columns
            .iter()
            .fold(Complex::zero(), |acc, &c| acc + vectors[(i, c)] * vectors[(j, c)].conj())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn diagonalises_complex_hermitian() {
        // eigenvalues of [[2, i], [−i, 2]] are 1 and 3
        let a = CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => c(0.0, 1.0),
            (1, 0) => c(0.0, -1.0),
            _ => c(2.0, 0.0),
        });
        let e = hermitian_eigen(&a);
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
        let v = &e.vectors;
        let recon = v.matmul(&CMatrix::from_fn(2, |i, j| if i == j { c(e.values[i], 0.0) } else { c(0.0, 0.0) })).matmul(&v.adjoint());
        assert!(recon.sub(&a).max_abs() < 1e-12);
    }

    #[test]
    fn larger_matrix_reconstructs() {
        let n = 9;
        let a = CMatrix::from_fn(n, |i, j| {
            let (lo, hi) = (i.min(j), i.max(j));
            let base = c(((lo * 7 + hi * 3) % 5) as f64 - 2.0, ((lo + 2 * hi) % 3) as f64 - 1.0);
            if i == j {
                c(base.re, 0.0)
            } else if i < j {
                base
            } else {
                base.conj()
            }
        });
        let e = hermitian_eigen(&a);
        let d = CMatrix::from_fn(n, |i, j| if i == j { c(e.values[i], 0.0) } else { c(0.0, 0.0) });
        let recon = e.vectors.matmul(&d).matmul(&e.vectors.adjoint());
        assert!(recon.sub(&a).max_abs() < 1e-11);
        let gram = e.vectors.adjoint().matmul(&e.vectors);
        assert!(gram.sub(&CMatrix::identity(n)).max_abs() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn single_precision_converges() {
        let a = CMatrix::<f32>::from_fn(3, |i, j| if i == j { Complex::new(0.0, 0.0) } else { Complex::new(-1.0, 0.0) });
        let e = hermitian_eigen(&a);
        assert!((e.values[0] + 2.0).abs() < 1e-5);
        assert!((e.values[2] - 1.0).abs() < 1e-5);
    }
}
