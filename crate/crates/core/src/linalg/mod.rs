//! Dense complex Hermitian linear algebra.
//!
//! Everything in the estimators is expressed with three value types:
//! [`ComplexVector`], [`Hermitian`] (exactly Hermitian by construction) and
//! [`HermitianPDS`], a Hermitian matrix certified positive definite by a
//! successful Cholesky factorization that it carries along.

mod cholesky;
mod dense;
pub mod io;

pub use cholesky::Cholesky;
pub use dense::CMatrix;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Complex column vector with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector(Vec<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("empty vector"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("vector has non-finite entries"));
        }
        Ok(Self(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    /// Canonical basis vector `e_index` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[index] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self(self.0.iter().map(|z| z * c).collect())
    }

    /// Inner product `self^H other`.
    pub fn dot(&self, other: &ComplexVector) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn add(&self, other: &ComplexVector) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Square complex matrix whose entries satisfy `a[i][j] == conj(a[j][i])`
/// exactly. The lower triangle is authoritative at construction time; the
/// upper triangle is mirrored from it and diagonal imaginary parts are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(c, 0.0);
        }
        Self(m)
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = CMatrix::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Self(m)
    }

    /// Builds from a generator evaluated on the lower triangle (`i >= j`).
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m[(i, j)] = f(i, j);
            }
        }
        Self::from_lower(m)
    }

    /// Takes the lower triangle of `m` and mirrors it.
    pub fn from_lower(mut m: CMatrix) -> Self {
        let n = m.dim();
        for i in 0..n {
            m[(i, i)].im = 0.0;
            for j in 0..i {
                m[(j, i)] = m[(i, j)].conj();
            }
        }
        Self(m)
    }

    /// `(m + m^H) / 2`, for products that are Hermitian up to rounding.
    pub fn hermitian_part(m: &CMatrix) -> Self {
        let n = m.dim();
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                out[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            }
        }
        Self::from_lower(out)
    }

    /// Sum of `weights[n] * x_n x_n^H`.
    pub fn weighted_outer_sum<'a>(
        n: usize,
        terms: impl IntoIterator<Item = (f64, &'a ComplexVector)>,
    ) -> Self {
        let mut acc = CMatrix::zeros(n);
        for (w, x) in terms {
            let xs = x.as_slice();
            for i in 0..n {
                let xi = xs[i] * w;
                let row = acc.row_mut(i);
                for (j, xj) in xs[..=i].iter().enumerate() {
                    row[j] += xi * xj.conj();
                }
            }
        }
        Self::from_lower(acc)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.0.frob_norm()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(C64::new(c, 0.0)))
    }

    pub fn add(&self, other: &Hermitian) -> Self {
        Self(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &Hermitian) -> Self {
        Self(self.0.sub(&other.0))
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: f64, other: &Hermitian, b: f64) -> Self {
        Self(self.0.scale(C64::new(a, 0.0)).add(&other.0.scale(C64::new(b, 0.0))))
    }

    /// Real inner product `Tr(self * other)`.
    pub fn inner(&self, other: &Hermitian) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij)
                s += (self.0[(i, j)] * other.0[(i, j)].conj()).re;
            }
        }
        s
    }

    /// `x^H A x`, real by Hermitian symmetry.
    pub fn quad(&self, x: &ComplexVector) -> f64 {
        let xs = x.as_slice();
        let mut s = C64::new(0.0, 0.0);
        for (i, xi) in xs.iter().enumerate() {
            let row = self.0.row(i);
            let ax: C64 = row.iter().zip(xs).map(|(a, b)| a * b).sum();
            s += xi.conj() * ax;
        }
        s.re
    }

    pub fn matvec(&self, x: &ComplexVector) -> ComplexVector {
        ComplexVector(self.0.matvec(x.as_slice()))
    }
}

/// Hermitian positive definite matrix together with its Cholesky factor.
///
/// Construction fails with [`Error::NotPositiveDefinite`] whenever the
/// factorization meets a pivot at or below `1e-13 * max_i a_ii`.
#[derive(Clone, Debug)]
pub struct HermitianPDS {
    matrix: Hermitian,
    chol: Cholesky,
}

impl PartialEq for HermitianPDS {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl HermitianPDS {
    pub fn new(matrix: Hermitian) -> Result<Self> {
        let chol = Cholesky::factor(&matrix)?;
        Ok(Self { matrix, chol })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Hermitian::identity(n)).expect("identity is positive definite")
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::new(Hermitian::diagonal(d))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Hermitian {
        &self.matrix
    }

    pub fn into_matrix(self) -> Hermitian {
        self.matrix
    }

    pub fn factor(&self) -> &Cholesky {
        &self.chol
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix.get(i, j)
    }

    /// `c * A` for `c > 0`, reusing the factorization (`sqrt(c) * L`).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("scale factor {c} must be positive")));
        }
        Ok(Self {
            matrix: self.matrix.scale(c),
            chol: self.chol.scaled(c.sqrt()),
        })
    }

    /// `x^H A^{-1} x` through a triangular solve; the explicit inverse is never formed.
    pub fn quad_form(&self, x: &ComplexVector) -> Result<f64> {
        self.check_dim(x)?;
        if x.norm_sqr() == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.chol.inv_quad(x.as_slice()))
    }

    /// `L^{-1} x`; `whiten(p)^H whiten(y) = p^H A^{-1} y`.
    pub fn whiten(&self, x: &ComplexVector) -> Result<ComplexVector> {
        self.check_dim(x)?;
        Ok(ComplexVector(self.chol.solve_lower(x.as_slice())))
    }

    pub fn solve(&self, x: &ComplexVector) -> Result<ComplexVector> {
        self.check_dim(x)?;
        Ok(ComplexVector(self.chol.solve(x.as_slice())))
    }

    pub fn inv_trace(&self) -> f64 {
        self.chol.inv_trace()
    }

    pub fn log_det(&self) -> f64 {
        self.chol.log_det()
    }

    pub fn frob_norm(&self) -> f64 {
        self.matrix.frob_norm()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn inverse(&self) -> Hermitian {
        self.chol.inverse()
    }

    fn check_dim(&self, x: &ComplexVector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }
}

/// `||a - b||_F / ||b||_F`.
pub fn relative_frob_distance(a: &Hermitian, b: &Hermitian) -> f64 {
    a.sub(b).frob_norm() / b.frob_norm()
}
