use super::{CMatrix, Hermitian, C64};
use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot at or below `PIVOT_TOL * max_i a_ii`
/// rejects the matrix as not positive definite.
pub const PIVOT_TOL: f64 = 1e-13;

/// Lower-triangular `L` with `L L^H = A` and a real positive diagonal.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: CMatrix,
}

impl Cholesky {
    pub fn factor(a: &Hermitian) -> Result<Self> {
        let n = a.dim();
        let src = a.as_matrix();
        let max_diag = (0..n).map(|i| src[(i, i)].re).fold(0.0_f64, f64::max);
        let tol = PIVOT_TOL * max_diag;
        let mut l = CMatrix::zeros(n);
        for j in 0..n {
            let (head, tail) = l_split(&mut l, j);
            let d = src[(j, j)].re - head[..j].iter().map(|z| z.norm_sqr()).sum::<f64>();
            if !(d > tol) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let djj = d.sqrt();
            head[j] = C64::new(djj, 0.0);
            let lj = &head[..j];
            let inv = 1.0 / djj;
            // rows below j
            for (offset, row) in tail.chunks_mut(n).enumerate() {
                let i = j + 1 + offset;
                let s: C64 = row[..j].iter().zip(lj).map(|(a, b)| a * b.conj()).sum();
                row[j] = (src[(i, j)] - s) * inv;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    pub fn lower(&self) -> &CMatrix {
        &self.l
    }

    pub(crate) fn scaled(&self, s: f64) -> Self {
        Self {
            l: self.l.scale(C64::new(s, 0.0)),
        }
    }

    /// Solves `L w = x`.
    pub fn solve_lower(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut w = Vec::with_capacity(n);
        for i in 0..n {
            let row = self.l.row(i);
            let s: C64 = row[..i].iter().zip(&w).map(|(a, b)| a * b).sum();
            w.push((x[i] - s) / row[i].re);
        }
        w
    }

    /// Solves `L^H v = w`.
    pub fn solve_upper(&self, w: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut v = w.to_vec();
        for i in (0..n).rev() {
            v[i] /= self.l[(i, i)].re;
            let vi = v[i];
            let row = self.l.row(i);
            for k in 0..i {
                v[k] -= row[k].conj() * vi;
            }
        }
        v
    }

    /// `A^{-1} x`.
    pub fn solve(&self, x: &[C64]) -> Vec<C64> {
        self.solve_upper(&self.solve_lower(x))
    }

    /// `x^H A^{-1} x = ||L^{-1} x||^2`, real and nonnegative by construction.
    pub fn inv_quad(&self, x: &[C64]) -> f64 {
        self.solve_lower(x).iter().map(|z| z.norm_sqr()).sum()
    }

    /// `log det A = 2 sum_i log L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.l[(i, i)].re.ln()).sum::<f64>()
    }

    /// `L^{-1}`, built row by row.
    pub fn inverse_lower(&self) -> CMatrix {
        let n = self.dim();
        let mut x = CMatrix::zeros(n);
        for i in 0..n {
            let lrow = self.l.row(i).to_vec();
            let mut acc = vec![C64::new(0.0, 0.0); n];
            for (k, lik) in lrow[..i].iter().enumerate() {
                for (a, xk) in acc[..=k].iter_mut().zip(x.row(k)) {
                    *a += lik * xk;
                }
            }
            let inv = 1.0 / lrow[i].re;
            let row = x.row_mut(i);
            for j in 0..i {
                row[j] = -acc[j] * inv;
            }
            row[i] = C64::new(inv, 0.0);
        }
        x
    }

    /// `Tr(A^{-1}) = ||L^{-1}||_F^2`.
    pub fn inv_trace(&self) -> f64 {
        let x = self.inverse_lower();
        x.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `A^{-1} = L^{-H} L^{-1}`.
    pub fn inverse(&self) -> Hermitian {
        let n = self.dim();
        let x = self.inverse_lower();
        let mut out = CMatrix::zeros(n);
        for k in 0..n {
            let row = x.row(k);
            for i in 0..=k {
                let ci = row[i].conj();
                let orow = out.row_mut(i);
                for j in 0..=i {
                    orow[j] += ci * row[j];
                }
            }
        }
        Hermitian::from_lower(out)
    }
}

/// Splits the factor storage into row `j` and the rows after it.
fn l_split(l: &mut CMatrix, j: usize) -> (&mut [C64], &mut [C64]) {
    let n = l.dim();
    l.as_mut_slice()[j * n..].split_at_mut(n)
}
