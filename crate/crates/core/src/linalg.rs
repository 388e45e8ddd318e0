//! Small dense complex square matrices, row-major.

use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds from row-major data; `None` if the length is not a perfect square.
    pub fn from_vec(data: Vec<C64>) -> Option<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        (dim * dim == data.len()).then_some(Self { dim, data })
    }

    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Option<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return None;
            }
            data.extend_from_slice(r);
        }
        Some(Self { dim, data })
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Option<Self> {
        let c: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&c)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul: dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "matvec: dimension mismatch");
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self† v` without forming the adjoint.
    pub fn adjoint_matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "adjoint_matvec: dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n];
        for (row, vk) in self.data.chunks_exact(n).zip(v) {
            if *vk == ZERO {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * vk;
            }
        }
        out
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// max |A_ij - conj(A_ji)|
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// ⟨a|b⟩
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Tensor product of state vectors, left factor most significant.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn matmul_and_adjoint() {
        let a = CMatrix::from_rows(&[[c(1., 1.), c(2., 0.)], [c(0., -1.), c(3., 0.)]]).unwrap();
        let i = CMatrix::identity(2);
        assert_eq!(a.matmul(&i), a);
        let aa = a.adjoint();
        assert_eq!(aa[(0, 1)], c(0., 1.));
        assert_eq!(aa[(1, 0)], c(2., 0.));
        let v = vec![c(1., 0.), c(0., 1.)];
        assert_eq!(a.adjoint_matvec(&v), aa.matvec(&v));
    }

    #[test]
    fn kron_ordering_left_factor_major() {
        let z = CMatrix::from_real_rows(&[[1., 0.], [0., -1.]]).unwrap();
        let i = CMatrix::identity(2);
        let zi = z.kron(&i);
        let d: Vec<f64> = zi.diagonal().iter().map(|x| x.re).collect();
        assert_eq!(d, vec![1., 1., -1., -1.]);
        let e0 = [ONE, ZERO];
        let e1 = [ZERO, ONE];
        // |01>
        assert_eq!(kron_vec(&e0, &e1), vec![ZERO, ONE, ZERO, ZERO]);
    }

    #[test]
    fn from_vec_rejects_non_square() {
        assert!(CMatrix::from_vec(vec![ZERO; 3]).is_none());
        assert_eq!(CMatrix::from_vec(vec![ZERO; 9]).unwrap().dim(), 3);
    }
}
