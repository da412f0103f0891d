//! Minimal dense complex linear algebra.
//!
//! The assemblies in this crate are custom enough (stacked block operators,
//! rank-one updates, quadruple-product traces) that a thin row-major matrix
//! type is simpler than pulling in a full linear-algebra stack. Sizes stay
//! small: the largest matrices are `LN x LN` with `LN` of a few hundred.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Complex vector helpers on `&[C64]`.
pub mod vec {
    use super::C64;

    /// Hermitian inner product `a^H b`.
    pub fn dot_h(a: &[C64], b: &[C64]) -> C64 {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    /// Squared Euclidean norm.
    pub fn norm2(a: &[C64]) -> f64 {
        a.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn scale(a: &[C64], c: C64) -> Vec<C64> {
        a.iter().map(|x| x * c).collect()
    }

    pub fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    /// `y += c * x`
    pub fn axpy(y: &mut [C64], c: C64, x: &[C64]) {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += c * xi;
        }
    }

    pub fn zeros(n: usize) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); n]
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "mul_vec dims");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `y = A^H x`
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.rows, x.len(), "adjoint_mul_vec dims");
        let mut y = vec![C64::new(0.0, 0.0); self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for (j, yj) in y.iter_mut().enumerate() {
                *yj += self.at(i, j).conj() * xi;
            }
        }
        y
    }

    /// `C = A * B`
    pub fn mul(&self, b: &CMat) -> CMat {
        assert_eq!(self.cols, b.rows, "mul dims");
        let mut c = CMat::zeros(self.rows, b.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let brow = b.row(k);
                let crow = &mut c.data[i * b.cols..(i + 1) * b.cols];
                for (cj, bj) in crow.iter_mut().zip(brow) {
                    *cj += a * bj;
                }
            }
        }
        c
    }

    /// `C = A^H * B`
    pub fn adjoint_mul(&self, b: &CMat) -> CMat {
        assert_eq!(self.rows, b.rows, "adjoint_mul dims");
        let mut c = CMat::zeros(self.cols, b.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self.at(k, i).conj();
                let brow = b.row(k);
                let crow = &mut c.data[i * b.cols..(i + 1) * b.cols];
                for (cj, bj) in crow.iter_mut().zip(brow) {
                    *cj += a * bj;
                }
            }
        }
        c
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i))
    }

    pub fn conj(&self) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, c: C64) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * c).collect() }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: C64, other: &CMat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add_scaled dims");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// Rank-one update `self += c * w w^H`.
    pub fn add_outer(&mut self, c: C64, w: &[C64]) {
        assert_eq!(self.rows, w.len());
        assert_eq!(self.cols, w.len());
        for i in 0..self.rows {
            let wi = c * w[i];
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (r, wj) in row.iter_mut().zip(w) {
                *r += wi * wj.conj();
            }
        }
    }

    /// `self += c * diag(d)` where `d` is real.
    pub fn add_diag(&mut self, c: f64, d: &[f64]) {
        assert_eq!(self.rows, d.len());
        for (i, di) in d.iter().enumerate() {
            self.data[i * self.cols + i] += C64::new(c * di, 0.0);
        }
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.at(i, i)).sum()
    }

    /// `tr(self * b)` without forming the product.
    pub fn trace_mul(&self, b: &CMat) -> C64 {
        assert_eq!(self.cols, b.rows);
        assert_eq!(b.cols, self.rows);
        let mut t = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                t += self.at(i, k) * b.at(k, i);
            }
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max deviation from Hermitian symmetry, `max |A - A^H|`.
    pub fn hermitian_error(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut e: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                e = e.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gram_is_hermitian_and_matches_naive() {
        let a = CMat::from_fn(3, 2, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let g = a.adjoint_mul(&a);
        assert!(g.hermitian_error() < 1e-12);
        for i in 0..2 {
            for j in 0..2 {
                let mut s = c(0.0, 0.0);
                for k in 0..3 {
                    s += a.at(k, i).conj() * a.at(k, j);
                }
                assert!((g.at(i, j) - s).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn trace_mul_matches_product_trace() {
        let a = CMat::from_fn(3, 4, |i, j| c(i as f64, j as f64 * 0.3));
        let b = CMat::from_fn(4, 3, |i, j| c(0.1 * i as f64 - 1.0, j as f64));
        let t1 = a.trace_mul(&b);
        let t2 = a.mul(&b).trace();
        assert!((t1 - t2).norm() < 1e-12);
    }

    #[test]
    fn outer_update_matches_definition() {
        let w = vec![c(1.0, 2.0), c(-0.5, 0.25)];
        let mut h = CMat::zeros(2, 2);
        h.add_outer(c(2.0, 0.0), &w);
        for i in 0..2 {
            for j in 0..2 {
                let want = c(2.0, 0.0) * w[i] * w[j].conj();
                assert!((h.at(i, j) - want).norm() < 1e-12);
            }
        }
    }
}
