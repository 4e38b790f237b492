//! Small dense linear algebra over a [`CField`]: 2×2 group elements, dense
//! matrices, LU determinants, pivoted column selection, and singular values
//! (through nalgebra, in double precision).

use crate::ddouble::CField;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::ops::Mul;

/// A 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<F> {
    pub m: [[F; 2]; 2],
}

impl<F: CField> Mat2<F> {
    pub fn new(a: F, b: F, c: F, d: F) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Self::new(F::one(), F::zero(), F::zero(), F::one())
    }

    pub fn diag(a: F, d: F) -> Self {
        Self::new(a, F::zero(), F::zero(), d)
    }

    pub fn det(&self) -> F {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> F {
        self.m[0][0] + self.m[1][1]
    }

    /// Inverse through the adjugate divided by the determinant.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.m[1][1] / d, -self.m[0][1] / d, -self.m[1][0] / d, self.m[0][0] / d)
    }

    /// Largest entry modulus of `self − other`.
    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                r = r.max((self.m[i][j] - o.m[i][j]).abs());
            }
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn to_c64(&self) -> Mat2<Complex64> {
        Mat2 { m: [[self.m[0][0].to_c64(), self.m[0][1].to_c64()], [self.m[1][0].to_c64(), self.m[1][1].to_c64()]] }
    }

    pub fn from_c64(o: &Mat2<Complex64>) -> Self {
        Mat2 {
            m: [
                [F::from_c64(o.m[0][0]), F::from_c64(o.m[0][1])],
                [F::from_c64(o.m[1][0]), F::from_c64(o.m[1][1])],
            ],
        }
    }
}

impl<F: CField> Mul for Mat2<F> {
    type Output = Mat2<F>;
    fn mul(self, o: Mat2<F>) -> Mat2<F> {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl<F: CField> Serialize for Mat2<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .m
            .iter()
            .map(|r| r.iter().map(|v| { let z = v.to_c64(); [z.re, z.im] }).collect())
            .collect();
        rows.serialize(s)
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: CField> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: F) {
        let k = i * self.cols + j;
        self.data[k] = self.data[k] + v;
    }

    /// Copy `b` into the block whose top-left corner is `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix<F>) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: F) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| v * s).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-F::one()))
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut r = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    r.add_to(i, j, a * o.get(k, j));
                }
            }
        }
        r
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn to_c64(&self) -> Matrix<Complex64> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v.to_c64()).collect() }
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64())
    }

    /// Determinant by LU with partial pivoting, carried out in `F`.
    pub fn det(&self) -> F {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = F::one();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a.get(x, k).abs().total_cmp(&a.get(y, k).abs()))
                .expect("non-empty pivot range");
            if a.get(p, k).is_zero() {
                return F::zero();
            }
            if p != k {
                for j in 0..n {
                    let t = a.get(k, j);
                    a.set(k, j, a.get(p, j));
                    a.set(p, j, t);
                }
                det = -det;
            }
            let piv = a.get(k, k);
            det = det * piv;
            for i in k + 1..n {
                let f = a.get(i, k) / piv;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = a.get(i, j) - f * a.get(k, j);
                    a.set(i, j, v);
                }
            }
        }
        det
    }

    /// Columns chosen by Gaussian elimination with complete pivoting; the
    /// first `rank` pivot columns (in increasing index order) span the image.
    pub fn pivot_columns(&self, rank: usize) -> Vec<usize> {
        let mut a = self.to_c64();
        let (n, m) = (a.rows, a.cols);
        let mut rows_left: Vec<usize> = (0..n).collect();
        let mut cols_left: Vec<usize> = (0..m).collect();
        let mut chosen = Vec::with_capacity(rank);
        for _ in 0..rank.min(n).min(m) {
            let mut best = (0usize, 0usize, -1.0f64);
            for (ri, &r) in rows_left.iter().enumerate() {
                for (ci, &c) in cols_left.iter().enumerate() {
                    let v = a.get(r, c).norm();
                    if v > best.2 {
                        best = (ri, ci, v);
                    }
                }
            }
            let (ri, ci, _) = best;
            let (pr, pc) = (rows_left.remove(ri), cols_left.remove(ci));
            let piv = a.get(pr, pc);
            for &r in &rows_left {
                let f = a.get(r, pc) / piv;
                for &c in &cols_left {
                    let v = a.get(r, c) - f * a.get(pr, c);
                    a.set(r, c, v);
                }
            }
            chosen.push(pc);
        }
        chosen.sort_unstable();
        chosen
    }

    /// Singular values in descending order (double precision).
    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        let sv = self.to_nalgebra().singular_values();
        let mut v: Vec<f64> = sv.iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

impl<F: CField> Serialize for Matrix<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<[f64; 2]> = (0..self.cols)
                .map(|j| {
                    let z = self.get(i, j).to_c64();
                    [z.re, z.im]
                })
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddouble::Cdd;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mat2_inverse_and_det() {
        let a = Mat2::new(c(2.0, 1.0), c(1.0, 0.0), c(0.5, -1.0), c(3.0, 0.0));
        let p = a * a.inverse();
        assert!(p.max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let m = Matrix::from_fn(3, 3, |i, j| c((i * 3 + j) as f64 + 1.0, (i as f64) - (j as f64)));
        let g = |i, j| m.get(i, j);
        let cof = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
            - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
        assert!((m.det() - cof).norm() < 1e-12);
    }

    #[test]
    fn dd_det_of_permutation() {
        let mut m: Matrix<Cdd> = Matrix::zeros(3, 3);
        m.set(0, 1, Cdd::one());
        m.set(1, 0, Cdd::one());
        m.set(2, 2, Cdd::one());
        assert!((m.det().to_c64() + Complex64::new(1.0, 0.0)).norm() < 1e-30);
    }

    #[test]
    fn pivot_columns_skip_dependent_ones() {
        // column 1 = 2·column 0
        let m = Matrix::from_fn(2, 3, |i, j| match j {
            0 => c(i as f64 + 1.0, 0.0),
            1 => c(2.0 * (i as f64 + 1.0), 0.0),
            _ => c(if i == 0 { 1.0 } else { -1.0 }, 0.0),
        });
        let cols = m.pivot_columns(2);
        assert!(cols.contains(&2));
        assert_eq!(cols.len(), 2);
        assert_eq!(m.singular_values().len(), 2);
    }
}
