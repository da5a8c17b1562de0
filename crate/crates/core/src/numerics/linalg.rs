//! Minimal dense complex matrices for the Zeno projection operator
//! (M ≤ a few hundred, row-major).

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::sum::ComplexSum;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum::<ComplexSum>()
                    .value()
            })
            .collect()
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Conjugate transpose applied to a vector.
    pub fn adjoint_mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * v[i];
            }
        }
        out
    }

    pub fn pow(&self, mut n: u64) -> CMatrix {
        assert_eq!(self.rows, self.cols);
        let mut result = CMatrix::identity(self.rows);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Leading `n × n` block.
    pub fn leading_block(&self, n: usize) -> CMatrix {
        let n = n.min(self.rows).min(self.cols);
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(i, j)];
            }
        }
        out
    }

    /// Largest singular value by power iteration on A^H A.
    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        // deterministic, non-degenerate start vector
        let mut v: Vec<Complex64> = (0..self.cols)
            .map(|j| Complex64::new(1.0 + 0.1 * j as f64, 0.37 * j as f64).unit_or_one())
            .collect();
        normalize(&mut v);
        let mut sigma2 = 0.0;
        for _ in 0..500 {
            let av = self.mul_vec(&v);
            let mut w = self.adjoint_mul_vec(&av);
            let next = norm(&w);
            if next == 0.0 {
                return 0.0;
            }
            for x in &mut w {
                *x /= next;
            }
            let converged = (next - sigma2).abs() <= 1e-15 * next;
            sigma2 = next;
            v = w;
            if converged {
                break;
            }
        }
        sigma2.sqrt()
    }
}

impl CMatrix {
    /// True when ‖A‖₂ ≤ bound, decided by attempting a Cholesky
    /// factorisation of bound²·I − AᴴA (positive semidefinite iff the bound
    /// holds). Unlike power iteration this cannot under-report the norm.
    pub fn norm_at_most(&self, bound: f64) -> bool {
        let n = self.cols;
        let mut h = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ComplexSum::new();
                for k in 0..self.rows {
                    acc.add(self[(k, i)].conj() * self[(k, j)]);
                }
                h[(i, j)] = -acc.value();
            }
            h[(i, i)] += Complex64::new(bound * bound, 0.0);
        }
        // in-place Cholesky, lower triangle
        for j in 0..n {
            let mut d = h[(j, j)].re;
            for k in 0..j {
                d -= h[(j, k)].norm_sqr();
            }
            if d < 0.0 {
                return false;
            }
            let d = d.sqrt();
            h[(j, j)] = Complex64::new(d, 0.0);
            for i in (j + 1)..n {
                let mut s = h[(i, j)];
                for k in 0..j {
                    s -= h[(i, k)] * h[(j, k)].conj();
                }
                h[(i, j)] = if d > 0.0 {
                    s / d
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
        }
        true
    }
}

trait UnitOrOne {
    fn unit_or_one(self) -> Complex64;
}

impl UnitOrOne for Complex64 {
    fn unit_or_one(self) -> Complex64 {
        let n = self.norm();
        if n > 0.0 {
            self / n
        } else {
            Complex64::new(1.0, 0.0)
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let n = norm(v);
    for x in v {
        *x /= n;
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_matches_repeated_product() {
        let mut a = CMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] =
                    Complex64::new(0.1 * (i + 2 * j) as f64, 0.05 * i as f64 - 0.02 * j as f64);
            }
        }
        let p5 = a.pow(5);
        let mut q = a.clone();
        for _ in 0..4 {
            q = q.mul(&a);
        }
        assert!(p5.sub(&q).frobenius_norm() < 1e-14);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d = CMatrix::from_diagonal(&[
            Complex64::new(0.3, 0.4),
            Complex64::new(0.0, -0.9),
            Complex64::new(0.2, 0.0),
        ]);
        assert!((d.spectral_norm() - 0.9).abs() < 1e-10);
        assert!(d.norm_at_most(0.9 + 1e-12));
        assert!(!d.norm_at_most(0.89));
    }
}
