//! Small dense integer matrices for Rauzy bookkeeping.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> IntMatrix {
        IntMatrix { n, data: vec![BigInt::zero(); n * n] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> IntMatrix {
        let n = rows.len();
        let mut m = IntMatrix::zeros(n);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (c, &v) in row.iter().enumerate() {
                m.data[r * n + c] = BigInt::from(v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.n + c]
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.n + c] += v;
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.n.max(1)).map(|row| row.to_vec()).collect()
    }

    /// `self · rhs`, skipping zero entries of `rhs` (step matrices are sparse).
    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = IntMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let v = rhs.get(r, c);
                if v.is_zero() {
                    continue;
                }
                for i in 0..n {
                    let a = self.get(i, r);
                    if !a.is_zero() {
                        out.data[i * n + c] += a * v;
                    }
                }
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for c in 0..n {
                    a.swap(k * n + c, swap * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                    a[i * n + j] = v;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    /// `M·v` for a vector of scalars.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|r| {
                let mut acc = Scalar::zero(v[0].basis());
                for (c, x) in v.iter().enumerate() {
                    let m = self.get(r, c);
                    if m.is_one() {
                        acc = acc + x;
                    } else if !m.is_zero() {
                        acc = acc + x.scale(&BigRational::from_integer(m.clone()));
                    }
                }
                acc
            })
            .collect()
    }

    /// Solves `M·x = v` exactly; `None` when `M` is singular.
    pub fn solve(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let n = self.n;
        assert_eq!(v.len(), n);
        let mut a: Vec<Vec<BigRational>> =
            (0..n).map(|r| (0..n).map(|c| BigRational::from_integer(self.get(r, c).clone())).collect()).collect();
        let mut b: Vec<Scalar> = v.to_vec();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            b.swap(col, pivot);
            let inv = a[col][col].recip();
            for v in a[col].iter_mut() {
                *v = &*v * &inv;
            }
            b[col] = b[col].scale(&inv);
            let pivot_row = a[col].clone();
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &factor * y;
                }
                b[r] = &b[r] - &b[col].scale(&factor);
            }
        }
        Some(b)
    }

    /// Exact inverse; `None` when `M` is singular or the inverse is not
    /// integral.
    pub fn inverse(&self) -> Option<IntMatrix> {
        let n = self.n;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                (0..2 * n)
                    .map(|c| {
                        if c < n {
                            BigRational::from_integer(self.get(r, c).clone())
                        } else if c - n == r {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            let inv = a[col][col].recip();
            for v in a[col].iter_mut() {
                *v = &*v * &inv;
            }
            let pivot_row = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r == col || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &factor * y;
                }
            }
        }
        let mut m = IntMatrix::zeros(n);
        for (r, row) in a.iter().enumerate() {
            for c in 0..n {
                let v = &row[n + c];
                if !v.is_integer() {
                    return None;
                }
                m.data[r * n + c] = v.to_integer();
            }
        }
        Some(m)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.data.iter().map(|v| v.abs()).max().unwrap_or_default()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Basis;

    #[test]
    fn determinants() {
        assert_eq!(IntMatrix::identity(4).det(), BigInt::from(1));
        assert_eq!(IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).det(), BigInt::from(-1));
        assert_eq!(IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).det(), BigInt::from(-1));
        let m = IntMatrix::from_rows(&[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 1]]);
        // 2(3-2) - 0 + 1(1-3) = 0
        assert_eq!(m.det(), BigInt::from(0));
        let m = IntMatrix::from_rows(&[vec![0, 2, 1], vec![1, 0, 0], vec![3, 1, 1]]);
        // expand: 0 - 2(1-0) + 1(1-0) = -1
        assert_eq!(m.det(), BigInt::from(-1));
    }

    #[test]
    fn products_and_solves() {
        let a = IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]]);
        let b = IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]);
        assert_eq!(a.mul(&b), IntMatrix::from_rows(&[vec![2, 1], vec![1, 0]]));
        let basis = Basis::new(vec![2]).unwrap();
        let v = vec![Scalar::basis_element(&basis, &[2]).unwrap(), Scalar::from_integer(&basis, 1)];
        let x = a.solve(&v).unwrap();
        assert_eq!(a.apply(&x), v);
        assert_eq!(x[0], Scalar::from_integer(&basis, 1));
        assert!(IntMatrix::zeros(2).solve(&v).is_none());
    }

    #[test]
    fn inverses() {
        let a = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, IntMatrix::from_rows(&[vec![1, -1], vec![-1, 2]]));
        assert_eq!(a.mul(&inv), IntMatrix::identity(2));
        assert!(IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).inverse().is_none());
        assert!(IntMatrix::zeros(2).inverse().is_none());
    }
}
