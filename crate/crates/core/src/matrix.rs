//! Dense row-major matrices over either scalar backend.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{FloatScalar, Scalar};

/// Relative pivot threshold used by float elimination unless overridden.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-8;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer literal rows; panics on ragged input (test and constant helper).
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| T::from_int(x)).collect())
                .collect(),
        )
        .expect("ragged literal")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { T::zero() })
    }

    pub fn scalar(x: T) -> Self {
        Matrix {
            rows: 1,
            cols: 1,
            data: vec![x],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: T) {
        self.data[i * self.cols + j] = x;
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(T::magnitude).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x.to_complex().norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conj(&self) -> Self {
        self.map(T::conj)
    }

    pub fn real_part(&self) -> Self {
        self.map(T::real_part)
    }

    pub fn imag_part(&self) -> Self {
        self.map(T::imag_part)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_skew(&self) -> bool {
        self.is_square() && *self == -&self.transpose()
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.mul(s))
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    fn zip(&self, other: &Self, f: impl Fn(&T, &T) -> T, what: &str) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "cannot {what} {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip(other, T::add, "add")
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, T::sub, "subtract")
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("power of a non-square matrix".into()));
        }
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.multiply(self)?;
        }
        Ok(out)
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn direct_sum(blocks: &[Self]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn hstack(blocks: &[Self]) -> Result<Self> {
        let r = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != r) {
            return Err(Error::Shape("hstack row mismatch".into()));
        }
        let c = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(r, c);
        let mut at = 0;
        for b in blocks {
            out.set_block(0, at, b);
            at += b.cols;
        }
        Ok(out)
    }

    pub fn vstack(blocks: &[Self]) -> Result<Self> {
        let c = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != c) {
            return Err(Error::Shape("vstack column mismatch".into()));
        }
        let r = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(r, c);
        let mut at = 0;
        for b in blocks {
            out.set_block(at, 0, b);
            at += b.rows;
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self.get(i / other.rows, j / other.cols)
                .mul(other.get(i % other.rows, j % other.cols))
        })
    }

    pub fn to_float(&self) -> Matrix<FloatScalar> {
        self.map(|x| FloatScalar(x.to_complex()))
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape(format!("inverse of a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = pick_pivot(&a, col, col, scale, DEFAULT_FLOAT_TOL).ok_or(Error::SingularMatrix)?;
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let p = a.get(col, col).inv()?;
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                a.axpy_row(r, col, &f);
                inv.axpy_row(r, col, &f);
            }
        }
        Ok(inv)
    }

    pub fn determinant(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let Some(piv) = pick_pivot(&a, col, col, scale, 0.0) else {
                return Ok(T::zero());
            };
            if piv != col {
                a.swap_rows(col, piv);
                det = det.neg();
            }
            let p = a.get(col, col).clone();
            det = det.mul(&p);
            let pinv = p.inv()?;
            for r in col + 1..n {
                if a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).mul(&pinv);
                a.axpy_row(r, col, &f);
            }
        }
        Ok(det)
    }

    pub fn rank(&self) -> usize {
        self.rank_with_tol(DEFAULT_FLOAT_TOL)
    }

    /// Rank; exact matrices use fraction-free elimination and ignore `tol`.
    pub fn rank_with_tol(&self, tol: f64) -> usize {
        match T::BACKEND {
            crate::scalar::Backend::Exact => self.bareiss_rank(),
            crate::scalar::Backend::Float => self.echelon(tol).1.len(),
        }
    }

    pub fn nullspace_dim(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn nullspace_dim_with_tol(&self, tol: f64) -> usize {
        self.cols - self.rank_with_tol(tol)
    }

    /// Basis of the right kernel, one vector per column of the result.
    pub fn nullspace_basis(&self) -> Self {
        self.nullspace_basis_with_tol(DEFAULT_FLOAT_TOL)
    }

    pub fn nullspace_basis_with_tol(&self, tol: f64) -> Self {
        let (r, pivots) = self.echelon(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, T::one());
            for (row, &p) in pivots.iter().enumerate() {
                basis.set(p, k, r.get(row, f).neg());
            }
        }
        basis
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn echelon(&self, tol: f64) -> (Self, Vec<usize>) {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = pick_pivot(&a, row, col, scale, tol) else {
                continue;
            };
            a.swap_rows(row, piv);
            let p = a.get(row, col).inv().expect("pivot is nonzero");
            a.scale_row(row, &p);
            for r in 0..self.rows {
                if r != row && !a.get(r, col).is_zero() {
                    let f = a.get(r, col).clone();
                    a.axpy_row(r, row, &f);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots)
    }

    fn bareiss_rank(&self) -> usize {
        let mut a = self.clone();
        let mut prev = T::one();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            a.swap_rows(row, piv);
            let p = a.get(row, col).clone();
            let pinv = prev.inv().expect("previous pivot is nonzero");
            for r in row + 1..self.rows {
                let f = a.get(r, col).clone();
                for c in col + 1..self.cols {
                    let v = p.mul(a.get(r, c)).sub(&f.mul(a.get(row, c))).mul(&pinv);
                    a.set(r, c, v);
                }
                a.set(r, col, T::zero());
            }
            prev = p;
            row += 1;
        }
        row
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, s: &T) {
        for c in 0..self.cols {
            let idx = i * self.cols + c;
            self.data[idx] = self.data[idx].mul(s);
        }
    }

    /// row_i -= f * row_j
    fn axpy_row(&mut self, i: usize, j: usize, f: &T) {
        for c in 0..self.cols {
            let b = &self.data[j * self.cols + c];
            if b.is_zero() {
                continue;
            }
            let v = self.data[i * self.cols + c].sub(&f.mul(b));
            self.data[i * self.cols + c] = v;
        }
    }
}

/// First nonzero entry for exact scalars, largest entry above the threshold for floats.
fn pick_pivot<T: Scalar>(a: &Matrix<T>, from: usize, col: usize, scale: f64, tol: f64) -> Option<usize> {
    match T::BACKEND {
        crate::scalar::Backend::Exact => (from..a.rows).find(|&r| !a.get(r, col).is_zero()),
        crate::scalar::Backend::Float => {
            let best =
                (from..a.rows).max_by(|&x, &y| a.get(x, col).magnitude().total_cmp(&a.get(y, col).magnitude()))?;
            let v = a.get(best, col);
            if v.is_zero() || v.negligible(scale, tol) {
                None
            } else {
                Some(best)
            }
        }
    }
}

impl<T: Scalar> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.multiply(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(T::neg)
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.data[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|x| format!("{x:?}"))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactScalar;

    type M = Matrix<ExactScalar>;

    fn backward(n: usize) -> M {
        M::from_fn(n, n, |i, j| {
            if i + j == n - 1 {
                ExactScalar::one()
            } else {
                ExactScalar::zero()
            }
        })
    }

    #[test]
    fn identity_is_neutral() {
        let x = M::from_ints(&[&[1, 2, 3], &[0, -1, 4], &[5, 0, 2]]);
        assert_eq!(&M::identity(3) * &x, x);
    }

    #[test]
    fn backward_identity_is_an_involution() {
        assert!((&backward(2) * &backward(2)).is_identity());
    }

    #[test]
    fn p2_squares_to_i_e2() {
        let h = ExactScalar::sqrt2().inv().unwrap();
        let p = (&M::identity(2) + &backward(2).scale(&ExactScalar::imag_unit())).scale(&h);
        assert_eq!(&p * &p, backward(2).scale(&ExactScalar::imag_unit()));
    }

    #[test]
    fn shape_mismatch() {
        let a = M::zeros(2, 3);
        assert!(matches!(a.multiply(&a), Err(Error::Shape(_))));
    }

    #[test]
    fn inverse_and_singular() {
        assert!(M::identity(4).inverse().unwrap().is_identity());
        let a = M::from_ints(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.inverse(), Err(Error::SingularMatrix));
        let b = M::from_ints(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        let bi = b.inverse().unwrap();
        assert!((&b * &bi).is_identity() && (&bi * &b).is_identity());
    }

    #[test]
    fn determinant_small() {
        let b = M::from_ints(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        assert_eq!(b.determinant().unwrap(), ExactScalar::from_int(-2));
        assert_eq!(
            M::from_ints(&[&[1, 2], &[2, 4]]).determinant().unwrap(),
            ExactScalar::zero()
        );
    }

    #[test]
    fn direct_sum_shapes() {
        let a = M::from_ints(&[&[1]]);
        assert_eq!(M::direct_sum(std::slice::from_ref(&a)), a);
        let d = M::direct_sum(&[M::from_ints(&[&[1]]), M::from_ints(&[&[-1]])]);
        assert_eq!(d, M::from_ints(&[&[1, 0], &[0, -1]]));
    }

    #[test]
    fn nullspace_basics() {
        assert_eq!(M::zeros(4, 4).nullspace_dim(), 4);
        assert_eq!(M::identity(4).nullspace_dim(), 0);
        let a = M::from_ints(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.nullspace_dim(), 1);
        let basis = a.nullspace_basis();
        assert_eq!(basis.cols(), 1);
        assert!((&a * &basis).is_zero());
    }

    #[test]
    fn float_rank_respects_tolerance() {
        let a: Matrix<FloatScalar> = Matrix::from_ints(&[&[1, 0], &[0, 1]]);
        let mut b = a.clone();
        b.set(1, 1, FloatScalar::new(1e-12, 0.0).unwrap());
        assert_eq!(a.rank(), 2);
        assert_eq!(b.rank(), 1);
        assert_eq!(b.rank_with_tol(1e-14), 2);
    }

    #[test]
    fn bareiss_matches_echelon() {
        let a = M::from_ints(&[&[2, 4, 1, 0], &[1, 2, 0, 1], &[3, 6, 1, 1], &[0, 0, 1, -2]]);
        assert_eq!(a.rank(), a.echelon(0.0).1.len());
        assert_eq!(a.rank(), 2);
    }
}
