//! Seeded sampling of small rational data.
//!
//! Entries are `p/q` with `p` in `[-3, 3]` and `q` in `{1, 2, 3}`, which keeps exact
//! coefficient growth modest. All randomness flows from [`rng`].

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational<T: Scalar>(rng: &mut SeededRng) -> T {
    let p = rng.random_range(-3i64..=3);
    let q = rng.random_range(1i64..=3);
    T::from_frac(p, q)
}

/// Nonzero variant of [`small_rational`].
pub fn small_nonzero<T: Scalar>(rng: &mut SeededRng) -> T {
    loop {
        let x: T = small_rational(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

pub fn matrix<T: Scalar>(rng: &mut SeededRng, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| small_rational(rng))
}

pub fn symmetric<T: Scalar>(rng: &mut SeededRng, n: usize) -> Matrix<T> {
    let a = matrix::<T>(rng, n, n);
    &a + &a.transpose()
}

pub fn skew<T: Scalar>(rng: &mut SeededRng, n: usize) -> Matrix<T> {
    let a = matrix::<T>(rng, n, n);
    &a - &a.transpose()
}

/// Symmetric when `symmetric` is set, skew-symmetric otherwise.
pub fn with_symmetry<T: Scalar>(rng: &mut SeededRng, n: usize, symmetric_: bool) -> Matrix<T> {
    if symmetric_ {
        symmetric(rng, n)
    } else {
        skew(rng, n)
    }
}

/// Resamples until the matrix is nonsingular.
pub fn invertible<T: Scalar>(rng: &mut SeededRng, n: usize) -> Matrix<T> {
    loop {
        let a = matrix::<T>(rng, n, n);
        if a.rank() == n {
            return a;
        }
    }
}

/// Nonsingular symmetric or skew-symmetric matrix (skew needs even `n`).
pub fn invertible_with_symmetry<T: Scalar>(rng: &mut SeededRng, n: usize, symmetric_: bool) -> Matrix<T> {
    assert!(symmetric_ || n.is_multiple_of(2), "odd skew matrices are singular");
    loop {
        let a = with_symmetry::<T>(rng, n, symmetric_);
        if a.rank() == n {
            return a;
        }
    }
}
