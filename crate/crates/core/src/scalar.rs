//! Scalars: exact elements of the field Q(i, sqrt 2) and double-precision complex numbers.
//!
//! Every canonical block, transition matrix and permutation used by the crate has
//! entries in Q(i, sqrt 2), so the exact backend can check all group identities with
//! zero tolerance. The float backend exists for data outside that field, such as
//! `e^lambda` for transcendental `lambda`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Which arithmetic a matrix is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

/// Contract shared by both scalar backends.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    /// `num / den`; panics on a zero denominator (use it only for literal constants).
    fn from_frac(num: i64, den: i64) -> Self;
    fn imag_unit() -> Self;
    fn sqrt2() -> Self;

    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }
    /// Complex conjugation (`i -> -i`).
    fn conj(&self) -> Self;
    fn real_part(&self) -> Self;
    fn imag_part(&self) -> Self;
    fn to_complex(&self) -> Complex64;
    /// Modulus, evaluated in floating point.
    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }
    /// Whether this entry counts as zero during elimination, given the scale of the
    /// matrix and a relative tolerance. Exact scalars ignore both.
    fn negligible(&self, scale: f64, tol: f64) -> bool;

    /// `e^self` when it is representable in this backend.
    fn exp(&self) -> Option<Self>;

    fn scale_int(&self, n: i64) -> Self {
        self.mul(&Self::from_int(n))
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

// ---------------------------------------------------------------------------
// Exact backend
// ---------------------------------------------------------------------------

/// `(a + b sqrt2 + (c + d sqrt2) i)` with rational `a, b, c, d`.
///
/// Stored over a common positive denominator with `gcd(num, den) = 1`, which makes
/// the representation unique and lets `==` compare structurally.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    num: [BigInt; 4],
    den: BigInt,
}

/// Multiply two elements of Z[sqrt2] given as `(p, q) = p + q sqrt2`.
fn zmul(p: &BigInt, q: &BigInt, s: &BigInt, t: &BigInt) -> (BigInt, BigInt) {
    (p * s + ((q * t) << 1u32), p * t + q * s)
}

impl ExactScalar {
    fn from_parts(num: [BigInt; 4], den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        let mut x = ExactScalar { num, den };
        x.reduce();
        x
    }

    fn reduce(&mut self) {
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for n in &mut self.num {
                *n = -std::mem::take(n);
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for n in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(n);
        }
        if !g.is_one() {
            self.den /= &g;
            for n in &mut self.num {
                *n /= &g;
            }
        }
    }

    /// Build from four raw numerator/denominator pairs, reducing to the unique form.
    pub fn normalize(parts: [(BigInt, BigInt); 4]) -> Result<Self> {
        if parts.iter().any(|(_, d)| d.is_zero()) {
            return Err(Error::InvalidScalar("zero denominator".into()));
        }
        let rats = parts.map(|(n, d)| BigRational::new(n, d));
        Ok(Self::from_components(&rats))
    }

    pub fn from_components(c: &[Rational; 4]) -> Self {
        let den = c.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let num = std::array::from_fn(|k| c[k].numer() * (&den / c[k].denom()));
        Self::from_parts(num, den)
    }

    pub fn from_rational(r: &Rational) -> Self {
        Self::from_parts(
            [r.numer().clone(), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            r.denom().clone(),
        )
    }

    /// `re + im * i` for rationals `re`, `im`.
    pub fn gaussian(re: Rational, im: Rational) -> Self {
        let z = Rational::zero();
        Self::from_components(&[re, z.clone(), im, z])
    }

    /// The four rational coordinates `(a, b, c, d)`.
    pub fn components(&self) -> [Rational; 4] {
        std::array::from_fn(|k| BigRational::new(self.num[k].clone(), self.den.clone()))
    }

    pub fn is_real(&self) -> bool {
        self.num[2].is_zero() && self.num[3].is_zero()
    }

    /// True when the value lies in Q(i), i.e. carries no sqrt2 part.
    pub fn is_gaussian_rational(&self) -> bool {
        self.num[1].is_zero() && self.num[3].is_zero()
    }

    pub fn to_float(&self) -> FloatScalar {
        let c = self.components();
        let f = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
        let s2 = std::f64::consts::SQRT_2;
        FloatScalar(Complex64::new(f(&c[0]) + s2 * f(&c[1]), f(&c[2]) + s2 * f(&c[3])))
    }

    fn binary_add(&self, other: &Self, sign: i8) -> Self {
        if self.den == other.den {
            let num = std::array::from_fn(|k| {
                if sign > 0 {
                    &self.num[k] + &other.num[k]
                } else {
                    &self.num[k] - &other.num[k]
                }
            });
            return Self::from_parts(num, self.den.clone());
        }
        let num = std::array::from_fn(|k| {
            let l = &self.num[k] * &other.den;
            let r = &other.num[k] * &self.den;
            if sign > 0 {
                l + r
            } else {
                l - r
            }
        });
        Self::from_parts(num, &self.den * &other.den)
    }

    fn product(&self, other: &Self) -> Self {
        if self.num.iter().all(Zero::is_zero) || other.num.iter().all(Zero::is_zero) {
            return Self::zero_value();
        }
        let [a1, b1, c1, d1] = &self.num;
        let [a2, b2, c2, d2] = &other.num;
        // (u1 + v1 i)(u2 + v2 i) with u, v in Z[sqrt2]
        let (uu0, uu1) = zmul(a1, b1, a2, b2);
        let (vv0, vv1) = zmul(c1, d1, c2, d2);
        let (uv0, uv1) = zmul(a1, b1, c2, d2);
        let (vu0, vu1) = zmul(c1, d1, a2, b2);
        Self::from_parts([uu0 - vv0, uu1 - vv1, uv0 + vu0, uv1 + vu1], &self.den * &other.den)
    }

    fn zero_value() -> Self {
        ExactScalar {
            num: [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            den: BigInt::one(),
        }
    }

    fn inverse(&self) -> Result<Self> {
        if self.num.iter().all(Zero::is_zero) {
            return Err(Error::DivisionByZero);
        }
        // x = (u + v i)/D, u = a + b r, v = c + d r, r = sqrt2.
        // 1/x = D (u - v i) / (u^2 + v^2), and u^2 + v^2 = p + q r is inverted
        // through its sqrt2-conjugate: 1/(p + q r) = (p - q r)/(p^2 - 2 q^2).
        let [a, b, c, d] = &self.num;
        let p = a * a + ((b * b) << 1u32) + c * c + ((d * d) << 1u32);
        let q = ((a * b) + (c * d)) << 1u32;
        let norm = &p * &p - ((&q * &q) << 1u32);
        let nq = -&q;
        let (re0, re1) = zmul(a, b, &p, &nq);
        let (im0, im1) = zmul(c, d, &p, &nq);
        let den = &self.den;
        Ok(Self::from_parts(
            [re0 * den, re1 * den, -(im0 * den), -(im1 * den)],
            norm,
        ))
    }
}

impl Scalar for ExactScalar {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        Self::zero_value()
    }
    fn one() -> Self {
        Self::from_int(1)
    }
    fn from_int(n: i64) -> Self {
        ExactScalar {
            num: [BigInt::from(n), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            den: BigInt::one(),
        }
    }
    fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_parts(
            [BigInt::from(num), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            BigInt::from(den),
        )
    }
    fn imag_unit() -> Self {
        ExactScalar {
            num: [BigInt::zero(), BigInt::zero(), BigInt::one(), BigInt::zero()],
            den: BigInt::one(),
        }
    }
    fn sqrt2() -> Self {
        ExactScalar {
            num: [BigInt::zero(), BigInt::one(), BigInt::zero(), BigInt::zero()],
            den: BigInt::one(),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }
    fn add(&self, other: &Self) -> Self {
        self.binary_add(other, 1)
    }
    fn sub(&self, other: &Self) -> Self {
        self.binary_add(other, -1)
    }
    fn mul(&self, other: &Self) -> Self {
        self.product(other)
    }
    fn neg(&self) -> Self {
        ExactScalar {
            num: std::array::from_fn(|k| -&self.num[k]),
            den: self.den.clone(),
        }
    }
    fn inv(&self) -> Result<Self> {
        self.inverse()
    }
    fn conj(&self) -> Self {
        let [a, b, c, d] = &self.num;
        ExactScalar {
            num: [a.clone(), b.clone(), -c, -d],
            den: self.den.clone(),
        }
    }
    fn real_part(&self) -> Self {
        let [a, b, _, _] = &self.num;
        Self::from_parts([a.clone(), b.clone(), BigInt::zero(), BigInt::zero()], self.den.clone())
    }
    fn imag_part(&self) -> Self {
        let [_, _, c, d] = &self.num;
        Self::from_parts([c.clone(), d.clone(), BigInt::zero(), BigInt::zero()], self.den.clone())
    }
    fn to_complex(&self) -> Complex64 {
        self.to_float().0
    }
    fn negligible(&self, _scale: f64, _tol: f64) -> bool {
        self.is_zero()
    }
    fn exp(&self) -> Option<Self> {
        self.is_zero().then(Self::one)
    }
}

impl Default for ExactScalar {
    fn default() -> Self {
        Self::zero_value()
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

fn fmt_part(f: &mut fmt::Formatter<'_>, first: &mut bool, r: &Rational, unit: &str) -> fmt::Result {
    if r.is_zero() {
        return Ok(());
    }
    let sign = if r.is_negative() {
        "-"
    } else if *first {
        ""
    } else {
        "+"
    };
    let mag = r.abs();
    if mag.is_one() && !unit.is_empty() {
        write!(f, "{sign}{unit}")?;
    } else {
        write!(f, "{sign}{mag}{unit}")?;
    }
    *first = false;
    Ok(())
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let c = self.components();
        let mut first = true;
        fmt_part(f, &mut first, &c[0], "")?;
        fmt_part(f, &mut first, &c[1], "√2")?;
        fmt_part(f, &mut first, &c[2], "i")?;
        fmt_part(f, &mut first, &c[3], "i√2")
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidScalar(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::InvalidScalar("zero denominator".into()));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Always `"p/q"`, including `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

// ---------------------------------------------------------------------------
// Float backend
// ---------------------------------------------------------------------------

/// Double-precision complex scalar. Constructors reject NaN and infinities.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct FloatScalar(pub Complex64);

impl FloatScalar {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::InvalidScalar(format!("non-finite float ({re}, {im})")));
        }
        Ok(FloatScalar(Complex64::new(re, im)))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }
}

impl Scalar for FloatScalar {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        FloatScalar(Complex64::new(0.0, 0.0))
    }
    fn one() -> Self {
        FloatScalar(Complex64::new(1.0, 0.0))
    }
    fn from_int(n: i64) -> Self {
        FloatScalar(Complex64::new(n as f64, 0.0))
    }
    fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        FloatScalar(Complex64::new(num as f64 / den as f64, 0.0))
    }
    fn imag_unit() -> Self {
        FloatScalar(Complex64::new(0.0, 1.0))
    }
    fn sqrt2() -> Self {
        FloatScalar(Complex64::new(std::f64::consts::SQRT_2, 0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        FloatScalar(self.0 + other.0)
    }
    fn sub(&self, other: &Self) -> Self {
        FloatScalar(self.0 - other.0)
    }
    fn mul(&self, other: &Self) -> Self {
        FloatScalar(self.0 * other.0)
    }
    fn neg(&self) -> Self {
        FloatScalar(-self.0)
    }
    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FloatScalar(self.0.inv()))
    }
    fn conj(&self) -> Self {
        FloatScalar(self.0.conj())
    }
    fn real_part(&self) -> Self {
        FloatScalar(Complex64::new(self.0.re, 0.0))
    }
    fn imag_part(&self) -> Self {
        FloatScalar(Complex64::new(self.0.im, 0.0))
    }
    fn to_complex(&self) -> Complex64 {
        self.0
    }
    fn negligible(&self, scale: f64, tol: f64) -> bool {
        self.0.norm() <= tol * scale
    }
    fn exp(&self) -> Option<Self> {
        Some(FloatScalar(self.0.exp()))
    }
}

impl fmt::Display for FloatScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for FloatScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
