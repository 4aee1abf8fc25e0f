//! Brute-force dimension counts used to cross-check the closed forms.
//!
//! Everything here works on explicit coordinate systems (`vec` is row-major) and
//! a single rank computation, independently of the Toeplitz and solver machinery.

use crate::canonical::{assemble_canonical, jordan_block, nilpotent_exp, CanonicalSpec, SegmentSpec};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::toeplitz::{f_block, AltToeplitzData, ToeplitzElement};

fn vec_of<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    m.entries().to_vec()
}

fn unit<T: Scalar>(n: usize, i: usize, j: usize) -> Matrix<T> {
    let mut e = Matrix::zeros(n, n);
    e.set(i, j, T::one());
    e
}

/// Matrix of the linear map `f` on `n x n` matrices, one column per unit matrix.
fn operator_matrix<T: Scalar>(n: usize, f: impl Fn(&Matrix<T>) -> Matrix<T>) -> Matrix<T> {
    let cols: Vec<Vec<T>> = (0..n * n).map(|k| vec_of(&f(&unit(n, k / n, k % n)))).collect();
    let rows = cols.first().map_or(0, Vec::len);
    Matrix::from_fn(rows, n * n, |i, k| cols[k][i].clone())
}

/// Matrix of `X -> A X - X B` for square `A`, `B` of equal size.
pub fn sylvester_operator<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::Shape("sylvester operator needs equal square matrices".into()));
    }
    Ok(operator_matrix(a.rows(), |x| &(a * x) - &(x * b)))
}

/// Dimension of `{H : H^T = -H, M H = H M}`, the Lie algebra of the isotropy group
/// of `M`. Stacks both conditions into one `2n^2 x n^2` system.
pub fn commutant_so_dim<T: Scalar>(m: &Matrix<T>) -> Result<usize> {
    commutant_so_dim_with_tol(m, crate::matrix::DEFAULT_FLOAT_TOL)
}

pub fn commutant_so_dim_with_tol<T: Scalar>(m: &Matrix<T>, tol: f64) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::Shape("commutant of a non-square matrix".into()));
    }
    let n = m.rows();
    let skew = operator_matrix(n, |h| h + &h.transpose());
    let comm = operator_matrix(n, |h| &(m * h) - &(h * m));
    Ok(Matrix::vstack(&[skew, comm])?.nullspace_dim_with_tol(tol))
}

/// `bigoplus_r bigoplus^{m_r} J_{alpha_r}(lambda)`.
pub fn jordan_sum<T: Scalar>(spec: &SegmentSpec, lambda: &T) -> Matrix<T> {
    let mut blocks = Vec::new();
    for (&a, &m) in spec.alpha().iter().zip(spec.mu()) {
        blocks.extend(std::iter::repeat_n(jordan_block(a, lambda), m));
    }
    Matrix::direct_sum(&blocks)
}

/// `sum_{r,s} min(alpha_r, alpha_s) m_r m_s`.
pub fn commutant_dim_formula(spec: &SegmentSpec) -> usize {
    let (a, m) = (spec.alpha(), spec.mu());
    let mut out = 0;
    for r in 0..spec.len() {
        for s in 0..spec.len() {
            out += a[r].min(a[s]) * m[r] * m[s];
        }
    }
    out
}

/// Nullspace dimension of `X -> J X - X J` for the Jordan sum at `lambda`.
pub fn commutant_dim_brute<T: Scalar>(spec: &SegmentSpec, lambda: &T) -> Result<usize> {
    let j = jordan_sum(spec, lambda);
    Ok(sylvester_operator(&j, &j)?.nullspace_dim())
}

/// Whether `J` and `e^J` have the same commutant: equal kernel dimensions and
/// every kernel basis vector of one operator annihilated by the other.
pub fn exp_commutant_check<T: Scalar>(spec: &SegmentSpec, lambda: &T) -> Result<bool> {
    let e = lambda
        .exp()
        .ok_or_else(|| Error::BackendUnavailable(format!("e^{lambda} is not exact")))?;
    let j = jordan_sum(spec, lambda);
    let shift = Matrix::identity(j.rows()).scale(lambda);
    let ej = nilpotent_exp(&(&j - &shift))?.scale(&e);
    let s1 = sylvester_operator(&j, &j)?;
    let s2 = sylvester_operator(&ej, &ej)?;
    let (k1, k2) = (s1.nullspace_basis(), s2.nullspace_basis());
    if k1.cols() != k2.cols() {
        return Ok(false);
    }
    let tol = crate::matrix::DEFAULT_FLOAT_TOL;
    let scale = s1.max_abs().max(s2.max_abs()).max(1.0);
    let vanishes = |m: &Matrix<T>| m.entries().iter().all(|x| x.negligible(scale, tol));
    Ok(vanishes(&(&s2 * &k1)) && vanishes(&(&s1 * &k2)))
}

/// Dimension of the tangent space at the identity of `{X in T : F X^T F B X = B}`,
/// i.e. the kernel of `X -> F X^T F B + B X` on the Toeplitz pattern.
pub fn tangent_dim<T: Scalar>(b: &AltToeplitzData<T>) -> usize {
    let spec = b.spec();
    let f = f_block::<T>(spec);
    let bm = b.assemble();
    let mut slots = Vec::new();
    for r in 0..spec.len() {
        for s in 0..spec.len() {
            for n in 0..spec.b(r, s) {
                for i in 0..spec.mu()[r] {
                    for k in 0..spec.mu()[s] {
                        slots.push((r, s, n, i, k));
                    }
                }
            }
        }
    }
    let cols: Vec<Vec<T>> = slots
        .iter()
        .map(|&(r0, s0, n0, i, k)| {
            let x = ToeplitzElement::from_fn(spec, |r, s, n| {
                let mut p = Matrix::zeros(spec.mu()[r], spec.mu()[s]);
                if (r, s, n) == (r0, s0, n0) {
                    p.set(i, k, T::one());
                }
                p
            })
            .assemble();
            let img = &(&(&(&f * &x.transpose()) * &f) * &bm) + &(&bm * &x);
            vec_of(&img)
        })
        .collect();
    let rows = spec.size() * spec.size();
    Matrix::from_fn(rows, cols.len(), |i, k| cols[k][i].clone()).nullspace_dim()
}

/// All segment data with strictly decreasing `alpha` and `sum alpha_r m_r <= max_weight`.
pub fn segment_specs(max_weight: usize) -> Vec<SegmentSpec> {
    fn go(max_alpha: usize, left: usize, a: &mut Vec<usize>, m: &mut Vec<usize>, out: &mut Vec<SegmentSpec>) {
        for alpha in (1..=max_alpha.min(left)).rev() {
            for mult in 1..=left / alpha {
                a.push(alpha);
                m.push(mult);
                out.push(SegmentSpec::new(a.clone(), m.clone()).expect("decreasing alpha"));
                go(alpha - 1, left - alpha * mult, a, m, out);
                a.pop();
                m.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(max_weight, max_weight, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// Canonical specs (nonzero pairs at `lambda = 1`, and nilpotent) of size at most `max_size`.
pub fn sweep_family<T: Scalar>(max_size: usize) -> Vec<CanonicalSpec<T>> {
    let mut out = Vec::new();
    for s in segment_specs(max_size) {
        let (a, m) = (s.alpha().to_vec(), s.mu().to_vec());
        for spec in [
            CanonicalSpec::nonzero(T::one(), a.clone(), m.clone()),
            CanonicalSpec::nilpotent(a, m),
        ] {
            let spec = spec.expect("valid segments");
            if spec.matrix_size() <= max_size {
                out.push(spec);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub spec: CanonicalSpec<T>,
    pub formula: usize,
    pub oracle: usize,
}

impl<T> SweepRow<T> {
    pub fn matches(&self) -> bool {
        self.formula == self.oracle
    }
}

/// Closed-form isotropy dimension against [`commutant_so_dim`] over [`sweep_family`].
pub fn sweep<T: Scalar>(max_size: usize) -> Result<Vec<SweepRow<T>>> {
    sweep_family(max_size)
        .into_iter()
        .map(|spec| {
            let oracle = commutant_so_dim(&assemble_canonical(&spec)?)?;
            Ok(SweepRow {
                formula: crate::isotropy::dim(&spec),
                oracle,
                spec,
            })
        })
        .collect()
}
