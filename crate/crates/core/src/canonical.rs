//! Canonical blocks for skew-symmetric and orthogonal matrices under orthogonal
//! similarity, their Jordan forms, transition matrices and regrouping permutations.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Segment sizes `alpha_1 > ... > alpha_N` with multiplicities `m_1..m_N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SegmentSpec {
    alpha: Vec<usize>,
    mu: Vec<usize>,
}

impl SegmentSpec {
    pub fn new(alpha: Vec<usize>, mu: Vec<usize>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidSpec("at least one segment is required".into()));
        }
        if alpha.len() != mu.len() {
            return Err(Error::InvalidSpec(format!(
                "alpha has {} entries but mu has {}",
                alpha.len(),
                mu.len()
            )));
        }
        if alpha.iter().chain(&mu).any(|&x| x == 0) {
            return Err(Error::InvalidSpec("sizes and multiplicities must be positive".into()));
        }
        if alpha.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidSpec(format!(
                "alpha must be strictly decreasing, got {alpha:?}"
            )));
        }
        Ok(SegmentSpec { alpha, mu })
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn mu(&self) -> &[usize] {
        &self.mu
    }

    /// Number of segments `N`.
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// `m_r` for odd `alpha_r`, `2 m_r` for even `alpha_r`.
    pub fn mu_tilde(&self) -> Vec<usize> {
        self.alpha
            .iter()
            .zip(&self.mu)
            .map(|(&a, &m)| if a % 2 == 0 { 2 * m } else { m })
            .collect()
    }

    /// Same sizes with multiplicities replaced by `mu_tilde`.
    pub fn tilde(&self) -> SegmentSpec {
        SegmentSpec {
            alpha: self.alpha.clone(),
            mu: self.mu_tilde(),
        }
    }

    /// `b_rs = min(alpha_r, alpha_s)`.
    pub fn b(&self, r: usize, s: usize) -> usize {
        self.alpha[r].min(self.alpha[s])
    }

    /// Column shift of the Toeplitz part of block `(r, s)`: `max(0, alpha_s - alpha_r)`.
    pub fn shift(&self, r: usize, s: usize) -> usize {
        self.alpha[s].saturating_sub(self.alpha[r])
    }

    /// `sum alpha_r m_r`.
    pub fn size(&self) -> usize {
        self.alpha.iter().zip(&self.mu).map(|(a, m)| a * m).sum()
    }

    /// Offset of segment `r` in a matrix laid out segment by segment.
    pub fn offset(&self, r: usize) -> usize {
        self.alpha[..r].iter().zip(&self.mu).map(|(a, m)| a * m).sum()
    }
}

/// Which canonical form a spec describes.
#[derive(Debug, Clone, PartialEq)]
pub enum CanonicalCase<T> {
    /// `K_lambda`: blocks `K_{alpha_r}(lambda)`, `lambda != 0`.
    NonzeroPair { lambda: T },
    /// `K_0`: `K_{alpha_r}(0)` for even, `L_{alpha_r}` for odd sizes.
    Nilpotent,
    /// `O_lambda = e^{K_lambda}`; `exp_lambda` must be supplied in exact mode.
    OrthGeneric { lambda: T, exp_lambda: Option<T> },
    /// `O_0 = epsilon e^{K_0}`.
    Unipotent { epsilon: i8 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSpec<T> {
    pub case: CanonicalCase<T>,
    pub segments: SegmentSpec,
}

impl<T: Scalar> CanonicalSpec<T> {
    pub fn new(case: CanonicalCase<T>, segments: SegmentSpec) -> Result<Self> {
        let spec = CanonicalSpec { case, segments };
        spec.validate()?;
        Ok(spec)
    }

    pub fn nonzero(lambda: T, alpha: Vec<usize>, mu: Vec<usize>) -> Result<Self> {
        Self::new(CanonicalCase::NonzeroPair { lambda }, SegmentSpec::new(alpha, mu)?)
    }

    pub fn nilpotent(alpha: Vec<usize>, mu: Vec<usize>) -> Result<Self> {
        Self::new(CanonicalCase::Nilpotent, SegmentSpec::new(alpha, mu)?)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.case {
            CanonicalCase::NonzeroPair { lambda } => {
                if lambda.is_zero() {
                    return Err(Error::InvalidSpec("lambda must be nonzero".into()));
                }
            }
            CanonicalCase::OrthGeneric { lambda, exp_lambda } => {
                if lambda.is_zero() {
                    return Err(Error::InvalidSpec("lambda must be nonzero".into()));
                }
                if let Some(e) = exp_lambda.clone().or_else(|| lambda.exp()) {
                    // e^lambda = +-1 would merge the eigenvalues e^lambda and e^-lambda.
                    if e.mul(&e).is_one() || e.is_zero() {
                        return Err(Error::InvalidSpec("e^lambda must differ from 0, 1 and -1".into()));
                    }
                }
            }
            CanonicalCase::Unipotent { epsilon } => {
                if epsilon.abs() != 1 {
                    return Err(Error::InvalidSpec(format!("epsilon must be +-1, got {epsilon}")));
                }
            }
            CanonicalCase::Nilpotent => {}
        }
        Ok(())
    }

    /// True for the nilpotent and signed-unipotent cases (part 2 of the theory).
    pub fn is_nilpotent_family(&self) -> bool {
        matches!(self.case, CanonicalCase::Nilpotent | CanonicalCase::Unipotent { .. })
    }

    /// Side length of the assembled canonical form.
    pub fn matrix_size(&self) -> usize {
        let s = &self.segments;
        if self.is_nilpotent_family() {
            s.alpha.iter().zip(s.mu_tilde()).map(|(a, m)| a * m).sum()
        } else {
            2 * s.size()
        }
    }

    /// `e^lambda` for the generic orthogonal case, or an error when it cannot be
    /// represented in this backend.
    pub fn exp_lambda(&self) -> Result<Option<T>> {
        match &self.case {
            CanonicalCase::OrthGeneric { lambda, exp_lambda } => {
                exp_lambda.clone().or_else(|| lambda.exp()).map(Some).ok_or_else(|| {
                    Error::BackendUnavailable(format!(
                        "e^({lambda}) is not representable exactly; pass exp_lambda or use the float backend"
                    ))
                })
            }
            _ => Ok(None),
        }
    }

    /// The skew-symmetric form underlying this spec (`K_lambda` or `K_0`).
    pub fn skew_spec(&self) -> CanonicalSpec<T> {
        let case = match &self.case {
            CanonicalCase::NonzeroPair { lambda } | CanonicalCase::OrthGeneric { lambda, .. } => {
                CanonicalCase::NonzeroPair { lambda: lambda.clone() }
            }
            CanonicalCase::Nilpotent | CanonicalCase::Unipotent { .. } => CanonicalCase::Nilpotent,
        };
        CanonicalSpec {
            case,
            segments: self.segments.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// elementary builders
// ---------------------------------------------------------------------------

/// `E_n`, ones on the anti-diagonal.
pub fn backward_identity<T: Scalar>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| if i + j + 1 == n { T::one() } else { T::zero() })
}

/// `F_n = diag((-1)^k)`, `k = 1..n`.
pub fn sign_alternator<T: Scalar>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| match (i == j, i % 2) {
        (false, _) => T::zero(),
        (true, 0) => T::from_int(-1),
        (true, _) => T::one(),
    })
}

/// `E_alpha(I_m)`: `alpha x alpha` block matrix with `I_m` on the block anti-diagonal.
pub fn block_backward<T: Scalar>(alpha: usize, m: usize) -> Matrix<T> {
    backward_identity::<T>(alpha).kron(&Matrix::identity(m))
}

/// `J_m(lambda)`.
pub fn jordan_block<T: Scalar>(m: usize, lambda: &T) -> Matrix<T> {
    Matrix::from_fn(m, m, |i, j| {
        if i == j {
            lambda.clone()
        } else if j == i + 1 {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// `M_m`: half the skew tridiagonal with `+1` above the diagonal.
pub fn m_block<T: Scalar>(m: usize) -> Matrix<T> {
    let h = T::from_frac(1, 2);
    Matrix::from_fn(m, m, |i, j| {
        if j == i + 1 {
            h.clone()
        } else if i == j + 1 {
            h.neg()
        } else {
            T::zero()
        }
    })
}

/// `N_m(lambda)`: `i/2` times `2 lambda` on the anti-diagonal and ones on both
/// neighbouring anti-diagonals.
pub fn n_block<T: Scalar>(m: usize, lambda: &T) -> Matrix<T> {
    let half_i = T::imag_unit().mul(&T::from_frac(1, 2));
    let two_lambda = lambda.scale_int(2);
    Matrix::from_fn(m, m, |i, j| {
        let s = i + j + 1;
        if s == m {
            half_i.mul(&two_lambda)
        } else if s + 1 == m || s == m + 1 {
            half_i.clone()
        } else {
            T::zero()
        }
    })
}

/// `K_m(lambda) = [[M_m, N_m(lambda)], [-N_m(lambda), -M_m]]`.
pub fn k_block<T: Scalar>(m: usize, lambda: &T) -> Matrix<T> {
    let mm = m_block::<T>(m);
    let nn = n_block(m, lambda);
    let mut out = Matrix::zeros(2 * m, 2 * m);
    out.set_block(0, 0, &mm);
    out.set_block(0, m, &nn);
    out.set_block(m, 0, &-&nn);
    out.set_block(m, m, &-&mm);
    out
}

/// `L_n` for odd `n = 2m - 1`.
///
/// Superdiagonal: `m - 1` entries `+1/2` followed by `m - 1` entries `-1/2`, the
/// subdiagonal is its negative. On each of the two anti-diagonals next to the main
/// one the first `m - 1` entries (by row) are `+i/2`, the remaining `-i/2`.
/// Twice `L_3` is `[[0, 1+i, 0], [-1-i, 0, -1+i], [0, 1-i, 0]]`.
pub fn l_block<T: Scalar>(n: usize) -> Result<Matrix<T>> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidBlock(format!("L block needs an odd size, got {n}")));
    }
    let m = n.div_ceil(2);
    let h = T::from_frac(1, 2);
    let hi = T::imag_unit().mul(&h);
    let mut out = Matrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        let v = if i + 1 < m { h.clone() } else { h.neg() };
        out.set(i, i + 1, v.clone());
        out.set(i + 1, i, v.neg());
    }
    // upper anti-diagonal i + j = n - 2 has rows 0..n-2, lower i + j = n has rows 1..n-1
    for (k, i) in (0..n - 1).enumerate() {
        let v = if k + 1 < m { hi.clone() } else { hi.neg() };
        let (r, c) = (i, n - 2 - i);
        out.set(r, c, out.get(r, c).add(&v));
    }
    for (k, i) in (1..n).enumerate() {
        let v = if k + 1 < m { hi.clone() } else { hi.neg() };
        let (r, c) = (i, n - i);
        out.set(r, c, out.get(r, c).add(&v));
    }
    Ok(out)
}

/// `P_n = (I + i E_n) / sqrt 2`.
pub fn p_matrix<T: Scalar>(n: usize) -> Matrix<T> {
    let r = T::sqrt2().inv().expect("sqrt2 is invertible");
    let e = backward_identity::<T>(n).scale(&T::imag_unit());
    (&Matrix::identity(n) + &e).scale(&r)
}

/// `R_n`: `I_k + F_k` for `n = 2k`, `I_{k+1} + F_k` for `n = 2k + 1`.
pub fn r_matrix<T: Scalar>(n: usize) -> Matrix<T> {
    let k = n / 2;
    Matrix::direct_sum(&[Matrix::identity(n - k), sign_alternator(k)])
}

/// `S_n = R_n P_n`.
pub fn s_block<T: Scalar>(n: usize) -> Matrix<T> {
    &r_matrix::<T>(n) * &p_matrix::<T>(n)
}

/// Series `sum_{k<n} B^k / k!` for nilpotent `B`.
pub fn nilpotent_exp<T: Scalar>(b: &Matrix<T>) -> Result<Matrix<T>> {
    if !b.is_square() {
        return Err(Error::Shape("exponential of a non-square matrix".into()));
    }
    let n = b.rows();
    let mut out = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=n {
        term = term.multiply(b)?.scale(&T::from_int(k as i64).inv()?);
        if k == n {
            break;
        }
        out = &out + &term;
    }
    if !term.is_zero() {
        return Err(Error::NotNilpotent);
    }
    Ok(out)
}

/// How [`block_exponential`] interprets its argument.
#[derive(Debug, Clone)]
pub enum ExpKind<T> {
    Nilpotent,
    /// `B - lambda I` is nilpotent and `exp_lambda = e^lambda` is supplied.
    Shifted {
        lambda: T,
        exp_lambda: T,
    },
}

pub fn block_exponential<T: Scalar>(b: &Matrix<T>, kind: &ExpKind<T>) -> Result<Matrix<T>> {
    match kind {
        ExpKind::Nilpotent => nilpotent_exp(b),
        ExpKind::Shifted { lambda, exp_lambda } => {
            let shift = Matrix::identity(b.rows()).scale(lambda);
            Ok(nilpotent_exp(&b.try_sub(&shift)?)?.scale(exp_lambda))
        }
    }
}

/// `e^{K_m(lambda)}` through the transition matrix, given `e^lambda`.
pub fn exp_k_block<T: Scalar>(m: usize, exp_lambda: &T) -> Result<Matrix<T>> {
    let ej = nilpotent_exp(&jordan_block(m, &T::zero()))?;
    let inner = Matrix::direct_sum(&[ej.scale(exp_lambda), ej.scale(&exp_lambda.inv()?)]);
    let s = s_block::<T>(2 * m);
    Ok(&(&s.inverse()? * &inner) * &s)
}

// ---------------------------------------------------------------------------
// assembled forms
// ---------------------------------------------------------------------------

fn nilpotent_block<T: Scalar>(alpha: usize) -> Result<Matrix<T>> {
    if alpha.is_multiple_of(2) {
        Ok(k_block(alpha, &T::zero()))
    } else {
        l_block(alpha)
    }
}

fn repeat_blocks<T: Scalar>(spec: &SegmentSpec, f: impl Fn(usize) -> Result<Matrix<T>>) -> Result<Matrix<T>> {
    let mut blocks = Vec::new();
    for (&a, &m) in spec.alpha().iter().zip(spec.mu()) {
        let b = f(a)?;
        blocks.extend(std::iter::repeat_n(b, m));
    }
    Ok(Matrix::direct_sum(&blocks))
}

/// The canonical matrix described by `spec`.
pub fn assemble_canonical<T: Scalar>(spec: &CanonicalSpec<T>) -> Result<Matrix<T>> {
    spec.validate()?;
    let seg = &spec.segments;
    match &spec.case {
        CanonicalCase::NonzeroPair { lambda } => repeat_blocks(seg, |a| Ok(k_block(a, lambda))),
        CanonicalCase::Nilpotent => repeat_blocks(seg, nilpotent_block),
        CanonicalCase::OrthGeneric { .. } => {
            let e = spec.exp_lambda()?.expect("generic orthogonal case");
            repeat_blocks(seg, |a| exp_k_block(a, &e))
        }
        CanonicalCase::Unipotent { epsilon } => {
            let eps = T::from_int(*epsilon as i64);
            repeat_blocks(seg, |a| Ok(nilpotent_exp(&nilpotent_block::<T>(a)?)?.scale(&eps)))
        }
    }
}

/// The Jordan form `J` with `assemble = S^{-1} J S` (for the orthogonal cases, the
/// Jordan form of the underlying skew-symmetric matrix).
pub fn jordan_assembly<T: Scalar>(spec: &CanonicalSpec<T>) -> Result<Matrix<T>> {
    let seg = &spec.segments;
    match &spec.skew_spec().case {
        CanonicalCase::NonzeroPair { lambda } => repeat_blocks(seg, |a| {
            Ok(Matrix::direct_sum(&[
                jordan_block(a, lambda),
                jordan_block(a, &lambda.neg()),
            ]))
        }),
        _ => repeat_blocks(seg, |a| {
            let j = jordan_block(a, &T::zero());
            Ok(if a % 2 == 0 {
                Matrix::direct_sum(&[j.clone(), j])
            } else {
                j
            })
        }),
    }
}

/// Transition matrix `S` with `S K S^{-1} = J`.
pub fn transition<T: Scalar>(spec: &CanonicalSpec<T>) -> Result<Matrix<T>> {
    let seg = &spec.segments;
    if spec.is_nilpotent_family() {
        repeat_blocks(seg, |a| Ok(s_block(if a % 2 == 0 { 2 * a } else { a })))
    } else {
        repeat_blocks(seg, |a| Ok(s_block(2 * a)))
    }
}

/// `Omega_{alpha,m}`: column `k m + j` is `e_{j alpha + k}` (0-based).
pub fn omega<T: Scalar>(alpha: usize, m: usize) -> Matrix<T> {
    let n = alpha * m;
    let mut out = Matrix::zeros(n, n);
    for k in 0..alpha {
        for j in 0..m {
            out.set(j * alpha + k, k * m + j, T::one());
        }
    }
    out
}

/// `bigoplus_r Omega_{alpha_r, m_r}`.
pub fn omega_sum<T: Scalar>(spec: &SegmentSpec) -> Matrix<T> {
    let blocks: Vec<_> = spec
        .alpha()
        .iter()
        .zip(spec.mu())
        .map(|(&a, &m)| omega::<T>(a, m))
        .collect();
    Matrix::direct_sum(&blocks)
}

/// Block permutation sending block `k` of `sizes` (listed as 1st, 3rd, ... then
/// 2nd, 4th, ...) to the new order.
fn interleave_blocks<T: Scalar>(sizes: &[usize]) -> Matrix<T> {
    let mut starts = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &s in sizes {
        starts.push(acc);
        acc += s;
    }
    let order = (0..sizes.len()).step_by(2).chain((1..sizes.len()).step_by(2));
    let mut out = Matrix::zeros(acc, acc);
    let mut col = 0;
    for b in order {
        for i in 0..sizes[b] {
            out.set(starts[b] + i, col, T::one());
            col += 1;
        }
    }
    out
}

/// `Omega~ = Omega~_1 Omega~_2`; conjugating the Jordan form of `K_lambda` by it
/// collects all `+lambda` blocks before all `-lambda` blocks.
pub fn omega_tilde<T: Scalar>(spec: &SegmentSpec) -> Matrix<T> {
    let first: Vec<_> = spec
        .alpha()
        .iter()
        .zip(spec.mu())
        .map(|(&a, &m)| interleave_blocks::<T>(&vec![a; 2 * m]))
        .collect();
    let first = Matrix::direct_sum(&first);
    let halves: Vec<usize> = spec
        .alpha()
        .iter()
        .zip(spec.mu())
        .flat_map(|(&a, &m)| [a * m, a * m])
        .collect();
    &first * &interleave_blocks::<T>(&halves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ExactScalar as X, FloatScalar};

    type M = Matrix<X>;

    fn i() -> X {
        X::imag_unit()
    }

    fn c(re: i64, im: i64) -> X {
        X::from_int(re).add(&i().scale_int(im))
    }

    fn nilpotency_ranks(m: &M) -> Vec<usize> {
        let mut out = Vec::new();
        let mut p = m.clone();
        for _ in 0..m.rows() {
            out.push(p.rank());
            p = &p * m;
        }
        out
    }

    #[test]
    fn jordan_examples() {
        assert_eq!(jordan_block(1, &X::from_int(5)), M::from_ints(&[&[5]]));
        assert_eq!(jordan_block(2, &X::zero()), M::from_ints(&[&[0, 1], &[0, 0]]));
        assert!(jordan_block(3, &X::zero()).pow(3).unwrap().is_zero());
    }

    #[test]
    fn k1_block() {
        let l = X::from_int(3);
        let k = k_block(1, &l);
        let il = i().mul(&l);
        assert_eq!(
            k,
            M::from_rows(vec![vec![X::zero(), il.clone()], vec![il.neg(), X::zero()]]).unwrap()
        );
    }

    #[test]
    fn k2_zero_matches_definition() {
        let h = X::from_frac(1, 2);
        let z = X::zero;
        let expect = M::from_rows(vec![
            vec![z(), X::one(), i(), z()],
            vec![X::from_int(-1), z(), z(), i()],
            vec![i().neg(), z(), z(), X::from_int(-1)],
            vec![z(), i().neg(), X::one(), z()],
        ])
        .unwrap()
        .scale(&h);
        let k = k_block(2, &X::zero());
        assert_eq!(k, expect);
        // Jordan type J_2(0) + J_2(0)
        assert_eq!(nilpotency_ranks(&k), vec![2, 0, 0, 0]);
    }

    #[test]
    fn k_blocks_are_skew() {
        for m in 1..6 {
            for l in [c(0, 0), c(2, -1), c(-1, 3)] {
                assert!(k_block(m, &l).is_skew());
            }
        }
    }

    #[test]
    fn l1_and_l3() {
        assert!(l_block::<X>(1).unwrap().is_zero());
        let twice = l_block::<X>(3).unwrap().scale(&X::from_int(2));
        let expect = M::from_rows(vec![
            vec![X::zero(), c(1, 1), X::zero()],
            vec![c(-1, -1), X::zero(), c(-1, 1)],
            vec![X::zero(), c(1, -1), X::zero()],
        ])
        .unwrap();
        assert_eq!(twice, expect);
        assert!(matches!(l_block::<X>(4), Err(Error::InvalidBlock(_))));
    }

    #[test]
    fn l_blocks_are_single_jordan_blocks() {
        for n in (1..=9).step_by(2) {
            let l = l_block::<X>(n).unwrap();
            assert!(l.is_skew());
            let expect: Vec<usize> = (0..n).map(|k| n - 1 - k).collect();
            assert_eq!(nilpotency_ranks(&l), expect, "n = {n}");
        }
    }

    #[test]
    fn transition_for_alpha_one() {
        let spec = CanonicalSpec::nonzero(X::from_int(2), vec![1], vec![1]).unwrap();
        let s = transition(&spec).unwrap();
        let r = X::sqrt2().inv().unwrap();
        let expect = M::from_rows(vec![vec![X::one(), i()], vec![i().neg(), X::from_int(-1)]])
            .unwrap()
            .scale(&r);
        assert_eq!(s, expect);
        let k = assemble_canonical(&spec).unwrap();
        assert_eq!(&(&s * &k) * &s.inverse().unwrap(), jordan_assembly(&spec).unwrap());
    }

    #[test]
    fn transition_for_l3() {
        let spec = CanonicalSpec::<X>::nilpotent(vec![3], vec![1]).unwrap();
        let s = transition(&spec).unwrap();
        let r3 = M::direct_sum(&[M::identity(2), M::from_ints(&[&[-1]])]);
        assert_eq!(s, &r3 * &p_matrix(3));
        let l3 = l_block::<X>(3).unwrap();
        assert_eq!(&(&s * &l3) * &s.inverse().unwrap(), jordan_block(3, &X::zero()));
    }

    #[test]
    fn transitions_conjugate_to_jordan_form() {
        let specs: Vec<(Vec<usize>, Vec<usize>)> = vec![
            (vec![1], vec![3]),
            (vec![2], vec![1]),
            (vec![3, 1], vec![1, 2]),
            (vec![4, 3, 2], vec![1, 1, 1]),
            (vec![5], vec![1]),
        ];
        for (a, m) in specs {
            for spec in [
                CanonicalSpec::nonzero(c(1, 2), a.clone(), m.clone()).unwrap(),
                CanonicalSpec::nilpotent(a.clone(), m.clone()).unwrap(),
            ] {
                let s = transition(&spec).unwrap();
                let k = assemble_canonical(&spec).unwrap();
                assert!(k.is_skew());
                let j = jordan_assembly(&spec).unwrap();
                assert_eq!(&(&s * &k) * &s.inverse().unwrap(), j, "{spec:?}");
            }
        }
    }

    #[test]
    fn nilpotent_assembly_examples() {
        let z = CanonicalSpec::<X>::nilpotent(vec![1], vec![3]).unwrap();
        assert!(assemble_canonical(&z).unwrap().is_zero());
        let spec = CanonicalSpec::<X>::nilpotent(vec![2, 1], vec![1, 1]).unwrap();
        let k = assemble_canonical(&spec).unwrap();
        assert_eq!(k.rows(), 5);
        assert_eq!(nilpotency_ranks(&k), vec![2, 0, 0, 0, 0]);
    }

    #[test]
    fn direct_sum_of_k2_and_l3_has_size_seven() {
        let m = M::direct_sum(&[k_block(2, &X::zero()), l_block(3).unwrap()]);
        assert_eq!(m.rows(), 7);
    }

    #[test]
    fn exponential_examples() {
        assert!(block_exponential(&M::zeros(3, 3), &ExpKind::Nilpotent)
            .unwrap()
            .is_identity());
        let e = block_exponential(&jordan_block(2, &X::zero()), &ExpKind::Nilpotent).unwrap();
        assert_eq!(e, M::from_ints(&[&[1, 1], &[0, 1]]));
        assert_eq!(
            block_exponential(&M::identity(2), &ExpKind::Nilpotent),
            Err(Error::NotNilpotent)
        );
        let sh = block_exponential(
            &jordan_block(2, &X::from_int(3)),
            &ExpKind::Shifted {
                lambda: X::from_int(3),
                exp_lambda: X::from_int(7),
            },
        )
        .unwrap();
        assert_eq!(sh, M::from_ints(&[&[7, 7], &[0, 7]]));
    }

    #[test]
    fn exp_commutes_with_similarity() {
        let l = l_block::<X>(5).unwrap();
        let s = transition(&CanonicalSpec::<X>::nilpotent(vec![5], vec![1]).unwrap()).unwrap();
        let si = s.inverse().unwrap();
        let lhs = nilpotent_exp(&(&(&si * &jordan_block(5, &X::zero())) * &s)).unwrap();
        let rhs = &(&si * &nilpotent_exp(&jordan_block(5, &X::zero())).unwrap()) * &s;
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, nilpotent_exp(&l).unwrap());
    }

    #[test]
    fn rotation_from_imaginary_lambda() {
        let phi: f64 = 0.7;
        let lam = FloatScalar::new(0.0, phi).unwrap();
        let spec = CanonicalSpec::new(
            CanonicalCase::OrthGeneric {
                lambda: lam,
                exp_lambda: None,
            },
            SegmentSpec::new(vec![1], vec![1]).unwrap(),
        )
        .unwrap();
        let o = assemble_canonical(&spec).unwrap();
        let expect = [[phi.cos(), -phi.sin()], [phi.sin(), phi.cos()]];
        for (r, row) in expect.iter().enumerate() {
            for (k, &e) in row.iter().enumerate() {
                assert!((o.get(r, k).to_complex() - e).norm() < 1e-12);
            }
        }
        // lambda = -i phi gives the cos/sin layout with sin in the upper right corner
        let spec = CanonicalSpec::new(
            CanonicalCase::OrthGeneric {
                lambda: FloatScalar::new(0.0, -phi).unwrap(),
                exp_lambda: None,
            },
            SegmentSpec::new(vec![1], vec![1]).unwrap(),
        )
        .unwrap();
        let o = assemble_canonical(&spec).unwrap();
        assert!((o.get(0, 1).to_complex() - phi.sin()).norm() < 1e-12);
    }

    #[test]
    fn orthogonal_assemblies_are_orthogonal() {
        let spec = CanonicalSpec::<X>::new(
            CanonicalCase::Unipotent { epsilon: -1 },
            SegmentSpec::new(vec![4, 3, 1], vec![1, 1, 2]).unwrap(),
        )
        .unwrap();
        let q = assemble_canonical(&spec).unwrap();
        assert!((&q.transpose() * &q).is_identity());
        // exact generic case with e^lambda = i
        let spec = CanonicalSpec::new(
            CanonicalCase::OrthGeneric {
                lambda: X::from_int(1),
                exp_lambda: Some(i()),
            },
            SegmentSpec::new(vec![2, 1], vec![1, 1]).unwrap(),
        )
        .unwrap();
        let q = assemble_canonical(&spec).unwrap();
        assert!((&q.transpose() * &q).is_identity());
        let no_exp = CanonicalSpec::new(
            CanonicalCase::OrthGeneric {
                lambda: X::from_int(1),
                exp_lambda: None,
            },
            SegmentSpec::new(vec![1], vec![1]).unwrap(),
        )
        .unwrap();
        assert!(matches!(assemble_canonical(&no_exp), Err(Error::BackendUnavailable(_))));
    }

    #[test]
    fn spec_validation() {
        assert!(SegmentSpec::new(vec![1, 2], vec![1, 1]).is_err());
        assert!(SegmentSpec::new(vec![2, 2], vec![1, 1]).is_err());
        assert!(SegmentSpec::new(vec![2], vec![0]).is_err());
        assert!(CanonicalSpec::nonzero(X::zero(), vec![1], vec![1]).is_err());
        let s = SegmentSpec::new(vec![4, 3, 2], vec![1, 2, 3]).unwrap();
        assert_eq!(s.mu_tilde(), vec![2, 2, 6]);
    }

    #[test]
    fn omega_examples() {
        assert!(omega::<X>(1, 4).is_identity());
        assert!(omega::<X>(4, 1).is_identity());
        for a in 1..=6 {
            for m in 1..=4 {
                let w = omega::<X>(a, m);
                assert!((&w.transpose() * &w).is_identity());
                assert_eq!(w.inverse().unwrap(), w.transpose());
            }
        }
    }

    #[test]
    fn omega_regroups_the_displayed_block() {
        // a_k -> 1..6, b_k -> 11..16
        let a = |k: i64| k;
        let b = |k: i64| 10 + k;
        let x = M::from_ints(&[
            &[a(1), b(1), a(2), b(2), a(3), b(3)],
            &[0, a(1), 0, a(2), 0, a(3)],
            &[0, 0, 0, 0, 0, 0],
            &[a(4), b(4), a(5), b(5), a(6), b(6)],
            &[0, a(4), 0, a(5), 0, a(6)],
            &[0, 0, 0, 0, 0, 0],
        ]);
        let expect = M::from_ints(&[
            &[a(1), a(2), a(3), b(1), b(2), b(3)],
            &[a(4), a(5), a(6), b(4), b(5), b(6)],
            &[0, 0, 0, a(1), a(2), a(3)],
            &[0, 0, 0, a(4), a(5), a(6)],
            &[0, 0, 0, 0, 0, 0],
            &[0, 0, 0, 0, 0, 0],
        ]);
        let got = &(&omega::<X>(3, 2).transpose() * &x) * &omega::<X>(2, 3);
        assert_eq!(got, expect);
    }

    #[test]
    fn omega_tilde_groups_eigenvalues() {
        let lam = X::from_int(5);
        let seg = SegmentSpec::new(vec![1], vec![1]).unwrap();
        assert!(omega_tilde::<X>(&seg).is_identity());
        let seg = SegmentSpec::new(vec![1], vec![2]).unwrap();
        let d = M::diagonal(&[lam.clone(), lam.neg(), lam.clone(), lam.neg()]);
        let w = omega_tilde::<X>(&seg);
        assert_eq!(
            &(&w.transpose() * &d) * &w,
            M::diagonal(&[lam.clone(), lam.clone(), lam.neg(), lam.neg()])
        );
        for (a, m) in [(vec![3, 1], vec![2, 1]), (vec![4, 2, 1], vec![1, 2, 1])] {
            let seg = SegmentSpec::new(a.clone(), m.clone()).unwrap();
            let spec = CanonicalSpec::nonzero(lam.clone(), a.clone(), m.clone()).unwrap();
            let w = omega_tilde::<X>(&seg);
            assert!((&w.transpose() * &w).is_identity());
            let j = jordan_assembly(&spec).unwrap();
            let mut plus = Vec::new();
            let mut minus = Vec::new();
            for (&al, &mm) in a.iter().zip(&m) {
                for _ in 0..mm {
                    plus.push(jordan_block(al, &lam));
                    minus.push(jordan_block(al, &lam.neg()));
                }
            }
            plus.extend(minus);
            assert_eq!(&(&w.transpose() * &j) * &w, M::direct_sum(&plus));
        }
    }
}
