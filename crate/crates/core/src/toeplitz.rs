//! The block Toeplitz group `T^{alpha,mu}`, alternating Toeplitz data and the
//! generator families of the unipotent part.
//!
//! Block `(r, s)` of an element is an `alpha_r x alpha_s` grid of `m_r x m_s`
//! blocks; grid entry `(a, b)` equals `A^{rs}_{b - a - d_rs}` when that index lies
//! in `0..b_rs` and vanishes otherwise, with `d_rs = max(0, alpha_s - alpha_r)`.
//! Segment indices are 0-based throughout the library.

use std::collections::BTreeMap;

use crate::canonical::{backward_identity, omega_sum, SegmentSpec};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::random::{self, SeededRng};
use crate::scalar::Scalar;

/// Tolerance used when extracting float matrices; exact extraction ignores it.
pub const EXTRACT_TOL: f64 = 1e-9;

/// Position of grid entry `(a, b)` of block `(r, s)` in the parameter list.
fn pattern_index(spec: &SegmentSpec, r: usize, s: usize, a: usize, b: usize) -> Option<usize> {
    let n = b.checked_sub(a)?.checked_sub(spec.shift(r, s))?;
    (n < spec.b(r, s)).then_some(n)
}

fn close<T: Scalar>(x: &T, y: &T, scale: f64, tol: f64) -> bool {
    x.sub(y).negligible(scale, tol)
}

/// First entry (0-based) where two equally shaped matrices differ.
fn first_mismatch<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>, tol: f64) -> Option<(usize, usize)> {
    let scale = x.max_abs().max(y.max_abs()).max(1.0);
    (0..x.rows())
        .flat_map(|i| (0..x.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| !close(x.get(i, j), y.get(i, j), scale, tol))
}

/// An element of `T^{alpha,mu}` stored by its defining blocks `A^{rs}_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzElement<T> {
    spec: SegmentSpec,
    blocks: BTreeMap<(usize, usize), Vec<Matrix<T>>>,
}

impl<T: Scalar> ToeplitzElement<T> {
    /// Validates shapes and nonsingularity of every `A^{rr}_0`.
    pub fn new(spec: SegmentSpec, blocks: BTreeMap<(usize, usize), Vec<Matrix<T>>>) -> Result<Self> {
        let n = spec.len();
        for r in 0..n {
            for s in 0..n {
                let list = blocks
                    .get(&(r, s))
                    .ok_or_else(|| Error::InvalidBlock(format!("missing block ({}, {})", r + 1, s + 1)))?;
                if list.len() != spec.b(r, s) {
                    return Err(Error::InvalidBlock(format!(
                        "block ({}, {}) needs {} parameters, got {}",
                        r + 1,
                        s + 1,
                        spec.b(r, s),
                        list.len()
                    )));
                }
                let shape = (spec.mu()[r], spec.mu()[s]);
                if list.iter().any(|a| a.shape() != shape) {
                    return Err(Error::Shape(format!(
                        "parameters of block ({}, {}) must be {}x{}",
                        r + 1,
                        s + 1,
                        shape.0,
                        shape.1
                    )));
                }
            }
            if blocks[&(r, r)][0].rank() < spec.mu()[r] {
                return Err(Error::SingularMatrix);
            }
        }
        if blocks.keys().any(|&(r, s)| r >= n || s >= n) {
            return Err(Error::InvalidBlock("block index out of range".into()));
        }
        Ok(ToeplitzElement { spec, blocks })
    }

    pub fn identity(spec: &SegmentSpec) -> Self {
        Self::from_fn(spec, |r, s, n| {
            if r == s && n == 0 {
                Matrix::identity(spec.mu()[r])
            } else {
                Matrix::zeros(spec.mu()[r], spec.mu()[s])
            }
        })
    }

    /// Builds all parameters from `f(r, s, n)` without validation.
    pub(crate) fn from_fn(spec: &SegmentSpec, mut f: impl FnMut(usize, usize, usize) -> Matrix<T>) -> Self {
        let mut blocks = BTreeMap::new();
        for r in 0..spec.len() {
            for s in 0..spec.len() {
                blocks.insert((r, s), (0..spec.b(r, s)).map(|n| f(r, s, n)).collect());
            }
        }
        ToeplitzElement {
            spec: spec.clone(),
            blocks,
        }
    }

    pub fn spec(&self) -> &SegmentSpec {
        &self.spec
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), Vec<Matrix<T>>> {
        &self.blocks
    }

    /// Parameters `A^{rs}_0, ..., A^{rs}_{b_rs - 1}`.
    pub fn block(&self, r: usize, s: usize) -> &[Matrix<T>] {
        &self.blocks[&(r, s)]
    }

    pub fn param(&self, r: usize, s: usize, n: usize) -> &Matrix<T> {
        &self.blocks[&(r, s)][n]
    }

    pub fn assemble(&self) -> Matrix<T> {
        let spec = &self.spec;
        let mut out = Matrix::zeros(spec.size(), spec.size());
        for r in 0..spec.len() {
            let (ar, mr) = (spec.alpha()[r], spec.mu()[r]);
            for s in 0..spec.len() {
                let (as_, ms) = (spec.alpha()[s], spec.mu()[s]);
                for a in 0..ar {
                    for b in 0..as_ {
                        if let Some(n) = pattern_index(spec, r, s, a, b) {
                            out.set_block(spec.offset(r) + a * mr, spec.offset(s) + b * ms, self.param(r, s, n));
                        }
                    }
                }
            }
        }
        out
    }

    /// Reads the parameters of `m` and checks the full pattern.
    pub fn extract(spec: &SegmentSpec, m: &Matrix<T>) -> Result<Self> {
        Self::extract_with_tol(spec, m, EXTRACT_TOL)
    }

    pub fn extract_with_tol(spec: &SegmentSpec, m: &Matrix<T>, tol: f64) -> Result<Self> {
        if m.shape() != (spec.size(), spec.size()) {
            return Err(Error::Shape(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                spec.size(),
                m.rows(),
                m.cols()
            )));
        }
        let x = Self::from_fn(spec, |r, s, n| {
            let (mr, ms) = (spec.mu()[r], spec.mu()[s]);
            m.block(spec.offset(r), spec.offset(s) + (spec.shift(r, s) + n) * ms, mr, ms)
        });
        if let Some((i, j)) = first_mismatch(m, &x.assemble(), tol) {
            return Err(Error::NotInGroup { row: i + 1, col: j + 1 });
        }
        for r in 0..spec.len() {
            if x.param(r, r, 0).rank() < spec.mu()[r] {
                return Err(Error::SingularMatrix);
            }
        }
        Ok(x)
    }

    fn check_spec(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::InvalidSpec("elements belong to different groups".into()));
        }
        Ok(())
    }

    /// Product through the dense matrices; extraction asserts closure.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        Self::extract(&self.spec, &self.assemble().multiply(&other.assemble())?)
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::extract(&self.spec, &self.assemble().inverse()?)
    }

    /// Keeps only the `A^{rr}_0` blocks.
    pub fn diagonal_part(&self) -> Self {
        let spec = &self.spec;
        Self::from_fn(spec, |r, s, n| {
            if r == s && n == 0 {
                self.param(r, r, 0).clone()
            } else {
                Matrix::zeros(spec.mu()[r], spec.mu()[s])
            }
        })
    }

    /// `x = D U` with `D` block diagonal and `U` unipotent.
    pub fn semidirect_factor(&self) -> Result<(Self, Self)> {
        let d = self.diagonal_part();
        let u = d.inverse()?.product(self)?;
        Ok((d, u))
    }

    /// Every `A^{rr}_0` is the identity.
    pub fn is_unipotent(&self) -> bool {
        (0..self.spec.len()).all(|r| self.param(r, r, 0).is_identity())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.spec)
    }

    /// Random element with small rational entries; singular diagonal seeds are redrawn.
    pub fn random(spec: &SegmentSpec, rng: &mut SeededRng) -> Self {
        Self::from_fn(spec, |r, s, n| {
            if r == s && n == 0 {
                random::invertible(rng, spec.mu()[r])
            } else {
                random::matrix(rng, spec.mu()[r], spec.mu()[s])
            }
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&Matrix<T>) -> Matrix<U>) -> ToeplitzElement<U> {
        ToeplitzElement {
            spec: self.spec.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|(&k, v)| (k, v.iter().map(&f).collect()))
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// reshuffling
// ---------------------------------------------------------------------------

/// `Omega^T X Omega` for `X` made of rectangular Toeplitz `alpha_r x alpha_s` blocks
/// (the commutant shape of a Jordan matrix), landing in `T^{alpha,mu}`.
pub fn reshuffle<T: Scalar>(spec: &SegmentSpec, x: &Matrix<T>) -> Result<Matrix<T>> {
    check_structured(spec, x)?;
    let w = omega_sum::<T>(spec);
    Ok(&(&w.transpose() * x) * &w)
}

/// Inverse of [`reshuffle`]: `Omega X Omega^T` for `X` in `T^{alpha,mu}`.
pub fn unshuffle<T: Scalar>(spec: &SegmentSpec, x: &Matrix<T>) -> Result<Matrix<T>> {
    ToeplitzElement::extract(spec, x)?;
    let w = omega_sum::<T>(spec);
    Ok(&(&w * x) * &w.transpose())
}

fn check_structured<T: Scalar>(spec: &SegmentSpec, x: &Matrix<T>) -> Result<()> {
    if x.shape() != (spec.size(), spec.size()) {
        return Err(Error::Shape(format!("expected a {0}x{0} matrix", spec.size())));
    }
    let scale = x.max_abs().max(1.0);
    for r in 0..spec.len() {
        let ar = spec.alpha()[r];
        for s in 0..spec.len() {
            let as_ = spec.alpha()[s];
            for i in 0..spec.mu()[r] {
                for j in 0..spec.mu()[s] {
                    let (r0, c0) = (spec.offset(r) + i * ar, spec.offset(s) + j * as_);
                    let first_row = |n: usize| x.get(r0, c0 + spec.shift(r, s) + n);
                    for a in 0..ar {
                        for b in 0..as_ {
                            let got = x.get(r0 + a, c0 + b);
                            let ok = match pattern_index(spec, r, s, a, b) {
                                Some(n) => close(got, first_row(n), scale, EXTRACT_TOL),
                                None => got.negligible(scale, EXTRACT_TOL),
                            };
                            if !ok {
                                return Err(Error::NotInGroup {
                                    row: r0 + a + 1,
                                    col: c0 + b + 1,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// alternating Toeplitz data
// ---------------------------------------------------------------------------

/// Symmetry convention of alternating data.
///
/// `Standard`: `B^r_j` is symmetric for `alpha_r - j` odd and skew for `alpha_r - j`
/// even, so that `F T_a^T F = T_a`. `Flipped` swaps the two, giving
/// `F T_a^T F = -T_a`; the congruence equation is equally solvable under it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Standard,
    Flipped,
}

impl Parity {
    /// `+1` when the data must be symmetric at `(alpha, j)`, `-1` for skew.
    pub fn sign(self, alpha: usize, j: usize) -> i8 {
        let base = if (alpha - j) % 2 == 1 { 1 } else { -1 };
        match self {
            Parity::Standard => base,
            Parity::Flipped => -base,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Standard => "standard",
            Parity::Flipped => "flipped",
        }
    }
}

/// `+1` for symmetric, `-1` for skew, `None` for neither.
pub fn symmetry_sign<T: Scalar>(b: &Matrix<T>) -> Option<i8> {
    if b.is_symmetric() {
        Some(1)
    } else if b.is_skew() {
        Some(-1)
    } else {
        None
    }
}

fn has_sign<T: Scalar>(b: &Matrix<T>, sign: i8) -> bool {
    if sign > 0 {
        b.is_symmetric()
    } else {
        b.is_skew()
    }
}

/// Per segment, the blocks `B^r_0..B^r_{alpha_r - 1}` of an alternating Toeplitz matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AltToeplitzData<T> {
    spec: SegmentSpec,
    blocks: Vec<Vec<Matrix<T>>>,
    parity: Parity,
}

impl<T: Scalar> AltToeplitzData<T> {
    pub fn new(spec: SegmentSpec, blocks: Vec<Vec<Matrix<T>>>, parity: Parity) -> Result<Self> {
        if blocks.len() != spec.len() {
            return Err(Error::InvalidBlock(format!(
                "{} segments of data for {} segments",
                blocks.len(),
                spec.len()
            )));
        }
        for (r, list) in blocks.iter().enumerate() {
            let (a, m) = (spec.alpha()[r], spec.mu()[r]);
            if list.len() != a {
                return Err(Error::InvalidBlock(format!(
                    "segment {} needs {a} blocks, got {}",
                    r + 1,
                    list.len()
                )));
            }
            for (j, b) in list.iter().enumerate() {
                if b.shape() != (m, m) {
                    return Err(Error::Shape(format!("B^{}_{j} must be {m}x{m}", r + 1)));
                }
                if !has_sign(b, parity.sign(a, j)) {
                    return Err(Error::Parity(format!(
                        "B^{}_{j} must be {} under the {} convention",
                        r + 1,
                        if parity.sign(a, j) > 0 {
                            "symmetric"
                        } else {
                            "skew-symmetric"
                        },
                        parity.name()
                    )));
                }
            }
            if list[0].rank() < m {
                return Err(Error::SingularMatrix);
            }
        }
        Ok(AltToeplitzData { spec, blocks, parity })
    }

    /// Infers the convention from `B^1_0` and validates everything against it.
    pub fn infer(spec: SegmentSpec, blocks: Vec<Vec<Matrix<T>>>) -> Result<Self> {
        let b0 = blocks
            .first()
            .and_then(|l| l.first())
            .ok_or_else(|| Error::InvalidBlock("empty alternating data".into()))?;
        let sign =
            symmetry_sign(b0).ok_or_else(|| Error::Parity("B^1_0 is neither symmetric nor skew-symmetric".into()))?;
        let parity = if Parity::Standard.sign(spec.alpha()[0], 0) == sign {
            Parity::Standard
        } else {
            Parity::Flipped
        };
        Self::new(spec, blocks, parity)
    }

    /// `bigoplus_r T_a(B_r, 0, ..., 0)`.
    pub fn from_seeds(spec: SegmentSpec, seeds: &[Matrix<T>]) -> Result<Self> {
        if seeds.len() != spec.len() {
            return Err(Error::InvalidBlock(format!(
                "{} seeds for {} segments",
                seeds.len(),
                spec.len()
            )));
        }
        let blocks = seeds
            .iter()
            .zip(spec.alpha())
            .map(|(b, &a)| {
                let mut l = vec![b.clone()];
                l.extend((1..a).map(|_| Matrix::zeros(b.rows(), b.cols())));
                l
            })
            .collect();
        Self::infer(spec, blocks)
    }

    pub fn spec(&self) -> &SegmentSpec {
        &self.spec
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn blocks(&self) -> &[Vec<Matrix<T>>] {
        &self.blocks
    }

    /// `B^r_j`, zero for `j >= alpha_r`.
    pub fn get(&self, r: usize, j: usize) -> Matrix<T> {
        self.blocks[r]
            .get(j)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.spec.mu()[r], self.spec.mu()[r]))
    }

    /// Symmetry sign of `B^r_0`.
    pub fn seed_sign(&self, r: usize) -> i8 {
        self.parity.sign(self.spec.alpha()[r], 0)
    }

    pub fn assemble(&self) -> Matrix<T> {
        let parts: Vec<_> = self.blocks.iter().map(|l| t_alt(l)).collect();
        Matrix::direct_sum(&parts)
    }

    /// Random data under `parity`; entries are small rationals.
    pub fn random(spec: &SegmentSpec, parity: Parity, rng: &mut SeededRng) -> Result<Self> {
        let mut blocks = Vec::new();
        for (&a, &m) in spec.alpha().iter().zip(spec.mu()) {
            let sym0 = parity.sign(a, 0) > 0;
            if !sym0 && m % 2 == 1 {
                return Err(Error::Parity(format!(
                    "a nonsingular skew B_0 needs even size, segment has m = {m}"
                )));
            }
            let mut l = vec![random::invertible_with_symmetry(rng, m, sym0)];
            l.extend((1..a).map(|j| random::with_symmetry(rng, m, parity.sign(a, j) > 0)));
            blocks.push(l);
        }
        Self::new(spec.clone(), blocks, parity)
    }
}

/// `T_a(B_0, ..., B_{n-1})`: block `(a, c)` is `(-1)^a B_{c-a}` for `c >= a`.
pub fn t_alt<T: Scalar>(bs: &[Matrix<T>]) -> Matrix<T> {
    let n = bs.len();
    let m = bs[0].rows();
    let mut out = Matrix::zeros(n * m, n * m);
    for a in 0..n {
        for c in a..n {
            let b = &bs[c - a];
            out.set_block(a * m, c * m, &if a % 2 == 0 { b.clone() } else { -b });
        }
    }
    out
}

/// `T(A_0, ..., A_{n-1})`, the upper triangular block Toeplitz matrix.
pub fn t_upper<T: Scalar>(bs: &[Matrix<T>]) -> Matrix<T> {
    let n = bs.len();
    let (p, q) = bs[0].shape();
    let mut out = Matrix::zeros(n * p, n * q);
    for a in 0..n {
        for c in a..n {
            out.set_block(a * p, c * q, &bs[c - a]);
        }
    }
    out
}

/// `F = bigoplus_r E_{alpha_r}(I_{m_r})`.
pub fn f_block<T: Scalar>(spec: &SegmentSpec) -> Matrix<T> {
    let parts: Vec<_> = spec
        .alpha()
        .iter()
        .zip(spec.mu())
        .map(|(&a, &m)| backward_identity::<T>(a).kron(&Matrix::identity(m)))
        .collect();
    Matrix::direct_sum(&parts)
}

/// `F X^T F B X`, the left side of the congruence equation.
pub fn congruence_form<T: Scalar>(f: &Matrix<T>, b: &Matrix<T>, x: &Matrix<T>) -> Matrix<T> {
    &(&(&(f * &x.transpose()) * f) * b) * x
}

// ---------------------------------------------------------------------------
// generators of the unipotent part
// ---------------------------------------------------------------------------

fn check_seeds<T: Scalar>(spec: &SegmentSpec, b: &[Matrix<T>]) -> Result<Vec<i8>> {
    if b.len() != spec.len() {
        return Err(Error::InvalidGenerator(format!(
            "{} matrices B_r for {} segments",
            b.len(),
            spec.len()
        )));
    }
    b.iter()
        .enumerate()
        .map(|(r, br)| {
            let m = spec.mu()[r];
            if br.shape() != (m, m) {
                return Err(Error::Shape(format!("B_{} must be {m}x{m}", r + 1)));
            }
            let sign = symmetry_sign(br)
                .ok_or_else(|| Error::Parity(format!("B_{} is neither symmetric nor skew-symmetric", r + 1)))?;
            if br.rank() < m {
                return Err(Error::SingularMatrix);
            }
            Ok(sign)
        })
        .collect()
}

/// Required symmetry of `Z_j` for a seed of symmetry `sigma`: `Z^T = -(-1)^j sigma Z`.
pub fn z_sign(j: usize, sigma: i8) -> i8 {
    if j.is_multiple_of(2) {
        -sigma
    } else {
        sigma
    }
}

/// The block diagonal unipotent generator `W = bigoplus_r T(I, W^r_1, ...)` with
/// `W_j = B^{-1}(Z_j - 1/2 sum_{k=1}^{j-1} (-1)^k W_k^T B W_{j-k})`.
///
/// `z[r]` lists `Z^r_1..Z^r_{alpha_r - 1}`. For symmetric `B_r` the `Z_j` are
/// symmetric for odd `j` and skew for even `j`; skew `B_r` reverses this.
pub fn generator_w<T: Scalar>(spec: &SegmentSpec, b: &[Matrix<T>], z: &[Vec<Matrix<T>>]) -> Result<ToeplitzElement<T>> {
    let signs = check_seeds(spec, b)?;
    if z.len() != spec.len() {
        return Err(Error::InvalidGenerator(format!(
            "{} Z lists for {} segments",
            z.len(),
            spec.len()
        )));
    }
    let mut diag = Vec::new();
    for r in 0..spec.len() {
        let (a, m) = (spec.alpha()[r], spec.mu()[r]);
        if z[r].len() + 1 != a {
            return Err(Error::InvalidGenerator(format!(
                "segment {} needs {} Z matrices, got {}",
                r + 1,
                a - 1,
                z[r].len()
            )));
        }
        let binv = b[r].inverse()?;
        let mut w = vec![Matrix::identity(m)];
        for j in 1..a {
            let zj = &z[r][j - 1];
            if zj.shape() != (m, m) {
                return Err(Error::Shape(format!("Z^{}_{j} must be {m}x{m}", r + 1)));
            }
            if !has_sign(zj, z_sign(j, signs[r])) {
                return Err(Error::Parity(format!(
                    "Z^{}_{j} must be {}",
                    r + 1,
                    if z_sign(j, signs[r]) > 0 {
                        "symmetric"
                    } else {
                        "skew-symmetric"
                    }
                )));
            }
            let mut acc = Matrix::zeros(m, m);
            for k in 1..j {
                let term = &(&w[k].transpose() * &b[r]) * &w[j - k];
                acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            let rhs = zj - &acc.scale(&T::from_frac(1, 2));
            w.push(&binv * &rhs);
        }
        diag.push(w);
    }
    Ok(ToeplitzElement::from_fn(spec, |r, s, n| {
        if r == s {
            diag[r][n].clone()
        } else {
            Matrix::zeros(spec.mu()[r], spec.mu()[s])
        }
    }))
}

fn check_h_indices<T: Scalar>(spec: &SegmentSpec, p: usize, t: usize, k: usize, f: &Matrix<T>) -> Result<()> {
    if !(p < t && t < spec.len()) {
        return Err(Error::InvalidGenerator(format!(
            "need p < t < N (0-based), got p = {p}, t = {t}, N = {}",
            spec.len()
        )));
    }
    if k >= spec.alpha()[t] {
        return Err(Error::InvalidGenerator(format!(
            "k = {k} must be below alpha_t = {}",
            spec.alpha()[t]
        )));
    }
    let shape = (spec.mu()[t], spec.mu()[p]);
    if f.shape() != shape {
        return Err(Error::Shape(format!("F must be m_t x m_p = {}x{}", shape.0, shape.1)));
    }
    Ok(())
}

/// The coupling generator between segments `p < t` (0-based): block `(t, p)` carries
/// `N^k(F)`, every other free parameter is trivial, and the remaining blocks are
/// solved from the congruence equation with `B = C = bigoplus T_a(B_r, 0, ...)`.
///
/// `F` is `m_t x m_p`. The output satisfies the congruence equation by construction.
pub fn generator_h<T: Scalar>(
    spec: &SegmentSpec,
    p: usize,
    t: usize,
    k: usize,
    f: &Matrix<T>,
    b: &[Matrix<T>],
) -> Result<ToeplitzElement<T>> {
    check_h_indices(spec, p, t, k, f)?;
    check_seeds(spec, b)?;
    let bdata = AltToeplitzData::from_seeds(spec.clone(), b)?;
    let problem = crate::solver::CongruenceProblem::new(bdata.clone(), bdata)?;
    let mut free = crate::solver::FreeData::trivial(spec);
    free.set_below(t, p, k, f.clone())?;
    crate::solver::congruence_solve(&problem, &free)
}

/// `a_n = -binom(2n, n) / (2^{2n+1} (n + 1))`.
pub fn a_coefficient<T: Scalar>(n: u32) -> T {
    let mut binom: i64 = 1;
    for i in 0..n as i64 {
        binom = binom * (2 * n as i64 - i) / (i + 1);
    }
    T::from_frac(-binom, (1i64 << (2 * n + 1)) * (n as i64 + 1))
}

/// The closed form of the coupling generator for a chosen `beta`, kept for
/// comparison with [`generator_h`]; it is not guaranteed to lie in the group.
pub fn generator_h_closed_form<T: Scalar>(
    spec: &SegmentSpec,
    p: usize,
    t: usize,
    k: usize,
    f: &Matrix<T>,
    b: &[Matrix<T>],
    beta: i64,
) -> Result<ToeplitzElement<T>> {
    check_h_indices(spec, p, t, k, f)?;
    check_seeds(spec, b)?;
    let (bp, bt) = (&b[p], &b[t]);
    let (bpi, bti) = (bp.inverse()?, bt.inverse()?);
    let ft = f.transpose();
    let corr = |r: usize, j: usize| -> Matrix<T> {
        let m = spec.mu()[r];
        let step = 2 * k as i64 + spec.alpha()[r] as i64 - beta;
        if step <= 0 || j as i64 % step != 0 {
            return Matrix::zeros(m, m);
        }
        let n = (j as i64 / step) as u32;
        let a = a_coefficient::<T>(n - 1);
        let core = if r == p {
            &(&ft * bt) * &(f * &bpi)
        } else {
            &(&(bt * f) * &bpi) * &ft
        };
        let (bi, bb) = if r == p { (&bpi, bp) } else { (&bti, bt) };
        (&(bi * &core.pow(n).expect("square")) * bb).scale(&a)
    };
    let tpt = -&(&(&bpi * &ft) * bp);
    Ok(ToeplitzElement::from_fn(spec, |r, s, n| {
        let shape = (spec.mu()[r], spec.mu()[s]);
        if r == s {
            match n {
                0 => Matrix::identity(shape.0),
                _ if r == p || r == t => corr(r, n),
                _ => Matrix::zeros(shape.0, shape.1),
            }
        } else if (r, s) == (t, p) && n == k {
            f.clone()
        } else if (r, s) == (p, t) && n == k {
            tpt.clone()
        } else {
            Matrix::zeros(shape.0, shape.1)
        }
    }))
}
