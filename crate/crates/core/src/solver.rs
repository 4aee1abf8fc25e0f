//! Solving `C = F X^T F B X` for `X` in `T^{alpha,mu}` by back-substitution.
//!
//! The free data are the blocks below the block diagonal, the seeds `A^{rr}_0` with
//! `C^r_0 = (A^{rr}_0)^T B^r_0 A^{rr}_0`, and matrices `Z^r_j` of prescribed symmetry.
//! All other blocks are then determined, one superdiagonal `j` at a time and, within
//! it, one block diagonal `p = s - r` at a time.
//!
//! Comparing first block rows, the `(r, s)` block (`r <= s`) of `F X^T F B X` reads
//! at position `j`
//!
//! ```text
//! sum_k (-1)^{d_rk} Psi^{krs}_{j - d_rk - d_ks},
//! Psi^{krs}_n = sum_{l=0}^{n} (-1)^l (A^{kr}_l)^T Phi^{ks}_{n-l},
//! Phi^{ks}_q  = sum_{i=0}^{q} B^k_{q-i} A^{ks}_i,
//! ```
//!
//! with `d_rs = max(0, alpha_s - alpha_r)` and out-of-range blocks zero. The `k = r`
//! term is `xi`, the `k > r` terms `Xi`, the `k < r` terms `Lambda`; their sum with the
//! unknown set to zero is `D`.

use std::collections::BTreeMap;

use crate::canonical::SegmentSpec;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::random::{self, SeededRng};
use crate::scalar::Scalar;
use crate::toeplitz::{symmetry_sign, z_sign, AltToeplitzData, Parity, ToeplitzElement};

/// Data `B` and `C` of the congruence equation, sharing one parity convention.
#[derive(Debug, Clone, PartialEq)]
pub struct CongruenceProblem<T> {
    b: AltToeplitzData<T>,
    c: AltToeplitzData<T>,
}

impl<T: Scalar> CongruenceProblem<T> {
    pub fn new(b: AltToeplitzData<T>, c: AltToeplitzData<T>) -> Result<Self> {
        if b.spec() != c.spec() {
            return Err(Error::InvalidSpec("B and C describe different segment data".into()));
        }
        if b.parity() != c.parity() {
            return Err(Error::Parity(format!(
                "B uses the {} convention but C the {} one",
                b.parity().name(),
                c.parity().name()
            )));
        }
        Ok(CongruenceProblem { b, c })
    }

    pub fn spec(&self) -> &SegmentSpec {
        self.b.spec()
    }

    pub fn b(&self) -> &AltToeplitzData<T> {
        &self.b
    }

    pub fn c(&self) -> &AltToeplitzData<T> {
        &self.c
    }

    pub fn parity(&self) -> Parity {
        self.b.parity()
    }

    /// A random solvable instance: random `B`, random free data, and `C` with
    /// `C_0 = A_0^T B_0 A_0` and random higher blocks of the right symmetry.
    pub fn random(spec: &SegmentSpec, parity: Parity, rng: &mut SeededRng) -> Result<(Self, FreeData<T>)> {
        let b = AltToeplitzData::random(spec, parity, rng)?;
        let mut free = FreeData::trivial(spec);
        for r in 0..spec.len() {
            let m = spec.mu()[r];
            free.seeds[r] = random::invertible(rng, m);
            let sigma = parity.sign(spec.alpha()[r], 0);
            for j in 1..spec.alpha()[r] {
                free.zees[r][j - 1] = random::with_symmetry(rng, m, z_sign(j, sigma) > 0);
            }
        }
        free.randomize_below(rng);
        let mut cblocks = Vec::new();
        for r in 0..spec.len() {
            let (a, m) = (spec.alpha()[r], spec.mu()[r]);
            let a0 = &free.seeds[r];
            let mut l = vec![&(&a0.transpose() * &b.get(r, 0)) * a0];
            l.extend((1..a).map(|j| random::with_symmetry(rng, m, parity.sign(a, j) > 0)));
            cblocks.push(l);
        }
        let c = AltToeplitzData::new(spec.clone(), cblocks, parity)?;
        Ok((CongruenceProblem::new(b, c)?, free))
    }
}

/// Free parameters of a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeData<T> {
    spec: SegmentSpec,
    below: BTreeMap<(usize, usize), Vec<Matrix<T>>>,
    seeds: Vec<Matrix<T>>,
    zees: Vec<Vec<Matrix<T>>>,
}

impl<T: Scalar> FreeData<T> {
    /// `below[(r, s)]` for `r > s` holds `A^{rs}_0..A^{rs}_{alpha_r - 1}`;
    /// `zees[r]` holds `Z^r_1..Z^r_{alpha_r - 1}`.
    pub fn new(
        spec: SegmentSpec,
        below: BTreeMap<(usize, usize), Vec<Matrix<T>>>,
        seeds: Vec<Matrix<T>>,
        zees: Vec<Vec<Matrix<T>>>,
    ) -> Result<Self> {
        let n = spec.len();
        let mu = spec.mu();
        for r in 0..n {
            for s in 0..r {
                let l = below
                    .get(&(r, s))
                    .ok_or_else(|| Error::InvalidBlock(format!("missing block ({}, {})", r + 1, s + 1)))?;
                if l.len() != spec.b(r, s) || l.iter().any(|a| a.shape() != (mu[r], mu[s])) {
                    return Err(Error::Shape(format!(
                        "block ({}, {}) needs {} matrices of size {}x{}",
                        r + 1,
                        s + 1,
                        spec.b(r, s),
                        mu[r],
                        mu[s]
                    )));
                }
            }
        }
        if below.keys().any(|&(r, s)| r <= s || r >= n) {
            return Err(Error::InvalidBlock("free blocks must lie below the diagonal".into()));
        }
        if seeds.len() != n || seeds.iter().zip(mu).any(|(a, &m)| a.shape() != (m, m)) {
            return Err(Error::Shape("one m_r x m_r seed per segment is required".into()));
        }
        if zees.len() != n
            || zees
                .iter()
                .enumerate()
                .any(|(r, l)| l.len() + 1 != spec.alpha()[r] || l.iter().any(|z| z.shape() != (mu[r], mu[r])))
        {
            return Err(Error::Shape(
                "segment r needs alpha_r - 1 matrices Z of size m_r x m_r".into(),
            ));
        }
        Ok(FreeData {
            spec,
            below,
            seeds,
            zees,
        })
    }

    /// Identity seeds, everything else zero.
    pub fn trivial(spec: &SegmentSpec) -> Self {
        let mu = spec.mu();
        let mut below = BTreeMap::new();
        for r in 0..spec.len() {
            for s in 0..r {
                below.insert((r, s), vec![Matrix::zeros(mu[r], mu[s]); spec.b(r, s)]);
            }
        }
        FreeData {
            spec: spec.clone(),
            below,
            seeds: mu.iter().map(|&m| Matrix::identity(m)).collect(),
            zees: spec
                .alpha()
                .iter()
                .zip(mu)
                .map(|(&a, &m)| vec![Matrix::zeros(m, m); a - 1])
                .collect(),
        }
    }

    /// Random below-diagonal blocks, random `Z` matching `problem`, and seeds from the
    /// Cayley transform; requires `C_0 = B_0` in every segment.
    pub fn random(problem: &CongruenceProblem<T>, rng: &mut SeededRng) -> Result<Self> {
        let spec = problem.spec();
        let mut free = Self::trivial(spec);
        free.randomize_below(rng);
        for r in 0..spec.len() {
            let (b0, c0) = (problem.b.get(r, 0), problem.c.get(r, 0));
            if b0 != c0 {
                return Err(Error::InvalidSeed {
                    segment: r + 1,
                    residual: "random seeds need C_0 = B_0".into(),
                });
            }
            let m = spec.mu()[r];
            let h = random::matrix(rng, m, m);
            free.seeds[r] = crate::isotropy::pseudo_orthogonal_sample(&b0, &h)?;
            let sigma = problem.b.seed_sign(r);
            for j in 1..spec.alpha()[r] {
                free.zees[r][j - 1] = random::with_symmetry(rng, m, z_sign(j, sigma) > 0);
            }
        }
        Ok(free)
    }

    fn randomize_below(&mut self, rng: &mut SeededRng) {
        for ((r, s), l) in self.below.iter_mut() {
            for a in l.iter_mut() {
                *a = random::matrix(rng, self.spec.mu()[*r], self.spec.mu()[*s]);
            }
        }
    }

    /// The free data that [`congruence_solve`] maps back to `x`, read off a solution:
    /// seeds and lower blocks directly, `Z^r_j = (Y - s Y^T) / 2` for
    /// `Y = (A^{rr}_0)^T B^r_0 A^{rr}_j` and `s = (-1)^j sigma_r`.
    pub fn of_solution(problem: &CongruenceProblem<T>, x: &ToeplitzElement<T>) -> Result<Self> {
        let spec = problem.spec();
        if x.spec() != spec {
            return Err(Error::InvalidSpec(
                "element and problem describe different segments".into(),
            ));
        }
        let mut free = Self::trivial(spec);
        for r in 0..spec.len() {
            for s in 0..r {
                free.below.insert((r, s), x.block(r, s).to_vec());
            }
            let a0 = x.param(r, r, 0);
            free.seeds[r] = a0.clone();
            let sigma = problem.b.seed_sign(r);
            let lhs = &a0.transpose() * &problem.b.get(r, 0);
            for j in 1..spec.alpha()[r] {
                let y = &lhs * x.param(r, r, j);
                let yt = signed(y.transpose(), sign_pow(j) * sigma);
                free.zees[r][j - 1] = (&y - &yt).scale(&T::from_frac(1, 2));
            }
        }
        Ok(free)
    }

    pub fn spec(&self) -> &SegmentSpec {
        &self.spec
    }

    pub fn below(&self) -> &BTreeMap<(usize, usize), Vec<Matrix<T>>> {
        &self.below
    }

    pub fn seeds(&self) -> &[Matrix<T>] {
        &self.seeds
    }

    pub fn zees(&self) -> &[Vec<Matrix<T>>] {
        &self.zees
    }

    pub fn set_below(&mut self, r: usize, s: usize, n: usize, a: Matrix<T>) -> Result<()> {
        let slot = self
            .below
            .get_mut(&(r, s))
            .and_then(|l| l.get_mut(n))
            .ok_or_else(|| Error::InvalidBlock(format!("no free slot A^({},{})_{n}", r + 1, s + 1)))?;
        if a.shape() != slot.shape() {
            return Err(Error::Shape(format!(
                "free block must be {}x{}",
                slot.rows(),
                slot.cols()
            )));
        }
        *slot = a;
        Ok(())
    }

    pub fn set_seed(&mut self, r: usize, a: Matrix<T>) -> Result<()> {
        let m = self.spec.mu()[r];
        if a.shape() != (m, m) {
            return Err(Error::Shape(format!("seed must be {m}x{m}")));
        }
        self.seeds[r] = a;
        Ok(())
    }

    /// Sets `Z^r_j`, `j >= 1`.
    pub fn set_z(&mut self, r: usize, j: usize, z: Matrix<T>) -> Result<()> {
        let m = self.spec.mu()[r];
        if z.shape() != (m, m) || j == 0 || j >= self.spec.alpha()[r] {
            return Err(Error::Shape(format!(
                "Z^{}_{j} must be {m}x{m} with 1 <= j < alpha_r",
                r + 1
            )));
        }
        self.zees[r][j - 1] = z;
        Ok(())
    }
}

/// Solves `A^T X + sign X^T A = rhs` as `X = (A^T)^{-1}(Z + rhs / 2)`.
///
/// `rhs^T = sign rhs` and `Z^T = -sign Z` are required.
pub fn skew_step_general<T: Scalar>(a: &Matrix<T>, rhs: &Matrix<T>, sign: i8, z: &Matrix<T>) -> Result<Matrix<T>> {
    let sym = |m: &Matrix<T>, s: i8| if s > 0 { m.is_symmetric() } else { m.is_skew() };
    if !sym(rhs, sign) {
        return Err(Error::Parity(format!(
            "right-hand side must be {}",
            if sign > 0 { "symmetric" } else { "skew-symmetric" }
        )));
    }
    if !sym(z, -sign) {
        return Err(Error::Parity(format!(
            "Z must be {}",
            if sign > 0 { "skew-symmetric" } else { "symmetric" }
        )));
    }
    let y = z + &rhs.scale(&T::from_frac(1, 2));
    Ok(&a.transpose().inverse()? * &y)
}

/// `A^T X + (-1)^j X^T A = B`.
pub fn skew_step_solve<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, j: usize, z: &Matrix<T>) -> Result<Matrix<T>> {
    skew_step_general(a, b, if j.is_multiple_of(2) { 1 } else { -1 }, z)
}

fn sign_pow(n: usize) -> i8 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn signed<T: Scalar>(m: Matrix<T>, sign: i8) -> Matrix<T> {
    if sign > 0 {
        m
    } else {
        -&m
    }
}

/// Partially known solution; `None` marks a block not yet computed.
struct Store<'a, T> {
    spec: &'a SegmentSpec,
    b: &'a AltToeplitzData<T>,
    vals: BTreeMap<(usize, usize), Vec<Option<Matrix<T>>>>,
}

impl<T: Scalar> Store<'_, T> {
    /// `A^{rs}_n`; `None` when out of range (zero), an error when not yet known.
    fn a(&self, r: usize, s: usize, n: isize) -> Result<Option<&Matrix<T>>> {
        if n < 0 || n as usize >= self.spec.b(r, s) {
            return Ok(None);
        }
        match &self.vals[&(r, s)][n as usize] {
            Some(m) => Ok(Some(m)),
            None => Err(Error::Solver(format!(
                "forward reference to A^({},{})_{n}",
                r + 1,
                s + 1
            ))),
        }
    }

    fn zeros(&self, r: usize, s: usize) -> Matrix<T> {
        Matrix::zeros(self.spec.mu()[r], self.spec.mu()[s])
    }

    fn phi(&self, k: usize, s: usize, q: usize) -> Result<Matrix<T>> {
        let mut acc = self.zeros(k, s);
        for i in 0..=q {
            if q - i >= self.spec.alpha()[k] {
                continue;
            }
            if let Some(a) = self.a(k, s, i as isize)? {
                acc = &acc + &(&self.b.blocks()[k][q - i] * a);
            }
        }
        Ok(acc)
    }

    fn psi(&self, k: usize, r: usize, s: usize, n: isize) -> Result<Matrix<T>> {
        let mut acc = self.zeros(r, s);
        if n < 0 {
            return Ok(acc);
        }
        for l in 0..=n {
            if let Some(a) = self.a(k, r, l)? {
                let term = &a.transpose() * &self.phi(k, s, (n - l) as usize)?;
                acc = if l % 2 == 0 { &acc + &term } else { &acc - &term };
            }
        }
        Ok(acc)
    }

    /// The `k = r` term.
    fn xi(&self, r: usize, s: usize, j: usize) -> Result<Matrix<T>> {
        self.psi(r, r, s, j as isize)
    }

    /// The `k > r` terms.
    fn big_xi(&self, r: usize, s: usize, j: usize) -> Result<Matrix<T>> {
        let mut acc = self.zeros(r, s);
        for k in r + 1..self.spec.len() {
            let n = j as isize - self.spec.shift(k, s) as isize;
            acc = &acc + &self.psi(k, r, s, n)?;
        }
        Ok(acc)
    }

    /// The `k < r` terms, each carrying `(-1)^{d_rk}`.
    fn lambda(&self, r: usize, s: usize, j: usize) -> Result<Matrix<T>> {
        let mut acc = self.zeros(r, s);
        for k in 0..r {
            let d = self.spec.shift(r, k);
            let n = j as isize - d as isize - self.spec.shift(k, s) as isize;
            acc = &acc + &signed(self.psi(k, r, s, n)?, sign_pow(d));
        }
        Ok(acc)
    }

    fn d(&self, r: usize, s: usize, j: usize) -> Result<Matrix<T>> {
        Ok(&(&self.xi(r, s, j)? + &self.big_xi(r, s, j)?) + &self.lambda(r, s, j)?)
    }
}

/// One unknown block `A^{rs}_j` with `s = r + p`.
pub(crate) type Step = (usize, usize, usize);

/// Superdiagonals `j` outermost, then block diagonals `p`, then rows `r`.
pub(crate) fn schedule(spec: &SegmentSpec) -> Vec<Step> {
    let n = spec.len();
    let mut out = Vec::new();
    for j in 0..spec.alpha()[0] {
        for p in 0..n {
            for r in 0..n - p {
                if j < spec.b(r, r + p) && !(p == 0 && j == 0) {
                    out.push((j, p, r));
                }
            }
        }
    }
    out
}

fn validate<T: Scalar>(problem: &CongruenceProblem<T>, free: &FreeData<T>) -> Result<()> {
    let spec = problem.spec();
    if free.spec() != spec {
        return Err(Error::InvalidSpec(
            "free data and problem describe different segments".into(),
        ));
    }
    for r in 0..spec.len() {
        let a0 = &free.seeds[r];
        let res = &(&(&a0.transpose() * &problem.b.get(r, 0)) * a0) - &problem.c.get(r, 0);
        if !res.is_zero() {
            return Err(Error::InvalidSeed {
                segment: r + 1,
                residual: format!("{:e}", res.max_abs()),
            });
        }
        let sigma = problem.b.seed_sign(r);
        for (j, z) in free.zees[r].iter().enumerate().map(|(i, z)| (i + 1, z)) {
            let want = z_sign(j, sigma);
            if symmetry_sign(z) != Some(want) && !z.is_zero() {
                return Err(Error::Parity(format!(
                    "Z^{}_{j} must be {}",
                    r + 1,
                    if want > 0 { "symmetric" } else { "skew-symmetric" }
                )));
            }
        }
    }
    Ok(())
}

/// The unique `X` extending `free` with `F X^T F B X = C`.
pub fn congruence_solve<T: Scalar>(problem: &CongruenceProblem<T>, free: &FreeData<T>) -> Result<ToeplitzElement<T>> {
    validate(problem, free)?;
    solve_in_order(problem, free, &schedule(problem.spec()))
}

pub(crate) fn solve_in_order<T: Scalar>(
    problem: &CongruenceProblem<T>,
    free: &FreeData<T>,
    order: &[Step],
) -> Result<ToeplitzElement<T>> {
    let spec = problem.spec();
    let n = spec.len();
    let mut vals = BTreeMap::new();
    for r in 0..n {
        for s in 0..n {
            let mut l: Vec<Option<Matrix<T>>> = vec![None; spec.b(r, s)];
            if r > s {
                l = free.below[&(r, s)].iter().cloned().map(Some).collect();
            } else if r == s {
                l[0] = Some(free.seeds[r].clone());
            }
            vals.insert((r, s), l);
        }
    }
    let mut store = Store {
        spec,
        b: &problem.b,
        vals,
    };
    for &(j, p, r) in order {
        let s = r + p;
        let zero = store.zeros(r, s);
        store.vals.get_mut(&(r, s)).unwrap()[j] = Some(zero);
        let d = store.d(r, s, j)?;
        let a0 = &free.seeds[r];
        let c0inv = problem.c.get(r, 0).inverse()?;
        let value = if p == 0 {
            let sigma = problem.b.seed_sign(r);
            let rhs = &problem.c.get(r, j) - &d;
            let a = &problem.b.get(r, 0).transpose() * a0;
            skew_step_general(&a, &rhs, sign_pow(j) * sigma, &free.zees[r][j - 1])
                .map_err(|e| Error::Solver(format!("diagonal step j = {j}, r = {}: {e}", r + 1)))?
        } else {
            -&(&(a0 * &c0inv) * &d)
        };
        store.vals.get_mut(&(r, s)).unwrap()[j] = Some(value);
    }
    let mut blocks = BTreeMap::new();
    for (k, l) in store.vals {
        let l = l
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| Error::Solver(format!("A^({},{})_{i} never computed", k.0 + 1, k.1 + 1))))
            .collect::<Result<Vec<_>>>()?;
        blocks.insert(k, l);
    }
    let x = ToeplitzElement::new(spec.clone(), blocks)?;
    if cfg!(debug_assertions) {
        check_psi_symmetry(problem, &x)?;
    }
    Ok(x)
}

/// `(Psi^{krs}_n)^T = tau (-1)^{alpha_k + n + 1} Psi^{ksr}_n` with `tau = -1` under the
/// flipped convention.
pub fn check_psi_symmetry<T: Scalar>(problem: &CongruenceProblem<T>, x: &ToeplitzElement<T>) -> Result<()> {
    let spec = problem.spec();
    let store = Store {
        spec,
        b: &problem.b,
        vals: x
            .blocks()
            .iter()
            .map(|(&k, l)| (k, l.iter().cloned().map(Some).collect()))
            .collect(),
    };
    let tau = match problem.parity() {
        Parity::Standard => 1,
        Parity::Flipped => -1,
    };
    let n = spec.len();
    for k in 0..n {
        for r in 0..n {
            for s in r..n {
                for m in 0..spec.alpha()[0] {
                    let lhs = store.psi(k, r, s, m as isize)?.transpose();
                    let rhs = signed(store.psi(k, s, r, m as isize)?, tau * sign_pow(spec.alpha()[k] + m + 1));
                    if !(&lhs - &rhs).is_zero() {
                        return Err(Error::Solver(format!(
                            "Psi symmetry fails at k = {}, r = {}, s = {}, n = {m}",
                            k + 1,
                            r + 1,
                            s + 1
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Dimension of the solution set under the standard convention:
/// `sum_r (alpha_r m_r^2 / 2 + sum_{s<r} alpha_r m_r m_s) - sum_{alpha_r odd} m_r / 2`.
pub fn solution_dim(spec: &SegmentSpec) -> usize {
    solution_dim_for(spec, Parity::Standard)
}

/// Solution count under either convention; the odd-size correction `m_r / 2`
/// changes sign under [`Parity::Flipped`], where those seeds are skew.
pub fn solution_dim_for(spec: &SegmentSpec, parity: Parity) -> usize {
    let (a, m) = (spec.alpha(), spec.mu());
    let mut twice = 0usize;
    for r in 0..spec.len() {
        twice += a[r] * m[r] * m[r];
        for s in 0..r {
            twice += 2 * a[r] * m[r] * m[s];
        }
    }
    let odd: usize = (0..spec.len()).filter(|&r| a[r] % 2 == 1).map(|r| m[r]).sum();
    let twice = match parity {
        Parity::Standard => twice - odd,
        Parity::Flipped => twice + odd,
    };
    debug_assert!(twice % 2 == 0, "half terms must cancel");
    twice / 2
}

/// Kind of a free-parameter slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotKind {
    /// All of `A^{rs}_0..A^{rs}_{alpha_r - 1}` for `r > s`.
    Below {
        r: usize,
        s: usize,
    },
    /// `A^{rr}_0` in the orthogonal (`symplectic = false`) or symplectic group of `B^r_0`.
    Seed {
        r: usize,
        symplectic: bool,
    },
    Z {
        r: usize,
        j: usize,
        symmetric: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub kind: SlotKind,
    pub dim: usize,
}

/// The free-parameter slots of `congruence_solve` for data `b`.
pub fn free_shape<T: Scalar>(b: &AltToeplitzData<T>) -> Vec<Slot> {
    let spec = b.spec();
    let (a, mu) = (spec.alpha(), spec.mu());
    let sym_dim = |m: usize| m * (m + 1) / 2;
    let skew_dim = |m: usize| m * (m.saturating_sub(1)) / 2;
    let mut out = Vec::new();
    for r in 0..spec.len() {
        for s in 0..r {
            out.push(Slot {
                kind: SlotKind::Below { r, s },
                dim: a[r] * mu[r] * mu[s],
            });
        }
        let sigma = b.seed_sign(r);
        out.push(Slot {
            kind: SlotKind::Seed {
                r,
                symplectic: sigma < 0,
            },
            dim: if sigma > 0 { skew_dim(mu[r]) } else { sym_dim(mu[r]) },
        });
        for j in 1..a[r] {
            let symmetric = z_sign(j, sigma) > 0;
            out.push(Slot {
                kind: SlotKind::Z { r, j, symmetric },
                dim: if symmetric { sym_dim(mu[r]) } else { skew_dim(mu[r]) },
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactScalar as X;
    use crate::toeplitz::{congruence_form, f_block, generator_w};

    type M = Matrix<X>;

    fn spec(a: &[usize], m: &[usize]) -> SegmentSpec {
        SegmentSpec::new(a.to_vec(), m.to_vec()).unwrap()
    }

    fn residual(problem: &CongruenceProblem<X>, x: &ToeplitzElement<X>) -> M {
        let f = f_block(problem.spec());
        &congruence_form(&f, &problem.b().assemble(), &x.assemble()) - &problem.c().assemble()
    }

    #[test]
    fn identity_when_everything_is_trivial() {
        let s = spec(&[3, 2, 1], &[1, 2, 1]);
        let mut rng = random::rng(4);
        let b = AltToeplitzData::<X>::random(&s, Parity::Standard, &mut rng).unwrap();
        let p = CongruenceProblem::new(b.clone(), b).unwrap();
        let x = congruence_solve(&p, &FreeData::trivial(&s)).unwrap();
        assert!(x.is_identity());
    }

    #[test]
    fn random_instances_are_exact() {
        let specs = [
            spec(&[3, 1], &[1, 1]),
            spec(&[2, 1], &[2, 1]),
            spec(&[4, 2, 1], &[1, 2, 1]),
            spec(&[3, 2], &[2, 2]),
        ];
        let mut rng = random::rng(21);
        for s in &specs {
            for parity in [Parity::Standard, Parity::Flipped] {
                let Ok((p, f)) = CongruenceProblem::<X>::random(s, parity, &mut rng) else {
                    continue;
                };
                let x = congruence_solve(&p, &f).unwrap();
                assert!(residual(&p, &x).is_zero(), "spec {s:?} {parity:?}");
            }
        }
    }

    #[test]
    fn free_data_is_preserved() {
        let s = spec(&[3, 1], &[1, 1]);
        let (p, f) = CongruenceProblem::<X>::random(&s, Parity::Standard, &mut random::rng(8)).unwrap();
        let x = congruence_solve(&p, &f).unwrap();
        assert_eq!(x.block(1, 0), f.below()[&(1, 0)].as_slice());
        assert_eq!(x.param(0, 0, 0), &f.seeds()[0]);
    }

    #[test]
    fn free_data_round_trips_through_solutions() {
        for parity in [Parity::Standard, Parity::Flipped] {
            let s = spec(&[3, 2, 1], &[2, 2, 2]);
            let (p, f) = CongruenceProblem::<X>::random(&s, parity, &mut random::rng(21)).unwrap();
            let x = congruence_solve(&p, &f).unwrap();
            assert_eq!(FreeData::of_solution(&p, &x).unwrap(), f);
        }
    }

    #[test]
    fn mutated_orders_fail() {
        let s = spec(&[3, 2, 1], &[1, 2, 1]);
        let (p, f) = CongruenceProblem::<X>::random(&s, Parity::Standard, &mut random::rng(1)).unwrap();
        let good = schedule(&s);
        assert!(solve_in_order(&p, &f, &good).is_ok());
        let mut rev_p = good.clone();
        rev_p.sort_by_key(|&(j, p, r)| (j, std::cmp::Reverse(p), r));
        assert!(matches!(solve_in_order(&p, &f, &rev_p), Err(Error::Solver(_))));
        let mut rev_j = good;
        rev_j.sort_by_key(|&(j, p, r)| (std::cmp::Reverse(j), p, r));
        assert!(matches!(solve_in_order(&p, &f, &rev_j), Err(Error::Solver(_))));
    }

    #[test]
    fn bad_seed_and_parity_are_rejected() {
        let s = spec(&[3], &[2]);
        let b = AltToeplitzData::<X>::from_seeds(s.clone(), &[M::identity(2)]).unwrap();
        let p = CongruenceProblem::new(b.clone(), b).unwrap();
        let mut f = FreeData::trivial(&s);
        f.set_seed(0, M::identity(2).scale(&X::from_int(2))).unwrap();
        assert!(matches!(
            congruence_solve(&p, &f),
            Err(Error::InvalidSeed { segment: 1, .. })
        ));
        let mut f = FreeData::trivial(&s);
        f.set_z(0, 1, Matrix::from_ints(&[&[0, 1], &[-1, 0]])).unwrap();
        assert!(matches!(congruence_solve(&p, &f), Err(Error::Parity(_))));
    }

    #[test]
    fn diagonal_solution_matches_generator_w() {
        let s = spec(&[4, 3], &[2, 1]);
        let j = Matrix::from_ints(&[&[0, -1], &[1, 0]]);
        let seeds = vec![j.clone(), M::identity(1)];
        let b = AltToeplitzData::<X>::from_seeds(s.clone(), &seeds).unwrap();
        let p = CongruenceProblem::new(b.clone(), b).unwrap();
        let mut rng = random::rng(6);
        let mut f = FreeData::trivial(&s);
        let mut zs = vec![vec![], vec![]];
        for r in 0..2 {
            let sigma = symmetry_sign(&seeds[r]).unwrap();
            for k in 1..s.alpha()[r] {
                let z: M = random::with_symmetry(&mut rng, s.mu()[r], z_sign(k, sigma) > 0);
                f.set_z(r, k, z.clone()).unwrap();
                zs[r].push(z);
            }
        }
        let x = congruence_solve(&p, &f).unwrap();
        assert_eq!(x, generator_w(&s, &seeds, &zs).unwrap());
    }

    #[test]
    fn skew_step_examples() {
        let b = Matrix::from_ints(&[&[2, 1], &[1, 4]]);
        let x = skew_step_solve(&M::identity(2), &b, 0, &M::zeros(2, 2)).unwrap();
        assert_eq!(x, b.scale(&X::from_frac(1, 2)));
        let z = Matrix::from_ints(&[&[1, 3], &[3, 0]]);
        let x = skew_step_solve(&M::identity(2), &M::zeros(2, 2), 1, &z).unwrap();
        assert_eq!(x, z);
        let a = Matrix::from_ints(&[&[1, 2], &[0, 3]]);
        let rhs = Matrix::from_ints(&[&[0, 5], &[-5, 0]]);
        let x = skew_step_solve(&a, &rhs, 1, &z).unwrap();
        assert_eq!(&(&a.transpose() * &x) - &(&x.transpose() * &a), rhs);
        assert!(matches!(skew_step_solve(&a, &rhs, 0, &z), Err(Error::Parity(_))));
    }

    #[test]
    fn dimension_formula_spot_values() {
        assert_eq!(solution_dim(&spec(&[1], &[4])), 6);
        assert_eq!(solution_dim(&spec(&[2], &[1])), 1);
        assert_eq!(solution_dim(&spec(&[3, 1], &[1, 1])), 2);
    }

    #[test]
    fn slots_sum_to_dimension() {
        for (a, m) in [
            (vec![1], vec![3]),
            (vec![3, 1], vec![1, 1]),
            (vec![4, 3, 1], vec![2, 1, 1]),
        ] {
            let s = spec(&a, &m);
            let seeds: Vec<M> = s
                .alpha()
                .iter()
                .zip(s.mu())
                .map(|(&al, &mm)| {
                    if al % 2 == 1 {
                        M::identity(mm)
                    } else {
                        Matrix::direct_sum(&vec![Matrix::from_ints(&[&[0, -1], &[1, 0]]); mm / 2])
                    }
                })
                .collect();
            let b = AltToeplitzData::<X>::from_seeds(s.clone(), &seeds).unwrap();
            assert_eq!(b.parity(), Parity::Standard);
            let total: usize = free_shape(&b).iter().map(|x| x.dim).sum();
            assert_eq!(total, solution_dim(&s));
        }
        let s = spec(&[3, 2], &[2, 1]);
        let b = AltToeplitzData::<X>::random(&s, Parity::Flipped, &mut random::rng(2)).unwrap();
        let total: usize = free_shape(&b).iter().map(|x| x.dim).sum();
        assert_eq!(total, solution_dim_for(&s, Parity::Flipped));
    }
}
