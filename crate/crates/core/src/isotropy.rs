//! Isotropy groups of the canonical forms under orthogonal similarity.
//!
//! A [`Frame`] fixes a canonical skew-symmetric form together with the matrix `Psi`
//! that conjugates its isotropy group into block Toeplitz matrices, and the data `B`
//! of the congruence equation those matrices have to satisfy.

use crate::canonical::{
    assemble_canonical, omega, omega_sum, omega_tilde, transition, CanonicalCase, CanonicalSpec, SegmentSpec,
};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::random::SeededRng;
use crate::scalar::{Backend, Scalar};
use crate::solver::{self, CongruenceProblem, FreeData};
use crate::toeplitz::{f_block, symmetry_sign, AltToeplitzData, ToeplitzElement};

/// Residuals of `Q^T Q - I` and `Q^T M Q - M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub orthogonality: f64,
    pub stabilizer: f64,
    pub backend: Backend,
    /// Exact backend: both residuals vanish identically. Float: both within `tol`.
    pub verified: bool,
}

/// Checks that `q` is orthogonal and fixes `m` under `M -> Q^T M Q`.
pub fn verify<T: Scalar>(m: &Matrix<T>, q: &Matrix<T>, tol: f64) -> Result<Certificate> {
    if !m.is_square() || m.shape() != q.shape() {
        return Err(Error::Shape(format!(
            "M is {}x{} but Q is {}x{}",
            m.rows(),
            m.cols(),
            q.rows(),
            q.cols()
        )));
    }
    let qt = q.transpose();
    let orth = &(&qt * q) - &Matrix::identity(q.rows());
    let stab = &(&(&qt * m) * q) - m;
    let verified = match T::BACKEND {
        Backend::Exact => orth.is_zero() && stab.is_zero(),
        Backend::Float => orth.max_abs() <= tol && stab.max_abs() <= tol,
    };
    Ok(Certificate {
        orthogonality: orth.max_abs(),
        stabilizer: stab.max_abs(),
        backend: T::BACKEND,
        verified,
    })
}

/// A verified member of an isotropy group.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropyElement<T> {
    pub q: Matrix<T>,
    pub certificate: Certificate,
}

/// Default tolerance for float certificates.
pub const DEFAULT_TOL: f64 = 1e-9;

fn certify<T: Scalar>(m: &Matrix<T>, q: Matrix<T>) -> Result<IsotropyElement<T>> {
    let certificate = verify(m, &q, DEFAULT_TOL)?;
    Ok(IsotropyElement { q, certificate })
}

/// `B_r` of the nilpotent case on `m~_r`-sized blocks: `(-1)^{(alpha_r - 1)/2} I` for odd
/// `alpha_r`, a direct sum of `[[0, -1], [1, 0]]` for even `alpha_r`.
pub fn theorem_seeds<T: Scalar>(spec: &SegmentSpec) -> Vec<Matrix<T>> {
    spec.alpha()
        .iter()
        .zip(spec.mu())
        .map(|(&a, &m)| {
            if a % 2 == 1 {
                let s = if (a - 1) / 2 % 2 == 0 { 1 } else { -1 };
                Matrix::identity(m).scale(&T::from_int(s))
            } else {
                let j = Matrix::from_ints(&[&[0, -1], &[1, 0]]);
                Matrix::direct_sum(&vec![j; m / 2])
            }
        })
        .collect()
}

/// `B` read off `-i F G` block by block, checked to be block diagonal alternating.
fn alternating_from<T: Scalar>(spec: &SegmentSpec, h: &Matrix<T>) -> Result<AltToeplitzData<T>> {
    let mut blocks = Vec::new();
    for r in 0..spec.len() {
        let (a, m, o) = (spec.alpha()[r], spec.mu()[r], spec.offset(r));
        blocks.push((0..a).map(|j| h.block(o, o + j * m, m, m)).collect());
    }
    let data = AltToeplitzData::infer(spec.clone(), blocks)
        .map_err(|e| Error::Solver(format!("frame data is not alternating: {e}")))?;
    if data.assemble() != *h {
        return Err(Error::Solver("frame data is not block diagonal alternating".into()));
    }
    Ok(data)
}

fn approx_eq<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> bool {
    match T::BACKEND {
        Backend::Exact => a == b,
        Backend::Float => (a - b).max_abs() <= DEFAULT_TOL * a.max_abs().max(1.0),
    }
}

/// Canonical skew form, its conjugator `Psi`, and the congruence data `B`.
#[derive(Debug, Clone)]
pub struct Frame<T> {
    spec: CanonicalSpec<T>,
    toeplitz: SegmentSpec,
    form: Matrix<T>,
    psi: Matrix<T>,
    psi_inv: Matrix<T>,
    gram: Matrix<T>,
    b: Option<AltToeplitzData<T>>,
}

impl<T: Scalar> Frame<T> {
    /// Builds the frame of the skew form underlying `spec`.
    pub fn new(spec: &CanonicalSpec<T>) -> Result<Self> {
        spec.validate()?;
        let skew = spec.skew_spec();
        let form = assemble_canonical(&skew)?;
        let s = transition(&skew)?;
        let minus_i = T::imag_unit().neg();
        if spec.is_nilpotent_family() {
            let toeplitz = spec.segments.tilde();
            let psi = &omega_sum::<T>(&toeplitz).transpose() * &s;
            let psi_inv = psi.inverse()?;
            let g = &psi_inv.transpose() * &psi_inv;
            // G = -i F B since P^{-2} = -i E; the sign of B does not change the solution set
            let h = (&f_block::<T>(&toeplitz) * &g).scale(&T::imag_unit());
            let b = alternating_from(&toeplitz, &h)?;
            Ok(Frame {
                spec: spec.clone(),
                toeplitz,
                form,
                psi,
                psi_inv,
                gram: h,
                b: Some(b),
            })
        } else {
            let toeplitz = spec.segments.clone();
            let n = toeplitz.size();
            let w = omega_sum::<T>(&toeplitz);
            let inner =
                &(&Matrix::direct_sum(&[w.transpose(), w.transpose()]) * &omega_tilde::<T>(&toeplitz).transpose()) * &s;
            let inner_inv = inner.inverse()?;
            let g = &inner_inv.transpose() * &inner_inv;
            let b1 = g.block(0, n, n, n).scale(&minus_i);
            let expect = Matrix::vstack(&[
                Matrix::hstack(&[Matrix::zeros(n, n), b1.clone()])?,
                Matrix::hstack(&[b1.transpose(), Matrix::zeros(n, n)])?,
            ])?
            .scale(&T::imag_unit());
            if !approx_eq(&g, &expect) {
                return Err(Error::Solver("Gram matrix of the frame is not off-diagonal".into()));
            }
            let psi = &Matrix::direct_sum(&[Matrix::identity(n), b1.clone()]) * &inner;
            let psi_inv = psi.inverse()?;
            Ok(Frame {
                spec: spec.clone(),
                toeplitz,
                form,
                psi,
                psi_inv,
                gram: b1,
                b: None,
            })
        }
    }

    pub fn spec(&self) -> &CanonicalSpec<T> {
        &self.spec
    }

    /// Segment data of the block Toeplitz group (`mu~` in the nilpotent case).
    pub fn toeplitz_spec(&self) -> &SegmentSpec {
        &self.toeplitz
    }

    /// The canonical skew-symmetric form.
    pub fn form(&self) -> &Matrix<T> {
        &self.form
    }

    pub fn psi(&self) -> &Matrix<T> {
        &self.psi
    }

    pub fn psi_inv(&self) -> &Matrix<T> {
        &self.psi_inv
    }

    /// Nilpotent case: `B` with `Psi^{-T} Psi^{-1} = i F B`. Nonzero case: `B_1` with
    /// `Psi'^{-T} Psi'^{-1} = i [[0, B_1], [B_1^T, 0]]`, `Psi = (I + B_1) Psi'`.
    pub fn gram_data(&self) -> &Matrix<T> {
        &self.gram
    }

    /// `B` as alternating data (nilpotent case only).
    pub fn b(&self) -> Option<&AltToeplitzData<T>> {
        self.b.as_ref()
    }

    /// `Psi^{-1} X Psi`, certified against the canonical form.
    pub fn conjugate(&self, x: &Matrix<T>) -> Result<IsotropyElement<T>> {
        certify(&self.form, &(&self.psi_inv * x) * &self.psi)
    }

    /// `Psi^{-1} (X + X^{-T}) Psi` for `X` in `T^{alpha,mu}`.
    pub fn element_nonzero(&self, x: &ToeplitzElement<T>) -> Result<IsotropyElement<T>> {
        if self.spec.is_nilpotent_family() {
            return Err(Error::InvalidSpec(
                "element_nonzero needs a nonzero-eigenvalue spec".into(),
            ));
        }
        if x.spec() != &self.toeplitz {
            return Err(Error::InvalidSpec("Toeplitz element has the wrong segment data".into()));
        }
        let xm = x.assemble();
        let xit = xm.inverse()?.transpose();
        self.conjugate(&Matrix::direct_sum(&[xm, xit]))
    }

    /// The congruence problem `F X^T F B X = B` of the nilpotent case.
    pub fn problem(&self) -> Result<CongruenceProblem<T>> {
        let b = self
            .b
            .clone()
            .ok_or_else(|| Error::InvalidSpec("congruence data exists in the nilpotent case only".into()))?;
        CongruenceProblem::new(b.clone(), b)
    }

    /// `Psi^{-1} X Psi` for the solution `X` determined by `free`.
    pub fn element_nilpotent(&self, free: &FreeData<T>) -> Result<IsotropyElement<T>> {
        if !self.spec.is_nilpotent_family() {
            return Err(Error::InvalidSpec(
                "element_nilpotent needs a nilpotent or unipotent spec".into(),
            ));
        }
        let x = solver::congruence_solve(&self.problem()?, free)?;
        self.conjugate(&x.assemble())
    }

    /// A random element: a random Toeplitz element in the nonzero case, random free
    /// data (Cayley seeds) in the nilpotent case.
    pub fn sample(&self, rng: &mut SeededRng) -> Result<IsotropyElement<T>> {
        if self.spec.is_nilpotent_family() {
            let free = FreeData::random(&self.problem()?, rng)?;
            self.element_nilpotent(&free)
        } else {
            self.element_nonzero(&ToeplitzElement::random(&self.toeplitz, rng))
        }
    }

    /// The matrix of the spec itself (`K`, `O_lambda` or `epsilon e^{K_0}`).
    pub fn spec_form(&self) -> Result<Matrix<T>> {
        assemble_canonical(&self.spec)
    }
}

/// `Psi` of the frame of `spec`.
pub fn psi<T: Scalar>(spec: &CanonicalSpec<T>) -> Result<Matrix<T>> {
    Ok(Frame::new(spec)?.psi)
}

pub fn element_nonzero<T: Scalar>(spec: &CanonicalSpec<T>, x: &ToeplitzElement<T>) -> Result<IsotropyElement<T>> {
    Frame::new(spec)?.element_nonzero(x)
}

pub fn element_nilpotent<T: Scalar>(spec: &CanonicalSpec<T>, free: &FreeData<T>) -> Result<IsotropyElement<T>> {
    Frame::new(spec)?.element_nilpotent(free)
}

/// Dimension of the isotropy group of the form described by `spec`.
///
/// Nonzero eigenvalue: `sum_{r,s} min(alpha_r, alpha_s) m_r m_s`. Nilpotent: the
/// solution dimension of the congruence equation on `mu~`.
pub fn dim<T: Scalar>(spec: &CanonicalSpec<T>) -> usize {
    let s = &spec.segments;
    if spec.is_nilpotent_family() {
        solver::solution_dim(&s.tilde())
    } else {
        let (a, m) = (s.alpha(), s.mu());
        (0..s.len())
            .map(|r| m[r] * (a[r] * m[r] + 2 * (0..r).map(|q| a[r] * m[q]).sum::<usize>()))
            .sum()
    }
}

/// Dimension of the orbit `{Q^T M Q}`, the codimension of the isotropy group in `O_n`.
pub fn orbit_dim<T: Scalar>(spec: &CanonicalSpec<T>) -> usize {
    let n = spec.matrix_size();
    n * (n - 1) / 2 - dim(spec)
}

/// `Q = (I + H)(I - H)^{-1}` with `H` the projection of `seed` onto `{H^T B + B H = 0}`;
/// `Q^T B Q = B`. Halves `H` when `I - H` is singular.
pub fn pseudo_orthogonal_sample<T: Scalar>(b: &Matrix<T>, seed: &Matrix<T>) -> Result<Matrix<T>> {
    let sigma = symmetry_sign(b).ok_or_else(|| Error::Parity("B must be symmetric or skew-symmetric".into()))?;
    if seed.shape() != b.shape() {
        return Err(Error::Shape("seed and B must have the same shape".into()));
    }
    let binv = b.inverse()?;
    let s = b * seed;
    let st = s.transpose();
    let proj = if sigma > 0 { &s - &st } else { &s + &st };
    let mut h = &binv * &proj.scale(&T::from_frac(1, 2));
    let id = Matrix::identity(b.rows());
    const ATTEMPTS: usize = 16;
    for _ in 0..ATTEMPTS {
        if let Ok(inv) = (&id - &h).inverse() {
            return Ok(&(&id + &h) * &inv);
        }
        h = h.scale(&T::from_frac(1, 2));
    }
    Err(Error::SamplingFailed(ATTEMPTS))
}

// ---------------------------------------------------------------------------
// generic forms
// ---------------------------------------------------------------------------

/// A block of a generic skew-symmetric form with a chosen isotropy parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum GenericBlock<T> {
    /// `K_1(lambda)` with the `SO_2` element of parameter `t != 0`.
    Pair { lambda: T, t: T },
    /// A `1 x 1` zero block with sign `+1` or `-1`.
    Zero { sign: i8 },
}

/// `S diag(t, 1/t) S` with `S = (1/sqrt 2)[[1, i], [-i, -1]]`, an element of `SO_2`.
pub fn so2<T: Scalar>(t: &T) -> Result<Matrix<T>> {
    let tinv = t.inv()?;
    let half = T::from_frac(1, 2);
    let c = t.add(&tinv).mul(&half);
    let s = T::imag_unit().mul(&t.sub(&tinv)).mul(&half);
    Matrix::from_rows(vec![vec![c.clone(), s.clone()], vec![s.neg(), c]])
}

/// The generic form `bigoplus K_1(lambda_j) (+ 0)` with the isotropy element built from
/// the block parameters.
pub fn generic_element<T: Scalar>(blocks: &[GenericBlock<T>]) -> Result<(Matrix<T>, IsotropyElement<T>)> {
    let mut eig: Vec<T> = Vec::new();
    let mut forms = Vec::new();
    let mut qs = Vec::new();
    for b in blocks {
        match b {
            GenericBlock::Pair { lambda, t } => {
                if lambda.is_zero() {
                    return Err(Error::NotGeneric("a 2x2 block needs lambda != 0".into()));
                }
                if eig.iter().any(|e| e.sub(lambda).is_zero() || e.add(lambda).is_zero()) {
                    return Err(Error::NotGeneric(format!("eigenvalue +-{lambda} repeats")));
                }
                eig.push(lambda.clone());
                eig.push(lambda.neg());
                forms.push(crate::canonical::k_block(1, lambda));
                qs.push(so2(t)?);
            }
            GenericBlock::Zero { sign } => {
                if eig.iter().any(T::is_zero) {
                    return Err(Error::NotGeneric("eigenvalue 0 repeats".into()));
                }
                if sign.abs() != 1 {
                    return Err(Error::InvalidSpec(format!("sign must be +-1, got {sign}")));
                }
                eig.push(T::zero());
                forms.push(Matrix::zeros(1, 1));
                qs.push(Matrix::scalar(T::from_int(*sign as i64)));
            }
        }
    }
    let form = Matrix::direct_sum(&forms);
    let el = certify(&form, Matrix::direct_sum(&qs))?;
    Ok((form, el))
}

// ---------------------------------------------------------------------------
// real forms
// ---------------------------------------------------------------------------

/// A real normal form `bigoplus_j bigoplus^{m_j} [[a_j, b_j], [-b_j, a_j]] (+ c_k I_{M_k})`.
///
/// Skew-symmetric forms have `a_j = 0`, `b_j = sigma_j` and one fixed part with
/// `c = 0`; orthogonal forms have `(a_j, b_j) = (cos phi_j, sin phi_j)` and fixed
/// parts `I_{M_1}`, `-I_{M_2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpec<T> {
    pub rotations: Vec<(T, T, usize)>,
    pub fixed: Vec<(T, usize)>,
}

impl<T: Scalar> RealSpec<T> {
    pub fn validate(&self) -> Result<()> {
        for (i, (a, b, m)) in self.rotations.iter().enumerate() {
            if b.is_zero() || *m == 0 {
                return Err(Error::InvalidSpec("rotation blocks need b != 0 and m >= 1".into()));
            }
            if !a.imag_part().is_zero() || !b.imag_part().is_zero() {
                return Err(Error::InvalidSpec("real forms need real entries".into()));
            }
            for (c, d, _) in &self.rotations[..i] {
                if c.sub(a).is_zero() && (d.sub(b).is_zero() || d.add(b).is_zero()) {
                    return Err(Error::NotGeneric(format!("block ({a}, {b}) repeats")));
                }
            }
        }
        for (i, (c, _)) in self.fixed.iter().enumerate() {
            if self.fixed[..i].iter().any(|(d, _)| d.sub(c).is_zero()) {
                return Err(Error::NotGeneric(format!("fixed value {c} repeats")));
            }
        }
        Ok(())
    }

    pub fn form(&self) -> Matrix<T> {
        let mut parts = Vec::new();
        for (a, b, m) in &self.rotations {
            let blk = Matrix::from_rows(vec![vec![a.clone(), b.clone()], vec![b.neg(), a.clone()]]).expect("2x2");
            parts.extend(std::iter::repeat_n(blk, *m));
        }
        for (c, m) in &self.fixed {
            parts.push(Matrix::identity(*m).scale(c));
        }
        Matrix::direct_sum(&parts)
    }
}

/// `S^{-1} Omega_{2,m} (X + X^{-T}) Omega_{2,m}^T S` with `S = bigoplus (1/sqrt 2)[[1, i], [-i, -1]]`.
/// It commutes with `bigoplus^m [[0, 1], [-1, 0]]` and is real exactly when `X` is unitary.
pub fn rotation_commutant<T: Scalar>(x: &Matrix<T>) -> Result<Matrix<T>> {
    let m = x.rows();
    let s = crate::canonical::transition(&CanonicalSpec::nonzero(T::one(), vec![1], vec![m])?)?;
    let w = omega::<T>(2, m);
    let xit = x.inverse()?.transpose();
    let mid = &(&w * &Matrix::direct_sum(&[x.clone(), xit])) * &w.transpose();
    Ok(&(&s.inverse()? * &mid) * &s)
}

fn check_unitary<T: Scalar>(u: &Matrix<T>, tol: f64) -> Result<()> {
    let r = &(&u.conj().transpose() * u) - &Matrix::identity(u.rows());
    let ok = match T::BACKEND {
        Backend::Exact => r.is_zero(),
        Backend::Float => r.max_abs() <= tol,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotUnitary(format!("residual {:e}", r.max_abs())))
    }
}

fn check_real_orthogonal<T: Scalar>(o: &Matrix<T>, tol: f64) -> Result<()> {
    let r = &(&o.transpose() * o) - &Matrix::identity(o.rows());
    let imag = o.imag_part();
    let ok = match T::BACKEND {
        Backend::Exact => r.is_zero() && imag.is_zero(),
        Backend::Float => r.max_abs() <= tol && imag.max_abs() <= tol,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSpec("fixed parts need real orthogonal matrices".into()))
    }
}

/// A real orthogonal element of the isotropy group of `rs.form()`, one unitary per
/// rotation block and one real orthogonal matrix per fixed part.
pub fn real_element<T: Scalar>(
    rs: &RealSpec<T>,
    unitaries: &[Matrix<T>],
    orth_parts: &[Matrix<T>],
    tol: f64,
) -> Result<IsotropyElement<T>> {
    rs.validate()?;
    if unitaries.len() != rs.rotations.len() || orth_parts.len() != rs.fixed.len() {
        return Err(Error::InvalidSpec("one matrix per block is required".into()));
    }
    let mut parts = Vec::new();
    for (u, (_, _, m)) in unitaries.iter().zip(&rs.rotations) {
        if u.shape() != (*m, *m) {
            return Err(Error::Shape(format!("unitary must be {m}x{m}")));
        }
        check_unitary(u, tol)?;
        parts.push(rotation_commutant(u)?);
    }
    for (o, (_, m)) in orth_parts.iter().zip(&rs.fixed) {
        if o.shape() != (*m, *m) {
            return Err(Error::Shape(format!("orthogonal part must be {m}x{m}")));
        }
        check_real_orthogonal(o, tol)?;
        parts.push(o.clone());
    }
    let q = Matrix::direct_sum(&parts);
    let certificate = verify(&rs.form(), &q, tol)?;
    Ok(IsotropyElement { q, certificate })
}

/// The real block `Omega_{2,m} [[Re U, -Im U], [Im U, Re U]] Omega_{2,m}^T`.
pub fn real_block<T: Scalar>(u: &Matrix<T>) -> Matrix<T> {
    let m = u.rows();
    let (re, im) = (u.real_part(), u.imag_part());
    let top = Matrix::hstack(&[re.clone(), -&im]).expect("same rows");
    let bottom = Matrix::hstack(&[im, re]).expect("same rows");
    let w = omega::<T>(2, m);
    &(&w * &Matrix::vstack(&[top, bottom]).expect("same cols")) * &w.transpose()
}

/// Whether `spec` is one of the cases with an exactly computable orthogonal form.
pub fn orthogonal_case<T: Scalar>(
    spec: &CanonicalSpec<T>,
    exp_lambda: Option<T>,
    epsilon: i8,
) -> Result<CanonicalSpec<T>> {
    let case = match &spec.skew_spec().case {
        CanonicalCase::NonzeroPair { lambda } => CanonicalCase::OrthGeneric {
            lambda: lambda.clone(),
            exp_lambda,
        },
        _ => CanonicalCase::Unipotent { epsilon },
    };
    CanonicalSpec::new(case, spec.segments.clone())
}
