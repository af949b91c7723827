//! Transmit precoders and receive combiners.
//!
//! Precoders `v̄` are unit column vectors. Combiners `u` are row vectors and
//! are stored by their entries, so the scalar `u H v` is `u.dot(&(H * v))`.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{ComplexMatrix, ComplexVector};

/// Effective channel norms below this are treated as zero.
pub const DEGENERATE_NORM: f64 = 1e-300;

/// Rotates `v` so its first non-negligible entry is real and positive.
pub fn fix_phase(mut v: ComplexVector) -> ComplexVector {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-9 * scale).copied() {
        v *= z.conj() / z.norm();
    }
    v
}

fn normalized(v: ComplexVector) -> Result<ComplexVector> {
    let n = v.norm();
    if !(n >= DEGENERATE_NORM) {
        return Err(Error::DegenerateChannel(n));
    }
    Ok(v / Complex64::from(n))
}

fn check_len(what: &str, v: &ComplexVector, len: usize) -> Result<()> {
    if v.len() != len {
        return Err(Error::Dimension(format!(
            "{what} has length {}, expected {len}",
            v.len()
        )));
    }
    Ok(())
}

/// `H^H u^H`: the transmit direction matched to combiner `u` over `h`.
fn matched_direction(h: &ComplexMatrix, u: &ComplexVector) -> Result<ComplexVector> {
    check_len("combiner", u, h.nrows())?;
    Ok(h.ad_mul(&u.conjugate()))
}

/// Maximum-ratio transmission `v̄_k = H_kl^H u_l^H / ‖H_kl^H u_l^H‖`.
pub fn mrt_precoder(h_kl: &ComplexMatrix, u_l: &ComplexVector) -> Result<ComplexVector> {
    normalized(matched_direction(h_kl, u_l)?)
}

/// Generalized Rayleigh quotient `u Q u^H / u W u^H` with Hermitian PSD `q`
/// and Hermitian PD `w`.
#[derive(Debug, Clone)]
pub struct RqProblem {
    pub q: ComplexMatrix,
    pub w: ComplexMatrix,
    /// `s` with `q = s s^H`, when the problem was built from a single stream.
    signal: Option<ComplexVector>,
}

fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).norm() / m.norm().max(f64::MIN_POSITIVE)
}

impl RqProblem {
    pub fn new(q: ComplexMatrix, w: ComplexMatrix) -> Result<Self> {
        let n = q.nrows();
        if q.shape() != (n, n) || w.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "RQ forms must be square and equal-sized, got {:?} and {:?}",
                q.shape(),
                w.shape()
            )));
        }
        if hermitian_defect(&q) > 1e-12 || hermitian_defect(&w) > 1e-12 {
            return Err(Error::Numerical("RQ forms must be Hermitian".into()));
        }
        if Cholesky::new(w.as_inner().clone()).is_none() {
            return Err(Error::Numerical(
                "interference-plus-noise form is not positive definite".into(),
            ));
        }
        Ok(Self { q, w, signal: None })
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// `u Q u^H / u W u^H` for a combiner `u`.
    pub fn quotient(&self, u: &ComplexVector) -> f64 {
        let x = u.conjugate();
        let num = x.dotc(&(self.q.as_inner() * &x)).re;
        let den = x.dotc(&(self.w.as_inner() * &x)).re;
        num / den
    }

    fn cholesky(&self) -> Result<Cholesky<Complex64, Dyn>> {
        Cholesky::new(self.w.as_inner().clone())
            .ok_or_else(|| Error::Numerical("Cholesky factorization of W failed".into()))
    }

    /// Largest generalized eigenvalue of `(Q, W)` and its eigenvector `x`
    /// (`Q x = λ W x`), via Cholesky whitening and a Hermitian eigensolve.
    pub fn dominant_eigenpair(&self) -> Result<(f64, ComplexVector)> {
        let chol = self.cholesky()?;
        let l = chol.l();
        let l_inv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
        let mut a = &l_inv * self.q.as_inner() * l_inv.adjoint();
        // symmetrize away rounding
        a = (&a + a.adjoint()) * Complex64::from(0.5);
        let eig = SymmetricEigen::try_new(a, 1e-15, 10_000)
            .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
        let (imax, lambda) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, l)| (i, *l))
            .expect("non-empty spectrum");
        let y = eig.eigenvectors.column(imax).into_owned();
        let x = l_inv.adjoint() * y;
        Ok((lambda, x))
    }
}

/// `Q = H_lk v_l v_l^H H_lk^H`, `W = H̃_kk v_k v_k^H H̃_kk^H + σ² I`, with
/// powers already folded into `v_l` and `v_k`.
pub fn build_rq_problem(
    h_lk: &ComplexMatrix,
    v_l: &ComplexVector,
    h_tilde_kk: &ComplexMatrix,
    v_k: &ComplexVector,
    sigma2: f64,
) -> Result<RqProblem> {
    if h_lk.shape() != h_tilde_kk.shape() {
        return Err(Error::Dimension(
            "signal and SI channels differ in shape".into(),
        ));
    }
    check_len("v_l", v_l, h_lk.ncols())?;
    check_len("v_k", v_k, h_tilde_kk.ncols())?;
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidConfig("noise power must be positive".into()));
    }
    let s = h_lk.as_inner() * v_l;
    let h = h_tilde_kk.as_inner() * v_k;
    let n = s.len();
    let q = &s * s.adjoint();
    let w = &h * h.adjoint() + DMatrix::<Complex64>::identity(n, n) * Complex64::from(sigma2);
    let mut prob = RqProblem::new(ComplexMatrix::try_from(q)?, ComplexMatrix::try_from(w)?)?;
    prob.signal = Some(s);
    Ok(prob)
}

/// Unit combiner maximizing `u Q u^H / u W u^H`, i.e. the conjugate of the
/// dominant eigenvector of `W⁻¹Q`. Rank-one problems are solved exactly as
/// `u ∝ (W⁻¹ s)^H`.
pub fn rq_combiner(prob: &RqProblem) -> Result<ComplexVector> {
    let x = match &prob.signal {
        Some(s) => prob.cholesky()?.solve(s),
        None => prob.dominant_eigenpair()?.1,
    };
    Ok(fix_phase(normalized(x.conjugate())?))
}

/// Projects the MRT direction onto the orthogonal complement of the
/// effective SI row `u_k H̃_kk`, so node `k` puts no SI into its own combiner.
pub fn zf_rq_precoder(
    h_kl: &ComplexMatrix,
    u_l: &ComplexVector,
    h_tilde_kk: &ComplexMatrix,
    u_k: &ComplexVector,
) -> Result<ComplexVector> {
    let d = matched_direction(h_kl, u_l)?;
    let a = matched_direction(h_tilde_kk, u_k)?;
    let d_norm = d.norm();
    if !(d_norm >= DEGENERATE_NORM) {
        return Err(Error::DegenerateChannel(d_norm));
    }
    let a_norm = a.norm();
    if a_norm < DEGENERATE_NORM {
        return Ok(d / Complex64::from(d_norm));
    }
    let a = a / Complex64::from(a_norm);
    // two Gram-Schmidt passes
    let mut v = d;
    for _ in 0..2 {
        let c = a.dotc(&v);
        v -= &a * c;
    }
    let n = v.norm();
    if n <= 1e-12 * d_norm {
        return Err(Error::DegenerateGeometry);
    }
    Ok(v / Complex64::from(n))
}

/// TX-side Rayleigh quotient: dominant eigenvector of
/// `(H̃_kk^H u_k^H u_k H̃_kk + σ² I)⁻¹ (H_kl^H u_l^H u_l H_kl)`.
pub fn rq_rq_precoder(
    h_kl: &ComplexMatrix,
    u_l: &ComplexVector,
    h_tilde_kk: &ComplexMatrix,
    u_k: &ComplexVector,
    sigma2: f64,
) -> Result<ComplexVector> {
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidConfig("noise power must be positive".into()));
    }
    let d = matched_direction(h_kl, u_l)?;
    let a = matched_direction(h_tilde_kk, u_k)?;
    let m = d.len();
    let w = &a * a.adjoint() + DMatrix::<Complex64>::identity(m, m) * Complex64::from(sigma2);
    let x = Cholesky::new(w)
        .ok_or_else(|| Error::Numerical("Cholesky factorization of TX-side W failed".into()))?
        .solve(&d);
    Ok(fix_phase(normalized(x)?))
}
