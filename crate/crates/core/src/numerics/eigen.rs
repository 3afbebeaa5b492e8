//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal unitary on
//! column `q`, then annihilates the now-real pivot with a plane rotation. Sweeps run over
//! all pairs `p < q` until the off-diagonal Frobenius norm drops below
//! `tolerance * ‖A‖_F`.

use num_complex::Complex;

use super::matrix::{ComplexMatrix, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerances for the eigensolver. Defaults reproduce the documented accuracy envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenConfig<S> {
    /// Relative asymmetry accepted as Hermitian, scaled by the largest entry.
    pub hermitian_tol: S,
    /// Stop once off-diagonal Frobenius norm < `offdiag_tol * ‖A‖_F`.
    pub offdiag_tol: S,
    pub max_sweeps: usize,
}

impl<S: Real> Default for EigenConfig<S> {
    fn default() -> Self {
        Self {
            hermitian_tol: S::tol(1e-12),
            offdiag_tol: S::tol(1e-12),
            max_sweeps: 100,
        }
    }
}

/// Eigenvalues ascending, eigenvectors stored as the columns of `eigenvectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<S> {
    pub eigenvalues: Vec<S>,
    pub eigenvectors: ComplexMatrix<S>,
}

impl<S: Real> EigenDecomposition<S> {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex<S>> {
        let n = self.eigenvectors.dim();
        (0..n).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    /// ‖H·V − V·diag(λ)‖_F
    pub fn residual(&self, h: &ComplexMatrix<S>) -> S {
        let hv = h.matmul(&self.eigenvectors);
        let n = h.dim();
        let mut acc = S::zero();
        for i in 0..n {
            for k in 0..n {
                let d = hv[(i, k)] - self.eigenvectors[(i, k)] * self.eigenvalues[k];
                acc += d.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// max |V†V − I|
    pub fn orthonormality_defect(&self) -> S {
        let g = self.eigenvectors.adjoint().matmul(&self.eigenvectors);
        let n = g.dim();
        let mut worst = S::zero();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { S::one() } else { S::zero() };
                worst = worst.max((g[(i, j)] - Complex::new(target, S::zero())).norm());
            }
        }
        worst
    }

    /// Applies `f` to the eigenvalues and reassembles `V·diag(f(λ))·V†`.
    pub fn map_spectrum(&self, mut f: impl FnMut(S) -> S) -> ComplexMatrix<S> {
        let n = self.eigenvectors.dim();
        let weights: Vec<S> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, |i, j| {
            let mut acc = Complex::new(S::zero(), S::zero());
            for (k, &w) in weights.iter().enumerate() {
                if w != S::zero() {
                    acc += v[(i, k)] * v[(j, k)].conj() * w;
                }
            }
            acc
        })
    }
}

pub fn hermitian_eigendecompose<S: Real>(m: &ComplexMatrix<S>) -> Result<EigenDecomposition<S>> {
    hermitian_eigendecompose_with(m, &EigenConfig::default())
}

pub fn hermitian_eigenvalues<S: Real>(m: &ComplexMatrix<S>) -> Result<Vec<S>> {
    Ok(hermitian_eigendecompose(m)?.eigenvalues)
}

pub fn hermitian_eigendecompose_with<S: Real>(
    m: &ComplexMatrix<S>,
    cfg: &EigenConfig<S>,
) -> Result<EigenDecomposition<S>> {
    let n = m.dim();
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: n, limit: MAX_DIM });
    }
    m.check_hermitian(cfg.hermitian_tol)?;

    // symmetrize so that the update formulas can assume exact Hermiticity
    let half = S::lit(0.5);
    let mut a = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex::new(m[(i, i)].re, S::zero())
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * half
        }
    });
    let mut v = ComplexMatrix::identity(n);

    let norm = a.frobenius_norm();
    let target = cfg.offdiag_tol * norm;
    let mut converged = n < 2 || norm == S::zero();
    let mut sweeps = 0;
    while !converged {
        if sweeps == cfg.max_sweeps {
            return Err(Error::NoConvergence { sweeps });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) < target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm<S: Real>(a: &ComplexMatrix<S>) -> S {
    let n = a.dim();
    let mut acc = S::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate<S: Real>(a: &mut ComplexMatrix<S>, v: &mut ComplexMatrix<S>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == S::zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // skip pivots that are already negligible relative to both diagonal entries
    let tiny = S::epsilon() * S::lit(1e-3);
    if mag <= tiny * app.abs() && mag <= tiny * aqq.abs() {
        a[(p, q)] = Complex::new(S::zero(), S::zero());
        a[(q, p)] = Complex::new(S::zero(), S::zero());
        return;
    }

    let theta = (aqq - app) / (S::lit(2.0) * mag);
    let t = {
        let r = S::one() / (theta.abs() + (theta * theta + S::one()).sqrt());
        if theta < S::zero() {
            -r
        } else {
            r
        }
    };
    let c = S::one() / (t * t + S::one()).sqrt();
    let s = t * c;
    // e^{-iφ} with a_pq = |a_pq| e^{iφ}
    let phase = apq.conj() / mag;

    let n = a.dim();
    // columns: A ← A·U, U_pp = c, U_pq = s, U_qp = -s e^{-iφ}, U_qq = c e^{-iφ}
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)] * phase;
        a[(k, p)] = akp * c - akq * s;
        a[(k, q)] = akp * s + akq * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)] * phase;
        v[(k, p)] = vkp * c - vkq * s;
        v[(k, q)] = vkp * s + vkq * c;
    }
    // rows: A ← U†·A
    let phase_c = phase.conj();
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)] * phase_c;
        a[(p, k)] = apk * c - aqk * s;
        a[(q, k)] = apk * s + aqk * c;
    }
    a[(p, p)] = Complex::new(app - t * mag, S::zero());
    a[(q, q)] = Complex::new(aqq + t * mag, S::zero());
    a[(p, q)] = Complex::new(S::zero(), S::zero());
    a[(q, p)] = Complex::new(S::zero(), S::zero());
}
