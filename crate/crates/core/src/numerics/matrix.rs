use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest matrix dimension handled by the dense routines (12 qubits).
pub const MAX_DIM: usize = 4096;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<S> {
    dim: usize,
    data: Vec<Complex<S>>,
}

impl<S: Real> ComplexMatrix<S> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(S::zero(), S::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(S::one(), S::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<S>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_rows(entries: Vec<Complex<S>>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::BadDimension {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_real_rows(entries: &[f64]) -> Result<Self> {
        Self::from_rows(
            entries
                .iter()
                .map(|&x| Complex::new(S::lit(x), S::zero()))
                .collect(),
        )
    }

    pub fn from_real_diagonal(diag: &[S]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, S::zero());
        }
        m
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let z = Complex::new(S::zero(), S::zero());
        let i = Complex::new(S::zero(), S::one());
        Self::from_rows(vec![z, -i, i, z]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_real_rows(&[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex<S>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<S>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<Complex<S>> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> Complex<S> {
        self.diagonal().into_iter().fold(Complex::new(S::zero(), S::zero()), |a, b| a + b)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, factor: S) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> S {
        self.data.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt()
    }

    pub fn max_abs(&self) -> S {
        self.data.iter().map(|z| z.norm()).fold(S::zero(), S::max)
    }

    /// Largest |m_ij - conj(m_ji)|.
    pub fn hermitian_asymmetry(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian within `rel_tol * max|m_ij|`.
    pub fn is_hermitian(&self, rel_tol: S) -> bool {
        self.hermitian_asymmetry() <= rel_tol * self.max_abs()
    }

    pub fn check_hermitian(&self, rel_tol: S) -> Result<()> {
        let asym = self.hermitian_asymmetry();
        let tol = rel_tol * self.max_abs();
        if asym > tol {
            return Err(Error::NotHermitian {
                asymmetry: asym.to_f64_lossy(),
                tolerance: tol.to_f64_lossy(),
            });
        }
        Ok(())
    }

    pub fn matvec(&self, v: &[Complex<S>]) -> Vec<Complex<S>> {
        assert_eq!(v.len(), self.dim, "matvec dimension mismatch");
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Complex::new(S::zero(), S::zero()), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == S::zero() && a.im == S::zero() {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let dim = self.dim * other.dim;
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge { dim, limit: MAX_DIM });
        }
        let nb = other.dim;
        Ok(Self::from_fn(dim, |r, c| {
            self[(r / nb, c / nb)] * other[(r % nb, c % nb)]
        }))
    }
}

impl<S> Index<(usize, usize)> for ComplexMatrix<S> {
    type Output = Complex<S>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<S> {
        &self.data[i * self.dim + j]
    }
}

impl<S> IndexMut<(usize, usize)> for ComplexMatrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<S> {
        &mut self.data[i * self.dim + j]
    }
}

impl<S: Real> Add for &ComplexMatrix<S> {
    type Output = ComplexMatrix<S>;
    fn add(self, rhs: Self) -> ComplexMatrix<S> {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<S: Real> Sub for &ComplexMatrix<S> {
    type Output = ComplexMatrix<S>;
    fn sub(self, rhs: Self) -> ComplexMatrix<S> {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<S: Real> Mul for &ComplexMatrix<S> {
    type Output = ComplexMatrix<S>;
    fn mul(self, rhs: Self) -> ComplexMatrix<S> {
        self.matmul(rhs)
    }
}

/// Kronecker product of two matrices.
pub fn kron<S: Real>(a: &ComplexMatrix<S>, b: &ComplexMatrix<S>) -> Result<ComplexMatrix<S>> {
    a.kron(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<S: Real>(factors: &[ComplexMatrix<S>]) -> Result<ComplexMatrix<S>> {
    let mut acc = ComplexMatrix::identity(1);
    for f in factors {
        acc = acc.kron(f)?;
    }
    Ok(acc)
}

/// Splits a flat index into per-site digits; site 0 is the most significant.
pub(crate) fn digits(mut index: usize, local_dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(local_dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

pub(crate) fn undigits(digits: &[usize], local_dims: &[usize]) -> usize {
    digits
        .iter()
        .zip(local_dims)
        .fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Transposes the tensor indices of the sites in `subset`.
///
/// `local_dims` gives the dimension of each site (site 0 most significant); its product must
/// equal `m.dim()`. `subset` must be a nonempty proper subset of the sites.
pub fn partial_transpose<S: Real>(
    m: &ComplexMatrix<S>,
    local_dims: &[usize],
    subset: &[usize],
) -> Result<ComplexMatrix<S>> {
    let bad = || Error::BadDimensionFactorization {
        local_dims: local_dims.to_vec(),
        dim: m.dim(),
    };
    if local_dims.is_empty() || local_dims.iter().any(|&d| d == 0) {
        return Err(bad());
    }
    let product = local_dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(bad)?;
    if product != m.dim() {
        return Err(bad());
    }
    let sites = local_dims.len();
    let mut mask = vec![false; sites];
    for &s in subset {
        if s >= sites || mask[s] {
            return Err(bad());
        }
        mask[s] = true;
    }
    if subset.is_empty() || subset.len() == sites {
        return Err(bad());
    }

    let n = m.dim();
    let mut out = ComplexMatrix::zeros(n);
    let mut row = vec![0; sites];
    let mut col = vec![0; sites];
    for i in 0..n {
        for j in 0..n {
            digits(i, local_dims, &mut row);
            digits(j, local_dims, &mut col);
            for s in 0..sites {
                if mask[s] {
                    std::mem::swap(&mut row[s], &mut col[s]);
                }
            }
            out[(undigits(&row, local_dims), undigits(&col, local_dims))] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Dense density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<S> {
    matrix: ComplexMatrix<S>,
}

impl<S: Real> DensityMatrix<S> {
    /// Validates Hermiticity and unit trace. Positivity is the caller's responsibility.
    pub fn new(matrix: ComplexMatrix<S>) -> Result<Self> {
        matrix.check_hermitian(S::tol(1e-12))?;
        let tr = matrix.trace();
        if (tr.re - S::one()).abs() > S::tol(1e-9) || tr.im.abs() > S::tol(1e-9) {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {} + {}i is not 1",
                tr.re, tr.im
            )));
        }
        Ok(Self { matrix })
    }

    /// Skips validation; used by routines that construct the matrix from a spectral sum.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix<S>) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = S::one() / S::from_usize_lossy(dim);
        Self {
            matrix: ComplexMatrix::from_real_diagonal(&vec![w; dim]),
        }
    }

    /// |ψ⟩⟨ψ| for a normalized amplitude vector.
    pub fn from_pure(amplitudes: &[Complex<S>]) -> Self {
        let n = amplitudes.len();
        Self {
            matrix: ComplexMatrix::from_fn(n, |i, j| amplitudes[i] * amplitudes[j].conj()),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix<S> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<S> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(m: &ComplexMatrix<f64>) -> Vec<f64> {
        m.as_slice().iter().map(|z| z.re).collect()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::<f64>::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_of_diagonal_paulis() {
        let z = ComplexMatrix::<f64>::pauli_z();
        let zz = kron(&z, &z).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(zz, expected);
    }

    #[test]
    fn kron_x_z_block_antidiagonal() {
        // σx ⊗ σz = [[0, σz], [σz, 0]]
        let xz = kron(&ComplexMatrix::<f64>::pauli_x(), &ComplexMatrix::pauli_z()).unwrap();
        #[rustfmt::skip]
        let expected = [
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, -1.0,
            1.0, 0.0, 0.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
        ];
        assert_eq!(re(&xz), expected);
        assert!(xz.as_slice().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn kron_size_guard() {
        let a = ComplexMatrix::<f64>::identity(64);
        let b = ComplexMatrix::<f64>::identity(128);
        assert!(matches!(kron(&a, &b), Err(Error::DimensionTooLarge { dim: 8192, .. })));
    }

    #[test]
    fn partial_transpose_product_and_mixed_unchanged() {
        let mut prod = ComplexMatrix::<f64>::zeros(4);
        prod[(0, 0)] = Complex::new(1.0, 0.0);
        assert_eq!(partial_transpose(&prod, &[2, 2], &[1]).unwrap(), prod);
        let mixed = DensityMatrix::<f64>::maximally_mixed(4).into_matrix();
        assert_eq!(partial_transpose(&mixed, &[2, 2], &[0]).unwrap(), mixed);
    }

    #[test]
    fn partial_transpose_moves_singlet_coherences() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = [0.0, h, -h, 0.0].map(|x| Complex::new(x, 0.0));
        let rho = DensityMatrix::from_pure(&amps).into_matrix();
        let pt = partial_transpose(&rho, &[2, 2], &[1]).unwrap();
        // ⟨01|ρ|10⟩ = -1/2 moves to ⟨00|ρ^T_B|11⟩
        assert!((pt[(0, 3)].re + 0.5).abs() < 1e-15);
        assert!((pt[(3, 0)].re + 0.5).abs() < 1e-15);
        assert_eq!(pt[(1, 2)].re, 0.0);
    }

    #[test]
    fn partial_transpose_rejects_bad_factorization() {
        let m = ComplexMatrix::<f64>::identity(4);
        assert!(partial_transpose(&m, &[2, 3], &[0]).is_err());
        assert!(partial_transpose(&m, &[2, 2], &[]).is_err());
        assert!(partial_transpose(&m, &[2, 2], &[0, 1]).is_err());
        assert!(partial_transpose(&m, &[2, 2], &[2]).is_err());
    }

    #[test]
    fn hermitian_check() {
        let y = ComplexMatrix::<f64>::pauli_y();
        assert!(y.is_hermitian(1e-12));
        let mut bad = y.clone();
        bad[(0, 1)] = Complex::new(0.0, 1.0);
        assert!(matches!(bad.check_hermitian(1e-12), Err(Error::NotHermitian { .. })));
    }
}
