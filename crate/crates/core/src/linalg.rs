//! Dense complex matrices for the two- and four-qubit quantum backend.
//!
//! Everything here is row-major and sized for dimensions up to 16. The only
//! decomposition offered is a cyclic Jacobi eigensolver for Hermitian input,
//! which is all the separability check needs.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by [`hermitian_eig`].
pub const EPS_HERM: f64 = 1e-10;
/// Entrywise reconstruction tolerance for eigendecompositions.
pub const EPS_RECON: f64 = 1e-9;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this.
pub const JACOBI_OFF_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

pub type C64 = Complex64;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics unless `entries.len()` is a
    /// nonzero perfect square.
    pub fn from_entries(entries: Vec<C64>) -> Self {
        let dim = (0..=entries.len())
            .find(|d| d * d >= entries.len())
            .unwrap_or(0);
        assert!(
            dim >= 1 && dim * dim == entries.len(),
            "entry count {} is not a positive square",
            entries.len()
        );
        Self { dim, data: entries }
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self::from_entries(entries.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        m
    }

    /// Projector `|v⟩⟨v|` onto an (unnormalized) vector.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_complex(&self, k: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        &(u * self) * &u.adjoint()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Matrix trace norm style sum of squared moduli of off-diagonal entries.
    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        libm::sqrt(s)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product: entry `(i·b.dim + k, j·b.dim + l) = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = (a.dim, b.dim);
    let mut out = ComplexMatrix::zeros(n * m);
    for i in 0..n {
        for j in 0..n {
            let aij = a[(i, j)];
            for k in 0..m {
                for l in 0..m {
                    out[(i * m + k, j * m + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Splits a flat index into per-subsystem digits (first subsystem most significant).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

fn check_dims(rho: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if total != rho.dim || dims.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim,
            found: total,
        });
    }
    Ok(())
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems stay in
/// their original order.
pub fn partial_trace(rho: &ComplexMatrix, keep: &[usize], dims: &[usize]) -> Result<ComplexMatrix> {
    check_dims(rho, dims)?;
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidSubsystem(bad));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let out_dim: usize = kept.iter().map(|&k| dims[k]).product();
    let mut out = ComplexMatrix::zeros(out_dim);

    let n = rho.dim;
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            let traced_match = (0..dims.len())
                .filter(|s| !kept.contains(s))
                .all(|s| di[s] == dj[s]);
            if !traced_match {
                continue;
            }
            let (mut ri, mut rj) = (0, 0);
            for &s in &kept {
                ri = ri * dims[s] + di[s];
                rj = rj * dims[s] + dj[s];
            }
            out[(ri, rj)] += rho[(i, j)];
        }
    }
    Ok(out)
}

/// Transposes the indices of subsystem `sys`.
pub fn partial_transpose(rho: &ComplexMatrix, sys: usize, dims: &[usize]) -> Result<ComplexMatrix> {
    check_dims(rho, dims)?;
    if sys >= dims.len() {
        return Err(Error::InvalidSubsystem(sys));
    }
    let n = rho.dim;
    let mut out = ComplexMatrix::zeros(n);
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            core::mem::swap(&mut di[sys], &mut dj[sys]);
            let (mut ti, mut tj) = (0, 0);
            for s in 0..dims.len() {
                ti = ti * dims[s] + di[s];
                tj = tj * dims[s] + dj[s];
            }
            core::mem::swap(&mut di[sys], &mut dj[sys]);
            out[(ti, tj)] = rho[(i, j)];
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Option<ComplexMatrix>,
}

impl EigenResult {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `V · diag(λ) · V†`, when eigenvectors are present.
    pub fn reconstruct(&self) -> Option<ComplexMatrix> {
        let v = self.eigenvectors.as_ref()?;
        let d = ComplexMatrix::diag_real(&self.eigenvalues);
        Some(&(v * &d) * &v.adjoint())
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input is symmetrized before iterating, so eigenvalues are real by
/// construction. Each rotation first removes the phase of the pivot entry
/// with a diagonal unitary and then applies a real Givens rotation.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigenResult> {
    let deviation = h.hermitian_deviation();
    if deviation > EPS_HERM {
        return Err(Error::NotHermitian { deviation });
    }
    let n = h.dim;
    let mut a = ComplexMatrix::from_fn(n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm() < JACOBI_OFF_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                // Phase step: column q times e^{-iφ}, row q times e^{iφ}.
                let phase = apq / r;
                let col_factor = phase.conj();
                for k in 0..n {
                    a[(k, q)] *= col_factor;
                    v[(k, q)] *= col_factor;
                }
                for k in 0..n {
                    a[(q, k)] *= phase;
                }
                // Real Givens rotation zeroing the now-real pivot.
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = 0.5 * libm::atan2(2.0 * r, aqq - app);
                let (s, cs) = (libm::sin(theta), libm::cos(theta));
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs - akq * s;
                    a[(k, q)] = akp * s + akq * cs;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs - vkq * s;
                    v[(k, q)] = vkp * s + vkq * cs;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs - aqk * s;
                    a[(q, k)] = apk * s + aqk * cs;
                }
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |row, col| v[(row, order[col])]);
    Ok(EigenResult {
        eigenvalues,
        eigenvectors: Some(eigenvectors),
    })
}

pub mod gates {
    //! Single-qubit constants.
    use super::{c, ComplexMatrix};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_entries(alloc::vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])
    }

    pub fn hadamard() -> ComplexMatrix {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real(2, &[h, h, h, -h])
    }

    pub fn phase_s() -> ComplexMatrix {
        ComplexMatrix::from_entries(alloc::vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
    }

    /// `|k⟩⟨k|` on a single qubit.
    pub fn projector(k: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2);
        m[(k, k)] = c(1.0, 0.0);
        m
    }
}
