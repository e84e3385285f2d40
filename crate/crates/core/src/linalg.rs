//! Dense complex matrices and Hermitian matrix functions.
//!
//! Every generator in this crate is Hermitian, so matrix functions
//! (propagators, `cos`, square roots) go through an eigendecomposition
//! `M = V diag(lambda) V^dagger` rather than series expansions. This keeps
//! propagators unitary to rounding error regardless of `t`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tolerances;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Elementwise real part, as a complex matrix.
    pub fn real_part(&self) -> Self {
        Self(self.0.map(|z| C64::new(z.re, 0.0)))
    }

    pub fn map(&self, f: impl FnMut(C64) -> C64) -> Self {
        Self(self.0.map(f))
    }

    /// `max_ij |self_ij - other_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                err = err.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols(), v.len(), "dimension mismatch");
        let out = &self.0 * nalgebra::DVector::from_column_slice(v);
        out.as_slice().to_vec()
    }

    /// `<a|M|b>`.
    pub fn sandwich(&self, a: &[C64], b: &[C64]) -> C64 {
        self.apply(b).iter().zip(a).map(|(mb, ai)| ai.conj() * mb).sum()
    }

    /// Column-stacked vectorization.
    pub fn vectorize(&self) -> Vec<C64> {
        self.0.as_slice().to_vec()
    }

    /// Inverse of [`vectorize`](Self::vectorize) for an `n x n` matrix.
    pub fn unvectorize(v: &[C64], n: usize) -> Self {
        assert_eq!(v.len(), n * n, "vector length is not n^2");
        Self(DMatrix::from_column_slice(n, n, v))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 += &rhs.0;
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a (x) b`; entry `(i*rb + k, j*cb + l)` is `a_ij * b_kl`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Kronecker product of a list of matrices, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, m| kron(&acc, m))
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V f(Lambda) V^dagger`.
    pub fn apply_function(&self, mut f: impl FnMut(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors.0;
        let mut scaled = v.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let fk = f(lambda);
            for i in 0..n {
                scaled[(i, k)] *= fk;
            }
        }
        ComplexMatrix(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_function(|x| C64::new(x, 0.0))
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.0.column(k).iter().copied().collect()
    }
}

/// Eigenvalues (descending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::validation(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.0.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    let herr = m.hermiticity_error();
    if herr > tolerances::HERMITIAN_INPUT {
        return Err(Error::validation(format!(
            "matrix is not Hermitian (max |M - M^dagger| = {herr:.3e})"
        )));
    }
    let eig = m.hermitian_part().0.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.rows();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix(vectors),
    })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eig(m).map(|e| e.values)
}

/// The propagator `exp(-i H t)` of a Hermitian generator.
pub fn expm_hermitian_generator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(Propagator::new(h)?.at(t))
}

/// `cos(X)` for Hermitian `X`.
pub fn operator_cosine(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(x)?.apply_function(|l| C64::new(l.cos(), 0.0)))
}

/// Eigenvalues below this multiple of machine epsilon (relative to the
/// largest one, or to 1) are rounding noise and are treated as zero by
/// [`psd_sqrt`].
const ROUNDING_EIGENVALUE: f64 = 64.0 * f64::EPSILON;

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues down to `-CLAMP` are accepted. Eigenvalues at the rounding
/// level are set to zero, since their square roots (about `1e-8`) would
/// otherwise leak into anything built from the root.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    if let Some(&min) = eig.values.last() {
        if min < -tolerances::CLAMP {
            return Err(Error::validation(format!(
                "matrix is not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
    }
    let floor = ROUNDING_EIGENVALUE * eig.values.first().map_or(1.0, |v| v.abs().max(1.0));
    Ok(eig.apply_function(|l| C64::new(if l > floor { l.sqrt() } else { 0.0 }, 0.0)))
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.0.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// A diagonalized Hermitian generator; evaluates `exp(-i H t)` for any `t`
/// at the cost of one matrix product.
#[derive(Debug, Clone)]
pub struct Propagator {
    eig: HermitianEigen,
}

impl Propagator {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            eig: hermitian_eig(h)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.eig.values.len()
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eig
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        self.eig.apply_function(|l| (-I * (l * t)).exp())
    }

    /// Evolves a state vector: `exp(-i H t) psi`.
    pub fn evolve_vector(&self, psi: &[C64], t: f64) -> Vec<C64> {
        let coeffs = self.eig.vectors.dagger().apply(psi);
        self.evolve_coefficients(&coeffs, t)
    }

    /// Same as [`evolve_vector`](Self::evolve_vector) with `psi` already
    /// expanded in the eigenbasis (`V^dagger psi`).
    pub fn evolve_coefficients(&self, coeffs: &[C64], t: f64) -> Vec<C64> {
        let phased: Vec<C64> = coeffs
            .iter()
            .zip(&self.eig.values)
            .map(|(c, &l)| c * (-I * (l * t)).exp())
            .collect();
        self.eig.vectors.apply(&phased)
    }
}

/// Euclidean norm of a complex vector.
pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
