//! Master-equation generators as matrices on vectorized density matrices,
//! and a fixed-step RK4 integrator.
//!
//! Vectorization stacks columns, so `vec(A X B) = (B^T (x) A) vec(X)`.

use num_complex::Complex64 as C64;

use super::ChannelSpec;
use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, I, ZERO};
use crate::operators::{sigma_minus, sigma_z};
use crate::space::{DensityMatrix, SpaceLayout};
use crate::tolerances;

/// Number of RK4 steps used when no step is given.
pub const DEFAULT_STEPS: usize = 2000;

/// Squared magnitude past which an entry of a unit-trace state has
/// certainly left the stable region.
const DIVERGED: f64 = 1e6;

/// `t / DEFAULT_STEPS`.
pub fn default_step(t: f64) -> f64 {
    t / DEFAULT_STEPS as f64
}

/// A linear map `rho -> L[rho]` on `n x n` matrices, stored as an
/// `n^2 x n^2` matrix acting on column-stacked `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::zeros(dim * dim, dim * dim),
        }
    }

    /// `rho -> A rho B`.
    pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        Self {
            dim: a.rows(),
            matrix: kron(&b.transpose(), a),
        }
    }

    /// `rho -> -i [H, rho]`.
    pub fn hamiltonian(h: &ComplexMatrix) -> Self {
        let id = ComplexMatrix::identity(h.rows());
        let left = Self::sandwich(h, &id);
        let right = Self::sandwich(&id, h);
        Self {
            dim: h.rows(),
            matrix: (&left.matrix - &right.matrix).scale(-I),
        }
    }

    /// `rho -> rate (L rho L^dag - {L^dag L, rho}/2)`.
    pub fn dissipator(rate: f64, l: &ComplexMatrix) -> Self {
        let ld = l.dagger();
        let ldl = &ld * l;
        let id = ComplexMatrix::identity(l.rows());
        let jump = Self::sandwich(l, &ld).matrix;
        let anti = &Self::sandwich(&ldl, &id).matrix + &Self::sandwich(&id, &ldl).matrix;
        Self {
            dim: l.rows(),
            matrix: (&jump - &anti.scale_real(0.5)).scale_real(rate),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::unvectorize(&self.apply_vec(&rho.vectorize()), self.dim)
    }

    fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.apply(v)
    }
}

/// Generator of amplitude damping (rate `gamma`) and dephasing on one qubit
/// factor of `layout`:
///
/// ```text
/// L[rho] = gamma/2 (2 s- rho s+ - s+ s- rho - rho s+ s-) + gp/2 (sz rho sz - rho)
/// ```
///
/// `gp` is [`ChannelSpec::generator_dephasing`], which equals `gamma_p` in the
/// default [`CoherenceDecay::Lindblad`](super::CoherenceDecay) mode.
pub fn lindblad_superoperator(spec: &ChannelSpec, target: &str, layout: &SpaceLayout) -> Result<Superoperator> {
    spec.validate()?;
    let dim = layout.dim_of(target)?;
    if dim != 2 {
        return Err(Error::validation(format!(
            "damping target `{target}` is not a qubit (dim {dim})"
        )));
    }
    let lower = layout.embed(target, &sigma_minus())?;
    let dephase = layout.embed(target, &sigma_z())?;
    // gamma D[s-] + (gp/2) D[sz], since D[sz] rho = sz rho sz - rho.
    Superoperator::dissipator(spec.gamma, &lower)
        .add(&Superoperator::dissipator(spec.generator_dephasing() / 2.0, &dephase))
}

/// Nonzero entries of a matrix, row by row.
struct SparseRows {
    starts: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl SparseRows {
    fn from_dense(m: &ComplexMatrix) -> Self {
        let mut starts = vec![0];
        let (mut cols, mut values) = (Vec::new(), Vec::new());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if v != ZERO {
                    cols.push(j);
                    values.push(v);
                }
            }
            starts.push(cols.len());
        }
        Self { starts, cols, values }
    }

    fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let range = self.starts[i]..self.starts[i + 1];
            *o = self.cols[range.clone()]
                .iter()
                .zip(&self.values[range])
                .map(|(&j, &v)| v * x[j])
                .sum();
        }
    }
}

/// Integrates `d rho/dt = L[rho]` from 0 to `t` with fixed RK4 steps of at
/// most `dt`. The result is re-Hermitized once at the end.
pub fn integrate_master_equation(
    rho0: &DensityMatrix,
    generator: &Superoperator,
    t: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if generator.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            found: generator.dim(),
        });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("integration time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    if !(dt.is_finite() && dt > 0.0 && dt <= t) {
        return Err(Error::invalid(format!("step must satisfy 0 < dt <= t, got dt = {dt}, t = {t}")));
    }
    let steps = (t / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let half = C64::new(h / 2.0, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);

    // Generators act on one factor, so the matrix is mostly zeros; the
    // stepping loop uses its nonzero entries only.
    let sparse = SparseRows::from_dense(generator.matrix());
    let n = generator.matrix().rows();
    let mut y = rho0.matrix().vectorize();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);
    let mut tmp = vec![ZERO; n];
    let axpy = |out: &mut [C64], y: &[C64], a: C64, k: &[C64]| {
        for ((o, y), k) in out.iter_mut().zip(y).zip(k) {
            *o = y + a * k;
        }
    };
    for _ in 0..steps {
        sparse.apply_into(&y, &mut k1);
        axpy(&mut tmp, &y, half, &k1);
        sparse.apply_into(&tmp, &mut k2);
        axpy(&mut tmp, &y, half, &k2);
        sparse.apply_into(&tmp, &mut k3);
        axpy(&mut tmp, &y, full, &k3);
        sparse.apply_into(&tmp, &mut k4);
        for i in 0..n {
            y[i] += sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        // an unstable step grows geometrically; stop before it overflows
        if y.iter().any(|z| !(z.norm_sqr() < DIVERGED)) {
            return Err(Error::Integration(format!(
                "solution diverged; use a smaller step than {h:.3e}"
            )));
        }
    }

    let rho = DensityMatrix::new_unchecked(
        rho0.layout().clone(),
        ComplexMatrix::unvectorize(&y, rho0.dim()),
    )?
    .hermitized();
    let drift = (rho.trace() - rho0.trace()).norm();
    if drift > tolerances::INTEGRATION_FAILURE {
        return Err(Error::Integration(format!(
            "trace drifted by {drift:.3e}; use a smaller step than {h:.3e}"
        )));
    }
    let min = rho.min_eigenvalue()?;
    if min < -tolerances::INTEGRATION_FAILURE {
        return Err(Error::Integration(format!(
            "state lost positivity (eigenvalue {min:.3e}); use a smaller step than {h:.3e}"
        )));
    }
    Ok(rho)
}
