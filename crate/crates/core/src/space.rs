//! Labeled tensor-product spaces and the states that live on them.

use std::collections::HashSet;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigenvalues, kron, psd_sqrt, ComplexMatrix, ONE, ZERO};
use crate::tolerances;

/// Flying atom.
pub const FLYING: &str = "f";
/// Ion trapped in cavity A.
pub const ION1: &str = "ion1";
/// Ion trapped in cavity B.
pub const ION2: &str = "ion2";
/// The single ion of the full single-cavity model.
pub const ION: &str = "ion";
/// Cavity field mode.
pub const FIELD: &str = "field";
/// Ion vibrational mode.
pub const VIB: &str = "vib";

/// Qubit basis index of the excited state `|e>`.
pub const EXCITED: usize = 0;
/// Qubit basis index of the ground state `|g>`.
pub const GROUND: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Ordered tensor factors. Basis index ordering follows [`kron`]: the first
/// factor is the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceLayout {
    factors: Vec<Factor>,
}

impl SpaceLayout {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|(label, dim)| Factor {
                label: label.into(),
                dim,
            })
            .collect();
        if factors.is_empty() {
            return Err(Error::invalid("layout needs at least one factor"));
        }
        let mut seen = HashSet::new();
        for f in &factors {
            if f.dim == 0 {
                return Err(Error::invalid(format!("factor `{}` has dimension 0", f.label)));
            }
            if !seen.insert(f.label.as_str()) {
                return Err(Error::invalid(format!("duplicate factor label `{}`", f.label)));
            }
        }
        Ok(Self { factors })
    }

    /// `(f, ion1, ion2)`, all qubits.
    pub fn protocol() -> Self {
        Self::new([(FLYING, 2), (ION1, 2), (ION2, 2)]).expect("static layout")
    }

    /// `(ion1, ion2)`.
    pub fn ion_pair() -> Self {
        Self::new([(ION1, 2), (ION2, 2)]).expect("static layout")
    }

    /// `(f, ion, field, vib)` with Fock truncations `n_field_max`, `n_vib_max`.
    pub fn full_model(n_field_max: usize, n_vib_max: usize) -> Self {
        Self::new([
            (FLYING, 2),
            (ION, 2),
            (FIELD, n_field_max + 1),
            (VIB, n_vib_max + 1),
        ])
        .expect("static layout")
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|f| f.label.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.position(label)?].dim)
    }

    /// Stride of each factor in the flattened basis index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for k in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.factors[k + 1].dim;
        }
        strides
    }

    /// Flattened index of a product basis state given per-factor digits.
    pub fn index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.factors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.factors.len(),
                found: digits.len(),
            });
        }
        let mut idx = 0;
        for (d, f) in digits.iter().zip(&self.factors) {
            if *d >= f.dim {
                return Err(Error::invalid(format!(
                    "digit {d} out of range for factor `{}` (dim {})",
                    f.label, f.dim
                )));
            }
            idx = idx * f.dim + d;
        }
        Ok(idx)
    }

    /// Per-factor digits of a flattened index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            out[k] = index % f.dim;
            index /= f.dim;
        }
        out
    }

    /// Concatenation `self (x) other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.factors
                .iter()
                .chain(&other.factors)
                .map(|f| (f.label.clone(), f.dim)),
        )
    }

    /// Lifts a single-factor operator to the whole space.
    pub fn embed(&self, label: &str, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.embed_product(&[(label, op)])
    }

    /// Lifts a product of single-factor operators, acting as identity on the
    /// remaining factors.
    pub fn embed_product(&self, ops: &[(&str, &ComplexMatrix)]) -> Result<ComplexMatrix> {
        let mut slots: Vec<Option<&ComplexMatrix>> = vec![None; self.factors.len()];
        for (label, op) in ops {
            let k = self.position(label)?;
            let dim = self.factors[k].dim;
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.rows(),
                });
            }
            if slots[k].is_some() {
                return Err(Error::invalid(format!("factor `{label}` given twice")));
            }
            slots[k] = Some(op);
        }
        let mut out = ComplexMatrix::identity(1);
        for (slot, f) in slots.iter().zip(&self.factors) {
            out = match slot {
                Some(op) => kron(&out, op),
                None => kron(&out, &ComplexMatrix::identity(f.dim)),
            };
        }
        Ok(out)
    }
}

/// A pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: SpaceLayout,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(layout: SpaceLayout, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { layout, amplitudes })
    }

    /// Product basis state with the given per-factor digits.
    pub fn basis(layout: SpaceLayout, digits: &[usize]) -> Result<Self> {
        let idx = layout.index(digits)?;
        let mut amplitudes = vec![ZERO; layout.total_dim()];
        amplitudes[idx] = ONE;
        Ok(Self { layout, amplitudes })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }

    pub fn inner(&self, other: &Self) -> C64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    /// Applies an operator on the full space. Unitaries must keep the norm
    /// within [`tolerances::NORM`].
    pub fn apply_unitary(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.cols() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: u.cols(),
            });
        }
        let out = Self {
            layout: self.layout.clone(),
            amplitudes: u.apply(&self.amplitudes),
        };
        let drift = (out.norm() - self.norm()).abs();
        if drift > tolerances::NORM {
            return Err(Error::validation(format!("norm drift {drift:.3e} under unitary")));
        }
        Ok(out)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            layout: self.layout.clone(),
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

/// A mixed state on a labeled space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: SpaceLayout,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian, unit trace, positive semidefinite
    /// within the crate tolerances.
    pub fn new(layout: SpaceLayout, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(layout, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks only the dimensions.
    pub fn new_unchecked(layout: SpaceLayout, matrix: ComplexMatrix) -> Result<Self> {
        let n = layout.total_dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.rows(),
            });
        }
        Ok(Self { layout, matrix })
    }

    pub fn validate(&self) -> Result<()> {
        let herr = self.matrix.hermiticity_error();
        if herr > tolerances::HERMITIAN_INPUT {
            return Err(Error::validation(format!("density matrix not Hermitian ({herr:.3e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > tolerances::TRACE || tr.im.abs() > tolerances::TRACE {
            return Err(Error::validation(format!("density matrix trace {tr} != 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < tolerances::MIN_EIGENVALUE {
            return Err(Error::validation(format!("density matrix has eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        psi.to_density()
    }

    /// `rho_1 (x) rho_2 (x) ...` with concatenated layouts.
    pub fn product(parts: &[&DensityMatrix]) -> Result<Self> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::invalid("empty product"))?;
        let mut out = (*first).clone();
        for p in rest {
            out = Self {
                layout: out.layout.tensor(&p.layout)?,
                matrix: kron(&out.matrix, &p.matrix),
            };
        }
        Ok(out)
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix.hermitian_part())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.last().copied().unwrap_or(0.0))
    }

    /// Diagonal entry of a product basis state given per-factor digits.
    pub fn population(&self, digits: &[usize]) -> Result<f64> {
        let k = self.layout.index(digits)?;
        Ok(self.matrix[(k, k)].re)
    }

    /// `<a|rho|b>` for product basis states.
    pub fn element(&self, a: &[usize], b: &[usize]) -> Result<C64> {
        Ok(self.matrix[(self.layout.index(a)?, self.layout.index(b)?)])
    }

    /// `<psi|rho|psi>`; equals the fidelity when the reference is pure.
    /// Rounding above 1 is cut off.
    pub fn overlap(&self, psi: &StateVector) -> Result<f64> {
        if psi.layout() != &self.layout {
            return Err(Error::invalid("layouts differ"));
        }
        Ok(self.matrix.sandwich(psi.amplitudes(), psi.amplitudes()).re.min(1.0))
    }

    /// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, evaluated
    /// as the squared sum of singular values of `sqrt(rho) sqrt(sigma)`.
    /// That form takes no square roots of near-zero eigenvalues of the
    /// product, which keeps full precision for rank-deficient states.
    ///
    /// Reduces to `tr(rho sigma)` when either state is pure, so global
    /// phases of pure references never matter. Rounding above 1 is cut off.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if other.layout != self.layout {
            return Err(Error::invalid("layouts differ"));
        }
        let a = psd_sqrt(&self.matrix.hermitian_part())?;
        let b = psd_sqrt(&other.matrix.hermitian_part())?;
        let nuclear: f64 = linalg::singular_values(&(&a * &b)).iter().sum();
        Ok((nuclear * nuclear).min(1.0))
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.rows(),
            });
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &(u * &self.matrix) * &u.dagger(),
        })
    }

    /// `(rho + rho^dagger) / 2`.
    pub fn hermitized(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix: self.matrix.hermitian_part(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Expectation value `tr(rho A)` of a full-space operator.
    pub fn expect(&self, op: &ComplexMatrix) -> C64 {
        (&self.matrix * op).trace()
    }
}

/// Reduced state on the `keep` factors, in their original relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::invalid("partial trace must keep at least one factor"));
    }
    let layout = rho.layout();
    let mut kept_pos = Vec::with_capacity(keep.len());
    for label in keep {
        let p = layout.position(label)?;
        if !kept_pos.contains(&p) {
            kept_pos.push(p);
        }
    }
    kept_pos.sort_unstable();
    let traced_pos: Vec<usize> = (0..layout.factors().len())
        .filter(|p| !kept_pos.contains(p))
        .collect();

    let strides = layout.strides();
    let dims = layout.dims();
    let offsets = |positions: &[usize]| -> Vec<usize> {
        let mut offs = vec![0usize];
        for &p in positions {
            offs = offs
                .iter()
                .flat_map(|&o| {
                    let (dim, stride) = (dims[p], strides[p]);
                    (0..dim).map(move |d| o + d * stride)
                })
                .collect();
        }
        offs
    };
    let kept_off = offsets(&kept_pos);
    let traced_off = offsets(&traced_pos);

    let m = rho.matrix();
    let n = kept_off.len();
    let reduced = ComplexMatrix::from_fn(n, n, |i, j| {
        traced_off
            .iter()
            .map(|t| m[(kept_off[i] + t, kept_off[j] + t)])
            .sum()
    });
    let sub = SpaceLayout::new(
        kept_pos
            .iter()
            .map(|&p| (layout.factors()[p].label.clone(), dims[p])),
    )?;
    DensityMatrix::new_unchecked(sub, reduced)
}
