use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Propagator};
use crate::space::{DensityMatrix, StateVector};
use crate::tolerances;

/// `exp(-iHt) rho exp(iHt)`.
pub fn evolve_unitary(state: &DensityMatrix, h: &ComplexMatrix, t: f64) -> Result<DensityMatrix> {
    if h.rows() != state.dim() || h.cols() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: h.rows(),
        });
    }
    let u = Propagator::new(h)?.at(t);
    let out = state.conjugate_by(&u)?;
    let drift = (out.trace() - state.trace()).norm();
    if drift > tolerances::TRACE {
        return Err(Error::validation(format!("trace drift {drift:.3e} under unitary evolution")));
    }
    Ok(out)
}

/// `exp(-iHt) psi`.
pub fn evolve_pure(state: &StateVector, h: &ComplexMatrix, t: f64) -> Result<StateVector> {
    if h.rows() != state.amplitudes().len() {
        return Err(Error::DimensionMismatch {
            expected: state.amplitudes().len(),
            found: h.rows(),
        });
    }
    state.apply_unitary(&Propagator::new(h)?.at(t))
}
