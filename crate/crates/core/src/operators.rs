//! Single-factor operator matrices.
//!
//! Qubit basis order is `(|e>, |g>)`, so `sigma_z = diag(1, -1)` and
//! `sigma_+ = |e><g|`.

use num_complex::Complex64 as C64;

use crate::linalg::{ComplexMatrix, I, ONE, ZERO};

pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ZERO, ZERO]])
}

pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[ZERO, ZERO], &[ONE, ZERO]])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::real_diagonal(&[1.0, -1.0])
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]])
}

/// `|e><e|`
pub fn projector_excited() -> ComplexMatrix {
    ComplexMatrix::real_diagonal(&[1.0, 0.0])
}

/// `|g><g|`
pub fn projector_ground() -> ComplexMatrix {
    ComplexMatrix::real_diagonal(&[0.0, 1.0])
}

/// Bosonic annihilation operator on Fock states `0..=n_max`.
pub fn annihilation(n_max: usize) -> ComplexMatrix {
    let d = n_max + 1;
    ComplexMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

pub fn creation(n_max: usize) -> ComplexMatrix {
    annihilation(n_max).dagger()
}

pub fn number(n_max: usize) -> ComplexMatrix {
    let diag: Vec<f64> = (0..=n_max).map(|n| n as f64).collect();
    ComplexMatrix::real_diagonal(&diag)
}

/// `a + a^dagger`, the dimensionless position quadrature (times sqrt 2).
pub fn position_quadrature(n_max: usize) -> ComplexMatrix {
    let a = annihilation(n_max);
    &a + &a.dagger()
}
