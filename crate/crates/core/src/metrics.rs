//! Two-qubit entanglement measures and what they imply for teleportation.
//!
//! The fully entangled fraction `F = max <Psi|rho|Psi>` over maximally
//! entangled `|Psi>` is computed spectrally: in the magic basis every
//! maximally entangled state is a real vector up to a phase, so `F` is the
//! largest eigenvalue of the real part of `rho` written in that basis. An
//! independent brute-force maximizer over `(U (x) I)|Phi+>` is provided as an
//! oracle. The optimal teleportation fidelity with such a resource is
//! `(2F + 1)/3`; a classical channel reaches `2/3`, i.e. `F = 1/2`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ChannelSpec, CoherenceDecay};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron, psd_sqrt, singular_values, ComplexMatrix, I, ZERO};
use crate::operators::sigma_y;
use crate::space::DensityMatrix;
use crate::states::two_ion_closed_form;
use crate::tolerances;

/// Minimum number of random starts for [`fef_bruteforce_oracle`].
pub const MIN_ORACLE_SAMPLES: usize = 1000;
/// Random starts refined by coordinate search in the oracle.
const ORACLE_REFINED_STARTS: usize = 8;
const ORACLE_MIN_STEP: f64 = 1e-9;

/// Classical teleportation fidelity limit.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

fn clamp_unit(x: f64) -> f64 {
    if (-tolerances::CLAMP..0.0).contains(&x) {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 || rho.layout().dims() != [2, 2] {
        return Err(Error::invalid(format!(
            "expected a two-qubit state, got layout dims {:?}",
            rho.layout().dims()
        )));
    }
    rho.validate()
}

/// Wootters concurrence `max(0, mu1 - mu2 - mu3 - mu4)`, where `mu_i` are the
/// decreasing square roots of the eigenvalues of `rho (sy sy) rho* (sy sy)`.
///
/// With `Y = sy (x) sy` and `A = sqrt(rho) Y sqrt(rho)*`, that matrix is
/// similar to `A A^dagger`, so the `mu_i` are the singular values of `A`.
/// Taking them from an SVD avoids square roots of eigenvalues that are zero
/// up to rounding, which would otherwise cost about eight digits on
/// rank-deficient states. [`psd_sqrt`] drops eigenvalues of `rho` at the
/// rounding level for the same reason.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let yy = kron(&sigma_y(), &sigma_y());
    let root = psd_sqrt(&rho.matrix().hermitian_part())?;
    let mu = singular_values(&(&(&root * &yy) * &root.conj()));
    Ok(clamp_unit(mu[0] - mu[1] - mu[2] - mu[3]))
}

/// Columns are the magic basis in `(|00>, |01>, |10>, |11>)` order:
/// `(|00>+|11>)/sqrt2, i(|00>-|11>)/sqrt2, i(|01>+|10>)/sqrt2, (|01>-|10>)/sqrt2`.
pub fn magic_basis() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = C64::new(s, 0.0);
    let i = I * s;
    ComplexMatrix::from_rows(&[
        &[r, i, ZERO, ZERO],
        &[ZERO, ZERO, i, r],
        &[ZERO, ZERO, i, -r],
        &[r, -i, ZERO, ZERO],
    ])
}

/// Largest eigenvalue of `Re(M^dagger rho M)` with `M` the magic basis.
pub fn fully_entangled_fraction(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let m = magic_basis();
    let in_magic = &(&m.dagger() * rho.matrix()) * &m;
    let values = hermitian_eigenvalues(&in_magic.real_part().hermitian_part())?;
    Ok(clamp_unit(values[0]))
}

/// `<Psi|rho|Psi>` for `Psi = (U (x) I)|Phi+>`, with
/// `U = [[e^{ia} cos t, e^{ib} sin t], [-e^{-ib} sin t, e^{-ia} cos t]]`.
fn oracle_objective(rho: &ComplexMatrix, angles: [f64; 3]) -> f64 {
    let [theta, a, b] = angles;
    let (s, c) = theta.sin_cos();
    let u = [
        [C64::from_polar(c, a), C64::from_polar(s, b)],
        [-C64::from_polar(s, -b), C64::from_polar(c, -a)],
    ];
    // (U (x) I) sum_i |i i>/sqrt2 has amplitude U[j][i]/sqrt2 on |j i>.
    let mut psi = [ZERO; 4];
    for j in 0..2 {
        for i in 0..2 {
            psi[2 * j + i] = u[j][i] * std::f64::consts::FRAC_1_SQRT_2;
        }
    }
    rho.sandwich(&psi, &psi).re
}

fn refine(rho: &ComplexMatrix, start: [f64; 3], start_value: f64) -> f64 {
    let mut x = start;
    let mut best = start_value;
    let mut step = 0.5;
    while step > ORACLE_MIN_STEP {
        let mut improved = false;
        for k in 0..3 {
            for dir in [1.0, -1.0] {
                let mut trial = x;
                trial[k] += dir * step;
                let v = oracle_objective(rho, trial);
                if v > best {
                    best = v;
                    x = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    best
}

/// Brute-force fully entangled fraction: `samples` random starts over the
/// three angles of a local unitary, the best few refined by coordinate
/// search. Deterministic for a fixed `seed`.
pub fn fef_bruteforce_oracle(rho: &DensityMatrix, samples: usize, seed: u64) -> Result<f64> {
    check_two_qubit(rho)?;
    if samples < MIN_ORACLE_SAMPLES {
        return Err(Error::invalid(format!(
            "oracle needs at least {MIN_ORACLE_SAMPLES} samples, got {samples}"
        )));
    }
    let m = rho.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<([f64; 3], f64)> = (0..samples)
        .map(|_| {
            let angles = [
                rng.gen_range(0.0..std::f64::consts::FRAC_PI_2),
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ];
            (angles, oracle_objective(m, angles))
        })
        .collect();
    starts.sort_by(|a, b| b.1.total_cmp(&a.1));
    let best = starts
        .iter()
        .take(ORACLE_REFINED_STARTS)
        .map(|&(x, v)| refine(m, x, v))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(clamp_unit(best))
}

/// Optimal teleportation fidelity `(2F + 1)/3`.
pub fn teleportation_fidelity(fef: f64) -> Result<f64> {
    if !(-tolerances::CLAMP..=1.0 + tolerances::CLAMP).contains(&fef) {
        return Err(Error::invalid(format!("fully entangled fraction {fef} outside [0, 1]")));
    }
    Ok((2.0 * fef.clamp(0.0, 1.0) + 1.0) / 3.0)
}

/// Random-start settings for the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            samples: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub concurrence: f64,
    pub fef: f64,
    pub fef_oracle: Option<f64>,
    pub teleport_fidelity: f64,
    /// `fef >= 1/2`, equivalently `teleport_fidelity >= 2/3`.
    pub classical_beaten: bool,
}

impl MetricsReport {
    fn from_values(concurrence: f64, fef: f64, fef_oracle: Option<f64>) -> Result<Self> {
        Ok(Self {
            concurrence,
            fef,
            fef_oracle,
            teleport_fidelity: teleportation_fidelity(fef)?,
            classical_beaten: fef >= 0.5,
        })
    }
}

/// Concurrence, spectral FEF, optional oracle FEF and teleportation fidelity.
pub fn metrics_report(rho: &DensityMatrix, oracle: Option<OracleConfig>) -> Result<MetricsReport> {
    let fef_oracle = oracle
        .map(|o| fef_bruteforce_oracle(rho, o.samples, o.seed))
        .transpose()?;
    MetricsReport::from_values(concurrence(rho)?, fully_entangled_fraction(rho)?, fef_oracle)
}

/// Closed-form concurrence `exp(-k t_f)` of the two-ion state produced by the
/// channel, `k` being its coherence decay rate.
pub fn closed_form_concurrence(spec: &ChannelSpec) -> f64 {
    (-spec.coherence_rate() * spec.t_flight).exp()
}

/// Closed-form fully entangled fraction
/// `(1 + exp(-gamma t_f) + 2 exp(-k t_f)) / 4`.
pub fn closed_form_fef(spec: &ChannelSpec) -> f64 {
    let t = spec.t_flight;
    (1.0 + (-spec.gamma * t).exp() + 2.0 * (-spec.coherence_rate() * t).exp()) / 4.0
}

/// Agreement required between closed forms and the spectral routes.
const CLOSED_FORM_AGREEMENT: f64 = 1e-9;

/// Closed-form metrics of the channel's two-ion state, cross-checked against
/// the spectral concurrence and FEF evaluated on that state (and against the
/// oracle when one is given).
pub fn analytic_channel_metrics(spec: &ChannelSpec, oracle: Option<OracleConfig>) -> Result<MetricsReport> {
    spec.validate()?;
    let c = closed_form_concurrence(spec);
    let f = closed_form_fef(spec);
    let rho = two_ion_closed_form(spec);
    let numeric = metrics_report(&rho, oracle)?;
    if (numeric.concurrence - c).abs() > CLOSED_FORM_AGREEMENT || (numeric.fef - f).abs() > CLOSED_FORM_AGREEMENT {
        return Err(Error::validation(format!(
            "closed forms (C = {c}, F = {f}) disagree with spectral values (C = {}, F = {})",
            numeric.concurrence, numeric.fef
        )));
    }
    MetricsReport::from_values(c, f, numeric.fef_oracle)
}

/// Largest flight time keeping `F_max >= 1/2`, and the matching distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    /// Seconds; `f64::INFINITY` when `F_max` never drops below 1/2.
    pub t_max: f64,
    /// Metres, when a velocity was given.
    pub distance_max: Option<f64>,
}

impl BoundResult {
    pub fn is_unbounded(&self) -> bool {
        self.t_max.is_infinite()
    }
}

/// Flight-time bound for the closed form
/// `F(t) = (1 + e^{-gamma t} + 2 e^{-(gamma + gamma_p) t}) / 4`.
///
/// For `gamma_p = 0` the root is `ln 3 / gamma`; for `gamma_p = gamma` it is
/// `ln 2 / gamma`.
pub fn max_flight_time(gamma: f64, gamma_p: f64, velocity: Option<f64>) -> Result<BoundResult> {
    max_flight_time_for(CoherenceDecay::FullRate, gamma, gamma_p, velocity)
}

/// [`max_flight_time`] for either coherence-decay convention.
pub fn max_flight_time_for(
    coherence: CoherenceDecay,
    gamma: f64,
    gamma_p: f64,
    velocity: Option<f64>,
) -> Result<BoundResult> {
    let spec = ChannelSpec::new(gamma, gamma_p, 0.0).with_coherence(coherence);
    spec.validate()?;
    if let Some(v) = velocity {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(format!("velocity must be finite and nonnegative, got {v}")));
        }
    }
    // F(t) -> (1 + [gamma = 0]) / 4, so it only crosses 1/2 when gamma > 0.
    let t_max = if gamma == 0.0 {
        f64::INFINITY
    } else {
        let excess = |t: f64| closed_form_fef(&ChannelSpec { t_flight: t, ..spec }) - 0.5;
        let mut hi = 1.0 / (gamma + gamma_p);
        while excess(hi) > 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if excess(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(BoundResult {
        t_max,
        distance_max: velocity.map(|v| v * t_max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{SpaceLayout, StateVector, EXCITED, GROUND};
    use crate::states::bell_state;
    use std::f64::consts::LN_2;

    const LN_3: f64 = 1.098_612_288_668_109_8;

    fn phi_plus() -> DensityMatrix {
        let l = SpaceLayout::ion_pair();
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut v = vec![ZERO; 4];
        v[0] = s;
        v[3] = s;
        StateVector::new(l, v).unwrap().to_density()
    }

    fn maximally_mixed() -> DensityMatrix {
        DensityMatrix::new(SpaceLayout::ion_pair(), ComplexMatrix::identity(4).scale_real(0.25)).unwrap()
    }

    #[test]
    fn magic_basis_is_unitary() {
        let m = magic_basis();
        assert!((&m.dagger() * &m).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn concurrence_of_reference_states() {
        assert!((concurrence(&bell_state().to_density()).unwrap() - 1.0).abs() < 1e-12);
        let gg = StateVector::basis(SpaceLayout::ion_pair(), &[GROUND, GROUND]).unwrap();
        assert!(concurrence(&gg.to_density()).unwrap().abs() < 1e-12);
        assert!(concurrence(&maximally_mixed()).unwrap() == 0.0);
    }

    #[test]
    fn concurrence_at_amplitude_half_life() {
        let spec = ChannelSpec::new(1.0, 0.0, LN_2).with_coherence(CoherenceDecay::FullRate);
        let c = concurrence(&two_ion_closed_form(&spec)).unwrap();
        assert!((c - 0.5).abs() < 1e-9);
    }

    #[test]
    fn fef_reference_values() {
        assert!((fully_entangled_fraction(&bell_state().to_density()).unwrap() - 1.0).abs() < 1e-12);
        assert!((fully_entangled_fraction(&maximally_mixed()).unwrap() - 0.25).abs() < 1e-12);
        let ee = StateVector::basis(SpaceLayout::ion_pair(), &[EXCITED, EXCITED]).unwrap();
        assert!((fully_entangled_fraction(&ee.to_density()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oracle_reference_values() {
        assert!((fef_bruteforce_oracle(&phi_plus(), 1000, 1).unwrap() - 1.0).abs() < 1e-6);
        assert!((fef_bruteforce_oracle(&maximally_mixed(), 1000, 1).unwrap() - 0.25).abs() < 1e-6);
        assert!((fef_bruteforce_oracle(&bell_state().to_density(), 1000, 1).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn oracle_is_deterministic_and_checks_samples() {
        let rho = two_ion_closed_form(&ChannelSpec::new(1.0, 0.4, 0.9));
        let a = fef_bruteforce_oracle(&rho, 1500, 42).unwrap();
        let b = fef_bruteforce_oracle(&rho, 1500, 42).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(fef_bruteforce_oracle(&rho, 999, 42).is_err());
    }

    #[test]
    fn metrics_reject_wrong_shape() {
        let rho = crate::states::state_after_cavity_a().to_density();
        assert!(concurrence(&rho).is_err());
        assert!(fully_entangled_fraction(&rho).is_err());
    }

    #[test]
    fn teleportation_fidelity_values() {
        assert_eq!(teleportation_fidelity(1.0).unwrap(), 1.0);
        assert_eq!(teleportation_fidelity(0.5).unwrap(), CLASSICAL_FIDELITY);
        assert_eq!(teleportation_fidelity(0.25).unwrap(), 0.5);
        assert!(teleportation_fidelity(1.2).is_err());
        assert!(teleportation_fidelity(-0.1).is_err());
    }

    #[test]
    fn analytic_metrics_examples() {
        let r = analytic_channel_metrics(&ChannelSpec::new(3.0, 1.0, 0.0), None).unwrap();
        assert_eq!((r.concurrence, r.fef, r.teleport_fidelity), (1.0, 1.0, 1.0));

        let spec = ChannelSpec::new(200.0, 0.0, LN_3 / 200.0).with_coherence(CoherenceDecay::FullRate);
        let r = analytic_channel_metrics(&spec, Some(OracleConfig::default())).unwrap();
        assert!((r.fef - 0.5).abs() < 1e-12);
        assert!((r.teleport_fidelity - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.fef_oracle.unwrap() - 0.5).abs() < 1e-4);

        let spec = ChannelSpec::new(1.0, 1.0, LN_2).with_coherence(CoherenceDecay::FullRate);
        let r = analytic_channel_metrics(&spec, None).unwrap();
        assert!((r.fef - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bounds_match_closed_forms() {
        let b = max_flight_time(200.0, 0.0, Some(300.0)).unwrap();
        assert!((b.t_max / (LN_3 / 200.0) - 1.0).abs() < 1e-10);
        assert!((b.distance_max.unwrap() - 300.0 * LN_3 / 200.0).abs() < 1e-9);
        let b = max_flight_time(1.0, 1.0, None).unwrap();
        assert!((b.t_max / LN_2 - 1.0).abs() < 1e-10);
        assert_eq!(b.distance_max, None);
    }

    #[test]
    fn bounds_unbounded_without_decay() {
        assert!(max_flight_time(0.0, 0.0, Some(1.0)).unwrap().is_unbounded());
        assert!(max_flight_time(0.0, 5.0, None).unwrap().is_unbounded());
        assert!(max_flight_time(-1.0, 0.0, None).is_err());
        assert!(max_flight_time(1.0, 0.0, Some(f64::NAN)).is_err());
    }

    #[test]
    fn lindblad_bound_is_longer() {
        // with coherence decaying at gamma/2 and gamma_p = 0, F = (1 + x)^2/4 with
        // x = e^{-gamma t / 2}; F = 1/2 at x = sqrt2 - 1
        let b = max_flight_time_for(CoherenceDecay::Lindblad, 1.0, 0.0, None).unwrap();
        let expected = -2.0 * (2f64.sqrt() - 1.0).ln();
        assert!((b.t_max / expected - 1.0).abs() < 1e-12);
    }
}
