//! Closed-form reference states of the protocol.
//!
//! These are written down directly from their amplitudes, independently of
//! the propagators, so that the simulated pipeline can be checked against
//! them.

use num_complex::Complex64 as C64;

use crate::dynamics::ChannelSpec;
use crate::linalg::{ComplexMatrix, ZERO};
use crate::space::{DensityMatrix, SpaceLayout, StateVector, EXCITED, GROUND};

fn amps(layout: &SpaceLayout, terms: &[(&[usize], C64)]) -> Vec<C64> {
    let mut v = vec![ZERO; layout.total_dim()];
    for (digits, a) in terms {
        v[layout.index(digits).expect("static digits")] += a;
    }
    v
}

/// `(|e_1 g_2> + |g_1 e_2>)/sqrt 2` on `(ion1, ion2)`.
pub fn bell_state() -> StateVector {
    let l = SpaceLayout::ion_pair();
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let v = amps(&l, &[(&[EXCITED, GROUND], s), (&[GROUND, EXCITED], s)]);
    StateVector::new(l, v).expect("static state")
}

/// `|e_f, g_1, g_2>`: flying atom excited, both ions in the ground state.
pub fn protocol_initial_state() -> StateVector {
    StateVector::basis(SpaceLayout::protocol(), &[EXCITED, GROUND, GROUND]).expect("static state")
}

/// `(|e_f g_1> - i |g_f e_1>)/sqrt 2 (x) |g_2>`, the state leaving cavity A
/// after an exchange area of `pi/4`.
pub fn state_after_cavity_a() -> StateVector {
    let l = SpaceLayout::protocol();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = amps(
        &l,
        &[
            (&[EXCITED, GROUND, GROUND], C64::new(s, 0.0)),
            (&[GROUND, EXCITED, GROUND], C64::new(0.0, -s)),
        ],
    );
    StateVector::new(l, v).expect("static state")
}

/// `|g_f> (x) (|e_1 g_2> + |g_1 e_2>)/sqrt 2`.
pub fn ideal_final_state() -> StateVector {
    let l = SpaceLayout::protocol();
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let v = amps(
        &l,
        &[(&[GROUND, EXCITED, GROUND], s), (&[GROUND, GROUND, EXCITED], s)],
    );
    StateVector::new(l, v).expect("static state")
}

/// The `(f, ion1, ion2)` state after the flight, written out explicitly:
///
/// ```text
/// 1/2 [ e^{-g t} |e_f g_1><e_f g_1| + |g_f e_1><g_f e_1|
///       + (1 - e^{-g t}) |g_f g_1><g_f g_1|
///       - i c |g_f e_1><e_f g_1| + i c |e_f g_1><g_f e_1| ] (x) |g_2><g_2|
/// ```
///
/// with `c = exp(-k t)` and `k` the coherence decay rate of the channel.
pub fn flight_state_closed_form(spec: &ChannelSpec) -> DensityMatrix {
    let l = SpaceLayout::protocol();
    let decay = (-spec.gamma * spec.t_flight).exp();
    let coh = (-spec.coherence_rate() * spec.t_flight).exp();
    let eg = l.index(&[EXCITED, GROUND, GROUND]).unwrap();
    let ge = l.index(&[GROUND, EXCITED, GROUND]).unwrap();
    let gg = l.index(&[GROUND, GROUND, GROUND]).unwrap();
    let mut m = ComplexMatrix::zeros(8, 8);
    m[(eg, eg)] = C64::new(0.5 * decay, 0.0);
    m[(ge, ge)] = C64::new(0.5, 0.0);
    m[(gg, gg)] = C64::new(0.5 * (1.0 - decay), 0.0);
    m[(ge, eg)] = C64::new(0.0, -0.5 * coh);
    m[(eg, ge)] = C64::new(0.0, 0.5 * coh);
    DensityMatrix::new_unchecked(l, m).expect("static layout")
}

/// Two-ion X-state left after cavity B and tracing out the flying atom:
///
/// ```text
/// 1/2 [ |e_1 g_2><e_1 g_2| + e^{-g t} |g_1 e_2><g_1 e_2|
///       + (1 - e^{-g t}) |g_1 g_2><g_1 g_2|
///       + c (|e_1 g_2><g_1 e_2| + |g_1 e_2><e_1 g_2|) ]
/// ```
///
/// with `c = exp(-k t)`, `k` the channel's coherence decay rate.
pub fn two_ion_closed_form(spec: &ChannelSpec) -> DensityMatrix {
    let decay = (-spec.gamma * spec.t_flight).exp();
    let coh = (-spec.coherence_rate() * spec.t_flight).exp();
    two_ion_x_state(decay, coh)
}

/// The same family parametrized directly by the excited-population factor
/// `decay` and the coherence factor `coherence`, both in `[0, 1]`.
pub fn two_ion_x_state(decay: f64, coherence: f64) -> DensityMatrix {
    let l = SpaceLayout::ion_pair();
    let eg = l.index(&[EXCITED, GROUND]).unwrap();
    let ge = l.index(&[GROUND, EXCITED]).unwrap();
    let gg = l.index(&[GROUND, GROUND]).unwrap();
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(eg, eg)] = C64::new(0.5, 0.0);
    m[(ge, ge)] = C64::new(0.5 * decay, 0.0);
    m[(gg, gg)] = C64::new(0.5 * (1.0 - decay), 0.0);
    m[(eg, ge)] = C64::new(0.5 * coherence, 0.0);
    m[(ge, eg)] = C64::new(0.5 * coherence, 0.0);
    DensityMatrix::new_unchecked(l, m).expect("static layout")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::CoherenceDecay;

    #[test]
    fn reference_states_are_normalized() {
        for psi in [bell_state(), protocol_initial_state(), state_after_cavity_a(), ideal_final_state()] {
            assert!((psi.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_forms_are_valid_states() {
        for coherence in [CoherenceDecay::Lindblad, CoherenceDecay::FullRate] {
            for (g, gp, t) in [(0.0, 0.0, 0.0), (1.0, 0.5, 0.7), (3.0, 0.0, 2.0), (0.0, 2.0, 1.0)] {
                let spec = ChannelSpec { gamma: g, gamma_p: gp, t_flight: t, coherence };
                flight_state_closed_form(&spec).validate().unwrap();
                two_ion_closed_form(&spec).validate().unwrap();
            }
        }
    }

    #[test]
    fn zero_flight_time_gives_pure_references() {
        let spec = ChannelSpec::new(5.0, 3.0, 0.0);
        let flight = flight_state_closed_form(&spec);
        assert!(flight.max_abs_diff(&state_after_cavity_a().to_density()) < 1e-15);
        let ions = two_ion_closed_form(&spec);
        assert!(ions.max_abs_diff(&bell_state().to_density()) < 1e-15);
    }
}
