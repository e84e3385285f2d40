use serde::{Deserialize, Serialize};

use super::{
    analytic_channel_output, apply_flight_channel, default_step, evolve_unitary, integrate_master_equation,
    lindblad_superoperator, ChannelSpec,
};
use crate::error::Result;
use crate::model::{effective_hamiltonian, EffectiveParams};
use crate::space::{partial_trace, DensityMatrix, SpaceLayout, FLYING, ION1, ION2};
use crate::states::{bell_state, protocol_initial_state, state_after_cavity_a, two_ion_closed_form};

/// How the flight between the cavities is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    /// No decoherence during the flight.
    Ideal,
    /// Closed-form damping channel.
    AnalyticNoisy,
    /// RK4 integration of the flight master equation.
    NumericNoisy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub label: String,
    pub fidelity: f64,
}

#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub mode: RunMode,
    /// `(f, ion1, ion2)` after cavity A.
    pub state_after_a: DensityMatrix,
    /// `(f, ion1, ion2)` on arrival at cavity B.
    pub state_after_flight: DensityMatrix,
    /// `(f, ion1, ion2)` after cavity B.
    pub state_after_b: DensityMatrix,
    /// Flying-atom marginal after cavity B.
    pub flying_marginal: DensityMatrix,
    /// `(ion1, ion2)` with the flying atom traced out.
    pub final_two_ion_state: DensityMatrix,
    pub checkpoints: Vec<Checkpoint>,
}

impl ProtocolResult {
    pub fn checkpoint(&self, label: &str) -> Option<f64> {
        self.checkpoints.iter().find(|c| c.label == label).map(|c| c.fidelity)
    }

    /// Fidelity of the final two-ion state to `(|e g> + |g e>)/sqrt 2`.
    pub fn fidelity_to_bell(&self) -> f64 {
        self.checkpoint(CHECKPOINT_BELL).expect("always recorded")
    }
}

pub const CHECKPOINT_AFTER_A: &str = "after_cavity_a";
pub const CHECKPOINT_AFTER_FLIGHT: &str = "after_flight";
pub const CHECKPOINT_BELL: &str = "final_vs_bell";
pub const CHECKPOINT_CLOSED_FORM: &str = "final_vs_closed_form";

/// Runs the whole scheme: exchange in cavity A with ion 1, the flight, the
/// exchange in cavity B with ion 2, then traces out the flying atom.
///
/// The channel is ignored in [`RunMode::Ideal`]. The numeric mode uses
/// [`default_step`] for the RK4 integrator.
pub fn run_protocol(eff: &EffectiveParams, spec: &ChannelSpec, mode: RunMode) -> Result<ProtocolResult> {
    eff.validate()?;
    spec.validate()?;
    let layout = SpaceLayout::protocol();
    let h_a = effective_hamiltonian(eff.lambda1, (FLYING, ION1), &layout)?;
    let h_b = effective_hamiltonian(eff.lambda2, (FLYING, ION2), &layout)?;

    let start = protocol_initial_state().to_density();
    let after_a = evolve_unitary(&start, &h_a, eff.t_a)?;

    let after_flight = match mode {
        RunMode::Ideal => after_a.clone(),
        RunMode::AnalyticNoisy => apply_flight_channel(&after_a, spec, FLYING)?,
        RunMode::NumericNoisy => {
            let generator = lindblad_superoperator(spec, FLYING, &layout)?;
            let t = spec.t_flight;
            integrate_master_equation(&after_a, &generator, t, default_step(t))?
        }
    };

    let after_b = evolve_unitary(&after_flight, &h_b, eff.t_b)?;
    let flying_marginal = partial_trace(&after_b, &[FLYING])?;
    let final_state = partial_trace(&after_b, &[ION1, ION2])?;

    let (flight_reference, final_reference) = match mode {
        RunMode::Ideal => (
            state_after_cavity_a().to_density(),
            bell_state().to_density(),
        ),
        _ => (analytic_channel_output(spec)?, two_ion_closed_form(spec)),
    };
    let checkpoints = vec![
        Checkpoint {
            label: CHECKPOINT_AFTER_A.into(),
            fidelity: after_a.overlap(&state_after_cavity_a())?,
        },
        Checkpoint {
            label: CHECKPOINT_AFTER_FLIGHT.into(),
            fidelity: after_flight.fidelity(&flight_reference)?,
        },
        Checkpoint {
            label: CHECKPOINT_BELL.into(),
            fidelity: final_state.overlap(&bell_state())?,
        },
        Checkpoint {
            label: CHECKPOINT_CLOSED_FORM.into(),
            fidelity: final_state.fidelity(&final_reference)?,
        },
    ];

    Ok(ProtocolResult {
        mode,
        state_after_a: after_a,
        state_after_flight: after_flight,
        state_after_b: after_b,
        flying_marginal,
        final_two_ion_state: final_state,
        checkpoints,
    })
}
