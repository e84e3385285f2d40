use num_complex::Complex64 as C64;

use super::ChannelSpec;
use crate::error::{Error, Result};
use crate::space::{DensityMatrix, EXCITED, FLYING, GROUND};
use crate::states::state_after_cavity_a;

/// Closed-form solution of the flight master equation applied to the
/// `target` qubit of `rho`; the other factors are spectators.
///
/// In the target's `(e, g)` blocks:
/// `rho_ee -> e^{-g t} rho_ee`, `rho_gg -> rho_gg + (1 - e^{-g t}) rho_ee`,
/// `rho_eg -> e^{-k t} rho_eg` with `k` the coherence rate of `spec`.
pub fn apply_flight_channel(rho: &DensityMatrix, spec: &ChannelSpec, target: &str) -> Result<DensityMatrix> {
    spec.validate()?;
    let layout = rho.layout();
    let pos = layout.position(target)?;
    if layout.factors()[pos].dim != 2 {
        return Err(Error::validation(format!("channel target `{target}` is not a qubit")));
    }
    let stride = layout.strides()[pos];
    let digit = |idx: usize| (idx / stride) % 2;

    let t = spec.t_flight;
    let decay = (-spec.gamma * t).exp();
    let coherence = (-spec.coherence_rate() * t).exp();
    let src = rho.matrix();
    let mut out = src.clone();
    let n = rho.dim();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = match (digit(i), digit(j)) {
                (EXCITED, EXCITED) => src[(i, j)] * decay,
                (GROUND, GROUND) => {
                    // same spectator indices with the target raised to |e>
                    let (ie, je) = (i - GROUND * stride, j - GROUND * stride);
                    src[(i, j)] + src[(ie, je)] * C64::new(1.0 - decay, 0.0)
                }
                _ => src[(i, j)] * coherence,
            };
        }
    }
    DensityMatrix::new_unchecked(layout.clone(), out)
}

/// The `(f, ion1, ion2)` state at the end of the flight, starting from the
/// state that leaves cavity A.
pub fn analytic_channel_output(spec: &ChannelSpec) -> Result<DensityMatrix> {
    apply_flight_channel(&state_after_cavity_a().to_density(), spec, FLYING)
}
