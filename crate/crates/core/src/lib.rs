//! Entanglement distribution between two trapped ions by a flying atom.
//!
//! An excited atom passes two cavities, each holding one ion. In the first
//! cavity a dispersive exchange of area `pi/4` leaves atom and ion 1 in an
//! equal superposition; during the flight the atom decays and dephases; in
//! the second cavity an exchange of area `pi/2` hands the remaining excitation
//! to ion 2. With no flight damping the ions end in the Bell state
//! `(|e g> + |g e>)/sqrt 2` regardless of what the atom is found in.
//!
//! The crate provides
//!
//! * dense complex linear algebra on labelled tensor-product spaces
//!   ([`linalg`], [`space`], [`operators`]),
//! * the effective and full Hamiltonians and initial states ([`model`]),
//! * unitary and master-equation evolution, the protocol pipeline and a
//!   full-model validation of the effective coupling ([`dynamics`]),
//! * concurrence, fully entangled fraction, teleportation fidelity and the
//!   flight-time bound ([`metrics`]).
//!
//! ```
//! use ionlink::dynamics::{run_protocol, ChannelSpec, RunMode};
//! use ionlink::metrics::concurrence;
//! use ionlink::model::EffectiveParams;
//!
//! let result = run_protocol(&EffectiveParams::default(), &ChannelSpec::noiseless(), RunMode::Ideal).unwrap();
//! assert!((result.fidelity_to_bell() - 1.0).abs() < 1e-10);
//! assert!((concurrence(&result.final_two_ion_state).unwrap() - 1.0).abs() < 1e-10);
//! ```

// `!(x < limit)` is used on purpose: it is also true for NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod operators;
pub mod space;
pub mod states;
pub mod tolerances;

pub use error::{Error, Result};

// The book's chapters are compiled and run as doc tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/tensor-spaces.md")]
    mod tensor_spaces {}
    #[doc = include_str!("../../../book/src/protocol.md")]
    mod protocol {}
    #[doc = include_str!("../../../book/src/flight-channel.md")]
    mod flight_channel {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
