//! Simulator and security analyzer for continuous-variable quantum secure
//! direct communication with coherent and squeezed states.
//!
//! The crate is layered bottom-up:
//! - [`gaussian`]: Gaussian states, symplectic operations, homodyne detection
//! - [`dist`]: scalar input distributions and their moments
//! - [`channel`]: fiber loss plus the beam-splitter eavesdropper
//! - [`protocol`]: the two-way protocol state machines and transcripts
//! - [`security`]: analytic and Monte-Carlo mutual information and sweeps
//! - [`cli`]: command-line front end emitting CSV artifacts

pub mod channel;
pub mod cli;
pub mod dist;
pub mod gaussian;
pub mod protocol;
pub mod security;
