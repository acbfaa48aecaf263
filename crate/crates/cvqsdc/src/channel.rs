//! The quantum channel between Bob and Alice: fiber loss plus the passive
//! beam-splitter tap of the eavesdropper, in both directions of the two-way
//! protocol.
//!
//! The tap sits at Bob's end of the link: on the forward pass (Bob -> Alice)
//! the signal is tapped first and then suffers the fiber loss; on the backward
//! pass (Alice -> Bob) the loss comes first and the tap last. The delivered
//! state sees total transmissivity eta_E * eta_L either way; Eve's amplitude
//! fractions of the original pulse are sqrt(1 - eta_E) forward and
//! sqrt(eta_E) * eta_L * sqrt(1 - eta_E) backward.

use crate::gaussian::{GaussianError, GaussianState};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("transmissivity {0} outside [0, 1]")]
    InvalidTransmissivity(f64),
    #[error("excess noise {0} must be >= 0")]
    InvalidExcessNoise(f64),
    #[error("channel input must be a single-mode state, got {0} modes")]
    MultimodeInput(usize),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
}

/// One channel topology or two, per the paper's deployment options. The tap
/// model is identical in both: a single eta_E governs every pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    OneChannelWithCirculators,
    TwoChannels,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Fiber transmissivity per direction.
    pub eta_l: f64,
    /// Transmissivity of Eve's beam splitter (1 = fully transparent).
    pub eta_e: f64,
    pub topology: Topology,
    /// Extension point for excess channel noise, added to both quadrature
    /// variances on each pass. The paper's model is pure loss; default 0.
    pub excess_noise: f64,
}

impl ChannelParams {
    pub fn new(eta_l: f64, eta_e: f64, topology: Topology) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&eta_l) {
            return Err(ChannelError::InvalidTransmissivity(eta_l));
        }
        if !(0.0..=1.0).contains(&eta_e) {
            return Err(ChannelError::InvalidTransmissivity(eta_e));
        }
        Ok(ChannelParams {
            eta_l,
            eta_e,
            topology,
            excess_noise: 0.0,
        })
    }

    pub fn with_excess_noise(mut self, noise: f64) -> Result<Self, ChannelError> {
        if noise < 0.0 {
            return Err(ChannelError::InvalidExcessNoise(noise));
        }
        self.excess_noise = noise;
        Ok(self)
    }

    /// Honest channel: no tap, no loss.
    pub fn identity() -> Self {
        ChannelParams::new(1.0, 1.0, Topology::TwoChannels).unwrap()
    }
}

/// The state Eve skims off on one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct TapRecord {
    pub direction: Direction,
    pub tapped_state: GaussianState,
    pub pulse_index: usize,
}

fn tap(state: &GaussianState, eta_e: f64) -> Result<(GaussianState, GaussianState), ChannelError> {
    // signal in mode 0, fresh vacuum ancilla in mode 1; orient the splitter so
    // both output amplitudes are non-negative multiples of the input
    let joint = state
        .tensor(&GaussianState::vacuum(1))
        .beam_splitter(1, 0, eta_e)?;
    Ok((joint.partial_trace(&[0])?, joint.partial_trace(&[1])?))
}

fn add_excess_noise(state: &GaussianState, noise: f64) -> GaussianState {
    if noise == 0.0 {
        return state.clone();
    }
    let mut cov = state.cov().clone();
    for i in 0..cov.nrows() {
        cov[(i, i)] += noise;
    }
    GaussianState::from_parts(state.mean().clone(), cov)
}

/// Send a single-mode state through one pass of the channel. Returns the
/// delivered state and the tap Eve holds.
pub fn transmit(
    state: &GaussianState,
    params: &ChannelParams,
    direction: Direction,
    pulse_index: usize,
) -> Result<(GaussianState, TapRecord), ChannelError> {
    if state.num_modes() != 1 {
        return Err(ChannelError::MultimodeInput(state.num_modes()));
    }
    let (delivered, tapped) = match direction {
        Direction::Forward => {
            let (through, tapped) = tap(state, params.eta_e)?;
            (through.attenuate(0, params.eta_l)?, tapped)
        }
        Direction::Backward => {
            let lossy = state.attenuate(0, params.eta_l)?;
            tap(&lossy, params.eta_e)?
        }
    };
    Ok((
        add_excess_noise(&delivered, params.excess_noise),
        TapRecord {
            direction,
            tapped_state: tapped,
            pulse_index,
        },
    ))
}

/// Amplitude fractions of the original Bob pulse that Eve holds on each pass:
/// (sqrt(1 - eta_E), sqrt(eta_E) * sqrt(1 - eta_E)).
pub fn round_trip_eve_amplitude(eta_e: f64) -> (f64, f64) {
    let r = (1.0 - eta_e).sqrt();
    (r, eta_e.sqrt() * r)
}
