//! Executable two-way protocol state machines: pulse preparation,
//! control/decoy/message partitioning, attenuation encoding, eavesdropping
//! checks and message decoding.

use crate::channel::{transmit, ChannelError, ChannelParams, Direction};
use crate::dist::Dist;
use crate::gaussian::{db_to_z, GaussianError, GaussianState};
use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::f64::consts::SQRT_2;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("message value {0} outside (0, 1]")]
    InvalidMessage(f64),
    #[error("message list length {got} does not match message pulse count {want}")]
    MessageCount { got: usize, want: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Symmetric,
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    /// theta = 0 for every pulse.
    Locked,
    /// theta uniform on [0, 2 pi) per pulse.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub variant: Variant,
    pub n: usize,
    pub control_fraction: f64,
    pub decoy_fraction: f64,
    pub squeezing_db: f64,
    pub phase_mode: PhaseMode,
    /// Distribution of Bob's initial amplitudes |alpha_i|.
    pub x_dist: Dist,
    /// Distribution of Alice's message values m_A in (0, 1].
    pub message_dist: Dist,
    pub channel: ChannelParams,
    /// Per-direction transmissivity Alice and Bob believe the channel has.
    /// None means the fiber loss eta_L alone (no tap expected). Security
    /// sweeps set this to eta_E * eta_L so that Eve is mistaken for loss.
    pub declared_eta: Option<f64>,
    pub check_tolerance_sigma: f64,
    /// Transmissivity of the 99/1 squeezer coupler.
    pub coupler_eta: f64,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn new(variant: Variant, seed: u64) -> Self {
        ProtocolConfig {
            variant,
            n: 1000,
            control_fraction: 0.1,
            decoy_fraction: 0.1,
            squeezing_db: 0.0,
            phase_mode: PhaseMode::Locked,
            x_dist: Dist::uniform(1.0, 10.0).unwrap(),
            message_dist: Dist::uniform(0.1, 1.0).unwrap(),
            channel: ChannelParams::identity(),
            declared_eta: None,
            check_tolerance_sigma: 5.0,
            coupler_eta: 0.99,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        let bad = |msg: &str| Err(ProtocolError::InvalidConfig(msg.to_string()));
        if self.n < 10 {
            return bad("n must be >= 10");
        }
        if !(self.control_fraction > 0.0 && self.control_fraction < 1.0) {
            return bad("control_fraction must lie in (0, 1)");
        }
        if !(self.decoy_fraction > 0.0 && self.decoy_fraction < 1.0) {
            return bad("decoy_fraction must lie in (0, 1)");
        }
        if self.control_fraction + self.decoy_fraction >= 1.0 {
            return bad("control_fraction + decoy_fraction must be < 1");
        }
        if self.squeezing_db > 0.0 {
            return bad("squeezing_db must be <= 0");
        }
        if let Some(d) = self.declared_eta {
            if !(0.0..=1.0).contains(&d) {
                return bad("declared_eta must lie in [0, 1]");
            }
        }
        if !(0.0..=1.0).contains(&self.coupler_eta) {
            return bad("coupler_eta must lie in [0, 1]");
        }
        if self.check_tolerance_sigma <= 0.0 {
            return bad("check_tolerance_sigma must be positive");
        }
        let (lo, _) = self.message_dist.support();
        if lo <= 0.0 {
            return bad("message distribution support must be within (0, 1]");
        }
        Ok(())
    }

    /// Per-direction transmissivity the legitimate parties assume.
    pub fn declared_eta(&self) -> f64 {
        self.declared_eta.unwrap_or(self.channel.eta_l)
    }

    /// Amplitude factor of the squeezer coupler (0.1 for the 99/1 coupler).
    pub fn coupler_amplitude(&self) -> f64 {
        (1.0 - self.coupler_eta).sqrt()
    }

    pub fn z(&self) -> Result<f64, ProtocolError> {
        Ok(db_to_z(self.squeezing_db)?)
    }

    fn control_count(&self) -> usize {
        (self.control_fraction * self.n as f64).ceil() as usize
    }

    fn decoy_count(&self) -> usize {
        (self.decoy_fraction * self.n as f64).ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseLabel {
    Control,
    Decoy,
    Message,
}

impl PulseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PulseLabel::Control => "control",
            PulseLabel::Decoy => "decoy",
            PulseLabel::Message => "message",
        }
    }
}

/// Everything recorded about one pulse over a full run.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseRecord {
    pub index: usize,
    pub label: PulseLabel,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub theta: f64,
    /// Encoded attenuation, present iff label == Message.
    pub m_true: Option<f64>,
    pub alice_meas: Option<f64>,
    pub bob_meas: Option<f64>,
    pub eve_fwd_meas: Option<f64>,
    pub eve_bwd_meas: Option<f64>,
}

impl PulseRecord {
    /// Magnitude of the initial coherent amplitude.
    pub fn alpha_abs(&self) -> f64 {
        self.alpha_re.hypot(self.alpha_im)
    }

    /// Initial quadrature value along the pulse direction: sqrt(2) |alpha|.
    pub fn quadrature(&self) -> f64 {
        SQRT_2 * self.alpha_abs()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Aborted(String),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub config: ProtocolConfig,
    pub pulses: Vec<PulseRecord>,
    pub verdict: Verdict,
    /// (pulse index, Bob's attenuation estimate), message pulses only;
    /// empty unless accepted.
    pub decoded: Vec<(usize, f64)>,
}

/// A pulse in flight: its current quantum state plus the running record.
#[derive(Debug, Clone)]
pub struct Pulse {
    pub state: GaussianState,
    pub record: PulseRecord,
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "NA".to_string(),
    }
}

impl Transcript {
    /// Line-oriented text form: config header, one line per pulse, verdict.
    /// Byte-identical for identical configs (including seed).
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let variant = match c.variant {
            Variant::Symmetric => "symmetric",
            Variant::Asymmetric => "asymmetric",
        };
        let phase = match c.phase_mode {
            PhaseMode::Locked => "locked",
            PhaseMode::Random => "random",
        };
        let dist = |d: &Dist| match *d {
            Dist::Constant(v) => format!("constant:{v}"),
            Dist::Uniform { lo, hi } => format!("uniform:{lo}:{hi}"),
        };
        writeln!(out, "variant={variant}").unwrap();
        writeln!(out, "n={}", c.n).unwrap();
        writeln!(out, "control_fraction={}", c.control_fraction).unwrap();
        writeln!(out, "decoy_fraction={}", c.decoy_fraction).unwrap();
        writeln!(out, "squeezing_db={}", c.squeezing_db).unwrap();
        writeln!(out, "phase_mode={phase}").unwrap();
        writeln!(out, "x_dist={}", dist(&c.x_dist)).unwrap();
        writeln!(out, "message_dist={}", dist(&c.message_dist)).unwrap();
        writeln!(out, "channel.eta_L={}", c.channel.eta_l).unwrap();
        writeln!(out, "channel.eta_E={}", c.channel.eta_e).unwrap();
        writeln!(out, "channel.excess_noise={}", c.channel.excess_noise).unwrap();
        writeln!(
            out,
            "declared_eta={}",
            fmt_opt(c.declared_eta)
        )
        .unwrap();
        writeln!(out, "check_tolerance_sigma={}", c.check_tolerance_sigma).unwrap();
        writeln!(out, "coupler_eta={}", c.coupler_eta).unwrap();
        writeln!(out, "seed={}", c.seed).unwrap();
        for p in &self.pulses {
            writeln!(
                out,
                "pulse {} {} {} {} {} {} {} {} {} {}",
                p.index,
                p.label.as_str(),
                p.alpha_re,
                p.alpha_im,
                p.theta,
                fmt_opt(p.m_true),
                fmt_opt(p.alice_meas),
                fmt_opt(p.bob_meas),
                fmt_opt(p.eve_fwd_meas),
                fmt_opt(p.eve_bwd_meas),
            )
            .unwrap();
        }
        match &self.verdict {
            Verdict::Accepted => writeln!(out, "verdict=accepted").unwrap(),
            Verdict::Aborted(reason) => writeln!(out, "verdict=aborted({reason})").unwrap(),
        }
        out
    }

    /// Mean squared decode error over message pulses; None unless accepted.
    pub fn decode_mse(&self) -> Option<f64> {
        if !self.verdict.is_accepted() || self.decoded.is_empty() {
            return None;
        }
        let mut sum = 0.0;
        for &(idx, m_hat) in &self.decoded {
            let m = self.pulses[idx].m_true.expect("decoded pulse has m_true");
            sum += (m_hat - m) * (m_hat - m);
        }
        Some(sum / self.decoded.len() as f64)
    }
}

/// Step (1): Bob prepares n pulses. Symmetric variant: squeezed coherent
/// states realized by coupling each coherent pulse into a squeezed vacuum,
/// squeezing oriented along the pulse direction theta. Asymmetric variant:
/// plain coherent states.
pub fn bob_prepare<R: Rng>(
    config: &ProtocolConfig,
    rng: &mut R,
) -> Result<Vec<Pulse>, ProtocolError> {
    let z = config.z()?;
    let mut pulses = Vec::with_capacity(config.n);
    for index in 0..config.n {
        let amp = config.x_dist.sample(rng);
        let theta = match config.phase_mode {
            PhaseMode::Locked => 0.0,
            PhaseMode::Random => rng.gen_range(0.0..std::f64::consts::TAU),
        };
        let alpha_re = amp * theta.cos();
        let alpha_im = amp * theta.sin();
        let mut state = GaussianState::coherent(alpha_re, alpha_im);
        if config.variant == Variant::Symmetric {
            state = state.mix_with_squeezed_vacuum(z, config.coupler_eta, theta)?;
        }
        pulses.push(Pulse {
            state,
            record: PulseRecord {
                index,
                // provisional; controls/decoys are assigned later
                label: PulseLabel::Message,
                alpha_re,
                alpha_im,
                theta,
                m_true: None,
                alice_meas: None,
                bob_meas: None,
                eve_fwd_meas: None,
                eve_bwd_meas: None,
            },
        });
    }
    Ok(pulses)
}

/// Expected homodyne mean of pulse `p` at Alice for a lossless channel.
fn alice_full_amplitude(config: &ProtocolConfig, p: &PulseRecord) -> f64 {
    let prep = match config.variant {
        Variant::Symmetric => config.coupler_amplitude(),
        Variant::Asymmetric => 1.0,
    };
    prep * p.quadrature()
}

/// Expected homodyne mean of a decoy at Bob for the declared channel.
fn bob_expected_base(config: &ProtocolConfig, p: &PulseRecord) -> f64 {
    config.coupler_amplitude() * config.declared_eta() * p.quadrature()
}

/// Bob's model of the returned-pulse homodyne variance under the declared
/// channel, computed through the Gaussian engine.
fn predicted_return_variance(config: &ProtocolConfig) -> Result<f64, ProtocolError> {
    let z = config.z()?;
    let d = config.declared_eta();
    let mut model = GaussianState::vacuum(1);
    if config.variant == Variant::Symmetric {
        model = model.mix_with_squeezed_vacuum(z, config.coupler_eta, 0.0)?;
    }
    model = model.attenuate(0, d)?;
    if config.variant == Variant::Asymmetric {
        model = model.mix_with_squeezed_vacuum(z, config.coupler_eta, 0.0)?;
    }
    model = model.attenuate(0, d)?;
    Ok(model.homodyne_stats(0, 0.0)?.variance)
}

/// Through-origin regression of measurements against expected amplitudes.
/// Returns (slope, standard error of the slope, residual variance).
fn amplitude_fit(pairs: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let sum_ff: f64 = pairs.iter().map(|(f, _)| f * f).sum();
    if sum_ff < 1e-12 || pairs.len() < 2 {
        return None;
    }
    let sum_fy: f64 = pairs.iter().map(|(f, y)| f * y).sum();
    let slope = sum_fy / sum_ff;
    let resid: f64 = pairs
        .iter()
        .map(|(f, y)| (y - slope * f) * (y - slope * f))
        .sum::<f64>()
        / (pairs.len() - 1) as f64;
    Some((slope, (resid / sum_ff).sqrt(), resid))
}

/// Steps (3)-(4): Alice picks the control subset, measures it, and checks the
/// empirical channel transmissivity against the declared value.
pub fn alice_select_and_check<R: Rng>(
    pulses: &mut [Pulse],
    config: &ProtocolConfig,
    rng: &mut R,
) -> Result<Verdict, ProtocolError> {
    let k = config.control_count().min(pulses.len());
    let mut chosen = sample(rng, pulses.len(), k).into_vec();
    chosen.sort_unstable();
    let mut pairs = Vec::with_capacity(k);
    for &i in &chosen {
        let pulse = &mut pulses[i];
        pulse.record.label = PulseLabel::Control;
        let meas = pulse
            .state
            .homodyne_sample(0, pulse.record.theta, rng)?;
        pulse.record.alice_meas = Some(meas);
        pairs.push((alice_full_amplitude(config, &pulse.record), meas));
    }
    let declared_amp = config.declared_eta().sqrt();
    if let Some((slope, se, _)) = amplitude_fit(&pairs) {
        let dev = (slope - declared_amp).abs();
        if dev > config.check_tolerance_sigma * se {
            return Ok(Verdict::Aborted(format!(
                "control check: amplitude ratio {slope:.6} vs declared {declared_amp:.6}, {:.1} sigma",
                dev / se
            )));
        }
    }
    Ok(Verdict::Accepted)
}

/// Step (5): Alice partitions the surviving pulses into decoys and messages
/// and encodes the message by attenuation. In the asymmetric variant both
/// message and decoy pulses then pass through her squeezer coupler so that
/// all returned pulses share the same statistics.
pub fn alice_encode(
    pulses: &mut [Pulse],
    messages: &[f64],
    config: &ProtocolConfig,
) -> Result<(), ProtocolError> {
    let z = config.z()?;
    let want = pulses
        .iter()
        .filter(|p| p.record.label == PulseLabel::Message)
        .count();
    if messages.len() != want {
        return Err(ProtocolError::MessageCount {
            got: messages.len(),
            want,
        });
    }
    let mut mi = 0;
    for pulse in pulses.iter_mut() {
        match pulse.record.label {
            PulseLabel::Control => continue,
            PulseLabel::Decoy => {}
            PulseLabel::Message => {
                let m = messages[mi];
                mi += 1;
                if !(m > 0.0 && m <= 1.0) {
                    return Err(ProtocolError::InvalidMessage(m));
                }
                pulse.record.m_true = Some(m);
                pulse.state = pulse.state.attenuate(0, m)?;
            }
        }
        if config.variant == Variant::Asymmetric {
            pulse.state = pulse.state.mix_with_squeezed_vacuum(z, config.coupler_eta, 0.0)?;
        }
    }
    Ok(())
}

/// Mark decoy pulses among the non-control ones.
fn assign_decoys<R: Rng>(pulses: &mut [Pulse], config: &ProtocolConfig, rng: &mut R) {
    let remaining: Vec<usize> = pulses
        .iter()
        .filter(|p| p.record.label != PulseLabel::Control)
        .map(|p| p.record.index)
        .collect();
    let k = config.decoy_count().min(remaining.len().saturating_sub(1));
    for idx in sample(rng, remaining.len(), k).into_iter() {
        pulses[remaining[idx]].record.label = PulseLabel::Decoy;
    }
}

/// Steps (7)-(8): Bob measures the returned pulses along the squeezed
/// quadrature, verifies decoy means and variances against the declared
/// channel, and decodes the message attenuations.
pub fn bob_decode<R: Rng>(
    pulses: &mut [Pulse],
    config: &ProtocolConfig,
    rng: &mut R,
) -> Result<(Verdict, Vec<(usize, f64)>), ProtocolError> {
    let v_pred = predicted_return_variance(config)?;
    let mut decoy_pairs = Vec::new();
    for pulse in pulses.iter_mut() {
        if pulse.record.label == PulseLabel::Control {
            continue;
        }
        let meas = pulse
            .state
            .homodyne_sample(0, pulse.record.theta, rng)?;
        pulse.record.bob_meas = Some(meas);
        if pulse.record.label == PulseLabel::Decoy {
            decoy_pairs.push((bob_expected_base(config, &pulse.record), meas));
        }
    }

    // decoy mean check
    let fit = amplitude_fit(&decoy_pairs);
    if let Some((slope, se, _)) = fit {
        let dev = (slope - 1.0).abs();
        if dev > config.check_tolerance_sigma * se {
            return Ok((
                Verdict::Aborted(format!(
                    "decoy mean check: amplitude ratio {slope:.6} vs 1, {:.1} sigma",
                    dev / se
                )),
                Vec::new(),
            ));
        }
    }

    // decoy variance check against the squeezing Bob expects
    if decoy_pairs.len() >= 3 {
        let slope = fit.map(|(s, _, _)| s).unwrap_or(0.0);
        let n = decoy_pairs.len() as f64;
        let s2 = decoy_pairs
            .iter()
            .map(|(f, y)| (y - slope * f) * (y - slope * f))
            .sum::<f64>()
            / (n - 1.0);
        let se = v_pred * (2.0 / (n - 1.0)).sqrt();
        let dev = (s2 - v_pred).abs();
        if dev > config.check_tolerance_sigma * se {
            return Ok((
                Verdict::Aborted(format!(
                    "decoy variance check: {s2:.6} vs predicted {v_pred:.6}, {:.1} sigma",
                    dev / se
                )),
                Vec::new(),
            ));
        }
    }

    // decode: noise-corrected squared amplitude ratio
    let mut decoded = Vec::new();
    for pulse in pulses.iter() {
        if pulse.record.label != PulseLabel::Message {
            continue;
        }
        let base = bob_expected_base(config, &pulse.record);
        let y = pulse.record.bob_meas.expect("message pulse was measured");
        let m_hat = if base * base < 1e-12 {
            0.0
        } else {
            (y * y - v_pred) / (base * base)
        };
        decoded.push((pulse.record.index, m_hat));
    }
    Ok((Verdict::Accepted, decoded))
}

/// Full choreography of one run: prepare, forward transmit with Eve's tap,
/// control check, encode, backward transmit with Eve's tap, decode. Eve's
/// homodyne outcomes on both taps are recorded for security analysis.
pub fn run_protocol(config: &ProtocolConfig) -> Result<Transcript, ProtocolError> {
    config.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut pulses = bob_prepare(config, &mut rng)?;

    // forward pass; Eve measures every tap at phi = 0 (worst case for the
    // legitimate parties)
    for pulse in pulses.iter_mut() {
        let (delivered, tap) = transmit(
            &pulse.state,
            &config.channel,
            Direction::Forward,
            pulse.record.index,
        )?;
        pulse.state = delivered;
        pulse.record.eve_fwd_meas = Some(tap.tapped_state.homodyne_sample(0, 0.0, &mut rng)?);
    }

    let verdict = alice_select_and_check(&mut pulses, config, &mut rng)?;
    if let Verdict::Aborted(_) = verdict {
        return Ok(Transcript {
            config: config.clone(),
            pulses: pulses.into_iter().map(|p| p.record).collect(),
            verdict,
            decoded: Vec::new(),
        });
    }

    assign_decoys(&mut pulses, config, &mut rng);
    let message_count = pulses
        .iter()
        .filter(|p| p.record.label == PulseLabel::Message)
        .count();
    let messages: Vec<f64> = (0..message_count)
        .map(|_| config.message_dist.sample(&mut rng))
        .collect();
    alice_encode(&mut pulses, &messages, config)?;

    // backward pass (control pulses stay with Alice)
    for pulse in pulses.iter_mut() {
        if pulse.record.label == PulseLabel::Control {
            continue;
        }
        let (delivered, tap) = transmit(
            &pulse.state,
            &config.channel,
            Direction::Backward,
            pulse.record.index,
        )?;
        pulse.state = delivered;
        pulse.record.eve_bwd_meas = Some(tap.tapped_state.homodyne_sample(0, 0.0, &mut rng)?);
    }

    let (verdict, decoded) = bob_decode(&mut pulses, config, &mut rng)?;
    Ok(Transcript {
        config: config.clone(),
        pulses: pulses.into_iter().map(|p| p.record).collect(),
        verdict,
        decoded,
    })
}

/// Eve's best passive per-pulse estimate of the message: the ratio of her
/// backward to forward homodyne amplitudes, squared, normalized by her known
/// amplitude fractions. Returns (pulse index, estimate) for message pulses.
pub fn eve_estimate(transcript: &Transcript) -> Vec<(usize, f64)> {
    let eta_e = transcript.config.channel.eta_e;
    let eta_l = transcript.config.channel.eta_l;
    let (fwd_frac, bwd_frac) = crate::channel::round_trip_eve_amplitude(eta_e);
    let coupler = transcript.config.coupler_amplitude();
    let mut out = Vec::new();
    for p in &transcript.pulses {
        if p.label != PulseLabel::Message {
            continue;
        }
        let (Some(yf), Some(yb)) = (p.eve_fwd_meas, p.eve_bwd_meas) else {
            continue;
        };
        let denom = coupler * eta_l * bwd_frac * yf;
        let est = if fwd_frac < 1e-9 || bwd_frac < 1e-9 || denom.abs() < 1e-9 {
            0.0
        } else {
            let ratio = yb * fwd_frac / denom;
            ratio * ratio
        };
        out.push((p.index, est));
    }
    out
}
