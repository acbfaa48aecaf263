//! Analytic and Monte-Carlo security evaluation: the closed-form mutual
//! informations for the locked-phase variants, secrecy capacity, classical
//! information-theory utilities, and the regression-based estimator that
//! extracts mutual information from simulated transcripts.

use crate::channel::{ChannelParams, Topology};
use crate::dist::{variance_of_product, Dist};
use crate::protocol::{
    run_protocol, PhaseMode, ProtocolConfig, PulseLabel, Transcript, Variant, Verdict,
};
use rayon::prelude::*;
use std::fmt;
use thiserror::Error;

/// Cap on reported mutual information for degenerate zero-error cases.
pub const INFO_CAP_BITS: f64 = 30.0;

#[derive(Debug, Error, PartialEq)]
pub enum SecurityError {
    #[error("invalid analytic params: {0}")]
    InvalidParams(String),
    #[error("noise must be positive, got {0}")]
    NonPositiveNoise(f64),
    #[error("signal must be non-negative, got {0}")]
    NegativeSignal(f64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("symmetric-case denominator is not positive ({0})")]
    DegenerateDenominator(f64),
    #[error("no message pulses with measurements for the requested party")]
    NoMessagePulses,
    #[error("no accepted transcripts")]
    NoAcceptedTranscripts,
    #[error("grid must be non-empty, within [0, 1], and strictly increasing")]
    BadGrid,
    #[error("random-phase curves are only available via Monte-Carlo")]
    AnalyticUnsupported,
    #[error("protocol error at eta_E={eta_e}: {message}")]
    ProtocolFailure { eta_e: f64, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Bob,
    Eve,
}

/// How an S/N ratio becomes bits. `ShannonHartley` is log2(1 + S/N) and is
/// the default; `RawLog` is the literal log2(S/N), which diverges to -inf as
/// the signal vanishes and is kept for curve comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfoConvention {
    ShannonHartley,
    RawLog,
}

impl InfoConvention {
    fn bits(&self, snr: f64) -> f64 {
        match self {
            InfoConvention::ShannonHartley => (1.0 + snr).log2(),
            InfoConvention::RawLog => snr.log2(),
        }
    }
}

/// Inputs to the closed-form mutual-information expressions.
///
/// `var_x_sqrt_m` is the variance of the product of the initial quadrature
/// value and the square root of the message, in quadrature units: with the
/// amplitude distribution giving |alpha| the quadrature value is
/// sqrt(2)|alpha|, so the variance carries a factor 2 relative to the plain
/// amplitude-domain product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    pub eta_e: f64,
    pub eta_l: f64,
    pub z: f64,
    pub var_x_sqrt_m: f64,
    pub var_m: f64,
}

impl AnalyticParams {
    pub fn new(
        eta_e: f64,
        eta_l: f64,
        z: f64,
        var_x_sqrt_m: f64,
        var_m: f64,
    ) -> Result<Self, SecurityError> {
        let bad = |msg: String| Err(SecurityError::InvalidParams(msg));
        if !(0.0..=1.0).contains(&eta_e) {
            return bad(format!("eta_E {eta_e} outside [0, 1]"));
        }
        if !(0.0..=1.0).contains(&eta_l) {
            return bad(format!("eta_L {eta_l} outside [0, 1]"));
        }
        if !(z > 0.0 && z <= 1.0) {
            return bad(format!("z {z} outside (0, 1]"));
        }
        if var_x_sqrt_m < 0.0 || var_m < 0.0 {
            return bad("variances must be >= 0".to_string());
        }
        Ok(AnalyticParams {
            eta_e,
            eta_l,
            z,
            var_x_sqrt_m,
            var_m,
        })
    }

    /// Build params from the configured input distributions, with `x_dist`
    /// describing |alpha| so the quadrature variance is doubled.
    pub fn from_distributions(
        eta_e: f64,
        eta_l: f64,
        z: f64,
        x_dist: &Dist,
        m_dist: &Dist,
    ) -> Result<Self, SecurityError> {
        AnalyticParams::new(
            eta_e,
            eta_l,
            z,
            2.0 * variance_of_product(x_dist, m_dist),
            m_dist.variance(),
        )
    }
}

/// Mutual information in bits for the variant where Alice applies the
/// squeezing, phases locked.
pub fn mutual_info_asym(p: &AnalyticParams, party: Party, convention: InfoConvention) -> f64 {
    let (e, l, v) = (p.eta_e, p.eta_l, p.var_x_sqrt_m);
    let anti = 1.0 - p.z * p.z;
    let (signal, noise) = match party {
        Party::Bob => (
            0.01 * e * e * l * l * v,
            0.5 * (1.0 - 0.99 * e * l * anti),
        ),
        Party::Eve => (
            0.01 * e * (1.0 - e) * l * l * v,
            0.5 * (1.0 - 0.99 * (1.0 - e) * l * anti),
        ),
    };
    convention.bits(signal / noise)
}

/// Mutual information in bits for the variant where Bob applies the
/// squeezing, phases locked. The leakage numerator uses the same
/// eta_E(1 - eta_E) tap factor as the asymmetric case so that it vanishes at
/// both endpoints.
pub fn mutual_info_sym(
    p: &AnalyticParams,
    party: Party,
    convention: InfoConvention,
) -> Result<f64, SecurityError> {
    let (e, l, v) = (p.eta_e, p.eta_l, p.var_x_sqrt_m);
    let anti = 1.0 - p.z * p.z;
    let tap = match party {
        Party::Bob => e * e,
        Party::Eve => e * (1.0 - e),
    };
    let signal = 0.01 * tap * l * l * v;
    let noise = 0.5 * (1.0 - 0.99 * tap * l * l * p.var_m * anti);
    if noise <= 0.0 {
        return Err(SecurityError::DegenerateDenominator(noise));
    }
    Ok(convention.bits(signal / noise))
}

/// Wyner wiretap secrecy capacity at the configured input distribution.
/// Signed; consumers may clamp for display.
pub fn secrecy_capacity(i_ab: f64, i_ae: f64) -> f64 {
    i_ab - i_ae
}

pub fn shannon_hartley(signal: f64, noise: f64) -> Result<f64, SecurityError> {
    if noise <= 0.0 {
        return Err(SecurityError::NonPositiveNoise(noise));
    }
    if signal < 0.0 {
        return Err(SecurityError::NegativeSignal(signal));
    }
    Ok((1.0 + signal / noise).log2())
}

fn validate_probs(total: f64, any_negative: bool) -> Result<(), SecurityError> {
    if any_negative {
        return Err(SecurityError::InvalidDistribution(
            "negative probability".to_string(),
        ));
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(SecurityError::InvalidDistribution(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(())
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy in bits; 0 log 0 = 0.
pub fn discrete_entropy(probs: &[f64]) -> Result<f64, SecurityError> {
    validate_probs(
        probs.iter().sum(),
        probs.iter().any(|&p| p < 0.0),
    )?;
    Ok(probs.iter().map(|&p| plogp(p)).sum())
}

fn joint_marginals(joint: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>, f64), SecurityError> {
    if joint.is_empty() || joint[0].is_empty() {
        return Err(SecurityError::InvalidDistribution(
            "empty joint table".to_string(),
        ));
    }
    let cols = joint[0].len();
    if joint.iter().any(|row| row.len() != cols) {
        return Err(SecurityError::InvalidDistribution(
            "ragged joint table".to_string(),
        ));
    }
    let mut px = vec![0.0; joint.len()];
    let mut py = vec![0.0; cols];
    let mut any_negative = false;
    let mut h_joint = 0.0;
    for (i, row) in joint.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            any_negative |= p < 0.0;
            px[i] += p;
            py[j] += p;
            h_joint += plogp(p);
        }
    }
    validate_probs(px.iter().sum(), any_negative)?;
    Ok((px, py, h_joint))
}

/// H(Y|X) for a joint table p(x_i, y_j) = joint[i][j].
pub fn conditional_entropy(joint: &[Vec<f64>]) -> Result<f64, SecurityError> {
    let (px, _, h_joint) = joint_marginals(joint)?;
    let h_x: f64 = px.iter().map(|&p| plogp(p)).sum();
    Ok(h_joint - h_x)
}

/// I(X;Y) = H(X) + H(Y) - H(X,Y) for a joint table.
pub fn discrete_mutual_info(joint: &[Vec<f64>]) -> Result<f64, SecurityError> {
    let (px, py, h_joint) = joint_marginals(joint)?;
    let h_x: f64 = px.iter().map(|&p| plogp(p)).sum();
    let h_y: f64 = py.iter().map(|&p| plogp(p)).sum();
    Ok(h_x + h_y - h_joint)
}

/// Mutual information extracted from simulated message pulses.
///
/// The party's raw homodyne reading is regressed (through the origin) on the
/// true transmitted amplitude sqrt(2)|alpha|sqrt(m). After the least-squares
/// rescaling the residual variance is the quadratic error of the reading, and
/// S/N is the ratio of rescaled signal variance to that error, so an
/// uninformative reading gives S/N -> 0 and perfect readings are capped.
pub fn monte_carlo_mutual_info(
    transcripts: &[Transcript],
    party: Party,
) -> Result<f64, SecurityError> {
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut any_accepted = false;
    for t in transcripts {
        if !t.verdict.is_accepted() {
            continue;
        }
        any_accepted = true;
        for p in &t.pulses {
            if p.label != PulseLabel::Message {
                continue;
            }
            let reading = match party {
                Party::Bob => p.bob_meas,
                Party::Eve => p.eve_bwd_meas,
            };
            let (Some(m), Some(y)) = (p.m_true, reading) else {
                continue;
            };
            pairs.push((p.quadrature() * m.sqrt(), y));
        }
    }
    if !any_accepted {
        return Err(SecurityError::NoAcceptedTranscripts);
    }
    if pairs.len() < 2 {
        return Err(SecurityError::NoMessagePulses);
    }

    let n = pairs.len() as f64;
    let sum_tt: f64 = pairs.iter().map(|(t, _)| t * t).sum();
    if sum_tt <= 0.0 {
        return Ok(0.0);
    }
    let sum_ty: f64 = pairs.iter().map(|(t, y)| t * y).sum();
    let slope = sum_ty / sum_tt;
    let mse = pairs
        .iter()
        .map(|(t, y)| (y - slope * t) * (y - slope * t))
        .sum::<f64>()
        / (n - 1.0);
    let mean_t: f64 = pairs.iter().map(|(t, _)| t).sum::<f64>() / n;
    let var_t = pairs
        .iter()
        .map(|(t, _)| (t - mean_t) * (t - mean_t))
        .sum::<f64>()
        / (n - 1.0);
    if mse <= 0.0 {
        return Ok(INFO_CAP_BITS);
    }
    let snr = slope * slope * var_t / mse;
    Ok((1.0 + snr).log2().min(INFO_CAP_BITS))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariant {
    Asymmetric,
    Symmetric,
    SymmetricRandomPhase,
}

impl SweepVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariant::Asymmetric => "asymmetric",
            SweepVariant::Symmetric => "symmetric",
            SweepVariant::SymmetricRandomPhase => "symmetric_random_phase",
        }
    }

    fn protocol_variant(&self) -> (Variant, PhaseMode) {
        match self {
            SweepVariant::Asymmetric => (Variant::Asymmetric, PhaseMode::Locked),
            SweepVariant::Symmetric => (Variant::Symmetric, PhaseMode::Locked),
            SweepVariant::SymmetricRandomPhase => (Variant::Symmetric, PhaseMode::Random),
        }
    }
}

impl fmt::Display for SweepVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    MonteCarlo,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Shared sweep configuration; per-point eta_E comes from the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepParams {
    pub eta_l: f64,
    pub squeezing_db: f64,
    pub x_dist: Dist,
    pub message_dist: Dist,
    /// Pulses per Monte-Carlo grid point.
    pub pulses: usize,
    pub control_fraction: f64,
    pub decoy_fraction: f64,
    pub check_tolerance_sigma: f64,
    pub coupler_eta: f64,
    pub convention: InfoConvention,
    pub seed: u64,
}

impl SweepParams {
    pub fn new(seed: u64) -> Self {
        SweepParams {
            eta_l: 1.0,
            squeezing_db: 0.0,
            x_dist: Dist::uniform(1.0, 10.0).unwrap(),
            message_dist: Dist::uniform(0.1, 1.0).unwrap(),
            pulses: 100_000,
            control_fraction: 0.1,
            decoy_fraction: 0.1,
            check_tolerance_sigma: 5.0,
            coupler_eta: 0.99,
            convention: InfoConvention::ShannonHartley,
            seed,
        }
    }

    fn z(&self) -> Result<f64, SecurityError> {
        crate::gaussian::db_to_z(self.squeezing_db)
            .map_err(|e| SecurityError::InvalidParams(e.to_string()))
    }

    fn analytic_params(&self, eta_e: f64) -> Result<AnalyticParams, SecurityError> {
        AnalyticParams::from_distributions(
            eta_e,
            self.eta_l,
            self.z()?,
            &self.x_dist,
            &self.message_dist,
        )
    }

    fn protocol_config(&self, variant: SweepVariant, eta_e: f64, seed: u64) -> ProtocolConfig {
        let (pv, phase) = variant.protocol_variant();
        let mut config = ProtocolConfig::new(pv, seed);
        config.n = self.pulses;
        config.control_fraction = self.control_fraction;
        config.decoy_fraction = self.decoy_fraction;
        config.squeezing_db = self.squeezing_db;
        config.phase_mode = phase;
        config.x_dist = self.x_dist;
        config.message_dist = self.message_dist;
        config.channel = ChannelParams::new(self.eta_l, eta_e, Topology::TwoChannels)
            .expect("validated transmissivities");
        // the legitimate parties mistake Eve's tap for channel loss
        config.declared_eta = Some(eta_e * self.eta_l);
        config.check_tolerance_sigma = self.check_tolerance_sigma;
        config.coupler_eta = self.coupler_eta;
        config
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub eta_e: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub c_s: f64,
}

impl CurveRow {
    pub fn c_s_clamped(&self) -> f64 {
        self.c_s.max(0.0)
    }
}

/// Grid point dropped from a Monte-Carlo curve because the run aborted.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedPoint {
    pub eta_e: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyCurve {
    pub variant: SweepVariant,
    pub provenance: Provenance,
    pub rows: Vec<CurveRow>,
    pub skipped: Vec<SkippedPoint>,
}

/// Per-point derived seed: splitmix64 finalizer over the base seed and the
/// grid index, so parallel points own independent deterministic streams.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut x = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn validate_grid(grid: &[f64]) -> Result<(), SecurityError> {
    if grid.is_empty() || grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(SecurityError::BadGrid);
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SecurityError::BadGrid);
    }
    Ok(())
}

/// Evenly spaced grid over [0, 1] with `points` entries.
pub fn unit_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|i| i as f64 / (points - 1) as f64)
        .collect()
}

pub fn sweep(
    variant: SweepVariant,
    grid: &[f64],
    base: &SweepParams,
    mode: Provenance,
) -> Result<SecrecyCurve, SecurityError> {
    validate_grid(grid)?;
    match mode {
        Provenance::Analytic => sweep_analytic(variant, grid, base),
        Provenance::MonteCarlo => sweep_monte_carlo(variant, grid, base),
    }
}

fn sweep_analytic(
    variant: SweepVariant,
    grid: &[f64],
    base: &SweepParams,
) -> Result<SecrecyCurve, SecurityError> {
    let mut rows = Vec::with_capacity(grid.len());
    for &eta_e in grid {
        let p = base.analytic_params(eta_e)?;
        let (i_ab, i_ae) = match variant {
            SweepVariant::Asymmetric => (
                mutual_info_asym(&p, Party::Bob, base.convention),
                mutual_info_asym(&p, Party::Eve, base.convention),
            ),
            SweepVariant::Symmetric => (
                mutual_info_sym(&p, Party::Bob, base.convention)?,
                mutual_info_sym(&p, Party::Eve, base.convention)?,
            ),
            SweepVariant::SymmetricRandomPhase => {
                return Err(SecurityError::AnalyticUnsupported)
            }
        };
        rows.push(CurveRow {
            eta_e,
            i_ab,
            i_ae,
            c_s: secrecy_capacity(i_ab, i_ae),
        });
    }
    Ok(SecrecyCurve {
        variant,
        provenance: Provenance::Analytic,
        rows,
        skipped: Vec::new(),
    })
}

fn sweep_monte_carlo(
    variant: SweepVariant,
    grid: &[f64],
    base: &SweepParams,
) -> Result<SecrecyCurve, SecurityError> {
    let points: Vec<Result<Result<CurveRow, SkippedPoint>, SecurityError>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &eta_e)| {
            let config = base.protocol_config(variant, eta_e, derive_seed(base.seed, i as u64));
            let transcript = run_protocol(&config).map_err(|e| SecurityError::ProtocolFailure {
                eta_e,
                message: e.to_string(),
            })?;
            if let Verdict::Aborted(reason) = &transcript.verdict {
                return Ok(Err(SkippedPoint {
                    eta_e,
                    reason: reason.clone(),
                }));
            }
            let batch = std::slice::from_ref(&transcript);
            let i_ab = monte_carlo_mutual_info(batch, Party::Bob)?;
            let i_ae = monte_carlo_mutual_info(batch, Party::Eve)?;
            Ok(Ok(CurveRow {
                eta_e,
                i_ab,
                i_ae,
                c_s: secrecy_capacity(i_ab, i_ae),
            }))
        })
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for point in points {
        match point? {
            Ok(row) => rows.push(row),
            Err(skip) => skipped.push(skip),
        }
    }
    Ok(SecrecyCurve {
        variant,
        provenance: Provenance::MonteCarlo,
        rows,
        skipped,
    })
}

/// 6-significant-digit scientific formatting used by every CSV artifact.
pub fn format_sig6(x: f64) -> String {
    format!("{x:.5e}")
}

pub const CURVE_CSV_HEADER: &str = "eta_E,I_AB_bits,I_AE_bits,C_s_bits,provenance,variant";

impl SecrecyCurve {
    /// CSV body: header plus one row per grid point. Aborted grid points are
    /// flagged as comment lines after the data.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CURVE_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                format_sig6(row.eta_e),
                format_sig6(row.i_ab),
                format_sig6(row.i_ae),
                format_sig6(row.c_s),
                self.provenance,
                self.variant
            ));
        }
        for skip in &self.skipped {
            out.push_str(&format!(
                "# skipped eta_E={} ({})\n",
                format_sig6(skip.eta_e),
                skip.reason
            ));
        }
        out
    }

    /// Parse a CSV produced by `to_csv` (or any file in the same schema).
    pub fn parse_csv(text: &str) -> Result<SecrecyCurve, SecurityError> {
        let bad = |msg: String| SecurityError::InvalidParams(msg);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty CSV".to_string()))?;
        if header.trim() != CURVE_CSV_HEADER {
            return Err(bad(format!("unexpected header {header:?}")));
        }
        let mut rows = Vec::new();
        let mut skipped = Vec::new();
        let mut variant: Option<SweepVariant> = None;
        let mut provenance: Option<Provenance> = None;
        for line in lines {
            if let Some(rest) = line.strip_prefix("# skipped eta_E=") {
                let (value, reason) = rest
                    .split_once(" (")
                    .ok_or_else(|| bad(format!("malformed skip line {line:?}")))?;
                skipped.push(SkippedPoint {
                    eta_e: value
                        .parse()
                        .map_err(|_| bad(format!("bad number in {line:?}")))?,
                    reason: reason.trim_end_matches(')').to_string(),
                });
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(bad(format!("expected 6 fields, got {}", fields.len())));
            }
            let num = |s: &str| -> Result<f64, SecurityError> {
                s.trim()
                    .parse()
                    .map_err(|_| bad(format!("bad number {s:?}")))
            };
            rows.push(CurveRow {
                eta_e: num(fields[0])?,
                i_ab: num(fields[1])?,
                i_ae: num(fields[2])?,
                c_s: num(fields[3])?,
            });
            provenance = Some(match fields[4].trim() {
                "analytic" => Provenance::Analytic,
                "monte_carlo" => Provenance::MonteCarlo,
                other => return Err(bad(format!("unknown provenance {other:?}"))),
            });
            variant = Some(match fields[5].trim() {
                "asymmetric" => SweepVariant::Asymmetric,
                "symmetric" => SweepVariant::Symmetric,
                "symmetric_random_phase" => SweepVariant::SymmetricRandomPhase,
                other => return Err(bad(format!("unknown variant {other:?}"))),
            });
        }
        if rows.is_empty() {
            return Err(bad("CSV contains no data rows".to_string()));
        }
        Ok(SecrecyCurve {
            variant: variant.unwrap(),
            provenance: provenance.unwrap(),
            rows,
            skipped,
        })
    }
}
