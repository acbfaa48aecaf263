//! Command-line front end: run single protocol instances, sweep secrecy
//! curves, export figure data as CSV, and compare measured curves against the
//! analytic model.
//!
//! Exit codes: 0 success/accepted, 1 usage or config error, 2 protocol abort,
//! 3 comparison failure.

use crate::channel::{ChannelParams, Topology};
use crate::dist::Dist;
use crate::protocol::{run_protocol, PhaseMode, ProtocolConfig, Variant, Verdict};
use crate::security::{
    mutual_info_asym, secrecy_capacity, sweep, unit_grid, AnalyticParams, InfoConvention, Party,
    Provenance, SecrecyCurve, SweepParams, SweepVariant, CURVE_CSV_HEADER,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ABORTED: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser)]
#[command(
    name = "cvqsdc",
    about = "CV-QSDC simulator and security analyzer",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one protocol run and write the transcript.
    Run(RunArgs),
    /// Sweep eta_E and write a secrecy curve CSV.
    Sweep(SweepArgs),
    /// Export the three-panel secrecy comparison data set.
    Figure3(Figure3Args),
    /// Export the squeezing-saturation data set.
    Figure4(Figure4Args),
    /// Compare a measured curve against the analytic model.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed, overriding the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Transcript output path.
    #[arg(long, default_value = "transcript.txt")]
    out: PathBuf,
    /// Override a config key, e.g. --set channel.eta_E=0.5 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Asymmetric,
    Symmetric,
    SymmetricRandomPhase,
}

impl VariantArg {
    fn to_sweep(self) -> SweepVariant {
        match self {
            VariantArg::Asymmetric => SweepVariant::Asymmetric,
            VariantArg::Symmetric => SweepVariant::Symmetric,
            VariantArg::SymmetricRandomPhase => SweepVariant::SymmetricRandomPhase,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Analytic,
    MonteCarlo,
}

impl ModeArg {
    fn to_provenance(self) -> Provenance {
        match self {
            ModeArg::Analytic => Provenance::Analytic,
            ModeArg::MonteCarlo => Provenance::MonteCarlo,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    variant: VariantArg,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Number of evenly spaced eta_E grid points over [0, 1].
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// Pulses per Monte-Carlo grid point.
    #[arg(long, default_value_t = 100_000)]
    pulses: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "eta-l", default_value_t = 1.0)]
    eta_l: f64,
    #[arg(long = "squeezing-db", default_value_t = 0.0, allow_hyphen_values = true)]
    squeezing_db: f64,
    /// Report the literal log2(S/N) instead of log2(1 + S/N).
    #[arg(long = "raw-log")]
    raw_log: bool,
    #[arg(long)]
    out: PathBuf,
    /// Override a sweep parameter, e.g. --set x_dist=uniform:1:10.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct Figure3Args {
    /// Base output path; panels are written with _a/_b/_c suffixes.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[arg(long, default_value_t = 20_000)]
    pulses: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "raw-log")]
    raw_log: bool,
}

#[derive(Args)]
struct Figure4Args {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "raw-log")]
    raw_log: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Measured curve in the secrecy-curve CSV schema.
    #[arg(long)]
    measured: PathBuf,
    /// Allowed relative deviation, percent.
    #[arg(long, default_value_t = 5.0)]
    tolerance: f64,
    #[arg(long = "eta-l", default_value_t = 1.0)]
    eta_l: f64,
    #[arg(long = "squeezing-db", default_value_t = -1.0, allow_hyphen_values = true)]
    squeezing_db: f64,
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Figure3(args) => cmd_figure3(&args),
        Command::Figure4(args) => cmd_figure4(&args),
        Command::Compare(args) => cmd_compare(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
    }
}

// ---------------------------------------------------------------------------
// config parsing

fn parse_kv_text(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value, got {line:?}", lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn apply_overrides(map: &mut BTreeMap<String, String>, overrides: &[String]) -> Result<(), String> {
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| format!("--set expects key=value, got {item:?}"))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(())
}

fn parse_dist(s: &str) -> Result<Dist, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| format!("bad number {v:?} in distribution {s:?}"))
    };
    match parts.as_slice() {
        ["constant", v] => Ok(Dist::Constant(num(v)?)),
        ["uniform", lo, hi] => {
            Dist::uniform(num(lo)?, num(hi)?).map_err(|e| format!("{e} in {s:?}"))
        }
        _ => Err(format!(
            "distribution {s:?} must be constant:<v> or uniform:<lo>:<hi>"
        )),
    }
}

fn parse_protocol_config(map: &BTreeMap<String, String>) -> Result<ProtocolConfig, String> {
    let mut config = ProtocolConfig::new(Variant::Asymmetric, 0);
    let mut eta_l = config.channel.eta_l;
    let mut eta_e = config.channel.eta_e;
    let mut excess_noise = config.channel.excess_noise;
    let mut topology = config.channel.topology;
    let numf = |k: &str, v: &str| {
        v.parse::<f64>()
            .map_err(|_| format!("{k}: bad number {v:?}"))
    };
    for (key, value) in map {
        match key.as_str() {
            "variant" => {
                config.variant = match value.as_str() {
                    "asymmetric" => Variant::Asymmetric,
                    "symmetric" => Variant::Symmetric,
                    other => return Err(format!("variant: unknown value {other:?}")),
                }
            }
            "phase_mode" => {
                config.phase_mode = match value.as_str() {
                    "locked" => PhaseMode::Locked,
                    "random" => PhaseMode::Random,
                    other => return Err(format!("phase_mode: unknown value {other:?}")),
                }
            }
            "n" => {
                config.n = value
                    .parse()
                    .map_err(|_| format!("n: bad integer {value:?}"))?
            }
            "seed" => {
                config.seed = value
                    .parse()
                    .map_err(|_| format!("seed: bad integer {value:?}"))?
            }
            "control_fraction" => config.control_fraction = numf(key, value)?,
            "decoy_fraction" => config.decoy_fraction = numf(key, value)?,
            "squeezing_db" => config.squeezing_db = numf(key, value)?,
            "check_tolerance_sigma" => config.check_tolerance_sigma = numf(key, value)?,
            "coupler_eta" => config.coupler_eta = numf(key, value)?,
            "x_dist" => config.x_dist = parse_dist(value)?,
            "message_dist" => config.message_dist = parse_dist(value)?,
            "channel.eta_L" => eta_l = numf(key, value)?,
            "channel.eta_E" => eta_e = numf(key, value)?,
            "channel.excess_noise" => excess_noise = numf(key, value)?,
            "channel.topology" => {
                topology = match value.as_str() {
                    "one-channel" => Topology::OneChannelWithCirculators,
                    "two-channels" => Topology::TwoChannels,
                    other => return Err(format!("channel.topology: unknown value {other:?}")),
                }
            }
            "declared_eta" => {
                config.declared_eta = if value == "NA" {
                    None
                } else {
                    Some(numf(key, value)?)
                }
            }
            other => return Err(format!("unknown config key {other:?}")),
        }
    }
    config.channel = ChannelParams::new(eta_l, eta_e, topology)
        .and_then(|c| c.with_excess_noise(excess_noise))
        .map_err(|e| e.to_string())?;
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn apply_sweep_overrides(
    base: &mut SweepParams,
    overrides: &[String],
) -> Result<(), String> {
    let mut map = BTreeMap::new();
    apply_overrides(&mut map, overrides)?;
    for (key, value) in &map {
        let numf = || {
            value
                .parse::<f64>()
                .map_err(|_| format!("{key}: bad number {value:?}"))
        };
        match key.as_str() {
            "eta_l" => base.eta_l = numf()?,
            "squeezing_db" => base.squeezing_db = numf()?,
            "control_fraction" => base.control_fraction = numf()?,
            "decoy_fraction" => base.decoy_fraction = numf()?,
            "check_tolerance_sigma" => base.check_tolerance_sigma = numf()?,
            "coupler_eta" => base.coupler_eta = numf()?,
            "x_dist" => base.x_dist = parse_dist(value)?,
            "message_dist" => base.message_dist = parse_dist(value)?,
            "pulses" => {
                base.pulses = value
                    .parse()
                    .map_err(|_| format!("pulses: bad integer {value:?}"))?
            }
            "seed" => {
                base.seed = value
                    .parse()
                    .map_err(|_| format!("seed: bad integer {value:?}"))?
            }
            other => return Err(format!("unknown sweep key {other:?}")),
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// artifact emission

/// Write to a sibling temp file and rename, so failures never leave partial
/// artifacts behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), String> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| format!("{} has no file name", path.display()))?;
    let mut tmp = dir.map(Path::to_path_buf).unwrap_or_default();
    tmp.push(format!(".{}.tmp.{}", file_name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).map_err(|e| format!("writing {}: {e}", tmp.display()))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        format!("renaming to {}: {e}", path.display())
    })
}

/// Strip the leading comment block of an artifact.
pub fn split_comments(text: &str) -> (Vec<String>, String) {
    let mut comments = Vec::new();
    let mut rest_start = 0;
    for line in text.lines() {
        if line.starts_with('#') {
            comments.push(line.to_string());
            rest_start += line.len() + 1;
        } else {
            break;
        }
    }
    (comments, text[rest_start.min(text.len())..].to_string())
}

fn comment_block(comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(c);
        out.push('\n');
    }
    out
}

pub const SERIES_CSV_HEADER: &str =
    "series,eta_E,I_AB_bits,I_AE_bits,C_s_bits,provenance,variant";

/// A figure artifact: several labeled curves stacked in one CSV with a
/// leading `series` column.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesArtifact {
    pub comments: Vec<String>,
    pub series: Vec<(String, SecrecyCurve)>,
}

impl SeriesArtifact {
    pub fn to_csv(&self) -> String {
        let mut out = comment_block(&self.comments);
        out.push_str(SERIES_CSV_HEADER);
        out.push('\n');
        for (name, curve) in &self.series {
            for line in curve.to_csv().lines().skip(1) {
                if let Some(skip) = line.strip_prefix("# skipped ") {
                    writeln!(out, "# skipped series={name} {skip}").unwrap();
                } else {
                    writeln!(out, "{name},{line}").unwrap();
                }
            }
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<SeriesArtifact, String> {
        let (comments, rest) = split_comments(text);
        let mut lines = rest.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or("empty series CSV")?;
        if header.trim() != SERIES_CSV_HEADER {
            return Err(format!("unexpected header {header:?}"));
        }
        // regroup by series, then reuse the single-curve parser per group
        let mut order: Vec<String> = Vec::new();
        let mut bodies: BTreeMap<String, String> = BTreeMap::new();
        fn body_of<'a>(
            order: &mut Vec<String>,
            bodies: &'a mut BTreeMap<String, String>,
            name: &str,
        ) -> &'a mut String {
            if !bodies.contains_key(name) {
                order.push(name.to_string());
                bodies.insert(name.to_string(), format!("{CURVE_CSV_HEADER}\n"));
            }
            bodies.get_mut(name).unwrap()
        }
        for line in lines {
            if let Some(skip) = line.strip_prefix("# skipped series=") {
                let (name, rest) = skip
                    .split_once(' ')
                    .ok_or_else(|| format!("malformed skip line {line:?}"))?;
                body_of(&mut order, &mut bodies, name)
                    .push_str(&format!("# skipped {rest}\n"));
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let (name, rest) = line
                .split_once(',')
                .ok_or_else(|| format!("malformed row {line:?}"))?;
            let body = body_of(&mut order, &mut bodies, name);
            body.push_str(rest);
            body.push('\n');
        }
        let mut series = Vec::new();
        for name in order {
            let curve =
                SecrecyCurve::parse_csv(&bodies[&name]).map_err(|e| e.to_string())?;
            series.push((name, curve));
        }
        if series.is_empty() {
            return Err("series CSV contains no data rows".to_string());
        }
        Ok(SeriesArtifact { comments, series })
    }
}

fn base_comments(base: &SweepParams) -> Vec<String> {
    let dist = |d: &Dist| match *d {
        Dist::Constant(v) => format!("constant:{v}"),
        Dist::Uniform { lo, hi } => format!("uniform:{lo}:{hi}"),
    };
    let convention = match base.convention {
        InfoConvention::ShannonHartley => "shannon_hartley",
        InfoConvention::RawLog => "raw_log",
    };
    vec![
        format!("# eta_L={}", base.eta_l),
        format!("# squeezing_db={}", base.squeezing_db),
        format!("# x_dist={}", dist(&base.x_dist)),
        format!("# message_dist={}", dist(&base.message_dist)),
        format!("# pulses={}", base.pulses),
        format!("# seed={}", base.seed),
        format!("# convention={convention}"),
    ]
}

// ---------------------------------------------------------------------------
// commands

fn cmd_run(args: &RunArgs) -> Result<i32, String> {
    let mut map = match &args.config {
        Some(path) => parse_kv_text(
            &fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?,
        )?,
        None => BTreeMap::new(),
    };
    apply_overrides(&mut map, &args.overrides)?;
    if let Some(seed) = args.seed {
        map.insert("seed".to_string(), seed.to_string());
    }
    let config = parse_protocol_config(&map)?;
    let transcript = run_protocol(&config).map_err(|e| e.to_string())?;
    write_atomic(&args.out, &transcript.to_text())?;
    match &transcript.verdict {
        Verdict::Accepted => {
            let mse = transcript.decode_mse().unwrap_or(f64::NAN);
            println!(
                "accepted: {} message pulses decoded, mse={mse:.6e}",
                transcript.decoded.len()
            );
            Ok(EXIT_OK)
        }
        Verdict::Aborted(reason) => {
            println!("aborted: {reason}");
            Ok(EXIT_ABORTED)
        }
    }
}

fn grid_points(n: usize) -> Result<Vec<f64>, String> {
    if n < 2 {
        return Err("--grid must be at least 2".to_string());
    }
    Ok(unit_grid(n))
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32, String> {
    let mut base = SweepParams::new(args.seed);
    base.eta_l = args.eta_l;
    base.squeezing_db = args.squeezing_db;
    base.pulses = args.pulses;
    if args.raw_log {
        base.convention = InfoConvention::RawLog;
    }
    apply_sweep_overrides(&mut base, &args.overrides)?;
    let grid = grid_points(args.grid)?;
    let curve = sweep(
        args.variant.to_sweep(),
        &grid,
        &base,
        args.mode.to_provenance(),
    )
    .map_err(|e| e.to_string())?;
    let mut comments = base_comments(&base);
    comments.insert(0, format!("# variant={}", curve.variant));
    comments.insert(1, format!("# provenance={}", curve.provenance));
    let text = format!("{}{}", comment_block(&comments), curve.to_csv());
    write_atomic(&args.out, &text)?;
    println!(
        "wrote {} rows ({} skipped) to {}",
        curve.rows.len(),
        curve.skipped.len(),
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn panel_path(base: &Path, suffix: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "figure".to_string());
    let ext = base
        .extension()
        .map(|s| format!(".{}", s.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}_{suffix}{ext}"))
}

fn figure_base(seed: u64, pulses: usize, raw_log: bool) -> SweepParams {
    let mut base = SweepParams::new(seed);
    base.pulses = pulses;
    if raw_log {
        base.convention = InfoConvention::RawLog;
    }
    base
}

fn figure_series(
    variant: SweepVariant,
    grid: &[f64],
    base: &SweepParams,
    specs: &[(&str, f64, Provenance)],
) -> Result<Vec<(String, SecrecyCurve)>, String> {
    let mut out = Vec::new();
    for (i, (name, db, mode)) in specs.iter().enumerate() {
        let mut params = base.clone();
        params.squeezing_db = *db;
        params.seed = crate::security::derive_seed(base.seed, 1000 + i as u64);
        let curve = sweep(variant, grid, &params, *mode).map_err(|e| e.to_string())?;
        out.push((name.to_string(), curve));
    }
    Ok(out)
}

fn cmd_figure3(args: &Figure3Args) -> Result<i32, String> {
    let grid = grid_points(args.grid)?;
    let base = figure_base(args.seed, args.pulses, args.raw_log);
    let both = [
        ("coherent_analytic", 0.0, Provenance::Analytic),
        ("squeezed_analytic", -3.0, Provenance::Analytic),
        ("coherent_monte_carlo", 0.0, Provenance::MonteCarlo),
        ("squeezed_monte_carlo", -3.0, Provenance::MonteCarlo),
    ];
    let mc_only = [
        ("coherent_monte_carlo", 0.0, Provenance::MonteCarlo),
        ("squeezed_monte_carlo", -3.0, Provenance::MonteCarlo),
    ];
    let panels: [(&str, SweepVariant, &[(&str, f64, Provenance)]); 3] = [
        ("a", SweepVariant::Asymmetric, &both),
        ("b", SweepVariant::Symmetric, &both),
        ("c", SweepVariant::SymmetricRandomPhase, &mc_only),
    ];
    for (suffix, variant, specs) in panels {
        let mut comments = base_comments(&base);
        comments.insert(0, format!("# panel={suffix} variant={variant}"));
        let artifact = SeriesArtifact {
            comments,
            series: figure_series(variant, &grid, &base, specs)?,
        };
        let path = panel_path(&args.out, suffix);
        write_atomic(&path, &artifact.to_csv())?;
        println!("wrote panel {suffix} to {}", path.display());
    }
    Ok(EXIT_OK)
}

fn cmd_figure4(args: &Figure4Args) -> Result<i32, String> {
    let grid = grid_points(args.grid)?;
    let base = figure_base(args.seed, 0, args.raw_log);
    let specs = [
        ("coherent_analytic", 0.0, Provenance::Analytic),
        ("squeezed_-1dB", -1.0, Provenance::Analytic),
        ("squeezed_-5dB", -5.0, Provenance::Analytic),
        ("squeezed_-10dB", -10.0, Provenance::Analytic),
    ];
    let mut comments = base_comments(&base);
    comments.insert(0, "# variant=asymmetric".to_string());
    let artifact = SeriesArtifact {
        comments,
        series: figure_series(SweepVariant::Asymmetric, &grid, &base, &specs)?,
    };
    write_atomic(&args.out, &artifact.to_csv())?;
    println!("wrote {} series to {}", artifact.series.len(), args.out.display());
    Ok(EXIT_OK)
}

/// Absolute tolerance floor in bits, so near-zero analytic values do not turn
/// statistical noise into relative-error blowups.
const COMPARE_ABS_FLOOR: f64 = 0.005;

fn cmd_compare(args: &CompareArgs) -> Result<i32, String> {
    let text = fs::read_to_string(&args.measured)
        .map_err(|e| format!("reading {}: {e}", args.measured.display()))?;
    let (_, rest) = split_comments(&text);
    let measured = SecrecyCurve::parse_csv(&rest).map_err(|e| e.to_string())?;
    if args.tolerance <= 0.0 {
        return Err("--tolerance must be positive".to_string());
    }
    let tol = args.tolerance / 100.0;
    let z = crate::gaussian::db_to_z(args.squeezing_db).map_err(|e| e.to_string())?;
    let x_dist = Dist::uniform(1.0, 10.0).unwrap();
    let m_dist = Dist::uniform(0.1, 1.0).unwrap();
    let mut all_ok = true;
    println!("eta_E      column     measured      analytic      deviation  status");
    for row in &measured.rows {
        let p = AnalyticParams::from_distributions(row.eta_e, args.eta_l, z, &x_dist, &m_dist)
            .map_err(|e| e.to_string())?;
        let an_ab = mutual_info_asym(&p, Party::Bob, InfoConvention::ShannonHartley);
        let an_ae = mutual_info_asym(&p, Party::Eve, InfoConvention::ShannonHartley);
        let an_cs = secrecy_capacity(an_ab, an_ae);
        for (column, meas, an) in [
            ("I_AB_bits", row.i_ab, an_ab),
            ("I_AE_bits", row.i_ae, an_ae),
            ("C_s_bits", row.c_s, an_cs),
        ] {
            let dev = (meas - an).abs();
            let ok = dev <= (tol * an.abs()).max(COMPARE_ABS_FLOOR);
            all_ok &= ok;
            println!(
                "{:<10.4} {:<10} {:<13.6} {:<13.6} {:<10.6} {}",
                row.eta_e,
                column,
                meas,
                an,
                dev,
                if ok { "ok" } else { "MISMATCH" }
            );
        }
    }
    if all_ok {
        println!("all points within {}% tolerance", args.tolerance);
        Ok(EXIT_OK)
    } else {
        println!("comparison failed at {}% tolerance", args.tolerance);
        Ok(EXIT_MISMATCH)
    }
}
