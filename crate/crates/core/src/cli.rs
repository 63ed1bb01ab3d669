//! Command-line front end.
//!
//! A run is described by one JSON config file; every section is optional and
//! falls back to the documented defaults, and flags override file values.
//! Every CSV starts with `#` comment lines carrying the tool version, the
//! SHA-256 digest of the effective config, and the model tag, so identical
//! inputs give byte-identical files.
//!
//! Exit codes: 0 success, 1 domain/numerical failure, 2 config or parse error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coupler::{self, IdleSearch, DEFAULT_PRESCAN_POINTS, DEFAULT_TOL_MHZ};
use crate::curve::{Column, CsvNumber, SweepCurve, Unit};
use crate::dephasing::{self, NoiseConfig, DEFAULT_BIN_WIDTH_MHZ, DEFAULT_SAMPLES};
use crate::device_params::{self, TransmonParams};
use crate::error::Error;
use crate::fock::SystemSpec;
use crate::loss::{self, DielectricChannel, LossModel, ParticipationTable};
use crate::presets::ParameterSet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

const HAMILTONIAN_TAG: &str = "fock-charge-coupling";
const TRANSMON_TAG: &str = "transmon-asymptotic";
const LOSS_TAG: &str = "participation-budget";

#[derive(Debug, Parser)]
#[command(name = "gatemon-sim", version, about = "Tunable-coupler ZZ, coupler-noise dephasing, and dielectric loss budgets")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = available parallelism). Never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Built-in coupling set (set1, set2, set3) when the config has no `system`.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Charging energy, transmon frequency and anharmonicity.
    Params(ParamsArgs),
    /// ζ and dressed qubit frequencies against coupler frequency.
    ZzSweep(SystemArgs),
    /// Zero-ZZ coupler frequency.
    Idle(IdleArgs),
    /// Histogram of dressed-frequency shifts under Gaussian coupler noise.
    Noise(NoiseArgs),
    /// T2 limit against coupler noise strength.
    T2Sweep(IdleArgs),
    /// Participation-weighted T1 / Q budget.
    Loss,
    /// Q_TSV / Q_planar against Q_TSV.
    Qratio,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long)]
    pub capacitance_ff: Option<f64>,
    #[arg(long)]
    pub ej: Option<f64>,
    #[arg(long)]
    pub ec: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Truncation levels applied to every mode.
    #[arg(long)]
    pub levels: Option<usize>,
}

#[derive(Debug, Args)]
pub struct IdleArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub bracket_lo: Option<f64>,
    #[arg(long)]
    pub bracket_hi: Option<f64>,
    #[arg(long)]
    pub tol_khz: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub idle: IdleArgs,
    /// σ_ωc in MHz.
    #[arg(long)]
    pub sigma_wc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub preset: ParameterSet,
    /// Explicit system; takes precedence over `preset`.
    pub system: Option<SystemSpec>,
    pub levels: Option<usize>,
    pub seed: u64,
    /// Not part of the digest: where output lands never changes its content.
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
    pub params: ParamsConfig,
    pub sweep: SweepConfig,
    pub idle: IdleConfig,
    pub noise: NoiseSection,
    pub t2_sweep: T2SweepConfig,
    pub loss: LossModel,
    pub qratio: QRatioConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: ParameterSet::Set1,
            system: None,
            levels: None,
            seed: 1,
            output: None,
            params: ParamsConfig::default(),
            sweep: SweepConfig::default(),
            idle: IdleConfig::default(),
            noise: NoiseSection::default(),
            t2_sweep: T2SweepConfig::default(),
            loss: LossModel {
                channels: vec![DielectricChannel::new("SiGe", 0.05, 1.6e-5)],
                gamma0: 0.0,
                frequency_ghz: 5.0,
            },
            qratio: QRatioConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub capacitance_ff: Option<f64>,
    pub ej_mhz: f64,
    /// Used only when `capacitance_ff` is absent.
    pub ec_mhz: Option<f64>,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            capacitance_ff: Some(75.0),
            ej_mhz: 12_500.0,
            ec_mhz: None,
        }
    }
}

/// Coupler grid; bounds default to 2500 and 700 MHz below the lower qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub start_mhz: Option<f64>,
    pub stop_mhz: Option<f64>,
    pub points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            start_mhz: None,
            stop_mhz: None,
            points: 91,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdleConfig {
    pub bracket_lo_mhz: Option<f64>,
    pub bracket_hi_mhz: Option<f64>,
    pub tol_khz: f64,
    pub prescan_points: usize,
}

impl Default for IdleConfig {
    fn default() -> Self {
        Self {
            bracket_lo_mhz: None,
            bracket_hi_mhz: None,
            tol_khz: DEFAULT_TOL_MHZ * 1e3,
            prescan_points: DEFAULT_PRESCAN_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub sigma_wc_mhz: f64,
    pub n_samples: usize,
    pub bin_width_mhz: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            sigma_wc_mhz: 1.0,
            n_samples: DEFAULT_SAMPLES,
            bin_width_mhz: DEFAULT_BIN_WIDTH_MHZ,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct T2SweepConfig {
    pub sigmas_mhz: Vec<f64>,
    pub n_samples: usize,
}

impl Default for T2SweepConfig {
    fn default() -> Self {
        Self {
            sigmas_mhz: vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0],
            n_samples: DEFAULT_SAMPLES,
        }
    }
}

/// Either explicit participations or thicknesses looked up in a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QRatioConfig {
    pub tan_delta: f64,
    pub q_tsv_min: f64,
    pub q_tsv_max: f64,
    pub points: usize,
    pub p_planar: Option<f64>,
    pub p_tsv: Option<f64>,
    pub thicknesses_um: Vec<f64>,
    /// Participation table; the bundled curated table when absent.
    pub table: Option<PathBuf>,
}

impl Default for QRatioConfig {
    fn default() -> Self {
        Self {
            tan_delta: 1.6e-5,
            q_tsv_min: 1e4,
            q_tsv_max: 1e8,
            points: 41,
            p_planar: None,
            p_tsv: None,
            thicknesses_um: vec![0.3, 2.5, 30.0],
            table: None,
        }
    }
}

/// Failure modes of a CLI run, each mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Run(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Run(Error::Parse { .. }) => EXIT_CONFIG,
            CliError::Run(_) => EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

/// Parses a config document, reporting the offending key path and position.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config(format!(
            "key `{path}` (line {}, column {}): {inner}",
            inner.line(),
            inner.column()
        ))
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// First 16 hex digits of SHA-256 over the serialized effective config.
pub fn config_digest(config: &RunConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    hex::encode(&Sha256::digest(&bytes)[..8])
}

impl RunConfig {
    pub fn system_spec(&self) -> SystemSpec {
        let spec = self.system.clone().unwrap_or_else(|| self.preset.system());
        match self.levels {
            Some(levels) => spec.with_levels(levels),
            None => spec,
        }
    }

    fn idle_search(&self, spec: &SystemSpec) -> IdleSearch {
        let default = IdleSearch::for_system(spec);
        IdleSearch {
            bracket: (
                self.idle.bracket_lo_mhz.unwrap_or(default.bracket.0),
                self.idle.bracket_hi_mhz.unwrap_or(default.bracket.1),
            ),
            tol: self.idle.tol_khz * 1e-3,
            prescan_points: self.idle.prescan_points,
        }
    }
}

fn apply_overrides(cli: &Cli, config: &mut RunConfig) -> Result<(), CliError> {
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output = Some(out.clone());
    }
    if let Some(name) = &cli.preset {
        config.preset = ParameterSet::from_name(name)
            .ok_or_else(|| CliError::Config(format!("unknown preset `{name}` (expected set1, set2, set3)")))?;
    }
    let system = |config: &mut RunConfig, args: &SystemArgs| {
        if args.levels.is_some() {
            config.levels = args.levels;
        }
    };
    let idle = |config: &mut RunConfig, args: &IdleArgs| {
        system(config, &args.system);
        if args.bracket_lo.is_some() {
            config.idle.bracket_lo_mhz = args.bracket_lo;
        }
        if args.bracket_hi.is_some() {
            config.idle.bracket_hi_mhz = args.bracket_hi;
        }
        if let Some(tol) = args.tol_khz {
            config.idle.tol_khz = tol;
        }
    };
    match &cli.command {
        Command::Params(args) => {
            if let Some(c) = args.capacitance_ff {
                config.params.capacitance_ff = Some(c);
            }
            if let Some(ec) = args.ec {
                config.params.ec_mhz = Some(ec);
                if args.capacitance_ff.is_none() {
                    config.params.capacitance_ff = None;
                }
            }
            if let Some(ej) = args.ej {
                config.params.ej_mhz = ej;
            }
        }
        Command::ZzSweep(args) => system(config, args),
        Command::Idle(args) | Command::T2Sweep(args) => idle(config, args),
        Command::Noise(args) => {
            idle(config, &args.idle);
            if let Some(s) = args.sigma_wc {
                config.noise.sigma_wc_mhz = s;
            }
        }
        Command::Loss | Command::Qratio => {}
    }
    Ok(())
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    apply_overrides(cli, &mut config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    let digest = config_digest(&config);
    let (tag, body) = pool.install(|| render(&cli.command, &config))?;

    let mut text = String::new();
    let _ = writeln!(text, "# gatemon-sim {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(text, "# command: {}", command_name(&cli.command));
    let _ = writeln!(text, "# config_digest: {digest}");
    let _ = writeln!(text, "# model_tag: {tag}");
    text.push_str(&body);

    eprintln!("model_tag={tag} config_digest={digest}");
    match &config.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Run(e.into()))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Run(e.into()))?,
    }
    Ok(())
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Params(_) => "params",
        Command::ZzSweep(_) => "zz-sweep",
        Command::Idle(_) => "idle",
        Command::Noise(_) => "noise",
        Command::T2Sweep(_) => "t2-sweep",
        Command::Loss => "loss",
        Command::Qratio => "qratio",
    }
}

fn curve_csv(curve: &SweepCurve) -> String {
    let mut buf = Vec::new();
    curve.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

fn key_value_csv(rows: &[(&str, f64)]) -> String {
    let mut s = String::from("quantity,value\n");
    for (k, v) in rows {
        let _ = writeln!(s, "{k},{}", CsvNumber(*v));
    }
    s
}

/// Produces (model tag, CSV body) for one subcommand.
fn render(command: &Command, config: &RunConfig) -> Result<(&'static str, String), CliError> {
    match command {
        Command::Params(_) => {
            let p = &config.params;
            let params = match (p.capacitance_ff, p.ec_mhz) {
                (Some(c), _) => TransmonParams::from_capacitance(p.ej_mhz, c)?,
                (None, Some(ec)) => TransmonParams::new(p.ej_mhz, ec)?,
                (None, None) => {
                    return Err(CliError::Config("params needs capacitance_ff or ec_mhz".into()));
                }
            };
            let mut rows = Vec::new();
            if let Some(c) = params.capacitance_ff {
                rows.push(("capacitance_fF", c));
            }
            rows.extend([
                ("EC_MHz", params.ec_mhz),
                ("EJ_MHz", params.ej_mhz),
                ("EJ_over_EC", params.ej_mhz / params.ec_mhz),
                ("f01_MHz", params.frequency()?),
                ("anharmonicity_MHz", device_params::anharmonicity_estimate(params.ec_mhz)?),
            ]);
            Ok((TRANSMON_TAG, key_value_csv(&rows)))
        }
        Command::ZzSweep(_) => {
            let spec = config.system_spec();
            let lower = spec.lower_qubit_frequency();
            let start = config.sweep.start_mhz.unwrap_or(lower - 2500.0);
            let stop = config.sweep.stop_mhz.unwrap_or(lower - 700.0);
            let grid = coupler::linear_grid(start, stop, config.sweep.points);
            let curve = coupler::zeta_sweep(&spec, &grid)?;
            Ok((HAMILTONIAN_TAG, curve_csv(&curve)))
        }
        Command::Idle(_) => {
            let spec = config.system_spec();
            let idle = coupler::find_idle_frequency(&spec, &config.idle_search(&spec))?;
            eprintln!(
                "idle coupler frequency {:.6} MHz, |zeta| = {:.3e} kHz",
                idle.coupler_frequency,
                idle.residual_zeta.abs() * 1e3
            );
            let mut s = String::from("coupler_frequency_MHz,residual_zeta_MHz,bracket_lo_MHz,bracket_hi_MHz\n");
            let _ = writeln!(
                s,
                "{},{},{},{}",
                CsvNumber(idle.coupler_frequency),
                CsvNumber(idle.residual_zeta),
                CsvNumber(idle.bracket.0),
                CsvNumber(idle.bracket.1)
            );
            Ok((HAMILTONIAN_TAG, s))
        }
        Command::Noise(_) => {
            let spec = config.system_spec();
            let idle = coupler::find_idle_frequency(&spec, &config.idle_search(&spec))?;
            let noise = NoiseConfig {
                sigma_wc: config.noise.sigma_wc_mhz,
                n_samples: config.noise.n_samples,
                seed: config.seed,
                bin_width: config.noise.bin_width_mhz,
            };
            let run = dephasing::run_noise_ensemble(&spec, &idle, &noise)?;
            let t2 = run.t2()?;
            eprintln!(
                "sigma_q1 = {:.4e} MHz, sigma_q2 = {:.4e} MHz, T2 = ({:.2}, {:.2}) us",
                run.sigma_q1, run.sigma_q2, t2.t2_q1, t2.t2_q2
            );
            Ok((dephasing::MODEL_TAG, curve_csv(&run.histogram.to_curve())))
        }
        Command::T2Sweep(_) => {
            let spec = config.system_spec();
            let idle = coupler::find_idle_frequency(&spec, &config.idle_search(&spec))?;
            let curve = dephasing::sigma_sweep(
                &spec,
                &idle,
                &config.t2_sweep.sigmas_mhz,
                config.t2_sweep.n_samples,
                config.seed,
            )?;
            Ok((dephasing::MODEL_TAG, curve_csv(&curve)))
        }
        Command::Loss => {
            let report = loss::total_quality(&config.loss)?;
            let rows = [
                ("frequency_GHz", config.loss.frequency_ghz),
                ("gamma0_per_s", config.loss.gamma0),
                ("sum_P_tan_delta", config.loss.dielectric_loss()),
                ("Q_dielectric", report.q_dielectric),
                ("Q_total", report.q_total),
                ("T1_us", report.t1_us),
            ];
            Ok((LOSS_TAG, key_value_csv(&rows)))
        }
        Command::Qratio => {
            let q = &config.qratio;
            if !(q.q_tsv_min > 0.0 && q.q_tsv_max > q.q_tsv_min && q.points >= 2) {
                return Err(CliError::Config("qratio grid needs 0 < q_tsv_min < q_tsv_max and points >= 2".into()));
            }
            let grid = log_grid(q.q_tsv_min, q.q_tsv_max, q.points);
            let curve = match (q.p_planar, q.p_tsv) {
                (Some(pp), Some(pt)) => loss::q_ratio_curve(pp, pt, q.tan_delta, &grid)?,
                (None, None) => {
                    let table = match &q.table {
                        Some(path) => {
                            let file = std::fs::File::open(path)
                                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                            loss::load_participation_table(std::io::BufReader::new(file))?
                        }
                        None => ParticipationTable::bundled(),
                    };
                    let mut columns = Vec::with_capacity(q.thicknesses_um.len());
                    for &t in &q.thicknesses_um {
                        let (pp, pt) = table.interpolate(t);
                        let c = loss::q_ratio_curve(pp, pt, q.tan_delta, &grid)?;
                        columns.push(Column::new(
                            format!("ratio_{t}um"),
                            Unit::Dimensionless,
                            c.y[0].values.clone(),
                        ));
                    }
                    SweepCurve::new(Column::new("Q_TSV", Unit::Dimensionless, grid), columns)?
                }
                _ => return Err(CliError::Config("qratio needs both p_planar and p_tsv, or neither".into())),
            };
            Ok((loss::Q_RATIO_MODEL, curve_csv(&curve)))
        }
    }
}

/// `points` geometrically spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    coupler::linear_grid(a, b, points)
        .into_iter()
        .enumerate()
        .map(|(k, x)| if k == 0 { lo } else if k == points - 1 { hi } else { x.exp() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let config = RunConfig::default();
        let text = serde_json::to_string(&config).unwrap();
        assert_eq!(parse_config(&text).unwrap(), config);
    }

    #[test]
    fn type_errors_name_key_and_line() {
        let err = parse_config("{\n  \"noise\": {\n    \"sigma_wc_mhz\": \"big\"\n  }\n}").unwrap_err();
        let msg = err.to_string();
        assert_eq!(err.exit_code(), EXIT_CONFIG);
        assert!(msg.contains("noise.sigma_wc_mhz"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config("{\"noise\": {\"sigma\": 1.0}}").unwrap_err();
        assert!(err.to_string().contains("unknown field"), "{err}");
    }

    #[test]
    fn digest_ignores_output_path() {
        let a = RunConfig::default();
        let b = RunConfig {
            output: Some("elsewhere.csv".into()),
            ..RunConfig::default()
        };
        assert_eq!(config_digest(&a), config_digest(&b));
        let c = RunConfig { seed: 2, ..RunConfig::default() };
        assert_ne!(config_digest(&a), config_digest(&c));
        assert_eq!(config_digest(&a).len(), 16);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e4, 1e8, 5);
        assert_eq!(g[0], 1e4);
        assert_eq!(g[4], 1e8);
        assert!((g[2] - 1e6).abs() < 1e-6);
    }

    #[test]
    fn domain_errors_exit_one() {
        assert_eq!(CliError::Run(Error::Domain("x".into())).exit_code(), EXIT_FAILURE);
        assert_eq!(CliError::Run(Error::Parse { line: 1, message: "x".into() }).exit_code(), EXIT_CONFIG);
    }
}
