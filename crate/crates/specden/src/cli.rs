//! Batch front end: JSON config in, plot-ready CSV out. Every command is
//! deterministic for a fixed config and seed, so runs can be archived and
//! reproduced byte for byte.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    discrete_bath_oracle, emission_dynamics, fitted_decay_rate, pseudomode_emission,
};
use crate::error::{
    ConfigError, DynamicsError, FormatError, GridError, QuadratureFailure, ReconstructError,
};
use crate::experiments::{
    cavity_qubit_spectrum, nonmarkovianity_ratio, transmon_spectrum, CavityQubitParams,
    TransmonParams,
};
use crate::grid::FrequencyGrid;
use crate::io;
use crate::reconstruct::{
    flatness_function, markovianity_verdict, point_flags, propagate_noise, reconstruct_sd,
    MeasuredSpectrum, PointFlag, Verdict, DEFAULT_R_FLOOR, DEFAULT_VERDICT_REL_TOL,
};
use crate::scattering::{fgr_rate, forward_spectrum, ProbeConfig};
use crate::sd::SpectralDensity;

const EXIT_OK: i32 = 0;
const EXIT_CONFIG: i32 = 2;
const EXIT_NUMERIC: i32 = 3;
const EXIT_DATA: i32 = 4;

#[derive(Parser)]
#[command(
    name = "specden",
    about = "Forward and inverse spectral-density measurements over a waveguide probe",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate reflection/transmission spectra for a configured reservoir
    Forward(CommonArgs),
    /// Invert a measured spectrum to the spectral density
    Reconstruct(CommonArgs),
    /// Compute the flatness profile and the Markovianity verdict
    Flatness(CommonArgs),
    /// Emission dynamics with a discrete-bath cross-check and rate summary
    Decay(CommonArgs),
    /// Three-way solver comparison for a Lorentzian reservoir
    Oracle(CommonArgs),
    /// Closed-form experimental models (transmon, cavity-qubit)
    Experiment(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Forward(a)
            | Command::Reconstruct(a)
            | Command::Flatness(a)
            | Command::Decay(a)
            | Command::Oracle(a)
            | Command::Experiment(a) => a,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: from config, else current directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the frequency grid as min:max:count
    #[arg(long)]
    grid: Option<String>,
    /// Override the noise seed
    #[arg(long)]
    seed: Option<u64>,
    /// Add Gaussian measurement noise as sigmaR,sigmaT
    #[arg(long)]
    noise: Option<String>,
}

/// One JSON document drives every subcommand; each command reads the
/// sections it needs and rejects configs that mix generator and
/// measurement inputs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    probe: Option<ProbeSpec>,
    sd: Option<SpectralDensity>,
    spectrum: Option<PathBuf>,
    grid: Option<GridSpec>,
    noise: Option<NoiseSpec>,
    out: Option<PathBuf>,
    r_floor: Option<f64>,
    dynamics: Option<DynamicsSpec>,
    model: Option<ModelSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbeSpec {
    omega0: f64,
    /// Probe coupling V; natural units default.
    #[serde(default = "one")]
    coupling: f64,
    /// Group velocity; natural units default.
    #[serde(default = "one")]
    velocity: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GridSpec {
    Range { min: f64, max: f64, count: usize },
    List(Vec<f64>),
}

impl GridSpec {
    fn build(&self) -> Result<FrequencyGrid, GridError> {
        match self {
            GridSpec::Range { min, max, count } => FrequencyGrid::linspace(*min, *max, *count),
            GridSpec::List(values) => FrequencyGrid::new(values.clone()),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSpec {
    sigma_r: f64,
    sigma_t: f64,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DynamicsSpec {
    t_max: f64,
    #[serde(default = "default_n_t")]
    n_t: usize,
    #[serde(default = "default_n_modes")]
    n_modes: usize,
}

fn default_n_t() -> usize {
    201
}

fn default_n_modes() -> usize {
    2000
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
enum ModelSpec {
    Transmon(TransmonParams),
    CavityQubit(CavityQubitParams),
}

#[derive(Serialize)]
struct DecaySummary {
    fgr_rate: f64,
    /// Null when too few samples carry population to fit a slope.
    fitted_rate: Option<f64>,
    max_abs_deviation: f64,
}

/// Failure channel, ordered by exit code.
enum Failure {
    Config(String),
    Numeric(String),
    Data(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numeric(_) => EXIT_NUMERIC,
            Failure::Data(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numeric(m) | Failure::Data(m) => m,
        }
    }
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<ReconstructError> for Failure {
    fn from(e: ReconstructError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<QuadratureFailure> for Failure {
    fn from(e: QuadratureFailure) -> Self {
        Failure::Numeric(e.to_string())
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        Failure::Numeric(e.to_string())
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Data(e.to_string())
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    run_from(std::env::args())
}

/// Same as [`run`] with explicit arguments, for tests.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            failure.exit_code()
        }
    }
}

fn dispatch(command: &Command) -> Result<(), Failure> {
    let args = command.args();
    let cfg = load_config(args)?;
    let out_dir = resolve_out_dir(args, &cfg)?;
    match command {
        Command::Forward(_) => cmd_forward(args, &cfg, &out_dir),
        Command::Reconstruct(_) => cmd_reconstruct(&cfg, &out_dir),
        Command::Flatness(_) => cmd_flatness(&cfg, &out_dir),
        Command::Decay(_) => cmd_decay(&cfg, &out_dir),
        Command::Oracle(_) => cmd_oracle(&cfg, &out_dir),
        Command::Experiment(args_cmd) => cmd_experiment(args_cmd, &cfg, &out_dir),
    }
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        Failure::Config(format!("cannot read {}: {e}", args.config.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))
}

fn resolve_out_dir(args: &CommonArgs, cfg: &RunConfig) -> Result<PathBuf, Failure> {
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn resolve_grid(args: &CommonArgs, cfg: &RunConfig) -> Result<FrequencyGrid, Failure> {
    if let Some(flag) = &args.grid {
        let parts: Vec<&str> = flag.split(':').collect();
        if parts.len() != 3 {
            return Err(Failure::Config(format!(
                "--grid expects min:max:count, got {flag:?}"
            )));
        }
        let min: f64 = parts[0]
            .parse()
            .map_err(|_| Failure::Config(format!("--grid: bad min {:?}", parts[0])))?;
        let max: f64 = parts[1]
            .parse()
            .map_err(|_| Failure::Config(format!("--grid: bad max {:?}", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| Failure::Config(format!("--grid: bad count {:?}", parts[2])))?;
        return Ok(FrequencyGrid::linspace(min, max, count)?);
    }
    match &cfg.grid {
        Some(spec) => Ok(spec.build()?),
        None => Err(Failure::Config(
            "no frequency grid: add a \"grid\" section or pass --grid".into(),
        )),
    }
}

fn resolve_noise(args: &CommonArgs, cfg: &RunConfig) -> Result<Option<(f64, f64, u64)>, Failure> {
    let from_flag = match &args.noise {
        Some(flag) => {
            let parts: Vec<&str> = flag.split(',').collect();
            if parts.len() != 2 {
                return Err(Failure::Config(format!(
                    "--noise expects sigmaR,sigmaT, got {flag:?}"
                )));
            }
            let parse = |s: &str| -> Result<f64, Failure> {
                s.parse()
                    .map_err(|_| Failure::Config(format!("--noise: bad sigma {s:?}")))
            };
            Some((parse(parts[0])?, parse(parts[1])?))
        }
        None => None,
    };
    let (sigma_r, sigma_t, cfg_seed) = match (from_flag, &cfg.noise) {
        (Some((sr, st)), spec) => (sr, st, spec.as_ref().and_then(|s| s.seed)),
        (None, Some(spec)) => (spec.sigma_r, spec.sigma_t, spec.seed),
        (None, None) => {
            if args.seed.is_some() {
                eprintln!("note: --seed has no effect without noise");
            }
            return Ok(None);
        }
    };
    for (name, sigma) in [("sigma_r", sigma_r), ("sigma_t", sigma_t)] {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Failure::Config(format!(
                "noise {name} must be non-negative and finite, got {sigma}"
            )));
        }
    }
    let seed = args.seed.or(cfg_seed).unwrap_or_else(rand::random);
    Ok(Some((sigma_r, sigma_t, seed)))
}

fn require_sd<'a>(cfg: &'a RunConfig, command: &str) -> Result<&'a SpectralDensity, Failure> {
    if cfg.spectrum.is_some() {
        return Err(Failure::Config(format!(
            "{command} generates its own spectrum; remove the \"spectrum\" path"
        )));
    }
    cfg.sd.as_ref().ok_or_else(|| {
        Failure::Config(format!("{command} needs an \"sd\" section in the config"))
    })
}

fn require_spectrum<'a>(cfg: &'a RunConfig, command: &str) -> Result<&'a Path, Failure> {
    if cfg.sd.is_some() {
        return Err(Failure::Config(format!(
            "{command} reads a spectrum file; remove the \"sd\" section"
        )));
    }
    cfg.spectrum.as_deref().ok_or_else(|| {
        Failure::Config(format!("{command} needs a \"spectrum\" path in the config"))
    })
}

fn require_probe<'a>(cfg: &'a RunConfig, command: &str) -> Result<&'a ProbeSpec, Failure> {
    cfg.probe.as_ref().ok_or_else(|| {
        Failure::Config(format!("{command} needs a \"probe\" section in the config"))
    })
}

fn require_dynamics<'a>(cfg: &'a RunConfig, command: &str) -> Result<&'a DynamicsSpec, Failure> {
    cfg.dynamics.as_ref().ok_or_else(|| {
        Failure::Config(format!(
            "{command} needs a \"dynamics\" section in the config"
        ))
    })
}

fn r_floor(cfg: &RunConfig) -> f64 {
    cfg.r_floor.unwrap_or(DEFAULT_R_FLOOR)
}

fn cmd_forward(args: &CommonArgs, cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    let sd = require_sd(cfg, "forward")?;
    let probe = require_probe(cfg, "forward")?;
    let grid = resolve_grid(args, cfg)?;
    let probe_cfg = ProbeConfig::new(probe.omega0, probe.coupling, probe.velocity, grid)?;
    let spectrum = forward_spectrum(sd, &probe_cfg)?;
    let path = out_dir.join("spectrum.csv");
    match resolve_noise(args, cfg)? {
        None => io::write_spectrum_csv(&path, &spectrum)?,
        Some((sigma_r, sigma_t, seed)) => {
            // Intensity noise destroys the phase information, so the noisy
            // file carries R, T and the sigmas instead of amplitudes.
            eprintln!("seed: {seed}");
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = spectrum.len();
            let mut r_values = Vec::with_capacity(n);
            let mut t_values = Vec::with_capacity(n);
            for i in 0..n {
                let draw = |rng: &mut rand_chacha::ChaCha8Rng, sigma: f64| {
                    if sigma == 0.0 {
                        0.0
                    } else {
                        Normal::new(0.0, sigma).unwrap().sample(rng)
                    }
                };
                r_values.push((spectrum.reflectance(i) + draw(&mut rng, sigma_r)).clamp(0.0, 1.0));
                t_values
                    .push((spectrum.transmittance(i) + draw(&mut rng, sigma_t)).clamp(0.0, 1.0));
            }
            let ms = MeasuredSpectrum::with_uncertainty(
                probe_cfg.grid.clone(),
                r_values,
                t_values,
                vec![sigma_r; n],
                vec![sigma_t; n],
            )?;
            io::write_measured_csv(&path, &ms)?;
        }
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn verdict_line(f_values: &[f64], flags: &[PointFlag]) -> String {
    let usable: Vec<f64> = f_values
        .iter()
        .zip(flags)
        .map(|(&f, flag)| if flag.is_ok() { f } else { f64::NAN })
        .collect();
    match markovianity_verdict(&usable, DEFAULT_VERDICT_REL_TOL) {
        Ok(Verdict::Flat) => "markovian: yes".into(),
        Ok(Verdict::Structured) => "markovian: no".into(),
        Err(e) => format!("markovian: unknown ({e})"),
    }
}

fn warn_flagged(flags: &[PointFlag]) {
    let violations = flags
        .iter()
        .filter(|f| **f == PointFlag::FluxViolation)
        .count();
    if violations > 0 {
        eprintln!("warning: {violations} flux-violating points flagged");
    }
    let low = flags
        .iter()
        .filter(|f| **f == PointFlag::LowReflectance)
        .count();
    if low > 0 {
        eprintln!("note: {low} points below the reflectance floor");
    }
}

fn cmd_reconstruct(cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    let path = require_spectrum(cfg, "reconstruct")?;
    let probe = require_probe(cfg, "reconstruct")?;
    let ms = io::read_measured_csv(path)?;
    let floor = r_floor(cfg);
    let rec = if ms.has_uncertainty() {
        propagate_noise(&ms, probe.coupling, probe.velocity)?
    } else {
        reconstruct_sd(&ms, probe.coupling, probe.velocity, floor)?
    };
    let out_path = out_dir.join("reconstruction.csv");
    io::write_reconstruction_csv(&out_path, &rec)?;
    warn_flagged(rec.flags());
    let f_values = flatness_function(&ms, floor)?;
    println!("{}", verdict_line(&f_values, rec.flags()));
    eprintln!("wrote {}", out_path.display());
    Ok(())
}

fn cmd_flatness(cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    let path = require_spectrum(cfg, "flatness")?;
    let ms = io::read_measured_csv(path)?;
    let floor = r_floor(cfg);
    let f_values = flatness_function(&ms, floor)?;
    let flags = point_flags(&ms, floor)?;
    let out_path = out_dir.join("flatness.csv");
    io::write_flatness_csv(&out_path, ms.grid(), &f_values)?;
    warn_flagged(&flags);
    println!("{}", verdict_line(&f_values, &flags));
    eprintln!("wrote {}", out_path.display());
    Ok(())
}

fn cmd_decay(cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    let sd = require_sd(cfg, "decay")?;
    let probe = require_probe(cfg, "decay")?;
    let dynamics = require_dynamics(cfg, "decay")?;
    // The cheap solver runs first so budget blowups surface before the
    // quadrature-heavy inversion starts.
    let discrete = discrete_bath_oracle(
        sd,
        probe.omega0,
        dynamics.n_modes,
        dynamics.t_max,
        dynamics.n_t,
    )?;
    let inversion = emission_dynamics(sd, probe.omega0, dynamics.t_max, dynamics.n_t)?;
    io::write_history_csv(&out_dir.join("emission.csv"), &inversion)?;
    io::write_history_csv(&out_dir.join("emission_oracle.csv"), &discrete)?;
    let fitted = fitted_decay_rate(&inversion);
    let summary = DecaySummary {
        fgr_rate: fgr_rate(sd, probe.omega0),
        fitted_rate: fitted.is_finite().then_some(fitted),
        max_abs_deviation: inversion.max_modulus_deviation(&discrete),
    };
    let json = serde_json::to_string_pretty(&summary)
        .expect("summary serialization cannot fail");
    let summary_path = out_dir.join("decay_summary.json");
    std::fs::write(&summary_path, json + "\n").map_err(|e| FormatError::Io {
        path: summary_path.display().to_string(),
        source: e,
    })?;
    eprintln!("wrote {}", out_dir.join("emission.csv").display());
    eprintln!("wrote {}", out_dir.join("emission_oracle.csv").display());
    eprintln!("wrote {}", summary_path.display());
    Ok(())
}

fn cmd_oracle(cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    let sd = require_sd(cfg, "oracle")?;
    let probe = require_probe(cfg, "oracle")?;
    let dynamics = require_dynamics(cfg, "oracle")?;
    let params = match sd {
        SpectralDensity::Lorentzian { params, .. } => params,
        other => {
            return Err(Failure::Config(format!(
                "oracle needs a lorentzian density, got kind {:?}",
                other.kind_name()
            )))
        }
    };
    let pseudomode =
        pseudomode_emission(params, probe.omega0, dynamics.t_max, dynamics.n_t)?;
    let discrete = discrete_bath_oracle(
        sd,
        probe.omega0,
        dynamics.n_modes,
        dynamics.t_max,
        dynamics.n_t,
    )?;
    let inversion = emission_dynamics(sd, probe.omega0, dynamics.t_max, dynamics.n_t)?;
    let path = out_dir.join("oracle.csv");
    io::write_oracle_csv(&path, &inversion, &pseudomode, &discrete)?;
    println!(
        "inversion_vs_pseudomode: {}",
        inversion.max_modulus_deviation(&pseudomode)
    );
    println!(
        "inversion_vs_discrete: {}",
        inversion.max_modulus_deviation(&discrete)
    );
    println!(
        "pseudomode_vs_discrete: {}",
        pseudomode.max_modulus_deviation(&discrete)
    );
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_experiment(args: &CommonArgs, cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    if cfg.sd.is_some() || cfg.spectrum.is_some() {
        return Err(Failure::Config(
            "experiment uses a \"model\" section; remove \"sd\" and \"spectrum\"".into(),
        ));
    }
    let model = cfg.model.as_ref().ok_or_else(|| {
        Failure::Config("experiment needs a \"model\" section in the config".into())
    })?;
    let grid = resolve_grid(args, cfg)?;
    let spectrum = match model {
        ModelSpec::Transmon(p) => transmon_spectrum(p, &grid)?,
        ModelSpec::CavityQubit(p) => {
            let ratio = nonmarkovianity_ratio(p)?;
            println!("nonmarkovianity_ratio: {ratio}");
            cavity_qubit_spectrum(p, &grid)?
        }
    };
    let path = out_dir.join("model_spectrum.csv");
    io::write_spectrum_csv(&path, &spectrum)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
