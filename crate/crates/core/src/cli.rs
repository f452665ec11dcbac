//! Command-line front end.
//!
//! Exit codes: `0` success, `1` bad input or configuration, `2` a run that
//! completed with a negative outcome (infeasible cutoff search, all bootstrap
//! replicates infeasible, or a violated bound in `verify`).

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{invalid, Error, Result};
use crate::format::{fmt_f64, to_json_string};
use crate::io::{read_observations, write_observations, ObservationTable};
use crate::model::{DensitySpec, Fraction, RngContract};
use crate::simulate::{
    beta_valley_density, bootstrap_cutoff, simulate_dataset, unimodal_misspec_density, valley_density, ValleyParams,
};
use crate::ucut::{ucut, UcutConfig};
use crate::verify::{
    deviation_bounds_report, flat_fluctuation, histogram_risk_experiment, minimal_m_probe, rate_l1_grenander,
    ucut_sensitivity_suite, Experiment, HistogramSetup, MRule, SensitivitySetup, Sweep,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ucut", version, about = "Cutoff selection for U-shaped capture frequency ratios")]
pub struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select the cutoffs of a CFR table.
    Cut(CutArgs),
    /// Generate a synthetic dataset from a valley model.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo verification suite.
    Verify(VerifyArgs),
    /// Bootstrap the right cutoff on subsamples.
    Bootstrap(BootstrapArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Observation CSV (`id,count` with a `# m=` line, or `id,cfr`).
    pub input: PathBuf,
    /// Binomial size; overrides the file's `# m=` line.
    #[arg(long)]
    pub m: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CutFlags {
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dl: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dr: f64,
    /// Largest left cutoff tried (default `mu - 0.05`).
    #[arg(long)]
    pub clmax: Option<f64>,
    /// Smallest right cutoff tried (default `mu + 0.05`).
    #[arg(long)]
    pub crmin: Option<f64>,
    #[arg(long, default_value_t = 0.001)]
    pub gamma: f64,
}

impl CutFlags {
    pub fn config(&self) -> Result<UcutConfig> {
        let base = UcutConfig::new(self.mu, self.dl, self.dr);
        let config = base.with_bounds(self.clmax.unwrap_or(base.c_l_max), self.crmin.unwrap_or(base.c_r_min)).with_gamma(self.gamma);
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct CutArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub flags: CutFlags,
    /// Result JSON; `discoveries.csv` is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Linear,
    Beta,
    Unimodal,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Model::Linear)]
    pub model: Model,
    #[arg(long, default_value_t = 0.3)]
    pub cl: f64,
    #[arg(long, default_value_t = 0.9)]
    pub cr: f64,
    /// Flat height (linear model).
    #[arg(long, default_value_t = 1.0)]
    pub delta_m: f64,
    /// Jump at the left cutoff (linear model).
    #[arg(long, default_value_t = 0.5)]
    pub delta_l: f64,
    /// Jump at the right cutoff (linear model).
    #[arg(long, default_value_t = 0.5)]
    pub delta_r: f64,
    /// Left slope (linear model).
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    pub sl: f64,
    /// Right slope (linear model).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sr: f64,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Binomial size, or `inf` to write the latent values as ratios.
    #[arg(long, default_value = "1000")]
    pub m: MArg,
    #[arg(long, default_value_t = 0.5)]
    pub tau0: f64,
    #[arg(long, env = "UCUT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// A binomial size or `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MArg(pub Option<u64>);

impl std::str::FromStr for MArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "inf" {
            return Ok(MArg(None));
        }
        s.parse::<u64>().map(|m| MArg(Some(m))).map_err(|_| format!("expected a positive integer or `inf`, got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Rates,
    Bounds,
    Histogram,
    Sensitivity,
    Fluctuation,
    Probe,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// JSON file overriding the suite defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, env = "UCUT_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub flags: CutFlags,
    #[arg(long, default_value_t = 0.7)]
    pub frac: f64,
    /// Number of replicates.
    #[arg(long = "B", visible_alias = "b", default_value_t = 20)]
    pub b: usize,
    #[arg(long, env = "UCUT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Overrides read from `verify --config`. Fields not used by a suite are
/// ignored.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub reps: Option<usize>,
    pub n_grid: Option<Vec<usize>>,
    pub m_grid: Option<Vec<u64>>,
    pub m_rule: Option<MRule>,
    /// Built-in density name for the rates and histogram suites.
    pub spec: Option<String>,
    /// Truncation of the bounds suite.
    pub a: Option<f64>,
    pub histogram: Option<HistogramSetup>,
    pub sweep: Option<Sweep>,
    pub values: Option<Vec<f64>>,
    pub base: Option<ValleyParams>,
    pub setup: Option<SensitivitySetup>,
    pub t0: Option<f64>,
}

/// Built-in densities by name: `uniform`, `two_step`, `linear_valley`,
/// `beta_valley`, `unimodal`.
pub fn builtin_spec(name: &str) -> Result<DensitySpec> {
    match name {
        "uniform" => Ok(DensitySpec::uniform()),
        "two_step" => Ok(DensitySpec::two_step()),
        "linear_valley" => valley_density(&ValleyParams::default()),
        "beta_valley" => beta_valley_density(0.3, 0.9),
        "unimodal" => unimodal_misspec_density(0.3, 0.9),
        _ => Err(invalid(format!("unknown density {name:?}"))),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let outcome = match cli.threads {
        Some(0) => Err(invalid("--threads must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| invalid(e.to_string()))
            .and_then(|pool| pool.install(|| dispatch(&cli.command))),
        None => dispatch(&cli.command),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: &Command) -> Result<i32> {
    match command {
        Command::Cut(a) => cmd_cut(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bootstrap(a) => cmd_bootstrap(a),
    }
}

fn read_input(input: &InputArgs) -> Result<ObservationTable> {
    let file = File::open(&input.input).map_err(|e| invalid(format!("cannot open {}: {e}", input.input.display())))?;
    read_observations(std::io::BufReader::new(file), input.m)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| invalid(format!("cannot create {}: {e}", path.display())))?))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn cmd_cut(args: &CutArgs) -> Result<i32> {
    let config = args.flags.config()?;
    let obs = read_input(&args.input)?.obs;
    let result = ucut(&obs, &config)?;
    write_text(&args.out, &result.to_json()?)?;

    let path = args.out.parent().unwrap_or(Path::new("")).join("discoveries.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(["id", "cfr"])?;
    if let Some(c_r) = result.c_r_star {
        let cut = Fraction::from_decimal(c_r).ok_or_else(|| invalid("cutoff is not representable"))?;
        for i in obs.sorted_indices().into_iter().filter(|&i| !obs.le(i, cut)) {
            let id = obs.ids().map_or_else(|| (i + 1).to_string(), |ids| ids[i].clone());
            w.write_record([id, fmt_f64(obs.ratio(i))])?;
        }
    }
    w.flush()?;

    if result.feasible {
        Ok(EXIT_OK)
    } else {
        eprintln!("no cutoff pair satisfies the gap constraint");
        Ok(EXIT_NEGATIVE)
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let (name, f) = match args.model {
        Model::Linear => {
            let p = ValleyParams {
                c_l: args.cl,
                c_r: args.cr,
                delta_m: args.delta_m,
                delta_l: args.delta_l,
                delta_r: args.delta_r,
                s_l: args.sl,
                s_r: args.sr,
            };
            ("linear", valley_density(&p)?)
        }
        Model::Beta => ("beta", beta_valley_density(args.cl, args.cr)?),
        Model::Unimodal => ("unimodal", unimodal_misspec_density(args.cl, args.cr)?),
    };
    let obs = simulate_dataset(&f, args.n, args.m.0, args.tau0, &RngContract::new(args.seed))?;
    let mut meta = vec![("model".to_string(), name.to_string()), ("c_l".into(), fmt_f64(args.cl)), ("c_r".into(), fmt_f64(args.cr))];
    if args.model == Model::Linear {
        for (k, v) in [("delta_m", args.delta_m), ("delta_l", args.delta_l), ("delta_r", args.delta_r), ("s_l", args.sl), ("s_r", args.sr)] {
            meta.push((k.into(), fmt_f64(v)));
        }
    }
    meta.push(("n".into(), args.n.to_string()));
    if args.m.0.is_none() {
        meta.push(("m".into(), "inf".into()));
    }
    meta.push(("tau0".into(), fmt_f64(args.tau0)));
    meta.push(("seed".into(), args.seed.to_string()));
    let mut w = create(&args.out)?;
    write_observations(&obs, &meta, &mut w)?;
    w.flush()?;
    Ok(EXIT_OK)
}

fn write_experiment(dir: &Path, stem: &str, report: &impl Experiment) -> Result<()> {
    let mut w = create(&dir.join(format!("{stem}.csv")))?;
    report.write_tidy_csv(&mut w)?;
    w.flush()?;
    write_text(&dir.join(format!("{stem}_summary.json")), &report.summary_json()?)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let cfg: VerifyConfig = match &args.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => VerifyConfig::default(),
    };
    fs::create_dir_all(&args.out)?;
    let rng = RngContract::new(args.seed);
    let reps = cfg.reps.unwrap_or(30);
    let spec = |default: &str| builtin_spec(cfg.spec.as_deref().unwrap_or(default));
    match args.suite {
        Suite::Rates => {
            let n_grid = cfg.n_grid.clone().unwrap_or(vec![1000, 4000, 16000]);
            let m_rule = cfg.m_rule.unwrap_or(MRule::Power { coef: 10.0, exponent: 2.0 / 3.0 });
            let r = rate_l1_grenander(&spec("two_step")?, &n_grid, m_rule, reps, &rng)?;
            if r.wide_ci {
                eprintln!("note: slope {:.3} rests on few replicates; treat its interval as wide", r.slope);
            }
            write_experiment(&args.out, "rates", &r)?;
        }
        Suite::Bounds => {
            let names = ["uniform", "two_step", "linear_valley", "beta_valley"];
            let specs = names.iter().map(|&n| Ok((n.to_string(), builtin_spec(n)?))).collect::<Result<Vec<_>>>()?;
            let m_grid = cfg.m_grid.clone().unwrap_or(vec![10, 100, 1000, 10_000]);
            let r = deviation_bounds_report(&specs, &m_grid, cfg.a.unwrap_or(0.1))?;
            write_experiment(&args.out, "bounds", &r)?;
            if r.violations > 0 {
                eprintln!("{} bound violations", r.violations);
                return Ok(EXIT_NEGATIVE);
            }
        }
        Suite::Histogram => {
            let n_grid = cfg.n_grid.clone().unwrap_or(vec![1000, 8000]);
            let mut setup = cfg.histogram.unwrap_or_default();
            if let Some(reps) = cfg.reps {
                setup.reps = reps;
            }
            let r = histogram_risk_experiment(&spec("beta_valley")?, &n_grid, &setup, &rng)?;
            write_experiment(&args.out, "histogram", &r)?;
        }
        Suite::Sensitivity => {
            let sweep = cfg.sweep.unwrap_or(Sweep::M);
            let values = cfg.values.clone().unwrap_or_else(|| sweep.default_values());
            let mut setup = cfg.setup.unwrap_or_default();
            if let Some(reps) = cfg.reps {
                setup.reps = reps;
            }
            let r = ucut_sensitivity_suite(&cfg.base.unwrap_or_default(), sweep, &values, &setup, &rng)?;
            write_experiment(&args.out, "sensitivity", &r)?;
        }
        Suite::Fluctuation => {
            let n_grid = cfg.n_grid.clone().unwrap_or(vec![1000, 4000, 16000]);
            let m_rule = cfg.m_rule.unwrap_or(MRule::Infinite);
            let r = flat_fluctuation(&n_grid, cfg.t0.unwrap_or(0.5), m_rule, reps, &rng)?;
            write_experiment(&args.out, "fluctuation", &r)?;
        }
        Suite::Probe => {
            let n_grid = cfg.n_grid.clone().unwrap_or(vec![1000, 4000, 16000]);
            let r = minimal_m_probe(&spec("two_step")?, &n_grid, reps, &rng)?;
            write_experiment(&args.out, "probe_small_m", &r.too_small)?;
            write_experiment(&args.out, "probe_adequate_m", &r.adequate)?;
            write_text(&args.out.join("probe_summary.json"), &to_json_string(&r)?)?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_bootstrap(args: &BootstrapArgs) -> Result<i32> {
    let config = args.flags.config()?;
    let obs = read_input(&args.input)?.obs;
    match bootstrap_cutoff(&obs, &config, args.frac, args.b, &RngContract::new(args.seed)) {
        Ok(summary) => {
            write_text(&args.out, &to_json_string(&summary)?)?;
            Ok(EXIT_OK)
        }
        Err(Error::AllInfeasible(b)) => {
            eprintln!("all {b} bootstrap replicates were infeasible");
            Ok(EXIT_NEGATIVE)
        }
        Err(e) => Err(e),
    }
}
