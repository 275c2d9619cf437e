use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use chp_core::config::RunConfig;
use chp_core::io::{self, JumpPolicy};
use chp_core::mc::{self, MCReport};
use chp_core::report::{self, PipelineSettings, ReproductionReport};
use chp_core::{Error, TickChainParams};

const EXIT_CONFIG: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Parser)]
#[command(name = "chawkes", version, about = "Compound Hawkes price models: simulation, calibration and limit-theorem checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 1 runs sequentially. Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Write the JSON result here (`-` prints it to stdout instead of the table).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Tick CSV with a `timestamp,price` header.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Number of sessions to use; the file must contain at least this many.
    #[arg(long)]
    days: Option<usize>,
    /// Tick size.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Record a k-tick move as k events instead of one.
    #[arg(long)]
    split_jumps: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one price path and write it as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Output CSV path (default: <output_dir>/path.csv).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Window length; overrides the configuration.
        #[arg(long)]
        window: Option<f64>,
    },
    /// Fit the tick chain and the exponential Hawkes model per session.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Monte Carlo check of the diffusion coefficient.
    VerifyFclt {
        #[command(flatten)]
        common: Common,
        /// Check the combined price-and-count coefficient instead.
        #[arg(long)]
        combined: bool,
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
    },
    /// Monte Carlo check of the price and count drift along a scale ladder.
    VerifyLln {
        #[command(flatten)]
        common: Common,
        /// Comma-separated scales; overrides the configuration.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
    },
    /// Brute-force estimate of the mark variance coefficient.
    SigmaOracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        p_prime: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
    /// Price quantile bands as JSON, CSV and SVG.
    Bands {
        #[command(flatten)]
        common: Common,
        /// Comma-separated grid times; overrides the configuration.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        /// Directory for bands.csv and bands.svg (default: output_dir or .).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare every reproducible published number with its computed value.
    Report {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        /// Run the calibration pipeline on sessions simulated from the published parameters.
        #[arg(long, conflicts_with = "data")]
        synthetic: bool,
        /// Session length for --synthetic, in seconds.
        #[arg(long, default_value_t = 23400.0)]
        session_length: f64,
    },
}

enum Failure {
    Core(Error),
    Acceptance(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Acceptance(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(EXIT_ACCEPTANCE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() {
                EXIT_CONFIG
            } else if e.is_data() {
                EXIT_DATA
            } else {
                1
            })
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, Error> {
    let path = common.config.as_deref().ok_or_else(|| Error::Config("--config is required".into()))?;
    RunConfig::from_path(path)
}

/// Writes JSON to `--json`, and prints either the table or the JSON.
fn emit<T: Serialize>(common: &Common, value: &T, table: &str) -> Result<(), Error> {
    match common.json.as_deref() {
        Some(p) if p == Path::new("-") => println!("{}", serde_json::to_string_pretty(value)?),
        Some(p) => {
            io::write_json(p, value)?;
            print!("{table}");
        }
        None => print!("{table}"),
    }
    Ok(())
}

fn output_dir(config: Option<&RunConfig>, explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| config.and_then(|c| c.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Simulate { common, out, window } => simulate(&common, out, window),
        Command::Estimate { common, data } => estimate(&common, &data),
        Command::VerifyFclt { common, combined, tolerance } => verify_fclt(&common, combined, tolerance),
        Command::VerifyLln { common, ladder, tolerance } => verify_lln(&common, ladder, tolerance),
        Command::SigmaOracle { common, p, p_prime, delta, steps, tolerance } => {
            sigma_oracle(&common, p, p_prime, delta, steps, tolerance)
        }
        Command::Bands { common, grid, out } => bands(&common, grid, out),
        Command::Report { common, data, synthetic, session_length } => {
            reproduction_report(&common, &data, synthetic, session_length)
        }
    }
}

#[derive(Serialize)]
struct SimulateSummary {
    csv: PathBuf,
    master_seed: u64,
    window: f64,
    events: usize,
    initial_price: f64,
    final_price: f64,
    regime_switches: usize,
}

fn simulate(common: &Common, out: Option<PathBuf>, window: Option<f64>) -> Outcome {
    let config = load_config(common)?;
    let seed = common.seed.unwrap_or(config.seed);
    let window = window.or(config.window).unwrap_or(config.mc.scale * config.mc.horizon);
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::Config(format!("window must be > 0, got {window}")).into());
    }
    let sim = config.model.simulate(window, chp_core::rng::StreamSeed::new(seed, 0))?;
    let csv = out.unwrap_or_else(|| output_dir(Some(&config), None).join("path.csv"));
    io::write_price_path_csv(&csv, &sim.path)?;
    let summary = SimulateSummary {
        csv: csv.clone(),
        master_seed: seed,
        window,
        events: sim.path.events.len(),
        initial_price: sim.path.s0,
        final_price: sim.path.price_at(window),
        regime_switches: sim.regimes.as_ref().map_or(0, |r| r.switches.len()),
    };
    let table = format!(
        "wrote {}\nevents        {}\nwindow        {}\ninitial price {}\nfinal price   {}\nswitches      {}\n",
        csv.display(),
        summary.events,
        summary.window,
        summary.initial_price,
        summary.final_price,
        summary.regime_switches
    );
    emit(common, &summary, &table)?;
    Ok(())
}

fn load_sessions(data: &DataArgs) -> Result<Vec<io::Ingested>, Error> {
    let path = data.data.as_deref().ok_or_else(|| Error::Config("--data is required".into()))?;
    let policy = if data.split_jumps { JumpPolicy::Split } else { JumpPolicy::Truncate };
    let mut sessions = io::ingest_days(path, data.delta, policy)?;
    if let Some(n) = data.days {
        if sessions.len() < n {
            return Err(Error::Data(format!("{} contains {} session(s), {n} requested", path.display(), sessions.len())));
        }
        sessions.truncate(n);
    }
    for s in &sessions {
        for w in &s.warnings {
            eprintln!("warning: {}: {w}", s.label.as_deref().unwrap_or("session"));
        }
    }
    Ok(sessions)
}

fn settings(config: Option<&RunConfig>, delta: f64) -> PipelineSettings {
    let mut s = PipelineSettings { delta, ..PipelineSettings::default() };
    if let Some(c) = config {
        s.sampling = c.sampling.clone();
    }
    s
}

fn optional_config(common: &Common) -> Result<Option<RunConfig>, Error> {
    common.config.as_deref().map(RunConfig::from_path).transpose()
}

fn estimate(common: &Common, data: &DataArgs) -> Outcome {
    let config = optional_config(common)?;
    let sessions = load_sessions(data)?;
    let source = data.data.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
    let section = report::data_section(&source, &sessions, &settings(config.as_ref(), data.delta))?;
    let table = ReproductionReport::new(Some(section.clone())).render_text();
    let table = table.split("\n== per-session fits").nth(1).map(|t| format!("== per-session fits{t}")).unwrap_or(table);
    emit(common, &section, &table)?;
    Ok(())
}

fn mc_table(r: &MCReport) -> String {
    let mut out = format!(
        "statistic       {}\nempirical       {:.6e}\ntheoretical     {:.6e}\nrelative error  {}\nmean events     {:.1}\nreplications    {}\nmaster seed     {}\n",
        r.statistic,
        r.empirical,
        r.theoretical,
        r.relative_error.map_or("-".into(), |e| format!("{e:.4}")),
        r.mean_events,
        r.seeds.replications,
        r.seeds.master_seed
    );
    if let Some(n) = &r.normality {
        out.push_str(&format!(
            "skewness        {:.4}\nexcess kurtosis {:.4}\nKS p-value      {:.4}\n",
            n.skewness, n.excess_kurtosis, n.ks_p_value
        ));
    }
    for c in &r.checks {
        out.push_str(&format!(
            "{:<15} {:.6e} vs {:.6e} ({})\n",
            c.name,
            c.empirical,
            c.theoretical,
            c.relative_error.map_or("-".into(), |e| format!("{e:.4}"))
        ));
    }
    if !r.ladder.is_empty() {
        out.push_str("\n       scale   mean events   price slope   rel. error   count rate   rel. error\n");
        for l in &r.ladder {
            out.push_str(&format!(
                "{:>12} {:>13.1} {:>13.6e} {:>12} {:>12.6e} {:>12.4}\n",
                l.scale,
                l.mean_events,
                l.price_slope,
                l.price_relative_error.map_or("-".into(), |e| format!("{e:.4}")),
                l.count_rate,
                l.count_relative_error
            ));
        }
    }
    for w in &r.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    out
}

fn verify_fclt(common: &Common, combined: bool, tolerance: f64) -> Outcome {
    let config = load_config(common)?;
    let mc_config = config.mc_config(common.seed, common.workers)?;
    let report = if combined {
        mc::verify_combined_clt(&mc_config, &config.model)?
    } else {
        mc::verify_fclt_model(&mc_config, &config.model)?
    };
    emit(common, &report, &mc_table(&report))?;
    match report.relative_error {
        Some(e) if e < tolerance => Ok(()),
        e => Err(Failure::Acceptance(format!("relative error {e:?} not below {tolerance}"))),
    }
}

fn verify_lln(common: &Common, ladder: Option<Vec<f64>>, tolerance: f64) -> Outcome {
    let config = load_config(common)?;
    let mc_config = config.mc_config(common.seed, common.workers)?;
    let n = config.mc.scale;
    let ladder = ladder.or_else(|| config.ladder.clone()).unwrap_or_else(|| vec![n / 1000.0, n / 100.0, n / 10.0, n]);
    let ladder: Vec<f64> = ladder.into_iter().map(|s| s.max(1.0)).collect();
    let report = mc::verify_lln(&mc_config, &config.model, &ladder)?;
    emit(common, &report, &mc_table(&report))?;
    let count = &report.checks[0];
    match (report.relative_error, count.relative_error) {
        (Some(e), Some(c)) if e < tolerance && c < 0.02 => Ok(()),
        (None, Some(c)) if c < 0.02 => Ok(()),
        (e, c) => Err(Failure::Acceptance(format!("price error {e:?} (limit {tolerance}), count error {c:?} (limit 0.02)"))),
    }
}

#[derive(Serialize)]
struct OracleOutput {
    tick: TickChainParams,
    closed_form: f64,
    oracle: mc::SigmaOracle,
    relative_error: f64,
    master_seed: u64,
}

fn sigma_oracle(
    common: &Common,
    p: Option<f64>,
    p_prime: Option<f64>,
    delta: f64,
    steps: Option<usize>,
    tolerance: f64,
) -> Outcome {
    let config = optional_config(common)?;
    let tick = match (p, p_prime, &config) {
        (Some(p), Some(q), _) => TickChainParams::new(delta, p, q)?,
        (None, None, Some(c)) => *c.model.tick(),
        _ => return Err(Error::Config("give --p and --p-prime, or --config".into()).into()),
    };
    let seed = common.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(1);
    let steps = steps.or(config.as_ref().and_then(|c| c.sigma_oracle_steps)).unwrap_or(1_000_000);
    let oracle = mc::sigma_oracle(&tick, steps, seed)?;
    let closed_form = tick.sigma_squared();
    let relative_error = (oracle.sigma_squared - closed_form).abs() / closed_form;
    let out = OracleOutput { tick, closed_form, oracle, relative_error, master_seed: seed };
    let table = format!(
        "closed form     {:.6e}\noracle          {:.6e} (SE {:.2e})\nrelative error  {:.4}\ncycles          {}\nsteps           {}\n",
        closed_form, oracle.sigma_squared, oracle.standard_error, relative_error, oracle.cycles, oracle.steps
    );
    emit(common, &out, &table)?;
    if relative_error < tolerance {
        Ok(())
    } else {
        Err(Failure::Acceptance(format!("relative error {relative_error:.4} not below {tolerance}")))
    }
}

fn bands(common: &Common, grid: Option<Vec<f64>>, out: Option<PathBuf>) -> Outcome {
    let config = load_config(common)?;
    let mc_config = config.mc_config(common.seed, common.workers)?;
    let grid = grid
        .or_else(|| config.time_grid.clone())
        .ok_or_else(|| Error::Config("give --grid or time_grid in the configuration".into()))?;
    let report = mc::quantile_bands(&mc_config, &config.model, &grid)?;
    let dir = output_dir(Some(&config), out);
    io::atomic_write(&dir.join("bands.csv"), report::bands_csv(&report).as_bytes())?;
    io::atomic_write(&dir.join("bands.svg"), report::bands_svg(&report).as_bytes())?;
    let mut table = format!("wrote {} and {}\n", dir.join("bands.csv").display(), dir.join("bands.svg").display());
    table.push_str(&report::bands_csv(&report));
    emit(common, &report, &table)?;
    Ok(())
}

fn reproduction_report(common: &Common, data: &DataArgs, synthetic: bool, session_length: f64) -> Outcome {
    let config = optional_config(common)?;
    let settings = settings(config.as_ref(), data.delta);
    let section = if synthetic {
        let seed = common.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(1);
        let sessions = report::synthetic_sessions(seed, session_length, 24.5)?;
        Some(report::data_section("synthetic", &sessions, &settings)?)
    } else if data.data.is_some() {
        let sessions = load_sessions(data)?;
        let source = data.data.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        Some(report::data_section(&source, &sessions, &settings)?)
    } else {
        None
    };
    let report = ReproductionReport::new(section);
    emit(common, &report, &report.render_text())?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Acceptance(format!("{} reproduction check(s) failed", report.failed)))
    }
}
