//! Monte Carlo verification of the limit theorems.
//!
//! Every experiment is a map over replication indices followed by a fold in
//! index order. Replication `i` draws from the streams of
//! `StreamSeed::new(master_seed, i)` (ladder rung `r` uses
//! `StreamSeed::for_rung`), so reports do not depend on the worker count.

use serde::{Deserialize, Serialize};

use crate::chains::{InitialMark, TickChainParams};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hawkes::{HawkesParams, RegimeHawkesParams};
use crate::price::{fclt_statistic, lln_drift, PriceModel};
use crate::rng::{Stream, StreamSeed};
use crate::stats;

/// Probability levels of the reported quantile bands.
pub const QUANTILE_LEVELS: [f64; 7] = [0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99];

/// Minimum mean event count below which a report carries a warning.
pub const MIN_MEAN_EVENTS: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MCConfig {
    pub replications: usize,
    /// Scale factor `n`.
    pub scale: f64,
    /// Macroscopic time `t`; paths are simulated on `[0, n·t)`.
    pub horizon: f64,
    pub master_seed: u64,
    /// Worker-count hint. Never affects results.
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
}

impl MCConfig {
    pub fn new(replications: usize, scale: f64, horizon: f64, master_seed: u64) -> Result<Self> {
        let c = Self { replications, scale, horizon, master_seed, workers: None };
        c.validate()?;
        Ok(c)
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::param("replications must be >= 1"));
        }
        if !(self.scale.is_finite() && self.scale >= 1.0) {
            return Err(Error::param(format!("scale n must be >= 1, got {}", self.scale)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::param(format!("horizon t must be > 0, got {}", self.horizon)));
        }
        Ok(())
    }

    fn require_replications(&self, min: usize) -> Result<()> {
        self.validate()?;
        if self.replications < min {
            return Err(Error::param(format!("need at least {min} replications, got {}", self.replications)));
        }
        Ok(())
    }

    pub fn window(&self) -> f64 {
        self.scale * self.horizon
    }

    pub fn execution(&self) -> Execution {
        Execution::from_workers(self.workers)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedInfo {
    pub master_seed: u64,
    pub replications: usize,
    pub derivation: String,
}

impl SeedInfo {
    fn new(config: &MCConfig) -> Self {
        Self {
            master_seed: config.master_seed,
            replications: config.replications,
            derivation: "ChaCha8(master_seed), stream = 8*index + purpose; ladder index = (rung << 32) | replication"
                .into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub time: f64,
    /// One value per entry of [`QUANTILE_LEVELS`].
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityScreen {
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
}

impl NormalityScreen {
    pub fn of(values: &[f64]) -> Self {
        let ks = stats::ks_fitted_normal(values);
        Self {
            skewness: stats::skewness(values),
            excess_kurtosis: stats::excess_kurtosis(values),
            ks_statistic: ks.statistic,
            ks_p_value: ks.p_value,
        }
    }

    pub fn passes(&self, kurtosis_limit: f64) -> bool {
        self.excess_kurtosis.abs() < kurtosis_limit
    }
}

/// A secondary empirical-vs-theoretical comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub empirical: f64,
    pub theoretical: f64,
    pub relative_error: Option<f64>,
}

impl Check {
    fn new(name: &str, empirical: f64, theoretical: f64) -> Self {
        Self { name: name.into(), empirical, theoretical, relative_error: relative_error(empirical, theoretical) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub scale: f64,
    pub mean_events: f64,
    /// Mean of `(S(nt) − S0)/n` and its Monte Carlo standard error.
    pub price_slope: f64,
    pub price_slope_se: f64,
    pub price_theoretical: f64,
    pub price_relative_error: Option<f64>,
    /// Mean of `N(nt)/n`.
    pub count_rate: f64,
    pub count_theoretical: f64,
    pub count_relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCReport {
    pub statistic: String,
    pub empirical: f64,
    pub theoretical: f64,
    pub relative_error: Option<f64>,
    pub scale: f64,
    pub horizon: f64,
    pub mean_events: f64,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quantiles: Vec<QuantileRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normality: Option<NormalityScreen>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ladder: Vec<LadderRung>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    pub seeds: SeedInfo,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub fn relative_error(empirical: f64, theoretical: f64) -> Option<f64> {
    (theoretical != 0.0).then(|| (empirical - theoretical).abs() / theoretical.abs())
}

impl MCReport {
    /// Number of ladder steps along which the price-slope error shrank.
    pub fn shrinking_steps(&self) -> usize {
        self.ladder
            .windows(2)
            .filter(|w| match (w[0].price_relative_error, w[1].price_relative_error) {
                (Some(a), Some(b)) => b < a,
                _ => false,
            })
            .count()
    }

    fn base(statistic: &str, config: &MCConfig, empirical: f64, theoretical: f64, values: Vec<f64>, mean_events: f64) -> Self {
        let mut warnings = Vec::new();
        if mean_events < MIN_MEAN_EVENTS {
            warnings.push(format!(
                "mean event count {mean_events:.1} below {MIN_MEAN_EVENTS}; the limit approximation may be poor"
            ));
        }
        for w in &warnings {
            log::warn!("{statistic}: {w}");
        }
        Self {
            statistic: statistic.into(),
            empirical,
            theoretical,
            relative_error: relative_error(empirical, theoretical),
            scale: config.scale,
            horizon: config.horizon,
            mean_events,
            values,
            quantiles: Vec::new(),
            normality: None,
            ladder: Vec::new(),
            checks: Vec::new(),
            seeds: SeedInfo::new(config),
            warnings,
        }
    }
}

struct Terminal {
    value: f64,
    events: usize,
}

fn run_terminal(config: &MCConfig, model: &PriceModel, f: impl Fn(&crate::price::PricePath) -> Result<f64> + Sync) -> Result<Vec<Terminal>> {
    let window = config.window();
    config
        .execution()
        .map(config.replications, |i| {
            let sim = model.simulate(window, StreamSeed::new(config.master_seed, i as u64))?;
            Ok(Terminal { value: f(&sim.path)?, events: sim.path.events.len() })
        })
        .into_iter()
        .collect()
}

fn split(results: Vec<Terminal>) -> (Vec<f64>, f64) {
    let n = results.len() as f64;
    let events = results.iter().map(|r| r.events as f64).sum::<f64>() / n;
    (results.into_iter().map(|r| r.value).collect(), events)
}

/// SD of `(S_{nt} − N(nt)s*)/√n` against the diffusion coefficient times `√t`.
pub fn verify_fclt_model(config: &MCConfig, model: &PriceModel) -> Result<MCReport> {
    config.require_replications(2)?;
    let coef = model.coefficients()?;
    let (n, t) = (config.scale, config.horizon);
    let results = run_terminal(config, model, |path| fclt_statistic(path, coef.s_star, n, t))?;
    let (values, mean_events) = split(results);
    let empirical = stats::std_dev(&values);
    let theoretical = coef.diffusion * t.sqrt();
    let name = match model {
        PriceModel::Chp { .. } => "fclt_sd",
        PriceModel::Rschp { .. } => "fclt_rschp_sd",
    };
    let mut report = MCReport::base(name, config, empirical, theoretical, values, mean_events);
    report.normality = Some(NormalityScreen::of(&report.values));
    Ok(report)
}

pub fn verify_fclt(config: &MCConfig, hawkes: &HawkesParams, tick: &TickChainParams) -> Result<MCReport> {
    verify_fclt_model(config, &PriceModel::chp(*hawkes, *tick, 0.0))
}

pub fn verify_fclt_rschp(config: &MCConfig, hawkes: &RegimeHawkesParams, tick: &TickChainParams) -> Result<MCReport> {
    verify_fclt_model(config, &PriceModel::rschp(hawkes.clone(), *tick, 0.0))
}

/// SD of `n^{-1/2}(S_{nt} − S0 − n t λ̄ s*)` against `σ̃ √t`.
pub fn verify_combined_clt(config: &MCConfig, model: &PriceModel) -> Result<MCReport> {
    config.require_replications(2)?;
    let coef = model.coefficients()?;
    let sigma_tilde = coef.sigma_tilde.ok_or_else(|| {
        Error::param("combined CLT needs a plain compound Hawkes model whose kernel supports the point-process CLT")
    })?;
    let (n, t) = (config.scale, config.horizon);
    let centre = n * t * coef.lam_bar * coef.s_star;
    let results = run_terminal(config, model, |path| Ok((path.change_at(n * t) - centre) / n.sqrt()))?;
    let (values, mean_events) = split(results);
    let empirical = stats::std_dev(&values);
    let mut report = MCReport::base("combined_clt_sd", config, empirical, sigma_tilde * t.sqrt(), values, mean_events);
    report.normality = Some(NormalityScreen::of(&report.values));
    Ok(report)
}

/// Law of large numbers along a ladder of scales.
///
/// At each rung, `(S(nt) − S0)/n` is compared with `s* λ̄ t` and `N(nt)/n`
/// with `λ̄ t`. The headline numbers are those of the last rung.
pub fn verify_lln(config: &MCConfig, model: &PriceModel, ladder: &[f64]) -> Result<MCReport> {
    config.require_replications(2)?;
    if ladder.is_empty() {
        return Err(Error::param("LLN ladder is empty"));
    }
    let coef = model.coefficients()?;
    let t = config.horizon;
    let drift = lln_drift(coef.s_star, coef.lam_bar, t);
    let count_theory = coef.lam_bar * t;
    let exec = config.execution();
    let mut rungs = Vec::with_capacity(ladder.len());
    let mut last_values = Vec::new();
    for (r, &n) in ladder.iter().enumerate() {
        let rung_config = MCConfig { scale: n, ..config.clone() };
        rung_config.validate()?;
        let window = n * t;
        let results: Vec<(f64, f64)> = exec
            .map(config.replications, |i| {
                let sim = model.simulate(window, StreamSeed::for_rung(config.master_seed, r, i))?;
                let count = sim.path.count_at(window);
                Ok((sim.path.change_at(window) / n, count as f64 / n))
            })
            .into_iter()
            .collect::<Result<_>>()?;
        let slopes: Vec<f64> = results.iter().map(|r| r.0).collect();
        let counts: Vec<f64> = results.iter().map(|r| r.1).collect();
        let price_slope = stats::mean(&slopes);
        let count_rate = stats::mean(&counts);
        rungs.push(LadderRung {
            scale: n,
            mean_events: count_rate * n,
            price_slope,
            price_slope_se: (stats::variance(&slopes) / slopes.len() as f64).sqrt(),
            price_theoretical: drift,
            price_relative_error: relative_error(price_slope, drift),
            count_rate,
            count_theoretical: count_theory,
            count_relative_error: (count_rate - count_theory).abs() / count_theory,
        });
        last_values = slopes;
    }
    let last = rungs.last().cloned().expect("non-empty ladder");
    let final_config = MCConfig { scale: last.scale, ..config.clone() };
    let mut report = MCReport::base("lln_price_slope", &final_config, last.price_slope, drift, last_values, last.mean_events);
    report.checks.push(Check::new("lln_count_rate", last.count_rate, count_theory));
    report.ladder = rungs;
    Ok(report)
}

/// Result of the σ² oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaOracle {
    pub sigma_squared: f64,
    pub standard_error: f64,
    pub mean_estimate: f64,
    pub cycles: usize,
    pub steps: usize,
}

pub const MIN_ORACLE_STEPS: usize = 100_000;
const ORACLE_GROUPS: usize = 20;

/// Brute-force estimate of `Var(R_n)/n` for the centered mark sums.
///
/// Uses regenerative batch means: the chain restarts each time it enters
/// the up state, so the cycles between entries are i.i.d. batches. With
/// cycle sums `Yₖ` and lengths `τₖ`, the estimate is
/// `Σ(Yₖ − m τₖ)² / Στₖ` where `m = ΣYₖ/Στₖ`. The standard error is the
/// spread of the same estimator over 20 contiguous groups of cycles.
pub fn sigma_oracle(tick: &TickChainParams, steps: usize, seed: u64) -> Result<SigmaOracle> {
    if steps < MIN_ORACLE_STEPS {
        return Err(Error::param(format!("sigma oracle needs at least {MIN_ORACLE_STEPS} steps, got {steps}")));
    }
    let mut rng = StreamSeed::new(seed, 0).rng(Stream::Marks);
    let mut cycles: Vec<(f64, f64)> = Vec::new();
    let mut state = tick.draw_initial(InitialMark::Up, &mut rng);
    let (mut sum, mut len) = (0i64, 0u64);
    for _ in 0..steps {
        if state > 0 && len > 0 {
            cycles.push((sum as f64 * tick.delta, len as f64));
            sum = 0;
            len = 0;
        }
        sum += i64::from(state);
        len += 1;
        state = tick.step(state, &mut rng);
    }
    if cycles.len() < 2 * ORACLE_GROUPS {
        return Err(Error::Insufficient(format!("only {} regeneration cycles", cycles.len())));
    }
    let estimate = |c: &[(f64, f64)]| {
        let (ys, ts) = c.iter().fold((0.0, 0.0), |(a, b), &(y, t)| (a + y, b + t));
        let m = ys / ts;
        (c.iter().map(|&(y, t)| (y - m * t).powi(2)).sum::<f64>() / ts, m)
    };
    let (sigma_squared, mean_estimate) = estimate(&cycles);
    let per = cycles.len() / ORACLE_GROUPS;
    let groups: Vec<f64> = (0..ORACLE_GROUPS).map(|g| estimate(&cycles[g * per..(g + 1) * per]).0).collect();
    let standard_error = stats::std_dev(&groups) / (ORACLE_GROUPS as f64).sqrt();
    Ok(SigmaOracle { sigma_squared, standard_error, mean_estimate, cycles: cycles.len(), steps })
}

/// Price quantiles at each grid time over `config.replications` paths.
///
/// The headline compares the median terminal price with `S0 + s*λ̄t`.
pub fn quantile_bands(config: &MCConfig, model: &PriceModel, time_grid: &[f64]) -> Result<MCReport> {
    config.validate()?;
    if time_grid.is_empty() || time_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::param("time grid must be non-empty with finite, non-negative times"));
    }
    if time_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("time grid must be strictly increasing"));
    }
    let coef = model.coefficients()?;
    let window = time_grid[time_grid.len() - 1].max(f64::MIN_POSITIVE);
    let paths: Vec<(Vec<f64>, usize)> = config
        .execution()
        .map(config.replications, |i| {
            let sim = model.simulate(window, StreamSeed::new(config.master_seed, i as u64))?;
            let prices = time_grid.iter().map(|&t| sim.path.price_at(t)).collect();
            Ok((prices, sim.path.events.len()))
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let quantiles: Vec<QuantileRow> = time_grid
        .iter()
        .enumerate()
        .map(|(k, &time)| {
            let column: Vec<f64> = paths.iter().map(|p| p.0[k]).collect();
            let sorted = stats::sorted(&column);
            QuantileRow { time, values: QUANTILE_LEVELS.iter().map(|&q| stats::quantile_sorted(&sorted, q)).collect() }
        })
        .collect();
    let terminal: Vec<f64> = paths.iter().map(|p| p.0[time_grid.len() - 1]).collect();
    let mean_events = paths.iter().map(|p| p.1 as f64).sum::<f64>() / paths.len() as f64;
    let median = quantiles.last().map(|q| q.values[3]).unwrap_or(f64::NAN);
    let theoretical = model.s0() + coef.s_star * coef.lam_bar * window;
    let band_config = MCConfig { scale: 1.0, horizon: window, ..config.clone() };
    let mut report = MCReport::base("median_price", &band_config, median, theoretical, terminal, mean_events);
    report.quantiles = quantiles;
    Ok(report)
}
