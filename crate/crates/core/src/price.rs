//! Compound Hawkes price paths and their limit coefficients.
//!
//! The mid-price is `S_t = S_0 + Σ_{k ≤ N(t)} X_k` with Hawkes event counts
//! `N` and Markov tick marks `X_k`, drawn from independent streams.

use serde::{Deserialize, Serialize};

use crate::chains::{InitialMark, RegimePath, TickChainParams, TickMarks};
use crate::error::{Error, Result};
use crate::hawkes::{EventSequence, HawkesParams, RegimeHawkesParams};
use crate::rng::{Stream, StreamSeed};

/// One realized price trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePath {
    pub s0: f64,
    pub events: EventSequence,
    pub marks: TickMarks,
    /// Cumulative tick count after each event; `prices[i] = S0 + δ·levels[i]`.
    levels: Vec<i64>,
}

impl PricePath {
    pub fn new(s0: f64, events: EventSequence, marks: TickMarks) -> Result<Self> {
        if events.len() != marks.len() {
            return Err(Error::param(format!(
                "{} events but {} marks",
                events.len(),
                marks.len()
            )));
        }
        if !s0.is_finite() {
            return Err(Error::param("initial price must be finite"));
        }
        let levels = marks
            .signs
            .iter()
            .scan(0i64, |acc, &s| {
                *acc += i64::from(s);
                Some(*acc)
            })
            .collect();
        Ok(Self { s0, events, marks, levels })
    }

    pub fn delta(&self) -> f64 {
        self.marks.delta
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    pub fn prices(&self) -> Vec<f64> {
        self.levels.iter().map(|&l| self.price_of_level(l)).collect()
    }

    fn price_of_level(&self, level: i64) -> f64 {
        self.s0 + self.marks.delta * level as f64
    }

    /// Tick level (price minus `S0`, in ticks) after the first `count` events.
    pub fn level_after(&self, count: usize) -> i64 {
        if count == 0 {
            0
        } else {
            self.levels[count - 1]
        }
    }

    /// `S(t)`, right-continuous.
    pub fn price_at(&self, t: f64) -> f64 {
        self.price_of_level(self.level_after(self.events.count_at(t)))
    }

    /// `S(t) − S0`.
    pub fn change_at(&self, t: f64) -> f64 {
        self.marks.delta * self.level_after(self.events.count_at(t)) as f64
    }

    pub fn count_at(&self, t: f64) -> usize {
        self.events.count_at(t)
    }
}

/// A price model: plain or regime-switching compound Hawkes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriceModel {
    Chp {
        hawkes: HawkesParams,
        tick: TickChainParams,
        #[serde(default)]
        s0: f64,
    },
    Rschp {
        hawkes: RegimeHawkesParams,
        tick: TickChainParams,
        #[serde(default)]
        s0: f64,
    },
}

/// Realization of a [`PriceModel`], with the regime path when there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub path: PricePath,
    pub regimes: Option<RegimePath>,
}

impl PriceModel {
    pub fn chp(hawkes: HawkesParams, tick: TickChainParams, s0: f64) -> Self {
        PriceModel::Chp { hawkes, tick, s0 }
    }

    pub fn rschp(hawkes: RegimeHawkesParams, tick: TickChainParams, s0: f64) -> Self {
        PriceModel::Rschp { hawkes, tick, s0 }
    }

    pub fn tick(&self) -> &TickChainParams {
        match self {
            PriceModel::Chp { tick, .. } | PriceModel::Rschp { tick, .. } => tick,
        }
    }

    pub fn s0(&self) -> f64 {
        match self {
            PriceModel::Chp { s0, .. } | PriceModel::Rschp { s0, .. } => *s0,
        }
    }

    pub fn branching_ratio(&self) -> f64 {
        match self {
            PriceModel::Chp { hawkes, .. } => hawkes.branching_ratio(),
            PriceModel::Rschp { hawkes, .. } => hawkes.branching_ratio(),
        }
    }

    /// Long-run event rate: `λ/(1−μ̂)` or `λ̂/(1−μ̂)`.
    pub fn event_rate(&self) -> Result<f64> {
        match self {
            PriceModel::Chp { hawkes, .. } => Ok(hawkes.lln_rate()),
            PriceModel::Rschp { hawkes, .. } => hawkes.lln_rate(),
        }
    }

    pub fn coefficients(&self) -> Result<LimitCoefficients> {
        match self {
            PriceModel::Chp { hawkes, tick, .. } => LimitCoefficients::for_chp(hawkes, tick),
            PriceModel::Rschp { hawkes, tick, .. } => LimitCoefficients::for_rschp(hawkes, tick),
        }
    }

    /// Samples a path on `[0, window)` from the streams of `seed`.
    pub fn simulate(&self, window: f64, seed: StreamSeed) -> Result<Simulated> {
        let mut mark_rng = seed.rng(Stream::Marks);
        let (events, regimes) = match self {
            PriceModel::Chp { hawkes, .. } => (hawkes.simulate_with(window, &mut seed.rng(Stream::Events))?, None),
            PriceModel::Rschp { hawkes, .. } => {
                let (ev, path) =
                    hawkes.simulate_with(window, &mut seed.rng(Stream::Events), &mut seed.rng(Stream::Regime))?;
                (ev, Some(path))
            }
        };
        let marks = self.tick().simulate_with(events.len(), InitialMark::Stationary, &mut mark_rng);
        Ok(Simulated { path: PricePath::new(self.s0(), events, marks)?, regimes })
    }
}

pub fn simulate_chp(hawkes: &HawkesParams, tick: &TickChainParams, s0: f64, window: f64, seed: u64) -> Result<PricePath> {
    Ok(PriceModel::chp(*hawkes, *tick, s0).simulate(window, StreamSeed::new(seed, 0))?.path)
}

pub fn simulate_rschp(
    hawkes: &RegimeHawkesParams,
    tick: &TickChainParams,
    s0: f64,
    window: f64,
    seed: u64,
) -> Result<(PricePath, RegimePath)> {
    let sim = PriceModel::rschp(hawkes.clone(), *tick, s0).simulate(window, StreamSeed::new(seed, 0))?;
    let regimes = sim.regimes.expect("regime-switching simulation yields a regime path");
    Ok((sim.path, regimes))
}

fn check_scale(n: f64, t: f64) -> Result<()> {
    if n.is_finite() && n > 0.0 && t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("scale n = {n} must be > 0 and time t = {t} must be >= 0")))
    }
}

/// `(S(nt) − N(nt)·s*)/√n`, keeping the `S0/√n` term.
pub fn fclt_statistic(path: &PricePath, s_star: f64, n: f64, t: f64) -> Result<f64> {
    check_scale(n, t)?;
    let at = n * t;
    if at > path.events.window_end() {
        return Err(Error::param(format!("path window {} shorter than n·t = {at}", path.events.window_end())));
    }
    let count = path.count_at(at) as f64;
    Ok((path.price_at(at) - count * s_star) / n.sqrt())
}

/// [`fclt_statistic`] with `S0` removed: `Σ_{k≤N(nt)} (X_k − s*)/√n`.
pub fn fclt_statistic_centered(path: &PricePath, s_star: f64, n: f64, t: f64) -> Result<f64> {
    Ok(fclt_statistic(path, s_star, n, t)? - path.s0 / n.sqrt())
}

/// Scaled, linearly interpolated centered partial sum `U_n(t)`.
pub fn interpolated_partial_sum(marks: &[f64], s_star: f64, n: f64, t: f64) -> Result<f64> {
    check_scale(n, t)?;
    let x = n * t;
    let k = x.floor();
    let frac = x - k;
    let k = k as usize;
    let needed = if frac > 0.0 { k + 1 } else { k };
    if marks.len() < needed {
        return Err(Error::param(format!("need {needed} marks, have {}", marks.len())));
    }
    let r_k: f64 = marks[..k].iter().map(|m| m - s_star).sum();
    let r_next = if frac > 0.0 { r_k + marks[k] - s_star } else { r_k };
    Ok(((1.0 - frac) * r_k + frac * r_next) / n.sqrt())
}

/// `σ √λ̄`, the Brownian coefficient of the price limit.
pub fn diffusion_coefficient(sigma: f64, lam_bar: f64) -> f64 {
    sigma * lam_bar.sqrt()
}

/// `σ √(λ̂/(1 − μ̂))`.
pub fn rschp_diffusion_coefficient(sigma: f64, lambda_hat: f64, mu_hat: f64) -> Result<f64> {
    if !(mu_hat < 1.0) {
        return Err(Error::NonStationary { branching_ratio: mu_hat });
    }
    Ok(sigma * (lambda_hat / (1.0 - mu_hat)).sqrt())
}

/// `s* λ̄ t`.
pub fn lln_drift(s_star: f64, lam_bar: f64, t: f64) -> f64 {
    s_star * lam_bar * t
}

/// Point-process CLT scale `σ̄ = √λ̄/(1 − μ̂)` and combined scale
/// `σ̃ = √(σ²λ̄ + s*²σ̄²)`, returned as `(σ̄, σ̃)`.
pub fn combined_clt_sigma(sigma: f64, lam_bar: f64, s_star: f64, mu_hat: f64) -> Result<(f64, f64)> {
    if !(mu_hat < 1.0) {
        return Err(Error::NonStationary { branching_ratio: mu_hat });
    }
    let sigma_bar = lam_bar.sqrt() / (1.0 - mu_hat);
    let sigma_tilde = (sigma * sigma * lam_bar + s_star * s_star * sigma_bar * sigma_bar).sqrt();
    Ok((sigma_bar, sigma_tilde))
}

/// Closed-form limit quantities of a price model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCoefficients {
    pub s_star: f64,
    pub sigma: f64,
    pub mu_hat: f64,
    /// Effective long-run event rate.
    pub lam_bar: f64,
    /// Brownian coefficient of `(S_{nt} − N(nt)s*)/√n`.
    pub diffusion: f64,
    /// Present when the kernel admits the point-process CLT.
    pub sigma_bar: Option<f64>,
    pub sigma_tilde: Option<f64>,
}

impl LimitCoefficients {
    pub fn for_chp(hawkes: &HawkesParams, tick: &TickChainParams) -> Result<Self> {
        let s_star = tick.s_star();
        let sigma = tick.sigma();
        let mu_hat = hawkes.branching_ratio();
        let lam_bar = hawkes.lln_rate();
        let (sigma_bar, sigma_tilde) = if hawkes.kernel.supports_clt() {
            let (b, t) = combined_clt_sigma(sigma, lam_bar, s_star, mu_hat)?;
            (Some(b), Some(t))
        } else {
            (None, None)
        };
        Ok(Self {
            s_star,
            sigma,
            mu_hat,
            lam_bar,
            diffusion: diffusion_coefficient(sigma, lam_bar),
            sigma_bar,
            sigma_tilde,
        })
    }

    pub fn for_rschp(hawkes: &RegimeHawkesParams, tick: &TickChainParams) -> Result<Self> {
        let s_star = tick.s_star();
        let sigma = tick.sigma();
        let mu_hat = hawkes.branching_ratio();
        let lambda_hat = hawkes.lambda_hat()?;
        Ok(Self {
            s_star,
            sigma,
            mu_hat,
            lam_bar: lambda_hat / (1.0 - mu_hat),
            diffusion: rschp_diffusion_coefficient(sigma, lambda_hat, mu_hat)?,
            sigma_bar: None,
            sigma_tilde: None,
        })
    }
}
