//! Compound Hawkes and regime-switching compound Hawkes mid-price models.
//!
//! The crate covers the full loop used to study the link between order flow
//! and price volatility in a limit order book:
//!
//! - [`kernels`]: excitation kernels and their branching ratio.
//! - [`hawkes`]: intensity, compensator, exact thinning simulation (plain and
//!   regime-switching baseline), long-run rate and time-change residuals.
//! - [`chains`]: the two-state tick chain and the continuous-time regime
//!   chain, with the closed-form drift `s*`, variance `σ²` and `λ̂`.
//! - [`price`]: price paths and every limit-theorem coefficient.
//! - [`estimate`]: maximum likelihood, transition frequencies, regime
//!   construction, and sample statistics.
//! - [`mc`]: the Monte Carlo verification engine.
//! - [`io`], [`config`] and [`report`]: data ingestion, run configuration and
//!   the reproduction report.

pub mod chains;
pub mod config;
pub mod error;
pub mod estimate;
pub mod exec;
pub mod hawkes;
pub mod io;
pub mod kernels;
pub mod mc;
pub mod price;
pub mod reference;
pub mod report;
pub mod rng;
pub mod stats;

pub use chains::{RegimeSpec, TickChainParams};
pub use error::{Error, Result};
pub use chains::RegimePath;
pub use hawkes::{EventSequence, HawkesParams, RegimeHawkesParams};
pub use kernels::KernelSpec;
pub use mc::{MCConfig, MCReport};
pub use price::{LimitCoefficients, PriceModel, PricePath};
