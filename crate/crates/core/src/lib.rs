//! Arbitrage-free forecasting of FX implied-volatility smiles.
//!
//! The pipeline encodes each day's smile as SABR risk-neutral parameters,
//! models the transformed parameter series with ARMA-GARCH-Student-t models,
//! and maps forecasts back to option prices — which are arbitrage-free by
//! construction because every valid parameter triple prices a clean smile.
//!
//! Modules:
//! - [`market`]: Black-Scholes pricing, implied vol, put-call parity
//! - [`sabr`]: the smile formula, calibration, static-arbitrage checks
//! - [`transform`]: bijection to the unconstrained model space
//! - [`arma_garch`]: estimation, simulation and forecasting of the series models
//! - [`diagnostics`]: ACF/PACF, unit-root and ARCH-effect tests, AIC/BIC
//! - [`data`]: dataset I/O and the seeded synthetic generator
//! - [`backtest`]: rolling out-of-sample smile prediction vs a random walk
//! - [`strategy`]: threshold trading of strangles and risk-reversals

pub mod arma_garch;
pub mod backtest;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod market;
pub mod parallel;
pub mod sabr;
pub mod strategy;
pub mod transform;

mod numeric;
mod optim;

pub use error::{Error, Result};
pub use market::MarketSnapshot;
pub use sabr::SabrParams;
