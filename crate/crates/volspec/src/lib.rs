//! Simulation and analysis laboratory for heteroskedastic volatility
//! models and their continuum limits.
//!
//! The crate generates time series from linear GARCH(1,1), two nonlinear
//! modifications, and the related class of nonlinear stochastic
//! differential equations with multiplicative noise, then estimates
//! probability densities and power spectral densities and fits power-law
//! exponents to close the loop against the analytic predictions of the
//! diffusion-limit algebra.
//!
//! Modules:
//! - [`noise`]: seedable standard normal deviates.
//! - [`sde`]: adaptive Euler-Maruyama integration with restricted diffusion.
//! - [`garch`]: the discrete volatility iterations.
//! - [`limit`]: diffusion-limit parameter maps and analytic predictions.
//! - [`stats`]: histograms, segment-averaged periodograms, power-law fits.
//! - [`ensemble`]: parallel (rayon) or sequential ensemble execution.
//! - [`config`] / [`experiment`]: presets, config files, full pipelines.

pub mod config;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod garch;
pub mod limit;
pub mod noise;
pub mod sde;
pub mod stats;
pub mod trajectory;

pub use error::{Error, Result};
