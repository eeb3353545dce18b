//! Discrete volatility iterations: linear GARCH(1,1) and two nonlinear
//! modifications.
//!
//! The analyzed signal is the conditional-variance series `sigma_t^2`,
//! the variable whose diffusion limit the algebra in [`crate::limit`]
//! describes. The nonlinear variants do not guarantee positivity; a
//! clamp to zero realizes the reflective boundary at `sigma_t^2 = 0`,
//! and clamp events are counted.

use crate::error::{Error, Result};
use crate::noise::NoiseSource;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GarchVariant {
    /// `s2 <- a + b s2 w^2 + c s2`
    Linear,
    /// `s2 <- a + b s^mu w^mu + c s2`, `mu` an odd integer > 2.
    PowerOdd { mu: u32 },
    /// `s2 <- a + b s^mu |w|^mu + s2 - c s^mu`, real `mu > 2`.
    PowerAbs { mu: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GarchSpec {
    pub variant: GarchVariant,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Time-series discretization period; output `dt_out = h`.
    pub h: f64,
    /// Initial conditional variance.
    pub sigma2_0: f64,
}

impl GarchSpec {
    /// Spec with the default initial variance: the stationary mean
    /// `a / (1 - b - c)` when the linear recursion is stable, 1 otherwise.
    pub fn new(variant: GarchVariant, a: f64, b: f64, c: f64, h: f64) -> Self {
        let sigma2_0 = if b + c < 1.0 && matches!(variant, GarchVariant::Linear) {
            a / (1.0 - b - c)
        } else {
            1.0
        };
        GarchSpec { variant, a, b, c, h, sigma2_0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) {
            return Err(Error::Config(format!("a must be positive, got {}", self.a)));
        }
        if !(self.b >= 0.0) {
            return Err(Error::Config(format!("b must be non-negative, got {}", self.b)));
        }
        if !(self.h > 0.0) {
            return Err(Error::Config(format!("h must be positive, got {}", self.h)));
        }
        if !(self.sigma2_0 >= 0.0) {
            return Err(Error::Config(format!(
                "sigma2_0 must be non-negative, got {}",
                self.sigma2_0
            )));
        }
        match self.variant {
            GarchVariant::Linear => {
                if self.c < 0.0 {
                    return Err(Error::Config(format!(
                        "linear variant needs c >= 0, got {}",
                        self.c
                    )));
                }
            }
            GarchVariant::PowerOdd { mu } => {
                if mu < 3 || mu % 2 == 0 {
                    return Err(Error::Config(format!(
                        "power-odd variant needs an odd integer mu >= 3, got {mu}"
                    )));
                }
            }
            GarchVariant::PowerAbs { mu } => {
                if !(mu > 2.0) {
                    return Err(Error::Config(format!(
                        "power-abs variant needs mu > 2, got {mu}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// One unclamped iteration of this spec's variant.
    fn step_raw(&self, sigma2_prev: f64, omega_prev: f64) -> f64 {
        match self.variant {
            GarchVariant::Linear => {
                self.a + self.b * sigma2_prev * omega_prev * omega_prev + self.c * sigma2_prev
            }
            GarchVariant::PowerOdd { mu } => {
                let s_mu = sigma2_prev.sqrt().powi(mu as i32);
                let w_mu = omega_prev.powi(mu as i32);
                self.a + self.b * s_mu * w_mu + self.c * sigma2_prev
            }
            GarchVariant::PowerAbs { mu } => {
                let s_mu = sigma2_prev.sqrt().powf(mu);
                let w_mu = omega_prev.abs().powf(mu);
                self.a + self.b * s_mu * w_mu + sigma2_prev - self.c * s_mu
            }
        }
    }

    /// One iteration, clamped at the zero boundary.
    pub fn step(&self, sigma2_prev: f64, omega_prev: f64) -> f64 {
        self.step_raw(sigma2_prev, omega_prev).max(0.0)
    }
}

/// Linear GARCH(1,1) step: `a + b s2 w^2 + c s2`. Positive by construction
/// for valid linear parameters.
pub fn step_linear(sigma2_prev: f64, omega_prev: f64, spec: &GarchSpec) -> f64 {
    debug_assert!(matches!(spec.variant, GarchVariant::Linear));
    spec.step(sigma2_prev, omega_prev)
}

/// Odd-power nonlinear step with zero clamping.
pub fn step_power_odd(sigma2_prev: f64, omega_prev: f64, spec: &GarchSpec) -> f64 {
    debug_assert!(matches!(spec.variant, GarchVariant::PowerOdd { .. }));
    spec.step(sigma2_prev, omega_prev)
}

/// Absolute-power nonlinear step with zero clamping.
pub fn step_power_abs(sigma2_prev: f64, omega_prev: f64, spec: &GarchSpec) -> f64 {
    debug_assert!(matches!(spec.variant, GarchVariant::PowerAbs { .. }));
    spec.step(sigma2_prev, omega_prev)
}

/// Return `z_t = sigma_t w_t`.
pub fn returns(sigma_t: f64, omega_t: f64) -> f64 {
    sigma_t * omega_t
}

/// Result of a GARCH simulation: the `sigma_t^2` series plus a count of
/// zero-boundary clamp events.
#[derive(Debug, Clone)]
pub struct GarchOutput {
    pub trajectory: Trajectory,
    pub clamp_events: u64,
}

/// Iterate the spec's variant `n + burn_in` times from `sigma2_0` and
/// emit the last `n` values of the `sigma_t^2` series with `dt_out = h`.
pub fn simulate_garch(
    spec: &GarchSpec,
    seed: u64,
    n: usize,
    burn_in: usize,
) -> Result<GarchOutput> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::Config(format!("n must be at least 2, got {n}")));
    }
    let mut noise = NoiseSource::new(seed);
    let mut s2 = spec.sigma2_0;
    let mut clamp_events = 0u64;
    let mut values = Vec::with_capacity(n);
    let total = n + burn_in;
    for k in 0..total {
        let w = noise.next_normal();
        let raw = spec.step_raw(s2, w);
        if !raw.is_finite() {
            return Err(Error::NonFinite { step: k as u64 });
        }
        s2 = if raw < 0.0 {
            clamp_events += 1;
            0.0
        } else {
            raw
        };
        if k >= burn_in {
            values.push(s2);
        }
    }
    let variant = match spec.variant {
        GarchVariant::Linear => "linear".to_string(),
        GarchVariant::PowerOdd { mu } => format!("power-odd mu={mu}"),
        GarchVariant::PowerAbs { mu } => format!("power-abs mu={mu}"),
    };
    Ok(GarchOutput {
        trajectory: Trajectory {
            dt_out: spec.h,
            values,
            burn_in,
            seed,
            provenance: format!(
                "garch {variant} a={} b={} c={} h={} sigma2_0={}",
                spec.a, spec.b, spec.c, spec.h, spec.sigma2_0
            ),
        },
        clamp_events,
    })
}
