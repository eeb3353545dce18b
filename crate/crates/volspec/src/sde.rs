//! Adaptive Euler-Maruyama integration of the nonlinear SDE
//!
//! ```text
//! dx = sigma^2 (eta - lambda/2) x^(2 eta - 1) dt + sigma x^eta dW
//! ```
//!
//! with the diffusion restricted either by reflective boundaries at
//! `[x_min, x_max]` or by exponential-cutoff drift terms. The internal
//! time step shrinks as `x` grows (`dt ~ kappa^2 / (sigma^2 x^(2(eta-1)))`
//! for `eta > 1`), so the scheme stays accurate in the bursty large-`x`
//! regions that carry the power-law statistics.

use crate::error::{Error, Result};
use crate::noise::NoiseSource;
use crate::trajectory::Trajectory;

/// How the diffusion is kept away from `x = 0` and infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Restriction {
    /// Hard mirror reflection at `x_min` and `x_max`.
    ReflectiveBoundaries,
    /// Extra drift terms producing exponential cutoffs of sharpness `m`
    /// outside `[x_min, x_max]`; the state itself is unbounded above.
    ExponentialCutoffs { m: f64 },
}

/// Parameters of the nonlinear SDE.
#[derive(Debug, Clone, PartialEq)]
pub struct SdeSpec {
    /// Multiplicative-noise exponent.
    pub eta: f64,
    /// Steady-state PDF tail exponent.
    pub lambda: f64,
    /// Noise scale.
    pub sigma: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub restriction: Restriction,
    /// Initial state, inside `[x_min, x_max]`.
    pub x0: f64,
}

impl SdeSpec {
    /// Spec with the default initial state at the geometric mean of the
    /// boundaries.
    pub fn new(
        eta: f64,
        lambda: f64,
        sigma: f64,
        x_min: f64,
        x_max: f64,
        restriction: Restriction,
    ) -> Self {
        SdeSpec {
            eta,
            lambda,
            sigma,
            x_min,
            x_max,
            restriction,
            x0: (x_min * x_max).sqrt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min > 0.0 && self.x_max > self.x_min) {
            return Err(Error::Config(format!(
                "need 0 < x_min < x_max, got x_min={}, x_max={}",
                self.x_min, self.x_max
            )));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if let Restriction::ExponentialCutoffs { m } = self.restriction {
            if !(m > 0.0) {
                return Err(Error::Config(format!("cutoff sharpness m must be positive, got {m}")));
            }
        }
        if !(self.x0 >= self.x_min && self.x0 <= self.x_max) {
            return Err(Error::Config(format!(
                "x0={} outside [{}, {}]",
                self.x0, self.x_min, self.x_max
            )));
        }
        Ok(())
    }

    /// True in the `eta = 1` linear-GARCH limit, where the power-law PSD
    /// range has zero width.
    pub fn is_degenerate_eta(&self) -> bool {
        self.eta == 1.0
    }
}

/// Drift coefficient at `x`.
pub fn drift(x: f64, spec: &SdeSpec) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("drift requires x > 0, got {x}")));
    }
    let s2 = spec.sigma * spec.sigma;
    let shape = x.powf(2.0 * spec.eta - 1.0);
    let mut coeff = spec.eta - 0.5 * spec.lambda;
    if let Restriction::ExponentialCutoffs { m } = spec.restriction {
        coeff += 0.5
            * m
            * ((spec.x_min / x).powf(m) - (x / spec.x_max).powf(m));
    }
    Ok(s2 * coeff * shape)
}

/// Diffusion coefficient `sigma x^eta`.
pub fn diffusion(x: f64, spec: &SdeSpec) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("diffusion requires x > 0, got {x}")));
    }
    Ok(spec.sigma * x.powf(spec.eta))
}

/// Variable internal time step `kappa^2 / (sigma^2 x^(2(eta-1)))`.
pub fn adaptive_dt(x: f64, spec: &SdeSpec, kappa: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("adaptive_dt requires x > 0, got {x}")));
    }
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    let s2 = spec.sigma * spec.sigma;
    Ok(kappa * kappa / (s2 * x.powf(2.0 * (spec.eta - 1.0))))
}

fn apply_restriction(mut x: f64, spec: &SdeSpec) -> f64 {
    match spec.restriction {
        Restriction::ReflectiveBoundaries => {
            // Mirror reflection, repeated until inside.
            loop {
                if x < spec.x_min {
                    x = 2.0 * spec.x_min - x;
                } else if x > spec.x_max {
                    x = 2.0 * spec.x_max - x;
                } else {
                    break;
                }
            }
            x
        }
        Restriction::ExponentialCutoffs { .. } => {
            // Hard floor against underflow; the drift terms handle the rest.
            let floor = 1e-12 * spec.x_min;
            if x < floor {
                floor
            } else {
                x
            }
        }
    }
}

/// Integrate the SDE and sample it at `n_out` uniform instants `dt_out`
/// apart, after discarding `burn_in` leading outputs. The recorded value
/// at each instant is the in-flight state after the internal step that
/// reaches it (no interpolation).
pub fn simulate_sde(
    spec: &SdeSpec,
    seed: u64,
    n_out: usize,
    dt_out: f64,
    kappa: f64,
    burn_in: usize,
) -> Result<Trajectory> {
    spec.validate()?;
    if n_out < 2 {
        return Err(Error::Config(format!("n_out must be at least 2, got {n_out}")));
    }
    if !(dt_out > 0.0) {
        return Err(Error::Config(format!("dt_out must be positive, got {dt_out}")));
    }
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Config(format!("kappa must be in (0, 1), got {kappa}")));
    }

    let mut noise = NoiseSource::new(seed);
    let mut x = spec.x0;
    let mut values = Vec::with_capacity(n_out);
    let mut step_index: u64 = 0;

    let total = n_out + burn_in;
    for j in 0..total {
        let mut remaining = dt_out;
        while remaining > 0.0 {
            let dt = adaptive_dt(x, spec, kappa)?.min(remaining);
            let a = drift(x, spec)?;
            let b = diffusion(x, spec)?;
            let eps = noise.next_normal();
            x = x + a * dt + b * dt.sqrt() * eps;
            if !x.is_finite() {
                return Err(Error::NonFinite { step: step_index });
            }
            x = apply_restriction(x, spec);
            remaining -= dt;
            step_index += 1;
        }
        if j >= burn_in {
            values.push(x);
        }
    }

    Ok(Trajectory {
        dt_out,
        values,
        burn_in,
        seed,
        provenance: format!(
            "sde eta={} lambda={} sigma={} x_min={} x_max={} restriction={:?} x0={} kappa={}",
            spec.eta, spec.lambda, spec.sigma, spec.x_min, spec.x_max, spec.restriction, spec.x0, kappa
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig1_spec() -> SdeSpec {
        SdeSpec::new(2.0, 3.0, 1.0, 1.0, 1e3, Restriction::ReflectiveBoundaries)
    }

    #[test]
    fn drift_examples() {
        let spec = SdeSpec::new(2.0, 3.0, 1.0, 1.0, 1e3, Restriction::ReflectiveBoundaries);
        assert_relative_eq!(drift(2.0, &spec).unwrap(), 4.0);

        // lambda = 2 eta kills the drift identically.
        let spec0 = SdeSpec::new(1.7, 3.4, 2.0, 1.0, 10.0, Restriction::ReflectiveBoundaries);
        for x in [0.5, 1.0, 3.0, 9.9] {
            assert_eq!(drift(x, &spec0).unwrap(), 0.0);
        }

        let cut = SdeSpec::new(2.0, 3.0, 1.0, 1.0, 1e3, Restriction::ExponentialCutoffs { m: 1.0 });
        assert_relative_eq!(drift(1.0, &cut).unwrap(), 0.9995, max_relative = 1e-12);
    }

    #[test]
    fn diffusion_examples() {
        let s = |sigma, eta| SdeSpec::new(eta, 3.0, sigma, 0.1, 1e3, Restriction::ReflectiveBoundaries);
        assert_relative_eq!(diffusion(3.0, &s(1.0, 2.0)).unwrap(), 9.0);
        assert_relative_eq!(diffusion(5.0, &s(2.0, 1.0)).unwrap(), 10.0);
        assert_relative_eq!(diffusion(4.0, &s(1.0, 2.5)).unwrap(), 32.0);
    }

    #[test]
    fn adaptive_dt_examples() {
        let spec = fig1_spec();
        assert_relative_eq!(adaptive_dt(10.0, &spec, 0.1).unwrap(), 1e-4);
        assert_relative_eq!(adaptive_dt(1.0, &spec, 0.1).unwrap(), 0.01);

        // eta = 1: step is x-independent.
        let lin = SdeSpec::new(1.0, 3.0, 2.0, 1.0, 10.0, Restriction::ReflectiveBoundaries);
        assert_relative_eq!(adaptive_dt(1.0, &lin, 0.1).unwrap(), 0.0025);
        assert_relative_eq!(adaptive_dt(7.3, &lin, 0.1).unwrap(), 0.0025);
    }

    #[test]
    fn domain_errors_on_nonpositive_x() {
        let spec = fig1_spec();
        assert!(drift(0.0, &spec).is_err());
        assert!(diffusion(-1.0, &spec).is_err());
        assert!(adaptive_dt(0.0, &spec, 0.1).is_err());
    }

    #[test]
    fn reflective_outputs_stay_inside() {
        let spec = fig1_spec();
        for seed in [1u64, 2, 3] {
            let traj = simulate_sde(&spec, seed, 20_000, 1e-3, 0.1, 1000).unwrap();
            assert!(traj
                .values
                .iter()
                .all(|&x| x >= spec.x_min && x <= spec.x_max));
        }
    }

    #[test]
    fn drift_is_negative_when_lambda_exceeds_two_eta() {
        let spec = SdeSpec::new(2.0, 5.0, 1.0, 1.0, 1e3, Restriction::ReflectiveBoundaries);
        for x in [1.0, 2.0, 10.0, 500.0] {
            assert!(drift(x, &spec).unwrap() < 0.0);
        }
    }

    #[test]
    fn tiny_noise_zero_drift_stays_put() {
        let mut spec = SdeSpec::new(2.0, 4.0, 1e-6, 1.0, 1e3, Restriction::ReflectiveBoundaries);
        spec.x0 = 30.0;
        let traj = simulate_sde(&spec, 5, 100, 1e-3, 0.1, 0).unwrap();
        for &x in &traj.values {
            assert!((x - 30.0).abs() < 1e-2, "x = {x}");
        }
    }

    #[test]
    fn simulation_is_bitwise_reproducible() {
        let spec = fig1_spec();
        let a = simulate_sde(&spec, 123, 5000, 1e-3, 0.1, 100).unwrap();
        let b = simulate_sde(&spec, 123, 5000, 1e-3, 0.1, 100).unwrap();
        assert!(a
            .values
            .iter()
            .zip(&b.values)
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = fig1_spec();
        spec.x_max = 0.5;
        assert!(matches!(
            simulate_sde(&spec, 1, 100, 1e-3, 0.1, 0),
            Err(Error::Config(_))
        ));
        let spec = fig1_spec();
        assert!(simulate_sde(&spec, 1, 1, 1e-3, 0.1, 0).is_err());
        assert!(simulate_sde(&spec, 1, 100, -1.0, 0.1, 0).is_err());
    }
}
