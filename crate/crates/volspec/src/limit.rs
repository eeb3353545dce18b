//! Diffusion-limit algebra: maps from discrete GARCH parameters to
//! continuum SDE parameters `(A, B, C)` and the analytic predictions
//! that follow from them (tail exponent `lambda`, noise exponent `eta`,
//! cutoff scales, PSD exponent `beta`, power-law frequency range).
//!
//! Everything here is pure arithmetic; no simulation state is involved.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::sde::{Restriction, SdeSpec};

/// Predicted PSD power-law exponent. `Divergent` is the meaningful
/// `eta = 1` outcome of the linear GARCH limit, not an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsdExponent {
    Value(f64),
    Divergent,
}

/// Predicted frequency band (in cycles per unit time) of the power-law
/// PSD region. Zero width at `eta = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyBand {
    Band { f_low: f64, f_high: f64 },
    ZeroWidth,
}

/// Cutoff scales of the limiting steady-state PDF; which ones exist
/// depends on the source variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffScales {
    /// Linear GARCH: lower cutoff `y_min = 2A/B^2`.
    Linear { y_min: f64 },
    /// Odd-power variant: `y1` always, `y2` only when `C > 0`.
    PowerOdd { y1: f64, y2: Option<f64> },
    /// Absolute-power variant: `y1` and `y3`, with the sign of `C` recorded.
    PowerAbs { y1: f64, y3: f64, c_sign: f64 },
}

/// Continuum parameters and derived predictions of a GARCH diffusion limit.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionLimit {
    pub big_a: f64,
    /// `B^2` (the noise intensity enters the SDE only through its square).
    pub big_b_sq: f64,
    pub big_c: f64,
    pub lambda: f64,
    pub eta: f64,
    pub scales: CutoffScales,
    pub beta_predicted: PsdExponent,
    pub f_range: FrequencyBand,
}

/// `(2n - 1)!!` by integer recurrence.
pub fn odd_double_factorial(n: u64) -> f64 {
    let mut acc = 1.0f64;
    let mut k = 1u64;
    while 2 * k - 1 <= 2 * n - 1 {
        acc *= (2 * k - 1) as f64;
        k += 1;
    }
    acc
}

/// Absolute moment `<|w|^mu> = 2^(mu/2) Gamma((mu+1)/2) / sqrt(pi)` of a
/// standard normal.
pub fn gaussian_abs_moment(mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("gaussian_abs_moment requires mu > 0, got {mu}")));
    }
    Ok(2.0f64.powf(mu / 2.0) * gamma((mu + 1.0) / 2.0) / std::f64::consts::PI.sqrt())
}

/// `beta = 1 + (lambda - 3) / (2 (eta - 1))`, divergent at `eta = 1`.
pub fn predicted_beta(lambda: f64, eta: f64) -> PsdExponent {
    if eta == 1.0 {
        PsdExponent::Divergent
    } else {
        PsdExponent::Value(1.0 + (lambda - 3.0) / (2.0 * (eta - 1.0)))
    }
}

/// Frequency band (cycles per unit time) where the power-law PSD is
/// expected: `sigma^2 x^(2(eta-1)) / 2 pi` evaluated at the diffusion
/// restriction boundaries. The estimate is qualitative; the realized
/// band is typically narrower.
pub fn frequency_range(eta: f64, sigma: f64, x_min: f64, x_max: f64) -> FrequencyBand {
    if eta == 1.0 {
        return FrequencyBand::ZeroWidth;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let s2 = sigma * sigma;
    let at = |x: f64| s2 * x.powf(2.0 * (eta - 1.0)) / two_pi;
    let (lo, hi) = if eta > 1.0 {
        (at(x_min), at(x_max))
    } else {
        (at(x_max), at(x_min))
    };
    FrequencyBand::Band { f_low: lo, f_high: hi }
}

/// Diffusion limit of linear GARCH(1,1):
/// `A = a/h`, `C = (1 - b - c)/h`, `B^2 = 2 b^2 / h`.
pub fn map_linear(a: f64, b: f64, c: f64, h: f64) -> Result<DiffusionLimit> {
    if !(a > 0.0 && b > 0.0 && h > 0.0) {
        return Err(Error::Domain(format!(
            "map_linear requires a > 0, b > 0, h > 0; got a={a}, b={b}, h={h}"
        )));
    }
    let big_a = a / h;
    let big_c = (1.0 - b - c) / h;
    let big_b_sq = 2.0 * b * b / h;
    let lambda = 2.0 + 2.0 * big_c / big_b_sq;
    let y_min = 2.0 * big_a / big_b_sq;
    Ok(DiffusionLimit {
        big_a,
        big_b_sq,
        big_c,
        lambda,
        eta: 1.0,
        scales: CutoffScales::Linear { y_min },
        beta_predicted: PsdExponent::Divergent,
        f_range: FrequencyBand::ZeroWidth,
    })
}

/// Diffusion limit of the odd-power variant:
/// `A = a/h`, `C = (1 - c)/h`, `B^2 = <w^(2 mu)> b^2 / h`.
pub fn map_power_odd(a: f64, b: f64, c: f64, mu: u32, h: f64) -> Result<DiffusionLimit> {
    if mu < 3 || mu % 2 == 0 {
        return Err(Error::Domain(format!(
            "map_power_odd requires an odd integer mu >= 3, got {mu}"
        )));
    }
    if !(a > 0.0 && b > 0.0 && h > 0.0) {
        return Err(Error::Domain(format!(
            "map_power_odd requires a > 0, b > 0, h > 0; got a={a}, b={b}, h={h}"
        )));
    }
    let mu_f = mu as f64;
    let big_a = a / h;
    let big_c = (1.0 - c) / h;
    let big_b_sq = odd_double_factorial(mu as u64) * b * b / h;
    let y1 = (2.0 * big_a / ((mu_f - 1.0) * big_b_sq)).powf(1.0 / (mu_f - 1.0));
    let y2 = if big_c > 0.0 {
        Some((2.0 * big_c / ((mu_f - 2.0) * big_b_sq)).powf(1.0 / (mu_f - 2.0)))
    } else {
        None
    };
    let eta = mu_f / 2.0;
    Ok(DiffusionLimit {
        big_a,
        big_b_sq,
        big_c,
        lambda: mu_f,
        eta,
        scales: CutoffScales::PowerOdd { y1, y2 },
        beta_predicted: PsdExponent::Value(1.0 + (mu_f - 3.0) / (mu_f - 2.0)),
        f_range: limit_band(eta, big_b_sq, y1, y2, h),
    })
}

/// Diffusion limit of the absolute-power variant:
/// `A = a/h`, `C = (b <|w|^mu> - c)/h`, `B^2 = var(|w|^mu) b^2 / h`.
pub fn map_power_abs(a: f64, b: f64, c: f64, mu: f64, h: f64) -> Result<DiffusionLimit> {
    if !(mu > 2.0) {
        return Err(Error::Domain(format!("map_power_abs requires mu > 2, got {mu}")));
    }
    if !(a > 0.0 && b > 0.0 && h > 0.0) {
        return Err(Error::Domain(format!(
            "map_power_abs requires a > 0, b > 0, h > 0; got a={a}, b={b}, h={h}"
        )));
    }
    let mean_abs = gaussian_abs_moment(mu)?;
    let var_abs = gaussian_abs_moment(2.0 * mu)? - mean_abs * mean_abs;
    let big_a = a / h;
    let big_c = (b * mean_abs - c) / h;
    let big_b_sq = var_abs * b * b / h;
    let y1 = (2.0 * big_a / ((mu - 1.0) * big_b_sq)).powf(1.0 / (mu - 1.0));
    let y3 = (4.0 * big_c.abs() / ((mu - 2.0) * big_b_sq)).powf(2.0 / (mu - 2.0));
    let c_sign = if big_c == 0.0 { 0.0 } else { big_c.signum() };
    let eta = mu / 2.0;
    let upper = if big_c != 0.0 { Some(y3) } else { None };
    Ok(DiffusionLimit {
        big_a,
        big_b_sq,
        big_c,
        lambda: mu,
        eta,
        scales: CutoffScales::PowerAbs { y1, y3, c_sign },
        beta_predicted: PsdExponent::Value(1.0 + (mu - 3.0) / (mu - 2.0)),
        f_range: limit_band(eta, big_b_sq, y1, upper, h),
    })
}

// The limiting PDFs have a lower cutoff scale but no hard upper wall, so
// the upper frequency bound falls back to the sampling Nyquist 1/(2h)
// when no upper scale exists (or the one that exists sits below y1).
fn limit_band(eta: f64, big_b_sq: f64, y1: f64, upper: Option<f64>, h: f64) -> FrequencyBand {
    let nyquist = 0.5 / h;
    match upper {
        Some(y_up) if y_up > y1 => match frequency_range(eta, big_b_sq.sqrt(), y1, y_up) {
            FrequencyBand::Band { f_low, f_high } => FrequencyBand::Band {
                f_low,
                f_high: f_high.min(nyquist),
            },
            zw => zw,
        },
        _ => match frequency_range(eta, big_b_sq.sqrt(), y1, y1 * 2.0) {
            FrequencyBand::Band { f_low, .. } => FrequencyBand::Band { f_low, f_high: nyquist },
            zw => zw,
        },
    }
}

/// Closed-form (unnormalized) steady-state density shapes, paired with a
/// numerically computed normalization constant over the support.
#[derive(Debug, Clone, PartialEq)]
pub enum PdfShape {
    /// `x^-lambda` truncated to `[x_min, x_max]`.
    ReflectedPowerLaw { lambda: f64, x_min: f64, x_max: f64 },
    /// `x^-lambda exp(-(x_min/x)^m - (x/x_max)^m)` on `(0, inf)`.
    ExponentialCutoffs { lambda: f64, x_min: f64, x_max: f64, m: f64 },
    /// `y^-mu exp(-(y1/y)^(mu-1) + (y2/y)^(mu-2))` on `(0, inf)`.
    PowerOddLimit { mu: f64, y1: f64, y2: Option<f64> },
    /// `y^-mu exp(-(y1/y)^(mu-1) - sign(C) (y3/y)^(mu-2))` on `(0, inf)`.
    PowerAbsLimit { mu: f64, y1: f64, y3: f64, c_sign: f64 },
}

impl PdfShape {
    /// Shape implied by an [`SdeSpec`]'s restriction mode.
    pub fn from_sde(spec: &SdeSpec) -> PdfShape {
        match spec.restriction {
            Restriction::ReflectiveBoundaries => PdfShape::ReflectedPowerLaw {
                lambda: spec.lambda,
                x_min: spec.x_min,
                x_max: spec.x_max,
            },
            Restriction::ExponentialCutoffs { m } => PdfShape::ExponentialCutoffs {
                lambda: spec.lambda,
                x_min: spec.x_min,
                x_max: spec.x_max,
                m,
            },
        }
    }

    /// Shape implied by a GARCH diffusion limit.
    pub fn from_limit(dl: &DiffusionLimit) -> Option<PdfShape> {
        match dl.scales {
            CutoffScales::Linear { .. } => None,
            CutoffScales::PowerOdd { y1, y2 } => {
                Some(PdfShape::PowerOddLimit { mu: dl.lambda, y1, y2 })
            }
            CutoffScales::PowerAbs { y1, y3, c_sign } => {
                Some(PdfShape::PowerAbsLimit { mu: dl.lambda, y1, y3, c_sign })
            }
        }
    }

    fn log_unnormalized(&self, x: f64) -> f64 {
        match *self {
            PdfShape::ReflectedPowerLaw { lambda, x_min, x_max } => {
                if x < x_min || x > x_max {
                    f64::NEG_INFINITY
                } else {
                    -lambda * x.ln()
                }
            }
            PdfShape::ExponentialCutoffs { lambda, x_min, x_max, m } => {
                -lambda * x.ln() - (x_min / x).powf(m) - (x / x_max).powf(m)
            }
            PdfShape::PowerOddLimit { mu, y1, y2 } => {
                let mut e = -mu * x.ln() - (y1 / x).powf(mu - 1.0);
                if let Some(y2) = y2 {
                    e += (y2 / x).powf(mu - 2.0);
                }
                e
            }
            PdfShape::PowerAbsLimit { mu, y1, y3, c_sign } => {
                -mu * x.ln() - (y1 / x).powf(mu - 1.0) - c_sign * (y3 / x).powf(mu - 2.0)
            }
        }
    }

    fn unnormalized(&self, x: f64) -> f64 {
        self.log_unnormalized(x).exp()
    }

    // Integration bounds wide enough that the truncated mass is
    // negligible against the 1e-8 quadrature tolerance.
    fn support(&self) -> (f64, f64) {
        match *self {
            PdfShape::ReflectedPowerLaw { x_min, x_max, .. } => (x_min, x_max),
            PdfShape::ExponentialCutoffs { x_min, x_max, .. } => (x_min * 1e-3, x_max * 1e3),
            PdfShape::PowerOddLimit { y1, y2, mu } => {
                let scale = y2.map_or(y1, |v| v.max(y1));
                (y1 * 1e-3, scale * 10f64.powf(14.0 / (mu - 1.0)))
            }
            PdfShape::PowerAbsLimit { y1, y3, mu, .. } => {
                let scale = y1.max(y3);
                (y1 * 1e-3, scale * 10f64.powf(14.0 / (mu - 1.0)))
            }
        }
    }
}

/// Steady-state density with its normalization constant precomputed by
/// adaptive quadrature (relative error 1e-8) over the support.
#[derive(Debug, Clone)]
pub struct TheoreticalPdf {
    shape: PdfShape,
    norm: f64,
}

impl TheoreticalPdf {
    pub fn new(shape: PdfShape) -> Result<TheoreticalPdf> {
        let (lo, hi) = shape.support();
        // Integrate in u = ln x; the power-law pieces become exponentials
        // and the adaptive rule converges quickly.
        let f = |u: f64| {
            let x = u.exp();
            shape.unnormalized(x) * x
        };
        let integral = adaptive_simpson(&f, lo.ln(), hi.ln(), 1e-8);
        if !(integral.is_finite() && integral > 0.0) {
            return Err(Error::Domain(format!(
                "normalization integral is not positive and finite: {integral}"
            )));
        }
        Ok(TheoreticalPdf { shape, norm: 1.0 / integral })
    }

    pub fn shape(&self) -> &PdfShape {
        &self.shape
    }

    /// Normalization constant multiplying the unnormalized shape.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("density requires x > 0, got {x}")));
        }
        Ok(self.norm * self.shape.unnormalized(x))
    }
}

/// Adaptive Simpson quadrature with relative tolerance `rel_tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
    }
    // Composite pre-scan so the absolute tolerance reflects the true
    // integral scale even when the 3-point estimate misses a narrow peak.
    const PANELS: usize = 64;
    let h = (b - a) / PANELS as f64;
    let mut panels = Vec::with_capacity(PANELS);
    let mut scale = 0.0;
    for i in 0..PANELS {
        let pa = a + i as f64 * h;
        let pb = pa + h;
        let pm = 0.5 * (pa + pb);
        let (fa, fm, fb) = (f(pa), f(pm), f(pb));
        let est = simpson(fa, fm, fb, h);
        scale += est;
        panels.push((pa, pb, fa, fm, fb, est));
    }
    let eps = rel_tol * scale.abs().max(f64::MIN_POSITIVE) / PANELS as f64;
    panels
        .into_iter()
        .map(|(pa, pb, fa, fm, fb, est)| recurse(f, pa, pb, fa, fm, fb, est, eps, 28))
        .sum()
}
