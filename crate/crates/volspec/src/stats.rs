//! Estimation side of the loop: histograms on log-spaced bins, segment
//! averaged periodograms, and power-law exponent fits in log-log space.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

/// Probability density estimate on log-spaced bins.
#[derive(Debug, Clone)]
pub struct Histogram {
    /// Bin edges, increasing, strictly positive; `densities.len() + 1` entries.
    pub edges: Vec<f64>,
    /// Normalized densities: sum of `density * width` is 1.
    pub densities: Vec<f64>,
    /// Number of positive samples binned.
    pub n_samples: usize,
    /// Zero or negative samples excluded (clamped GARCH states land here).
    pub n_excluded: usize,
}

impl Histogram {
    pub fn bin_centers(&self) -> Vec<f64> {
        self.edges
            .windows(2)
            .map(|w| (w[0] * w[1]).sqrt())
            .collect()
    }
}

/// Segment-averaged one-sided power spectral density.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Frequencies in cycles per unit time, `k / (L dt)` for `k >= 1`.
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    pub dt: f64,
    pub n_segments: usize,
}

/// Least-squares power-law fit in log-log coordinates.
#[derive(Debug, Clone)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub stderr: f64,
    pub range: (f64, f64),
    pub r_squared: f64,
}

/// Histogram of the positive samples of a trajectory on log-spaced bins.
pub fn pdf_estimate(traj: &Trajectory, bins_per_decade: usize) -> Result<Histogram> {
    pdf_estimate_samples(&traj.values, bins_per_decade)
}

/// Sample-slice form of [`pdf_estimate`].
pub fn pdf_estimate_samples(samples: &[f64], bins_per_decade: usize) -> Result<Histogram> {
    pdf_estimate_pooled(&[samples], bins_per_decade)
}

/// Histogram over several sample sets pooled together (ensemble runs),
/// without concatenating them.
pub fn pdf_estimate_pooled(sets: &[&[f64]], bins_per_decade: usize) -> Result<Histogram> {
    let total: usize = sets.iter().map(|s| s.len()).sum();
    if total == 0 {
        return Err(Error::EmptyInput);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut n_positive = 0usize;
    for set in sets {
        for &x in *set {
            if x > 0.0 {
                n_positive += 1;
                min = min.min(x);
                max = max.max(x);
            }
        }
    }
    let n_excluded = total - n_positive;
    if n_positive == 0 {
        return Err(Error::AllZero);
    }

    let bpd = bins_per_decade.max(1) as f64;
    let (log_lo, n_bins) = if min == max {
        // Degenerate constant input: one bin of standard width around it.
        (min.log10() - 0.5 / bpd, 1usize)
    } else {
        let span = (max / min).log10();
        (min.log10(), (span * bpd).ceil() as usize)
    };
    let bin_width_log = 1.0 / bpd;

    let mut edges = Vec::with_capacity(n_bins + 1);
    for i in 0..=n_bins {
        edges.push(10f64.powf(log_lo + i as f64 * bin_width_log));
    }

    let mut counts = vec![0u64; n_bins];
    for set in sets {
        for &x in *set {
            if x > 0.0 {
                let idx = ((x.log10() - log_lo) / bin_width_log) as usize;
                counts[idx.min(n_bins - 1)] += 1;
            }
        }
    }

    let n = n_positive as f64;
    let mut densities: Vec<f64> = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (n * (w[1] - w[0])))
        .collect();
    // Exact renormalization so the sum rule holds to machine precision.
    let total: f64 = densities
        .iter()
        .zip(edges.windows(2))
        .map(|(&d, w)| d * (w[1] - w[0]))
        .sum();
    for d in &mut densities {
        *d /= total;
    }

    Ok(Histogram { edges, densities, n_samples: n_positive, n_excluded })
}

/// PSD by averaging periodograms of non-overlapping, mean-removed,
/// rectangular-windowed segments. Frequencies are cycles per unit time;
/// the DC bin is excluded.
pub fn psd_estimate(traj: &Trajectory, n_segments: usize) -> Result<Spectrum> {
    psd_estimate_samples(&traj.values, traj.dt_out, n_segments)
}

pub fn psd_estimate_samples(samples: &[f64], dt: f64, n_segments: usize) -> Result<Spectrum> {
    let n_segments = n_segments.max(1);
    if samples.len() < 2 * n_segments {
        return Err(Error::TooShort { needed: 2 * n_segments, got: samples.len() });
    }
    let seg_len = samples.len() / n_segments;
    let half = seg_len / 2;

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(seg_len);

    let mut accum = vec![0.0f64; half];
    let mut buf: Vec<Complex<f64>> = vec![Complex::default(); seg_len];
    for s in 0..n_segments {
        let seg = &samples[s * seg_len..(s + 1) * seg_len];
        let mean = seg.iter().sum::<f64>() / seg_len as f64;
        for (b, &x) in buf.iter_mut().zip(seg) {
            *b = Complex::new(x - mean, 0.0);
        }
        fft.process(&mut buf);
        for k in 1..=half {
            // One-sided scaling: double everything except the Nyquist bin.
            let fold = if seg_len % 2 == 0 && k == half { 1.0 } else { 2.0 };
            accum[k - 1] += fold * buf[k].norm_sqr() * dt / seg_len as f64;
        }
    }
    let freqs = (1..=half)
        .map(|k| k as f64 / (seg_len as f64 * dt))
        .collect();
    let power = accum
        .iter()
        .map(|&p| p / n_segments as f64)
        .collect();
    Ok(Spectrum { freqs, power, dt, n_segments })
}

/// Fit `y ~ x^exponent` by ordinary least squares of `log10 y` on
/// `log10 x` over the points inside `range`, after averaging the points
/// into log-spaced bins (equal weight per occupied bin).
pub fn fit_power_law(xs: &[f64], ys: &[f64], range: (f64, f64)) -> Result<PowerLawFit> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Domain(format!("bad fit range ({lo}, {hi})")));
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|&(&x, &y)| x >= lo && x <= hi && x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.log10(), y.log10()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::InsufficientPoints { needed: 5 });
    }

    // De-bias the dense high-frequency end: equal weight per log-spaced bin.
    const BINS_PER_DECADE: f64 = 10.0;
    let log_lo = lo.log10();
    let n_bins = (((hi / lo).log10()) * BINS_PER_DECADE).ceil().max(1.0) as usize;
    let mut sum_x = vec![0.0f64; n_bins];
    let mut sum_y = vec![0.0f64; n_bins];
    let mut count = vec![0usize; n_bins];
    for &(lx, ly) in &pts {
        let idx = (((lx - log_lo) * BINS_PER_DECADE) as usize).min(n_bins - 1);
        sum_x[idx] += lx;
        sum_y[idx] += ly;
        count[idx] += 1;
    }
    let binned: Vec<(f64, f64)> = (0..n_bins)
        .filter(|&i| count[i] > 0)
        .map(|i| (sum_x[i] / count[i] as f64, sum_y[i] / count[i] as f64))
        .collect();
    if binned.len() < 2 {
        return Err(Error::InsufficientPoints { needed: 5 });
    }

    let n = binned.len() as f64;
    let mx = binned.iter().map(|p| p.0).sum::<f64>() / n;
    let my = binned.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = binned.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = binned.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = binned
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let sst: f64 = binned.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let stderr = if binned.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 };
    Ok(PowerLawFit { exponent: slope, stderr, range, r_squared })
}

/// Bin-wise mean of spectra over identical frequency grids.
pub fn ensemble_average(spectra: &[Spectrum]) -> Result<Spectrum> {
    let first = spectra.first().ok_or(Error::EmptyInput)?;
    for s in &spectra[1..] {
        if s.freqs.len() != first.freqs.len()
            || s.dt != first.dt
            || s.freqs.iter().zip(&first.freqs).any(|(a, b)| a != b)
        {
            return Err(Error::GridMismatch);
        }
    }
    let mut power = vec![0.0f64; first.power.len()];
    for s in spectra {
        for (acc, &p) in power.iter_mut().zip(&s.power) {
            *acc += p;
        }
    }
    for p in &mut power {
        *p /= spectra.len() as f64;
    }
    Ok(Spectrum {
        freqs: first.freqs.clone(),
        power,
        dt: first.dt,
        n_segments: spectra.iter().map(|s| s.n_segments).sum(),
    })
}

/// Fit the tail of a histogram over its top `decades` decades of
/// occupied bins.
pub fn fit_histogram_tail(hist: &Histogram, decades: f64) -> Result<PowerLawFit> {
    let centers = hist.bin_centers();
    let occupied_max = centers
        .iter()
        .zip(&hist.densities)
        .filter(|&(_, &d)| d > 0.0)
        .map(|(&c, _)| c)
        .fold(f64::NEG_INFINITY, f64::max);
    if !occupied_max.is_finite() {
        return Err(Error::EmptyInput);
    }
    let lo = occupied_max / 10f64.powf(decades);
    fit_power_law(&centers, &hist.densities, (lo, occupied_max * 1.0001))
}
