//! End-to-end experiment pipeline: simulate an ensemble, estimate its
//! statistics, fit the power-law exponents, and (for GARCH models)
//! compare against the diffusion-limit predictions.

use std::io::Write as _;
use std::path::Path;

use crate::config::{ExperimentConfig, FitRange, ModelConfig};
use crate::ensemble::run_indexed;
use crate::error::{Error, Result};
use crate::garch::{simulate_garch, GarchVariant};
use crate::limit::{
    map_linear, map_power_abs, map_power_odd, CutoffScales, DiffusionLimit, FrequencyBand,
    PsdExponent,
};
use crate::sde::simulate_sde;
use crate::stats::{
    ensemble_average, fit_histogram_tail, fit_power_law, pdf_estimate_pooled, psd_estimate,
    Histogram, PowerLawFit, Spectrum,
};
use crate::trajectory::Trajectory;

/// Tolerances used for the pass/fail deltas in the fit report.
pub const PDF_EXPONENT_TOL: f64 = 0.3;
pub const PSD_EXPONENT_TOL: f64 = 0.2;

#[derive(Debug, Clone)]
pub struct Analysis {
    pub histogram: Histogram,
    pub spectrum: Spectrum,
    pub pdf_fit: PowerLawFit,
    pub psd_fit: PowerLawFit,
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub trajectories: Vec<Trajectory>,
    pub clamp_events: u64,
    pub analysis: Analysis,
    pub prediction: Option<DiffusionLimit>,
}

/// Simulate `n_runs` trajectories with seeds `seed .. seed + n_runs - 1`.
pub fn simulate_ensemble(cfg: &ExperimentConfig) -> Result<(Vec<Trajectory>, u64)> {
    cfg.validate()?;
    match &cfg.model {
        ModelConfig::Sde(spec) => {
            let trajs = run_indexed(cfg.n_runs, |i| {
                simulate_sde(
                    spec,
                    cfg.seed + i as u64,
                    cfg.n_out,
                    cfg.dt_out,
                    cfg.kappa,
                    cfg.burn_in,
                )
            })?;
            Ok((trajs, 0))
        }
        ModelConfig::Garch(spec) => {
            let outputs = run_indexed(cfg.n_runs, |i| {
                simulate_garch(spec, cfg.seed + i as u64, cfg.n_out, cfg.burn_in)
            })?;
            let clamp_events = outputs.iter().map(|o| o.clamp_events).sum();
            Ok((outputs.into_iter().map(|o| o.trajectory).collect(), clamp_events))
        }
    }
}

/// Pooled histogram, ensemble-averaged spectrum, and both power-law fits.
pub fn analyze_trajectories(
    cfg: &ExperimentConfig,
    trajectories: &[Trajectory],
) -> Result<Analysis> {
    let sets: Vec<&[f64]> = trajectories.iter().map(|t| t.values.as_slice()).collect();
    let histogram = pdf_estimate_pooled(&sets, cfg.analysis.bins_per_decade)?;

    let spectra: Vec<Spectrum> = trajectories
        .iter()
        .map(|t| psd_estimate(t, cfg.analysis.n_segments))
        .collect::<Result<_>>()?;
    let spectrum = ensemble_average(&spectra)?;

    let centers = histogram.bin_centers();
    let pdf_fit = match cfg.analysis.pdf_fit_range {
        FitRange::Explicit(lo, hi) => fit_power_law(&centers, &histogram.densities, (lo, hi))?,
        FitRange::TopDecades(d) => fit_histogram_tail(&histogram, d)?,
    };
    let psd_fit = fit_power_law(&spectrum.freqs, &spectrum.power, cfg.analysis.psd_fit_range)?;

    Ok(Analysis { histogram, spectrum, pdf_fit, psd_fit })
}

/// Diffusion-limit prediction for a GARCH model config, if applicable.
pub fn prediction(cfg: &ExperimentConfig) -> Result<Option<DiffusionLimit>> {
    match &cfg.model {
        ModelConfig::Sde(_) => Ok(None),
        ModelConfig::Garch(g) => {
            let dl = match g.variant {
                GarchVariant::Linear => map_linear(g.a, g.b, g.c, g.h)?,
                GarchVariant::PowerOdd { mu } => map_power_odd(g.a, g.b, g.c, mu, g.h)?,
                GarchVariant::PowerAbs { mu } => map_power_abs(g.a, g.b, g.c, mu, g.h)?,
            };
            Ok(Some(dl))
        }
    }
}

/// Full pipeline: simulate, analyze, predict.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (trajectories, clamp_events) = simulate_ensemble(cfg)?;
    let analysis = analyze_trajectories(cfg, &trajectories)?;
    let prediction = prediction(cfg)?;
    Ok(ExperimentReport { trajectories, clamp_events, analysis, prediction })
}

/// Key-value lines describing a diffusion-limit prediction.
pub fn prediction_lines(dl: &DiffusionLimit) -> Vec<String> {
    let mut out = vec![
        format!("A = {}", dl.big_a),
        format!("B_squared = {}", dl.big_b_sq),
        format!("C = {}", dl.big_c),
        format!("lambda = {}", dl.lambda),
        format!("eta = {}", dl.eta),
    ];
    match dl.scales {
        CutoffScales::Linear { y_min } => out.push(format!("y_min = {y_min}")),
        CutoffScales::PowerOdd { y1, y2 } => {
            out.push(format!("y1 = {y1}"));
            match y2 {
                Some(v) => out.push(format!("y2 = {v}")),
                // C <= 0: the closed-form upper scale does not exist.
                None => out.push("y2 = absent (C <= 0)".to_string()),
            }
        }
        CutoffScales::PowerAbs { y1, y3, c_sign } => {
            out.push(format!("y1 = {y1}"));
            out.push(format!("y3 = {y3}"));
            out.push(format!("sign_C = {c_sign}"));
        }
    }
    match dl.beta_predicted {
        PsdExponent::Value(b) => out.push(format!("beta = {b}")),
        PsdExponent::Divergent => out.push("beta = Divergent".to_string()),
    }
    match dl.f_range {
        FrequencyBand::Band { f_low, f_high } => {
            out.push(format!("f_range = {f_low} {f_high}"));
        }
        FrequencyBand::ZeroWidth => out.push("f_range = ZeroWidth".to_string()),
    }
    out
}

fn fit_lines(prefix: &str, fit: &PowerLawFit) -> Vec<String> {
    vec![
        format!("{prefix}_exponent = {}", fit.exponent),
        format!("{prefix}_stderr = {}", fit.stderr),
        format!("{prefix}_fit_range = {} {}", fit.range.0, fit.range.1),
        format!("{prefix}_r_squared = {}", fit.r_squared),
    ]
}

/// Render the fit report (fits.txt contents).
pub fn report_text(cfg: &ExperimentConfig, report: &ExperimentReport) -> String {
    let mut lines = vec![format!("# volspec fit report v{}", env!("CARGO_PKG_VERSION"))];
    for l in cfg.summary() {
        lines.push(format!("# {l}"));
    }
    lines.extend(fit_lines("pdf", &report.analysis.pdf_fit));
    lines.extend(fit_lines("psd", &report.analysis.psd_fit));
    lines.push(format!("clamp_events = {}", report.clamp_events));
    lines.push(format!("histogram_excluded = {}", report.analysis.histogram.n_excluded));

    if let Some(dl) = &report.prediction {
        lines.push("# diffusion-limit prediction".to_string());
        lines.extend(prediction_lines(dl));
        let pdf_delta = report.analysis.pdf_fit.exponent - (-dl.lambda);
        lines.push(format!("pdf_delta = {pdf_delta}"));
        lines.push(format!(
            "pdf_check = {} (tolerance {PDF_EXPONENT_TOL})",
            if pdf_delta.abs() <= PDF_EXPONENT_TOL { "PASS" } else { "FAIL" }
        ));
        if let PsdExponent::Value(beta) = dl.beta_predicted {
            let psd_delta = report.analysis.psd_fit.exponent - (-beta);
            lines.push(format!("psd_delta = {psd_delta}"));
            lines.push(format!(
                "psd_check = {} (tolerance {PSD_EXPONENT_TOL})",
                if psd_delta.abs() <= PSD_EXPONENT_TOL { "PASS" } else { "FAIL" }
            ));
        } else {
            lines.push("psd_check = n/a (beta divergent at eta = 1)".to_string());
        }
    }
    lines.join("\n") + "\n"
}

/// Write trajectory CSVs, pdf.csv, psd.csv and fits.txt into
/// `cfg.output_dir`.
pub fn write_outputs(cfg: &ExperimentConfig, report: &ExperimentReport) -> Result<()> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir)?;
    let header = cfg.summary();

    for (i, traj) in report.trajectories.iter().enumerate() {
        let name = if i == 0 {
            "trajectory.csv".to_string()
        } else {
            format!("trajectory_r{i}.csv")
        };
        traj.write_csv_file(&dir.join(name), &header)?;
    }

    write_histogram_csv(&dir.join("pdf.csv"), &report.analysis.histogram, &header)?;
    write_spectrum_csv(&dir.join("psd.csv"), &report.analysis.spectrum, &header)?;
    std::fs::write(dir.join("fits.txt"), report_text(cfg, report))?;
    Ok(())
}

pub fn write_histogram_csv(path: &Path, hist: &Histogram, header: &[String]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "# volspec histogram v{}", env!("CARGO_PKG_VERSION"))?;
    for l in header {
        writeln!(w, "# {l}")?;
    }
    writeln!(w, "# n_samples: {}  n_excluded: {}", hist.n_samples, hist.n_excluded)?;
    writeln!(w, "bin_center,density")?;
    for (c, d) in hist.bin_centers().iter().zip(&hist.densities) {
        writeln!(w, "{c},{d}")?;
    }
    Ok(())
}

pub fn write_spectrum_csv(path: &Path, spec: &Spectrum, header: &[String]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "# volspec spectrum v{}", env!("CARGO_PKG_VERSION"))?;
    for l in header {
        writeln!(w, "# {l}")?;
    }
    writeln!(w, "# dt: {}  n_segments: {}", spec.dt, spec.n_segments)?;
    writeln!(w, "freq,power")?;
    for (f, p) in spec.freqs.iter().zip(&spec.power) {
        writeln!(w, "{f},{p}")?;
    }
    Ok(())
}

/// `run` subcommand body: full pipeline plus file outputs.
pub fn run_to_dir(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    // Validate before simulating so config errors never leave files behind.
    cfg.validate()?;
    if let Err(e) = std::fs::create_dir_all(&cfg.output_dir) {
        return Err(Error::Io(e));
    }
    let report = run_experiment(cfg)?;
    write_outputs(cfg, &report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{preset, AnalysisConfig};
    use crate::garch::GarchSpec;
    use std::path::PathBuf;

    fn small_fig3_cfg(dir: PathBuf) -> ExperimentConfig {
        ExperimentConfig {
            model: ModelConfig::Garch(GarchSpec::new(
                GarchVariant::PowerOdd { mu: 3 },
                1e-6,
                1e-3,
                1.0,
                1.0,
            )),
            seed: 5,
            n_out: 1 << 14,
            burn_in: 1000,
            n_runs: 3,
            dt_out: 1.0,
            kappa: 0.1,
            analysis: AnalysisConfig {
                pdf_fit_range: FitRange::TopDecades(2.0),
                psd_fit_range: (1e-3, 1e-1),
                ..AnalysisConfig::default()
            },
            output_dir: dir,
        }
    }

    #[test]
    fn pipeline_produces_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_fig3_cfg(dir.path().join("out"));
        let report = run_to_dir(&cfg).unwrap();
        assert_eq!(report.trajectories.len(), 3);
        for name in ["trajectory.csv", "trajectory_r1.csv", "trajectory_r2.csv", "pdf.csv", "psd.csv", "fits.txt"] {
            assert!(cfg.output_dir.join(name).exists(), "{name} missing");
        }
        let fits = std::fs::read_to_string(cfg.output_dir.join("fits.txt")).unwrap();
        assert!(fits.contains("pdf_exponent"));
        assert!(fits.contains("lambda = 3"));
        assert!(fits.contains("beta = 1"));
    }

    #[test]
    fn same_seed_gives_byte_identical_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_fig3_cfg(dir.path().join("a"));
        run_to_dir(&cfg).unwrap();
        let first = std::fs::read(cfg.output_dir.join("psd.csv")).unwrap();
        let first_traj = std::fs::read(cfg.output_dir.join("trajectory.csv")).unwrap();
        cfg.output_dir = dir.path().join("b");
        run_to_dir(&cfg).unwrap();
        assert_eq!(first, std::fs::read(cfg.output_dir.join("psd.csv")).unwrap());
        assert_eq!(first_traj, std::fs::read(cfg.output_dir.join("trajectory.csv")).unwrap());
    }

    #[test]
    fn invalid_config_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_fig3_cfg(dir.path().join("out"));
        cfg.analysis.pdf_fit_range = FitRange::Explicit(100.0, 3.0);
        assert!(run_to_dir(&cfg).is_err());
        assert!(!cfg.output_dir.join("fits.txt").exists());
        assert!(!cfg.output_dir.join("trajectory.csv").exists());
    }

    #[test]
    fn prediction_matches_preset_model() {
        let cfg = preset("fig2a").unwrap();
        let dl = prediction(&cfg).unwrap().unwrap();
        assert!((dl.lambda - 3.0).abs() < 1e-12);
        let cfg = preset("fig1").unwrap();
        assert!(prediction(&cfg).unwrap().is_none());
    }
}
