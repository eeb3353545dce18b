//! Experiment configuration: figure presets, flat key-value config files
//! with sections, and validation.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::garch::{GarchSpec, GarchVariant};
use crate::sde::{Restriction, SdeSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    Sde(SdeSpec),
    Garch(GarchSpec),
}

/// PDF fit abscissa range: explicit bounds, or the top `n` decades of
/// occupied histogram bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitRange {
    Explicit(f64, f64),
    TopDecades(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub bins_per_decade: usize,
    pub n_segments: usize,
    pub pdf_fit_range: FitRange,
    /// PSD fit range in cycles per unit time.
    pub psd_fit_range: (f64, f64),
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            bins_per_decade: 10,
            n_segments: 16,
            pdf_fit_range: FitRange::TopDecades(2.0),
            psd_fit_range: (1e-3, 1e-1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub seed: u64,
    pub n_out: usize,
    pub burn_in: usize,
    pub n_runs: usize,
    /// Output sampling interval; only used by the SDE model (GARCH
    /// samples at its own period `h`).
    pub dt_out: f64,
    pub kappa: f64,
    pub analysis: AnalysisConfig,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        match &self.model {
            ModelConfig::Sde(spec) => spec.validate()?,
            ModelConfig::Garch(spec) => spec.validate()?,
        }
        if self.n_runs < 1 {
            return Err(Error::Config("n_runs must be at least 1".into()));
        }
        if self.n_out < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n_out)));
        }
        if let FitRange::Explicit(lo, hi) = self.analysis.pdf_fit_range {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::Config(format!("pdf_fit_range ({lo}, {hi}) is not well ordered")));
            }
        }
        let (lo, hi) = self.analysis.psd_fit_range;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Config(format!("psd_fit_range ({lo}, {hi}) is not well ordered")));
        }
        Ok(())
    }

    /// One-line-per-field echo for CSV comment headers and reports.
    pub fn summary(&self) -> Vec<String> {
        let mut out = Vec::new();
        match &self.model {
            ModelConfig::Sde(s) => {
                out.push(format!(
                    "model: sde eta={} lambda={} sigma={} x_min={} x_max={} restriction={:?} x0={}",
                    s.eta, s.lambda, s.sigma, s.x_min, s.x_max, s.restriction, s.x0
                ));
            }
            ModelConfig::Garch(g) => {
                out.push(format!(
                    "model: garch {:?} a={} b={} c={} h={} sigma2_0={}",
                    g.variant, g.a, g.b, g.c, g.h, g.sigma2_0
                ));
            }
        }
        out.push(format!(
            "run: seed={} n={} burn_in={} n_runs={} dt_out={} kappa={}",
            self.seed, self.n_out, self.burn_in, self.n_runs, self.dt_out, self.kappa
        ));
        out.push(format!(
            "analysis: bins_per_decade={} n_segments={} pdf_fit_range={:?} psd_fit_range={:?}",
            self.analysis.bins_per_decade,
            self.analysis.n_segments,
            self.analysis.pdf_fit_range,
            self.analysis.psd_fit_range
        ));
        out
    }
}

pub const PRESET_NAMES: &[&str] = &["fig1", "fig2a", "fig2b", "fig2c", "fig3", "fig4"];

/// Built-in parameter sets reproducing the reference figures.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    // Seeds are frozen at values whose tail realizations are typical of
    // the seed ensemble (the top-two-decade tail fit scatters by about
    // +/- 0.2 from one seed to the next at 1e7 samples).
    let linear = |c: f64, seed: u64| ExperimentConfig {
        model: ModelConfig::Garch(GarchSpec::new(GarchVariant::Linear, 0.015, 0.1, c, 1.0)),
        seed,
        n_out: 10_000_000,
        burn_in: 100_000,
        n_runs: 1,
        dt_out: 1.0,
        kappa: 0.1,
        analysis: AnalysisConfig {
            pdf_fit_range: FitRange::TopDecades(2.0),
            // Mid-band window where the limit SDE behaves like geometric
            // Brownian motion (PSD exponent near -2).
            psd_fit_range: (1e-2, 1e-1),
            ..AnalysisConfig::default()
        },
        output_dir: PathBuf::from("out"),
    };
    // The nonlinear models relax extremely slowly at small sigma^2 (the
    // local relaxation time is ~1/(B^2 y) steps), so the burn-in is much
    // longer than for the linear model and the spectrum uses a single
    // segment per run to resolve the lowest decade of the 1/f band.
    let nonlinear = |variant: GarchVariant, c: f64| ExperimentConfig {
        model: ModelConfig::Garch(GarchSpec::new(variant, 1e-6, 1e-3, c, 1.0)),
        seed: 11,
        n_out: 1 << 22,
        burn_in: 500_000,
        n_runs: 10,
        dt_out: 1.0,
        kappa: 0.1,
        analysis: AnalysisConfig {
            n_segments: 1,
            pdf_fit_range: FitRange::Explicit(0.5, 20.0),
            psd_fit_range: (1e-7, 1e-4),
            ..AnalysisConfig::default()
        },
        output_dir: PathBuf::from("out"),
    };
    match name {
        "fig1" => Some(ExperimentConfig {
            model: ModelConfig::Sde(SdeSpec::new(
                2.0,
                3.0,
                1.0,
                1.0,
                1e3,
                Restriction::ReflectiveBoundaries,
            )),
            seed: 1,
            n_out: 1 << 20,
            burn_in: (1 << 20) / 10,
            n_runs: 10,
            dt_out: 5e-4,
            kappa: 0.1,
            analysis: AnalysisConfig {
                pdf_fit_range: FitRange::Explicit(3.0, 100.0),
                psd_fit_range: (2.0, 500.0),
                ..AnalysisConfig::default()
            },
            output_dir: PathBuf::from("out"),
        }),
        "fig2a" => Some(linear(0.89, 5)),
        "fig2b" => Some(linear(0.88, 1)),
        "fig2c" => Some(linear(0.87, 1)),
        "fig3" => Some(nonlinear(GarchVariant::PowerOdd { mu: 3 }, 1.0)),
        "fig4" => {
            let c = 2.0 * (2.0 / std::f64::consts::PI).sqrt() * 1e-3;
            Some(nonlinear(GarchVariant::PowerAbs { mu: 3.0 }, c))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------
// Config file parsing
// ---------------------------------------------------------------------

#[derive(Debug, Default)]
struct RawModel {
    kind: Option<String>,
    eta: Option<f64>,
    lambda: Option<f64>,
    sigma: Option<f64>,
    x_min: Option<f64>,
    x_max: Option<f64>,
    restriction: Option<String>,
    m: Option<f64>,
    x0: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    mu: Option<f64>,
    h: Option<f64>,
    sigma2_0: Option<f64>,
}

/// Parse a sectioned key-value config file. Unknown keys are rejected
/// with line diagnostics. Sections: `[model]`, `[run]`, `[analysis]`.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut section = String::new();
    let mut model = RawModel::default();
    let mut cfg = ExperimentConfig {
        model: ModelConfig::Sde(SdeSpec::new(2.0, 3.0, 1.0, 1.0, 1e3, Restriction::ReflectiveBoundaries)),
        seed: 1,
        n_out: 1 << 20,
        burn_in: 0,
        n_runs: 1,
        dt_out: 1e-3,
        kappa: 0.1,
        analysis: AnalysisConfig::default(),
        output_dir: PathBuf::from("out"),
    };
    let mut saw_anything = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        saw_anything = true;
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_lowercase();
            if !["model", "run", "analysis"].contains(&section.as_str()) {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unknown section [{section}]"),
                });
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("expected `key = value`, got {line:?}"),
        })?;
        let key = key.trim().to_lowercase();
        let value = value.trim();
        let bad_num = |what: &str| Error::Parse {
            line: lineno,
            msg: format!("{what}: not a number: {value:?}"),
        };
        let f = || value.parse::<f64>().map_err(|_| bad_num(&key));
        let u = || value.parse::<u64>().map_err(|_| bad_num(&key));

        match (section.as_str(), key.as_str()) {
            ("model", "type") => model.kind = Some(value.to_lowercase()),
            ("model", "eta") => model.eta = Some(f()?),
            ("model", "lambda") => model.lambda = Some(f()?),
            ("model", "sigma") => model.sigma = Some(f()?),
            ("model", "x_min") => model.x_min = Some(f()?),
            ("model", "x_max") => model.x_max = Some(f()?),
            ("model", "restriction") => model.restriction = Some(value.to_lowercase()),
            ("model", "m") => model.m = Some(f()?),
            ("model", "x0") => model.x0 = Some(f()?),
            ("model", "a") => model.a = Some(f()?),
            ("model", "b") => model.b = Some(f()?),
            ("model", "c") => model.c = Some(f()?),
            ("model", "mu") => model.mu = Some(f()?),
            ("model", "h") => model.h = Some(f()?),
            ("model", "sigma2_0") => model.sigma2_0 = Some(f()?),
            ("run", "seed") => cfg.seed = u()?,
            ("run", "n") => cfg.n_out = u()? as usize,
            ("run", "burn_in") => cfg.burn_in = u()? as usize,
            ("run", "n_runs") => cfg.n_runs = u()? as usize,
            ("run", "dt_out") => cfg.dt_out = f()?,
            ("run", "kappa") => cfg.kappa = f()?,
            ("run", "output_dir") => cfg.output_dir = PathBuf::from(value),
            ("analysis", "bins_per_decade") => cfg.analysis.bins_per_decade = u()? as usize,
            ("analysis", "n_segments") => cfg.analysis.n_segments = u()? as usize,
            ("analysis", "pdf_fit_range") => {
                cfg.analysis.pdf_fit_range = parse_fit_range(value, lineno)?
            }
            ("analysis", "psd_fit_range") => {
                match parse_fit_range(value, lineno)? {
                    FitRange::Explicit(lo, hi) => cfg.analysis.psd_fit_range = (lo, hi),
                    FitRange::TopDecades(_) => {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: "psd_fit_range must be explicit `lo hi`".into(),
                        })
                    }
                }
            }
            ("", k) => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("key {k:?} outside any section"),
                })
            }
            (s, k) => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unknown key {k:?} in section [{s}]"),
                })
            }
        }
    }

    if !saw_anything {
        return Err(Error::Parse { line: 0, msg: "empty config".into() });
    }
    let kind = model.kind.clone().ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing `type` in [model] section".into(),
    })?;
    cfg.model = build_model(&kind, &model)?;
    Ok(cfg)
}

/// Parse a fit range given as `lo hi` or `top N` (CLI flag form).
pub fn parse_fit_range_str(value: &str) -> Result<FitRange> {
    parse_fit_range(value, 0)
}

fn parse_fit_range(value: &str, lineno: usize) -> Result<FitRange> {
    let fields: Vec<&str> = value.split_whitespace().collect();
    let err = |msg: String| Error::Parse { line: lineno, msg };
    match fields.as_slice() {
        ["top", n] => {
            let d: f64 = n
                .parse()
                .map_err(|_| err(format!("not a number: {n:?}")))?;
            Ok(FitRange::TopDecades(d))
        }
        [lo, hi] => {
            let lo: f64 = lo.parse().map_err(|_| err(format!("not a number: {lo:?}")))?;
            let hi: f64 = hi.parse().map_err(|_| err(format!("not a number: {hi:?}")))?;
            Ok(FitRange::Explicit(lo, hi))
        }
        _ => Err(err(format!("expected `lo hi` or `top N`, got {value:?}"))),
    }
}

fn build_model(kind: &str, m: &RawModel) -> Result<ModelConfig> {
    let missing = |what: &str| Error::Parse {
        line: 0,
        msg: format!("model type {kind:?} requires `{what}`"),
    };
    match kind {
        "sde" => {
            let restriction = match m.restriction.as_deref().unwrap_or("reflective") {
                "reflective" => Restriction::ReflectiveBoundaries,
                "cutoffs" => Restriction::ExponentialCutoffs { m: m.m.unwrap_or(1.0) },
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("unknown restriction {other:?} (want reflective|cutoffs)"),
                    })
                }
            };
            let mut spec = SdeSpec::new(
                m.eta.ok_or_else(|| missing("eta"))?,
                m.lambda.ok_or_else(|| missing("lambda"))?,
                m.sigma.unwrap_or(1.0),
                m.x_min.ok_or_else(|| missing("x_min"))?,
                m.x_max.ok_or_else(|| missing("x_max"))?,
                restriction,
            );
            if let Some(x0) = m.x0 {
                spec.x0 = x0;
            }
            Ok(ModelConfig::Sde(spec))
        }
        "garch-linear" | "garch-power-odd" | "garch-power-abs" => {
            let variant = match kind {
                "garch-linear" => GarchVariant::Linear,
                "garch-power-odd" => {
                    let mu = m.mu.ok_or_else(|| missing("mu"))?;
                    GarchVariant::PowerOdd { mu: mu as u32 }
                }
                _ => GarchVariant::PowerAbs { mu: m.mu.ok_or_else(|| missing("mu"))? },
            };
            let mut spec = GarchSpec::new(
                variant,
                m.a.ok_or_else(|| missing("a"))?,
                m.b.ok_or_else(|| missing("b"))?,
                m.c.ok_or_else(|| missing("c"))?,
                m.h.unwrap_or(1.0),
            );
            if let Some(s0) = m.sigma2_0 {
                spec.sigma2_0 = s0;
            }
            Ok(ModelConfig::Garch(spec))
        }
        other => Err(Error::Parse {
            line: 0,
            msg: format!("unknown model type {other:?}"),
        }),
    }
}
