//! `volspec` command line: reproducible experiment runner.
//!
//! Subcommands: `run` (simulate + analyze + write CSVs), `predict`
//! (diffusion-limit algebra only), `analyze` (re-analyze an existing
//! trajectory CSV), `presets` (list built-in figure parameter sets).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use volspec::config::{
    load_config, parse_fit_range_str, preset, ExperimentConfig, FitRange, ModelConfig,
    PRESET_NAMES,
};
use volspec::ensemble::configure_jobs;
use volspec::error::{Error, Result};
use volspec::experiment::{
    analyze_trajectories, prediction, prediction_lines, report_text, run_to_dir,
    write_histogram_csv, write_spectrum_csv,
};
use volspec::garch::{GarchSpec, GarchVariant};
use volspec::limit::{frequency_range, predicted_beta, FrequencyBand, PsdExponent};
use volspec::sde::{Restriction, SdeSpec};
use volspec::trajectory::Trajectory;

#[derive(Parser)]
#[command(name = "volspec", version, about = "Volatility-model simulation and 1/f-noise analysis lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an ensemble, analyze it, and write CSVs plus a fit report.
    Run(RunArgs),
    /// Print diffusion-limit predictions for a model without simulating.
    Predict(PredictArgs),
    /// Re-analyze an existing trajectory CSV.
    Analyze(AnalyzeArgs),
    /// List the built-in figure presets.
    Presets,
}

#[derive(Args, Default)]
struct ModelFlags {
    /// GARCH constant term.
    #[arg(short = 'a', long)]
    a: Option<f64>,
    /// GARCH innovation coefficient.
    #[arg(short = 'b', long)]
    b: Option<f64>,
    /// GARCH persistence coefficient.
    #[arg(short = 'c', long)]
    c: Option<f64>,
    /// Nonlinear GARCH power.
    #[arg(long)]
    mu: Option<f64>,
    /// GARCH discretization period.
    #[arg(long)]
    h: Option<f64>,
    /// SDE multiplicative-noise exponent.
    #[arg(long)]
    eta: Option<f64>,
    /// SDE PDF tail exponent.
    #[arg(long)]
    lambda: Option<f64>,
    /// SDE noise scale.
    #[arg(long)]
    sigma: Option<f64>,
    /// SDE lower boundary.
    #[arg(long)]
    xmin: Option<f64>,
    /// SDE upper boundary.
    #[arg(long)]
    xmax: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in parameter set (fig1, fig2a, fig2b, fig2c, fig3, fig4).
    #[arg(long)]
    preset: Option<String>,
    /// Config file (sectioned key = value text); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread cap for the ensemble (0 = auto).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output samples per run.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    n_runs: Option<usize>,
    /// SDE output sampling interval.
    #[arg(long)]
    dt_out: Option<f64>,
    /// Adaptive time-step accuracy parameter.
    #[arg(long)]
    kappa: Option<f64>,
    /// Periodogram segments.
    #[arg(long)]
    segments: Option<usize>,
    #[arg(long)]
    bins_per_decade: Option<usize>,
    /// PDF fit range: `lo hi` or `top N`.
    #[arg(long)]
    pdf_range: Option<String>,
    /// PSD fit range: `lo hi` (cycles per unit time).
    #[arg(long)]
    psd_range: Option<String>,
    #[command(flatten)]
    model: ModelFlags,
}

#[derive(Args)]
struct PredictArgs {
    /// Model kind: sde | garch-linear | garch-power-odd | garch-power-abs.
    #[arg(long)]
    model: String,
    #[command(flatten)]
    flags: ModelFlags,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Trajectory CSV produced by `run`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 16)]
    segments: usize,
    #[arg(long, default_value_t = 10)]
    bins_per_decade: usize,
    #[arg(long, default_value = "top 2")]
    pdf_range: String,
    #[arg(long, default_value = "1e-3 1e-1")]
    psd_range: String,
}

fn apply_model_flags(cfg: &mut ExperimentConfig, flags: &ModelFlags) -> Result<()> {
    match &mut cfg.model {
        ModelConfig::Garch(g) => {
            for (name, set) in [
                ("--eta", flags.eta.is_some()),
                ("--lambda", flags.lambda.is_some()),
                ("--sigma", flags.sigma.is_some()),
                ("--xmin", flags.xmin.is_some()),
                ("--xmax", flags.xmax.is_some()),
            ] {
                if set {
                    return Err(Error::Config(format!("{name} does not apply to a GARCH model")));
                }
            }
            let variant = match (g.variant, flags.mu) {
                (GarchVariant::PowerOdd { .. }, Some(mu)) => GarchVariant::PowerOdd { mu: mu as u32 },
                (GarchVariant::PowerAbs { .. }, Some(mu)) => GarchVariant::PowerAbs { mu },
                (GarchVariant::Linear, Some(_)) => {
                    return Err(Error::Config("--mu does not apply to linear GARCH".into()))
                }
                (v, None) => v,
            };
            *g = GarchSpec::new(
                variant,
                flags.a.unwrap_or(g.a),
                flags.b.unwrap_or(g.b),
                flags.c.unwrap_or(g.c),
                flags.h.unwrap_or(g.h),
            );
        }
        ModelConfig::Sde(s) => {
            for (name, set) in [
                ("-a", flags.a.is_some()),
                ("-b", flags.b.is_some()),
                ("-c", flags.c.is_some()),
                ("--mu", flags.mu.is_some()),
                ("--h", flags.h.is_some()),
            ] {
                if set {
                    return Err(Error::Config(format!("{name} does not apply to an SDE model")));
                }
            }
            *s = SdeSpec::new(
                flags.eta.unwrap_or(s.eta),
                flags.lambda.unwrap_or(s.lambda),
                flags.sigma.unwrap_or(s.sigma),
                flags.xmin.unwrap_or(s.x_min),
                flags.xmax.unwrap_or(s.x_max),
                s.restriction,
            );
        }
    }
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    configure_jobs(args.jobs);
    let mut cfg = match (&args.preset, &args.config) {
        (Some(name), None) => preset(name)
            .ok_or_else(|| Error::Config(format!("unknown preset {name:?} (see `volspec presets`)")))?,
        (None, Some(path)) => load_config(path)?,
        (Some(_), Some(_)) => {
            return Err(Error::Config("--preset and --config are mutually exclusive".into()))
        }
        (None, None) => {
            return Err(Error::Config("one of --preset or --config is required".into()))
        }
    };
    apply_model_flags(&mut cfg, &args.model)?;
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = &args.out {
        cfg.output_dir = v.clone();
    }
    if let Some(v) = args.n {
        cfg.n_out = v;
    }
    if let Some(v) = args.burn_in {
        cfg.burn_in = v;
    }
    if let Some(v) = args.n_runs {
        cfg.n_runs = v;
    }
    if let Some(v) = args.dt_out {
        cfg.dt_out = v;
    }
    if let Some(v) = args.kappa {
        cfg.kappa = v;
    }
    if let Some(v) = args.segments {
        cfg.analysis.n_segments = v;
    }
    if let Some(v) = args.bins_per_decade {
        cfg.analysis.bins_per_decade = v;
    }
    if let Some(v) = &args.pdf_range {
        cfg.analysis.pdf_fit_range = parse_fit_range_str(v)?;
    }
    if let Some(v) = &args.psd_range {
        match parse_fit_range_str(v)? {
            FitRange::Explicit(lo, hi) => cfg.analysis.psd_fit_range = (lo, hi),
            _ => return Err(Error::Config("--psd-range must be explicit `lo hi`".into())),
        }
    }

    let report = run_to_dir(&cfg)?;
    print!("{}", report_text(&cfg, &report));
    eprintln!("wrote {}", cfg.output_dir.display());
    Ok(())
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let kind = args.model.to_lowercase();
    if kind == "sde" {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Config(format!("sde prediction requires --{name}")))
        };
        let eta = need(args.flags.eta, "eta")?;
        let lambda = need(args.flags.lambda, "lambda")?;
        let sigma = args.flags.sigma.unwrap_or(1.0);
        let x_min = need(args.flags.xmin, "xmin")?;
        let x_max = need(args.flags.xmax, "xmax")?;
        println!("lambda = {lambda}");
        println!("eta = {eta}");
        match predicted_beta(lambda, eta) {
            PsdExponent::Value(b) => println!("beta = {b}"),
            PsdExponent::Divergent => println!("beta = Divergent"),
        }
        match frequency_range(eta, sigma, x_min, x_max) {
            FrequencyBand::Band { f_low, f_high } => println!("f_range = {f_low} {f_high}"),
            FrequencyBand::ZeroWidth => println!("f_range = ZeroWidth"),
        }
        return Ok(());
    }

    let variant = match kind.as_str() {
        "garch-linear" => GarchVariant::Linear,
        "garch-power-odd" => GarchVariant::PowerOdd {
            mu: args.flags.mu.ok_or_else(|| Error::Config("requires --mu".into()))? as u32,
        },
        "garch-power-abs" => GarchVariant::PowerAbs {
            mu: args.flags.mu.ok_or_else(|| Error::Config("requires --mu".into()))?,
        },
        other => return Err(Error::Config(format!("unknown model {other:?}"))),
    };
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::Config(format!("garch prediction requires -{name}")))
    };
    let spec = GarchSpec::new(
        variant,
        need(args.flags.a, "a")?,
        need(args.flags.b, "b")?,
        need(args.flags.c, "c")?,
        args.flags.h.unwrap_or(1.0),
    );
    let cfg = ExperimentConfig {
        model: ModelConfig::Garch(spec),
        seed: 0,
        n_out: 2,
        burn_in: 0,
        n_runs: 1,
        dt_out: 1.0,
        kappa: 0.1,
        analysis: Default::default(),
        output_dir: PathBuf::from("."),
    };
    let dl = prediction(&cfg)?.expect("garch model always has a prediction");
    for line in prediction_lines(&dl) {
        println!("{line}");
    }
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let traj = Trajectory::read_csv_file(&args.input)?;
    let psd_range = match parse_fit_range_str(&args.psd_range)? {
        FitRange::Explicit(lo, hi) => (lo, hi),
        _ => return Err(Error::Config("--psd-range must be explicit `lo hi`".into())),
    };
    // Reconstruct a minimal config around the stored trajectory.
    let cfg = ExperimentConfig {
        model: ModelConfig::Sde(SdeSpec::new(2.0, 3.0, 1.0, 1.0, 1e3, Restriction::ReflectiveBoundaries)),
        seed: traj.seed,
        n_out: traj.values.len(),
        burn_in: traj.burn_in,
        n_runs: 1,
        dt_out: traj.dt_out,
        kappa: 0.1,
        analysis: volspec::config::AnalysisConfig {
            bins_per_decade: args.bins_per_decade,
            n_segments: args.segments,
            pdf_fit_range: parse_fit_range_str(&args.pdf_range)?,
            psd_fit_range: psd_range,
        },
        output_dir: args.out.clone(),
    };
    let analysis = analyze_trajectories(&cfg, std::slice::from_ref(&traj))?;
    std::fs::create_dir_all(&args.out)?;
    let header = vec![format!("reanalysis of {} ({})", args.input.display(), traj.provenance)];
    write_histogram_csv(&args.out.join("pdf.csv"), &analysis.histogram, &header)?;
    write_spectrum_csv(&args.out.join("psd.csv"), &analysis.spectrum, &header)?;
    println!("pdf_exponent = {}", analysis.pdf_fit.exponent);
    println!("pdf_stderr = {}", analysis.pdf_fit.stderr);
    println!("pdf_r_squared = {}", analysis.pdf_fit.r_squared);
    println!("psd_exponent = {}", analysis.psd_fit.exponent);
    println!("psd_stderr = {}", analysis.psd_fit.stderr);
    println!("psd_r_squared = {}", analysis.psd_fit.r_squared);
    Ok(())
}

fn cmd_presets() {
    for name in PRESET_NAMES {
        let cfg = preset(name).expect("preset list is consistent");
        let desc = match &cfg.model {
            ModelConfig::Sde(s) => format!(
                "sde eta={} lambda={} sigma={} x in [{}, {}]",
                s.eta, s.lambda, s.sigma, s.x_min, s.x_max
            ),
            ModelConfig::Garch(g) => format!(
                "garch {:?} a={} b={} c={}",
                g.variant, g.a, g.b, g.c
            ),
        };
        println!("{name:6} {desc}  (n={}, runs={})", cfg.n_out, cfg.n_runs);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Presets => {
            cmd_presets();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
